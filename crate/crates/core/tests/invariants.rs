use std::collections::BTreeMap;

use proptest::prelude::*;

use homotopy_core::coalgebra::{basis_words, comultiply, graded_commutator, Coderivation};
use homotopy_core::family::MultilinearFamily;
use homotopy_core::poly::{Flavor, WordPoly};
use homotopy_core::structures::*;
use homotopy_core::{Element, GradedSpace, Scalar};

type Tensor2 = BTreeMap<(Vec<usize>, Vec<usize>), Scalar>;

/// A degree-`degree` family with arities `1..=max_arity` and coefficients drawn from `coeffs`.
fn family(space: &GradedSpace, flavor: Flavor, degree: i64, max_arity: usize, coeffs: &[i64]) -> MultilinearFamily {
    let mut next = coeffs.iter().cycle();
    let mut f = MultilinearFamily::new(flavor, degree);
    for n in 1..=max_arity {
        for w in basis_words(space, flavor, n) {
            let out = Element::from_terms(
                (0..space.dim())
                    .filter(|&i| space.degree(i) - space.word_degree(&w) == degree)
                    .map(|i| (i, Scalar::from(*next.next().unwrap())))
                    .filter(|(_, c)| !c.is_zero()),
            );
            if !out.is_zero() {
                f.add(space, 0, w, &out).unwrap();
            }
        }
    }
    f
}

fn space_of(degrees: &[i64]) -> GradedSpace {
    GradedSpace::new(degrees.iter().enumerate().map(|(i, &d)| (format!("e{i}"), d))).unwrap()
}

fn add(t: &mut Tensor2, key: (Vec<usize>, Vec<usize>), c: Scalar) {
    let e = t.entry(key.clone()).or_insert_with(Scalar::zero);
    *e += &c;
    if e.is_zero() {
        t.remove(&key);
    }
}

/// `Δ(D w)` and `(D ⊗ 1 + 1 ⊗ D) Δ(w)`; a coderivation makes them equal.
fn co_leibniz(space: &GradedSpace, flavor: Flavor, apply: impl Fn(&[usize]) -> WordPoly, odd: bool, w: &[usize]) -> (Tensor2, Tensor2) {
    let mut lhs = Tensor2::new();
    for ((_, u), c) in apply(w).iter() {
        for (k, s) in comultiply(space, flavor, u) {
            add(&mut lhs, k, c * &s);
        }
    }
    let mut rhs = Tensor2::new();
    for ((l, r), s) in comultiply(space, flavor, w) {
        for ((_, dl), c) in apply(&l).iter() {
            add(&mut rhs, (dl.clone(), r.clone()), &s * c);
        }
        let sign = Scalar::sign(odd && space.word_degree(&l).rem_euclid(2) == 1);
        for ((_, dr), c) in apply(&r).iter() {
            add(&mut rhs, (l.clone(), dr.clone()), &s * &(&sign * c));
        }
    }
    (lhs, rhs)
}

fn degrees() -> impl Strategy<Value = Vec<i64>> {
    proptest::collection::vec(-1i64..=2, 2..=3)
}

fn coeffs() -> impl Strategy<Value = Vec<i64>> {
    proptest::collection::vec(-2i64..=2, 48)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn first_order_lifts_are_coderivations(degs in degrees(), cs in coeffs(), symmetric in any::<bool>()) {
        let space = space_of(&degs);
        let flavor = if symmetric { Flavor::Symmetric } else { Flavor::Tensor };
        let d = Coderivation::lift_first_order(family(&space, flavor, 1, 2, &cs));
        for n in 0..=4 {
            for w in basis_words(&space, flavor, n) {
                let (lhs, rhs) = co_leibniz(&space, flavor, |u| d.apply(&space, &WordPoly::word(&space, flavor, u), 0), true, &w);
                prop_assert_eq!(lhs, rhs, "word {:?}", w);
            }
        }
    }

    #[test]
    fn lift_then_corestrict_is_identity(degs in degrees(), cs in coeffs(), symmetric in any::<bool>(), degree in -1i64..=1) {
        let space = space_of(&degs);
        let flavor = if symmetric { Flavor::Symmetric } else { Flavor::Tensor };
        let f = family(&space, flavor, degree, 3, &cs);
        prop_assert_eq!(Coderivation::lift_first_order(f.clone()).corestrict(&space, 3, 0), f);
    }

    #[test]
    fn commutator_is_antisymmetric_and_a_coderivation(degs in degrees(), a in coeffs(), b in coeffs(), symmetric in any::<bool>(), db in 0i64..=1) {
        let space = space_of(&degs);
        let flavor = if symmetric { Flavor::Symmetric } else { Flavor::Tensor };
        let m = Coderivation::lift_first_order(family(&space, flavor, 1, 2, &a));
        let n = Coderivation::lift_first_order(family(&space, flavor, db, 2, &b));
        let mn = graded_commutator(&space, &m, &n, 3, 0).unwrap();
        let nm = graded_commutator(&space, &n, &m, 3, 0).unwrap();
        let sign = Scalar::sign(db == 0);
        for (key, rows) in &mn {
            for (w, outs) in rows {
                for (o, c) in outs {
                    let other = nm.get(key).and_then(|r| r.get(w)).and_then(|x| x.get(o)).cloned().unwrap_or_else(Scalar::zero);
                    prop_assert_eq!(c.clone(), &sign * &other);
                }
            }
        }
        let bracket = |u: &[usize]| {
            let x = WordPoly::word(&space, flavor, u);
            let mut out = m.apply(&space, &n.apply(&space, &x, 0), 0);
            out.add_scaled(&n.apply(&space, &m.apply(&space, &x, 0), 0), &-Scalar::sign(db == 1));
            out
        };
        for k in 0..=3 {
            for w in basis_words(&space, flavor, k) {
                let (lhs, rhs) = co_leibniz(&space, flavor, bracket, db == 0, &w);
                prop_assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn square_zero_residuals_match_hand_expanded_relations(degs in degrees(), cs in coeffs()) {
        let space = space_of(&degs);
        let maps = family(&space, Flavor::Tensor, 1, 2, &cs);
        let mut alg = AInfinityAlgebra::new(space.clone(), maps.clone()).unwrap();
        let report = certify_a_infinity(&mut alg, 4);
        let mut cert = BTreeMap::new();
        for r in report.buckets.values().flatten() {
            prop_assert_eq!(r.output.len(), 1);
            prop_assert_eq!(r.output[0].len(), 1);
            cert.insert((r.input.clone(), r.output[0][0]), r.value.clone());
        }
        let mut hand = BTreeMap::new();
        for n in 1..=4 {
            for w in basis_words(&space, Flavor::Tensor, n) {
                let mut total = Element::zero();
                for r in 0..n {
                    let sign = Scalar::sign(space.word_degree(&w[..r]).rem_euclid(2) == 1);
                    for s in 1..=n - r {
                        let inner = maps.eval(&space, (s, 0), &w[r..r + s]);
                        let mut args: Vec<Element> = w[..r].iter().map(|&i| Element::basis(i)).collect();
                        args.push(inner);
                        args.extend(w[r + s..].iter().map(|&i| Element::basis(i)));
                        for (i, c) in maps.eval_elements(&space, (n - s + 1, 0), &args).iter() {
                            total.add_term(i, &(&sign * c));
                        }
                    }
                }
                for (i, c) in total.iter() {
                    hand.insert((w.clone(), i), c.clone());
                }
            }
        }
        prop_assert_eq!(cert, hand);
    }

    #[test]
    fn certification_is_monotone(degs in degrees(), cs in coeffs()) {
        let space = space_of(&degs);
        let maps = family(&space, Flavor::Symmetric, 1, 2, &cs);
        let mut alg = LInfinityAlgebra::new(space, maps).unwrap();
        let big = certify_l_infinity(&mut alg, 4);
        for n in 1..4 {
            let small = certify_l_infinity(&mut alg, n);
            for (k, r) in &small.buckets {
                prop_assert_eq!(big.buckets.get(k).map(Vec::len), Some(r.len()));
            }
        }
    }
}
