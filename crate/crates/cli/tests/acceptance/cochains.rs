//! Deformation complexes built by hand: cochains are single-entry maps `w ↦ e_i`, and
//! the differential is `f ↦ m∘f − (−1)^{|f|} f∘m` with brute-force insertion.

use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;

use crate::oracle::{mat_mul, rank, Raw, Vector, Q};

/// All words, or sorted words without a repeated odd letter.
fn words(odd: &[bool], n: usize, sorted: bool) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|w: Vec<usize>| {
                let start = match w.last() {
                    Some(&l) if sorted && odd[l] => l + 1,
                    Some(&l) if sorted => l,
                    _ => 0,
                };
                (start..odd.len()).map(move |i| [w.clone(), vec![i]].concat())
            })
            .collect();
    }
    out
}

/// `a∘b` on one word: tensor insertions with the sign of `b` passing the prefix, or
/// unshuffle insertions with the Koszul sign of the reordering.
fn compose(a: &Raw, b: &Raw, b_odd: bool, w: &[usize]) -> Vector {
    let n = w.len();
    let mut total = vec![Q::zero(); a.dim()];
    let mut add = |v: Vector, neg: bool| {
        for (t, x) in total.iter_mut().zip(v) {
            if neg {
                *t -= x;
            } else {
                *t += x;
            }
        }
    };
    if a.symmetric {
        for mask in 1u32..(1 << n) {
            let first: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            let rest: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 0).collect();
            let mut neg = false;
            for &i in &first {
                for &j in &rest {
                    if j < i {
                        neg ^= a.odd[w[i]] && a.odd[w[j]];
                    }
                }
            }
            let inner: Vec<usize> = first.iter().map(|&i| w[i]).collect();
            let mut args = vec![b.eval_word(0, &inner)];
            args.extend(rest.iter().map(|&i| a.basis(w[i])));
            add(a.eval(0, &args), neg);
        }
    } else {
        for r in 0..n {
            let neg = b_odd && w[..r].iter().filter(|&&i| a.odd[i]).count() % 2 == 1;
            for s in 1..=n - r {
                let mut args: Vec<Vector> = w[..r].iter().map(|&i| a.basis(i)).collect();
                args.push(b.eval_word(0, &w[r..r + s]));
                args.extend(w[r + s..].iter().map(|&i| a.basis(i)));
                add(a.eval(0, &args), neg);
            }
        }
    }
    total
}

/// Per-degree `(cochains, dim H)` of the complex of arities `1..=max_arity`, plus whether
/// `d² = 0` held as a matrix identity.
pub fn cohomology(m: &Raw, degrees: &[i64], max_arity: usize) -> (BTreeMap<i64, (usize, usize)>, bool) {
    let dim = m.dim();
    let sorted = m.symmetric;
    let degree = |i: usize| degrees[i];
    let mut cochains: Vec<(Vec<usize>, usize, i64)> = Vec::new();
    for n in 1..=max_arity {
        for w in words(&m.odd, n, sorted) {
            let wd: i64 = w.iter().map(|&i| degree(i)).sum();
            for i in 0..dim {
                cochains.push((w.clone(), i, degree(i) - wd));
            }
        }
    }
    let coord: HashMap<(Vec<usize>, usize), usize> = cochains.iter().enumerate().map(|(k, (w, i, _))| ((w.clone(), *i), k)).collect();
    // Column k of `d` is the image of cochain k, read off on sorted (or all) words.
    let mut d = vec![vec![Q::zero(); cochains.len()]; cochains.len()];
    for (k, (w, i, deg)) in cochains.iter().enumerate() {
        let mut f = Raw { names: m.names.clone(), odd: m.odd.clone(), symmetric: m.symmetric, maps: HashMap::new() };
        f.maps.insert((0, w.clone()), m.basis(*i));
        let f_odd = deg.rem_euclid(2) == 1;
        for n in 1..=max_arity {
            for u in words(&m.odd, n, sorted) {
                let mut v = compose(m, &f, f_odd, &u);
                let back = compose(&f, m, true, &u);
                for (x, y) in v.iter_mut().zip(back) {
                    if f_odd {
                        *x += y;
                    } else {
                        *x -= y;
                    }
                }
                for (j, c) in v.into_iter().enumerate() {
                    if !c.is_zero() {
                        d[coord[&(u.clone(), j)]][k] = c;
                    }
                }
            }
        }
    }
    let square_zero = mat_mul(&d, &d).iter().all(|r| r.iter().all(Zero::is_zero));
    let mut out = BTreeMap::new();
    let mut by_degree: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (k, c) in cochains.iter().enumerate() {
        by_degree.entry(c.2).or_default().push(k);
    }
    let cols = |ks: &[usize]| -> Vec<Vector> { ks.iter().map(|&k| d.iter().map(|r| r[k].clone()).collect()).collect() };
    for (deg, ks) in &by_degree {
        let out_rank = rank(&cols(ks));
        let in_rank = by_degree.get(&(deg - 1)).map_or(0, |p| rank(&cols(p)));
        out.insert(*deg, (ks.len(), ks.len() - out_rank - in_rank));
    }
    (out, square_zero)
}
