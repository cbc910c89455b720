//! Coderivations on the tensor coalgebra `TA` and the symmetric coalgebra `SA`.
//!
//! A first-order lift `D(m)` acts on words by inserting a component of `m` in every
//! admissible position:
//! - tensor: `D(m)(a_1…a_n) = Σ (-1)^{|m|(|a_1|+…+|a_r|)} a_1…a_r ⊗ m_s(a_{r+1}…a_{r+s}) ⊗ …`
//! - symmetric: `D(l)(a_1…a_n) = Σ_{unshuffles I⊔J} ε(I,J) l(a_I)·a_J`.
//!
//! A second-order piece is multiplication by a fixed `b ∈ A∧2`. The genus index of a
//! component is its `ħ`-order.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::family::MultilinearFamily;
use crate::graded::{sort_symmetric, unshuffle_parity, GradedSpace};
use crate::poly::{Flavor, WordPoly};
use crate::report::{BucketKey, RelationReport, Residual};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coderivation {
    family: MultilinearFamily,
    /// Multiplication by `b` at the given `ħ`-order.
    second_order: Vec<(usize, WordPoly)>,
}

/// Explicit action of an operator on basis words, bucketed by
/// `(input length, output length, ħ-order)`.
pub type OperatorTable = BTreeMap<(usize, usize, usize), BTreeMap<Vec<usize>, BTreeMap<Vec<usize>, Scalar>>>;

impl Coderivation {
    pub fn lift_first_order(family: MultilinearFamily) -> Self {
        Coderivation { family, second_order: Vec::new() }
    }

    /// The order-two lift of `b ∈ A∧2`: multiplication by `b` in `SA`.
    pub fn lift_second_order(space: &GradedSpace, b: &WordPoly) -> Result<Self> {
        if b.flavor() != Flavor::Symmetric {
            return Err(Error::InvalidInput("second-order lifts live on the symmetric coalgebra".into()));
        }
        let mut degree = None;
        for ((h, w), _) in b.iter() {
            if *h != 0 || w.len() != 2 {
                return Err(Error::InvalidInput("second-order lift needs an element of A∧2".into()));
            }
            let d = space.word_degree(w);
            if degree.is_some_and(|e| e != d) {
                return Err(Error::InvalidInput("second-order lift needs a homogeneous element".into()));
            }
            degree = Some(d);
        }
        let mut family = MultilinearFamily::new(Flavor::Symmetric, degree.unwrap_or(1));
        family.set_component(0, 0, BTreeMap::new());
        Ok(Coderivation { family, second_order: if b.is_zero() { Vec::new() } else { vec![(0, b.clone())] } })
    }

    pub fn zero(flavor: Flavor, degree: i64) -> Self {
        Coderivation::lift_first_order(MultilinearFamily::new(flavor, degree))
    }

    pub fn flavor(&self) -> Flavor {
        self.family.flavor()
    }

    pub fn degree(&self) -> i64 {
        self.family.degree()
    }

    pub fn family(&self) -> &MultilinearFamily {
        &self.family
    }

    pub fn second_order(&self) -> &[(usize, WordPoly)] {
        &self.second_order
    }

    pub fn order(&self) -> usize {
        if self.second_order.iter().any(|(_, b)| !b.is_zero()) {
            2
        } else {
            1
        }
    }

    /// Sum with another coderivation of the same flavor; the second operand's `ħ`-orders
    /// are shifted by `shift`.
    pub fn plus(&self, other: &Coderivation, shift: usize) -> Result<Self> {
        if self.flavor() != other.flavor() {
            return Err(Error::InvalidInput("flavor mismatch".into()));
        }
        let mut shifted = MultilinearFamily::new(other.flavor(), other.degree());
        for ((a, g), t) in other.family.components() {
            shifted.set_component(*a, g + shift, t.clone());
        }
        let mut second = self.second_order.clone();
        second.extend(other.second_order.iter().map(|(h, b)| (h + shift, b.clone())));
        Ok(Coderivation { family: self.family.plus(&shifted, &Scalar::one()), second_order: second })
    }

    /// Applies the operator to a formal sum of words, dropping `ħ`-orders above `max_hbar`.
    pub fn apply(&self, space: &GradedSpace, input: &WordPoly, max_hbar: usize) -> WordPoly {
        let mut out = WordPoly::zero(input.flavor());
        for ((h, word), c) in input.iter() {
            self.apply_word(space, *h, word, c, max_hbar, &mut out);
        }
        out
    }

    fn apply_word(&self, space: &GradedSpace, h: usize, word: &[usize], c: &Scalar, max_hbar: usize, out: &mut WordPoly) {
        let odd_map = self.degree().rem_euclid(2) == 1;
        for ((k, g), table) in self.family.components() {
            let (k, g) = (*k, *g);
            if h + g > max_hbar || k > word.len() || table.is_empty() {
                continue;
            }
            match self.flavor() {
                Flavor::Tensor => {
                    for r in 0..=word.len() - k {
                        let neg = odd_map && space.word_is_odd(&word[..r]);
                        let value = self.family.eval(space, (k, g), &word[r..r + k]);
                        for (i, v) in value.iter() {
                            let mut w = Vec::with_capacity(word.len() - k + 1);
                            w.extend_from_slice(&word[..r]);
                            w.push(i);
                            w.extend_from_slice(&word[r + k..]);
                            let coeff = if neg { -(v * c) } else { v * c };
                            out.add_normalized((h + g, w), coeff);
                        }
                    }
                }
                Flavor::Symmetric => {
                    for_each_subset(word.len(), k, &mut |picked| {
                        let neg = unshuffle_parity(space, word, picked);
                        let inputs: Vec<usize> = picked.iter().map(|&p| word[p]).collect();
                        let value = self.family.eval(space, (k, g), &inputs);
                        if value.is_zero() {
                            return;
                        }
                        let rest: Vec<usize> = (0..word.len()).filter(|p| !picked.contains(p)).map(|p| word[p]).collect();
                        for (i, v) in value.iter() {
                            let mut w = Vec::with_capacity(rest.len() + 1);
                            w.push(i);
                            w.extend_from_slice(&rest);
                            let coeff = if neg { -(v * c) } else { v * c };
                            out.add_term(space, h + g, w, &coeff);
                        }
                    });
                }
            }
        }
        for (hb, b) in &self.second_order {
            if h + hb > max_hbar {
                continue;
            }
            for ((_, bw), bc) in b.iter() {
                let mut w = bw.clone();
                w.extend_from_slice(word);
                out.add_term(space, h + hb, w, &(bc * c));
            }
        }
    }

    /// Corestriction to word length one: recovers the first-order family.
    pub fn corestrict(&self, space: &GradedSpace, max_arity: usize, max_hbar: usize) -> MultilinearFamily {
        corestrict_operator(space, self.flavor(), self.degree(), max_arity, max_hbar, |w| self.apply(space, w, max_hbar))
    }
}

/// Builds a multilinear family from the length-one outputs of an operator on basis words.
pub fn corestrict_operator(
    space: &GradedSpace,
    flavor: Flavor,
    degree: i64,
    max_arity: usize,
    max_hbar: usize,
    op: impl Fn(&WordPoly) -> WordPoly,
) -> MultilinearFamily {
    let mut fam = MultilinearFamily::new(flavor, degree);
    for n in 0..=max_arity {
        for w in basis_words(space, flavor, n) {
            let out = op(&WordPoly::word(space, flavor, &w));
            for ((h, ow), c) in out.iter() {
                if ow.len() == 1 && *h <= max_hbar {
                    let e = crate::graded::Element::from_terms([(ow[0], c.clone())]);
                    fam.add(space, *h, w.clone(), &e).expect("operator output has consistent degree");
                }
            }
        }
    }
    fam
}

/// Calls `f` with every strictly increasing `k`-subset of `0..n`.
pub fn for_each_subset(n: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, f);
            cur.pop();
        }
    }
    if k <= n {
        rec(0, n, k, &mut Vec::with_capacity(k), f);
    }
}

/// All basis words of length `n`: sequences (tensor) or canonical monomials (symmetric).
pub fn basis_words(space: &GradedSpace, flavor: Flavor, n: usize) -> Vec<Vec<usize>> {
    let d = space.dim();
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn rec(space: &GradedSpace, flavor: Flavor, d: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        let start = match (flavor, cur.last()) {
            (Flavor::Symmetric, Some(&l)) => {
                if space.is_odd(l) {
                    l + 1
                } else {
                    l
                }
            }
            _ => 0,
        };
        for i in start..d {
            cur.push(i);
            rec(space, flavor, d, n, cur, out);
            cur.pop();
        }
    }
    rec(space, flavor, d, n, &mut cur, &mut out);
    out
}

/// `Δ(a_1…a_n)`: deconcatenation (tensor, `n+1` terms) or signed unshuffles (symmetric).
pub fn comultiply(space: &GradedSpace, flavor: Flavor, word: &[usize]) -> BTreeMap<(Vec<usize>, Vec<usize>), Scalar> {
    let mut out: BTreeMap<(Vec<usize>, Vec<usize>), Scalar> = BTreeMap::new();
    let mut push = |mut l: Vec<usize>, mut r: Vec<usize>, mut neg: bool| {
        if flavor == Flavor::Symmetric {
            match (sort_symmetric(space, &mut l), sort_symmetric(space, &mut r)) {
                (Some(a), Some(b)) => neg ^= a ^ b,
                _ => return,
            }
        }
        let e = out.entry((l.clone(), r.clone())).or_insert_with(Scalar::zero);
        *e += &Scalar::sign(neg);
        if e.is_zero() {
            out.remove(&(l, r));
        }
    };
    match flavor {
        Flavor::Tensor => {
            for i in 0..=word.len() {
                push(word[..i].to_vec(), word[i..].to_vec(), false);
            }
        }
        Flavor::Symmetric => {
            for k in 0..=word.len() {
                for_each_subset(word.len(), k, &mut |picked| {
                    let l: Vec<usize> = picked.iter().map(|&p| word[p]).collect();
                    let r: Vec<usize> = (0..word.len()).filter(|p| !picked.contains(p)).map(|p| word[p]).collect();
                    push(l, r, unshuffle_parity(space, word, picked));
                });
            }
        }
    }
    out
}

/// `[M, N] = M∘N − (-1)^{|M||N|} N∘M`, tabulated on basis words up to `max_arity`.
pub fn graded_commutator(
    space: &GradedSpace,
    m: &Coderivation,
    n: &Coderivation,
    max_arity: usize,
    max_hbar: usize,
) -> Result<OperatorTable> {
    if m.flavor() != n.flavor() {
        return Err(Error::InvalidInput("commutator of coderivations of different flavors".into()));
    }
    let sign = Scalar::sign(m.degree().rem_euclid(2) == 1 && n.degree().rem_euclid(2) == 1);
    let mut table = OperatorTable::new();
    for len in 0..=max_arity {
        for w in basis_words(space, m.flavor(), len) {
            let x = WordPoly::word(space, m.flavor(), &w);
            let mut out = m.apply(space, &n.apply(space, &x, max_hbar), max_hbar);
            out.add_scaled(&n.apply(space, &m.apply(space, &x, max_hbar), max_hbar), &-sign.clone());
            for ((h, ow), c) in out.iter() {
                table.entry((len, ow.len(), *h)).or_default().entry(w.clone()).or_default().insert(ow.clone(), c.clone());
            }
        }
    }
    Ok(table)
}

/// Residuals of `M∘M` on words of one input length, grouped by `ħ`-order.
///
/// Only output lengths up to `max_output` are kept: a coderivation of order `k` is
/// determined by its corestriction to words of length `≤ k`.
pub fn square_residuals(
    space: &GradedSpace,
    m: &Coderivation,
    len: usize,
    max_hbar: usize,
    max_output: usize,
) -> BTreeMap<usize, Vec<Residual>> {
    let mut by_hbar: BTreeMap<usize, Vec<Residual>> = (0..=max_hbar).map(|h| (h, Vec::new())).collect();
    for w in basis_words(space, m.flavor(), len) {
        let x = WordPoly::word(space, m.flavor(), &w);
        let out = m.apply(space, &m.apply(space, &x, max_hbar), max_hbar);
        for ((h, ow), c) in out.iter() {
            if ow.len() <= max_output {
                by_hbar.entry(*h).or_default().push(Residual { input: w.clone(), output: vec![ow.clone()], value: c.clone() });
            }
        }
    }
    by_hbar
}

/// Evaluates `½[M, M]` (= `M²` for odd `M`) on all basis words up to `max_arity` and
/// `ħ`-order `max_hbar`. An empty report means the relation holds at this truncation.
pub fn check_square_zero(space: &GradedSpace, m: &Coderivation, max_arity: usize, max_hbar: usize) -> RelationReport {
    let mut report = RelationReport::new("square-zero", max_arity, max_hbar);
    let odd = m.degree().rem_euclid(2) == 1;
    for len in 0..=max_arity {
        let res = if odd { square_residuals(space, m, len, max_hbar, m.order()) } else { BTreeMap::new() };
        for h in 0..=max_hbar {
            let r = res.get(&h).cloned().unwrap_or_default();
            if len == 0 && r.is_empty() && m.order() == 1 {
                continue;
            }
            report.record(BucketKey::new(len, h), r);
        }
    }
    report
}
