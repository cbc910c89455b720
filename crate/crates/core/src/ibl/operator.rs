//! `𝔏_o = D(d_h + [·,·] + ħ δ)` acting on the symmetric algebra of cyclic cochains.
//!
//! Letters are orbit-basis cochains, named by the canonical rotation of their words.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::{canonical_rotation, cobracket_delta, cochain_bracket, cochain_differential, orbit_basis, CyclicCochain, IBLStructure};
use crate::error::Result;
use crate::report::{BucketKey, RelationReport, Residual};
use crate::scalar::Scalar;

/// An orbit-basis cochain, named by its canonical word.
pub type Letter = Vec<usize>;

/// A polynomial in cochain letters, graded by `ħ`; monomials are kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CochainPoly {
    terms: BTreeMap<(usize, Vec<Letter>), Scalar>,
}

impl CochainPoly {
    pub fn zero() -> Self {
        CochainPoly::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(usize, Vec<Letter>), &Scalar)> + '_ {
        self.terms.iter()
    }

    /// Adds `c · ħ^h · letters`, sorting with the Koszul sign.
    pub fn add_monomial(&mut self, ibl: &IBLStructure, h: usize, mut letters: Vec<Letter>, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let mut neg = false;
        for i in 1..letters.len() {
            let mut j = i;
            while j > 0 && letters[j - 1] > letters[j] {
                if ibl.word_is_odd(&letters[j - 1]) && ibl.word_is_odd(&letters[j]) {
                    neg = !neg;
                }
                letters.swap(j - 1, j);
                j -= 1;
            }
        }
        if letters.windows(2).any(|p| p[0] == p[1] && ibl.word_is_odd(&p[0])) {
            return;
        }
        let v = c * &Scalar::sign(neg);
        let key = (h, letters);
        let e = self.terms.entry(key.clone()).or_insert_with(Scalar::zero);
        *e += &v;
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add_scaled(&mut self, other: &CochainPoly, c: &Scalar) {
        for (k, v) in &other.terms {
            let e = self.terms.entry(k.clone()).or_insert_with(Scalar::zero);
            *e += &(v * c);
            if e.is_zero() {
                self.terms.remove(k);
            }
        }
    }

    /// Orbit-basis expansion of a single cochain.
    pub fn from_cochain(ibl: &IBLStructure, f: &CyclicCochain) -> Self {
        let mut p = CochainPoly::zero();
        for (w, c) in f.orbit_coordinates() {
            p.add_monomial(ibl, 0, alloc::vec![w], &c);
        }
        p
    }
}

/// Cached `d_h`, `[·,·]` and `δ` on letters.
pub struct IblOperator<'a> {
    ibl: &'a IBLStructure,
    dh: BTreeMap<Letter, CochainPoly>,
    br: BTreeMap<(Letter, Letter), CochainPoly>,
    delta: BTreeMap<Letter, CochainPoly>,
    extra_delta: BTreeMap<Letter, CochainPoly>,
}

impl<'a> IblOperator<'a> {
    pub fn new(ibl: &'a IBLStructure) -> Self {
        IblOperator { ibl, dh: BTreeMap::new(), br: BTreeMap::new(), delta: BTreeMap::new(), extra_delta: BTreeMap::new() }
    }

    /// Adds a fixed term to `δ` on the given letters (used to probe sensitivity).
    pub fn with_extra_delta(mut self, extra: BTreeMap<Letter, CochainPoly>) -> Self {
        self.extra_delta = extra;
        self
    }

    fn letter(&self, l: &Letter) -> CyclicCochain {
        CyclicCochain::orbit_sum(&self.ibl.space, l).unwrap_or_default()
    }

    fn odd(&self, l: &Letter) -> bool {
        self.ibl.word_is_odd(l)
    }

    pub fn differential(&mut self, l: &Letter) -> Result<CochainPoly> {
        if let Some(p) = self.dh.get(l) {
            return Ok(p.clone());
        }
        let p = CochainPoly::from_cochain(self.ibl, &cochain_differential(self.ibl, &self.letter(l))?);
        self.dh.insert(l.clone(), p.clone());
        Ok(p)
    }

    pub fn bracket(&mut self, a: &Letter, b: &Letter) -> Result<CochainPoly> {
        let key = (a.clone(), b.clone());
        if let Some(p) = self.br.get(&key) {
            return Ok(p.clone());
        }
        let f = cochain_bracket(self.ibl, &self.letter(a), &self.letter(b))?;
        let p = CochainPoly::from_cochain(self.ibl, &f);
        self.br.insert(key, p.clone());
        Ok(p)
    }

    /// `δ` on a letter as a quadratic polynomial.
    pub fn cobracket(&mut self, l: &Letter) -> Result<CochainPoly> {
        if let Some(p) = self.delta.get(l) {
            return Ok(p.clone());
        }
        let table = cobracket_delta(self.ibl, &self.letter(l))?;
        let mut p = CochainPoly::zero();
        for ((a, b), v) in &table {
            if canonical_rotation(a) != *a || canonical_rotation(b) != *b || a > b {
                continue;
            }
            let c = if a == b { v * &Scalar::from_ratio(1, 2) } else { v.clone() };
            p.add_monomial(self.ibl, 0, alloc::vec![a.clone(), b.clone()], &c);
        }
        if let Some(extra) = self.extra_delta.get(l) {
            p.add_scaled(extra, &Scalar::one());
        }
        self.delta.insert(l.clone(), p.clone());
        Ok(p)
    }

    /// `𝔏_o` on a polynomial, truncated at `ħ^max_hbar`.
    pub fn apply(&mut self, input: &CochainPoly, max_hbar: usize) -> Result<CochainPoly> {
        let mut out = CochainPoly::zero();
        for ((h, letters), c) in input.iter() {
            let n = letters.len();
            for i in 0..n {
                let before = letters[..i].iter().filter(|l| self.odd(l)).count() % 2 == 1;
                let sign = c * &Scalar::sign(before && self.odd(&letters[i]));
                let rest: Vec<Letter> = letters.iter().enumerate().filter(|(k, _)| *k != i).map(|(_, l)| l.clone()).collect();
                let d = self.differential(&letters[i])?;
                out.add_scaled(&times(self.ibl, &d, &rest, *h), &sign);
                if h + 1 <= max_hbar {
                    let dl = self.cobracket(&letters[i])?;
                    out.add_scaled(&times(self.ibl, &dl, &rest, h + 1), &sign);
                }
                for j in i + 1..n {
                    let mut neg = before && self.odd(&letters[i]);
                    let between = letters[..j].iter().enumerate().filter(|(k, l)| *k != i && self.odd(l)).count() % 2 == 1;
                    neg ^= between && self.odd(&letters[j]);
                    let rest: Vec<Letter> =
                        letters.iter().enumerate().filter(|(k, _)| *k != i && *k != j).map(|(_, l)| l.clone()).collect();
                    let b = self.bracket(&letters[i], &letters[j])?;
                    out.add_scaled(&times(self.ibl, &b, &rest, *h), &(c * &Scalar::sign(neg)));
                }
            }
        }
        Ok(out)
    }
}

/// `p · rest`, with every term shifted to `ħ`-order `h` plus its own order.
fn times(ibl: &IBLStructure, p: &CochainPoly, rest: &[Letter], h: usize) -> CochainPoly {
    let mut out = CochainPoly::zero();
    for ((ph, letters), c) in p.iter() {
        let mut w = letters.clone();
        w.extend_from_slice(rest);
        out.add_monomial(ibl, ph + h, w, c);
    }
    out
}

fn for_each_multiset(n: usize, len: usize, start: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if cur.len() == len {
        f(cur);
        return;
    }
    for i in start..n {
        cur.push(i);
        for_each_multiset(n, len, i, cur, f);
        cur.pop();
    }
}

pub fn certify_ibl(ibl: &IBLStructure, max_arity: usize, max_hbar: usize) -> Result<RelationReport> {
    certify_ibl_with(IblOperator::new(ibl), max_arity, max_hbar)
}

/// Checks `𝔏_o² = 0` on monomials of one to three orbit-basis letters of arity
/// `1..=max_arity`, bucketed by (number of letters, `ħ`-order).
pub fn certify_ibl_with(mut op: IblOperator<'_>, max_arity: usize, max_hbar: usize) -> Result<RelationReport> {
    let ibl = op.ibl;
    let letters: Vec<Letter> =
        (1..=max_arity).flat_map(|n| orbit_basis(&ibl.space, n)).filter_map(|f| f.orbit_coordinates().into_keys().next()).collect();
    let mut report = RelationReport::new("involutive Lie bialgebra", max_arity, max_hbar);
    for len in 1..=3 {
        let mut buckets: BTreeMap<usize, Vec<Residual>> = (0..=max_hbar).map(|h| (h, Vec::new())).collect();
        let mut err = None;
        for_each_multiset(letters.len(), len, 0, &mut Vec::new(), &mut |idx| {
            if err.is_some() {
                return;
            }
            let word: Vec<Letter> = idx.iter().map(|&i| letters[i].clone()).collect();
            let mut input = CochainPoly::zero();
            input.add_monomial(ibl, 0, word.clone(), &Scalar::one());
            if input.is_zero() {
                return;
            }
            let result = op.apply(&input, max_hbar).and_then(|once| op.apply(&once, max_hbar));
            match result {
                Ok(sq) => {
                    for ((h, out), c) in sq.iter() {
                        buckets.entry(*h).or_default().push(Residual {
                            input: word.iter().flatten().copied().collect(),
                            output: out.clone(),
                            value: c.clone(),
                        });
                    }
                }
                Err(e) => err = Some(e),
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        for (h, res) in buckets {
            report.record(BucketKey::new(len, h), res);
        }
    }
    Ok(report)
}
