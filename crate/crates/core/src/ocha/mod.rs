//! Open-closed homotopy algebras.
//!
//! A classical morphism `N` sends graded-symmetric words of the closed algebra `A_c` to
//! cyclic cochains on the open algebra and satisfies
//! `N∘L = d_h∘N + ½ [N, N]∘Δ` with `Δ` the unshuffle coproduct. `N` has degree `0`:
//! `n_k(w)` is a cochain of degree `|w|`.
//!
//! The quantum version ([`quantum`]) adds an `ħ`-grading to the components and checks
//! the expanded IBL∞-morphism identity term by term.
//!
//! Residuals are reported in orbit coordinates (the value of the cochain on the
//! canonical rotation of each open word) and bucketed by closed arity, open arities
//! and `ħ`-order.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::coalgebra::{basis_words, comultiply};
use crate::error::{Error, Result};
use crate::graded::{sort_symmetric, GradedSpace};
use crate::ibl::{cochain_bracket, cochain_differential, orbit_basis, CyclicCochain, IBLStructure};
use crate::linalg::Matrix;
use crate::poly::{Flavor, WordPoly};
use crate::report::{BucketKey, RelationReport, Residual};
use crate::scalar::Scalar;
use crate::structures::{certify_a_infinity, certify_l_infinity, cyclicity_check, AInfinityAlgebra, CyclicStructure, LInfinityAlgebra};

mod quantum;
pub use quantum::{check_qocha, closed_sewing_term, ClosedFrame, QOCMorphism};

/// Truncation bounds: closed input arity, open output arity, `ħ`-order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OchaTruncation {
    pub closed_arity: usize,
    pub open_arity: usize,
    pub max_hbar: usize,
}

impl OchaTruncation {
    pub fn new(closed_arity: usize, open_arity: usize, max_hbar: usize) -> Self {
        OchaTruncation { closed_arity, open_arity, max_hbar }
    }
}

/// `N = Σ_k n_k`, stored on sorted closed words.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OCMorphism {
    components: BTreeMap<Vec<usize>, CyclicCochain>,
}

impl OCMorphism {
    pub fn zero() -> Self {
        OCMorphism::default()
    }

    /// Adds `f` to `n_k(word)`; the word may be in any order.
    pub fn insert(&mut self, closed: &GradedSpace, open: &IBLStructure, word: Vec<usize>, f: &CyclicCochain) -> Result<()> {
        let mut key = word;
        if key.is_empty() || key.iter().any(|&i| i >= closed.dim()) {
            return Err(Error::InvalidInput(format!("closed word {key:?} is empty or out of range")));
        }
        let Some(neg) = sort_symmetric(closed, &mut key) else {
            return Err(Error::InvalidInput(format!("closed word {key:?} repeats an odd vector")));
        };
        let target = closed.word_degree(&key);
        for w in f.values().keys() {
            if w.iter().any(|&i| i >= open.space.dim()) {
                return Err(Error::InvalidInput(format!("open word {w:?} out of range")));
            }
            let d = open.omega.degree().unwrap_or(1) - 1 - open.space.word_degree(w);
            if d != target {
                return Err(Error::Parity(format!(
                    "n({key:?}) has degree {target} but the cochain value on {w:?} has degree {d}"
                )));
            }
        }
        let e = self.components.entry(key.clone()).or_default();
        e.add_scaled(f, &Scalar::sign(neg));
        if e.is_zero() {
            self.components.remove(&key);
        }
        Ok(())
    }

    /// `n_k` on a closed basis word in any order.
    pub fn eval(&self, closed: &GradedSpace, word: &[usize]) -> CyclicCochain {
        let mut key = word.to_vec();
        match sort_symmetric(closed, &mut key) {
            None => CyclicCochain::zero(),
            Some(neg) => self.components.get(&key).map_or_else(CyclicCochain::zero, |f| f.scaled(&Scalar::sign(neg))),
        }
    }

    /// `N` on a formal sum of closed words, split by the `ħ`-order of the input terms.
    pub fn apply(&self, input: &WordPoly) -> BTreeMap<usize, CyclicCochain> {
        let mut out: BTreeMap<usize, CyclicCochain> = BTreeMap::new();
        for ((h, word), c) in input.iter() {
            if word.is_empty() {
                continue;
            }
            if let Some(f) = self.components.get(word) {
                out.entry(*h).or_default().add_scaled(f, c);
            }
        }
        out.retain(|_, f| !f.is_zero());
        out
    }

    pub fn components(&self) -> impl Iterator<Item = (&Vec<usize>, &CyclicCochain)> + '_ {
        self.components.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn max_closed_arity(&self) -> usize {
        self.components.keys().map(Vec::len).max().unwrap_or(0)
    }

    /// `N + c·M`.
    pub fn plus(&self, other: &OCMorphism, c: &Scalar) -> OCMorphism {
        let mut out = self.clone();
        for (w, f) in &other.components {
            let e = out.components.entry(w.clone()).or_default();
            e.add_scaled(f, c);
            if e.is_zero() {
                out.components.remove(w);
            }
        }
        out
    }
}

/// Fails with `UncertifiedBase` unless the closed L∞ relations hold up to `closed_arity`.
pub(crate) fn ensure_closed_certified(closed: &LInfinityAlgebra, closed_arity: usize) -> Result<()> {
    let passed = match closed.certification {
        Some(c) if c.max_arity >= closed_arity => c.passed,
        _ => certify_l_infinity(&mut closed.clone(), closed_arity).passes(),
    };
    if passed {
        Ok(())
    } else {
        Err(Error::UncertifiedBase(format!("closed L∞ relations fail below arity {closed_arity}")))
    }
}

/// Fails with `UncertifiedBase` unless the open maps are a cyclic A∞ structure up to
/// `arity`.
pub(crate) fn ensure_open_certified(open: &IBLStructure, arity: usize) -> Result<()> {
    let mut alg = AInfinityAlgebra::new(open.space.clone(), open.maps.clone())
        .map_err(|e| Error::UncertifiedBase(format!("open maps: {e}")))?;
    if !certify_a_infinity(&mut alg, arity).passes() {
        return Err(Error::UncertifiedBase(format!("open A∞ relations fail below arity {arity}")));
    }
    let cyc = CyclicStructure::new(open.space.clone(), open.maps.clone(), open.omega.clone())?;
    if !cyclicity_check(&cyc, arity).passes() {
        return Err(Error::UncertifiedBase("open maps are not cyclic".into()));
    }
    Ok(())
}

/// `N(D(l)w) − d_h N(w) − ½ Σ_{w_I ⊗ w_J ∈ Δw, both non-empty} [N(w_I), N(w_J)]`.
pub(crate) fn ocha_residual(n: &OCMorphism, closed: &LInfinityAlgebra, open: &IBLStructure, word: &[usize]) -> Result<CyclicCochain> {
    let space = &closed.space;
    let input = WordPoly::word(space, Flavor::Symmetric, word);
    let lw = closed.coderivation().apply(space, &input, 0);
    let mut out = n.apply(&lw).remove(&0).unwrap_or_default();
    let nw = n.eval(space, word);
    if !nw.is_zero() {
        out.add_scaled(&cochain_differential(open, &nw)?, &-Scalar::one());
    }
    let half = Scalar::from_ratio(1, 2);
    for ((l, r), c) in comultiply(space, Flavor::Symmetric, word) {
        if l.is_empty() || r.is_empty() {
            continue;
        }
        let (a, b) = (n.eval(space, &l), n.eval(space, &r));
        if a.is_zero() || b.is_zero() {
            continue;
        }
        out.add_scaled(&cochain_bracket(open, &a, &b)?, &-(&c * &half));
    }
    Ok(out)
}

/// Orbit coordinates of `f` as residual records, keeping open arities up to `max_open`.
pub(crate) fn residual_records(input: &[usize], f: &CyclicCochain, max_open: usize) -> BTreeMap<usize, Vec<Residual>> {
    let mut out: BTreeMap<usize, Vec<Residual>> = BTreeMap::new();
    for (w, c) in f.orbit_coordinates() {
        if w.len() <= max_open {
            out.entry(w.len()).or_default().push(Residual { input: input.to_vec(), output: alloc::vec![w], value: c });
        }
    }
    out
}

/// Evaluates the classical identity on every sorted closed basis word of arity
/// `1..=closed_arity` and every open orbit of arity `1..=open_arity`.
pub fn check_ocha(n: &OCMorphism, closed: &LInfinityAlgebra, open: &IBLStructure, trunc: OchaTruncation) -> Result<RelationReport> {
    ensure_closed_certified(closed, trunc.closed_arity)?;
    ensure_open_certified(open, trunc.open_arity + 1)?;
    let mut report = RelationReport::new("OCHA", trunc.closed_arity, 0);
    for k in 1..=trunc.closed_arity {
        for a in 1..=trunc.open_arity {
            report.record(BucketKey::with_open(k, alloc::vec![a], 0), Vec::new());
        }
        for word in basis_words(&closed.space, Flavor::Symmetric, k) {
            let res = ocha_residual(n, closed, open, &word)?;
            for (a, recs) in residual_records(&word, &res, trunc.open_arity) {
                report.record(BucketKey::with_open(k, alloc::vec![a], 0), recs);
            }
        }
    }
    Ok(report)
}

/// Corrects `n_k` (`k = closed_arity`) so that the closed-arity-`k` buckets of the
/// classical identity vanish up to open arity `open_arity`.
///
/// The unknowns are the coefficients of `n_k(w)` on degree-compatible orbits; the
/// bracket terms only involve lower components, so the bucket is linear in them:
/// `n_k(l_1 w) − d_h n_k(w) = −residual(w)`. Returns the corrected morphism, or
/// `Inconsistent` with the residual when no correction exists.
pub fn solve_ocha_component(
    n: &OCMorphism,
    closed: &LInfinityAlgebra,
    open: &IBLStructure,
    closed_arity: usize,
    open_arity: usize,
) -> Result<OCMorphism> {
    ensure_closed_certified(closed, closed_arity)?;
    ensure_open_certified(open, open_arity + 1)?;
    let space = &closed.space;
    let words = basis_words(space, Flavor::Symmetric, closed_arity);
    let mut residuals = Vec::with_capacity(words.len());
    for w in &words {
        residuals.push(ocha_residual(n, closed, open, w)?);
    }
    if residuals.iter().all(|r| r.orbit_coordinates().keys().all(|o| o.len() > open_arity)) {
        return Ok(n.clone());
    }
    let s = open.omega.degree().unwrap_or(1);
    let mut unknowns: Vec<(usize, CyclicCochain)> = Vec::new();
    for (wi, w) in words.iter().enumerate() {
        for a in 1..=open_arity {
            for f in orbit_basis(&open.space, a) {
                let canon = f.orbit_coordinates().into_keys().next().unwrap_or_default();
                if s - 1 - open.space.word_degree(&canon) == space.word_degree(w) {
                    unknowns.push((wi, f));
                }
            }
        }
    }
    let mut rows: BTreeMap<(usize, Vec<usize>), usize> = BTreeMap::new();
    let row_of = |wi: usize, o: Vec<usize>, rows: &mut BTreeMap<(usize, Vec<usize>), usize>| {
        let next = rows.len();
        *rows.entry((wi, o)).or_insert(next)
    };
    let differentials: Vec<WordPoly> = words
        .iter()
        .map(|w| closed.coderivation().apply(space, &WordPoly::word(space, Flavor::Symmetric, w), 0).filtered(|_, u| u.len() == closed_arity))
        .collect();
    let mut columns: Vec<BTreeMap<usize, Scalar>> = Vec::with_capacity(unknowns.len());
    for (wi, f) in &unknowns {
        let mut col: BTreeMap<usize, Scalar> = BTreeMap::new();
        let mut push = |target: usize, g: &CyclicCochain, c: &Scalar, rows: &mut BTreeMap<(usize, Vec<usize>), usize>| {
            for (o, v) in g.orbit_coordinates() {
                if o.len() <= open_arity {
                    let r = row_of(target, o, rows);
                    *col.entry(r).or_insert_with(Scalar::zero) += &(&v * c);
                }
            }
        };
        push(*wi, &cochain_differential(open, f)?, &-Scalar::one(), &mut rows);
        for (ti, lw) in differentials.iter().enumerate() {
            let c = lw.coeff(0, &words[*wi]);
            if !c.is_zero() {
                push(ti, f, &c, &mut rows);
            }
        }
        columns.push(col);
    }
    for (wi, r) in residuals.iter().enumerate() {
        for o in r.orbit_coordinates().into_keys().filter(|o| o.len() <= open_arity) {
            row_of(wi, o, &mut rows);
        }
    }
    let mut a = Matrix::zeros(rows.len(), unknowns.len());
    for (j, col) in columns.iter().enumerate() {
        for (i, v) in col {
            a.set(*i, j, v.clone());
        }
    }
    let mut b = alloc::vec![Scalar::zero(); rows.len()];
    for ((wi, o), &i) in &rows {
        b[i] = -residuals[*wi].value(o);
    }
    let Some(x) = a.solve(&b) else {
        let witness: Vec<_> = rows.iter().filter(|(_, &i)| !b[i].is_zero()).map(|((wi, o), &i)| (words[*wi].clone(), o.clone(), -&b[i])).collect();
        return Err(Error::Inconsistent(format!(
            "closed arity {closed_arity}: residual {witness:?} is not in the image of n ↦ n∘l_1 − d_h∘n (rank {})",
            a.rank()
        )));
    };
    let mut out = n.clone();
    for ((wi, f), c) in unknowns.iter().zip(&x) {
        if !c.is_zero() {
            out.insert(space, open, words[*wi].clone(), &f.scaled(c))?;
        }
    }
    Ok(out)
}
