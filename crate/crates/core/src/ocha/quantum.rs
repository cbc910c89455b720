//! The quantum open-closed identity: an IBL∞-morphism `𝔫` from a loop homotopy Lie
//! algebra `(A_c, 𝔏_c)` to `(𝒜_o, 𝔏_o)`, expanded into five sewing terms
//!
//! `𝔫∘𝔏_c + (ħ/2)(𝔫∘D(e_i) ∧ 𝔫∘D(e^i))∘Δ
//!    = 𝔏_o∘𝔫 + ½ D([·,·])∘(𝔫∧𝔫)∘Δ − (D([·,·])∘𝔫 ∧ 𝔫)∘Δ`.
//!
//! `𝔫∘D(e_i)` inserts `e_i` into the closed word before applying `𝔫`; `Σ_i e_i ⊗ e^i` runs
//! over a frame of `A_c` and its `ω_c`-dual, so `½ Σ_i e_i e^i` is the second-order part
//! of `𝔏_c`. Products of outputs live in the symmetric algebra of cochains. At `ħ⁰` the
//! identity is the classical one, term by term.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use super::{ensure_open_certified, OCMorphism, OchaTruncation};
use crate::coalgebra::{basis_words, comultiply};
use crate::error::{Error, Result};
use crate::graded::{Element, GradedSpace};
use crate::ibl::{CochainPoly, CyclicCochain, IBLStructure, IblOperator, Letter};
use crate::linalg::Matrix;
use crate::poly::{Flavor, WordPoly};
use crate::report::{BucketKey, RelationReport, Residual};
use crate::scalar::Scalar;
use crate::structures::{certify_loop, LoopHomotopyAlgebra};
use crate::symplectic::SymplecticData;

/// `𝔫 = Σ_g ħ^g 𝔫_g` with each `𝔫_g` shaped like a classical morphism.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct QOCMorphism {
    orders: BTreeMap<usize, OCMorphism>,
}

impl QOCMorphism {
    pub fn zero() -> Self {
        QOCMorphism::default()
    }

    pub fn from_classical(n: OCMorphism) -> Self {
        let mut q = QOCMorphism::zero();
        if !n.is_zero() {
            q.orders.insert(0, n);
        }
        q
    }

    pub fn insert(&mut self, hbar: usize, closed: &GradedSpace, open: &IBLStructure, word: Vec<usize>, f: &CyclicCochain) -> Result<()> {
        self.orders.entry(hbar).or_default().insert(closed, open, word, f)?;
        self.orders.retain(|_, n| !n.is_zero());
        Ok(())
    }

    /// Replaces the `ħ^hbar` slice.
    pub fn with_order(mut self, hbar: usize, n: OCMorphism) -> Self {
        if n.is_zero() {
            self.orders.remove(&hbar);
        } else {
            self.orders.insert(hbar, n);
        }
        self
    }

    pub fn order(&self, hbar: usize) -> OCMorphism {
        self.orders.get(&hbar).cloned().unwrap_or_default()
    }

    /// The `ħ⁰` slice.
    pub fn classical(&self) -> OCMorphism {
        self.order(0)
    }

    pub fn orders(&self) -> impl Iterator<Item = (&usize, &OCMorphism)> + '_ {
        self.orders.iter()
    }

    /// `Σ_g ħ^{shift+g} 𝔫_g(word)` as a linear polynomial in orbit letters.
    fn eval_poly(&self, closed: &GradedSpace, open: &IBLStructure, word: &[usize], shift: usize, max_hbar: usize) -> CochainPoly {
        let mut out = CochainPoly::zero();
        for (g, n) in &self.orders {
            if shift + g > max_hbar {
                continue;
            }
            for (o, c) in n.eval(closed, word).orbit_coordinates() {
                out.add_monomial(open, shift + g, alloc::vec![o], &c);
            }
        }
        out
    }
}

/// Pairs `(e_i, e^i)` of homogeneous closed vectors with `ω_c(e_i, e^j) = δ_ij`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosedFrame {
    pairs: Vec<(Element, Element)>,
}

impl ClosedFrame {
    /// The basis of the space and its dual.
    pub fn standard(space: &GradedSpace, omega: &SymplecticData) -> Result<Self> {
        Self::from_basis(space, omega, (0..space.dim()).map(Element::basis).collect())
    }

    /// A homogeneous basis `f_1, …, f_n` and its dual `f^j = Σ_l (G^{-1})_{lj} f_l`, where
    /// `G_{il} = ω(f_i, f_l)`.
    pub fn from_basis(space: &GradedSpace, omega: &SymplecticData, basis: Vec<Element>) -> Result<Self> {
        if omega.is_degenerate() {
            return Err(Error::DegenerateForm("the closed sewing term needs a non-degenerate ω_c".into()));
        }
        if basis.len() != space.dim() || basis.iter().any(|e| !e.is_homogeneous(space) || e.is_zero()) {
            return Err(Error::InvalidInput("a frame must be a basis of homogeneous vectors".into()));
        }
        let n = basis.len();
        let mut g = Matrix::zeros(n, n);
        for i in 0..n {
            for l in 0..n {
                g.set(i, l, omega.pair(&basis[i], &basis[l]));
            }
        }
        let inv = g.inverse().ok_or_else(|| Error::InvalidInput("frame vectors are linearly dependent".into()))?;
        let pairs = (0..n)
            .map(|j| {
                let mut dual = Element::zero();
                for (l, f) in basis.iter().enumerate() {
                    dual.add_scaled(f, inv.get(l, j));
                }
                (basis[j].clone(), dual)
            })
            .collect();
        Ok(ClosedFrame { pairs })
    }

    pub fn pairs(&self) -> &[(Element, Element)] {
        &self.pairs
    }
}

fn ensure_loop_certified(closed: &LoopHomotopyAlgebra, arity: usize, genus: usize) -> Result<()> {
    let passed = match closed.certification {
        Some(c) if c.max_arity >= arity && c.max_genus >= genus => c.passed,
        _ => certify_loop(&mut closed.clone(), arity, genus).passes(),
    };
    if passed {
        Ok(())
    } else {
        Err(Error::UncertifiedBase(format!("loop relations fail below arity {arity}, genus {genus}")))
    }
}

fn product(open: &IBLStructure, a: &CochainPoly, b: &CochainPoly, max_hbar: usize) -> CochainPoly {
    let mut out = CochainPoly::zero();
    for ((ha, la), ca) in a.iter() {
        for ((hb, lb), cb) in b.iter() {
            if ha + hb <= max_hbar {
                let mut w = la.clone();
                w.extend_from_slice(lb);
                out.add_monomial(open, ha + hb, w, &(ca * cb));
            }
        }
    }
    out
}

/// `D([·,·])` on a polynomial: the bracket of every pair of letters, in place.
fn bracket_part(op: &mut IblOperator<'_>, open: &IBLStructure, p: &CochainPoly) -> Result<CochainPoly> {
    let mut out = CochainPoly::zero();
    for ((h, letters), c) in p.iter() {
        let odd: Vec<bool> = letters.iter().map(|l| open.word_is_odd(l)).collect();
        for i in 0..letters.len() {
            let before = odd[..i].iter().filter(|&&o| o).count() % 2 == 1;
            for j in i + 1..letters.len() {
                let between = (0..j).filter(|&k| k != i && odd[k]).count() % 2 == 1;
                let neg = (before && odd[i]) ^ (between && odd[j]);
                let rest: Vec<Letter> = letters.iter().enumerate().filter(|(k, _)| *k != i && *k != j).map(|(_, l)| l.clone()).collect();
                for ((bh, bl), bc) in op.bracket(&letters[i], &letters[j])?.iter() {
                    let mut w = bl.clone();
                    w.extend_from_slice(&rest);
                    out.add_monomial(open, h + bh, w, &(&(bc * c) * &Scalar::sign(neg)));
                }
            }
        }
    }
    Ok(out)
}

/// Term (2): `(ħ/2) Σ_i Σ_{w_I ⊗ w_J ∈ Δw} ± 𝔫(e_i w_I) 𝔫(e^i w_J)` on one closed basis word,
/// the sign moving `e^i` past `w_I`.
pub fn closed_sewing_term(
    n: &QOCMorphism,
    space: &GradedSpace,
    open: &IBLStructure,
    frame: &ClosedFrame,
    word: &[usize],
    max_hbar: usize,
) -> CochainPoly {
    let mut out = CochainPoly::zero();
    if max_hbar == 0 {
        return out;
    }
    let half = Scalar::from_ratio(1, 2);
    let splits = comultiply(space, Flavor::Symmetric, word);
    for (u, v) in frame.pairs() {
        let v_odd = v.degree(space).is_some_and(|d| d.rem_euclid(2) == 1);
        for ((l, r), c) in &splits {
            let sign = Scalar::sign(v_odd && space.word_is_odd(l));
            for (a, ua) in u.iter() {
                let mut left = alloc::vec![a];
                left.extend_from_slice(l);
                let pa = n.eval_poly(space, open, &left, 1, max_hbar);
                if pa.is_zero() {
                    continue;
                }
                for (b, vb) in v.iter() {
                    let mut right = alloc::vec![b];
                    right.extend_from_slice(r);
                    let pb = n.eval_poly(space, open, &right, 0, max_hbar);
                    let coeff = &(&(&half * c) * &sign) * &(ua * vb);
                    out.add_scaled(&product(open, &pa, &pb, max_hbar), &coeff);
                }
            }
        }
    }
    out
}

/// Residual `(1) + (2) − (3) − (4) − (5)` on one closed basis word.
fn qocha_residual(
    n: &QOCMorphism,
    closed: &LoopHomotopyAlgebra,
    open: &IBLStructure,
    frame: &ClosedFrame,
    op: &mut IblOperator<'_>,
    word: &[usize],
    max_hbar: usize,
) -> Result<CochainPoly> {
    let space = &closed.space;
    let mut out = CochainPoly::zero();
    let one = Scalar::one();
    let half = Scalar::from_ratio(1, 2);
    // (1) 𝔫∘𝔏_c
    let lw = closed.coderivation().apply(space, &WordPoly::word(space, Flavor::Symmetric, word), max_hbar);
    for ((h, u), c) in lw.iter() {
        out.add_scaled(&n.eval_poly(space, open, u, *h, max_hbar), c);
    }
    let splits = comultiply(space, Flavor::Symmetric, word);
    out.add_scaled(&closed_sewing_term(n, &closed.space, open, frame, word, max_hbar), &one);
    // (3) 𝔏_o∘𝔫
    let nw = n.eval_poly(space, open, word, 0, max_hbar);
    out.add_scaled(&op.apply(&nw, max_hbar)?, &-&one);
    for ((l, r), c) in &splits {
        if l.is_empty() || r.is_empty() {
            continue;
        }
        let (pl, pr) = (n.eval_poly(space, open, l, 0, max_hbar), n.eval_poly(space, open, r, 0, max_hbar));
        if pl.is_zero() || pr.is_zero() {
            continue;
        }
        // (4) ½ D([·,·])∘(𝔫∧𝔫)∘Δ
        out.add_scaled(&bracket_part(op, open, &product(open, &pl, &pr, max_hbar))?, &-(&half * c));
        // (5) −(D([·,·])∘𝔫 ∧ 𝔫)∘Δ
        out.add_scaled(&product(open, &bracket_part(op, open, &pl)?, &pr, max_hbar), c);
    }
    Ok(out)
}

/// Evaluates the quantum identity on every sorted closed basis word of arity
/// `1..=closed_arity`, keeping outputs whose open arities are at most `open_arity` and
/// `ħ`-orders at most `max_hbar`. Buckets are keyed by the sorted open arities of the
/// output monomial.
pub fn check_qocha(
    n: &QOCMorphism,
    closed: &LoopHomotopyAlgebra,
    open: &IBLStructure,
    frame: &ClosedFrame,
    trunc: OchaTruncation,
) -> Result<RelationReport> {
    ensure_loop_certified(closed, trunc.closed_arity, trunc.max_hbar)?;
    ensure_open_certified(open, trunc.open_arity + 1)?;
    let mut report = RelationReport::new("QOCHA", trunc.closed_arity, trunc.max_hbar);
    let mut op = IblOperator::new(open);
    for k in 1..=trunc.closed_arity {
        for h in 0..=trunc.max_hbar {
            for a in 1..=trunc.open_arity {
                report.record(BucketKey::with_open(k, alloc::vec![a], h), Vec::new());
                if h >= 1 {
                    for b in a..=trunc.open_arity {
                        report.record(BucketKey::with_open(k, alloc::vec![a, b], h), Vec::new());
                    }
                }
            }
        }
        for word in basis_words(&closed.space, Flavor::Symmetric, k) {
            let res = qocha_residual(n, closed, open, frame, &mut op, &word, trunc.max_hbar)?;
            let mut buckets: BTreeMap<BucketKey, Vec<Residual>> = BTreeMap::new();
            for ((h, letters), c) in res.iter() {
                let mut arities: Vec<usize> = letters.iter().map(Vec::len).collect();
                arities.sort_unstable();
                if arities.iter().any(|&a| a > trunc.open_arity) {
                    continue;
                }
                buckets.entry(BucketKey::with_open(k, arities, *h)).or_default().push(Residual {
                    input: word.clone(),
                    output: letters.clone(),
                    value: c.clone(),
                });
            }
            for (key, recs) in buckets {
                report.record(key, recs);
            }
        }
    }
    Ok(report)
}
