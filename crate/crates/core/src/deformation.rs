//! Maurer-Cartan elements: residuals, order-by-order solving and the linearized gauge
//! action.
//!
//! A formal element is `Φ = Σ ε^e ħ^g Φ_{e,g}` with `Φ_{0,0} = 0`. For A∞ algebras the
//! equation is `Σ_n m_n(ψ, …, ψ) = 0`; for L∞ and loop algebras it is
//! `R(Φ) = e^{−Φ} 𝔏(e^{Φ}) = 0`. For loop algebras `Φ` may have components of word length
//! two or more, which is where the `ħ ω^{-1}` term has to be absorbed.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::coalgebra::{basis_words, Coderivation};
use crate::cohomology::{complex_cohomology, cyclic_cohomology, elementary_basis, CohomologyReport, ComplexKind};
use crate::ibl::IBLStructure;
use crate::symplectic::SymplecticData;
use crate::error::{Error, Result};
use crate::graded::{Element, GradedSpace};
use crate::linalg::Matrix;
use crate::poly::{Flavor, WordPoly};
use crate::report::{BucketKey, RelationReport, Residual};
use crate::scalar::Scalar;
use crate::structures::{AInfinityAlgebra, LInfinityAlgebra, LoopHomotopyAlgebra};

mod pushforward;
pub use pushforward::{open_mc_residual, pushforward_mc, OpenMCElement};

/// Power series in `ε` with `ħ`-graded word coefficients.
pub type Series = BTreeMap<usize, WordPoly>;

#[derive(Debug, Clone, Copy)]
pub enum Structure<'a> {
    AInfinity(&'a AInfinityAlgebra),
    LInfinity(&'a LInfinityAlgebra),
    Loop(&'a LoopHomotopyAlgebra),
}

impl Structure<'_> {
    pub fn space(&self) -> &GradedSpace {
        match self {
            Structure::AInfinity(a) => &a.space,
            Structure::LInfinity(a) => &a.space,
            Structure::Loop(a) => &a.space,
        }
    }

    pub fn flavor(&self) -> Flavor {
        match self {
            Structure::AInfinity(_) => Flavor::Tensor,
            _ => Flavor::Symmetric,
        }
    }

    pub fn coderivation(&self) -> Coderivation {
        match self {
            Structure::AInfinity(a) => a.coderivation(),
            Structure::LInfinity(a) => a.coderivation(),
            Structure::Loop(a) => a.coderivation(),
        }
    }

    /// The `ħ⁰`, first-order part that governs the linearized equation.
    pub fn classical_coderivation(&self) -> Coderivation {
        match self {
            Structure::Loop(a) => Coderivation::lift_first_order(a.maps.restricted(|_, g| g == 0)),
            _ => self.coderivation(),
        }
    }

    fn allows_long_words(&self) -> bool {
        matches!(self, Structure::Loop(_))
    }
}

/// `Φ = Σ ε^e ħ^g Φ_{e,g}`, keyed by `(e, g)`; values are words of length ≥ 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormalElement {
    pub flavor: Flavor,
    pub terms: BTreeMap<(usize, usize), WordPoly>,
}

impl FormalElement {
    pub fn zero(flavor: Flavor) -> Self {
        FormalElement { flavor, terms: BTreeMap::new() }
    }

    /// `ε · seed`.
    pub fn first_order(flavor: Flavor, seed: &Element) -> Self {
        let mut f = FormalElement::zero(flavor);
        f.set(1, 0, WordPoly::from_element(flavor, seed));
        f
    }

    pub fn set(&mut self, order: usize, hbar: usize, value: WordPoly) {
        if value.is_zero() {
            self.terms.remove(&(order, hbar));
        } else {
            self.terms.insert((order, hbar), value);
        }
    }

    pub fn get(&self, order: usize, hbar: usize) -> WordPoly {
        self.terms.get(&(order, hbar)).cloned().unwrap_or_else(|| WordPoly::zero(self.flavor))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Φ + c Ψ`.
    pub fn plus(&self, other: &FormalElement, c: &Scalar) -> FormalElement {
        let mut out = self.clone();
        for (k, v) in &other.terms {
            let mut p = out.get(k.0, k.1);
            p.add_scaled(v, c);
            out.set(k.0, k.1, p);
        }
        out
    }

    /// As an `ε`-series, with the `ħ`-order moved into the word polynomials.
    pub fn series(&self) -> Series {
        let mut s = Series::new();
        for ((e, g), p) in &self.terms {
            s.entry(*e).or_insert_with(|| WordPoly::zero(self.flavor)).add_shifted(p, *g, &Scalar::one());
        }
        s
    }
}

pub fn series_mul(space: &GradedSpace, a: &Series, b: &Series, max_order: usize, max_hbar: usize) -> Series {
    let mut out = Series::new();
    for (e1, p1) in a {
        for (e2, p2) in b {
            if e1 + e2 <= max_order {
                let prod = p1.product(space, p2, max_hbar);
                if !prod.is_zero() {
                    out.entry(e1 + e2).or_insert_with(|| WordPoly::zero(p1.flavor())).add_scaled(&prod, &Scalar::one());
                }
            }
        }
    }
    out.retain(|_, p| !p.is_zero());
    out
}

/// `Σ_k c_k Φ^k` with `c_k = 1/k!` (symmetric) or `1` (tensor), truncated.
pub fn series_exp(space: &GradedSpace, flavor: Flavor, phi: &Series, max_order: usize, max_hbar: usize) -> Series {
    let mut total: Series = [(0, WordPoly::unit(flavor))].into_iter().collect();
    let mut power = total.clone();
    for k in 1..=(max_order + max_hbar) {
        power = series_mul(space, &power, phi, max_order, max_hbar);
        if flavor == Flavor::Symmetric {
            let c = Scalar::from_ratio(1, k as i64);
            for p in power.values_mut() {
                *p = p.scaled(&c);
            }
        }
        if power.is_empty() {
            break;
        }
        for (e, p) in &power {
            total.entry(*e).or_insert_with(|| WordPoly::zero(flavor)).add_scaled(p, &Scalar::one());
        }
    }
    total
}

/// `R(Φ)` split into `(e, g)` buckets.
pub fn mc_residual_terms(structure: Structure<'_>, phi: &FormalElement, max_order: usize, max_hbar: usize) -> BTreeMap<(usize, usize), WordPoly> {
    let space = structure.space();
    let flavor = structure.flavor();
    let op = structure.coderivation();
    let series = phi.series();
    let exp = series_exp(space, flavor, &series, max_order, max_hbar);
    let applied: Series = exp.iter().map(|(e, p)| (*e, op.apply(space, p, max_hbar))).collect();
    let result = match flavor {
        Flavor::Symmetric => {
            let neg: Series = series.iter().map(|(e, p)| (*e, p.scaled(&Scalar::from(-1)))).collect();
            series_mul(space, &series_exp(space, flavor, &neg, max_order, max_hbar), &applied, max_order, max_hbar)
        }
        Flavor::Tensor => applied.into_iter().map(|(e, p)| (e, p.filtered(|_, w| w.len() == 1))).collect(),
    };
    let mut out = BTreeMap::new();
    for (e, p) in result {
        for ((g, w), c) in p.iter() {
            out.entry((e, *g)).or_insert_with(|| WordPoly::zero(flavor)).add_normalized((0, w.clone()), c.clone());
        }
    }
    out.retain(|_, p: &mut WordPoly| !p.is_zero());
    out
}

pub fn mc_residual(structure: Structure<'_>, phi: &FormalElement, max_order: usize, max_hbar: usize) -> RelationReport {
    let terms = mc_residual_terms(structure, phi, max_order, max_hbar);
    let mut report = RelationReport::new("Maurer-Cartan", max_order, max_hbar);
    for e in 0..=max_order {
        for g in 0..=max_hbar {
            let residuals = terms.get(&(e, g)).into_iter().flat_map(|p| {
                p.iter().map(|((_, w), c)| Residual { input: Vec::new(), output: alloc::vec![w.clone()], value: c.clone() })
            });
            report.record(BucketKey::new(e, g), residuals);
        }
    }
    report
}

/// Certificate that a bucket cannot be solved: `rank [D | K] > rank D`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Obstruction {
    pub order: usize,
    pub hbar: usize,
    /// The inhomogeneous term `K` the correction had to cancel.
    pub residual: WordPoly,
    pub rank_d: usize,
    pub rank_augmented: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MCOutcome {
    Solved(FormalElement),
    Obstructed { partial: FormalElement, obstruction: Obstruction },
}

impl MCOutcome {
    pub fn is_solved(&self) -> bool {
        matches!(self, MCOutcome::Solved(_))
    }

    pub fn element(&self) -> &FormalElement {
        match self {
            MCOutcome::Solved(e) => e,
            MCOutcome::Obstructed { partial, .. } => partial,
        }
    }
}

/// Buckets `(e, g) ≠ (0, 0)` ordered by total weight `e + g`, then by `e`.
pub fn solve_order(max_order: usize, max_hbar: usize) -> Vec<(usize, usize)> {
    let mut keys: Vec<(usize, usize)> = (0..=max_order).flat_map(|e| (0..=max_hbar).map(move |g| (e, g))).filter(|k| *k != (0, 0)).collect();
    keys.sort_by_key(|&(e, g)| (e + g, e));
    keys
}

fn check_seed(structure: Structure<'_>, seed: &Element) -> Result<()> {
    let space = structure.space();
    if !seed.is_zero() && seed.degree(space) != Some(0) {
        return Err(Error::InvalidInput("Maurer-Cartan seed must have degree 0".into()));
    }
    let d = structure.classical_coderivation().family().restricted(|a, g| a == 1 && g == 0);
    let ds = d.eval_elements(space, (1, 0), core::slice::from_ref(seed));
    if ds.is_zero() {
        Ok(())
    } else {
        Err(Error::SeedNotCocycle("d(seed) ≠ 0".into()))
    }
}

/// Solves `R(Φ) = 0` bucket by bucket starting from `Φ_{1,0} = seed`.
///
/// Each bucket is linear in its own unknown: `D(l⁰)(Φ_{e,g}) = −K_{e,g}`, with unknowns
/// ranging over degree-0 words up to the longest word in `K`.
pub fn mc_solve(structure: Structure<'_>, seed: &Element, max_order: usize, max_hbar: usize) -> Result<MCOutcome> {
    check_seed(structure, seed)?;
    let max_hbar = if structure.allows_long_words() { max_hbar } else { 0 };
    let space = structure.space();
    let flavor = structure.flavor();
    let linear = structure.classical_coderivation();
    let mut phi = if seed.is_zero() { FormalElement::zero(flavor) } else { FormalElement::first_order(flavor, seed) };
    for (e, g) in solve_order(max_order, max_hbar) {
        if (e, g) == (1, 0) {
            continue;
        }
        let k = mc_residual_terms(structure, &phi, e, max_hbar).remove(&(e, g)).unwrap_or_else(|| WordPoly::zero(flavor));
        if k.is_zero() {
            continue;
        }
        let max_len = if structure.allows_long_words() { k.max_word_len() } else { 1 };
        let unknowns: Vec<Vec<usize>> =
            (1..=max_len).flat_map(|n| basis_words(space, flavor, n)).filter(|w| space.word_degree(w) == 0).collect();
        let columns: Vec<WordPoly> = unknowns
            .iter()
            .map(|w| linear.apply(space, &WordPoly::word(space, flavor, w), 0).filtered(|_, out| out.len() <= max_len))
            .collect();
        let mut rows: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        for p in columns.iter().chain(core::iter::once(&k)) {
            for ((_, w), _) in p.iter() {
                let n = rows.len();
                rows.entry(w.clone()).or_insert(n);
            }
        }
        let dense = |p: &WordPoly| {
            let mut v = alloc::vec![Scalar::zero(); rows.len()];
            for ((_, w), c) in p.iter() {
                v[rows[w]] = c.clone();
            }
            v
        };
        let cols: Vec<Vec<Scalar>> = columns.iter().map(&dense).collect();
        let rhs: Vec<Scalar> = dense(&k).into_iter().map(|c| -c).collect();
        let d = Matrix::from_columns(&cols, rows.len());
        match d.solve(&rhs) {
            Some(x) => {
                let mut value = WordPoly::zero(flavor);
                for (w, c) in unknowns.iter().zip(x) {
                    value.add_term(space, 0, w.clone(), &c);
                }
                phi.set(e, g, value);
            }
            None => {
                let mut aug = cols.clone();
                aug.push(rhs);
                let obstruction = Obstruction {
                    order: e,
                    hbar: g,
                    residual: k,
                    rank_d: d.rank(),
                    rank_augmented: Matrix::from_columns(&aug, rows.len()).rank(),
                };
                return Ok(MCOutcome::Obstructed { partial: phi, obstruction });
            }
        }
    }
    Ok(MCOutcome::Solved(phi))
}

/// `l^Φ_1(v) = Σ_k (1/k!) l_{k+1}(v, Φ, …, Φ)` for a classical L∞ algebra, with `v` and `Φ`
/// formal in `ε`.
pub fn twisted_differential(alg: &LInfinityAlgebra, phi: &FormalElement, v: &FormalElement, max_order: usize) -> FormalElement {
    let space = &alg.space;
    let op = alg.coderivation();
    let exp = series_exp(space, Flavor::Symmetric, &phi.series(), max_order, 0);
    let prod = series_mul(space, &v.series(), &exp, max_order, 0);
    let mut out = FormalElement::zero(Flavor::Symmetric);
    for (e, p) in prod {
        let applied = op.apply(space, &p, 0).filtered(|_, w| w.len() == 1);
        out.set(e, 0, applied);
    }
    out
}

/// The infinitesimal gauge transformation `Φ ↦ Φ + l^Φ_1(λ)` with `λ` of degree −1 at
/// deformation order `lambda_order`.
pub fn gauge_action_linear(alg: &LInfinityAlgebra, lambda: &Element, lambda_order: usize, phi: &FormalElement, max_order: usize) -> Result<FormalElement> {
    if !lambda.is_zero() && lambda.degree(&alg.space) != Some(-1) {
        return Err(Error::InvalidInput("gauge parameter must have degree -1".into()));
    }
    let mut l = FormalElement::zero(Flavor::Symmetric);
    l.set(lambda_order, 0, WordPoly::from_element(Flavor::Symmetric, lambda));
    Ok(phi.plus(&twisted_differential(alg, phi, &l, max_order), &Scalar::one()))
}

/// Cohomology of the deformation complex `(Coder, [M, ·])` in arities `1..=max_arity`.
///
/// `CyclicHochschild` needs the open pairing and uses cyclic cochains.
pub fn deformation_cohomology(
    structure: Structure<'_>,
    kind: ComplexKind,
    max_arity: usize,
    omega: Option<&SymplecticData>,
) -> Result<CohomologyReport> {
    let space = structure.space();
    match (kind, structure) {
        (ComplexKind::Hochschild, Structure::AInfinity(a)) => {
            let basis = elementary_basis(space, Flavor::Tensor, 1, max_arity);
            complex_cohomology(space, &a.coderivation(), &basis, kind, 1, max_arity)
        }
        (ComplexKind::CyclicHochschild, Structure::AInfinity(a)) => {
            let omega = omega.ok_or_else(|| Error::InvalidInput("cyclic Hochschild cohomology needs a pairing".into()))?;
            let ibl = IBLStructure::new(a.space.clone(), a.maps.clone(), omega.clone())?;
            cyclic_cohomology(&ibl, max_arity)
        }
        (ComplexKind::ChevalleyEilenberg, Structure::LInfinity(_) | Structure::Loop(_)) => {
            let basis = elementary_basis(space, Flavor::Symmetric, 1, max_arity);
            complex_cohomology(space, &structure.classical_coderivation(), &basis, kind, 1, max_arity)
        }
        _ => Err(Error::InvalidInput("complex kind does not match the structure flavor".into())),
    }
}
