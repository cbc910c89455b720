//! Pre-Hodge decompositions and the decomposition model of a loop homotopy Lie algebra.
//!
//! Given `h` with `h² = 0`, compatible with `ω`, the transferred structure is
//! `𝔏̄ = D(d + P l*(e^{1+T}(e^{ħ g^{-1}} ·)) + ħ ω̄^{-1})`, with `P = 1 + dh + hd`,
//! `g^{-1} = h ∘ ω^{-1}` and `ω̄^{-1} = P^{∧2}(ω^{-1})`.

use alloc::format;

use crate::coalgebra::basis_words;
use crate::error::{Error, Result};
use crate::family::{apply_linear, linear_degree, MultilinearFamily};
use crate::graded::GradedSpace;
use crate::linalg::Matrix;
use crate::poly::{Flavor, WordPoly};
use crate::report::RelationReport;
use crate::scalar::Scalar;
use crate::structures::{certify_loop, AInfinityAlgebra, LInfinityAlgebra, LoopHomotopyAlgebra};
use crate::symplectic::{bivector_from_tensor, SymplecticData};
use crate::trees::{expand_trees_family, expand_trees_with, tree_exponential, vertex_sum, TreeExpansion};

/// Which adjointness relation between `h` and `ω` is enforced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Compatibility {
    /// `ω(h a, b) + (-1)^{|a|} ω(a, h b) = 0`; makes `h ∘ ω^{-1}` graded symmetric.
    #[default]
    AntiSelfAdjoint,
    /// `ω(h a, b) − (-1)^{|a|} ω(a, h b) = 0`; `g^{-1}` is then symmetrized.
    SelfAdjoint,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreHodge {
    pub h: Matrix,
    pub compatibility: Compatibility,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProjectorDiagnostics {
    pub idempotent: bool,
    pub commutes_with_d: bool,
}

pub fn build_pre_hodge(space: &GradedSpace, omega: &SymplecticData, h: Matrix, compatibility: Compatibility) -> Result<PreHodge> {
    let n = space.dim();
    if h.rows() != n || h.cols() != n {
        return Err(Error::InvalidInput(format!("h must be {n}×{n}")));
    }
    if !matches!(linear_degree(space, &h), Some(None) | Some(Some(-1))) {
        return Err(Error::InvalidInput("h must have degree −1".into()));
    }
    let h2 = h.mul(&h);
    if let Some((i, j)) = first_nonzero(&h2) {
        return Err(Error::HNotSquareZero(format!("h²({}) has a nonzero {} component", space.name(j), space.name(i))));
    }
    // ω(h a, b) = (Hᵀ W)_{ab}, ω(a, h b) = (W H)_{ab}
    let left = h.transpose().mul(omega.gram());
    let right = omega.gram().mul(&h);
    for a in 0..n {
        for b in 0..n {
            let sign = Scalar::sign(space.is_odd(a) != (compatibility == Compatibility::SelfAdjoint));
            let v = left.get(a, b) + &(&sign * right.get(a, b));
            if !v.is_zero() {
                return Err(Error::HNotCompatible(format!("ω-compatibility fails on ({}, {})", space.name(a), space.name(b))));
            }
        }
    }
    Ok(PreHodge { h, compatibility })
}

fn first_nonzero(m: &Matrix) -> Option<(usize, usize)> {
    (0..m.rows()).flat_map(|i| (0..m.cols()).map(move |j| (i, j))).find(|&(i, j)| !m.get(i, j).is_zero())
}

/// `P = 1 + dh + hd`.
pub fn make_projector(ph: &PreHodge, d: &Matrix) -> (Matrix, ProjectorDiagnostics) {
    let n = d.rows();
    let p = Matrix::identity(n).add(&d.mul(&ph.h)).add(&ph.h.mul(d));
    let diagnostics = ProjectorDiagnostics { idempotent: p.mul(&p) == p, commutes_with_d: p.mul(d) == d.mul(&p) };
    (p, diagnostics)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Propagators {
    /// `g(a, b) = −ω(a, d b)` as a Gram matrix.
    pub g: Matrix,
    /// `g^{-1} = (h ⊗ 1) ω^{-1} ∈ A∧2`.
    pub g_inverse: WordPoly,
}

pub fn propagators(space: &GradedSpace, ph: &PreHodge, omega: &SymplecticData, d: &Matrix) -> Result<Propagators> {
    let g = omega.gram().mul(d).scaled(&Scalar::from(-1));
    let g_inverse = bivector_from_tensor(space, &ph.h.mul(omega.inverse_matrix()));
    Ok(Propagators { g, g_inverse })
}

/// `exp(ħ b) · w` truncated at `max_hbar`.
pub fn insert_loops(space: &GradedSpace, b: &WordPoly, word: &[usize], max_hbar: usize) -> WordPoly {
    let mut total = WordPoly::word(space, Flavor::Symmetric, word);
    let mut power = total.clone();
    for k in 1..=max_hbar {
        let mut next = WordPoly::zero(Flavor::Symmetric);
        next.add_shifted(&b.product(space, &power, max_hbar), 1, &Scalar::from_ratio(1, k as i64));
        power = next.filtered(|h, _| h <= max_hbar);
        if power.is_zero() {
            break;
        }
        total.add_scaled(&power, &Scalar::one());
    }
    total
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransferData {
    pub projector: Matrix,
    pub diagnostics: ProjectorDiagnostics,
    pub propagators: Propagators,
    pub trees: TreeExpansion,
    pub omega_bar_inverse: WordPoly,
    pub transferred: LoopHomotopyAlgebra,
    pub max_arity: usize,
    pub max_hbar: usize,
}

pub fn expand_trees(alg: &LoopHomotopyAlgebra, ph: &PreHodge, max_arity: usize, max_hbar: usize) -> Result<TreeExpansion> {
    expand_trees_family(&alg.space, &alg.interaction(), &ph.h, max_arity, max_hbar)
}

pub fn decomposition_model(alg: &LoopHomotopyAlgebra, ph: &PreHodge, max_arity: usize, max_hbar: usize) -> Result<TransferData> {
    let space = &alg.space;
    let d = alg.differential();
    let (projector, diagnostics) = make_projector(ph, &d);
    let props = propagators(space, ph, &alg.omega, &d)?;
    let interaction = alg.interaction();
    // a word of arity n at ħ-order g needs trees on up to n + 2(G − g) inputs
    let trees = expand_trees_with(space, &interaction, &ph.h, max_arity + 2 * max_hbar, max_hbar, |n, g| {
        n <= max_arity + 2 * (max_hbar - g)
    })?;
    let mut maps = MultilinearFamily::from_linear(space, Flavor::Symmetric, 1, &d)?;
    for n in 0..=max_arity {
        for w in basis_words(space, Flavor::Symmetric, n) {
            let looped = insert_loops(space, &props.g_inverse, &w, max_hbar);
            let mut expanded = WordPoly::zero(Flavor::Symmetric);
            for ((a, u), c) in looped.iter() {
                expanded.add_shifted(&tree_exponential(space, &trees.trees, u, max_hbar - a), *a, c);
            }
            for g in 0..=max_hbar {
                let value = apply_linear(&projector, &vertex_sum(space, &interaction, &expanded, g));
                if !value.is_zero() {
                    maps.add(space, g, w.clone(), &value)?;
                }
            }
        }
    }
    let bar = projector.mul(alg.omega_inverse_matrix()).mul(&projector.transpose());
    let omega_bar_inverse = bivector_from_tensor(space, &bar);
    let transferred = LoopHomotopyAlgebra::new(space.clone(), maps, alg.omega.clone())?.with_inverse_tensor(bar);
    Ok(TransferData {
        projector,
        diagnostics,
        propagators: props,
        trees,
        omega_bar_inverse,
        transferred,
        max_arity,
        max_hbar,
    })
}

pub fn verify_decomposition(td: &TransferData, max_arity: usize, max_hbar: usize) -> RelationReport {
    let mut alg = td.transferred.clone();
    let mut report = certify_loop(&mut alg, max_arity.min(td.max_arity), max_hbar.min(td.max_hbar));
    report.relation = "decomposition model".into();
    report
}

/// Classical transfer of a symmetric or tensor family: `d + P l*(e^{1+T})` on genus 0.
pub fn transfer_classical(space: &GradedSpace, maps: &MultilinearFamily, h: &Matrix, max_arity: usize) -> Result<MultilinearFamily> {
    let flavor = maps.flavor();
    let d = maps.differential(space);
    let interaction = maps.restricted(|a, g| g == 0 && a != 1);
    let projector = make_projector(&PreHodge { h: h.clone(), compatibility: Compatibility::default() }, &d).0;
    let trees = expand_trees_family(space, &interaction, h, max_arity, 0)?;
    let mut out = MultilinearFamily::from_linear(space, flavor, 1, &d)?;
    for n in 2..=max_arity {
        for w in basis_words(space, flavor, n) {
            let f = tree_exponential(space, &trees.trees, &w, 0);
            let value = apply_linear(&projector, &vertex_sum(space, &interaction, &f, 0));
            if !value.is_zero() {
                out.add(space, 0, w, &value)?;
            }
        }
    }
    Ok(out)
}

pub fn classical_minimal_model_l(alg: &LInfinityAlgebra, h: &Matrix, max_arity: usize) -> Result<LInfinityAlgebra> {
    LInfinityAlgebra::new(alg.space.clone(), transfer_classical(&alg.space, &alg.maps, h, max_arity)?)
}

/// A∞ version, built from planar trees.
pub fn classical_minimal_model_a(alg: &AInfinityAlgebra, h: &Matrix, max_arity: usize) -> Result<AInfinityAlgebra> {
    AInfinityAlgebra::new(alg.space.clone(), transfer_classical(&alg.space, &alg.maps, h, max_arity)?)
}

/// The `ħ⁰` slice of a loop algebra's maps.
pub fn classical_slice(maps: &MultilinearFamily) -> MultilinearFamily {
    maps.restricted(|_, g| g == 0)
}
