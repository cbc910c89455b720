//! Transport of Maurer-Cartan elements along a classical open-closed morphism.
//!
//! For `Φ` solving `L(e^Φ) = 0`, the cochain `ψ = N(e^Φ)` solves the open-side equation
//! `d_h ψ + ½ [ψ, ψ] = 0`, i.e. `h + ψ` is again a vertex cochain with `[h+ψ, h+ψ] = 0`.

use alloc::collections::BTreeMap;
use alloc::format;

use super::{series_exp, FormalElement};
use crate::error::{Error, Result};
use crate::ibl::{cochain_bracket, cochain_differential, CyclicCochain, IBLStructure};
use crate::ocha::{check_ocha, residual_records, OCMorphism, OchaTruncation};
use crate::poly::Flavor;
use crate::report::{BucketKey, RelationReport};
use crate::scalar::Scalar;
use crate::structures::LInfinityAlgebra;

/// `ψ = Σ_e ε^e ψ_e` with cyclic cochain coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OpenMCElement {
    pub terms: BTreeMap<usize, CyclicCochain>,
}

impl OpenMCElement {
    pub fn get(&self, order: usize) -> CyclicCochain {
        self.terms.get(&order).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(CyclicCochain::is_zero)
    }
}

/// `d_h ψ_e + ½ Σ_{a+b=e} [ψ_a, ψ_b]` for `e ≤ max_order`, bucketed by `(e, open arity)`.
pub fn open_mc_residual(open: &IBLStructure, psi: &OpenMCElement, max_order: usize, open_arity: usize) -> Result<RelationReport> {
    let mut report = RelationReport::new("open Maurer-Cartan", max_order, 0);
    let half = Scalar::from_ratio(1, 2);
    for e in 1..=max_order {
        let mut r = cochain_differential(open, &psi.get(e))?;
        for a in 1..e {
            let (x, y) = (psi.get(a), psi.get(e - a));
            if !x.is_zero() && !y.is_zero() {
                r.add_scaled(&cochain_bracket(open, &x, &y)?, &half);
            }
        }
        for a in 1..=open_arity {
            report.record(BucketKey::with_open(e, alloc::vec![a], 0), alloc::vec::Vec::new());
        }
        for (a, recs) in residual_records(&[], &r, open_arity) {
            report.record(BucketKey::with_open(e, alloc::vec![a], 0), recs);
        }
    }
    Ok(report)
}

/// `ψ = N(e^Φ)` up to `ε^max_order`, with its open-side residual.
///
/// The morphism must pass the classical identity at `trunc`, whose closed arity has to
/// reach `max_order`; otherwise `MorphismNotCertified`.
pub fn pushforward_mc(
    n: &OCMorphism,
    closed: &LInfinityAlgebra,
    open: &IBLStructure,
    phi: &FormalElement,
    max_order: usize,
    trunc: OchaTruncation,
) -> Result<(OpenMCElement, RelationReport)> {
    if phi.flavor != Flavor::Symmetric || phi.terms.keys().any(|(_, g)| *g > 0) {
        return Err(Error::InvalidInput("pushforward needs a classical symmetric Maurer-Cartan element".into()));
    }
    if trunc.closed_arity < max_order {
        return Err(Error::MorphismNotCertified(format!(
            "order {max_order} needs the morphism certified to closed arity {max_order}, not {}",
            trunc.closed_arity
        )));
    }
    let report = check_ocha(n, closed, open, trunc)?;
    if !report.passes() {
        return Err(Error::MorphismNotCertified(format!("open-closed identity fails in buckets {:?}", report.failing())));
    }
    let exp = series_exp(&closed.space, Flavor::Symmetric, &phi.series(), max_order, 0);
    let mut psi = OpenMCElement::default();
    for (e, p) in exp {
        if e == 0 {
            continue;
        }
        if let Some(f) = n.apply(&p).remove(&0) {
            psi.terms.insert(e, f);
        }
    }
    let residual = open_mc_residual(open, &psi, max_order, trunc.open_arity)?;
    Ok((psi, residual))
}
