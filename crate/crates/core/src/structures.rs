//! A∞, L∞, cyclic and loop homotopy Lie algebras with their relation checkers.

use alloc::format;
use alloc::vec::Vec;

use crate::coalgebra::{basis_words, check_square_zero, Coderivation};
use crate::error::{Error, Result};
use crate::family::MultilinearFamily;
use crate::graded::{Element, GradedSpace};
use crate::linalg::Matrix;
use crate::poly::{Flavor, WordPoly};
use crate::report::{BucketKey, RelationReport, Residual};
use crate::scalar::Scalar;
use crate::symplectic::{bivector_from_tensor, SymplecticData};

fn check_family(space: &GradedSpace, maps: &MultilinearFamily, flavor: Flavor, classical: bool) -> Result<()> {
    if maps.flavor() != flavor {
        return Err(Error::InvalidInput(format!("expected {flavor:?} maps, got {:?}", maps.flavor())));
    }
    if maps.degree() != 1 {
        return Err(Error::InvalidInput(format!("structure maps must have degree 1, got {}", maps.degree())));
    }
    if classical && maps.max_genus() > 0 {
        return Err(Error::InvalidInput("classical structures carry genus 0 only".into()));
    }
    maps.validate(space)
}

/// Truncation bounds a certification was run at, and whether it passed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Certification {
    pub max_arity: usize,
    pub max_genus: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AInfinityAlgebra {
    pub space: GradedSpace,
    pub maps: MultilinearFamily,
    pub certification: Option<Certification>,
}

impl AInfinityAlgebra {
    pub fn new(space: GradedSpace, maps: MultilinearFamily) -> Result<Self> {
        check_family(&space, &maps, Flavor::Tensor, true)?;
        Ok(AInfinityAlgebra { space, maps, certification: None })
    }

    pub fn coderivation(&self) -> Coderivation {
        Coderivation::lift_first_order(self.maps.clone())
    }

    pub fn differential(&self) -> Matrix {
        self.maps.differential(&self.space)
    }
}

pub fn certify_a_infinity(alg: &mut AInfinityAlgebra, max_arity: usize) -> RelationReport {
    let mut report = check_square_zero(&alg.space, &alg.coderivation(), max_arity, 0);
    report.relation = "A-infinity".into();
    alg.certification = Some(Certification { max_arity, max_genus: 0, passed: report.passes() });
    report
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LInfinityAlgebra {
    pub space: GradedSpace,
    pub maps: MultilinearFamily,
    pub certification: Option<Certification>,
}

impl LInfinityAlgebra {
    pub fn new(space: GradedSpace, maps: MultilinearFamily) -> Result<Self> {
        check_family(&space, &maps, Flavor::Symmetric, true)?;
        Ok(LInfinityAlgebra { space, maps, certification: None })
    }

    pub fn coderivation(&self) -> Coderivation {
        Coderivation::lift_first_order(self.maps.clone())
    }

    pub fn differential(&self) -> Matrix {
        self.maps.differential(&self.space)
    }
}

pub fn certify_l_infinity(alg: &mut LInfinityAlgebra, max_arity: usize) -> RelationReport {
    let mut report = check_square_zero(&alg.space, &alg.coderivation(), max_arity, 0);
    report.relation = "L-infinity".into();
    alg.certification = Some(Certification { max_arity, max_genus: 0, passed: report.passes() });
    report
}

/// An A∞ or L∞ algebra together with an odd pairing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicStructure {
    pub space: GradedSpace,
    pub maps: MultilinearFamily,
    pub omega: SymplecticData,
}

impl CyclicStructure {
    pub fn new(space: GradedSpace, maps: MultilinearFamily, omega: SymplecticData) -> Result<Self> {
        if omega.dim() != space.dim() {
            return Err(Error::InvalidInput("pairing and space dimensions differ".into()));
        }
        maps.validate(&space)?;
        Ok(CyclicStructure { space, maps, omega })
    }
}

/// The vertex `⟨a_0, …, a_n⟩ = ω(a_0, m_n(a_1, …, a_n))` on basis vectors.
pub fn vertex(space: &GradedSpace, maps: &MultilinearFamily, omega: &SymplecticData, genus: usize, tuple: &[usize]) -> Scalar {
    let value = maps.eval(space, (tuple.len() - 1, genus), &tuple[1..]);
    omega.pair(&Element::basis(tuple[0]), &value)
}

/// Checks `⟨a_0, …, a_n⟩ = (-1)^{|a_n|(|a_0|+…+|a_{n-1}|)} ⟨a_n, a_0, …, a_{n-1}⟩` for every
/// basis tuple with `n ≤ max_arity` and every genus present.
pub fn cyclicity_check(c: &CyclicStructure, max_arity: usize) -> RelationReport {
    let mut report = RelationReport::new("cyclicity", max_arity, c.maps.max_genus());
    for g in 0..=c.maps.max_genus() {
        for n in 1..=max_arity {
            let mut residuals = Vec::new();
            for tuple in basis_words(&c.space, Flavor::Tensor, n + 1) {
                let mut rotated = Vec::with_capacity(n + 1);
                rotated.push(tuple[n]);
                rotated.extend_from_slice(&tuple[..n]);
                let sign = Scalar::sign(c.space.is_odd(tuple[n]) && c.space.word_is_odd(&tuple[..n]));
                let value = vertex(&c.space, &c.maps, &c.omega, g, &tuple) - &sign * &vertex(&c.space, &c.maps, &c.omega, g, &rotated);
                if !value.is_zero() {
                    residuals.push(Residual { input: tuple, output: Vec::new(), value });
                }
            }
            report.record(BucketKey::new(n, g), residuals);
        }
    }
    report
}

/// `𝔏 = Σ_g ħ^g D(l^g) + ħ Ω^{-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoopHomotopyAlgebra {
    pub space: GradedSpace,
    pub maps: MultilinearFamily,
    pub omega: SymplecticData,
    /// Overrides `ω^{-1}` (as a symmetric coefficient tensor) in the second-order part;
    /// used for transferred structures.
    pub inverse_tensor: Option<Matrix>,
    pub certification: Option<Certification>,
}

impl LoopHomotopyAlgebra {
    pub fn new(space: GradedSpace, maps: MultilinearFamily, omega: SymplecticData) -> Result<Self> {
        check_family(&space, &maps, Flavor::Symmetric, false)?;
        if omega.dim() != space.dim() {
            return Err(Error::InvalidInput("pairing and space dimensions differ".into()));
        }
        for i in 0..space.dim() {
            for j in 0..space.dim() {
                if !omega.gram().get(i, j).is_zero() && space.degree(i) + space.degree(j) != 1 {
                    return Err(Error::Parity(format!(
                        "loop algebras need ω to pair degrees summing to 1; ω({}, {}) pairs {} and {}",
                        space.name(i),
                        space.name(j),
                        space.degree(i),
                        space.degree(j)
                    )));
                }
            }
        }
        Ok(LoopHomotopyAlgebra { space, maps, omega, inverse_tensor: None, certification: None })
    }

    pub fn with_inverse_tensor(mut self, t: Matrix) -> Self {
        self.inverse_tensor = Some(t);
        self
    }

    pub fn omega_inverse_matrix(&self) -> &Matrix {
        self.inverse_tensor.as_ref().unwrap_or_else(|| self.omega.inverse_matrix())
    }

    /// The second-order part `ω^{-1} ∈ A∧2`.
    pub fn omega_inverse(&self) -> WordPoly {
        bivector_from_tensor(&self.space, self.omega_inverse_matrix())
    }

    /// `d = l^0_1`.
    pub fn differential(&self) -> Matrix {
        self.maps.restricted(|a, g| a == 1 && g == 0).differential(&self.space)
    }

    /// `l*_q = l_q − d`.
    pub fn interaction(&self) -> MultilinearFamily {
        self.maps.restricted(|a, g| !(a == 1 && g == 0))
    }

    /// The classical slice as an L∞ algebra.
    pub fn classical(&self) -> LInfinityAlgebra {
        LInfinityAlgebra {
            space: self.space.clone(),
            maps: self.maps.restricted(|_, g| g == 0),
            certification: None,
        }
    }

    pub fn coderivation(&self) -> Coderivation {
        let first = Coderivation::lift_first_order(self.maps.clone());
        let second = Coderivation::lift_second_order(&self.space, &self.omega_inverse()).expect("ω^{-1} lies in A∧2");
        first.plus(&second, 1).expect("both lifts are symmetric")
    }
}

/// Checks `𝔏² = 0` bucket by bucket: input arity and `ħ`-order (genus plus the number of
/// `Ω^{-1}` factors).
pub fn certify_loop(alg: &mut LoopHomotopyAlgebra, max_arity: usize, max_genus: usize) -> RelationReport {
    let mut report = check_square_zero(&alg.space, &alg.coderivation(), max_arity, max_genus);
    report.relation = "loop".into();
    alg.certification = Some(Certification { max_arity, max_genus, passed: report.passes() });
    report
}

/// Structure maps of a cyclic potential `S ∈ SA` (genus-indexed by `ħ`-order):
/// `ω(a_0, l_n(a_1, …, a_n)) = ∂_{a_0} ∂_{a_1} ⋯ ∂_{a_n} S`.
///
/// Monomials of length `n + 1` give `l_n`; a monomial `Π e_i^{k_i}` contributes with
/// multiplicity `Π k_i!`.
pub fn maps_from_potential(space: &GradedSpace, omega: &SymplecticData, potential: &WordPoly) -> Result<MultilinearFamily> {
    if omega.is_degenerate() {
        return Err(Error::DegenerateForm("potentials need a non-degenerate pairing".into()));
    }
    let mut maps = MultilinearFamily::new(Flavor::Symmetric, 1);
    for ((g, word), c) in potential.iter() {
        if word.is_empty() {
            continue;
        }
        let mut mult = Scalar::one();
        let mut run = 1i64;
        for i in 1..=word.len() {
            if i < word.len() && word[i] == word[i - 1] {
                run += 1;
                mult *= &Scalar::from(run);
            } else {
                run = 1;
            }
        }
        let value = c * &mult;
        // each distinct position is a candidate for a_0; the remaining letters are inputs
        let mut seen = Vec::new();
        for p in 0..word.len() {
            if seen.contains(&word[p]) {
                continue;
            }
            seen.push(word[p]);
            let mut rest = word.clone();
            rest.remove(p);
            // moving word[p] to the front costs the Koszul sign over the letters before it
            let sign = Scalar::sign(space.is_odd(word[p]) && space.word_is_odd(&word[..p]));
            let k = word[p];
            // v = Σ_j ω(e_j, v) e^j, so ω(e_k, l(rest)) = value contributes value · e^k
            let out = omega.dual_vector(k).scaled(&(&sign * &value));
            maps.add(space, *g, rest, &out)?;
        }
    }
    Ok(maps)
}
