//! Odd symplectic pairings, their inverse bivector and dual bases.
//!
//! Convention: `ω(a, b) ≠ 0` only when `|a| + |b|` is odd, and
//! `ω(a, b) = (-1)^{|a||b|} ω(b, a)` in the shifted grading. Since one of `a`, `b` is
//! even this makes the Gram matrix symmetric, and the inverse `Σ_k e_k ⊗ e^k` is a
//! graded-symmetric tensor, i.e. an element of `A∧2`.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graded::{Element, GradedSpace};
use crate::linalg::Matrix;
use crate::poly::{Flavor, WordPoly};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymplecticData {
    omega: Matrix,
    /// Inverse Gram matrix; on the non-degenerate block only when `degenerate`.
    inverse: Matrix,
    degenerate: bool,
    /// Fixed total degree `|a| + |b|` of non-vanishing pairs, when requested.
    degree: Option<i64>,
}

impl SymplecticData {
    /// Builds `ω` from entries `(i, j, ω(e_i, e_j))`; the mirrored entry is implied.
    ///
    /// A rank-deficient form is an error unless `allow_degenerate` is set, in which case
    /// the inverse is taken on a maximal non-degenerate principal block.
    pub fn build(space: &GradedSpace, pairs: &[(usize, usize, Scalar)], allow_degenerate: bool) -> Result<Self> {
        Self::build_with_degree(space, pairs, allow_degenerate, None)
    }

    pub fn build_with_degree(
        space: &GradedSpace,
        pairs: &[(usize, usize, Scalar)],
        allow_degenerate: bool,
        degree: Option<i64>,
    ) -> Result<Self> {
        let n = space.dim();
        if let Some(d) = degree {
            if d.rem_euclid(2) != 1 {
                return Err(Error::Parity(format!("pairing degree {d} is even")));
            }
        }
        let mut omega = Matrix::zeros(n, n);
        let mut set = alloc::vec![false; n * n];
        for (i, j, c) in pairs {
            let (i, j) = (*i, *j);
            if i >= n || j >= n {
                return Err(Error::InvalidInput(format!("pairing index ({i}, {j}) out of range")));
            }
            if c.is_zero() {
                continue;
            }
            let total = space.degree(i) + space.degree(j);
            if total.rem_euclid(2) != 1 || degree.is_some_and(|d| d != total) {
                return Err(Error::Parity(format!(
                    "ω({}, {}) = {} pairs degrees {} and {}",
                    space.name(i),
                    space.name(j),
                    c,
                    space.degree(i),
                    space.degree(j)
                )));
            }
            for (a, b) in [(i, j), (j, i)] {
                if set[a * n + b] && omega.get(a, b) != c {
                    return Err(Error::InvalidInput(format!(
                        "conflicting entries for ω({}, {})",
                        space.name(a),
                        space.name(b)
                    )));
                }
                omega.set(a, b, c.clone());
                set[a * n + b] = true;
            }
        }
        let (inverse, degenerate) = match omega.inverse() {
            Some(inv) => (inv, false),
            None if allow_degenerate => (block_inverse(&omega), true),
            None => {
                return Err(Error::DegenerateForm(format!("rank {} < dimension {}", omega.rank(), n)));
            }
        };
        Ok(SymplecticData { omega, inverse, degenerate, degree })
    }

    pub fn dim(&self) -> usize {
        self.omega.rows()
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    pub fn degree(&self) -> Option<i64> {
        self.degree
    }

    pub fn gram(&self) -> &Matrix {
        &self.omega
    }

    pub fn inverse_matrix(&self) -> &Matrix {
        &self.inverse
    }

    pub fn pair(&self, a: &Element, b: &Element) -> Scalar {
        let mut acc = Scalar::zero();
        for (i, x) in a.iter() {
            for (j, y) in b.iter() {
                let w = self.omega.get(i, j);
                if !w.is_zero() {
                    acc += &(&(x * y) * w);
                }
            }
        }
        acc
    }

    /// `e^j` with `ω(e_i, e^j) = δ_ij`.
    pub fn dual_vector(&self, j: usize) -> Element {
        Element::from_terms((0..self.dim()).map(|k| (k, self.inverse.get(k, j).clone())))
    }

    /// The pairs `(e_k, e^k)` whose sum `Σ_k e_k ⊗ e^k` is the canonical inverse tensor.
    pub fn contract_dual_pair(&self) -> Result<Vec<(usize, Element)>> {
        if self.degenerate {
            return Err(Error::DegenerateForm("dual basis requested for a degenerate form".into()));
        }
        Ok((0..self.dim()).map(|k| (k, self.dual_vector(k))).collect())
    }

    /// `ω^{-1}` as an element of `A∧2`: the polynomial whose `(1,1)` coproduct component
    /// is the symmetric tensor `Σ_{j,k} W^{-1}_{kj} e_j ⊗ e_k`.
    pub fn inverse_bivector(&self, space: &GradedSpace) -> WordPoly {
        bivector_from_tensor(space, &self.inverse)
    }

    /// The form in a new basis `f_i = Σ_j m_{ji} e_j` (degrees unchanged).
    pub fn pullback(&self, space: &GradedSpace, m: &Matrix) -> Result<SymplecticData> {
        let g = m.transpose().mul(&self.omega).mul(m);
        let n = self.dim();
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in i..n {
                pairs.push((i, j, g.get(i, j).clone()));
            }
        }
        Self::build_with_degree(space, &pairs, self.degenerate, self.degree)
    }

    /// Graded symmetry `ω(a,b) = (-1)^{|a||b|} ω(b,a)` on all basis pairs.
    pub fn is_graded_symmetric(&self, space: &GradedSpace) -> bool {
        (0..self.dim()).all(|i| {
            (0..self.dim()).all(|j| {
                let s = Scalar::sign(space.is_odd(i) && space.is_odd(j));
                *self.omega.get(i, j) == &s * self.omega.get(j, i)
            })
        })
    }
}

/// Converts a symmetric coefficient matrix `t` (meaning `Σ t_{jk} e_j ⊗ e_k`) into a
/// quadratic polynomial in `SA`.
pub fn bivector_from_tensor(space: &GradedSpace, t: &Matrix) -> WordPoly {
    let mut p = WordPoly::zero(Flavor::Symmetric);
    let half = Scalar::from_ratio(1, 2);
    for j in 0..t.rows() {
        for k in 0..t.cols() {
            let c = t.get(j, k);
            if c.is_zero() {
                continue;
            }
            // e_j e_k and e_k e_j both appear; each sorted monomial has Δ_{1,1} = sum of both
            p.add_term(space, 0, alloc::vec![j, k], &(c * &half));
        }
    }
    // e_j e_j has Δ_{1,1} = 2 e_j⊗e_j, so the halving above is exact for diagonal terms too.
    p
}

fn block_inverse(omega: &Matrix) -> Matrix {
    let n = omega.rows();
    let pivots = omega.echelon().pivots;
    let mut block = Matrix::zeros(pivots.len(), pivots.len());
    for (a, &i) in pivots.iter().enumerate() {
        for (b, &j) in pivots.iter().enumerate() {
            block.set(a, b, omega.get(i, j).clone());
        }
    }
    let inv = block.inverse().expect("principal block on pivot columns of a symmetric matrix is invertible");
    let mut out = Matrix::zeros(n, n);
    for (a, &i) in pivots.iter().enumerate() {
        for (b, &j) in pivots.iter().enumerate() {
            out.set(i, j, inv.get(a, b).clone());
        }
    }
    out
}
