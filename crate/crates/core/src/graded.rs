//! Graded vector spaces with a named basis, sparse elements and Koszul signs.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BasisVector {
    pub name: String,
    pub degree: i64,
}

/// A finite-dimensional graded space given by an ordered basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct GradedSpace {
    basis: Vec<BasisVector>,
}

impl GradedSpace {
    pub fn new<S: Into<String>>(basis: impl IntoIterator<Item = (S, i64)>) -> Result<Self> {
        let basis: Vec<BasisVector> = basis.into_iter().map(|(n, d)| BasisVector { name: n.into(), degree: d }).collect();
        for (i, b) in basis.iter().enumerate() {
            if basis[..i].iter().any(|o| o.name == b.name) {
                return Err(Error::InvalidInput(format!("duplicate basis name {:?}", b.name)));
            }
        }
        Ok(GradedSpace { basis })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BasisVector] {
        &self.basis
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.basis[i].degree
    }

    pub fn is_odd(&self, i: usize) -> bool {
        self.basis[i].degree.rem_euclid(2) == 1
    }

    pub fn name(&self, i: usize) -> &str {
        &self.basis[i].name
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.basis.iter().position(|b| b.name == name)
    }

    pub fn word_degree(&self, word: &[usize]) -> i64 {
        word.iter().map(|&i| self.degree(i)).sum()
    }

    pub fn word_is_odd(&self, word: &[usize]) -> bool {
        word.iter().filter(|&&i| self.is_odd(i)).count() % 2 == 1
    }

    /// Sum of products of parities over pairs `(i, j)` with `i` in `left`, `j` in `right`.
    pub fn cross_parity(&self, left: &[usize], right: &[usize]) -> bool {
        self.word_is_odd(left) && self.word_is_odd(right)
    }

    pub fn basis_element(&self, i: usize) -> Element {
        Element::basis(i)
    }

    pub fn direct_sum(&self, other: &GradedSpace) -> Result<GradedSpace> {
        GradedSpace::new(self.basis.iter().chain(other.basis.iter()).map(|b| (b.name.clone(), b.degree)))
    }
}

/// Sign acquired when reordering homogeneous elements.
///
/// `perm[i]` is the old position of the element that ends up at new position `i`
/// (0-based). Returns `±1`.
pub fn koszul_sign(perm: &[usize], degrees: &[i64]) -> Result<Scalar> {
    if perm.len() != degrees.len() {
        return Err(Error::InvalidInput(format!(
            "permutation of length {} against {} degrees",
            perm.len(),
            degrees.len()
        )));
    }
    let mut seen = alloc::vec![false; perm.len()];
    for &p in perm {
        if p >= perm.len() || seen[p] {
            return Err(Error::InvalidInput(format!("{:?} is not a permutation", perm)));
        }
        seen[p] = true;
    }
    let odd: Vec<bool> = degrees.iter().map(|d| d.rem_euclid(2) == 1).collect();
    Ok(Scalar::sign(koszul_parity(perm, &odd)))
}

/// Parity version of [`koszul_sign`]; `true` means the sign is `-1`. No validation.
pub fn koszul_parity(perm: &[usize], odd: &[bool]) -> bool {
    let mut neg = false;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] && odd[perm[i]] && odd[perm[j]] {
                neg = !neg;
            }
        }
    }
    neg
}

/// Koszul parity of bringing the entries at `picked` (in order) to the front of `word`,
/// keeping the remaining entries in order. `picked` must be strictly increasing.
pub fn unshuffle_parity(space: &GradedSpace, word: &[usize], picked: &[usize]) -> bool {
    let mut neg = false;
    let mut k = 0;
    let mut odd_rest_before = 0usize;
    for (pos, &b) in word.iter().enumerate() {
        if k < picked.len() && picked[k] == pos {
            if space.is_odd(b) && odd_rest_before % 2 == 1 {
                neg = !neg;
            }
            k += 1;
        } else if space.is_odd(b) {
            odd_rest_before += 1;
        }
    }
    neg
}

/// Sorts a word of basis indices into the canonical symmetric order.
///
/// Returns the Koszul parity of the sort, or `None` when an odd vector is repeated
/// (the monomial vanishes in the graded-symmetric algebra).
pub fn sort_symmetric(space: &GradedSpace, word: &mut [usize]) -> Option<bool> {
    let mut neg = false;
    for i in 1..word.len() {
        let mut j = i;
        while j > 0 && word[j - 1] > word[j] {
            if space.is_odd(word[j - 1]) && space.is_odd(word[j]) {
                neg = !neg;
            }
            word.swap(j - 1, j);
            j -= 1;
        }
    }
    for w in word.windows(2) {
        if w[0] == w[1] && space.is_odd(w[0]) {
            return None;
        }
    }
    Some(neg)
}

/// A sparse vector in a graded space. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Element {
    coeffs: BTreeMap<usize, Scalar>,
}

impl Element {
    pub fn zero() -> Self {
        Element::default()
    }

    pub fn basis(i: usize) -> Self {
        Element::from_terms([(i, Scalar::one())])
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (usize, Scalar)>) -> Self {
        let mut e = Element::zero();
        for (i, c) in terms {
            e.add_term(i, &c);
        }
        e
    }

    pub fn add_term(&mut self, i: usize, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.get_mut(&i) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.coeffs.remove(&i);
                }
            }
            None => {
                self.coeffs.insert(i, c.clone());
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Element, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        for (i, v) in &other.coeffs {
            self.add_term(*i, &(v * c));
        }
    }

    pub fn scaled(&self, c: &Scalar) -> Element {
        let mut e = Element::zero();
        e.add_scaled(self, c);
        e
    }

    pub fn coeff(&self, i: usize) -> Scalar {
        self.coeffs.get(&i).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Scalar)> + '_ {
        self.coeffs.iter().map(|(i, c)| (*i, c))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// The common degree of all terms, or `None` for zero or mixed elements.
    pub fn degree(&self, space: &GradedSpace) -> Option<i64> {
        let mut it = self.coeffs.keys().map(|&i| space.degree(i));
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    pub fn is_homogeneous(&self, space: &GradedSpace) -> bool {
        self.is_zero() || self.degree(space).is_some()
    }
}

impl core::ops::Add for &Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        let mut e = self.clone();
        e.add_scaled(rhs, &Scalar::one());
        e
    }
}

impl core::ops::Sub for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        let mut e = self.clone();
        e.add_scaled(rhs, &Scalar::from(-1));
        e
    }
}
