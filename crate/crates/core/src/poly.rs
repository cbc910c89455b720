//! Formal sums of words: elements of the tensor coalgebra `TA` or the symmetric
//! coalgebra `SA`, optionally graded by a formal loop parameter `ħ`.
//!
//! Symmetric words are kept sorted (basis index order) with the Koszul sign of the
//! sort absorbed into the coefficient; words repeating an odd vector vanish.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::graded::{sort_symmetric, Element, GradedSpace};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Flavor {
    Tensor,
    Symmetric,
}

/// A key `(ħ-order, word)`.
pub type Term = (usize, Vec<usize>);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordPoly {
    flavor: Flavor,
    terms: BTreeMap<Term, Scalar>,
}

impl WordPoly {
    pub fn zero(flavor: Flavor) -> Self {
        WordPoly { flavor, terms: BTreeMap::new() }
    }

    pub fn word(space: &GradedSpace, flavor: Flavor, word: &[usize]) -> Self {
        let mut p = WordPoly::zero(flavor);
        p.add_term(space, 0, word.to_vec(), &Scalar::one());
        p
    }

    /// The empty word `1`.
    pub fn unit(flavor: Flavor) -> Self {
        let mut p = WordPoly::zero(flavor);
        p.terms.insert((0, Vec::new()), Scalar::one());
        p
    }

    /// A length-one word from an element.
    pub fn from_element(flavor: Flavor, e: &Element) -> Self {
        let mut p = WordPoly::zero(flavor);
        for (i, c) in e.iter() {
            p.terms.insert((0, alloc::vec![i]), c.clone());
        }
        p
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn add_term(&mut self, space: &GradedSpace, hbar: usize, mut word: Vec<usize>, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let mut c = c.clone();
        if self.flavor == Flavor::Symmetric {
            match sort_symmetric(space, &mut word) {
                None => return,
                Some(true) => c = -c,
                Some(false) => {}
            }
        }
        self.add_normalized((hbar, word), c);
    }

    /// Adds a term whose word is already in normal form.
    pub fn add_normalized(&mut self, key: Term, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(v) => {
                *v += &c;
                if v.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    pub fn add_scaled(&mut self, other: &WordPoly, c: &Scalar) {
        debug_assert_eq!(self.flavor, other.flavor);
        if c.is_zero() {
            return;
        }
        for (k, v) in &other.terms {
            self.add_normalized(k.clone(), v * c);
        }
    }

    /// Adds `c · ħ^shift · other`.
    pub fn add_shifted(&mut self, other: &WordPoly, shift: usize, c: &Scalar) {
        for ((h, w), v) in &other.terms {
            self.add_normalized((h + shift, w.clone()), v * c);
        }
    }

    pub fn scaled(&self, c: &Scalar) -> WordPoly {
        let mut p = WordPoly::zero(self.flavor);
        p.add_scaled(self, c);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Term, &Scalar)> + '_ {
        self.terms.iter()
    }

    pub fn coeff(&self, hbar: usize, word: &[usize]) -> Scalar {
        self.terms.get(&(hbar, word.to_vec())).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Keeps only terms satisfying the predicate on `(ħ-order, word)`.
    pub fn filtered(&self, keep: impl Fn(usize, &[usize]) -> bool) -> WordPoly {
        WordPoly {
            flavor: self.flavor,
            terms: self.terms.iter().filter(|((h, w), _)| keep(*h, w)).map(|(k, v)| (k.clone(), v.clone())).collect(),
        }
    }

    /// Product in the algebra: concatenation (tensor) or graded-commutative product.
    pub fn product(&self, space: &GradedSpace, rhs: &WordPoly, max_hbar: usize) -> WordPoly {
        let mut out = WordPoly::zero(self.flavor);
        for ((h1, w1), c1) in &self.terms {
            for ((h2, w2), c2) in &rhs.terms {
                if h1 + h2 > max_hbar {
                    continue;
                }
                let mut w = w1.clone();
                w.extend_from_slice(w2);
                out.add_term(space, h1 + h2, w, &(c1 * c2));
            }
        }
        out
    }

    /// The length-one part as an element (ħ-order 0 only).
    pub fn linear_part(&self) -> Element {
        Element::from_terms(self.terms.iter().filter(|((h, w), _)| *h == 0 && w.len() == 1).map(|((_, w), c)| (w[0], c.clone())))
    }

    pub fn max_word_len(&self) -> usize {
        self.terms.keys().map(|(_, w)| w.len()).max().unwrap_or(0)
    }
}
