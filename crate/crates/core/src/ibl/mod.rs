//! Cyclic cochains `𝒜_o = Hom^cycl(TA_o, 𝕜)` and the involutive Lie bialgebra
//! `(𝒜_o, d_h, [·,·], δ)`.
//!
//! Cochains are cyclic under the Koszul sign of rotation and have at least one input.
//! They are graded by `|f| = s − 1 − |w|` for `f` supported on words `w` (`s` the pairing
//! degree), so their parity is that of `w`. The bracket glues two cochains along
//! `ω^{-1} = Σ_k e_k ⊗ e^k`, `d_h = [h, ·]` with `h` the vertex cochain of the open
//! structure, and `δ` cuts a cochain into two non-empty pieces. All three are odd; the
//! bracket is graded symmetric.
//!
//! The vertex cochain of `m` is `h(a_0, …, a_n) = ω(a_0, m(a_1, …, a_n))`; conversely
//! `m(a) = Σ_k h(e_k, a) e^k`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::coalgebra::{basis_words, Coderivation};
use crate::error::{Error, Result};
use crate::family::MultilinearFamily;
use crate::graded::{koszul_parity, Element, GradedSpace};
use crate::poly::{Flavor, WordPoly};
use crate::scalar::Scalar;
use crate::symplectic::SymplecticData;

/// A multilinear functional on `A^{⊗n}`, invariant under
/// `f(a_0, …, a_n) = (-1)^{|a_n|(|a_0|+…+|a_{n-1}|)} f(a_n, a_0, …, a_{n-1})`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CyclicCochain {
    values: BTreeMap<Vec<usize>, Scalar>,
}

/// Rotation `(a_0, …, a_n) ↦ (a_n, a_0, …, a_{n-1})` and its sign.
fn rotate(space: &GradedSpace, w: &[usize]) -> (Vec<usize>, bool) {
    if w.is_empty() {
        return (Vec::new(), false);
    }
    let n = w.len() - 1;
    let mut r = Vec::with_capacity(w.len());
    r.push(w[n]);
    r.extend_from_slice(&w[..n]);
    (r, space.is_odd(w[n]) && space.word_is_odd(&w[..n]))
}

/// The cyclic orbit of `w` with the value each word takes when `w ↦ 1`, or `None` when
/// the sign constraints force the orbit to vanish.
fn orbit(space: &GradedSpace, w: &[usize]) -> Option<Vec<(Vec<usize>, bool)>> {
    let mut out: Vec<(Vec<usize>, bool)> = alloc::vec![(w.to_vec(), false)];
    loop {
        let (cur, neg) = out.last().cloned().unwrap();
        let (next, s) = rotate(space, &cur);
        // f(cur) = ± f(next), so f(next) = ± f(cur).
        let next_neg = neg ^ s;
        if let Some((_, existing)) = out.iter().find(|(u, _)| *u == next) {
            return if *existing == next_neg { Some(out) } else { None };
        }
        out.push((next, next_neg));
    }
}

/// The smallest rotation of `w`.
pub fn canonical_rotation(w: &[usize]) -> Vec<usize> {
    (0..w.len().max(1)).map(|r| {
        let mut v = w[r.min(w.len())..].to_vec();
        v.extend_from_slice(&w[..r.min(w.len())]);
        v
    }).min().unwrap_or_default()
}

impl CyclicCochain {
    pub fn zero() -> Self {
        CyclicCochain::default()
    }

    /// The orbit sum normalized to `1` on `w`; `None` if the orbit is sign-inconsistent.
    pub fn orbit_sum(space: &GradedSpace, w: &[usize]) -> Option<Self> {
        let orb = orbit(space, w)?;
        Some(CyclicCochain { values: orb.into_iter().map(|(u, neg)| (u, Scalar::sign(neg))).collect() })
    }

    /// Builds a cochain from a full table, rejecting tables that are not cyclic.
    pub fn from_values(space: &GradedSpace, values: BTreeMap<Vec<usize>, Scalar>) -> Result<Self> {
        let f = CyclicCochain { values: values.into_iter().filter(|(_, c)| !c.is_zero()).collect() };
        for (w, c) in &f.values {
            if w.is_empty() {
                return Err(Error::InvalidInput("cyclic cochains need at least one input".into()));
            }
            let (r, s) = rotate(space, w);
            if f.value(&r) != c * &Scalar::sign(s) {
                return Err(Error::InvalidInput(alloc::format!("cochain is not cyclic on {:?}", w)));
            }
        }
        Ok(f)
    }

    pub fn value(&self, w: &[usize]) -> Scalar {
        self.values.get(w).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn values(&self) -> &BTreeMap<Vec<usize>, Scalar> {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    pub fn arities(&self) -> Vec<usize> {
        let mut a: Vec<usize> = self.values.keys().map(Vec::len).collect();
        a.dedup();
        a
    }

    /// Parity of `|f|`; `None` for zero or mixed cochains.
    pub fn is_odd(&self, space: &GradedSpace) -> Option<bool> {
        let mut it = self.values.keys().map(|w| space.word_is_odd(w));
        let first = it.next()?;
        it.all(|p| p == first).then_some(first)
    }

    pub fn add_scaled(&mut self, other: &CyclicCochain, c: &Scalar) {
        for (w, v) in &other.values {
            let e = self.values.entry(w.clone()).or_insert_with(Scalar::zero);
            *e += &(v * c);
            if e.is_zero() {
                self.values.remove(w);
            }
        }
    }

    pub fn scaled(&self, c: &Scalar) -> CyclicCochain {
        let mut out = CyclicCochain::zero();
        out.add_scaled(self, c);
        out
    }

    /// Coordinates in the orbit basis, keyed by canonical rotation.
    pub fn orbit_coordinates(&self) -> BTreeMap<Vec<usize>, Scalar> {
        self.values.iter().filter(|(w, _)| canonical_rotation(w) == **w).map(|(w, c)| (w.clone(), c.clone())).collect()
    }

    /// `f(a_0, a) = ω(a_0, m(a))` for a tensor family `m`.
    pub fn from_coderivation(space: &GradedSpace, omega: &SymplecticData, m: &MultilinearFamily) -> CyclicCochain {
        let mut values = BTreeMap::new();
        for ((n, _), table) in m.components() {
            for a0 in 0..space.dim() {
                for (w, out) in table {
                    let v = omega.pair(&Element::basis(a0), out);
                    if !v.is_zero() {
                        let mut key = alloc::vec![a0];
                        key.extend_from_slice(w);
                        values.insert(key, v);
                    }
                }
            }
            debug_assert!(table.keys().all(|w| w.len() == *n));
        }
        CyclicCochain { values }
    }

    /// `m_f(a) = Σ_k f(e_k, a) e^k` as a tensor family of degree `|f| + 1`.
    pub fn to_coderivation(&self, space: &GradedSpace, omega: &SymplecticData) -> Result<MultilinearFamily> {
        if omega.is_degenerate() {
            return Err(Error::DegenerateForm("cochain dualization needs a non-degenerate form".into()));
        }
        let degree = match (self.values.iter().next(), omega.degree()) {
            (None, _) => 0,
            (Some((w, _)), d) => d.unwrap_or(1) - space.word_degree(w),
        };
        let mut m = MultilinearFamily::new(Flavor::Tensor, degree);
        for (w, c) in &self.values {
            let out = omega.dual_vector(w[0]).scaled(c);
            m.add(space, 0, w[1..].to_vec(), &out)?;
        }
        Ok(m)
    }

    /// The symmetric pairing degree `|f| = s − 1 − |w|` with `s` the pairing degree.
    pub fn degree(&self, space: &GradedSpace, omega: &SymplecticData) -> Option<i64> {
        let (w, _) = self.values.iter().next()?;
        Some(omega.degree().unwrap_or(1) - 1 - space.word_degree(w))
    }
}

/// One orbit-sum cochain per nonvanishing cyclic orbit of words of length `n`.
pub fn orbit_basis(space: &GradedSpace, n: usize) -> Vec<CyclicCochain> {
    basis_words(space, Flavor::Tensor, n)
        .into_iter()
        .filter(|w| canonical_rotation(w) == *w)
        .filter_map(|w| CyclicCochain::orbit_sum(space, &w))
        .collect()
}

fn family_arities(m: &MultilinearFamily) -> Vec<usize> {
    let mut a: Vec<usize> = m.components().filter(|(_, t)| !t.is_empty()).map(|((n, _), _)| *n).collect();
    a.dedup();
    a
}

/// `[A, B]` for tensor families, tabulated on every arity it can be nonzero on.
pub fn family_commutator(space: &GradedSpace, a: &MultilinearFamily, b: &MultilinearFamily) -> Result<MultilinearFamily> {
    let da = Coderivation::lift_first_order(a.clone());
    let db = Coderivation::lift_first_order(b.clone());
    let sign = Scalar::sign(a.degree().rem_euclid(2) == 1 && b.degree().rem_euclid(2) == 1);
    let mut arities: Vec<usize> = Vec::new();
    for p in family_arities(a) {
        for q in family_arities(b) {
            if p + q >= 1 {
                arities.push(p + q - 1);
            }
        }
    }
    arities.sort_unstable();
    arities.dedup();
    let mut out = MultilinearFamily::new(Flavor::Tensor, a.degree() + b.degree());
    for n in arities {
        for w in basis_words(space, Flavor::Tensor, n) {
            let x = WordPoly::word(space, Flavor::Tensor, &w);
            let mut v = da.apply(space, &db.apply(space, &x, 0), 0);
            v.add_scaled(&db.apply(space, &da.apply(space, &x, 0), 0), &-sign.clone());
            let value = v.linear_part();
            if !value.is_zero() {
                out.add(space, 0, w, &value)?;
            }
        }
    }
    Ok(out)
}

/// An element of `𝒜_o ⊗ 𝒜_o` as its table `(a-word, b-word) ↦ (δf)(a)(b)`.
pub type CochainPairTable = BTreeMap<(Vec<usize>, Vec<usize>), Scalar>;

/// Open-string cyclic A∞ data with the induced operations on cyclic cochains.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IBLStructure {
    pub space: GradedSpace,
    pub maps: MultilinearFamily,
    pub omega: SymplecticData,
}

impl IBLStructure {
    pub fn new(space: GradedSpace, maps: MultilinearFamily, omega: SymplecticData) -> Result<Self> {
        if maps.flavor() != Flavor::Tensor || maps.degree() != 1 {
            return Err(Error::InvalidInput("open structure must be a tensor family of degree 1".into()));
        }
        if omega.is_degenerate() || omega.dim() != space.dim() {
            return Err(Error::DegenerateForm("open pairing must be non-degenerate on the whole space".into()));
        }
        maps.validate(&space)?;
        Ok(IBLStructure { space, maps, omega })
    }

    /// Cochain parity (`|f|` mod 2) of the orbit through `w`.
    pub fn word_is_odd(&self, w: &[usize]) -> bool {
        self.space.word_is_odd(w)
    }
}

/// The vertex cochain `h(a_0, …, a_n) = ω(a_0, m_n(a_1, …, a_n))` of the open structure.
pub fn hamiltonian(ibl: &IBLStructure) -> CyclicCochain {
    CyclicCochain::from_coderivation(&ibl.space, &ibl.omega, &ibl.maps)
}

/// Contraction of one slot of `f` with one slot of `g` through `ω^{-1} = Σ_k e_k ⊗ e^k`,
/// summed over cyclic rotations of the glued word:
/// `Σ_r ε_r Σ_k (-1)^{|e^k|(|d_1|+…+|d_{p−1}|)} f(e_k, d_1, …, d_{p−1}) g(e^k, d_p, …, d_N)` with
/// `d` the `r`-th rotation and `ε_r` its Koszul sign.
pub fn glue(ibl: &IBLStructure, f: &CyclicCochain, g: &CyclicCochain) -> Result<CyclicCochain> {
    let space = &ibl.space;
    let duals = ibl.omega.contract_dual_pair()?;
    let mut values = BTreeMap::new();
    for p in f.arities().into_iter().filter(|&p| p >= 1) {
        for q in g.arities().into_iter().filter(|&q| q >= 1) {
            let total = p + q - 2;
            if total == 0 {
                continue;
            }
            for c in basis_words(space, Flavor::Tensor, total) {
                let mut acc = Scalar::zero();
                let mut word = c.clone();
                let mut rot_neg = false;
                for _ in 0..total {
                    let (left, right) = word.split_at(p - 1);
                    for (k, dual) in &duals {
                        let mut fw = alloc::vec![*k];
                        fw.extend_from_slice(left);
                        let fv = f.value(&fw);
                        if fv.is_zero() {
                            continue;
                        }
                        for (kd, cd) in dual.iter() {
                            let mut gw = alloc::vec![kd];
                            gw.extend_from_slice(right);
                            let gv = g.value(&gw);
                            if gv.is_zero() {
                                continue;
                            }
                            // e^k moves past d_1..d_{p-1}.
                            let neg = (space.is_odd(kd) && space.word_is_odd(left)) ^ rot_neg;
                            acc += &(&(&fv * &gv) * &(cd * &Scalar::sign(neg)));
                        }
                    }
                    let (next, s) = rotate(space, &word);
                    // f(word) = ± f(next): the term at `next` enters with the accumulated sign.
                    rot_neg ^= s;
                    word = next;
                }
                if !acc.is_zero() {
                    let e = values.entry(c).or_insert_with(Scalar::zero);
                    *e += &acc;
                }
            }
        }
    }
    Ok(CyclicCochain { values: values.into_iter().filter(|(_, c): &(Vec<usize>, Scalar)| !c.is_zero()).collect() })
}

/// `[f, g]`: the gluing of `f` and `g`. Graded symmetric of degree +1.
pub fn cochain_bracket(ibl: &IBLStructure, f: &CyclicCochain, g: &CyclicCochain) -> Result<CyclicCochain> {
    glue(ibl, f, g)
}

/// `d_h f = [h, f]` with `h` the vertex cochain of the open structure.
pub fn cochain_differential(ibl: &IBLStructure, f: &CyclicCochain) -> Result<CyclicCochain> {
    cochain_bracket(ibl, &hamiltonian(ibl), f)
}

/// `(δf)(a)(b) = (-1)^{|f|} Σ_{i,j} (-1)^ε Σ_k f(e_k, a_i…a_{i−1}, e^k, b_j…b_{j−1})` for
/// non-empty blocks `a`, `b`. `ε` is the Koszul sign taking `(e_k, e^k, a, b)` to the order
/// inside `f`.
pub fn cobracket_delta(ibl: &IBLStructure, f: &CyclicCochain) -> Result<CochainPairTable> {
    let space = &ibl.space;
    let duals = ibl.omega.contract_dual_pair()?;
    let mut out = CochainPairTable::new();
    let mut by_len: BTreeMap<usize, ()> = BTreeMap::new();
    for w in f.values().keys() {
        by_len.insert(w.len(), ());
    }
    for len in by_len.keys().copied().filter(|&l| l >= 2) {
        let rest = len - 2;
        let f_odd = f.is_odd(space).unwrap_or(false);
        for n in 0..=rest {
            let m = rest - n;
            if n == 0 || m == 0 {
                continue;
            }
            for a in basis_words(space, Flavor::Tensor, n) {
                for b in basis_words(space, Flavor::Tensor, m) {
                    let mut total = Scalar::zero();
                    for (k, dual) in &duals {
                        for (kd, cd) in dual.iter() {
                            // positions: 0 = e_k, 1 = e^k, 2.. = a, then b
                            let letters: Vec<usize> = [*k, kd].into_iter().chain(a.iter().copied()).chain(b.iter().copied()).collect();
                            let odd: Vec<bool> = letters.iter().map(|&x| space.is_odd(x)).collect();
                            for i in 0..n {
                                for j in 0..m {
                                    let mut perm = alloc::vec![0usize];
                                    perm.extend((0..n).map(|t| 2 + (i + t) % n));
                                    perm.push(1);
                                    perm.extend((0..m).map(|t| 2 + n + (j + t) % m));
                                    let word: Vec<usize> = perm.iter().map(|&p| letters[p]).collect();
                                    let v = f.value(&word);
                                    if !v.is_zero() {
                                        let s = Scalar::sign(koszul_parity(&perm, &odd));
                                        total += &(&(&v * cd) * &s);
                                    }
                                }
                            }
                        }
                    }
                    if !total.is_zero() {
                        out.insert((a.clone(), b.clone()), total * Scalar::sign(f_odd));
                    }
                }
            }
        }
    }
    Ok(out)
}

mod operator;
pub use operator::{certify_ibl, certify_ibl_with, CochainPoly, IblOperator, Letter};
