//! Deformation complexes `(Coder, [M, ·])` truncated in arity, and their cohomology.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::coalgebra::{basis_words, Coderivation};
use crate::error::{Error, Result};
use crate::family::MultilinearFamily;
use crate::graded::{Element, GradedSpace};
use crate::linalg::{rank_of, Matrix};
use crate::poly::{Flavor, WordPoly};
use crate::scalar::Scalar;
use crate::ibl::{cochain_differential, orbit_basis, CyclicCochain, IBLStructure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ComplexKind {
    /// All coderivations of the tensor coalgebra.
    Hochschild,
    /// Coderivations of the tensor coalgebra that are cyclic for `ω`.
    CyclicHochschild,
    /// All coderivations of the symmetric coalgebra.
    ChevalleyEilenberg,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeCohomology {
    pub cochains: usize,
    /// Rank of `d` leaving this degree.
    pub rank_out: usize,
    /// Rank of `d` arriving in this degree.
    pub rank_in: usize,
    pub dim: usize,
    pub representatives: Vec<MultilinearFamily>,
    /// Representatives for the cyclic cochain complex.
    pub cochain_representatives: Vec<CyclicCochain>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CohomologyReport {
    pub kind: ComplexKind,
    pub min_arity: usize,
    pub max_arity: usize,
    pub degrees: BTreeMap<i64, DegreeCohomology>,
}

impl CohomologyReport {
    pub fn dim(&self, degree: i64) -> usize {
        self.degrees.get(&degree).map_or(0, |d| d.dim)
    }

    pub fn total_dim(&self) -> usize {
        self.degrees.values().map(|d| d.dim).sum()
    }
}

/// Coordinates `(input word, output index)` of a first-order map.
type Coord = (Vec<usize>, usize);

fn coords(m: &MultilinearFamily) -> BTreeMap<Coord, Scalar> {
    let mut out = BTreeMap::new();
    for ((_, g), table) in m.components() {
        debug_assert_eq!(*g, 0);
        for (w, e) in table {
            for (i, c) in e.iter() {
                out.insert((w.clone(), i), c.clone());
            }
        }
    }
    out
}

/// `[M, X]` corestricted to arities `min_arity..=max_arity`.
pub fn bracket_with(space: &GradedSpace, m: &Coderivation, x: &MultilinearFamily, min_arity: usize, max_arity: usize) -> Result<MultilinearFamily> {
    let flavor = x.flavor();
    let dx = Coderivation::lift_first_order(x.clone());
    let sign = Scalar::sign(x.degree().rem_euclid(2) == 1);
    let mut out = MultilinearFamily::new(flavor, x.degree() + m.degree());
    for n in min_arity..=max_arity {
        for w in basis_words(space, flavor, n) {
            let input = WordPoly::word(space, flavor, &w);
            let mut v = m.apply(space, &dx.apply(space, &input, 0), 0);
            v.add_scaled(&dx.apply(space, &m.apply(space, &input, 0), 0), &-sign.clone());
            let value = v.filtered(|h, out| h == 0 && out.len() == 1).linear_part();
            if !value.is_zero() {
                out.add(space, 0, w, &value)?;
            }
        }
    }
    Ok(out)
}

/// Single-entry maps `w ↦ e_i` for all basis words of the given arities.
pub fn elementary_basis(space: &GradedSpace, flavor: Flavor, min_arity: usize, max_arity: usize) -> Vec<MultilinearFamily> {
    let mut out = Vec::new();
    for n in min_arity..=max_arity {
        for w in basis_words(space, flavor, n) {
            for i in 0..space.dim() {
                let degree = space.degree(i) - space.word_degree(&w);
                let mut f = MultilinearFamily::new(flavor, degree);
                f.insert(space, 0, w.clone(), &Element::basis(i)).expect("elementary map is well formed");
                out.push(f);
            }
        }
    }
    out
}

/// Cohomology of `d = [M, ·]` on the span of `basis` (which must be closed under `d`).
pub fn complex_cohomology(
    space: &GradedSpace,
    m: &Coderivation,
    basis: &[MultilinearFamily],
    kind: ComplexKind,
    min_arity: usize,
    max_arity: usize,
) -> Result<CohomologyReport> {
    let mut by_degree: BTreeMap<i64, Vec<&MultilinearFamily>> = BTreeMap::new();
    for b in basis {
        by_degree.entry(b.degree()).or_default().push(b);
    }
    let mut index: BTreeMap<Coord, usize> = BTreeMap::new();
    let dense = |c: &BTreeMap<Coord, Scalar>, index: &mut BTreeMap<Coord, usize>| -> Vec<(usize, Scalar)> {
        c.iter()
            .map(|(k, v)| {
                let n = index.len();
                (*index.entry(k.clone()).or_insert(n), v.clone())
            })
            .collect()
    };
    let mut images: BTreeMap<i64, Vec<Vec<(usize, Scalar)>>> = BTreeMap::new();
    let mut sources: BTreeMap<i64, Vec<Vec<(usize, Scalar)>>> = BTreeMap::new();
    for (deg, fams) in &by_degree {
        for f in fams {
            let df = bracket_with(space, m, f, min_arity, max_arity)?;
            let img = dense(&coords(&df), &mut index);
            images.entry(*deg).or_default().push(img);
            let src = dense(&coords(f), &mut index);
            sources.entry(*deg).or_default().push(src);
        }
    }
    let len = index.len();
    let expand = |v: &[(usize, Scalar)]| {
        let mut out = alloc::vec![Scalar::zero(); len];
        for (i, c) in v {
            out[*i] = c.clone();
        }
        out
    };
    let mut degrees = BTreeMap::new();
    for (deg, fams) in &by_degree {
        let img: Vec<Vec<Scalar>> = images[deg].iter().map(|v| expand(v)).collect();
        let rank_out = rank_of(&img, len);
        let incoming: Vec<Vec<Scalar>> = images.get(&(deg - 1)).map(|vs| vs.iter().map(|v| expand(v)).collect()).unwrap_or_default();
        let rank_in = rank_of(&incoming, len);
        let src: Vec<Vec<Scalar>> = sources[deg].iter().map(|v| expand(v)).collect();
        let cochains = rank_of(&src, len);
        let kernel = Matrix::from_columns(&img, len).nullspace();
        let mut spanning = incoming.clone();
        let mut representatives = Vec::new();
        for k in kernel {
            let mut v = alloc::vec![Scalar::zero(); len];
            for (c, s) in k.iter().zip(&src) {
                if !c.is_zero() {
                    for (vi, si) in v.iter_mut().zip(s) {
                        *vi += &(c * si);
                    }
                }
            }
            let before = rank_of(&spanning, len);
            spanning.push(v);
            if rank_of(&spanning, len) > before {
                let mut rep = MultilinearFamily::new(fams[0].flavor(), *deg);
                for (c, f) in k.iter().zip(fams) {
                    rep = rep.plus(f, c);
                }
                representatives.push(rep);
            } else {
                spanning.pop();
            }
        }
        let dim = cochains - rank_out - rank_in;
        if representatives.len() != dim {
            return Err(Error::Inconsistent("basis is not closed under the differential".into()));
        }
        degrees.insert(*deg, DegreeCohomology { cochains, rank_out, rank_in, dim, representatives, cochain_representatives: Vec::new() });
    }
    Ok(CohomologyReport { kind, min_arity, max_arity, degrees })
}

/// Cohomology of `d_h = [h, ·]` on cyclic cochains with `1..=max_arity + 1` inputs, i.e.
/// cyclic coderivations of arity `≤ max_arity`.
pub fn cyclic_cohomology(ibl: &IBLStructure, max_arity: usize) -> Result<CohomologyReport> {
    let space = &ibl.space;
    let mut by_degree: BTreeMap<i64, Vec<CyclicCochain>> = BTreeMap::new();
    for n in 1..=max_arity + 1 {
        for f in orbit_basis(space, n) {
            let deg = f.degree(space, &ibl.omega).unwrap_or(0);
            by_degree.entry(deg).or_default().push(f);
        }
    }
    let len_ok = |w: &Vec<usize>| w.len() <= max_arity + 1;
    let mut index: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    for f in by_degree.values().flatten() {
        for w in f.orbit_coordinates().into_keys() {
            let n = index.len();
            index.entry(w).or_insert(n);
        }
    }
    let mut images: BTreeMap<i64, Vec<Vec<(usize, Scalar)>>> = BTreeMap::new();
    for (deg, fs) in &by_degree {
        for f in fs {
            let df = cochain_differential(ibl, f)?;
            let v = df
                .orbit_coordinates()
                .into_iter()
                .filter(|(w, _)| len_ok(w))
                .map(|(w, c)| {
                    let n = index.len();
                    (*index.entry(w).or_insert(n), c)
                })
                .collect();
            images.entry(*deg).or_default().push(v);
        }
    }
    let len = index.len();
    let expand = |v: &[(usize, Scalar)]| {
        let mut out = alloc::vec![Scalar::zero(); len];
        for (i, c) in v {
            out[*i] = c.clone();
        }
        out
    };
    let mut degrees = BTreeMap::new();
    for (deg, fs) in &by_degree {
        let img: Vec<Vec<Scalar>> = images[deg].iter().map(|v| expand(v)).collect();
        let rank_out = rank_of(&img, len);
        let rank_in = images.get(&(deg - 1)).map_or(0, |vs| rank_of(&vs.iter().map(|v| expand(v)).collect::<Vec<_>>(), len));
        let cochains = fs.len();
        let dim = cochains - rank_out - rank_in;
        let mut spanning: Vec<Vec<Scalar>> = images.get(&(deg - 1)).map(|vs| vs.iter().map(|v| expand(v)).collect()).unwrap_or_default();
        let mut reps = Vec::new();
        for k in Matrix::from_columns(&img, len).nullspace() {
            let mut rep = CyclicCochain::zero();
            for (c, f) in k.iter().zip(fs) {
                rep.add_scaled(f, c);
            }
            let coords: Vec<(usize, Scalar)> = rep.orbit_coordinates().into_iter().map(|(w, c)| (index[&w], c)).collect();
            let before = rank_of(&spanning, len);
            spanning.push(expand(&coords));
            if rank_of(&spanning, len) == before {
                spanning.pop();
            } else {
                reps.push(rep);
            }
        }
        degrees.insert(*deg, DegreeCohomology { cochains, rank_out, rank_in, dim, representatives: Vec::new(), cochain_representatives: reps });
    }
    Ok(CohomologyReport { kind: ComplexKind::CyclicHochschild, min_arity: 0, max_arity, degrees })
}
