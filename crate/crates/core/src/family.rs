//! Arity- and genus-indexed families of graded multilinear maps.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graded::{sort_symmetric, Element, GradedSpace};
use crate::linalg::Matrix;
use crate::poly::Flavor;
use crate::scalar::Scalar;

/// Values of one multilinear map on basis tuples (canonically sorted for symmetric maps).
pub type MapTable = BTreeMap<Vec<usize>, Element>;

/// `(arity, genus)` index of a component.
pub type ComponentKey = (usize, usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultilinearFamily {
    flavor: Flavor,
    degree: i64,
    components: BTreeMap<ComponentKey, MapTable>,
}

impl MultilinearFamily {
    pub fn new(flavor: Flavor, degree: i64) -> Self {
        MultilinearFamily { flavor, degree, components: BTreeMap::new() }
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    fn normalize(&self, space: &GradedSpace, inputs: &mut Vec<usize>) -> Option<bool> {
        match self.flavor {
            Flavor::Tensor => Some(false),
            Flavor::Symmetric => sort_symmetric(space, inputs),
        }
    }

    fn check_degree(&self, space: &GradedSpace, inputs: &[usize], output: &Element) -> Result<()> {
        let want = space.word_degree(inputs) + self.degree;
        for (i, _) in output.iter() {
            if i >= space.dim() {
                return Err(Error::InvalidInput(format!("output index {i} out of range")));
            }
            if space.degree(i) != want {
                return Err(Error::InvalidInput(format!(
                    "map value on {:?} has a term of degree {} but degree {} is required",
                    names(space, inputs),
                    space.degree(i),
                    want
                )));
            }
        }
        Ok(())
    }

    /// Adds `output` to the value on `inputs`.
    ///
    /// For symmetric maps the inputs may come in any order; the value is transported to the
    /// canonical order with its Koszul sign.
    pub fn add(&mut self, space: &GradedSpace, genus: usize, inputs: Vec<usize>, output: &Element) -> Result<()> {
        self.add_checked(space, genus, inputs, output, false)
    }

    /// Like [`add`](Self::add) but rejects a value that contradicts an existing entry.
    pub fn insert(&mut self, space: &GradedSpace, genus: usize, inputs: Vec<usize>, output: &Element) -> Result<()> {
        self.add_checked(space, genus, inputs, output, true)
    }

    fn add_checked(&mut self, space: &GradedSpace, genus: usize, mut inputs: Vec<usize>, output: &Element, exclusive: bool) -> Result<()> {
        if inputs.iter().any(|&i| i >= space.dim()) {
            return Err(Error::InvalidInput(format!("input index out of range in {:?}", inputs)));
        }
        self.check_degree(space, &inputs, output)?;
        let raw = inputs.clone();
        let sign = match self.normalize(space, &mut inputs) {
            Some(neg) => Scalar::sign(neg),
            None if output.is_zero() => return Ok(()),
            None => {
                return Err(Error::InvalidInput(format!(
                    "symmetric map is nonzero on {:?}, which repeats an odd vector",
                    names(space, &raw)
                )))
            }
        };
        let value = output.scaled(&sign);
        let table = self.components.entry((inputs.len(), genus)).or_default();
        if exclusive {
            if let Some(existing) = table.get(&inputs) {
                if *existing != value {
                    return Err(Error::InvalidInput(format!(
                        "inconsistent values for {:?} (graded symmetry violated)",
                        names(space, &raw)
                    )));
                }
                return Ok(());
            }
        }
        let entry = table.entry(inputs.clone()).or_default();
        entry.add_scaled(&value, &Scalar::one());
        if entry.is_zero() {
            table.remove(&inputs);
        }
        Ok(())
    }

    /// Value on a basis tuple in any order.
    pub fn eval(&self, space: &GradedSpace, arity_genus: ComponentKey, inputs: &[usize]) -> Element {
        let Some(table) = self.components.get(&arity_genus) else { return Element::zero() };
        let mut key = inputs.to_vec();
        match self.normalize(space, &mut key) {
            None => Element::zero(),
            Some(neg) => table.get(&key).map_or_else(Element::zero, |v| v.scaled(&Scalar::sign(neg))),
        }
    }

    /// Multilinear extension to a tuple of homogeneous-or-not elements (Koszul-free: the
    /// map sits in front of its inputs).
    pub fn eval_elements(&self, space: &GradedSpace, key: ComponentKey, inputs: &[Element]) -> Element {
        let mut out = Element::zero();
        let mut idx = Vec::with_capacity(inputs.len());
        expand(inputs, &mut idx, Scalar::one(), &mut |word, c| {
            out.add_scaled(&self.eval(space, key, word), c);
        });
        out
    }

    pub fn component(&self, arity: usize, genus: usize) -> Option<&MapTable> {
        self.components.get(&(arity, genus))
    }

    pub fn components(&self) -> impl Iterator<Item = (&ComponentKey, &MapTable)> + '_ {
        self.components.iter().filter(|(_, t)| !t.is_empty())
    }

    pub fn keys(&self) -> Vec<ComponentKey> {
        self.components().map(|(k, _)| *k).collect()
    }

    pub fn max_arity(&self) -> usize {
        self.components().map(|(k, _)| k.0).max().unwrap_or(0)
    }

    pub fn max_genus(&self) -> usize {
        self.components().map(|(k, _)| k.1).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.components().next().is_none()
    }

    /// Family restricted by a predicate on `(arity, genus)`.
    pub fn restricted(&self, keep: impl Fn(usize, usize) -> bool) -> Self {
        MultilinearFamily {
            flavor: self.flavor,
            degree: self.degree,
            components: self.components.iter().filter(|((a, g), _)| keep(*a, *g)).map(|(k, v)| (*k, v.clone())).collect(),
        }
    }

    /// Sets a whole component table (entries assumed normalized and degree-correct).
    pub fn set_component(&mut self, arity: usize, genus: usize, table: MapTable) {
        let table: MapTable = table.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        if table.is_empty() {
            self.components.remove(&(arity, genus));
        } else {
            self.components.insert((arity, genus), table);
        }
    }

    pub fn plus(&self, other: &MultilinearFamily, c: &Scalar) -> MultilinearFamily {
        let mut out = self.clone();
        for (key, table) in &other.components {
            let dst = out.components.entry(*key).or_default();
            for (w, v) in table {
                let e = dst.entry(w.clone()).or_default();
                e.add_scaled(v, c);
                if e.is_zero() {
                    dst.remove(w);
                }
            }
        }
        out.components.retain(|_, t| !t.is_empty());
        out
    }

    pub fn scaled(&self, c: &Scalar) -> MultilinearFamily {
        MultilinearFamily::new(self.flavor, self.degree).plus(self, c)
    }

    /// The arity-1 genus-0 component as a matrix (column `j` is the image of `e_j`).
    pub fn differential(&self, space: &GradedSpace) -> Matrix {
        let mut m = Matrix::zeros(space.dim(), space.dim());
        if let Some(t) = self.component(1, 0) {
            for (w, v) in t {
                for (i, c) in v.iter() {
                    m.set(i, w[0], c.clone());
                }
            }
        }
        m
    }

    /// Verifies stored values have the declared degree.
    pub fn validate(&self, space: &GradedSpace) -> Result<()> {
        for table in self.components.values() {
            for (w, v) in table {
                self.check_degree(space, w, v)?;
            }
        }
        Ok(())
    }

    /// A family with a single arity-1 genus-0 component given by a matrix.
    pub fn from_linear(space: &GradedSpace, flavor: Flavor, degree: i64, m: &Matrix) -> Result<Self> {
        let mut f = MultilinearFamily::new(flavor, degree);
        for j in 0..space.dim() {
            let col = Element::from_terms(m.column(j).into_iter().enumerate());
            f.insert(space, 0, alloc::vec![j], &col)?;
        }
        Ok(f)
    }
}

fn names<'a>(space: &'a GradedSpace, w: &[usize]) -> Vec<&'a str> {
    w.iter().map(|&i| space.name(i)).collect()
}

/// Expands a tuple of elements into basis words with coefficient products.
pub fn expand(inputs: &[Element], idx: &mut Vec<usize>, c: Scalar, f: &mut impl FnMut(&[usize], &Scalar)) {
    if idx.len() == inputs.len() {
        f(idx, &c);
        return;
    }
    for (i, v) in inputs[idx.len()].iter() {
        idx.push(i);
        expand(inputs, idx, &c * v, f);
        idx.pop();
    }
}

/// Applies a matrix (columns are images of basis vectors) to an element.
pub fn apply_linear(m: &Matrix, e: &Element) -> Element {
    let mut out = Element::zero();
    for (j, c) in e.iter() {
        for i in 0..m.rows() {
            let v = m.get(i, j);
            if !v.is_zero() {
                out.add_term(i, &(v * c));
            }
        }
    }
    out
}

/// Degree of a linear map given by a matrix, if homogeneous (zero map → `None`).
pub fn linear_degree(space: &GradedSpace, m: &Matrix) -> Option<Option<i64>> {
    let mut deg = None;
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if m.get(i, j).is_zero() {
                continue;
            }
            let d = space.degree(i) - space.degree(j);
            match deg {
                None => deg = Some(d),
                Some(e) if e != d => return None,
                _ => {}
            }
        }
    }
    Some(deg)
}
