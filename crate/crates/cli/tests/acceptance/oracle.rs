//! Brute-force reference computations that share no code with `homotopy-core`.
//!
//! Structure maps come straight from workspace entries; degrees are shifted, so a basis
//! vector is odd iff its degree is odd.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use homotopy_cli::workspace::{StructureSpec, WorkspaceFile};

pub type Q = BigRational;
pub type Vector = Vec<Q>;

pub fn q(text: &str) -> Q {
    match text.split_once('/') {
        Some((a, b)) => Q::new(a.trim().parse::<BigInt>().unwrap(), b.trim().parse::<BigInt>().unwrap()),
        None => Q::from_integer(text.trim().parse::<BigInt>().unwrap()),
    }
}

/// Rank by fraction Gaussian elimination on a dense copy.
pub fn rank(rows: &[Vector]) -> usize {
    let mut m: Vec<Vector> = rows.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let pivot = m[r][c].clone();
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = &m[i][c] / &pivot;
                for j in c..cols {
                    let t = &m[r][j] * &f;
                    m[i][j] -= t;
                }
            }
        }
        r += 1;
    }
    r
}

pub fn mat_mul(a: &[Vector], b: &[Vector]) -> Vec<Vector> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(Q::zero(), |acc, k| if row[k].is_zero() { acc } else { acc + &row[k] * &b[k][j] }))
                .collect()
        })
        .collect()
}

/// A space with its structure maps as dense outputs keyed by input word.
pub struct Raw {
    pub names: Vec<String>,
    pub odd: Vec<bool>,
    pub symmetric: bool,
    /// `(genus, word) ↦ output`; symmetric maps are stored on index-sorted words.
    pub maps: HashMap<(usize, Vec<usize>), Vector>,
}

impl Raw {
    pub fn from_file(file: &WorkspaceFile, structure: &str) -> Raw {
        let s: &StructureSpec = &file.structures[structure];
        let basis = &file.spaces[&s.space];
        let names: Vec<String> = basis.iter().map(|(n, _)| n.clone()).collect();
        let odd = basis.iter().map(|(_, d)| d.rem_euclid(2) == 1).collect();
        let symmetric = !matches!(s.kind, homotopy_cli::workspace::StructureKind::AInfinity | homotopy_cli::workspace::StructureKind::CyclicAInfinity);
        let mut raw = Raw { names, odd, symmetric, maps: HashMap::new() };
        let idx = |n: &str| raw.names.iter().position(|x| x == n).unwrap();
        let mut entries = Vec::new();
        for m in &s.maps {
            let word: Vec<usize> = m.inputs.iter().map(|n| idx(n)).collect();
            let mut out = vec![Q::zero(); raw.names.len()];
            for (n, c) in &m.output {
                out[idx(n)] += q(c);
            }
            entries.push((m.genus.unwrap_or(0), word, out));
        }
        for (g, word, out) in entries {
            let (key, sign) = if raw.symmetric { raw.sort(&word) } else { (word, false) };
            let out = if sign { out.into_iter().map(|x| -x).collect() } else { out };
            raw.maps.insert((g, key), out);
        }
        raw
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn index(&self, name: &str) -> usize {
        self.names.iter().position(|x| x == name).unwrap()
    }

    /// Bubble sort, flipping the sign on every swap of two odd letters.
    pub fn sort(&self, word: &[usize]) -> (Vec<usize>, bool) {
        let mut w = word.to_vec();
        let mut neg = false;
        for i in 0..w.len() {
            for j in 0..w.len() - 1 - i {
                if w[j] > w[j + 1] {
                    neg ^= self.odd[w[j]] && self.odd[w[j + 1]];
                    w.swap(j, j + 1);
                }
            }
        }
        (w, neg)
    }

    /// Structure map on a basis word.
    pub fn eval_word(&self, genus: usize, word: &[usize]) -> Vector {
        let (key, neg) = if self.symmetric { self.sort(word) } else { (word.to_vec(), false) };
        match self.maps.get(&(genus, key)) {
            Some(v) if neg => v.iter().map(|x| -x).collect(),
            Some(v) => v.clone(),
            None => vec![Q::zero(); self.dim()],
        }
    }

    /// Multilinear extension to homogeneous vectors; Koszul signs only arise inside
    /// `eval_word` since the map is applied before anything passes it.
    pub fn eval(&self, genus: usize, args: &[Vector]) -> Vector {
        let mut out = vec![Q::zero(); self.dim()];
        let mut word = Vec::new();
        self.expand(genus, args, &mut word, Q::one(), &mut out);
        out
    }

    fn expand(&self, genus: usize, args: &[Vector], word: &mut Vec<usize>, c: Q, out: &mut Vector) {
        if word.len() == args.len() {
            for (o, v) in out.iter_mut().zip(self.eval_word(genus, word)) {
                *o += &c * v;
            }
            return;
        }
        for (i, x) in args[word.len()].iter().enumerate() {
            if !x.is_zero() {
                word.push(i);
                self.expand(genus, args, word, &c * x, out);
                word.pop();
            }
        }
    }

    pub fn basis(&self, i: usize) -> Vector {
        let mut v = vec![Q::zero(); self.dim()];
        v[i] = Q::one();
        v
    }

    fn words(&self, n: usize) -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        for _ in 0..n {
            out = out.into_iter().flat_map(|w| (0..self.dim()).map(move |i| [w.clone(), vec![i]].concat())).collect();
        }
        out
    }

    /// Arities `n ≤ max` where `Σ ± m(…, m(…), …)` is nonzero on some word.
    pub fn a_infinity_failures(&self, max: usize) -> BTreeSet<usize> {
        let mut bad = BTreeSet::new();
        for n in 1..=max {
            for w in self.words(n) {
                let mut total = vec![Q::zero(); self.dim()];
                for r in 0..n {
                    let neg = w[..r].iter().filter(|&&i| self.odd[i]).count() % 2 == 1;
                    for s in 1..=n - r {
                        let inner = self.eval_word(0, &w[r..r + s]);
                        let mut args: Vec<Vector> = w[..r].iter().map(|&i| self.basis(i)).collect();
                        args.push(inner);
                        args.extend(w[r + s..].iter().map(|&i| self.basis(i)));
                        for (t, v) in total.iter_mut().zip(self.eval(0, &args)) {
                            if neg {
                                *t -= v;
                            } else {
                                *t += v;
                            }
                        }
                    }
                }
                if total.iter().any(|x| !x.is_zero()) {
                    bad.insert(n);
                }
            }
        }
        bad
    }

    /// Koszul sign of listing `w` in the order `perm`.
    fn perm_negative(&self, w: &[usize], perm: &[usize]) -> bool {
        let mut neg = false;
        for i in 0..perm.len() {
            for j in i + 1..perm.len() {
                if perm[i] > perm[j] {
                    neg ^= self.odd[w[perm[i]]] && self.odd[w[perm[j]]];
                }
            }
        }
        neg
    }

    /// Arities `n ≤ max` where `Σ_unshuffles ± l(l(…), …)` is nonzero on some word.
    pub fn l_infinity_failures(&self, max: usize) -> BTreeSet<usize> {
        let mut bad = BTreeSet::new();
        for n in 1..=max {
            for w in self.words(n) {
                let mut total = vec![Q::zero(); self.dim()];
                for mask in 1u32..(1 << n) {
                    let first: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
                    let rest: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 0).collect();
                    let perm = [first.clone(), rest.clone()].concat();
                    let inner_word: Vec<usize> = first.iter().map(|&i| w[i]).collect();
                    let mut args = vec![self.eval_word(0, &inner_word)];
                    args.extend(rest.iter().map(|&i| self.basis(w[i])));
                    let v = self.eval(0, &args);
                    let neg = self.perm_negative(&w, &perm);
                    for (t, x) in total.iter_mut().zip(v) {
                        if neg {
                            *t -= x;
                        } else {
                            *t += x;
                        }
                    }
                }
                if total.iter().any(|x| !x.is_zero()) {
                    bad.insert(n);
                }
            }
        }
        bad
    }
}

fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out: Vec<Vec<Vec<usize>>> = vec![vec![]];
    for i in 0..n {
        let mut next = Vec::new();
        for p in out {
            for b in 0..p.len() {
                let mut q = p.clone();
                q[b].push(i);
                next.push(q);
            }
            let mut q = p;
            q.push(vec![i]);
            next.push(q);
        }
        out = next;
    }
    out
}

/// Classical tree sum `T(a_1, …, a_n) = Σ_partitions ± l_k(E(B_1), …, E(B_k))` with
/// `E({i}) = a_i` and `E(B) = h T(a_B)`; at least two blocks, vertices of arity ≥ 2.
pub struct Trees<'a> {
    pub raw: &'a Raw,
    pub h: &'a [Vector],
    memo: BTreeMap<Vec<usize>, Vector>,
}

pub fn apply(m: &[Vector], v: &Vector) -> Vector {
    m.iter().map(|row| row.iter().zip(v).fold(Q::zero(), |acc, (a, b)| acc + a * b)).collect()
}

impl<'a> Trees<'a> {
    pub fn new(raw: &'a Raw, h: &'a [Vector]) -> Self {
        Trees { raw, h, memo: BTreeMap::new() }
    }

    pub fn t(&mut self, w: &[usize]) -> Vector {
        if let Some(v) = self.memo.get(w) {
            return v.clone();
        }
        let mut total = vec![Q::zero(); self.raw.dim()];
        if w.len() >= 2 {
            for p in set_partitions(w.len()).into_iter().filter(|p| p.len() >= 2) {
                let perm: Vec<usize> = p.concat();
                let neg = self.raw.perm_negative(w, &perm);
                let args: Vec<Vector> = p
                    .iter()
                    .map(|b| {
                        let sub: Vec<usize> = b.iter().map(|&i| w[i]).collect();
                        if sub.len() == 1 {
                            self.raw.basis(sub[0])
                        } else {
                            let inner = self.t(&sub);
                            apply(self.h, &inner)
                        }
                    })
                    .collect();
                for (t, x) in total.iter_mut().zip(self.raw.eval(0, &args)) {
                    if neg {
                        *t -= x;
                    } else {
                        *t += x;
                    }
                }
            }
        }
        self.memo.insert(w.to_vec(), total.clone());
        total
    }
}
