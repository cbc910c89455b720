//! The recursive tree expansion `T = h ∘ l* ∘ e^{1+T}` with `T ∘ i_1 = 0`.
//!
//! `e^{1+T}` sends a word to the sum over its set partitions (consecutive compositions
//! for the tensor flavor) of the product of block values: a single letter stays bare,
//! a larger block is replaced by `T` of it. Arity-zero trees (tadpole subgraphs, which
//! only occur at positive `ħ`-order) enter as the factor `e^{T_0}`.

use alloc::vec;
use alloc::vec::Vec;

use crate::coalgebra::basis_words;
use crate::error::{Error, Result};
use crate::family::{apply_linear, MultilinearFamily};
use crate::graded::{koszul_parity, Element, GradedSpace};
use crate::linalg::Matrix;
use crate::poly::{Flavor, WordPoly};
use crate::report::{BucketKey, RelationReport, Residual};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeExpansion {
    /// `T^g_n` as a degree-0 family; arity 1 is always absent.
    pub trees: MultilinearFamily,
    pub max_arity: usize,
    pub max_hbar: usize,
    /// The `(arity, ħ-order)` buckets that were expanded.
    pub buckets: Vec<(usize, usize)>,
}

/// Calls `f(blocks)` for every set partition of `0..n`; blocks are increasing and
/// ordered by their first element.
pub fn for_each_partition(n: usize, f: &mut impl FnMut(&[Vec<usize>])) {
    fn rec(i: usize, n: usize, blocks: &mut Vec<Vec<usize>>, f: &mut impl FnMut(&[Vec<usize>])) {
        if i == n {
            f(blocks);
            return;
        }
        for b in 0..blocks.len() {
            blocks[b].push(i);
            rec(i + 1, n, blocks, f);
            blocks[b].pop();
        }
        blocks.push(vec![i]);
        rec(i + 1, n, blocks, f);
        blocks.pop();
    }
    rec(0, n, &mut Vec::new(), f);
}

/// Calls `f(blocks)` for every composition of `0..n` into consecutive nonempty blocks.
pub fn for_each_composition(n: usize, f: &mut impl FnMut(&[Vec<usize>])) {
    if n == 0 {
        f(&[]);
        return;
    }
    for mask in 0..(1usize << (n - 1)) {
        let mut blocks = vec![vec![0]];
        for i in 1..n {
            if mask & (1 << (i - 1)) != 0 {
                blocks.push(Vec::new());
            }
            blocks.last_mut().expect("nonempty").push(i);
        }
        f(&blocks);
    }
}

fn block_value(space: &GradedSpace, trees: &MultilinearFamily, letters: &[usize], max_hbar: usize) -> WordPoly {
    let flavor = trees.flavor();
    if letters.len() == 1 {
        return WordPoly::word(space, flavor, letters);
    }
    let mut p = WordPoly::zero(flavor);
    for g in 0..=max_hbar {
        for (i, c) in trees.eval(space, (letters.len(), g), letters).iter() {
            p.add_normalized((g, vec![i]), c.clone());
        }
    }
    p
}

/// `e^{T_0} = Σ_k T_0^k / k!`, truncated at `max_hbar`.
fn tadpole_exponential(space: &GradedSpace, trees: &MultilinearFamily, max_hbar: usize) -> WordPoly {
    let flavor = trees.flavor();
    let t0 = block_value(space, trees, &[], max_hbar);
    let mut total = WordPoly::unit(flavor);
    let mut power = WordPoly::unit(flavor);
    for k in 1..=max_hbar {
        power = power.product(space, &t0, max_hbar).scaled(&Scalar::from_ratio(1, k as i64));
        if power.is_zero() {
            break;
        }
        total.add_scaled(&power, &Scalar::one());
    }
    total
}

/// `e^{1+T}` applied to one basis word.
pub fn tree_exponential(space: &GradedSpace, trees: &MultilinearFamily, word: &[usize], max_hbar: usize) -> WordPoly {
    let flavor = trees.flavor();
    let mut out = WordPoly::zero(flavor);
    let odd: Vec<bool> = word.iter().map(|&a| space.is_odd(a)).collect();
    let mut visit = |blocks: &[Vec<usize>]| {
        let mut acc = WordPoly::unit(flavor);
        for b in blocks {
            let letters: Vec<usize> = b.iter().map(|&p| word[p]).collect();
            acc = acc.product(space, &block_value(space, trees, &letters, max_hbar), max_hbar);
            if acc.is_zero() {
                return;
            }
        }
        let perm: Vec<usize> = blocks.iter().flatten().copied().collect();
        out.add_scaled(&acc, &Scalar::sign(koszul_parity(&perm, &odd)));
    };
    match flavor {
        Flavor::Symmetric => for_each_partition(word.len(), &mut visit),
        Flavor::Tensor => for_each_composition(word.len(), &mut visit),
    }
    if flavor == Flavor::Symmetric {
        let tad = tadpole_exponential(space, trees, max_hbar);
        if tad.len() > 1 {
            out = tad.product(space, &out, max_hbar);
        }
    }
    out
}

/// `Σ_{(ħ^a, u)} l^{hbar−a}_{|u|}(u)`: the vertex maps applied to the `ħ^hbar` part.
pub fn vertex_sum(space: &GradedSpace, vertices: &MultilinearFamily, input: &WordPoly, hbar: usize) -> Element {
    let mut out = Element::zero();
    for ((a, u), c) in input.iter() {
        if *a <= hbar {
            out.add_scaled(&vertices.eval(space, (u.len(), hbar - a), u), c);
        }
    }
    out
}

/// Computes `T^g_n` for all `(n, g)` accepted by `needed`, in order of `g`, then `n`.
///
/// `needed` must be downward closed in both arguments.
pub fn expand_trees_with(
    space: &GradedSpace,
    interaction: &MultilinearFamily,
    h: &Matrix,
    max_arity: usize,
    max_hbar: usize,
    needed: impl Fn(usize, usize) -> bool,
) -> Result<TreeExpansion> {
    if interaction.component(0, 0).is_some() {
        return Err(Error::InvalidInput("genus-0 tadpoles (curved structures) are not supported".into()));
    }
    if interaction.component(1, 0).is_some() {
        return Err(Error::InvalidInput("the interaction must not contain the differential".into()));
    }
    let flavor = interaction.flavor();
    let mut trees = MultilinearFamily::new(flavor, 0);
    let mut buckets = Vec::new();
    for g in 0..=max_hbar {
        for n in (0..=max_arity).filter(|&n| needed(n, g)) {
            buckets.push((n, g));
            if n == 1 || (flavor == Flavor::Tensor && n == 0) {
                continue;
            }
            for w in basis_words(space, flavor, n) {
                let f = tree_exponential(space, &trees, &w, g);
                let value = apply_linear(h, &vertex_sum(space, interaction, &f, g));
                if !value.is_zero() {
                    trees.add(space, g, w, &value)?;
                }
            }
        }
    }
    Ok(TreeExpansion { trees, max_arity, max_hbar, buckets })
}

pub fn expand_trees_family(
    space: &GradedSpace,
    interaction: &MultilinearFamily,
    h: &Matrix,
    max_arity: usize,
    max_hbar: usize,
) -> Result<TreeExpansion> {
    expand_trees_with(space, interaction, h, max_arity, max_hbar, |_, _| true)
}

/// Re-substitutes `T` into `h ∘ l* ∘ e^{1+T}` and reports every mismatch, together with
/// any nonzero arity-1 tree.
pub fn fixed_point_residual(space: &GradedSpace, interaction: &MultilinearFamily, h: &Matrix, exp: &TreeExpansion) -> RelationReport {
    let flavor = interaction.flavor();
    let mut report = RelationReport::new("tree fixed point", exp.max_arity, exp.max_hbar);
    for &(n, g) in &exp.buckets {
        let mut residuals = Vec::new();
        for w in basis_words(space, flavor, n) {
            let expected = if n == 1 || (flavor == Flavor::Tensor && n == 0) {
                Element::zero()
            } else {
                apply_linear(h, &vertex_sum(space, interaction, &tree_exponential(space, &exp.trees, &w, g), g))
            };
            let diff = &expected - &exp.trees.eval(space, (n, g), &w);
            for (i, c) in diff.iter() {
                residuals.push(Residual { input: w.clone(), output: vec![vec![i]], value: c.clone() });
            }
        }
        report.record(BucketKey::new(n, g), residuals);
    }
    report
}
