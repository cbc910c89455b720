//! Bucketed relation reports.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::scalar::Scalar;

/// Identifies one family of identities: input arity, open-string arities (empty for
/// closed relations) and `ħ`-order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BucketKey {
    pub arity: usize,
    pub open: Vec<usize>,
    pub hbar: usize,
}

impl BucketKey {
    pub fn new(arity: usize, hbar: usize) -> Self {
        BucketKey { arity, open: Vec::new(), hbar }
    }

    pub fn with_open(arity: usize, open: Vec<usize>, hbar: usize) -> Self {
        BucketKey { arity, open, hbar }
    }
}

/// A nonzero coefficient of an identity that should vanish.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Residual {
    /// Basis word the identity was evaluated on.
    pub input: Vec<usize>,
    /// Output coordinates: one word, or several for multi-slot outputs.
    pub output: Vec<Vec<usize>>,
    pub value: Scalar,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationReport {
    pub relation: String,
    pub max_arity: usize,
    pub max_hbar: usize,
    pub buckets: BTreeMap<BucketKey, Vec<Residual>>,
}

impl RelationReport {
    pub fn new(relation: impl Into<String>, max_arity: usize, max_hbar: usize) -> Self {
        RelationReport { relation: relation.into(), max_arity, max_hbar, buckets: BTreeMap::new() }
    }

    /// Registers a bucket (possibly empty) and appends residuals to it.
    pub fn record(&mut self, key: BucketKey, residuals: impl IntoIterator<Item = Residual>) {
        let entry = self.buckets.entry(key).or_default();
        entry.extend(residuals);
        entry.sort_by(|a, b| (&a.input, &a.output).cmp(&(&b.input, &b.output)));
    }

    pub fn passes(&self) -> bool {
        self.buckets.values().all(Vec::is_empty)
    }

    pub fn failing(&self) -> Vec<&BucketKey> {
        self.buckets.iter().filter(|(_, r)| !r.is_empty()).map(|(k, _)| k).collect()
    }

    pub fn residual_count(&self) -> usize {
        self.buckets.values().map(Vec::len).sum()
    }

    /// Merges another report's buckets into this one.
    pub fn absorb(&mut self, other: RelationReport) {
        for (k, v) in other.buckets {
            self.record(k, v);
        }
    }
}
