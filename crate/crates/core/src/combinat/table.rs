use std::collections::BTreeMap;
use std::fmt;

use serde_json::{json, Value};

use super::{Composition, Partition};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Common interface of compositions and partitions as table keys.
pub trait Shape: Clone + Ord + fmt::Display + fmt::Debug + Send + Sync + 'static {
    const KIND: &'static str;
    fn parts(&self) -> &[usize];
    fn size(&self) -> usize;
    fn reduce_part(&self, j: usize) -> Self;
    fn from_parts(parts: Vec<usize>) -> Result<Self>;
}

impl Shape for Composition {
    const KIND: &'static str = "composition";
    fn parts(&self) -> &[usize] {
        Composition::parts(self)
    }
    fn size(&self) -> usize {
        self.n()
    }
    fn reduce_part(&self, j: usize) -> Self {
        Composition::reduce_part(self, j)
    }
    fn from_parts(parts: Vec<usize>) -> Result<Self> {
        Composition::new(parts)
    }
}

impl Shape for Partition {
    const KIND: &'static str = "partition";
    fn parts(&self) -> &[usize] {
        Partition::parts(self)
    }
    fn size(&self) -> usize {
        self.n()
    }
    fn reduce_part(&self, j: usize) -> Self {
        Partition::reduce_part(self, j)
    }
    fn from_parts(parts: Vec<usize>) -> Result<Self> {
        Partition::new(parts)
    }
}

/// Probability law on the compositions (or partitions) of a fixed n.
#[derive(Clone, Debug, PartialEq)]
pub struct DistributionTable<K, S> {
    n: usize,
    entries: BTreeMap<K, S>,
}

pub type CompositionTable<S> = DistributionTable<Composition, S>;
pub type PartitionTable<S> = DistributionTable<Partition, S>;

pub const FLOAT_MASS_TOL: f64 = 1e-12;

impl<K: Shape, S: Scalar> DistributionTable<K, S> {
    /// Duplicate keys are merged by adding their probabilities.
    pub fn new<I: IntoIterator<Item = (K, S)>>(n: usize, entries: I) -> Result<Self> {
        let mut map: BTreeMap<K, S> = BTreeMap::new();
        for (k, p) in entries {
            if k.size() != n {
                return Err(Error::InvalidParameter(format!(
                    "{} {k} does not have size {n}",
                    K::KIND
                )));
            }
            if p.is_negative() {
                return Err(Error::NotProbability(format!("negative mass at {k}")));
            }
            match map.get_mut(&k) {
                Some(v) => *v = v.clone() + p,
                None => {
                    map.insert(k, p);
                }
            }
        }
        let t = DistributionTable { n, entries: map };
        let total = t.total();
        let ok = if S::EXACT {
            total == S::one()
        } else {
            (total.to_f64() - 1.0).abs() <= FLOAT_MASS_TOL
        };
        if !ok {
            return Err(Error::NotProbability(format!(
                "total mass {} at n = {n}",
                total.format()
            )));
        }
        Ok(t)
    }

    pub fn point_mass(k: K) -> Self {
        let n = k.size();
        let mut entries = BTreeMap::new();
        entries.insert(k, S::one());
        DistributionTable { n, entries }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> &'static str {
        K::KIND
    }

    pub fn backend(&self) -> &'static str {
        S::BACKEND
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &S)> {
        self.entries.iter()
    }

    pub fn get(&self, k: &K) -> S {
        self.entries.get(k).cloned().unwrap_or_else(S::zero)
    }

    pub fn total(&self) -> S {
        S::sum_all(self.entries.values().cloned())
    }

    /// Support with zero-probability entries removed.
    pub fn support(&self) -> Vec<&K> {
        self.entries
            .iter()
            .filter(|(_, p)| !p.is_zero())
            .map(|(k, _)| k)
            .collect()
    }

    /// Largest pointwise difference, with missing keys read as zero.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut keys: Vec<&K> = self.entries.keys().collect();
        keys.extend(other.entries.keys());
        keys.into_iter()
            .map(|k| (self.get(k) - other.get(k)).to_f64().abs())
            .fold(0.0, f64::max)
    }

    /// Exact equality on the rational backend, tolerance otherwise; missing keys count as zero.
    pub fn same_law(&self, other: &Self, tol: f64) -> bool {
        if self.n != other.n {
            return false;
        }
        let mut keys: Vec<&K> = self.entries.keys().collect();
        keys.extend(other.entries.keys());
        keys.into_iter().all(|k| self.get(k).close(&other.get(k), tol))
    }

    pub fn to_float(&self) -> DistributionTable<K, f64> {
        DistributionTable {
            n: self.n,
            entries: self
                .entries
                .iter()
                .map(|(k, p)| (k.clone(), p.to_f64()))
                .collect(),
        }
    }

    pub fn to_json(&self) -> Value {
        let entries: Vec<Value> = self
            .entries
            .iter()
            .map(|(k, p)| json!({"parts": k.parts(), "p": p.format()}))
            .collect();
        json!({"n": self.n, "kind": K::KIND, "entries": entries})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |what: &str| Error::Parse(format!("table JSON: {what}"));
        let n = v["n"].as_u64().ok_or_else(|| bad("missing n"))? as usize;
        if v["kind"].as_str() != Some(K::KIND) {
            return Err(bad("kind mismatch"));
        }
        let arr = v["entries"].as_array().ok_or_else(|| bad("missing entries"))?;
        let mut entries = Vec::with_capacity(arr.len());
        for e in arr {
            let parts = e["parts"]
                .as_array()
                .ok_or_else(|| bad("missing parts"))?
                .iter()
                .map(|x| x.as_u64().map(|x| x as usize).ok_or_else(|| bad("bad part")))
                .collect::<Result<Vec<_>>>()?;
            let p = S::parse(e["p"].as_str().ok_or_else(|| bad("missing p"))?)?;
            entries.push((K::from_parts(parts)?, p));
        }
        Self::new(n, entries)
    }
}
