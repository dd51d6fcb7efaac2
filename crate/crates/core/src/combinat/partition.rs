use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Pow};

use super::Composition;
use crate::error::{Error, Result};
use crate::scalar::factorial;

/// Parts of n in nonincreasing order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    /// Sorts the given parts; zeros are rejected.
    pub fn new(mut parts: Vec<usize>) -> Result<Self> {
        if parts.iter().any(|&p| p == 0) {
            return Err(Error::InvalidParameter(format!(
                "partition parts must be positive: {parts:?}"
            )));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Partition { parts })
    }

    pub(crate) fn from_parts_unchecked(mut parts: Vec<usize>) -> Self {
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition { parts }
    }

    pub fn empty() -> Self {
        Partition { parts: Vec::new() }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn n(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn k(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// k_r = #{j : λ_j = r}, keyed by r.
    pub fn multiplicities(&self) -> BTreeMap<usize, usize> {
        let mut m = BTreeMap::new();
        for &p in &self.parts {
            *m.entry(p).or_insert(0) += 1;
        }
        m
    }

    pub fn multiplicity(&self, r: usize) -> usize {
        self.parts.iter().filter(|&&p| p == r).count()
    }

    /// Distinct part sizes, largest first.
    pub fn distinct_parts(&self) -> Vec<usize> {
        let mut v = self.parts.clone();
        v.dedup();
        v
    }

    /// Number of set partitions of [n] with this shape: n! ∏_r 1/((r!)^{k_r} k_r!).
    pub fn shape_count(&self) -> BigUint {
        let den = self
            .multiplicities()
            .into_iter()
            .fold(BigUint::one(), |acc, (r, kr)| {
                acc * Pow::pow(factorial(r), kr) * factorial(kr)
            });
        factorial(self.n()) / den
    }

    /// λ∖{m}: remove one part equal to m.
    pub fn remove_part(&self, m: usize) -> Option<Self> {
        let pos = self.parts.iter().position(|&p| p == m)?;
        let mut parts = self.parts.clone();
        parts.remove(pos);
        Some(Partition { parts })
    }

    pub fn reduce_part(&self, j: usize) -> Self {
        let mut parts = self.parts.clone();
        if parts[j] == 1 {
            parts.remove(j);
        } else {
            parts[j] -= 1;
        }
        Partition::from_parts_unchecked(parts)
    }

    /// All distinct orderings of the parts, in binary-code order.
    pub fn arrangements(&self) -> Vec<Composition> {
        let mut counts: Vec<(usize, usize)> = self.multiplicities().into_iter().rev().collect();
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(self.k());
        fn rec(
            counts: &mut Vec<(usize, usize)>,
            cur: &mut Vec<usize>,
            k: usize,
            out: &mut Vec<Composition>,
        ) {
            if cur.len() == k {
                out.push(Composition::from_parts_unchecked(cur.clone()));
                return;
            }
            for i in 0..counts.len() {
                if counts[i].1 == 0 {
                    continue;
                }
                counts[i].1 -= 1;
                cur.push(counts[i].0);
                rec(counts, cur, k, out);
                cur.pop();
                counts[i].1 += 1;
            }
        }
        rec(&mut counts, &mut cur, self.k(), &mut out);
        out
    }
}

impl Ord for Partition {
    fn cmp(&self, other: &Self) -> Ordering {
        other.parts.cmp(&self.parts)
    }
}

impl PartialOrd for Partition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "{}", s.join(","))
    }
}

impl FromStr for Partition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let c: Composition = s.parse()?;
        Partition::new(c.parts().to_vec())
    }
}
