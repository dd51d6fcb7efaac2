use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;

use super::Partition;
use crate::error::{Error, Result};
use crate::scalar::factorial;

/// Ordered parts of n. The empty composition stands for n = 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Composition {
    parts: Vec<usize>,
}

impl Composition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.iter().any(|&p| p == 0) {
            return Err(Error::InvalidParameter(format!(
                "composition parts must be positive: {parts:?}"
            )));
        }
        Ok(Composition { parts })
    }

    pub fn empty() -> Self {
        Composition { parts: Vec::new() }
    }

    pub fn single(n: usize) -> Self {
        if n == 0 {
            Self::empty()
        } else {
            Composition { parts: vec![n] }
        }
    }

    pub(crate) fn from_parts_unchecked(parts: Vec<usize>) -> Self {
        debug_assert!(parts.iter().all(|&p| p > 0));
        Composition { parts }
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

    /// Λ_j = λ_j + ... + λ_k.
    pub fn tail_sums(&self) -> Vec<usize> {
        let mut out = vec![0; self.parts.len()];
        let mut acc = 0;
        for (j, &p) in self.parts.iter().enumerate().rev() {
            acc += p;
            out[j] = acc;
        }
        out
    }

    /// Λ_j = λ_1 + ... + λ_j.
    pub fn head_sums(&self) -> Vec<usize> {
        self.parts
            .iter()
            .scan(0, |acc, &p| {
                *acc += p;
                Some(*acc)
            })
            .collect()
    }

    pub fn reversed(&self) -> Self {
        let mut parts = self.parts.clone();
        parts.reverse();
        Composition { parts }
    }

    pub fn to_partition(&self) -> Partition {
        Partition::from_parts_unchecked(self.parts.clone())
    }

    /// Each part m becomes a 1 followed by m-1 zeros.
    pub fn binary_encode(&self) -> String {
        let mut s = String::with_capacity(self.n());
        for &p in &self.parts {
            s.push('1');
            s.extend(std::iter::repeat_n('0', p - 1));
        }
        s
    }

    pub fn binary_decode(code: &str) -> Result<Self> {
        if code.is_empty() {
            return Ok(Self::empty());
        }
        if !code.starts_with('1') || code.chars().any(|c| c != '0' && c != '1') {
            return Err(Error::Parse(format!("invalid binary code {code:?}")));
        }
        let mut parts = Vec::new();
        for c in code.chars() {
            if c == '1' {
                parts.push(1);
            } else {
                *parts.last_mut().unwrap() += 1;
            }
        }
        Ok(Composition { parts })
    }

    pub fn to_bits(&self) -> Vec<bool> {
        self.binary_encode().chars().map(|c| c == '1').collect()
    }

    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        let s: String = bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
        Self::binary_decode(&s)
    }

    /// f° = n! / (λ_1! ... λ_k!).
    pub fn multinomial_count(&self) -> BigUint {
        let den = self
            .parts
            .iter()
            .fold(BigUint::from(1u32), |acc, &p| acc * factorial(p));
        factorial(self.n()) / den
    }

    /// Reduce part j by one, dropping it when it empties.
    pub fn reduce_part(&self, j: usize) -> Self {
        let mut parts = self.parts.clone();
        if parts[j] == 1 {
            parts.remove(j);
        } else {
            parts[j] -= 1;
        }
        Composition { parts }
    }
}

// Lexicographic order of binary codes: (3) < (2,1) < (1,2) < (1,1,1).
impl Ord for Composition {
    fn cmp(&self, other: &Self) -> Ordering {
        other.parts.cmp(&self.parts)
    }
}

impl PartialOrd for Composition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "{}", s.join(","))
    }
}

impl FromStr for Composition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Self::empty());
        }
        let parts = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("invalid part {t:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Composition::new(parts)
    }
}
