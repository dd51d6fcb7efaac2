use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::{Distribution, Hypergeometric};

use crate::combinat::{enumerate_compositions, enumerate_partitions, Composition, DistributionTable, Partition, Shape};
use crate::error::{Error, Result};
use crate::scalar::{binomial, Scalar};

/// Exact transition probabilities of the q(n:·)-chain over all shapes of size n.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionMatrix<K, S> {
    n: usize,
    states: Vec<K>,
    rows: Vec<BTreeMap<K, S>>,
}

impl<K: Shape, S: Scalar> TransitionMatrix<K, S> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn states(&self) -> &[K] {
        &self.states
    }

    pub fn get(&self, from: &K, to: &K) -> S {
        self.states
            .binary_search(from)
            .ok()
            .and_then(|i| self.rows[i].get(to).cloned())
            .unwrap_or_else(S::zero)
    }

    pub fn row_sums(&self) -> Vec<S> {
        self.rows.iter().map(|r| S::sum_all(r.values().cloned())).collect()
    }

    /// One step of the chain applied to a law: μ ↦ μP.
    pub fn apply(&self, law: &DistributionTable<K, S>) -> Result<DistributionTable<K, S>> {
        if law.n() != self.n {
            return Err(Error::InvalidParameter(format!(
                "law at level {} applied to chain at level {}",
                law.n(),
                self.n
            )));
        }
        let mut out: BTreeMap<K, S> = BTreeMap::new();
        for (state, row) in self.states.iter().zip(&self.rows) {
            let mass = law.get(state);
            if mass.is_zero() {
                continue;
            }
            for (to, p) in row {
                let add = mass.clone() * p.clone();
                match out.get_mut(to) {
                    Some(v) => *v = v.clone() + add,
                    None => {
                        out.insert(to.clone(), add);
                    }
                }
            }
        }
        DistributionTable::new(self.n, out)
    }
}

/// Every way to take m balls from boxes of the given sizes, with its hypergeometric weight.
fn removals<S: Scalar>(parts: &[usize], m: usize) -> Vec<(Vec<usize>, S)> {
    fn go<S: Scalar>(parts: &[usize], left: usize, cur: &mut Vec<usize>, w: S, out: &mut Vec<(Vec<usize>, S)>) {
        let j = cur.len();
        if j == parts.len() {
            if left == 0 {
                out.push((cur.clone(), w));
            }
            return;
        }
        let room: usize = parts[j + 1..].iter().sum();
        for r in left.saturating_sub(room)..=left.min(parts[j]) {
            cur.push(r);
            go(parts, left - r, cur, w.clone() * binomial::<S>(parts[j], r), out);
            cur.pop();
        }
    }
    let n: usize = parts.iter().sum();
    let mut out = Vec::new();
    go(parts, m, &mut Vec::new(), S::one() / binomial::<S>(n, m), &mut out);
    out
}

fn after_step(parts: &[usize], taken: &[usize], m: usize) -> Vec<usize> {
    let mut next = vec![m];
    next.extend(parts.iter().zip(taken).map(|(p, r)| p - r).filter(|&p| p > 0));
    next
}

fn check_row<S: Scalar>(q_row: &[S], n: usize) -> Result<()> {
    if q_row.len() != n {
        return Err(Error::InvalidParameter(format!(
            "decrement row has {} entries, level is {n}",
            q_row.len()
        )));
    }
    Ok(())
}

fn build<K: Shape, S: Scalar>(
    q_row: &[S],
    states: Vec<K>,
    wrap: impl Fn(Vec<usize>) -> K,
) -> TransitionMatrix<K, S> {
    let n = q_row.len();
    let rows = states
        .iter()
        .map(|state| {
            let mut row: BTreeMap<K, S> = BTreeMap::new();
            for (i, qm) in q_row.iter().enumerate() {
                if qm.is_zero() {
                    continue;
                }
                let m = i + 1;
                for (taken, w) in removals::<S>(state.parts(), m) {
                    let to = wrap(after_step(state.parts(), &taken, m));
                    let add = qm.clone() * w;
                    match row.get_mut(&to) {
                        Some(v) => *v = v.clone() + add,
                        None => {
                            row.insert(to, add);
                        }
                    }
                }
            }
            row
        })
        .collect();
    TransitionMatrix { n, states, rows }
}

/// Chain on compositions of n: draw m ~ q(n:·), remove m uniform balls, drop emptied
/// boxes, put a new box of size m first.
pub fn qchain_transition_matrix<S: Scalar>(q_row: &[S], n: usize) -> Result<TransitionMatrix<Composition, S>> {
    check_row(q_row, n)?;
    let mut states = enumerate_compositions(n)?;
    states.sort();
    Ok(build(q_row, states, Composition::from_parts_unchecked))
}

/// The same chain read on partitions.
pub fn qchain_partition_matrix<S: Scalar>(q_row: &[S], n: usize) -> Result<TransitionMatrix<Partition, S>> {
    check_row(q_row, n)?;
    let mut states = enumerate_partitions(n)?;
    states.sort();
    Ok(build(q_row, states, |parts| Composition::from_parts_unchecked(parts).to_partition()))
}

fn step_parts<R: Rng + ?Sized>(parts: &[usize], q_row: &[f64], rng: &mut R) -> Result<Vec<usize>> {
    let n: usize = parts.iter().sum();
    check_row(q_row, n)?;
    let total: f64 = q_row.iter().sum();
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut m = n;
    for (i, q) in q_row.iter().enumerate() {
        acc += q;
        if acc > u {
            m = i + 1;
            break;
        }
    }
    let mut taken = Vec::with_capacity(parts.len());
    let (mut pool, mut left) = (n as u64, m as u64);
    for &p in parts {
        let r = if left == 0 {
            0
        } else {
            Hypergeometric::new(pool, p as u64, left)
                .map_err(|e| Error::InvalidParameter(e.to_string()))?
                .sample(rng)
        };
        taken.push(r as usize);
        pool -= p as u64;
        left -= r;
    }
    Ok(after_step(parts, &taken, m))
}

pub fn qchain_step<R: Rng + ?Sized>(c: &Composition, q_row: &[f64], rng: &mut R) -> Result<Composition> {
    Ok(Composition::from_parts_unchecked(step_parts(c.parts(), q_row, rng)?))
}

pub fn qchain_step_partition<R: Rng + ?Sized>(p: &Partition, q_row: &[f64], rng: &mut R) -> Result<Partition> {
    Ok(Composition::from_parts_unchecked(step_parts(p.parts(), q_row, rng)?).to_partition())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinat::symmetrize;
    use crate::decrement::{cpf_table, DecrementMatrix};
    use crate::samplers::RngStream;
    use crate::scalar::{Param, Rational};

    #[test]
    fn fixed_point_and_absorption() {
        let one: Vec<Rational> = vec![Rational::from_int(1)];
        let t = qchain_transition_matrix(&one, 1).unwrap();
        let s = Composition::single(1);
        assert_eq!(t.get(&s, &s), Rational::from_int(1));
        let ob = DecrementMatrix::<Rational>::one_block(4);
        let t = qchain_transition_matrix(&ob.rows()[3], 4).unwrap();
        let top = Composition::single(4);
        for c in t.states() {
            assert_eq!(t.get(c, &top), Rational::from_int(1));
        }
    }

    #[test]
    fn product_form_law_is_stationary() {
        let q = DecrementMatrix::<Rational>::two_param(Param::ratio(1, 3), Param::ratio(1, 2), 5).unwrap();
        for n in 1..=5 {
            let row = &q.rows()[n - 1];
            let law = cpf_table(&q, n).unwrap();
            let t = qchain_transition_matrix(row, n).unwrap();
            assert!(t.row_sums().iter().all(|s| *s == Rational::from_int(1)));
            assert_eq!(t.apply(&law).unwrap(), law);
            let pt = qchain_partition_matrix(row, n).unwrap();
            let plaw = symmetrize(&law);
            assert_eq!(pt.apply(&plaw).unwrap(), plaw);
        }
    }

    #[test]
    fn sampled_step_preserves_size() {
        let mut rng = RngStream::new(9, 0);
        let row = vec![0.25; 4];
        let mut c: Composition = "1,2,1".parse().unwrap();
        for _ in 0..100 {
            c = qchain_step(&c, &row, &mut rng).unwrap();
            assert_eq!(c.n(), 4);
        }
        let p = qchain_step_partition(&"2,2".parse().unwrap(), &row, &mut rng).unwrap();
        assert_eq!(p.n(), 4);
    }
}
