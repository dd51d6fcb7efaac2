use super::{check_probability_row, DecrementMatrix, Decrements};
use crate::combinat::{enumerate_compositions, Composition, CompositionTable, DistributionTable};
use crate::error::{Error, Result};
use crate::scalar::{binomial, rising, Scalar};

/// Law of the meander variable V on [0,1], through its mixed moments.
#[derive(Clone, Debug, PartialEq)]
pub enum MeanderLaw<S> {
    Zero,
    One,
    Beta { a: S, b: S },
    /// E[V^0], E[V^1], ...
    Moments(Vec<S>),
}

impl<S: Scalar> MeanderLaw<S> {
    /// E[V^i (1-V)^j].
    pub fn mixed(&self, i: usize, j: usize) -> Result<S> {
        Ok(match self {
            MeanderLaw::Zero => if i == 0 { S::one() } else { S::zero() },
            MeanderLaw::One => if j == 0 { S::one() } else { S::zero() },
            MeanderLaw::Beta { a, b } => {
                rising(a, i) * rising(b, j) / rising(&(a.clone() + b.clone()), i + j)
            }
            MeanderLaw::Moments(mom) => {
                let mut acc = S::zero();
                for l in 0..=j {
                    let v = mom.get(i + l).cloned().ok_or(Error::MissingMoment(i + l))?;
                    let term = binomial::<S>(j, l) * v;
                    acc = if l % 2 == 0 { acc + term } else { acc - term };
                }
                acc
            }
        })
    }

    /// Φ⁰(n:m) = C(n,m) E[V^{n-m}(1-V)^m], the chance that m of n uniforms fall in the meander.
    pub fn binomial_moment(&self, n: usize, m: usize) -> Result<S> {
        Ok(binomial::<S>(n, m) * self.mixed(n - m, m)?)
    }
}

/// Boundary rows q⁰ together with a sampling-consistent interior matrix q.
#[derive(Clone, Debug, PartialEq)]
pub struct MarkovianPair<S> {
    boundary: Vec<Vec<S>>,
    interior: DecrementMatrix<S>,
}

impl<S: Scalar> MarkovianPair<S> {
    pub fn new(boundary: Vec<Vec<S>>, interior: DecrementMatrix<S>) -> Result<Self> {
        if boundary.len() > interior.max_level() {
            return Err(Error::InvalidParameter(
                "boundary rows exceed the interior matrix".into(),
            ));
        }
        for (i, row) in boundary.iter().enumerate() {
            check_probability_row(row, i + 1)?;
        }
        Ok(MarkovianPair { boundary, interior })
    }

    pub fn max_level(&self) -> usize {
        self.boundary.len()
    }

    pub fn boundary(&self, n: usize, m: usize) -> S {
        if n == 0 || m == 0 || m > n || n > self.boundary.len() {
            return S::zero();
        }
        self.boundary[n - 1][m - 1].clone()
    }

    pub fn boundary_rows(&self) -> &[Vec<S>] {
        &self.boundary
    }

    pub fn interior(&self) -> &DecrementMatrix<S> {
        &self.interior
    }
}

/// q⁰(n:m) = Φ⁰(n:0) q(n:m) + Φ⁰(n:m).
pub fn markovian_from_meander<S: Scalar>(
    q: &DecrementMatrix<S>,
    v: &MeanderLaw<S>,
) -> Result<MarkovianPair<S>> {
    let mut boundary = Vec::with_capacity(q.max_level());
    for n in 1..=q.max_level() {
        let empty = v.binomial_moment(n, 0)?;
        let row = (1..=n)
            .map(|m| Ok(empty.clone() * q.get(n, m) + v.binomial_moment(n, m)?))
            .collect::<Result<Vec<S>>>()?;
        boundary.push(row);
    }
    MarkovianPair::new(boundary, q.clone())
}

/// p°(λ) = q⁰(n:λ_k) ∏_{j<k} q(Λ_j:λ_j) with head sums Λ_j = λ_1 + ... + λ_j.
pub fn cpf_markovian<S: Scalar>(mp: &MarkovianPair<S>, c: &Composition) -> Result<S> {
    let n = c.n();
    if n > mp.max_level() {
        return Err(Error::LevelOutOfRange { n, max: mp.max_level() });
    }
    let parts = c.parts();
    let k = parts.len();
    let mut acc = mp.boundary(n, parts[k - 1]);
    for (&part, head) in parts[..k - 1].iter().zip(c.head_sums()) {
        if acc.is_zero() {
            break;
        }
        acc = acc * mp.interior.q(head, part)?;
    }
    Ok(acc)
}

pub fn cpf_markovian_table<S: Scalar>(mp: &MarkovianPair<S>, n: usize) -> Result<CompositionTable<S>> {
    let entries = enumerate_compositions(n)?
        .into_iter()
        .map(|c| cpf_markovian(mp, &c).map(|p| (c, p)))
        .collect::<Result<Vec<_>>>()?;
    DistributionTable::new(n, entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinat::{enumerate_partitions, reverse_pushforward, symmetrize};
    use crate::decrement::{cpf_table, two_param_ppf};
    use crate::scalar::{Param, Rational};

    fn r(a: i64, b: i64) -> Rational {
        Rational::from_ratio(a, b)
    }

    #[test]
    fn meander_examples() {
        let v = MeanderLaw::Beta { a: r(1, 1), b: r(1, 1) };
        for m in 0..=2 {
            assert_eq!(v.binomial_moment(2, m).unwrap(), r(1, 3));
        }
        let q = DecrementMatrix::<Rational>::ewens(Param::ratio(1, 2), 5).unwrap();
        let one = markovian_from_meander(&q, &MeanderLaw::One).unwrap();
        assert_eq!(one.boundary_rows(), q.rows());
        let zero = markovian_from_meander(&q, &MeanderLaw::Zero).unwrap();
        for n in 1..=5 {
            assert_eq!(zero.boundary(n, n), r(1, 1));
        }
        let mom = MeanderLaw::Moments(vec![r(1, 1), r(1, 2), r(1, 3), r(1, 4)]);
        assert_eq!(mom.mixed(1, 2).unwrap(), v.mixed(1, 2).unwrap());
    }

    #[test]
    fn equal_rows_reverse_the_regenerative_law() {
        let q = DecrementMatrix::<Rational>::two_param(Param::ratio(1, 3), Param::int(1), 6).unwrap();
        let mp = MarkovianPair::new(q.rows().to_vec(), q.clone()).unwrap();
        for n in 1..=6 {
            let t = cpf_markovian_table(&mp, n).unwrap();
            assert_eq!(t, reverse_pushforward(&cpf_table(&q, n).unwrap()));
        }
    }

    #[test]
    fn meander_bridge_small_case() {
        let (a, t) = (r(1, 2), r(1, 1));
        let q = DecrementMatrix::<Rational>::two_param(Param::ratio(1, 2), Param::int(1), 5).unwrap();
        let v = MeanderLaw::Beta { a: t.clone(), b: r(1, 1) - a.clone() };
        let mp = markovian_from_meander(&q, &v).unwrap();
        let shifted = MeanderLaw::Beta { a: t.clone() + a.clone(), b: r(1, 1) - a.clone() };
        let off = markovian_from_meander(&q, &shifted).unwrap();
        assert_eq!(off.boundary(2, 2), r(9, 32));
        for n in 1..=5 {
            let s = symmetrize(&cpf_markovian_table(&mp, n).unwrap());
            for p in enumerate_partitions(n).unwrap() {
                assert_eq!(s.get(&p), two_param_ppf(&a, &(t.clone() - a.clone()), &p));
            }
        }
    }
}
