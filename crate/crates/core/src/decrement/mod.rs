//! Decrement matrices q(n:m) and the laws they generate.

mod closed;
mod cpf;
mod green;
mod kernel;
mod markov;

pub use closed::ClosedForm;
pub use cpf::{
    alpha_alpha_cpf, alpha_zero_cpf, cpf, cpf_table, esf_cpf, esf_ppf, gammageom_cpf, ppf,
    ppf_table, two_param_ppf,
};
pub use green::{
    green_closed, green_dp, green_matrix_dp, reversibility_check, GreenDiscrepancy, GreenMatrix,
    ReversibilityVerdict,
};
pub use kernel::{d_tau, deletion_kernel, DeletionKernel};
pub use markov::{cpf_markovian, cpf_markovian_table, markovian_from_meander, MarkovianPair, MeanderLaw};

use std::fmt::Write as _;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::levy::LevyModel;
use crate::scalar::Scalar;

const FLOAT_CONSISTENCY_TOL: f64 = 1e-10;

/// Source of decrement rows, either stored or computed on demand.
pub trait Decrements<S: Scalar>: Send + Sync {
    /// Highest available level; `usize::MAX` for closed forms.
    fn max_level(&self) -> usize;

    /// q(n:1), ..., q(n:n).
    fn row(&self, n: usize) -> Result<Vec<S>>;

    fn q(&self, n: usize, m: usize) -> Result<S> {
        if m == 0 || m > n {
            return Ok(S::zero());
        }
        Ok(self.row(n)?.swap_remove(m - 1))
    }
}

fn check_level(n: usize, max: usize) -> Result<()> {
    if n == 0 || n > max {
        Err(Error::LevelOutOfRange { n, max })
    } else {
        Ok(())
    }
}

/// Triangular array q(n:m), 1 <= m <= n <= N.
#[derive(Clone, Debug, PartialEq)]
pub struct DecrementMatrix<S> {
    rows: Vec<Vec<S>>,
}

impl<S: Scalar> DecrementMatrix<S> {
    /// Validates that each row is a probability vector and that adjacent rows are
    /// related by hypergeometric thinning.
    pub fn new(rows: Vec<Vec<S>>) -> Result<Self> {
        let m = Self::new_unchecked(rows)?;
        for n in 2..=m.max_level() {
            let derived = thin_row(&m.rows[n - 1])?;
            let ok = derived
                .iter()
                .zip(&m.rows[n - 2])
                .all(|(a, b)| a.close(b, FLOAT_CONSISTENCY_TOL));
            if !ok {
                return Err(Error::Inconsistent(n));
            }
        }
        Ok(m)
    }

    /// Checks only that each row is a probability vector.
    pub fn new_unchecked(rows: Vec<Vec<S>>) -> Result<Self> {
        for (i, row) in rows.iter().enumerate() {
            check_probability_row(row, i + 1)?;
        }
        Ok(DecrementMatrix { rows })
    }

    /// q(n:m) = Φ(n:m)/Φ(n).
    pub fn from_levy(model: &LevyModel, max_n: usize) -> Result<Self> {
        let rows = (1..=max_n)
            .map(|n| (1..=n).map(|m| model.decrement::<S>(n, m)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::new_unchecked(rows)
    }

    /// Rows below level n from the last row by hypergeometric thinning.
    pub fn from_last_row(last: Vec<S>) -> Result<Self> {
        let n = last.len();
        check_probability_row(&last, n)?;
        let mut rows = vec![last];
        while rows.last().map_or(0, Vec::len) > 1 {
            let next = thin_row(rows.last().expect("nonempty"))?;
            rows.push(next);
        }
        rows.reverse();
        Ok(DecrementMatrix { rows })
    }

    pub fn from_closed(form: &ClosedForm, max_n: usize) -> Result<Self> {
        let rows = (1..=max_n).map(|n| form.row::<S>(n)).collect::<Result<Vec<_>>>()?;
        Self::new_unchecked(rows)
    }

    pub fn ewens(theta: crate::Param, max_n: usize) -> Result<Self> {
        Self::from_closed(&ClosedForm::ewens(theta)?, max_n)
    }

    pub fn two_param(alpha: crate::Param, theta: crate::Param, max_n: usize) -> Result<Self> {
        Self::from_closed(&ClosedForm::two_param(alpha, theta)?, max_n)
    }

    pub fn beta_sb(gamma: crate::Param, theta: crate::Param, max_n: usize) -> Result<Self> {
        Self::from_closed(&ClosedForm::beta_sb(gamma, theta)?, max_n)
    }

    pub fn hook(d: crate::Param, max_n: usize) -> Result<Self> {
        Self::from_closed(&ClosedForm::hook(d)?, max_n)
    }

    pub fn gamma_harmonic(theta: crate::Param, max_n: usize) -> Result<Self> {
        Self::from_closed(&ClosedForm::gamma_harmonic(theta)?, max_n)
    }

    pub fn alpha_renewal(alpha: crate::Param, max_n: usize) -> Result<Self> {
        Self::from_closed(&ClosedForm::alpha_renewal(alpha)?, max_n)
    }

    /// q(n:n) = 1 for every n.
    pub fn one_block(max_n: usize) -> Self {
        let rows = (1..=max_n)
            .map(|n| {
                let mut r = vec![S::zero(); n];
                r[n - 1] = S::one();
                r
            })
            .collect();
        DecrementMatrix { rows }
    }

    pub fn max_level(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<S>] {
        &self.rows
    }

    pub fn get(&self, n: usize, m: usize) -> S {
        if n == 0 || m == 0 || m > n || n > self.rows.len() {
            return S::zero();
        }
        self.rows[n - 1][m - 1].clone()
    }

    /// Rows 1..=n.
    pub fn truncate(&self, n: usize) -> Result<Self> {
        check_level(n, self.max_level())?;
        Ok(DecrementMatrix { rows: self.rows[..n].to_vec() })
    }

    pub fn to_float(&self) -> DecrementMatrix<f64> {
        DecrementMatrix {
            rows: self.rows.iter().map(|r| r.iter().map(Scalar::to_f64).collect()).collect(),
        }
    }

    /// `n,m,q` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,m,q\n");
        for (i, row) in self.rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let _ = writeln!(out, "{},{},{}", i + 1, j + 1, v.format());
            }
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Vec<String>> =
            self.rows.iter().map(|r| r.iter().map(Scalar::format).collect()).collect();
        json!({"max_n": self.max_level(), "backend": S::BACKEND, "rows": rows})
    }
}

impl<S: Scalar> Decrements<S> for DecrementMatrix<S> {
    fn max_level(&self) -> usize {
        self.rows.len()
    }

    fn row(&self, n: usize) -> Result<Vec<S>> {
        check_level(n, self.max_level())?;
        Ok(self.rows[n - 1].clone())
    }

    fn q(&self, n: usize, m: usize) -> Result<S> {
        check_level(n, self.max_level())?;
        Ok(self.get(n, m))
    }
}

impl<S: Scalar> Decrements<S> for LevyModel {
    fn max_level(&self) -> usize {
        usize::MAX
    }

    fn row(&self, n: usize) -> Result<Vec<S>> {
        (1..=n).map(|m| self.decrement::<S>(n, m)).collect()
    }

    fn q(&self, n: usize, m: usize) -> Result<S> {
        if m == 0 || m > n {
            return Ok(S::zero());
        }
        self.decrement(n, m)
    }
}

impl<S: Scalar> Decrements<S> for ClosedForm {
    fn max_level(&self) -> usize {
        usize::MAX
    }

    fn row(&self, n: usize) -> Result<Vec<S>> {
        ClosedForm::row(self, n)
    }

    fn q(&self, n: usize, m: usize) -> Result<S> {
        if m == 0 || m > n {
            return Ok(S::zero());
        }
        ClosedForm::q(self, n, m)
    }
}

fn check_probability_row<S: Scalar>(row: &[S], n: usize) -> Result<()> {
    if row.len() != n {
        return Err(Error::InvalidParameter(format!(
            "row {n} has {} entries",
            row.len()
        )));
    }
    if let Some(m) = row.iter().position(Scalar::is_negative) {
        return Err(Error::NotProbability(format!("q({n}:{}) is negative", m + 1)));
    }
    let total = S::sum_all(row.iter().cloned());
    if !total.close(&S::one(), crate::combinat::FLOAT_MASS_TOL) {
        return Err(Error::NotProbability(format!("row {n} sums to {}", total.format())));
    }
    Ok(())
}

/// Row n-1 obtained from row n by deleting one uniformly chosen ball.
fn thin_row<S: Scalar>(row: &[S]) -> Result<Vec<S>> {
    let n = row.len();
    let nn = S::from_usize(n);
    let q0 = |k: usize| -> S {
        let stay = if k >= 1 {
            row[k - 1].clone() * S::from_usize(n - k) / nn.clone()
        } else {
            S::zero()
        };
        let shrink = if k < n { row[k].clone() * S::from_usize(k + 1) / nn.clone() } else { S::zero() };
        stay + shrink
    };
    let miss = q0(0);
    let keep = S::one() - miss;
    if keep.is_zero() || (!S::EXACT && keep.to_f64() <= 0.0) {
        return Err(Error::DegenerateThinning(n - 1));
    }
    Ok((1..n).map(|k| q0(k) / keep.clone()).collect())
}

/// Hypergeometric thinning q₀(n':m') of row n down to level n', including m' = 0.
pub fn thinning<S: Scalar>(row: &[S], n_prime: usize) -> Vec<S> {
    use crate::scalar::binomial;
    let n = row.len();
    let total = binomial::<S>(n, n_prime);
    (0..=n_prime)
        .map(|k| {
            let s = S::sum_all((1..=n).map(|m| {
                if k > m || n_prime - k > n - m {
                    S::zero()
                } else {
                    row[m - 1].clone() * binomial::<S>(m, k) * binomial::<S>(n - m, n_prime - k)
                }
            }));
            s / total.clone()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Param, Rational};

    fn r(a: i64, b: i64) -> Rational {
        Rational::from_ratio(a, b)
    }

    #[test]
    fn from_levy_examples() {
        let e = DecrementMatrix::<Rational>::from_levy(&LevyModel::ewens(Param::int(1)).unwrap(), 6)
            .unwrap();
        for n in 1..=6 {
            assert!(e.rows()[n - 1].iter().all(|v| *v == r(1, n as i64)));
        }
        let h = DecrementMatrix::<Rational>::from_levy(&LevyModel::hook(Param::int(1)).unwrap(), 4)
            .unwrap();
        assert_eq!(h.get(2, 2), r(1, 3));
        assert_eq!(h.get(2, 1), r(2, 3));
        let a = DecrementMatrix::<Rational>::from_levy(
            &LevyModel::two_param(Param::ratio(1, 2), Param::int(0)).unwrap(),
            3,
        )
        .unwrap();
        assert_eq!(a.rows()[2], vec![r(1, 2), r(1, 8), r(3, 8)]);
        assert!(DecrementMatrix::new(a.rows().to_vec()).is_ok());
    }

    #[test]
    fn last_row_examples() {
        let m = DecrementMatrix::from_last_row(vec![r(1, 3), r(1, 3), r(1, 3)]).unwrap();
        assert_eq!(m.rows()[1], vec![r(1, 2), r(1, 2)]);
        assert_eq!(m.rows()[0], vec![r(1, 1)]);
        let t = thinning(&[r(1, 3), r(1, 3), r(1, 3)], 2);
        assert_eq!(t, vec![r(1, 9), r(4, 9), r(4, 9)]);
        let ob = DecrementMatrix::from_last_row(vec![r(0, 1), r(0, 1), r(1, 1)]).unwrap();
        assert_eq!(ob, DecrementMatrix::one_block(3));
        let singles = DecrementMatrix::from_last_row(vec![r(1, 1), r(0, 1), r(0, 1)]).unwrap();
        assert_eq!(singles.rows()[1], vec![r(1, 1), r(0, 1)]);
    }

    #[test]
    fn inconsistent_rows_rejected() {
        let rows = vec![vec![r(1, 1)], vec![r(1, 2), r(1, 2)], vec![r(1, 1), r(0, 1), r(0, 1)]];
        assert!(matches!(DecrementMatrix::new(rows), Err(Error::Inconsistent(3))));
        let bad = vec![vec![r(1, 1)], vec![r(3, 2), r(-1, 2)]];
        assert!(matches!(DecrementMatrix::new(bad), Err(Error::NotProbability(_))));
    }

    #[test]
    fn csv_export() {
        let e = DecrementMatrix::<Rational>::ewens(Param::int(1), 2).unwrap();
        assert_eq!(e.to_csv(), "n,m,q\n1,1,1\n2,1,1/2\n2,2,1/2\n");
    }
}
