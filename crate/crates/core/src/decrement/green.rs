use std::fmt::Write as _;

use super::Decrements;
use crate::error::{Error, Result};
use crate::levy::{phi_from_moments, StructuralLaw};
use crate::scalar::{binomial, rising, Scalar};

/// g(n,j) for 1 <= j <= n <= N.
#[derive(Clone, Debug, PartialEq)]
pub struct GreenMatrix<S> {
    pub rows: Vec<Vec<S>>,
}

impl<S: Scalar> GreenMatrix<S> {
    pub fn get(&self, n: usize, j: usize) -> S {
        self.rows[n - 1][j - 1].clone()
    }

    /// `n,j,g` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,j,g\n");
        for (i, row) in self.rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let _ = writeln!(out, "{},{},{}", i + 1, j + 1, v.format());
            }
        }
        out
    }
}

/// g(n,j) = P(the chain started at n visits n+1-j), by forward propagation of visit
/// probabilities.
pub fn green_dp<S: Scalar, D: Decrements<S> + ?Sized>(q: &D, n: usize) -> Result<Vec<S>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut visit = vec![S::zero(); n + 1];
    visit[n] = S::one();
    for s in (1..=n).rev() {
        if visit[s].is_zero() {
            continue;
        }
        let row = q.row(s)?;
        for (m, qv) in row.into_iter().enumerate() {
            let t = s - (m + 1);
            if t > 0 {
                visit[t] = visit[t].clone() + visit[s].clone() * qv;
            }
        }
    }
    Ok((1..=n).map(|j| visit[n + 1 - j].clone()).collect())
}

pub fn green_matrix_dp<S: Scalar, D: Decrements<S> + ?Sized>(q: &D, max_n: usize) -> Result<GreenMatrix<S>> {
    let rows = (1..=max_n).map(|n| green_dp(q, n)).collect::<Result<Vec<_>>>()?;
    Ok(GreenMatrix { rows })
}

/// Row of the closed Green formula next to the visit-probability row.
#[derive(Clone, Debug, PartialEq)]
pub struct GreenDiscrepancy<S> {
    pub n: usize,
    pub closed: Vec<S>,
    pub dp: Vec<S>,
    pub max_abs_diff: f64,
}

/// g(n, n-j+1) = Φ(j) C(n,j) Σ_{i=0}^{j-1} C(j-1,i)(-1)^i / Φ(j+i), evaluated as printed,
/// with `phi[0] = 0` and `phi.len() >= 2n`.
pub fn green_closed<S: Scalar, D: Decrements<S> + ?Sized>(
    phi: &[S],
    q: &D,
    n: usize,
) -> Result<GreenDiscrepancy<S>> {
    if phi.len() < 2 * n {
        return Err(Error::MissingMoment(2 * n - 1));
    }
    let mut closed = vec![S::zero(); n];
    for j in 1..=n {
        let mut acc = S::zero();
        for i in 0..j {
            let den = phi[j + i].clone();
            if den.is_zero() {
                return Err(Error::DivisionByZero(format!("Φ({})", j + i)));
            }
            let term = binomial::<S>(j - 1, i) / den;
            acc = if i % 2 == 0 { acc + term } else { acc - term };
        }
        closed[n - j] = phi[j].clone() * binomial::<S>(n, j) * acc;
    }
    let dp = green_dp(q, n)?;
    let max_abs_diff = closed
        .iter()
        .zip(&dp)
        .map(|(a, b)| (a.clone() - b.clone()).to_f64().abs())
        .fold(0.0, f64::max);
    Ok(GreenDiscrepancy { n, closed, dp, max_abs_diff })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReversibilityVerdict<S> {
    pub reversible: bool,
    /// Read off from Φ(2) = 1 + α.
    pub alpha: Option<S>,
    /// First level at which the test fails.
    pub witness: Option<usize>,
    /// (n, P(F_n = 1), P(L_n = 1)) for n = 2..=N.
    pub marginals: Vec<(usize, S, S)>,
}

/// Compares P(F_n = 1) = n(Φ(n)-Φ(n-1))/Φ(n) with
/// P(L_n = 1) = n[1 - Σ_{k=2}^n C(n-1,k-1)(-1)^k/Φ(k)] under Φ(1) = 1, and checks
/// Φ(n) = (1+α)_{n-1}/(n-1)!.
pub fn reversibility_check<S: Scalar, D: Decrements<S> + ?Sized>(
    q: &D,
    max_n: usize,
) -> Result<ReversibilityVerdict<S>> {
    let p = (1..=max_n).map(|n| q.q(n, n)).collect::<Result<Vec<S>>>()?;
    let phi = phi_from_moments(&StructuralLaw::from_moments(p)?, max_n)?;
    let tol = 1e-10;
    let mut marginals = Vec::new();
    let mut witness = None;
    for n in 2..=max_n {
        let nn = S::from_usize(n);
        let first = nn.clone() * (phi[n].clone() - phi[n - 1].clone()) / phi[n].clone();
        let mut s = S::zero();
        for k in 2..=n {
            let term = binomial::<S>(n - 1, k - 1) / phi[k].clone();
            s = if k % 2 == 0 { s + term } else { s - term };
        }
        let last = nn * (S::one() - s);
        if witness.is_none() && !first.close(&last, tol) {
            witness = Some(n);
        }
        marginals.push((n, first, last));
    }
    let alpha = (max_n >= 2).then(|| phi[2].clone() - S::one());
    if witness.is_none() {
        if let Some(a) = &alpha {
            let in_range = !a.is_negative() && !(a.clone() - S::one()).is_positive();
            for n in 2..=max_n {
                let target = rising(&(S::one() + a.clone()), n - 1) / rising(&S::one(), n - 1);
                if !in_range || !phi[n].close(&target, tol) {
                    witness = Some(n);
                    break;
                }
            }
        }
    }
    Ok(ReversibilityVerdict { reversible: witness.is_none(), alpha, witness, marginals })
}
