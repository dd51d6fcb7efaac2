use statrs::function::gamma::{digamma, ln_gamma};

use crate::error::{Error, Result};
use crate::levy::{harmonic, LevyModel};
use crate::scalar::{binomial, ln_binomial, rising, Param, Scalar};

/// Named decrement matrices with closed-form entries.
#[derive(Clone, Debug, PartialEq)]
pub enum ClosedForm {
    /// C(n,m)(θ)_{n-m} m! / ((θ+1)_{n-1} n).
    Ewens { theta: Param },
    /// C(n,m)(1-α)_{m-1}((n-m)α + mθ) / ((θ+n-m)_m n).
    TwoParam { alpha: Param, theta: Param },
    /// C(n,m)(γ)_m(θ)_{n-m} / ((γ+θ)_n - (θ)_n).
    BetaSb { gamma: Param, theta: Param },
    /// q(n:n) = 1/(1+nd), q(n:1) = nd/(1+nd) for n >= 2.
    Hook { d: Param },
    /// n!(θ)_{n-m} / (m (n-m)! (θ)_n h_θ(n)).
    GammaHarmonic { theta: Param },
    /// q(n:m) = h(m) for m < n with h(m) = α(1-α)_{m-1}/m!.
    AlphaRenewal { alpha: Param },
}

fn invalid(msg: String) -> Error {
    Error::InvalidParameter(msg)
}

impl ClosedForm {
    pub fn ewens(theta: Param) -> Result<Self> {
        LevyModel::ewens(theta.clone())?;
        Ok(ClosedForm::Ewens { theta })
    }

    pub fn two_param(alpha: Param, theta: Param) -> Result<Self> {
        LevyModel::two_param(alpha.clone(), theta.clone())?;
        Ok(ClosedForm::TwoParam { alpha, theta })
    }

    pub fn beta_sb(gamma: Param, theta: Param) -> Result<Self> {
        LevyModel::beta_sb(gamma.clone(), theta.clone())?;
        Ok(ClosedForm::BetaSb { gamma, theta })
    }

    pub fn hook(d: Param) -> Result<Self> {
        LevyModel::hook(d.clone())?;
        Ok(ClosedForm::Hook { d })
    }

    pub fn gamma_harmonic(theta: Param) -> Result<Self> {
        LevyModel::gamma_harmonic(theta.clone())?;
        Ok(ClosedForm::GammaHarmonic { theta })
    }

    pub fn alpha_renewal(alpha: Param) -> Result<Self> {
        let a = alpha.value();
        if !(a > 0.0 && a < 1.0) {
            return Err(invalid(format!("renewal family needs 0 < alpha < 1, got {alpha}")));
        }
        Ok(ClosedForm::AlphaRenewal { alpha })
    }

    /// The closed form matching a named Lévy model, if there is one.
    pub fn from_model(model: &LevyModel) -> Option<Self> {
        match model {
            LevyModel::TwoParam { alpha, theta } if alpha.is_zero() => {
                Some(ClosedForm::Ewens { theta: theta.clone() })
            }
            LevyModel::TwoParam { alpha, theta } => {
                Some(ClosedForm::TwoParam { alpha: alpha.clone(), theta: theta.clone() })
            }
            LevyModel::Beta { gamma, theta } => {
                Some(ClosedForm::BetaSb { gamma: gamma.clone(), theta: theta.clone() })
            }
            LevyModel::GammaHarmonic { theta } => {
                Some(ClosedForm::GammaHarmonic { theta: theta.clone() })
            }
            LevyModel::Killed { base, beta } => match (base.as_ref(), beta.as_exact()) {
                (LevyModel::Drift { d }, Some(b)) if *b == num_traits::One::one() => {
                    Some(ClosedForm::Hook { d: d.clone() })
                }
                _ => None,
            },
            _ => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        match self {
            ClosedForm::Ewens { theta } | ClosedForm::GammaHarmonic { theta } => theta.is_exact(),
            ClosedForm::TwoParam { alpha, theta } => alpha.is_exact() && theta.is_exact(),
            ClosedForm::BetaSb { gamma, theta } => gamma.is_exact() && theta.is_exact(),
            ClosedForm::Hook { d } => d.is_exact(),
            ClosedForm::AlphaRenewal { alpha } => alpha.is_exact(),
        }
    }

    pub fn q<S: Scalar>(&self, n: usize, m: usize) -> Result<S> {
        if m == 0 || m > n {
            return Ok(S::zero());
        }
        if S::EXACT {
            self.q_generic(n, m)
        } else {
            S::from_f64(self.q_f64(n, m))
        }
    }

    pub fn row<S: Scalar>(&self, n: usize) -> Result<Vec<S>> {
        if let (false, ClosedForm::BetaSb { gamma, theta }) = (S::EXACT, self) {
            let (g, t) = (gamma.value(), theta.value());
            let l_den = beta_sb_ln_den(g, t, n);
            return (1..=n).map(|m| S::from_f64(beta_sb_entry(g, t, n, m, l_den))).collect();
        }
        (1..=n).map(|m| self.q(n, m)).collect()
    }

    fn q_generic<S: Scalar>(&self, n: usize, m: usize) -> Result<S> {
        let nn = S::from_usize(n);
        let one = S::one();
        Ok(match self {
            ClosedForm::Ewens { theta } => {
                let t: S = S::from_param(theta)?;
                binomial::<S>(n, m) * rising(&t, n - m) * rising(&one, m)
                    / (rising(&(t + one.clone()), n - 1) * nn)
            }
            ClosedForm::TwoParam { alpha, theta } => {
                let a: S = S::from_param(alpha)?;
                let t: S = S::from_param(theta)?;
                let r = if m == n {
                    S::from_usize(m)
                } else {
                    (S::from_usize(n - m) * a.clone() + S::from_usize(m) * t.clone())
                        / (t.clone() + S::from_usize(n - m))
                };
                binomial::<S>(n, m) * rising(&(one - a), m - 1)
                    / rising(&(t + S::from_usize(n - m + 1)), m - 1)
                    * r
                    / nn
            }
            ClosedForm::BetaSb { gamma, theta } => {
                let g: S = S::from_param(gamma)?;
                let t: S = S::from_param(theta)?;
                let den = rising(&(g.clone() + t.clone()), n) - rising(&t, n);
                binomial::<S>(n, m) * rising(&g, m) * rising(&t, n - m) / den
            }
            ClosedForm::Hook { d } => {
                let dd: S = S::from_param(d)?;
                let den = one.clone() + nn.clone() * dd.clone();
                if n == 1 {
                    one
                } else if m == n {
                    one / den
                } else if m == 1 {
                    nn * dd / den
                } else {
                    S::zero()
                }
            }
            ClosedForm::GammaHarmonic { theta } => {
                let t: S = S::from_param(theta)?;
                rising(&one, n) * rising(&t, n - m)
                    / (S::from_usize(m) * rising(&one, n - m) * rising(&t, n) * harmonic(&t, n))
            }
            ClosedForm::AlphaRenewal { alpha } => {
                let a: S = S::from_param(alpha)?;
                let om = one.clone() - a.clone();
                if m < n {
                    a * rising(&om, m - 1) / rising(&one, m)
                } else {
                    rising(&om, n - 1) / rising(&one, n - 1)
                }
            }
        })
    }

    /// Log-gamma evaluation, O(1) per entry.
    pub fn q_f64(&self, n: usize, m: usize) -> f64 {
        if m == 0 || m > n {
            return 0.0;
        }
        let (nf, mf) = (n as f64, m as f64);
        let lfact = |k: usize| ln_gamma(k as f64 + 1.0);
        match self {
            ClosedForm::Ewens { theta } => {
                let t = theta.value();
                if t == 0.0 {
                    return if m == n { 1.0 } else { 0.0 };
                }
                (ln_binomial(n, m) + ln_gamma(t + nf - mf) - ln_gamma(t) + lfact(m)
                    - ln_gamma(t + nf)
                    + ln_gamma(t + 1.0)
                    - nf.ln())
                .exp()
            }
            ClosedForm::TwoParam { alpha, theta } => {
                let (a, t) = (alpha.value(), theta.value());
                let r = if m == n { mf } else { ((nf - mf) * a + mf * t) / (t + nf - mf) };
                if r == 0.0 {
                    return 0.0;
                }
                (ln_binomial(n, m) + ln_gamma(mf - a) - ln_gamma(1.0 - a) - ln_gamma(t + nf)
                    + ln_gamma(t + nf - mf + 1.0)
                    + (r / nf).ln())
                .exp()
            }
            ClosedForm::BetaSb { gamma, theta } => {
                let (g, t) = (gamma.value(), theta.value());
                beta_sb_entry(g, t, n, m, beta_sb_ln_den(g, t, n))
            }
            ClosedForm::Hook { d } => {
                let dd = d.value();
                if n == 1 {
                    1.0
                } else if m == n {
                    1.0 / (1.0 + nf * dd)
                } else if m == 1 {
                    nf * dd / (1.0 + nf * dd)
                } else {
                    0.0
                }
            }
            ClosedForm::GammaHarmonic { theta } => {
                let t = theta.value();
                let h = digamma(t + nf) - digamma(t);
                (lfact(n) + ln_gamma(t + nf - mf) - mf.ln() - lfact(n - m) - ln_gamma(t + nf)
                    - h.ln())
                .exp()
            }
            ClosedForm::AlphaRenewal { alpha } => {
                let a = alpha.value();
                if m < n {
                    (a.ln() + ln_gamma(mf - a) - ln_gamma(1.0 - a) - lfact(m)).exp()
                } else {
                    (ln_gamma(nf - a) - ln_gamma(1.0 - a) - lfact(n - 1)).exp()
                }
            }
        }
    }
}

/// ln((γ+θ)_n − (θ)_n); the ratio (θ)_n/(γ+θ)_n is summed termwise when it is close to 1.
fn beta_sb_ln_den(g: f64, t: f64, n: usize) -> f64 {
    let nf = n as f64;
    let l_full = ln_gamma(g + t + nf) - ln_gamma(g + t);
    let mut l_ratio = ln_gamma(t + nf) - ln_gamma(t) - l_full;
    if -l_ratio.exp_m1() < 0.5 && n <= 100_000 {
        l_ratio = (0..n).map(|j| (-g / (g + t + j as f64)).ln_1p()).sum();
    }
    l_full + (-l_ratio.exp_m1()).ln()
}

fn beta_sb_entry(g: f64, t: f64, n: usize, m: usize, l_den: f64) -> f64 {
    let (nf, mf) = (n as f64, m as f64);
    (ln_binomial(n, m) + ln_gamma(g + mf) - ln_gamma(g) + ln_gamma(t + nf - mf) - ln_gamma(t) - l_den).exp()
}
