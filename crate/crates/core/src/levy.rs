//! Lévy data of multiplicative subordinators: Laplace exponents, binomial moments,
//! transforms, and the inverse problem from one-block probabilities.

use std::fmt;
use std::sync::Arc;

use statrs::function::gamma::{digamma, ln_gamma};

use crate::error::{Error, Result};
use crate::quad;
use crate::scalar::{binomial, rising, Param, Scalar};

type MomentFn = Arc<dyn Fn(usize, usize) -> f64 + Send + Sync>;
pub type DensityFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

const DENSITY_TOL: f64 = 1e-12;

/// User-supplied measure on (0,1]: either moments ∫x^m(1-x)^{n-m}ν(dx) or a density.
#[derive(Clone)]
pub struct CustomMeasure {
    drift: f64,
    moments: Option<MomentFn>,
    density: Option<DensityFn>,
}

impl fmt::Debug for CustomMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomMeasure")
            .field("drift", &self.drift)
            .field("moments", &self.moments.is_some())
            .field("density", &self.density.is_some())
            .finish()
    }
}

impl CustomMeasure {
    pub fn drift(&self) -> f64 {
        self.drift
    }

    pub fn density_fn(&self) -> Option<DensityFn> {
        self.density.clone()
    }

    fn raw_moment(&self, n: usize, m: usize) -> Result<f64> {
        if let Some(f) = &self.moments {
            return Ok(f(n, m));
        }
        let dens = self.density.as_ref().expect("custom measure has moments or density");
        let (a, b) = (m as i32, (n - m) as i32);
        quad::integrate(&|x: f64| x.powi(a) * (1.0 - x).powi(b) * dens(x), 0.0, 1.0, DENSITY_TOL)
    }

    fn phi(&self, rho: f64) -> Result<f64> {
        if rho.fract() == 0.0 && rho >= 0.0 {
            let n = rho as usize;
            let mut s = n as f64 * self.drift;
            for m in 1..=n {
                s += binomial::<f64>(n, m) * self.raw_moment(n, m)?;
            }
            return Ok(s);
        }
        match &self.density {
            Some(dens) => {
                let v = quad::integrate(
                    &|x: f64| (1.0 - (1.0 - x).powf(rho)) * dens(x),
                    0.0,
                    1.0,
                    DENSITY_TOL,
                )?;
                Ok(v + rho * self.drift)
            }
            None => Err(Error::Undefined(format!(
                "custom moment provider cannot evaluate Φ at non-integer ρ = {rho}"
            ))),
        }
    }
}

/// Drift, measure on (0,1] and killing, as a tree of named families and transforms.
#[derive(Clone, Debug)]
pub enum LevyModel {
    /// ν[x,1] = x^{-α}(1-x)^θ.
    TwoParam { alpha: Param, theta: Param },
    /// Stick-breaking with W ~ beta(γ,θ).
    Beta { gamma: Param, theta: Param },
    /// Stick-breaking with W ≡ x.
    PointMass { x: Param },
    /// Density x^{-1}(1-x)^{θ-1}.
    GammaHarmonic { theta: Param },
    /// Pure drift d, no measure.
    Drift { d: Param },
    /// Adds an atom of mass β at 1.
    Killed { base: Box<LevyModel>, beta: Param },
    /// Φ_θ(ρ) = ρ/(ρ+θ) Φ(ρ+θ).
    Sliced { base: Box<LevyModel>, theta: Param },
    Custom(CustomMeasure),
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter(msg()))
    }
}

fn not_exact(what: &str) -> Error {
    Error::NotExact(format!("{what} has no exact rational value"))
}

impl LevyModel {
    pub fn two_param(alpha: Param, theta: Param) -> Result<Self> {
        check((0.0..1.0).contains(&alpha.value()), || {
            format!("two-parameter family needs 0 <= alpha < 1, got {alpha}")
        })?;
        check(theta.value() >= 0.0, || {
            format!("two-parameter family needs theta >= 0, got {theta}")
        })?;
        Ok(LevyModel::TwoParam { alpha, theta })
    }

    pub fn ewens(theta: Param) -> Result<Self> {
        check(theta.value() >= 0.0, || format!("Ewens family needs theta >= 0, got {theta}"))?;
        Self::two_param(Param::int(0), theta)
    }

    pub fn beta_sb(gamma: Param, theta: Param) -> Result<Self> {
        check(gamma.value() > 0.0 && theta.value() > 0.0, || {
            format!("beta stick-breaking needs gamma, theta > 0, got ({gamma}, {theta})")
        })?;
        Ok(LevyModel::Beta { gamma, theta })
    }

    pub fn point_mass(x: Param) -> Result<Self> {
        check(x.value() > 0.0 && x.value() <= 1.0, || {
            format!("point-mass factor needs 0 < x <= 1, got {x}")
        })?;
        Ok(LevyModel::PointMass { x })
    }

    pub fn gamma_harmonic(theta: Param) -> Result<Self> {
        check(theta.value() > 0.0, || {
            format!("gamma-harmonic family needs theta > 0, got {theta}")
        })?;
        Ok(LevyModel::GammaHarmonic { theta })
    }

    pub fn drift(d: Param) -> Result<Self> {
        check(d.value() > 0.0, || format!("pure drift needs d > 0, got {d}"))?;
        Ok(LevyModel::Drift { d })
    }

    /// Unit atom at 1 plus drift d.
    pub fn hook(d: Param) -> Result<Self> {
        check(d.value() >= 0.0, || format!("hook needs d >= 0, got {d}"))?;
        Ok(LevyModel::Killed {
            base: Box::new(LevyModel::Drift { d }),
            beta: Param::int(1),
        })
    }

    pub fn kill_deform(self, beta: Param) -> Result<Self> {
        check(beta.value() >= 0.0, || format!("kill mass needs beta >= 0, got {beta}"))?;
        Ok(LevyModel::Killed { base: Box::new(self), beta })
    }

    pub fn sliced_transform(self, theta: Param) -> Result<Self> {
        check(theta.value() >= 0.0, || format!("slice needs theta >= 0, got {theta}"))?;
        Ok(LevyModel::Sliced { base: Box::new(self), theta })
    }

    /// `moments(n, m)` must return ∫ x^m (1-x)^{n-m} ν(dx).
    pub fn custom_moments(
        drift: f64,
        moments: impl Fn(usize, usize) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        let model = LevyModel::Custom(CustomMeasure {
            drift,
            moments: Some(Arc::new(moments)),
            density: None,
        });
        model.validate()?;
        Ok(model)
    }

    /// Moments are obtained by adaptive quadrature of the density.
    pub fn custom_density(
        drift: f64,
        density: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        let model = LevyModel::Custom(CustomMeasure {
            drift,
            moments: None,
            density: Some(Arc::new(density)),
        });
        model.validate()?;
        Ok(model)
    }

    /// Φ(1) must be finite and positive.
    pub fn validate(&self) -> Result<()> {
        let v = self.phi::<f64>(&1.0)?;
        if v.is_finite() && v > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("Φ(1) = {v} is not finite and positive")))
        }
    }

    /// Whether exact evaluation of normalized quantities is possible.
    pub fn is_exact(&self) -> bool {
        match self {
            LevyModel::TwoParam { alpha, theta } => alpha.is_exact() && theta.is_exact(),
            LevyModel::Beta { gamma, theta } => gamma.is_exact() && theta.is_exact(),
            LevyModel::PointMass { x } => x.is_exact(),
            LevyModel::GammaHarmonic { theta } => theta.is_exact(),
            LevyModel::Drift { d } => d.is_exact(),
            LevyModel::Killed { base, beta } => beta.is_exact() && base.is_exact(),
            LevyModel::Sliced { base, theta } => theta.is_exact() && base.is_exact(),
            LevyModel::Custom(_) => false,
        }
    }

    /// Laplace exponent Φ(ρ) on the family's own scale.
    pub fn phi<S: Scalar>(&self, rho: &S) -> Result<S> {
        match self {
            LevyModel::TwoParam { alpha, theta } => {
                let th: S = S::from_param(theta)?;
                if alpha.is_zero() {
                    return Ok(rho.clone() / (rho.clone() + th));
                }
                if S::EXACT {
                    return Err(not_exact("two-parameter Φ(ρ) with α > 0"));
                }
                let (a, t, r) = (alpha.value(), theta.value(), rho.to_f64());
                S::from_f64(r * (ln_gamma(1.0 - a) + ln_gamma(r + t) - ln_gamma(r + 1.0 - a + t)).exp())
            }
            LevyModel::Beta { gamma, theta } => {
                let g: S = S::from_param(gamma)?;
                let t: S = S::from_param(theta)?;
                let tail = if let Some(k) = rho.as_integer().filter(|&k| k >= 0) {
                    rising(&t, k as usize) / rising(&(g + t.clone()), k as usize)
                } else if let Some(gi) = g.as_integer().filter(|&gi| gi > 0) {
                    rising(&t, gi as usize) / rising(&(t.clone() + rho.clone()), gi as usize)
                } else if S::EXACT {
                    return Err(not_exact("beta stick-breaking Φ(ρ) at non-integer ρ"));
                } else {
                    let (gv, tv, r) = (gamma.value(), theta.value(), rho.to_f64());
                    S::from_f64(
                        (ln_gamma(tv + r) + ln_gamma(gv + tv) - ln_gamma(tv) - ln_gamma(gv + tv + r)).exp(),
                    )?
                };
                Ok(S::one() - tail)
            }
            LevyModel::PointMass { x } => {
                let xv: S = S::from_param(x)?;
                if let Some(k) = rho.as_integer().filter(|&k| k >= 0) {
                    Ok(S::one() - (S::one() - xv).powi(k as usize))
                } else if S::EXACT {
                    Err(not_exact("point-mass Φ(ρ) at non-integer ρ"))
                } else {
                    S::from_f64(1.0 - (1.0 - x.value()).powf(rho.to_f64()))
                }
            }
            LevyModel::GammaHarmonic { theta } => {
                let t: S = S::from_param(theta)?;
                if let Some(k) = rho.as_integer().filter(|&k| k >= 0) {
                    Ok(harmonic(&t, k as usize))
                } else if S::EXACT {
                    Err(not_exact("gamma-harmonic Φ(ρ) at non-integer ρ"))
                } else {
                    let tv = theta.value();
                    S::from_f64(digamma(tv + rho.to_f64()) - digamma(tv))
                }
            }
            LevyModel::Drift { d } => Ok(rho.clone() * S::from_param(d)?),
            LevyModel::Killed { base, beta } => Ok(base.phi(rho)? + S::from_param(beta)?),
            LevyModel::Sliced { base, theta } => {
                if theta.is_zero() {
                    return base.phi(rho);
                }
                let t: S = S::from_param(theta)?;
                let shifted = rho.clone() + t.clone();
                Ok(rho.clone() / shifted.clone() * base.phi(&shifted)?)
            }
            LevyModel::Custom(c) => {
                if S::EXACT {
                    return Err(not_exact("custom measure"));
                }
                S::from_f64(c.phi(rho.to_f64())?)
            }
        }
    }

    /// Φ(ρ+k)/Φ(ρ); exact for the two-parameter family even when Φ itself is not.
    pub fn phi_ratio<S: Scalar>(&self, rho: &S, k: usize) -> Result<S> {
        match self {
            LevyModel::TwoParam { alpha, theta } => {
                let a: S = S::from_param(alpha)?;
                let t: S = S::from_param(theta)?;
                let kk = S::from_usize(k);
                Ok((rho.clone() + kk) / rho.clone() * rising(&(rho.clone() + t.clone()), k)
                    / rising(&(rho.clone() + S::one() - a + t), k))
            }
            LevyModel::Sliced { base, theta } if !theta.is_zero() => {
                let t: S = S::from_param(theta)?;
                let kk = S::from_usize(k);
                let outer = (rho.clone() + kk.clone()) / (rho.clone() + kk + t.clone())
                    * (rho.clone() + t.clone())
                    / rho.clone();
                Ok(outer * base.phi_ratio(&(rho.clone() + t), k)?)
            }
            LevyModel::Sliced { base, .. } => base.phi_ratio(rho, k),
            _ => {
                let den = self.phi(rho)?;
                if den.is_zero() {
                    return Err(Error::DivisionByZero("Φ ratio".into()));
                }
                Ok(self.phi(&(rho.clone() + S::from_usize(k)))? / den)
            }
        }
    }

    /// Φ(n)/Φ(1).
    pub fn phi_normalized<S: Scalar>(&self, n: usize) -> Result<S> {
        if n == 0 {
            return Ok(S::zero());
        }
        self.phi_ratio(&S::one(), n - 1)
    }

    /// (Φ(0), Φ(1), ..., Φ(N)) normalized to Φ(1) = 1.
    pub fn phi_sequence<S: Scalar>(&self, max_n: usize) -> Result<Vec<S>> {
        (0..=max_n).map(|n| self.phi_normalized(n)).collect()
    }

    /// Binomial moment Φ(n:m) on the family's own scale.
    pub fn binomial_moment<S: Scalar>(&self, n: usize, m: usize) -> Result<S> {
        check_nm(n, m)?;
        match self {
            LevyModel::Beta { gamma, theta } => {
                let g: S = S::from_param(gamma)?;
                let t: S = S::from_param(theta)?;
                Ok(binomial::<S>(n, m) * rising(&g, m) * rising(&t, n - m)
                    / rising(&(g + t.clone()), n))
            }
            LevyModel::PointMass { x } => {
                let xv: S = S::from_param(x)?;
                Ok(binomial::<S>(n, m) * xv.powi(m) * (S::one() - xv).powi(n - m))
            }
            LevyModel::GammaHarmonic { theta } => {
                let t: S = S::from_param(theta)?;
                let fact = rising(&S::one(), m - 1);
                Ok(binomial::<S>(n, m) * fact / rising(&(t + S::from_usize(n - m)), m))
            }
            LevyModel::Drift { d } => Ok(if m == 1 {
                S::from_usize(n) * S::from_param(d)?
            } else {
                S::zero()
            }),
            LevyModel::Killed { base, beta } => {
                let b = base.binomial_moment::<S>(n, m)?;
                Ok(if m == n { b + S::from_param(beta)? } else { b })
            }
            LevyModel::Sliced { theta, .. } if !theta.is_zero() => {
                let phi: Vec<S> = (0..=n)
                    .map(|j| if j == 0 { Ok(S::zero()) } else { self.phi(&S::from_usize(j)) })
                    .collect::<Result<_>>()?;
                Ok(phi_iterated_differences(&phi, n, m))
            }
            LevyModel::Sliced { base, .. } => base.binomial_moment(n, m),
            LevyModel::Custom(c) => {
                if S::EXACT {
                    return Err(not_exact("custom measure"));
                }
                let mut v = binomial::<f64>(n, m) * c.raw_moment(n, m)?;
                if m == 1 {
                    v += n as f64 * c.drift;
                }
                S::from_f64(v)
            }
            LevyModel::TwoParam { .. } => {
                Ok(self.binomial_moment_normalized::<S>(n, m)? * self.phi(&S::one())?)
            }
        }
    }

    /// Φ(n:m)/Φ(1).
    pub fn binomial_moment_normalized<S: Scalar>(&self, n: usize, m: usize) -> Result<S> {
        check_nm(n, m)?;
        match self {
            LevyModel::TwoParam { alpha, theta } => {
                let a: S = S::from_param(alpha)?;
                let t: S = S::from_param(theta)?;
                let one = S::one();
                let one_minus_a = one.clone() - a.clone();
                let one_plus_t = one.clone() + t.clone();
                let first = a.clone() * rising(&one_minus_a, m - 1) * rising(&one_plus_t, n - m);
                let second = if m == n {
                    rising(&one_minus_a, n)
                } else {
                    t.clone() * rising(&one_minus_a, m) * rising(&one_plus_t, n - m - 1)
                };
                let den = rising(&(S::from_int(2) - a + t), n - 1);
                Ok(binomial::<S>(n, m) * (first + second) / den)
            }
            LevyModel::Sliced { theta, .. } if !theta.is_zero() => {
                let phi: Vec<S> = self.phi_sequence(n)?;
                Ok(phi_iterated_differences(&phi, n, m))
            }
            LevyModel::Sliced { base, .. } => base.binomial_moment_normalized(n, m),
            _ => {
                let one = self.phi(&S::one())?;
                if one.is_zero() {
                    return Err(Error::DivisionByZero("Φ(1)".into()));
                }
                Ok(self.binomial_moment::<S>(n, m)? / one)
            }
        }
    }

    /// q(n:m) = Φ(n:m)/Φ(n).
    pub fn decrement<S: Scalar>(&self, n: usize, m: usize) -> Result<S> {
        let den: S = self.phi_normalized(n)?;
        if den.is_zero() {
            return Err(Error::DivisionByZero(format!("Φ({n}) = 0")));
        }
        Ok(self.binomial_moment_normalized::<S>(n, m)? / den)
    }
}

fn check_nm(n: usize, m: usize) -> Result<()> {
    if m == 0 || m > n {
        Err(Error::InvalidParameter(format!("binomial moment needs 1 <= m <= n, got ({n}, {m})")))
    } else {
        Ok(())
    }
}

/// h_θ(n) = Σ_{k=1}^n 1/(θ+k-1).
pub fn harmonic<S: Scalar>(theta: &S, n: usize) -> S {
    S::sum_all((1..=n).map(|k| S::one() / (theta.clone() + S::from_usize(k - 1))))
}

pub fn laplace_exponent(model: &LevyModel, rho: f64) -> Result<f64> {
    if rho <= 0.0 {
        return Err(Error::InvalidParameter(format!("Φ(ρ) needs ρ > 0, got {rho}")));
    }
    model.phi(&rho)
}

pub fn binomial_moment<S: Scalar>(model: &LevyModel, n: usize, m: usize) -> Result<S> {
    model.binomial_moment(n, m)
}

pub fn sliced_transform(model: LevyModel, theta: Param) -> Result<LevyModel> {
    model.sliced_transform(theta)
}

pub fn kill_deform(model: LevyModel, beta: Param) -> Result<LevyModel> {
    model.kill_deform(beta)
}

/// Φ(n:m) = C(n,m) Σ_{j=0}^m (-1)^{j+1} C(m,j) Φ(n-m+j), with `phi[0] = 0`.
pub fn phi_iterated_differences<S: Scalar>(phi: &[S], n: usize, m: usize) -> S {
    let mut acc = S::zero();
    for j in 0..=m {
        let term = binomial::<S>(m, j) * phi[n - m + j].clone();
        acc = if j % 2 == 1 { acc + term } else { acc - term };
    }
    binomial::<S>(n, m) * acc
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlternationReport<S> {
    pub ok: bool,
    /// First (n, m, Φ(n:m)) with Φ(n:m) < 0, scanning n then m.
    pub violation: Option<(usize, usize, S)>,
}

pub fn check_completely_alternating<S: Scalar>(phi: &[S]) -> AlternationReport<S> {
    for n in 1..phi.len() {
        for m in 1..=n {
            let v = phi_iterated_differences(phi, n, m);
            if v.is_negative() {
                return AlternationReport { ok: false, violation: Some((n, m, v)) };
            }
        }
    }
    AlternationReport { ok: true, violation: None }
}

/// Law of the size-biased gap P̃, through its moments or a named density.
#[derive(Clone, Debug, PartialEq)]
pub enum StructuralLaw<S> {
    /// p(1), p(2), ... with p(n) = E[P̃^{n-1}].
    Moments(Vec<S>),
    Beta { a: S, b: S },
    /// P̃ ≡ 1, the one-block structure.
    Atom,
}

impl<S: Scalar> StructuralLaw<S> {
    pub fn from_moments(p: Vec<S>) -> Result<Self> {
        if !p.first().is_some_and(|p1| p1.close(&S::one(), 1e-12)) {
            return Err(Error::InvalidParameter("structural moments need p(1) = 1".into()));
        }
        Ok(StructuralLaw::Moments(p))
    }

    /// beta(1-α, θ+α), or the atom at 1 when α = θ = 0.
    pub fn two_param(alpha: &Param, theta: &Param) -> Result<Self> {
        let a: S = S::from_param(alpha)?;
        let t: S = S::from_param(theta)?;
        let b = t + a.clone();
        if b.is_zero() {
            return Ok(StructuralLaw::Atom);
        }
        Ok(StructuralLaw::Beta { a: S::one() - a, b })
    }

    /// p(n) = E[P̃^{n-1}].
    pub fn p(&self, n: usize) -> Result<S> {
        self.mixed(n - 1, 0)
    }

    /// E[P̃^i (1-P̃)^j].
    pub fn mixed(&self, i: usize, j: usize) -> Result<S> {
        match self {
            StructuralLaw::Atom => Ok(if j == 0 { S::one() } else { S::zero() }),
            StructuralLaw::Beta { a, b } => Ok(rising(a, i) * rising(b, j)
                / rising(&(a.clone() + b.clone()), i + j)),
            StructuralLaw::Moments(p) => {
                let mut acc = S::zero();
                for l in 0..=j {
                    let idx = i + l;
                    let v = p.get(idx).cloned().ok_or(Error::MissingMoment(idx + 1))?;
                    let term = binomial::<S>(j, l) * v;
                    acc = if l % 2 == 0 { acc + term } else { acc - term };
                }
                Ok(acc)
            }
        }
    }

    /// All mixed moments with i + j < N are nonnegative.
    pub fn is_completely_monotone(&self, max_n: usize) -> Result<bool> {
        for total in 0..max_n {
            for i in 0..=total {
                if self.mixed(i, total - i)?.is_negative() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Recover the normalized Φ(0..=N) from p(n) via
/// Φ(n)(p(n) + (-1)^n) = Σ_{j=1}^{n-1} (-1)^{j+1} C(n,j) Φ(j).
///
/// When p(n) + (-1)^n vanishes (p(n) = 1 at odd n) the recursion is indeterminate;
/// the only completely alternating continuation is Φ(n) = Φ(n-1), used when the
/// right side also vanishes.
pub fn phi_from_moments<S: Scalar>(law: &StructuralLaw<S>, max_n: usize) -> Result<Vec<S>> {
    let mut phi = vec![S::zero(); max_n + 1];
    if max_n == 0 {
        return Ok(phi);
    }
    if !law.p(1)?.close(&S::one(), 1e-12) {
        return Err(Error::InvalidParameter("structural moments need p(1) = 1".into()));
    }
    phi[1] = S::one();
    for n in 2..=max_n {
        let sign = if n % 2 == 0 { S::one() } else { -S::one() };
        let coef = law.p(n)? + sign;
        let mut rhs = S::zero();
        for (j, phij) in phi.iter().enumerate().take(n).skip(1) {
            let term = binomial::<S>(n, j) * phij.clone();
            rhs = if j % 2 == 1 { rhs + term } else { rhs - term };
        }
        if coef.close(&S::zero(), 1e-14) {
            if rhs.close(&S::zero(), 1e-12) {
                phi[n] = phi[n - 1].clone();
                continue;
            }
            return Err(Error::DivisionByZero(format!(
                "moment recursion at n = {n}: p({n}) = {}",
                law.p(n)?.format()
            )));
        }
        phi[n] = rhs / coef;
    }
    Ok(phi)
}

/// q(3:2) = (2p(2) - 3p(3) + p(2)p(3)) / (1 - p(2)).
pub fn q32_from_moments<S: Scalar>(p2: &S, p3: &S) -> Result<S> {
    let den = S::one() - p2.clone();
    if den.is_zero() {
        return Err(Error::DivisionByZero("q(3:2) identity with p(2) = 1".into()));
    }
    Ok((S::from_int(2) * p2.clone() - S::from_int(3) * p3.clone() + p2.clone() * p3.clone()) / den)
}
