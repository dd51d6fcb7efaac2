//! Block counts K_n and K_{n,r}: exact expectations, Monte Carlo summaries, and
//! finite-n diagnostics for the growth laws.

use rayon::prelude::*;
use statrs::function::gamma::{digamma, ln_gamma};

use crate::combinat::{Composition, Partition};
use crate::decrement::Decrements;
use crate::error::{Error, Result};
use crate::levy::{LevyModel, StructuralLaw};
use crate::quad;
use crate::samplers::{sample_crp, sample_stickbreaking, sample_stickbreaking_fast, PartSampler, RngStream, StickFactor};
use crate::scalar::{binomial, Scalar};

pub const DEFAULT_R_MAX: usize = 20;

/// K_n, K_{n,r} and, for stick-breaking draws, the rightmost occupied gap M_n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockStats {
    pub n: usize,
    pub k: usize,
    /// K_{n,r} at index r - 1.
    pub counts: Vec<usize>,
    pub rightmost_gap: Option<usize>,
}

impl BlockStats {
    pub fn k_r(&self, r: usize) -> usize {
        if r == 0 {
            return 0;
        }
        self.counts.get(r - 1).copied().unwrap_or(0)
    }

    fn from_parts(parts: &[usize]) -> Self {
        let n: usize = parts.iter().sum();
        let mut counts = vec![0; n];
        for &p in parts {
            counts[p - 1] += 1;
        }
        let stats = BlockStats { n, k: parts.len(), counts, rightmost_gap: None };
        debug_assert_eq!(stats.counts.iter().enumerate().map(|(i, c)| (i + 1) * c).sum::<usize>(), n);
        stats
    }
}

pub fn count_blocks(c: &Composition) -> BlockStats {
    BlockStats::from_parts(c.parts())
}

pub fn count_blocks_partition(p: &Partition) -> BlockStats {
    BlockStats::from_parts(p.parts())
}

/// E[K_0], ..., E[K_n] from E[K_n] = 1 + Σ_m q(n:m) E[K_{n-m}].
pub fn expected_kn_dp_all<S: Scalar, D: Decrements<S> + ?Sized>(q: &D, n: usize) -> Result<Vec<S>> {
    let mut e = vec![S::zero(); n + 1];
    for level in 1..=n {
        let row = q.row(level)?;
        let mut acc = S::one();
        for (i, qm) in row.into_iter().enumerate() {
            let rest = level - (i + 1);
            if rest > 0 && !qm.is_zero() {
                acc = acc + qm * e[rest].clone();
            }
        }
        e[level] = acc;
    }
    Ok(e)
}

pub fn expected_kn_dp<S: Scalar, D: Decrements<S> + ?Sized>(q: &D, n: usize) -> Result<S> {
    Ok(expected_kn_dp_all(q, n)?.swap_remove(n))
}

/// E[K_n] = Σ_{j<n} E[(1-P̃)^j].
pub fn expected_kn_structural<S: Scalar>(law: &StructuralLaw<S>, n: usize) -> Result<S> {
    let terms = (0..n).map(|j| law.mixed(0, j)).collect::<Result<Vec<S>>>()?;
    Ok(S::sum_all(terms))
}

/// E[K_{n,r}] = C(n,r) E[P̃^{r-1}(1-P̃)^{n-r}].
pub fn expected_knr_structural<S: Scalar>(law: &StructuralLaw<S>, n: usize, r: usize) -> Result<S> {
    if r == 0 || r > n {
        return Ok(S::zero());
    }
    Ok(binomial::<S>(n, r) * law.mixed(r - 1, n - r)?)
}

/// E[K_n] for P̃ ~ beta(a,b) in doubles, stable for large n.
pub fn expected_kn_beta_f64(a: f64, b: f64, n: usize) -> f64 {
    let base = ln_gamma(a + b) - ln_gamma(b);
    let terms: Vec<f64> = (0..n)
        .map(|j| (base + ln_gamma(b + j as f64) - ln_gamma(a + b + j as f64)).exp())
        .collect();
    pairwise_sum(&terms)
}

/// E[K_{n,r}] for P̃ ~ beta(a,b) in doubles.
pub fn expected_knr_beta_f64(a: f64, b: f64, n: usize, r: usize) -> f64 {
    if r == 0 || r > n {
        return 0.0;
    }
    let (i, j) = ((r - 1) as f64, (n - r) as f64);
    (crate::scalar::ln_binomial(n, r) + ln_gamma(a + i) + ln_gamma(b + j) + ln_gamma(a + b)
        - ln_gamma(a)
        - ln_gamma(b)
        - ln_gamma(a + b + i + j))
    .exp()
}

/// E[I_α^k] = k!/∏_{j=1}^k Φ(αj) with Φ on the model's own scale.
pub fn exp_functional_moments(model: &LevyModel, alpha: f64, k: usize) -> Result<f64> {
    if k == 0 {
        return Ok(1.0);
    }
    let mut log = ln_gamma(k as f64 + 1.0);
    for j in 1..=k {
        let phi: f64 = model.phi(&(alpha * j as f64))?;
        if !(phi > 0.0) {
            return Err(Error::DivisionByZero(format!("Φ({}) = {phi}", alpha * j as f64)));
        }
        log -= phi.ln();
    }
    Ok(log.exp())
}

/// (α+θ)(2α+θ)...((k-1)α+θ) Γ(θ+1) / (Γ(kα+θ) {αΓ(1-α)}^k), the two-parameter case.
pub fn two_param_functional_moment(alpha: f64, theta: f64, k: usize) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let mut log = ln_gamma(theta + 1.0) - ln_gamma(k as f64 * alpha + theta)
        - k as f64 * (alpha.ln() + ln_gamma(1.0 - alpha));
    for j in 1..k {
        log += (j as f64 * alpha + theta).ln();
    }
    log.exp()
}

/// Source of replicates for [`mc_blocks`].
#[derive(Clone, Debug)]
pub enum BlockSampler {
    Chain(PartSampler),
    /// Binomial thinning of a stick-breaking paintbox; reports M_n.
    StickBreaking(StickFactor),
    /// Literal paintbox with n uniforms; reports M_n.
    Paintbox(StickFactor),
    Crp { alpha: f64, theta: f64 },
}

impl BlockSampler {
    pub fn draw(&self, n: usize, rng: &mut RngStream) -> Result<BlockStats> {
        Ok(match self {
            BlockSampler::Chain(s) => count_blocks(&s.compose(n, rng)?),
            BlockSampler::StickBreaking(w) => {
                let d = sample_stickbreaking_fast(w, n, rng)?;
                BlockStats { rightmost_gap: Some(d.rightmost_gap), ..count_blocks(&d.composition) }
            }
            BlockSampler::Paintbox(w) => {
                let d = sample_stickbreaking(w, n, rng)?;
                BlockStats { rightmost_gap: Some(d.rightmost_gap), ..count_blocks(&d.composition) }
            }
            BlockSampler::Crp { alpha, theta } => count_blocks_partition(&sample_crp(*alpha, *theta, n, rng)?),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StatSummary {
    pub name: String,
    pub mean: f64,
    pub variance: f64,
    pub se: f64,
    pub lo95: f64,
    pub hi95: f64,
}

impl StatSummary {
    fn from_values(name: String, xs: &[f64]) -> Self {
        let reps = xs.len() as f64;
        let mean = pairwise_sum(xs) / reps;
        let dev: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
        let variance = if xs.len() > 1 { pairwise_sum(&dev) / (reps - 1.0) } else { 0.0 };
        let se = (variance / reps).sqrt();
        StatSummary { name, mean, variance, se, lo95: mean - 1.96 * se, hi95: mean + 1.96 * se }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct McSummary {
    pub n: usize,
    pub reps: usize,
    pub seed: u64,
    pub stats: Vec<StatSummary>,
    /// Raw K_n per replicate, in replicate order.
    pub k_values: Vec<f64>,
}

impl McSummary {
    pub fn get(&self, name: &str) -> Option<&StatSummary> {
        self.stats.iter().find(|s| s.name == name)
    }

    pub fn kn(&self) -> &StatSummary {
        self.get("K").expect("K is always summarized")
    }
}

/// Sum in a fixed binary tree so the result does not depend on how work was split.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Replicate i uses stream i of `seed`; statistics are K, K_1..K_{r_max}, K_>{r_max}
/// and M when the sampler reports it.
pub fn mc_blocks(sampler: &BlockSampler, n: usize, reps: usize, seed: u64, r_max: usize) -> Result<McSummary> {
    if reps < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 replicates, got {reps}")));
    }
    let draws = (0..reps)
        .into_par_iter()
        .map(|i| sampler.draw(n, &mut RngStream::new(seed, i as u64)))
        .collect::<Result<Vec<BlockStats>>>()?;
    let column = |f: &dyn Fn(&BlockStats) -> f64| draws.iter().map(f).collect::<Vec<f64>>();
    let k_values = column(&|b| b.k as f64);
    let mut stats = vec![StatSummary::from_values("K".into(), &k_values)];
    for r in 1..=r_max {
        stats.push(StatSummary::from_values(format!("K_{r}"), &column(&|b| b.k_r(r) as f64)));
    }
    let tail = column(&|b| b.counts.iter().skip(r_max).sum::<usize>() as f64);
    stats.push(StatSummary::from_values(format!("K_>{r_max}"), &tail));
    if draws.iter().all(|b| b.rightmost_gap.is_some()) {
        let m = column(&|b| b.rightmost_gap.unwrap_or(0) as f64);
        stats.push(StatSummary::from_values("M".into(), &m));
    }
    Ok(McSummary { n, reps, seed, stats, k_values })
}

/// ψ'(x) by upward recurrence and the asymptotic series.
pub fn trigamma(mut x: f64) -> f64 {
    if x <= 0.0 && x.fract() == 0.0 {
        return f64::INFINITY;
    }
    let mut acc = 0.0;
    while x < 10.0 {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let x2 = 1.0 / (x * x);
    let series = 1.0 / x
        + x2 / 2.0
        + x2 / x * (1.0 / 6.0 - x2 * (1.0 / 30.0 - x2 * (1.0 / 42.0 - x2 * (1.0 / 30.0 - x2 * 5.0 / 66.0))));
    acc + series
}

/// m = E[-log(1-W)], v² = E[log²(1-W)], s² = v²/m; σ² and m₁ exist for stick-breaking only.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentSet {
    pub m: f64,
    pub v2: f64,
    pub s2: f64,
    pub sigma2: Option<f64>,
    pub m1: Option<f64>,
}

impl MomentSet {
    pub fn stick_breaking(w: &StickFactor) -> Self {
        let (m, sigma2, m1) = match *w {
            StickFactor::Beta { a, b, .. } => {
                (digamma(a + b) - digamma(b), trigamma(b) - trigamma(a + b), digamma(a + b) - digamma(a))
            }
            StickFactor::Point(x) => (-(-x).ln_1p(), 0.0, -x.ln()),
        };
        let v2 = sigma2 + m * m;
        MomentSet { m, v2, s2: v2 / m, sigma2: Some(sigma2), m1: Some(m1) }
    }

    /// Quadrature of -log(1-x) and log²(1-x) against ν; infinite when ν has an atom at 1.
    pub fn from_model(model: &LevyModel) -> Result<Self> {
        if let Some(w) = StickFactor::from_model(model)? {
            return Ok(Self::stick_breaking(&w));
        }
        let density = levy_density(model)?;
        if density.atom_at_one > 0.0 {
            return Ok(MomentSet { m: f64::INFINITY, v2: f64::INFINITY, s2: f64::NAN, sigma2: None, m1: None });
        }
        let f = &density.f;
        let m = quad::integrate(&|x: f64| -(-x).ln_1p() * f(x), 0.0, 1.0, 1e-12)?;
        let v2 = quad::integrate(&|x: f64| (-x).ln_1p().powi(2) * f(x), 0.0, 1.0, 1e-12)?;
        Ok(MomentSet { m, v2, s2: v2 / m, sigma2: None, m1: None })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CltReport {
    pub n: usize,
    pub moments: MomentSet,
    /// mean(K_n) / (log n / m).
    pub mean_ratio: f64,
    /// var(K_n) / (σ² m⁻³ log n).
    pub var_ratio: f64,
    /// Sample skewness of standardized K_n.
    pub skewness: f64,
    pub summary: McSummary,
}

/// Finite-n check of the normal limit for stick-breaking with finite m, σ², m₁.
pub fn clt_case_a_diagnostic(w: &StickFactor, n: usize, reps: usize, seed: u64) -> Result<CltReport> {
    let moments = MomentSet::stick_breaking(w);
    let sigma2 = moments.sigma2.unwrap_or(0.0);
    let m1 = moments.m1.unwrap_or(f64::INFINITY);
    if !moments.m.is_finite() || !m1.is_finite() {
        return Err(Error::InfiniteMoment(format!("m = {}, m1 = {m1}", moments.m)));
    }
    if !(sigma2 > 0.0) {
        return Err(Error::Degenerate(format!("sigma^2 = {sigma2}")));
    }
    let summary = mc_blocks(&BlockSampler::StickBreaking(*w), n, reps, seed, 0)?;
    let ln = (n as f64).ln();
    let k = summary.kn().clone();
    let sd = k.variance.sqrt();
    let cubes: Vec<f64> = summary.k_values.iter().map(|x| ((x - k.mean) / sd).powi(3)).collect();
    let skewness = if sd > 0.0 { pairwise_sum(&cubes) / reps as f64 } else { 0.0 };
    Ok(CltReport {
        n,
        mean_ratio: k.mean / (ln / moments.m),
        var_ratio: k.variance / (sigma2 * moments.m.powi(-3) * ln),
        skewness,
        moments,
        summary,
    })
}

/// ν as a density on (0,1) plus drift and atom at 1.
struct LevyDensity {
    f: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    drift: f64,
    atom_at_one: f64,
}

fn levy_density(model: &LevyModel) -> Result<LevyDensity> {
    let none = |f: Box<dyn Fn(f64) -> f64 + Send + Sync>| LevyDensity { f, drift: 0.0, atom_at_one: 0.0 };
    Ok(match model {
        LevyModel::GammaHarmonic { theta } => {
            let t = theta.value();
            none(Box::new(move |x: f64| (t - 1.0) * (-x).ln_1p() - x.ln()).exp_wrapped())
        }
        LevyModel::TwoParam { alpha, theta } => {
            let (a, t) = (alpha.value(), theta.value());
            let f = move |x: f64| {
                let mut v = a * (-(a + 1.0) * x.ln() + t * (-x).ln_1p()).exp();
                if t > 0.0 {
                    v += t * (-a * x.ln() + (t - 1.0) * (-x).ln_1p()).exp();
                }
                v
            };
            LevyDensity { f: Box::new(f), drift: 0.0, atom_at_one: if t == 0.0 { 1.0 } else { 0.0 } }
        }
        LevyModel::Beta { gamma, theta } => {
            let (g, t) = (gamma.value(), theta.value());
            let lb = ln_gamma(g) + ln_gamma(t) - ln_gamma(g + t);
            none(Box::new(move |x: f64| ((g - 1.0) * x.ln() + (t - 1.0) * (-x).ln_1p() - lb).exp()))
        }
        LevyModel::Drift { d } => LevyDensity { f: Box::new(|_| 0.0), drift: d.value(), atom_at_one: 0.0 },
        LevyModel::Killed { base, beta } => {
            let mut inner = levy_density(base)?;
            inner.atom_at_one += beta.value();
            inner
        }
        LevyModel::Custom(c) => match c.density_fn() {
            Some(f) => LevyDensity { f: Box::new(move |x| f(x)), drift: c.drift(), atom_at_one: 0.0 },
            None => return Err(Error::Undefined("custom measure without density".into())),
        },
        other => return Err(Error::Undefined(format!("no Lévy density for {other:?}"))),
    })
}

trait ExpWrapped {
    fn exp_wrapped(self) -> Box<dyn Fn(f64) -> f64 + Send + Sync>;
}

impl<F: Fn(f64) -> f64 + Send + Sync + 'static> ExpWrapped for F {
    fn exp_wrapped(self) -> Box<dyn Fn(f64) -> f64 + Send + Sync> {
        Box::new(move |x| self(x).exp())
    }
}

const INNER_TOL: f64 = 1e-12;
const OUTER_TOL: f64 = 1e-10;

fn phi0_with(density: &LevyDensity, s: f64) -> Result<f64> {
    let f = &density.f;
    // x = e^{-u}; the integrand is flat up to u ≈ log s and then decays double exponentially.
    let g = |u: f64| {
        let x = (-u).exp();
        if x >= 1.0 {
            return 0.0;
        }
        -(-s * x).exp_m1() * f(x) * x
    };
    let top = s.ln().max(0.0) + 60.0;
    let split = s.ln().clamp(1.0, top - 1.0);
    let mut v = quad::integrate(&g, 0.0, 1.0, INNER_TOL)?;
    if split > 1.0 {
        v += quad::integrate(&g, 1.0, split, INNER_TOL)?;
    }
    v += quad::integrate(&g, split, top, INNER_TOL)?;
    Ok(v + s * density.drift + density.atom_at_one * -(-s).exp_m1())
}

/// Poissonised exponent Φ₀(s) = ∫ (1 - e^{-sx}) ν(dx) + sd + β(1 - e^{-s}).
pub fn phi0(model: &LevyModel, s: f64) -> Result<f64> {
    phi0_with(&levy_density(model)?, s)
}

/// (Φ₀(n), Φ₁(n), Φ₂(n)) with Φ_k(n) = ∫₀ⁿ Φ₀(s)^k ds/s.
pub fn phi012(model: &LevyModel, n: f64) -> Result<(f64, f64, f64)> {
    let density = levy_density(model)?;
    let p0 = phi0_with(&density, n)?;
    let lo = -40.0;
    let hi = n.ln();
    let integral = |k: i32| -> Result<f64> {
        let err = std::cell::Cell::new(None);
        let f = |t: f64| match phi0_with(&density, t.exp()) {
            Ok(v) => v.powi(k),
            Err(e) => {
                err.set(Some(e));
                0.0
            }
        };
        let v = quad::integrate(&f, lo, hi, OUTER_TOL)?;
        match err.take() {
            Some(e) => Err(e),
            None => Ok(v),
        }
    };
    Ok((p0, integral(1)?, integral(2)?))
}
