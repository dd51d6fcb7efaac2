//! Seeded samplers: decreasing chains, stick-breaking paintboxes, restaurant processes,
//! the q-chain on compositions, Bernoulli and renewal strings, and random arrangements.

mod gof;
mod qchain;
mod strings;

pub use gof::{chi_square_gof, chi_square_two_sample, empirical_counts, ChiSquareResult};
pub use qchain::{
    qchain_partition_matrix, qchain_step, qchain_step_partition, qchain_transition_matrix,
    TransitionMatrix,
};
pub use strings::{
    arrangement_from_ranks, bits_to_string, pw_arrangement, pw_initial_ranks,
    sample_bernoulli_string_dual_ewens, sample_renewal_string_alpha,
};

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Binomial, Distribution};
use statrs::function::gamma::ln_gamma;

use crate::combinat::{Composition, Partition};
use crate::decrement::{ClosedForm, Decrements};
use crate::error::{Error, Result};
use crate::levy::LevyModel;
use crate::scalar::Scalar;

pub const MAX_BREAKS: usize = 1_000_000;

/// ChaCha8 keyed by a master seed, one independent stream per index.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        RngStream { seed, stream, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// Law of the stick-breaking factor W.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StickFactor {
    Beta { a: f64, b: f64, dist: Beta<f64> },
    Point(f64),
}

impl StickFactor {
    pub fn beta(a: f64, b: f64) -> Result<Self> {
        let dist = Beta::new(a, b)
            .map_err(|e| Error::InvalidParameter(format!("beta({a},{b}): {e}")))?;
        Ok(StickFactor::Beta { a, b, dist })
    }

    pub fn point(x: f64) -> Result<Self> {
        if !(x > 0.0 && x <= 1.0) {
            return Err(Error::InvalidParameter(format!("W must lie in (0,1], got {x}")));
        }
        Ok(StickFactor::Point(x))
    }

    /// W for the stick-breaking models; `None` for other Lévy data.
    pub fn from_model(model: &LevyModel) -> Result<Option<Self>> {
        Ok(match model {
            LevyModel::Beta { gamma, theta } => Some(Self::beta(gamma.value(), theta.value())?),
            LevyModel::PointMass { x } => Some(Self::point(x.value())?),
            LevyModel::TwoParam { alpha, theta } if alpha.is_zero() && !theta.is_zero() => {
                Some(Self::beta(1.0, theta.value())?)
            }
            _ => None,
        })
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            StickFactor::Beta { dist, .. } => dist.sample(rng),
            StickFactor::Point(x) => *x,
        }
    }

    /// Binomial(n, W) conditioned to be positive, W tilted accordingly.
    fn first_part<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> usize {
        match *self {
            StickFactor::Point(x) => truncated_binomial(n, x, rng),
            StickFactor::Beta { dist, .. } => loop {
                let w: f64 = dist.sample(rng);
                if w >= 1.0 {
                    return n;
                }
                if w <= 0.0 {
                    continue;
                }
                let b = binomial(n, w, rng);
                if b > 0 {
                    return b;
                }
            },
        }
    }
}

fn binomial<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> usize {
    if p >= 1.0 {
        return n;
    }
    Binomial::new(n as u64, p).expect("p in [0,1)").sample(rng) as usize
}

/// First success J of n trials given at least one, then the rest binomially.
fn truncated_binomial<R: Rng + ?Sized>(n: usize, x: f64, rng: &mut R) -> usize {
    if x >= 1.0 {
        return n;
    }
    let log_fail = (-x).ln_1p();
    let hit = -(n as f64 * log_fail).exp_m1();
    let u: f64 = rng.random();
    let j = 1 + ((-(u * hit)).ln_1p() / log_fail).floor() as usize;
    let j = j.clamp(1, n);
    1 + binomial(n - j, x, rng)
}

/// Finite paintbox: gaps [0,Y_1), [Y_1,Y_2), ..., [Y_last, 1).
#[derive(Clone, Debug, PartialEq)]
pub struct Paintbox {
    breaks: Vec<f64>,
    meander: bool,
}

/// A composition with the index of the rightmost occupied gap.
#[derive(Clone, Debug, PartialEq)]
pub struct PaintboxDraw {
    pub composition: Composition,
    pub rightmost_gap: usize,
}

impl Paintbox {
    pub fn new(breaks: Vec<f64>, meander: bool) -> Result<Self> {
        let mut prev = 0.0;
        for &y in &breaks {
            if !(y > prev && y <= 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "break points must increase strictly inside (0,1], got {y} after {prev}"
                )));
            }
            prev = y;
        }
        Ok(Paintbox { breaks, meander })
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    /// Whether the last gap [Y_last, 1) is a meander.
    pub fn meander(&self) -> bool {
        self.meander
    }

    /// Y_k = 1 - ∏_{i<=k}(1 - W_i) until Y_k exceeds `cover`.
    pub fn stick_breaking<R: Rng + ?Sized>(w: &StickFactor, cover: f64, rng: &mut R) -> Result<Self> {
        let mut breaks = Vec::new();
        let mut rest = 1.0;
        loop {
            if breaks.len() >= MAX_BREAKS {
                return Err(Error::BreakCap(MAX_BREAKS));
            }
            rest *= 1.0 - w.draw(rng);
            let y = 1.0 - rest;
            if breaks.last().is_none_or(|&last| y > last) {
                breaks.push(y);
            }
            if y > cover || rest <= 0.0 {
                break;
            }
        }
        Ok(Paintbox { breaks, meander: false })
    }

    /// Groups the points by gap, read left to right.
    pub fn cluster(&self, points: &[f64]) -> PaintboxDraw {
        let mut counts = vec![0usize; self.breaks.len() + 1];
        for &u in points {
            counts[self.breaks.partition_point(|&y| y <= u)] += 1;
        }
        let rightmost_gap = counts.iter().rposition(|&c| c > 0).map_or(0, |i| i + 1);
        let parts: Vec<usize> = counts.into_iter().filter(|&c| c > 0).collect();
        PaintboxDraw { composition: Composition::from_parts_unchecked(parts), rightmost_gap }
    }
}

/// Literal paintbox: n uniforms clustered by the gaps of a stick-breaking set.
pub fn sample_stickbreaking<R: Rng + ?Sized>(w: &StickFactor, n: usize, rng: &mut R) -> Result<PaintboxDraw> {
    let points: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    let cover = points.iter().cloned().fold(0.0, f64::max);
    Ok(Paintbox::stick_breaking(w, cover, rng)?.cluster(&points))
}

/// Same law as [`sample_stickbreaking`]: the count in gap k is Binomial(remaining, W_k).
pub fn sample_stickbreaking_fast<R: Rng + ?Sized>(
    w: &StickFactor,
    n: usize,
    rng: &mut R,
) -> Result<PaintboxDraw> {
    let mut parts = Vec::new();
    let mut rest = n;
    let mut gaps = 0;
    while rest > 0 {
        if gaps >= MAX_BREAKS {
            return Err(Error::BreakCap(MAX_BREAKS));
        }
        gaps += 1;
        let b = binomial(rest, w.draw(rng), rng);
        if b > 0 {
            parts.push(b);
            rest -= b;
        }
    }
    Ok(PaintboxDraw { composition: Composition::from_parts_unchecked(parts), rightmost_gap: gaps })
}

/// ln P(X > m) for the renewal step law h(m) = α(1-α)_{m-1}/m!.
fn renewal_log_tail(alpha: f64, m: usize) -> f64 {
    let mf = m as f64;
    ln_gamma(mf + 1.0 - alpha) - ln_gamma(1.0 - alpha) - ln_gamma(mf + 1.0)
}

/// min(X, cap) for X ~ h, by inverting the tail.
fn renewal_step<R: Rng + ?Sized>(alpha: f64, cap: usize, rng: &mut R) -> usize {
    let lu = rng.random::<f64>().ln();
    if cap <= 1 || renewal_log_tail(alpha, cap - 1) > lu {
        return cap.max(1);
    }
    let (mut lo, mut hi) = (1, cap - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if renewal_log_tail(alpha, mid) <= lu {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}

/// Draws of the first part at level n for a fixed decrement law.
#[derive(Clone, Debug)]
pub enum PartSampler {
    /// Cumulative rows of a stored matrix.
    Table(Vec<Vec<f64>>),
    /// Inverse CDF scanned from m = 1.
    Closed(ClosedForm),
    StickBreaking(StickFactor),
    /// (α,0): min(X, n) with X ~ h.
    Renewal { alpha: f64 },
    /// (α,θ): min(X, M) with X ~ h and M an Ewens(θ) first part.
    TwoParam { alpha: f64, beta_one: StickFactor },
    Hook { d: f64 },
    OneBlock,
}

impl PartSampler {
    pub fn from_decrements<S: Scalar, D: Decrements<S> + ?Sized>(q: &D, max_n: usize) -> Result<Self> {
        let mut rows = Vec::with_capacity(max_n);
        for n in 1..=max_n {
            let mut acc = 0.0;
            let row: Vec<f64> = q
                .row(n)?
                .iter()
                .map(|v| {
                    acc += v.to_f64();
                    acc
                })
                .collect();
            rows.push(row);
        }
        Ok(PartSampler::Table(rows))
    }

    pub fn from_closed(form: &ClosedForm) -> Result<Self> {
        Ok(match form {
            ClosedForm::Ewens { theta } => {
                if theta.is_zero() {
                    PartSampler::OneBlock
                } else {
                    PartSampler::StickBreaking(StickFactor::beta(1.0, theta.value())?)
                }
            }
            ClosedForm::TwoParam { alpha, theta } => {
                if alpha.is_zero() {
                    return Self::from_closed(&ClosedForm::Ewens { theta: theta.clone() });
                }
                if theta.is_zero() {
                    PartSampler::Renewal { alpha: alpha.value() }
                } else {
                    PartSampler::TwoParam {
                        alpha: alpha.value(),
                        beta_one: StickFactor::beta(1.0, theta.value())?,
                    }
                }
            }
            ClosedForm::BetaSb { gamma, theta } => {
                PartSampler::StickBreaking(StickFactor::beta(gamma.value(), theta.value())?)
            }
            ClosedForm::Hook { d } => PartSampler::Hook { d: d.value() },
            ClosedForm::AlphaRenewal { alpha } => PartSampler::Renewal { alpha: alpha.value() },
            ClosedForm::GammaHarmonic { .. } => PartSampler::Closed(form.clone()),
        })
    }

    /// Specialised sampler when one exists, else a table up to `max_n`.
    pub fn from_model(model: &LevyModel, max_n: usize) -> Result<Self> {
        if let Some(form) = ClosedForm::from_model(model) {
            return Self::from_closed(&form);
        }
        if let Some(w) = StickFactor::from_model(model)? {
            return Ok(PartSampler::StickBreaking(w));
        }
        Self::from_decrements::<f64, _>(model, max_n)
    }

    pub fn max_level(&self) -> usize {
        match self {
            PartSampler::Table(rows) => rows.len(),
            _ => usize::MAX,
        }
    }

    /// One draw from q(n:·).
    pub fn draw<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<usize> {
        if n == 0 || n > self.max_level() {
            return Err(Error::LevelOutOfRange { n, max: self.max_level() });
        }
        if n == 1 {
            return Ok(1);
        }
        Ok(match self {
            PartSampler::Table(rows) => {
                let row = &rows[n - 1];
                let u = rng.random::<f64>() * row[n - 1];
                (row.partition_point(|&c| c <= u) + 1).min(n)
            }
            PartSampler::Closed(form) => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                let mut pick = n;
                for m in 1..=n {
                    acc += form.q_f64(n, m);
                    if acc > u {
                        pick = m;
                        break;
                    }
                }
                pick
            }
            PartSampler::StickBreaking(w) => w.first_part(n, rng),
            PartSampler::Renewal { alpha } => renewal_step(*alpha, n, rng),
            PartSampler::TwoParam { alpha, beta_one } => {
                let m = beta_one.first_part(n, rng);
                renewal_step(*alpha, m, rng)
            }
            PartSampler::Hook { d } => {
                let nf = n as f64;
                if rng.random::<f64>() < 1.0 / (1.0 + nf * d) {
                    n
                } else {
                    1
                }
            }
            PartSampler::OneBlock => n,
        })
    }

    /// Runs the decreasing chain from n to 0 and returns its decrements.
    pub fn compose<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Composition> {
        let mut parts = Vec::new();
        let mut rest = n;
        while rest > 0 {
            let m = self.draw(rest, rng)?;
            parts.push(m);
            rest -= m;
        }
        Ok(Composition::from_parts_unchecked(parts))
    }
}

/// Parts drawn sequentially from q(n':·) along the chain.
pub fn sample_chain<S: Scalar, D: Decrements<S> + ?Sized, R: Rng + ?Sized>(
    q: &D,
    n: usize,
    rng: &mut R,
) -> Result<Composition> {
    if n > q.max_level() {
        return Err(Error::LevelOutOfRange { n, max: q.max_level() });
    }
    let mut parts = Vec::new();
    let mut rest = n;
    while rest > 0 {
        let row = q.row(rest)?;
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut pick = rest;
        for (i, v) in row.iter().enumerate() {
            acc += v.to_f64();
            if acc > u {
                pick = i + 1;
                break;
            }
        }
        parts.push(pick);
        rest -= pick;
    }
    Ok(Composition::from_parts_unchecked(parts))
}

/// Principal range: 0 <= α < 1 with θ > -α, or α < 0 with θ = k|α| for a positive integer k.
pub fn check_crp_params(alpha: f64, theta: f64) -> Result<()> {
    let ok = if alpha >= 0.0 {
        alpha < 1.0 && theta > -alpha
    } else {
        let k = theta / -alpha;
        k >= 1.0 && (k - k.round()).abs() < 1e-9
    };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "(alpha, theta) = ({alpha}, {theta}) outside the principal range"
        )))
    }
}

fn pick_weighted<R: Rng + ?Sized>(weights: impl Iterator<Item = f64>, total: f64, rng: &mut R) -> Option<usize> {
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    for (i, w) in weights.enumerate() {
        acc += w;
        if acc > u {
            return Some(i);
        }
    }
    None
}

/// Chinese restaurant process: customer i+1 joins table j w.p. (λ_j-α)/(i+θ),
/// a new table w.p. (θ+kα)/(i+θ).
pub fn sample_crp<R: Rng + ?Sized>(alpha: f64, theta: f64, n: usize, rng: &mut R) -> Result<Partition> {
    check_crp_params(alpha, theta)?;
    let mut tables: Vec<usize> = Vec::new();
    for i in 0..n {
        let k = tables.len() as f64;
        let total = i as f64 + theta;
        match pick_weighted(tables.iter().map(|&l| l as f64 - alpha), total, rng) {
            Some(j) => tables[j] += 1,
            None if (theta + k * alpha) > 0.0 || tables.is_empty() => tables.push(1),
            None => {
                let j = tables.len() - 1;
                tables[j] += 1;
            }
        }
    }
    Partition::new(tables)
}

/// Restaurant with θ = α whose tables stand in a row; a new table goes to one of the
/// k+1 slots uniformly.
pub fn sample_ordered_crp_alpha_alpha<R: Rng + ?Sized>(alpha: f64, n: usize, rng: &mut R) -> Result<Composition> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!("ordered restaurant needs 0 < alpha < 1, got {alpha}")));
    }
    let mut tables: Vec<usize> = Vec::new();
    for i in 0..n {
        let total = i as f64 + alpha;
        match pick_weighted(tables.iter().map(|&l| l as f64 - alpha), total, rng) {
            Some(j) => tables[j] += 1,
            None => {
                let slot = rng.random_range(0..=tables.len());
                tables.insert(slot, 1);
            }
        }
    }
    Ok(Composition::from_parts_unchecked(tables))
}
