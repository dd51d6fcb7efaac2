//! Invariant suites run over named families, as used by `regcomp check`.

use std::fmt;
use std::str::FromStr;

use crate::asympt::{exp_functional_moments, expected_kn_dp_all, expected_kn_structural};
use crate::combinat::{
    enumerate_compositions, enumerate_partitions, reverse_pushforward, sb_reduce_pushforward, symmetrize, Composition,
    DistributionTable,
};
use crate::decrement::{
    alpha_alpha_cpf, alpha_zero_cpf, cpf, cpf_markovian_table, cpf_table, d_tau, deletion_kernel, esf_cpf, esf_ppf,
    gammageom_cpf, green_dp, markovian_from_meander, ppf, reversibility_check, two_param_ppf, DecrementMatrix,
    MarkovianPair, MeanderLaw,
};
use crate::error::{Error, Result};
use crate::family::FamilySpec;
use crate::levy::{
    check_completely_alternating, phi_from_moments, phi_iterated_differences, q32_from_moments, LevyModel,
    StructuralLaw,
};
use crate::samplers::{
    chi_square_gof, empirical_counts, qchain_partition_matrix, qchain_transition_matrix, sample_crp,
    sample_ordered_crp_alpha_alpha, sample_stickbreaking_fast, RngStream,
};
use crate::scalar::{Param, Scalar};

pub const FLOAT_TOL: f64 = 1e-10;
pub const SIGNIFICANCE: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    Consistency,
    Regeneration,
    Symmetrization,
    Kernel,
    Stationarity,
    Reversibility,
    MomentsRoundtrip,
    Markovian,
    Green,
    Sliced,
    Sampling,
}

impl Suite {
    pub const ALL: [Suite; 11] = [
        Suite::Consistency,
        Suite::Regeneration,
        Suite::Symmetrization,
        Suite::Kernel,
        Suite::Stationarity,
        Suite::Reversibility,
        Suite::MomentsRoundtrip,
        Suite::Markovian,
        Suite::Green,
        Suite::Sliced,
        Suite::Sampling,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Consistency => "consistency",
            Suite::Regeneration => "regeneration",
            Suite::Symmetrization => "symmetrization",
            Suite::Kernel => "kernel",
            Suite::Stationarity => "stationarity",
            Suite::Reversibility => "reversibility",
            Suite::MomentsRoundtrip => "moments-roundtrip",
            Suite::Markovian => "markovian",
            Suite::Green => "green",
            Suite::Sliced => "sliced",
            Suite::Sampling => "sampling",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown suite {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub suite: Suite,
    pub family: String,
    pub status: Status,
    pub checked: usize,
    pub failures: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct CheckConfig {
    pub n_max: usize,
    /// Replicates per chi-square test in the sampling suite.
    pub reps: usize,
    pub seed: u64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig { n_max: 7, reps: 100_000, seed: 20_240_601 }
    }
}

#[derive(Default)]
struct Tally {
    checked: usize,
    failures: Vec<String>,
}

impl Tally {
    fn expect(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn same<S: Scalar>(&mut self, a: &S, b: &S, what: impl FnOnce() -> String) {
        self.expect(a.close(b, FLOAT_TOL), || format!("{}: {} vs {}", what(), a.format(), b.format()));
    }

    fn finish(self, suite: Suite, family: &FamilySpec) -> CheckOutcome {
        let status = if !self.failures.is_empty() {
            Status::Fail
        } else if self.checked == 0 {
            Status::Skip
        } else {
            Status::Pass
        };
        CheckOutcome { suite, family: family.to_string(), status, checked: self.checked, failures: self.failures }
    }
}

fn one_minus<S: Scalar>(x: &S) -> S {
    S::one() - x.clone()
}

/// Runs one suite on one family; the sampling suite always uses doubles.
pub fn run_check<S: Scalar>(suite: Suite, family: &FamilySpec, cfg: &CheckConfig) -> Result<CheckOutcome> {
    let n_max = cfg.n_max;
    let mut t = Tally::default();
    if suite == Suite::Sampling {
        sampling(family, cfg, &mut t)?;
        return Ok(t.finish(suite, family));
    }
    let q: DecrementMatrix<S> = family.matrix(n_max.max(1))?;
    match suite {
        Suite::Consistency => consistency(&q, n_max, &mut t)?,
        Suite::Regeneration => regeneration(&q, n_max, &mut t)?,
        Suite::Symmetrization => symmetrization(family, &q, n_max, &mut t)?,
        Suite::Kernel => kernel(family, &q, n_max, &mut t)?,
        Suite::Stationarity => stationarity(&q, n_max, &mut t)?,
        Suite::Reversibility => reversibility(family, &q, n_max, &mut t)?,
        Suite::MomentsRoundtrip => moments_roundtrip(family, &q, n_max, &mut t)?,
        Suite::Markovian => markovian(family, &q, n_max, &mut t)?,
        Suite::Green => green(family, &q, n_max, &mut t)?,
        Suite::Sliced => sliced::<S>(family, n_max, &mut t)?,
        Suite::Sampling => unreachable!(),
    }
    Ok(t.finish(suite, family))
}

fn consistency<S: Scalar>(q: &DecrementMatrix<S>, n_max: usize, t: &mut Tally) -> Result<()> {
    let mut prev: Option<DistributionTable<Composition, S>> = None;
    for n in 1..=n_max {
        let comps = enumerate_compositions(n)?;
        t.expect(comps.len() == 1 << (n - 1), || format!("n={n}: {} compositions", comps.len()));
        let table = cpf_table(q, n)?;
        t.same(&table.total(), &S::one(), || format!("n={n}: CPF mass"));
        let sym = symmetrize(&table);
        t.same(&sym.total(), &S::one(), || format!("n={n}: PPF mass"));
        if let Some(prev) = &prev {
            let reduced = sb_reduce_pushforward(&table)?;
            t.expect(reduced.same_law(prev, FLOAT_TOL), || {
                format!("n={n}: reduced CPF differs by {:e}", reduced.max_abs_diff(prev))
            });
            let reduced = sb_reduce_pushforward(&sym)?;
            let prev_sym = symmetrize(prev);
            t.expect(reduced.same_law(&prev_sym, FLOAT_TOL), || format!("n={n}: reduced PPF differs"));
        }
        prev = Some(table);
    }
    Ok(())
}

fn regeneration<S: Scalar>(q: &DecrementMatrix<S>, n_max: usize, t: &mut Tally) -> Result<()> {
    for n in 2..=n_max {
        let table = cpf_table(q, n)?;
        for m in 1..n {
            let qm = q.get(n, m);
            if qm.is_zero() {
                continue;
            }
            let tails = table
                .iter()
                .filter(|(c, _)| c.parts()[0] == m)
                .map(|(c, p)| Ok((Composition::new(c.parts()[1..].to_vec())?, p.clone() / qm.clone())))
                .collect::<Result<Vec<_>>>()?;
            let cond = DistributionTable::new(n - m, tails)?;
            let target = cpf_table(q, n - m)?;
            t.expect(cond.same_law(&target, FLOAT_TOL), || {
                format!("n={n}, m={m}: tail law differs by {:e}", cond.max_abs_diff(&target))
            });
        }
    }
    Ok(())
}

fn symmetrization<S: Scalar>(family: &FamilySpec, q: &DecrementMatrix<S>, n_max: usize, t: &mut Tally) -> Result<()> {
    let exact_model = !S::EXACT || family.is_exact();
    if let (Some(_), true, Ok(model)) = (family.closed(), exact_model, family.model()) {
        let levy = DecrementMatrix::<S>::from_levy(&model, n_max)?;
        for n in 1..=n_max {
            for m in 1..=n {
                t.same(&levy.get(n, m), &q.get(n, m), || format!("closed vs Lévy q({n}:{m})"));
            }
        }
    }
    let Some((ap, tp)) = family.two_param_params() else {
        if let FamilySpec::GammaHarmonic { theta } = family {
            let th: S = S::from_param(theta)?;
            for n in 1..=n_max {
                for c in enumerate_compositions(n)? {
                    t.same(&cpf(q, &c)?, &gammageom_cpf(&th, &c), || format!("gamma-harmonic CPF at {c}"));
                }
            }
        }
        return Ok(());
    };
    let (a, th): (S, S) = (S::from_param(&ap)?, S::from_param(&tp)?);
    if (a.clone() + th.clone()).is_zero() {
        return Ok(());
    }
    for n in 1..=n_max {
        let table = cpf_table(q, n)?;
        let sym = symmetrize(&table);
        for p in enumerate_partitions(n)? {
            t.same(&sym.get(&p), &two_param_ppf(&a, &th, &p), || format!("PPF at {p}"));
        }
        for (c, pc) in table.iter() {
            if a.is_zero() {
                t.same(pc, &esf_cpf(&th, c), || format!("Ewens CPF at {c}"));
                let lambda = c.to_partition();
                let mut arrange = S::from_biguint(&lambda.multiplicities().values().map(|&k| crate::scalar::factorial(k)).product());
                for (&part, tail) in c.parts().iter().zip(c.tail_sums()) {
                    arrange = arrange * S::from_usize(part) / S::from_usize(tail);
                }
                t.same(pc, &(esf_ppf(&th, &lambda) * arrange), || format!("size-biased order at {c}"));
            } else if th.is_zero() {
                t.same(pc, &alpha_zero_cpf(&a, c), || format!("(α,0) CPF at {c}"));
            }
            if a == th {
                t.same(pc, &alpha_alpha_cpf(&a, c), || format!("(α,α) CPF at {c}"));
                for other in c.to_partition().arrangements() {
                    t.same(pc, &table.get(&other), || format!("(α,α) exchangeability {c} vs {other}"));
                }
            }
        }
    }
    Ok(())
}

fn kernel<S: Scalar>(family: &FamilySpec, q: &DecrementMatrix<S>, n_max: usize, t: &mut Tally) -> Result<()> {
    let tau = match family.two_param_params() {
        Some((a, th)) => {
            let (a, th): (S, S) = (S::from_param(&a)?, S::from_param(&th)?);
            let s = a.clone() + th;
            (!s.is_zero()).then(|| a / s)
        }
        None => None,
    };
    for n in 1..=n_max {
        let mut marginal = vec![S::zero(); n];
        for shape in enumerate_partitions(n)? {
            let p = ppf(q, &shape)?;
            if p.is_zero() {
                continue;
            }
            let d = deletion_kernel(q, &shape)?;
            t.same(&d.total(), &S::one(), || format!("kernel mass at {shape}"));
            for m in shape.distinct_parts() {
                marginal[m - 1] = marginal[m - 1].clone() + d.get(m) * p.clone();
                if let Some(tau) = &tau {
                    t.same(&d.get(m), &d_tau(&shape, m, tau), || format!("d({shape},{m}) vs d_τ"));
                }
            }
        }
        for m in 1..=n {
            t.same(&marginal[m - 1], &q.get(n, m), || format!("Σ d p = q({n}:{m})"));
        }
    }
    Ok(())
}

fn stationarity<S: Scalar>(q: &DecrementMatrix<S>, n_max: usize, t: &mut Tally) -> Result<()> {
    for n in 1..=n_max {
        let row = &q.rows()[n - 1];
        let law = cpf_table(q, n)?;
        let tm = qchain_transition_matrix(row, n)?;
        for s in tm.row_sums() {
            t.same(&s, &S::one(), || format!("n={n}: transition row sum"));
        }
        let next = tm.apply(&law)?;
        t.expect(next.same_law(&law, FLOAT_TOL), || format!("n={n}: composition law moved by {:e}", next.max_abs_diff(&law)));
        let plaw = symmetrize(&law);
        let pm = qchain_partition_matrix(row, n)?;
        let next = pm.apply(&plaw)?;
        t.expect(next.same_law(&plaw, FLOAT_TOL), || format!("n={n}: partition law moved by {:e}", next.max_abs_diff(&plaw)));
    }
    Ok(())
}

fn reversibility<S: Scalar>(family: &FamilySpec, q: &DecrementMatrix<S>, n_max: usize, t: &mut Tally) -> Result<()> {
    let verdict = reversibility_check(q, n_max)?;
    let mut brute_witness = None;
    for n in 1..=n_max {
        let law = cpf_table(q, n)?;
        if !reverse_pushforward(&law).same_law(&law, FLOAT_TOL) {
            brute_witness = Some(n);
            break;
        }
    }
    t.expect(verdict.reversible == brute_witness.is_none(), || {
        format!("verdict {:?} (witness {:?}) but direct reversal fails at {:?}", verdict.reversible, verdict.witness, brute_witness)
    });
    if let Some((a, th)) = family.two_param_params() {
        if a == th && !a.is_zero() {
            t.expect(verdict.reversible, || "(α,α) family judged not reversible".into());
        }
    }
    Ok(())
}

fn moments_roundtrip<S: Scalar>(family: &FamilySpec, q: &DecrementMatrix<S>, n_max: usize, t: &mut Tally) -> Result<()> {
    let p: Vec<S> = (1..=n_max).map(|n| q.get(n, n)).collect();
    let phi = phi_from_moments(&StructuralLaw::from_moments(p.clone())?, n_max)?;
    let alt = check_completely_alternating(&phi);
    t.expect(alt.ok, || format!("recovered Φ not completely alternating: {:?}", alt.violation.map(|v| (v.0, v.1))));
    for n in 1..=n_max {
        for m in 1..=n {
            let rebuilt = phi_iterated_differences(&phi, n, m) / phi[n].clone();
            t.same(&rebuilt, &q.get(n, m), || format!("q({n}:{m}) from one-block moments"));
        }
    }
    let last = DecrementMatrix::from_last_row(q.rows()[n_max - 1].clone())?;
    for n in 1..=n_max {
        for m in 1..=n {
            t.same(&last.get(n, m), &q.get(n, m), || format!("q({n}:{m}) from row {n_max}"));
        }
    }
    if n_max >= 3 && !p[1].close(&S::one(), FLOAT_TOL) {
        t.same(&q32_from_moments(&p[1], &p[2])?, &q.get(3, 2), || "q(3:2) from p(2), p(3)".into());
    }
    if S::EXACT && !family.is_exact() {
        return Ok(());
    }
    if let FamilySpec::AlphaRenewal { .. } = family {
        return Ok(());
    }
    let model = family.model()?;
    for n in 1..=n_max {
        let parts = (1..=n).map(|m| model.binomial_moment_normalized::<S>(n, m)).collect::<Result<Vec<S>>>()?;
        let phi_n: S = model.phi_normalized(n)?;
        t.same(&S::sum_all(parts), &phi_n, || format!("Σ_m Φ({n}:m) = Φ({n})"));
    }
    Ok(())
}

fn markovian<S: Scalar>(family: &FamilySpec, q: &DecrementMatrix<S>, n_max: usize, t: &mut Tally) -> Result<()> {
    let check_mass = |mp: &MarkovianPair<S>, label: &str, t: &mut Tally| -> Result<()> {
        for n in 1..=n_max {
            let total = cpf_markovian_table(mp, n)?.total();
            t.same(&total, &S::one(), || format!("{label}: mass at n={n}"));
        }
        Ok(())
    };
    let same_rows = MarkovianPair::new(q.rows().to_vec(), q.clone())?;
    for n in 1..=n_max {
        let law = cpf_markovian_table(&same_rows, n)?;
        let rev = reverse_pushforward(&cpf_table(q, n)?);
        t.expect(law.same_law(&rev, FLOAT_TOL), || format!("q⁰ = q is not the reversed law at n={n}"));
    }
    let one = markovian_from_meander(q, &MeanderLaw::One)?;
    t.expect(one.boundary_rows() == q.rows(), || "V ≡ 1 does not give q⁰ = q".into());
    let zero = markovian_from_meander(q, &MeanderLaw::Zero)?;
    for n in 1..=n_max {
        t.same(&zero.boundary(n, n), &S::one(), || format!("V ≡ 0: q⁰({n}:{n})"));
    }
    let uniform = markovian_from_meander(q, &MeanderLaw::Beta { a: S::one(), b: S::one() })?;
    check_mass(&uniform, "V uniform", t)?;
    if let Some((ap, tp)) = family.two_param_params() {
        let (a, th): (S, S) = (S::from_param(&ap)?, S::from_param(&tp)?);
        if th.is_positive() {
            let v = MeanderLaw::Beta { a: th.clone(), b: one_minus(&a) };
            let mp = markovian_from_meander(q, &v)?;
            check_mass(&mp, "bridge", t)?;
            let shifted = th.clone() - a.clone();
            for n in 1..=n_max {
                let sym = symmetrize(&cpf_markovian_table(&mp, n)?);
                for p in enumerate_partitions(n)? {
                    t.same(&sym.get(&p), &two_param_ppf(&a, &shifted, &p), || format!("bridge PPF at {p}"));
                }
            }
        }
    }
    Ok(())
}

fn green<S: Scalar>(family: &FamilySpec, q: &DecrementMatrix<S>, n_max: usize, t: &mut Tally) -> Result<()> {
    let e = expected_kn_dp_all(q, n_max)?;
    let law: Option<StructuralLaw<S>> = family.structural_law().transpose()?;
    for n in 1..=n_max {
        let g = green_dp(q, n)?;
        t.same(&g[0], &S::one(), || format!("g({n},1)"));
        t.same(&S::sum_all(g), &e[n], || format!("Σ_j g({n},j) = E K_{n}"));
        if let Some(law) = &law {
            t.same(&expected_kn_structural(law, n)?, &e[n], || format!("structural E K_{n}"));
        }
    }
    if let Some((a, th)) = family.two_param_params() {
        if a.value() > 0.0 {
            let model = LevyModel::two_param(a.clone(), th)?;
            let m1 = exp_functional_moments(&model, a.value(), 1)?;
            let m2 = exp_functional_moments(&model, a.value(), 2)?;
            t.expect(m2 >= m1 * m1, || format!("E I² = {m2} < (E I)² = {}", m1 * m1));
        }
    }
    Ok(())
}

fn sliced<S: Scalar>(family: &FamilySpec, n_max: usize, t: &mut Tally) -> Result<()> {
    if S::EXACT && !family.is_exact() {
        return Err(Error::NotExact(format!("{family} has decimal parameters")));
    }
    if let Some((a, th)) = family.two_param_params() {
        let target = LevyModel::two_param(a.clone(), th.clone())?;
        let sliced = LevyModel::two_param(a, Param::int(0))?.sliced_transform(th)?;
        compare_phi::<S>(&sliced, &target, n_max, "sliced (α,0)", t)?;
    }
    if let FamilySpec::AlphaRenewal { .. } = family {
        return Ok(());
    }
    let base = family.model()?;
    compare_phi::<S>(&base.clone().sliced_transform(Param::int(0))?, &base, n_max, "θ = 0 slice", t)?;
    compare_phi::<S>(&base.clone().kill_deform(Param::int(0))?, &base, n_max, "β = 0 kill", t)?;
    Ok(())
}

fn compare_phi<S: Scalar>(a: &LevyModel, b: &LevyModel, n_max: usize, label: &str, t: &mut Tally) -> Result<()> {
    for n in 1..=n_max {
        let (x, y): (S, S) = match (a.phi_normalized(n), b.phi_normalized(n)) {
            (Ok(x), Ok(y)) => (x, y),
            (Err(Error::NotExact(_)), _) | (_, Err(Error::NotExact(_))) => {
                let (x, y): (f64, f64) = (a.phi_normalized(n)?, b.phi_normalized(n)?);
                t.expect((x - y).abs() <= 1e-12 * x.abs().max(1.0), || format!("{label}: Φ({n}) {x} vs {y}"));
                continue;
            }
            (Err(e), _) | (_, Err(e)) => return Err(e),
        };
        t.same(&x, &y, || format!("{label}: Φ({n})"));
    }
    Ok(())
}

fn gof<K: crate::combinat::Shape>(
    label: String,
    counts: std::collections::BTreeMap<K, u64>,
    table: &DistributionTable<K, f64>,
    t: &mut Tally,
) -> Result<()> {
    let r = chi_square_gof(&counts, table)?;
    t.expect(r.passes(SIGNIFICANCE), || format!("{label}: χ² = {:.2}, df = {}, p = {:.2e}", r.statistic, r.df, r.p_value));
    Ok(())
}

fn sampling(family: &FamilySpec, cfg: &CheckConfig, t: &mut Tally) -> Result<()> {
    let n_top = cfg.n_max.min(5);
    let q: DecrementMatrix<f64> = family.matrix(n_top)?;
    let chain = family.part_sampler(n_top)?;
    let stick = family.stick_factor()?;
    let mut stream = 0u64;
    let mut next_rng = || {
        stream += 1;
        RngStream::new(cfg.seed, stream)
    };
    for n in 1..=n_top {
        let table = cpf_table(&q, n)?;
        let mut rng = next_rng();
        let draws = (0..cfg.reps).map(|_| chain.compose(n, &mut rng)).collect::<Result<Vec<_>>>()?;
        gof(format!("chain n={n}"), empirical_counts(draws), &table, t)?;
        if let Some(w) = &stick {
            let mut rng = next_rng();
            let draws = (0..cfg.reps)
                .map(|_| sample_stickbreaking_fast(w, n, &mut rng).map(|d| d.composition))
                .collect::<Result<Vec<_>>>()?;
            gof(format!("stick-breaking n={n}"), empirical_counts(draws), &table, t)?;
        }
        if let Some((a, th)) = family.two_param_params() {
            let (a, th) = (a.value(), th.value());
            if a + th > 0.0 {
                let mut rng = next_rng();
                let draws = (0..cfg.reps).map(|_| sample_crp(a, th, n, &mut rng)).collect::<Result<Vec<_>>>()?;
                gof(format!("crp n={n}"), empirical_counts(draws), &symmetrize(&table), t)?;
            }
            if a == th && a > 0.0 {
                let mut rng = next_rng();
                let draws = (0..cfg.reps)
                    .map(|_| sample_ordered_crp_alpha_alpha(a, n, &mut rng))
                    .collect::<Result<Vec<_>>>()?;
                gof(format!("ordered crp n={n}"), empirical_counts(draws), &table, t)?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn exact_suites_pass_on_defaults() {
        let cfg = CheckConfig { n_max: 5, ..Default::default() };
        for f in FamilySpec::defaults() {
            for s in Suite::ALL {
                if s == Suite::Sampling {
                    continue;
                }
                let out = run_check::<Rational>(s, &f, &cfg).unwrap();
                assert_ne!(out.status, Status::Fail, "{s} on {f}: {:?}", out.failures);
            }
        }
    }

    #[test]
    fn float_backend_and_sampling() {
        let cfg = CheckConfig { n_max: 4, reps: 20_000, seed: 5 };
        let f: FamilySpec = "two-param:alpha=0.5,theta=0.5".parse().unwrap();
        for s in Suite::ALL {
            let out = run_check::<f64>(s, &f, &cfg).unwrap();
            assert_eq!(out.status, Status::Pass, "{s}: {:?}", out.failures);
        }
    }

    #[test]
    fn reversibility_flags_ewens() {
        let cfg = CheckConfig { n_max: 6, ..Default::default() };
        let f = FamilySpec::ewens(Param::int(1));
        let out = run_check::<Rational>(Suite::Reversibility, &f, &cfg).unwrap();
        assert_eq!(out.status, Status::Pass);
    }

    #[test]
    fn tampered_matrix_fails_consistency() {
        let q = DecrementMatrix::<Rational>::new_unchecked(vec![
            vec![Rational::from_int(1)],
            vec![Rational::from_ratio(1, 2), Rational::from_ratio(1, 2)],
            vec![Rational::from_int(1), Rational::from_int(0), Rational::from_int(0)],
        ])
        .unwrap();
        let mut t = Tally::default();
        consistency(&q, 3, &mut t).unwrap();
        assert!(!t.failures.is_empty());
    }
}
