//! `regcomp`: exact tables, samplers, invariant checks and Monte Carlo block counts.

mod output;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use regcomp::asympt::{
    expected_kn_beta_f64, expected_kn_dp, expected_knr_beta_f64, mc_blocks, BlockSampler, DEFAULT_R_MAX,
};
use regcomp::checks::{run_check, CheckConfig, Status, Suite};
use regcomp::combinat::{enumerate_partitions, Composition, Partition};
use regcomp::decrement::{cpf, cpf_table, green_closed, green_matrix_dp, ppf, Decrements};
use regcomp::family::{FamilySpec, GRAMMAR};
use regcomp::samplers::{
    bits_to_string, pw_arrangement, pw_initial_ranks, arrangement_from_ranks, sample_bernoulli_string_dual_ewens,
    sample_crp, sample_ordered_crp_alpha_alpha, sample_renewal_string_alpha, sample_stickbreaking, sample_stickbreaking_fast,
    RngStream,
};
use regcomp::{Error, Rational, Scalar};

use output::{Format, Table};

#[derive(Parser)]
#[command(name = "regcomp", version, about = "Regenerative composition structures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct OutputArgs {
    /// Comma-separated values
    #[arg(long, conflicts_with = "json")]
    csv: bool,
    /// JSON with the inputs echoed
    #[arg(long)]
    json: bool,
}

impl OutputArgs {
    fn format(&self) -> Format {
        if self.csv {
            Format::Csv
        } else if self.json {
            Format::Json
        } else {
            Format::Human
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Backend {
    Exact,
    Float,
}

#[derive(Args, Clone)]
struct FamilyArgs {
    /// Family spec, e.g. ewens:theta=1 or two-param:alpha=1/2,theta=0
    #[arg(long)]
    family: String,
    /// Rational arithmetic, or doubles; defaults to exact when every parameter is a fraction
    #[arg(long, value_enum)]
    backend: Option<Backend>,
}

impl FamilyArgs {
    fn resolve(&self) -> Result<(FamilySpec, Backend), CliError> {
        let spec = parse_family(&self.family)?;
        let backend = resolve_backend(&spec, self.backend)?;
        Ok((spec, backend))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SampleKind {
    Chain,
    StickBreaking,
    Paintbox,
    Crp,
    OrderedCrp,
    RenewalString,
    DualEwensString,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BlockSamplerKind {
    Chain,
    StickBreaking,
    Paintbox,
    Crp,
}

#[derive(Subcommand)]
enum Command {
    /// Composition probabilities p°(c) at level n
    Cpf {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        n: usize,
        /// A single composition such as 2,1
        #[arg(long)]
        composition: Option<String>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Partition probabilities p(λ) at level n
    Ppf {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        partition: Option<String>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Decrement matrix rows q(n:·), n = 1..N
    Qmatrix {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Green matrix g(n,j), n = 1..N
    Green {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        n: usize,
        /// Add the closed Green formula and its difference from the visit probabilities
        #[arg(long)]
        compare_closed: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Draw compositions, partitions or bit strings, one per line
    Sample {
        #[arg(long)]
        family: String,
        #[arg(long, value_enum, default_value = "chain")]
        kind: SampleKind,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print compositions as binary codes
        #[arg(long)]
        bits: bool,
    },
    /// Monte Carlo summaries of K_n, K_{n,r} and M_n
    Blocks {
        #[arg(long)]
        family: String,
        #[arg(long, value_enum, default_value = "chain")]
        sampler: BlockSamplerKind,
        /// One or more levels, comma-separated
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long, default_value_t = 1000)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_R_MAX)]
        r_max: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run invariant suites over families
    Check {
        /// A suite name or `all`
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 7)]
        n_max: usize,
        /// `all` or specs separated by ';'
        #[arg(long, default_value = "all")]
        families: String,
        #[arg(long, value_enum)]
        backend: Option<Backend>,
        /// Replicates per chi-square test in the sampling suite
        #[arg(long, default_value_t = 100_000)]
        reps: usize,
        #[arg(long, default_value_t = CheckConfig::default().seed)]
        seed: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Random arrangement of k boxes from the η-ranking scheme
    Arrange {
        #[arg(long)]
        eta: f64,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
}

enum CliError {
    Usage(String),
    Numeric(String),
    ChecksFailed,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) | Error::InvalidParameter(_) | Error::NotExact(_) => CliError::Usage(e.to_string()),
            other => CliError::Numeric(other.to_string()),
        }
    }
}

fn parse_family(s: &str) -> Result<FamilySpec, CliError> {
    s.parse().map_err(|e: Error| CliError::Usage(format!("bad family {s:?}: {e}\n{GRAMMAR}")))
}

fn resolve_backend(spec: &FamilySpec, asked: Option<Backend>) -> Result<Backend, CliError> {
    match asked {
        Some(Backend::Exact) if !spec.is_exact() => Err(CliError::Usage(format!(
            "{spec}: the exact backend needs fractional parameters (write 1/2, not 0.5)"
        ))),
        Some(b) => Ok(b),
        None if spec.is_exact() => Ok(Backend::Exact),
        None => Ok(Backend::Float),
    }
}

fn numeric(op: &str, spec: &FamilySpec, e: Error) -> CliError {
    match CliError::from(e) {
        CliError::Numeric(m) => CliError::Numeric(format!("{op} on {spec}: {m}")),
        other => other,
    }
}

fn emit(table: Table, format: Format) {
    print!("{}", table.render(format));
}

fn cmd_cpf<S: Scalar>(spec: &FamilySpec, n: usize, one: Option<Composition>, format: Format) -> Result<(), CliError> {
    let q = spec.matrix::<S>(n.max(1)).map_err(|e| numeric("cpf", spec, e))?;
    let mut t = Table::new(vec!["composition", "code", "p"]).meta("family", spec.to_string()).meta("backend", S::BACKEND).meta("n", n);
    match one {
        Some(c) => {
            let p = cpf(&q, &c).map_err(|e| numeric("cpf", spec, e))?;
            if format == Format::Human {
                println!("{}", p.format());
                return Ok(());
            }
            t.push(vec![c.to_string(), c.binary_encode(), p.format()]);
        }
        None => {
            for (c, p) in cpf_table(&q, n).map_err(|e| numeric("cpf", spec, e))?.iter() {
                t.push(vec![c.to_string(), c.binary_encode(), p.format()]);
            }
        }
    }
    emit(t, format);
    Ok(())
}

fn cmd_ppf<S: Scalar>(spec: &FamilySpec, n: usize, one: Option<Partition>, format: Format) -> Result<(), CliError> {
    let q = spec.matrix::<S>(n.max(1)).map_err(|e| numeric("ppf", spec, e))?;
    let mut t = Table::new(vec!["partition", "p"]).meta("family", spec.to_string()).meta("backend", S::BACKEND).meta("n", n);
    let shapes = match one {
        Some(p) => {
            let v = ppf(&q, &p).map_err(|e| numeric("ppf", spec, e))?;
            if format == Format::Human {
                println!("{}", v.format());
                return Ok(());
            }
            vec![p]
        }
        None => enumerate_partitions(n)?,
    };
    for p in shapes {
        let v = ppf(&q, &p).map_err(|e| numeric("ppf", spec, e))?;
        t.push(vec![p.to_string(), v.format()]);
    }
    emit(t, format);
    Ok(())
}

fn cmd_qmatrix<S: Scalar>(spec: &FamilySpec, n: usize, format: Format) -> Result<(), CliError> {
    let q = spec.matrix::<S>(n).map_err(|e| numeric("qmatrix", spec, e))?;
    if format == Format::Human {
        let mut t = Table::new(vec!["n", "q(n:1..n)"]);
        for (i, row) in q.rows().iter().enumerate() {
            let cells: Vec<String> = row.iter().map(Scalar::format).collect();
            t.push(vec![(i + 1).to_string(), cells.join(" ")]);
        }
        emit(t, format);
        return Ok(());
    }
    let mut t = Table::new(vec!["n", "m", "q"]).meta("family", spec.to_string()).meta("backend", S::BACKEND);
    for (i, row) in q.rows().iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            t.push(vec![(i + 1).to_string(), (j + 1).to_string(), v.format()]);
        }
    }
    emit(t, format);
    Ok(())
}

fn cmd_green<S: Scalar>(spec: &FamilySpec, n: usize, compare: bool, format: Format) -> Result<(), CliError> {
    let q = spec.matrix::<S>(n).map_err(|e| numeric("green", spec, e))?;
    let g = green_matrix_dp(&q, n).map_err(|e| numeric("green", spec, e))?;
    let headers = if compare { vec!["n", "j", "g", "closed", "diff"] } else { vec!["n", "j", "g"] };
    let mut t = Table::new(headers).meta("family", spec.to_string()).meta("backend", S::BACKEND);
    let phi = if compare {
        let model = spec.model().map_err(|e| numeric("green", spec, e))?;
        Some(model.phi_sequence::<S>(2 * n).map_err(|e| numeric("green --compare-closed", spec, e))?)
    } else {
        None
    };
    for level in 1..=n {
        let closed = match &phi {
            Some(phi) => Some(green_closed(phi, &q, level).map_err(|e| numeric("green --compare-closed", spec, e))?),
            None => None,
        };
        for j in 1..=level {
            let v = g.get(level, j);
            let mut row = vec![level.to_string(), j.to_string(), v.format()];
            if let Some(c) = &closed {
                let cv = c.closed[j - 1].clone();
                row.push(cv.format());
                row.push((cv - v).format());
            }
            t.push(row);
        }
    }
    emit(t, format);
    Ok(())
}

fn need_two_param(spec: &FamilySpec) -> Result<(f64, f64), CliError> {
    spec.two_param_params()
        .map(|(a, t)| (a.value(), t.value()))
        .ok_or_else(|| CliError::Usage(format!("{spec} is not a two-parameter family")))
}

fn need_stick(spec: &FamilySpec) -> Result<regcomp::samplers::StickFactor, CliError> {
    spec.stick_factor()?
        .ok_or_else(|| CliError::Usage(format!("{spec} has no stick-breaking factor")))
}

fn cmd_sample(spec: &FamilySpec, kind: SampleKind, n: usize, reps: usize, seed: u64, bits: bool) -> Result<(), CliError> {
    let show = |c: &Composition| if bits { c.binary_encode() } else { c.to_string() };
    let mut out = String::new();
    let chain = match kind {
        SampleKind::Chain => Some(spec.part_sampler(n)?),
        _ => None,
    };
    for i in 0..reps {
        let mut rng = RngStream::new(seed, i as u64);
        let line = match kind {
            SampleKind::Chain => show(&chain.as_ref().expect("built above").compose(n, &mut rng)?),
            SampleKind::StickBreaking => show(&sample_stickbreaking_fast(&need_stick(spec)?, n, &mut rng)?.composition),
            SampleKind::Paintbox => show(&sample_stickbreaking(&need_stick(spec)?, n, &mut rng)?.composition),
            SampleKind::Crp => {
                let (a, t) = need_two_param(spec)?;
                sample_crp(a, t, n, &mut rng)?.to_string()
            }
            SampleKind::OrderedCrp => {
                let (a, t) = need_two_param(spec)?;
                if a != t {
                    return Err(CliError::Usage("ordered-crp needs alpha = theta".into()));
                }
                show(&sample_ordered_crp_alpha_alpha(a, n, &mut rng)?)
            }
            SampleKind::RenewalString => {
                let (a, t) = need_two_param(spec)?;
                if t != 0.0 {
                    return Err(CliError::Usage("renewal-string needs theta = 0".into()));
                }
                bits_to_string(&sample_renewal_string_alpha(a, n, &mut rng)?)
            }
            SampleKind::DualEwensString => {
                let (a, t) = need_two_param(spec)?;
                if a != 0.0 {
                    return Err(CliError::Usage("dual-ewens-string needs an Ewens family".into()));
                }
                bits_to_string(&sample_bernoulli_string_dual_ewens(t, n, &mut rng)?)
            }
        };
        out.push_str(&line);
        out.push('\n');
    }
    print!("{out}");
    Ok(())
}

/// Exact E[K_n] and E[K_{n,r}] where they are cheap.
fn block_targets(spec: &FamilySpec, n: usize, r_max: usize) -> (Option<f64>, Vec<Option<f64>>) {
    if let Some((a, t)) = spec.two_param_params() {
        let (a, t) = (a.value(), t.value());
        if a + t == 0.0 {
            let rs = (1..=r_max).map(|r| Some(if r == n { 1.0 } else { 0.0 })).collect();
            return (Some(1.0), rs);
        }
        let (pa, pb) = (1.0 - a, t + a);
        let rs = (1..=r_max).map(|r| Some(expected_knr_beta_f64(pa, pb, n, r))).collect();
        return (Some(expected_kn_beta_f64(pa, pb, n)), rs);
    }
    let k = if n <= 3000 {
        match (spec.closed(), spec.model()) {
            (Some(c), _) => expected_kn_dp::<f64, _>(&c, n).ok(),
            (None, Ok(m)) => expected_kn_dp::<f64, _>(&m as &dyn Decrements<f64>, n).ok(),
            _ => None,
        }
    } else {
        None
    };
    (k, vec![None; r_max])
}

fn cmd_blocks(
    spec: &FamilySpec,
    kind: BlockSamplerKind,
    levels: &[usize],
    reps: usize,
    seed: u64,
    r_max: usize,
    format: Format,
) -> Result<(), CliError> {
    let max_n = levels.iter().copied().max().unwrap_or(1);
    let sampler = match kind {
        BlockSamplerKind::Chain => BlockSampler::Chain(spec.part_sampler(max_n)?),
        BlockSamplerKind::StickBreaking => BlockSampler::StickBreaking(need_stick(spec)?),
        BlockSamplerKind::Paintbox => BlockSampler::Paintbox(need_stick(spec)?),
        BlockSamplerKind::Crp => {
            let (alpha, theta) = need_two_param(spec)?;
            BlockSampler::Crp { alpha, theta }
        }
    };
    let mut t = Table::new(vec!["n", "stat", "estimate", "se", "lo95", "hi95", "target", "ratio"])
        .meta("family", spec.to_string())
        .meta("seed", seed)
        .meta("reps", reps)
        .meta("r_max", r_max);
    let f = regcomp::scalar::format_f64;
    for &n in levels {
        let s = mc_blocks(&sampler, n, reps, seed, r_max).map_err(|e| numeric("blocks", spec, e))?;
        let (k_target, r_targets) = block_targets(spec, n, r_max);
        for stat in &s.stats {
            let target = match stat.name.as_str() {
                "K" => k_target,
                name => name
                    .strip_prefix("K_")
                    .and_then(|r| r.parse::<usize>().ok())
                    .and_then(|r| r_targets.get(r - 1).copied().flatten()),
            };
            let (tgt, ratio) = match target {
                Some(v) => (f(v), if v != 0.0 { f(stat.mean / v) } else { String::new() }),
                None => (String::new(), String::new()),
            };
            t.push(vec![n.to_string(), stat.name.clone(), f(stat.mean), f(stat.se), f(stat.lo95), f(stat.hi95), tgt, ratio]);
        }
    }
    emit(t, format);
    Ok(())
}

fn cmd_check(
    suite: &str,
    n_max: usize,
    families: &str,
    backend: Option<Backend>,
    cfg: CheckConfig,
    format: Format,
) -> Result<(), CliError> {
    let suites: Vec<Suite> = if suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![suite.parse().map_err(|e: Error| {
            let names: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
            CliError::Usage(format!("{e}; suites: all, {}", names.join(", ")))
        })?]
    };
    let specs = FamilySpec::parse_list(families).map_err(|e| CliError::Usage(format!("{e}\n{GRAMMAR}")))?;
    let cfg = CheckConfig { n_max, ..cfg };
    let mut t = Table::new(vec!["suite", "family", "backend", "status", "checked", "detail"]).meta("n_max", n_max).meta("seed", cfg.seed);
    let mut failed = false;
    for spec in &specs {
        let b = resolve_backend(spec, backend)?;
        for &s in &suites {
            let out = match b {
                Backend::Exact => run_check::<Rational>(s, spec, &cfg),
                Backend::Float => run_check::<f64>(s, spec, &cfg),
            }
            .map_err(|e| numeric(s.name(), spec, e))?;
            failed |= out.status == Status::Fail;
            let detail = match out.failures.len() {
                0 => String::new(),
                1 => out.failures[0].clone(),
                k => format!("{} (+{} more)", out.failures[0], k - 1),
            };
            let bname = if s == Suite::Sampling { "float" } else { match b { Backend::Exact => "exact", Backend::Float => "float" } };
            t.push(vec![s.name().into(), spec.to_string(), bname.into(), out.status.to_string(), out.checked.to_string(), detail]);
        }
    }
    emit(t, format);
    if format == Format::Human {
        println!("{}", if failed { "FAIL" } else { "PASS" });
    }
    if failed {
        Err(CliError::ChecksFailed)
    } else {
        Ok(())
    }
}

fn cmd_arrange(eta: f64, k: usize, seed: u64, format: Format) -> Result<(), CliError> {
    let mut rng = RngStream::new(seed, 0);
    let ranks = pw_initial_ranks(eta, k, &mut rng)?;
    let arrangement = arrangement_from_ranks(&ranks)?;
    debug_assert_eq!(arrangement, pw_arrangement(eta, k, &mut RngStream::new(seed, 0))?);
    let join = |v: &[usize]| v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
    if format == Format::Human {
        println!("{}", join(&arrangement));
        return Ok(());
    }
    let mut t = Table::new(vec!["ranks", "arrangement"]).meta("eta", eta).meta("k", k).meta("seed", seed);
    t.push(vec![join(&ranks), join(&arrangement)]);
    emit(t, format);
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Cpf { family, n, composition, out } => {
            let (spec, b) = family.resolve()?;
            let c = composition.map(|s| s.parse::<Composition>()).transpose()?;
            if let Some(c) = &c {
                if c.n() != n {
                    return Err(CliError::Usage(format!("composition {c} has size {}, not {n}", c.n())));
                }
            }
            match b {
                Backend::Exact => cmd_cpf::<Rational>(&spec, n, c, out.format()),
                Backend::Float => cmd_cpf::<f64>(&spec, n, c, out.format()),
            }
        }
        Command::Ppf { family, n, partition, out } => {
            let (spec, b) = family.resolve()?;
            let p = partition.map(|s| s.parse::<Partition>()).transpose()?;
            if let Some(p) = &p {
                if p.n() != n {
                    return Err(CliError::Usage(format!("partition {p} has size {}, not {n}", p.n())));
                }
            }
            match b {
                Backend::Exact => cmd_ppf::<Rational>(&spec, n, p, out.format()),
                Backend::Float => cmd_ppf::<f64>(&spec, n, p, out.format()),
            }
        }
        Command::Qmatrix { family, n, out } => {
            let (spec, b) = family.resolve()?;
            match b {
                Backend::Exact => cmd_qmatrix::<Rational>(&spec, n, out.format()),
                Backend::Float => cmd_qmatrix::<f64>(&spec, n, out.format()),
            }
        }
        Command::Green { family, n, compare_closed, out } => {
            let (spec, b) = family.resolve()?;
            match b {
                Backend::Exact => cmd_green::<Rational>(&spec, n, compare_closed, out.format()),
                Backend::Float => cmd_green::<f64>(&spec, n, compare_closed, out.format()),
            }
        }
        Command::Sample { family, kind, n, reps, seed, bits } => {
            cmd_sample(&parse_family(&family)?, kind, n, reps, seed, bits)
        }
        Command::Blocks { family, sampler, n, reps, seed, r_max, out } => {
            cmd_blocks(&parse_family(&family)?, sampler, &n, reps, seed, r_max, out.format())
        }
        Command::Check { suite, n_max, families, backend, reps, seed, out } => {
            cmd_check(&suite, n_max, &families, backend, CheckConfig { n_max, reps, seed }, out.format())
        }
        Command::Arrange { eta, k, seed, out } => cmd_arrange(eta, k, seed, out.format()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::ChecksFailed) => ExitCode::from(1),
        Err(CliError::Numeric(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
