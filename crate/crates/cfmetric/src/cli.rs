//! Command-line interface: argument parsing, dispatch and exit codes.
//!
//! Exit codes: `0` success, `1` I/O failure, `2` invalid input, `3` a
//! computation ran out of budget, failed to converge, or produced an
//! ordering violation.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt;
use std::io::{self, Write};
use std::path::PathBuf;

use cfmetric_core::cantor::{self, MassMode, ScheduleMode};
use cfmetric_core::cf;
use cfmetric_core::mc::{self, EventFamily, EventTag, SampleStream};
use cfmetric_core::measure::{self, CertifiedMeasure, HVariant};
use cfmetric_core::phi::PhiFamily;
use cfmetric_core::pressure::{self, DimensionEstimate, Functional, PotentialSpec};
use cfmetric_core::{Error, Executor};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::artifact::{num, text, write_atomic, Artifact, Format};
use crate::{config, parse, RayonExecutor};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "cfmetric", version, about = "Metric continued-fraction experiments")]
pub struct Cli {
    /// key=value file supplying defaults for flags.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    pub format: Format,
    /// Write the artifact here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Worker thread cap (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Continued fraction of a rational.
    Expand {
        /// "p/q" or a finite decimal.
        #[arg(long)]
        x: String,
    },
    /// Cylinder interval of a word of partial quotients.
    Cylinder {
        /// Quotients separated by spaces or commas.
        #[arg(long, allow_hyphen_values = true)]
        word: String,
    },
    /// Measure of a product-of-quotients constraint set.
    Measure(MeasureArgs),
    /// Dimension number for one base, functional and alphabet.
    Dimension(DimensionArgs),
    /// The four dimension numbers over a grid of bases.
    Profile(ProfileArgs),
    /// Cantor construction audit: schedule, masses, Hölder exponents.
    Cantor(CantorArgs),
    /// Monte Carlo hit fraction of a limsup event.
    #[command(name = "zero-one")]
    ZeroOne(ZeroOneArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum MeasureKind {
    Product,
    Jk,
    JkTilde,
    H,
    HTilde,
}

#[derive(Args, Debug)]
pub struct MeasureArgs {
    #[arg(long, value_enum)]
    pub kind: MeasureKind,
    #[arg(long, default_value = "")]
    pub prefix: String,
    /// Only used by `jk` and `jk-tilde`.
    #[arg(long, default_value = "")]
    pub suffix: String,
    /// Threshold as "p/q" or a decimal.
    #[arg(long)]
    pub l: String,
    #[arg(long, default_value_t = measure::DEFAULT_TOL)]
    pub tol: f64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum DimMethod {
    Operator,
    Enumeration,
}

#[derive(Args, Debug)]
pub struct DimensionArgs {
    #[arg(long = "B")]
    pub b: f64,
    #[arg(long, value_parser = parse_functional)]
    pub g: Functional,
    #[arg(long = "M", default_value_t = 32)]
    pub m: u64,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_enum, default_value = "operator")]
    pub method: DimMethod,
    /// Word length for the enumeration method.
    #[arg(long)]
    pub n: Option<usize>,
    /// Double M from 2 until successive values differ by less than --tol-m.
    #[arg(long, conflicts_with_all = ["n", "method"])]
    pub extrapolate: bool,
    #[arg(long = "tol-m", default_value_t = 1e-4)]
    pub tol_m: f64,
}

#[derive(Args, Debug)]
pub struct ProfileArgs {
    /// Comma-separated bases.
    #[arg(long = "B-grid", default_value = "1.5,2,4,16")]
    pub b_grid: String,
    #[arg(long = "M", default_value_t = 64)]
    pub m: u64,
    #[arg(long, default_value_t = pressure::DEFAULT_OPERATOR_TOL)]
    pub tol: f64,
    /// Emit the M-doubling trace for a single base instead.
    #[arg(long)]
    pub escalate: bool,
    #[arg(long = "tol-m", default_value_t = 1e-4)]
    pub tol_m: f64,
}

#[derive(Args, Debug)]
pub struct CantorArgs {
    #[arg(long = "L")]
    pub l: usize,
    #[arg(long = "M")]
    pub m: u64,
    #[arg(long = "B")]
    pub b: f64,
    /// `paper` or `scaled:c`.
    #[arg(long, default_value = "paper", value_parser = parse_schedule_mode)]
    pub mode: ScheduleMode,
    /// Audit depth; defaults to 20 past the first peak.
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "normalized", value_parser = parse_mass_mode)]
    pub mass: MassMode,
}

#[derive(Args, Debug)]
pub struct ZeroOneArgs {
    #[arg(long, value_parser = parse_event)]
    pub family: EventTag,
    /// `n^a`, `n*log(n+1)^c` or `b^n`.
    #[arg(long, value_parser = parse_phi)]
    pub phi: PhiFamily,
    /// Inclusive index window `start:end`.
    #[arg(long, default_value = "100:10000", value_parser = parse_window)]
    pub window: std::ops::RangeInclusive<usize>,
    #[arg(long, default_value_t = 2000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Sample precision; chosen from the window when omitted.
    #[arg(long)]
    pub bits: Option<u32>,
    /// Estimate the measure of the single-index F2 event at n instead.
    #[arg(long)]
    pub an: Option<usize>,
}

fn parse_functional(s: &str) -> Result<Functional, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_event(s: &str) -> Result<EventTag, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_phi(s: &str) -> Result<PhiFamily, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_window(s: &str) -> Result<std::ops::RangeInclusive<usize>, String> {
    parse::window(s)
}

fn parse_schedule_mode(s: &str) -> Result<ScheduleMode, String> {
    match s.trim() {
        "paper" => Ok(ScheduleMode::Paper),
        other => other
            .strip_prefix("scaled:")
            .and_then(|c| c.parse::<u64>().ok())
            .filter(|&c| c > 0)
            .map(ScheduleMode::Scaled)
            .ok_or_else(|| format!("mode {s:?} must be `paper` or `scaled:c` with c >= 1")),
    }
}

fn parse_mass_mode(s: &str) -> Result<MassMode, String> {
    match s.trim() {
        "normalized" => Ok(MassMode::Normalized),
        "nominal" => Ok(MassMode::Nominal),
        _ => Err(format!("mass mode {s:?} must be `normalized` or `nominal`")),
    }
}

/// Failure of a command, mapped to an exit code.
#[derive(Debug)]
pub enum CliError {
    Invalid(String),
    Compute(Error),
    Io(io::Error),
    /// The artifact was written but a required property failed.
    Violated(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => EXIT_INVALID,
            CliError::Compute(e) if e.is_budget() => EXIT_BUDGET,
            CliError::Compute(_) => EXIT_INVALID,
            CliError::Io(_) => EXIT_IO,
            CliError::Violated(_) => EXIT_BUDGET,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Invalid(m) => write!(f, "invalid input: {m}"),
            CliError::Compute(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
            CliError::Violated(m) => write!(f, "{m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Compute(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

type CliResult<T> = Result<T, CliError>;

/// What a command produced.
enum Output {
    /// A single plain-text line.
    Bare(String),
    Table(Artifact),
}

/// Parses `args` (including the program name), runs the command, and
/// returns the process exit code. Diagnostics go to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    if let Some(path) = config::config_path(&args) {
        let entries = std::fs::read_to_string(&path)
            .map_err(|e| format!("cannot read config {}: {e}", PathBuf::from(&path).display()))
            .and_then(|t| config::parse(&t));
        match entries {
            Ok(entries) => args = config::merge(args, &entries),
            Err(msg) => {
                eprintln!("error: {msg}");
                return EXIT_INVALID;
            }
        }
    }
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Runs a parsed command line.
pub fn execute(cli: &Cli) -> CliResult<()> {
    let exec = RayonExecutor::new(cli.threads).map_err(|e| CliError::Invalid(format!("thread pool: {e}")))?;
    let (output, violation) = match &cli.command {
        Command::Expand { x } => (expand(x)?, None),
        Command::Cylinder { word } => (cylinder(word)?, None),
        Command::Measure(a) => (measure_cmd(a)?, None),
        Command::Dimension(a) => (dimension_cmd(&exec, a)?, None),
        Command::Profile(a) => profile_cmd(&exec, a)?,
        Command::Cantor(a) => (cantor_cmd(&exec, a)?, None),
        Command::ZeroOne(a) => (zero_one_cmd(&exec, a)?, None),
    };
    let bytes = match output {
        Output::Bare(line) => {
            let mut b = line.into_bytes();
            b.push(b'\n');
            b
        }
        Output::Table(a) => a.render(cli.format)?,
    };
    match &cli.out {
        Some(path) => write_atomic(path, &bytes)?,
        None => {
            let mut out = io::stdout().lock();
            out.write_all(&bytes)?;
            out.flush()?;
        }
    }
    match violation {
        Some(msg) => Err(CliError::Violated(msg)),
        None => Ok(()),
    }
}

/// Starts an artifact whose header records the tool, version, command and
/// the parameters in sorted order.
fn artifact(command: &str, params: BTreeMap<&str, String>, columns: &[&str]) -> Artifact {
    let mut a = Artifact::new(columns);
    a.meta("tool", "cfmetric").meta("version", env!("CARGO_PKG_VERSION")).meta("command", command);
    for (k, v) in params {
        a.meta(k, v);
    }
    a
}

/// Shortest round-trip form, with an exponent for small and large values.
fn float(x: f64) -> String {
    format!("{x:?}")
}

fn expand(x: &str) -> CliResult<Output> {
    let x = parse::rational(x).map_err(CliError::Invalid)?;
    Ok(Output::Bare(cf::cf_expand(&x)?.to_string()))
}

fn cylinder(word: &str) -> CliResult<Output> {
    let w = parse::word(word).map_err(CliError::Invalid)?;
    Ok(Output::Bare(cf::cylinder(&w).to_string()))
}

fn measure_row(a: &mut Artifact, kind: &str, m: &CertifiedMeasure) {
    let method = if m.exact { "exact" } else { "certified" };
    a.row(vec![
        text(kind),
        num(m.lower_f64()),
        num(m.upper_f64()),
        num(m.relative_width()),
        text(parse::show_rational(&m.lower)),
        text(parse::show_rational(&m.upper)),
        text(method),
    ]);
}

fn measure_cmd(args: &MeasureArgs) -> CliResult<Output> {
    let prefix = parse::word(&args.prefix).map_err(CliError::Invalid)?;
    let suffix = parse::word(&args.suffix).map_err(CliError::Invalid)?;
    let l = parse::rational(&args.l).map_err(CliError::Invalid)?;
    if !(args.tol > 0.0 && args.tol < 1.0) {
        return Err(CliError::Invalid(format!("--tol {} must lie in (0, 1)", args.tol)));
    }
    let kind = args.kind.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
    let m = match args.kind {
        MeasureKind::Product => CertifiedMeasure::exact(measure::product_tail_measure(&prefix, &l)?),
        MeasureKind::Jk => measure::jk_measure(&prefix, &suffix, &l, args.tol)?,
        MeasureKind::JkTilde => measure::jk_tilde_measure(&prefix, &suffix, &l)?,
        MeasureKind::H => measure::hn_measures(&prefix, &l, args.tol, HVariant::H)?,
        MeasureKind::HTilde => measure::hn_measures(&prefix, &l, args.tol, HVariant::HTilde)?,
    };
    let mut params = BTreeMap::new();
    params.insert("kind", kind.clone());
    params.insert("l", parse::show_rational(&l));
    params.insert("prefix", prefix.to_string());
    params.insert("suffix", suffix.to_string());
    params.insert("tol", float(args.tol));
    let mut a = artifact(
        "measure",
        params,
        &["kind", "lower", "upper", "relative_width", "lower_exact", "upper_exact", "method"],
    );
    measure_row(&mut a, &kind, &m);
    Ok(Output::Table(a))
}

const DIMENSION_COLUMNS: [&str; 8] = ["B", "g", "M", "n_or_nodes", "value", "lo", "hi", "method"];

fn dimension_row(a: &mut Artifact, d: &DimensionEstimate) {
    a.row(vec![
        num(d.b),
        text(d.g),
        json!(d.m),
        json!(d.n_or_nodes),
        num(d.value),
        num(d.lo),
        num(d.hi),
        text(d.method),
    ]);
}

fn dimension_cmd(exec: &RayonExecutor, args: &DimensionArgs) -> CliResult<Output> {
    let mut params = BTreeMap::new();
    params.insert("B", float(args.b));
    params.insert("g", args.g.to_string());
    if args.extrapolate {
        let tol = args.tol.unwrap_or(pressure::DEFAULT_OPERATOR_TOL);
        let _ = PotentialSpec::new(args.b, args.g, 1)?;
        params.insert("tol", float(tol));
        params.insert("tol_m", float(args.tol_m));
        params.insert("extrapolate", "true".into());
        let ex = pressure::dimension_extrapolate(exec, args.b, args.g, args.tol_m, tol)?;
        let mut a = artifact("dimension", params, &DIMENSION_COLUMNS);
        for d in &ex.trace {
            dimension_row(&mut a, d);
        }
        return Ok(Output::Table(a));
    }
    let spec = PotentialSpec::new(args.b, args.g, args.m)?;
    params.insert("M", args.m.to_string());
    params.insert("method", format!("{:?}", args.method).to_lowercase());
    let d = match args.method {
        DimMethod::Operator => {
            if args.n.is_some() {
                return Err(CliError::Invalid("--n only applies to --method enumeration".into()));
            }
            let tol = args.tol.unwrap_or(pressure::DEFAULT_OPERATOR_TOL);
            params.insert("tol", float(tol));
            pressure::dimension_with(exec, &spec, tol)?
        }
        DimMethod::Enumeration => {
            let n = args
                .n
                .filter(|&n| n >= 1)
                .ok_or_else(|| CliError::Invalid("--method enumeration needs --n >= 1".into()))?;
            let tol = args.tol.unwrap_or(pressure::DEFAULT_ENUMERATION_TOL);
            params.insert("n", n.to_string());
            params.insert("tol", float(tol));
            pressure::s_n_root_with(exec, n, &spec, tol)?
        }
    };
    let mut a = artifact("dimension", params, &DIMENSION_COLUMNS);
    dimension_row(&mut a, &d);
    Ok(Output::Table(a))
}

fn profile_cmd(exec: &RayonExecutor, args: &ProfileArgs) -> CliResult<(Output, Option<String>)> {
    let grid = parse::grid(&args.b_grid).map_err(CliError::Invalid)?;
    if grid.is_empty() {
        return Err(CliError::Invalid("--B-grid must contain at least one base".into()));
    }
    let mut params = BTreeMap::new();
    params.insert("B_grid", grid.iter().map(|&b| float(b)).collect::<Vec<_>>().join(","));
    params.insert("tol", float(args.tol));
    if args.escalate {
        if grid.len() != 1 {
            return Err(CliError::Invalid("--escalate takes a single base in --B-grid".into()));
        }
        params.insert("escalate", "true".into());
        params.insert("tol_m", float(args.tol_m));
        let mut a = artifact("profile", params, &DIMENSION_COLUMNS);
        for g in Functional::ALL {
            let ex = pressure::dimension_extrapolate(exec, grid[0], g, args.tol_m, args.tol)?;
            for d in &ex.trace {
                dimension_row(&mut a, d);
            }
        }
        return Ok((Output::Table(a), None));
    }
    params.insert("M", args.m.to_string());
    let rows = pressure::profile_table(exec, &grid, args.m, args.tol)?;
    let mut a = artifact(
        "profile",
        params,
        &["B", "M", "F1", "E1", "F2", "E2", "nodes", "method"],
    );
    for r in &rows {
        let v = r.ordered();
        let nodes = v.iter().map(|d| d.n_or_nodes).max().unwrap_or(0);
        a.row(vec![
            num(r.b),
            json!(r.m),
            num(v[0].value),
            num(v[1].value),
            num(v[2].value),
            num(v[3].value),
            json!(nodes),
            text("operator"),
        ]);
    }
    let violation = pressure::check_ordering(&rows).err().map(|e| e.to_string());
    Ok((Output::Table(a), violation))
}

/// Most admissible words enumerated for the exact layer-mass check.
const LAYER_MASS_LIMIT: usize = 200_000;

fn cantor_cmd(exec: &RayonExecutor, args: &CantorArgs) -> CliResult<Output> {
    let params = cantor::schedule(args.l, args.m, args.b, args.mode)?;
    let depth = match args.depth {
        Some(d) => d,
        None => params.n_seq.first().map_or(20, |&n| n as usize + 20),
    };
    let report = cantor::holder_report_with(exec, &params, depth, args.samples, args.seed, args.mass)?;

    let mut len_ok = 0usize;
    let mut gap_ok = 0usize;
    let mut gap_checked = 0usize;
    let checks = exec.map(args.samples, |i| -> cfmetric_core::Result<(bool, Option<bool>)> {
        let w = cantor::sample_word(&params, depth, args.seed, i as u64)?;
        let lb = cantor::fundamental_length_bounds(&w, &params)?;
        let gap = match cantor::gap(&w, &params) {
            Ok(g) => Some(g.holds()),
            Err(Error::Domain(_)) => None,
            Err(e) => return Err(e),
        };
        Ok((lb.holds(), gap))
    });
    let checks: Vec<(bool, Option<bool>)> = checks.into_iter().collect::<Result<_, _>>()?;
    for (l, g) in checks {
        len_ok += l as usize;
        if let Some(g) = g {
            gap_checked += 1;
            gap_ok += g as usize;
        }
    }
    let layer = match cantor::layer_mass(&params, depth, args.mass, LAYER_MASS_LIMIT) {
        Ok(m) => Some(m),
        Err(e) if e.is_budget() => None,
        Err(e) => return Err(e.into()),
    };

    let mode = match args.mode {
        ScheduleMode::Paper => "paper".to_string(),
        ScheduleMode::Scaled(c) => format!("scaled:{c}"),
    };
    let mass = match args.mass {
        MassMode::Normalized => "normalized",
        MassMode::Nominal => "nominal",
    };
    let mut p = BTreeMap::new();
    p.insert("B", float(args.b));
    p.insert("L", args.l.to_string());
    p.insert("M", args.m.to_string());
    p.insert("depth", depth.to_string());
    p.insert("mass", mass.to_string());
    p.insert("mode", mode.clone());
    p.insert("samples", args.samples.to_string());
    p.insert("seed", args.seed.to_string());
    let mut a = artifact("cantor", p, &["sample", "exponent", "method"]);
    for (i, e) in report.exponents.iter().enumerate() {
        a.row(vec![json!(i), num(*e), text("exact")]);
    }
    a.meta("S", float(params.s))
        .meta("target", float(report.target))
        .meta("min_over_depths", float(report.min_over_depths))
        .meta("median", float(report.median))
        .meta("max_conservation_error", float(report.max_conservation_error))
        .meta(
            "meets_target",
            report.meets_target.map_or("n/a".to_string(), |b| b.to_string()),
        )
        .meta("length_checks", format!("{len_ok}/{}", args.samples))
        .meta("gap_checks", format!("{gap_ok}/{gap_checked}"))
        .meta("layer_mass", layer.map_or("n/a".to_string(), float));

    let mut schedule = Map::new();
    schedule.insert("L".into(), json!(params.l));
    schedule.insert("M".into(), json!(params.m_bound));
    schedule.insert("B".into(), num(params.b));
    schedule.insert("S".into(), num(params.s));
    schedule.insert("S_bracket".into(), json!([num(params.s_bracket.0), num(params.s_bracket.1)]));
    schedule.insert("ln_alpha".into(), num(params.ln_alpha));
    schedule.insert("ln_beta".into(), num(params.ln_beta));
    schedule.insert("mode".into(), text(&mode));
    schedule.insert("m".into(), json!(params.m_seq));
    schedule.insert("n".into(), json!(params.n_seq));
    schedule.insert(
        "beyond".into(),
        json!({"k": params.beyond.k, "m": params.beyond.m.to_string(), "n": params.beyond.n.to_string()}),
    );
    a.extra.insert("schedule".into(), Value::Object(schedule));
    a.extra.insert(
        "mass_checks".into(),
        json!({
            "mode": mass,
            "max_conservation_error": num(report.max_conservation_error),
            "layer_mass": layer.map_or(Value::Null, num),
        }),
    );
    a.extra.insert(
        "geometry_checks".into(),
        json!({"length_ok": len_ok, "length_checked": args.samples, "gap_ok": gap_ok, "gap_checked": gap_checked}),
    );
    a.extra.insert(
        "holder".into(),
        json!({
            "target": num(report.target),
            "min": num(report.min),
            "median": num(report.median),
            "min_over_depths": num(report.min_over_depths),
            "meets_target": report.meets_target,
            "histogram": report.histogram.iter().map(|(lo, c)| json!({"lower": num(*lo), "count": c})).collect::<Vec<_>>(),
        }),
    );
    Ok(Output::Table(a))
}

fn zero_one_cmd(exec: &RayonExecutor, args: &ZeroOneArgs) -> CliResult<Output> {
    if args.samples == 0 {
        return Err(CliError::Invalid("--samples must be positive".into()));
    }
    let n_max = match args.an {
        Some(n) => n,
        None => *args.window.end(),
    };
    let stream = match args.bits {
        Some(bits) => SampleStream::new(args.seed, bits, args.samples)?,
        None => SampleStream::covering(args.seed, n_max, args.samples)?,
    };
    let mut p = BTreeMap::new();
    p.insert("bits", stream.bits.to_string());
    p.insert("phi", args.phi.to_string());
    p.insert("samples", args.samples.to_string());
    p.insert("seed", args.seed.to_string());

    if let Some(n) = args.an {
        p.insert("family", EventTag::F2.to_string());
        p.insert("n", n.to_string());
        let est = mc::an_measure_estimate_with(exec, n, &args.phi, &stream)?;
        let mut a = artifact(
            "zero-one",
            p,
            &["n", "phi_n", "fraction", "ci_lo", "ci_hi", "bound", "ratio", "seed", "method"],
        );
        a.row(vec![
            json!(n),
            num(est.phi_n),
            num(est.estimate.fraction),
            num(est.estimate.ci_lo),
            num(est.estimate.ci_hi),
            num(est.bound),
            num(est.ratio()),
            json!(args.seed),
            text("MC"),
        ]);
        return Ok(Output::Table(a));
    }

    let family = EventFamily::new(args.family, args.phi)?;
    let window = format!("{}:{}", args.window.start(), args.window.end());
    p.insert("family", args.family.to_string());
    p.insert("window", window.clone());
    let prop = mc::hit_fraction_with(exec, &family, args.window.clone(), &stream)?;
    let mut a = artifact(
        "zero-one",
        p,
        &["family", "phi", "window", "samples", "fraction", "ci_lo", "ci_hi", "seed", "method"],
    );
    a.row(vec![
        text(args.family),
        text(args.phi),
        text(window),
        json!(args.samples),
        num(prop.fraction),
        num(prop.ci_lo),
        num(prop.ci_hi),
        json!(args.seed),
        text("MC"),
    ]);
    Ok(Output::Table(a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn mode_parsers() {
        assert_eq!(parse_schedule_mode("paper").unwrap(), ScheduleMode::Paper);
        assert_eq!(parse_schedule_mode("scaled:3").unwrap(), ScheduleMode::Scaled(3));
        assert!(parse_schedule_mode("scaled:0").is_err());
        assert!(parse_mass_mode("nominal").is_ok() && parse_mass_mode("x").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Invalid("x".into()).exit_code(), EXIT_INVALID);
        let budget = Error::BudgetExceeded { what: "t", needed: 2, limit: 1 };
        assert_eq!(CliError::Compute(budget).exit_code(), EXIT_BUDGET);
        assert_eq!(CliError::Compute(Error::Domain("d".into())).exit_code(), EXIT_INVALID);
        assert_eq!(CliError::Io(io::Error::other("x")).exit_code(), EXIT_IO);
    }
}
