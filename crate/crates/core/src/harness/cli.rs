//! Command-line interface. `run` returns the process exit code: 0 on
//! success, 1 for usage or configuration errors, 2 for I/O failures, 3 for
//! protocol or framing failures.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis::{self, FormulaRow};
use crate::bits::BitString;
use crate::boolfn::{make_ci_function, search_ci, BoolFn, CiKind};
use crate::error::{Error, Result};
use crate::protocol::{
    coin_flip, run_session, session_bit, AliceSession, BobStrategy, Scheme, SessionConfig,
    VerifyMode,
};
use crate::quantum::StatePair;

use super::config::{ExperimentConfig, Format, Transport};
use super::experiments::{run_experiment, ExperimentResult, STRATEGIES};
use super::output::{formulas_csv, reports_csv, summary_json, write_artifacts, write_text};
use super::transport::{connect, Server, TranscriptSink};

#[derive(Parser, Debug)]
#[command(name = "qbc", version, about = "Quantum bit commitment simulator")]
struct Cli {
    /// Master seed; the QBC_SEED environment variable takes precedence.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    trials: Option<u64>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one honest session and print its transcript.
    RunProtocol(RunProtocolArgs),
    /// Run a registered experiment or attack.
    Attack(AttackArgs),
    /// Run an experiment over a grid of one or two parameters.
    Sweep(SweepArgs),
    /// Evaluate closed-form quantities.
    Formulas(FormulaArgs),
    /// Boolean function tools.
    Ci(CiArgs),
    /// Receiver endpoint of the socket transport.
    Serve(ServeArgs),
    /// Committer endpoint of the socket transport.
    Connect(ConnectArgs),
    /// List registered experiments.
    List,
}

#[derive(Args, Debug, Clone, Default)]
struct SessionArgs {
    /// Session configuration file (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    /// n - n0 for the default linear-mask F.
    #[arg(long)]
    gap: Option<usize>,
    /// F as a hex truth table.
    #[arg(long)]
    hex: Option<String>,
    #[arg(long = "cosA")]
    cos_a: Option<f64>,
    #[arg(long = "cos2A")]
    cos2_a: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    /// Verify two-state slots by discrimination instead of projection.
    #[arg(long)]
    usd_verify: bool,
    #[arg(long)]
    coin_flip: bool,
    /// Keep slot descriptors in transcripts.
    #[arg(long)]
    debug: bool,
}

#[derive(Args, Debug)]
struct RunProtocolArgs {
    #[command(flatten)]
    session: SessionArgs,
    /// Committed bit; drawn from the seed when absent.
    #[arg(long)]
    b: Option<u8>,
    #[arg(long = "session-id", default_value_t = 0)]
    session_id: u64,
    /// The committer declines to open.
    #[arg(long)]
    refuse: bool,
}

#[derive(Args, Debug, Clone, Default)]
struct ExperimentArgs {
    /// Experiment configuration file (JSON); flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    gap: Option<usize>,
    #[arg(long)]
    hex: Option<String>,
    #[arg(long = "cosA")]
    cos_a: Option<f64>,
    #[arg(long = "cos2A")]
    cos2_a: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    target: Option<u8>,
    #[arg(long)]
    k: Option<usize>,
    /// in-process, loopback, or host:port.
    #[arg(long)]
    transport: Option<String>,
}

#[derive(Args, Debug)]
struct AttackArgs {
    /// Experiment id (see `list`).
    strategy: String,
    #[command(flatten)]
    params: ExperimentArgs,
}

#[derive(Args, Debug)]
struct SweepArgs {
    strategy: String,
    /// `name=v1,v2,...`; give once or twice.
    #[arg(long = "param", required = true)]
    grid: Vec<String>,
    #[command(flatten)]
    params: ExperimentArgs,
}

#[derive(Args, Debug)]
struct FormulaArgs {
    /// p-usd, p-usd-bounds, binding-min-m, eq12, concealing-exact,
    /// concealing-dml, concealing-asymptotic, bob-cheat, min-n,
    /// trace-distance, majority, or a table: eq12-table, dml-table,
    /// asymptotic-table, trace-table.
    formula: String,
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    n0: Option<u64>,
    #[arg(long = "pA")]
    p_a: Option<f64>,
    #[arg(long = "cosA")]
    cos_a: Option<f64>,
    #[arg(long = "cos2A")]
    cos2_a: Option<f64>,
    #[arg(long = "sin2A")]
    sin2_a: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    gap: Option<u64>,
    #[arg(long)]
    q: Option<f64>,
}

#[derive(Args, Debug)]
struct CiArgs {
    #[command(subcommand)]
    tool: CiTool,
}

#[derive(Subcommand, Debug)]
enum CiTool {
    /// Walsh spectrum, in mask order.
    Spectrum {
        #[arg(long)]
        hex: String,
    },
    /// Correlation-immunity order.
    Order {
        #[arg(long)]
        hex: String,
    },
    /// All functions on n <= 4 variables of at least the given order.
    Search {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        n0: usize,
        #[arg(long)]
        balanced: bool,
    },
    /// Build a function of a given order.
    Make {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        n0: usize,
        #[arg(long, default_value = "linear")]
        kind: String,
    },
    /// Truth-table bits (input 0 first) to hex.
    Hex {
        #[arg(long)]
        bits: String,
    },
    /// Hex to truth-table bits (input 0 first).
    Bits {
        #[arg(long)]
        hex: String,
    },
}

#[derive(Args, Debug)]
struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1:7878")]
    addr: String,
    #[command(flatten)]
    session: SessionArgs,
    /// Stop after this many connections.
    #[arg(long)]
    connections: Option<usize>,
}

#[derive(Args, Debug)]
struct ConnectArgs {
    #[arg(long, default_value = "127.0.0.1:7878")]
    addr: String,
    #[command(flatten)]
    session: SessionArgs,
    /// Committed bit for every session; drawn per session when absent.
    #[arg(long)]
    b: Option<u8>,
    #[arg(long, default_value_t = 1)]
    sessions: u64,
    #[arg(long = "first-session", default_value_t = 0)]
    first_session: u64,
}

struct Globals {
    seed: u64,
    trials: Option<u64>,
    out: Option<PathBuf>,
    format: Format,
    workers: usize,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, S>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            if e.use_stderr() {
                eprint!("{e}");
            } else {
                let _ = write!(out, "{e}");
            }
            return code;
        }
    };
    match dispatch(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parameter(_) | Error::Domain(_) => 1,
        Error::Io(_) => 2,
        Error::Protocol(_) | Error::Frame(_) => 3,
    }
}

fn env_seed() -> Result<Option<u64>> {
    match std::env::var("QBC_SEED") {
        Ok(s) => s
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Error::param(format!("QBC_SEED is not a 64-bit integer: {s:?}"))),
        Err(_) => Ok(None),
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<()> {
    let g = Globals {
        seed: env_seed()?.or(cli.seed).unwrap_or(0),
        trials: cli.trials,
        out: cli.out,
        format: match cli.format {
            Some(FormatArg::Json) => Format::Json,
            _ => Format::Csv,
        },
        workers: cli.workers.unwrap_or(1),
    };
    match cli.command {
        Command::RunProtocol(a) => run_protocol(&g, a, out),
        Command::Attack(a) => {
            let cfg = experiment_config(&g, &a.strategy, &a.params)?;
            emit_results(&g, &[run_experiment(&cfg)?], out)
        }
        Command::Sweep(a) => sweep(&g, a, out),
        Command::Formulas(a) => formulas(&g, a, out),
        Command::Ci(a) => ci(a.tool, out),
        Command::Serve(a) => serve(&g, a, out),
        Command::Connect(a) => connect_cmd(&g, a, out),
        Command::List => {
            for s in STRATEGIES {
                writeln!(out, "{:<24} {}", s.id, s.about)?;
            }
            Ok(())
        }
    }
}

fn cos_from(cos_a: Option<f64>, cos2_a: Option<f64>) -> Result<Option<f64>> {
    match (cos_a, cos2_a) {
        (Some(_), Some(_)) => Err(Error::param("give cosA or cos2A, not both")),
        (Some(c), None) => Ok(Some(c)),
        (None, Some(c2)) if (0.0..=1.0).contains(&c2) => Ok(Some(c2.sqrt())),
        (None, Some(c2)) => Err(Error::param(format!("cos2A must lie in [0, 1], got {c2}"))),
        (None, None) => Ok(None),
    }
}

fn read_json<T: for<'de> serde::Deserialize<'de>>(path: &PathBuf) -> Result<T> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::param(format!("{}: {e}", path.display())))
}

fn session_config(g: &Globals, a: &SessionArgs) -> Result<SessionConfig> {
    let mut cfg = if let Some(path) = &a.config {
        let c: SessionConfig = read_json(path)?;
        c.with_seed(if g.seed != 0 { g.seed } else { c.seed() })
    } else {
        let scheme = Scheme::parse(a.scheme.as_deref().unwrap_or("b92bc"))?;
        let cos_a = cos_from(a.cos_a, a.cos2_a)?;
        let cos_a = if scheme.needs_pair() {
            Some(cos_a.unwrap_or(0.8))
        } else {
            None
        };
        let m = a.m.unwrap_or(4);
        match &a.hex {
            Some(h) => {
                let pair = crate::protocol::config::pair_from(cos_a, a.delta)?;
                SessionConfig::new(scheme, BoolFn::from_hex(h)?, m, pair, g.seed)?
            }
            None => SessionConfig::with_gap(
                scheme,
                a.n.unwrap_or(6),
                a.gap.unwrap_or(crate::protocol::DEFAULT_GAP),
                m,
                cos_a,
                a.delta,
                g.seed,
            )?,
        }
    };
    if a.usd_verify {
        cfg.verify = VerifyMode::Usd;
    }
    cfg.coin_flip |= a.coin_flip;
    cfg.debug |= a.debug;
    Ok(cfg)
}

fn check_bit(b: Option<u8>) -> Result<Option<u8>> {
    match b {
        Some(v) if v > 1 => Err(Error::param(format!("b must be 0 or 1, got {v}"))),
        _ => Ok(b),
    }
}

fn run_protocol(g: &Globals, a: RunProtocolArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = session_config(g, &a.session)?;
    let b = check_bit(a.b)?.unwrap_or_else(|| session_bit(&cfg, a.session_id));
    let outcome = if cfg.coin_flip {
        if a.b.is_some() {
            return Err(Error::param("a coin flip draws its own committed bit"));
        }
        coin_flip(&cfg, a.session_id, BobStrategy::Honest, !a.refuse)?
    } else if a.refuse {
        let mut alice = AliceSession::new(&cfg, a.session_id, b).refusing();
        let mut bob = crate::protocol::BobSession::new(&cfg, a.session_id, BobStrategy::Honest)?;
        crate::protocol::drive(&mut alice, &mut bob)?;
        crate::protocol::SessionOutcome {
            bit: b,
            transcript: bob.transcript().expect("finished"),
            announced: bob.announced(),
            coin: None,
        }
    } else {
        run_session(&cfg, a.session_id, b, BobStrategy::Honest)?
    };
    let text = outcome.transcript.to_json_pretty();
    if let Some(path) = &g.out {
        write_text(path, &outcome.transcript.to_json())?;
    } else {
        writeln!(out, "{text}")?;
    }
    write!(out, "{}", outcome.transcript.verdict)?;
    if let Some(c) = outcome.coin {
        write!(out, " coin={c}")?;
    }
    writeln!(out)?;
    Ok(())
}

fn experiment_config(g: &Globals, id: &str, a: &ExperimentArgs) -> Result<ExperimentConfig> {
    let mut cfg = match &a.config {
        Some(path) => read_json(path)?,
        None => ExperimentConfig::default(),
    };
    cfg.experiment = id.to_string();
    if let Some(s) = &a.scheme {
        cfg.scheme = Some(Scheme::parse(s)?);
    }
    if let Some(v) = a.n {
        cfg.n = v;
    }
    if let Some(v) = a.m {
        cfg.m = v;
    }
    if let Some(v) = a.gap {
        cfg.gap = v;
    }
    if let Some(h) = &a.hex {
        cfg.f = Some(BoolFn::from_hex(h)?);
    }
    if let Some(c) = cos_from(a.cos_a, a.cos2_a)? {
        cfg.cos_a = Some(c);
    }
    if a.delta.is_some() {
        cfg.delta = a.delta;
    }
    if let Some(v) = a.target {
        cfg.target = v;
    }
    if let Some(v) = a.k {
        cfg.k = v;
    }
    if let Some(t) = &a.transport {
        cfg.transport = Transport::parse(t);
    }
    if let Some(t) = g.trials {
        cfg.trials = t;
    }
    if env_seed()?.is_some() || g.seed != 0 || a.config.is_none() {
        cfg.seed = g.seed;
    }
    cfg.workers = g.workers;
    cfg.format = g.format;
    cfg.output = g.out.clone();
    cfg.validate()?;
    Ok(cfg)
}

fn emit_results(g: &Globals, results: &[ExperimentResult], out: &mut dyn Write) -> Result<()> {
    let reports: Vec<_> = results.iter().map(|r| r.report.clone()).collect();
    match (&g.out, g.format) {
        (Some(path), Format::Csv) => {
            write_artifacts(path, results)?;
            for r in &reports {
                writeln!(
                    out,
                    "{} {}: {}/{} = {} (predicted {}, z = {:.3})",
                    r.strategy,
                    r.params,
                    r.successes,
                    r.trials,
                    r.rate(),
                    r.predicted,
                    r.z_score
                )?;
            }
        }
        (Some(path), Format::Json) => write_text(path, &summary_json(results)?)?,
        (None, Format::Csv) => write!(out, "{}", reports_csv(&reports)?)?,
        (None, Format::Json) => writeln!(out, "{}", summary_json(results)?)?,
    }
    Ok(())
}

fn set_param(cfg: &mut ExperimentConfig, name: &str, value: &str) -> Result<()> {
    let bad =
        |e: &dyn std::fmt::Display| Error::param(format!("bad value {value:?} for {name}: {e}"));
    let int = || value.parse::<usize>().map_err(|e| bad(&e));
    let real = || value.parse::<f64>().map_err(|e| bad(&e));
    match name {
        "n" => cfg.n = int()?,
        "m" => cfg.m = int()?,
        "gap" => cfg.gap = int()?,
        "k" => cfg.k = int()?,
        "target" => cfg.target = value.parse().map_err(|e| bad(&e))?,
        "cosA" => cfg.cos_a = Some(real()?),
        "cos2A" => cfg.cos_a = cos_from(None, Some(real()?))?,
        "delta" => cfg.delta = Some(real()?),
        _ => return Err(Error::param(format!("cannot sweep over {name:?}"))),
    }
    Ok(())
}

fn sweep(g: &Globals, a: SweepArgs, out: &mut dyn Write) -> Result<()> {
    if a.grid.len() > 2 {
        return Err(Error::param("sweep takes one or two --param grids"));
    }
    let base = experiment_config(g, &a.strategy, &a.params)?;
    let axes = a
        .grid
        .iter()
        .map(|spec| {
            let (name, values) = spec
                .split_once('=')
                .ok_or_else(|| Error::param(format!("grid {spec:?} is not name=v1,v2,...")))?;
            Ok((
                name.to_string(),
                values.split(',').map(str::to_string).collect::<Vec<_>>(),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut points = vec![Vec::<(String, String)>::new()];
    for (name, values) in &axes {
        points = points
            .into_iter()
            .flat_map(|p| {
                values.iter().map(move |v| {
                    let mut q = p.clone();
                    q.push((name.clone(), v.clone()));
                    q
                })
            })
            .collect();
    }
    let mut results = Vec::with_capacity(points.len());
    for p in points {
        let mut cfg = base.clone();
        for (name, v) in &p {
            set_param(&mut cfg, name, v)?;
        }
        results.push(run_experiment(&cfg)?);
    }
    emit_results(g, &results, out)
}

fn need<T>(v: Option<T>, name: &str) -> Result<T> {
    v.ok_or_else(|| Error::param(format!("this formula needs --{name}")))
}

fn formulas(g: &Globals, a: FormulaArgs, out: &mut dyn Write) -> Result<()> {
    let cos = || -> Result<f64> {
        match (cos_from(a.cos_a, a.cos2_a)?, a.sin2_a) {
            (Some(c), None) => Ok(c),
            (None, Some(s2)) => Ok((1.0 - s2).max(0.0).sqrt()),
            _ => Err(Error::param(
                "this formula needs one of --cosA, --cos2A, --sin2A",
            )),
        }
    };
    let value: serde_json::Value = match a.formula.as_str() {
        "p-usd" => analysis::p_usd(cos()?)?.into(),
        "p-usd-bounds" => {
            let (lo, hi) = analysis::p_usd_bounds(need(a.delta, "delta")?)?;
            serde_json::json!([lo, hi])
        }
        "binding-min-m" => {
            let mm = analysis::binding_min_m(need(a.alpha, "alpha")?, cos()?)?;
            serde_json::to_value(mm).expect("plain struct")
        }
        "eq12" => analysis::eq12_failure(need(a.m, "m")?, cos()?)?.into(),
        "concealing-exact" => {
            analysis::concealing_exact(need(a.n, "n")?, need(a.n0, "n0")?, need(a.p_a, "pA")?)?
                .into()
        }
        "concealing-dml" => {
            analysis::concealing_dml(need(a.n, "n")?, need(a.n0, "n0")?, need(a.p_a, "pA")?)?.into()
        }
        "concealing-asymptotic" => {
            let (n, n0, p) = (need(a.n, "n")?, need(a.n0, "n0")?, need(a.p_a, "pA")?);
            let r = analysis::concealing_asymptotic(n, n0, p)?;
            let exact = analysis::concealing_exact(n, n0, p)?;
            serde_json::json!({
                "as_printed": r.as_printed,
                "complement": r.complement,
                "exact": exact,
                "closer": r.closer_reading(exact),
            })
        }
        "bob-cheat" => analysis::bob_cheat_prob(
            need(a.n, "n")?,
            need(a.n0, "n0")?,
            need(a.p_a, "pA")?,
            need(a.m, "m")?,
        )?
        .into(),
        "min-n" => analysis::min_n_for_beta(
            need(a.beta, "beta")?,
            need(a.m, "m")?,
            need(a.p_a, "pA")?,
            a.gap.unwrap_or(crate::protocol::DEFAULT_GAP as u64),
        )?
        .into(),
        "trace-distance" => {
            let pair = StatePair::with_cos(cos()?)?;
            let n = need(a.n, "n")? as usize;
            let m = a.m.unwrap_or(1) as usize;
            let zeros = vec![BitString::zeros(n); m];
            let ones: Vec<_> = (0..m).map(|j| BitString::zeros(n).flipped(j % n)).collect();
            serde_json::to_value(analysis::blob_trace_distance(&pair, &zeros, &ones)?)
                .expect("plain struct")
        }
        "majority" => analysis::majority_success(
            need(a.n, "n")?,
            a.q.unwrap_or_else(analysis::breidbart_rate),
        )
        .into(),
        "eq12-table" | "dml-table" | "asymptotic-table" | "trace-table" => {
            let rows = formula_table(&a.formula)?;
            let text = formulas_csv(&rows)?;
            return match &g.out {
                Some(p) => write_text(p, &text),
                None => Ok(write!(out, "{text}")?),
            };
        }
        other => return Err(Error::param(format!("unknown formula {other:?}"))),
    };
    match g.format {
        Format::Json => writeln!(
            out,
            "{}",
            serde_json::json!({ "formula": a.formula, "value": value })
        )?,
        Format::Csv => match &value {
            serde_json::Value::Number(x) => writeln!(out, "{x}")?,
            v => writeln!(out, "{v}")?,
        },
    }
    Ok(())
}

/// Comparison tables of a closed form against its oracle.
pub fn formula_table(kind: &str) -> Result<Vec<FormulaRow>> {
    let mut rows = Vec::new();
    match kind {
        "eq12-table" => {
            for c2 in [0.25, 0.5, 0.75, 0.9] {
                for m in [1u32, 2, 4, 8, 16, 32, 64] {
                    let s = analysis::eq12_sides(m, f64::sqrt(c2))?;
                    rows.push(FormulaRow::new(
                        "eq12",
                        format!("m={m} cos2A={c2}"),
                        s.closed_form,
                        s.binomial_sum,
                    ));
                }
            }
        }
        "dml-table" | "asymptotic-table" => {
            for n in [100u64, 400, 1600, 6400] {
                for (frac, p) in [(0.3, 0.2), (0.25, 0.15), (0.5, 0.4)] {
                    let n0 = (frac * n as f64) as u64;
                    let exact = analysis::concealing_exact(n, n0, p)?;
                    let params = format!("n={n} n0={n0} pA={p}");
                    if kind == "dml-table" {
                        rows.push(FormulaRow::new(
                            "dml",
                            params,
                            analysis::concealing_dml(n, n0, p)?,
                            exact,
                        ));
                    } else {
                        let r = analysis::concealing_asymptotic(n, n0, p)?;
                        rows.push(FormulaRow::new(
                            "asymptotic-as-printed",
                            params.clone(),
                            r.as_printed,
                            exact,
                        ));
                        rows.push(FormulaRow::new(
                            "asymptotic-complement",
                            params,
                            r.complement,
                            exact,
                        ));
                    }
                }
            }
        }
        "trace-table" => {
            let pair = StatePair::with_cos(0.8)?;
            for n in [10usize, 100, 1000, 10_000] {
                let zeros = vec![BitString::zeros(n)];
                let ones = vec![BitString::zeros(n).flipped(0)];
                let d = analysis::blob_trace_distance(&pair, &zeros, &ones)?;
                rows.push(FormulaRow::new(
                    "trace-distance",
                    format!("n={n} cosA=0.8"),
                    d.analytic,
                    d.numeric,
                ));
            }
        }
        other => return Err(Error::param(format!("unknown table {other:?}"))),
    }
    Ok(rows)
}

fn ci(tool: CiTool, out: &mut dyn Write) -> Result<()> {
    match tool {
        CiTool::Spectrum { hex } => {
            let w = BoolFn::from_hex(&hex)?.walsh();
            let parts: Vec<String> = w.coefficients().iter().map(i64::to_string).collect();
            writeln!(out, "{}", parts.join(","))?;
        }
        CiTool::Order { hex } => writeln!(out, "{}", BoolFn::from_hex(&hex)?.ci_order())?,
        CiTool::Search { n, n0, balanced } => {
            for f in search_ci(n, n0, balanced)? {
                writeln!(out, "{}", f.to_hex())?;
            }
        }
        CiTool::Make { n, n0, kind } => {
            let kind = match kind.as_str() {
                "linear" | "linear-mask" => CiKind::LinearMask,
                "recursive" => CiKind::Recursive,
                other => return Err(Error::param(format!("unknown kind {other:?}"))),
            };
            writeln!(out, "{}", make_ci_function(n, n0, kind)?.to_hex())?;
        }
        CiTool::Hex { bits } => {
            let table = bits
                .chars()
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    _ => Err(Error::param(format!("invalid table digit {c:?}"))),
                })
                .collect::<Result<Vec<_>>>()?;
            if !table.len().is_power_of_two() {
                return Err(Error::param("table length must be a power of two"));
            }
            let n = table.len().trailing_zeros() as usize;
            writeln!(out, "{}", BoolFn::from_table(n, table)?.to_hex())?;
        }
        CiTool::Bits { hex } => {
            let f = BoolFn::from_hex(&hex)?;
            let s: String = f
                .table()
                .iter()
                .map(|&v| if v { '1' } else { '0' })
                .collect();
            writeln!(out, "{s}")?;
        }
    }
    Ok(())
}

fn serve(g: &Globals, a: ServeArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = session_config(g, &a.session)?;
    let server = Server::bind(&a.addr, cfg)?;
    writeln!(out, "listening on {}", server.local_addr()?)?;
    out.flush()?;
    let sink: TranscriptSink = match &g.out {
        Some(path) => {
            let file = OpenOptions::new()
                .create(true)
                .append(true)
                .open(path)
                .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            let file = std::sync::Mutex::new(file);
            std::sync::Arc::new(move |t: crate::protocol::Transcript| {
                let mut f = file.lock().expect("transcript file lock");
                if let Err(e) = writeln!(f, "{}", t.to_json()) {
                    log::error!("cannot record transcript {}: {e}", t.session);
                }
            })
        }
        None => std::sync::Arc::new(|t: crate::protocol::Transcript| {
            log::info!("session {}: {}", t.session, t.verdict);
        }),
    };
    server.serve(a.connections, sink)
}

fn connect_cmd(g: &Globals, a: ConnectArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = session_config(g, &a.session)?;
    let b = check_bit(a.b)?;
    let sessions: Vec<(u64, u8)> = (a.first_session..a.first_session + a.sessions)
        .map(|s| (s, b.unwrap_or_else(|| session_bit(&cfg, s))))
        .collect();
    for r in connect(&a.addr, &cfg, &sessions)? {
        write!(
            out,
            "session {}: committed {} -> {}",
            r.session, r.bit, r.outcome.verdict
        )?;
        if let Some(c) = r.outcome.coin {
            write!(out, " coin={c}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}
