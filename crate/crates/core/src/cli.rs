//! Command-line front end.
//!
//! Settings resolve as: command-line flag, then the optional `--config`
//! file (`key = value` lines, `#` comments, keys named like the long
//! flags), then built-in defaults. Output is deterministic: floats are
//! rounded to 12 significant digits and printed in shortest round-trip
//! form. Exit codes: 0 success, 2 invalid input, 3 solver failure, 4 I/O.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::bloch::trajectory;
use crate::coherence::{
    asymptotic_value, backflow_report, coherence_closed_form, find_extrema, l1_coherence, sample_closed_form,
    theoretical_period, uniform_grid, verify_extrema_conditions,
};
use crate::error::Error;
use crate::evolution::{evolve_density, propagator_analytic, PureState};
use crate::hamiltonian::{HamiltonianParams, SymmetryClass};
use crate::optics::{assemble, random_states, solve_angles, solve_state_angles, state_action_error, SolveOptions};
use crate::tomography::{bootstrap_errorbar, matrix_record, reconstruct, simulate_counts, trace_distance};
use crate::two_qubit::{evolve_two_qubit, two_qubit_coherence, TwoQubitState};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("solver failed: {0}")]
    Solver(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::NoDecomposition { .. } | Error::DegenerateEvolution(_) => CliError::Solver(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "coherence-flow", version, about = "Coherence flow in PT- and anti-PT-symmetric qubits")]
pub struct Cli {
    /// key = value file supplying defaults for any long flag
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Coherence curve, closed form next to the density-matrix path (CSV)
    Trace(TraceArgs),
    /// Oscillation period, analytic and measured from the trace (JSON)
    Period(TraceArgs),
    /// Long-time coherence in the broken regime (JSON)
    Asymptote(TraceArgs),
    /// Stationary points per period and backflow class (JSON)
    Backflow(ModelOnly),
    /// Waveplate/loss angles realizing U(t) (JSON)
    Angles(AnglesArgs),
    /// Simulated tomography of the evolved state (JSON)
    Tomography(TomographyArgs),
    /// Bloch trajectory (CSV)
    Bloch(TraceArgs),
    /// Two-qubit coherence for the three preset states (CSV)
    TwoQubit(TraceArgs),
}

#[derive(Args, Debug, Default, Clone)]
pub struct ModelArgs {
    /// pt or apt
    #[arg(long)]
    pub kind: Option<String>,
    /// Energy scale s > 0
    #[arg(long)]
    pub s: Option<f64>,
    /// Non-Hermiticity a > 0
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    /// Initial state preset: H, V, D or h-sqrt3v
    #[arg(long)]
    pub state: Option<String>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub phi: Option<f64>,
}

#[derive(Args, Debug, Default, Clone)]
pub struct OutputArgs {
    /// Write here instead of stdout
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Args, Debug, Clone)]
pub struct TraceArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub t_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct ModelOnly {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct AnglesArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Evolution time
    #[arg(long, allow_negative_numbers = true)]
    pub t: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Fit the five-element design for the chosen initial state instead
    /// of the operator-level sequence
    #[arg(long)]
    pub per_state: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct TomographyArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub t: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Mean photon number per basis setting
    #[arg(long)]
    pub exposure: Option<u64>,
    #[arg(long)]
    pub resamples: Option<usize>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        <Format as ValueEnum>::from_str(s, true)
    }
}

const KNOWN_KEYS: &[&str] = &[
    "kind", "s", "a", "state", "alpha", "beta", "phi", "t-min", "t-max", "samples", "t", "seed", "restarts",
    "per-state", "exposure", "resamples", "output", "format",
];

/// Parsed `key = value` configuration.
#[derive(Debug, Default, Clone)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut values = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Validation(format!("config line {}: expected key = value", no + 1)))?;
            let key = k.trim().replace('_', "-");
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(CliError::Validation(format!("config line {}: unknown key {key:?}", no + 1)));
            }
            values.insert(key, v.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn get<T: FromStr>(&self, key: &str) -> CliResult<Option<T>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| CliError::Validation(format!("config key {key}: cannot parse {v:?}"))),
        }
    }

    /// Flag value if given, else the config value.
    fn pick<T: FromStr + Clone>(&self, flag: &Option<T>, key: &str) -> CliResult<Option<T>> {
        match flag {
            Some(v) => Ok(Some(v.clone())),
            None => self.get(key),
        }
    }
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

struct Model {
    params: HamiltonianParams,
    state: PureState,
    state_label: String,
}

fn preset(name: &str) -> CliResult<PureState> {
    Ok(match name.to_ascii_lowercase().as_str() {
        "h" => PureState::h(),
        "v" => PureState::v(),
        "d" => PureState::d(),
        "h-sqrt3v" => PureState::h_sqrt3v(),
        other => return Err(invalid(format!("unknown state preset {other:?} (H, V, D, h-sqrt3v)"))),
    })
}

fn state_from(name: Option<String>, amps: [Option<f64>; 3]) -> CliResult<Option<(PureState, String)>> {
    let explicit = amps.iter().any(Option::is_some);
    match (name, explicit) {
        (Some(_), true) => Err(invalid("give either a state preset or alpha/beta/phi, not both")),
        (Some(n), false) => Ok(Some((preset(&n)?, n))),
        (None, true) => {
            let [al, be, ph] = amps.map(|v| v.unwrap_or(0.0));
            let st = PureState::normalized(al, be, ph)?;
            let label = format!("alpha={} beta={} phi={}", num(st.alpha), num(st.beta), num(st.phi));
            Ok(Some((st, label)))
        }
        (None, false) => Ok(None),
    }
}

/// Flags take precedence as a group over the config file.
fn resolve_state(m: &ModelArgs, cfg: &Config) -> CliResult<(PureState, String)> {
    if let Some(found) = state_from(m.state.clone(), [m.alpha, m.beta, m.phi])? {
        return Ok(found);
    }
    let from_cfg = state_from(cfg.get("state")?, [cfg.get("alpha")?, cfg.get("beta")?, cfg.get("phi")?])?;
    Ok(from_cfg.unwrap_or_else(|| (PureState::h(), "H".into())))
}

fn resolve_model(m: &ModelArgs, cfg: &Config) -> CliResult<Model> {
    let kind: String = cfg.pick(&m.kind, "kind")?.unwrap_or_else(|| "pt".into());
    let kind: SymmetryClass = kind.parse()?;
    let s: f64 = cfg.pick(&m.s, "s")?.unwrap_or(1.0);
    let a: f64 = cfg
        .pick(&m.a, "a")?
        .ok_or_else(|| invalid("a is required (--a or config key a)"))?;
    let params = HamiltonianParams::new(kind, s, a)?;
    let (state, state_label) = resolve_state(m, cfg)?;
    Ok(Model { params, state, state_label })
}

struct Window {
    t_min: f64,
    t_max: f64,
    samples: usize,
}

fn resolve_window(a: &TraceArgs, cfg: &Config, default_t_max: f64) -> CliResult<Window> {
    let t_min: f64 = cfg.pick(&a.t_min, "t-min")?.unwrap_or(0.0);
    let t_max: f64 = cfg.pick(&a.t_max, "t-max")?.unwrap_or(default_t_max);
    let samples: usize = cfg.pick(&a.samples, "samples")?.unwrap_or(1001);
    if !(t_min.is_finite() && t_min >= 0.0) {
        return Err(invalid(format!("t-min must be >= 0, got {t_min}")));
    }
    if !(t_max.is_finite() && t_max > t_min) {
        return Err(invalid(format!("t-max must exceed t-min, got {t_max}")));
    }
    if samples < 2 {
        return Err(invalid(format!("samples must be >= 2, got {samples}")));
    }
    Ok(Window { t_min, t_max, samples })
}

struct Sink {
    path: Option<PathBuf>,
    format: Format,
}

fn resolve_output(o: &OutputArgs, cfg: &Config, default: Format, allowed: &[Format]) -> CliResult<Sink> {
    let format: Format = cfg.pick(&o.format, "format")?.unwrap_or(default);
    if !allowed.contains(&format) {
        return Err(invalid(format!("format {format:?} is not available for this command")));
    }
    let path: Option<PathBuf> = cfg.pick(&o.output, "output")?;
    Ok(Sink { path, format })
}

/// Rounds to 12 significant digits.
pub fn round12(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return if v == 0.0 { 0.0 } else { v };
    }
    let r: f64 = format!("{v:.11e}").parse().unwrap_or(v);
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Number text used in CSV and metadata lines.
pub fn num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{}", round12(v))
    }
}

fn round_json(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round12(n.as_f64().unwrap_or(f64::NAN));
            serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_json).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_json(v))).collect()),
        other => other,
    }
}

fn json_text(v: Value) -> String {
    let mut s = serde_json::to_string_pretty(&round_json(v)).expect("serializable");
    s.push('\n');
    s
}

fn opt(v: Option<f64>) -> Value {
    v.map_or(Value::Null, |x| json!(x))
}

fn meta_header(command: &str, m: &Model) -> String {
    format!(
        "# coherence-flow {command}\n# kind={}\n# s={}\n# a={}\n# state={}\n",
        m.params.kind,
        num(m.params.s),
        num(m.params.a),
        m.state_label
    )
}

fn model_json(command: &str, m: &Model) -> serde_json::Map<String, Value> {
    let mut o = serde_json::Map::new();
    o.insert("schema".into(), json!(1));
    o.insert("command".into(), json!(command));
    o.insert("kind".into(), json!(m.params.kind));
    o.insert("s".into(), json!(m.params.s));
    o.insert("a".into(), json!(m.params.a));
    o.insert("state".into(), json!(m.state_label));
    o
}

/// Rows of numbers as CSV or as a JSON table.
fn table(command: &str, m: &Model, columns: &[&str], rows: &[Vec<f64>], format: Format) -> String {
    match format {
        Format::Csv => {
            let mut s = meta_header(command, m);
            s.push_str(&columns.join(","));
            s.push('\n');
            for r in rows {
                let line: Vec<String> = r.iter().map(|v| num(*v)).collect();
                let _ = writeln!(s, "{}", line.join(","));
            }
            s
        }
        Format::Json => {
            let mut o = model_json(command, m);
            o.insert("columns".into(), json!(columns));
            o.insert("rows".into(), json!(rows));
            json_text(Value::Object(o))
        }
    }
}

fn emit(sink: &Sink, text: &str) -> CliResult<()> {
    match &sink.path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("writing {}: {e}", p.display()))),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

fn cmd_trace(a: &TraceArgs, cfg: &Config) -> CliResult<(Sink, String)> {
    let m = resolve_model(&a.model, cfg)?;
    let w = resolve_window(a, cfg, 10.0)?;
    let sink = resolve_output(&a.out, cfg, Format::Csv, &[Format::Csv, Format::Json])?;
    let grid = uniform_grid(w.t_min, w.t_max, w.samples);
    let closed = sample_closed_form(&m.state, &m.params, &grid)?;
    let rho0 = m.state.density();
    let rows = grid
        .iter()
        .zip(&closed)
        .map(|(&t, &c)| Ok(vec![t, c, l1_coherence(&evolve_density(&rho0, &m.params, t)?)]))
        .collect::<CliResult<Vec<_>>>()?;
    let text = table("trace", &m, &["t", "c_closed_form", "c_matrix_path"], &rows, sink.format);
    Ok((sink, text))
}

fn cmd_period(a: &TraceArgs, cfg: &Config) -> CliResult<(Sink, String)> {
    let m = resolve_model(&a.model, cfg)?;
    let sink = resolve_output(&a.out, cfg, Format::Json, &[Format::Json])?;
    let period = theoretical_period(&m.params);
    let w = resolve_window(a, cfg, period.map_or(10.0, |p| 4.0 * p))?;
    let samples = if a.samples.is_some() || cfg.values.contains_key("samples") { w.samples } else { 4096 };
    let trace = find_extrema(&m.state, &m.params, (w.t_min, w.t_max), samples)?;
    let mut o = model_json("period", &m);
    o.insert("regime".into(), json!(m.params.regime()));
    o.insert("period".into(), opt(period));
    o.insert("period_measured".into(), opt(trace.period_estimate));
    o.insert("window".into(), json!([w.t_min, w.t_max]));
    o.insert("warnings".into(), json!(trace.warnings));
    Ok((sink, json_text(Value::Object(o))))
}

fn cmd_asymptote(a: &TraceArgs, cfg: &Config) -> CliResult<(Sink, String)> {
    let m = resolve_model(&a.model, cfg)?;
    let w = resolve_window(a, cfg, 10.0 / m.params.s)?;
    let sink = resolve_output(&a.out, cfg, Format::Json, &[Format::Json])?;
    let grid = uniform_grid(w.t_min, w.t_max, w.samples);
    let values = sample_closed_form(&m.state, &m.params, &grid)?;
    let (est, converged) = crate::coherence::estimate_asymptote(&grid, &values);
    let mut o = model_json("asymptote", &m);
    o.insert("regime".into(), json!(m.params.regime()));
    o.insert("asymptote".into(), opt(asymptotic_value(&m.params)));
    o.insert("value_at_t_max".into(), json!(coherence_closed_form(&m.state, &m.params, w.t_max)?));
    o.insert("tail_mean".into(), json!(est));
    o.insert("tail_converged".into(), json!(converged));
    o.insert("window".into(), json!([w.t_min, w.t_max]));
    Ok((sink, json_text(Value::Object(o))))
}

fn cmd_backflow(a: &ModelOnly, cfg: &Config) -> CliResult<(Sink, String)> {
    let m = resolve_model(&a.model, cfg)?;
    let sink = resolve_output(&a.out, cfg, Format::Json, &[Format::Json])?;
    let report = backflow_report(&m.state, &m.params)?;
    let predicted = match verify_extrema_conditions(&m.state, &m.params) {
        Ok(p) => json!({ "status": p.status, "times": p.times() }),
        Err(Error::NotPeriodic(_)) => Value::Null,
        Err(e) => return Err(e.into()),
    };
    let mut o = model_json("backflow", &m);
    o.insert("zeros_per_period".into(), json!(report.zeros_per_period));
    o.insert("classification".into(), json!(report.classification));
    o.insert("full_touches".into(), json!(report.full_touches));
    o.insert("period".into(), opt(report.period));
    o.insert("stationary".into(), json!(report.stationary));
    o.insert("predicted".into(), predicted);
    Ok((sink, json_text(Value::Object(o))))
}

fn cmd_angles(a: &AnglesArgs, cfg: &Config) -> CliResult<(Sink, String)> {
    let m = resolve_model(&a.model, cfg)?;
    let sink = resolve_output(&a.out, cfg, Format::Json, &[Format::Json])?;
    let t: f64 = cfg.pick(&a.t, "t")?.ok_or_else(|| invalid("t is required (--t)"))?;
    let defaults = SolveOptions::default();
    let opts = SolveOptions {
        seed: cfg.pick(&a.seed, "seed")?.unwrap_or(defaults.seed),
        restarts: cfg.pick(&a.restarts, "restarts")?.unwrap_or(defaults.restarts),
        ..defaults
    };
    if opts.restarts == 0 {
        return Err(invalid("restarts must be >= 1"));
    }
    let per_state = a.per_state || cfg.get::<bool>("per-state")?.unwrap_or(false);
    let seq = if per_state {
        solve_state_angles(&m.params, t, &m.state, &opts)?
    } else {
        solve_angles(&m.params, t, &opts)?
    };
    let target = propagator_analytic(&m.params, t)?.normalized_matrix();
    let panel = random_states(opts.panel_size, opts.seed ^ 0xa11ce);
    let mut o = model_json("angles", &m);
    if let Value::Object(s) = serde_json::to_value(&seq).expect("serializable") {
        o.extend(s);
    }
    o.insert(
        "panel_error".into(),
        if per_state { Value::Null } else { json!(state_action_error(&target, &assemble(&seq), &panel)) },
    );
    o.insert("seed".into(), json!(opts.seed));
    Ok((sink, json_text(Value::Object(o))))
}

fn cmd_tomography(a: &TomographyArgs, cfg: &Config) -> CliResult<(Sink, String)> {
    let m = resolve_model(&a.model, cfg)?;
    let sink = resolve_output(&a.out, cfg, Format::Json, &[Format::Json])?;
    let t: f64 = cfg.pick(&a.t, "t")?.unwrap_or(0.0);
    let seed: u64 = cfg.pick(&a.seed, "seed")?.unwrap_or(1);
    let exposure: u64 = cfg.pick(&a.exposure, "exposure")?.unwrap_or(30_000);
    let resamples: usize = cfg.pick(&a.resamples, "resamples")?.unwrap_or(200);
    let truth = evolve_density(&m.state.density(), &m.params, t)?;
    let rec = simulate_counts(&truth, exposure, seed)?;
    let est = reconstruct(&rec)?;
    let (mean, sd) = bootstrap_errorbar(&rec, l1_coherence, resamples, seed.wrapping_add(1))?;
    let mut o = model_json("tomography", &m);
    o.insert("t".into(), json!(t));
    o.insert("exposure".into(), json!(exposure));
    o.insert("seed".into(), json!(seed));
    o.insert("counts".into(), json!({ "H": rec.counts[0], "V": rec.counts[1], "R": rec.counts[2], "D": rec.counts[3] }));
    o.insert("rho_true".into(), json!(matrix_record(&truth.rho)));
    o.insert("rho_reconstructed".into(), json!(matrix_record(&est.rho)));
    o.insert("trace_distance".into(), json!(trace_distance(&truth, &est)));
    o.insert("coherence_true".into(), json!(l1_coherence(&truth)));
    o.insert("coherence_reconstructed".into(), json!(l1_coherence(&est)));
    o.insert("coherence_bootstrap_mean".into(), json!(mean));
    o.insert("coherence_sd".into(), json!(sd));
    o.insert("resamples".into(), json!(resamples));
    Ok((sink, json_text(Value::Object(o))))
}

fn cmd_bloch(a: &TraceArgs, cfg: &Config) -> CliResult<(Sink, String)> {
    let m = resolve_model(&a.model, cfg)?;
    let w = resolve_window(a, cfg, 10.0)?;
    let sink = resolve_output(&a.out, cfg, Format::Csv, &[Format::Csv, Format::Json])?;
    let grid = uniform_grid(w.t_min, w.t_max, w.samples);
    let rows: Vec<Vec<f64>> = trajectory(&m.state, &m.params, &grid)?
        .iter()
        .map(|p| vec![p.t, p.x, p.y, p.z])
        .collect();
    let text = table("bloch", &m, &["t", "x", "y", "z"], &rows, sink.format);
    Ok((sink, text))
}

fn cmd_two_qubit(a: &TraceArgs, cfg: &Config) -> CliResult<(Sink, String)> {
    let mut m = resolve_model(&a.model, cfg)?;
    m.state_label = "psi1,psi2,psi3".into();
    let w = resolve_window(a, cfg, 10.0)?;
    let sink = resolve_output(&a.out, cfg, Format::Csv, &[Format::Csv, Format::Json])?;
    let grid = uniform_grid(w.t_min, w.t_max, w.samples);
    let presets = TwoQubitState::presets();
    let rows = grid
        .iter()
        .map(|&t| {
            let mut row = vec![t];
            for (_, st) in &presets {
                row.push(two_qubit_coherence(&evolve_two_qubit(st, &m.params, t)?));
            }
            Ok(row)
        })
        .collect::<CliResult<Vec<_>>>()?;
    let text = table("two-qubit", &m, &["t", "c_psi1", "c_psi2", "c_psi3"], &rows, sink.format);
    Ok((sink, text))
}

/// Runs one parsed invocation and writes its output.
pub fn execute(cli: &Cli) -> CliResult<()> {
    let cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    let (sink, text) = match &cli.command {
        Command::Trace(a) => cmd_trace(a, &cfg)?,
        Command::Period(a) => cmd_period(a, &cfg)?,
        Command::Asymptote(a) => cmd_asymptote(a, &cfg)?,
        Command::Backflow(a) => cmd_backflow(a, &cfg)?,
        Command::Angles(a) => cmd_angles(a, &cfg)?,
        Command::Tomography(a) => cmd_tomography(a, &cfg)?,
        Command::Bloch(a) => cmd_bloch(a, &cfg)?,
        Command::TwoQubit(a) => cmd_two_qubit(a, &cfg)?,
    };
    emit(&sink, &text)
}

/// Parses `args` (including the program name) and runs them.
pub fn run<I, T>(args: I) -> CliResult<()>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| invalid(e.to_string()))?;
    execute(&cli)
}

/// Entry point for the binary.
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("coherence-flow: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(num(0.1 + 0.2), "0.3");
        assert_eq!(num(-0.0), "0");
        assert_eq!(num(1.0 / 3.0), "0.333333333333");
        assert_eq!(num(f64::NAN), "nan");
        assert_eq!(round12(123456789.123456789), 123456789.123);
    }

    #[test]
    fn config_parsing() {
        let cfg = Config::parse("# comment\nkind = apt\na=1.5 # trailing\nt_max = 4\n").unwrap();
        assert_eq!(cfg.get::<String>("kind").unwrap().as_deref(), Some("apt"));
        assert_eq!(cfg.get::<f64>("t-max").unwrap(), Some(4.0));
        assert!(Config::parse("bogus = 1").is_err());
        assert!(Config::parse("kind apt").is_err());
        assert!(cfg.get::<f64>("kind").is_err());
    }

    #[test]
    fn flags_override_config() {
        let cfg = Config::parse("a = 0.5\nkind = apt").unwrap();
        let m = ModelArgs { a: Some(0.31), ..Default::default() };
        let r = resolve_model(&m, &cfg).unwrap();
        assert_eq!((r.params.a, r.params.kind), (0.31, SymmetryClass::Apt));
    }

    #[test]
    fn validation_errors_exit_2() {
        let e = run(["coherence-flow", "trace", "--kind", "pt", "--a", "0"]).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(e.to_string().contains("a must be > 0"));
        let e = run(["coherence-flow", "period", "--a", "0.3", "--format", "csv"]).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        let e = run(["coherence-flow", "trace", "--a", "0.3", "--state", "X"]).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn solver_failure_exit_3() {
        assert_eq!(CliError::from(Error::NoDecomposition { best_residual: 1.0, best_angles: vec![] }).exit_code(), 3);
    }

    #[test]
    fn io_failure_exit_4() {
        let e = run(["coherence-flow", "period", "--a", "0.3", "--config", "/nonexistent/cfg"]).unwrap_err();
        assert_eq!(e.exit_code(), 4);
    }
}
