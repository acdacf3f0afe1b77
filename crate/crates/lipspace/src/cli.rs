//! Command-line front end: scenario parsing and validation, one subcommand
//! per verification harness, deterministic seeding, and report emission as
//! a JSON envelope on stdout plus a flat CSV artifact.
//!
//! Exit codes: 0 success, 1 computational failure (the module error is
//! serialized to stderr as JSON), 2 usage error. Identical scenario and
//! seed produce byte-identical CSV. Worker threads are capped by
//! `--threads` or the LIPSPACE_THREADS environment variable.

use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::flatten::{verify_extension_estimates, Flattening, Mollifier};
use crate::geometry::{bmo_seminorm, GraphDomain, Sample};
use crate::green::{residual_decay_check, ModelKind, ModelOperator};
use crate::halfspace_ops::{
    estimate_norm_windowed, lemma1_verify, lemma1_standard_sweep, norm_sweep_windowed,
    KernelOperator, LOG_GRID_MAX, LOG_GRID_MIN, LOG_GRID_WIDE_MAX, LOG_GRID_WIDE_MIN,
};
use crate::multiindex::MultiIndex;
use crate::solver::{
    harmonic_extension_family, neumann_iteration, sharpness_counterexample, solve_dirichlet,
    trace_equivalence_check, AmbientData, EllipticOperator, NullSolutionField, SolveParams,
    SquareDomain,
};
use crate::spaces::SpaceParams;
use crate::whitney::{
    dirichlet_to_whitney, trace_array, whitney_besov_norm, whitney_to_dirichlet, BoundaryGrid,
};

#[derive(Parser, Debug)]
#[command(name = "lipspace", version, about = "weighted-space verification harnesses")]
pub struct Cli {
    /// cap on worker threads (overrides LIPSPACE_THREADS)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// directory for the report artifacts (<command>.json, <command>.csv)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// seed for every randomized estimate in the scenario
    #[arg(long, global = true, default_value_t = 7)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Mean-oscillation seminorm of a boundary fixture
    Bmo(BmoArgs),
    /// Besov norm of a derivative array traced on a graph boundary
    Besov(BesovArgs),
    /// Dirichlet-data/derivative-array round-trip gaps
    WhitneyRoundtrip(WhitneyArgs),
    /// Graph-flattening estimates and map round trip
    FlattenVerify(FlattenArgs),
    /// Operator-norm sweep for the reflected-kernel operators
    OpnormSweep(OpnormArgs),
    /// Two-weight parameter integral: anchor point or standard sweep
    Lemma1(Lemma1Args),
    /// Half-space Green residual decay products
    GreenResidual(GreenArgs),
    /// Dirichlet solve on the square for a named data case
    Solve(SolveArgs),
    /// Frozen-coefficient perturbation iteration
    Neumann(NeumannArgs),
    /// Boundary seminorm against the weighted bulk norm on null solutions
    TraceEquiv(TraceArgs),
    /// Exponent thresholds of the indefinite-coupling counterexample
    Mazya(MazyaArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct BmoArgs {
    /// built-in Heaviside fixture on a flat boundary
    #[arg(long)]
    pub step: bool,
    /// sawtooth slope for the gradient fixture
    #[arg(long, default_value_t = 0.5)]
    pub slope: f64,
    #[arg(long, default_value_t = 3)]
    pub teeth: usize,
    /// boundary sample count
    #[arg(long, default_value_t = 512)]
    pub samples: usize,
    /// ball radii for the oscillation sweep
    #[arg(long, value_delimiter = ',', num_args = 0.., default_values_t = [0.05, 0.1, 0.2])]
    pub radii: Vec<f64>,
    /// graph-domain JSON file overriding the built-in fixtures
    #[arg(long)]
    pub domain: Option<PathBuf>,
    #[arg(long)]
    pub selftest: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct BesovArgs {
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    /// boundary smoothness s ∈ (0,1); exactly one of --s / --a
    #[arg(long)]
    pub s: Option<f64>,
    /// weight power a; exactly one of --s / --a
    #[arg(long)]
    pub a: Option<f64>,
    /// derivative-array order (components |α| ≤ m−1)
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    #[arg(long, default_value_t = 192)]
    pub res: usize,
    #[arg(long, default_value_t = 0.5)]
    pub slope: f64,
    #[arg(long, default_value_t = 2)]
    pub teeth: usize,
    #[arg(long)]
    pub domain: Option<PathBuf>,
    #[arg(long)]
    pub selftest: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct WhitneyArgs {
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    #[arg(long, default_value_t = 256)]
    pub res: usize,
    #[arg(long, default_value_t = 0.6)]
    pub slope: f64,
    #[arg(long)]
    pub domain: Option<PathBuf>,
    #[arg(long)]
    pub selftest: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct FlattenArgs {
    #[arg(long, default_value_t = 0.5)]
    pub slope: f64,
    #[arg(long, default_value_t = 2)]
    pub teeth: usize,
    /// dyadic height levels for the estimate sweep
    #[arg(long, default_value_t = 5)]
    pub levels: usize,
    /// horizontal samples per height
    #[arg(long, default_value_t = 96)]
    pub samples: usize,
    /// mollifier quadrature nodes per dimension
    #[arg(long, default_value_t = 48)]
    pub nodes: usize,
    #[arg(long)]
    pub domain: Option<PathBuf>,
    #[arg(long)]
    pub selftest: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
pub enum SweepOp {
    Reflect,
    LogReflect,
}

#[derive(Args, Debug, Serialize)]
pub struct OpnormArgs {
    #[arg(long, value_enum, default_value_t = SweepOp::Reflect)]
    pub op: SweepOp,
    #[arg(long, value_delimiter = ',', num_args = 0.., default_values_t = [2.0])]
    pub p_list: Vec<f64>,
    /// smoothness sweep; exactly one of --s-list / --a-list
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    pub s_list: Option<Vec<f64>>,
    /// weight-power sweep; exactly one of --s-list / --a-list
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    pub a_list: Option<Vec<f64>>,
    #[arg(long, default_value_t = 400)]
    pub nodes: usize,
    #[arg(long, default_value_t = 3)]
    pub trials: usize,
    /// use the wide truncation window for closed-form benchmarks
    #[arg(long)]
    pub wide: bool,
    #[arg(long)]
    pub selftest: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct Lemma1Args {
    /// ambient dimension of the parameter integral
    #[arg(long = "N", default_value_t = 1)]
    pub dim: usize,
    #[arg(long, default_value_t = 1.0)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.5)]
    pub delta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    #[arg(long, default_value_t = 1.0)]
    pub b: f64,
    #[arg(long, default_value_t = 0.0)]
    pub zeta: f64,
    /// run the standard 27-point (a, b, ζ) sweep instead of one point
    #[arg(long)]
    pub sweep: bool,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long)]
    pub selftest: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
pub enum ModelOp {
    Laplace,
    Bilaplace,
}

#[derive(Args, Debug, Serialize)]
pub struct GreenArgs {
    #[arg(long, value_enum, default_value_t = ModelOp::Laplace)]
    pub op: ModelOp,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// side length of the point-pair grid
    #[arg(long, default_value_t = 8)]
    pub grid: usize,
    #[arg(long)]
    pub selftest: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveCase {
    /// g = x³ − 3xy², zero source
    HarmonicCubic,
    /// zero data, source 2π² sin(πx) sin(πy)
    Sine,
    /// g = x²y with its gradient, zero source
    BiharmonicCubic,
    /// zero data, source Δ²(x²(1−x)²y²(1−y)²)
    Bubble,
    /// zero data, zero source
    Zero,
}

#[derive(Args, Debug, Serialize)]
pub struct SolveArgs {
    /// JSON scenario file; overrides the inline flags
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ModelOp::Laplace)]
    pub op: ModelOp,
    #[arg(long, default_value_t = 32)]
    pub cells: usize,
    #[arg(long, default_value_t = 1.0)]
    pub size: f64,
    #[arg(long, value_enum, default_value_t = SolveCase::HarmonicCubic)]
    pub case: SolveCase,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[arg(long, default_value_t = 0.0)]
    pub a: f64,
    #[arg(long)]
    pub selftest: bool,
}

/// On-disk shape of `solve --config`.
#[derive(Debug, Deserialize)]
struct SolveConfig {
    op: String,
    #[serde(default = "default_cells")]
    cells: usize,
    #[serde(default = "default_size")]
    size: f64,
    case: String,
    #[serde(default = "default_p")]
    p: f64,
    #[serde(default)]
    a: f64,
}

fn default_cells() -> usize {
    32
}
fn default_size() -> f64 {
    1.0
}
fn default_p() -> f64 {
    2.0
}

#[derive(Args, Debug, Serialize)]
pub struct NeumannArgs {
    /// coefficient perturbation amplitude
    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,
    #[arg(long, default_value_t = 24)]
    pub cells: usize,
    #[arg(long, default_value_t = 60)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long)]
    pub selftest: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct TraceArgs {
    /// number of decaying boundary modes
    #[arg(long, default_value_t = 5)]
    pub modes: usize,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long, default_value_t = 96)]
    pub res: usize,
    #[arg(long)]
    pub selftest: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct MazyaArgs {
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value_t = 1.0)]
    pub eps: f64,
    #[arg(long, default_value_t = 6)]
    pub trials: usize,
    #[arg(long)]
    pub selftest: bool,
}

/// Canonical record of one run, embedded in the JSON envelope.
#[derive(Debug, Serialize)]
pub struct Scenario {
    pub command: String,
    pub params: Value,
    pub seed: u64,
    pub out_dir: Option<String>,
}

pub struct RunOutput {
    pub status: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parse argv, run the scenario, and print the reports.
pub fn run() -> i32 {
    let args: Vec<String> = std::env::args().collect();
    let out = run_with(&args);
    if !out.stdout.is_empty() {
        println!("{}", out.stdout);
    }
    if !out.stderr.is_empty() {
        eprintln!("{}", out.stderr);
    }
    out.status
}

/// Testable core of `run`: never prints, never exits.
pub fn run_with(args: &[String]) -> RunOutput {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => RunOutput {
                    status: 0,
                    stdout: rendered,
                    stderr: String::new(),
                },
                _ => RunOutput {
                    status: 2,
                    stdout: String::new(),
                    stderr: rendered,
                },
            };
        }
    };
    if let Some(t) = cli.threads {
        if t == 0 {
            return usage("--threads must be at least 1");
        }
        std::env::set_var("LIPSPACE_THREADS", t.to_string());
    }
    let scenario = Scenario {
        command: command_name(&cli.command).to_string(),
        params: command_params(&cli.command),
        seed: cli.seed,
        out_dir: cli.out.as_ref().map(|p| p.display().to_string()),
    };
    if let Err(msg) = validate(&cli.command) {
        return usage(&msg);
    }
    let started = Instant::now();
    match execute(&cli.command, cli.seed) {
        Ok((report, csv)) => {
            let envelope = json!({
                "command": scenario.command,
                "inputs": scenario.params,
                "seed": scenario.seed,
                "versions": { "lipspace": env!("CARGO_PKG_VERSION") },
                "wall_ms": started.elapsed().as_secs_f64() * 1e3,
                "report": report,
            });
            let stdout = serde_json::to_string_pretty(&envelope).unwrap();
            if let Some(dir) = &cli.out {
                if let Err(e) = write_artifacts(dir, &scenario.command, &stdout, &csv) {
                    return RunOutput {
                        status: 1,
                        stdout,
                        stderr: serde_json::to_string(&error_json(&e)).unwrap(),
                    };
                }
            }
            RunOutput {
                status: 0,
                stdout,
                stderr: String::new(),
            }
        }
        Err(e) => RunOutput {
            status: 1,
            stdout: String::new(),
            stderr: serde_json::to_string(&error_json(&e)).unwrap(),
        },
    }
}

fn usage(msg: &str) -> RunOutput {
    RunOutput {
        status: 2,
        stdout: String::new(),
        stderr: format!("usage error: {msg}"),
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Bmo(_) => "bmo",
        Command::Besov(_) => "besov",
        Command::WhitneyRoundtrip(_) => "whitney-roundtrip",
        Command::FlattenVerify(_) => "flatten-verify",
        Command::OpnormSweep(_) => "opnorm-sweep",
        Command::Lemma1(_) => "lemma1",
        Command::GreenResidual(_) => "green-residual",
        Command::Solve(_) => "solve",
        Command::Neumann(_) => "neumann",
        Command::TraceEquiv(_) => "trace-equiv",
        Command::Mazya(_) => "mazya",
    }
}

fn command_params(cmd: &Command) -> Value {
    match cmd {
        Command::Bmo(a) => serde_json::to_value(a).unwrap(),
        Command::Besov(a) => serde_json::to_value(a).unwrap(),
        Command::WhitneyRoundtrip(a) => serde_json::to_value(a).unwrap(),
        Command::FlattenVerify(a) => serde_json::to_value(a).unwrap(),
        Command::OpnormSweep(a) => serde_json::to_value(a).unwrap(),
        Command::Lemma1(a) => serde_json::to_value(a).unwrap(),
        Command::GreenResidual(a) => serde_json::to_value(a).unwrap(),
        Command::Solve(a) => serde_json::to_value(a).unwrap(),
        Command::Neumann(a) => serde_json::to_value(a).unwrap(),
        Command::TraceEquiv(a) => serde_json::to_value(a).unwrap(),
        Command::Mazya(a) => serde_json::to_value(a).unwrap(),
    }
}

/// Usage-level (exit 2) checks: sweep lists non-empty, exactly one of the
/// smoothness parameters given.
fn validate(cmd: &Command) -> std::result::Result<(), String> {
    match cmd {
        Command::Bmo(a) => {
            if a.radii.is_empty() {
                return Err("radius sweep list is empty".into());
            }
        }
        Command::Besov(a) => {
            if !a.selftest {
                resolve_smoothness(a.p, a.s, a.a)?;
            }
        }
        Command::OpnormSweep(a) => {
            if a.selftest {
                return Ok(());
            }
            if a.p_list.is_empty() {
                return Err("p sweep list is empty".into());
            }
            match (&a.s_list, &a.a_list) {
                (Some(s), None) => {
                    if s.is_empty() {
                        return Err("s sweep list is empty".into());
                    }
                }
                (None, Some(al)) => {
                    if al.is_empty() {
                        return Err("a sweep list is empty".into());
                    }
                }
                (Some(_), Some(_)) => {
                    return Err("give exactly one of --s-list and --a-list".into())
                }
                (None, None) => return Err("give exactly one of --s-list and --a-list".into()),
            }
        }
        Command::TraceEquiv(a) => {
            if !a.selftest {
                resolve_smoothness(a.p, a.s, a.a)?;
            }
        }
        _ => {}
    }
    Ok(())
}

/// Derive the missing one of (s, a) from s = 1 − a − 1/p; exactly one of
/// the two must be supplied.
fn resolve_smoothness(
    p: f64,
    s: Option<f64>,
    a: Option<f64>,
) -> std::result::Result<(f64, f64), String> {
    if !(p >= 1.0) {
        return Err("need p ≥ 1".into());
    }
    let (s, a) = match (s, a) {
        (Some(s), None) => (s, 1.0 - s - 1.0 / p),
        (None, Some(a)) => (1.0 - a - 1.0 / p, a),
        _ => return Err("give exactly one of --s and --a".into()),
    };
    if !(s > 0.0 && s < 1.0) {
        return Err(format!("derived smoothness s = {s} falls outside (0, 1)"));
    }
    Ok((s, a))
}

fn error_json(e: &Error) -> Value {
    let (kind, msg) = match e {
        Error::Domain(m) => ("domain", m),
        Error::Resolution(m) => ("resolution", m),
        Error::Numeric(m) => ("numeric", m),
        Error::Parameter(m) => ("parameter", m),
        Error::Index(m) => ("index", m),
        Error::Kernel(m) => ("kernel", m),
        Error::Solve(m) => ("solve", m),
        Error::Precondition(m) => ("precondition", m),
        Error::Degenerate(m) => ("degenerate", m),
        Error::Unsupported(m) => ("unsupported", m),
    };
    json!({ "error": { "kind": kind, "message": msg } })
}

fn write_artifacts(dir: &PathBuf, command: &str, envelope: &str, csv: &[u8]) -> Result<()> {
    std::fs::create_dir_all(dir)
        .map_err(|e| Error::Parameter(format!("cannot create output dir: {e}")))?;
    std::fs::write(dir.join(format!("{command}.json")), envelope)
        .map_err(|e| Error::Parameter(format!("cannot write report: {e}")))?;
    std::fs::write(dir.join(format!("{command}.csv")), csv)
        .map_err(|e| Error::Parameter(format!("cannot write report: {e}")))?;
    Ok(())
}

/// Graph-domain JSON document:
/// {"n":…, "phi_grid":[…], "cell":[L,H], "boundary_quadrature":"centroid"}.
#[derive(Debug, Deserialize)]
struct DomainSpec {
    n: usize,
    phi_grid: Vec<f64>,
    cell: [f64; 2],
    #[serde(default = "centroid")]
    boundary_quadrature: String,
}

fn centroid() -> String {
    "centroid".into()
}

fn load_domain(path: &PathBuf) -> Result<GraphDomain> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parameter(format!("cannot read domain file: {e}")))?;
    let spec: DomainSpec = serde_json::from_str(&text)
        .map_err(|e| Error::Parameter(format!("bad domain document: {e}")))?;
    if spec.boundary_quadrature != "centroid" {
        return Err(Error::Unsupported(
            "only centroid boundary quadrature is available".into(),
        ));
    }
    let grid_m = if spec.n == 3 {
        let m = (spec.phi_grid.len() as f64).sqrt().round() as usize;
        if m * m != spec.phi_grid.len() {
            return Err(Error::Parameter("phi grid is not square".into()));
        }
        m
    } else {
        spec.phi_grid.len()
    };
    GraphDomain::new(spec.n, spec.phi_grid, grid_m, spec.cell[0], spec.cell[1])
}

struct Check {
    name: &'static str,
    ok: bool,
    measured: f64,
}

fn finish_checks(checks: Vec<Check>) -> Result<(Value, Vec<u8>)> {
    let failed: Vec<&Check> = checks.iter().filter(|c| !c.ok).collect();
    if !failed.is_empty() {
        let list = failed
            .iter()
            .map(|c| format!("{} (measured {})", c.name, c.measured))
            .collect::<Vec<_>>()
            .join("; ");
        return Err(Error::Numeric(format!("selftest failed: {list}")));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["check", "ok", "measured"]).unwrap();
    for c in &checks {
        w.write_record([c.name.to_string(), "true".into(), c.measured.to_string()])
            .unwrap();
    }
    let csv = w.into_inner().unwrap();
    let report = json!({
        "selftest": checks.iter().map(|c| json!({
            "check": c.name, "ok": c.ok, "measured": c.measured,
        })).collect::<Vec<_>>(),
    });
    Ok((report, csv))
}

fn mi_label(alpha: &[usize]) -> String {
    alpha
        .iter()
        .map(|o| o.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn vec_label(v: &[f64]) -> String {
    v.iter()
        .map(|t| t.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn execute(cmd: &Command, seed: u64) -> Result<(Value, Vec<u8>)> {
    match cmd {
        Command::Bmo(a) => run_bmo(a),
        Command::Besov(a) => run_besov(a),
        Command::WhitneyRoundtrip(a) => run_whitney(a),
        Command::FlattenVerify(a) => run_flatten(a),
        Command::OpnormSweep(a) => run_opnorm(a, seed),
        Command::Lemma1(a) => run_lemma1(a),
        Command::GreenResidual(a) => run_green(a),
        Command::Solve(a) => run_solve(a),
        Command::Neumann(a) => run_neumann(a),
        Command::TraceEquiv(a) => run_trace(a),
        Command::Mazya(a) => run_mazya(a, seed),
    }
}

fn heaviside_fixture(samples: usize) -> Vec<Sample> {
    let h = 1.0 / samples as f64;
    (0..samples)
        .map(|i| {
            let x = (i as f64 + 0.5) * h;
            Sample::scalar([x, 0.0, 0.0], h, if x < 0.5 { 0.0 } else { 1.0 })
        })
        .collect()
}

fn gradient_fixture(dom: &GraphDomain, samples: usize) -> Vec<Sample> {
    let h = dom.cell_l / samples as f64;
    (0..samples)
        .map(|i| {
            let x = (i as f64 + 0.5) * h;
            Sample::scalar([x, 0.0, 0.0], h, dom.phi_grad(&[x])[0])
        })
        .collect()
}

fn run_bmo(a: &BmoArgs) -> Result<(Value, Vec<u8>)> {
    if a.selftest {
        let rep = bmo_seminorm(&heaviside_fixture(512), &[0.05, 0.1, 0.2])?;
        return finish_checks(vec![Check {
            name: "heaviside seminorm 0.5",
            ok: (rep.seminorm - 0.5).abs() <= 0.005,
            measured: rep.seminorm,
        }]);
    }
    let samples = if a.step {
        heaviside_fixture(a.samples)
    } else if let Some(path) = &a.domain {
        let dom = load_domain(path)?;
        gradient_fixture(&dom, a.samples)
    } else {
        let dom = GraphDomain::sawtooth(a.slope, a.teeth, 1.0, 1.0, 128);
        gradient_fixture(&dom, a.samples)
    };
    let rep = bmo_seminorm(&samples, &a.radii)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["radius", "sup_oscillation"]).unwrap();
    for (r, v) in &rep.radius_table {
        w.write_record([r.to_string(), v.to_string()]).unwrap();
    }
    let csv = w.into_inner().unwrap();
    Ok((serde_json::to_value(&rep).unwrap(), csv))
}

/// Smooth product-of-cosines field with derivatives of any order.
fn trig_field(x: &[f64], alpha: MultiIndex) -> f64 {
    let c: [f64; 3] = [1.0, 0.7, 0.4];
    let mut acc = 1.0;
    for (k, &ck) in c.iter().enumerate().take(x.len()) {
        let j = alpha[k] as u32;
        acc *= ck.powi(j as i32) * (ck * x[k] + j as f64 * std::f64::consts::FRAC_PI_2).cos();
    }
    acc
}

fn run_besov(a: &BesovArgs) -> Result<(Value, Vec<u8>)> {
    if a.selftest {
        // a constant array has no oscillation: every remainder vanishes
        let dom = GraphDomain::flat(2, 1.0, 1.0);
        let grid = BoundaryGrid::new(dom, 64)?;
        let wa = trace_array(&grid, 2, |_: &[f64], alpha: MultiIndex| {
            if alpha == [0usize; 3] {
                1.0
            } else {
                0.0
            }
        });
        let rep = whitney_besov_norm(&wa, 2.0, 0.5)?;
        let semi: f64 = rep.seminorm_parts.iter().sum();
        return finish_checks(vec![Check {
            name: "constant array seminorm 0",
            ok: semi <= 1e-12,
            measured: semi,
        }]);
    }
    let (s, _) = resolve_smoothness(a.p, a.s, a.a).map_err(Error::Parameter)?;
    let dom = match &a.domain {
        Some(path) => load_domain(path)?,
        None => GraphDomain::sawtooth(a.slope, a.teeth, 1.0, 1.0, 64),
    };
    let grid = BoundaryGrid::new(dom, a.res)?;
    let wa = trace_array(&grid, a.m, trig_field);
    let set = wa.index_set();
    let rep = whitney_besov_norm(&wa, a.p, s)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["alpha", "lp_part", "seminorm_part"]).unwrap();
    for ((alpha, lp), semi) in set.iter().zip(&rep.lp_parts).zip(&rep.seminorm_parts) {
        w.write_record([mi_label(alpha), lp.to_string(), semi.to_string()])
            .unwrap();
    }
    let csv = w.into_inner().unwrap();
    let report = json!({
        "p": a.p, "s": s, "m": a.m, "res": a.res,
        "lp_parts": rep.lp_parts,
        "seminorm_parts": rep.seminorm_parts,
        "total": rep.total,
    });
    Ok((report, csv))
}

/// Quadratic polynomial with closed-form derivatives of every order;
/// central differences are exact on it, so flat-boundary trace round
/// trips close to machine precision.
fn poly_field(x: &[f64], alpha: MultiIndex) -> f64 {
    const TERMS: &[(f64, [usize; 3])] = &[
        (1.0, [0, 0, 0]),
        (2.0, [1, 0, 0]),
        (-1.0, [0, 1, 0]),
        (0.5, [0, 0, 1]),
        (1.0, [1, 1, 0]),
        (-0.3, [1, 0, 1]),
        (0.7, [2, 0, 0]),
        (-0.4, [0, 2, 0]),
    ];
    let mut acc = 0.0;
    'term: for &(coef, pow) in TERMS {
        let mut c = coef;
        for k in 0..x.len() {
            if alpha[k] > pow[k] {
                continue 'term;
            }
            for fall in 0..alpha[k] {
                c *= (pow[k] - fall) as f64;
            }
            c *= x[k].powi((pow[k] - alpha[k]) as i32);
        }
        acc += c;
    }
    acc
}

/// trace → collapse to normal data → rebuild; exact when the tangential
/// differencing reproduces the field's surface derivatives.
fn trace_roundtrip_gap(dom: GraphDomain, m: usize, res: usize) -> Result<f64> {
    let grid = BoundaryGrid::new(dom, res)?;
    let wa = trace_array(&grid, m, poly_field);
    let dd = whitney_to_dirichlet(&wa);
    let back = dirichlet_to_whitney(&dd)?;
    let mut gap = 0.0f64;
    for (c0, c1) in wa.comps.iter().zip(&back.comps) {
        for (v0, v1) in c0.iter().zip(c1) {
            gap = gap.max((v0 - v1).abs());
        }
    }
    Ok(gap)
}

/// normal data → derivative array → collapse; a finite-sum identity on
/// any surface, checked on seeded random data.
fn data_roundtrip_gap(dom: GraphDomain, m: usize, res: usize, seed: u64) -> Result<f64> {
    use rand::Rng;
    let grid = BoundaryGrid::new(dom, res)?;
    let mut rng = crate::util::seeded_rng(seed);
    let comps: Vec<Vec<f64>> = (0..m)
        .map(|_| (0..grid.count()).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    let dd = crate::whitney::DirichletData { grid, m, comps };
    let wa = dirichlet_to_whitney(&dd)?;
    let back = whitney_to_dirichlet(&wa);
    let mut gap = 0.0f64;
    for (c0, c1) in dd.comps.iter().zip(&back.comps) {
        for (v0, v1) in c0.iter().zip(c1) {
            gap = gap.max((v0 - v1).abs());
        }
    }
    Ok(gap)
}

fn run_whitney(a: &WhitneyArgs) -> Result<(Value, Vec<u8>)> {
    if a.selftest {
        let trace = trace_roundtrip_gap(GraphDomain::flat(2, 1.0, 1.0), 2, 64)?;
        let data = data_roundtrip_gap(GraphDomain::sawtooth(0.9, 2, 1.0, 1.0, 16), 3, 48, 7)?;
        return finish_checks(vec![
            Check {
                name: "flat trace round trip exact",
                ok: trace <= 1e-12,
                measured: trace,
            },
            Check {
                name: "normal-data identity exact",
                ok: data <= 1e-12,
                measured: data,
            },
        ]);
    }
    let mut rows: Vec<(String, String, f64)> = Vec::new();
    let surfaces: Vec<(String, GraphDomain)> = match &a.domain {
        Some(path) => vec![("file".into(), load_domain(path)?)],
        None => vec![
            ("flat".into(), GraphDomain::flat(2, 1.0, 1.0)),
            (
                "sawtooth".into(),
                GraphDomain::sawtooth(a.slope, 2, 1.0, 1.0, 64),
            ),
        ],
    };
    for (name, dom) in surfaces {
        rows.push((
            name.clone(),
            "trace".into(),
            trace_roundtrip_gap(dom.clone(), a.m, a.res)?,
        ));
        rows.push((
            name,
            "normal-data".into(),
            data_roundtrip_gap(dom, a.m, a.res, 7)?,
        ));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["surface", "direction", "order", "res", "max_gap"])
        .unwrap();
    for (surface, direction, gap) in &rows {
        w.write_record([
            surface.clone(),
            direction.clone(),
            a.m.to_string(),
            a.res.to_string(),
            gap.to_string(),
        ])
        .unwrap();
    }
    let csv = w.into_inner().unwrap();
    let report = json!({
        "rows": rows.iter().map(|(surface, direction, gap)| json!({
            "surface": surface, "direction": direction,
            "order": a.m, "res": a.res, "max_gap": gap,
        })).collect::<Vec<_>>(),
    });
    Ok((report, csv))
}

fn run_flatten(a: &FlattenArgs) -> Result<(Value, Vec<u8>)> {
    let dom = match &a.domain {
        Some(path) => load_domain(path)?,
        None => GraphDomain::sawtooth(a.slope, a.teeth, 1.0, 2.0, 16),
    };
    let flat = Flattening::new(dom.clone(), a.nodes)?;
    // map round trip over a small interior probe grid
    let mut round_trip = 0.0f64;
    for i in 1..5 {
        for j in 1..5 {
            let x = [0.2 * i as f64, 0.1 + 0.4 * j as f64];
            let fwd = flat.lambda_map(&x)?;
            let back = flat.kappa_map(&fwd)?;
            let err = (back[0] - x[0]).abs().max((back[1] - x[1]).abs());
            round_trip = round_trip.max(err);
        }
    }
    if a.selftest {
        return finish_checks(vec![Check {
            name: "map round trip 1e-9",
            ok: round_trip <= 1e-9,
            measured: round_trip,
        }]);
    }
    let moll = Mollifier::new(dom.n - 1, a.nodes)?;
    let rep = verify_extension_estimates(&dom, &moll, a.levels, a.samples)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["height", "sup_grad", "sup_hess", "sup_gap"]).unwrap();
    for (k, h) in rep.heights.iter().enumerate() {
        w.write_record([
            h.to_string(),
            rep.sup_grad[k].to_string(),
            rep.sup_hess[k].to_string(),
            rep.sup_gap[k].to_string(),
        ])
        .unwrap();
    }
    let csv = w.into_inner().unwrap();
    let report = json!({
        "grad_bmo": rep.grad_bmo,
        "grad_extension_bmo": rep.grad_extension_bmo,
        "exponent_hess": rep.exponent_hess,
        "exponent_gap": rep.exponent_gap,
        "round_trip": round_trip,
    });
    Ok((report, csv))
}

fn run_opnorm(a: &OpnormArgs, seed: u64) -> Result<(Value, Vec<u8>)> {
    if a.selftest {
        let params = SpaceParams::new(2.0, 0.0, 1)?;
        let est = estimate_norm_windowed(
            &KernelOperator::Reflect,
            &params,
            LOG_GRID_WIDE_MIN,
            LOG_GRID_WIDE_MAX,
            600,
            3,
            seed,
        )?;
        let pi = std::f64::consts::PI;
        return finish_checks(vec![Check {
            name: "p=2 benchmark within 5% of pi",
            ok: (est.best() - pi).abs() <= 0.05 * pi,
            measured: est.best(),
        }]);
    }
    let op = match a.op {
        SweepOp::Reflect => KernelOperator::Reflect,
        SweepOp::LogReflect => KernelOperator::LogReflect,
    };
    // canonicalize the sweep to s-values per p
    let (lo, hi) = if a.wide {
        (LOG_GRID_WIDE_MIN, LOG_GRID_WIDE_MAX)
    } else {
        (LOG_GRID_MIN, LOG_GRID_MAX)
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["op", "p", "s", "a", "empirical", "reference", "product"])
        .unwrap();
    let op_name = match a.op {
        SweepOp::Reflect => "reflect",
        SweepOp::LogReflect => "log-reflect",
    };
    let mut rows_json = Vec::new();
    for &p in &a.p_list {
        let s_values: Vec<f64> = match (&a.s_list, &a.a_list) {
            (Some(s), None) => s.clone(),
            (None, Some(al)) => al
                .iter()
                .map(|&av| resolve_smoothness(p, None, Some(av)).map(|t| t.0))
                .collect::<std::result::Result<_, _>>()
                .map_err(Error::Parameter)?,
            _ => unreachable!("validated earlier"),
        };
        let rows = norm_sweep_windowed(&op, &[p], &s_values, lo, hi, a.nodes, a.trials, seed)?;
        for r in rows {
            w.write_record([
                op_name.to_string(),
                r.p.to_string(),
                r.s.to_string(),
                r.a.to_string(),
                r.empirical.to_string(),
                r.reference.to_string(),
                r.product.to_string(),
            ])
            .unwrap();
            rows_json.push(json!({
                "op": op_name, "p": r.p, "s": r.s, "a": r.a,
                "empirical": r.empirical, "reference": r.reference,
                "product": r.product,
            }));
        }
    }
    let csv = w.into_inner().unwrap();
    Ok((json!({ "rows": rows_json, "nodes": a.nodes, "window": [lo, hi] }), csv))
}

fn run_lemma1(a: &Lemma1Args) -> Result<(Value, Vec<u8>)> {
    if a.selftest {
        let rep = lemma1_verify(1, 1.0, 0.5, &[(1.0, 1.0, 0.0)], 1e-10)?;
        let anchor = 4.0 / 3.0 * 2.0f64.sqrt();
        return finish_checks(vec![
            Check {
                name: "anchor lhs 4/3",
                ok: (rep.rows[0].lhs - 4.0 / 3.0).abs() <= 1e-8,
                measured: rep.rows[0].lhs,
            },
            Check {
                name: "anchor ratio 4sqrt(2)/3",
                ok: (rep.max_ratio - anchor).abs() <= 1e-6,
                measured: rep.max_ratio,
            },
        ]);
    }
    let samples: Vec<(f64, f64, f64)> = if a.sweep {
        lemma1_standard_sweep()
    } else {
        vec![(a.a, a.b, a.zeta)]
    };
    let rep = lemma1_verify(a.dim, a.eps, a.delta, &samples, a.tol)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["a", "b", "zeta", "lhs", "ratio"]).unwrap();
    for r in &rep.rows {
        w.write_record([
            r.a.to_string(),
            r.b.to_string(),
            r.zeta.to_string(),
            r.lhs.to_string(),
            r.ratio.to_string(),
        ])
        .unwrap();
    }
    let csv = w.into_inner().unwrap();
    let report = if a.sweep {
        serde_json::to_value(&rep).unwrap()
    } else {
        json!({ "lhs": rep.rows[0].lhs, "ratio": rep.rows[0].ratio })
    };
    Ok((report, csv))
}

fn pair_grid(n: usize, g: usize) -> Vec<(Vec<f64>, Vec<f64>)> {
    let mut pairs = Vec::with_capacity(g * g);
    for i in 0..g {
        for j in 0..g {
            let mut x = vec![0.0; n];
            x[n - 1] = 0.5 + 0.2 * i as f64;
            let mut y = vec![0.0; n];
            y[0] = 0.3 * j as f64;
            y[n - 1] = 0.5 + 0.15 * j as f64;
            pairs.push((x, y));
        }
    }
    pairs
}

fn run_green(a: &GreenArgs) -> Result<(Value, Vec<u8>)> {
    let kind = match a.op {
        ModelOp::Laplace => ModelKind::Laplace,
        ModelOp::Bilaplace => ModelKind::Bilaplace,
    };
    if a.selftest {
        let op = ModelOperator::new(ModelKind::Laplace, 2)?;
        let rep = residual_decay_check(&op, &[(vec![0.0, 1.0], vec![0.0, 1.0])])?;
        let row = rep
            .rows
            .iter()
            .find(|r| r.alpha == [0, 1] && r.beta == [0, 1])
            .ok_or_else(|| Error::Numeric("anchor row missing".into()))?;
        let target = 1.0 / (2.0 * std::f64::consts::PI);
        return finish_checks(vec![Check {
            name: "planar anchor product 1/(2pi)",
            ok: (row.product - target).abs() <= 0.02 * target,
            measured: row.product,
        }]);
    }
    let op = ModelOperator::new(kind, a.n)?;
    if a.grid == 0 {
        return Err(Error::Parameter("pair grid must be nonempty".into()));
    }
    let rep = residual_decay_check(&op, &pair_grid(a.n, a.grid))?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["x", "y", "alpha", "beta", "value", "product_with_power"])
        .unwrap();
    for r in &rep.rows {
        w.write_record([
            vec_label(&r.x),
            vec_label(&r.y),
            mi_label(&r.alpha),
            mi_label(&r.beta),
            r.value.to_string(),
            r.product.to_string(),
        ])
        .unwrap();
    }
    let csv = w.into_inner().unwrap();
    let report = json!({
        "pairs": a.grid * a.grid,
        "sup_product": rep.sup_product,
        "max_fd_drift": rep.max_fd_drift,
    });
    Ok((report, csv))
}

fn case_data(case: SolveCase) -> (AmbientData, Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>) {
    match case {
        SolveCase::HarmonicCubic => (
            AmbientData::with_gradient(
                |x, y| x * x * x - 3.0 * x * y * y,
                |x, y| (3.0 * x * x - 3.0 * y * y, -6.0 * x * y),
            ),
            Arc::new(|_, _| 0.0),
        ),
        SolveCase::Sine => (
            AmbientData::zero(),
            Arc::new(|x: f64, y: f64| {
                let pi = std::f64::consts::PI;
                2.0 * pi * pi * (pi * x).sin() * (pi * y).sin()
            }),
        ),
        SolveCase::BiharmonicCubic => (
            AmbientData::with_gradient(|x, y| x * x * y, |x, y| (2.0 * x * y, x * x)),
            Arc::new(|_, _| 0.0),
        ),
        SolveCase::Bubble => (
            AmbientData::zero(),
            Arc::new(|x: f64, y: f64| {
                let ax = x * x * (1.0 - x) * (1.0 - x);
                let by = y * y * (1.0 - y) * (1.0 - y);
                let axpp = 2.0 - 12.0 * x + 12.0 * x * x;
                let bypp = 2.0 - 12.0 * y + 12.0 * y * y;
                24.0 * by + 2.0 * axpp * bypp + 24.0 * ax
            }),
        ),
        SolveCase::Zero => (AmbientData::zero(), Arc::new(|_, _| 0.0)),
    }
}

fn parse_enum<T: ValueEnum>(label: &str, value: &str) -> Result<T> {
    T::from_str(value, true).map_err(|_| Error::Parameter(format!("unknown {label} '{value}'")))
}

fn run_solve(a: &SolveArgs) -> Result<(Value, Vec<u8>)> {
    let (op_kind, cells, size, case, p, wa) = match &a.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Parameter(format!("cannot read config: {e}")))?;
            let cfg: SolveConfig = serde_json::from_str(&text)
                .map_err(|e| Error::Parameter(format!("bad config document: {e}")))?;
            let op: ModelOp = parse_enum("operator", &cfg.op)?;
            let case: SolveCase = parse_enum("case", &cfg.case)?;
            (op, cfg.cells, cfg.size, case, cfg.p, cfg.a)
        }
        None => (a.op, a.cells, a.size, a.case, a.p, a.a),
    };
    if a.selftest {
        let dom = SquareDomain::new(12, 1.0)?;
        let op = EllipticOperator::laplacian(2);
        let zero = solve_dirichlet(
            &op,
            &dom,
            &|_, _| 0.0,
            &AmbientData::zero(),
            &SolveParams::default(),
        )?;
        let sup_zero = zero.solution.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let op2 = EllipticOperator::bilaplacian(2);
        let (g, f) = case_data(SolveCase::BiharmonicCubic);
        let dom2 = SquareDomain::new(8, 1.0)?;
        let rep = solve_dirichlet(&op2, &dom2, f.as_ref(), &g, &SolveParams::default())?;
        let sup_cubic = rep
            .points
            .iter()
            .zip(&rep.solution)
            .map(|(pt, v)| (v - pt[0] * pt[0] * pt[1]).abs())
            .fold(0.0f64, f64::max);
        return finish_checks(vec![
            Check {
                name: "zero data gives zero",
                ok: sup_zero <= 1e-12,
                measured: sup_zero,
            },
            Check {
                name: "cubic recovered exactly",
                ok: sup_cubic <= 1e-10,
                measured: sup_cubic,
            },
        ]);
    }
    let op = match op_kind {
        ModelOp::Laplace => EllipticOperator::laplacian(2),
        ModelOp::Bilaplace => EllipticOperator::bilaplacian(2),
    };
    let dom = SquareDomain::new(cells, size)?;
    let (g, f) = case_data(case);
    let params = SolveParams {
        p,
        a: wa,
        ..SolveParams::default()
    };
    let rep = solve_dirichlet(&op, &dom, f.as_ref(), &g, &params)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["x", "y", "value"]).unwrap();
    for (pt, v) in rep.points.iter().zip(&rep.solution) {
        w.write_record([pt[0].to_string(), pt[1].to_string(), v.to_string()])
            .unwrap();
    }
    let csv = w.into_inner().unwrap();
    let report = json!({
        "cells": rep.cells,
        "h": rep.h,
        "order": rep.order,
        "iterations": rep.iterations,
        "residual": rep.residual,
        "energy_form": rep.energy_form,
        "energy_pair": rep.energy_pair,
        "weighted_norm": rep.weighted_norm,
        "data_norm": rep.data_norm,
    });
    Ok((report, csv))
}

fn run_neumann(a: &NeumannArgs) -> Result<(Value, Vec<u8>)> {
    let pi = std::f64::consts::PI;
    let rough = move |x: f64, y: f64| (2.0 * pi * x).cos() * (2.0 * pi * y).cos();
    let source = move |x: f64, y: f64| (pi * x).sin() * (pi * y).sin();
    if a.selftest {
        let dom = SquareDomain::new(16, 1.0)?;
        let rep = neumann_iteration(&dom, 0.0, &rough, &source, 10, 1e-10)?;
        return finish_checks(vec![Check {
            name: "zero perturbation converges in one step",
            ok: rep.converged && rep.iterations == 1,
            measured: rep.iterations as f64,
        }]);
    }
    let dom = SquareDomain::new(a.cells, 1.0)?;
    let rep = neumann_iteration(&dom, a.delta, &rough, &source, a.max_iter, a.tol)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["iter", "residual"]).unwrap();
    for (k, r) in rep.residuals.iter().enumerate() {
        w.write_record([(k + 1).to_string(), r.to_string()]).unwrap();
    }
    let csv = w.into_inner().unwrap();
    Ok((serde_json::to_value(&rep).unwrap(), csv))
}

fn run_trace(a: &TraceArgs) -> Result<(Value, Vec<u8>)> {
    if a.selftest {
        let family = harmonic_extension_family(2);
        let rep = trace_equivalence_check(&family, 2.0, 0.5, 48)?;
        let doubled: Vec<NullSolutionField> = family
            .iter()
            .map(|sol| {
                let b = sol.boundary.clone();
                let g = sol.gradient.clone();
                NullSolutionField {
                    label: sol.label.clone(),
                    boundary: Arc::new(move |t| 2.0 * b(t)),
                    gradient: Arc::new(move |x, y| {
                        let (gx, gy) = g(x, y);
                        (2.0 * gx, 2.0 * gy)
                    }),
                }
            })
            .collect();
        let rep2 = trace_equivalence_check(&doubled, 2.0, 0.5, 48)?;
        let drift = rep
            .rows
            .iter()
            .zip(&rep2.rows)
            .map(|(r1, r2)| (r1.ratio - r2.ratio).abs() / r1.ratio)
            .fold(0.0f64, f64::max);
        return finish_checks(vec![
            Check {
                name: "bracket within 20x",
                ok: rep.bracket <= 20.0,
                measured: rep.bracket,
            },
            Check {
                name: "scale invariance",
                ok: drift <= 1e-10,
                measured: drift,
            },
        ]);
    }
    let (s, _) = resolve_smoothness(a.p, a.s, a.a).map_err(Error::Parameter)?;
    if a.modes == 0 {
        return Err(Error::Parameter("need at least one mode".into()));
    }
    let family = harmonic_extension_family(a.modes);
    let rep = trace_equivalence_check(&family, a.p, s, a.res)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["label", "lhs", "rhs", "ratio", "skipped"]).unwrap();
    for r in &rep.rows {
        w.write_record([
            r.label.clone(),
            r.lhs.to_string(),
            r.rhs.to_string(),
            r.ratio.to_string(),
            r.skipped.to_string(),
        ])
        .unwrap();
    }
    let csv = w.into_inner().unwrap();
    Ok((serde_json::to_value(&rep).unwrap(), csv))
}

fn run_mazya(a: &MazyaArgs, seed: u64) -> Result<(Value, Vec<u8>)> {
    if a.selftest {
        let rep = sharpness_counterexample(3, 1.0, 4, seed)?;
        return finish_checks(vec![
            Check {
                name: "theta anchor 0.863803",
                ok: (rep.theta - 0.863803).abs() <= 1e-5,
                measured: rep.theta,
            },
            Check {
                name: "p* anchor 2.640385",
                ok: (rep.p_star - 2.640385).abs() <= 1e-4,
                measured: rep.p_star,
            },
            Check {
                name: "weak residual below 1e-2",
                ok: rep.residual <= 1e-2,
                measured: rep.residual,
            },
        ]);
    }
    let rep = sharpness_counterexample(a.n, a.eps, a.trials, seed)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["n", "eps", "theta", "p_star", "residual"]).unwrap();
    w.write_record([
        rep.n.to_string(),
        rep.epsilon.to_string(),
        rep.theta.to_string(),
        rep.p_star.to_string(),
        rep.residual.to_string(),
    ])
    .unwrap();
    let csv = w.into_inner().unwrap();
    Ok((serde_json::to_value(&rep).unwrap(), csv))
}
