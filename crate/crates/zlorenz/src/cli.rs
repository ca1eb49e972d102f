//! The `zlorenz` command line.
//!
//! Exit codes: 0 on success, 2 for invalid flags, scenarios or input files,
//! 3 when integration or the Lyapunov estimate fails numerically.
//!
//! Relative `--scenario` paths are resolved against `ZLORENZ_SCENARIO_DIR`
//! when that variable is set.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use thiserror::Error;
use zlorenz_core::chaos::{lyapunov_max, LyapunovConfig, LyapunovEstimate};
use zlorenz_core::covering::{color_of_angle, cover_trajectory, ColorConvention, ColoredPoint, CoverError};
use zlorenz_core::dynamics::{fixed_points, Equilibrium, SystemSpec};
use zlorenz_core::integrate::IntegratorConfig;
use zlorenz_core::params::{NormalizedParams, StandardParams};
use zlorenz_core::state::CartesianState;
use zlorenz_core::trajectory::{simulate, Trajectory, TrajectoryMeta};

use crate::csv::{load_csv, save_csv, CsvError};
use crate::scenario::{self, ColorBy, OutputDoc, OutputKind, ScenarioDoc, ScenarioError, SystemDoc, TimeDoc};
use crate::svg::{render_svg, Projection, RenderOptions};
use crate::table::{format_table, par_chaos_table};

pub const SCENARIO_DIR_VAR: &str = "ZLORENZ_SCENARIO_DIR";

pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

impl From<ScenarioError> for CliError {
    fn from(e: ScenarioError) -> Self {
        CliError::Config(e.to_string())
    }
}

fn csv_err(path: &Path) -> impl Fn(CsvError) -> CliError + '_ {
    move |e| CliError::Config(format!("{}: {e}", path.display()))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
}

#[derive(Debug, Parser)]
#[command(name = "zlorenz", version, about = "Lorenz system, its normalized form, quotient and Zn-extensions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate a class member and write CSV or SVG output
    Simulate(SimulateArgs),
    /// Convert a trajectory between standard and normalized coordinates
    Transform(TransformArgs),
    /// Push a trajectory through the n-fold covering and color it by sheet
    Cover(CoverArgs),
    /// Quotient a trajectory by the rotation group (drops the color channel)
    Factor(FactorArgs),
    /// Simulate the n-fold extension from the lift of a trajectory's first sample
    Extend(ExtendArgs),
    /// Estimate the largest Lyapunov exponent
    Lyapunov(LyapunovArgs),
    /// Compare largest Lyapunov exponents of several members in parallel
    ChaosTable(ChaosTableArgs),
    /// List the closed-form equilibria of a member
    FixedPoints(FixedPointsArgs),
    /// Plot a two-coordinate projection of a trajectory CSV as SVG
    Render(RenderArgs),
}

fn parse_triple(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated numbers, got {s:?}"));
    }
    let mut out = [0.0; 3];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = p.trim().parse().map_err(|_| format!("{p:?} is not a number"))?;
    }
    Ok(out)
}

/// System selection; each flag mirrors the scenario key `system.<name>`.
#[derive(Debug, Clone, Default, Args)]
pub struct SystemArgs {
    /// Family: standard, l2, l1 or ln
    #[arg(long, value_name = "FAMILY")]
    pub system: Option<String>,
    /// Symmetry order of the ln family (n >= 1)
    #[arg(long)]
    pub n: Option<i64>,
    /// Standard parameter sigma [default: 10]
    #[arg(long, allow_hyphen_values = true)]
    pub sigma: Option<f64>,
    /// Standard parameter r [default: 28]
    #[arg(long, visible_alias = "r", allow_hyphen_values = true)]
    pub rayleigh: Option<f64>,
    /// Standard parameter b [default: 8/3]
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,
    /// Normalized parameter mu (give mu, beta and gamma together)
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<f64>,
    /// Normalized parameter beta
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    /// Normalized parameter gamma
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    /// Derive mu, beta, gamma from sigma, r, b [default: true]
    #[arg(long, value_name = "BOOL")]
    pub normalize: Option<bool>,
    /// Shorthand for the parameter flags, e.g. sigma=10,r=28,b=2.6667 or mu=0.67,beta=0.16,gamma=0.87
    #[arg(long, value_name = "KEY=VALUE,...", value_parser = parse_params, allow_hyphen_values = true)]
    pub params: Option<ParamList>,
}

/// `key=value` pairs given to `--params`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamList(pub Vec<(String, f64)>);

fn parse_params(s: &str) -> Result<ParamList, String> {
    s.split(',')
        .map(|kv| {
            let (k, v) = kv.split_once('=').ok_or_else(|| format!("{kv:?} is not KEY=VALUE"))?;
            let key = match k.trim() {
                "r" => "rayleigh",
                k @ ("sigma" | "rayleigh" | "b" | "mu" | "beta" | "gamma") => k,
                other => return Err(format!("unknown parameter {other:?}; expected sigma, r, b, mu, beta or gamma")),
            };
            let value = v.trim().parse().map_err(|_| format!("{v:?} is not a number"))?;
            Ok((key.to_string(), value))
        })
        .collect::<Result<_, _>>()
        .map(ParamList)
}

impl SystemArgs {
    fn doc(&self) -> SystemDoc {
        let from_params =
            |key: &str| self.params.as_ref().and_then(|p| p.0.iter().rev().find(|(k, _)| k == key).map(|kv| kv.1));
        SystemDoc {
            family: self.system.clone(),
            n: self.n,
            sigma: self.sigma.or_else(|| from_params("sigma")),
            rayleigh: self.rayleigh.or_else(|| from_params("rayleigh")),
            b: self.b.or_else(|| from_params("b")),
            mu: self.mu.or_else(|| from_params("mu")),
            beta: self.beta.or_else(|| from_params("beta")),
            gamma: self.gamma.or_else(|| from_params("gamma")),
            normalize: self.normalize,
        }
    }

    fn any(&self) -> bool {
        self.doc() != SystemDoc::default()
    }
}

/// Integrator settings; each flag mirrors the scenario key `time.<name>`.
#[derive(Debug, Clone, Default, Args)]
pub struct TimeArgs {
    /// Start time [default: 0]
    #[arg(long, allow_hyphen_values = true)]
    pub t0: Option<f64>,
    /// End time
    #[arg(long, allow_hyphen_values = true)]
    pub t1: Option<f64>,
    /// Integrator: fixed (RK4) or adaptive (Dormand-Prince) [default: adaptive]
    #[arg(long)]
    pub mode: Option<String>,
    /// Fixed step, or initial step guess when adaptive [default: 0.001]
    #[arg(long)]
    pub step: Option<f64>,
    /// Relative tolerance [default: 1e-9]
    #[arg(long)]
    pub rel_tol: Option<f64>,
    /// Absolute tolerance [default: 1e-12]
    #[arg(long)]
    pub abs_tol: Option<f64>,
    /// Largest adaptive step [default: 0.1]
    #[arg(long)]
    pub max_step: Option<f64>,
    /// Smallest adaptive step before giving up [default: 1e-12]
    #[arg(long)]
    pub min_step: Option<f64>,
    /// Output sample spacing [default: 0.01]
    #[arg(long)]
    pub sample_interval: Option<f64>,
}

impl TimeArgs {
    fn doc(&self) -> TimeDoc {
        TimeDoc {
            t0: self.t0,
            t1: self.t1,
            mode: self.mode.clone(),
            step: self.step,
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_step: self.max_step,
            min_step: self.min_step,
            sample_interval: self.sample_interval,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ColorByArg {
    None,
    Sector,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Scenario JSON file; flags override its values
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    #[command(flatten)]
    pub system: SystemArgs,
    /// Initial state x,y,z in Cartesian coordinates [default: member-specific]
    #[arg(long, value_parser = parse_triple, allow_hyphen_values = true)]
    pub x0: Option<[f64; 3]>,
    #[command(flatten)]
    pub time: TimeArgs,
    /// Write the trajectory as CSV (replaces scenario outputs)
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Write an SVG plot (replaces scenario outputs)
    #[arg(long, value_name = "PATH")]
    pub svg: Option<PathBuf>,
    /// Projection for --svg
    #[arg(long, default_value = "x,z")]
    pub proj: String,
    /// Color channel for --out and --svg
    #[arg(long, value_enum, default_value_t = ColorByArg::None)]
    pub color_by: ColorByArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Direction {
    /// Standard coordinates to normalized
    StdToL2,
    /// Normalized coordinates to standard
    L2ToStd,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    #[arg(long, value_enum)]
    pub direction: Direction,
    /// Standard parameter sigma [default: from input metadata, else 10]
    #[arg(long, allow_hyphen_values = true)]
    pub sigma: Option<f64>,
    /// Standard parameter r [default: from input metadata, else 28]
    #[arg(long, visible_alias = "r", allow_hyphen_values = true)]
    pub rayleigh: Option<f64>,
    /// Standard parameter b [default: from input metadata, else 8/3]
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,
    /// Input trajectory CSV
    #[arg(long = "in", value_name = "PATH")]
    pub input: PathBuf,
    /// Output trajectory CSV
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CoverArgs {
    /// Fold count of the covering
    #[arg(long, default_value_t = 2)]
    pub n: u32,
    #[arg(long = "in", value_name = "PATH")]
    pub input: PathBuf,
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct FactorArgs {
    /// Order of the rotation group to quotient by
    #[arg(long, default_value_t = 2)]
    pub n: u32,
    #[arg(long = "in", value_name = "PATH")]
    pub input: PathBuf,
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExtendArgs {
    /// Fold count of the covering
    #[arg(long, default_value_t = 3)]
    pub n: u32,
    /// Sheet the lifted initial condition starts on
    #[arg(long, default_value_t = 0)]
    pub color: u32,
    /// End time [default: last input time]
    #[arg(long, allow_hyphen_values = true)]
    pub t1: Option<f64>,
    /// Normalized parameter mu [default: from input metadata, else canonical]
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    #[arg(long = "in", value_name = "PATH")]
    pub input: PathBuf,
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct LyapunovSettings {
    /// Accumulation time after the transient (at least 100)
    #[arg(long = "t-total", visible_alias = "total-time", default_value_t = 2000.0)]
    pub total_time: f64,
    /// Renormalization interval
    #[arg(long, default_value_t = 0.5)]
    pub tau: f64,
    /// Initial separation
    #[arg(long, default_value_t = 1e-8)]
    pub delta0: f64,
    /// Time discarded before accumulation
    #[arg(long, default_value_t = 50.0)]
    pub transient: f64,
    /// Seed for the initial separation direction
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Relative tolerance
    #[arg(long, default_value_t = 1e-10)]
    pub rel_tol: f64,
    /// Absolute tolerance
    #[arg(long, default_value_t = 1e-12)]
    pub abs_tol: f64,
}

impl LyapunovSettings {
    fn config(&self) -> Result<LyapunovConfig, CliError> {
        let cfg = LyapunovConfig {
            total_time: self.total_time,
            tau: self.tau,
            delta0: self.delta0,
            transient: self.transient,
            seed: self.seed,
            integrator: IntegratorConfig::adaptive(self.rel_tol, self.abs_tol),
        };
        cfg.validate().map_err(|e| {
            let hint = match e {
                zlorenz_core::chaos::LyapunovError::Config { key: "total_time", .. } => {
                    " (--t-total must be at least 100)"
                }
                zlorenz_core::chaos::LyapunovError::Config { key: "tau", .. } => {
                    " (--tau must be positive and at most t-total/10)"
                }
                _ => "",
            };
            CliError::Config(format!("{e}{hint}"))
        })?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct LyapunovArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    /// Initial state x,y,z in Cartesian coordinates [default: member-specific]
    #[arg(long, value_parser = parse_triple, allow_hyphen_values = true)]
    pub x0: Option<[f64; 3]>,
    #[command(flatten)]
    pub settings: LyapunovSettings,
    /// Write (time, running estimate) pairs as CSV
    #[arg(long, value_name = "PATH")]
    pub convergence: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ChaosTableArgs {
    /// Comma-separated members, e.g. standard,l2,l1,l3 (lN is the ln family with n=N)
    #[arg(long, default_value = "l2,l1,l3")]
    pub systems: String,
    /// Normalized parameter mu [default: canonical]
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    #[command(flatten)]
    pub settings: LyapunovSettings,
}

#[derive(Debug, Args)]
pub struct FixedPointsArgs {
    #[command(flatten)]
    pub system: SystemArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RenderColor {
    /// Use the color channel when the file has one
    Auto,
    /// Single stroke color
    None,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[arg(long = "in", value_name = "PATH")]
    pub input: PathBuf,
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
    /// Horizontal and vertical coordinates (x, y, z, radius, angle)
    #[arg(long, default_value = "x,z")]
    pub proj: String,
    /// Drop samples before this time
    #[arg(long, allow_hyphen_values = true)]
    pub from: Option<f64>,
    #[arg(long, value_enum, default_value_t = RenderColor::Auto)]
    pub color: RenderColor,
    #[arg(long)]
    pub title: Option<String>,
    #[arg(long, default_value_t = 800)]
    pub width: u32,
    #[arg(long, default_value_t = 600)]
    pub height: u32,
}

/// The long help of `zlorenz` or one of its subcommands.
pub fn help_text(sub: Option<&str>) -> Option<String> {
    let mut cmd = Cli::command().term_width(100);
    cmd.build();
    let target = match sub {
        None => &mut cmd,
        Some(name) => cmd.find_subcommand_mut(name)?,
    };
    Some(target.render_long_help().to_string())
}

pub fn subcommand_names() -> Vec<String> {
    Cli::command().get_subcommands().map(|c| c.get_name().to_string()).collect()
}

pub fn main_with<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_CONFIG) } else { ExitCode::SUCCESS };
        }
    };
    let stdout = std::io::stdout();
    match run(cli, &mut stdout.lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate(a) => simulate_cmd(a, out),
        Command::Transform(a) => transform_cmd(a, out),
        Command::Cover(a) => cover_cmd(a, out),
        Command::Factor(a) => factor_cmd(a, out),
        Command::Extend(a) => extend_cmd(a, out),
        Command::Lyapunov(a) => lyapunov_cmd(a, out),
        Command::ChaosTable(a) => chaos_table_cmd(a, out),
        Command::FixedPoints(a) => fixed_points_cmd(a, out),
        Command::Render(a) => render_cmd(a, out),
    }
}

macro_rules! say {
    ($out:expr, $($arg:tt)*) => {
        writeln!($out, $($arg)*).map_err(|e| CliError::Config(format!("cannot write output: {e}")))?
    };
}

pub fn resolve_scenario_path(path: &Path) -> PathBuf {
    match std::env::var_os(SCENARIO_DIR_VAR) {
        Some(dir) if path.is_relative() && !dir.is_empty() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

fn read_scenario_doc(path: &Path) -> Result<ScenarioDoc, CliError> {
    let full = resolve_scenario_path(path);
    let text = std::fs::read_to_string(&full)
        .map_err(|e| CliError::Config(format!("cannot read scenario {}: {e}", full.display())))?;
    scenario::parse_document(&text).map_err(|e| CliError::Config(format!("{}: {e}", full.display())))
}

fn sector_colors(traj: &Trajectory, n: u32) -> Result<Trajectory, CliError> {
    let colors = traj.cartesian_points().map(|c| color_of_angle(c.angle(), n)).collect();
    let mut t = traj.clone().with_colors(colors).map_err(|e| CliError::Numerical(e.to_string()))?;
    t.meta.coloring = Some(ColorConvention { n });
    Ok(t)
}

fn start_checks(spec: &SystemSpec, s0: CartesianState) -> Result<(), CliError> {
    spec.validate().map_err(|e| CliError::Config(e.to_string()))?;
    spec.to_native(s0).map_err(|e| CliError::Numerical(format!("initial state at t=0: {e}")))?;
    Ok(())
}

fn simulate_cmd(a: SimulateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let base = match &a.scenario {
        Some(p) => read_scenario_doc(p)?,
        None => ScenarioDoc { schema_version: Some(scenario::SCHEMA_VERSION), ..ScenarioDoc::default() },
    };
    let color_by = match a.color_by {
        ColorByArg::None => "none",
        ColorByArg::Sector => "sector",
    };
    let mut outputs = Vec::new();
    if let Some(p) = &a.out {
        outputs.push(OutputDoc {
            kind: "csv".into(),
            path: p.clone(),
            projection: None,
            color_by: Some(color_by.into()),
        });
    }
    if let Some(p) = &a.svg {
        outputs.push(OutputDoc {
            kind: "svg".into(),
            path: p.clone(),
            projection: Some(a.proj.clone()),
            color_by: Some(color_by.into()),
        });
    }
    let top =
        ScenarioDoc { schema_version: None, system: a.system.doc(), initial_state: a.x0, time: a.time.doc(), outputs };
    let sc = base.overlay(&top).resolve()?;
    start_checks(&sc.system, sc.initial_state)?;
    let traj = simulate(&sc.system, sc.initial_state, sc.t0, sc.t1, &sc.integrator)
        .map_err(|e| CliError::Numerical(format!("integration failed: {e}")))?;
    let n_sector = match sc.system {
        SystemSpec::Standard { .. } => 2,
        _ => sc.system.fold().unwrap_or(1),
    };
    for o in &sc.outputs {
        let t = match o.color_by {
            ColorBy::None => traj.clone(),
            ColorBy::Sector => sector_colors(&traj, n_sector)?,
        };
        match o.kind {
            OutputKind::Csv => save_csv(&o.path, &t)
                .map_err(|e| CliError::Config(format!("cannot write {}: {e}", o.path.display())))?,
            OutputKind::Svg => {
                let svg = render_svg(&t, o.projection, &RenderOptions::default())
                    .map_err(|e| CliError::Numerical(e.to_string()))?;
                write_file(&o.path, &svg)?;
            }
        }
        say!(out, "wrote {}", o.path.display());
    }
    let last = traj.cartesian(traj.len() - 1);
    say!(out, "system: {}", sc.system.name());
    say!(out, "samples: {}", traj.len());
    say!(out, "final: t={} x={} y={} z={}", traj.times()[traj.len() - 1], last.x, last.y, last.z);
    Ok(())
}

fn standard_from(
    meta: &TrajectoryMeta,
    sigma: Option<f64>,
    rayleigh: Option<f64>,
    b: Option<f64>,
) -> Result<StandardParams, CliError> {
    let from_meta = match meta.system {
        Some(SystemSpec::Standard { params }) => Some(params),
        Some(spec) => spec.normalized_params().and_then(|p| p.denormalize().ok()),
        None => None,
    };
    let d = from_meta.unwrap_or(StandardParams::CANONICAL);
    StandardParams::new(sigma.unwrap_or(d.sigma), rayleigh.unwrap_or(d.rayleigh), b.unwrap_or(d.b))
        .map_err(|e| CliError::Config(e.to_string()))
}

fn transform_cmd(a: TransformArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let input = load_csv(&a.input).map_err(csv_err(&a.input))?;
    let p = standard_from(&input.meta, a.sigma, a.rayleigh, a.b)?;
    let norm = p.normalize().map_err(|e| CliError::Config(format!("{e}; the transform needs r > 1")))?;
    let mut failure = None;
    let mut mapped = input
        .map_samples(|t, s| {
            let c = CartesianState::from_array(s);
            let r = match a.direction {
                Direction::StdToL2 => p.state_normalize(c, t),
                Direction::L2ToStd => p.state_denormalize(c, t),
            };
            match r {
                Ok((c, t)) => (t, c.to_array()),
                Err(e) => {
                    failure.get_or_insert(e);
                    (t, s)
                }
            }
        })
        .map_err(|e| CliError::Numerical(e.to_string()))?;
    if let Some(e) = failure {
        return Err(CliError::Config(e.to_string()));
    }
    mapped.meta.system = Some(match a.direction {
        Direction::StdToL2 => SystemSpec::L2 { params: norm },
        Direction::L2ToStd => SystemSpec::Standard { params: p },
    });
    mapped.meta.integrator = None;
    mapped.meta.note("transform", format!("{:?}", a.direction).to_lowercase());
    save_csv(&a.out, &mapped).map_err(|e| CliError::Config(format!("cannot write {}: {e}", a.out.display())))?;
    say!(out, "wrote {} ({} samples)", a.out.display(), mapped.len());
    Ok(())
}

fn cover_error(e: CoverError) -> CliError {
    match e {
        CoverError::FoldCount(_) | CoverError::InitialColor { .. } => CliError::Config(e.to_string()),
        CoverError::Sample { .. } | CoverError::AmbiguousStep { .. } => CliError::Numerical(e.to_string()),
    }
}

fn cover_cmd(a: CoverArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let input = load_csv(&a.input).map_err(csv_err(&a.input))?;
    let covered = cover_trajectory(&input, a.n).map_err(cover_error)?;
    save_csv(&a.out, &covered).map_err(|e| CliError::Config(format!("cannot write {}: {e}", a.out.display())))?;
    say!(out, "wrote {} ({} samples, n={})", a.out.display(), covered.len(), a.n);
    Ok(())
}

fn factor_cmd(a: FactorArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let input = load_csv(&a.input).map_err(csv_err(&a.input))?;
    let mut q = cover_trajectory(&input, a.n).map_err(cover_error)?.without_colors();
    q.meta.coloring = None;
    save_csv(&a.out, &q).map_err(|e| CliError::Config(format!("cannot write {}: {e}", a.out.display())))?;
    say!(out, "wrote {} ({} samples)", a.out.display(), q.len());
    Ok(())
}

fn extend_cmd(a: ExtendArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let input = load_csv(&a.input).map_err(csv_err(&a.input))?;
    if input.is_empty() {
        return Err(CliError::Config(format!("{}: no samples", a.input.display())));
    }
    if a.n == 0 {
        return Err(CliError::Config("fold count n must be >= 1 (got 0)".into()));
    }
    if a.color >= a.n {
        return Err(CliError::Config(format!("initial color {} is not below n={}", a.color, a.n)));
    }
    let base = input.meta.system.and_then(|s| s.normalized_params()).unwrap_or_else(NormalizedParams::canonical);
    let params =
        NormalizedParams::new(a.mu.unwrap_or(base.mu), a.beta.unwrap_or(base.beta), a.gamma.unwrap_or(base.gamma))
            .map_err(|e| CliError::Config(e.to_string()))?;
    let down_fold = input.meta.system.and_then(|s| s.fold()).unwrap_or(1);
    let fold = down_fold.checked_mul(a.n).ok_or_else(|| CliError::Config("fold count overflows".into()))?;
    let spec = match fold {
        1 => SystemSpec::L1 { params },
        2 => SystemSpec::L2 { params },
        n => SystemSpec::Ln { params, n },
    };
    let t0 = input.times()[0];
    let t1 = a.t1.unwrap_or(input.times()[input.len() - 1]);
    if t1.is_nan() || t1 <= t0 {
        return Err(CliError::Config(format!("--t1 ({t1}) must exceed the first input time {t0}")));
    }
    let start = ColoredPoint { base: input.cartesian(0), color: a.color }
        .preimage(a.n)
        .map_err(|e| CliError::Numerical(format!("sample 0 at t={t0}: {e}")))?;
    let cfg = input.meta.integrator.unwrap_or_default();
    let traj =
        simulate(&spec, start, t0, t1, &cfg).map_err(|e| CliError::Numerical(format!("integration failed: {e}")))?;
    let traj = sector_colors(&traj, fold)?;
    save_csv(&a.out, &traj).map_err(|e| CliError::Config(format!("cannot write {}: {e}", a.out.display())))?;
    say!(out, "wrote {} ({} samples, system {}, n={fold})", a.out.display(), traj.len(), spec.name());
    Ok(())
}

fn system_only(args: &SystemArgs) -> Result<SystemSpec, CliError> {
    Ok(args.doc().resolve()?)
}

fn convergence_csv(points: &[(f64, f64)]) -> String {
    let mut s = String::from("t,lambda1\n");
    for (t, l) in points {
        s.push_str(&format!("{t:.16e},{l:.16e}\n"));
    }
    s
}

fn report(est: &LyapunovEstimate) -> String {
    let c = &est.settings;
    format!(
        "lambda1 = {:.6} ± {:.6} (seed {}, T={}, tau={}, delta0={:e}, transient={})",
        est.lambda1, est.stderr, c.seed, c.total_time, c.tau, c.delta0, c.transient
    )
}

fn lyapunov_cmd(a: LyapunovArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if !a.system.any() || a.system.system.is_none() {
        return Err(CliError::Config("system.family: is required (use --system)".into()));
    }
    let spec = system_only(&a.system)?;
    let cfg = a.settings.config()?;
    let s0 = a.x0.map(CartesianState::from_array).unwrap_or_else(|| spec.default_initial_state());
    start_checks(&spec, s0)?;
    match lyapunov_max(&spec, s0, &cfg) {
        Ok(est) => {
            if let Some(p) = &a.convergence {
                write_file(p, &convergence_csv(&est.convergence))?;
            }
            say!(out, "{}", report(&est));
            Ok(())
        }
        Err(e) => {
            if let Some(p) = &a.convergence {
                write_file(p, &convergence_csv(e.partial()))?;
            }
            Err(CliError::Numerical(format!("lyapunov estimate failed: {e}")))
        }
    }
}

fn parse_member(s: &str, params: NormalizedParams) -> Result<SystemSpec, CliError> {
    let s = s.trim();
    Ok(match s {
        "standard" => SystemSpec::Standard {
            params: params.denormalize().map_err(|e| CliError::Config(format!("standard: {e}")))?,
        },
        "l1" => SystemSpec::L1 { params },
        "l2" => SystemSpec::L2 { params },
        _ => match s.strip_prefix('l').and_then(|n| n.parse::<u32>().ok()) {
            Some(n) if n >= 1 => SystemSpec::Ln { params, n },
            _ => {
                return Err(CliError::Config(format!(
                    "unknown member {s:?}; expected standard, l1, l2 or lN with N >= 1"
                )))
            }
        },
    })
}

fn chaos_table_cmd(a: ChaosTableArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let c = NormalizedParams::canonical();
    let params = NormalizedParams::new(a.mu.unwrap_or(c.mu), a.beta.unwrap_or(c.beta), a.gamma.unwrap_or(c.gamma))
        .map_err(|e| CliError::Config(e.to_string()))?;
    let specs = a.systems.split(',').map(|s| parse_member(s, params)).collect::<Result<Vec<_>, _>>()?;
    let cfg = a.settings.config()?;
    let rows = par_chaos_table(&specs, &cfg).map_err(|e| CliError::Config(e.to_string()))?;
    write!(out, "{}", format_table(&rows)).map_err(|e| CliError::Config(e.to_string()))?;
    if rows.iter().any(|r| r.outcome.is_err()) {
        return Err(CliError::Numerical("at least one row failed".into()));
    }
    Ok(())
}

fn fixed_points_cmd(a: FixedPointsArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if a.system.system.is_none() {
        return Err(CliError::Config("system.family: is required (use --system)".into()));
    }
    let spec = system_only(&a.system)?;
    let fp = fixed_points(&spec).map_err(|e| CliError::Config(e.to_string()))?;
    let line = |e: &Equilibrium| match e {
        Equilibrium::Cartesian(c) => format!("({}, {}, {})", c.x, c.y, c.z),
        Equilibrium::Polar(p) => {
            let c = p.to_cartesian();
            format!("({}, {}, {})  [radius={}, angle={}, z={}]", c.x, c.y, c.z, p.radius, p.angle, p.z)
        }
    };
    for e in &fp.regular {
        say!(out, "{}", line(e));
    }
    for e in &fp.degenerate {
        say!(out, "{}  degenerate: on the z-axis, outside the polar chart", line(e));
    }
    Ok(())
}

fn render_cmd(a: RenderArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let proj: Projection = a.proj.parse().map_err(CliError::Config)?;
    let mut traj = load_csv(&a.input).map_err(csv_err(&a.input))?;
    if let Some(t) = a.from {
        traj = traj.since(t);
    }
    let opts = RenderOptions {
        width: a.width,
        height: a.height,
        title: a.title.clone(),
        use_colors: a.color == RenderColor::Auto,
        ..RenderOptions::default()
    };
    let svg = render_svg(&traj, proj, &opts).map_err(|e| CliError::Config(format!("{}: {e}", a.input.display())))?;
    write_file(&a.out, &svg)?;
    say!(out, "wrote {}", a.out.display());
    Ok(())
}
