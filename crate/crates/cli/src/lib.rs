//! `affsurf` command-line front end.
//!
//! Exit codes: `0` success, `2` usage, parse, config or output errors,
//! `3` inconclusive classification, `4` integration failure.

pub mod commands;
pub mod config;
pub mod svg;

use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

pub use config::{Format, RunConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0}")]
    Inconclusive(String),
    #[error("integration failure: {0}")]
    Integration(String),
    #[error("output error: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::Parse(_) | Self::Output(_) => 2,
            Self::Inconclusive(_) => 3,
            Self::Integration(_) => 4,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "affsurf", version, about = "Curvature, normal forms and geodesics of affine surface models")]
pub struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Print the effective configuration and exit.
    #[arg(long, global = true)]
    pub show_config: bool,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the CSV/SVG document here instead of stdout.
    #[arg(long, short = 'o', global = true)]
    pub out: Option<PathBuf>,
    /// Integrator tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub max_steps: Option<usize>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Normal form of a Type A or Type B chart.
    Classify(ClassifyArgs),
    /// Curvature, Ricci tensor and its covariant derivative.
    Curvature(CurvatureArgs),
    /// Integrate one geodesic.
    Geodesic(GeodesicArgs),
    /// Sampled image of the exponential map on a grid.
    Expmap(ExpmapArgs),
    /// Spray normal forms and the explicit isometries.
    Spray(SprayArgs),
    /// Spine sprays of L2 through (1, 0).
    Spines(SpinesArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TypeTag {
    #[value(name = "A", alias = "a")]
    A,
    #[value(name = "B", alias = "b")]
    B,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long = "type", value_enum)]
    pub kind: TypeTag,
    /// Six coefficients C11¹ C11² C12¹ C12² C22¹ C22², as `p/q` or integers.
    #[arg(allow_hyphen_values = true, num_args = 0..)]
    pub coeffs: Vec<String>,
    #[arg(long)]
    pub starts: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct CurvatureArgs {
    /// Catalog model name (`S1`…`S5`, `S4:c=<q>`, `H2`, `L2`, `pseudosphere`, `flat`).
    #[arg(long, conflicts_with = "kind")]
    pub model: Option<String>,
    #[arg(long = "type", value_enum)]
    pub kind: Option<TypeTag>,
    #[arg(allow_hyphen_values = true, num_args = 0..)]
    pub coeffs: Vec<String>,
    /// Point for the numeric evaluation, `x1,x2`.
    #[arg(long, value_parser = config::pair, default_value = "1,0")]
    pub at: [f64; 2],
}

#[derive(Debug, Args)]
pub struct GeodesicArgs {
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long, value_parser = config::pair, allow_hyphen_values = true)]
    pub p0: Option<[f64; 2]>,
    #[arg(long, value_parser = config::pair, allow_hyphen_values = true)]
    pub v0: Option<[f64; 2]>,
    #[arg(long, value_parser = config::pair, allow_hyphen_values = true)]
    pub tspan: Option<[f64; 2]>,
    /// SVG window `x1_min,x1_max,x2_min,x2_max`.
    #[arg(long, value_parser = config::quad, allow_hyphen_values = true)]
    pub window: Option<[f64; 4]>,
}

#[derive(Debug, Args)]
pub struct ExpmapArgs {
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long, value_parser = config::pair, allow_hyphen_values = true)]
    pub base: Option<[f64; 2]>,
    #[arg(long, value_parser = config::quad, allow_hyphen_values = true)]
    pub window: Option<[f64; 4]>,
    /// Cells per side.
    #[arg(long)]
    pub cells: Option<usize>,
    #[arg(long)]
    pub angles: Option<usize>,
    #[arg(long)]
    pub ray_length: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SprayArgs {
    /// `TS2`, `TL2` or `composite`.
    #[arg(long, conflicts_with = "chart")]
    pub verify: Option<String>,
    /// Null spray chart to build: `L2` or `pseudosphere`.
    #[arg(long)]
    pub chart: Option<String>,
    /// Nodes per side.
    #[arg(long)]
    pub grid: Option<usize>,
    /// `exact` or `fd`.
    #[arg(long)]
    pub diff: Option<String>,
}

#[derive(Debug, Args)]
pub struct SpinesArgs {
    /// `vertical` or `horizontal`.
    #[arg(long)]
    pub kind: Option<String>,
    #[arg(long)]
    pub rays: Option<usize>,
    #[arg(long)]
    pub cells: Option<usize>,
    #[arg(long, value_parser = config::quad, allow_hyphen_values = true)]
    pub window: Option<[f64; 4]>,
}

/// Result of one command: a human summary and, for data commands, the
/// CSV/SVG document.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub summary: String,
    pub document: Option<String>,
}

/// Merged configuration: defaults, then the file, then flags.
pub fn resolve_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(f) = cli.format {
        cfg.output.format = f;
    }
    if let Some(p) = &cli.out {
        cfg.output.path = Some(p.clone());
    }
    if let Some(t) = cli.tol {
        cfg.integrator.tol = t;
    }
    if let Some(m) = cli.max_steps {
        cfg.integrator.max_steps = m;
    }
    match &cli.command {
        Some(Command::Classify(a)) => {
            set(&mut cfg.classify.starts, a.starts);
            set(&mut cfg.classify.seed, a.seed);
        }
        Some(Command::Geodesic(a)) => {
            let g = &mut cfg.geodesic;
            set(&mut g.model, a.model.clone());
            set(&mut g.p0, a.p0);
            set(&mut g.v0, a.v0);
            set(&mut g.tspan, a.tspan);
            if a.window.is_some() {
                g.window = a.window;
            }
        }
        Some(Command::Expmap(a)) => {
            let e = &mut cfg.expmap;
            set(&mut e.model, a.model.clone());
            set(&mut e.base, a.base);
            set(&mut e.window, a.window);
            set(&mut e.cells, a.cells);
            set(&mut e.angles, a.angles);
            set(&mut e.ray_length, a.ray_length);
        }
        Some(Command::Spray(a)) => {
            let s = &mut cfg.spray;
            if let Some(v) = &a.verify {
                s.verify = v.clone();
                s.chart = None;
            }
            if a.chart.is_some() {
                s.chart = a.chart.clone();
            }
            set(&mut s.grid, a.grid);
            set(&mut s.differentiation, a.diff.clone());
        }
        Some(Command::Spines(a)) => {
            let s = &mut cfg.spines;
            set(&mut s.kind, a.kind.clone());
            set(&mut s.rays, a.rays);
            set(&mut s.cells, a.cells);
            set(&mut s.window, a.window);
        }
        Some(Command::Curvature(_)) | None => {}
    }
    cfg.validate()?;
    Ok(cfg)
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

/// Runs a parsed command line without touching stdout or the file system.
pub fn execute(cli: &Cli) -> Result<Output, CliError> {
    let cfg = resolve_config(cli)?;
    if cli.show_config {
        return Ok(Output { summary: cfg.to_toml(), document: None });
    }
    let Some(cmd) = &cli.command else {
        return Err(CliError::Config("no command given (try --help)".into()));
    };
    match cmd {
        Command::Classify(a) => commands::classify(a, &cfg),
        Command::Curvature(a) => commands::curvature(a),
        Command::Geodesic(_) => commands::geodesic(&cfg),
        Command::Expmap(_) => commands::expmap(&cfg),
        Command::Spray(_) => commands::spray(&cfg),
        Command::Spines(_) => commands::spines(&cfg),
    }
}

/// Full run from raw arguments; returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = execute(&cli).and_then(|out| {
        let cfg = resolve_config(&cli)?;
        emit(&out, &cfg)
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("affsurf: {e}");
            e.exit_code()
        }
    }
}

/// Document to the configured path (summary to stdout) or to stdout
/// (summary to stderr). Files are written once, at the end.
fn emit(out: &Output, cfg: &RunConfig) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Output(e.to_string());
    let stdout = std::io::stdout();
    match (&out.document, &cfg.output.path) {
        (None, _) => stdout.lock().write_all(out.summary.as_bytes()).map_err(io)?,
        (Some(doc), Some(path)) => {
            std::fs::write(path, doc).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?;
            stdout.lock().write_all(out.summary.as_bytes()).map_err(io)?;
        }
        (Some(doc), None) => {
            stdout.lock().write_all(doc.as_bytes()).map_err(io)?;
            std::io::stderr().lock().write_all(out.summary.as_bytes()).map_err(io)?;
        }
    }
    Ok(())
}
