//! Run configuration: defaults, an optional TOML file, then flags.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use affsurf::geodesic::IntegratorOptions;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Svg,
    Text,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorConfig {
    pub tol: f64,
    pub max_steps: usize,
    pub blowup_norm: f64,
    pub min_step: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        let d = IntegratorOptions::default();
        Self { tol: d.tol, max_steps: d.max_steps, blowup_norm: d.blowup_norm, min_step: d.min_step }
    }
}

impl IntegratorConfig {
    pub fn options(&self) -> IntegratorOptions {
        IntegratorOptions {
            tol: self.tol,
            max_steps: self.max_steps,
            blowup_norm: self.blowup_norm,
            min_step: self.min_step,
            ..IntegratorOptions::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifyConfig {
    /// Multi-start budget of the Type A orbit search.
    pub starts: usize,
    pub seed: u64,
    pub tolerance: f64,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        let d = affsurf::classify::TypeAOptions::default();
        Self { starts: d.starts, seed: d.seed, tolerance: d.tolerance }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeodesicConfig {
    pub model: String,
    pub p0: [f64; 2],
    pub v0: [f64; 2],
    pub tspan: [f64; 2],
    /// Plot window for SVG output; derived from the trajectory when absent.
    pub window: Option<[f64; 4]>,
}

impl Default for GeodesicConfig {
    fn default() -> Self {
        Self { model: "L2".into(), p0: [1.0, 0.0], v0: [0.0, 1.0], tspan: [0.0, 3.0], window: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExpmapConfig {
    pub model: String,
    pub base: [f64; 2],
    pub window: [f64; 4],
    pub cells: usize,
    pub angles: usize,
    pub ray_length: f64,
    /// Rays drawn in SVG output.
    pub plot_rays: usize,
}

impl Default for ExpmapConfig {
    fn default() -> Self {
        Self {
            model: "L2".into(),
            base: [1.0, 0.0],
            window: [0.0, 4.0, -4.0, 4.0],
            cells: 80,
            angles: 1024,
            ray_length: 20.0,
            plot_rays: 48,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SprayConfig {
    /// `TS2`, `TL2` or `composite`.
    pub verify: String,
    /// When set (`L2` or `pseudosphere`), build the null spray instead.
    pub chart: Option<String>,
    pub grid: usize,
    /// `exact` or `fd`.
    pub differentiation: String,
}

impl Default for SprayConfig {
    fn default() -> Self {
        Self { verify: "TS2".into(), chart: None, grid: 41, differentiation: "exact".into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpinesConfig {
    /// `vertical` or `horizontal`.
    pub kind: String,
    pub rays: usize,
    pub nodes: usize,
    pub window: [f64; 4],
    pub cells: usize,
}

impl Default for SpinesConfig {
    fn default() -> Self {
        Self { kind: "vertical".into(), rays: 41, nodes: 21, window: [0.0, 4.0, -4.0, 4.0], cells: 40 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub format: Format,
    /// Data goes here instead of stdout.
    pub path: Option<PathBuf>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { format: Format::Csv, path: None }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub integrator: IntegratorConfig,
    pub classify: ClassifyConfig,
    pub geodesic: GeodesicConfig,
    pub expmap: ExpmapConfig,
    pub spray: SprayConfig,
    pub spines: SpinesConfig,
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let i = &self.integrator;
        positive("integrator.tol", i.tol)?;
        positive("integrator.blowup_norm", i.blowup_norm)?;
        positive("integrator.min_step", i.min_step)?;
        nonzero("integrator.max_steps", i.max_steps)?;
        positive("classify.tolerance", self.classify.tolerance)?;
        nonzero("classify.starts", self.classify.starts)?;
        let g = &self.geodesic;
        if !(g.tspan.iter().all(|t| t.is_finite()) && g.tspan[0] <= 0.0 && g.tspan[1] >= 0.0 && g.tspan[0] < g.tspan[1])
        {
            return Err(CliError::Config(format!("geodesic.tspan {:?} must be finite and contain 0", g.tspan)));
        }
        if let Some(w) = g.window {
            window("geodesic.window", w)?;
        }
        let e = &self.expmap;
        window("expmap.window", e.window)?;
        nonzero("expmap.cells", e.cells)?;
        nonzero("expmap.angles", e.angles)?;
        positive("expmap.ray_length", e.ray_length)?;
        if self.spray.grid < 2 {
            return Err(CliError::Config("spray.grid must be at least 2".into()));
        }
        let s = &self.spines;
        window("spines.window", s.window)?;
        nonzero("spines.cells", s.cells)?;
        nonzero("spines.rays", s.rays)?;
        nonzero("spines.nodes", s.nodes)
    }
}

fn positive(name: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(CliError::Config(format!("{name} must be positive, got {v}")))
    }
}

fn nonzero(name: &str, v: usize) -> Result<(), CliError> {
    if v > 0 {
        Ok(())
    } else {
        Err(CliError::Config(format!("{name} must be positive")))
    }
}

fn window(name: &str, w: [f64; 4]) -> Result<(), CliError> {
    if w.iter().all(|v| v.is_finite()) && w[0] < w[1] && w[2] < w[3] {
        Ok(())
    } else {
        Err(CliError::Config(format!("{name} {w:?} is empty")))
    }
}

/// `a,b,...` with exactly `N` floats.
pub fn parse_floats<const N: usize>(s: &str) -> Result<[f64; N], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != N {
        return Err(format!("expected {N} comma-separated numbers, got `{s}`"));
    }
    let mut out = [0.0; N];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = f64::from_str(p).map_err(|_| format!("`{p}` is not a number"))?;
    }
    Ok(out)
}

pub fn pair(s: &str) -> Result<[f64; 2], String> {
    parse_floats::<2>(s)
}

pub fn quad(s: &str) -> Result<[f64; 4], String> {
    parse_floats::<4>(s)
}
