//! Command-line arguments, config files and the resolved run configuration.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use cmpk_core::spaces::DESCRIPTOR_VERSION;
use cmpk_core::{Criterion, SpaceDescriptor};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "cmpk",
    version,
    about = "Curvature-bound tests for geodesic metric spaces"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// One-shot model-space trigonometry.
    Model {
        #[command(subcommand)]
        query: ModelQuery,
    },
    /// Run one criterion on sampled configurations over a k grid.
    Test(RunArgs),
    /// Bisect for the largest lower and smallest upper curvature bound.
    Estimate(RunArgs),
    /// Small-scale right-angle defect profile around a point.
    Profile(RunArgs),
    /// Bounds, profile and multiplicity counts around several centers.
    Report(RunArgs),
    /// Mesh distance diagnostics and a diagnostic Pythagorean sweep.
    Mesh(RunArgs),
}

#[derive(Debug, Subcommand)]
pub enum ModelQuery {
    /// Comparison angle opposite the third side.
    Angle {
        #[arg(long, allow_hyphen_values = true)]
        k: f64,
        /// `a,b,c`
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        sides: Vec<f64>,
    },
    /// Third side from two sides and the included angle.
    Side {
        #[arg(long, allow_hyphen_values = true)]
        k: f64,
        /// `a,b`
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        legs: Vec<f64>,
        #[arg(long, allow_hyphen_values = true)]
        gamma: f64,
    },
}

#[derive(Debug, Default, Clone, Args)]
pub struct RunArgs {
    /// JSON config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Space descriptor as inline JSON, a JSON file, or an `.obj` mesh.
    #[arg(long)]
    pub space: Option<String>,
    /// Criterion name; a comma-separated list for `estimate`.
    #[arg(long)]
    pub criterion: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<f64>,
    #[arg(long = "k-grid", value_delimiter = ',', allow_hyphen_values = true)]
    pub k_grid: Option<Vec<f64>>,
    /// `center=x:y[:z],radius=r` (either part may be omitted).
    #[arg(long, allow_hyphen_values = true)]
    pub region: Option<String>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Steiner points per mesh edge.
    #[arg(long)]
    pub steiner: Option<usize>,
    /// Multiplier for the scale-dependent verdict tolerance.
    #[arg(long = "tol-scale")]
    pub tol_scale: Option<f64>,
    /// Initial bisection bracket `lo,hi`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub bracket: Option<Vec<f64>>,
    #[arg(long)]
    pub resolution: Option<f64>,
    /// Report centers `x:y[:z];x:y[:z];...`.
    #[arg(long, allow_hyphen_values = true)]
    pub centers: Option<String>,
    /// Decreasing profile radii `e1,e2,...`.
    #[arg(long, value_delimiter = ',')]
    pub eps: Option<Vec<f64>>,
}

/// Contents of a `--config` file. Every key is optional; unknown keys are
/// rejected.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub space: Option<serde_json::Value>,
    pub criterion: Option<String>,
    pub criteria: Option<Vec<Criterion>>,
    pub k: Option<f64>,
    pub k_grid: Option<Vec<f64>>,
    pub region: Option<RegionFile>,
    pub centers: Option<Vec<Vec<f64>>>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub steiner: Option<usize>,
    pub tol_scale: Option<f64>,
    pub bracket: Option<[f64; 2]>,
    pub resolution: Option<f64>,
    pub eps: Option<Vec<f64>>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionFile {
    pub center: Option<Vec<f64>>,
    pub radius: Option<f64>,
}

pub const DEFAULT_K_GRID: [f64; 7] = [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0];

/// Fully resolved configuration; echoed into every summary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub space: SpaceDescriptor,
    pub criteria: Vec<Criterion>,
    pub k_grid: Vec<f64>,
    pub bracket: [f64; 2],
    pub resolution: f64,
    /// Region center in space coordinates; the space's base point if absent.
    pub center: Option<Vec<f64>>,
    pub radius: f64,
    pub centers: Vec<Vec<f64>>,
    pub samples: usize,
    pub seed: u64,
    pub tol_scale: f64,
    pub eps: Vec<f64>,
    /// Output location; not part of the computation, so not echoed.
    #[serde(skip)]
    pub out: PathBuf,
}

fn config_err(m: impl Into<String>) -> CliError {
    CliError::Config(m.into())
}

/// Parses a descriptor document, checking and removing the optional
/// `version` key.
pub fn descriptor_from_json(mut v: serde_json::Value) -> Result<SpaceDescriptor, CliError> {
    if let Some(obj) = v.as_object_mut() {
        if let Some(ver) = obj.remove("version") {
            if ver.as_u64() != Some(DESCRIPTOR_VERSION as u64) {
                return Err(config_err(format!(
                    "space descriptor version {ver} is not supported (expected {DESCRIPTOR_VERSION})"
                )));
            }
        }
    }
    serde_json::from_value(v).map_err(|e| config_err(format!("invalid space descriptor: {e}")))
}

/// `--space` accepts inline JSON, a path to a JSON descriptor, or an OBJ
/// file.
pub fn parse_space_arg(s: &str) -> Result<SpaceDescriptor, CliError> {
    let t = s.trim();
    if t.starts_with('{') {
        let v = serde_json::from_str(t).map_err(|e| config_err(format!("--space is not valid JSON: {e}")))?;
        return descriptor_from_json(v);
    }
    let path = Path::new(t);
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("obj")) {
        return Ok(SpaceDescriptor::Mesh {
            path: Some(t.to_string()),
            generator: None,
            steiner: 0,
        });
    }
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let v = serde_json::from_str(&text)
        .map_err(|e| config_err(format!("{}: not a JSON descriptor: {e}", path.display())))?;
    descriptor_from_json(v)
}

fn parse_coords(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(':')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| config_err(format!("bad coordinate {x:?} in {s:?}")))
        })
        .collect()
}

/// `center=x:y:z,radius=r`
pub fn parse_region(s: &str) -> Result<(Option<Vec<f64>>, Option<f64>), CliError> {
    let mut center = None;
    let mut radius = None;
    for part in s.split(',').filter(|p| !p.trim().is_empty()) {
        let (key, val) = part
            .split_once('=')
            .ok_or_else(|| config_err(format!("region part {part:?} is not key=value")))?;
        match key.trim() {
            "center" => center = Some(parse_coords(val)?),
            "radius" => {
                radius = Some(
                    val.trim()
                        .parse()
                        .map_err(|_| config_err(format!("bad radius {val:?}")))?,
                )
            }
            k => return Err(config_err(format!("unknown region key {k:?}"))),
        }
    }
    Ok((center, radius))
}

pub fn parse_criteria(s: &str) -> Result<Vec<Criterion>, CliError> {
    s.split(',')
        .map(|c| c.trim().parse::<Criterion>().map_err(config_err))
        .collect()
}

impl RunConfig {
    /// Merges a config file (if any) with flags, applies defaults and
    /// validates everything before any computation starts.
    pub fn resolve(command: &str, args: &RunArgs) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(p) => {
                let text =
                    std::fs::read_to_string(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
                serde_json::from_str::<ConfigFile>(&text)
                    .map_err(|e| config_err(format!("{}: {e}", p.display())))?
            }
            None => ConfigFile::default(),
        };
        let mut space = match (&args.space, &file.space) {
            (Some(s), _) => parse_space_arg(s)?,
            (None, Some(serde_json::Value::String(s))) => parse_space_arg(s)?,
            (None, Some(v)) => descriptor_from_json(v.clone())?,
            (None, None) => return Err(config_err("no space given (use --space)")),
        };
        if let Some(s) = args.steiner.or(file.steiner) {
            match &mut space {
                SpaceDescriptor::Mesh { steiner, .. } => *steiner = s,
                _ => return Err(config_err("--steiner only applies to mesh spaces")),
            }
        }

        let criteria = match (&args.criterion, &file.criterion, &file.criteria) {
            (Some(c), _, _) | (None, Some(c), _) => parse_criteria(c)?,
            (None, None, Some(list)) => list.clone(),
            (None, None, None) => match command {
                "estimate" | "report" => vec![Criterion::Pythagorean],
                "mesh" => vec![Criterion::Pythagorean],
                _ => Vec::new(),
            },
        };
        let k_grid = match (args.k, &args.k_grid, file.k, &file.k_grid) {
            (Some(k), _, _, _) => vec![k],
            (None, Some(g), _, _) => g.clone(),
            (None, None, Some(k), _) => vec![k],
            (None, None, None, Some(g)) => g.clone(),
            _ => DEFAULT_K_GRID.to_vec(),
        };
        let (mut center, mut radius) = match &file.region {
            Some(r) => (r.center.clone(), r.radius),
            None => (None, None),
        };
        if let Some(r) = &args.region {
            let (c, rad) = parse_region(r)?;
            center = c.or(center);
            radius = rad.or(radius);
        }
        let default_radius = if command == "profile" { 0.4 } else { 0.2 };
        let radius = radius.unwrap_or(default_radius);
        let centers = match (&args.centers, &file.centers) {
            (Some(s), _) => s
                .split(';')
                .filter(|c| !c.trim().is_empty())
                .map(parse_coords)
                .collect::<Result<_, _>>()?,
            (None, Some(c)) => c.clone(),
            (None, None) => Vec::new(),
        };
        let default_samples = match command {
            "estimate" | "report" => 300,
            "profile" => 200,
            "mesh" => 500,
            _ => 100,
        };
        let bracket = match (&args.bracket, file.bracket) {
            (Some(b), _) => {
                if b.len() != 2 {
                    return Err(config_err("--bracket takes two values lo,hi"));
                }
                [b[0], b[1]]
            }
            (None, Some(b)) => b,
            (None, None) => [-2.0, 2.0],
        };
        let eps = match (&args.eps, &file.eps) {
            (Some(e), _) | (None, Some(e)) => e.clone(),
            (None, None) => (0..4).map(|j| radius * 0.5f64.powi(j)).collect(),
        };
        let cfg = RunConfig {
            command: command.to_string(),
            space,
            criteria,
            k_grid,
            bracket,
            resolution: args.resolution.or(file.resolution).unwrap_or(0.01),
            center,
            radius,
            centers,
            samples: args.samples.or(file.samples).unwrap_or(default_samples),
            seed: args.seed.or(file.seed).unwrap_or(0),
            tol_scale: args.tol_scale.or(file.tol_scale).unwrap_or(1.0),
            eps,
            out: args
                .out
                .clone()
                .or(file.out.clone())
                .unwrap_or_else(|| PathBuf::from("cmpk-out")),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let finite = |x: f64| x.is_finite();
        if self.k_grid.is_empty() || !self.k_grid.iter().copied().all(finite) {
            return Err(config_err(
                "the k grid must be a non-empty list of finite numbers",
            ));
        }
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(config_err(format!(
                "region radius {} must be positive",
                self.radius
            )));
        }
        if self.samples == 0 || self.samples > 10_000_000 {
            return Err(config_err(format!(
                "samples {} must be in 1..=10000000",
                self.samples
            )));
        }
        if !(self.tol_scale.is_finite() && self.tol_scale > 0.0) {
            return Err(config_err(format!(
                "tol-scale {} must be positive",
                self.tol_scale
            )));
        }
        if let Some(c) = &self.center {
            if !c.iter().copied().all(finite) {
                return Err(config_err("region center must be finite"));
            }
        }
        match self.command.as_str() {
            "test" => {
                if self.criteria.len() != 1 {
                    return Err(config_err("test needs exactly one --criterion"));
                }
            }
            "estimate" | "report" | "mesh" => {
                if let Some(c) = self.criteria.iter().find(|c| {
                    !matches!(
                        c,
                        Criterion::Pythagorean | Criterion::PointSegment | Criterion::Triangle
                    )
                }) {
                    return Err(config_err(format!(
                        "criterion {c} does not give a curvature bound"
                    )));
                }
                if self.criteria.is_empty() {
                    return Err(config_err("no criterion given"));
                }
            }
            _ => {}
        }
        if self.command == "mesh" && !matches!(self.space, SpaceDescriptor::Mesh { .. }) {
            return Err(config_err("the mesh command needs a mesh space"));
        }
        Ok(())
    }
}
