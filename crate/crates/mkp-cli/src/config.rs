use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use mkp_core::families::{default_grid, Family};
use mkp_core::{FamilyParams, Grid3};

use crate::error::{CliError, Result};

/// One axis of an explicit grid request.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

/// Explicit grid request; when absent the family default grid is used.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub x: AxisSpec,
    pub y: AxisSpec,
    pub t: AxisSpec,
}

/// Output format of emitted profiles and reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Option<Format>,
}

/// Singularity-scan window over the wave argument ξ.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSpec {
    #[serde(default = "default_xi_min")]
    pub xi_min: f64,
    #[serde(default = "default_xi_max")]
    pub xi_max: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_xi_min() -> f64 {
    -30.0
}
fn default_xi_max() -> f64 {
    30.0
}
fn default_samples() -> usize {
    400
}

impl Default for ScanSpec {
    fn default() -> Self {
        Self { xi_min: -30.0, xi_max: 30.0, samples: 400 }
    }
}

/// A complete run configuration, read from a TOML file. Unknown keys are
/// rejected so that a typo cannot silently fall back to a default.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Family index, 1–4.
    pub family: u8,
    pub lambda: [f64; 2],
    pub alpha: [f64; 4],
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub output: Option<OutputSpec>,
    /// Named tolerance overrides for `verify`; the `--tol` flag takes
    /// precedence over these.
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub scan: Option<ScanSpec>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn params(&self) -> Result<FamilyParams> {
        let family = Family::from_index(self.family)?;
        Ok(FamilyParams::new(family, self.lambda, self.alpha)?)
    }

    /// The run grid: the explicit `[grid]` table if present, otherwise the
    /// family default; refined (axis counts doubled) `refine` times.
    pub fn grid(&self, params: &FamilyParams, refine: u32) -> Result<Grid3> {
        let mut g = match &self.grid {
            Some(spec) => Grid3::new(
                spec.x.min, spec.x.max, spec.x.count,
                spec.y.min, spec.y.max, spec.y.count,
                spec.t.min, spec.t.max, spec.t.count,
            )?,
            None => default_grid(params),
        };
        for _ in 0..refine {
            g = g.refine();
        }
        Ok(g)
    }
}

/// Parses a `--tol name=value` flag.
pub fn parse_tol(arg: &str) -> Result<(String, f64)> {
    let (name, value) = arg
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("--tol expects name=value, got `{arg}`")))?;
    let value: f64 = value
        .parse()
        .map_err(|_| CliError::Config(format!("--tol {name}: `{value}` is not a number")))?;
    if !(value > 0.0) {
        return Err(CliError::Config(format!("--tol {name}: value must be positive")));
    }
    Ok((name.to_string(), value))
}
