//! `key = value` configuration file (TOML subset) and precedence handling:
//! flags > config file > defaults.

use std::path::Path;

use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub hbar: Option<f64>,
    pub n_max: Option<usize>,
    pub gamma: Option<f64>,
    pub amplitude: Option<f64>,
    pub grid: Option<String>,
    pub tolerance_scale: Option<f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("invalid config: {e}")))
    }
}

pub const DEFAULT_HBAR: f64 = 1.0;
pub const DEFAULT_N_MAX: usize = 32;
pub const DEFAULT_GAMMA: f64 = 0.5;
pub const DEFAULT_AMPLITUDE: f64 = 1.0;
pub const DEFAULT_GRID: &str = "t=64,p=-4:4:161";

/// Model and numerics after applying precedence.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub hbar: f64,
    pub n_max: usize,
    pub gamma: f64,
    pub amplitude: f64,
    pub grid: String,
    pub tolerance_scale: f64,
}

/// Values given on the command line; `None` means "not given".
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub hbar: Option<f64>,
    pub n_max: Option<usize>,
    pub gamma: Option<f64>,
    pub amplitude: Option<f64>,
    pub grid: Option<String>,
    pub tolerance_scale: Option<f64>,
}

impl Settings {
    pub fn resolve(flags: &Overrides, file: &FileConfig) -> Result<Self, CliError> {
        let s = Self {
            hbar: flags.hbar.or(file.hbar).unwrap_or(DEFAULT_HBAR),
            n_max: flags.n_max.or(file.n_max).unwrap_or(DEFAULT_N_MAX),
            gamma: flags.gamma.or(file.gamma).unwrap_or(DEFAULT_GAMMA),
            amplitude: flags.amplitude.or(file.amplitude).unwrap_or(DEFAULT_AMPLITUDE),
            grid: flags.grid.clone().or_else(|| file.grid.clone()).unwrap_or_else(|| DEFAULT_GRID.to_string()),
            tolerance_scale: flags.tolerance_scale.or(file.tolerance_scale).unwrap_or(1.0),
        };
        if !(s.hbar > 0.0 && s.hbar.is_finite()) {
            return Err(CliError::Usage(format!("hbar must be positive, got {}", s.hbar)));
        }
        if !(s.gamma > 0.0 && s.gamma.is_finite()) {
            return Err(CliError::Usage(format!("gamma must be positive, got {}", s.gamma)));
        }
        if !s.amplitude.is_finite() {
            return Err(CliError::Usage("amplitude must be finite".into()));
        }
        if s.n_max == 0 {
            return Err(CliError::Usage("n_max must be at least 1".into()));
        }
        if !(s.tolerance_scale > 0.0 && s.tolerance_scale.is_finite()) {
            return Err(CliError::Usage("tolerance_scale must be positive".into()));
        }
        Ok(s)
    }

    pub fn model(&self) -> Result<cylwig::PendulumModel, CliError> {
        cylwig::PendulumModel::pendulum(self.gamma, self.amplitude, self.hbar).map_err(|e| CliError::Usage(e.to_string()))
    }
}
