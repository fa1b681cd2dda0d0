//! `--state` and `--grid` argument syntax.

use std::path::PathBuf;

use cylwig::basis::{BandedOperator, WaveFunction};
use cylwig::grid::PhaseSpaceGrid;
use cylwig::kernel::MoyalCoefficients;
use cylwig::PendulumModel;
use num_complex::Complex64;

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    /// `basis:m`
    Basis(i64),
    /// `super:m,n,…`: equal-weight superposition
    Super(Vec<i64>),
    /// `gauss:c,w`: `c_n ∝ exp(−(n − c)²/(4w²))`
    Gauss { centre: f64, width: f64 },
    /// `json:path`: wave-function JSON
    Json(PathBuf),
    /// `thermal:beta`: Gibbs state of the configured model
    Thermal(f64),
    /// `density:path`: density matrix as banded-operator JSON
    Density(PathBuf),
}

pub enum State {
    Pure(WaveFunction),
    Mixed(MoyalCoefficients),
}

fn usage(msg: String) -> CliError {
    CliError::Usage(msg)
}

fn number<T: std::str::FromStr>(text: &str, what: &str) -> Result<T, CliError> {
    text.trim().parse().map_err(|_| usage(format!("invalid {what} '{text}'")))
}

impl std::str::FromStr for StateSpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let (kind, arg) = s
            .split_once(':')
            .ok_or_else(|| usage(format!("state '{s}' must look like kind:args (basis, super, gauss, json, thermal, density)")))?;
        match kind {
            "basis" => Ok(Self::Basis(number(arg, "mode")?)),
            "super" => {
                let modes = arg.split(',').map(|m| number(m, "mode")).collect::<Result<Vec<i64>, _>>()?;
                Ok(Self::Super(modes))
            }
            "gauss" => {
                let (c, w) = arg.split_once(',').ok_or_else(|| usage("gauss state needs centre,width".into()))?;
                let width: f64 = number(w, "width")?;
                if !(width > 0.0) {
                    return Err(usage(format!("gauss width must be positive, got {width}")));
                }
                Ok(Self::Gauss { centre: number(c, "centre")?, width })
            }
            "json" => Ok(Self::Json(PathBuf::from(arg))),
            "thermal" => {
                let beta: f64 = number(arg, "beta")?;
                if !(beta > 0.0 && beta.is_finite()) {
                    return Err(usage(format!("beta must be positive, got {beta}")));
                }
                Ok(Self::Thermal(beta))
            }
            "density" => Ok(Self::Density(PathBuf::from(arg))),
            other => Err(usage(format!("unknown state kind '{other}'"))),
        }
    }
}

fn read(path: &PathBuf) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

impl StateSpec {
    pub fn resolve(&self, n_max: usize, model: &PendulumModel) -> Result<State, CliError> {
        let bad = |e: cylwig::Error| usage(e.to_string());
        match self {
            Self::Basis(m) => Ok(State::Pure(WaveFunction::basis(n_max, *m).map_err(bad)?)),
            Self::Super(modes) => {
                let terms: Vec<(i64, Complex64)> = modes.iter().map(|&m| (m, Complex64::new(1.0, 0.0))).collect();
                Ok(State::Pure(WaveFunction::superposition(n_max, &terms).map_err(bad)?))
            }
            Self::Gauss { centre, width } => {
                let psi = WaveFunction::from_fn(n_max, |n| {
                    Complex64::new((-(n as f64 - centre).powi(2) / (4.0 * width * width)).exp(), 0.0)
                });
                Ok(State::Pure(psi.normalized().map_err(bad)?))
            }
            Self::Json(path) => {
                let psi: WaveFunction = serde_json::from_str(&read(path)?)
                    .map_err(|e| usage(format!("invalid wave function {}: {e}", path.display())))?;
                Ok(State::Pure(psi))
            }
            Self::Thermal(beta) => {
                Ok(State::Mixed(cylwig::dynamics::thermal_state(model, *beta, n_max).map_err(bad)?))
            }
            Self::Density(path) => {
                let op: BandedOperator = serde_json::from_str(&read(path)?)
                    .map_err(|e| usage(format!("invalid density matrix {}: {e}", path.display())))?;
                Ok(State::Mixed(MoyalCoefficients::density(op.matrix().clone()).map_err(bad)?))
            }
        }
    }
}

/// `t=N,p=a:b:M`.
pub fn parse_grid(text: &str) -> Result<PhaseSpaceGrid, CliError> {
    let bad = || usage(format!("grid '{text}' must look like t=64,p=-4:4:161"));
    let (t_part, p_part) = text.split_once(',').ok_or_else(bad)?;
    let n_theta: usize = t_part.trim().strip_prefix("t=").ok_or_else(bad)?.parse().map_err(|_| bad())?;
    let range: Vec<&str> = p_part.trim().strip_prefix("p=").ok_or_else(bad)?.split(':').collect();
    let [lo, hi, n] = range.as_slice() else {
        return Err(bad());
    };
    let lo: f64 = lo.parse().map_err(|_| bad())?;
    let hi: f64 = hi.parse().map_err(|_| bad())?;
    let n: usize = n.parse().map_err(|_| bad())?;
    PhaseSpaceGrid::new(n_theta, lo, hi, n).map_err(|e| usage(e.to_string()))
}
