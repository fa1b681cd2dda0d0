//! Physical constants and the rotor/pendulum Hamiltonian `H = γL² + U(θ)`.

use serde::{Deserialize, Serialize};

use crate::basis::BandedOperator;
use crate::error::{Error, Result};

/// Action unit and moment of inertia `m r₀²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    hbar: f64,
    moment_of_inertia: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self { hbar: 1.0, moment_of_inertia: 1.0 }
    }
}

impl PhysicalConstants {
    pub fn new(hbar: f64, moment_of_inertia: f64) -> Result<Self> {
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::Parameter(format!("hbar must be positive, got {hbar}")));
        }
        if !(moment_of_inertia > 0.0 && moment_of_inertia.is_finite()) {
            return Err(Error::Parameter(format!("moment of inertia must be positive, got {moment_of_inertia}")));
        }
        Ok(Self { hbar, moment_of_inertia })
    }

    /// Constants with the kinetic coefficient `γ = 1/(2 m r₀²)` given directly.
    pub fn from_gamma(hbar: f64, gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::Parameter(format!("gamma must be positive, got {gamma}")));
        }
        Self::new(hbar, 1.0 / (2.0 * gamma))
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn moment_of_inertia(&self) -> f64 {
        self.moment_of_inertia
    }

    /// Coefficient of `L²` in the Hamiltonian.
    pub fn gamma(&self) -> f64 {
        0.5 / self.moment_of_inertia
    }

    /// Rotational energy quantum `ε = ħ²/(2 m r₀²)`.
    pub fn epsilon(&self) -> f64 {
        self.hbar * self.hbar * self.gamma()
    }
}

/// Only integer angular momenta are supported; a nonzero covering-group
/// offset `δ` is rejected.
pub fn check_covering_offset(delta: f64) -> Result<()> {
    if delta != 0.0 {
        return Err(Error::Parameter(format!(
            "fractional angular momentum offset delta = {delta} is not supported (only delta = 0)"
        )));
    }
    Ok(())
}

/// One Fourier mode `a cos kθ + b sin kθ` of a real periodic potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialMode {
    pub k: u32,
    pub a: f64,
    pub b: f64,
}

impl PotentialMode {
    pub fn value(&self, theta: f64) -> f64 {
        let kt = self.k as f64 * theta;
        self.a * kt.cos() + self.b * kt.sin()
    }

    /// `∂_θ U_k`.
    pub fn derivative(&self, theta: f64) -> f64 {
        let k = self.k as f64;
        let kt = k * theta;
        k * (-self.a * kt.sin() + self.b * kt.cos())
    }

    /// `∂_θ U_k / k`; for `k = 0` the mode is constant and this is zero.
    pub fn reduced_derivative(&self, theta: f64) -> f64 {
        if self.k == 0 {
            return 0.0;
        }
        let kt = self.k as f64 * theta;
        -self.a * kt.sin() + self.b * kt.cos()
    }
}

/// Real periodic potential as a finite Fourier series.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Potential {
    modes: Vec<PotentialMode>,
}

impl Potential {
    pub fn new(modes: Vec<PotentialMode>) -> Result<Self> {
        for m in &modes {
            if !(m.a.is_finite() && m.b.is_finite()) {
                return Err(Error::Parameter("potential coefficients must be finite".into()));
            }
        }
        Ok(Self { modes })
    }

    /// `U(θ) = −A cos θ`.
    pub fn pendulum(amplitude: f64) -> Self {
        Self { modes: vec![PotentialMode { k: 1, a: -amplitude, b: 0.0 }] }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn modes(&self) -> &[PotentialMode] {
        &self.modes
    }

    pub fn is_zero(&self) -> bool {
        self.modes.iter().all(|m| m.a == 0.0 && (m.b == 0.0 || m.k == 0))
    }

    pub fn max_mode(&self) -> u32 {
        self.modes.iter().map(|m| m.k).max().unwrap_or(0)
    }

    pub fn value(&self, theta: f64) -> f64 {
        self.modes.iter().map(|m| m.value(theta)).sum()
    }

    pub fn derivative(&self, theta: f64) -> f64 {
        self.modes.iter().map(|m| m.derivative(theta)).sum()
    }
}

/// Rotor in a periodic potential: `H = γL² + U(θ)`, `γ = 1/(2 m r₀²)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PendulumModel {
    constants: PhysicalConstants,
    potential: Potential,
}

impl PendulumModel {
    pub fn new(constants: PhysicalConstants, potential: Potential) -> Self {
        Self { constants, potential }
    }

    /// Pendulum `H = γL² − A cos θ` parametrised by `γ`.
    pub fn pendulum(gamma: f64, amplitude: f64, hbar: f64) -> Result<Self> {
        Ok(Self::new(PhysicalConstants::from_gamma(hbar, gamma)?, Potential::pendulum(amplitude)))
    }

    pub fn free_rotor(gamma: f64, hbar: f64) -> Result<Self> {
        Ok(Self::new(PhysicalConstants::from_gamma(hbar, gamma)?, Potential::zero()))
    }

    pub fn constants(&self) -> &PhysicalConstants {
        &self.constants
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn hbar(&self) -> f64 {
        self.constants.hbar()
    }

    pub fn gamma(&self) -> f64 {
        self.constants.gamma()
    }

    pub fn moment_of_inertia(&self) -> f64 {
        self.constants.moment_of_inertia()
    }

    /// Same potential and inertia with a different `ħ`.
    pub fn with_hbar(&self, hbar: f64) -> Result<Self> {
        Ok(Self::new(PhysicalConstants::new(hbar, self.moment_of_inertia())?, self.potential.clone()))
    }

    /// Matrix of `H` on the window `[−n_max, n_max]`.
    pub fn hamiltonian(&self, n_max: usize) -> Result<BandedOperator> {
        let kinetic = self.gamma() * self.hbar() * self.hbar();
        let potential = potential_operator(&self.potential, n_max)?;
        let bw = potential.bandwidth();
        let op = BandedOperator::from_fn(n_max, bw, |m, n| {
            let mut v = potential.get(m, n);
            if m == n {
                v += kinetic * (m * m) as f64;
            }
            v
        })?;
        op.with_hermitian_flag()
    }

    /// Harmonic approximation of the deep well: `ħ√(2γA)(j + ½) − A`.
    pub fn harmonic_level(&self, j: usize, amplitude: f64) -> f64 {
        self.hbar() * (2.0 * self.gamma() * amplitude).sqrt() * (j as f64 + 0.5) - amplitude
    }
}

/// Multiplication operator of `U(φ)`: `cos kφ` has `½` on the `±k`
/// diagonals, `sin kφ` has `∓i/2`.
pub fn potential_operator(potential: &Potential, n_max: usize) -> Result<BandedOperator> {
    let max_k = potential.max_mode() as usize;
    if max_k > 2 * n_max {
        return Err(Error::Parameter(format!(
            "potential mode {max_k} exceeds the representable band 2*n_max = {}",
            2 * n_max
        )));
    }
    let op = BandedOperator::from_fn(n_max, max_k, |m, n| {
        let d = m - n;
        let mut v = num_complex::Complex64::new(0.0, 0.0);
        for mode in potential.modes() {
            let k = mode.k as i64;
            if k == 0 {
                if d == 0 {
                    v += mode.a;
                }
                continue;
            }
            if d == k {
                v += num_complex::Complex64::new(0.5 * mode.a, -0.5 * mode.b);
            } else if d == -k {
                v += num_complex::Complex64::new(0.5 * mode.a, 0.5 * mode.b);
            }
        }
        v
    })?;
    Ok(op)
}

/// Angular frequency scale of small oscillations, `√(2γA)/ħ · ħ = √(2γA)`.
pub fn small_oscillation_frequency(gamma: f64, amplitude: f64) -> f64 {
    (2.0 * gamma * amplitude).sqrt()
}
