//! Pendulum dynamics: the spectral oracle and residual checkers for the
//! generalized Liouville equation and the stationary energy equation.

pub mod energy;
pub mod liouville;
pub mod spectrum;

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::basis::WaveFunction;
use crate::field::ShiftedSincField;
use crate::grid::PhaseSpaceGrid;

pub use energy::{
    continuity_lhs, continuity_source, energy_boundary_field, energy_boundary_literal, energy_residual,
    ENERGY_BOUNDARY_CALIBRATION,
};
pub use liouville::{
    boundary_potential, boundary_potential_closed_form, boundary_potential_field, diagonal_quantum_side,
    hbar_scaling_exponent, liouville_residual, liouville_residual_density, liouville_residual_pure,
    liouville_residual_trajectory, pure_state_rate, density_rate, LIOUVILLE_BOUNDARY_CALIBRATION,
};
pub use spectrum::{
    bloch_order, bloch_residual, eigensystem, evolve_density, evolve_schrodinger, thermal_state, EigenSystem,
    Schrodinger,
};

/// How the potential term is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialForm {
    /// Exact half-integer momentum shifts.
    Shift,
    /// Classical term plus the first `n` quantum corrections of the `ħ` series.
    Series(usize),
}

impl PotentialForm {
    pub fn label(&self) -> String {
        match self {
            PotentialForm::Shift => "shift".into(),
            PotentialForm::Series(n) => format!("series:{n}"),
        }
    }
}

/// Residual statistics over the interior of a grid (the `θ = −π` row is
/// excluded) with the max-norm of every term.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub grid: String,
    pub form: String,
    pub max_abs: f64,
    pub mean_abs: f64,
    pub terms: BTreeMap<String, f64>,
}

impl ResidualReport {
    pub(crate) fn new(grid: &PhaseSpaceGrid, form: PotentialForm, residual: &[Complex64]) -> Self {
        let (max_abs, sum, count) = interior(grid, residual)
            .map(|v| v.norm())
            .fold((0.0f64, 0.0, 0usize), |(m, s, c), x| (m.max(x), s + x, c + 1));
        Self {
            grid: grid.describe(),
            form: form.label(),
            max_abs,
            mean_abs: if count == 0 { 0.0 } else { sum / count as f64 },
            terms: BTreeMap::new(),
        }
    }

    pub(crate) fn with_term(mut self, name: &str, grid: &PhaseSpaceGrid, values: &[Complex64]) -> Self {
        let norm = interior(grid, values).map(|v| v.norm()).fold(0.0, f64::max);
        self.terms.insert(name.to_string(), norm);
        self
    }
}

/// Values off the boundary row.
pub(crate) fn interior<'a>(grid: &'a PhaseSpaceGrid, values: &'a [Complex64]) -> impl Iterator<Item = Complex64> + 'a {
    let n_p = grid.n_pbar();
    values.chunks(n_p).enumerate().filter(|(i, _)| !grid.is_boundary_row(*i)).flat_map(|(_, row)| row.iter().copied())
}

/// Wigner field of a pure state.
pub fn wigner_field(psi: &WaveFunction) -> ShiftedSincField {
    ShiftedSincField::wigner(psi)
}

/// Wigner field `tr[ρ V]` of a density matrix.
pub fn wigner_field_density(rho: &DMatrix<Complex64>) -> ShiftedSincField {
    ShiftedSincField::from_density(rho)
}

/// `Re⟨b, r⟩ / ⟨b, b⟩` over the interior: the constant `c` minimizing `‖r − c b‖`.
pub(crate) fn fit_constant(grid: &PhaseSpaceGrid, r: &[Complex64], b: &[Complex64]) -> f64 {
    let num: f64 = interior(grid, b).zip(interior(grid, r)).map(|(x, y)| (x.conj() * y).re).sum();
    let den: f64 = interior(grid, b).map(|x| x.norm_sqr()).sum();
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wigner_field_entries() {
        let e0 = WaveFunction::basis(2, 0).unwrap();
        let f = wigner_field(&e0);
        assert_eq!(f.len(), 1);
        assert!((f.coefficient(0, 0).re - 1.0 / (2.0 * std::f64::consts::PI)).abs() < 1e-16);
        let two = WaveFunction::superposition(
            2,
            &[(0, Complex64::new(1.0, 0.0)), (1, Complex64::new(1.0, 0.0))],
        )
        .unwrap();
        let f = wigner_field(&two);
        let q = 0.5 / (2.0 * std::f64::consts::PI);
        for (k, s) in [(0, 0), (0, 2), (1, 1), (-1, 1)] {
            assert!((f.coefficient(k, s).re - q).abs() < 1e-15);
        }
        assert_eq!(f.len(), 4);
        assert!(f.reality_defect() < 1e-16);
        let rho = two.coeffs() * two.coeffs().adjoint();
        assert!(wigner_field_density(&rho).sub(&f).max_abs_coefficient() < 1e-16);
    }

    #[test]
    fn report_skips_boundary_row() {
        let grid = PhaseSpaceGrid::symmetric(4, 1.0, 3).unwrap();
        let mut values = vec![Complex64::new(1.0, 0.0); grid.len()];
        for v in values.iter_mut().take(3) {
            *v = Complex64::new(100.0, 0.0);
        }
        let report = ResidualReport::new(&grid, PotentialForm::Shift, &values);
        assert_eq!(report.max_abs, 1.0);
        assert_eq!(report.mean_abs, 1.0);
        assert_eq!(report.grid, "t=4,p=-1:1:3");
    }
}
