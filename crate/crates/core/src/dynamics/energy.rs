//! Residual of the stationary energy equation for a Moyal pair of eigenstates
//!
//! `γ(p² − (ħ²/4)∂_θ²)V + Σ_q U_q(θ) ½[V(p̄ + q/2) + V(p̄ − q/2)] + B = ((E₁ + E₂)/2) V`
//!
//! where `B` is the boundary flow `c_E (ħ/2i) [e^{−ip̄ϑ}{(p/I)ρ₂₁ + j₂₁}]_{ϑ=−π}^{π}`,
//! and of the continuity equation for `ρ₂₁`, `j₂₁`.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{fit_constant, PotentialForm, ResidualReport};
use crate::basis::WaveFunction;
use crate::error::{Error, Result};
use crate::field::ShiftedSincField;
use crate::grid::PhaseSpaceGrid;
use crate::model::{PendulumModel, Potential};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `c_E`: the boundary flow carries the same `(2π)⁻²` as the kernel.
pub const ENERGY_BOUNDARY_CALIBRATION: f64 = 1.0 / (4.0 * PI * PI);

/// Largest tolerated `‖Hc − Ec‖` for an input eigenpair.
pub const EIGEN_TOLERANCE: f64 = 1e-8;

fn second_derivative(psi: &WaveFunction, phi: f64) -> Complex64 {
    psi.modes().map(|(n, c)| -c * (n * n) as f64 * Complex64::cis(n as f64 * phi)).sum()
}

/// `ρ₂₁ = ψ2*(θ − ϑ/2) ψ1(θ + ϑ/2)`.
fn rho21(psi2: &WaveFunction, psi1: &WaveFunction, theta: f64, vartheta: f64) -> Complex64 {
    psi2.evaluate(theta - 0.5 * vartheta).conj() * psi1.evaluate(theta + 0.5 * vartheta)
}

/// `j₂₁ = (ħ/(2iI)) {ψ2* ∂ψ1 − (∂ψ2*) ψ1}` at `(θ ∓ ϑ/2)`.
fn j21(psi2: &WaveFunction, psi1: &WaveFunction, model: &PendulumModel, theta: f64, vartheta: f64) -> Complex64 {
    let (x2, x1) = (theta - 0.5 * vartheta, theta + 0.5 * vartheta);
    let inner = psi2.evaluate(x2).conj() * psi1.derivative(x1) - psi2.derivative(x2).conj() * psi1.evaluate(x1);
    inner * Complex64::new(0.0, -model.hbar() / (2.0 * model.moment_of_inertia()))
}

/// Boundary flow evaluated literally from the wave functions at `θ ± π/2`.
pub fn energy_boundary_literal(
    psi2: &WaveFunction,
    psi1: &WaveFunction,
    model: &PendulumModel,
    theta: f64,
    pbar: f64,
) -> Complex64 {
    let hbar = model.hbar();
    let end = |v: f64| {
        Complex64::cis(-pbar * v)
            * (rho21(psi2, psi1, theta, v) * (hbar * pbar / model.moment_of_inertia()) + j21(psi2, psi1, model, theta, v))
    };
    (end(PI) - end(-PI)) * Complex64::new(0.0, -0.5 * hbar) * ENERGY_BOUNDARY_CALIBRATION
}

/// Boundary flow from field coefficients: `−γħ² Σ f e^{ikθ} (p̄ + s) sin π(p̄ − s)/π`.
pub fn energy_boundary_field(field: &ShiftedSincField, model: &PendulumModel, theta: f64, pbar: f64) -> Complex64 {
    let scale = -model.gamma() * model.hbar() * model.hbar();
    field
        .terms()
        .map(|(k, s, f)| {
            let s = 0.5 * s as f64;
            f * Complex64::cis(k as f64 * theta) * (scale * (pbar + s) * (PI * (pbar - s)).sin() / PI)
        })
        .sum()
}

fn check_eigenpair(psi: &WaveFunction, energy: f64, model: &PendulumModel) -> Result<()> {
    let h = model.hamiltonian(psi.n_max())?;
    let defect = (h.apply(psi).coeffs() - psi.coeffs() * Complex64::new(energy, 0.0)).norm();
    if defect > EIGEN_TOLERANCE {
        return Err(Error::Precondition(format!(
            "input is not an eigenpair: |Hc - Ec| = {defect:.3e} exceeds {EIGEN_TOLERANCE:e}"
        )));
    }
    Ok(())
}

/// Exact cos-shift potential term `Σ_q U_q(θ) ½[F(p̄ + q/2) + F(p̄ − q/2)]`.
fn shift_potential_field(field: &ShiftedSincField, potential: &Potential) -> ShiftedSincField {
    let mut out = ShiftedSincField::new();
    for mode in potential.modes() {
        if mode.k == 0 {
            out = out.add(&field.scale(Complex64::new(mode.a, 0.0)));
            continue;
        }
        let q = mode.k as i64;
        let avg = field.shifted(q).add(&field.shifted(-q)).scale(Complex64::new(0.5, 0.0));
        // a cos qθ + b sin qθ in exponentials
        let plus = Complex64::new(0.5 * mode.a, -0.5 * mode.b);
        let minus = Complex64::new(0.5 * mode.a, 0.5 * mode.b);
        out = out.add(&avg.times_mode(q).scale(plus)).add(&avg.times_mode(-q).scale(minus));
    }
    out
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

struct EnergyTerms {
    kinetic: Vec<Complex64>,
    potential_classical: Vec<Complex64>,
    potential_quantum: Vec<Complex64>,
    /// Boundary flow without the calibration constant.
    boundary_raw: Vec<Complex64>,
    energy: Vec<Complex64>,
}

fn assemble(
    psi2: &WaveFunction,
    e2: f64,
    psi1: &WaveFunction,
    e1: f64,
    model: &PendulumModel,
    grid: &PhaseSpaceGrid,
    form: PotentialForm,
) -> EnergyTerms {
    let hbar = model.hbar();
    let gamma = model.gamma();
    let field = ShiftedSincField::moyal(psi2, psi1);
    let n_p = grid.n_pbar();
    let pbars = grid.pbars();
    let potential = model.potential();

    let value = field.evaluate_grid(grid, 0, 0);
    let curvature = field.evaluate_grid(grid, 2, 0);
    let kinetic = (0..grid.len())
        .map(|i| gamma * hbar * hbar * (value[i] * pbars[i % n_p].powi(2) - 0.25 * curvature[i]))
        .collect();
    let potential_classical: Vec<Complex64> =
        value.iter().enumerate().map(|(i, v)| v * potential.value(grid.thetas()[i / n_p])).collect();
    let potential_quantum = match form {
        PotentialForm::Shift => {
            let full = shift_potential_field(&field, potential).evaluate_grid(grid, 0, 0);
            full.iter().zip(&potential_classical).map(|(a, b)| a - b).collect()
        }
        PotentialForm::Series(n_series) => {
            let mut acc = vec![ZERO; grid.len()];
            for n in 1..=n_series {
                let derivative = field.evaluate_grid(grid, 0, (2 * n) as u32);
                for mode in potential.modes().iter().filter(|m| m.k > 0) {
                    let weight = (0.5 * mode.k as f64).powi(2 * n as i32) / factorial(2 * n);
                    for (i, a) in acc.iter_mut().enumerate() {
                        *a += derivative[i] * (weight * mode.value(grid.thetas()[i / n_p]));
                    }
                }
            }
            acc
        }
    };
    let mut boundary_raw = Vec::with_capacity(grid.len());
    for &theta in grid.thetas() {
        // the θ-dependent ingredients once per row
        let ends: Vec<(f64, Complex64, Complex64)> = [PI, -PI]
            .iter()
            .map(|&v| (v, rho21(psi2, psi1, theta, v), j21(psi2, psi1, model, theta, v)))
            .collect();
        for &p in pbars {
            let mut total = ZERO;
            for &(v, rho, j) in &ends {
                let sign = if v > 0.0 { 1.0 } else { -1.0 };
                total += Complex64::cis(-p * v) * (rho * (hbar * p / model.moment_of_inertia()) + j) * sign;
            }
            boundary_raw.push(total * Complex64::new(0.0, -0.5 * hbar));
        }
    }
    let mean = 0.5 * (e1 + e2);
    let energy = value.iter().map(|v| v * mean).collect();
    EnergyTerms { kinetic, potential_classical, potential_quantum, boundary_raw, energy }
}

/// `LHS − ((E₁ + E₂)/2) V_{ψ2ψ1}` on the grid; both inputs must be eigenpairs.
pub fn energy_residual(
    psi2: &WaveFunction,
    e2: f64,
    psi1: &WaveFunction,
    e1: f64,
    model: &PendulumModel,
    grid: &PhaseSpaceGrid,
    form: PotentialForm,
) -> Result<ResidualReport> {
    check_eigenpair(psi2, e2, model)?;
    check_eigenpair(psi1, e1, model)?;
    let t = assemble(psi2, e2, psi1, e1, model, grid, form);
    let boundary: Vec<Complex64> = t.boundary_raw.iter().map(|b| b * ENERGY_BOUNDARY_CALIBRATION).collect();
    let residual: Vec<Complex64> = (0..grid.len())
        .map(|i| t.kinetic[i] + t.potential_classical[i] + t.potential_quantum[i] + boundary[i] - t.energy[i])
        .collect();
    Ok(ResidualReport::new(grid, form, &residual)
        .with_term("kinetic", grid, &t.kinetic)
        .with_term("potential_classical", grid, &t.potential_classical)
        .with_term("potential_quantum", grid, &t.potential_quantum)
        .with_term("boundary", grid, &boundary)
        .with_term("energy", grid, &t.energy))
}

/// Least-squares constant `c` in `E V − kinetic − potential = c (ħ/2i)[…]`.
pub fn calibrate_boundary(
    psi2: &WaveFunction,
    e2: f64,
    psi1: &WaveFunction,
    e1: f64,
    model: &PendulumModel,
    grid: &PhaseSpaceGrid,
) -> f64 {
    let t = assemble(psi2, e2, psi1, e1, model, grid, PotentialForm::Shift);
    let rest: Vec<Complex64> = (0..grid.len())
        .map(|i| t.energy[i] - t.kinetic[i] - t.potential_classical[i] - t.potential_quantum[i])
        .collect();
    fit_constant(grid, &rest, &t.boundary_raw)
}

/// `∂_t ρ₂₁ + ∂_θ j₂₁` with time derivatives from the Schrödinger flow.
pub fn continuity_lhs(
    psi2: &WaveFunction,
    psi1: &WaveFunction,
    model: &PendulumModel,
    theta: f64,
    vartheta: f64,
) -> Result<Complex64> {
    let n_max = psi2.n_max().max(psi1.n_max());
    let h = model.hamiltonian(n_max)?;
    let rate = Complex64::new(0.0, -1.0 / model.hbar());
    let dot2 = h.apply(&psi2.padded(n_max)).scaled(rate);
    let dot1 = h.apply(&psi1.padded(n_max)).scaled(rate);
    let (x2, x1) = (theta - 0.5 * vartheta, theta + 0.5 * vartheta);
    let dt_rho = dot2.evaluate(x2).conj() * psi1.evaluate(x1) + psi2.evaluate(x2).conj() * dot1.evaluate(x1);
    // ∂_θ j₂₁: the mixed first-derivative products cancel
    let inner = psi2.evaluate(x2).conj() * second_derivative(psi1, x1) - second_derivative(psi2, x2).conj() * psi1.evaluate(x1);
    let dtheta_j = inner * Complex64::new(0.0, -model.hbar() / (2.0 * model.moment_of_inertia()));
    Ok(dt_rho + dtheta_j)
}

/// `(i/ħ)[U(θ − ϑ/2) − U(θ + ϑ/2)] ρ₂₁`; zero at `ϑ = 0` and for `U = 0`.
pub fn continuity_source(
    psi2: &WaveFunction,
    psi1: &WaveFunction,
    model: &PendulumModel,
    theta: f64,
    vartheta: f64,
) -> Complex64 {
    let u = model.potential();
    let du = u.value(theta - 0.5 * vartheta) - u.value(theta + 0.5 * vartheta);
    rho21(psi2, psi1, theta, vartheta) * Complex64::new(0.0, du / model.hbar())
}
