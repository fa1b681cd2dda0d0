//! Spectral solution of the truncated pendulum Hamiltonian: eigenpairs,
//! Schrödinger and von Neumann propagation, thermal states and the Bloch
//! equation.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::basis::{BandedOperator, WaveFunction};
use crate::error::{Error, Result};
use crate::kernel::MoyalCoefficients;
use crate::model::PendulumModel;

const EIGEN_EPS: f64 = 1e-15;
const EIGEN_MAX_ITER: usize = 10_000;

/// Eigenpairs of a hermitian operator, sorted by energy.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    n_max: usize,
    eigenvalues: Vec<f64>,
    vectors: DMatrix<Complex64>,
}

impl EigenSystem {
    /// Diagonalizes `op` (which must carry the hermitian flag).
    pub fn from_operator(op: &BandedOperator) -> Result<Self> {
        if !op.is_hermitian() {
            return Err(Error::Precondition("eigensystem needs a hermitian operator".into()));
        }
        let eig = nalgebra::SymmetricEigen::try_new(op.matrix().clone(), EIGEN_EPS, EIGEN_MAX_ITER)
            .ok_or_else(|| Error::Numeric("symmetric eigen-solver did not converge".into()))?;
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let dim = op.dim();
        let mut vectors = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
        let mut eigenvalues = Vec::with_capacity(dim);
        for (col, &j) in order.iter().enumerate() {
            eigenvalues.push(eig.eigenvalues[j]);
            let v = eig.eigenvectors.column(j);
            // phase convention: largest component real and positive
            let pivot = v.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap_or(Complex64::new(1.0, 0.0));
            let phase = pivot.conj() / pivot.norm();
            vectors.set_column(col, &v.map(|c| c * phase));
        }
        Ok(Self { n_max: op.n_max(), eigenvalues, vectors })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn vectors(&self) -> &DMatrix<Complex64> {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// `u_j` as a wave function.
    pub fn eigenstate(&self, j: usize) -> Result<WaveFunction> {
        if j >= self.len() {
            return Err(Error::Parameter(format!("eigenstate {j} out of range (dimension {})", self.len())));
        }
        WaveFunction::from_vector(self.n_max, self.vectors.column(j).into_owned())
    }

    /// `max_j ‖H u_j − E_j u_j‖`.
    pub fn max_residual(&self, op: &BandedOperator) -> f64 {
        (0..self.len())
            .map(|j| {
                let v = self.vectors.column(j);
                (op.matrix() * v - v * Complex64::new(self.eigenvalues[j], 0.0)).norm()
            })
            .fold(0.0, f64::max)
    }

    /// `‖V†V − 1‖_max`.
    pub fn orthonormality_defect(&self) -> f64 {
        let g = self.vectors.adjoint() * &self.vectors;
        let dim = g.nrows();
        (g - DMatrix::<Complex64>::identity(dim, dim)).iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `V f(E) V†`.
    pub fn spectral_function<F: Fn(f64) -> Complex64>(&self, f: F) -> DMatrix<Complex64> {
        let weights = DVector::from_iterator(self.len(), self.eigenvalues.iter().map(|&e| f(e)));
        let mut scaled = self.vectors.clone();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col *= weights[j];
        }
        scaled * self.vectors.adjoint()
    }

    /// `e^{−iHt/ħ}`.
    pub fn propagator(&self, t: f64, hbar: f64) -> DMatrix<Complex64> {
        self.spectral_function(|e| Complex64::cis(-e * t / hbar))
    }
}

/// Sorted eigenpairs of the model Hamiltonian on `[−n_max, n_max]`.
pub fn eigensystem(model: &PendulumModel, n_max: usize) -> Result<EigenSystem> {
    EigenSystem::from_operator(&model.hamiltonian(n_max)?)
}

/// Largest change of the lowest `count` eigenvalues when `n_max` is doubled.
pub fn truncation_change(model: &PendulumModel, n_max: usize, count: usize) -> Result<f64> {
    let a = eigensystem(model, n_max)?;
    let b = eigensystem(model, 2 * n_max)?;
    let count = count.min(a.len());
    Ok((0..count).map(|j| (a.eigenvalues()[j] - b.eigenvalues()[j]).abs()).fold(0.0, f64::max))
}

/// Propagator for repeated Schrödinger steps with one diagonalization.
#[derive(Debug, Clone)]
pub struct Schrodinger {
    system: EigenSystem,
    hamiltonian: BandedOperator,
    hbar: f64,
}

impl Schrodinger {
    pub fn new(model: &PendulumModel, n_max: usize) -> Result<Self> {
        let hamiltonian = model.hamiltonian(n_max)?;
        let system = EigenSystem::from_operator(&hamiltonian)?;
        Ok(Self { system, hamiltonian, hbar: model.hbar() })
    }

    pub fn hamiltonian(&self) -> &BandedOperator {
        &self.hamiltonian
    }

    pub fn system(&self) -> &EigenSystem {
        &self.system
    }

    /// `c(t) = V e^{−iEt/ħ} V† c(0)`.
    pub fn evolve(&self, psi0: &WaveFunction, t: f64) -> Result<WaveFunction> {
        let psi0 = psi0.padded(self.system.n_max());
        if psi0.n_max() != self.system.n_max() {
            return Err(Error::Dimension { expected: self.system.n_max(), found: psi0.n_max() });
        }
        let v = &self.system.vectors;
        let mut amp = v.adjoint() * psi0.coeffs();
        for (a, &e) in amp.iter_mut().zip(&self.system.eigenvalues) {
            *a *= Complex64::cis(-e * t / self.hbar);
        }
        WaveFunction::from_vector(self.system.n_max(), v * amp)
    }

    /// `dc/dt = −(i/ħ) H c`.
    pub fn time_derivative(&self, psi: &WaveFunction) -> WaveFunction {
        self.hamiltonian.apply(psi).scaled(Complex64::new(0.0, -1.0 / self.hbar))
    }

    /// `⟨ψ|H|ψ⟩`.
    pub fn energy(&self, psi: &WaveFunction) -> f64 {
        crate::basis::inner_product(psi, &self.hamiltonian.apply(psi)).re
    }
}

/// `c(t) = e^{−iHt/ħ} c(0)`.
pub fn evolve_schrodinger(psi0: &WaveFunction, t: f64, model: &PendulumModel) -> Result<WaveFunction> {
    Schrodinger::new(model, psi0.n_max())?.evolve(psi0, t)
}

/// `ρ(t) = U ρ₀ U†`.
pub fn evolve_density(rho0: &MoyalCoefficients, t: f64, model: &PendulumModel) -> Result<MoyalCoefficients> {
    let MoyalCoefficients::Density { n_max, matrix, .. } = rho0 else {
        return Err(Error::Validation("evolve_density needs a density matrix".into()));
    };
    let system = eigensystem(model, *n_max)?;
    let u = system.propagator(t, model.hbar());
    MoyalCoefficients::density(&u * matrix * u.adjoint())
}

/// `dρ/dt = −(i/ħ)[H, ρ]`.
pub fn density_time_derivative(rho: &DMatrix<Complex64>, model: &PendulumModel) -> Result<DMatrix<Complex64>> {
    let n_max = (rho.nrows() - 1) / 2;
    let h = model.hamiltonian(n_max)?;
    let hm = h.matrix();
    Ok((hm * rho - rho * hm) * Complex64::new(0.0, -1.0 / model.hbar()))
}

/// `Ω̂(β) = e^{−β(H − E₀)}`, the Boltzmann operator shifted by the ground
/// energy so that it never underflows. `Ω = e^{−βE₀} Ω̂` satisfies the same
/// Bloch equation with `H` replaced by `H − E₀`.
pub fn shifted_boltzmann(system: &EigenSystem, beta: f64) -> DMatrix<Complex64> {
    let e0 = system.eigenvalues()[0];
    system.spectral_function(|e| Complex64::new((-beta * (e - e0)).exp(), 0.0))
}

/// `ρ(β) = e^{−βH}/Z`, computed with log-domain weights.
pub fn thermal_state(model: &PendulumModel, beta: f64, n_max: usize) -> Result<MoyalCoefficients> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::Parameter(format!("beta must be positive, got {beta}")));
    }
    let system = eigensystem(model, n_max)?;
    let omega = shifted_boltzmann(&system, beta);
    let z = omega.trace();
    let rho = omega / z;
    // remove the round-off antihermitian part before validation
    let rho = (&rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
    MoyalCoefficients::density(rho)
}

/// `log Z(β) = −βE₀ + log tr e^{−β(H−E₀)}`.
pub fn log_partition_function(model: &PendulumModel, beta: f64, n_max: usize) -> Result<f64> {
    let system = eigensystem(model, n_max)?;
    let e0 = system.eigenvalues()[0];
    let sum: f64 = system.eigenvalues().iter().map(|&e| (-beta * (e - e0)).exp()).sum();
    Ok(-beta * e0 + sum.ln())
}

/// `‖(Ω̂(β+h) − Ω̂(β−h))/2h + (H − E₀) Ω̂(β)‖_F`; tends to zero as `h²`.
pub fn bloch_residual(model: &PendulumModel, n_max: usize, beta: f64, step: f64) -> Result<f64> {
    if !(step > 0.0 && step < beta) {
        return Err(Error::Parameter(format!("step must lie in (0, beta), got {step}")));
    }
    let system = eigensystem(model, n_max)?;
    let h = model.hamiltonian(n_max)?;
    let e0 = system.eigenvalues()[0];
    let shifted_h = h.matrix() - DMatrix::<Complex64>::identity(h.dim(), h.dim()) * Complex64::new(e0, 0.0);
    let derivative = (shifted_boltzmann(&system, beta + step) - shifted_boltzmann(&system, beta - step))
        / Complex64::new(2.0 * step, 0.0);
    Ok((derivative + shifted_h * shifted_boltzmann(&system, beta)).norm())
}

/// Observed convergence order of [`bloch_residual`] between `step` and `step/2`.
pub fn bloch_order(model: &PendulumModel, n_max: usize, beta: f64, step: f64) -> Result<f64> {
    let coarse = bloch_residual(model, n_max, beta, step)?;
    let fine = bloch_residual(model, n_max, beta, 0.5 * step)?;
    Ok((coarse / fine).log2())
}
