//! The kernel `V_mn(θ, p)`, Wigner and Moyal functions, marginals,
//! overlaps, momentum filtering and wave-function recovery.
//!
//! Momenta are passed as `p̄ = p/ħ` throughout.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::basis::{inner_product, BandedOperator, WaveFunction};
use crate::error::{Error, Result};
use crate::field::ShiftedSincField;
use crate::quadrature::{fourier_momentum, integrate_theta, GaussLegendre, MomentumQuadrature};
use crate::sinc::sinc_pi;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `V_mn(θ, p̄) = (1/2π) e^{i(n−m)θ} sinc π(p̄ − (m+n)/2)`.
pub fn kernel(m: i64, n: i64, theta: f64, pbar: f64) -> Complex64 {
    Complex64::from_polar(sinc_pi(pbar - 0.5 * (m + n) as f64) / (2.0 * PI), (n - m) as f64 * theta)
}

/// `V_{ψ2ψ1}(θ, p̄) = Σ_mn conj(c²_m) V_mn c¹_n`.
pub fn moyal_eval(psi2: &WaveFunction, psi1: &WaveFunction, theta: f64, pbar: f64) -> Complex64 {
    let n = psi2.n_max().max(psi1.n_max()) as i64;
    let mut total = ZERO;
    for m in -n..=n {
        let a = psi2.coeff(m).conj();
        if a == ZERO {
            continue;
        }
        for k in -n..=n {
            let b = psi1.coeff(k);
            if b != ZERO {
                total += a * kernel(m, k, theta, pbar) * b;
            }
        }
    }
    total
}

/// `V_ψ(θ, p̄)`; real up to round-off, the imaginary part is dropped.
pub fn wigner_eval(psi: &WaveFunction, theta: f64, pbar: f64) -> f64 {
    moyal_eval(psi, psi, theta, pbar).re
}

/// Direct angular quadrature of
/// `(1/2π) ∫_{−π}^{π} dϑ/2π e^{−ip̄ϑ} conj(ψ2(θ − ϑ/2)) ψ1(θ + ϑ/2)`.
///
/// The integrand is an entire function of `ϑ`, so Gauss–Legendre converges
/// exponentially; `nodes` around `2 n_max + 20` reach machine precision.
pub fn moyal_quadrature(psi2: &WaveFunction, psi1: &WaveFunction, theta: f64, pbar: f64, nodes: usize) -> Complex64 {
    let rule = GaussLegendre::new(nodes);
    let integral = rule.integrate_complex(-PI, PI, |v| {
        Complex64::from_polar(1.0, -pbar * v) * psi2.evaluate(theta - 0.5 * v).conj() * psi1.evaluate(theta + 0.5 * v)
    });
    integral / (4.0 * PI * PI)
}

/// Coefficient data defining a Moyal function or a density Wigner function.
#[derive(Debug, Clone, PartialEq)]
pub enum MoyalCoefficients {
    /// `M_mn = conj(c²_m) c¹_n`, the field is `Σ M_mn V_mn`.
    Pair { n_max: usize, matrix: DMatrix<Complex64> },
    /// Density matrix `ρ`, the field is `tr[ρ V] = Σ ρ_nm V_mn`.
    Density { n_max: usize, matrix: DMatrix<Complex64>, positive: bool },
}

/// Trace tolerance accepted for density matrices.
pub const TRACE_TOLERANCE: f64 = 1e-10;

impl MoyalCoefficients {
    pub fn pair(psi2: &WaveFunction, psi1: &WaveFunction) -> Self {
        let n_max = psi2.n_max().max(psi1.n_max());
        let n = n_max as i64;
        let matrix = DMatrix::from_fn(2 * n_max + 1, 2 * n_max + 1, |i, j| {
            psi2.coeff(i as i64 - n).conj() * psi1.coeff(j as i64 - n)
        });
        Self::Pair { n_max, matrix }
    }

    /// Validated density matrix: hermitian and unit trace to
    /// `TRACE_TOLERANCE`; positivity is recorded, not required.
    pub fn density(matrix: DMatrix<Complex64>) -> Result<Self> {
        let dim = matrix.nrows();
        if dim != matrix.ncols() || dim.is_multiple_of(2) {
            return Err(Error::Validation(format!(
                "density matrix must be square with odd dimension, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let herm = (&matrix - matrix.adjoint()).iter().map(|c| c.norm()).fold(0.0, f64::max);
        if herm > TRACE_TOLERANCE {
            return Err(Error::Validation(format!("density matrix is not hermitian (defect {herm:.3e})")));
        }
        let trace = matrix.trace();
        if (trace - Complex64::new(1.0, 0.0)).norm() > TRACE_TOLERANCE {
            return Err(Error::Validation(format!("density matrix trace is {trace}, expected 1")));
        }
        let hermitian_part = (&matrix + matrix.adjoint()).scale(0.5);
        let eigen = hermitian_part.symmetric_eigenvalues();
        let positive = eigen.iter().all(|&l| l >= -1e-12);
        Ok(Self::Density { n_max: (dim - 1) / 2, matrix, positive })
    }

    /// `|ψ⟩⟨ψ|` as a density matrix.
    pub fn pure(psi: &WaveFunction) -> Result<Self> {
        let c = psi.coeffs();
        Self::density(c * c.adjoint())
    }

    /// `diag(λ_{−n_max}, …, λ_{n_max})`.
    pub fn diagonal(weights: &[f64]) -> Result<Self> {
        let dim = weights.len();
        Self::density(DMatrix::from_fn(dim, dim, |i, j| if i == j { Complex64::new(weights[i], 0.0) } else { ZERO }))
    }

    pub fn n_max(&self) -> usize {
        match self {
            Self::Pair { n_max, .. } | Self::Density { n_max, .. } => *n_max,
        }
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        match self {
            Self::Pair { matrix, .. } | Self::Density { matrix, .. } => matrix,
        }
    }

    pub fn is_positive(&self) -> Option<bool> {
        match self {
            Self::Density { positive, .. } => Some(*positive),
            Self::Pair { .. } => None,
        }
    }

    /// The associated phase-space field.
    pub fn field(&self) -> ShiftedSincField {
        match self {
            Self::Pair { n_max, matrix } => {
                let n = *n_max as i64;
                ShiftedSincField::from_weights(*n_max, |a, b| matrix[((a + n) as usize, (b + n) as usize)])
            }
            Self::Density { matrix, .. } => ShiftedSincField::from_density(matrix),
        }
    }
}

/// `tr[ρ V(θ, p̄)]`, real for hermitian `ρ`.
pub fn wigner_from_density(rho: &MoyalCoefficients, theta: f64, pbar: f64) -> Result<f64> {
    match rho {
        MoyalCoefficients::Density { .. } => Ok(rho.field().evaluate(theta, pbar).re),
        MoyalCoefficients::Pair { .. } => {
            Err(Error::Validation("expected a density matrix, got Moyal pair coefficients".into()))
        }
    }
}

/// Marginal distributions of a state.
#[derive(Debug, Clone)]
pub struct Marginals {
    psi: WaveFunction,
    field: ShiftedSincField,
}

/// Angle and momentum marginals of `V_ψ`.
pub fn marginals(psi: &WaveFunction) -> Marginals {
    Marginals { psi: psi.clone(), field: ShiftedSincField::wigner(psi) }
}

impl Marginals {
    /// `∫dp̄ V_ψ(θ, p̄)`, integrated exactly on the field.
    pub fn theta(&self, theta: f64) -> f64 {
        self.field.theta_marginal(theta).re
    }

    /// `|ψ(θ)|²/2π`, the closed form of the angle marginal.
    pub fn theta_closed_form(&self, theta: f64) -> f64 {
        self.psi.evaluate(theta).norm_sqr() / (2.0 * PI)
    }

    /// `ω_ψ(p̄) = ∫dθ V_ψ = Σ_n |c_n|² sinc π(p̄ − n)`.
    pub fn omega(&self, pbar: f64) -> f64 {
        self.field.momentum_marginal(pbar).re
    }

    /// `Σ_n |c_n|² sinc π(p̄ − n)` directly from the coefficients.
    pub fn omega_closed_form(&self, pbar: f64) -> f64 {
        self.psi.modes().map(|(n, c)| c.norm_sqr() * sinc_pi(pbar - n as f64)).sum()
    }
}

/// `∫dp̄ sinc π(m − p̄) ∫dθ V_{ψ2ψ1}(θ, p̄) = conj(c²_m) c¹_m`.
///
/// `ω(p̄) = ∫dθ V` is a finite sum of integer-shifted sincs, hence
/// band-limited to `[−π, π]`; for such functions the sinc filter is the
/// reproducing kernel and returns `ω(m)`. The angle integral is done on
/// uniform nodes, which is exact for the trigonometric polynomial in `θ`.
pub fn momentum_filter(psi2: &WaveFunction, psi1: &WaveFunction, m: i64) -> Complex64 {
    let nodes = 4 * psi2.n_max().max(psi1.n_max()) + 3;
    integrate_theta(nodes, |t| moyal_eval(psi2, psi1, t, m as f64))
}

/// Momentum filter with the `p̄` integral done numerically (tail-corrected
/// window); an independent check of the reproducing-kernel shortcut.
pub fn momentum_filter_quadrature(psi2: &WaveFunction, psi1: &WaveFunction, m: i64, window: f64) -> Complex64 {
    let field = ShiftedSincField::moyal(psi2, psi1);
    MomentumQuadrature::with_window(window).integrate(|p| sinc_pi(m as f64 - p) * field.momentum_marginal(p))
}

/// `2π ∫∫ V_{ψ2} V_{ψ1} = |(ψ2, ψ1)|²`, exact in coefficient space.
pub fn overlap(psi2: &WaveFunction, psi1: &WaveFunction) -> f64 {
    let a = ShiftedSincField::wigner(psi2);
    let b = ShiftedSincField::wigner(psi1);
    2.0 * PI * a.integral_of_product(&b).re
}

/// `∫∫ V_ψ²`; `1/2π` for every normalized pure state.
pub fn purity(psi: &WaveFunction) -> f64 {
    let a = ShiftedSincField::wigner(psi);
    a.integral_of_product(&a).re
}

/// `∫∫ V_ρ² = tr ρ² / 2π`.
pub fn purity_density(rho: &MoyalCoefficients) -> f64 {
    let f = rho.field();
    f.integral_of_product(&f).re
}

/// `∫∫ V_ψ`, exact.
pub fn normalization(psi: &WaveFunction) -> f64 {
    ShiftedSincField::wigner(psi).integral().re
}

/// `∫∫ F·G` by angle nodes and the tail-corrected momentum window.
pub fn phase_space_integral_quadrature<F>(n_theta: usize, window: f64, mut f: F) -> Complex64
where
    F: FnMut(f64, f64) -> Complex64,
{
    MomentumQuadrature::with_window(window).integrate(|p| integrate_theta(n_theta, |t| f(t, p)))
}

/// `∫dθ ∫dp̄ V_kl V_mn` in closed form.
///
/// The angle integral is Fourier orthogonality,
/// `∫ e^{i(l−k+n−m)θ} dθ = 2π δ`, and the momentum integral is the shifted
/// sinc overlap `sinc π((k+l−m−n)/2)`. The result is `δ_kn δ_lm / 2π`.
pub fn kernel_orthogonality(k: i64, l: i64, m: i64, n: i64) -> f64 {
    let angular = if l - k + n - m == 0 { 2.0 * PI } else { 0.0 };
    let momentum = sinc_pi(0.5 * (k + l - m - n) as f64);
    angular * momentum / (4.0 * PI * PI)
}

/// The same integral by quadrature (angle nodes exact, momentum window with
/// tail correction).
pub fn kernel_orthogonality_quadrature(k: i64, l: i64, m: i64, n: i64, window: f64) -> Complex64 {
    let nodes = 2 * [k, l, m, n].iter().map(|x| x.unsigned_abs() as usize).max().unwrap_or(0) * 2 + 3;
    phase_space_integral_quadrature(nodes, window, |t, p| kernel(k, l, t, p) * kernel(m, n, t, p))
}

/// `2π ∫∫ tr[A V] tr[B V]`, which equals `tr(A·B)`.
pub fn trace_product_phase_space(a: &BandedOperator, b: &BandedOperator) -> Complex64 {
    let fa = operator_field(a);
    let fb = operator_field(b);
    2.0 * PI * fa.integral_of_product(&fb)
}

/// `tr[A V(θ, p̄)] = Σ A_nm V_mn` as a field.
pub fn operator_field(a: &BandedOperator) -> ShiftedSincField {
    ShiftedSincField::from_weights(a.n_max(), |m, n| a.get(n, m))
}

/// Options for [`recover_wavefunction`].
#[derive(Debug, Clone, Copy)]
pub struct RecoveryOptions {
    /// Cutoff of the reconstructed expansion.
    pub n_max: usize,
    /// Largest `|θ|` sampled (the momentum transform is valid for `|θ| < π`).
    pub theta_max: f64,
    /// Number of angle samples in `[−theta_max, theta_max]`.
    pub samples: usize,
    /// Taper half-width of the momentum transform.
    pub half_width: f64,
    /// Smallest admissible `|ψ(0)|`.
    pub anchor_threshold: f64,
}

impl RecoveryOptions {
    pub fn new(n_max: usize) -> Self {
        Self { n_max, theta_max: 2.6, samples: 8 * n_max + 16, half_width: 300.0, anchor_threshold: 1e-3 }
    }
}

/// Reconstructs `ψ` (up to a global phase) from its Wigner function.
///
/// `g(θ) = 2π ∫dp̄ e^{ip̄θ} V_ψ(θ/2, p̄) = conj(ψ(0)) ψ(θ)`; after dividing
/// by `√g(0) = |ψ(0)|` the coefficients follow from a least-squares fit of
/// the truncated Fourier series to the samples. The phase is fixed by making
/// `ψ̂(0)` real and positive.
pub fn recover_wavefunction<F>(wigner: F, options: &RecoveryOptions) -> Result<WaveFunction>
where
    F: Fn(f64, f64) -> f64,
{
    let g = |theta: f64| {
        2.0 * PI * fourier_momentum(|p| Complex64::new(wigner(0.5 * theta, p), 0.0), theta, options.half_width)
    };
    let g0 = g(0.0).re;
    let modulus = g0.max(0.0).sqrt();
    if modulus < options.anchor_threshold {
        return Err(Error::DegenerateAnchor { modulus, threshold: options.anchor_threshold });
    }
    let dim = 2 * options.n_max + 1;
    let samples = options.samples.max(dim + 1);
    let n = options.n_max as i64;
    let thetas: Vec<f64> = (0..samples)
        .map(|j| -options.theta_max + 2.0 * options.theta_max * j as f64 / (samples - 1) as f64)
        .collect();
    let design = DMatrix::from_fn(samples, dim, |i, j| Complex64::cis((j as i64 - n) as f64 * thetas[i]));
    let rhs = nalgebra::DVector::from_iterator(samples, thetas.iter().map(|&t| g(t) / modulus));
    let svd = design.svd(true, true);
    let coeffs = svd.solve(&rhs, 1e-12).map_err(|e| Error::Numeric(format!("least-squares solve failed: {e}")))?;
    let psi = WaveFunction::from_vector(options.n_max, coeffs)?.normalized()?;
    let anchor = psi.evaluate(0.0);
    if anchor.norm() == 0.0 {
        return Err(Error::DegenerateAnchor { modulus: 0.0, threshold: options.anchor_threshold });
    }
    Ok(psi.scaled(anchor.conj() / anchor.norm()))
}

/// `|(ψ̂, ψ)|²`.
pub fn fidelity(a: &WaveFunction, b: &WaveFunction) -> f64 {
    inner_product(a, b).norm_sqr() / (a.norm_squared() * b.norm_squared())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn two_mode() -> WaveFunction {
        WaveFunction::superposition(3, &[(0, c(1.0, 0.0)), (1, c(1.0, 0.0))]).unwrap()
    }

    #[test]
    fn kernel_values() {
        assert!((kernel(0, 0, 0.3, 0.0) - c(0.5 / PI, 0.0)).norm() < 1e-17);
        assert!(kernel(0, 0, 0.3, 1.0).norm() < 1e-16);
        assert!((kernel(1, 0, 0.0, 0.5) - c(0.5 / PI, 0.0)).norm() < 1e-17);
        let (t, p) = (0.8, -0.37);
        assert!((kernel(2, -1, t, p) - kernel(-1, 2, t, p).conj()).norm() < 1e-17);
        assert!((kernel(2, -1, t + 2.0 * PI, p) - kernel(2, -1, t, p)).norm() < 1e-15);
    }

    #[test]
    fn moyal_values() {
        let e2 = WaveFunction::basis(3, 2).unwrap();
        for &(t, p) in &[(0.1, 0.3), (2.0, 2.6)] {
            assert!((wigner_eval(&e2, t, p) - sinc_pi(p - 2.0) / (2.0 * PI)).abs() < 1e-16);
        }
        let expected = (1.0 + 2.0 / PI) / (2.0 * PI);
        assert!((wigner_eval(&two_mode(), 0.0, 0.5) - expected).abs() < 1e-15);
        // first side lobe of the sinc is negative
        assert!(wigner_eval(&e2, 0.0, 3.4) < 0.0);
    }

    #[test]
    fn quadrature_agrees_with_coefficients() {
        let a = two_mode();
        let b = WaveFunction::superposition(3, &[(-2, c(0.3, 0.1)), (3, c(0.0, -1.0)), (1, c(0.5, 0.0))]).unwrap();
        for &(t, p) in &[(0.0, 0.0), (1.1, -2.3), (-2.9, 0.75)] {
            let exact = moyal_eval(&b, &a, t, p);
            let quad = moyal_quadrature(&b, &a, t, p, 40);
            assert!((exact - quad).norm() < 1e-15, "{exact} {quad}");
        }
    }

    #[test]
    fn density_wigner() {
        let rho = MoyalCoefficients::diagonal(&[0.0, 0.0, 0.0, 0.5, 0.5, 0.0, 0.0]).unwrap();
        let v = wigner_from_density(&rho, 0.4, 0.5).unwrap();
        assert!((v - (2.0 / PI) / (2.0 * PI)).abs() < 1e-15);
        let pure = MoyalCoefficients::pure(&WaveFunction::basis(3, 0).unwrap()).unwrap();
        assert!((wigner_from_density(&pure, 1.0, 0.3).unwrap() - sinc_pi(0.3) / (2.0 * PI)).abs() < 1e-16);
        assert_eq!(pure.is_positive(), Some(true));
        assert!(MoyalCoefficients::diagonal(&[0.5, 0.6, 0.0]).is_err());
        assert!((purity_density(&rho) - 0.5 / (2.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn marginal_values() {
        let m = marginals(&two_mode());
        for &p in &[0.0, 0.3, 1.0, -2.2] {
            let expected = 0.5 * sinc_pi(p) + 0.5 * sinc_pi(p - 1.0);
            assert!((m.omega(p) - expected).abs() < 1e-15);
            assert!((m.omega_closed_form(p) - expected).abs() < 1e-15);
        }
        for &t in &[0.0, 1.3, -3.0] {
            assert!((m.theta(t) - m.theta_closed_form(t)).abs() < 1e-15);
        }
    }

    #[test]
    fn filter_values() {
        let e0 = WaveFunction::basis(3, 0).unwrap();
        let e1 = WaveFunction::basis(3, 1).unwrap();
        assert!((momentum_filter(&e0, &e0, 0) - c(1.0, 0.0)).norm() < 1e-15);
        assert!((momentum_filter(&two_mode(), &two_mode(), 1) - c(0.5, 0.0)).norm() < 1e-15);
        for m in -3..=3 {
            assert!(momentum_filter(&e0, &e1, m).norm() < 1e-16);
        }
        let q = momentum_filter_quadrature(&two_mode(), &two_mode(), 1, 300.0);
        assert!((q - c(0.5, 0.0)).norm() < 1e-6, "{q}");
    }

    #[test]
    fn orthogonality_closed_form() {
        let unit = 1.0 / (2.0 * PI);
        assert!((kernel_orthogonality(0, 0, 0, 0) - unit).abs() < 1e-16);
        assert!((kernel_orthogonality(0, 1, 1, 0) - unit).abs() < 1e-16);
        assert_eq!(kernel_orthogonality(0, 0, 1, 1), 0.0);
        let q = kernel_orthogonality_quadrature(0, 1, 1, 0, 300.0);
        assert!((q.re - unit).abs() < 1e-6);
    }

    #[test]
    fn overlap_and_purity() {
        let a = two_mode();
        assert!((overlap(&a, &a) - 1.0).abs() < 1e-14);
        assert!((purity(&a) - 0.5 / PI).abs() < 1e-15);
        let b = WaveFunction::superposition(3, &[(0, c(1.0, 0.0)), (1, c(-1.0, 0.0))]).unwrap();
        assert!(overlap(&a, &b).abs() < 1e-15);
        assert!((normalization(&a) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn recovery_round_trip() {
        let psi = WaveFunction::superposition(3, &[(0, c(1.0, 0.0)), (1, c(1.0, 0.0))]).unwrap();
        let rec = recover_wavefunction(|t, p| wigner_eval(&psi, t, p), &RecoveryOptions::new(3)).unwrap();
        assert!(fidelity(&rec, &psi) > 1.0 - 1e-8, "{}", 1.0 - fidelity(&rec, &psi));
        let e0 = WaveFunction::basis(3, 0).unwrap();
        let rec = recover_wavefunction(|t, p| wigner_eval(&e0, t, p), &RecoveryOptions::new(3)).unwrap();
        assert!((rec.coeff(0) - c(1.0, 0.0)).norm() < 1e-6);
        let e1 = WaveFunction::basis(3, 1).unwrap();
        assert!(recover_wavefunction(|t, p| wigner_eval(&e1, t, p), &RecoveryOptions::new(3)).is_ok());
        let odd = WaveFunction::superposition(3, &[(1, c(1.0, 0.0)), (-1, c(-1.0, 0.0))]).unwrap();
        let err = recover_wavefunction(|t, p| wigner_eval(&odd, t, p), &RecoveryOptions::new(3));
        assert!(matches!(err, Err(Error::DegenerateAnchor { .. })), "{err:?}");
    }

    proptest! {
        #[test]
        fn moyal_hermiticity(re in prop::collection::vec(-1.0f64..1.0, 10), t in -3.0f64..3.0, p in -4.0f64..4.0) {
            let a = WaveFunction::from_fn(2, |n| c(re[(n + 2) as usize], re[(n + 7) as usize]));
            let b = WaveFunction::from_fn(2, |n| c(re[(7 - n) as usize], -re[(n + 2) as usize]));
            let lhs = moyal_eval(&a, &b, t, p);
            let rhs = moyal_eval(&b, &a, t, p).conj();
            prop_assert!((lhs - rhs).norm() < 1e-14);
            prop_assert!(moyal_eval(&a, &a, t, p).im.abs() < 1e-14);
        }

        // only a sampled interpolation: ω may dip below zero between integers
        #[test]
        fn omega_nonnegative_at_integers(re in prop::collection::vec(-1.0f64..1.0, 14), m in -8i64..=8) {
            let psi = WaveFunction::from_fn(3, |n| c(re[(n + 3) as usize], re[(n + 10) as usize]));
            let omega = marginals(&psi).omega(m as f64);
            let expected = if m.abs() <= 3 { psi.coeff(m).norm_sqr() } else { 0.0 };
            prop_assert!(omega >= 0.0);
            prop_assert!((omega - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn omega_can_be_negative_between_integers() {
        let psi = WaveFunction::basis(2, 0).unwrap();
        assert!(marginals(&psi).omega(1.5) < 0.0);
    }
}
