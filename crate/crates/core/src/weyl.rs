//! Weyl correspondence between banded operators and phase-space symbols.
//!
//! `Ã(θ, p) = 2π tr[A V(θ, p)] = Σ_mn A_nm e^{i(n−m)θ} sinc π(p̄ − (m+n)/2)`.
//! On the polynomial class the inversion integral has the closed form
//! `A_mn = P_{m−n}(ħ(m+n)/2)`: the angle integral selects one Fourier mode
//! and the momentum integral is the regularized moment
//! `∫dp̄ p̄^j sinc π(p̄ − s) = s^j`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::basis::BandedOperator;
use crate::error::{Error, Result};
use crate::field::ShiftedSincField;
use crate::grid::PhaseSpaceGrid;
use crate::kernel::kernel;
use crate::symbol::{poly, PhaseSpaceSymbol};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Highest polynomial degree tried per band before falling back.
pub const MAX_FIT_DEGREE: usize = 8;

/// Relative residual accepted by the per-band polynomial fit.
pub const FIT_TOLERANCE: f64 = 1e-10;

/// Largest denominator tried when snapping fitted coefficients.
const SNAP_DENOMINATOR: i64 = 64;
const SNAP_TOLERANCE: f64 = 1e-11;

/// `A_mn = P_{m−n}(ħ(m+n)/2)` on `[−n_max, n_max]`.
///
/// Modes with `|k| > 2 n_max` have no entries in the window and are dropped.
pub fn weyl_quantize(sym: &PhaseSpaceSymbol, n_max: usize, hbar: f64) -> Result<BandedOperator> {
    if !(hbar > 0.0 && hbar.is_finite()) {
        return Err(Error::Parameter(format!("hbar must be positive, got {hbar}")));
    }
    let bw = (sym.max_mode() as usize).min(2 * n_max);
    let op = BandedOperator::from_fn(n_max, bw, |m, n| {
        let p = sym.poly(m - n);
        if p.is_empty() {
            ZERO
        } else {
            poly::eval_real(p, 0.5 * hbar * (m + n) as f64)
        }
    })?;
    Ok(op.clone().with_hermitian_flag().unwrap_or(op))
}

/// Result of [`weyl_symbol`].
#[derive(Debug, Clone, PartialEq)]
pub enum WeylSymbol {
    /// Every band is polynomial in `p` on the reliable part of the window.
    Exact(PhaseSpaceSymbol),
    /// No polynomial structure was found; the exact (finite-window) field
    /// `2π tr[A V]` is returned instead.
    Numeric(ShiftedSincField),
}

impl WeylSymbol {
    pub fn is_exact(&self) -> bool {
        matches!(self, Self::Exact(_))
    }

    pub fn exact(&self) -> Option<&PhaseSpaceSymbol> {
        match self {
            Self::Exact(s) => Some(s),
            Self::Numeric(_) => None,
        }
    }

    pub fn evaluate(&self, theta: f64, pbar: f64, hbar: f64) -> Complex64 {
        match self {
            Self::Exact(s) => s.evaluate(theta, hbar * pbar),
            Self::Numeric(f) => f.evaluate(theta, pbar),
        }
    }
}

/// The field `2π tr[A V(θ, p̄)]` on the truncated window.
pub fn symbol_field(a: &BandedOperator) -> ShiftedSincField {
    ShiftedSincField::from_weights(a.n_max(), |m, n| a.get(n, m) * (2.0 * PI))
}

fn snap(v: f64) -> f64 {
    let tol = SNAP_TOLERANCE * v.abs().max(1.0);
    for q in 1..=SNAP_DENOMINATOR {
        let r = (v * q as f64).round() / q as f64;
        if (v - r).abs() <= tol {
            return r;
        }
    }
    v
}

/// Least-squares polynomial of minimal degree through `(s_i, y_i)`,
/// returned as coefficients in `s`.
fn fit_band(s: &[f64], y: &[Complex64]) -> Option<Vec<Complex64>> {
    let scale_y = y.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if scale_y == 0.0 {
        return Some(Vec::new());
    }
    let scale_s = s.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1.0);
    let x: Vec<f64> = s.iter().map(|v| v / scale_s).collect();
    let tol = FIT_TOLERANCE * scale_y.max(1.0);
    let rhs = DVector::from_column_slice(y);
    for degree in 0..=MAX_FIT_DEGREE.min(s.len() - 1) {
        let design = DMatrix::from_fn(x.len(), degree + 1, |i, j| Complex64::new(x[i].powi(j as i32), 0.0));
        let coeffs = design.clone().svd(true, true).solve(&rhs, 1e-14).ok()?;
        let residual = (&design * &coeffs - &rhs).iter().map(|v| v.norm()).fold(0.0, f64::max);
        if residual <= tol {
            return Some(coeffs.iter().enumerate().map(|(j, c)| c / scale_s.powi(j as i32)).collect());
        }
    }
    None
}

/// Weyl symbol of a banded operator.
///
/// Each band `κ = m − n` is fitted as a polynomial in `s = (m+n)/2` using
/// only entries inside the operator's reliable radius; coefficients are
/// converted to powers of `p = ħs` and snapped to nearby rationals with
/// small denominators. Bands without polynomial structure (degree above
/// `MAX_FIT_DEGREE` or residual above `FIT_TOLERANCE`) make the whole
/// result fall back to [`WeylSymbol::Numeric`].
pub fn weyl_symbol(a: &BandedOperator, hbar: f64) -> Result<WeylSymbol> {
    if !(hbar > 0.0 && hbar.is_finite()) {
        return Err(Error::Parameter(format!("hbar must be positive, got {hbar}")));
    }
    let r = a.reliable_radius() as i64;
    let bw = a.bandwidth() as i64;
    let mut sym = PhaseSpaceSymbol::zero();
    for kappa in -bw..=bw {
        let lo = (-r).max(-r + kappa);
        let hi = r.min(r + kappa);
        if lo > hi {
            continue;
        }
        let rows: Vec<i64> = (lo..=hi).collect();
        let s: Vec<f64> = rows.iter().map(|&m| m as f64 - 0.5 * kappa as f64).collect();
        let y: Vec<Complex64> = rows.iter().map(|&m| a.get(m, m - kappa)).collect();
        let Some(coeffs_s) = fit_band(&s, &y) else {
            return Ok(WeylSymbol::Numeric(symbol_field(a)));
        };
        let coeffs_p: Vec<Complex64> = coeffs_s
            .iter()
            .enumerate()
            .map(|(j, c)| {
                let v = c / hbar.powi(j as i32);
                Complex64::new(snap(v.re), snap(v.im))
            })
            .collect();
        sym.add_mode(kappa, &coeffs_p);
    }
    Ok(WeylSymbol::Exact(sym))
}

/// Regularized moment `∫dp̄ p̄^j sinc π(p̄ − s) = s^j`.
///
/// The integral does not converge for `j ≥ 1`; the value is its Abel/Gauss
/// limit `lim_{η→0} ∫ p̄^j sinc π(p̄ − s) e^{−ηp̄²} dp̄`, equivalently the
/// `j`-th derivative of the Fourier transform at the origin.
pub fn sinc_moment(j: i64, s: f64) -> Result<f64> {
    if j < 0 {
        return Err(Error::Parameter(format!("moment order must be non-negative, got {j}")));
    }
    Ok(s.powi(j as i32))
}

/// `2π tr[V(θ, p̄) A B]` sampled on a grid (row-major, θ outer).
pub fn product_symbol_by_trace(a: &BandedOperator, b: &BandedOperator, grid: &PhaseSpaceGrid) -> Result<Vec<Complex64>> {
    let ab = a.mul(b)?;
    Ok(symbol_field(&ab).evaluate_grid(grid, 0, 0))
}

/// `G_A(θ, p̄; θ₁, p̄₁) = 2π tr[V(θ, p̄) A V(θ₁, p̄₁)]`.
pub fn convolution_kernel(a: &BandedOperator, theta: f64, pbar: f64, theta1: f64, pbar1: f64) -> Complex64 {
    let n = a.n_max() as i64;
    let bw = a.bandwidth() as i64;
    let mut total = ZERO;
    for m in -n..=n {
        for k in -n..=n {
            let v1 = kernel(k, m, theta1, pbar1);
            if v1 == ZERO {
                continue;
            }
            // Σ_n V_mn(θ,p) A_nk
            let mut row = ZERO;
            for col in (k - bw).max(-n)..=(k + bw).min(n) {
                row += kernel(m, col, theta, pbar) * a.get(col, k);
            }
            total += row * v1;
        }
    }
    2.0 * PI * total
}

/// `tr[V(θ,p̄) V(θ₁,p̄₁) V(θ₂,p̄₂)]
///  = (4/(2π)³) exp(−2i[p̄(θ₁−θ₂) + p̄₁(θ₂−θ) + p̄₂(θ−θ₁)])`.
pub fn triple_trace(theta: f64, pbar: f64, theta1: f64, pbar1: f64, theta2: f64, pbar2: f64) -> Complex64 {
    let phase = pbar * (theta1 - theta2) + pbar1 * (theta2 - theta) + pbar2 * (theta - theta1);
    Complex64::from_polar(4.0 / (2.0 * PI).powi(3), -2.0 * phase)
}
