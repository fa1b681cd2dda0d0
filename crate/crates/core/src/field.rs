//! Exact phase-space fields `Σ f_{k,s} e^{ikθ} sinc π(p̄ − s)`, `k ∈ ℤ`, `s ∈ ½ℤ`.
//!
//! Every Wigner and Moyal function of a truncated state is such a field, and
//! the field class is closed under half-integer momentum shifts and under
//! multiplication by Fourier modes, which is all the Liouville and energy
//! equations need.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::basis::WaveFunction;
use crate::grid::PhaseSpaceGrid;
use crate::sinc::{sinc_deriv, sinc_pi};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `(ik)^order`.
pub(crate) fn theta_factor(k: i64, order: u32) -> Complex64 {
    Complex64::new(0.0, k as f64).powu(order)
}

/// Sparse field keyed by `(k, 2s)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ShiftedSincField {
    terms: BTreeMap<(i64, i64), Complex64>,
}

impl ShiftedSincField {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `f·e^{ikθ}·sinc π(p̄ − two_s/2)`.
    pub fn add_term(&mut self, k: i64, two_s: i64, f: Complex64) {
        if f == ZERO {
            return;
        }
        let entry = self.terms.entry((k, two_s)).or_insert(ZERO);
        *entry += f;
        if *entry == ZERO {
            self.terms.remove(&(k, two_s));
        }
    }

    /// Field of `Σ_mn W_mn V_mn(θ, p̄)` for `m, n ∈ [−n_max, n_max]`.
    pub fn from_weights<F: FnMut(i64, i64) -> Complex64>(n_max: usize, mut weight: F) -> Self {
        let n = n_max as i64;
        let mut field = Self::new();
        for m in -n..=n {
            for col in -n..=n {
                field.add_term(col - m, m + col, weight(m, col) / (2.0 * PI));
            }
        }
        field
    }

    /// Moyal field `V_{ψ2ψ1}`: weights `conj(c²_m) c¹_n`.
    pub fn moyal(psi2: &WaveFunction, psi1: &WaveFunction) -> Self {
        let n_max = psi2.n_max().max(psi1.n_max());
        Self::from_weights(n_max, |m, n| psi2.coeff(m).conj() * psi1.coeff(n))
    }

    pub fn wigner(psi: &WaveFunction) -> Self {
        Self::moyal(psi, psi)
    }

    /// `tr[ρ V(θ, p̄)]`: weights `ρ_nm`. Matrix indices run over `[−n_max, n_max]`.
    pub fn from_density(rho: &DMatrix<Complex64>) -> Self {
        let n_max = (rho.nrows() - 1) / 2;
        let off = n_max as i64;
        Self::from_weights(n_max, |m, n| rho[((n + off) as usize, (m + off) as usize)])
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `f_{k,s}` with `s = two_s/2`.
    pub fn coefficient(&self, k: i64, two_s: i64) -> Complex64 {
        self.terms.get(&(k, two_s)).copied().unwrap_or(ZERO)
    }

    /// Terms as `(k, 2s, f)`.
    pub fn terms(&self) -> impl Iterator<Item = (i64, i64, Complex64)> + '_ {
        self.terms.iter().map(|(&(k, s), &f)| (k, s, f))
    }

    /// Largest `|k|`.
    pub fn max_mode(&self) -> i64 {
        self.terms.keys().map(|(k, _)| k.abs()).max().unwrap_or(0)
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let mut out = Self::new();
        for (k, s, f) in self.terms() {
            out.add_term(k, s, f * factor);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, s, f) in other.terms() {
            out.add_term(k, s, f);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// `F(θ, p̄ + two_a/2)`; shifting the argument moves every centre by `−a`.
    pub fn shifted(&self, two_a: i64) -> Self {
        Self { terms: self.terms.iter().map(|(&(k, s), &f)| ((k, s - two_a), f)).collect() }
    }

    /// `e^{iqθ} F(θ, p̄)`.
    pub fn times_mode(&self, q: i64) -> Self {
        Self { terms: self.terms.iter().map(|(&(k, s), &f)| ((k + q, s), f)).collect() }
    }

    /// `∂_θ^order F`.
    pub fn theta_derivative(&self, order: u32) -> Self {
        let mut out = Self::new();
        for (k, s, f) in self.terms() {
            out.add_term(k, s, f * theta_factor(k, order));
        }
        out
    }

    pub fn conj(&self) -> Self {
        let mut out = Self::new();
        for (k, s, f) in self.terms() {
            out.add_term(-k, s, f.conj());
        }
        out
    }

    /// `max |f_{−k,s} − conj(f_{k,s})|`; zero for real-valued fields.
    pub fn reality_defect(&self) -> f64 {
        self.terms().map(|(k, s, f)| (self.coefficient(-k, s) - f.conj()).norm()).fold(0.0, f64::max)
    }

    /// `F(θ, p̄)`.
    pub fn evaluate(&self, theta: f64, pbar: f64) -> Complex64 {
        self.terms().map(|(k, s, f)| f * Complex64::cis(k as f64 * theta) * sinc_pi(pbar - 0.5 * s as f64)).sum()
    }

    /// `∂_θ^a ∂_p̄^b F(θ, p̄)`.
    pub fn evaluate_derivative(&self, theta: f64, pbar: f64, theta_order: u32, pbar_order: u32) -> Complex64 {
        let scale = PI.powi(pbar_order as i32);
        self.terms()
            .map(|(k, s, f)| {
                f * theta_factor(k, theta_order)
                    * Complex64::cis(k as f64 * theta)
                    * scale
                    * sinc_deriv(PI * (pbar - 0.5 * s as f64), pbar_order)
            })
            .sum()
    }

    /// `Σ f (ik)^a e^{ikθ} profile(p̄, s)` on a grid, row-major (θ outer).
    ///
    /// Separable: the `p̄` profiles are summed per mode first, so the cost
    /// is `O(modes · centres · n_p + n_θ · modes · n_p)`.
    pub fn evaluate_grid_with<P>(&self, grid: &PhaseSpaceGrid, theta_order: u32, profile: P) -> Vec<Complex64>
    where
        P: Fn(f64, f64) -> f64 + Sync,
    {
        let pbars = grid.pbars();
        let mut by_mode: BTreeMap<i64, Vec<Complex64>> = BTreeMap::new();
        for (k, s, f) in self.terms() {
            let row = by_mode.entry(k).or_insert_with(|| vec![ZERO; pbars.len()]);
            let s = 0.5 * s as f64;
            for (acc, &p) in row.iter_mut().zip(pbars) {
                *acc += f * profile(p, s);
            }
        }
        let modes: Vec<(Complex64, i64, Vec<Complex64>)> =
            by_mode.into_iter().map(|(k, row)| (theta_factor(k, theta_order), k, row)).collect();
        let n_p = pbars.len();
        let mut out = vec![ZERO; grid.len()];
        out.par_chunks_mut(n_p).zip(grid.thetas().par_iter()).for_each(|(row, &theta)| {
            for (factor, k, profile_row) in &modes {
                let phase = factor * Complex64::cis(*k as f64 * theta);
                for (v, g) in row.iter_mut().zip(profile_row) {
                    *v += phase * g;
                }
            }
        });
        out
    }

    /// `∂_θ^a ∂_p̄^b F` on a grid.
    pub fn evaluate_grid(&self, grid: &PhaseSpaceGrid, theta_order: u32, pbar_order: u32) -> Vec<Complex64> {
        let scale = PI.powi(pbar_order as i32);
        self.evaluate_grid_with(grid, theta_order, move |p, s| scale * sinc_deriv(PI * (p - s), pbar_order))
    }

    /// `∫dθ ∫dp̄ F = 2π Σ_s f_{0,s}`.
    pub fn integral(&self) -> Complex64 {
        2.0 * PI * self.terms().filter(|(k, _, _)| *k == 0).map(|(_, _, f)| f).sum::<Complex64>()
    }

    /// `∫dθ ∫dp̄ F·G`, exact: Fourier orthogonality in `θ` and
    /// `∫ sinc π(p̄ − s) sinc π(p̄ − s') dp̄ = sinc π(s − s')`.
    pub fn integral_of_product(&self, other: &Self) -> Complex64 {
        let mut total = ZERO;
        for (k, s, f) in self.terms() {
            for (&(k2, s2), &g) in other.terms.range((-k, i64::MIN)..=(-k, i64::MAX)) {
                debug_assert_eq!(k2, -k);
                total += f * g * sinc_pi(0.5 * (s - s2) as f64);
            }
        }
        2.0 * PI * total
    }

    /// `∫dp̄ F(θ, p̄) = Σ f e^{ikθ}`.
    pub fn theta_marginal(&self, theta: f64) -> Complex64 {
        self.terms().map(|(k, _, f)| f * Complex64::cis(k as f64 * theta)).sum()
    }

    /// `∫dθ F(θ, p̄) = 2π Σ_s f_{0,s} sinc π(p̄ − s)`.
    pub fn momentum_marginal(&self, pbar: f64) -> Complex64 {
        2.0 * PI
            * self
                .terms()
                .filter(|(k, _, _)| *k == 0)
                .map(|(_, s, f)| f * sinc_pi(pbar - 0.5 * s as f64))
                .sum::<Complex64>()
    }

    /// Largest coefficient modulus.
    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms().map(|(_, _, f)| f.norm()).fold(0.0, f64::max)
    }
}
