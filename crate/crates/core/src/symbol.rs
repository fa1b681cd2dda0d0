//! Phase-space symbols `Σ_k P_k(p) e^{ikθ}` with polynomial `P_k`.
//!
//! Coefficients are stored in powers of `p` (action units). The class is
//! closed under the star product and under Weyl quantization.

use std::collections::BTreeMap;

use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Polynomial arithmetic on ascending coefficient slices.
pub mod poly {
    use num_complex::Complex64;

    const ZERO: Complex64 = Complex64::new(0.0, 0.0);

    /// Drops trailing zero coefficients.
    pub fn trim(mut p: Vec<Complex64>) -> Vec<Complex64> {
        while p.last() == Some(&ZERO) {
            p.pop();
        }
        p
    }

    pub fn eval(p: &[Complex64], x: Complex64) -> Complex64 {
        p.iter().rev().fold(ZERO, |acc, &c| acc * x + c)
    }

    pub fn eval_real(p: &[Complex64], x: f64) -> Complex64 {
        p.iter().rev().fold(ZERO, |acc, &c| acc * x + c)
    }

    pub fn add(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![ZERO; a.len().max(b.len())];
        for (i, &c) in a.iter().enumerate() {
            out[i] += c;
        }
        for (i, &c) in b.iter().enumerate() {
            out[i] += c;
        }
        trim(out)
    }

    pub fn scale(a: &[Complex64], f: Complex64) -> Vec<Complex64> {
        trim(a.iter().map(|&c| c * f).collect())
    }

    pub fn mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![ZERO; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        trim(out)
    }

    pub fn derivative(a: &[Complex64]) -> Vec<Complex64> {
        trim(a.iter().enumerate().skip(1).map(|(j, &c)| c * j as f64).collect())
    }

    /// `P(x + shift)` by the Taylor (binomial) expansion.
    pub fn shift(a: &[Complex64], shift: f64) -> Vec<Complex64> {
        let n = a.len();
        let mut out = vec![ZERO; n];
        for (j, &c) in a.iter().enumerate() {
            // c (x + s)^j = c Σ_i C(j, i) x^i s^{j−i}
            let mut binom = 1.0;
            for (i, slot) in out.iter_mut().enumerate().take(j + 1) {
                *slot += c * binom * shift.powi((j - i) as i32);
                binom *= (j - i) as f64 / (i + 1) as f64;
            }
        }
        trim(out)
    }
}

/// Exact symbol `Σ_k P_k(p) e^{ikθ}`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PhaseSpaceSymbol {
    terms: BTreeMap<i64, Vec<Complex64>>,
}

impl PhaseSpaceSymbol {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Complex64) -> Self {
        Self::mode(0, vec![c])
    }

    /// `p^j`.
    pub fn p_power(j: usize) -> Self {
        let mut coeffs = vec![ZERO; j + 1];
        coeffs[j] = Complex64::new(1.0, 0.0);
        Self::mode(0, coeffs)
    }

    /// `P(p) e^{ikθ}`.
    pub fn mode(k: i64, coeffs: Vec<Complex64>) -> Self {
        let mut s = Self::zero();
        s.add_mode(k, &coeffs);
        s
    }

    /// `cos kθ`.
    pub fn cos(k: i64) -> Self {
        if k == 0 {
            return Self::constant(Complex64::new(1.0, 0.0));
        }
        let half = Complex64::new(0.5, 0.0);
        Self::mode(k, vec![half]).add(&Self::mode(-k, vec![half]))
    }

    /// `sin kθ`.
    pub fn sin(k: i64) -> Self {
        let c = Complex64::new(0.0, -0.5);
        Self::mode(k, vec![c]).add(&Self::mode(-k, vec![-c]))
    }

    /// Adds `P(p) e^{ikθ}` in place.
    pub fn add_mode(&mut self, k: i64, coeffs: &[Complex64]) {
        let sum = match self.terms.get(&k) {
            Some(existing) => poly::add(existing, coeffs),
            None => poly::trim(coeffs.to_vec()),
        };
        if sum.is_empty() {
            self.terms.remove(&k);
        } else {
            self.terms.insert(k, sum);
        }
    }

    /// `P_k`, empty when absent.
    pub fn poly(&self, k: i64) -> &[Complex64] {
        self.terms.get(&k).map_or(&[], |v| v.as_slice())
    }

    pub fn modes(&self) -> impl Iterator<Item = (i64, &[Complex64])> {
        self.terms.iter().map(|(&k, v)| (k, v.as_slice()))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_mode(&self) -> i64 {
        self.terms.keys().map(|k| k.abs()).max().unwrap_or(0)
    }

    /// Largest power of `p` (0 for the zero symbol).
    pub fn degree(&self) -> usize {
        self.terms.values().map(|v| v.len().saturating_sub(1)).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, p) in other.modes() {
            out.add_mode(k, p);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, f: Complex64) -> Self {
        let mut out = Self::zero();
        for (k, p) in self.modes() {
            out.add_mode(k, &poly::scale(p, f));
        }
        out
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (k, p) in self.modes() {
            for (n, q) in other.modes() {
                out.add_mode(k + n, &poly::mul(p, q));
            }
        }
        out
    }

    /// `∂_p`.
    pub fn dp(&self) -> Self {
        let mut out = Self::zero();
        for (k, p) in self.modes() {
            out.add_mode(k, &poly::derivative(p));
        }
        out
    }

    /// `∂_θ`.
    pub fn dtheta(&self) -> Self {
        let mut out = Self::zero();
        for (k, p) in self.modes() {
            out.add_mode(k, &poly::scale(p, Complex64::new(0.0, k as f64)));
        }
        out
    }

    /// Complex conjugate function.
    pub fn conj(&self) -> Self {
        let mut out = Self::zero();
        for (k, p) in self.modes() {
            out.add_mode(-k, &p.iter().map(|c| c.conj()).collect::<Vec<_>>());
        }
        out
    }

    /// `max |coefficient|` of `self − other`.
    pub fn max_coefficient_difference(&self, other: &Self) -> f64 {
        self.sub(other).modes().flat_map(|(_, p)| p.iter().map(|c| c.norm())).fold(0.0, f64::max)
    }

    /// Real-valued for all `(θ, p)` within `tol` on the coefficients.
    pub fn is_real(&self, tol: f64) -> bool {
        self.max_coefficient_difference(&self.conj()) <= tol
    }

    /// Removes coefficients with modulus at most `tol`.
    pub fn cleaned(&self, tol: f64) -> Self {
        let mut out = Self::zero();
        for (k, p) in self.modes() {
            let q: Vec<_> = p.iter().map(|&c| if c.norm() <= tol { ZERO } else { c }).collect();
            out.add_mode(k, &q);
        }
        out
    }

    pub fn evaluate(&self, theta: f64, p: f64) -> Complex64 {
        self.modes().map(|(k, q)| poly::eval_real(q, p) * Complex64::cis(k as f64 * theta)).sum()
    }
}
