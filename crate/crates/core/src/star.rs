//! Moyal star product on polynomial symbols.
//!
//! Fourier modes are eigenfunctions of `∂_θ`, so the bidifferential
//! exponential `exp((ħ/2i)Λ)` acts on `P(p)e^{ikθ} ⋆ Q(p)e^{inθ}` as a pair
//! of momentum shifts:
//! `P(p + ħn/2) Q(p − ħk/2) e^{i(k+n)θ}`.
//! Nothing is truncated, and for polynomial symbols the product is exact.

use num_complex::Complex64;

use crate::quadrature::MomentumQuadrature;
use crate::sinc::sinc;
use crate::symbol::{poly, PhaseSpaceSymbol};

/// `A ⋆ B` for `ħ ≥ 0`; `ħ = 0` gives the pointwise product.
pub fn star(a: &PhaseSpaceSymbol, b: &PhaseSpaceSymbol, hbar: f64) -> PhaseSpaceSymbol {
    let mut out = PhaseSpaceSymbol::zero();
    for (k, p) in a.modes() {
        for (n, q) in b.modes() {
            let left = poly::shift(p, 0.5 * hbar * n as f64);
            let right = poly::shift(q, -0.5 * hbar * k as f64);
            out.add_mode(k + n, &poly::mul(&left, &right));
        }
    }
    out
}

/// `A ⋆ B − B ⋆ A`.
pub fn star_commutator(a: &PhaseSpaceSymbol, b: &PhaseSpaceSymbol, hbar: f64) -> PhaseSpaceSymbol {
    star(a, b, hbar).sub(&star(b, a, hbar))
}

/// `A ⋆ B + B ⋆ A`.
pub fn star_anticommutator(a: &PhaseSpaceSymbol, b: &PhaseSpaceSymbol, hbar: f64) -> PhaseSpaceSymbol {
    star(a, b, hbar).add(&star(b, a, hbar))
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Taylor coefficients `c_0, …, c_order` of `A ⋆ B = Σ_r ħ^r c_r`.
///
/// Expanding both shifts gives
/// `c_r = Σ_{a+b=r} P^{(a)} Q^{(b)} (n/2)^a (−k/2)^b / (a! b!)` per pair of
/// modes; the series terminates at `deg P + deg Q`.
pub fn hbar_expansion(a: &PhaseSpaceSymbol, b: &PhaseSpaceSymbol, order: usize) -> Vec<PhaseSpaceSymbol> {
    let mut out = vec![PhaseSpaceSymbol::zero(); order + 1];
    for (k, p) in a.modes() {
        let mut dp = vec![p.to_vec()];
        for i in 0..order {
            let next = poly::derivative(&dp[i]);
            dp.push(next);
        }
        for (n, q) in b.modes() {
            let mut dq = vec![q.to_vec()];
            for i in 0..order {
                let next = poly::derivative(&dq[i]);
                dq.push(next);
            }
            for (r, slot) in out.iter_mut().enumerate() {
                for i in 0..=r {
                    let j = r - i;
                    if dp[i].is_empty() || dq[j].is_empty() {
                        continue;
                    }
                    let w = (0.5 * n as f64).powi(i as i32) * (-0.5 * k as f64).powi(j as i32)
                        / (factorial(i) * factorial(j));
                    if w == 0.0 {
                        continue;
                    }
                    slot.add_mode(k + n, &poly::scale(&poly::mul(&dp[i], &dq[j]), Complex64::new(w, 0.0)));
                }
            }
        }
    }
    out
}

/// `Σ_r ħ^r c_r`.
pub fn sum_expansion(coeffs: &[PhaseSpaceSymbol], hbar: f64) -> PhaseSpaceSymbol {
    coeffs
        .iter()
        .enumerate()
        .fold(PhaseSpaceSymbol::zero(), |acc, (r, c)| acc.add(&c.scale(Complex64::new(hbar.powi(r as i32), 0.0))))
}

/// `(1/π) ∫dp̄₁ ∫_{−π}^{π} dα f(p̄₁) e^{−2i(p̄₁ − p̄)α} = 2 ∫dp̄₁ f(p̄₁) sinc 2π(p̄₁ − p̄)`.
///
/// This reproduces `f(p̄)` for functions band-limited to `[−2π, 2π]`, which
/// includes every finite sum of shifted `sinc π(p̄ − s)`; for other symbols no
/// claim is made. The momentum integral uses the tail-corrected window.
pub fn reproducing_integral<F>(f: F, pbar: f64, window: f64) -> Complex64
where
    F: Fn(f64) -> Complex64,
{
    let two_pi = 2.0 * std::f64::consts::PI;
    2.0 * MomentumQuadrature::with_window(window).integrate(|p1| f(p1) * sinc(two_pi * (p1 - pbar)))
}
