//! The `sinc x = sin x / x` family.
//!
//! Derivatives of any order are available; the spectral-shift series of the
//! Liouville and energy equations need odd/even orders well beyond three.
//! Evaluation switches between a Taylor series near the removable
//! singularity, an integral representation at moderate arguments and the
//! Leibniz closed form at large arguments, so no branch suffers from
//! catastrophic cancellation.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::OnceLock;

use crate::quadrature::GaussLegendre;

/// Below this modulus `sinc` itself uses its 6-term Taylor polynomial.
pub const SINC_SERIES_THRESHOLD: f64 = 1e-3;

/// Below this modulus derivatives use the (convergent) Taylor series.
pub const DERIV_SERIES_THRESHOLD: f64 = 1.0;

/// `sin x / x` with the removable singularity at zero filled in.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < SINC_SERIES_THRESHOLD {
        let x2 = x * x;
        // 1 - x²/3! + x⁴/5! - x⁶/7! + x⁸/9! - x¹⁰/11!
        1.0 - x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0 * (1.0 - x2 / 110.0))))
    } else {
        x.sin() / x
    }
}

/// `sinc(πx)`, the interpolation kernel on the integer lattice; exactly
/// zero at nonzero integers.
#[inline]
pub fn sinc_pi(x: f64) -> f64 {
    if x != 0.0 && x.fract() == 0.0 {
        return 0.0;
    }
    sinc(PI * x)
}

/// `d^order/dx^order sinc(x)`.
pub fn sinc_deriv(x: f64, order: u32) -> f64 {
    if order == 0 {
        return sinc(x);
    }
    let ax = x.abs();
    if ax < DERIV_SERIES_THRESHOLD {
        taylor_deriv(x, order)
    } else if order <= 3 || ax >= 2.0 * (order as f64 + 1.0) {
        leibniz_deriv(x, order)
    } else {
        integral_deriv(x, order)
    }
}

/// `∫ dp̄ sinc π(p̄ − a) sinc π(p̄ − b) = sinc π(a − b)`.
///
/// Shifted sincs are band-limited to `[−π, π]`, so their overlap is the
/// sinc of the shift difference; integer differences give Kronecker deltas.
pub fn sinc_overlap(a: f64, b: f64) -> f64 {
    sinc_pi(a - b)
}

fn taylor_deriv(x: f64, order: u32) -> f64 {
    // sinc(x) = Σ_j (-1)^j x^{2j} / (2j+1)!, so the n-th derivative is
    // Σ_{2j ≥ n} (-1)^j x^{2j-n} / ((2j+1) (2j-n)!).
    let n = order as i64;
    let mut j = (n + 1) / 2;
    let mut sum = 0.0;
    loop {
        let p = 2 * j - n;
        let mut fact = 1.0;
        for i in 2..=p {
            fact *= i as f64;
        }
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let term = sign * x.powi(p as i32) / ((2 * j + 1) as f64 * fact);
        sum += term;
        if p > 4 && term.abs() <= 1e-18 * sum.abs().max(1e-300) {
            break;
        }
        if p > 80 {
            break;
        }
        j += 1;
    }
    sum
}

fn leibniz_deriv(x: f64, order: u32) -> f64 {
    // (sin x · x⁻¹)^{(n)} = Σ_k C(n,k) sin^{(k)}(x) (−1)^{n−k} (n−k)! x^{−(n−k+1)}
    let n = order as usize;
    let mut sum = 0.0;
    let mut binom = 1.0;
    for k in 0..=n {
        if k > 0 {
            binom = binom * (n - k + 1) as f64 / k as f64;
        }
        let r = n - k;
        let mut fact = 1.0;
        for i in 2..=r {
            fact *= i as f64;
        }
        let sign = if r.is_multiple_of(2) { 1.0 } else { -1.0 };
        let dsin = (x + k as f64 * FRAC_PI_2).sin();
        sum += binom * dsin * sign * fact / x.powi(r as i32 + 1);
    }
    sum
}

fn integral_deriv(x: f64, order: u32) -> f64 {
    // sinc(x) = ∫₀¹ cos(xt) dt  ⇒  sinc^{(n)}(x) = ∫₀¹ tⁿ cos(xt + nπ/2) dt
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    let rule = RULE.get_or_init(|| GaussLegendre::new(20));
    let phase = order as f64 * FRAC_PI_2;
    let panels = (x.abs() / 4.0).ceil().max(1.0) as usize;
    let h = 1.0 / panels as f64;
    let mut sum = 0.0;
    for i in 0..panels {
        let a = i as f64 * h;
        sum += rule.integrate(a, a + h, |t| t.powi(order as i32) * (x * t + phase).cos());
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn special_values() {
        assert_eq!(sinc(0.0), 1.0);
        assert!(sinc(PI).abs() < 1e-16);
        assert_eq!(sinc_deriv(0.0, 1), 0.0);
        assert!((sinc_deriv(0.0, 2) + 1.0 / 3.0).abs() < 1e-16);
        assert!(sinc_deriv(0.0, 3).abs() < 1e-16);
        assert!((sinc_deriv(0.0, 4) - 1.0 / 5.0).abs() < 1e-16);
    }

    #[test]
    fn branches_agree_at_switch_points() {
        for order in 0..=13u32 {
            for &x in &[0.999_999, 1.000_001, 2.0 * (order as f64 + 1.0) - 1e-9, 2.0 * (order as f64 + 1.0) + 1e-9] {
                let a = taylor_deriv(x, order);
                let b = integral_deriv(x, order);
                let scale = 1.0f64.max(a.abs());
                if x < 1.5 {
                    assert!((a - b).abs() < 1e-13 * scale, "order {order} x {x}: {a} vs {b}");
                }
                if order >= 1 && x > 1.5 {
                    let c = leibniz_deriv(x, order);
                    assert!((b - c).abs() < 1e-12, "order {order} x {x}: {b} vs {c}");
                }
            }
        }
    }

    #[test]
    fn finite_difference_oracle() {
        // central differences of the lower order reproduce the next order
        let h = 1e-5;
        for order in 0..8u32 {
            for &x in &[-7.3, -2.2, -0.4, 0.0, 0.3, 1.7, 5.5, 12.0, 40.0] {
                let fd = (sinc_deriv(x + h, order) - sinc_deriv(x - h, order)) / (2.0 * h);
                let exact = sinc_deriv(x, order + 1);
                assert!((fd - exact).abs() < 1e-8, "order {} at {}: fd {} exact {}", order + 1, x, fd, exact);
            }
        }
    }

    #[test]
    fn small_argument_branch_is_smooth() {
        let a = sinc(SINC_SERIES_THRESHOLD * 0.999_999);
        let b = sinc(SINC_SERIES_THRESHOLD * 1.000_001);
        assert!((a - b).abs() < 1e-12);
        let x: f64 = 1e-6;
        assert!((sinc(x) - (1.0 - x * x / 6.0)).abs() < 1e-20);
    }

    #[test]
    fn overlap_is_kronecker_on_integers() {
        for m in -5..=5 {
            for n in -5..=5 {
                let v = sinc_overlap(m as f64, n as f64);
                let d = if m == n { 1.0 } else { 0.0 };
                assert!((v - d).abs() < 1e-15);
            }
        }
    }
}
