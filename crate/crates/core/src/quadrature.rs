//! Quadrature rules used by the cross-checks.
//!
//! Angle integrals of band-limited integrands are done on a uniform grid,
//! which is exact once the grid resolves every Fourier mode. Momentum
//! integrals of sinc products decay only like `1/p̄²`, so they combine a finite
//! Gauss–Legendre window with a tail correction fitted to that envelope.

use std::f64::consts::PI;

use num_complex::Complex64;

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }

    pub fn integrate_complex<F: FnMut(f64) -> Complex64>(&self, a: f64, b: f64, mut f: F) -> Complex64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| f(mid + half * x) * w)
            .sum::<Complex64>()
            * half
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// Uniform angle nodes `θ_j = −π + 2πj/n`, endpoint-exclusive at `π`.
pub fn theta_nodes(n: usize) -> Vec<f64> {
    (0..n).map(|j| -PI + 2.0 * PI * j as f64 / n as f64).collect()
}

/// `∫_{−π}^{π} f(θ) dθ` on `n` uniform nodes; exact for trigonometric
/// polynomials of degree below `n`.
pub fn integrate_theta<F: FnMut(f64) -> Complex64>(n: usize, mut f: F) -> Complex64 {
    let w = 2.0 * PI / n as f64;
    theta_nodes(n).into_iter().map(|t| f(t) * w).sum()
}

/// Options for momentum integrals over the whole real line.
#[derive(Debug, Clone, Copy)]
pub struct MomentumQuadrature {
    /// Half-width `P` of the explicit window `[−P, P]` (rounded to an integer).
    pub window: f64,
    /// Gauss–Legendre nodes per unit-length panel.
    pub nodes_per_panel: usize,
}

impl Default for MomentumQuadrature {
    fn default() -> Self {
        Self { window: 400.0, nodes_per_panel: 12 }
    }
}

impl MomentumQuadrature {
    pub fn with_window(window: f64) -> Self {
        Self { window, ..Self::default() }
    }

    /// `∫_{−∞}^{∞} f(p̄) dp̄` for integrands behaving like
    /// `(A + B cos 2πp̄ + C sin 2πp̄)/p̄²` at large `|p̄|`.
    ///
    /// The envelope constant `A` on each side is estimated by averaging
    /// `p̄² f(p̄)` over the last unit period of the window, which removes the
    /// oscillating part; the tail then contributes `A/P`.
    pub fn integrate<F: FnMut(f64) -> Complex64>(&self, mut f: F) -> Complex64 {
        let rule = GaussLegendre::new(self.nodes_per_panel);
        let p = self.window.round().max(2.0) as i64;
        let mut total = Complex64::new(0.0, 0.0);
        for i in -p..p {
            let a = i as f64;
            total += rule.integrate_complex(a, a + 1.0, &mut f);
        }
        let pf = p as f64;
        let upper = rule.integrate_complex(pf - 1.0, pf, |x| f(x) * (x * x));
        let lower = rule.integrate_complex(-pf, -pf + 1.0, |x| f(x) * (x * x));
        total + (upper + lower) / pf
    }

    /// Same integral with the tail correction switched off (plain window).
    pub fn integrate_window<F: FnMut(f64) -> Complex64>(&self, mut f: F) -> Complex64 {
        let rule = GaussLegendre::new(self.nodes_per_panel);
        let p = self.window.round().max(1.0) as i64;
        (-p..p).map(|i| rule.integrate_complex(i as f64, i as f64 + 1.0, &mut f)).sum()
    }
}

/// Smooth flat-top taper: 1 on `[0, 1/2]`, 0 beyond 1, C^∞ in between.
fn flat_top(x: f64) -> f64 {
    let x = x.abs();
    if x <= 0.5 {
        return 1.0;
    }
    if x >= 1.0 {
        return 0.0;
    }
    let t = (1.0 - x) / 0.5;
    let bump = |u: f64| if u <= 0.0 { 0.0 } else { (-1.0 / u).exp() };
    bump(t) / (bump(t) + bump(1.0 - t))
}

/// `∫ dp̄ e^{ip̄θ} f(p̄)` for `f` band-limited to `[−π, π]` and `|θ| < π`.
///
/// Trapezoidal sampling at step ½ is alias-free for this band; the slowly
/// decaying sinc tails are handled by a flat-top taper of half-width
/// `half_width`, which leaves the smooth part of the spectrum untouched.
pub fn fourier_momentum<F: FnMut(f64) -> Complex64>(mut f: F, theta: f64, half_width: f64) -> Complex64 {
    let h = 0.5;
    let j_max = (half_width / h).ceil() as i64;
    let mut sum = Complex64::new(0.0, 0.0);
    for j in -j_max..=j_max {
        let p = j as f64 * h;
        let w = flat_top(p / half_width);
        if w == 0.0 {
            continue;
        }
        sum += f(p) * Complex64::from_polar(w * h, p * theta);
    }
    sum
}
