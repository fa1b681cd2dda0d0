//! Invariant suites behind `cylwig check`.

use std::f64::consts::PI;

use cylwig::basis::{inner_product, standard_operator, StandardOperator, WaveFunction};
use cylwig::dynamics::{
    self, bloch_order, continuity_lhs, continuity_source, eigensystem, energy_residual, liouville_residual_pure,
    PotentialForm,
};
use cylwig::field::ShiftedSincField;
use cylwig::grid::PhaseSpaceGrid;
use cylwig::kernel::{
    fidelity, kernel_orthogonality, kernel_orthogonality_quadrature, marginals, momentum_filter, normalization,
    overlap, purity, recover_wavefunction, RecoveryOptions,
};
use cylwig::star::{hbar_expansion, star, sum_expansion};
use cylwig::symbol::PhaseSpaceSymbol;
use cylwig::weyl::{weyl_quantize, weyl_symbol};
use cylwig::PendulumModel;
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Kernel,
    Weyl,
    Star,
    Dynamics,
    All,
}

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

fn result(name: &'static str, value: f64, tol: f64) -> CheckResult {
    CheckResult { name, pass: value <= tol, detail: format!("{value:.3e} (tolerance {tol:.1e})") }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Deterministic test states (no RNG so reports are reproducible).
fn states() -> Vec<WaveFunction> {
    (0..6)
        .map(|s| {
            let n_max = 2 + s % 4;
            WaveFunction::from_fn(n_max, |n| {
                let x = (n as f64 + 1.3) * (s as f64 + 0.7);
                c(x.sin() + 0.1 * s as f64, (1.7 * x).cos())
            })
            .normalized()
            .unwrap()
        })
        .collect()
}

pub fn kernel_suite(scale: f64) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let mut ortho = 0.0f64;
    for k in -4..=4i64 {
        for l in -4..=4i64 {
            for m in -4..=4i64 {
                for n in -4..=4i64 {
                    let delta = if k == n && l == m { 1.0 } else { 0.0 };
                    ortho = ortho.max((2.0 * PI * kernel_orthogonality(k, l, m, n) - delta).abs());
                }
            }
        }
    }
    out.push(result("kernel orthogonality, 2π·∫∫V_kl V_mn = δ_kn δ_lm", ortho, 1e-15 * scale));
    let quad = [[0, 0, 0, 0], [2, -1, -1, 2], [1, 3, 0, 2], [3, 3, 3, 3]]
        .iter()
        .map(|&[k, l, m, n]| (kernel_orthogonality_quadrature(k, l, m, n, 300.0) - kernel_orthogonality(k, l, m, n)).norm())
        .fold(0.0, f64::max);
    out.push(result("kernel orthogonality by quadrature", quad, 1e-6 * scale));
    let s = states();
    let norm = s.iter().map(|p| (normalization(p) - 1.0).abs()).fold(0.0, f64::max);
    out.push(result("normalization ∫∫V = 1", norm, 1e-12 * scale));
    let pur = s.iter().map(|p| (purity(p) - 1.0 / (2.0 * PI)).abs()).fold(0.0, f64::max);
    out.push(result("purity ∫∫V² = 1/2π", pur, 1e-12 * scale));
    let ov = s.windows(2).map(|w| (overlap(&w[0], &w[1]) - inner_product(&w[0], &w[1]).norm_sqr()).abs()).fold(0.0, f64::max);
    out.push(result("overlap 2π∫∫V₁V₂ = |⟨ψ₁,ψ₂⟩|²", ov, 1e-10 * scale));
    let mut marg = 0.0f64;
    let mut filt = 0.0f64;
    for p in &s {
        let m = marginals(p);
        for t in [-2.5, -0.3, 1.1, 3.0] {
            marg = marg.max((m.theta(t) - p.evaluate(t).norm_sqr() / (2.0 * PI)).abs());
        }
        for n in -(p.n_max() as i64)..=p.n_max() as i64 {
            filt = filt.max((momentum_filter(p, p, n).re - p.coeff(n).norm_sqr()).abs());
        }
    }
    out.push(result("θ-marginal = |ψ(θ)|²/2π", marg, 1e-12 * scale));
    out.push(result("momentum filter = |c_m|²", filt, 1e-10 * scale));
    let mut worst = 0.0f64;
    for p in s.iter().filter(|p| p.evaluate(0.0).norm() > 0.1).take(3) {
        let field = ShiftedSincField::wigner(p);
        let rec = recover_wavefunction(|t, q| field.evaluate(t, q).re, &RecoveryOptions::new(p.n_max())).unwrap();
        worst = worst.max(1.0 - fidelity(&rec, p));
    }
    out.push(result("recovery 1 − fidelity", worst, 1e-8 * scale));
    out
}

pub fn weyl_suite(scale: f64) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let (n_max, hbar) = (12, 1.0);
    let op = |k: StandardOperator| standard_operator(&k, n_max, hbar).unwrap();
    let p = PhaseSpaceSymbol::p_power(1);
    let cos = PhaseSpaceSymbol::cos(1);
    let sin = PhaseSpaceSymbol::sin(1);
    let l = op(StandardOperator::AngularMomentum);
    let cm = op(StandardOperator::Cos);
    let table = vec![
        (op(StandardOperator::Cos), cos.clone()),
        (op(StandardOperator::Sin), sin.clone()),
        (l.clone(), p.clone()),
        (op(StandardOperator::AngularMomentumSquared), PhaseSpaceSymbol::p_power(2)),
        (op(StandardOperator::CosK(2)), PhaseSpaceSymbol::cos(2)),
        (l.mul(&cm).unwrap(), p.mul(&cos).add(&sin.scale(c(0.0, 0.5 * hbar)))),
        (l.commutator(&cm).unwrap(), sin.scale(c(0.0, hbar))),
        (l.anticommutator(&cm).unwrap(), p.mul(&cos).scale(c(2.0, 0.0))),
    ];
    let mut table_err = 0.0f64;
    let mut round = 0.0f64;
    for (a, expected) in &table {
        match weyl_symbol(a, hbar).unwrap().exact() {
            Some(sym) => {
                table_err = table_err.max(sym.max_coefficient_difference(expected));
                let back = weyl_quantize(sym, n_max, hbar).unwrap();
                round = round.max(back.max_diff_within(a, a.reliable_radius()));
            }
            None => table_err = f64::INFINITY,
        }
    }
    out.push(result("Weyl symbol table", table_err, 0.0));
    out.push(result("quantize ∘ symbol on interior entries", round, 1e-12 * scale));
    let sym = p.mul(&p).mul(&PhaseSpaceSymbol::sin(2)).add(&PhaseSpaceSymbol::cos(3).scale(c(0.25, -1.5)));
    let back = weyl_symbol(&weyl_quantize(&sym, 16, 0.5).unwrap(), 0.5).unwrap();
    let err = back.exact().map_or(f64::INFINITY, |b| b.max_coefficient_difference(&sym));
    out.push(result("symbol ∘ quantize", err, 1e-10 * scale));
    let p2 = weyl_quantize(&PhaseSpaceSymbol::p_power(2), n_max, 0.5).unwrap();
    let mut p2_err = 0.0f64;
    for m in -(n_max as i64)..=n_max as i64 {
        p2_err = p2_err.max((p2.get(m, m) - c(0.25 * (m * m) as f64, 0.0)).norm());
    }
    out.push(result("p² → ħ²m²δ_mn", p2_err, 0.0));
    out
}

pub fn star_suite(scale: f64) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let hbar = 1.0;
    let p = PhaseSpaceSymbol::p_power(1);
    let cos = PhaseSpaceSymbol::cos(1);
    let q = PhaseSpaceSymbol::sin(1).scale(c(0.0, 0.5 * hbar));
    let e1 = star(&p, &cos, hbar).max_coefficient_difference(&p.mul(&cos).add(&q));
    let e2 = star(&cos, &p, hbar).max_coefficient_difference(&p.mul(&cos).sub(&q));
    out.push(result("Bopp examples L⋆C, C⋆L", e1.max(e2), 0.0));
    let a = p.mul(&p).mul(&PhaseSpaceSymbol::sin(2)).add(&cos.scale(c(0.5, 0.25)));
    let b = p.mul(&PhaseSpaceSymbol::cos(3)).add(&PhaseSpaceSymbol::constant(c(-1.0, 0.0)));
    let d = PhaseSpaceSymbol::sin(1).mul(&p).mul(&p).mul(&p);
    let n_max = 14;
    let lhs = weyl_quantize(&star(&a, &b, hbar), n_max, hbar).unwrap();
    let rhs = weyl_quantize(&a, n_max, hbar).unwrap().mul(&weyl_quantize(&b, n_max, hbar).unwrap()).unwrap();
    let scale_entries = lhs.matrix().iter().map(|z| z.norm()).fold(1.0, f64::max);
    out.push(result("quantize(A⋆B) = quantize(A)·quantize(B)", lhs.max_diff_within(&rhs, rhs.reliable_radius()) / scale_entries, 1e-10 * scale));
    let assoc = star(&star(&a, &b, hbar), &d, hbar).max_coefficient_difference(&star(&a, &star(&b, &d, hbar), hbar));
    out.push(result("associativity", assoc, 1e-12 * scale));
    let exp = hbar_expansion(&a, &b, 8);
    let resum = sum_expansion(&exp, 0.7).max_coefficient_difference(&star(&a, &b, 0.7));
    out.push(result("ħ expansion resums to the star product", resum, 1e-12 * scale));
    out
}

pub fn dynamics_suite(scale: f64) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let grid = PhaseSpaceGrid::symmetric(32, 4.0, 81).unwrap();
    let free = PendulumModel::free_rotor(0.5, 1.0).unwrap();
    let two = WaveFunction::superposition(8, &[(0, c(1.0, 0.0)), (1, c(1.0, 0.0))]).unwrap();
    let r = liouville_residual_pure(&two, &free, &grid, PotentialForm::Shift).unwrap();
    out.push(result("Liouville residual, free rotor two-mode state", r.max_abs, 1e-10 * scale));
    let model = PendulumModel::pendulum(0.5, 1.0, 1.0).unwrap();
    let flow = dynamics::Schrodinger::new(&model, 24).unwrap();
    let psi0 = WaveFunction::from_fn(24, |n| c((-((n - 1) * (n - 1)) as f64 / 16.0).exp(), 0.0)).normalized().unwrap();
    let mut worst = 0.0f64;
    for t in [0.0, 0.5, 1.0] {
        let psi = flow.evolve(&psi0, t).unwrap();
        worst = worst.max(liouville_residual_pure(&psi, &model, &grid, PotentialForm::Shift).unwrap().max_abs);
    }
    out.push(result("Liouville residual, pendulum trajectory", worst, 1e-9 * scale));
    let psi = flow.evolve(&psi0, 0.5).unwrap();
    let s2 = liouville_residual_pure(&psi, &model, &grid, PotentialForm::Series(2)).unwrap().max_abs;
    let s6 = liouville_residual_pure(&psi, &model, &grid, PotentialForm::Series(6)).unwrap().max_abs;
    out.push(result("series form convergence ratio n=6 / n=2", s6 / s2, 1e-4 * scale));
    let sys = eigensystem(&model, 16).unwrap();
    let e = sys.eigenvalues();
    let mut energy = 0.0f64;
    for (a, b) in [(0, 0), (1, 1), (0, 1)] {
        let (ua, ub) = (sys.eigenstate(a).unwrap(), sys.eigenstate(b).unwrap());
        energy = energy.max(energy_residual(&ua, e[a], &ub, e[b], &model, &grid, PotentialForm::Shift).unwrap().max_abs);
    }
    out.push(result("energy equation residual", energy, 1e-8 * scale));
    let (u0, u1) = (sys.eigenstate(0).unwrap(), sys.eigenstate(1).unwrap());
    let cont = [(0.3, 0.0), (1.0, 2.0), (-2.0, -1.0)]
        .iter()
        .map(|&(t, v)| {
            (continuity_lhs(&u0, &u1, &model, t, v).unwrap() - continuity_source(&u0, &u1, &model, t, v)).norm()
        })
        .fold(0.0, f64::max);
    out.push(result("continuity equation with potential source", cont, 1e-10 * scale));
    let order = bloch_order(&model, 12, 1.0, 0.02).unwrap();
    out.push(result("Bloch residual order − 2", (order - 2.0).abs(), 0.1));
    out
}

pub fn run_suite(suite: Suite, scale: f64) -> Vec<CheckResult> {
    match suite {
        Suite::Kernel => kernel_suite(scale),
        Suite::Weyl => weyl_suite(scale),
        Suite::Star => star_suite(scale),
        Suite::Dynamics => dynamics_suite(scale),
        Suite::All => {
            let mut all = kernel_suite(scale);
            all.extend(weyl_suite(scale));
            all.extend(star_suite(scale));
            all.extend(dynamics_suite(scale));
            all
        }
    }
}
