//! Acceptance suite AC1–AC11. Prints one PASS/FAIL line per criterion and
//! exits non-zero on any failure that is not listed in `KNOWN_FAILURES`.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use cylwig::basis::{inner_product, standard_operator, BandedOperator, StandardOperator, WaveFunction};
use cylwig::dynamics::{
    self, bloch_order, continuity_lhs, continuity_source, eigensystem, energy_residual, hbar_scaling_exponent,
    liouville_residual, liouville_residual_pure, thermal_state, PotentialForm, Schrodinger,
};
use cylwig::field::ShiftedSincField;
use cylwig::grid::PhaseSpaceGrid;
use cylwig::kernel::{
    fidelity, kernel_orthogonality, kernel_orthogonality_quadrature, marginals, momentum_filter, normalization,
    overlap, purity, recover_wavefunction, MoyalCoefficients, RecoveryOptions,
};
use cylwig::sinc::sinc_pi;
use cylwig::star::{reproducing_integral, star};
use cylwig::symbol::PhaseSpaceSymbol;
use cylwig::weyl::{weyl_quantize, weyl_symbol};
use cylwig::PendulumModel;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criteria that cannot hold as stated; each still runs and prints FAIL.
/// AC1: the closed form is `δ_kn δ_lm / 2π` (the kernel carries `1/2π`, and
/// AC2's purity `1/2π` forces the same factor), so "`= δ_kn δ_lm`" is false.
const KNOWN_FAILURES: &[&str] = &["AC1"];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_state(rng: &mut ChaCha8Rng, n_max: usize) -> WaveFunction {
    WaveFunction::from_fn(n_max, |_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).normalized().unwrap()
}

fn random_symbol(rng: &mut ChaCha8Rng, max_k: i64, max_deg: usize, dyadic: bool) -> PhaseSpaceSymbol {
    let mut s = PhaseSpaceSymbol::zero();
    for _ in 0..rng.gen_range(1..=3) {
        let k = rng.gen_range(-max_k..=max_k);
        let deg = rng.gen_range(0..=max_deg);
        let coeffs: Vec<Complex64> = (0..=deg)
            .map(|_| {
                if dyadic {
                    c(rng.gen_range(-8..=8) as f64 / 8.0, rng.gen_range(-8..=8) as f64 / 8.0)
                } else {
                    c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                }
            })
            .collect();
        s.add_mode(k, &coeffs);
    }
    s
}

fn max_entry(op: &BandedOperator) -> f64 {
    op.matrix().iter().map(|z| z.norm()).fold(1.0, f64::max)
}

fn acceptance_grid() -> PhaseSpaceGrid {
    PhaseSpaceGrid::symmetric(64, 4.0, 161).unwrap()
}

fn pendulum() -> PendulumModel {
    PendulumModel::pendulum(0.5, 1.0, 1.0).unwrap()
}

fn gaussian_like(n_max: usize) -> WaveFunction {
    let (n0, sigma) = (1.0, 2.0);
    WaveFunction::from_fn(n_max, |n| c((-(n as f64 - n0).powi(2) / (4.0 * sigma * sigma)).exp(), 0.0))
        .normalized()
        .unwrap()
}

fn ac1() -> Outcome {
    let mut literal = 0.0f64;
    let mut normalized = 0.0f64;
    for k in -8..=8i64 {
        for l in -8..=8i64 {
            for m in -8..=8i64 {
                for n in -8..=8i64 {
                    let delta = if k == n && l == m { 1.0 } else { 0.0 };
                    let v = kernel_orthogonality(k, l, m, n);
                    literal = literal.max((v - delta).abs());
                    normalized = normalized.max((2.0 * PI * v - delta).abs());
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut tuples: Vec<[i64; 4]> = vec![[0, 0, 0, 0], [3, -2, -2, 3], [8, 8, 8, 8], [-8, 5, 5, -8], [1, 0, 0, 2]];
    for _ in 0..40 {
        tuples.push([0; 4].map(|_| rng.gen_range(-8..=8)));
    }
    for _ in 0..20 {
        let (k, l) = (rng.gen_range(-8..=8), rng.gen_range(-8..=8));
        tuples.push([k, l, l, k]);
    }
    let quad = tuples
        .iter()
        .map(|&[k, l, m, n]| (kernel_orthogonality_quadrature(k, l, m, n, 300.0) - kernel_orthogonality(k, l, m, n)).norm())
        .fold(0.0, f64::max);
    outcome(
        literal == 0.0 && quad < 1e-6,
        format!(
            "max|closed - δδ| = {literal:.6e} (closed form is δδ/2π); max|2π·closed - δδ| = {normalized:.1e}; quadrature vs closed form {quad:.1e} over {} tuples",
            tuples.len()
        ),
    )
}

fn ac2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut norm_err, mut purity_err, mut overlap_err) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..100 {
        let n_max = rng.gen_range(1..=10);
        let a = random_state(&mut rng, n_max);
        let b = random_state(&mut rng, n_max);
        norm_err = norm_err.max((normalization(&a) - 1.0).abs());
        purity_err = purity_err.max((purity(&a) - 1.0 / (2.0 * PI)).abs());
        overlap_err = overlap_err.max((overlap(&a, &b) - inner_product(&a, &b).norm_sqr()).abs());
    }
    outcome(
        norm_err < 1e-12 && purity_err < 1e-12 && overlap_err < 1e-10,
        format!("normalization {norm_err:.1e}, purity {purity_err:.1e}, overlap {overlap_err:.1e} over 100 states"),
    )
}

fn operator_table(hbar: f64) -> Vec<(&'static str, BandedOperator, PhaseSpaceSymbol)> {
    let n_max = 16;
    let op = |k: &StandardOperator| standard_operator(k, n_max, hbar).unwrap();
    let p = PhaseSpaceSymbol::p_power(1);
    let cos = PhaseSpaceSymbol::cos(1);
    let sin = PhaseSpaceSymbol::sin(1);
    let l = op(&StandardOperator::AngularMomentum);
    let cm = op(&StandardOperator::Cos);
    let model = PendulumModel::pendulum(0.5, 1.0, hbar).unwrap();
    let half_i_hbar_sin = sin.scale(c(0.0, 0.5 * hbar));
    vec![
        ("C", cm.clone(), cos.clone()),
        ("S", op(&StandardOperator::Sin), sin.clone()),
        ("L", l.clone(), p.clone()),
        ("L2", op(&StandardOperator::AngularMomentumSquared), PhaseSpaceSymbol::p_power(2)),
        ("C3", op(&StandardOperator::CosK(3)), PhaseSpaceSymbol::cos(3)),
        (
            "H",
            op(&StandardOperator::Hamiltonian(model)),
            PhaseSpaceSymbol::p_power(2).scale(c(0.5, 0.0)).sub(&cos),
        ),
        ("LC", l.mul(&cm).unwrap(), p.mul(&cos).add(&half_i_hbar_sin)),
        ("[L,C]", l.commutator(&cm).unwrap(), sin.scale(c(0.0, hbar))),
        ("{L,C}", l.anticommutator(&cm).unwrap(), p.mul(&cos).scale(c(2.0, 0.0))),
    ]
}

fn ac3() -> Outcome {
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for hbar in [1.0, 0.5] {
        for (name, op, expected) in operator_table(hbar) {
            match weyl_symbol(&op, hbar).unwrap().exact() {
                Some(sym) => {
                    let d = sym.max_coefficient_difference(&expected);
                    worst = worst.max(d);
                    if d != 0.0 {
                        failures.push(format!("{name}@ħ={hbar}"));
                    }
                }
                None => failures.push(format!("{name}@ħ={hbar} (not polynomial)")),
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!("9 operators at ħ ∈ {{1, 0.5}}; max coefficient difference {worst:.1e}; mismatches {failures:?}"),
    )
}

fn ac4() -> Outcome {
    let hbar = 1.0;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut op_err = 0.0f64;
    let mut ops: Vec<BandedOperator> = operator_table(hbar).into_iter().map(|(_, op, _)| op).collect();
    for _ in 0..50 {
        let bw = rng.gen_range(0..=3usize);
        let polys: Vec<Vec<Complex64>> = (0..=2 * bw)
            .map(|_| (0..=rng.gen_range(0..=3)).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect())
            .collect();
        let op = BandedOperator::from_fn(12, bw, |m, n| {
            let coeffs = &polys[(m - n + bw as i64) as usize];
            let s = 0.5 * (m + n) as f64;
            coeffs.iter().rev().fold(c(0.0, 0.0), |acc, &v| acc * s + v)
        })
        .unwrap();
        ops.push(op);
    }
    let mut not_exact = 0;
    for op in &ops {
        match weyl_symbol(op, hbar).unwrap().exact() {
            Some(sym) => {
                let back = weyl_quantize(sym, op.n_max(), hbar).unwrap();
                op_err = op_err.max(back.max_diff_within(op, op.reliable_radius()) / max_entry(op));
            }
            None => not_exact += 1,
        }
    }
    let mut sym_err = 0.0f64;
    for _ in 0..50 {
        let sym = random_symbol(&mut rng, 4, 4, false);
        let op = weyl_quantize(&sym, 16, hbar).unwrap();
        match weyl_symbol(&op, hbar).unwrap().exact() {
            Some(back) => sym_err = sym_err.max(back.max_coefficient_difference(&sym)),
            None => not_exact += 1,
        }
    }
    let mut p2_exact = true;
    for hbar in [1.0, 0.5, 0.25] {
        let op = weyl_quantize(&PhaseSpaceSymbol::p_power(2), 16, hbar).unwrap();
        for m in -16..=16i64 {
            for n in -16..=16i64 {
                let expected = if m == n { hbar * hbar * (m * m) as f64 } else { 0.0 };
                p2_exact &= op.get(m, n) == c(expected, 0.0);
            }
        }
    }
    outcome(
        not_exact == 0 && op_err < 1e-12 && sym_err < 1e-10 && p2_exact,
        format!(
            "quantize∘symbol {} operators rel err {op_err:.1e}; symbol∘quantize 50 symbols err {sym_err:.1e}; p² diagonal exact {p2_exact}; non-polynomial fits {not_exact}",
            ops.len()
        ),
    )
}

fn ac5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (n_max, hbar) = (16usize, 1.0);
    let mut hom = 0.0f64;
    let mut assoc_exact = true;
    for _ in 0..50 {
        let a = random_symbol(&mut rng, 3, 3, false);
        let b = random_symbol(&mut rng, 3, 3, false);
        let lhs = weyl_quantize(&star(&a, &b, hbar), n_max, hbar).unwrap();
        let rhs = weyl_quantize(&a, n_max, hbar).unwrap().mul(&weyl_quantize(&b, n_max, hbar).unwrap()).unwrap();
        hom = hom.max(lhs.max_diff_within(&rhs, rhs.reliable_radius()) / max_entry(&lhs));
        let (x, y, z) = (
            random_symbol(&mut rng, 3, 2, true),
            random_symbol(&mut rng, 3, 2, true),
            random_symbol(&mut rng, 3, 2, true),
        );
        for h in [1.0, 0.5] {
            assoc_exact &= star(&star(&x, &y, h), &z, h) == star(&x, &star(&y, &z, h), h);
        }
    }
    let p = PhaseSpaceSymbol::p_power(1);
    let cos = PhaseSpaceSymbol::cos(1);
    let q = PhaseSpaceSymbol::sin(1).scale(c(0.0, 0.5 * hbar));
    let bopp = star(&p, &cos, hbar) == p.mul(&cos).add(&q) && star(&cos, &p, hbar) == p.mul(&cos).sub(&q);
    outcome(
        hom < 1e-10 && assoc_exact && bopp,
        format!("homomorphism rel err {hom:.1e} over 50 pairs; associativity exact {assoc_exact}; L⋆C / C⋆L symbolic {bopp}"),
    )
}

fn ac6() -> Outcome {
    let grid = acceptance_grid();
    let free = PendulumModel::free_rotor(0.5, 1.0).unwrap();
    let two = WaveFunction::superposition(32, &[(0, c(1.0, 0.0)), (1, c(1.0, 0.0))]).unwrap();
    let field = ShiftedSincField::wigner(&two);
    let rate = dynamics::pure_state_rate(&two, &free).unwrap();
    let calibration = dynamics::liouville::calibrate_boundary(&field, &rate, &free, &grid);
    let a = liouville_residual(&field, &rate, &free, &grid, PotentialForm::Shift);

    let model = pendulum();
    let psi0 = gaussian_like(32);
    let flow = Schrodinger::new(&model, 32).unwrap();
    let mut worst_b = 0.0f64;
    let mut ratio = 0.0f64;
    for t in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let psi = flow.evolve(&psi0, t).unwrap();
        let r = liouville_residual_pure(&psi, &model, &grid, PotentialForm::Shift).unwrap();
        worst_b = worst_b.max(r.max_abs);
        if t == 0.5 {
            let s2 = liouville_residual_pure(&psi, &model, &grid, PotentialForm::Series(2)).unwrap();
            let s6 = liouville_residual_pure(&psi, &model, &grid, PotentialForm::Series(6)).unwrap();
            ratio = s6.max_abs / s2.max_abs;
        }
    }
    outcome(
        a.max_abs < 1e-10 && worst_b < 1e-9 && ratio < 1e-4,
        format!(
            "(a) free rotor {:.1e} (boundary constant {calibration:.12}); (b) pendulum max {worst_b:.1e} over 5 times; (c) series 6/2 ratio {ratio:.1e}",
            a.max_abs
        ),
    )
}

fn ac7() -> Outcome {
    let model = pendulum();
    let grid = acceptance_grid();
    let n_max = 32usize;
    let raw: Vec<f64> = (-(n_max as i64)..=n_max as i64).map(|m| (-0.3 * 0.5 * (m * m) as f64).exp()).collect();
    let z: f64 = raw.iter().sum();
    let weights: Vec<f64> = raw.iter().map(|w| w / z).collect();
    let rho = MoyalCoefficients::diagonal(&weights).unwrap();
    let rate = dynamics::density_rate(rho.matrix(), &model).unwrap();
    // V(p̄) = (2π)⁻¹ Σ λ_m sinc π(p̄ − m), directly from the weights
    let v = |p: f64| {
        weights.iter().enumerate().map(|(i, w)| w * sinc_pi(p - (i as f64 - n_max as f64))).sum::<f64>() / (2.0 * PI)
    };
    let amplitude = 1.0;
    let mut worst = 0.0f64;
    for &theta in grid.thetas().iter().skip(1) {
        for &p in grid.pbars() {
            let rhs = amplitude / model.hbar() * theta.sin() * (v(p + 0.5) - v(p - 0.5));
            worst = worst.max((rate.evaluate(theta, p) - rhs).norm());
        }
    }
    let small = PhaseSpaceGrid::symmetric(16, 3.0, 61).unwrap();
    let slope = hbar_scaling_exponent(
        &weights[n_max - 4..=n_max + 4],
        model.potential(),
        &[0.2, 0.1, 0.05, 0.025, 0.0125],
        &small,
    )
    .unwrap();
    outcome(
        worst < 1e-9 && (slope - 2.0).abs() <= 0.1,
        format!("von Neumann vs shift form {worst:.1e}; ħ-scaling slope {slope:.4}"),
    )
}

fn ac8() -> Outcome {
    let model = pendulum();
    let grid = acceptance_grid();
    let sys = eigensystem(&model, 32).unwrap();
    let e = sys.eigenvalues();
    let u: Vec<WaveFunction> = (0..4).map(|j| sys.eigenstate(j).unwrap()).collect();
    let mut diag = 0.0f64;
    for j in 0..4 {
        let r = energy_residual(&u[j], e[j], &u[j], e[j], &model, &grid, PotentialForm::Shift).unwrap();
        diag = diag.max(r.max_abs);
    }
    let mut pairs = 0.0f64;
    for (a, b) in [(0, 1), (1, 2), (0, 3)] {
        let r = energy_residual(&u[a], e[a], &u[b], e[b], &model, &grid, PotentialForm::Shift).unwrap();
        pairs = pairs.max(r.max_abs);
    }
    let mut continuity = 0.0f64;
    let mut at_zero = 0.0f64;
    for (a, b) in [(0, 0), (0, 1), (2, 3)] {
        for &(theta, vartheta) in &[(0.3, 0.0), (-1.2, 0.9), (2.4, -2.5), (0.0, 3.0)] {
            let lhs = continuity_lhs(&u[a], &u[b], &model, theta, vartheta).unwrap();
            continuity = continuity.max((lhs - continuity_source(&u[a], &u[b], &model, theta, vartheta)).norm());
            if vartheta == 0.0 {
                at_zero = at_zero.max(lhs.norm());
            }
        }
    }
    let free = PendulumModel::free_rotor(0.5, 1.0).unwrap();
    let mut free_err = 0.0f64;
    for m in -3..=3i64 {
        let em = WaveFunction::basis(32, m).unwrap();
        let energy = 0.5 * (m * m) as f64;
        let r = energy_residual(&em, energy, &em, energy, &free, &grid, PotentialForm::Shift).unwrap();
        free_err = free_err.max(r.max_abs);
    }
    outcome(
        diag < 1e-8 && pairs < 1e-8 && continuity < 1e-10 && at_zero < 1e-10 && free_err < 1e-13,
        format!(
            "eigenstates {diag:.1e}; pairs {pairs:.1e}; continuity with source {continuity:.1e} (ϑ=0: {at_zero:.1e}); free rotor {free_err:.1e}"
        ),
    )
}

fn ac9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let n_max = 4;
    let mut worst = 1.0f64;
    let mut count = 0;
    while count < 20 {
        let psi = random_state(&mut rng, n_max);
        if psi.evaluate(0.0).norm() <= 0.1 {
            continue;
        }
        count += 1;
        let field = ShiftedSincField::wigner(&psi);
        let rec = recover_wavefunction(|t, p| field.evaluate(t, p).re, &RecoveryOptions::new(n_max)).unwrap();
        worst = worst.min(fidelity(&rec, &psi));
    }
    outcome(worst >= 1.0 - 1e-8, format!("min fidelity {worst:.14} over 20 states (1 - F = {:.1e})", 1.0 - worst))
}

fn ac10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (mut theta_err, mut filter_err) = (0.0f64, 0.0f64);
    for _ in 0..20 {
        let n_max = rng.gen_range(1..=8);
        let psi = random_state(&mut rng, n_max);
        let other = random_state(&mut rng, n_max);
        let marg = marginals(&psi);
        for _ in 0..10 {
            let t = rng.gen_range(-PI..PI);
            theta_err = theta_err.max((marg.theta(t) - psi.evaluate(t).norm_sqr() / (2.0 * PI)).abs());
        }
        for m in -(n_max as i64)..=n_max as i64 {
            filter_err = filter_err.max((momentum_filter(&psi, &psi, m).re - psi.coeff(m).norm_sqr()).abs());
            let pair = momentum_filter(&other, &psi, m);
            filter_err = filter_err.max((pair - other.coeff(m).conj() * psi.coeff(m)).norm());
        }
    }
    outcome(
        theta_err < 1e-12 && filter_err < 1e-10,
        format!("θ-marginal {theta_err:.1e}; momentum filter {filter_err:.1e}"),
    )
}

fn ac11() -> Outcome {
    let model = pendulum();
    let order = bloch_order(&model, 16, 1.0, 0.02).unwrap();
    let n_max = 12;
    let rho = thermal_state(&model, 0.8, n_max).unwrap();
    let field = rho.field();
    let integral_err = (field.integral() - c(1.0, 0.0)).norm();
    let half_integer_centres = field.terms().all(|(k, _, _)| k.unsigned_abs() as usize <= 2 * n_max);
    let reality = field.reality_defect();
    let mut band_err = 0.0f64;
    for &(t, p) in &[(0.4, 0.3), (-2.0, 1.7)] {
        let v = reproducing_integral(|x| field.evaluate(t, x), p, 300.0);
        band_err = band_err.max((v - field.evaluate(t, p)).norm());
    }
    let free = PendulumModel::free_rotor(0.5, 1.0).unwrap();
    let free_field = thermal_state(&free, 0.8, n_max).unwrap().field();
    let free_theta_independent = free_field.terms().all(|(k, _, _)| k == 0);
    outcome(
        (order - 2.0).abs() <= 0.1
            && integral_err < 1e-12
            && half_integer_centres
            && reality < 1e-14
            && band_err < 1e-6
            && free_theta_independent,
        format!(
            "Bloch order {order:.4}; ∫∫V_ρ - 1 = {integral_err:.1e}; modes within 2n_max {half_integer_centres}; band-limit reproduction {band_err:.1e}; free-rotor θ-independent {free_theta_independent}"
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("AC1", ac1),
        ("AC2", ac2),
        ("AC3", ac3),
        ("AC4", ac4),
        ("AC5", ac5),
        ("AC6", ac6),
        ("AC7", ac7),
        ("AC8", ac8),
        ("AC9", ac9),
        ("AC10", ac10),
        ("AC11", ac11),
    ];
    let mut unexpected = Vec::new();
    for (name, run) in criteria {
        let start = Instant::now();
        let o = run();
        let status = if o.pass { "PASS" } else { "FAIL" };
        println!("{name} {status} [{:.2}s] {}", start.elapsed().as_secs_f64(), o.detail);
        let known = KNOWN_FAILURES.contains(&name);
        if o.pass == known {
            unexpected.push(name);
        }
    }
    if unexpected.is_empty() {
        println!("acceptance: all outcomes as expected (known failures: {KNOWN_FAILURES:?})");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: unexpected outcomes for {unexpected:?}");
        ExitCode::FAILURE
    }
}
