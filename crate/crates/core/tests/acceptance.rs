//! Acceptance criteria, one test each. Every test prints a single
//! `ACn PASS|FAIL ...` line before asserting.

use std::f64::consts::{E, LN_2, PI};
use std::time::{Duration, Instant};

use gasbound_core::oracle::{
    check_contraction_bound, check_density_correspondence, check_log_z_identity, check_recursion_identity, check_self_map, polynomial_roots,
    tonks_windows, zero_free_scan, ActivityField, Interaction, OracleConfig, PartitionConfig, Region1D, ScanGrid,
};
use gasbound_core::{
    analyticity_threshold, delta_phi_upper, lambert_w0, solve_optimizer, temperedness_constants, vk_monte_carlo, vk_quadrature_1d, Convention,
    McConfig, PairPotential, RadialQuadratureConfig, TemperednessConstants, ThermoState, VkEstimate,
};
use gasbound_core::connective::Vk1dConfig;
use num_complex::Complex64;

fn report(id: &str, pass: bool, elapsed: Duration, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("{id} {verdict} {detail} [{:.2} s]", elapsed.as_secs_f64());
}

fn rod() -> (PairPotential, ThermoState) {
    (PairPotential::hard_sphere(1, 1.0).unwrap(), ThermoState::new(1.0).unwrap())
}

fn well() -> (PairPotential, ThermoState) {
    (PairPotential::square_well(1, 1.0, 1.5, 1.0).unwrap(), ThermoState::new(LN_2).unwrap())
}

fn kac(beta: f64) -> (PairPotential, ThermoState) {
    (PairPotential::kac_exponential(1.0, 1.0, 1.0).unwrap(), ThermoState::new(beta).unwrap())
}

fn constants((p, t): &(PairPotential, ThermoState)) -> TemperednessConstants {
    temperedness_constants(p, *t, &RadialQuadratureConfig::default()).unwrap()
}

fn mc(seed: u64, convention: Convention) -> McConfig {
    McConfig { samples: 1_000_000, seed, convention, ..McConfig::default() }
}

#[test]
fn ac01_constants() {
    let start = Instant::now();
    let rod = constants(&rod());
    let ball = constants(&(PairPotential::hard_sphere(3, 1.0).unwrap(), ThermoState::new(1.0).unwrap()));
    let sw = constants(&well());
    let rod_ok = (rod.c_phi - 2.0).abs() <= 1e-10;
    let ball_ok = (ball.c_phi - 4.0 * PI / 3.0).abs() <= 1e-8;
    let sw_ok = [(sw.c_phi, 3.0), (sw.a_phi, 1.0), (sw.p_phi, 2.0), (sw.c_hat_phi, 2.5)].iter().all(|(x, y)| (x - y).abs() <= 1e-8);
    let elapsed = start.elapsed();
    let pass = rod_ok && ball_ok && sw_ok && elapsed < Duration::from_secs(1);
    report(
        "AC1",
        pass,
        elapsed,
        &format!(
            "constants: rod C={:.12}, ball C={:.12} (4π/3={:.12}), well (C,A,P,Ĉ)=({:.10},{:.10},{:.10},{:.10})",
            rod.c_phi,
            ball.c_phi,
            4.0 * PI / 3.0,
            sw.c_phi,
            sw.a_phi,
            sw.p_phi,
            sw.c_hat_phi
        ),
    );
    assert!(pass);
}

#[test]
fn ac02_lambert() {
    let start = Instant::now();
    let (lo, hi): (f64, f64) = (-1.0 / E + 1e-6, 1e6);
    let n = 10_000;
    let mut worst: f64 = 0.0;
    let mut worst_x = lo;
    for i in 0..n {
        // Half the points uniform in x, half uniform in log-scale above 1.
        let x = if i < n / 2 {
            lo + (1.0 - lo) * i as f64 / (n / 2 - 1) as f64
        } else {
            let s = (i - n / 2) as f64 / (n / 2 - 1) as f64;
            (s * hi.ln()).exp()
        };
        let w = lambert_w0(x).unwrap();
        let scaled = (w * w.exp() - x).abs() / x.abs().max(1.0);
        if scaled > worst {
            worst = scaled;
            worst_x = x;
        }
    }
    let we = (lambert_w0(E).unwrap() - 1.0).abs();
    let elapsed = start.elapsed();
    let pass = worst <= 1e-12 && we <= 1e-14 && elapsed < Duration::from_secs(1);
    report("AC2", pass, elapsed, &format!("lambert: worst scaled round-trip {worst:.3e} at x={worst_x:.6e}, |W(e)−1|={we:.1e}"));
    assert!(pass);
}

/// `max_{z₁ ∈ [0,z̃]} e^{−Pz₁²+Az̃²}(Pz₁² + Az̃²)` by ternary search; the
/// `z₂` factor is monotone so it sits at `z̃`.
fn m_search(p: f64, a: f64, z_sq: f64) -> f64 {
    let f = |s: f64| (-p * s + a * z_sq).exp() * (p * s + a * z_sq);
    let (mut lo, mut hi) = (0.0, z_sq);
    for _ in 0..200 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if f(m1) < f(m2) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    f(0.0).max(f(z_sq)).max(f(0.5 * (lo + hi)))
}

#[test]
fn ac03_optimizer_grid() {
    let start = Instant::now();
    let n = 400;
    let mut pass = true;
    let mut parts = Vec::new();
    for (a, delta) in [(0.0, 2.0), (1.0, 3.0), (0.5, 2.5)] {
        let p = 2.0;
        let k = TemperednessConstants::from_parts(p, a, p + a, 1.0);
        let opt = solve_optimizer(&k, delta).unwrap();
        let (l_max, z_max) = (2.0 * opt.lambda_tilde, 4.0 * opt.z_tilde_sq);
        let cell = l_max / (n - 1) as f64;
        let mut best: f64 = 0.0;
        for j in 0..n {
            let z = z_max * j as f64 / (n - 1) as f64;
            let m = m_search(p, a, z);
            for i in 0..n {
                let l = l_max * i as f64 / (n - 1) as f64;
                if l * (a * z).exp() <= z && l * m * delta <= 1.0 {
                    best = best.max(l);
                }
            }
        }
        // The closed form must not lose to the grid, and the grid must come close.
        let ok = best <= opt.lambda_tilde + cell && best >= opt.lambda_tilde - 4.0 * cell;
        pass &= ok;
        parts.push(format!("(A={a},Δ={delta}) λ̃={:.6} grid={best:.6} cell={cell:.2e}", opt.lambda_tilde));
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(5);
    report("AC3", pass, elapsed, &format!("optimizer vs 400×400 grid: {}", parts.join("; ")));
    assert!(pass);
}

#[test]
fn ac04_threshold_reduction() {
    let start = Instant::now();
    let mut worst_rep: f64 = 0.0;
    for (p, delta) in [(2.0, 2.0), (2.0, 1.3), (4.18879, 4.0), (0.5, 0.5)] {
        let k = TemperednessConstants::from_parts(p, 0.0, p, 1.0);
        let r = analyticity_threshold(&k, delta, 0.0).unwrap();
        worst_rep = worst_rep.max((r.new_threshold - E / delta).abs() / (E / delta));
    }
    let k = constants(&rod());
    let r = analyticity_threshold(&k, k.c_phi, 0.0).unwrap();
    let ratio_err = (r.ratio_pr - E * E).abs();
    let elapsed = start.elapsed();
    let pass = worst_rep <= 1e-15 && ratio_err <= 1e-10;
    report(
        "AC4",
        pass,
        elapsed,
        &format!("threshold: repulsive |new − e/Δ|/(e/Δ) ≤ {worst_rep:.1e}; hard rod new/PR={:.12} (e²={:.12})", r.ratio_pr, E * E),
    );
    assert!(pass);
}

/// `|mean − target| ≤ nσ`, plus rounding room for zero-variance estimators
/// (exact sampling makes `V₁` and the hard-rod `V₂` constant per sample).
fn within(est: &VkEstimate, target: f64, sigmas: f64) -> bool {
    (est.mean - target).abs() <= sigmas * est.std_error + 1e-12 * target.abs()
}

#[test]
fn ac05_vk() {
    let start = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, sys) in [("rod", rod()), ("ball3", (PairPotential::hard_sphere(3, 1.0).unwrap(), ThermoState::new(1.0).unwrap())), ("well", well()), ("kac", kac(1.0))] {
        let c = constants(&sys).c_phi;
        let v1 = vk_monte_carlo(&sys.0, sys.1, 1, &mc(11, Convention::Trailing)).unwrap();
        let rse = v1.std_error / v1.mean;
        let ok = within(&v1, c, 3.0) && rse < 0.01;
        pass &= ok;
        parts.push(format!("{name} V1={:.5}±{:.1e} C={c:.5}", v1.mean, v1.std_error));
    }
    let (p, t) = rod();
    let q2 = vk_quadrature_1d(&p, t, 2, Convention::Trailing, &Vk1dConfig::default()).unwrap();
    let q3 = vk_quadrature_1d(&p, t, 3, Convention::Trailing, &Vk1dConfig::default()).unwrap();
    let m2 = vk_monte_carlo(&p, t, 2, &mc(12, Convention::Trailing)).unwrap();
    let m3 = vk_monte_carlo(&p, t, 3, &mc(13, Convention::Trailing)).unwrap();
    let quad_ok = (q2.mean - 4.0).abs() <= 1e-6 && (q3.mean - 5.0).abs() <= 1e-5;
    let mc_ok = within(&m2, q2.mean, 3.0) && within(&m3, q3.mean, 3.0);
    pass &= quad_ok && mc_ok;
    parts.push(format!(
        "rod V2 quad={:.9} MC={:.4}±{:.1e}, V3 quad={:.9} MC={:.4}±{:.1e}",
        q2.mean, m2.mean, m2.std_error, q3.mean, m3.mean, m3.std_error
    ));
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(60);
    report("AC5", pass, elapsed, &format!("V_k: {}", parts.join("; ")));
    assert!(pass);
}

#[test]
fn ac06_strict_improvement() {
    let start = Instant::now();
    let (p, t) = rod();
    let v3 = vk_quadrature_1d(&p, t, 3, Convention::Trailing, &Vk1dConfig::default()).unwrap();
    let v2l = vk_quadrature_1d(&p, t, 2, Convention::Leading, &Vk1dConfig::default()).unwrap();
    let r3 = v3.mean.cbrt();
    let r2 = v2l.mean.sqrt();
    let mut pass = (r3 - 5f64.cbrt()).abs() <= 1e-6 && r3 < 2.0 && (r2 - 2.5f64.sqrt()).abs() <= 1e-6 && r2 < 2.0;
    let mut parts = vec![format!("rod trailing V3^(1/3)={r3:.6} (5^(1/3)={:.6}), leading V2^(1/2)={r2:.6} (√2.5={:.6})", 5f64.cbrt(), 2.5f64.sqrt())];
    for beta in [0.25, 0.5, 1.0] {
        let sys = kac(beta);
        let k = constants(&sys);
        let mut conventions = Vec::new();
        let mut improved = false;
        for (label, conv) in [("trailing", Convention::Trailing), ("leading", Convention::Leading)] {
            let est: Vec<VkEstimate> = (1..=3).map(|d| vk_monte_carlo(&sys.0, sys.1, d, &mc(100 + d as u64, conv)).unwrap()).collect();
            let dh = delta_phi_upper(&est, k.a_phi, 3).unwrap();
            let strict = dh.delta_hat < k.c_phi - 3.0 * dh.std_error;
            improved |= strict;
            conventions.push(format!("{label} Δ̂={:.5}±{:.1e} (k={})", dh.delta_hat, dh.std_error, dh.witnessing_k));
        }
        pass &= improved;
        parts.push(format!("kac β={beta} C={:.5}: {}", k.c_phi, conventions.join(", ")));
    }
    report("AC6", pass, start.elapsed(), &format!("strict improvement: {}", parts.join("; ")));
    assert!(pass);
}

#[test]
fn ac07_identity_suite() {
    let start = Instant::now();
    let region = Region1D::closed(0.0, 1.5);
    let cfg = OracleConfig::default();
    let lambdas = [Complex64::new(0.05, 0.0), Complex64::new(0.2, 0.0), Complex64::new(0.1, 0.05)];
    let mut worst_logz: f64 = 0.0;
    let mut worst_rec: f64 = 0.0;
    for (p, t) in [rod(), well()] {
        let inter = Interaction::new(p, t).unwrap();
        for &lam in &lambdas {
            let a = ActivityField::constant(inter.clone(), lam);
            worst_logz = worst_logz.max(check_log_z_identity(&a, &region, &cfg).unwrap().relative);
            for v in [0.0, 0.4, 0.75, 1.2, 1.5] {
                worst_rec = worst_rec.max(check_recursion_identity(&a, &region, v, &cfg).unwrap().relative);
            }
        }
    }
    let mut worst_k1: f64 = 0.0;
    let mut worst_k2: f64 = 0.0;
    for (p, t) in [rod(), well()] {
        let inter = Interaction::new(p, t).unwrap();
        for (lam, v0) in [(Complex64::new(0.2, 0.0), 0.4), (Complex64::new(0.1, 0.05), 1.1)] {
            let a = ActivityField::constant(inter.clone(), lam);
            worst_k1 = worst_k1.max(check_density_correspondence(&a, &region, 1, v0, &cfg).unwrap().residual);
            worst_k2 = worst_k2.max(check_density_correspondence(&a, &region, 2, v0, &OracleConfig::with_tolerance(1e-7)).unwrap().residual);
        }
    }
    let elapsed = start.elapsed();
    let pass = worst_logz <= 1e-6 && worst_rec <= 1e-6 && worst_k1 <= 1e-5 && worst_k2 <= 1e-3 && elapsed < Duration::from_secs(120);
    report(
        "AC7",
        pass,
        elapsed,
        &format!("identities: log-Z rel {worst_logz:.2e}, recursion rel {worst_rec:.2e}, correspondence k=1 {worst_k1:.2e}, k=2 {worst_k2:.2e}"),
    );
    assert!(pass);
}

#[test]
fn ac08_self_map_and_contraction() {
    let start = Instant::now();
    let cfg = OracleConfig::with_tolerance(1e-8);
    let (p, t) = well();
    let sm = check_self_map(&p, t, 100, 2024, &cfg).unwrap();
    let (p, t) = rod();
    let c1 = check_contraction_bound(&p, t, 1, 100, 7, &cfg).unwrap();
    let (p, t) = well();
    let c2 = check_contraction_bound(&p, t, 2, 100, 8, &cfg).unwrap();
    let pass = sm.holds && c1.holds() && c2.holds();
    report(
        "AC8",
        pass,
        start.elapsed(),
        &format!(
            "self-map: 100 trials in [{:.3e}, {:.3e}] ⊆ [0, {:.4}], excess {:.1e}; contraction: rod k=1 {} violations (max ratio {:.3e}), well k=2 {} violations (max ratio {:.3e})",
            sm.min_value, sm.max_value, sm.z_tilde_sq, sm.max_excess, c1.violations, c1.max_ratio, c2.violations, c2.max_ratio
        ),
    );
    assert!(pass);
}

#[test]
fn ac09_zero_freeness() {
    let start = Instant::now();
    let (p, t) = rod();
    let radius = E / 2.0;
    let region = Region1D::closed(0.0, 1.5);
    let scan = zero_free_scan(&p, t, &region, radius, ScanGrid { angles: 512, radii: 32 }, &PartitionConfig::default()).unwrap();
    // Independent: the quadratic formula on the stated coefficients.
    let (a, b, c) = (0.125f64, 1.5f64, 1.0f64);
    let disc = (b * b - 4.0 * a * c).sqrt();
    let analytic = [(-b + disc) / (2.0 * a), (-b - disc) / (2.0 * a)];
    let coeff_ok = scan.coefficients.len() == 3 && [1.0, 1.5, 0.125].iter().zip(&scan.coefficients).all(|(x, y)| (x - y).abs() <= 1e-10);
    let numeric = polynomial_roots(&scan.coefficients);
    let outside = analytic.iter().all(|r| r.abs() >= radius) && numeric.iter().all(|r| r.norm() >= radius);
    let pass = coeff_ok && outside && scan.zero_free && scan.max_log_z_per_volume.is_finite();
    report(
        "AC9",
        pass,
        start.elapsed(),
        &format!(
            "zero-freeness: Z coefficients {:?}, roots {:.5} and {:.5} vs radius e/2={radius:.5}, winding {}, min|Z| on grid {:.3e} at {:.4}, max|log Z|/|Λ| {:.3}",
            scan.coefficients, analytic[0], analytic[1], scan.winding_number, scan.min_abs_z, scan.argmin_abs_z, scan.max_log_z_per_volume
        ),
    );
    assert!(pass);
}

#[test]
fn ac10_tonks() {
    let start = Instant::now();
    let (exact, rows) = tonks_windows(1.0, 0.5, &[1.5, 2.5, 3.5], &PartitionConfig::default()).unwrap();
    let w = lambert_w0(0.5).unwrap();
    let bracket = rows.iter().all(|r| r.lower <= exact && exact <= r.estimate);
    let monotone = rows.windows(2).all(|p| p[1].relative_error < p[0].relative_error);
    let last = rows.last().unwrap().relative_error;
    let pass = (exact - w).abs() <= 1e-15 && bracket && monotone && last < 0.5;
    let detail: Vec<String> = rows.iter().map(|r| format!("L={} logZ/L={:.5} logZ/(L+R)={:.5} err={:.1}%", r.length, r.estimate, r.lower, 100.0 * r.relative_error)).collect();
    report("AC10", pass, start.elapsed(), &format!("Tonks βp=W(0.5)={exact:.6}: {}", detail.join("; ")));
    assert!(pass);
}

