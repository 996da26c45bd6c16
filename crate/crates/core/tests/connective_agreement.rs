//! Monte Carlo against deterministic quadrature for every one-dimensional
//! built-in, in both conventions.

use std::f64::consts::LN_2;

use gasbound_core::connective::Vk1dConfig;
use gasbound_core::{temperedness_constants, vk_monte_carlo, vk_quadrature_1d, Convention, McConfig, PairPotential, RadialQuadratureConfig, ThermoState};

fn systems() -> Vec<(&'static str, PairPotential, ThermoState)> {
    vec![
        ("rod", PairPotential::hard_sphere(1, 1.0).unwrap(), ThermoState::new(1.0).unwrap()),
        ("well", PairPotential::square_well(1, 1.0, 1.5, 1.0).unwrap(), ThermoState::new(LN_2).unwrap()),
        ("kac", PairPotential::kac_exponential(1.0, 1.0, 1.0).unwrap(), ThermoState::new(0.5).unwrap()),
    ]
}

#[test]
fn monte_carlo_matches_quadrature() {
    // Far below the Monte Carlo noise; the Kac tail makes depth three slow at the default.
    let quad = Vk1dConfig { rel_tol: 1e-6, ..Vk1dConfig::default() };
    for (name, p, t) in systems() {
        for convention in [Convention::Trailing, Convention::Leading] {
            for k in 1..=3 {
                let q = vk_quadrature_1d(&p, t, k, convention, &quad).unwrap();
                let cfg = McConfig { samples: 200_000, seed: 7 + k as u64, convention, ..McConfig::default() };
                let m = vk_monte_carlo(&p, t, k, &cfg).unwrap();
                let tol = 3.0 * m.std_error + q.std_error + 1e-12 * q.mean;
                assert!((m.mean - q.mean).abs() <= tol, "{name} {convention:?} k={k}: MC {m:?} vs quadrature {q:?}");
            }
        }
    }
}

#[test]
fn trailing_second_depth_is_c_squared() {
    for (name, p, t) in systems() {
        let c = temperedness_constants(&p, t, &RadialQuadratureConfig::default()).unwrap().c_phi;
        let v2 = vk_quadrature_1d(&p, t, 2, Convention::Trailing, &Vk1dConfig::default()).unwrap();
        assert!((v2.mean - c * c).abs() <= 1e-7 * c * c, "{name}: V2 = {} vs C² = {}", v2.mean, c * c);
    }
}

#[test]
fn leading_hard_rod_is_submultiplicative() {
    let p = PairPotential::hard_sphere(1, 1.0).unwrap();
    let t = ThermoState::new(1.0).unwrap();
    let v1 = vk_quadrature_1d(&p, t, 1, Convention::Leading, &Vk1dConfig::default()).unwrap().mean;
    let v2 = vk_quadrature_1d(&p, t, 2, Convention::Leading, &Vk1dConfig::default()).unwrap().mean;
    assert!(v2 <= v1 * v1, "V2 = {v2}, V1² = {}", v1 * v1);
}
