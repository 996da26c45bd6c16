//! Shared fixtures for the benchmarks in `benches/`.

use std::f64::consts::LN_2;

use gasbound_core::{PairPotential, ThermoState};

/// The one-dimensional built-ins at the temperatures used throughout the tests.
pub fn line_potentials() -> Vec<(&'static str, PairPotential, ThermoState)> {
    vec![
        ("hard_rod", PairPotential::hard_sphere(1, 1.0).expect("valid"), ThermoState::new(1.0).expect("valid")),
        ("square_well", PairPotential::square_well(1, 1.0, 1.5, 1.0).expect("valid"), ThermoState::new(LN_2).expect("valid")),
        ("kac", PairPotential::kac_exponential(1.0, 1.0, 1.0).expect("valid"), ThermoState::new(0.5).expect("valid")),
    ]
}

pub fn hard_sphere_3d() -> (PairPotential, ThermoState) {
    (PairPotential::hard_sphere(3, 1.0).expect("valid"), ThermoState::new(1.0).expect("valid"))
}
