//! The exactly solvable hard-rod gas as an external reference.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::activity::{ActivityField, Interaction};
use super::partition::{partition_function, PartitionConfig};
use super::region::Region1D;
use crate::error::{Error, Result};
use crate::potentials::{PairPotential, ThermoState};
use crate::threshold::lambert_w0;

/// `βp = W(λR)/R`, solving `λ = βp·e^{βpR}`.
pub fn tonks_reference(core_radius: f64, lambda: f64) -> Result<f64> {
    if !(lambda >= 0.0) || !(core_radius > 0.0) {
        return Err(Error::InvalidParameter(format!("need λ ≥ 0 and R > 0, got λ = {lambda}, R = {core_radius}")));
    }
    Ok(lambert_w0(lambda * core_radius)? / core_radius)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TonksWindow {
    pub length: f64,
    pub log_z: f64,
    /// `log Z_L / L`, an upper bound on `βp` by subadditivity.
    pub estimate: f64,
    /// `log Z_L / (L + R)`, a lower bound on `βp`.
    pub lower: f64,
    pub relative_error: f64,
}

/// Finite-window estimates on `[0, L]` for each length.
pub fn tonks_windows(core_radius: f64, lambda: f64, lengths: &[f64], cfg: &PartitionConfig) -> Result<(f64, Vec<TonksWindow>)> {
    let exact = tonks_reference(core_radius, lambda)?;
    let inter = Interaction::new(PairPotential::hard_sphere(1, core_radius)?, ThermoState::new(1.0)?)?;
    let a = ActivityField::constant(inter, Complex64::new(lambda, 0.0));
    let rows = lengths
        .iter()
        .map(|&length| {
            let z = partition_function(&a, &Region1D::closed(0.0, length), cfg)?;
            let log_z = z.re.ln();
            let estimate = log_z / length;
            Ok(TonksWindow { length, log_z, estimate, lower: log_z / (length + core_radius), relative_error: (estimate - exact).abs() / exact })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((exact, rows))
}
