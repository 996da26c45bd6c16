//! Choosing `Δ` and sweeping the threshold over inverse temperatures.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{analyticity_threshold, ThresholdReport};
use crate::connective::{delta_phi_upper, vk_monte_carlo_with, DeltaEstimate, McConfig, RadialSampler};
use crate::constants::{temperedness_constants, RadialQuadratureConfig, TemperednessConstants};
use crate::error::{Error, Result};
use crate::potentials::{PairPotential, ThermoState};

pub const SWEEP_CSV_HEADER: &str = "beta,c_phi,a_phi,delta,lambda_tilde,z_tilde_sq,new,pr,py,ratio_pr,ratio_py";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DeltaPolicy {
    /// `Δ = C_φ`, always valid.
    CPhi,
    Fixed(f64),
    /// `min(C_φ, min_k (V_k + 3σ_k)^{1/k})` from Monte Carlo up to `k_max`.
    Auto { k_max: usize, mc: McConfig },
}

/// Resolves a policy to a value of `Δ`, returning the Monte Carlo evidence
/// when one was computed.
pub fn resolve_delta(
    p: &PairPotential,
    t: ThermoState,
    k: &TemperednessConstants,
    policy: &DeltaPolicy,
) -> Result<(f64, Option<DeltaEstimate>)> {
    match *policy {
        DeltaPolicy::CPhi => Ok((k.c_phi, None)),
        DeltaPolicy::Fixed(d) => Ok((d, None)),
        DeltaPolicy::Auto { k_max, mc } => {
            if k_max == 0 {
                return Err(Error::InvalidParameter("k_max must be at least 1".into()));
            }
            let sampler = RadialSampler::new(p, t, &RadialQuadratureConfig::default())?;
            let vks = (1..=k_max).map(|j| vk_monte_carlo_with(&sampler, j, &mc)).collect::<Result<Vec<_>>>()?;
            let est = delta_phi_upper(&vks, k.a_phi, k_max)?;
            let mut delta = k.c_phi;
            for (v, &ok) in est.vk_values.iter().zip(&est.admissible) {
                if ok {
                    delta = delta.min((v.mean + 3.0 * v.std_error).powf(1.0 / v.k as f64));
                }
            }
            Ok((delta.max(k.a_phi), Some(est)))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub beta: f64,
    pub report: std::result::Result<ThresholdReport, String>,
}

impl SweepRow {
    /// One CSV line matching [`SWEEP_CSV_HEADER`]; failed rows carry `NaN`.
    pub fn csv(&self) -> String {
        match &self.report {
            Ok(r) => format!(
                "{},{},{},{},{},{},{},{},{},{},{}",
                self.beta,
                r.c_phi,
                r.a_phi,
                r.delta_used,
                r.optimizer.lambda_tilde,
                r.optimizer.z_tilde_sq,
                r.new_threshold,
                r.penrose_ruelle,
                r.procacci_yuhjtman,
                r.ratio_pr,
                r.ratio_py
            ),
            Err(_) => format!("{},NaN,NaN,NaN,NaN,NaN,NaN,NaN,NaN,NaN,NaN", self.beta),
        }
    }
}

/// Inclusive linear grid of `steps` inverse temperatures.
pub fn beta_grid(beta_min: f64, beta_max: f64, steps: usize) -> Result<Vec<f64>> {
    if !(beta_min > 0.0 && beta_max.is_finite() && beta_max >= beta_min) || steps == 0 {
        return Err(Error::InvalidParameter(format!(
            "need 0 < beta_min ≤ beta_max and steps ≥ 1, got [{beta_min}, {beta_max}] with {steps} steps"
        )));
    }
    if steps == 1 {
        return Ok(vec![beta_min]);
    }
    Ok((0..steps).map(|i| beta_min + (beta_max - beta_min) * i as f64 / (steps - 1) as f64).collect())
}

/// One threshold report per `β`; a failing row is recorded and the sweep
/// continues. Rows are computed in parallel and returned in grid order.
pub fn sweep(p: &PairPotential, policy: &DeltaPolicy, betas: &[f64], cfg: &RadialQuadratureConfig) -> Result<Vec<SweepRow>> {
    if betas.windows(2).any(|w| !(w[1] > w[0])) || betas.iter().any(|b| !b.is_finite()) {
        return Err(Error::InvalidParameter("β grid must be finite and strictly increasing".into()));
    }
    Ok(betas
        .par_iter()
        .map(|&beta| {
            let report = (|| {
                let t = ThermoState::new(beta)?;
                let k = temperedness_constants(p, t, cfg)?;
                let (delta, _) = resolve_delta(p, t, &k, policy)?;
                analyticity_threshold(&k, delta, beta * p.local_stability_unit())
            })()
            .map_err(|e| e.to_string());
            SweepRow { beta, report }
        })
        .collect())
}
