//! Finite-depth upper bound on the connective constant `Δ_φ`.

use serde::{Deserialize, Serialize};

use super::VkEstimate;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaEstimate {
    /// `min V_k^{1/k}` over admissible `k ≤ k_max`; an upper bound on `Δ_φ`.
    pub delta_hat: f64,
    /// Propagated uncertainty of `delta_hat`.
    pub std_error: f64,
    pub witnessing_k: usize,
    pub vk_values: Vec<VkEstimate>,
    /// `V_k ≥ A_φ^k` for each `k`.
    pub admissible: Vec<bool>,
    /// Admissibility that could flip within three standard errors.
    pub near_boundary: Vec<bool>,
    /// True when no depth was admissible and `k = 1` was used instead.
    pub fallback: bool,
}

/// `Δ̂ = min { V_k^{1/k} : V_k ≥ A_φ^k, k ≤ k_max }`.
///
/// `estimates[i]` must hold depth `i + 1`. The uncertainty of `V_k^{1/k}` is
/// `V_k^{1/k−1} δV_k / k`.
pub fn delta_phi_upper(estimates: &[VkEstimate], a_phi: f64, k_max: usize) -> Result<DeltaEstimate> {
    if k_max == 0 || estimates.len() < k_max {
        return Err(Error::InvalidParameter(format!(
            "need estimates for k = 1..={k_max}, got {}",
            estimates.len()
        )));
    }
    let used = &estimates[..k_max];
    for (i, e) in used.iter().enumerate() {
        if e.k != i + 1 {
            return Err(Error::InvalidParameter(format!("estimate {i} has depth {}, expected {}", e.k, i + 1)));
        }
    }
    let mut admissible = Vec::with_capacity(k_max);
    let mut near_boundary = Vec::with_capacity(k_max);
    let mut best: Option<(f64, f64, usize)> = None;
    for e in used {
        let floor = a_phi.powi(e.k as i32);
        let ok = e.mean >= floor;
        admissible.push(ok);
        near_boundary.push(a_phi > 0.0 && (e.mean - floor).abs() <= 3.0 * e.std_error);
        if ok && e.mean > 0.0 {
            let root = e.mean.powf(1.0 / e.k as f64);
            let err = root / e.mean * e.std_error / e.k as f64;
            if best.is_none_or(|(b, _, _)| root < b) {
                best = Some((root, err, e.k));
            }
        }
    }
    let fallback = best.is_none();
    let (delta_hat, std_error, witnessing_k) = best.unwrap_or_else(|| {
        log::warn!("no admissible depth for Δ̂; falling back to k = 1");
        (used[0].mean, used[0].std_error, 1)
    });
    Ok(DeltaEstimate {
        delta_hat,
        std_error,
        witnessing_k,
        vk_values: used.to_vec(),
        admissible,
        near_boundary,
        fallback,
    })
}
