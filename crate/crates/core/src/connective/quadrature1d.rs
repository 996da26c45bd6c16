//! Deterministic `V_k` for one-dimensional potentials by nested adaptive
//! quadrature.
//!
//! Every indicator inside `γ_c` switches at `|w − vᵢ| ∈ {R, d(vᵢ, vᵢ₊₁)}` and
//! every Boltzmann factor at `vᵢ ±` a tail breakpoint; all of these are
//! passed to the integrator as panel boundaries.

use std::cell::RefCell;

use serde::{Deserialize, Serialize};

use super::{gamma_flat, Convention, Points, VkEstimate};
use crate::error::{Error, Result};
use crate::potentials::{PairPotential, ThermoState};
use crate::quadrature::{integrate_adaptive, AdaptiveConfig};

pub const MAX_DEPTH: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vk1dConfig {
    /// Relative tolerance of the outermost integral; each inner level is
    /// one hundred times tighter, down to `1e-13`.
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    pub tail_rel: f64,
}

impl Default for Vk1dConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-9, max_subdivisions: 600, tail_rel: 1e-12 }
    }
}

struct Nested<'a> {
    p: &'a PairPotential,
    t: ThermoState,
    k: usize,
    convention: Convention,
    r_max: f64,
    tail_breaks: Vec<f64>,
    cfg: Vk1dConfig,
    failed: RefCell<Option<(usize, f64, f64)>>,
}

impl Nested<'_> {
    fn level_cfg(&self, l: usize) -> AdaptiveConfig {
        let rel = (self.cfg.rel_tol * 0.01_f64.powi(l as i32 - 1)).max(1e-13);
        AdaptiveConfig { rel_tol: rel, abs_tol: 1e-15, max_subdivisions: self.cfg.max_subdivisions }
    }

    /// `∫ dv_l γ · |1 − e^{−βφ(v_{l−1} − v_l)}| · (inner levels)` given
    /// `prefix = v₀,…,v_{l−1}`.
    fn level(&self, prefix: &mut Vec<f64>, l: usize) -> f64 {
        let prev = *prefix.last().expect("prefix is never empty");
        let trailing_gamma = match self.convention {
            Convention::Trailing => {
                let g = gamma_flat(Points::new(prefix, 1), &[prev], self.p, self.t);
                if g == 0.0 {
                    return 0.0;
                }
                g
            }
            Convention::Leading => 1.0,
        };
        let r = self.p.core_radius();
        let mut breaks = vec![prev - self.r_max, prev + self.r_max, prev];
        for &b in &self.tail_breaks {
            breaks.push(prev - b);
            breaks.push(prev + b);
        }
        for (i, &vi) in prefix.iter().enumerate() {
            breaks.extend([vi - r, vi + r, vi]);
            if let Some(&next) = prefix.get(i + 1) {
                let di = (next - vi).abs();
                breaks.extend([vi - di, vi + di]);
            }
            if i + 1 < prefix.len() {
                for &b in &self.tail_breaks {
                    breaks.extend([vi - b, vi + b]);
                }
            }
        }
        let (lo, hi) = (prev - self.r_max, prev + self.r_max);
        breaks.retain(|&x| x >= lo && x <= hi);

        let est = integrate_adaptive(
            |v: f64| {
                let m = self.p.mayer_abs(self.t, (prev - v).abs());
                if m == 0.0 {
                    return 0.0;
                }
                let g = match self.convention {
                    Convention::Trailing => trailing_gamma,
                    Convention::Leading => gamma_flat(Points::new(prefix, 1), &[v], self.p, self.t),
                };
                if g == 0.0 {
                    return 0.0;
                }
                let inner = if l < self.k {
                    prefix.push(v);
                    let x = self.level(prefix, l + 1);
                    prefix.pop();
                    x
                } else {
                    1.0
                };
                g * m * inner
            },
            &breaks,
            &self.level_cfg(l),
        );
        if !est.converged {
            let mut slot = self.failed.borrow_mut();
            if slot.is_none() {
                *slot = Some((l, est.value, est.error));
            }
        }
        if l == 1 {
            // Outermost level: report the error through the slot as well.
            self.failed.borrow_mut().get_or_insert((0, est.value, est.error));
        }
        est.value
    }
}

/// `V_k` for a one-dimensional potential, `1 ≤ k ≤ 3`.
///
/// The returned `std_error` holds the outer quadrature error estimate and
/// `n_samples` is zero.
pub fn vk_quadrature_1d(p: &PairPotential, t: ThermoState, k: usize, convention: Convention, cfg: &Vk1dConfig) -> Result<VkEstimate> {
    if p.dimension() != 1 {
        return Err(Error::Dimension { expected: 1, found: p.dimension() });
    }
    if !(1..=MAX_DEPTH).contains(&k) {
        return Err(Error::Depth { depth: k, min: 1, max: MAX_DEPTH });
    }
    let r_max = p.truncation_radius(t, cfg.tail_rel);
    let tail_breaks: Vec<f64> = p.breakpoints().into_iter().filter(|&b| b > 0.0 && b < r_max).collect();
    let nested = Nested { p, t, k, convention, r_max, tail_breaks, cfg: *cfg, failed: RefCell::new(None) };
    let mut prefix = vec![0.0];
    let value = nested.level(&mut prefix, 1);
    let (level, partial, error) = nested.failed.into_inner().expect("outer level always records");
    if level != 0 {
        log::warn!("V_{k} quadrature: level {level} did not converge (partial {partial}, error {error:e})");
        return Err(Error::Quadrature { partial: value, error });
    }
    let tail = p.tail_mass_bound(t, r_max) * k as f64 * value.abs().max(1.0);
    Ok(VkEstimate { k, mean: value, std_error: error + tail, n_samples: 0, seed: 0, convention })
}
