//! Temperedness constants by radial quadrature.
//!
//! `C_φ = ∫|1−e^{−βφ}|` splits into the repulsive part `P_φ` (where `φ ≥ 0`,
//! including the hard core) and the attractive part `A_φ` (where `φ < 0`).
//! `Ĉ_φ = ∫(1−e^{−β|φ|})` is the weak temperedness constant. The hard core
//! contributes `ω_d R^d` to `C_φ`, `P_φ` and `Ĉ_φ` and is added analytically,
//! so the kink at `r = R` is never sampled.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potentials::{unit_ball_volume, unit_sphere_area, PairPotential, ThermoState};
use crate::quadrature::{integrate_adaptive, AdaptiveConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialQuadratureConfig {
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// The tail beyond the truncation radius must weigh less than this
    /// fraction of the hard-core volume.
    pub tail_rel: f64,
}

impl Default for RadialQuadratureConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-10, max_subdivisions: 400, tail_rel: 1e-12 }
    }
}

impl RadialQuadratureConfig {
    fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !(self.tail_rel > 0.0) || self.max_subdivisions == 0 {
            return Err(Error::InvalidParameter(format!("invalid quadrature configuration {self:?}")));
        }
        Ok(())
    }

    fn adaptive(&self) -> AdaptiveConfig {
        AdaptiveConfig { rel_tol: self.rel_tol, abs_tol: 1e-15, max_subdivisions: self.max_subdivisions }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TemperednessConstants {
    pub c_phi: f64,
    pub a_phi: f64,
    pub p_phi: f64,
    pub c_hat_phi: f64,
    pub beta: f64,
    pub quad_error: f64,
}

impl TemperednessConstants {
    /// Constants from known values, for callers that already have them.
    pub fn from_parts(p_phi: f64, a_phi: f64, c_hat_phi: f64, beta: f64) -> Self {
        Self { c_phi: p_phi + a_phi, a_phi, p_phi, c_hat_phi, beta, quad_error: 0.0 }
    }
}

/// `∫_{ℝ^d} g(|w|) dw = |S^{d−1}| ∫_0^∞ r^{d−1} g(r) dr`.
///
/// `breakpoints` are radii where `g` is not smooth. The upper limit is `+∞`
/// unless `upper` is given.
pub fn radial_integral<F>(g: F, d: usize, breakpoints: &[f64], upper: Option<f64>, cfg: &RadialQuadratureConfig) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    cfg.validate()?;
    if d == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    let hi = upper.unwrap_or(f64::INFINITY);
    let mut pts = vec![0.0, hi];
    pts.extend(breakpoints.iter().copied().filter(|&x| x > 0.0 && x < hi));
    let est = integrate_adaptive(|r: f64| r.powi(d as i32 - 1) * g(r), &pts, &cfg.adaptive());
    let s = unit_sphere_area(d);
    if !est.converged || !est.value.is_finite() {
        return Err(Error::Quadrature { partial: s * est.value, error: s * est.error });
    }
    Ok((s * est.value, s * est.error))
}

/// `C_φ`, `A_φ`, `P_φ` and `Ĉ_φ` at inverse temperature `t.beta`.
pub fn temperedness_constants(p: &PairPotential, t: ThermoState, cfg: &RadialQuadratureConfig) -> Result<TemperednessConstants> {
    cfg.validate()?;
    let d = p.dimension();
    let r0 = p.core_radius();
    let core = unit_ball_volume(d) * r0.powi(d as i32);
    let r_max = p.truncation_radius(t, cfg.tail_rel);
    let tail_bound = p.tail_mass_bound(t, r_max);
    let breaks = p.breakpoints();

    let outside = |part: fn(f64) -> f64| {
        move |r: f64| part(t.beta * p.tail_value(r))
    };
    // Each integrand sees x = βφ(r).
    let repulsive = |x: f64| if x >= 0.0 { -(-x).exp_m1() } else { 0.0 };
    let attractive = |x: f64| if x < 0.0 { (-x).exp_m1() } else { 0.0 };
    let weak = |x: f64| -(-x.abs()).exp_m1();

    let shell = |g: &dyn Fn(f64) -> f64| -> Result<(f64, f64)> {
        if r_max <= r0 {
            return Ok((0.0, 0.0));
        }
        let mut pts = vec![r0, r_max];
        pts.extend(breaks.iter().copied().filter(|&x| x > r0 && x < r_max));
        let est = integrate_adaptive(|r: f64| r.powi(d as i32 - 1) * g(r), &pts, &cfg.adaptive());
        let s = unit_sphere_area(d);
        if !est.converged || !est.value.is_finite() {
            return Err(Error::Quadrature { partial: s * est.value, error: s * est.error });
        }
        Ok((s * est.value, s * est.error))
    };

    let (p_tail, p_err) = shell(&outside(repulsive))?;
    let (a_tail, a_err) = if p.is_repulsive() { (0.0, 0.0) } else { shell(&outside(attractive))? };
    let (w_tail, w_err) = shell(&outside(weak))?;

    let p_phi = core + p_tail;
    let a_phi = a_tail;
    let quad_error = p_err + a_err + w_err + tail_bound;
    let c = TemperednessConstants {
        c_phi: p_phi + a_phi,
        a_phi,
        p_phi,
        c_hat_phi: core + w_tail,
        beta: t.beta,
        quad_error,
    };
    log::debug!("constants for {p} at beta={}: {c:?} (R_max = {r_max})", t.beta);
    Ok(c)
}

/// Stability constant `B = βC₀/2`.
pub fn stability_constant(p: &PairPotential, t: ThermoState) -> f64 {
    0.5 * t.beta * p.local_stability_unit()
}
