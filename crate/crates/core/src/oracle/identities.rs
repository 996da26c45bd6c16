//! Two-sided checks of the log-partition-function identity and of the
//! one-step density recursion.

use std::cell::RefCell;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::activity::ActivityField;
use super::partition::{guard, kink_candidates, one_point_density, partition_function, PartitionConfig};
use super::region::Region1D;
use crate::error::{Error, Result};
use crate::quadrature::{integrate_adaptive, AdaptiveConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    pub partition: PartitionConfig,
    /// Outer adaptive integrals (and every level of the tree recursion).
    pub outer: AdaptiveConfig,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            partition: PartitionConfig::default(),
            outer: AdaptiveConfig { rel_tol: 1e-10, abs_tol: 1e-14, max_subdivisions: 300 },
        }
    }
}

impl OracleConfig {
    pub fn with_tolerance(rel_tol: f64) -> Self {
        let mut c = Self::default();
        c.outer.rel_tol = rel_tol;
        c
    }
}

/// Both sides of an identity and their discrepancy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub residual: f64,
    /// `residual / |lhs|`, or the residual itself when `lhs = 0`.
    pub relative: f64,
    /// Quadrature error estimate of the integral side.
    pub quad_error: f64,
}

impl IdentityCheck {
    pub(crate) fn new(lhs: Complex64, rhs: Complex64, quad_error: f64) -> Self {
        let residual = (lhs - rhs).norm();
        let relative = if lhs.norm() > 0.0 { residual / lhs.norm() } else { residual };
        Self { lhs, rhs, residual, relative, quad_error }
    }
}

/// Collects the first error raised inside an integrand.
pub(crate) struct ErrorSlot(RefCell<Option<Error>>);

impl ErrorSlot {
    pub fn new() -> Self {
        Self(RefCell::new(None))
    }

    pub fn take<T>(&self, r: Result<T>, fallback: T) -> T {
        match r {
            Ok(v) => v,
            Err(e) => {
                self.0.borrow_mut().get_or_insert(e);
                fallback
            }
        }
    }

    pub fn check(self) -> Result<()> {
        match self.0.into_inner() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// `log Z(λ)` against `∫_Λ ρ_{λ̂ₓ}(x) dx` with `λ̂ₓ = 1_{B_{|x|}(0)ᶜ}·λ`.
pub fn check_log_z_identity(a: &ActivityField, region: &Region1D, cfg: &OracleConfig) -> Result<IdentityCheck> {
    let z = partition_function(a, region, &cfg.partition)?;
    guard(z, || "log-Z identity, full activity".into())?;
    let lhs = z.ln();
    let eff = a.support().intersect(region);
    let Some((lo, hi)) = eff.hull() else {
        return Ok(IdentityCheck::new(lhs, zero(), 0.0));
    };
    if a.is_zero() {
        return Ok(IdentityCheck::new(lhs, zero(), 0.0));
    }
    let slot = ErrorSlot::new();
    let mut breaks = kink_candidates(a, region, &[0.0]);
    breaks.extend(kink_candidates(a, region, &[0.0]).into_iter().map(|x| -x));
    breaks.retain(|&x| x > lo && x < hi);
    breaks.extend([lo, hi]);
    let est = integrate_adaptive(
        |x: f64| {
            if !eff.contains(x) {
                return zero();
            }
            let cut = a.modulate(1.0, &[], &Region1D::ball_complement_through(0.0, x));
            let rho = cut.and_then(|c| one_point_density(&c, region, x, &cfg.partition));
            slot.take(rho, zero())
        },
        &breaks,
        &cfg.outer,
    );
    slot.check()?;
    Ok(IdentityCheck::new(lhs, est.value, est.error))
}

/// `ρ_λ(v)` against `λ(v)·exp(−∫ dw [1 − e^{−βφ(v−w)}] ρ_{λ_{v→w}}(w))`.
pub fn check_recursion_identity(a: &ActivityField, region: &Region1D, v: f64, cfg: &OracleConfig) -> Result<IdentityCheck> {
    let lhs = one_point_density(a, region, v, &cfg.partition)?;
    let lam_v = if region.contains(v) { a.eval(v) } else { zero() };
    if lam_v == zero() {
        return Ok(IdentityCheck::new(lhs, zero(), 0.0));
    }
    let inter = a.interaction();
    let range = inter.range();
    let eff = a.support().intersect(region);
    let (lo, hi) = eff.hull().expect("λ(v) ≠ 0 implies a non-empty support");
    let (lo, hi) = (lo.max(v - range), hi.min(v + range));
    let slot = ErrorSlot::new();
    let mut anchors = vec![v];
    for b in inter.potential.breakpoints() {
        anchors.extend([v - b, v + b]);
    }
    let mut breaks = kink_candidates(a, region, &anchors);
    breaks.extend(kink_candidates(a, region, &anchors).into_iter().map(|x| 2.0 * v - x));
    breaks.retain(|&x| x > lo && x < hi);
    breaks.extend([lo, hi]);
    let est = integrate_adaptive(
        |w: f64| {
            if !eff.contains(w) {
                return zero();
            }
            let m = inter.mayer(v - w);
            if m == 0.0 {
                return zero();
            }
            let rho = a.towards(v, w).and_then(|b| one_point_density(&b, region, w, &cfg.partition));
            slot.take(rho, zero()) * m
        },
        &breaks,
        &cfg.outer,
    );
    slot.check()?;
    let rhs = lam_v * (-est.value).exp();
    Ok(IdentityCheck::new(lhs, rhs, est.error * rhs.norm()))
}
