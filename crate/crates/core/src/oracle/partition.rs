//! Exact finite-series partition functions and one-point densities.
//!
//! With a hard core of radius `R`, a region of length `L` holds at most
//! `⌊L/R⌋ + 1` particles, so
//!
//! ```text
//! Z = 1 + Σ_{n ≤ n_max} ∫_{x₁<…<x_n} e^{−U(x)} ∏ λ^m(xᵢ) dx
//! ```
//!
//! is a finite sum. Each ordered integral is evaluated by nested
//! Gauss–Legendre panels whose boundaries include every point where the
//! integrand, or an inner integral viewed as a function of the outer
//! variable, can lose smoothness.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::activity::{ActivityField, Interaction};
use super::region::Region1D;
use crate::error::{Error, Result};
use crate::quadrature::{clean_breaks, PanelRule};

/// `|Z|` below this is treated as a zero of the partition function.
pub const ZERO_GUARD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartitionConfig {
    /// Gauss–Legendre nodes per panel.
    pub order: usize,
    /// Largest admissible particle number.
    pub particle_cap: usize,
}

impl Default for PartitionConfig {
    fn default() -> Self {
        Self { order: 12, particle_cap: 5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZEstimate {
    pub value: Complex64,
    /// `|Z_n − Z_{n/2}|` between the configured order and half of it,
    /// floored at a few ulps of `|Z|`.
    pub error: f64,
}

/// `⌊L/R⌋ + 1` for the hull of `region`.
pub fn max_particles(region: &Region1D, core_radius: f64) -> usize {
    match region.hull() {
        None => 0,
        Some((lo, hi)) => ((hi - lo) / core_radius).floor() as usize + 1,
    }
}

struct Engine<'a> {
    a: &'a ActivityField,
    inter: &'a Interaction,
    lo: f64,
    hi: f64,
    n_max: usize,
    rule: PanelRule,
    features: Vec<f64>,
    breaks: Vec<f64>,
    /// `shifts[m]`: every sum of `m` elements of `breaks`.
    shifts: Vec<Vec<f64>>,
}

impl<'a> Engine<'a> {
    fn new(a: &'a ActivityField, region: &Region1D, cfg: &PartitionConfig, order: usize) -> Result<Option<Self>> {
        let inter = a.interaction().as_ref();
        let eff = a.support().intersect(region);
        if a.is_zero() || eff.is_empty() {
            return Ok(None);
        }
        if !eff.is_bounded() {
            return Err(Error::InvalidParameter("the region must be bounded".into()));
        }
        let r = inter.core_radius();
        let n_max = max_particles(&eff, r);
        if n_max > cfg.particle_cap {
            return Err(Error::ParticleCap { n_max, cap: cfg.particle_cap });
        }
        let (lo, hi) = eff.hull().expect("non-empty");
        let mut features = a.features();
        features.extend(eff.endpoints());
        features.retain(|x| x.is_finite());
        let breaks = inter.potential.breakpoints();
        let mut shifts = vec![vec![0.0]];
        for m in 1..n_max {
            let mut next: Vec<f64> = shifts[m - 1].iter().flat_map(|s| breaks.iter().map(move |b| s + b)).collect();
            next.sort_by(f64::total_cmp);
            next.dedup_by(|x, y| (*x - *y).abs() < 1e-13);
            shifts.push(next);
        }
        Ok(Some(Self { a, inter, lo, hi, n_max, rule: PanelRule::new(order), features, breaks, shifts }))
    }

    /// `1 + ∫_{x > x_last} λ^m(x) ∏ e^{−βφ(x − xᵢ)} G(xs, x) dx` restricted to
    /// the region.
    fn level(&self, xs: &mut Vec<f64>, region: &Region1D) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        if xs.len() >= self.n_max {
            return one;
        }
        let r = self.inter.core_radius();
        let start = xs.last().map_or(self.lo, |&x| x + r);
        if start >= self.hi {
            return one;
        }
        let rem = self.n_max - xs.len() - 1;
        let mut cand: Vec<f64> = Vec::new();
        for s in self.shifts[..=rem].iter().flatten() {
            cand.extend(self.features.iter().map(|f| f - s));
            for &x in xs.iter() {
                cand.extend(self.breaks.iter().map(|b| x + b - s));
            }
        }
        let panels = clean_breaks(cand, start, self.hi, 1e-12);
        let sum = self.rule.panels(&panels, |x| {
            if !region.contains(x) {
                return Complex64::new(0.0, 0.0);
            }
            let lam = self.a.eval(x);
            if lam == Complex64::new(0.0, 0.0) {
                return lam;
            }
            let mut w = 1.0;
            for &y in xs.iter() {
                w *= self.inter.boltzmann(x - y);
                if w == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
            }
            xs.push(x);
            let inner = self.level(xs, region);
            xs.pop();
            lam * w * inner
        });
        one + sum
    }
}

fn evaluate(a: &ActivityField, region: &Region1D, cfg: &PartitionConfig, order: usize) -> Result<Complex64> {
    match Engine::new(a, region, cfg, order)? {
        None => Ok(Complex64::new(1.0, 0.0)),
        Some(engine) => Ok(engine.level(&mut Vec::with_capacity(engine.n_max), region)),
    }
}

/// `Z_Λ(λ^m)` for the activity restricted to `region`.
pub fn partition_function(a: &ActivityField, region: &Region1D, cfg: &PartitionConfig) -> Result<Complex64> {
    evaluate(a, region, cfg, cfg.order)
}

/// `Z` together with a refinement-based error estimate.
pub fn partition_function_with_error(a: &ActivityField, region: &Region1D, cfg: &PartitionConfig) -> Result<ZEstimate> {
    let value = evaluate(a, region, cfg, cfg.order)?;
    let coarse = evaluate(a, region, cfg, (cfg.order / 2).max(2))?;
    let error = (value - coarse).norm().max(64.0 * f64::EPSILON * value.norm());
    Ok(ZEstimate { value, error })
}

/// Coefficients `Q_n` of `Z(λ) = Σ Q_n λⁿ` for constant real base activity 1,
/// recovered from `n_max + 1` evaluations on the unit circle.
pub fn series_coefficients(inter: &std::sync::Arc<Interaction>, region: &Region1D, cfg: &PartitionConfig) -> Result<Vec<f64>> {
    let n = max_particles(region, inter.core_radius());
    if n > cfg.particle_cap {
        return Err(Error::ParticleCap { n_max: n, cap: cfg.particle_cap });
    }
    let m = n + 1;
    let values = (0..m)
        .map(|j| {
            let w = Complex64::from_polar(1.0, std::f64::consts::TAU * j as f64 / m as f64);
            partition_function(&ActivityField::constant(inter.clone(), w), region, cfg)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((0..m)
        .map(|k| {
            let s: Complex64 = values
                .iter()
                .enumerate()
                .map(|(j, v)| v * Complex64::from_polar(1.0, -std::f64::consts::TAU * (j * k) as f64 / m as f64))
                .sum();
            s.re / m as f64
        })
        .collect())
}

/// `ρ_λ(v) = λ^m(v)·Z(λ^m e^{−βφ(v − ·)}) / Z(λ^m)`.
pub fn one_point_density(a: &ActivityField, region: &Region1D, v: f64, cfg: &PartitionConfig) -> Result<Complex64> {
    if !region.contains(v) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let lam = a.eval(v);
    if lam == Complex64::new(0.0, 0.0) {
        return Ok(lam);
    }
    let den = partition_function(a, region, cfg)?;
    guard(den, || format!("denominator of the density at v = {v}"))?;
    let num = partition_function(&a.with_particle_at(v)?, region, cfg)?;
    Ok(lam * num / den)
}

/// Points where `Z` of a field built around `anchors` can fail to be smooth
/// as a function of an anchor: every feature, shifted by sums of
/// potential breakpoints, on both sides.
pub(crate) fn kink_candidates(a: &ActivityField, region: &Region1D, anchors: &[f64]) -> Vec<f64> {
    let inter = a.interaction();
    let n = max_particles(region, inter.core_radius()).max(1);
    let breaks = inter.potential.breakpoints();
    let mut sums = vec![0.0];
    let mut layer = vec![0.0];
    for _ in 1..=n {
        layer = layer.iter().flat_map(|s| breaks.iter().map(move |b| s + b)).collect();
        layer.sort_by(f64::total_cmp);
        layer.dedup_by(|x, y| (*x - *y).abs() < 1e-13);
        sums.extend_from_slice(&layer);
    }
    let mut base = a.features();
    base.extend(region.endpoints());
    base.extend_from_slice(anchors);
    let mut out = Vec::with_capacity(base.len() * sums.len() * 2);
    for f in base.into_iter().filter(|f| f.is_finite()) {
        for s in &sums {
            out.push(f - s);
            out.push(f + s);
        }
    }
    out
}

pub(crate) fn guard(z: Complex64, location: impl FnOnce() -> String) -> Result<()> {
    if z.norm() > ZERO_GUARD {
        Ok(())
    } else {
        Err(Error::ZeroFreeness { location: location(), modulus: z.norm() })
    }
}
