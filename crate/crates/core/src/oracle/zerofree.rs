//! Scans of the exact finite-volume partition function for complex zeros.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::activity::Interaction;
use super::partition::{series_coefficients, PartitionConfig};
use super::region::Region1D;
use crate::error::{Error, Result};
use crate::potentials::{PairPotential, ThermoState};

/// `|Z|` at or below this on the grid counts as a zero.
pub const GRID_ZERO_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanGrid {
    pub angles: usize,
    pub radii: usize,
}

impl Default for ScanGrid {
    fn default() -> Self {
        Self { angles: 512, radii: 32 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroFreeReport {
    pub lambda_star: f64,
    pub volume: f64,
    /// `Q_n` in `Z(λ) = Σ Q_n λⁿ`.
    pub coefficients: Vec<f64>,
    pub roots: Vec<Complex64>,
    /// Roots with `|λ| < λ*`: counterexamples to zero-freeness of the disk.
    pub roots_inside: Vec<Complex64>,
    /// Zeros enclosed by the outermost grid circle, by the argument principle.
    pub winding_number: i64,
    pub points_scanned: usize,
    pub min_abs_z: f64,
    pub argmin_abs_z: Complex64,
    /// `max |log Z|/|Λ|` along rays from the origin, with the logarithm
    /// continued along each ray. Infinite once a ray crosses a zero.
    pub max_log_z_per_volume: f64,
    /// `Z ≥ 1` and non-decreasing on `[0, λ*)`.
    pub real_axis_monotone: bool,
    pub zero_free: bool,
}

pub fn polynomial(coefficients: &[f64], x: Complex64) -> Complex64 {
    coefficients.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
}

/// All complex roots by the Durand–Kerner iteration.
pub fn polynomial_roots(coefficients: &[f64]) -> Vec<Complex64> {
    let Some(deg) = coefficients.iter().rposition(|&c| c.abs() > 1e-14 * coefficients.iter().fold(0.0f64, |m, c| m.max(c.abs()))) else {
        return Vec::new();
    };
    if deg == 0 {
        return Vec::new();
    }
    let lead = coefficients[deg];
    let monic: Vec<f64> = coefficients[..=deg].iter().map(|c| c / lead).collect();
    let scale = 1.0 + monic[..deg].iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..deg).map(|i| seed.powu(i as u32) * scale).collect();
    for _ in 0..2000 {
        let mut change = 0.0f64;
        for i in 0..deg {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..deg {
                if j != i {
                    den *= z[i] - z[j];
                }
            }
            let step = polynomial(&monic, z[i]) / den;
            z[i] -= step;
            change = change.max(step.norm() / z[i].norm().max(1.0));
        }
        if change < 1e-16 {
            break;
        }
    }
    // One Newton polish per root on the original polynomial.
    let deriv: Vec<f64> = (1..=deg).map(|n| n as f64 * coefficients[n]).collect();
    for r in &mut z {
        let d = polynomial(&deriv, *r);
        if d.norm() > 0.0 {
            *r -= polynomial(coefficients, *r) / d;
        }
    }
    z.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    z
}

fn unwrap(prev: f64, next: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    next + tau * ((prev - next) / tau).round()
}

/// Polar-grid scan of `Z_Λ(λ)` for `|λ| < λ*` with constant activity.
pub fn zero_free_scan(p: &PairPotential, t: ThermoState, region: &Region1D, lambda_star: f64, grid: ScanGrid, cfg: &PartitionConfig) -> Result<ZeroFreeReport> {
    if !(lambda_star > 0.0 && lambda_star.is_finite()) || grid.angles < 8 || grid.radii == 0 {
        return Err(Error::InvalidParameter("need λ* > 0, at least 8 angles and one radius".into()));
    }
    let inter = Interaction::new(p.clone(), t)?;
    let coefficients = series_coefficients(&inter, region, cfg)?;
    let roots = polynomial_roots(&coefficients);
    let roots_inside: Vec<Complex64> = roots.iter().copied().filter(|r| r.norm() < lambda_star).collect();
    let volume = region.measure();
    let radius = |i: usize| lambda_star * (1.0 - 1e-9) * (i + 1) as f64 / grid.radii as f64;

    let mut min_abs = f64::INFINITY;
    let mut argmin = Complex64::new(0.0, 0.0);
    let mut max_log: f64 = 0.0;
    let mut outer_phase = Vec::with_capacity(grid.angles);
    for a in 0..grid.angles {
        let dir = Complex64::from_polar(1.0, std::f64::consts::TAU * a as f64 / grid.angles as f64);
        // Continue arg Z from λ = 0 along the ray with a fine sub-grid.
        let mut phase = 0.0;
        let mut crossed = false;
        let sub = 8;
        for i in 0..grid.radii {
            let r_prev = if i == 0 { 0.0 } else { radius(i - 1) };
            for s in 1..=sub {
                let lam = dir * (r_prev + (radius(i) - r_prev) * s as f64 / sub as f64);
                let z = polynomial(&coefficients, lam);
                if z.norm() <= GRID_ZERO_TOL {
                    crossed = true;
                } else {
                    phase = unwrap(phase, z.arg());
                }
                if s == sub {
                    if z.norm() < min_abs {
                        min_abs = z.norm();
                        argmin = lam;
                    }
                    let log = if crossed { f64::INFINITY } else { Complex64::new(z.norm().ln(), phase).norm() };
                    max_log = max_log.max(log / volume);
                }
            }
        }
        outer_phase.push(phase);
    }
    // Argument principle on the outermost circle.
    let r = radius(grid.radii - 1);
    let fine = grid.angles * 8;
    let mut total = 0.0;
    let mut prev = polynomial(&coefficients, Complex64::new(r, 0.0)).arg();
    for a in 1..=fine {
        let z = polynomial(&coefficients, Complex64::from_polar(r, std::f64::consts::TAU * a as f64 / fine as f64));
        let next = unwrap(prev, z.arg());
        total += next - prev;
        prev = next;
    }
    let winding_number = (total / std::f64::consts::TAU).round() as i64;

    let mut monotone = true;
    let mut last = polynomial(&coefficients, Complex64::new(0.0, 0.0)).re;
    for i in 0..grid.radii {
        let z = polynomial(&coefficients, Complex64::new(radius(i), 0.0)).re;
        if z < last - 1e-14 * z.abs() || z < 1.0 - 1e-14 {
            monotone = false;
        }
        last = z;
    }
    let zero_free = roots_inside.is_empty() && winding_number == 0 && min_abs > GRID_ZERO_TOL;
    Ok(ZeroFreeReport {
        lambda_star,
        volume,
        coefficients,
        roots,
        roots_inside,
        winding_number,
        points_scanned: grid.angles * grid.radii,
        min_abs_z: min_abs,
        argmin_abs_z: argmin,
        max_log_z_per_volume: max_log,
        real_axis_monotone: monotone,
        zero_free,
    })
}

/// Smallest `|Z|` over the closed complex neighbourhood of `[0, λ*]` of
/// radius `width`, sampled on a rectangular grid with half-disc caps.
pub fn neighborhood_min_abs_z(coefficients: &[f64], lambda_star: f64, width: f64, n: usize) -> f64 {
    let mut min = f64::INFINITY;
    for i in 0..=n {
        for j in 0..=n {
            let x = -width + (lambda_star + 2.0 * width) * i as f64 / n as f64;
            let y = -width + 2.0 * width * j as f64 / n as f64;
            let nearest = x.clamp(0.0, lambda_star);
            if (x - nearest).hypot(y) <= width {
                min = min.min(polynomial(coefficients, Complex64::new(x, y)).norm());
            }
        }
    }
    min
}
