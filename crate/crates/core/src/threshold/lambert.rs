//! Principal branch of the Lambert W function.

use crate::error::{Error, Result};

const INV_E: f64 = 0.367_879_441_171_442_32;
const TOL: f64 = 1e-14;
const MAX_ITER: usize = 50;

fn initial_guess(x: f64) -> f64 {
    if x < -0.25 {
        // Series about the branch point in p = √(2(ex + 1)).
        let p = (2.0 * (std::f64::consts::E * x + 1.0)).max(0.0).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else if x <= std::f64::consts::E {
        let l = x.ln_1p();
        l * (1.0 - l.ln_1p() / (2.0 + l))
    } else {
        let l1 = x.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    }
}

/// `W₀(x)`, the solution `w ≥ −1` of `w e^w = x`, by Halley iteration.
pub fn lambert_w0(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::LambertDomain(x));
    }
    if x < -INV_E {
        // Accept values that are −1/e up to rounding.
        if x >= -INV_E * (1.0 + 4.0 * f64::EPSILON) {
            return Ok(-1.0);
        }
        return Err(Error::LambertDomain(x));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(f64::INFINITY);
    }
    let mut w = initial_guess(x);
    for _ in 0..MAX_ITER {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        if wp1 == 0.0 {
            break;
        }
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let step = f / denom;
        if !step.is_finite() {
            break;
        }
        w -= step;
        if step.abs() <= TOL * (1.0 + w.abs()) {
            break;
        }
    }
    Ok(w.max(-1.0))
}
