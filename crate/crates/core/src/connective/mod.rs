//! Good/bad point sequences, the reference modulating function `γ_c`, and
//! the walk integrals
//!
//! ```text
//! V_k = ∫ dv₁…dv_k ∏_{ℓ=1}^{k} γ_c(v₀,…,v_{ℓ−1}, ·) |1 − e^{−βφ(v_{ℓ−1} − v_ℓ)}|
//! ```
//!
//! anchored at `v₀ = 0`. Balls `B_t(x)` are open, so their complements keep
//! the boundary sphere.

mod delta;
mod quadrature1d;
mod vk;

pub use delta::{delta_phi_upper, DeltaEstimate};
pub use quadrature1d::{vk_quadrature_1d, Vk1dConfig};
pub use vk::{vk_monte_carlo, vk_monte_carlo_with, McConfig, RadialSampler, VkEstimate, DEFAULT_CHAINS};

use serde::{Deserialize, Serialize};

use crate::potentials::{PairPotential, ThermoState};

/// Which point the `ℓ`-th modulating factor is evaluated at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// `γ_c(v₀,…,v_{ℓ−1}, v_{ℓ−1})`, the formula as written. Every factor
    /// for `ℓ ≤ 2` is one, so `V₂ = C_φ²`.
    #[default]
    Trailing,
    /// `γ_c(v₀,…,v_{ℓ−1}, v_ℓ)`.
    Leading,
}

impl std::str::FromStr for Convention {
    type Err = crate::error::Error;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "trailing" => Ok(Convention::Trailing),
            "leading" => Ok(Convention::Leading),
            other => Err(crate::error::Error::InvalidParameter(format!(
                "convention must be `trailing` or `leading`, got `{other}`"
            ))),
        }
    }
}

impl std::fmt::Display for Convention {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Convention::Trailing => "trailing",
            Convention::Leading => "leading",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SequenceClass {
    /// Indices `i` with `d(vᵢ, vᵢ₊₁) ≥ R`.
    Good(Vec<usize>),
    Bad,
}

/// Points stored contiguously, `d` coordinates each.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Points<'a> {
    pub data: &'a [f64],
    pub d: usize,
}

impl<'a> Points<'a> {
    pub fn new(data: &'a [f64], d: usize) -> Self {
        debug_assert!(d > 0 && data.len().is_multiple_of(d));
        Self { data, d }
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.d
    }

    pub fn get(&self, i: usize) -> &'a [f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        dist(self.get(i), self.get(j))
    }
}

#[inline]
pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    if a.len() == 1 {
        return (a[0] - b[0]).abs();
    }
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Good-index bitmask of a flat sequence, or `None` when it is bad.
pub(crate) fn classify_flat(pts: Points<'_>, r: f64) -> Option<u64> {
    let j = pts.len();
    let mut mask = 0u64;
    for i in 0..j.saturating_sub(1) {
        if pts.dist(i, i + 1) >= r {
            mask |= 1 << i;
        }
    }
    for i in 0..j.saturating_sub(1) {
        if mask & (1 << i) != 0 {
            for k in i + 1..j {
                if pts.dist(i, k) < r {
                    return None;
                }
            }
        }
    }
    Some(mask)
}

/// `γ_c(prefix, w)` on flat storage.
pub(crate) fn gamma_flat(pts: Points<'_>, w: &[f64], p: &PairPotential, t: ThermoState) -> f64 {
    let r = p.core_radius();
    let Some(mask) = classify_flat(pts, r) else {
        return 0.0;
    };
    let mut g = 1.0;
    for i in 0..pts.len().saturating_sub(1) {
        let vi = pts.get(i);
        let di = pts.dist(i, i + 1);
        let dw = dist(w, vi);
        if mask & (1 << i) != 0 {
            if dw < r {
                return 0.0;
            }
            if dw < di {
                g *= p.boltzmann(t, dw);
            }
        } else if dw < di {
            return 0.0;
        }
    }
    g
}

fn flatten(points: &[Vec<f64>]) -> (Vec<f64>, usize) {
    let d = points.first().map_or(1, Vec::len).max(1);
    assert!(points.iter().all(|v| v.len() == d), "all points must share one dimension");
    (points.concat(), d)
}

/// Splits a sequence into good (with its index set) or bad.
///
/// # Panics
/// If the points do not share a dimension.
pub fn classify_sequence(points: &[Vec<f64>], core_radius: f64) -> SequenceClass {
    let (flat, d) = flatten(points);
    match classify_flat(Points::new(&flat, d), core_radius) {
        None => SequenceClass::Bad,
        Some(mask) => SequenceClass::Good((0..64).filter(|i| mask & (1 << i) != 0).collect()),
    }
}

/// The reference modulating function `γ_c(v₀,…,v_{j−1}, w)`.
pub fn gamma_c_eval(prefix: &[Vec<f64>], w: &[f64], p: &PairPotential, t: ThermoState) -> f64 {
    let (flat, d) = flatten(prefix);
    gamma_flat(Points::new(&flat, d), w, p, t)
}

pub(crate) fn integrand_flat(path: Points<'_>, p: &PairPotential, t: ThermoState, convention: Convention) -> f64 {
    let k = path.len() - 1;
    let d = path.d;
    let mut acc = 1.0;
    for l in 1..=k {
        let m = p.mayer_abs(t, path.dist(l - 1, l));
        if m == 0.0 {
            return 0.0;
        }
        let prefix = Points::new(&path.data[..l * d], d);
        let at = match convention {
            Convention::Trailing => path.get(l - 1),
            Convention::Leading => path.get(l),
        };
        let g = gamma_flat(prefix, at, p, t);
        if g == 0.0 {
            return 0.0;
        }
        acc *= g * m;
    }
    acc
}

/// Integrand of `V_k` at the path `v₀,…,v_k`.
pub fn vk_integrand(path: &[Vec<f64>], p: &PairPotential, t: ThermoState, convention: Convention) -> f64 {
    let (flat, d) = flatten(path);
    integrand_flat(Points::new(&flat, d), p, t, convention)
}
