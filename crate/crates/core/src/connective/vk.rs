//! Monte Carlo estimation of `V_k`.
//!
//! Each step `v_ℓ − v_{ℓ−1}` is drawn exactly from the density
//! `|1 − e^{−βφ}|/C_φ` by rejection from a piecewise-constant radial
//! envelope, so a path carries weight `C_φ^k ∏ γ_c`. Chains are seeded from
//! `(seed, chain index)` and reduced in chain order, which makes the result
//! independent of the number of worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{integrand_flat, Convention, Points};
use crate::constants::{temperedness_constants, RadialQuadratureConfig, TemperednessConstants};
use crate::error::{Error, Result};
use crate::potentials::{PairPotential, ThermoState};

pub const DEFAULT_CHAINS: usize = 64;
const TAIL_CELLS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub samples: u64,
    pub seed: u64,
    pub chains: usize,
    pub convention: Convention,
}

impl Default for McConfig {
    fn default() -> Self {
        Self { samples: 1_000_000, seed: 42, chains: DEFAULT_CHAINS, convention: Convention::Trailing }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VkEstimate {
    pub k: usize,
    pub mean: f64,
    pub std_error: f64,
    /// Zero for deterministic estimates.
    pub n_samples: u64,
    pub seed: u64,
    pub convention: Convention,
}

/// Exact sampler for steps with density `|1 − e^{−βφ(|x|)}|` on `ℝ^d`.
#[derive(Debug, Clone)]
pub struct RadialSampler {
    pot: PairPotential,
    t: ThermoState,
    d: usize,
    /// Cell edges `r₀ = 0 < r₁ = R < … < r_n = R_max`.
    edges: Vec<f64>,
    /// Envelope height per cell, at least the supremum of the Mayer
    /// magnitude on that cell.
    heights: Vec<f64>,
    /// Cumulative envelope mass, normalized to end at one.
    cdf: Vec<f64>,
    constants: TemperednessConstants,
}

fn below(x: f64) -> f64 {
    if x > 0.0 {
        f64::from_bits(x.to_bits() - 1)
    } else {
        x
    }
}

impl RadialSampler {
    pub fn new(p: &PairPotential, t: ThermoState, cfg: &RadialQuadratureConfig) -> Result<Self> {
        let constants = temperedness_constants(p, t, cfg)?;
        let d = p.dimension();
        let r0 = p.core_radius();
        let r_max = p.truncation_radius(t, cfg.tail_rel);
        let mut edges = vec![0.0, r0];
        if r_max > r0 {
            let breaks: Vec<f64> = p.breakpoints().into_iter().filter(|&b| b > r0 && b < r_max).chain([r_max]).collect();
            let span = r_max - r0;
            let mut lo = r0;
            for b in breaks {
                let n = ((TAIL_CELLS as f64) * (b - lo) / span).ceil().max(1.0) as usize;
                for i in 1..=n {
                    edges.push(if i == n { b } else { lo + (b - lo) * i as f64 / n as f64 });
                }
                lo = b;
            }
        }
        // The Mayer magnitude is monotone on each cell because cells never
        // straddle a breakpoint, so the larger endpoint value bounds it.
        let mut heights = vec![1.0];
        for w in edges.windows(2).skip(1) {
            let h = p.mayer_abs(t, w[0]).max(p.mayer_abs(t, below(w[1])));
            heights.push(h * (1.0 + 1e-12));
        }
        let mut cdf = Vec::with_capacity(heights.len());
        let mut acc = 0.0;
        for (i, h) in heights.iter().enumerate() {
            acc += h * (edges[i + 1].powi(d as i32) - edges[i].powi(d as i32));
            cdf.push(acc);
        }
        for c in &mut cdf {
            *c /= acc;
        }
        Ok(Self { pot: p.clone(), t, d, edges, heights, cdf, constants })
    }

    pub fn constants(&self) -> &TemperednessConstants {
        &self.constants
    }

    pub fn cells(&self) -> usize {
        self.heights.len()
    }

    /// Draws a radius from `r^{d−1}|1 − e^{−βφ(r)}|` on `[0, R_max]`.
    pub fn radius<G: Rng + ?Sized>(&self, rng: &mut G) -> f64 {
        let d = self.d as i32;
        loop {
            let u: f64 = rng.random();
            let j = self.cdf.partition_point(|&c| c < u).min(self.cdf.len() - 1);
            let (a, b) = (self.edges[j], self.edges[j + 1]);
            let v: f64 = rng.random();
            let r = if d == 1 { a + v * (b - a) } else { (a.powi(d) + v * (b.powi(d) - a.powi(d))).powf(1.0 / d as f64) };
            let r = r.clamp(a, below(b).max(a));
            if j == 0 {
                return r;
            }
            let accept: f64 = rng.random();
            if accept * self.heights[j] < self.pot.mayer_abs(self.t, r) {
                return r;
            }
        }
    }

    /// Draws a displacement with density `|1 − e^{−βφ(|x|)}| / C_φ`.
    pub fn step<G: Rng + ?Sized>(&self, rng: &mut G, out: &mut [f64]) {
        let r = self.radius(rng);
        if self.d == 1 {
            out[0] = if rng.random::<bool>() { r } else { -r };
            return;
        }
        loop {
            let mut norm = 0.0;
            for x in out.iter_mut() {
                *x = rng.sample(StandardNormal);
                norm += *x * *x;
            }
            if norm > 1e-300 {
                let s = r / norm.sqrt();
                out.iter_mut().for_each(|x| *x *= s);
                return;
            }
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Welford {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, o: Welford) -> Welford {
        if o.n == 0 {
            return self;
        }
        if self.n == 0 {
            return o;
        }
        let n = self.n + o.n;
        let delta = o.mean - self.mean;
        Welford {
            n,
            mean: self.mean + delta * o.n as f64 / n as f64,
            m2: self.m2 + o.m2 + delta * delta * self.n as f64 * o.n as f64 / n as f64,
        }
    }
}

/// Estimates `V_k` from `cfg.samples` importance-sampled paths.
pub fn vk_monte_carlo(p: &PairPotential, t: ThermoState, k: usize, cfg: &McConfig) -> Result<VkEstimate> {
    let sampler = RadialSampler::new(p, t, &RadialQuadratureConfig::default())?;
    vk_monte_carlo_with(&sampler, k, cfg)
}

/// As [`vk_monte_carlo`], reusing a prepared sampler.
pub fn vk_monte_carlo_with(sampler: &RadialSampler, k: usize, cfg: &McConfig) -> Result<VkEstimate> {
    if k == 0 {
        return Err(Error::InvalidParameter("depth k must be at least 1".into()));
    }
    if k > 63 {
        return Err(Error::Depth { depth: k, min: 1, max: 63 });
    }
    if cfg.samples < 1000 {
        return Err(Error::InvalidParameter(format!("at least 1000 samples are required, got {}", cfg.samples)));
    }
    if cfg.chains == 0 {
        return Err(Error::InvalidParameter("at least one chain is required".into()));
    }
    let chains = cfg.chains as u64;
    let d = sampler.d;
    let scale = sampler.constants.c_phi.powi(k as i32);
    let per_chain = |c: u64| cfg.samples / chains + u64::from(c < cfg.samples % chains);

    let stats: Vec<Result<Welford>> = (0..chains)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(c);
            let mut path = vec![0.0; (k + 1) * d];
            let mut step = vec![0.0; d];
            let mut acc = Welford::default();
            for _ in 0..per_chain(c) {
                for l in 1..=k {
                    sampler.step(&mut rng, &mut step);
                    for i in 0..d {
                        path[l * d + i] = path[(l - 1) * d + i] + step[i];
                    }
                }
                let g = integrand_flat(Points::new(&path, d), &sampler.pot, sampler.t, cfg.convention);
                let m = {
                    let pts = Points::new(&path, d);
                    (1..=k).map(|l| sampler.pot.mayer_abs(sampler.t, pts.dist(l - 1, l))).product::<f64>()
                };
                // Divide out the sampled Mayer factors; they are positive by
                // construction of the sampler.
                let w = if g == 0.0 { 0.0 } else { scale * g / m };
                if !w.is_finite() {
                    return Err(Error::NonFiniteWeight(format!("chain {c}, path {path:?}")));
                }
                acc.push(w);
            }
            Ok(acc)
        })
        .collect();

    let mut total = Welford::default();
    for s in stats {
        total = total.merge(s?);
    }
    let var = if total.n > 1 { total.m2 / (total.n - 1) as f64 } else { 0.0 };
    Ok(VkEstimate {
        k,
        mean: total.mean,
        std_error: (var / total.n as f64).sqrt(),
        n_samples: total.n,
        seed: cfg.seed,
        convention: cfg.convention,
    })
}
