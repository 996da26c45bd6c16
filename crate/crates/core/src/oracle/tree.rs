//! Depth-`k` tree recursions with the modulating function
//! `γ = 1_{prefix ⊆ A}·γ_c`, and the checks built on them.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::activity::{ActivityField, Interaction};
use super::identities::{ErrorSlot, IdentityCheck, OracleConfig};
use super::partition::one_point_density;
use super::region::Region1D;
use crate::connective::{gamma_flat, vk_quadrature_1d, Convention, Points, Vk1dConfig};
use crate::constants::{temperedness_constants, RadialQuadratureConfig, TemperednessConstants};
use crate::error::{Error, Result};
use crate::potentials::{PairPotential, ThermoState};
use crate::quadrature::{integrate_adaptive, AdaptiveConfig};
use crate::threshold::{m_max, solve_optimizer, OptimizerSolution};

pub const MAX_TREE_DEPTH: usize = 2;

pub type PathFn = Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync>;

/// A depth-`k` boundary condition `τ(v₀,…,v_k)` with a declared bound.
#[derive(Clone)]
pub struct BoundaryConditionFn {
    f: PathFn,
    bound: f64,
}

impl std::fmt::Debug for BoundaryConditionFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BoundaryConditionFn {{ bound: {} }}", self.bound)
    }
}

impl BoundaryConditionFn {
    pub fn new(bound: f64, f: impl Fn(&[f64]) -> Complex64 + Send + Sync + 'static) -> Self {
        Self { f: Arc::new(f), bound }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(c.norm(), move |_| c)
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn eval(&self, path: &[f64]) -> Result<Complex64> {
        let v = (self.f)(path);
        if v.norm() > self.bound * (1.0 + 1e-12) || !v.norm().is_finite() {
            return Err(Error::BoundaryBound { bound: self.bound, value: v.norm() });
        }
        Ok(v)
    }
}

struct Tree<'a> {
    a: &'a ActivityField,
    inter: &'a Interaction,
    tau: &'a BoundaryConditionFn,
    k: usize,
    range: f64,
    tail_breaks: Vec<f64>,
    cfg: AdaptiveConfig,
    slot: ErrorSlot,
}

impl Tree<'_> {
    /// `γ(v₀,…,v_{j−1}, w)`.
    fn gamma(&self, path: &[f64], w: f64) -> f64 {
        if !path.iter().all(|&v| self.a.support().contains(v)) {
            return 0.0;
        }
        gamma_flat(Points::new(path, 1), &[w], &self.inter.potential, self.inter.thermo)
    }

    fn pi(&self, path: &mut Vec<f64>) -> Complex64 {
        let zero = Complex64::new(0.0, 0.0);
        let j = path.len();
        if j == self.k + 1 {
            return self.slot.take(self.tau.eval(path), zero);
        }
        let last = path[j - 1];
        let lam = self.a.eval(last);
        if lam == zero {
            return zero;
        }
        let g = self.gamma(path, last);
        if g == 0.0 {
            return zero;
        }
        let r = self.inter.core_radius();
        let mut breaks = vec![last - self.range, last + self.range];
        for &b in &self.tail_breaks {
            breaks.extend([last - b, last + b]);
        }
        for (i, &vi) in path.iter().enumerate() {
            breaks.extend([vi - r, vi + r]);
            if let Some(&next) = path.get(i + 1) {
                let d = (next - vi).abs();
                breaks.extend([vi - d, vi + d]);
                for &b in &self.tail_breaks {
                    breaks.extend([vi - b, vi + b]);
                }
            }
        }
        breaks.extend(self.a.features());
        breaks.retain(|&x| x >= last - self.range && x <= last + self.range);
        let level = j as i32 - 1;
        let cfg = AdaptiveConfig { rel_tol: (self.cfg.rel_tol * 0.01f64.powi(level)).max(1e-13), ..self.cfg };
        let est = integrate_adaptive(
            |w: f64| {
                let m = self.inter.mayer(last - w);
                if m == 0.0 {
                    return zero;
                }
                path.push(w);
                let v = self.pi(path);
                path.pop();
                v * m
            },
            &breaks,
            &cfg,
        );
        lam * g * (-est.value).exp()
    }
}

/// `π_{λ^m,τ,γ}(v₀)` for `k ∈ {1, 2}` by nested adaptive quadrature.
pub fn tree_recursion_eval(a: &ActivityField, tau: &BoundaryConditionFn, k: usize, v0: f64, cfg: &OracleConfig) -> Result<Complex64> {
    if !(1..=MAX_TREE_DEPTH).contains(&k) {
        return Err(Error::Depth { depth: k, min: 1, max: MAX_TREE_DEPTH });
    }
    let inter = a.interaction().as_ref();
    let tree = Tree {
        a,
        inter,
        tau,
        k,
        range: inter.range(),
        tail_breaks: inter.potential.breakpoints(),
        cfg: cfg.outer,
        slot: ErrorSlot::new(),
    };
    let v = tree.pi(&mut vec![v0]);
    tree.slot.check()?;
    Ok(v)
}

/// `ρ_{λ^m}(v₀)` against the tree recursion whose boundary condition is the
/// exact density of the path-modulated activity.
pub fn check_density_correspondence(a: &ActivityField, region: &Region1D, k: usize, v0: f64, cfg: &OracleConfig) -> Result<IdentityCheck> {
    let restricted = a.modulate(1.0, &[], region)?;
    let truth = one_point_density(&restricted, region, v0, &cfg.partition)?;
    let field = restricted.clone();
    let region_owned = region.clone();
    let pcfg = cfg.partition;
    let tau = BoundaryConditionFn::new(f64::INFINITY, move |path| {
        let last = *path.last().expect("paths are non-empty");
        field
            .along_path(path)
            .and_then(|m| one_point_density(&m, &region_owned, last, &pcfg))
            .unwrap_or(Complex64::new(f64::NAN, f64::NAN))
    });
    let pi = tree_recursion_eval(&restricted, &tau, k, v0, cfg)?;
    if !pi.norm().is_finite() {
        return Err(Error::ZeroFreeness { location: format!("boundary densities below v₀ = {v0}"), modulus: 0.0 });
    }
    Ok(IdentityCheck::new(truth, pi, 0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModulationBoundReport {
    pub samples: usize,
    /// Largest `|γ·λ^m| / (e^{βC}‖λ‖_∞)` seen.
    pub max_ratio: f64,
    pub holds: bool,
}

/// Samples prefixes and points and checks `|γ(prefix,·)·λ^m(·)| ≤ e^{βC}‖λ‖_∞`.
pub fn check_modulation_bound(a: &ActivityField, samples: usize, seed: u64) -> ModulationBoundReport {
    let inter = a.interaction();
    let r = inter.core_radius();
    let reach = inter.potential.breakpoints().last().copied().unwrap_or(r).max(r) * 1.5;
    let bound = inter.stability_factor() * a.base().sup_norm();
    let center = a.support().hull().map_or(0.0, |(lo, hi)| {
        let (lo, hi) = (lo.max(-10.0), hi.min(10.0));
        if lo <= hi { 0.5 * (lo + hi) } else { 0.0 }
    });
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_ratio: f64 = 0.0;
    let mut holds = true;
    let mut path = Vec::new();
    for _ in 0..samples {
        path.clear();
        path.push(center + rng.random_range(-reach..reach));
        for _ in 0..rng.random_range(0..4usize) {
            let step = if rng.random_bool(0.6) { rng.random_range(r..reach) } else { rng.random_range(0.0..r) };
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            path.push(path[path.len() - 1] + sign * step);
        }
        let w = path[path.len() - 1] + rng.random_range(-reach..reach);
        let g = if path.iter().all(|&v| a.support().contains(v)) {
            gamma_flat(Points::new(&path, 1), &[w], &inter.potential, inter.thermo)
        } else {
            0.0
        };
        let v = (a.eval(w) * g).norm();
        if v > bound + 1e-12 {
            holds = false;
        }
        if bound > 0.0 {
            max_ratio = max_ratio.max(v / bound);
        }
    }
    ModulationBoundReport { samples, max_ratio, holds }
}

/// Everything the self-map and contraction checks need about a potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerSetup {
    pub constants: TemperednessConstants,
    pub optimizer: OptimizerSolution,
    /// `λ̃·e^{−βC}`, so that `γ·λ^m ≤ λ̃` for every modulation.
    pub activity: f64,
    pub m_tilde: f64,
}

impl OptimizerSetup {
    /// Uses `Δ = C_φ`, which is always admissible.
    pub fn new(p: &PairPotential, t: ThermoState) -> Result<Self> {
        let constants = temperedness_constants(p, t, &RadialQuadratureConfig::default())?;
        let optimizer = solve_optimizer(&constants, constants.c_phi)?;
        let activity = optimizer.lambda_tilde * (-t.beta * p.local_stability_unit()).exp();
        let m_tilde = m_max(&constants, optimizer.z_tilde_sq);
        Ok(Self { constants, optimizer, activity, m_tilde })
    }
}

/// Smooth random boundary data `z̃²(c + a·sin θ(path))`, `θ` linear in the path.
#[derive(Debug, Clone, Copy)]
struct Wave {
    omega: [f64; 3],
    phase: f64,
}

impl Wave {
    fn random(rng: &mut ChaCha8Rng) -> Self {
        Self {
            omega: [rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0)],
            phase: rng.random_range(0.0..std::f64::consts::TAU),
        }
    }

    fn boundary(self, scale: f64, c: f64, amp: f64) -> BoundaryConditionFn {
        BoundaryConditionFn::new(scale, move |path| {
            let theta = self.phase + path.iter().zip(self.omega).map(|(x, w)| x * w).sum::<f64>();
            Complex64::new((scale * (c + amp * theta.sin())).clamp(0.0, scale), 0.0)
        })
    }
}

fn random_level(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let c: f64 = rng.random_range(0.0..=1.0);
    let amp = rng.random_range(0.0..=c.min(1.0 - c).max(0.0));
    (c, amp)
}

fn random_field(inter: &Arc<Interaction>, activity: f64, rng: &mut ChaCha8Rng) -> Result<(ActivityField, f64)> {
    let lo = rng.random_range(-3.0..0.0);
    let len = rng.random_range(1.0..4.0);
    let field = ActivityField::constant(inter.clone(), Complex64::new(activity, 0.0)).modulate(1.0, &[], &Region1D::closed(lo, lo + len))?;
    let v0 = rng.random_range(lo..lo + len);
    Ok((field, v0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelfMapReport {
    pub trials: usize,
    pub z_tilde_sq: f64,
    pub min_value: f64,
    pub max_value: f64,
    /// Largest distance by which an output left `[0, z̃²]`.
    pub max_excess: f64,
    pub holds: bool,
}

/// Random real boundary conditions in `[0, z̃²]` at the optimizer; every
/// output must stay in `[0, z̃²]` up to `1e-10`. Depths alternate 1 and 2.
pub fn check_self_map(p: &PairPotential, t: ThermoState, trials: usize, seed: u64, cfg: &OracleConfig) -> Result<SelfMapReport> {
    let setup = OptimizerSetup::new(p, t)?;
    let inter = Interaction::new(p.clone(), t)?;
    let z2 = setup.optimizer.z_tilde_sq;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut lo, mut hi, mut excess) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64);
    for trial in 0..trials {
        let (field, v0) = random_field(&inter, setup.activity, &mut rng)?;
        let (c, amp) = random_level(&mut rng);
        let tau = Wave::random(&mut rng).boundary(z2, c, amp);
        let k = 1 + trial % 2;
        let v = tree_recursion_eval(&field, &tau, k, v0, cfg)?;
        lo = lo.min(v.re);
        hi = hi.max(v.re);
        excess = excess.max(-v.re).max(v.re - z2).max(v.im.abs());
    }
    Ok(SelfMapReport { trials, z_tilde_sq: z2, min_value: lo, max_value: hi, max_excess: excess, holds: excess <= 1e-10 })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContractionReport {
    pub trials: usize,
    pub k: usize,
    pub vk: f64,
    pub m_tilde: f64,
    pub lambda_tilde: f64,
    pub violations: usize,
    /// Largest `lhs − rhs` seen; negative when every trial held strictly.
    pub max_gap: f64,
    /// Largest `lhs / rhs` among trials with `rhs > 0`.
    pub max_ratio: f64,
}

impl ContractionReport {
    pub fn holds(&self) -> bool {
        self.violations == 0
    }
}

/// Random pairs of boundary conditions in `[0, z̃²]` against
/// `|√π₁ − √π₂|² ≤ λ̃^k M(z̃)^k V_k ‖τ₁ − τ₂‖_∞`, with `V_k` from
/// deterministic quadrature in the trailing convention.
pub fn check_contraction_bound(p: &PairPotential, t: ThermoState, k: usize, trials: usize, seed: u64, cfg: &OracleConfig) -> Result<ContractionReport> {
    let setup = OptimizerSetup::new(p, t)?;
    let inter = Interaction::new(p.clone(), t)?;
    let vk = vk_quadrature_1d(p, t, k, Convention::Trailing, &Vk1dConfig::default())?;
    let vk = vk.mean + vk.std_error;
    let z2 = setup.optimizer.z_tilde_sq;
    let factor = (setup.optimizer.lambda_tilde * setup.m_tilde).powi(k as i32) * vk;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut violations, mut max_gap, mut max_ratio) = (0, f64::NEG_INFINITY, 0.0f64);
    for trial in 0..trials {
        let (field, v0) = random_field(&inter, setup.activity, &mut rng)?;
        let wave = Wave::random(&mut rng);
        let (c1, a1) = random_level(&mut rng);
        let (c2, a2) = if trial % 10 == 0 { (c1, a1) } else { random_level(&mut rng) };
        let sup = z2 * ((c1 - c2).abs() + (a1 - a2).abs());
        let p1 = tree_recursion_eval(&field, &wave.boundary(z2, c1, a1), k, v0, cfg)?;
        let p2 = tree_recursion_eval(&field, &wave.boundary(z2, c2, a2), k, v0, cfg)?;
        for p in [p1, p2] {
            if p.im != 0.0 || p.re < -1e-14 {
                return Err(Error::InvalidParameter(format!("square root of a non-real or negative value {p}")));
            }
        }
        let lhs = (p1.re.max(0.0).sqrt() - p2.re.max(0.0).sqrt()).powi(2);
        let rhs = factor * sup;
        if lhs > rhs + 1e-10 {
            violations += 1;
        }
        max_gap = max_gap.max(lhs - rhs);
        if rhs > 0.0 {
            max_ratio = max_ratio.max(lhs / rhs);
        }
    }
    Ok(ContractionReport { trials, k, vk, m_tilde: setup.m_tilde, lambda_tilde: setup.optimizer.lambda_tilde, violations, max_gap, max_ratio })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::LN_2;

    fn rod() -> (PairPotential, ThermoState) {
        (PairPotential::hard_sphere(1, 1.0).unwrap(), ThermoState::new(1.0).unwrap())
    }

    fn well() -> (PairPotential, ThermoState) {
        (PairPotential::square_well(1, 1.0, 1.5, 1.0).unwrap(), ThermoState::new(LN_2).unwrap())
    }

    fn field(p: (PairPotential, ThermoState), lam: Complex64) -> ActivityField {
        ActivityField::constant(Interaction::new(p.0, p.1).unwrap(), lam)
    }

    #[test]
    fn zero_boundary_returns_the_activity() {
        let a = field(well(), Complex64::new(0.3, 0.1));
        let v = tree_recursion_eval(&a, &BoundaryConditionFn::constant(Complex64::new(0.0, 0.0)), 1, 0.4, &OracleConfig::default()).unwrap();
        assert_eq!(v, a.eval(0.4));
    }

    #[test]
    fn constant_boundary_hard_rod_depth_one() {
        // π(v₀) = λ·exp(−∫_{|w|<1} τ) = λ e^{−2τ}.
        let a = field(rod(), Complex64::new(0.5, 0.0));
        let v = tree_recursion_eval(&a, &BoundaryConditionFn::constant(Complex64::new(0.3, 0.0)), 1, 0.0, &OracleConfig::default()).unwrap();
        assert_relative_eq!(v.re, 0.5 * (-0.6f64).exp(), max_relative = 1e-12);
    }

    #[test]
    fn depth_is_limited() {
        let a = field(rod(), Complex64::new(0.5, 0.0));
        let tau = BoundaryConditionFn::constant(Complex64::new(0.0, 0.0));
        assert!(matches!(tree_recursion_eval(&a, &tau, 3, 0.0, &OracleConfig::default()), Err(Error::Depth { .. })));
        assert!(tree_recursion_eval(&a, &tau, 0, 0.0, &OracleConfig::default()).is_err());
    }

    #[test]
    fn boundary_bound_is_enforced() {
        let a = field(rod(), Complex64::new(0.5, 0.0));
        let tau = BoundaryConditionFn::new(0.1, |_| Complex64::new(0.2, 0.0));
        assert!(matches!(tree_recursion_eval(&a, &tau, 1, 0.0, &OracleConfig::default()), Err(Error::BoundaryBound { .. })));
    }

    #[test]
    fn correspondence_depth_one() {
        let a = field(rod(), Complex64::new(0.2, 0.0));
        let c = check_density_correspondence(&a, &Region1D::closed(0.0, 1.5), 1, 0.4, &OracleConfig::default()).unwrap();
        assert!(c.residual <= 1e-5, "{c:?}");
        let a = field(rod(), Complex64::new(0.2, 0.0)).modulate(0.0, &[], &Region1D::line()).unwrap();
        let c = check_density_correspondence(&a, &Region1D::closed(0.0, 1.5), 1, 0.4, &OracleConfig::default()).unwrap();
        assert_eq!(c.residual, 0.0);
    }

    #[test]
    fn modulation_bound_holds() {
        assert!(check_modulation_bound(&field(rod(), Complex64::new(0.7, 0.0)), 2000, 1).holds);
        let r = check_modulation_bound(&field(well(), Complex64::new(0.7, 0.0)), 5000, 2);
        assert!(r.holds && r.max_ratio > 0.4, "{r:?}");
    }

    #[test]
    fn self_map_few_trials() {
        let (p, t) = well();
        let r = check_self_map(&p, t, 6, 3, &OracleConfig::with_tolerance(1e-8)).unwrap();
        assert!(r.holds, "{r:?}");
    }

    #[test]
    fn contraction_few_trials() {
        let (p, t) = rod();
        let r = check_contraction_bound(&p, t, 1, 20, 5, &OracleConfig::with_tolerance(1e-9)).unwrap();
        assert!(r.holds(), "{r:?}");
    }
}
