//! Activity functions on the line and their modulations.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use super::region::Region1D;
use crate::connective::{classify_sequence, SequenceClass};
use crate::error::{Error, Result};
use crate::potentials::{PairPotential, ThermoState};

/// A one-dimensional hard-core potential at a fixed inverse temperature.
#[derive(Debug, Clone)]
pub struct Interaction {
    pub potential: PairPotential,
    pub thermo: ThermoState,
}

impl Interaction {
    pub fn new(potential: PairPotential, thermo: ThermoState) -> Result<Arc<Self>> {
        if potential.dimension() != 1 {
            return Err(Error::Dimension { expected: 1, found: potential.dimension() });
        }
        Ok(Arc::new(Self { potential, thermo }))
    }

    pub fn core_radius(&self) -> f64 {
        self.potential.core_radius()
    }

    /// `e^{−βφ(x)}` for a signed separation `x`.
    pub fn boltzmann(&self, x: f64) -> f64 {
        self.potential.boltzmann(self.thermo, x.abs())
    }

    /// `1 − e^{−βφ(x)}` for a signed separation `x`.
    pub fn mayer(&self, x: f64) -> f64 {
        self.potential.mayer(self.thermo, x.abs())
    }

    /// `e^{βC}`, the local-stability factor bounding every modulation.
    pub fn stability_factor(&self) -> f64 {
        (self.thermo.beta * self.potential.local_stability_unit()).exp()
    }

    /// Radius beyond which the Mayer function is negligible.
    pub fn range(&self) -> f64 {
        self.potential.truncation_radius(self.thermo, 1e-13)
    }
}

pub type BaseFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// The unmodulated activity `λ`.
#[derive(Clone)]
pub enum Base {
    Constant(Complex64),
    /// Position-dependent activity with a declared bound on `|λ|`.
    Function { f: BaseFn, bound: f64 },
}

impl Base {
    pub fn eval(&self, y: f64) -> Complex64 {
        match self {
            Base::Constant(c) => *c,
            Base::Function { f, .. } => f(y),
        }
    }

    /// `‖λ‖_∞`, exact for constants and declared otherwise.
    pub fn sup_norm(&self) -> f64 {
        match self {
            Base::Constant(c) => c.norm(),
            Base::Function { bound, .. } => *bound,
        }
    }

    pub fn is_real_nonnegative(&self) -> bool {
        matches!(self, Base::Constant(c) if c.im == 0.0 && c.re >= 0.0)
    }
}

impl fmt::Debug for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Base::Constant(c) => write!(f, "Constant({c})"),
            Base::Function { bound, .. } => write!(f, "Function {{ bound: {bound} }}"),
        }
    }
}

/// One Boltzmann-type factor `1 + (e^{−βφ(x − ·)} − 1)·1_{B_t(x)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Factor {
    pub center: f64,
    /// `t ∈ [R, ∞]`.
    pub radius: f64,
}

/// A modulation `α·1_A·∏ᵢ[1 + (e^{−βφ(xᵢ−·)} − 1)1_{B_{tᵢ}(xᵢ)}]·λ`.
#[derive(Debug, Clone)]
pub struct ActivityField {
    interaction: Arc<Interaction>,
    base: Base,
    alpha: f64,
    support: Region1D,
    factors: Vec<Factor>,
}

impl ActivityField {
    /// The unmodulated activity itself: `α = 1`, `A = ℝ`, no factors.
    pub fn new(interaction: Arc<Interaction>, base: Base) -> Self {
        Self { interaction, base, alpha: 1.0, support: Region1D::line(), factors: Vec::new() }
    }

    pub fn constant(interaction: Arc<Interaction>, lambda: Complex64) -> Self {
        Self::new(interaction, Base::Constant(lambda))
    }

    /// Builds an arbitrary modulation and checks its invariants.
    pub fn with_parts(interaction: Arc<Interaction>, base: Base, alpha: f64, support: Region1D, factors: Vec<Factor>) -> Result<Self> {
        let a = Self { interaction, base, alpha, support, factors };
        a.validate()?;
        Ok(a)
    }

    pub fn interaction(&self) -> &Arc<Interaction> {
        &self.interaction
    }

    pub fn base(&self) -> &Base {
        &self.base
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn support(&self) -> &Region1D {
        &self.support
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn is_zero(&self) -> bool {
        self.alpha == 0.0 || self.support.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        let r = self.interaction.core_radius();
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidActivity(format!("scale α = {} is outside [0, 1]", self.alpha)));
        }
        for (i, f) in self.factors.iter().enumerate() {
            if !f.center.is_finite() || f.radius.is_nan() || f.radius < r {
                return Err(Error::InvalidActivity(format!(
                    "factor at {} has radius {} below the core radius {r}",
                    f.center, f.radius
                )));
            }
            for g in &self.factors[i + 1..] {
                if (f.center - g.center).abs() < r {
                    return Err(Error::InvalidActivity(format!(
                        "factor centers {} and {} are closer than the core radius {r}",
                        f.center, g.center
                    )));
                }
            }
            if self.support.meets_open_ball(f.center, r) {
                return Err(Error::InvalidActivity(format!(
                    "support meets the core around the factor center {}",
                    f.center
                )));
            }
        }
        Ok(())
    }

    /// `λ^m(y)`.
    pub fn eval(&self, y: f64) -> Complex64 {
        if self.alpha == 0.0 || !self.support.contains(y) {
            return Complex64::new(0.0, 0.0);
        }
        self.base.eval(y) * (self.alpha * self.factor_product(y))
    }

    fn factor_product(&self, y: f64) -> f64 {
        let mut m = 1.0;
        for f in &self.factors {
            let d = (y - f.center).abs();
            if d < f.radius {
                m *= self.interaction.boltzmann(d);
            }
        }
        m
    }

    /// Points where `λ^m` may fail to be smooth.
    pub fn features(&self) -> Vec<f64> {
        let mut out = self.support.endpoints();
        let breaks = self.interaction.potential.breakpoints();
        for f in &self.factors {
            if f.radius.is_finite() {
                out.extend([f.center - f.radius, f.center + f.radius]);
            }
            for &b in &breaks {
                if b <= f.radius {
                    out.extend([f.center - b, f.center + b]);
                }
            }
        }
        out
    }

    /// Composes a further modulation: scale `α'`, extra factors, and a
    /// further restriction of the support.
    pub fn modulate(&self, alpha: f64, factors: &[Factor], region: &Region1D) -> Result<Self> {
        let mut out = self.clone();
        out.alpha *= alpha;
        out.support = out.support.intersect(region);
        out.factors.extend_from_slice(factors);
        out.validate()?;
        Ok(out)
    }

    /// Multiplies by `e^{−βφ(v − ·)}`, i.e. a factor at `v` with `t = ∞` and
    /// the core around `v` removed from the support.
    pub fn with_particle_at(&self, v: f64) -> Result<Self> {
        let r = self.interaction.core_radius();
        self.modulate(1.0, &[Factor { center: v, radius: f64::INFINITY }], &Region1D::ball_complement(v, r))
    }

    /// `λ_{v→w}`: below the core the ball `B_{d(v,w)}(v)` is removed, otherwise
    /// the core is removed and a factor `(v, d(v,w))` is added.
    pub fn towards(&self, v: f64, w: f64) -> Result<Self> {
        let r = self.interaction.core_radius();
        let d = (v - w).abs();
        if d < r {
            self.modulate(1.0, &[], &Region1D::ball_complement_through(v, w))
        } else {
            self.modulate(1.0, &[Factor { center: v, radius: d }], &Region1D::ball_complement(v, r))
        }
    }

    /// `γ(v₀,…,v_j, ·)·λ^m(·)` with `γ = 1_{{v₀..v_j} ⊆ A}·γ_c`. A bad
    /// sequence or a point outside `A` gives the zero field.
    pub fn along_path(&self, path: &[f64]) -> Result<Self> {
        let r = self.interaction.core_radius();
        let zero = || {
            let mut z = self.clone();
            z.alpha = 0.0;
            z.support = Region1D::empty();
            z
        };
        if !path.iter().all(|&v| self.support.contains(v)) {
            return Ok(zero());
        }
        let pts: Vec<Vec<f64>> = path.iter().map(|&v| vec![v]).collect();
        let SequenceClass::Good(good) = classify_sequence(&pts, r) else {
            return Ok(zero());
        };
        let mut region = Region1D::line();
        let mut factors = Vec::new();
        for i in 0..path.len().saturating_sub(1) {
            let d = (path[i] - path[i + 1]).abs();
            if good.contains(&i) {
                region = region.without_ball(path[i], r);
                factors.push(Factor { center: path[i], radius: d });
            } else {
                region = region.intersect(&Region1D::ball_complement_through(path[i], path[i + 1]));
            }
        }
        self.modulate(1.0, &factors, &region)
    }
}

/// `Σ_{i<j} βφ(xᵢ − xⱼ)`, `+∞` when two points overlap a core.
pub fn potential_energy(points: &[f64], p: &PairPotential, t: ThermoState) -> f64 {
    let mut u = 0.0;
    for (i, &x) in points.iter().enumerate() {
        for &y in &points[i + 1..] {
            let r = (x - y).abs();
            if r < p.core_radius() {
                return f64::INFINITY;
            }
            u += t.beta * p.tail_value(r);
        }
    }
    u
}
