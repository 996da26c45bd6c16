//! Radially symmetric hard-core pair potentials.
//!
//! A potential is `+∞` inside the core radius `R` and follows a piecewise
//! analytic (or tabulated) tail for `r ≥ R`. All energies are in units where
//! the inverse temperature lives in [`ThermoState`]; the effective potential
//! seen by the statistical mechanics is `βφ`.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Inverse temperature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermoState {
    pub beta: f64,
}

impl ThermoState {
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidParameter(format!("beta must be positive and finite, got {beta}")));
        }
        Ok(Self { beta })
    }
}

/// Analytic form of one tail piece.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TailShape {
    /// `φ(r) = value`
    Constant(f64),
    /// `φ(r) = amplitude · e^{-rate·r}`
    Exponential { amplitude: f64, rate: f64 },
    /// `φ(r) = amplitude · r^{-exponent}`
    PowerLaw { amplitude: f64, exponent: f64 },
}

impl TailShape {
    fn value(&self, r: f64) -> f64 {
        match *self {
            TailShape::Constant(c) => c,
            TailShape::Exponential { amplitude, rate } => amplitude * (-rate * r).exp(),
            TailShape::PowerLaw { amplitude, exponent } => amplitude * r.powf(-exponent),
        }
    }

    fn sign(&self) -> f64 {
        match *self {
            TailShape::Constant(c) => c.signum() * (c != 0.0) as u8 as f64,
            TailShape::Exponential { amplitude, .. } | TailShape::PowerLaw { amplitude, .. } => {
                amplitude.signum() * (amplitude != 0.0) as u8 as f64
            }
        }
    }
}

/// A tail piece active on `[start, end)`; `end` may be `+∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailPiece {
    pub start: f64,
    pub end: f64,
    pub shape: TailShape,
}

/// The potential for `r ≥ R`. Outside every piece the tail is zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Tail {
    Pieces(Vec<TailPiece>),
    /// Linear interpolation through `(r, φ)` nodes; zero beyond the last node
    /// and equal to the first value between `R` and the first node.
    Tabulated { r: Vec<f64>, phi: Vec<f64> },
}

/// Hard-core pair potential in `d` dimensions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairPotential {
    dimension: usize,
    core_radius: f64,
    tail: Tail,
    local_stability_unit: f64,
    label: String,
}

impl fmt::Display for PairPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (d={}, R={})", self.label, self.dimension, self.core_radius)
    }
}

/// Volume of the unit ball in `d` dimensions.
pub fn unit_ball_volume(d: usize) -> f64 {
    use std::f64::consts::PI;
    match d {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * PI / d as f64 * unit_ball_volume(d - 2),
    }
}

/// Surface area of the unit sphere `S^{d-1}`.
pub fn unit_sphere_area(d: usize) -> f64 {
    d as f64 * unit_ball_volume(d)
}

/// `∫_x^∞ r^{d-1} e^{-r} dr` for integer `d ≥ 1`.
fn upper_gamma_int(d: usize, x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..d {
        term *= x / k as f64;
        sum += term;
    }
    let fact: f64 = (1..d).map(|k| k as f64).product();
    fact * (-x).exp() * sum
}

impl PairPotential {
    /// Validates and builds a potential. A purely repulsive tail forces the
    /// local stability unit to zero.
    pub fn new(dimension: usize, core_radius: f64, tail: Tail, local_stability_unit: f64, label: impl Into<String>) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidPotential("dimension must be positive".into()));
        }
        if !(core_radius > 0.0 && core_radius.is_finite()) {
            return Err(Error::InvalidPotential(format!("core radius must be positive, got {core_radius}")));
        }
        if !(local_stability_unit >= 0.0 && local_stability_unit.is_finite()) {
            return Err(Error::InvalidPotential(format!(
                "local stability unit must be finite and non-negative, got {local_stability_unit}"
            )));
        }
        match &tail {
            Tail::Pieces(pieces) => {
                let mut last_end = core_radius;
                for (i, p) in pieces.iter().enumerate() {
                    if !(p.start >= core_radius && p.end > p.start) || p.start.is_nan() {
                        return Err(Error::InvalidPotential(format!("tail piece {i} has an invalid range [{}, {})", p.start, p.end)));
                    }
                    if p.start < last_end && i > 0 {
                        return Err(Error::InvalidPotential(format!("tail piece {i} overlaps the previous piece")));
                    }
                    if p.end.is_infinite() && i + 1 != pieces.len() {
                        return Err(Error::InvalidPotential("only the last tail piece may be unbounded".into()));
                    }
                    let finite = match p.shape {
                        TailShape::Constant(c) => c.is_finite(),
                        TailShape::Exponential { amplitude, rate } => amplitude.is_finite() && rate.is_finite(),
                        TailShape::PowerLaw { amplitude, exponent } => amplitude.is_finite() && exponent.is_finite(),
                    };
                    if !finite {
                        return Err(Error::InvalidPotential(format!("tail piece {i} has non-finite parameters")));
                    }
                    if p.end.is_infinite() {
                        let integrable = match p.shape {
                            TailShape::Constant(c) => c == 0.0,
                            TailShape::Exponential { amplitude, rate } => amplitude == 0.0 || rate > 0.0,
                            TailShape::PowerLaw { amplitude, exponent } => amplitude == 0.0 || exponent > dimension as f64,
                        };
                        if !integrable {
                            return Err(Error::InvalidPotential(format!(
                                "unbounded tail piece {i} is not integrable in {dimension} dimensions"
                            )));
                        }
                    }
                    last_end = p.end;
                }
            }
            Tail::Tabulated { r, phi } => {
                if r.len() != phi.len() || r.len() < 2 {
                    return Err(Error::InvalidPotential("table needs at least two (r, φ) rows".into()));
                }
                if r[0] < core_radius {
                    return Err(Error::InvalidPotential(format!("table starts at r={} inside the core radius {core_radius}", r[0])));
                }
                if r.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::InvalidPotential("table radii must be strictly increasing".into()));
                }
                if phi.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidPotential("table values must be finite".into()));
                }
            }
        }
        let mut pot = Self {
            dimension,
            core_radius,
            tail,
            local_stability_unit,
            label: label.into(),
        };
        if pot.is_repulsive() {
            pot.local_stability_unit = 0.0;
        } else {
            // A single neighbour at the deepest point already costs -min φ.
            let depth = -pot.tail_minimum();
            if local_stability_unit + 1e-12 * depth.abs() < depth {
                return Err(Error::InvalidPotential(format!(
                    "local stability unit {local_stability_unit} is below the well depth {depth}"
                )));
            }
        }
        Ok(pot)
    }

    /// Pure hard spheres (hard rods for `d = 1`).
    pub fn hard_sphere(dimension: usize, core_radius: f64) -> Result<Self> {
        Self::new(dimension, core_radius, Tail::Pieces(Vec::new()), 0.0, "hard_sphere")
    }

    /// Square well of depth `depth` on `[R, L)`.
    ///
    /// The local stability unit is `2ε⌈(L−R)/R⌉` in one dimension (hard-core
    /// packing allows `⌈(L−R)/R⌉` well neighbours per side) and the
    /// ball-packing count `ε(((2L+R)/R)^d − 1)` otherwise.
    pub fn square_well(dimension: usize, core_radius: f64, well_range: f64, depth: f64) -> Result<Self> {
        if !(core_radius > 0.0) {
            return Err(Error::InvalidPotential(format!("core radius must be positive, got {core_radius}")));
        }
        if !(well_range > core_radius) || !well_range.is_finite() {
            return Err(Error::InvalidPotential(format!(
                "well range {well_range} must exceed the core radius {core_radius}"
            )));
        }
        if !depth.is_finite() {
            return Err(Error::InvalidPotential("well depth must be finite".into()));
        }
        let neighbours = if dimension == 1 {
            2.0 * ((well_range - core_radius) / core_radius).ceil()
        } else {
            (((2.0 * well_range + core_radius) / core_radius).powi(dimension as i32) - 1.0).floor()
        };
        let unit = depth.max(0.0) * neighbours;
        let tail = Tail::Pieces(vec![TailPiece {
            start: core_radius,
            end: well_range,
            shape: TailShape::Constant(-depth),
        }]);
        Self::new(dimension, core_radius, tail, unit, "square_well")
    }

    /// One-dimensional hard rods with a Kac tail `φ(r) = −αγ e^{−γr}/2`.
    ///
    /// Neighbours sit at least `R, 2R, …` away on each side, so the
    /// geometric series gives `C₀ = αγ e^{−γR} / (1 − e^{−γR})`.
    pub fn kac_exponential(core_radius: f64, alpha: f64, gamma: f64) -> Result<Self> {
        if !(alpha > 0.0 && gamma > 0.0) || !alpha.is_finite() || !gamma.is_finite() {
            return Err(Error::InvalidPotential(format!("Kac parameters must be positive, got α={alpha}, γ={gamma}")));
        }
        if !(core_radius > 0.0) {
            return Err(Error::InvalidPotential(format!("core radius must be positive, got {core_radius}")));
        }
        let q = (-gamma * core_radius).exp();
        let unit = alpha * gamma * q / (1.0 - q);
        let tail = Tail::Pieces(vec![TailPiece {
            start: core_radius,
            end: f64::INFINITY,
            shape: TailShape::Exponential { amplitude: -0.5 * alpha * gamma, rate: gamma },
        }]);
        Self::new(1, core_radius, tail, unit, "kac_exponential")
    }

    /// Tabulated tail; the caller supplies a valid local stability unit.
    pub fn tabulated(dimension: usize, core_radius: f64, r: Vec<f64>, phi: Vec<f64>, local_stability_unit: f64) -> Result<Self> {
        Self::new(dimension, core_radius, Tail::Tabulated { r, phi }, local_stability_unit, "tabulated")
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn core_radius(&self) -> f64 {
        self.core_radius
    }

    pub fn tail(&self) -> &Tail {
        &self.tail
    }

    pub fn local_stability_unit(&self) -> f64 {
        self.local_stability_unit
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Tail value for `r ≥ R`.
    pub fn tail_value(&self, r: f64) -> f64 {
        match &self.tail {
            Tail::Pieces(pieces) => pieces
                .iter()
                .find(|p| r >= p.start && r < p.end)
                .map_or(0.0, |p| p.shape.value(r)),
            Tail::Tabulated { r: rs, phi } => {
                let n = rs.len();
                if r > rs[n - 1] {
                    0.0
                } else if r <= rs[0] {
                    phi[0]
                } else {
                    let i = rs.partition_point(|&x| x <= r).min(n - 1);
                    let (r0, r1) = (rs[i - 1], rs[i]);
                    let s = (r - r0) / (r1 - r0);
                    phi[i - 1] + s * (phi[i] - phi[i - 1])
                }
            }
        }
    }

    /// `φ(r)`: `+∞` inside the core, the tail outside.
    pub fn evaluate(&self, r: f64) -> f64 {
        if r < self.core_radius {
            f64::INFINITY
        } else {
            self.tail_value(r)
        }
    }

    /// `e^{−βφ(r)}`, exactly zero inside the core.
    pub fn boltzmann(&self, t: ThermoState, r: f64) -> f64 {
        if r < self.core_radius {
            0.0
        } else {
            (-t.beta * self.tail_value(r)).exp()
        }
    }

    /// Signed Mayer function `1 − e^{−βφ(r)}`.
    pub fn mayer(&self, t: ThermoState, r: f64) -> f64 {
        if r < self.core_radius {
            1.0
        } else {
            -(-t.beta * self.tail_value(r)).exp_m1()
        }
    }

    /// `|1 − e^{−βφ(r)}|`.
    pub fn mayer_abs(&self, t: ThermoState, r: f64) -> f64 {
        self.mayer(t, r).abs()
    }

    /// True when `φ ≥ 0` everywhere.
    pub fn is_repulsive(&self) -> bool {
        match &self.tail {
            Tail::Pieces(pieces) => pieces.iter().all(|p| p.shape.sign() >= 0.0),
            Tail::Tabulated { phi, .. } => phi.iter().all(|&v| v >= 0.0),
        }
    }

    fn tail_minimum(&self) -> f64 {
        match &self.tail {
            Tail::Pieces(pieces) => pieces
                .iter()
                .map(|p| {
                    let ends = [p.start, if p.end.is_finite() { p.end } else { p.start }];
                    ends.iter().map(|&r| p.shape.value(r)).fold(f64::INFINITY, f64::min)
                })
                .fold(0.0, f64::min),
            Tail::Tabulated { phi, .. } => phi.iter().copied().fold(0.0, f64::min),
        }
    }

    /// Radii `≥ R` where the tail is not smooth: piece ends, table nodes and
    /// sign changes. Always contains `R`; never contains `+∞`.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut pts = vec![self.core_radius];
        match &self.tail {
            Tail::Pieces(pieces) => {
                for p in pieces {
                    pts.push(p.start);
                    if p.end.is_finite() {
                        pts.push(p.end);
                    }
                }
            }
            Tail::Tabulated { r, phi } => {
                pts.extend(r.iter().copied());
                for i in 1..r.len() {
                    if phi[i - 1] * phi[i] < 0.0 {
                        pts.push(r[i - 1] + (r[i] - r[i - 1]) * phi[i - 1] / (phi[i - 1] - phi[i]));
                    }
                }
            }
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * b.abs().max(1.0));
        pts
    }

    /// Largest finite radius at which the tail can be non-zero, or `None`
    /// when the last piece is unbounded.
    pub fn finite_support(&self) -> Option<f64> {
        match &self.tail {
            Tail::Pieces(pieces) => match pieces.last() {
                None => Some(self.core_radius),
                Some(p) if p.end.is_infinite() => {
                    if p.shape.sign() == 0.0 {
                        Some(p.start)
                    } else {
                        None
                    }
                }
                Some(p) => Some(p.end),
            },
            Tail::Tabulated { r, .. } => Some(*r.last().expect("table is non-empty")),
        }
    }

    /// Upper bound on `∫_{|w| ≥ r} |1 − e^{−βφ(w)}| dw` for `r` beyond every
    /// breakpoint. Uses `|1 − e^{−x}| ≤ |x| e^{|x|}` and monotone decay of the
    /// unbounded piece.
    pub fn tail_mass_bound(&self, t: ThermoState, r: f64) -> f64 {
        let d = self.dimension;
        if let Some(end) = self.finite_support() {
            return if r >= end { 0.0 } else { f64::INFINITY };
        }
        let Tail::Pieces(pieces) = &self.tail else {
            unreachable!("tabulated tails have finite support")
        };
        let piece = pieces.last().expect("unbounded tail has a piece");
        if r < piece.start {
            return f64::INFINITY;
        }
        let scale = (t.beta * piece.shape.value(r).abs()).exp() * t.beta * unit_sphere_area(d);
        match piece.shape {
            TailShape::Exponential { amplitude, rate } => {
                scale * amplitude.abs() * upper_gamma_int(d, rate * r) / rate.powi(d as i32)
            }
            TailShape::PowerLaw { amplitude, exponent } => {
                scale * amplitude.abs() * r.powf(d as f64 - exponent) / (exponent - d as f64)
            }
            TailShape::Constant(_) => 0.0,
        }
    }

    /// Truncation radius `R_max` beyond which the Mayer tail mass is below
    /// `rel · ω_d R^d` (a lower bound on the full integral).
    pub fn truncation_radius(&self, t: ThermoState, rel: f64) -> f64 {
        if let Some(end) = self.finite_support() {
            return end.max(self.core_radius);
        }
        let floor = rel * unit_ball_volume(self.dimension) * self.core_radius.powi(self.dimension as i32);
        let start = *self.breakpoints().last().expect("breakpoints contain R");
        let mut r = start.max(self.core_radius);
        let mut step = self.core_radius;
        while self.tail_mass_bound(t, r) > floor {
            r += step;
            step *= 1.25;
            if r > 1e12 {
                break;
            }
        }
        r
    }
}

/// Parsed `key = value` potential description.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PotentialConfig {
    pub kind: String,
    pub dimension: Option<usize>,
    pub core_radius: Option<f64>,
    pub well_range: Option<f64>,
    pub well_depth: Option<f64>,
    pub kac_alpha: Option<f64>,
    pub kac_gamma: Option<f64>,
    pub table_file: Option<String>,
    pub local_stability_unit: Option<f64>,
    pub label: Option<String>,
}

impl PotentialConfig {
    /// Parses `key = value` lines; `#` starts a comment and values may be
    /// quoted.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = PotentialConfig::default();
        let mut kind = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() || line.starts_with('[') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
            let key = key.trim();
            let value = value.trim().trim_matches('"').trim_matches('\'').trim();
            let num = |v: &str| -> Result<f64> {
                v.parse::<f64>()
                    .map_err(|_| Error::Config(format!("line {}: `{key}` expects a number, got `{v}`", lineno + 1)))
            };
            match key {
                "kind" => kind = Some(value.to_string()),
                "dimension" => {
                    cfg.dimension = Some(value.parse().map_err(|_| {
                        Error::Config(format!("line {}: `dimension` expects a positive integer", lineno + 1))
                    })?)
                }
                "core_radius" => cfg.core_radius = Some(num(value)?),
                "well_range" => cfg.well_range = Some(num(value)?),
                "well_depth" => cfg.well_depth = Some(num(value)?),
                "kac_alpha" => cfg.kac_alpha = Some(num(value)?),
                "kac_gamma" => cfg.kac_gamma = Some(num(value)?),
                "table_file" => cfg.table_file = Some(value.to_string()),
                "local_stability_unit" => cfg.local_stability_unit = Some(num(value)?),
                "label" => cfg.label = Some(value.to_string()),
                other => return Err(Error::Config(format!("line {}: unknown key `{other}`", lineno + 1))),
            }
        }
        cfg.kind = kind.ok_or_else(|| Error::Config("missing `kind`".into()))?;
        Ok(cfg)
    }

    /// Builds the potential; `base_dir` resolves a relative `table_file`.
    pub fn build(&self, base_dir: Option<&Path>) -> Result<PairPotential> {
        let need = |v: Option<f64>, name: &str| v.ok_or_else(|| Error::Config(format!("`{}` requires `{name}`", self.kind)));
        let dim = self.dimension.unwrap_or(1);
        let radius = need(self.core_radius, "core_radius")?;
        let pot = match self.kind.as_str() {
            "hard_sphere" | "hard_rod" | "hard_core" => PairPotential::hard_sphere(dim, radius)?,
            "square_well" => PairPotential::square_well(
                dim,
                radius,
                need(self.well_range, "well_range")?,
                need(self.well_depth, "well_depth")?,
            )?,
            "kac_exponential" | "kac" => {
                if dim != 1 {
                    return Err(Error::Config("kac_exponential is one-dimensional".into()));
                }
                PairPotential::kac_exponential(radius, need(self.kac_alpha, "kac_alpha")?, need(self.kac_gamma, "kac_gamma")?)?
            }
            "tabulated" => {
                let file = self
                    .table_file
                    .as_ref()
                    .ok_or_else(|| Error::Config("`tabulated` requires `table_file`".into()))?;
                let path = match base_dir {
                    Some(dir) if Path::new(file).is_relative() => dir.join(file),
                    _ => Path::new(file).to_path_buf(),
                };
                let text = std::fs::read_to_string(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
                let (r, phi) = parse_table(&text)?;
                let unit = self.local_stability_unit;
                let attractive = phi.iter().any(|&v| v < 0.0);
                if attractive && unit.is_none() {
                    return Err(Error::Config("tabulated attractive tails require `local_stability_unit`".into()));
                }
                PairPotential::tabulated(dim, radius, r, phi, unit.unwrap_or(0.0))?
            }
            other => return Err(Error::Config(format!("unknown potential kind `{other}`"))),
        };
        Ok(match &self.label {
            Some(l) => pot.with_label(l.clone()),
            None => pot,
        })
    }
}

/// Two-column `r φ(r)` table; whitespace or comma separated, `#` comments.
pub fn parse_table(text: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut r = Vec::new();
    let mut phi = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
        if cols.len() != 2 {
            return Err(Error::Config(format!("table line {}: expected two columns", lineno + 1)));
        }
        let parse = |s: &str| s.parse::<f64>().map_err(|_| Error::Config(format!("table line {}: bad number `{s}`", lineno + 1)));
        r.push(parse(cols[0])?);
        phi.push(parse(cols[1])?);
    }
    Ok((r, phi))
}

/// Loads a potential description from disk.
pub fn load_potential(path: &Path) -> Result<PairPotential> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    PotentialConfig::parse(&text)?.build(path.parent())
}
