//! One-dimensional quadrature shared by every module.
//!
//! Two rules are provided: an adaptive Gauss–Kronrod (G10/K21) integrator with
//! mandatory breakpoints and optional semi-infinite end segments, and fixed
//! Gauss–Legendre panels used inside the nested partition-function integrals.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::num::NonZeroUsize;
use std::ops::{Add, Mul, Sub};

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;

/// Values that can be integrated: reals and complex numbers.
pub trait QuadValue:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Result of an integration together with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
    pub converged: bool,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for AdaptiveConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_subdivisions: 400,
        }
    }
}

// 21-point Kronrod nodes (non-negative half) and weights; odd entries are the
// embedded 10-point Gauss nodes. Digits as tabulated.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_765_422,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy)]
enum Map {
    Identity,
    /// x = origin + t / (1 - t), t in [0, 1).
    UpperInfinite(f64),
    /// x = origin - t / (1 - t), t in [0, 1), with orientation restored.
    LowerInfinite(f64),
}

impl Map {
    fn apply(self, t: f64) -> (f64, f64) {
        match self {
            Map::Identity => (t, 1.0),
            Map::UpperInfinite(o) => {
                let s = 1.0 - t;
                (o + t / s, 1.0 / (s * s))
            }
            Map::LowerInfinite(o) => {
                let s = 1.0 - t;
                (o - t / s, 1.0 / (s * s))
            }
        }
    }
}

struct Panel<T> {
    a: f64,
    b: f64,
    map: Map,
    value: T,
    error: f64,
}

impl<T> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T> Eq for Panel<T> {}
impl<T> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<T: QuadValue, F: FnMut(f64) -> T>(f: &mut F, a: f64, b: f64, map: Map) -> (T, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut eval = |t: f64| {
        let (x, jac) = map.apply(t);
        let y = f(x);
        if jac == 1.0 {
            y
        } else if y.magnitude() == 0.0 {
            T::zero()
        } else {
            y * jac
        }
    };
    let fc = eval(center);
    let mut kron = fc * WGK[10];
    let mut gauss = T::zero();
    for j in 0..10 {
        let dx = half * XGK[j];
        let pair = eval(center - dx) + eval(center + dx);
        kron = kron + pair * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + pair * WG[j / 2];
        }
    }
    let value = kron * half;
    let err = ((kron - gauss) * half).magnitude();
    (value, err)
}

/// Adaptive Gauss–Kronrod integration over consecutive `breakpoints`.
///
/// The first and last breakpoints are the integration limits and may be
/// infinite; interior breakpoints are always panel boundaries. Unsorted or
/// duplicate breakpoints are tolerated.
pub fn integrate_adaptive<T, F>(mut f: F, breakpoints: &[f64], cfg: &AdaptiveConfig) -> Estimate<T>
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    let mut pts: Vec<f64> = breakpoints.iter().copied().filter(|x| !x.is_nan()).collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if !(b > a) {
            continue;
        }
        let (map, lo, hi) = match (a.is_infinite(), b.is_infinite()) {
            (false, false) => (Map::Identity, a, b),
            (false, true) => (Map::UpperInfinite(a), 0.0, 1.0),
            (true, false) => (Map::LowerInfinite(b), 0.0, 1.0),
            (true, true) => {
                // Split the whole line at zero.
                for (map, lo, hi) in [(Map::LowerInfinite(0.0), 0.0, 1.0), (Map::UpperInfinite(0.0), 0.0, 1.0)] {
                    let (value, error) = kronrod(&mut f, lo, hi, map);
                    evaluations += 21;
                    heap.push(Panel { a: lo, b: hi, map, value, error });
                }
                continue;
            }
        };
        let (value, error) = kronrod(&mut f, lo, hi, map);
        evaluations += 21;
        heap.push(Panel { a: lo, b: hi, map, value, error });
    }

    let total = |heap: &BinaryHeap<Panel<T>>| {
        heap.iter().fold((T::zero(), 0.0), |(v, e), p| (v + p.value, e + p.error))
    };
    let mut subdivisions = 0;
    let mut frozen: Vec<Panel<T>> = Vec::new();
    loop {
        let (value, error) = total(&heap);
        let (fv, fe) = frozen.iter().fold((T::zero(), 0.0), |(v, e), p| (v + p.value, e + p.error));
        let value = value + fv;
        let error = error + fe;
        let target = cfg.abs_tol.max(cfg.rel_tol * value.magnitude());
        if error <= target || heap.is_empty() {
            return Estimate { value, error, converged: error <= target, evaluations };
        }
        if subdivisions >= cfg.max_subdivisions {
            return Estimate { value, error, converged: false, evaluations };
        }
        let worst = heap.pop().expect("heap is non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) || (worst.b - worst.a) <= 1e-13 * (worst.a.abs() + worst.b.abs()).max(1e-300) {
            // Panel can no longer be split in floating point.
            frozen.push(worst);
            continue;
        }
        for (a, b) in [(worst.a, mid), (mid, worst.b)] {
            let (value, error) = kronrod(&mut f, a, b, worst.map);
            evaluations += 21;
            heap.push(Panel { a, b, map: worst.map, value, error });
        }
        subdivisions += 1;
    }
}

/// Fixed-order Gauss–Legendre rule applied panel by panel.
#[derive(Debug, Clone)]
pub struct PanelRule {
    nodes: Vec<(f64, f64)>,
}

impl PanelRule {
    pub fn new(order: usize) -> Self {
        let order = NonZeroUsize::new(order.max(1)).expect("order is at least one");
        let rule = GaussLegendre::new(order);
        Self { nodes: rule.as_node_weight_pairs().to_vec() }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Integrates over `[a, b]` with one panel.
    pub fn panel<T: QuadValue, F: FnMut(f64) -> T>(&self, a: f64, b: f64, f: &mut F) -> T {
        let half = 0.5 * (b - a);
        let center = 0.5 * (a + b);
        let mut acc = T::zero();
        for &(x, w) in &self.nodes {
            acc = acc + f(center + half * x) * w;
        }
        acc * half
    }

    /// Integrates over consecutive sorted breakpoints, one panel each.
    pub fn panels<T: QuadValue, F: FnMut(f64) -> T>(&self, breaks: &[f64], mut f: F) -> T {
        let mut acc = T::zero();
        for w in breaks.windows(2) {
            if w[1] > w[0] {
                acc = acc + self.panel(w[0], w[1], &mut f);
            }
        }
        acc
    }
}

/// Sorts, clips to `[lo, hi]`, and merges points closer than `tol`.
/// The result always starts at `lo` and ends at `hi`.
pub fn clean_breaks(points: impl IntoIterator<Item = f64>, lo: f64, hi: f64, tol: f64) -> Vec<f64> {
    let mut v: Vec<f64> = points
        .into_iter()
        .filter(|x| x.is_finite() && *x > lo + tol && *x < hi - tol)
        .collect();
    v.sort_by(f64::total_cmp);
    let mut out = Vec::with_capacity(v.len() + 2);
    out.push(lo);
    for x in v {
        if x - *out.last().expect("non-empty") > tol {
            out.push(x);
        }
    }
    out.push(hi);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomial_is_exact_with_one_panel() {
        let est = integrate_adaptive(|x: f64| x.powi(7) - 3.0 * x, &[0.0, 2.0], &AdaptiveConfig::default());
        assert_relative_eq!(est.value, 32.0 - 6.0, epsilon = 1e-12);
        assert!(est.converged);
        assert_eq!(est.evaluations, 21);
    }

    #[test]
    fn semi_infinite_exponential() {
        let est = integrate_adaptive(|x: f64| (-x).exp(), &[0.0, f64::INFINITY], &AdaptiveConfig::default());
        assert_relative_eq!(est.value, 1.0, epsilon = 1e-10);
        let est = integrate_adaptive(|x: f64| (-x * x).exp(), &[f64::NEG_INFINITY, f64::INFINITY], &AdaptiveConfig::default());
        assert_relative_eq!(est.value, std::f64::consts::PI.sqrt(), epsilon = 1e-10);
    }

    #[test]
    fn jump_at_breakpoint_is_exact() {
        let f = |x: f64| if x < 0.3 { 1.0 } else { 5.0 };
        let est = integrate_adaptive(f, &[0.0, 0.3, 1.0], &AdaptiveConfig::default());
        assert_relative_eq!(est.value, 0.3 + 3.5, epsilon = 1e-14);
    }

    #[test]
    fn kink_without_breakpoint_converges() {
        let est = integrate_adaptive(|x: f64| (x - 0.37).abs(), &[0.0, 1.0], &AdaptiveConfig::default());
        let exact = 0.5 * 0.37 * 0.37 + 0.5 * 0.63 * 0.63;
        assert!((est.value - exact).abs() < 1e-10, "{}", est.value);
    }

    #[test]
    fn complex_integrand() {
        let est = integrate_adaptive(|x: f64| Complex64::new(x.cos(), x.sin()), &[0.0, std::f64::consts::PI], &AdaptiveConfig::default());
        assert!((est.value - Complex64::new(0.0, 2.0)).norm() < 1e-12);
    }

    #[test]
    fn panel_rule_exactness() {
        let rule = PanelRule::new(4);
        let v: f64 = rule.panels(&[0.0, 0.5, 1.0], |x| x.powi(7));
        assert_relative_eq!(v, 0.125, epsilon = 1e-14);
    }

    #[test]
    fn clean_breaks_merges_and_clips() {
        let b = clean_breaks([0.5, -1.0, 0.5 + 1e-15, 2.0, 0.2], 0.0, 1.0, 1e-12);
        assert_eq!(b, vec![0.0, 0.2, 0.5, 1.0]);
    }
}
