//! Finite unions of intervals on the line with explicit endpoint semantics.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn closed(lo: f64, hi: f64) -> Self {
        Self { lo, hi, lo_closed: lo.is_finite(), hi_closed: hi.is_finite() }
    }

    pub fn open(lo: f64, hi: f64) -> Self {
        Self { lo, hi, lo_closed: false, hi_closed: false }
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let below = if self.hi_closed { x <= self.hi } else { x < self.hi };
        above && below
    }

    fn is_empty(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && !(self.lo_closed && self.hi_closed))
    }

    fn intersect(&self, o: &Interval) -> Interval {
        let (lo, lo_closed) = match self.lo.total_cmp(&o.lo) {
            std::cmp::Ordering::Greater => (self.lo, self.lo_closed),
            std::cmp::Ordering::Less => (o.lo, o.lo_closed),
            std::cmp::Ordering::Equal => (self.lo, self.lo_closed && o.lo_closed),
        };
        let (hi, hi_closed) = match self.hi.total_cmp(&o.hi) {
            std::cmp::Ordering::Less => (self.hi, self.hi_closed),
            std::cmp::Ordering::Greater => (o.hi, o.hi_closed),
            std::cmp::Ordering::Equal => (self.hi, self.hi_closed && o.hi_closed),
        };
        Interval { lo, hi, lo_closed, hi_closed }
    }
}

/// Sorted, disjoint union of intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region1D {
    parts: Vec<Interval>,
}

impl Region1D {
    pub fn empty() -> Self {
        Self { parts: Vec::new() }
    }

    pub fn line() -> Self {
        Self { parts: vec![Interval::open(f64::NEG_INFINITY, f64::INFINITY)] }
    }

    pub fn closed(lo: f64, hi: f64) -> Self {
        Self::from_intervals(vec![Interval::closed(lo, hi)])
    }

    /// Normalizes arbitrary intervals: drops empty ones and merges those
    /// that overlap or touch with a closed side.
    pub fn from_intervals(mut v: Vec<Interval>) -> Self {
        v.retain(|i| !i.is_empty() && !i.lo.is_nan() && !i.hi.is_nan());
        v.sort_by(|a, b| a.lo.total_cmp(&b.lo).then(b.lo_closed.cmp(&a.lo_closed)));
        let mut parts: Vec<Interval> = Vec::with_capacity(v.len());
        for i in v {
            if let Some(last) = parts.last_mut() {
                let joins = i.lo < last.hi || (i.lo == last.hi && (i.lo_closed || last.hi_closed));
                if joins {
                    if i.hi > last.hi {
                        last.hi = i.hi;
                        last.hi_closed = i.hi_closed;
                    } else if i.hi == last.hi {
                        last.hi_closed |= i.hi_closed;
                    }
                    continue;
                }
            }
            parts.push(i);
        }
        Self { parts }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.parts.iter().any(|i| i.contains(x))
    }

    pub fn measure(&self) -> f64 {
        self.parts.iter().map(|i| i.hi - i.lo).sum()
    }

    pub fn is_bounded(&self) -> bool {
        self.parts.first().is_none_or(|i| i.lo.is_finite()) && self.parts.last().is_none_or(|i| i.hi.is_finite())
    }

    /// Smallest closed interval containing the region.
    pub fn hull(&self) -> Option<(f64, f64)> {
        Some((self.parts.first()?.lo, self.parts.last()?.hi))
    }

    pub fn endpoints(&self) -> Vec<f64> {
        self.parts.iter().flat_map(|i| [i.lo, i.hi]).filter(|x| x.is_finite()).collect()
    }

    pub fn intersect(&self, other: &Region1D) -> Region1D {
        let mut out = Vec::new();
        for a in &self.parts {
            for b in &other.parts {
                let c = a.intersect(b);
                if !c.is_empty() {
                    out.push(c);
                }
            }
        }
        Region1D::from_intervals(out)
    }

    /// Complement of the open ball `B_r(c)`, i.e. `{x : |x − c| ≥ r}`.
    pub fn ball_complement(c: f64, r: f64) -> Region1D {
        if r <= 0.0 {
            return Region1D::line();
        }
        Region1D::from_intervals(vec![
            Interval { lo: f64::NEG_INFINITY, hi: c - r, lo_closed: false, hi_closed: true },
            Interval { lo: c + r, hi: f64::INFINITY, lo_closed: true, hi_closed: false },
        ])
    }

    /// Complement of the open ball centred at `c` whose boundary passes
    /// through `p`. Unlike `ball_complement(c, |p − c|)`, `p` itself is
    /// guaranteed to be a member despite rounding.
    pub fn ball_complement_through(c: f64, p: f64) -> Region1D {
        if p == c {
            return Region1D::line();
        }
        let (lo, hi) = if p < c { (p, 2.0 * c - p) } else { (2.0 * c - p, p) };
        Region1D::from_intervals(vec![
            Interval { lo: f64::NEG_INFINITY, hi: lo, lo_closed: false, hi_closed: true },
            Interval { lo: hi, hi: f64::INFINITY, lo_closed: true, hi_closed: false },
        ])
    }

    /// `self ∩ {x : |x − c| ≥ r}`.
    pub fn without_ball(&self, c: f64, r: f64) -> Region1D {
        self.intersect(&Region1D::ball_complement(c, r))
    }

    /// Whether the region meets the open ball `B_r(c)`.
    pub fn meets_open_ball(&self, c: f64, r: f64) -> bool {
        let ball = Interval::open(c - r, c + r);
        self.parts.iter().any(|i| !i.intersect(&ball).is_empty())
    }
}
