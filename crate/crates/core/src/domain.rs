use std::fmt;

use serde::{Deserialize, Serialize};

/// Eigenvalues this far past a closed endpoint are clamped onto it.
pub const DOMAIN_SNAP: f64 = 1e-10;

/// A real interval with open/closed endpoint flags. Infinite endpoints are
/// always treated as open.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub const fn new(lo: f64, hi: f64, lo_closed: bool, hi_closed: bool) -> Self {
        Self {
            lo,
            hi,
            lo_closed,
            hi_closed,
        }
    }

    pub const fn closed(lo: f64, hi: f64) -> Self {
        Self::new(lo, hi, true, true)
    }

    pub const fn open(lo: f64, hi: f64) -> Self {
        Self::new(lo, hi, false, false)
    }

    /// `[0, ∞)`
    pub const fn nonnegative() -> Self {
        Self::new(0.0, f64::INFINITY, true, false)
    }

    /// `(0, ∞)`
    pub const fn positive() -> Self {
        Self::new(0.0, f64::INFINITY, false, false)
    }

    pub const fn real_line() -> Self {
        Self::new(f64::NEG_INFINITY, f64::INFINITY, false, false)
    }

    pub fn contains(&self, t: f64) -> bool {
        let above = if self.lo_closed { t >= self.lo } else { t > self.lo };
        let below = if self.hi_closed { t <= self.hi } else { t < self.hi };
        above && below
    }

    /// Returns `t` itself if inside, the endpoint if `t` sits within
    /// [`DOMAIN_SNAP`] outside a closed endpoint, and `None` otherwise.
    pub fn snap(&self, t: f64) -> Option<f64> {
        if self.contains(t) {
            return Some(t);
        }
        if self.lo_closed && t < self.lo && self.lo - t <= DOMAIN_SNAP {
            return Some(self.lo);
        }
        if self.hi_closed && t > self.hi && t - self.hi <= DOMAIN_SNAP {
            return Some(self.hi);
        }
        None
    }

    /// True for `[0, ∞)`-type intervals where log-uniform sampling applies.
    pub fn is_half_line(&self) -> bool {
        self.lo >= 0.0 && self.hi.is_infinite()
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        let (lo, lo_closed) = if self.lo > other.lo {
            (self.lo, self.lo_closed)
        } else if other.lo > self.lo {
            (other.lo, other.lo_closed)
        } else {
            (self.lo, self.lo_closed && other.lo_closed)
        };
        let (hi, hi_closed) = if self.hi < other.hi {
            (self.hi, self.hi_closed)
        } else if other.hi < self.hi {
            (other.hi, other.hi_closed)
        } else {
            (self.hi, self.hi_closed && other.hi_closed)
        };
        Interval::new(lo, hi, lo_closed, hi_closed)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let open = if self.lo_closed && self.lo.is_finite() {
            '['
        } else {
            '('
        };
        let close = if self.hi_closed && self.hi.is_finite() {
            ']'
        } else {
            ')'
        };
        let show = |x: f64| {
            if x == f64::INFINITY {
                "inf".to_string()
            } else if x == f64::NEG_INFINITY {
                "-inf".to_string()
            } else {
                format!("{x}")
            }
        };
        write!(f, "{open}{}, {}{close}", show(self.lo), show(self.hi))
    }
}
