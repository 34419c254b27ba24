use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::affine::AffineExpr;
use super::rational::{parse_rational, rational_string, Rational};
use crate::error::{Error, Result};

/// A non-empty open interval `(lo, hi)` with rational endpoints.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalInterval {
    lo: Rational,
    hi: Rational,
}

impl RationalInterval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self> {
        if lo < hi {
            Ok(RationalInterval { lo, hi })
        } else {
            Err(Error::InvalidInterval {
                lo: rational_string(&lo),
                hi: rational_string(&hi),
            })
        }
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from_integer(2.into())
    }

    /// Open membership.
    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo < x && x < &self.hi
    }

    /// Membership in the closure.
    pub fn closure_contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn is_subset_of(&self, other: &RationalInterval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// `clos(self) ⊂ other`, the strict nesting used by the refinement chain.
    pub fn closure_within(&self, other: &RationalInterval) -> bool {
        other.lo < self.lo && self.hi < other.hi
    }

    /// `None` when the open intervals do not meet.
    pub fn intersect(&self, other: &RationalInterval) -> Option<RationalInterval> {
        let lo = (&self.lo).max(&other.lo).clone();
        let hi = (&self.hi).min(&other.hi).clone();
        RationalInterval::new(lo, hi).ok()
    }

    /// Exact range `[min, max]` of a linear form over the closure.
    pub fn image(&self, e: &AffineExpr) -> (Rational, Rational) {
        let x = e.eval(&self.lo);
        let y = e.eval(&self.hi);
        if x <= y {
            (x, y)
        } else {
            (y, x)
        }
    }

    /// `{a : target.lo < e(a) < target.hi}` for a non-constant `e`; `None` for constants.
    pub fn preimage(e: &AffineExpr, target: &RationalInterval) -> Option<RationalInterval> {
        if e.is_constant() {
            return None;
        }
        let x = (&target.lo - &e.p) / &e.q;
        let y = (&target.hi - &e.p) / &e.q;
        let (lo, hi) = if x < y { (x, y) } else { (y, x) };
        RationalInterval::new(lo, hi).ok()
    }
}

impl fmt::Debug for RationalInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lo, self.hi)
    }
}

impl fmt::Display for RationalInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Serialize, Deserialize)]
struct IntervalWire {
    lo: String,
    hi: String,
}

impl Serialize for RationalInterval {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        IntervalWire {
            lo: rational_string(&self.lo),
            hi: rational_string(&self.hi),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RationalInterval {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let wire = IntervalWire::deserialize(deserializer)?;
        let lo = parse_rational(&wire.lo).map_err(D::Error::custom)?;
        let hi = parse_rational(&wire.hi).map_err(D::Error::custom)?;
        RationalInterval::new(lo, hi).map_err(D::Error::custom)
    }
}
