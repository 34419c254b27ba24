use std::cmp::Ordering;
use std::fmt;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_traits::Zero;

use super::affine::AffineExpr;
use super::interval::RationalInterval;
use super::rational::{format_decimal, Rational};
use crate::error::{Error, Result};

/// Refinement levels the sign oracle may request before giving up.
pub const DEFAULT_ORACLE_BUDGET: usize = 200;

/// Source of the nested intervals `J_1 ⊃ J_2 ⊃ …` pinning down a limit parameter.
pub trait Refiner: Send + Sync {
    /// `J_level` for `level ≥ 1`, or `None` when the source has run dry
    /// (a finite driving prefix, for instance).
    fn interval(&self, level: usize) -> Result<Option<RationalInterval>>;
}

/// The construction parameter `a`, either an exact rational or the limit of
/// a nested interval chain produced on demand.
///
/// Clones share the interval cache. Extension of the cache is serialized
/// behind a write lock; readers always see a prefix of the chain.
#[derive(Clone)]
pub struct ParamPoint {
    inner: Arc<Inner>,
    budget: usize,
}

struct Inner {
    kind: Kind,
    irrational_assumed: bool,
}

enum Kind {
    Exact(Rational),
    Limit {
        refiner: Box<dyn Refiner>,
        cache: RwLock<Vec<RationalInterval>>,
    },
}

struct FixedIntervals(Vec<RationalInterval>);

impl Refiner for FixedIntervals {
    fn interval(&self, level: usize) -> Result<Option<RationalInterval>> {
        Ok(level.checked_sub(1).and_then(|i| self.0.get(i)).cloned())
    }
}

impl ParamPoint {
    pub fn exact(value: Rational) -> Self {
        ParamPoint {
            inner: Arc::new(Inner {
                kind: Kind::Exact(value),
                irrational_assumed: false,
            }),
            budget: DEFAULT_ORACLE_BUDGET,
        }
    }

    pub fn limit(refiner: Box<dyn Refiner>, irrational_assumed: bool) -> Self {
        ParamPoint {
            inner: Arc::new(Inner {
                kind: Kind::Limit {
                    refiner,
                    cache: RwLock::new(Vec::new()),
                },
                irrational_assumed,
            }),
            budget: DEFAULT_ORACLE_BUDGET,
        }
    }

    /// A limit point backed by a fixed, finite list of intervals.
    pub fn from_intervals(intervals: Vec<RationalInterval>, irrational_assumed: bool) -> Self {
        ParamPoint::limit(Box::new(FixedIntervals(intervals)), irrational_assumed)
    }

    pub fn with_budget(&self, budget: usize) -> Self {
        ParamPoint {
            inner: Arc::clone(&self.inner),
            budget: budget.max(1),
        }
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    /// Whether the limit is taken to be irrational. A rational limit would
    /// make every displacement a rational with bounded denominator, which
    /// is incompatible with the unbounded convex type census the aperiodic
    /// constructions produce; the flag records that assumption.
    pub fn irrational_assumed(&self) -> bool {
        self.inner.irrational_assumed
    }

    pub fn exact_value(&self) -> Option<&Rational> {
        match &self.inner.kind {
            Kind::Exact(v) => Some(v),
            Kind::Limit { .. } => None,
        }
    }

    /// Number of intervals currently cached.
    pub fn cached_levels(&self) -> usize {
        match &self.inner.kind {
            Kind::Exact(_) => 0,
            Kind::Limit { cache, .. } => cache.read().unwrap_or_else(|e| e.into_inner()).len(),
        }
    }

    pub fn cached_intervals(&self) -> Vec<RationalInterval> {
        match &self.inner.kind {
            Kind::Exact(_) => Vec::new(),
            Kind::Limit { cache, .. } => cache.read().unwrap_or_else(|e| e.into_inner()).clone(),
        }
    }

    /// `J_level`, refining as needed. `None` for exact points and when the
    /// refiner cannot reach the level.
    pub fn interval(&self, level: usize) -> Result<Option<RationalInterval>> {
        let Kind::Limit { refiner, cache } = &self.inner.kind else {
            return Ok(None);
        };
        if level == 0 {
            return Ok(None);
        }
        {
            let read = cache.read().unwrap_or_else(|e| e.into_inner());
            if let Some(j) = read.get(level - 1) {
                return Ok(Some(j.clone()));
            }
        }
        let mut write = cache.write().unwrap_or_else(|e| e.into_inner());
        while write.len() < level {
            let next_level = write.len() + 1;
            let Some(next) = refiner.interval(next_level)? else {
                return Ok(None);
            };
            if let Some(prev) = write.last() {
                if !next.is_subset_of(prev) {
                    return Err(Error::EmptyRefinement { level: next_level });
                }
            }
            write.push(next);
        }
        Ok(write.get(level - 1).cloned())
    }

    /// Exact points collapse to constants; limit expressions are kept symbolic.
    pub fn normalize(&self, e: &AffineExpr) -> AffineExpr {
        match &self.inner.kind {
            Kind::Exact(v) => AffineExpr::constant(e.eval(v)),
            Kind::Limit { .. } => e.clone(),
        }
    }

    pub fn sign(&self, e: &AffineExpr) -> Result<Ordering> {
        self.sign_with_budget(e, self.budget)
    }

    pub fn sign_with_budget(&self, e: &AffineExpr, budget: usize) -> Result<Ordering> {
        if e.is_constant() {
            return Ok(e.p.cmp(&Rational::zero()));
        }
        let root = match &self.inner.kind {
            Kind::Exact(v) => return Ok(e.eval(v).cmp(&Rational::zero())),
            Kind::Limit { .. } => e.root().expect("non-constant"),
        };
        // e(a) = q·(a − root); decided once root leaves clos(J_n).
        let budget = budget.max(1);
        let sign_q = e.q.cmp(&Rational::zero());
        let start = self.cached_levels().clamp(1, budget);
        for level in start..=budget {
            let Some(j) = self.interval(level)? else {
                return Err(undecided(level - 1, e));
            };
            if &root < j.lo() {
                return Ok(sign_q);
            }
            if &root > j.hi() {
                return Ok(sign_q.reverse());
            }
        }
        Err(undecided(budget, e))
    }

    /// Exact comparison of two forms at the parameter.
    pub fn compare(&self, x: &AffineExpr, y: &AffineExpr) -> Result<Ordering> {
        if x == y {
            return Ok(Ordering::Equal);
        }
        self.sign(&(x - y))
    }

    /// `|e|` compared against a rational bound.
    pub fn abs_cmp(&self, e: &AffineExpr, bound: &Rational) -> Result<Ordering> {
        let abs = match self.sign(e)? {
            Ordering::Less => -e,
            _ => e.clone(),
        };
        self.sign(&abs.add_constant(&-bound))
    }

    pub fn abs(&self, e: &AffineExpr) -> Result<AffineExpr> {
        Ok(match self.sign(e)? {
            Ordering::Less => -e,
            _ => e.clone(),
        })
    }

    /// Correctly rounded decimal with `digits` fractional digits.
    pub fn eval_decimal(&self, e: &AffineExpr, digits: usize) -> Result<String> {
        if e.is_constant() {
            return Ok(format_decimal(&e.p, digits));
        }
        if let Kind::Exact(v) = &self.inner.kind {
            return Ok(format_decimal(&e.eval(v), digits));
        }
        let tolerance = Rational::new(1.into(), BigInt::from(10u32).pow(digits as u32));
        for level in 1..=self.budget {
            let Some(j) = self.interval(level)? else {
                return Err(undecided(level - 1, e));
            };
            let (lo, hi) = j.image(e);
            if (&hi - &lo) < tolerance {
                let lo_s = format_decimal(&lo, digits);
                if lo_s == format_decimal(&hi, digits) {
                    return Ok(lo_s);
                }
            }
        }
        Err(undecided(self.budget, e))
    }
}

fn undecided(depth: usize, e: &AffineExpr) -> Error {
    Error::Undecided {
        depth,
        expr: e.to_string(),
    }
}

impl fmt::Debug for ParamPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.inner.kind {
            Kind::Exact(v) => write!(f, "ParamPoint::Exact({v})"),
            Kind::Limit { .. } => f
                .debug_struct("ParamPoint::Limit")
                .field("cached_levels", &self.cached_levels())
                .field("irrational_assumed", &self.inner.irrational_assumed)
                .finish(),
        }
    }
}

/// Sign of `e` at the point, refining at most `depth_budget` levels.
pub fn sign_at_param(e: &AffineExpr, pt: &ParamPoint, depth_budget: usize) -> Result<Ordering> {
    pt.sign_with_budget(e, depth_budget)
}

pub fn eval_decimal(e: &AffineExpr, pt: &ParamPoint, digits: usize) -> Result<String> {
    pt.eval_decimal(e, digits)
}
