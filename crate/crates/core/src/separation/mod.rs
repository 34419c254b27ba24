//! Finite-depth verifiers for the separation properties of a parameterized
//! system: weak separation, convex and non-convex neighbourhood types, the
//! open set condition, exact overlaps, endpoint separation, distinctness of
//! the construction's normalized gaps, and the similarity dimension.

mod dimension;
mod displacement;
mod distinct;
mod endpoints;
mod open_set;
mod overlaps;
mod types;

pub use dimension::{osc_dimension, DimensionReport};
pub use displacement::{displacement_levels, wsp_min_displacement, Displacement, WspLevel, WspReport};
pub use distinct::{distinctness_check, Collision, CollisionKind, DistinctnessReport};
pub use endpoints::{endpoint_separation, EndpointLevel, EndpointReport, EndpointViolation};
pub use open_set::{verify_osc_open_set, OpenSetApprox, OscPair, OscReport, OverlapOracle};
pub use overlaps::{exact_overlap_scan, OverlapPair, OverlapReport};
pub use types::{
    constructed_v_type_census, convex_type_census, LevelTypes, NeighborhoodType, TypeCensus, TypeEntry,
};

use std::cmp::Ordering;
use std::collections::HashSet;

use serde::Serialize;

use crate::arith::{AffineExpr, ParamPoint};
use crate::error::{Error, Result};

/// Digits used for the decimal companions of exact values in reports.
pub const REPORT_DIGITS: usize = 12;

/// An exact value together with its decimal approximation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Valued {
    #[serde(flatten)]
    pub expr: AffineExpr,
    pub decimal: String,
}

impl Valued {
    pub fn new(expr: AffineExpr, pt: &ParamPoint) -> Valued {
        let decimal = match pt.eval_decimal(&expr, REPORT_DIGITS) {
            Ok(s) => s,
            Err(_) => "undecided".to_string(),
        };
        Valued { expr, decimal }
    }
}

/// Merge sort driven by a fallible comparison.
pub(crate) fn try_sort_by<T: Clone>(
    items: Vec<T>,
    cmp: &mut impl FnMut(&T, &T) -> Result<Ordering>,
) -> Result<Vec<T>> {
    if items.len() <= 1 {
        return Ok(items);
    }
    let mut left = items;
    let right = left.split_off(left.len() / 2);
    let left = try_sort_by(left, cmp)?;
    let right = try_sort_by(right, cmp)?;
    let mut out = Vec::with_capacity(left.len() + right.len());
    let (mut a, mut b) = (left.into_iter().peekable(), right.into_iter().peekable());
    while let (Some(x), Some(y)) = (a.peek(), b.peek()) {
        if cmp(x, y)? != Ordering::Greater {
            out.push(a.next().expect("peeked"));
        } else {
            out.push(b.next().expect("peeked"));
        }
    }
    out.extend(a);
    out.extend(b);
    Ok(out)
}

/// Removes syntactic duplicates and orders the values at the parameter.
/// At a limit point two syntactically distinct forms never compare equal:
/// the oracle either separates them or reports `Undecided`.
pub(crate) fn canonical_set(values: Vec<AffineExpr>, pt: &ParamPoint) -> Result<Vec<AffineExpr>> {
    let mut seen = HashSet::new();
    let unique: Vec<AffineExpr> = values.into_iter().filter(|v| seen.insert(v.clone())).collect();
    let sorted = try_sort_by(unique, &mut |x, y| pt.compare(x, y))?;
    for pair in sorted.windows(2) {
        if pt.compare(&pair[0], &pair[1])? == Ordering::Equal {
            return Err(Error::Undecided {
                depth: pt.budget(),
                expr: format!("{} = {}", pair[0], pair[1]),
            });
        }
    }
    Ok(sorted)
}
