use std::cmp::Ordering;

use serde::Serialize;

use super::Valued;
use crate::arith::{rational_string, ParamPoint};
use crate::construction::ConstructionState;
use crate::error::{Error, Result};
use crate::ifs::IfsSystem;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CollisionKind {
    /// `u_n = u_k` holds exactly at the parameter.
    Exact,
    /// The oracle could not separate the two values within its budget.
    Unresolved,
}

#[derive(Clone, Debug, Serialize)]
pub struct Collision {
    pub n: usize,
    pub k: usize,
    pub kind: CollisionKind,
    /// Parameter value at which the two gaps coincide.
    pub root: Option<String>,
    /// Whether `root` lies in the closure of every computed interval.
    pub root_in_all_intervals: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DistinctnessReport {
    pub levels: Vec<usize>,
    pub normalized_gaps: Vec<Valued>,
    pub distinct: bool,
    pub collisions: Vec<Collision>,
    pub caveats: Vec<String>,
}

/// Pairwise distinctness of the normalized gaps `u_n = m^n·T_n` at the parameter.
pub fn distinctness_check(
    sys: &IfsSystem,
    states: &[ConstructionState],
    pt: &ParamPoint,
) -> Result<DistinctnessReport> {
    let gaps: Vec<_> = states.iter().map(|s| pt.normalize(&s.normalized_gap(sys))).collect();
    let mut collisions = Vec::new();
    for (x, gx) in gaps.iter().enumerate() {
        for (y, gy) in gaps.iter().enumerate().skip(x + 1) {
            let (n, k) = (states[x].level, states[y].level);
            match pt.compare(gx, gy) {
                Ok(Ordering::Equal) => collisions.push(Collision {
                    n,
                    k,
                    kind: CollisionKind::Exact,
                    root: None,
                    root_in_all_intervals: None,
                }),
                Ok(_) => {}
                Err(Error::Undecided { .. }) => {
                    let root = (gx - gy).root();
                    let inside = root.as_ref().map(|r| {
                        pt.cached_intervals().iter().all(|j| j.closure_contains(r))
                    });
                    collisions.push(Collision {
                        n,
                        k,
                        kind: CollisionKind::Unresolved,
                        root: root.as_ref().map(rational_string),
                        root_in_all_intervals: inside,
                    });
                }
                Err(e) => return Err(e),
            }
        }
    }
    let mut caveats = Vec::new();
    if pt.exact_value().is_none() && !pt.irrational_assumed() {
        caveats.push("parameter not known to be irrational: the limit may be a rational root".into());
    }
    if collisions.iter().any(|c| c.kind == CollisionKind::Unresolved) {
        caveats.push(format!(
            "unresolved pairs stayed inseparable for {} refinement levels",
            pt.budget()
        ));
    }
    Ok(DistinctnessReport {
        levels: states.iter().map(|s| s.level).collect(),
        normalized_gaps: gaps.into_iter().map(|g| Valued::new(g, pt)).collect(),
        distinct: collisions.is_empty(),
        collisions,
        caveats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{param_point, run_construction, DrivingSequence};
    use crate::examples::Example;

    #[test]
    fn thue_morse_gaps_are_distinct() {
        for ex in [Example::One, Example::Two] {
            let tmpl = ex.template();
            let seq = DrivingSequence::ThueMorse;
            let states = run_construction(&tmpl, &seq, 12).unwrap();
            let report = distinctness_check(&tmpl.system, &states, &param_point(&tmpl, &seq)).unwrap();
            assert!(report.distinct, "{ex}: {:?}", report.collisions);
            assert!(report.caveats.is_empty());
        }
    }

    #[test]
    fn periodic_sequence_collides() {
        let tmpl = Example::One.template();
        let seq = DrivingSequence::Periodic(vec![0, 1]);
        let states = run_construction(&tmpl, &seq, 8).unwrap();
        let pt = param_point(&tmpl, &seq).with_budget(60);
        let report = distinctness_check(&tmpl.system, &states, &pt).unwrap();
        assert!(!report.distinct);
        assert!(!report.caveats.is_empty());
        let c = report.collisions.iter().find(|c| c.k == c.n + 2).expect("period-two collision");
        assert_eq!(c.kind, CollisionKind::Unresolved);
        assert_eq!(c.root_in_all_intervals, Some(true));
    }
}
