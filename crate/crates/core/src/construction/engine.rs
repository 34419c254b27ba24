use std::sync::Mutex;

use super::{refine_step, ConstructionState, ConstructionTemplate, DrivingSequence};
use crate::arith::{ParamPoint, RationalInterval, Refiner};
use crate::error::{Error, Result};

/// Lazily extends a construction run and hands out its intervals.
pub struct EngineRefiner {
    template: ConstructionTemplate,
    sequence: DrivingSequence,
    states: Mutex<Vec<ConstructionState>>,
}

impl EngineRefiner {
    pub fn new(template: ConstructionTemplate, sequence: DrivingSequence) -> Self {
        EngineRefiner {
            template,
            sequence,
            states: Mutex::new(Vec::new()),
        }
    }
}

impl Refiner for EngineRefiner {
    fn interval(&self, level: usize) -> Result<Option<RationalInterval>> {
        let mut states = self.states.lock().unwrap_or_else(|e| e.into_inner());
        if states.is_empty() {
            states.push(self.template.initial_state()?);
        }
        let first_level = states[0].level;
        if level < first_level {
            return Ok(Some(states[0].interval.clone()));
        }
        while states.len() <= level - first_level {
            let last = states.last().expect("non-empty");
            let opt = match self.template.option_for_step(&self.sequence, last.level) {
                Ok(opt) => opt,
                Err(Error::SequenceExhausted { .. }) => return Ok(None),
                Err(e) => return Err(e),
            };
            let next = refine_step(last, &opt, &self.template)?;
            states.push(next);
        }
        Ok(Some(states[level - first_level].interval.clone()))
    }
}

/// The limit parameter of a construction. The irrationality flag is set for
/// the recognized aperiodic generators.
pub fn param_point(tmpl: &ConstructionTemplate, seq: &DrivingSequence) -> ParamPoint {
    let refiner = EngineRefiner::new(tmpl.clone(), seq.clone());
    ParamPoint::limit(Box::new(refiner), seq.is_aperiodic())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, AffineExpr};
    use crate::examples::{example_one, example_two};

    #[test]
    fn example_one_parameter() {
        let pt = param_point(&example_one(), &DrivingSequence::ThueMorse);
        assert!(pt.irrational_assumed());
        assert_eq!(pt.eval_decimal(&AffineExpr::param(), 10).unwrap(), "0.1354645854");
        assert_eq!(
            pt.sign(&AffineExpr::new(rat(-47, 350), rat(1, 1))).unwrap(),
            std::cmp::Ordering::Greater
        );
        assert_eq!(
            pt.sign(&AffineExpr::new(rat(-1, 7), rat(1, 1))).unwrap(),
            std::cmp::Ordering::Less
        );
    }

    #[test]
    fn example_two_parameter() {
        let pt = param_point(&example_two(), &DrivingSequence::ThueMorse);
        let sixteen_a = AffineExpr::new(rat(0, 1), rat(16, 1));
        assert_eq!(pt.eval_decimal(&sixteen_a, 10).unwrap(), "0.7493705552");
        let third_offset = AffineExpr::new(rat(15, 16), rat(-16, 1));
        assert_eq!(pt.eval_decimal(&third_offset, 10).unwrap(), "0.1881294448");
    }

    #[test]
    fn finite_prefix_is_undecided() {
        let pt = param_point(&example_one(), &DrivingSequence::Explicit(vec![0, 0]));
        assert!(!pt.irrational_assumed());
        assert!(matches!(
            pt.eval_decimal(&AffineExpr::param(), 12),
            Err(Error::Undecided { depth: 3, .. })
        ));
    }
}
