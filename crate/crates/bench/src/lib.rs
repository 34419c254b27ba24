//! Benchmark fixtures.

use sepkit_core::{DrivingSequence, Example, IfsSystem, ParamPoint};

/// System and parameter point for a built-in example. The point starts with
/// an empty cache when `warm` is false.
pub fn fixture(ex: Example, warm: bool) -> (IfsSystem, ParamPoint) {
    let point = sepkit_core::param_point(&ex.template(), &DrivingSequence::ThueMorse);
    if warm {
        point.interval(60).expect("construction runs").expect("infinite sequence");
    }
    (ex.system(), point)
}
