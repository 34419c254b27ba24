//! Exact construction of parameterized self-similar systems on the line and
//! finite-depth verification of their separation properties.
//!
//! The parameter `a` is carried symbolically: every endpoint and displacement
//! is an [`AffineExpr`] `p + q·a` over big rationals, and inequalities are
//! decided at the limit point by refining its nested interval chain.

pub mod arith;
pub mod construction;
mod error;
pub mod examples;
pub mod ifs;
pub mod render;
pub mod separation;

pub use arith::{eval_decimal, sign_at_param, AffineExpr, ParamPoint, Rational, RationalInterval};
pub use construction::{
    param_point, refine_step, run_construction, thue_morse_bit, ConstructionState, ConstructionTemplate,
    DrivingSequence, RefinementOption,
};
pub use error::{Error, Result};
pub use examples::Example;
pub use ifs::{validate_system, Cylinder, IfsSystem, Word};
pub use render::{diagram_for_level, emit_svg, CylinderDiagram};
pub use separation::{
    constructed_v_type_census, convex_type_census, distinctness_check, endpoint_separation, exact_overlap_scan,
    osc_dimension, verify_osc_open_set, wsp_min_displacement, NeighborhoodType, OpenSetApprox,
};
