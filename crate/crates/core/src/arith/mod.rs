//! Exact arithmetic: big rationals, affine forms in the construction
//! parameter `a`, open rational intervals, and the computable parameter point
//! with its sign oracle.

mod affine;
mod interval;
mod param;
mod rational;

pub use affine::AffineExpr;
pub use interval::RationalInterval;
pub use param::{eval_decimal, sign_at_param, ParamPoint, Refiner, DEFAULT_ORACLE_BUDGET};
pub use rational::{format_decimal, parse_rational, rat, rational_string, Rational};
