//! The two shipped constructions.
//!
//! Example 1 is `{x/7, x/7 + a, x/7 + 6/7}`: it has the open set condition
//! with a non-convex open set but infinitely many convex neighbourhood types.
//!
//! Example 2 is `{x/16, x/16 + a, x/16 + 15/16 − 16a, x/16 + 11/16, x/16 + 15/16}`.
//! The third offset is chosen so that `S_15 = S_23`, an exact overlap of
//! level-two cylinders. No other level-two pair coincides; for instance
//! `S_14(0) = 11/256` while `S_23(0) = 15/256`.

use std::fmt;
use std::str::FromStr;

use crate::arith::{rat, AffineExpr, ParamPoint, RationalInterval};
use crate::construction::{param_point, ConstructionTemplate, DrivingSequence, RefinementOption};
use crate::error::Error;
use crate::ifs::{IfsSystem, Word};

pub fn example_one_system() -> IfsSystem {
    IfsSystem::new(
        7,
        vec![
            AffineExpr::zero(),
            AffineExpr::param(),
            AffineExpr::constant(rat(6, 7)),
        ],
    )
    .expect("valid system")
}

pub fn example_two_system() -> IfsSystem {
    IfsSystem::new(
        16,
        vec![
            AffineExpr::zero(),
            AffineExpr::param(),
            AffineExpr::new(rat(15, 16), rat(-16, 1)),
            AffineExpr::constant(rat(11, 16)),
            AffineExpr::constant(rat(15, 16)),
        ],
    )
    .expect("valid system")
}

pub fn example_one() -> ConstructionTemplate {
    ConstructionTemplate {
        system: example_one_system(),
        initial_sigma: Word::new(vec![1]),
        initial_tau: Word::new(vec![2]),
        initial_interval: RationalInterval::new(rat(0, 1), rat(1, 7)).expect("non-empty"),
        fixed_prefix: Vec::new(),
        options: [RefinementOption::new(false, 3, 1), RefinementOption::new(true, 2, 3)],
    }
}

pub fn example_two() -> ConstructionTemplate {
    ConstructionTemplate {
        system: example_two_system(),
        initial_sigma: Word::new(vec![1]),
        initial_tau: Word::new(vec![2]),
        initial_interval: RationalInterval::new(rat(0, 1), rat(1, 16)).expect("non-empty"),
        fixed_prefix: vec![RefinementOption::new(false, 4, 1)],
        options: [RefinementOption::new(false, 5, 1), RefinementOption::new(true, 2, 5)],
    }
}

/// Selector for the shipped constructions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Example {
    One,
    Two,
}

impl Example {
    pub fn number(self) -> u8 {
        match self {
            Example::One => 1,
            Example::Two => 2,
        }
    }

    pub fn template(self) -> ConstructionTemplate {
        match self {
            Example::One => example_one(),
            Example::Two => example_two(),
        }
    }

    pub fn system(self) -> IfsSystem {
        match self {
            Example::One => example_one_system(),
            Example::Two => example_two_system(),
        }
    }

    /// Seed interval of the non-convex open set `V = ∪_σ S_σ(seed)`.
    pub fn open_set_seed(self) -> RationalInterval {
        match self {
            Example::One => RationalInterval::new(rat(3, 7), rat(4, 7)),
            Example::Two => RationalInterval::new(rat(7, 16), rat(8, 16)),
        }
        .expect("non-empty")
    }

    /// The parameter driven by the Thue–Morse sequence.
    pub fn thue_morse_point(self) -> ParamPoint {
        param_point(&self.template(), &DrivingSequence::ThueMorse)
    }
}

impl FromStr for Example {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim() {
            "1" => Ok(Example::One),
            "2" => Ok(Example::Two),
            other => Err(Error::Parse(format!("unknown example {other:?} (expected 1 or 2)"))),
        }
    }
}

impl fmt::Display for Example {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}
