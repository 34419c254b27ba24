//! Inductive refinement of the overlap pair `(σ⁽ⁿ⁾, τ⁽ⁿ⁾)` and the parameter
//! interval `J_n`.
//!
//! At level `n` the gap `T_n = S_τ(0) − S_σ(0)` is an affine form in `a`, and
//! `J_n` is exactly the set of `a` with `0 < T_n(a) < m^{-n}`, i.e. with
//! `S_σ(0) < S_τ(0) < S_σ(1)`. Each step appends one symbol to each word
//! (optionally swapping their roles first) and intersects `J_n` with the
//! solution set of the new inequality. A driving sequence picks between two
//! such options at every step.

mod engine;
mod sequence;

pub use engine::{param_point, EngineRefiner};
pub use sequence::{fibonacci_bit, thue_morse_bit, DrivingSequence};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith::{AffineExpr, ParamPoint, Rational, RationalInterval};
use crate::error::{Error, Result};
use crate::ifs::{IfsSystem, Word};

/// One way of extending the pair: with `swap` the new σ is `τ·append_sigma`
/// and the new τ is `σ·append_tau`; without it σ gets `append_sigma` and τ
/// gets `append_tau`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefinementOption {
    pub swap: bool,
    pub append_sigma: u16,
    pub append_tau: u16,
}

impl RefinementOption {
    pub const fn new(swap: bool, append_sigma: u16, append_tau: u16) -> Self {
        RefinementOption {
            swap,
            append_sigma,
            append_tau,
        }
    }

    pub fn apply(&self, sigma: &Word, tau: &Word) -> (Word, Word) {
        if self.swap {
            (tau.with(self.append_sigma), sigma.with(self.append_tau))
        } else {
            (sigma.with(self.append_sigma), tau.with(self.append_tau))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionTemplate {
    pub system: IfsSystem,
    pub initial_sigma: Word,
    pub initial_tau: Word,
    #[serde(rename = "initial_J", alias = "initial_interval")]
    pub initial_interval: RationalInterval,
    /// Steps applied before the driving sequence takes over.
    #[serde(default)]
    pub fixed_prefix: Vec<RefinementOption>,
    /// `[first option, second option]`, selected by bits 0 and 1.
    pub options: [RefinementOption; 2],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConstructionState {
    #[serde(rename = "n")]
    pub level: usize,
    pub sigma: Word,
    pub tau: Word,
    #[serde(rename = "J")]
    pub interval: RationalInterval,
    /// `T_n = S_τ(0) − S_σ(0)`.
    #[serde(rename = "T")]
    pub gap: AffineExpr,
}

impl ConstructionState {
    /// `u_n = m^n · T_n`, the gap normalized to `(0, 1)`.
    pub fn normalized_gap(&self, sys: &IfsSystem) -> AffineExpr {
        self.gap.scale(&sys.m_pow(self.level))
    }
}

fn gap_target(sys: &IfsSystem, level: usize) -> RationalInterval {
    RationalInterval::new(Rational::zero(), sys.m_pow(level).recip()).expect("positive width")
}

/// Rational sample points strictly inside an interval.
fn samples(j: &RationalInterval) -> impl Iterator<Item = Rational> + '_ {
    (1..8).map(move |i| j.lo() + j.width() * Rational::new(i.into(), 8.into()))
}

impl ConstructionTemplate {
    pub fn initial_level(&self) -> usize {
        self.initial_sigma.len()
    }

    /// Structural checks plus the overlap inequality at sample points of the
    /// initial interval.
    pub fn validate(&self) -> Result<()> {
        let sys = &self.system;
        sys.check_word(&self.initial_sigma)?;
        sys.check_word(&self.initial_tau)?;
        for opt in self.fixed_prefix.iter().chain(&self.options) {
            sys.offset(opt.append_sigma)?;
            sys.offset(opt.append_tau)?;
        }
        if self.initial_sigma.len() != self.initial_tau.len() {
            return Err(Error::LengthMismatch {
                left: self.initial_sigma.len(),
                right: self.initial_tau.len(),
            });
        }
        if self.initial_sigma.is_empty() || self.initial_sigma.first() == self.initial_tau.first() {
            return Err(Error::InvalidSystem(
                "initial words must be non-empty with distinct first symbols".into(),
            ));
        }
        let gap = self.initial_gap()?;
        let target = gap_target(sys, self.initial_level());
        for a in samples(&self.initial_interval) {
            if !target.contains(&gap.eval(&a)) {
                return Err(Error::InvalidSystem(format!(
                    "initial overlap condition fails at a = {a}"
                )));
            }
        }
        Ok(())
    }

    fn initial_gap(&self) -> Result<AffineExpr> {
        Ok(&self.system.map_at_zero(&self.initial_tau)? - &self.system.map_at_zero(&self.initial_sigma)?)
    }

    pub fn initial_state(&self) -> Result<ConstructionState> {
        self.validate()?;
        let level = self.initial_level();
        let gap = self.initial_gap()?;
        let interval = RationalInterval::preimage(&gap, &gap_target(&self.system, level))
            .and_then(|p| p.intersect(&self.initial_interval))
            .ok_or(Error::EmptyRefinement { level })?;
        Ok(ConstructionState {
            level,
            sigma: self.initial_sigma.clone(),
            tau: self.initial_tau.clone(),
            interval,
            gap,
        })
    }

    /// Option used to go from `level` to `level + 1`.
    pub fn option_for_step(&self, seq: &DrivingSequence, level: usize) -> Result<RefinementOption> {
        let step = level + 1 - self.initial_level();
        if let Some(opt) = self.fixed_prefix.get(step - 1) {
            return Ok(*opt);
        }
        let driven = (step - self.fixed_prefix.len()) as u64;
        let bit = seq.bit(driven).ok_or(Error::SequenceExhausted {
            step: driven as usize,
        })?;
        Ok(self.options[usize::from(bit != 0)])
    }
}

/// One refinement step.
pub fn refine_step(
    state: &ConstructionState,
    opt: &RefinementOption,
    tmpl: &ConstructionTemplate,
) -> Result<ConstructionState> {
    let sys = &tmpl.system;
    let level = state.level + 1;
    let (sigma, tau) = opt.apply(&state.sigma, &state.tau);
    let gap = &sys.map_at_zero(&tau)? - &sys.map_at_zero(&sigma)?;
    if gap.is_constant() {
        return Err(Error::InvalidSystem(format!(
            "gap at level {level} does not depend on the parameter"
        )));
    }
    let interval = RationalInterval::preimage(&gap, &gap_target(sys, level))
        .and_then(|p| p.intersect(&state.interval))
        .ok_or(Error::EmptyRefinement { level })?;
    Ok(ConstructionState {
        level,
        sigma,
        tau,
        interval,
        gap,
    })
}

/// States for levels `initial..=depth`.
pub fn run_construction(
    tmpl: &ConstructionTemplate,
    seq: &DrivingSequence,
    depth: usize,
) -> Result<Vec<ConstructionState>> {
    let mut states = vec![tmpl.initial_state()?];
    while states.last().expect("non-empty").level < depth {
        let last = states.last().expect("non-empty");
        let opt = tmpl.option_for_step(seq, last.level)?;
        let next = refine_step(last, &opt, tmpl)?;
        states.push(next);
    }
    Ok(states)
}

#[derive(Clone, Debug, Serialize)]
pub struct ConstructionReport {
    pub sequence: String,
    pub levels: Vec<ConstructionState>,
    /// Decimal value of `a`, when the requested digits could be certified.
    pub a_decimal: Option<String>,
    pub caveats: Vec<String>,
}

impl ConstructionReport {
    pub fn build(
        tmpl: &ConstructionTemplate,
        seq: &DrivingSequence,
        depth: usize,
        pt: &ParamPoint,
        digits: usize,
    ) -> Result<ConstructionReport> {
        let levels = run_construction(tmpl, seq, depth)?;
        let mut caveats = seq.caveats();
        let a_decimal = match pt.eval_decimal(&AffineExpr::param(), digits) {
            Ok(s) => Some(s),
            Err(Error::Undecided { depth, .. }) => {
                caveats.push(format!(
                    "a could not be pinned to {digits} digits within {depth} refinement levels"
                ));
                None
            }
            Err(e) => return Err(e),
        };
        Ok(ConstructionReport {
            sequence: seq.to_string(),
            levels,
            a_decimal,
            caveats,
        })
    }
}
