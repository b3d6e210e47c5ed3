//! Safe and safeable regions.
//!
//! Every region is a universally quantified statement about the nominal
//! trajectory over a horizontal conflict window. Because the nominal is
//! piecewise quadratic, [`exact`] reduces each quantifier to a handful of
//! candidate times. [`oracle`] samples the same formulas on grids and exists
//! to cross-check the exact evaluators.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::advisory::{Advisory, Sense};
use crate::params::ValidatedParams;
use crate::state::EncounterState;

pub mod exact;
pub mod nominal;
pub mod oracle;

pub use exact::{
    eval_c_eps, eval_c_safeable, eval_l_inf, eval_l_inf_horiz, extreme_state, ExtremeState,
};
pub use nominal::{NominalKind, NominalTrajectory};
pub use oracle::{compare, oracle_eval, Agreement};

/// The four region families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegionKind {
    /// Infinite-time safe region for a fixed closure rate.
    LInf,
    /// Infinite-time safe region for every closure rate in `[0, v_max]`.
    LInfHoriz,
    /// Two-sided region over the next ε seconds.
    CEps,
    /// Safe for ε seconds with a safe follow-up advisory afterwards.
    CSafeable,
}

impl RegionKind {
    pub fn name(self) -> &'static str {
        match self {
            RegionKind::LInf => "l-inf",
            RegionKind::LInfHoriz => "l-inf-horiz",
            RegionKind::CEps => "c-eps",
            RegionKind::CSafeable => "c-safeable",
        }
    }

    pub fn needs_upper(self) -> bool {
        matches!(self, RegionKind::CEps | RegionKind::CSafeable)
    }
}

impl std::str::FromStr for RegionKind {
    type Err = RegionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [RegionKind::LInf, RegionKind::LInfHoriz, RegionKind::CEps, RegionKind::CSafeable]
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| RegionError::UnknownKind(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RegionError {
    #[error("region {0:?} needs a two-sided advisory")]
    MissingUpperBound(RegionKind),
    #[error("safeable region needs ε ≥ 0, got {0}")]
    NegativeEpsilon(f64),
    #[error("unknown region kind `{0}`")]
    UnknownKind(String),
}

/// Which nominal a clause follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    /// Lower nominal, ownship passes on the advised side.
    Lower,
    /// Upper nominal, ownship stays on the other side.
    Upper,
}

/// A time at which the defining formula fails, with the nominal point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub t: f64,
    pub r_n: f64,
    pub h_n: f64,
    /// Closure rate instantiating the ∀ over `[0, v_max]`.
    pub r_v: Option<f64>,
}

/// Outcome of the follow-up ∃ of the safeable region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FollowUp {
    Found { side: Side, sense: Sense, v_target: f64 },
    /// No follow-up target with `|v| ≤ v_climb_max` works.
    NoneWithin { v_climb_max: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerdictReason {
    /// `w·v_lo > w·v_up`: the advisory itself fails the region's first conjunct.
    AdvisoryBounds,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionVerdict {
    pub kind: RegionKind,
    pub holds: bool,
    /// Worst clearance minus `h_p`, combined through the formula's ∧/∨.
    /// Positive iff `holds` (up to the strict boundary).
    pub margin: f64,
    /// Counterexample for the lower clause (or the only clause).
    pub witness: Option<Witness>,
    /// Counterexample for the upper clause of two-sided regions.
    pub upper_witness: Option<Witness>,
    pub follow_up: Option<FollowUp>,
    /// Zero closure rate and `|r| > r_p`: no conflict ever.
    pub degenerate_window: bool,
    pub reason: Option<VerdictReason>,
}

impl RegionVerdict {
    pub(crate) fn new(kind: RegionKind, holds: bool, margin: f64) -> RegionVerdict {
        RegionVerdict {
            kind,
            holds,
            margin,
            witness: None,
            upper_witness: None,
            follow_up: None,
            degenerate_window: false,
            reason: None,
        }
    }
}

/// One region test.
#[derive(Debug, Clone, Copy)]
pub struct RegionQuery<'a> {
    pub state: EncounterState,
    pub advisory: &'a Advisory,
    pub params: &'a ValidatedParams,
    pub kind: RegionKind,
}

impl<'a> RegionQuery<'a> {
    pub fn new(
        state: EncounterState,
        advisory: &'a Advisory,
        params: &'a ValidatedParams,
        kind: RegionKind,
    ) -> RegionQuery<'a> {
        RegionQuery { state, advisory, params, kind }
    }

    pub fn evaluate(&self) -> Result<RegionVerdict, RegionError> {
        evaluate(self)
    }
}

/// Dispatches to the exact evaluator of `q.kind`.
pub fn evaluate(q: &RegionQuery<'_>) -> Result<RegionVerdict, RegionError> {
    match q.kind {
        RegionKind::LInf => Ok(eval_l_inf(&q.state, q.advisory, q.params)),
        RegionKind::LInfHoriz => Ok(eval_l_inf_horiz(&q.state, q.advisory, q.params)),
        RegionKind::CEps => eval_c_eps(&q.state, q.advisory, q.params),
        RegionKind::CSafeable => eval_c_safeable(&q.state, q.advisory, q.params),
    }
}
