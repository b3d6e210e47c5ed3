//! Ownship winning strategies.
//!
//! The strategies are feedback on the relative climb rate only: they see the
//! state and the advisory, never the intruder's acceleration.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::advisory::Advisory;
use crate::dynamics::{Crossing, EventKind, BOUNDARY_TOL};
use crate::params::{ModelVariant, ValidatedParams};
use crate::state::EncounterState;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("strategy asks for a_o = {a_o} ft/s² but |a_o| ≤ {a_max}")]
pub struct StrategyBoundsError {
    pub a_o: f64,
    pub a_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("intruder bound estimate c_o = {c_o} must lie in (0, {c}]")]
pub struct EstimateError {
    pub c_o: f64,
    pub c: f64,
}

/// Where `w·v` sits relative to the advisory bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Band {
    Below,
    AtLo,
    Inside,
    AtUp,
    Above,
}

impl Band {
    /// Exact classification of `v`.
    pub fn of(v: f64, adv: &Advisory) -> Band {
        let w = adv.w();
        let (x, lo) = (w * v, w * adv.v_lo);
        if x < lo {
            return Band::Below;
        }
        if x == lo {
            return Band::AtLo;
        }
        match adv.v_up.map(|u| w * u) {
            Some(up) if x == up => Band::AtUp,
            Some(up) if x > up => Band::Above,
            Some(_) => Band::Inside,
            None => Band::Above,
        }
    }

    /// Band the rate moves into right after an event, or the exact band
    /// with rates within [`BOUNDARY_TOL`] of a bound treated as on it.
    pub fn after(v: f64, adv: &Advisory, event: Option<EventKind>) -> Band {
        let one_sided_above = if adv.v_up.is_some() { Band::Inside } else { Band::Above };
        match event {
            Some(EventKind::ReachLo(Crossing::Rising)) => one_sided_above,
            Some(EventKind::ReachLo(Crossing::Falling)) => Band::Below,
            Some(EventKind::ReachUp(Crossing::Rising)) => Band::Above,
            Some(EventKind::ReachUp(Crossing::Falling)) => Band::Inside,
            _ => {
                if (v - adv.v_lo).abs() <= BOUNDARY_TOL {
                    Band::of(adv.v_lo, adv)
                } else if let Some(up) = adv.v_up.filter(|u| (v - u).abs() <= BOUNDARY_TOL) {
                    Band::of(up, adv)
                } else {
                    Band::of(v, adv)
                }
            }
        }
    }
}

/// Which case split a variant's proof uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rule {
    /// Accelerate at `a_lo` until compliant, then hold (non-maneuvering,
    /// infinite time; also the horizontal-intruder game).
    HoldAtLo,
    /// Compensate `c` on top of `a_lo`, and keep pushing `c` once compliant.
    CompensateC,
    /// Two-sided, non-maneuvering: accelerate below `v_lo`, coast otherwise.
    TwoSidedCoast,
    /// Two-sided against a maneuvering intruder with estimate `c_o`.
    TwoSidedCompensate,
    /// Not a winning strategy: fly the minimally compliant nominal, braking
    /// at `a_max` when overcompliant. Used to demonstrate counterexamples.
    NominalReplay,
}

impl Rule {
    pub fn winning(m: ModelVariant) -> Rule {
        match m {
            ModelVariant::InfNon | ModelVariant::InfHoriz => Rule::HoldAtLo,
            ModelVariant::InfVert => Rule::CompensateC,
            ModelVariant::BoundNon | ModelVariant::SafeableNon => Rule::TwoSidedCoast,
            ModelVariant::BoundVert | ModelVariant::SafeableVert => Rule::TwoSidedCompensate,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OwnshipStrategy {
    params: ValidatedParams,
    rule: Rule,
    c_o: f64,
}

impl OwnshipStrategy {
    /// The winning strategy of the params' variant, with `c_o = c`.
    pub fn new(params: ValidatedParams) -> OwnshipStrategy {
        OwnshipStrategy { params, rule: Rule::winning(params.variant()), c_o: params.c }
    }

    pub fn nominal_replay(params: ValidatedParams) -> OwnshipStrategy {
        OwnshipStrategy { rule: Rule::NominalReplay, ..OwnshipStrategy::new(params) }
    }

    pub fn with_estimate(mut self, c_o: f64) -> Result<OwnshipStrategy, EstimateError> {
        if !(c_o > 0.0 && c_o <= self.params.c) {
            return Err(EstimateError { c_o, c: self.params.c });
        }
        self.c_o = c_o;
        Ok(self)
    }

    pub fn rule(&self) -> Rule {
        self.rule
    }

    pub fn variant(&self) -> ModelVariant {
        self.params.variant()
    }

    pub fn c_o(&self) -> f64 {
        self.c_o
    }

    /// Renegotiation: an intruder move at or beyond the estimate makes the
    /// ownship fall back to the worst case `c`. Returns whether it changed.
    pub fn raise_estimate(&mut self, a_i: f64) -> bool {
        if a_i.abs() >= self.c_o && self.c_o < self.params.c {
            self.c_o = self.params.c;
            return true;
        }
        false
    }

    /// The strategy's case split, literally, on the exact band of `s.v`.
    pub fn accel(&self, s: &EncounterState, adv: &Advisory) -> Result<f64, StrategyBoundsError> {
        self.accel_in(Band::of(s.v, adv), adv)
    }

    /// Same, but at an event the band is the one the rate moves into.
    pub fn accel_after(
        &self,
        s: &EncounterState,
        adv: &Advisory,
        event: Option<EventKind>,
    ) -> Result<f64, StrategyBoundsError> {
        // Against a maneuvering intruder a coasting rate that has just reached
        // a bound could be pushed straight back out, so keep pushing inward
        // until the opposite bound.
        let band = match (self.rule, event) {
            (Rule::NominalReplay, Some(EventKind::ReachLo(_))) => Band::AtLo,
            (Rule::TwoSidedCompensate, Some(EventKind::ReachLo(Crossing::Rising))) => Band::AtLo,
            (Rule::TwoSidedCompensate, Some(EventKind::ReachUp(Crossing::Falling))) => Band::AtUp,
            _ => Band::after(s.v, adv, event),
        };
        self.accel_in(band, adv)
    }

    fn accel_in(&self, band: Band, adv: &Advisory) -> Result<f64, StrategyBoundsError> {
        let p = &self.params;
        let w = adv.w();
        let a_o = match self.rule {
            Rule::HoldAtLo | Rule::TwoSidedCoast => match band {
                Band::Below => w * p.a_lo,
                _ => 0.0,
            },
            Rule::CompensateC => match band {
                Band::Below => w * (p.a_lo + p.c),
                _ => w * p.c,
            },
            // At v_up exactly the upper case wins over the middle one, so an
            // intruder push can never carry the rate past v_up unnoticed.
            Rule::TwoSidedCompensate => match band {
                Band::Below | Band::AtLo => w * (p.a_lo + self.c_o),
                Band::Inside => 0.0,
                Band::AtUp | Band::Above => -w * self.c_o,
            },
            Rule::NominalReplay => match band {
                Band::Below => w * p.a_lo,
                Band::AtLo => 0.0,
                Band::Inside | Band::AtUp | Band::Above => -w * p.a_max,
            },
        };
        if a_o.abs() > p.a_max {
            return Err(StrategyBoundsError { a_o, a_max: p.a_max });
        }
        Ok(a_o)
    }
}

/// The strategy's acceleration at `s` under `adv`.
pub fn ownship_accel(
    strategy: &OwnshipStrategy,
    s: &EncounterState,
    adv: &Advisory,
) -> Result<f64, StrategyBoundsError> {
    strategy.accel(s, adv)
}
