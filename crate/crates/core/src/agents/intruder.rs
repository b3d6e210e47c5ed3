//! Intruder policies.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::advisory::Advisory;
use crate::dynamics::{next_event, propagate, ControlFrame};
use crate::params::{IntruderChannel, ModelVariant, ValidatedParams};
use crate::state::EncounterState;

/// Shortest time between two intruder moves.
pub const DWELL_FLOOR: f64 = 0.1;

/// Fraction of a bound used for "extreme" moves, keeping them strictly inside.
pub const EXTREME_FRACTION: f64 = 1.0 - 1e-9;

/// The largest admissible magnitude below the open bound `c`.
pub fn extreme(c: f64) -> f64 {
    c * EXTREME_FRACTION
}

fn default_bang_dwell() -> f64 {
    0.5
}

fn default_dwell_min() -> f64 {
    DWELL_FLOOR
}

fn default_dwell_max() -> f64 {
    3.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum IntruderPolicy {
    /// Never maneuvers.
    None,
    /// Picks `±extreme(c)`, whichever brings `|h|` lower one segment ahead.
    BangBang {
        #[serde(default = "default_bang_dwell")]
        dwell_s: f64,
    },
    /// Seeded random accelerations held for random dwell times.
    RandomPiecewise {
        #[serde(default = "default_dwell_min")]
        dwell_min_s: f64,
        #[serde(default = "default_dwell_max")]
        dwell_max_s: f64,
    },
    /// `(t_s, a_i)` pairs in ft/s², each held until the next.
    Scripted { schedule: Vec<(f64, f64)> },
    /// `(t_s, r_v)` pairs in ft/s for the closure-rate game.
    ClosureSchedule { schedule: Vec<(f64, f64)> },
    /// Seeded random closure rates in `[0, v_max]`.
    RandomClosure {
        #[serde(default = "default_dwell_min")]
        dwell_min_s: f64,
        #[serde(default = "default_dwell_max")]
        dwell_max_s: f64,
    },
    /// Maneuvers away from the ownship at full strength.
    Cooperative,
}

impl IntruderPolicy {
    pub fn name(&self) -> &'static str {
        match self {
            IntruderPolicy::None => "none",
            IntruderPolicy::BangBang { .. } => "bang_bang",
            IntruderPolicy::RandomPiecewise { .. } => "random_piecewise",
            IntruderPolicy::Scripted { .. } => "scripted",
            IntruderPolicy::ClosureSchedule { .. } => "closure_schedule",
            IntruderPolicy::RandomClosure { .. } => "random_closure",
            IntruderPolicy::Cooperative => "cooperative",
        }
    }

    fn channel(&self) -> IntruderChannel {
        match self {
            IntruderPolicy::None => IntruderChannel::None,
            IntruderPolicy::Scripted { schedule } if schedule.iter().all(|&(_, a)| a == 0.0) => {
                IntruderChannel::None
            }
            IntruderPolicy::ClosureSchedule { .. } | IntruderPolicy::RandomClosure { .. } => {
                IntruderChannel::Horizontal
            }
            _ => IntruderChannel::Vertical,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolicyError {
    #[error("intruder policy `{policy}` needs a {needed:?} channel, which {variant} does not give it")]
    Capability { policy: &'static str, needed: IntruderChannel, variant: ModelVariant },
    #[error("schedule entry {index}: {reason}")]
    Schedule { index: usize, reason: String },
    #[error("dwell range [{min}, {max}] must satisfy {floor} ≤ min ≤ max")]
    Dwell { min: f64, max: f64, floor: f64 },
}

/// What the intruder may look at: the advisory and the ownship's current
/// acceleration, which it sees as an opponent in the game would.
#[derive(Debug, Clone, Copy)]
pub struct Visible<'a> {
    pub advisory: &'a Advisory,
    pub a_o: f64,
    pub epsilon: f64,
}

/// Next intruder controls and how long until it wants to move again.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntruderMove {
    pub a_i: f64,
    pub r_v: f64,
    pub dwell: f64,
}

/// A policy bound to a game and a seed.
#[derive(Debug, Clone)]
pub struct Intruder {
    policy: IntruderPolicy,
    c: f64,
    v_max: f64,
    r_v: f64,
    rng: ChaCha8Rng,
}

fn check_schedule(
    schedule: &[(f64, f64)],
    ok: impl Fn(f64) -> bool,
    what: &str,
) -> Result<(), PolicyError> {
    let mut last = f64::NEG_INFINITY;
    for (index, &(t, x)) in schedule.iter().enumerate() {
        let fail = |reason: String| Err(PolicyError::Schedule { index, reason });
        if !(t.is_finite() && t >= 0.0) {
            return fail(format!("time {t} must be finite and ≥ 0"));
        }
        if t <= last {
            return fail(format!("time {t} not after the previous entry"));
        }
        if !ok(x) {
            return fail(format!("{what} {x} out of range"));
        }
        last = t;
    }
    Ok(())
}

fn check_dwell(min: f64, max: f64) -> Result<(), PolicyError> {
    if min >= DWELL_FLOOR && min <= max && max.is_finite() {
        Ok(())
    } else {
        Err(PolicyError::Dwell { min, max, floor: DWELL_FLOOR })
    }
}

/// Entry in force at `t` (with a little slack for rounded switch times) and
/// the time until the next one.
fn lookup(schedule: &[(f64, f64)], t: f64) -> (Option<f64>, f64) {
    let slack = 1e-9 * (1.0 + t.abs());
    let idx = schedule.partition_point(|&(ti, _)| ti <= t + slack);
    let current = idx.checked_sub(1).map(|i| schedule[i].1);
    let dwell = schedule.get(idx).map_or(f64::INFINITY, |&(ti, _)| ti - t);
    (current, dwell)
}

impl Intruder {
    pub fn new(
        policy: IntruderPolicy,
        params: &ValidatedParams,
        seed: u64,
    ) -> Result<Intruder, PolicyError> {
        let variant = params.variant();
        let needed = policy.channel();
        if needed != IntruderChannel::None && needed != variant.intruder_channel() {
            return Err(PolicyError::Capability { policy: policy.name(), needed, variant });
        }
        let c = params.c;
        let v_max = params.v_max;
        match &policy {
            IntruderPolicy::Scripted { schedule } => {
                check_schedule(schedule, |a| a.abs() < c || a == 0.0, "acceleration")?
            }
            IntruderPolicy::ClosureSchedule { schedule } => {
                check_schedule(schedule, |r| (0.0..=v_max).contains(&r), "closure rate")?
            }
            IntruderPolicy::RandomPiecewise { dwell_min_s, dwell_max_s }
            | IntruderPolicy::RandomClosure { dwell_min_s, dwell_max_s } => {
                check_dwell(*dwell_min_s, *dwell_max_s)?
            }
            IntruderPolicy::BangBang { dwell_s } => check_dwell(*dwell_s, *dwell_s)?,
            IntruderPolicy::None | IntruderPolicy::Cooperative => {}
        }
        Ok(Intruder { policy, c, v_max, r_v: params.r_v, rng: ChaCha8Rng::seed_from_u64(seed) })
    }

    pub fn policy(&self) -> &IntruderPolicy {
        &self.policy
    }

    /// Whether the policy also reconsiders its move at ownship events.
    pub fn reacts(&self) -> bool {
        matches!(self.policy, IntruderPolicy::BangBang { .. } | IntruderPolicy::Cooperative)
    }

    /// Picks the next move at absolute time `t_abs`.
    pub fn act(&mut self, s: &EncounterState, t_abs: f64, vis: Visible<'_>) -> IntruderMove {
        let e = extreme(self.c);
        let fixed = |a_i: f64, dwell: f64, r_v: f64| IntruderMove { a_i, r_v, dwell };
        match &self.policy {
            IntruderPolicy::None => fixed(0.0, f64::INFINITY, self.r_v),
            IntruderPolicy::Cooperative => fixed(-vis.advisory.w() * e, f64::INFINITY, self.r_v),
            IntruderPolicy::BangBang { dwell_s } => {
                let a_i = bang_bang_choice(s, vis, e, self.r_v, *dwell_s);
                fixed(a_i, *dwell_s, self.r_v)
            }
            IntruderPolicy::RandomPiecewise { dwell_min_s, dwell_max_s } => {
                let (lo, hi) = (*dwell_min_s, *dwell_max_s);
                let a_i = if self.rng.gen_bool(0.5) {
                    if self.rng.gen_bool(0.5) { e } else { -e }
                } else {
                    self.rng.gen_range(-e..=e)
                };
                let dwell = if lo < hi { self.rng.gen_range(lo..hi) } else { lo };
                fixed(a_i, dwell, self.r_v)
            }
            IntruderPolicy::Scripted { schedule } => {
                let (a_i, dwell) = lookup(schedule, t_abs);
                fixed(a_i.unwrap_or(0.0), dwell, self.r_v)
            }
            IntruderPolicy::ClosureSchedule { schedule } => {
                let (r_v, dwell) = lookup(schedule, t_abs);
                fixed(0.0, dwell, r_v.unwrap_or(self.r_v))
            }
            IntruderPolicy::RandomClosure { dwell_min_s, dwell_max_s } => {
                let (lo, hi) = (*dwell_min_s, *dwell_max_s);
                let v_max = self.v_max;
                let r_v = if self.rng.gen_bool(0.5) {
                    if self.rng.gen_bool(0.5) { v_max } else { 0.0 }
                } else {
                    self.rng.gen_range(0.0..=v_max)
                };
                let dwell = if lo < hi { self.rng.gen_range(lo..hi) } else { lo };
                fixed(0.0, dwell, r_v)
            }
        }
    }
}

/// One-segment lookahead: the extreme that minimizes `|h|` at the next event
/// (or after `dwell`), ties going to the sign of `−w`.
pub fn bang_bang_choice(s: &EncounterState, vis: Visible<'_>, e: f64, r_v: f64, dwell: f64) -> f64 {
    let w = vis.advisory.w();
    let predict = |a_i: f64| {
        let u = ControlFrame::new(vis.a_o, a_i, r_v);
        let (_, dt) = next_event(s, &u, vis.advisory, vis.epsilon, dwell);
        propagate(s, &u, dt).h.abs()
    };
    let (toward, away) = (-w * e, w * e);
    if predict(away) < predict(toward) {
        away
    } else {
        toward
    }
}

/// Entry point mirroring the other agents.
pub fn intruder_move(
    intruder: &mut Intruder,
    s: &EncounterState,
    t_abs: f64,
    vis: Visible<'_>,
) -> IntruderMove {
    intruder.act(s, t_abs, vis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::advisory::Sense;
    use crate::params::{validate_params, Params};

    fn vert() -> ValidatedParams {
        validate_params(Params::default(), ModelVariant::InfVert).unwrap()
    }

    fn vis(adv: &Advisory, a_o: f64) -> Visible<'_> {
        Visible { advisory: adv, a_o, epsilon: -1.0 }
    }

    #[test]
    fn none_never_moves() {
        let p = validate_params(Params::default(), ModelVariant::InfNon).unwrap();
        let mut i = Intruder::new(IntruderPolicy::None, &p, 1).unwrap();
        let adv = Advisory::new(Sense::Up, 25.0);
        let m = i.act(&EncounterState::new(1000.0, 0.0, 0.0), 3.0, vis(&adv, 8.0));
        assert_eq!((m.a_i, m.r_v), (0.0, p.r_v));
    }

    #[test]
    fn bang_bang_chases_a_climbing_ownship() {
        let p = vert();
        let mut i = Intruder::new(IntruderPolicy::BangBang { dwell_s: 0.5 }, &p, 1).unwrap();
        let adv = Advisory::new(Sense::Up, 25.0);
        // Ownship 200 ft above (h < 0) and climbing.
        let s = EncounterState::new(3000.0, -200.0, 10.0);
        let m = i.act(&s, 0.0, vis(&adv, p.a_lo + p.c));
        assert_eq!(m.a_i, extreme(p.c));
        // exhaustive two-point comparison
        let h = |a_i| propagate(&s, &ControlFrame::new(p.a_lo + p.c, a_i, p.r_v), 0.5).h.abs();
        assert!(h(extreme(p.c)) < h(-extreme(p.c)));
    }

    #[test]
    fn bang_bang_tie_goes_against_sense() {
        let p = vert();
        let adv = Advisory::new(Sense::Up, 25.0);
        // Zero lookahead: both predictions equal.
        let a = bang_bang_choice(&EncounterState::new(3000.0, 0.0, 0.0), vis(&adv, 0.0), 1.0, p.r_v, 0.0);
        assert_eq!(a, -1.0);
    }

    #[test]
    fn scripted_replays_at_boundaries() {
        let p = vert();
        let c = p.c;
        let sched = vec![(0.0, c / 2.0), (5.0, -c / 2.0)];
        let mut i = Intruder::new(IntruderPolicy::Scripted { schedule: sched }, &p, 1).unwrap();
        let adv = Advisory::new(Sense::Up, 25.0);
        let s = EncounterState::default();
        assert_eq!(i.act(&s, 0.0, vis(&adv, 0.0)), IntruderMove { a_i: c / 2.0, r_v: p.r_v, dwell: 5.0 });
        let late = i.act(&s, 5.0 - 1e-12, vis(&adv, 0.0));
        assert_eq!(late.a_i, -c / 2.0);
        assert_eq!(late.dwell, f64::INFINITY);
    }

    #[test]
    fn capability_checked() {
        let p = validate_params(Params::default(), ModelVariant::InfNon).unwrap();
        let err = Intruder::new(IntruderPolicy::BangBang { dwell_s: 0.5 }, &p, 1).unwrap_err();
        assert!(matches!(err, PolicyError::Capability { .. }));
        let closure = IntruderPolicy::ClosureSchedule { schedule: vec![(0.0, 100.0)] };
        assert!(Intruder::new(closure.clone(), &vert(), 1).is_err());
        let p3 = validate_params(Params::default(), ModelVariant::InfHoriz).unwrap();
        assert!(Intruder::new(closure, &p3, 1).is_ok());
        let too_fast = IntruderPolicy::ClosureSchedule { schedule: vec![(0.0, 501.0)] };
        assert!(Intruder::new(too_fast, &p3, 1).is_err());
        let at_bound = IntruderPolicy::Scripted { schedule: vec![(0.0, vert().c)] };
        assert!(Intruder::new(at_bound, &vert(), 1).is_err());
    }

    #[test]
    fn random_stays_strictly_inside() {
        let p = vert();
        let policy = IntruderPolicy::RandomPiecewise { dwell_min_s: 0.1, dwell_max_s: 3.0 };
        let mut i = Intruder::new(policy.clone(), &p, 7).unwrap();
        let mut j = Intruder::new(policy, &p, 7).unwrap();
        let adv = Advisory::new(Sense::Up, 25.0);
        for k in 0..1000 {
            let m = i.act(&EncounterState::default(), k as f64, vis(&adv, 0.0));
            assert!(m.a_i.abs() < p.c);
            assert!(m.dwell >= DWELL_FLOOR);
            assert_eq!(m, j.act(&EncounterState::default(), k as f64, vis(&adv, 0.0)));
        }
    }
}
