//! Closed-form relative motion under piecewise-constant controls.
//!
//! With `r' = -r_v`, `h' = -v`, `v' = a_o - a_i` and constant inputs, every
//! trajectory piece is an exact quadratic, so nothing here integrates
//! numerically. Event times are roots of the affine rate `v(t)`.

use serde::{Deserialize, Serialize};

use crate::advisory::Advisory;
use crate::params::Params;
use crate::state::EncounterState;

/// Rates within this distance (ft/s) of an advisory bound are on the bound.
///
/// A crossing is only reported when the state starts strictly away from the
/// bound, so rounding after an exact event never triggers a second event.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// Controls held constant over one segment.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ControlFrame {
    /// Ownship vertical acceleration (ft/s²).
    pub a_o: f64,
    /// Intruder vertical acceleration (ft/s²).
    pub a_i: f64,
    /// Closure rate (ft/s).
    pub r_v: f64,
}

impl ControlFrame {
    pub fn new(a_o: f64, a_i: f64, r_v: f64) -> ControlFrame {
        ControlFrame { a_o, a_i, r_v }
    }

    pub fn relative_accel(&self) -> f64 {
        self.a_o - self.a_i
    }
}

/// Direction in which `w·v` passes a bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Crossing {
    Rising,
    Falling,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EventKind {
    /// `w·v` reaches `w·v_lo`.
    ReachLo(Crossing),
    /// `w·v` reaches `w·v_up`.
    ReachUp(Crossing),
    /// The time since the advisory reaches ε.
    TimeBound,
    /// External stop.
    Horizon,
}

impl EventKind {
    /// Lower number wins a tie.
    fn priority(self) -> u8 {
        match self {
            EventKind::TimeBound => 0,
            EventKind::ReachUp(_) => 1,
            EventKind::ReachLo(_) => 2,
            EventKind::Horizon => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EventKind::ReachLo(_) => "reach_lo",
            EventKind::ReachUp(_) => "reach_up",
            EventKind::TimeBound => "time_bound",
            EventKind::Horizon => "horizon",
        }
    }
}

/// Advances `s` by `dt` seconds under constant controls `u`.
pub fn propagate(s: &EncounterState, u: &ControlFrame, dt: f64) -> EncounterState {
    debug_assert!(dt >= 0.0, "negative step {dt}");
    let acc = u.relative_accel();
    EncounterState {
        r: s.r - u.r_v * dt,
        h: s.h - (s.v * dt + acc * dt * dt / 2.0),
        v: s.v + acc * dt,
        t: s.t + dt,
    }
}

/// Time until `w·v` reaches `w·target`, if it does so strictly in the future.
fn crossing(v: f64, acc: f64, w: f64, target: f64) -> Option<(f64, Crossing)> {
    if (v - target).abs() <= BOUNDARY_TOL || acc == 0.0 {
        return None;
    }
    let dt = (target - v) / acc;
    if !(dt > 0.0) || !dt.is_finite() {
        return None;
    }
    let dir = if w * acc > 0.0 { Crossing::Rising } else { Crossing::Falling };
    Some((dt, dir))
}

/// Earliest event of the current segment and the time until it.
///
/// `epsilon < 0` disables the time bound; `horizon` is the remaining time to
/// the external stop. Ties go to TimeBound, then ReachUp, ReachLo, Horizon.
pub fn next_event(
    s: &EncounterState,
    u: &ControlFrame,
    adv: &Advisory,
    epsilon: f64,
    horizon: f64,
) -> (EventKind, f64) {
    let acc = u.relative_accel();
    let w = adv.w();
    let mut best = (EventKind::Horizon, horizon.max(0.0));
    let mut offer = |kind: EventKind, dt: f64| {
        if dt < best.1 || (dt == best.1 && kind.priority() < best.0.priority()) {
            best = (kind, dt);
        }
    };
    if let Some((dt, dir)) = crossing(s.v, acc, w, adv.v_lo) {
        offer(EventKind::ReachLo(dir), dt);
    }
    if let Some(up) = adv.v_up {
        if let Some((dt, dir)) = crossing(s.v, acc, w, up) {
            offer(EventKind::ReachUp(dir), dt);
        }
    }
    if epsilon >= 0.0 {
        offer(EventKind::TimeBound, (epsilon - s.t).max(0.0));
    }
    best
}

/// Near mid-air collision: inside the puck, boundary included.
pub fn nmac(s: &EncounterState, p: &Params) -> bool {
    s.r.abs() <= p.r_p && s.h.abs() <= p.h_p
}

/// Real roots of `a x² + b x + c` using the cancellation-free formula.
pub(crate) fn quadratic_roots(a: f64, b: f64, c: f64) -> [Option<f64>; 2] {
    if a == 0.0 {
        if b == 0.0 {
            return [None, None];
        }
        return [Some(-c / b), None];
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return [None, None];
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    if q == 0.0 {
        return [Some(0.0), None];
    }
    [Some(q / a), Some(c / q)]
}

/// Earliest time in `[0, dt]` at which the segment starting at `s` is inside
/// the puck, found analytically rather than by sampling.
pub fn first_nmac_in_segment(
    s: &EncounterState,
    u: &ControlFrame,
    dt: f64,
    p: &Params,
) -> Option<f64> {
    let (mut lo, mut hi) = if u.r_v > 0.0 {
        ((s.r - p.r_p) / u.r_v, (s.r + p.r_p) / u.r_v)
    } else if s.r.abs() <= p.r_p {
        (0.0, f64::INFINITY)
    } else {
        return None;
    };
    lo = lo.max(0.0);
    hi = hi.min(dt);
    if lo > hi {
        return None;
    }
    let acc = u.relative_accel();
    let height = |tau: f64| s.h - (s.v * tau + acc * tau * tau / 2.0);
    let h_lo = height(lo);
    if h_lo.abs() <= p.h_p {
        return Some(lo);
    }
    // First entry into the band goes through the face we start outside of.
    let face = if h_lo > p.h_p { p.h_p } else { -p.h_p };
    quadratic_roots(-acc / 2.0, -s.v, s.h - face)
        .into_iter()
        .flatten()
        .filter(|&tau| tau > lo && tau <= hi)
        .min_by(f64::total_cmp)
}
