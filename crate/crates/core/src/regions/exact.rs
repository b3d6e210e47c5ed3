//! Exact region evaluators.
//!
//! Each ∀t is a minimum of a piecewise-quadratic clearance over a window, so
//! only the window ends, the branch switch and the parabola vertex matter.
//! An unbounded window is settled by the sign of the final slope.

use serde::{Deserialize, Serialize};

use super::nominal::NominalTrajectory;
use super::{FollowUp, RegionError, RegionKind, RegionVerdict, Side, VerdictReason, Witness};
use crate::advisory::Advisory;
use crate::params::{Params, ValidatedParams};
use crate::state::EncounterState;

/// Closed time interval, `hi` possibly infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Window {
    pub lo: f64,
    pub hi: f64,
}

/// Times at which `|r − r_v t| ≤ r_p` for a fixed closure rate.
pub(crate) fn fixed_window(r: f64, r_p: f64, r_v: f64) -> Option<Window> {
    if r_v > 0.0 {
        let hi = (r + r_p) / r_v;
        if hi < 0.0 {
            return None;
        }
        Some(Window { lo: ((r - r_p) / r_v).max(0.0), hi })
    } else if r.abs() <= r_p {
        Some(Window { lo: 0.0, hi: f64::INFINITY })
    } else {
        None
    }
}

/// Times at which some closure rate in `[0, v_max]` puts the intruder in range.
pub(crate) fn horiz_window(r: f64, r_p: f64, v_max: f64) -> Option<Window> {
    if r + r_p < 0.0 {
        return None;
    }
    Some(Window { lo: ((r - r_p) / v_max).max(0.0), hi: f64::INFINITY })
}

/// Restricts a window to `t ≤ ε`; negative ε leaves it alone.
pub(crate) fn clip(win: Option<Window>, epsilon: f64) -> Option<Window> {
    let w = win?;
    if epsilon < 0.0 {
        return Some(w);
    }
    let hi = w.hi.min(epsilon);
    (w.lo <= hi).then_some(Window { lo: w.lo, hi })
}

/// One `∀t ∈ window: s·(h_n(t) − h) > h_p` statement.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Clause {
    pub holds: bool,
    pub margin: f64,
    /// Failing time, if any.
    pub t_fail: Option<f64>,
}

pub(crate) fn clause(
    n: &NominalTrajectory,
    s: f64,
    h: f64,
    h_p: f64,
    win: Option<Window>,
) -> Clause {
    let Some(Window { lo, hi }) = win else {
        return Clause { holds: true, margin: f64::INFINITY, t_fail: None };
    };
    let f = |t: f64| s * (n.height(t) - h);
    let ts = n.t_switch();
    let vertex = -n.w * n.v0 / n.a;
    let mut candidates = [Some(lo), None, None, None];
    if hi.is_finite() {
        candidates[1] = Some(hi);
    }
    if ts >= lo && ts <= hi {
        candidates[2] = Some(ts);
    }
    if ts > 0.0 && vertex >= lo && vertex <= hi.min(ts) {
        candidates[3] = Some(vertex);
    }
    let (mut min, mut at) = (f64::INFINITY, lo);
    for t in candidates.into_iter().flatten() {
        let v = f(t);
        if v < min {
            (min, at) = (v, t);
        }
    }
    if hi.is_infinite() && s * n.final_rate() < 0.0 {
        min = f64::NEG_INFINITY;
        at = tail_violation(&f, lo.max(ts), s * n.final_rate(), h_p);
    }
    let holds = min > h_p;
    let t_fail = (!holds).then(|| n.first_within(h, h_p, lo, hi).unwrap_or(at));
    Clause { holds, margin: min - h_p, t_fail }
}

/// A time on a receding straight tail where the clearance is at most `h_p`.
fn tail_violation(f: &impl Fn(f64) -> f64, t0: f64, slope: f64, h_p: f64) -> f64 {
    let mut t = t0 + (f(t0) - h_p).max(0.0) / -slope;
    while f(t) > h_p {
        t = t * (1.0 + 1e-12) + 1e-9;
    }
    t
}

fn lower_nominal(s: &EncounterState, w: f64, v_lo: f64, p: &Params, r_v: f64) -> NominalTrajectory {
    NominalTrajectory::lo(w, s.v, v_lo, p.a_lo, r_v)
}

fn witness_at(n: &NominalTrajectory, t: f64) -> Witness {
    let (r_n, h_n) = n.point(t);
    Witness { t, r_n, h_n, r_v: None }
}

/// L⁻¹ for sense `w`, target `v_lo` and closure rate `r_v`.
pub(crate) fn l_inf_raw(
    s: &EncounterState,
    w: f64,
    v_lo: f64,
    p: &Params,
    r_v: f64,
) -> RegionVerdict {
    let n = lower_nominal(s, w, v_lo, p, r_v);
    let win = fixed_window(s.r, p.r_p, r_v);
    let c = clause(&n, w, s.h, p.h_p, win);
    let mut v = RegionVerdict::new(RegionKind::LInf, c.holds, c.margin);
    v.degenerate_window = r_v == 0.0 && s.r.abs() > p.r_p;
    v.witness = c.t_fail.map(|t| witness_at(&n, t));
    v
}

/// Infinite-time safe region at the configured closure rate.
pub fn eval_l_inf(s: &EncounterState, adv: &Advisory, p: &ValidatedParams) -> RegionVerdict {
    l_inf_raw(s, adv.w(), adv.v_lo, p, p.r_v)
}

/// Infinite-time safe region for every closure rate in `[0, v_max]`.
pub fn eval_l_inf_horiz(s: &EncounterState, adv: &Advisory, p: &ValidatedParams) -> RegionVerdict {
    let w = adv.w();
    let n = lower_nominal(s, w, adv.v_lo, p, p.v_max);
    let c = clause(&n, w, s.h, p.h_p, horiz_window(s.r, p.r_p, p.v_max));
    let mut v = RegionVerdict::new(RegionKind::LInfHoriz, c.holds, c.margin);
    v.witness = c.t_fail.map(|t| {
        let r_v = if t > 0.0 { (s.r / t).clamp(0.0, p.v_max) } else { 0.0 };
        Witness { t, r_n: r_v * t, h_n: n.height(t), r_v: Some(r_v) }
    });
    v
}

struct TwoSided {
    lower: Clause,
    upper: Clause,
    lo_nom: NominalTrajectory,
    up_nom: NominalTrajectory,
}

fn two_sided(s: &EncounterState, w: f64, v_lo: f64, v_up: f64, p: &Params) -> TwoSided {
    let win = clip(fixed_window(s.r, p.r_p, p.r_v), p.epsilon);
    let lo_nom = lower_nominal(s, w, v_lo, p, p.r_v);
    let up_nom = NominalTrajectory::up(w, s.v, v_up, p.a_up, p.r_v);
    TwoSided {
        lower: clause(&lo_nom, w, s.h, p.h_p, win),
        upper: clause(&up_nom, -w, s.h, p.h_p, win),
        lo_nom,
        up_nom,
    }
}

fn upper_of(adv: &Advisory, kind: RegionKind) -> Result<f64, RegionError> {
    adv.v_up.ok_or(RegionError::MissingUpperBound(kind))
}

fn bounds_failure(kind: RegionKind) -> RegionVerdict {
    let mut v = RegionVerdict::new(kind, false, f64::NEG_INFINITY);
    v.reason = Some(VerdictReason::AdvisoryBounds);
    v
}

/// Two-sided region over the next ε seconds (all time for ε < 0).
pub fn eval_c_eps(
    s: &EncounterState,
    adv: &Advisory,
    p: &ValidatedParams,
) -> Result<RegionVerdict, RegionError> {
    let v_up = upper_of(adv, RegionKind::CEps)?;
    let w = adv.w();
    if w * adv.v_lo > w * v_up {
        return Ok(bounds_failure(RegionKind::CEps));
    }
    let ts = two_sided(s, w, adv.v_lo, v_up, p);
    let holds = ts.lower.holds || ts.upper.holds;
    let mut v = RegionVerdict::new(RegionKind::CEps, holds, ts.lower.margin.max(ts.upper.margin));
    v.degenerate_window = p.r_v == 0.0 && s.r.abs() > p.r_p;
    if !holds {
        v.witness = ts.lower.t_fail.map(|t| witness_at(&ts.lo_nom, t));
        v.upper_witness = ts.upper.t_fail.map(|t| witness_at(&ts.up_nom, t));
    }
    Ok(v)
}

/// Ownship state at the end of the ε window along one nominal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremeState {
    pub h_ex: f64,
    pub v_ex: f64,
    pub side: Side,
}

/// Height and rate reached after ε seconds on the lower (`a = a_lo`,
/// `v_target = v_lo`) or upper (`a = a_up`, `v_target = v_up`) nominal.
pub fn extreme_state(side: Side, v: f64, w: f64, v_target: f64, a: f64, epsilon: f64) -> ExtremeState {
    let short = (w * (v_target - v)).max(0.0);
    let t_switch = short / a;
    let (h_ex, v_ex) = if epsilon < t_switch {
        (w * a / 2.0 * epsilon * epsilon + v * epsilon, w * a * epsilon + v)
    } else {
        let rate = match side {
            Side::Lower => v_target,
            Side::Upper => w * (w * v_target).max(w * v),
        };
        (rate * epsilon - w * short * short / (2.0 * a), rate)
    };
    ExtremeState { h_ex, v_ex, side }
}

/// Best follow-up from the state after ε: first candidate target that makes
/// L⁻¹ hold, plus the largest L⁻¹ margin seen.
fn follow_up(
    s: &EncounterState,
    ex: &ExtremeState,
    sense: f64,
    candidates: &[f64],
    p: &Params,
) -> (Option<f64>, f64) {
    let shifted = EncounterState { r: s.r - p.r_v * p.epsilon, h: s.h - ex.h_ex, v: ex.v_ex, t: 0.0 };
    let mut found = None;
    let mut best = f64::NEG_INFINITY;
    for &target in candidates {
        let v = l_inf_raw(&shifted, sense, target, p, p.r_v);
        best = best.max(v.margin);
        if v.holds && found.is_none() {
            found = Some(target);
        }
    }
    (found, best)
}

/// Safeable region: safe for ε seconds and some follow-up advisory of either
/// sense is L⁻¹-safe from wherever the nominal ends up.
///
/// The follow-up target ranges over rates up to `v_climb_max`; since L⁻¹ is
/// monotone in the target, the strongest target decides. The current `v_lo`
/// is tried first so that an L⁻¹-safe state reports itself as its own
/// follow-up.
pub fn eval_c_safeable(
    s: &EncounterState,
    adv: &Advisory,
    p: &ValidatedParams,
) -> Result<RegionVerdict, RegionError> {
    let v_up = upper_of(adv, RegionKind::CSafeable)?;
    if p.epsilon < 0.0 {
        return Err(RegionError::NegativeEpsilon(p.epsilon));
    }
    let w = adv.w();
    if w * adv.v_lo > w * v_up {
        return Ok(bounds_failure(RegionKind::CSafeable));
    }
    let ts = two_sided(s, w, adv.v_lo, v_up, p);

    let ex_lo = extreme_state(Side::Lower, s.v, w, adv.v_lo, p.a_lo, p.epsilon);
    let (lo_found, lo_margin) = follow_up(s, &ex_lo, w, &[adv.v_lo, w * p.v_climb_max], p);
    let ex_up = extreme_state(Side::Upper, s.v, w, v_up, p.a_up, p.epsilon);
    let (up_found, up_margin) = follow_up(s, &ex_up, -w, &[-w * p.v_climb_max], p);

    let lower_ok = ts.lower.holds && lo_found.is_some();
    let upper_ok = ts.upper.holds && up_found.is_some();
    let margin = ts.lower.margin.min(lo_margin).max(ts.upper.margin.min(up_margin));
    let holds = lower_ok || upper_ok;
    let mut v = RegionVerdict::new(RegionKind::CSafeable, holds, margin);
    v.degenerate_window = p.r_v == 0.0 && s.r.abs() > p.r_p;
    let sense = adv.sense;
    v.follow_up = if lower_ok {
        lo_found.map(|t| FollowUp::Found { side: Side::Lower, sense, v_target: t })
    } else if upper_ok {
        up_found.map(|t| FollowUp::Found { side: Side::Upper, sense: sense.flip(), v_target: t })
    } else if ts.lower.holds || ts.upper.holds {
        Some(FollowUp::NoneWithin { v_climb_max: p.v_climb_max })
    } else {
        None
    };
    if !holds {
        v.witness = ts.lower.t_fail.map(|t| witness_at(&ts.lo_nom, t));
        v.upper_witness = ts.upper.t_fail.map(|t| witness_at(&ts.up_nom, t));
    }
    Ok(v)
}
