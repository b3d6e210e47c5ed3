//! Brute-force region oracle.
//!
//! Transcribes the region formulas a second time, without the candidate-time
//! reduction: the nominal comes from its own copy of the two-case formulas,
//! time is sampled every `dt` up to `t_max`, closure rates on a 1000-step grid,
//! and follow-up targets on a five-point grid. Beyond `t_max` the conflict
//! either ends or persists forever; in the latter case a few far samples
//! decide whether the clearance keeps shrinking. Results are exact up to the
//! grid resolution, see [`tolerance_band`].

use super::{RegionError, RegionKind, RegionQuery, RegionVerdict, Witness};
use crate::params::Params;
use crate::state::EncounterState;

const RATE_STEPS: usize = 1000;
const FOLLOW_UP_STEPS: usize = 4;
const FAR_DECADES: i32 = 4;

/// Lower nominal height, straight from its two cases.
fn a_lo(v: f64, w: f64, v_lo: f64, a_lo: f64, t: f64) -> f64 {
    let t_lo = f64::max(0.0, w * (v_lo - v)) / a_lo;
    if 0.0 <= t && t < t_lo {
        w * a_lo / 2.0 * t * t + v * t
    } else {
        v_lo * t - w * f64::max(0.0, w * (v_lo - v)).powi(2) / (2.0 * a_lo)
    }
}

/// Upper nominal height; an initial rate beyond `v_up` is kept.
fn a_up(v: f64, w: f64, v_up: f64, a_up: f64, t: f64) -> f64 {
    let t_up = f64::max(0.0, w * (v_up - v)) / a_up;
    if 0.0 <= t && t < t_up {
        w * a_up / 2.0 * t * t + v * t
    } else {
        w * f64::max(w * v_up, w * v) * t - w * f64::max(0.0, w * (v_up - v)).powi(2) / (2.0 * a_up)
    }
}

/// Closure-rate model of a clause.
#[derive(Clone, Copy)]
enum Closure {
    Fixed(f64),
    /// Any rate in `[0, v_max]`, sampled.
    Range(f64),
}

/// Whether the intruder can be within `r_p` horizontally at `t`, and with
/// which closure rate.
fn in_range(r: f64, r_p: f64, closure: Closure, t: f64) -> Option<f64> {
    match closure {
        Closure::Fixed(r_v) => ((r - r_v * t).abs() <= r_p).then_some(r_v),
        Closure::Range(v_max) => {
            // The nearest grid rate to r/t is the best one on the grid.
            let step = v_max / RATE_STEPS as f64;
            let ideal = if t > 0.0 { r / t } else { 0.0 };
            let j = (ideal / step).round().clamp(0.0, RATE_STEPS as f64);
            let r_v = j * step;
            ((r - r_v * t).abs() <= r_p).then_some(r_v)
        }
    }
}

/// Whether the conflict still exists for arbitrarily large `t`.
fn persists(r: f64, r_p: f64, closure: Closure) -> bool {
    match closure {
        Closure::Fixed(r_v) => r_v == 0.0 && r.abs() <= r_p,
        Closure::Range(_) => r + r_p >= 0.0,
    }
}

struct Sampled {
    holds: bool,
    margin: f64,
    witness: Option<Witness>,
}

/// Samples `∀t: in range → sense·(height(t) − h) > h_p` over `[0, t_end]`.
fn sample_clause(
    r: f64,
    h: f64,
    p: &Params,
    closure: Closure,
    sense: f64,
    height: &dyn Fn(f64) -> f64,
    dt: f64,
    t_end: f64,
    unbounded: bool,
) -> Sampled {
    let mut margin = f64::INFINITY;
    let mut witness = None;
    let mut check = |t: f64, margin: &mut f64| -> Option<f64> {
        let r_v = in_range(r, p.r_p, closure, t)?;
        let h_n = height(t);
        let m = sense * (h_n - h) - p.h_p;
        if m < *margin {
            *margin = m;
        }
        if m <= 0.0 && witness.is_none() {
            witness = Some(Witness { t, r_n: r_v * t, h_n, r_v: Some(r_v) });
        }
        Some(m)
    };
    let steps = (t_end / dt).floor() as usize;
    for k in 0..=steps {
        check(k as f64 * dt, &mut margin);
    }
    if unbounded && persists(r, p.r_p, closure) {
        // The conflict never ends, so far samples need no range test; the
        // rate grid could not resolve the tiny closure rates there anyway.
        let mut last = None;
        for k in 1..=FAR_DECADES {
            let t = t_end * 10f64.powi(k);
            let m = sense * (height(t) - h) - p.h_p;
            margin = margin.min(m);
            if last.is_some_and(|prev| m < prev) {
                margin = f64::NEG_INFINITY;
            }
            last = Some(m);
        }
    }
    Sampled { holds: margin > 0.0, margin, witness }
}

/// Samples L⁻¹ for sense `w`, target `v_lo` at the state `s`.
fn sample_l_inf(s: &EncounterState, w: f64, v_lo: f64, p: &Params, dt: f64, t_max: f64) -> Sampled {
    let height = |t: f64| a_lo(s.v, w, v_lo, p.a_lo, t);
    sample_clause(s.r, s.h, p, Closure::Fixed(p.r_v), w, &height, dt, t_max, true)
}

/// Samples the lower and upper ε-clauses of the two-sided regions.
fn sample_two_sided(
    s: &EncounterState,
    w: f64,
    v_lo: f64,
    v_up: f64,
    p: &Params,
    dt: f64,
    t_max: f64,
) -> (Sampled, Sampled) {
    let (t_end, unbounded) = if p.epsilon >= 0.0 { (p.epsilon.min(t_max), false) } else { (t_max, true) };
    let lo = |t: f64| a_lo(s.v, w, v_lo, p.a_lo, t);
    let up = |t: f64| a_up(s.v, w, v_up, p.a_up, t);
    let closure = Closure::Fixed(p.r_v);
    (
        sample_clause(s.r, s.h, p, closure, w, &lo, dt, t_end, unbounded),
        sample_clause(s.r, s.h, p, closure, -w, &up, dt, t_end, unbounded),
    )
}

/// Grid of follow-up targets between `from` and `to`.
fn target_grid(from: f64, to: f64) -> impl Iterator<Item = f64> {
    (0..=FOLLOW_UP_STEPS).map(move |k| from + (to - from) * k as f64 / FOLLOW_UP_STEPS as f64)
}

/// Samples `∃ target: L⁻¹` from the end state of a nominal.
fn sample_follow_up(
    s: &EncounterState,
    h_ex: f64,
    v_ex: f64,
    sense: f64,
    targets: impl Iterator<Item = f64>,
    p: &Params,
    dt: f64,
    t_max: f64,
) -> f64 {
    let shifted = EncounterState { r: s.r - p.r_v * p.epsilon, h: s.h - h_ex, v: v_ex, t: 0.0 };
    targets
        .map(|v| sample_l_inf(&shifted, sense, v, p, dt, t_max).margin)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// End of the ε window along each nominal, from the two-case formulas.
fn ends(v: f64, w: f64, v_lo: f64, v_up: f64, p: &Params) -> ((f64, f64), (f64, f64)) {
    let e = p.epsilon;
    let t_lo = f64::max(0.0, w * (v_lo - v)) / p.a_lo;
    let lower = if e < t_lo {
        (w * p.a_lo / 2.0 * e * e + v * e, w * p.a_lo * e + v)
    } else {
        (v_lo * e - w * f64::max(0.0, w * (v_lo - v)).powi(2) / (2.0 * p.a_lo), v_lo)
    };
    let t_up = f64::max(0.0, w * (v_up - v)) / p.a_up;
    let upper = if e < t_up {
        (w * p.a_up / 2.0 * e * e + v * e, w * p.a_up * e + v)
    } else {
        let rate = w * f64::max(w * v_up, w * v);
        (rate * e - w * f64::max(0.0, w * (v_up - v)).powi(2) / (2.0 * p.a_up), rate)
    };
    (lower, upper)
}

/// Sampling evaluation of `q` with time step `dt` up to `t_max`.
pub fn oracle_eval(q: &RegionQuery<'_>, dt: f64, t_max: f64) -> Result<RegionVerdict, RegionError> {
    let s = &q.state;
    let p: &Params = q.params;
    let w = q.advisory.w();
    let v_lo = q.advisory.v_lo;
    let verdict = |holds: bool, margin: f64, witness: Option<Witness>| {
        let mut v = RegionVerdict::new(q.kind, holds, margin);
        v.witness = witness;
        v
    };
    match q.kind {
        RegionKind::LInf => {
            let c = sample_l_inf(s, w, v_lo, p, dt, t_max);
            Ok(verdict(c.holds, c.margin, c.witness))
        }
        RegionKind::LInfHoriz => {
            let height = |t: f64| a_lo(s.v, w, v_lo, p.a_lo, t);
            let c = sample_clause(s.r, s.h, p, Closure::Range(p.v_max), w, &height, dt, t_max, true);
            Ok(verdict(c.holds, c.margin, c.witness))
        }
        RegionKind::CEps | RegionKind::CSafeable => {
            let v_up = q.advisory.v_up.ok_or(RegionError::MissingUpperBound(q.kind))?;
            if w * v_lo > w * v_up {
                return Ok(verdict(false, f64::NEG_INFINITY, None));
            }
            let (lower, upper) = sample_two_sided(s, w, v_lo, v_up, p, dt, t_max);
            if q.kind == RegionKind::CEps {
                let margin = lower.margin.max(upper.margin);
                return Ok(verdict(margin > 0.0, margin, lower.witness));
            }
            if p.epsilon < 0.0 {
                return Err(RegionError::NegativeEpsilon(p.epsilon));
            }
            let ((h_l, v_l), (h_u, v_u)) = ends(s.v, w, v_lo, v_up, p);
            let reach = w * p.v_climb_max;
            let lo_follow = sample_follow_up(s, h_l, v_l, w, target_grid(v_lo, reach), p, dt, t_max);
            let up_follow = sample_follow_up(s, h_u, v_u, -w, target_grid(0.0, -reach), p, dt, t_max);
            let margin = lower.margin.min(lo_follow).max(upper.margin.min(up_follow));
            Ok(verdict(margin > 0.0, margin, lower.witness))
        }
    }
}

/// Clearance error the sampling grid can hide: twice the largest vertical
/// rate on the nominal times `dt`.
pub fn tolerance_band(q: &RegionQuery<'_>, dt: f64, t_max: f64) -> f64 {
    let a = match q.kind {
        RegionKind::CEps | RegionKind::CSafeable => q.params.a_up.max(q.params.a_lo),
        _ => q.params.a_lo,
    };
    let rate = q
        .state
        .v
        .abs()
        .max(q.advisory.v_lo.abs())
        .max(q.advisory.v_up.map_or(0.0, f64::abs));
    2.0 * dt * (rate + a * t_max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Agreement {
    Agree,
    /// Verdicts differ but the exact margin is inside the tolerance band.
    Boundary,
    Disagree,
}

pub fn compare(exact: &RegionVerdict, oracle: &RegionVerdict, band: f64) -> Agreement {
    if exact.holds == oracle.holds {
        Agreement::Agree
    } else if exact.margin.abs() <= band {
        Agreement::Boundary
    } else {
        Agreement::Disagree
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::advisory::{Advisory, Sense};
    use crate::params::{validate_params, ModelVariant};
    use crate::regions::evaluate;

    #[test]
    fn oracle_matches_examples() {
        let p = Params { a_lo: 8.0435, a_up: 16.087, ..Params::default() };
        let p1 = validate_params(p, ModelVariant::InfNon).unwrap();
        let adv = Advisory::new(Sense::Up, 25.0);
        let origin = RegionQuery::new(EncounterState::new(0.0, 0.0, 0.0), &adv, &p1, RegionKind::LInf);
        assert!(!oracle_eval(&origin, 0.01, 300.0).unwrap().holds);
        let far = RegionQuery::new(EncounterState::new(10_000.0, 0.0, 0.0), &adv, &p1, RegionKind::LInf);
        assert!(oracle_eval(&far, 0.01, 300.0).unwrap().holds);

        let p4 = validate_params(Params { epsilon: 10.0, ..p }, ModelVariant::BoundNon).unwrap();
        let two = Advisory::two_sided(Sense::Up, 25.0, 50.0).unwrap();
        let q = RegionQuery::new(EncounterState::new(4000.0, 0.0, 0.0), &two, &p4, RegionKind::CEps);
        let exact = evaluate(&q).unwrap();
        let sampled = oracle_eval(&q, 0.005, 300.0).unwrap();
        assert_eq!(exact.holds, sampled.holds);
    }

    #[test]
    fn stationary_tail_is_decided_by_slope() {
        let p = validate_params(Params { r_v: 0.0, ..Params::default() }, ModelVariant::InfNon).unwrap();
        // Inside the horizontal range forever, ownship 150 ft above but
        // told to descend slowly: eventually it crosses the intruder.
        let adv = Advisory::new(Sense::Up, -1.0);
        let q = RegionQuery::new(EncounterState::new(0.0, -150.0, -1.0), &adv, &p, RegionKind::LInf);
        let sampled = oracle_eval(&q, 0.01, 300.0).unwrap();
        assert!(!sampled.holds);
        assert_eq!(sampled.margin, f64::NEG_INFINITY);
        assert!(!evaluate(&q).unwrap().holds);
    }
}
