//! Scenario generators shared by the integration suites.
#![allow(dead_code)]

use acaslab::advisory::{Advisory, Sense};
use acaslab::engine::Scenario;
use acaslab::params::{validate_params, ModelVariant, Params, ValidatedParams};
use acaslab::regions::{evaluate, NominalTrajectory, RegionKind, RegionQuery, RegionVerdict};
use acaslab::units::convert_rate;
use acaslab::EncounterState;
use rand::Rng;

/// Closure floor for horizons of the closure-rate game (ft/s).
pub const CLOSURE_FLOOR: f64 = 50.0;

pub fn params(m: ModelVariant) -> ValidatedParams {
    validate_params(Params::default(), m).unwrap()
}

/// Random advisory for `m`: target within ±3000 ft/min, and for the
/// two-sided variants a band 500 ft/min to the climb limit wide.
pub fn random_advisory<R: Rng>(rng: &mut R, m: ModelVariant, p: &ValidatedParams) -> Advisory {
    let sense = if rng.gen_bool(0.5) { Sense::Up } else { Sense::Down };
    let w = sense.sign();
    let v_lo = convert_rate(rng.gen_range(-3000.0..3000.0));
    let adv = Advisory::new(sense, v_lo);
    if !m.region_kind().needs_upper() {
        return adv;
    }
    let v_up = if rng.gen_bool(0.3) {
        w * p.v_climb_max
    } else {
        v_lo + w * convert_rate(rng.gen_range(500.0..6000.0))
    };
    adv.with_upper(v_up).unwrap()
}

/// Random relative state within conflict reach.
pub fn random_state<R: Rng>(rng: &mut R) -> EncounterState {
    EncounterState::new(
        rng.gen_range(-1000.0..12_000.0),
        rng.gen_range(-3000.0..3000.0),
        convert_rate(rng.gen_range(-4000.0..4000.0)),
    )
}

pub fn verdict(s: &EncounterState, adv: &Advisory, p: &ValidatedParams, kind: RegionKind) -> RegionVerdict {
    evaluate(&RegionQuery::new(*s, adv, p, kind)).unwrap()
}

/// State whose lower nominal passes `gap` feet from the puck edge at a time
/// inside the conflict window, so region margins land near zero.
pub fn near_boundary_state<R: Rng>(rng: &mut R, adv: &Advisory, p: &ValidatedParams, gap: f64) -> EncounterState {
    let v0 = convert_rate(rng.gen_range(-3000.0..3000.0));
    let t_star = rng.gen_range(0.0..30.0);
    let n = NominalTrajectory::lo(adv.w(), v0, adv.v_lo, p.a_lo, p.r_v);
    let side = if rng.gen_bool(0.8) { 1.0 } else { -1.0 };
    let h = n.height(t_star) - side * adv.w() * (p.h_p + gap);
    let r = p.r_v * t_star + rng.gen_range(-p.r_p..p.r_p);
    EncounterState::new(r, h, v0)
}

/// A state and advisory inside the variant's region, half of them close to
/// its boundary.
pub fn safe_start<R: Rng>(rng: &mut R, m: ModelVariant, p: &ValidatedParams) -> (EncounterState, Advisory) {
    let kind = m.region_kind();
    loop {
        let adv = random_advisory(rng, m, p);
        let s = if rng.gen_bool(0.5) {
            let gap = rng.gen_range(0.0..200.0);
            near_boundary_state(rng, &adv, p, gap)
        } else {
            random_state(rng)
        };
        if verdict(&s, &adv, p, kind).holds {
            return (s, adv);
        }
    }
}

/// Builder preset: default horizon, closure floor for the closure game.
pub fn scenario(p: ValidatedParams, s: EncounterState, adv: Advisory) -> acaslab::engine::ScenarioBuilder {
    Scenario::builder(p, s, adv).closure_floor(CLOSURE_FLOOR)
}
