//! Region evaluators against hand-derived values, the sampling oracle and
//! their structural properties.

mod common;

use acaslab::advisory::{Advisory, Sense};
use acaslab::params::{validate_params, ModelVariant, Params, ValidatedParams};
use acaslab::regions::oracle::tolerance_band;
use acaslab::regions::{
    compare, eval_l_inf, extreme_state, oracle_eval, Agreement, FollowUp, NominalTrajectory, RegionKind,
    RegionQuery, Side,
};
use acaslab::units::convert_rate;
use acaslab::EncounterState;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const A_LO: f64 = 8.0435;
const A_UP: f64 = 16.087;

fn example_params(m: ModelVariant) -> ValidatedParams {
    validate_params(Params { a_lo: A_LO, a_up: A_UP, ..Params::default() }, m).unwrap()
}

fn holds(s: EncounterState, adv: &Advisory, p: &ValidatedParams, kind: RegionKind) -> bool {
    common::verdict(&s, adv, p, kind).holds
}

#[test]
fn nominal_point_examples() {
    let compliant = NominalTrajectory::lo(1.0, 25.0, 25.0, A_LO, 250.0);
    for t in [0.0, 1.0, 17.5] {
        assert_eq!(compliant.point(t), (250.0 * t, 25.0 * t));
    }

    let n = NominalTrajectory::lo(1.0, 0.0, 25.0, A_LO, 250.0);
    let ts = 25.0 / A_LO;
    assert_eq!(n.t_switch(), ts);
    let parabola = A_LO / 2.0 * ts * ts;
    let line = 25.0 * ts - 25.0 * 25.0 / (2.0 * A_LO);
    assert!((parabola - line).abs() < 1e-9);
    assert!((n.height(ts) - 38.85).abs() < 0.01, "{}", n.height(ts));

    let over = NominalTrajectory::up(1.0, 30.0, 25.0, A_UP, 250.0);
    assert_eq!(over.t_switch(), 0.0);
    for t in [0.0, 2.0, 9.0] {
        assert_eq!(over.height(t), 30.0 * t);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn branches_meet_at_the_switch(
        w in prop_oneof![Just(1.0), Just(-1.0)],
        v0 in -200.0..200.0f64,
        target in -200.0..200.0f64,
        a in 1.0..40.0f64,
        upper in any::<bool>(),
    ) {
        let n = if upper {
            NominalTrajectory::up(w, v0, target, a, 250.0)
        } else {
            NominalTrajectory::lo(w, v0, target, a, 250.0)
        };
        let ts = n.t_switch();
        let parabola = w * a / 2.0 * ts * ts + v0 * ts;
        prop_assert!((n.height(ts) - parabola).abs() <= 1e-9, "{} vs {}", n.height(ts), parabola);
        // An overcompliant lower nominal jumps to its target at t = 0.
        if ts > 0.0 {
            let rate = w * a * ts + v0;
            prop_assert!((n.rate(ts) - rate).abs() <= 1e-9);
        }
    }

    #[test]
    fn l_inf_is_monotone_in_advisory_strength(
        r in -1000.0..12_000.0f64,
        h in -3000.0..3000.0f64,
        v in -70.0..70.0f64,
        lo in -50.0..50.0f64,
        extra in 0.0..50.0f64,
    ) {
        let p = common::params(ModelVariant::InfNon);
        let s = EncounterState::new(r, h, v);
        let weak = Advisory::new(Sense::Up, lo);
        let strong = Advisory::new(Sense::Up, lo + extra);
        let nw = NominalTrajectory::lo(1.0, v, lo, p.a_lo, p.r_v);
        let ns = NominalTrajectory::lo(1.0, v, lo + extra, p.a_lo, p.r_v);
        for t in [0.5, 3.0, 10.0, 40.0] {
            prop_assert!(ns.height(t) >= nw.height(t));
        }
        if eval_l_inf(&s, &weak, &p).holds {
            prop_assert!(eval_l_inf(&s, &strong, &p).holds);
        }
    }
}

#[test]
fn l_inf_examples() {
    let p = example_params(ModelVariant::InfNon);
    let adv = Advisory::new(Sense::Up, 25.0);
    let v = common::verdict(&EncounterState::new(0.0, 0.0, 0.0), &adv, &p, RegionKind::LInf);
    assert!(!v.holds);
    assert_eq!(v.witness.unwrap().t, 0.0);

    let parked = validate_params(Params { r_v: 0.0, ..*p }, ModelVariant::InfNon).unwrap();
    let v = common::verdict(&EncounterState::new(600.0, 0.0, 0.0), &adv, &parked, RegionKind::LInf);
    assert!(v.holds && v.degenerate_window);

    let far = EncounterState::new(10_000.0, 0.0, 0.0);
    assert!(holds(far, &adv, &p, RegionKind::LInf));
    let q = RegionQuery::new(far, &adv, &p, RegionKind::LInf);
    assert!(oracle_eval(&q, 0.01, 300.0).unwrap().holds);
    // Window [38, 42] s, already on the straight branch.
    let n = NominalTrajectory::lo(1.0, 0.0, 25.0, A_LO, 250.0);
    assert!((n.height(38.0) - (25.0 * 38.0 - 38.85)).abs() < 0.01);
}

#[test]
fn l_inf_horiz_examples() {
    let p = example_params(ModelVariant::InfHoriz);
    let up = Advisory::new(Sense::Up, 0.0);
    let below = EncounterState::new(600.0, -200.0, 0.0);
    assert!(holds(below, &up, &p, RegionKind::LInfHoriz));
    let q = RegionQuery::new(below, &up, &p, RegionKind::LInfHoriz);
    assert!(oracle_eval(&q, 0.01, 300.0).unwrap().holds);

    let adv = Advisory::new(Sense::Up, 25.0);
    let level = EncounterState::new(600.0, 0.0, 0.0);
    let v = common::verdict(&level, &adv, &p, RegionKind::LInfHoriz);
    assert!(!v.holds);
    let w = v.witness.unwrap();
    assert!((w.t - 0.2).abs() < 1e-9 && (w.r_v.unwrap() - 500.0).abs() < 1e-6, "{w:?}");
    let q = RegionQuery::new(level, &adv, &p, RegionKind::LInfHoriz);
    assert!(!oracle_eval(&q, 0.01, 300.0).unwrap().holds);
}

#[test]
fn c_eps_examples() {
    let p = validate_params(Params { epsilon: 10.0, ..*example_params(ModelVariant::BoundNon) }, ModelVariant::BoundNon)
        .unwrap();
    let adv = Advisory::two_sided(Sense::Up, 25.0, 50.0).unwrap();
    let s = EncounterState::new(4000.0, 0.0, 0.0);
    let q = RegionQuery::new(s, &adv, &p, RegionKind::CEps);
    assert_eq!(q.evaluate().unwrap().holds, oracle_eval(&q, 0.005, 300.0).unwrap().holds);

    // ε = 0 quantifies t = 0 only.
    let instant = validate_params(Params { epsilon: 0.0, ..*p }, ModelVariant::BoundNon).unwrap();
    assert!(holds(EncounterState::new(400.0, 150.0, 0.0), &adv, &instant, RegionKind::CEps));
    assert!(!holds(EncounterState::new(400.0, 50.0, 0.0), &adv, &instant, RegionKind::CEps));
    assert!(holds(EncounterState::new(600.0, 0.0, 0.0), &adv, &instant, RegionKind::CEps));

    let inverted = Advisory { v_up: Some(10.0), ..adv };
    let v = common::verdict(&s, &inverted, &p, RegionKind::CEps);
    assert!(!v.holds && v.reason.is_some());
}

#[test]
fn unbounded_c_eps_without_upper_escape_is_l_inf() {
    let p = validate_params(Params { epsilon: -1.0, ..Params::default() }, ModelVariant::BoundNon).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    while checked < 1000 {
        let s = common::random_state(&mut rng);
        let lo = convert_rate(rng.gen_range(-3000.0..3000.0));
        // Keep states where passing below on the upper nominal fails, so only
        // the lower clause is left.
        let adv = Advisory::two_sided(Sense::Up, lo, p.v_climb_max).unwrap();
        let upper_clear = {
            let n = NominalTrajectory::up(1.0, s.v, p.v_climb_max, p.a_up, p.r_v);
            (0..=6000).all(|k| {
                let t = k as f64 * 0.05;
                (s.r - p.r_v * t).abs() > p.r_p || s.h - n.height(t) > p.h_p
            })
        };
        if upper_clear {
            continue;
        }
        checked += 1;
        let one_sided = Advisory::new(Sense::Up, lo);
        assert_eq!(
            holds(s, &adv, &p, RegionKind::CEps),
            holds(s, &one_sided, &common::params(ModelVariant::InfNon), RegionKind::LInf),
            "{s:?} {adv:?}"
        );
    }
}

#[test]
fn extreme_state_examples() {
    let zero = extreme_state(Side::Lower, 12.0, 1.0, 25.0, A_LO, 0.0);
    assert_eq!((zero.h_ex, zero.v_ex), (0.0, 12.0));

    let lower = extreme_state(Side::Lower, 0.0, 1.0, 25.0, A_LO, 10.0);
    assert_eq!(lower.v_ex, 25.0);
    assert!((lower.h_ex - 211.15).abs() < 0.01, "{}", lower.h_ex);
    let n = NominalTrajectory::lo(1.0, 0.0, 25.0, A_LO, 250.0);
    assert!((lower.h_ex - n.height(10.0)).abs() < 1e-9);

    let upper = extreme_state(Side::Upper, 30.0, 1.0, 25.0, A_UP, 4.0);
    assert_eq!((upper.h_ex, upper.v_ex), (120.0, 30.0));
    assert_eq!(upper.h_ex, NominalTrajectory::up(1.0, 30.0, 25.0, A_UP, 250.0).height(4.0));
}

/// Height of a nominal, written out here rather than taken from the library.
fn height(w: f64, v0: f64, target: f64, a: f64, t: f64) -> f64 {
    let short = f64::max(0.0, w * (target - v0));
    if t < short / a {
        w * a / 2.0 * t * t + v0 * t
    } else {
        target * t - w * short * short / (2.0 * a)
    }
}

#[test]
fn reversal_is_safeable_through_the_upper_clause() {
    let p = common::params(ModelVariant::SafeableNon);
    let adv = Advisory::two_sided(Sense::Up, convert_rate(1500.0), convert_rate(2500.0)).unwrap();
    let mut found = None;
    'search: for r in (8..=48).map(|k| k as f64 * 125.0) {
        for h in (-24..=24).map(|k| k as f64 * 25.0) {
            for v in (-4..=4).map(|k| convert_rate(k as f64 * 500.0)) {
                let s = EncounterState::new(r, h, v);
                let v_ = common::verdict(&s, &adv, &p, RegionKind::CSafeable);
                if let Some(FollowUp::Found { side: Side::Upper, v_target, .. }) = v_.follow_up {
                    if !holds(s, &adv, &p, RegionKind::LInf) && v_.holds {
                        found = Some((s, v_target));
                        break 'search;
                    }
                }
            }
        }
    }
    let (s, target) = found.expect("a reversal state on the grid");
    // Upper nominal for ε seconds, then the reversed lower nominal.
    let eps = p.epsilon;
    let up = NominalTrajectory::up(1.0, s.v, adv.v_up.unwrap(), p.a_up, p.r_v);
    let (h_eps, v_eps) = (up.height(eps), up.rate(eps));
    let t_end = (s.r + p.r_p) / p.r_v + 1.0;
    let mut t = 0.0;
    while t <= t_end {
        let own = if t <= eps { up.height(t) } else { h_eps + height(-1.0, v_eps, target, p.a_lo, t - eps) };
        let inside = (s.r - p.r_v * t).abs() <= p.r_p && (s.h - own).abs() <= p.h_p;
        assert!(!inside, "puck entry at t = {t} from {s:?}");
        t += 0.01;
    }
}

#[test]
fn exact_and_oracle_agree() {
    let (dt, t_max) = (0.01, 300.0);
    for (kind, m) in [
        (RegionKind::LInf, ModelVariant::InfNon),
        (RegionKind::LInfHoriz, ModelVariant::InfHoriz),
        (RegionKind::CEps, ModelVariant::BoundNon),
        (RegionKind::CSafeable, ModelVariant::SafeableNon),
    ] {
        let p = common::params(m);
        let mut rng = ChaCha8Rng::seed_from_u64(m.number() as u64);
        let mut strict = 0;
        for i in 0..500 {
            let adv = common::random_advisory(&mut rng, m, &p);
            let s = if i % 2 == 0 {
                common::random_state(&mut rng)
            } else {
                let gap = rng.gen_range(-50.0..50.0);
                common::near_boundary_state(&mut rng, &adv, &p, gap)
            };
            let q = RegionQuery::new(s, &adv, &p, kind);
            let exact = q.evaluate().unwrap();
            let sampled = oracle_eval(&q, dt, t_max).unwrap();
            match compare(&exact, &sampled, tolerance_band(&q, dt, t_max)) {
                Agreement::Agree => strict += 1,
                Agreement::Boundary => {}
                Agreement::Disagree => panic!("{kind:?} {s:?} {adv:?}: {exact:?} vs {sampled:?}"),
            }
        }
        assert!(strict > 400, "{kind:?}: {strict}");
    }
}
