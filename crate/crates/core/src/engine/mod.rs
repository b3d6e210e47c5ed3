//! Event-driven game runs.
//!
//! A run alternates the three players: the issuer hands out advisories, the
//! ownship picks an acceleration at its own events, the intruder moves on its
//! own clock, and the state advances in closed form between whatever comes
//! first. Puck entry is checked analytically on every segment.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::advisory::Advisory;
use crate::agents::intruder::{Intruder, IntruderPolicy, PolicyError, Visible};
use crate::agents::issuer::{AdvisoryIssuer, IssueError, Selection};
use crate::agents::strategy::{OwnshipStrategy, StrategyBoundsError};
use crate::dynamics::{first_nmac_in_segment, next_event, propagate, ControlFrame, EventKind};
use crate::params::{ModelVariant, ValidatedParams};
use crate::regions::{evaluate, RegionError, RegionQuery};
use crate::state::EncounterState;

pub mod falsify;

pub use falsify::{falsify, falsify_with, Counterexample, FalsifyConfig, FalsifyReport};

/// Default re-issue cadence of the infinite-time games (s).
pub const DEFAULT_CADENCE: f64 = 1.0;
/// Slack past the last possible conflict when deriving a horizon (s).
pub const DEFAULT_MARGIN: f64 = 10.0;
/// Hard cap on segments per run.
pub const MAX_SEGMENTS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("initial state is outside the {kind} region (margin {margin})")]
    InitialRegion { kind: &'static str, margin: f64 },
    #[error("{0} needs a two-sided advisory")]
    MissingUpperBound(ModelVariant),
    #[error("two-sided advisory with v_lo = v_up leaves no band to coast in")]
    DegenerateBand,
    #[error("ε = 0 would re-issue forever without moving")]
    ZeroTimeBound,
    #[error("closure rate {r_v} exceeds v_max = {v_max}")]
    ClosureOutOfRange { r_v: f64, v_max: f64 },
    #[error("no horizon: closure rate is zero and none was configured")]
    HorizonUndefined,
    #[error("horizon must be positive and finite, got {0}")]
    BadHorizon(f64),
    #[error("initial state is not finite")]
    BadState,
    #[error("run exceeded {0} segments")]
    TooManySegments(usize),
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error(transparent)]
    Strategy(#[from] StrategyBoundsError),
    #[error(transparent)]
    Region(#[from] RegionError),
    #[error(transparent)]
    Issue(IssueError),
}

/// Default horizon and whether simulation alone covers unbounded time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Horizon {
    pub seconds: f64,
    /// Zero closure: the horizon is only configured, and safety beyond it
    /// rests on the region evaluator.
    pub attested_by_region: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HorizonOptions {
    pub margin: f64,
    /// Slowest closure assumed in the closure-rate game.
    pub closure_floor: Option<f64>,
    pub configured: Option<f64>,
}

impl Default for HorizonOptions {
    fn default() -> Self {
        HorizonOptions { margin: DEFAULT_MARGIN, closure_floor: None, configured: None }
    }
}

/// `(r₀ + r_p)/r_v_min + margin`, after which `|r| > r_p` for good.
pub fn simulate_horizon(
    p: &ValidatedParams,
    initial: &EncounterState,
    opts: HorizonOptions,
) -> Result<Horizon, EngineError> {
    let r_v_min = if p.variant() == ModelVariant::InfHoriz {
        opts.closure_floor.unwrap_or(0.0)
    } else {
        p.r_v
    };
    if r_v_min > 0.0 {
        let seconds = ((initial.r + p.r_p) / r_v_min).max(0.0) + opts.margin;
        return Ok(Horizon { seconds, attested_by_region: false });
    }
    match opts.configured {
        Some(seconds) => Ok(Horizon { seconds, attested_by_region: true }),
        None => Err(EngineError::HorizonUndefined),
    }
}

/// A fully configured game.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub params: ValidatedParams,
    pub initial: EncounterState,
    pub initial_advisory: Advisory,
    pub strategy: OwnshipStrategy,
    pub issuer: AdvisoryIssuer,
    pub intruder: IntruderPolicy,
    pub horizon: f64,
    pub seed: u64,
    /// Re-issue period of the infinite-time games; ignored by the others.
    pub cadence: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ScenarioBuilder {
    sc: Scenario,
    horizon: Option<f64>,
    closure_floor: Option<f64>,
    allow_unsafe_initial: bool,
}

impl Scenario {
    pub fn builder(
        params: ValidatedParams,
        initial: EncounterState,
        initial_advisory: Advisory,
    ) -> ScenarioBuilder {
        ScenarioBuilder {
            sc: Scenario {
                params,
                initial,
                initial_advisory,
                strategy: OwnshipStrategy::new(params),
                issuer: AdvisoryIssuer::for_params(&params, Selection::First),
                intruder: IntruderPolicy::None,
                horizon: 0.0,
                seed: 0,
                cadence: (!params.variant().is_bounded()).then_some(DEFAULT_CADENCE),
            },
            horizon: None,
            closure_floor: None,
            allow_unsafe_initial: false,
        }
    }

    pub fn variant(&self) -> ModelVariant {
        self.params.variant()
    }

    /// The region verdict of the initial state.
    pub fn initial_verdict(&self) -> Result<crate::regions::RegionVerdict, RegionError> {
        let kind = self.variant().region_kind();
        evaluate(&RegionQuery::new(self.initial, &self.initial_advisory, &self.params, kind))
    }
}

impl ScenarioBuilder {
    pub fn intruder(mut self, policy: IntruderPolicy) -> Self {
        self.sc.intruder = policy;
        self
    }

    pub fn issuer(mut self, issuer: AdvisoryIssuer) -> Self {
        self.sc.issuer = issuer;
        self
    }

    pub fn selection(mut self, selection: Selection) -> Self {
        self.sc.issuer.selection = selection;
        self
    }

    pub fn strategy(mut self, strategy: OwnshipStrategy) -> Self {
        self.sc.strategy = strategy;
        self
    }

    pub fn horizon(mut self, seconds: f64) -> Self {
        self.horizon = Some(seconds);
        self
    }

    pub fn closure_floor(mut self, r_v: f64) -> Self {
        self.closure_floor = Some(r_v);
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.sc.seed = seed;
        self
    }

    pub fn cadence(mut self, seconds: Option<f64>) -> Self {
        self.sc.cadence = seconds;
        self
    }

    /// Skip the initial region check, for counterexample demonstrations.
    pub fn allow_unsafe_initial(mut self, allow: bool) -> Self {
        self.allow_unsafe_initial = allow;
        self
    }

    pub fn build(mut self) -> Result<Scenario, EngineError> {
        let sc = &mut self.sc;
        let p = &sc.params;
        let m = p.variant();
        if !sc.initial.is_valid() {
            return Err(EngineError::BadState);
        }
        sc.initial.t = 0.0;
        if m.is_bounded() {
            let up = sc.initial_advisory.v_up.ok_or(EngineError::MissingUpperBound(m))?;
            if up == sc.initial_advisory.v_lo {
                return Err(EngineError::DegenerateBand);
            }
            if p.epsilon == 0.0 {
                return Err(EngineError::ZeroTimeBound);
            }
        }
        if m == ModelVariant::InfHoriz && p.r_v > p.v_max {
            return Err(EngineError::ClosureOutOfRange { r_v: p.r_v, v_max: p.v_max });
        }
        Intruder::new(sc.intruder.clone(), p, sc.seed)?;
        sc.horizon = match self.horizon {
            Some(h) => h,
            None => {
                let opts = HorizonOptions {
                    closure_floor: self.closure_floor,
                    ..HorizonOptions::default()
                };
                simulate_horizon(p, &sc.initial, opts)?.seconds
            }
        };
        if !(sc.horizon > 0.0 && sc.horizon.is_finite()) {
            return Err(EngineError::BadHorizon(sc.horizon));
        }
        if !self.allow_unsafe_initial {
            let v = sc.initial_verdict()?;
            if !v.holds {
                return Err(EngineError::InitialRegion { kind: v.kind.name(), margin: v.margin });
            }
        }
        Ok(self.sc)
    }
}

/// Why a trace record was written.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceEvent {
    Start,
    IntruderMove,
    Cadence,
    ReachLo,
    ReachUp,
    TimeBound,
    Horizon,
    NoSafeAdvisory,
    Nmac,
}

impl TraceEvent {
    pub fn name(self) -> &'static str {
        match self {
            TraceEvent::Start => "start",
            TraceEvent::IntruderMove => "intruder",
            TraceEvent::Cadence => "cadence",
            TraceEvent::ReachLo => "reach_lo",
            TraceEvent::ReachUp => "reach_up",
            TraceEvent::TimeBound => "time_bound",
            TraceEvent::Horizon => "horizon",
            TraceEvent::NoSafeAdvisory => "no_safe_advisory",
            TraceEvent::Nmac => "nmac",
        }
    }

    pub fn parse(s: &str) -> Option<TraceEvent> {
        use TraceEvent::*;
        [Start, IntruderMove, Cadence, ReachLo, ReachUp, TimeBound, Horizon, NoSafeAdvisory, Nmac]
            .into_iter()
            .find(|e| e.name() == s)
    }
}

/// State at `t_abs` and the controls held from there to the next record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub t_abs: f64,
    pub r: f64,
    pub h: f64,
    pub v: f64,
    pub a_o: f64,
    pub a_i: f64,
    pub r_v: f64,
    pub adv_w: f64,
    pub adv_v_lo: f64,
    pub adv_v_up: Option<f64>,
    pub event: Option<TraceEvent>,
    pub nmac: bool,
    /// Region verdict when an advisory was issued with a test.
    pub region_holds: Option<bool>,
}

impl TraceRecord {
    pub fn state(&self) -> EncounterState {
        EncounterState { r: self.r, h: self.h, v: self.v, t: 0.0 }
    }

    pub fn controls(&self) -> ControlFrame {
        ControlFrame::new(self.a_o, self.a_i, self.r_v)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub records: Vec<TraceRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("record {index} does not follow from record {prev} by exact propagation")]
pub struct ReplayMismatch {
    pub prev: usize,
    pub index: usize,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn first_nmac(&self) -> Option<&TraceRecord> {
        self.records.iter().find(|r| r.nmac)
    }

    /// Re-propagates every record from its predecessor and demands
    /// bit-identical states and strictly increasing times.
    pub fn verify_replay(&self) -> Result<(), ReplayMismatch> {
        for (i, pair) in self.records.windows(2).enumerate() {
            let (a, b) = (&pair[0], &pair[1]);
            let dt = b.t_abs - a.t_abs;
            let next = propagate(&a.state(), &a.controls(), dt);
            let same = next.r.to_bits() == b.r.to_bits()
                && next.h.to_bits() == b.h.to_bits()
                && next.v.to_bits() == b.v.to_bits();
            if !(dt > 0.0) || !same {
                return Err(ReplayMismatch { prev: i, index: i + 1 });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RunStatus {
    SafeToHorizon,
    Nmac(f64),
    NoSafeAdvisory(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub status: RunStatus,
    pub trace: Trace,
    /// Smallest `max(|r| − r_p, |h| − h_p)` seen; negative or zero inside the puck.
    pub closest: f64,
}

impl RunOutcome {
    pub fn is_nmac(&self) -> bool {
        matches!(self.status, RunStatus::Nmac(_))
    }
}

/// Smallest `max(|r| − r_p, |h| − h_p)` over a segment, at the segment ends,
/// the horizontal closest approach and the vertical turning point.
fn segment_closest(s: &EncounterState, u: &ControlFrame, dt: f64, r_p: f64, h_p: f64) -> f64 {
    let gap = |x: &EncounterState| (x.r.abs() - r_p).max(x.h.abs() - h_p);
    let mut best = gap(s).min(gap(&propagate(s, u, dt)));
    let acc = u.relative_accel();
    let mut probe = |tau: f64| {
        if tau > 0.0 && tau < dt {
            best = best.min(gap(&propagate(s, u, tau)));
        }
    };
    if u.r_v > 0.0 {
        probe(s.r / u.r_v);
    }
    if acc != 0.0 {
        probe(-s.v / acc);
    }
    best
}

fn record(
    t_abs: f64,
    s: &EncounterState,
    u: &ControlFrame,
    adv: &Advisory,
    event: Option<TraceEvent>,
) -> TraceRecord {
    TraceRecord {
        t_abs,
        r: s.r,
        h: s.h,
        v: s.v,
        a_o: u.a_o,
        a_i: u.a_i,
        r_v: u.r_v,
        adv_w: adv.w(),
        adv_v_lo: adv.v_lo,
        adv_v_up: adv.v_up,
        event,
        nmac: false,
        region_holds: None,
    }
}

/// Seed salt separating the issuer's randomness from the intruder's.
const ISSUER_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

/// Plays one game to the horizon, an NMAC, or a failed re-issue.
pub fn run(sc: &Scenario) -> Result<RunOutcome, EngineError> {
    let p = &sc.params;
    let bounded = p.variant().is_bounded();
    let eps = if bounded { p.epsilon } else { -1.0 };
    let cadence = if bounded { None } else { sc.cadence.filter(|c| *c > 0.0) };
    let mut issuer_rng = ChaCha8Rng::seed_from_u64(sc.seed ^ ISSUER_SALT);
    let mut intruder = Intruder::new(sc.intruder.clone(), p, sc.seed)?;
    let mut strategy = sc.strategy;

    let mut s = sc.initial;
    s.t = 0.0;
    let mut adv = sc.initial_advisory.clone();
    let mut t_abs = 0.0_f64;
    let mut a_o = strategy.accel_after(&s, &adv, None)?;
    let vis = Visible { advisory: &adv, a_o, epsilon: eps };
    let mv = intruder.act(&s, t_abs, vis);
    if strategy.raise_estimate(mv.a_i) {
        a_o = strategy.accel_after(&s, &adv, None)?;
    }
    let (mut a_i, mut r_v) = (mv.a_i, mv.r_v);
    let mut next_intruder = t_abs + mv.dwell;
    let mut next_cadence = cadence.map_or(f64::INFINITY, |c| t_abs + c);

    let mut trace = Trace::default();
    let mut first = record(t_abs, &s, &ControlFrame::new(a_o, a_i, r_v), &adv, Some(TraceEvent::Start));
    first.region_holds = sc.initial_verdict().ok().map(|v| v.holds);
    trace.records.push(first);
    let mut closest = (s.r.abs() - p.r_p).max(s.h.abs() - p.h_p);

    let fired = |target: f64, now: f64| target - now <= 1e-9 * (1.0 + now.abs());

    for _ in 0..MAX_SEGMENTS {
        let u = ControlFrame::new(a_o, a_i, r_v);
        let stop = (sc.horizon.min(next_intruder).min(next_cadence) - t_abs).max(0.0);
        let (ev, dt) = next_event(&s, &u, &adv, eps, stop);
        let t_next = t_abs + dt;
        let dt_eff = t_next - t_abs;

        closest = closest.min(segment_closest(&s, &u, dt_eff, p.r_p, p.h_p));
        if let Some(tau) = first_nmac_in_segment(&s, &u, dt_eff, p) {
            let t_hit = t_abs + tau;
            let tau_eff = t_hit - t_abs;
            if tau_eff > 0.0 {
                let hit = propagate(&s, &u, tau_eff);
                let mut rec = record(t_hit, &hit, &u, &adv, Some(TraceEvent::Nmac));
                rec.nmac = true;
                trace.records.push(rec);
            } else {
                let last = trace.records.last_mut().expect("trace starts with a record");
                last.nmac = true;
                last.event = Some(TraceEvent::Nmac);
            }
            return Ok(RunOutcome { status: RunStatus::Nmac(t_hit), trace, closest: closest.min(0.0) });
        }
        if dt_eff > 0.0 {
            s = propagate(&s, &u, dt_eff);
            t_abs = t_next;
        }

        if fired(sc.horizon, t_abs) {
            let rec = record(t_abs, &s, &u, &adv, Some(TraceEvent::Horizon));
            if dt_eff > 0.0 {
                trace.records.push(rec);
            }
            return Ok(RunOutcome { status: RunStatus::SafeToHorizon, trace, closest });
        }

        let mut event = None;
        let mut region_holds = None;
        let mut ownship_event = None;
        let mut reissued = false;

        match ev {
            EventKind::TimeBound => {
                match sc.issuer.issue(&s, &adv, p, &mut issuer_rng) {
                    Ok(out) => {
                        adv = out.advisory;
                        region_holds = out.verdict.map(|v| v.holds);
                    }
                    Err(IssueError::NoSafeAdvisory(_)) => {
                        let mut rec = record(t_abs, &s, &u, &adv, Some(TraceEvent::NoSafeAdvisory));
                        rec.region_holds = Some(false);
                        if dt_eff > 0.0 {
                            trace.records.push(rec);
                        } else if let Some(last) = trace.records.last_mut() {
                            last.event = Some(TraceEvent::NoSafeAdvisory);
                        }
                        return Ok(RunOutcome {
                            status: RunStatus::NoSafeAdvisory(t_abs),
                            trace,
                            closest,
                        });
                    }
                    Err(e) => return Err(EngineError::Issue(e)),
                }
                s.t = 0.0;
                reissued = true;
                event = Some(TraceEvent::TimeBound);
            }
            EventKind::ReachLo(_) => {
                ownship_event = Some(ev);
                event = Some(TraceEvent::ReachLo);
            }
            EventKind::ReachUp(_) => {
                ownship_event = Some(ev);
                event = Some(TraceEvent::ReachUp);
            }
            EventKind::Horizon => {}
        }
        if fired(next_cadence, t_abs) {
            let out = sc.issuer.issue(&s, &adv, p, &mut issuer_rng).map_err(EngineError::Issue)?;
            if out.advisory != adv {
                ownship_event = None;
            }
            adv = out.advisory;
            region_holds = region_holds.or(out.verdict.map(|v| v.holds));
            s.t = 0.0;
            reissued = true;
            next_cadence = t_abs + cadence.unwrap_or(f64::INFINITY);
            event = event.or(Some(TraceEvent::Cadence));
        }
        let ownship_moves = reissued || ownship_event.is_some();
        if ownship_moves {
            a_o = strategy.accel_after(&s, &adv, if reissued { None } else { ownship_event })?;
        }
        let intruder_due = fired(next_intruder, t_abs);
        if intruder_due || (ownship_moves && intruder.reacts()) {
            let vis = Visible { advisory: &adv, a_o, epsilon: eps };
            let mv = intruder.act(&s, t_abs, vis);
            if strategy.raise_estimate(mv.a_i) {
                a_o = strategy.accel_after(&s, &adv, if reissued { None } else { ownship_event })?;
            }
            a_i = mv.a_i;
            r_v = mv.r_v;
            next_intruder = t_abs + mv.dwell;
            event = event.or(Some(TraceEvent::IntruderMove));
        }

        let rec = TraceRecord {
            region_holds,
            ..record(t_abs, &s, &ControlFrame::new(a_o, a_i, r_v), &adv, event)
        };
        if dt_eff > 0.0 {
            trace.records.push(rec);
        } else if let Some(last) = trace.records.last_mut() {
            // Nothing moved: the new controls replace the old ones in place.
            *last = TraceRecord { t_abs: last.t_abs, event: last.event.or(event), ..rec };
        }
    }
    Err(EngineError::TooManySegments(MAX_SEGMENTS))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::advisory::Sense;
    use crate::params::{validate_params, Params};

    fn params(m: ModelVariant) -> ValidatedParams {
        validate_params(Params::default(), m).unwrap()
    }

    #[test]
    fn horizon_examples() {
        let p = params(ModelVariant::InfNon);
        let s = EncounterState::new(10_000.0, 0.0, 0.0);
        assert_eq!(simulate_horizon(&p, &s, HorizonOptions::default()).unwrap().seconds, 52.0);

        let p0 = validate_params(Params { r_v: 0.0, ..Params::default() }, ModelVariant::InfNon).unwrap();
        assert_eq!(simulate_horizon(&p0, &s, HorizonOptions::default()), Err(EngineError::HorizonUndefined));
        let h = simulate_horizon(&p0, &s, HorizonOptions { configured: Some(120.0), ..Default::default() })
            .unwrap();
        assert_eq!(h, Horizon { seconds: 120.0, attested_by_region: true });

        let p3 = params(ModelVariant::InfHoriz);
        let opts = HorizonOptions { closure_floor: Some(50.0), ..Default::default() };
        assert_eq!(simulate_horizon(&p3, &s, opts).unwrap().seconds, 10_500.0 / 50.0 + 10.0);
    }

    #[test]
    fn safe_climb_reaches_horizon() {
        let p = params(ModelVariant::InfNon);
        let adv = Advisory::new(Sense::Up, 25.0);
        let sc = Scenario::builder(p, EncounterState::new(10_000.0, 0.0, 0.0), adv).build().unwrap();
        let out = run(&sc).unwrap();
        assert_eq!(out.status, RunStatus::SafeToHorizon);
        out.trace.verify_replay().unwrap();
        assert!(out.trace.records.iter().all(|r| !r.nmac));
        assert_eq!(out.trace.records.last().unwrap().t_abs, 52.0);
    }

    #[test]
    fn unsafe_start_is_rejected_unless_allowed() {
        let p = params(ModelVariant::InfNon);
        let adv = Advisory::new(Sense::Up, 25.0);
        let s = EncounterState::new(1000.0, 0.0, 0.0);
        assert!(matches!(
            Scenario::builder(p, s, adv.clone()).build(),
            Err(EngineError::InitialRegion { .. })
        ));
        let sc = Scenario::builder(p, s, adv)
            .allow_unsafe_initial(true)
            .strategy(OwnshipStrategy::nominal_replay(p))
            .build()
            .unwrap();
        let out = run(&sc).unwrap();
        assert!(out.is_nmac());
        out.trace.verify_replay().unwrap();
        assert!(out.trace.records.last().unwrap().nmac);
    }

    #[test]
    fn bounded_games_need_a_band_and_a_time_bound() {
        let p = params(ModelVariant::BoundNon);
        let s = EncounterState::new(10_000.0, 0.0, 0.0);
        let one = Advisory::new(Sense::Up, 25.0);
        assert_eq!(
            Scenario::builder(p, s, one).build().unwrap_err(),
            EngineError::MissingUpperBound(ModelVariant::BoundNon)
        );
        let flat = Advisory::two_sided(Sense::Up, 25.0, 25.0).unwrap();
        assert_eq!(Scenario::builder(p, s, flat).build().unwrap_err(), EngineError::DegenerateBand);
        let p0 = validate_params(Params { epsilon: 0.0, ..Params::default() }, ModelVariant::BoundNon)
            .unwrap();
        let band = Advisory::two_sided(Sense::Up, 25.0, 50.0).unwrap();
        assert_eq!(Scenario::builder(p0, s, band).build().unwrap_err(), EngineError::ZeroTimeBound);
    }

    #[test]
    fn runs_are_deterministic() {
        let p = params(ModelVariant::SafeableVert);
        let adv = Advisory::two_sided(Sense::Up, 25.0, 60.0).unwrap();
        let sc = Scenario::builder(p, EncounterState::new(8000.0, 100.0, 0.0), adv)
            .intruder(IntruderPolicy::RandomPiecewise { dwell_min_s: 0.1, dwell_max_s: 3.0 })
            .selection(Selection::Random)
            .seed(42)
            .build()
            .unwrap();
        let a = run(&sc).unwrap();
        let b = run(&sc).unwrap();
        assert_eq!(a, b);
        a.trace.verify_replay().unwrap();
        assert_eq!(a.status, RunStatus::SafeToHorizon);
    }
}
