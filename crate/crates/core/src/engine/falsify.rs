//! Counterexample search against the winning strategies.
//!
//! Rollouts are numbered; each number fixes its intruder schedule, issuer
//! selection and seed, so the search is deterministic for a given budget no
//! matter how many workers evaluate a round. Within a round the lowest
//! numbered NMAC wins.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{run, EngineError, RunOutcome, Scenario, Trace};
use crate::agents::intruder::{extreme, IntruderPolicy, DWELL_FLOOR};
use crate::agents::issuer::Selection;
use crate::params::IntruderChannel;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FalsifyConfig {
    pub budget: usize,
    pub workers: usize,
    /// Rollouts generated and evaluated together.
    pub round: usize,
    /// Every this many rollouts one uses the smallest-margin issuer.
    pub adversarial_every: usize,
}

impl FalsifyConfig {
    pub fn new(budget: usize) -> FalsifyConfig {
        FalsifyConfig { budget, workers: 1, round: 64, adversarial_every: 64 }
    }

    pub fn workers(mut self, workers: usize) -> FalsifyConfig {
        self.workers = workers.max(1);
        self
    }
}

/// An NMAC found by the search.
#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample {
    pub rollout: usize,
    pub intruder: IntruderPolicy,
    pub selection: Selection,
    pub seed: u64,
    pub trace: Trace,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FalsifyReport {
    pub found: Option<Counterexample>,
    pub rollouts: usize,
    /// Smallest `max(|r| − r_p, |h| − h_p)` over all rollouts.
    pub best_objective: f64,
}

/// Rollout seed for rollout `i`.
fn rollout_seed(base: u64, i: usize) -> u64 {
    let mut z = base ^ (i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Debug, Clone)]
struct Plan {
    intruder: IntruderPolicy,
    selection: Selection,
    seed: u64,
}

/// Piecewise-constant schedule: `(t_s, value)` with switch gaps ≥ the dwell floor.
type Schedule = Vec<(f64, f64)>;

struct Planner<'a> {
    sc: &'a Scenario,
    channel: IntruderChannel,
    bound: f64,
}

impl Planner<'_> {
    fn extremes(&self) -> [f64; 2] {
        match self.channel {
            IntruderChannel::Horizontal => [self.bound, 0.0],
            _ => [self.bound, -self.bound],
        }
    }

    fn value(&self, rng: &mut ChaCha8Rng) -> f64 {
        if rng.gen_bool(0.7) {
            self.extremes()[rng.gen_range(0..2)]
        } else {
            match self.channel {
                IntruderChannel::Horizontal => rng.gen_range(0.0..=self.bound),
                _ => rng.gen_range(-self.bound..=self.bound),
            }
        }
    }

    fn random_schedule(&self, rng: &mut ChaCha8Rng) -> Schedule {
        let mut out = vec![(0.0, self.value(rng))];
        let mut t = 0.0;
        let max_dwell = if rng.gen_bool(0.5) { 3.0 } else { 15.0 };
        loop {
            t += rng.gen_range(DWELL_FLOOR..max_dwell);
            if t >= self.sc.horizon {
                return out;
            }
            out.push((t, self.value(rng)));
        }
    }

    fn perturb(&self, best: &Schedule, rng: &mut ChaCha8Rng) -> Schedule {
        let mut s = best.clone();
        let ops = 1 + rng.gen_range(0..3);
        for _ in 0..ops {
            let i = rng.gen_range(0..s.len());
            match rng.gen_range(0..4) {
                0 if i > 0 => {
                    let lo = s[i - 1].0 + DWELL_FLOOR;
                    let hi = s.get(i + 1).map_or(self.sc.horizon, |e| e.0 - DWELL_FLOOR);
                    if lo < hi {
                        let shifted = s[i].0 + rng.gen_range(-1.0..1.0);
                        s[i].0 = shifted.clamp(lo, hi);
                    }
                }
                1 => {
                    s[i].1 = match self.channel {
                        IntruderChannel::Horizontal => self.bound - s[i].1,
                        _ => -s[i].1,
                    }
                }
                2 => s[i].1 = self.value(rng),
                _ => {
                    let end = s.get(i + 1).map_or(self.sc.horizon, |e| e.0);
                    let (lo, hi) = (s[i].0 + DWELL_FLOOR, end - DWELL_FLOOR);
                    if lo < hi {
                        s.insert(i + 1, (rng.gen_range(lo..hi), self.value(rng)));
                    }
                }
            }
        }
        s
    }

    fn policy(&self, schedule: Schedule) -> IntruderPolicy {
        match self.channel {
            IntruderChannel::Horizontal => IntruderPolicy::ClosureSchedule { schedule },
            _ => IntruderPolicy::Scripted { schedule },
        }
    }

    /// Schedule of rollout `i`, given the best schedule so far. Rollout 0
    /// plays the scenario's own intruder; the next few hold each extreme
    /// (and, for closure games, the region witness rate) for the whole run.
    fn plan(&self, i: usize, best: Option<&Schedule>, cfg: &FalsifyConfig) -> (Plan, Option<Schedule>) {
        let seed = rollout_seed(self.sc.seed, i);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let selection = if cfg.adversarial_every > 0 && i % cfg.adversarial_every == 1 {
            Selection::Adversarial
        } else if i % 4 == 0 {
            Selection::First
        } else {
            Selection::Random
        };
        if i == 0 || self.channel == IntruderChannel::None {
            let selection = if i == 0 { self.sc.issuer.selection } else { selection };
            return (Plan { intruder: self.sc.intruder.clone(), selection, seed }, None);
        }
        let mut constants: Vec<f64> = self.extremes().to_vec();
        if self.channel == IntruderChannel::Horizontal {
            if let Some(r_v) = self.sc.initial_verdict().ok().and_then(|v| v.witness).and_then(|w| w.r_v) {
                constants.push(r_v);
            }
        }
        let schedule = if i <= constants.len() {
            vec![(0.0, constants[i - 1])]
        } else {
            match best {
                Some(b) if rng.gen_bool(0.5) => self.perturb(b, &mut rng),
                _ => self.random_schedule(&mut rng),
            }
        };
        let plan = Plan { intruder: self.policy(schedule.clone()), selection, seed };
        (plan, Some(schedule))
    }
}

fn rollout(sc: &Scenario, plan: &Plan) -> Result<RunOutcome, EngineError> {
    let mut sc = sc.clone();
    sc.intruder = plan.intruder.clone();
    sc.issuer.selection = plan.selection;
    sc.seed = plan.seed;
    run(&sc)
}

/// Searches up to `budget` rollouts on one worker.
pub fn falsify(sc: &Scenario, budget: usize) -> Result<Option<Trace>, EngineError> {
    Ok(falsify_with(sc, FalsifyConfig::new(budget))?.found.map(|c| c.trace))
}

pub fn falsify_with(sc: &Scenario, cfg: FalsifyConfig) -> Result<FalsifyReport, EngineError> {
    let channel = sc.variant().intruder_channel();
    let bound = match channel {
        IntruderChannel::Vertical => extreme(sc.params.c),
        IntruderChannel::Horizontal => sc.params.v_max,
        IntruderChannel::None => 0.0,
    };
    let planner = Planner { sc, channel, bound };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers.max(1))
        .build()
        .expect("thread pool");
    let mut best: Option<(f64, Schedule)> = None;
    let mut best_objective = f64::INFINITY;
    let mut done = 0;
    while done < cfg.budget {
        let n = cfg.round.max(1).min(cfg.budget - done);
        let plans: Vec<(Plan, Option<Schedule>)> = (done..done + n)
            .map(|i| planner.plan(i, best.as_ref().map(|b| &b.1), &cfg))
            .collect();
        let results: Vec<Result<RunOutcome, EngineError>> =
            pool.install(|| plans.par_iter().map(|(plan, _)| rollout(sc, plan)).collect());
        for (k, (result, (plan, schedule))) in results.into_iter().zip(plans).enumerate() {
            let out = result?;
            best_objective = best_objective.min(out.closest);
            if out.is_nmac() && out.trace.verify_replay().is_ok() {
                let found = Counterexample {
                    rollout: done + k,
                    intruder: plan.intruder,
                    selection: plan.selection,
                    seed: plan.seed,
                    trace: out.trace,
                };
                return Ok(FalsifyReport { found: Some(found), rollouts: done + k + 1, best_objective });
            }
            if let Some(schedule) = schedule {
                if best.as_ref().map_or(true, |b| out.closest < b.0) {
                    best = Some((out.closest, schedule));
                }
            }
        }
        done += n;
    }
    Ok(FalsifyReport { found: None, rollouts: done, best_objective })
}
