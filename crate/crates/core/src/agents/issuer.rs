//! Advisory issuers.
//!
//! An issuer proposes candidate advisories and keeps only those that pass
//! the game's region test. Which passing candidate is issued is left open by
//! the games, so [`Selection`] makes it a test dimension.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::advisory::{default_catalog, Advisory, AdvisoryCatalog, Sense};
use crate::params::ValidatedParams;
use crate::regions::{evaluate, RegionError, RegionKind, RegionQuery, RegionVerdict};
use crate::state::EncounterState;
use crate::units::{convert_rate, fps_to_fpm};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IssuerMode {
    /// Keep the current advisory untested, or switch to one that passes.
    KeepOrFilter,
    /// Every issuance re-tests, the current advisory included.
    ForcedReissue,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Selection {
    /// First admissible candidate in search order.
    First,
    /// Admissible candidate with the smallest region margin.
    Adversarial,
    /// Uniformly random admissible candidate.
    Random,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IssueError {
    #[error("no candidate advisory passes the {0:?} region")]
    NoSafeAdvisory(RegionKind),
    #[error(transparent)]
    Region(#[from] RegionError),
}

/// Synthesized targets: every 1000 ft/min up to the climb limit, both senses.
const GRID_STEP_FPM: f64 = 1000.0;
/// Band widths of synthesized two-sided advisories.
const GAPS_FPM: [f64; 3] = [1000.0, 3000.0, 10_000.0];

#[derive(Debug, Clone)]
pub struct AdvisoryIssuer {
    pub mode: IssuerMode,
    pub selection: Selection,
    pub kind: RegionKind,
    candidates: Vec<Advisory>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Issued {
    pub advisory: Advisory,
    /// `None` when the current advisory was kept without a test.
    pub verdict: Option<RegionVerdict>,
}

fn two_sided(adv: Advisory, v_up: f64) -> Option<Advisory> {
    adv.with_upper(v_up).ok()
}

/// Catalog rows, then the synthesized grid. Two-sided regions get upper
/// bounds: catalog rows the climb limit, grid targets each of [`GAPS_FPM`].
pub fn candidate_advisories(
    catalog: &AdvisoryCatalog,
    synthesize: bool,
    two: bool,
    p: &ValidatedParams,
) -> Vec<Advisory> {
    let mut out = Vec::new();
    for adv in catalog.advisories() {
        if two {
            out.extend(two_sided(adv.clone(), adv.w() * p.v_climb_max));
        } else {
            out.push(adv);
        }
    }
    if !synthesize {
        return out;
    }
    let limit = fps_to_fpm(p.v_climb_max);
    let k_max = (limit / GRID_STEP_FPM).floor() as i64;
    let mut rates: Vec<f64> = (-k_max..=k_max).map(|k| k as f64 * GRID_STEP_FPM).collect();
    if rates.last() != Some(&limit) {
        rates.insert(0, -limit);
        rates.push(limit);
    }
    for sense in [Sense::Up, Sense::Down] {
        let w = sense.sign();
        for &fpm in &rates {
            let label = format!("SYN{:+}{:+}", i8::from(sense), fpm);
            let base = Advisory::new(sense, convert_rate(fpm)).with_label(label.as_str());
            if !two {
                out.push(base);
                continue;
            }
            for gap in GAPS_FPM {
                out.extend(two_sided(base.clone(), convert_rate(fpm + w * gap)));
            }
        }
    }
    out
}

impl AdvisoryIssuer {
    pub fn new(
        mode: IssuerMode,
        selection: Selection,
        kind: RegionKind,
        catalog: &AdvisoryCatalog,
        synthesize: bool,
        p: &ValidatedParams,
    ) -> AdvisoryIssuer {
        let candidates = candidate_advisories(catalog, synthesize, kind.needs_upper(), p);
        AdvisoryIssuer { mode, selection, kind, candidates }
    }

    /// The variant's own mode and region, default catalog, synthesized grid.
    pub fn for_params(p: &ValidatedParams, selection: Selection) -> AdvisoryIssuer {
        let m = p.variant();
        let mode = if m.is_bounded() { IssuerMode::ForcedReissue } else { IssuerMode::KeepOrFilter };
        AdvisoryIssuer::new(mode, selection, m.region_kind(), &default_catalog(), true, p)
    }

    pub fn candidates(&self) -> &[Advisory] {
        &self.candidates
    }

    fn test(&self, s: &EncounterState, adv: &Advisory, p: &ValidatedParams) -> Result<RegionVerdict, RegionError> {
        evaluate(&RegionQuery::new(*s, adv, p, self.kind))
    }

    /// Issues an advisory at state `s`; the current one is always the first
    /// candidate.
    pub fn issue<R: Rng + ?Sized>(
        &self,
        s: &EncounterState,
        current: &Advisory,
        p: &ValidatedParams,
        rng: &mut R,
    ) -> Result<Issued, IssueError> {
        let keep_untested = self.mode == IssuerMode::KeepOrFilter;
        if keep_untested && self.selection == Selection::First {
            return Ok(Issued { advisory: current.clone(), verdict: None });
        }
        let mut admissible: Vec<(Advisory, RegionVerdict)> = Vec::new();
        let current_verdict = self.test(s, current, p)?;
        if keep_untested || current_verdict.holds {
            admissible.push((current.clone(), current_verdict));
        }
        if self.selection == Selection::First && !admissible.is_empty() {
            let (advisory, verdict) = admissible.swap_remove(0);
            return Ok(Issued { advisory, verdict: Some(verdict) });
        }
        for adv in &self.candidates {
            let v = self.test(s, adv, p)?;
            if v.holds {
                if self.selection == Selection::First {
                    return Ok(Issued { advisory: adv.clone(), verdict: Some(v) });
                }
                admissible.push((adv.clone(), v));
            }
        }
        if admissible.is_empty() {
            return Err(IssueError::NoSafeAdvisory(self.kind));
        }
        let pick = match self.selection {
            Selection::First => 0,
            Selection::Random => rng.gen_range(0..admissible.len()),
            Selection::Adversarial => admissible
                .iter()
                .enumerate()
                .min_by(|a, b| a.1 .1.margin.total_cmp(&b.1 .1.margin))
                .map(|(i, _)| i)
                .unwrap_or(0),
        };
        let (advisory, verdict) = admissible.swap_remove(pick);
        Ok(Issued { advisory, verdict: Some(verdict) })
    }
}

/// Entry point mirroring the other agents.
pub fn issue_advisory<R: Rng + ?Sized>(
    issuer: &AdvisoryIssuer,
    s: &EncounterState,
    current: &Advisory,
    p: &ValidatedParams,
    rng: &mut R,
) -> Result<Issued, IssueError> {
    issuer.issue(s, current, p, rng)
}
