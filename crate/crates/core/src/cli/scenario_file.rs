//! JSON scenario files.
//!
//! Every numeric key carries its unit in the suffix and is converted on load.
//! Unknown keys are rejected.

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::advisory::{default_catalog, Advisory, AdvisoryCatalog, CatalogEntry, Sense};
use crate::agents::intruder::IntruderPolicy;
use crate::agents::issuer::{AdvisoryIssuer, IssuerMode, Selection};
use crate::agents::strategy::OwnshipStrategy;
use crate::engine::Scenario;
use crate::params::{validate_params, ModelVariant, Params, ValidatedParams};
use crate::state::EncounterState;
use crate::units::{convert_rate, g_to_fps2, STANDARD_G};

/// Environment variable overriding the scenario seed.
pub const SEED_ENV: &str = "ACASLAB_SEED";

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_p_ft: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_p_ft: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_v_fps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_lo_g: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_up_g: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_max_g: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_g: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_max_fps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g_fps2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_climb_max_fpm: Option<f64>,
}

impl ParamsSpec {
    /// Defaults for absent keys; accelerations scale with `g_fps2`.
    pub fn to_params(&self) -> Params {
        let d = Params::default();
        let g = self.g_fps2.unwrap_or(STANDARD_G);
        let acc = |spec: Option<f64>, default: f64| g_to_fps2(spec.unwrap_or(default / d.g), g);
        Params {
            r_p: self.r_p_ft.unwrap_or(d.r_p),
            h_p: self.h_p_ft.unwrap_or(d.h_p),
            r_v: self.r_v_fps.unwrap_or(d.r_v),
            a_lo: acc(self.a_lo_g, d.a_lo),
            a_up: acc(self.a_up_g, d.a_up),
            a_max: acc(self.a_max_g, d.a_max),
            c: acc(self.c_g, d.c),
            v_max: self.v_max_fps.unwrap_or(d.v_max),
            epsilon: self.epsilon_s.unwrap_or(d.epsilon),
            g,
            v_climb_max: self.v_climb_max_fpm.map_or(d.v_climb_max, convert_rate),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSpec {
    pub r_ft: f64,
    pub h_ft: f64,
    pub v_fpm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum AdvisorySpec {
    Label {
        label: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        v_up_fpm: Option<f64>,
    },
    Bounds {
        w: Sense,
        v_lo_fpm: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        v_up_fpm: Option<f64>,
    },
}

/// Intruder section; schedules are `[t_s, value]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum IntruderSpec {
    None,
    BangBang {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dwell_s: Option<f64>,
    },
    RandomPiecewise {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dwell_min_s: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dwell_max_s: Option<f64>,
    },
    Scripted { schedule_fps2: Vec<(f64, f64)> },
    ClosureSchedule { schedule_fps: Vec<(f64, f64)> },
    RandomClosure {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dwell_min_s: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dwell_max_s: Option<f64>,
    },
    Cooperative,
}

impl Default for IntruderSpec {
    fn default() -> Self {
        IntruderSpec::None
    }
}

impl IntruderSpec {
    pub fn to_policy(&self) -> IntruderPolicy {
        let dwell = |lo: Option<f64>, hi: Option<f64>| (lo.unwrap_or(0.1), hi.unwrap_or(3.0));
        match self {
            IntruderSpec::None => IntruderPolicy::None,
            IntruderSpec::BangBang { dwell_s } => {
                IntruderPolicy::BangBang { dwell_s: dwell_s.unwrap_or(0.5) }
            }
            IntruderSpec::RandomPiecewise { dwell_min_s, dwell_max_s } => {
                let (dwell_min_s, dwell_max_s) = dwell(*dwell_min_s, *dwell_max_s);
                IntruderPolicy::RandomPiecewise { dwell_min_s, dwell_max_s }
            }
            IntruderSpec::Scripted { schedule_fps2 } => {
                IntruderPolicy::Scripted { schedule: schedule_fps2.clone() }
            }
            IntruderSpec::ClosureSchedule { schedule_fps } => {
                IntruderPolicy::ClosureSchedule { schedule: schedule_fps.clone() }
            }
            IntruderSpec::RandomClosure { dwell_min_s, dwell_max_s } => {
                let (dwell_min_s, dwell_max_s) = dwell(*dwell_min_s, *dwell_max_s);
                IntruderPolicy::RandomClosure { dwell_min_s, dwell_max_s }
            }
            IntruderSpec::Cooperative => IntruderPolicy::Cooperative,
        }
    }

    pub fn from_policy(policy: &IntruderPolicy) -> IntruderSpec {
        match policy {
            IntruderPolicy::None => IntruderSpec::None,
            IntruderPolicy::BangBang { dwell_s } => IntruderSpec::BangBang { dwell_s: Some(*dwell_s) },
            IntruderPolicy::RandomPiecewise { dwell_min_s, dwell_max_s } => {
                IntruderSpec::RandomPiecewise {
                    dwell_min_s: Some(*dwell_min_s),
                    dwell_max_s: Some(*dwell_max_s),
                }
            }
            IntruderPolicy::Scripted { schedule } => {
                IntruderSpec::Scripted { schedule_fps2: schedule.clone() }
            }
            IntruderPolicy::ClosureSchedule { schedule } => {
                IntruderSpec::ClosureSchedule { schedule_fps: schedule.clone() }
            }
            IntruderPolicy::RandomClosure { dwell_min_s, dwell_max_s } => IntruderSpec::RandomClosure {
                dwell_min_s: Some(*dwell_min_s),
                dwell_max_s: Some(*dwell_max_s),
            },
            IntruderPolicy::Cooperative => IntruderSpec::Cooperative,
        }
    }
}

/// Which advisories the issuer may pick from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IssuerSpec {
    #[serde(default = "default_selection")]
    pub selection: Selection,
    /// Catalog rows replacing the default catalog.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub catalog: Option<Vec<CatalogEntry>>,
    /// Add the synthesized rate grid to the catalog.
    #[serde(default = "yes")]
    pub synthesize: bool,
}

fn default_selection() -> Selection {
    Selection::First
}

fn yes() -> bool {
    true
}

impl Default for IssuerSpec {
    fn default() -> Self {
        IssuerSpec { selection: Selection::First, catalog: None, synthesize: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub model: String,
    #[serde(default)]
    pub params: ParamsSpec,
    pub initial: InitialSpec,
    pub advisory: AdvisorySpec,
    #[serde(default)]
    pub intruder: IntruderSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub issuer: Option<IssuerSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon_s: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cadence_s: Option<f64>,
    /// Slowest closure rate assumed when deriving the closure-game horizon.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closure_floor_fps: Option<f64>,
    /// Initial estimate `c_o` of the intruder bound, in g.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_o_g: Option<f64>,
    /// Start even when the initial state is outside the region.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub allow_unsafe_initial: bool,
    /// Fly the lower nominal trajectory instead of the winning strategy.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub nominal_replay: bool,
}

/// A scenario file after unit conversion and validation.
#[derive(Debug, Clone)]
pub struct LoadedScenario {
    pub file: ScenarioFile,
    pub params: ValidatedParams,
    pub state: EncounterState,
    pub advisory: Advisory,
    pub catalog: AdvisoryCatalog,
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<ScenarioFile, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn read(path: &std::path::Path) -> Result<ScenarioFile, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        ScenarioFile::parse(&text)
    }

    pub fn variant(&self) -> Result<ModelVariant, CliError> {
        self.model.parse().map_err(|e: crate::params::UnknownVariant| CliError::Invalid(e.to_string()))
    }

    /// Converts units and validates params, state and advisory.
    pub fn load(&self, catalog: Option<&AdvisoryCatalog>) -> Result<LoadedScenario, CliError> {
        let m = self.variant()?;
        let params = validate_params(self.params.to_params(), m).map_err(|e| CliError::Invalid(e.to_string()))?;
        let state = EncounterState::new(self.initial.r_ft, self.initial.h_ft, convert_rate(self.initial.v_fpm));
        if !state.is_valid() {
            return Err(CliError::Invalid("initial state must be finite".into()));
        }
        let catalog = match (catalog, self.issuer.as_ref().and_then(|i| i.catalog.as_ref())) {
            (Some(c), _) => c.clone(),
            (None, Some(rows)) => {
                AdvisoryCatalog::new(rows.clone()).map_err(|e| CliError::Invalid(e.to_string()))?
            }
            (None, None) => default_catalog(),
        };
        let advisory = self.advisory(&catalog, &params, m)?;
        Ok(LoadedScenario { file: self.clone(), params, state, advisory, catalog })
    }

    fn advisory(
        &self,
        catalog: &AdvisoryCatalog,
        p: &ValidatedParams,
        m: ModelVariant,
    ) -> Result<Advisory, CliError> {
        let invalid = |e: crate::advisory::AdvisoryError| CliError::Invalid(e.to_string());
        let (base, v_up_fpm) = match &self.advisory {
            AdvisorySpec::Label { label, v_up_fpm } => {
                let adv = catalog.advisory(label).or_else(|_| default_catalog().advisory(label)).map_err(invalid)?;
                (adv, *v_up_fpm)
            }
            AdvisorySpec::Bounds { w, v_lo_fpm, v_up_fpm } => {
                (Advisory::new(*w, convert_rate(*v_lo_fpm)), *v_up_fpm)
            }
        };
        base.check().map_err(invalid)?;
        let needs_upper = m.region_kind().needs_upper();
        match v_up_fpm {
            Some(up) => base.with_upper(convert_rate(up)).map_err(invalid),
            None if needs_upper => {
                let w = base.w();
                base.with_upper(w * p.v_climb_max).map_err(invalid)
            }
            None => Ok(base),
        }
    }
}

impl LoadedScenario {
    /// Seed after the environment override.
    pub fn seed(&self) -> Result<u64, CliError> {
        match std::env::var(SEED_ENV) {
            Ok(s) => s
                .trim()
                .parse()
                .map_err(|_| CliError::Invalid(format!("{SEED_ENV}={s} is not an unsigned integer"))),
            Err(_) => Ok(self.file.seed),
        }
    }

    pub fn issuer(&self) -> AdvisoryIssuer {
        let spec = self.file.issuer.clone().unwrap_or_default();
        let m = self.params.variant();
        let mode = if m.is_bounded() { IssuerMode::ForcedReissue } else { IssuerMode::KeepOrFilter };
        AdvisoryIssuer::new(mode, spec.selection, m.region_kind(), &self.catalog, spec.synthesize, &self.params)
    }

    /// Builds the engine scenario; `allow_unsafe`/`nominal` add to the file's flags.
    pub fn scenario(&self, allow_unsafe: bool, nominal: bool) -> Result<Scenario, CliError> {
        let f = &self.file;
        let mut strategy = if f.nominal_replay || nominal {
            OwnshipStrategy::nominal_replay(self.params)
        } else {
            OwnshipStrategy::new(self.params)
        };
        if let Some(c_o) = f.c_o_g {
            strategy = strategy
                .with_estimate(g_to_fps2(c_o, self.params.g))
                .map_err(|e| CliError::Invalid(e.to_string()))?;
        }
        let mut b = Scenario::builder(self.params, self.state, self.advisory.clone())
            .intruder(f.intruder.to_policy())
            .issuer(self.issuer())
            .strategy(strategy)
            .seed(self.seed()?)
            .allow_unsafe_initial(f.allow_unsafe_initial || allow_unsafe);
        if let Some(h) = f.horizon_s {
            b = b.horizon(h);
        }
        if let Some(floor) = f.closure_floor_fps {
            b = b.closure_floor(floor);
        }
        if f.cadence_s.is_some() {
            b = b.cadence(f.cadence_s);
        }
        b.build().map_err(|e| CliError::Invalid(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MODEL1: &str = r#"{
        "model": "inf-non",
        "params": {"r_p_ft": 500, "h_p_ft": 100, "r_v_fps": 250, "a_lo_g": 0.25, "a_max_g": 0.25},
        "initial": {"r_ft": 10000, "h_ft": 0, "v_fpm": 0},
        "advisory": {"label": "CL1500"},
        "intruder": {"kind": "none"},
        "seed": 7
    }"#;

    #[test]
    fn loads_with_unit_conversion() {
        let f = ScenarioFile::parse(MODEL1).unwrap();
        let l = f.load(None).unwrap();
        assert_eq!(l.params.a_lo, STANDARD_G / 4.0);
        assert_eq!(l.advisory.v_lo, 25.0);
        assert_eq!(l.params.variant(), ModelVariant::InfNon);
        assert_eq!(l.file.seed, 7);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = MODEL1.replace("r_p_ft", "rp_ft");
        let err = ScenarioFile::parse(&bad).unwrap_err();
        assert!(err.to_string().contains("rp_ft"), "{err}");
        let bad = MODEL1.replace("\"seed\"", "\"sed\"");
        assert!(ScenarioFile::parse(&bad).is_err());
    }

    #[test]
    fn bounded_models_get_the_default_upper_bound() {
        let text = MODEL1.replace("inf-non", "bound-non").replace("\"a_max_g\": 0.25", "\"a_max_g\": 0.5");
        let l = ScenarioFile::parse(&text).unwrap().load(None).unwrap();
        assert_eq!(l.advisory.v_up, Some(convert_rate(10_000.0)));
    }
}
