//! Region rasters over `(r, h)` grids.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::scenario_file::{AdvisorySpec, ParamsSpec};
use super::CliError;
use crate::advisory::{default_catalog, Advisory};
use crate::params::{validate_params, ModelVariant, Params, ValidatedParams};
use crate::regions::{evaluate, RegionKind, RegionQuery};
use crate::state::EncounterState;
use crate::units::convert_rate;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl Range {
    /// `min, min + step, …` up to `max`; empty when `step ≤ 0` or `max < min`.
    pub fn values(&self) -> Vec<f64> {
        if !(self.step > 0.0 && self.min <= self.max && self.min.is_finite() && self.max.is_finite()) {
            return Vec::new();
        }
        let n = ((self.max - self.min) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.min + i as f64 * self.step).collect()
    }
}

/// One layer of a raster: a region kind, optionally against an intruder
/// that accelerates with the ownship at full strength.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Layer {
    pub kind: String,
    /// Evaluate with `a_lo − c`: what the ownship gains on an intruder
    /// accelerating the same way.
    #[serde(default)]
    pub maneuvering: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(default)]
    pub params: ParamsSpec,
    pub r_ft: Range,
    pub h_ft: Range,
    pub v_fpm: f64,
    pub advisory: AdvisorySpec,
    pub kind: String,
    #[serde(default)]
    pub maneuvering: bool,
    /// Second verdict column for side-by-side comparison.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compare: Option<Layer>,
}

/// A computed raster, rows ordered by `h` then `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct Raster {
    pub r: Vec<f64>,
    pub h: Vec<f64>,
    pub holds: Vec<bool>,
    pub compare: Option<Vec<bool>>,
}

impl Raster {
    pub fn at(&self, i_h: usize, i_r: usize) -> bool {
        self.holds[i_h * self.r.len() + i_r]
    }

    /// Cells where the safeable layer holds but the ε layer does not.
    pub fn nesting_violations(&self, first: RegionKind, second: RegionKind) -> usize {
        let Some(cmp) = &self.compare else { return 0 };
        let pairs = self.holds.iter().zip(cmp);
        match (first, second) {
            (RegionKind::CSafeable, RegionKind::CEps) => pairs.filter(|(s, e)| **s && !**e).count(),
            (RegionKind::CEps, RegionKind::CSafeable) => pairs.filter(|(e, s)| **s && !**e).count(),
            _ => 0,
        }
    }
}

fn default_model(kind: RegionKind) -> ModelVariant {
    match kind {
        RegionKind::LInf => ModelVariant::InfNon,
        RegionKind::LInfHoriz => ModelVariant::InfHoriz,
        RegionKind::CEps => ModelVariant::BoundNon,
        RegionKind::CSafeable => ModelVariant::SafeableNon,
    }
}

/// Parameters with `a_lo` reduced by the intruder bound.
pub fn against_maneuvering(p: &Params) -> Params {
    Params { a_lo: p.a_lo - p.c, ..*p }
}

struct Evaluator {
    kind: RegionKind,
    params: ValidatedParams,
    advisory: Advisory,
}

impl GridSpec {
    pub fn parse(text: &str) -> Result<GridSpec, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn kinds(&self) -> Result<(RegionKind, Option<RegionKind>), CliError> {
        let parse = |s: &str| s.parse::<RegionKind>().map_err(|e| CliError::Invalid(e.to_string()));
        let second = self.compare.as_ref().map(|l| parse(&l.kind)).transpose()?;
        Ok((parse(&self.kind)?, second))
    }

    fn evaluator(&self, kind: RegionKind, maneuvering: bool) -> Result<Evaluator, CliError> {
        let invalid = |e: String| CliError::Invalid(e);
        let m = match &self.model {
            Some(name) => name.parse().map_err(|e: crate::params::UnknownVariant| invalid(e.to_string()))?,
            None => default_model(kind),
        };
        let mut p = self.params.to_params();
        if maneuvering {
            p = against_maneuvering(&p);
        }
        let params = validate_params(p, m).map_err(|e| invalid(e.to_string()))?;
        let (base, v_up_fpm) = match &self.advisory {
            AdvisorySpec::Label { label, v_up_fpm } => {
                (default_catalog().advisory(label).map_err(|e| invalid(e.to_string()))?, *v_up_fpm)
            }
            AdvisorySpec::Bounds { w, v_lo_fpm, v_up_fpm } => {
                (Advisory::new(*w, convert_rate(*v_lo_fpm)), *v_up_fpm)
            }
        };
        let advisory = match v_up_fpm {
            Some(up) => base.with_upper(convert_rate(up)).map_err(|e| invalid(e.to_string()))?,
            None if kind.needs_upper() => {
                let up = base.w() * params.v_climb_max;
                base.with_upper(up).map_err(|e| invalid(e.to_string()))?
            }
            None => base,
        };
        Ok(Evaluator { kind, params, advisory })
    }

    pub fn raster(&self) -> Result<Raster, CliError> {
        let r = self.r_ft.values();
        let h = self.h_ft.values();
        if r.is_empty() || h.is_empty() {
            return Err(CliError::Invalid("grid range is empty".into()));
        }
        let (kind, second) = self.kinds()?;
        let first = self.evaluator(kind, self.maneuvering)?;
        let second = match (second, &self.compare) {
            (Some(k), Some(layer)) => Some(self.evaluator(k, layer.maneuvering)?),
            _ => None,
        };
        let v = convert_rate(self.v_fpm);
        let layer = |ev: &Evaluator| -> Result<Vec<bool>, CliError> {
            let mut out = Vec::with_capacity(r.len() * h.len());
            for &hh in &h {
                for &rr in &r {
                    let q = RegionQuery::new(EncounterState::new(rr, hh, v), &ev.advisory, &ev.params, ev.kind);
                    out.push(evaluate(&q).map_err(|e| CliError::Invalid(e.to_string()))?.holds);
                }
            }
            Ok(out)
        };
        let holds = layer(&first)?;
        let compare = second.as_ref().map(layer).transpose()?;
        Ok(Raster { r, h, holds, compare })
    }
}

pub fn write_raster<W: Write>(raster: &Raster, out: W) -> Result<(), CliError> {
    let mut w = ::csv::Writer::from_writer(out);
    let io = |e: ::csv::Error| CliError::Io(e.to_string());
    if raster.compare.is_some() {
        w.write_record(["r_ft", "h_ft", "holds", "holds_compare"]).map_err(io)?;
    } else {
        w.write_record(["r_ft", "h_ft", "holds"]).map_err(io)?;
    }
    let bit = |b: bool| if b { "1" } else { "0" }.to_string();
    for (i_h, &hh) in raster.h.iter().enumerate() {
        for (i_r, &rr) in raster.r.iter().enumerate() {
            let k = i_h * raster.r.len() + i_r;
            let mut row = vec![rr.to_string(), hh.to_string(), bit(raster.holds[k])];
            if let Some(cmp) = &raster.compare {
                row.push(bit(cmp[k]));
            }
            w.write_record(&row).map_err(io)?;
        }
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}
