//! Batch front end.
//!
//! Each command reads a JSON file, prints a summary to `out` and returns the
//! process exit code:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | region holds / safe to horizon / nothing found / raster written |
//! | 1 | input, validation or I/O error |
//! | 2 | region does not hold |
//! | 3 | NMAC |
//! | 4 | no safe advisory at a forced re-issue |
//! | 5 | raster found a safeable cell outside the ε region |

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde_json::json;
use thiserror::Error;

use crate::advisory::{AdvisoryCatalog, CatalogEntry};
use crate::agents::issuer::candidate_advisories;
use crate::engine::{falsify_with, run, FalsifyConfig, RunStatus};
use crate::regions::{evaluate, RegionKind, RegionQuery};
use crate::units::fps_to_fpm;

pub mod csv;
pub mod grid;
pub mod scenario_file;

pub use grid::{GridSpec, Raster};
pub use scenario_file::{LoadedScenario, ScenarioFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_REGION_FAILS: i32 = 2;
pub const EXIT_NMAC: i32 = 3;
pub const EXIT_NO_SAFE_ADVISORY: i32 = 4;
pub const EXIT_NESTING: i32 = 5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("I/O error: {0}")]
    Io(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

/// Exit code of a run status.
pub fn exit_code(status: RunStatus) -> i32 {
    match status {
        RunStatus::SafeToHorizon => EXIT_OK,
        RunStatus::Nmac(_) => EXIT_NMAC,
        RunStatus::NoSafeAdvisory(_) => EXIT_NO_SAFE_ADVISORY,
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn write_line(out: &mut dyn Write, line: impl std::fmt::Display) -> Result<(), CliError> {
    writeln!(out, "{line}").map_err(|e| CliError::Io(e.to_string()))
}

/// Reads a JSON array of catalog rows.
pub fn read_catalog(path: &Path) -> Result<AdvisoryCatalog, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let rows: Vec<CatalogEntry> = serde_json::from_str(&text).map_err(|e| CliError::Parse(e.to_string()))?;
    AdvisoryCatalog::new(rows).map_err(|e| CliError::Invalid(e.to_string()))
}

fn load(path: &Path, catalog: Option<&Path>) -> Result<LoadedScenario, CliError> {
    let catalog = catalog.map(read_catalog).transpose()?;
    ScenarioFile::read(path)?.load(catalog.as_ref())
}

fn parse_kind(kind: Option<&str>, l: &LoadedScenario) -> Result<RegionKind, CliError> {
    match kind {
        Some(k) => k.parse().map_err(|e: crate::regions::RegionError| CliError::Invalid(e.to_string())),
        None => Ok(l.params.variant().region_kind()),
    }
}

/// `check-region`: one JSON verdict line.
pub fn cmd_check_region(
    path: &Path,
    kind: Option<&str>,
    catalog: Option<&Path>,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let l = load(path, catalog)?;
    let kind = parse_kind(kind, &l)?;
    let mut adv = l.advisory.clone();
    if kind.needs_upper() && adv.v_up.is_none() {
        let up = adv.w() * l.params.v_climb_max;
        adv = adv.with_upper(up).map_err(|e| CliError::Invalid(e.to_string()))?;
    }
    let q = RegionQuery::new(l.state, &adv, &l.params, kind);
    let v = evaluate(&q).map_err(|e| CliError::Invalid(e.to_string()))?;
    write_line(out, serde_json::to_string(&v).map_err(|e| CliError::Io(e.to_string()))?)?;
    Ok(if v.holds { EXIT_OK } else { EXIT_REGION_FAILS })
}

#[derive(Debug, Clone, Default)]
pub struct SimulateOptions<'a> {
    pub out: Option<&'a Path>,
    pub catalog: Option<&'a Path>,
    pub allow_unsafe_initial: bool,
    pub nominal_replay: bool,
}

/// `simulate`: runs the scenario, optionally writes the trace CSV.
pub fn cmd_simulate(path: &Path, opts: &SimulateOptions<'_>, out: &mut dyn Write) -> Result<i32, CliError> {
    let l = load(path, opts.catalog)?;
    let sc = l.scenario(opts.allow_unsafe_initial, opts.nominal_replay)?;
    let outcome = run(&sc).map_err(|e| CliError::Invalid(e.to_string()))?;
    if let Some(csv_path) = opts.out {
        let f = File::create(csv_path).map_err(|e| io_err(csv_path, e))?;
        csv::write_trace(&outcome.trace, BufWriter::new(f))?;
    }
    let status = match outcome.status {
        RunStatus::SafeToHorizon => format!("safe to horizon {} s", sc.horizon),
        RunStatus::Nmac(t) => format!("NMAC at t = {t} s"),
        RunStatus::NoSafeAdvisory(t) => format!("no safe advisory at t = {t} s"),
    };
    write_line(out, format!("{status} ({} records)", outcome.trace.len()))?;
    Ok(exit_code(outcome.status))
}

#[derive(Debug, Clone)]
pub struct FalsifyOptions<'a> {
    pub budget: usize,
    pub workers: usize,
    /// Replay scenario path; the trace goes next to it with a `.csv` extension.
    pub replay: Option<&'a Path>,
    pub catalog: Option<&'a Path>,
}

/// Default replay path: `<scenario>.counterexample.json`.
pub fn default_replay_path(scenario: &Path) -> PathBuf {
    let stem = scenario.file_stem().and_then(|s| s.to_str()).unwrap_or("scenario");
    scenario.with_file_name(format!("{stem}.counterexample.json"))
}

/// `falsify`: searches for an NMAC and writes a replayable scenario when found.
pub fn cmd_falsify(path: &Path, opts: &FalsifyOptions<'_>, out: &mut dyn Write) -> Result<i32, CliError> {
    if opts.budget == 0 {
        return Err(CliError::Invalid("budget must be at least 1".into()));
    }
    let l = load(path, opts.catalog)?;
    let sc = l.scenario(false, false)?;
    let cfg = FalsifyConfig::new(opts.budget).workers(opts.workers);
    let report = falsify_with(&sc, cfg).map_err(|e| CliError::Invalid(e.to_string()))?;
    let Some(cx) = report.found else {
        write_line(out, format!("none found (budget {})", opts.budget))?;
        return Ok(EXIT_OK);
    };
    let replay = opts.replay.map_or_else(|| default_replay_path(path), Path::to_path_buf);
    let mut file = l.file.clone();
    file.intruder = scenario_file::IntruderSpec::from_policy(&cx.intruder);
    let mut issuer = file.issuer.clone().unwrap_or_default();
    issuer.selection = cx.selection;
    file.issuer = Some(issuer);
    file.seed = cx.seed;
    file.horizon_s = Some(sc.horizon);
    let text = serde_json::to_string_pretty(&file).map_err(|e| CliError::Io(e.to_string()))?;
    std::fs::write(&replay, text + "\n").map_err(|e| io_err(&replay, e))?;
    let trace_path = replay.with_extension("csv");
    let f = File::create(&trace_path).map_err(|e| io_err(&trace_path, e))?;
    csv::write_trace(&cx.trace, BufWriter::new(f))?;
    let t = cx.trace.first_nmac().map_or(f64::NAN, |r| r.t_abs);
    write_line(
        out,
        format!(
            "counterexample: rollout {} NMAC at t = {t} s; replay {} trace {}",
            cx.rollout,
            replay.display(),
            trace_path.display()
        ),
    )?;
    Ok(EXIT_NMAC)
}

/// `raster`: writes the grid CSV; exit 5 if a safeable cell lies outside C^ε.
pub fn cmd_raster(path: &Path, csv_out: Option<&Path>, out: &mut dyn Write) -> Result<i32, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let spec = GridSpec::parse(&text)?;
    let raster = spec.raster()?;
    match csv_out {
        Some(p) => {
            let f = File::create(p).map_err(|e| io_err(p, e))?;
            grid::write_raster(&raster, BufWriter::new(f))?;
        }
        None => grid::write_raster(&raster, &mut *out)?,
    }
    let (first, second) = spec.kinds()?;
    let bad = second.map_or(0, |s| raster.nesting_violations(first, s));
    if bad > 0 {
        eprintln!("{bad} cells are safeable but not ε-safe");
        return Ok(EXIT_NESTING);
    }
    Ok(EXIT_OK)
}

/// `filter-advisories`: the candidates passing the region at the initial state.
pub fn cmd_filter_advisories(
    path: &Path,
    kind: Option<&str>,
    catalog: Option<&Path>,
    synthesize: bool,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let l = load(path, catalog)?;
    let kind = parse_kind(kind, &l)?;
    let candidates = candidate_advisories(&l.catalog, synthesize, kind.needs_upper(), &l.params);
    let mut passed = 0;
    for adv in &candidates {
        let v = evaluate(&RegionQuery::new(l.state, adv, &l.params, kind))
            .map_err(|e| CliError::Invalid(e.to_string()))?;
        if !v.holds {
            continue;
        }
        passed += 1;
        let line = json!({
            "label": adv.label.as_deref(),
            "w": adv.w() as i8,
            "v_lo_fpm": fps_to_fpm(adv.v_lo),
            "v_up_fpm": adv.v_up.map(fps_to_fpm),
            "margin": v.margin,
        });
        write_line(out, line)?;
    }
    Ok(if passed > 0 { EXIT_OK } else { EXIT_REGION_FAILS })
}
