//! Advisories and the advisory catalog.
//!
//! An advisory constrains the relative climb rate `v` in sense `w`: it asks for
//! `w·v ≥ w·v_lo` and, for the two-sided variants, `w·v ≤ w·v_up`. Catalog
//! rates are absolute ownship climb rates in ft/min; the library uses them as
//! relative targets directly, i.e. as seen against a level intruder.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::units::convert_rate;

/// Direction of an advisory: upsense (+1) or downsense (−1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Sense {
    Up,
    Down,
}

impl Sense {
    pub fn sign(self) -> f64 {
        match self {
            Sense::Up => 1.0,
            Sense::Down => -1.0,
        }
    }

    pub fn flip(self) -> Sense {
        match self {
            Sense::Up => Sense::Down,
            Sense::Down => Sense::Up,
        }
    }

    pub fn from_sign(w: f64) -> Option<Sense> {
        if w == 1.0 {
            Some(Sense::Up)
        } else if w == -1.0 {
            Some(Sense::Down)
        } else {
            None
        }
    }
}

impl From<Sense> for i8 {
    fn from(s: Sense) -> i8 {
        match s {
            Sense::Up => 1,
            Sense::Down => -1,
        }
    }
}

impl TryFrom<i8> for Sense {
    type Error = AdvisoryError;

    fn try_from(w: i8) -> Result<Self, Self::Error> {
        match w {
            1 => Ok(Sense::Up),
            -1 => Ok(Sense::Down),
            _ => Err(AdvisoryError::BadSense(w as f64)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AdvisoryError {
    #[error("advisory sense must be +1 or -1, got {0}")]
    BadSense(f64),
    #[error("advisory bounds out of order: w·v_lo = {lo} > w·v_up = {up}")]
    Bounds { lo: f64, up: f64 },
    #[error("non-finite advisory rate")]
    NonFinite,
    #[error("duplicate catalog label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown advisory label `{0}`")]
    UnknownLabel(String),
    #[error("advisory `{0}` carries no climb-rate constraint")]
    NoConstraint(String),
}

/// A relative climb-rate advisory `(w, v_lo[, v_up])`, rates in ft/s.
#[derive(Debug, Clone, PartialEq)]
pub struct Advisory {
    pub sense: Sense,
    pub v_lo: f64,
    pub v_up: Option<f64>,
    pub label: Option<Arc<str>>,
}

impl Advisory {
    pub fn new(sense: Sense, v_lo: f64) -> Advisory {
        Advisory { sense, v_lo, v_up: None, label: None }
    }

    /// Two-sided advisory; fails when `w·v_lo > w·v_up`.
    pub fn two_sided(sense: Sense, v_lo: f64, v_up: f64) -> Result<Advisory, AdvisoryError> {
        Advisory::new(sense, v_lo).with_upper(v_up)
    }

    pub fn with_upper(mut self, v_up: f64) -> Result<Advisory, AdvisoryError> {
        self.v_up = Some(v_up);
        self.check()?;
        Ok(self)
    }

    pub fn with_label(mut self, label: impl Into<Arc<str>>) -> Advisory {
        self.label = Some(label.into());
        self
    }

    pub fn w(&self) -> f64 {
        self.sense.sign()
    }

    pub fn check(&self) -> Result<(), AdvisoryError> {
        if !self.v_lo.is_finite() || self.v_up.is_some_and(|u| !u.is_finite()) {
            return Err(AdvisoryError::NonFinite);
        }
        if let Some(up) = self.v_up {
            let w = self.w();
            if w * self.v_lo > w * up {
                return Err(AdvisoryError::Bounds { lo: w * self.v_lo, up: w * up });
            }
        }
        Ok(())
    }

    /// Same bounds, no label.
    pub fn bounds(&self) -> (Sense, f64, Option<f64>) {
        (self.sense, self.v_lo, self.v_up)
    }
}

impl fmt::Display for Advisory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(label) = &self.label {
            write!(f, "{label} ")?;
        }
        write!(f, "(w={:+}, v_lo={} ft/s", i8::from(self.sense), self.v_lo)?;
        if let Some(up) = self.v_up {
            write!(f, ", v_up={up} ft/s")?;
        }
        f.write_str(")")
    }
}

/// What a catalog row asks of the pilot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CatalogAction {
    /// A climb-rate constraint in sense `w`, rate in ft/min.
    Resolution { w: Sense, rate_fpm: f64 },
    /// Clear of conflict: no constraint, no region test.
    ClearOfConflict { coc: bool },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub label: String,
    #[serde(flatten)]
    pub action: CatalogAction,
}

impl CatalogEntry {
    pub fn resolution(label: &str, w: Sense, rate_fpm: f64) -> CatalogEntry {
        CatalogEntry { label: label.to_string(), action: CatalogAction::Resolution { w, rate_fpm } }
    }

    pub fn is_coc(&self) -> bool {
        matches!(self.action, CatalogAction::ClearOfConflict { .. })
    }

    /// One-sided advisory for this row, `None` for clear-of-conflict.
    pub fn to_advisory(&self) -> Option<Advisory> {
        match self.action {
            CatalogAction::Resolution { w, rate_fpm } => {
                Some(Advisory::new(w, convert_rate(rate_fpm)).with_label(self.label.as_str()))
            }
            CatalogAction::ClearOfConflict { .. } => None,
        }
    }
}

/// Ordered advisory catalog with unique labels.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AdvisoryCatalog {
    entries: Vec<CatalogEntry>,
}

impl AdvisoryCatalog {
    pub fn new(entries: Vec<CatalogEntry>) -> Result<AdvisoryCatalog, AdvisoryError> {
        let mut catalog = AdvisoryCatalog::default();
        for e in entries {
            catalog.push(e)?;
        }
        Ok(catalog)
    }

    pub fn empty() -> AdvisoryCatalog {
        AdvisoryCatalog::default()
    }

    pub fn push(&mut self, entry: CatalogEntry) -> Result<(), AdvisoryError> {
        if self.lookup(&entry.label).is_some() {
            return Err(AdvisoryError::DuplicateLabel(entry.label));
        }
        if let CatalogAction::Resolution { rate_fpm, .. } = entry.action {
            if !rate_fpm.is_finite() {
                return Err(AdvisoryError::NonFinite);
            }
        }
        self.entries.push(entry);
        Ok(())
    }

    /// Appends user-configured rows, e.g. the remaining ACAS X table entries.
    pub fn extend(&mut self, entries: Vec<CatalogEntry>) -> Result<(), AdvisoryError> {
        entries.into_iter().try_for_each(|e| self.push(e))
    }

    pub fn entries(&self) -> &[CatalogEntry] {
        &self.entries
    }

    pub fn lookup(&self, label: &str) -> Option<&CatalogEntry> {
        self.entries.iter().find(|e| e.label == label)
    }

    /// Looks up `label` and converts it to a one-sided relative advisory.
    pub fn advisory(&self, label: &str) -> Result<Advisory, AdvisoryError> {
        let entry =
            self.lookup(label).ok_or_else(|| AdvisoryError::UnknownLabel(label.to_string()))?;
        entry.to_advisory().ok_or_else(|| AdvisoryError::NoConstraint(label.to_string()))
    }

    /// All constraining rows as one-sided advisories, in catalog order.
    pub fn advisories(&self) -> impl Iterator<Item = Advisory> + '_ {
        self.entries.iter().filter_map(CatalogEntry::to_advisory)
    }

    pub fn labels_unique(&self) -> bool {
        let mut seen = HashSet::new();
        self.entries.iter().all(|e| seen.insert(e.label.as_str()))
    }
}

/// The advisories whose parameters can be read off the prose: COC, DND,
/// CL1500, SCL2500, DNC2000 and DNC. Anything else comes from configuration.
pub fn default_catalog() -> AdvisoryCatalog {
    AdvisoryCatalog::new(vec![
        CatalogEntry {
            label: "COC".to_string(),
            action: CatalogAction::ClearOfConflict { coc: true },
        },
        CatalogEntry::resolution("DND", Sense::Up, 0.0),
        CatalogEntry::resolution("CL1500", Sense::Up, 1500.0),
        CatalogEntry::resolution("SCL2500", Sense::Up, 2500.0),
        CatalogEntry::resolution("DNC2000", Sense::Down, 2000.0),
        CatalogEntry::resolution("DNC", Sense::Down, 0.0),
    ])
    .expect("default catalog labels are unique")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prose_advisories() {
        let cat = default_catalog();
        let cl = cat.advisory("CL1500").unwrap();
        assert_eq!((cl.sense, cl.v_lo), (Sense::Up, 25.0));
        let dnc = cat.advisory("DNC2000").unwrap();
        assert_eq!((dnc.sense, dnc.v_lo), (Sense::Down, convert_rate(2000.0)));
        let dnd = cat.advisory("DND").unwrap();
        assert_eq!((dnd.sense, dnd.v_lo), (Sense::Up, 0.0));
        assert!(cat.lookup("COC").unwrap().is_coc());
        assert_eq!(cat.advisory("COC"), Err(AdvisoryError::NoConstraint("COC".into())));
        assert!(matches!(cat.advisory("DES1500"), Err(AdvisoryError::UnknownLabel(_))));
    }

    #[test]
    fn catalog_invariants() {
        let cat = default_catalog();
        assert!(cat.labels_unique());
        for a in cat.advisories() {
            assert!(a.w() == 1.0 || a.w() == -1.0);
            assert!(a.v_lo.is_finite());
        }
        assert_eq!(cat.advisories().count(), 5);
    }

    #[test]
    fn duplicate_labels_rejected() {
        let mut cat = default_catalog();
        let err = cat.push(CatalogEntry::resolution("DND", Sense::Down, 0.0)).unwrap_err();
        assert_eq!(err, AdvisoryError::DuplicateLabel("DND".into()));
        cat.extend(vec![CatalogEntry::resolution("DES1500", Sense::Down, -1500.0)]).unwrap();
        assert_eq!(cat.advisory("DES1500").unwrap().v_lo, -25.0);
    }

    #[test]
    fn catalog_rows_parse_from_json() {
        let rows: Vec<CatalogEntry> = serde_json::from_str(
            r#"[{"label": "DES1500", "w": -1, "rate_fpm": -1500},
                {"label": "COC2", "coc": true}]"#,
        )
        .unwrap();
        assert_eq!(rows[0], CatalogEntry::resolution("DES1500", Sense::Down, -1500.0));
        assert!(rows[1].is_coc());
        assert!(serde_json::from_str::<Vec<CatalogEntry>>(r#"[{"label":"X","w":0,"rate_fpm":1}]"#)
            .is_err());
    }

    #[test]
    fn two_sided_order() {
        assert!(Advisory::two_sided(Sense::Up, 25.0, 50.0).is_ok());
        assert!(Advisory::two_sided(Sense::Up, 25.0, 25.0).is_ok());
        assert!(matches!(
            Advisory::two_sided(Sense::Up, 25.0, 20.0),
            Err(AdvisoryError::Bounds { .. })
        ));
        assert!(Advisory::two_sided(Sense::Down, -25.0, -50.0).is_ok());
        assert!(Advisory::two_sided(Sense::Down, -25.0, 0.0).is_err());
    }
}
