use serde::{Deserialize, Serialize};

/// Relative kinematic state of an encounter.
///
/// `h` is the intruder's altitude above the ownship and `v` the ownship's
/// climb rate relative to the intruder, so `h' = -v`. `t` is the time since
/// the current advisory was issued.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EncounterState {
    /// Horizontal separation (ft).
    pub r: f64,
    /// Vertical separation (ft).
    pub h: f64,
    /// Relative vertical rate (ft/s).
    pub v: f64,
    /// Time since the last advisory (s).
    pub t: f64,
}

impl EncounterState {
    pub fn new(r: f64, h: f64, v: f64) -> EncounterState {
        EncounterState { r, h, v, t: 0.0 }
    }

    pub fn is_valid(&self) -> bool {
        self.r.is_finite() && self.h.is_finite() && self.v.is_finite() && self.t.is_finite()
            && self.t >= 0.0
    }
}
