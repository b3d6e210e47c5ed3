//! Encounter parameters, the seven game variants, and init-constraint checks.

use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::regions::RegionKind;
use crate::units::{convert_rate, STANDARD_G};

/// Physical and game constants of an encounter, in feet and seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    /// Puck radius (ft).
    pub r_p: f64,
    /// Puck half-height (ft).
    pub h_p: f64,
    /// Horizontal closure rate (ft/s).
    pub r_v: f64,
    /// Minimum advisory-compliant vertical acceleration (ft/s²).
    pub a_lo: f64,
    /// Upper nominal acceleration of the two-sided variants (ft/s²).
    pub a_up: f64,
    /// Ownship vertical acceleration limit (ft/s²).
    pub a_max: f64,
    /// Intruder vertical acceleration bound (ft/s²).
    pub c: f64,
    /// Maximum closure rate the intruder may choose (ft/s).
    pub v_max: f64,
    /// Advisory re-issue bound (s). Negative means unbounded.
    pub epsilon: f64,
    /// Gravity used to express the acceleration defaults (ft/s²).
    pub g: f64,
    /// Largest follow-up climb rate considered plausible (ft/s).
    pub v_climb_max: f64,
}

impl Default for Params {
    fn default() -> Self {
        let g = STANDARD_G;
        Params {
            r_p: 500.0,
            h_p: 100.0,
            r_v: 250.0,
            a_lo: g / 4.0,
            a_up: g / 2.0,
            a_max: g / 2.0,
            c: g / 16.0,
            v_max: 500.0,
            epsilon: 2.0,
            g,
            v_climb_max: convert_rate(10_000.0),
        }
    }
}

/// The seven encounter games, one per safety theorem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModelVariant {
    /// Infinite time, non-maneuvering intruder.
    InfNon,
    /// Infinite time, vertically maneuvering intruder.
    InfVert,
    /// Infinite time, intruder controls the closure rate.
    InfHoriz,
    /// Bounded time, non-maneuvering intruder.
    BoundNon,
    /// Bounded time, vertically maneuvering intruder.
    BoundVert,
    /// Safeable advisories, non-maneuvering intruder.
    SafeableNon,
    /// Safeable advisories, vertically maneuvering intruder.
    SafeableVert,
}

/// Which control channel the intruder owns in a variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntruderChannel {
    None,
    Vertical,
    Horizontal,
}

impl ModelVariant {
    pub const ALL: [ModelVariant; 7] = [
        ModelVariant::InfNon,
        ModelVariant::InfVert,
        ModelVariant::InfHoriz,
        ModelVariant::BoundNon,
        ModelVariant::BoundVert,
        ModelVariant::SafeableNon,
        ModelVariant::SafeableVert,
    ];

    /// Name used in scenario files and on the command line.
    pub fn name(self) -> &'static str {
        match self {
            ModelVariant::InfNon => "inf-non",
            ModelVariant::InfVert => "inf-vert",
            ModelVariant::InfHoriz => "inf-horiz",
            ModelVariant::BoundNon => "bound-non",
            ModelVariant::BoundVert => "bound-vert",
            ModelVariant::SafeableNon => "safeable-non",
            ModelVariant::SafeableVert => "safeable-vert",
        }
    }

    /// Position in the sequence of games, 1 through 7.
    pub fn number(self) -> usize {
        ModelVariant::ALL.iter().position(|&m| m == self).unwrap() + 1
    }

    pub fn region_kind(self) -> RegionKind {
        match self {
            ModelVariant::InfNon | ModelVariant::InfVert => RegionKind::LInf,
            ModelVariant::InfHoriz => RegionKind::LInfHoriz,
            ModelVariant::BoundNon | ModelVariant::BoundVert => RegionKind::CEps,
            ModelVariant::SafeableNon | ModelVariant::SafeableVert => RegionKind::CSafeable,
        }
    }

    pub fn intruder_channel(self) -> IntruderChannel {
        match self {
            ModelVariant::InfVert | ModelVariant::BoundVert | ModelVariant::SafeableVert => {
                IntruderChannel::Vertical
            }
            ModelVariant::InfHoriz => IntruderChannel::Horizontal,
            _ => IntruderChannel::None,
        }
    }

    /// Two-sided advisories with a time bound (variants 4 through 7).
    pub fn is_bounded(self) -> bool {
        matches!(
            self,
            ModelVariant::BoundNon
                | ModelVariant::BoundVert
                | ModelVariant::SafeableNon
                | ModelVariant::SafeableVert
        )
    }

    /// Whether the ownship works with an estimate `c_o` of the intruder bound.
    pub fn uses_estimate(self) -> bool {
        matches!(self, ModelVariant::BoundVert | ModelVariant::SafeableVert)
    }
}

impl fmt::Display for ModelVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown model variant `{0}`")]
pub struct UnknownVariant(pub String);

impl FromStr for ModelVariant {
    type Err = UnknownVariant;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ModelVariant::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| UnknownVariant(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParamsError {
    /// An init conjunct of the variant does not hold. Carries the conjunct.
    #[error("constraint violated: {0}")]
    ConstraintViolation(&'static str),
}

/// Parameters that passed [`validate_params`] for a specific variant.
///
/// Region evaluators, strategies and the engine only accept this type.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidatedParams {
    params: Params,
    variant: ModelVariant,
}

impl ValidatedParams {
    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn variant(&self) -> ModelVariant {
        self.variant
    }

    pub fn into_inner(self) -> Params {
        self.params
    }
}

impl Deref for ValidatedParams {
    type Target = Params;

    fn deref(&self) -> &Params {
        &self.params
    }
}

fn require(ok: bool, conjunct: &'static str) -> Result<(), ParamsError> {
    if ok {
        Ok(())
    } else {
        Err(ParamsError::ConstraintViolation(conjunct))
    }
}

/// Checks the init constraints of variant `m` and wraps `p` on success.
///
/// Besides each game's own init line this also demands the conjuncts the
/// transcribed winning strategy needs to stay within `a_max`.
pub fn validate_params(p: Params, m: ModelVariant) -> Result<ValidatedParams, ParamsError> {
    let all = [
        p.r_p, p.h_p, p.r_v, p.a_lo, p.a_up, p.a_max, p.c, p.v_max, p.epsilon, p.g,
        p.v_climb_max,
    ];
    require(all.iter().all(|x| x.is_finite()), "all parameters finite")?;
    require(p.r_p >= 0.0, "r_p ≥ 0")?;
    require(p.h_p > 0.0, "h_p > 0")?;
    require(p.r_v >= 0.0, "r_v ≥ 0")?;
    require(p.a_lo > 0.0, "a_lo > 0")?;
    require(p.g > 0.0, "g > 0")?;
    require(p.v_climb_max > 0.0, "v_climb_max > 0")?;

    match m {
        ModelVariant::InfNon => {
            require(p.a_max >= p.a_lo, "a_max ≥ a_lo")?;
        }
        ModelVariant::InfVert => {
            require(p.c > 0.0, "c > 0")?;
            require(p.a_max >= p.a_lo + p.c, "a_max ≥ a_lo + c")?;
        }
        ModelVariant::InfHoriz => {
            require(p.v_max > 0.0, "v_max > 0")?;
            require(p.a_max >= p.a_lo, "a_max ≥ a_lo")?;
        }
        ModelVariant::BoundNon => {
            require(p.a_up > p.a_lo, "a_up > a_lo")?;
            require(p.a_max >= p.a_lo, "a_max ≥ a_lo")?;
        }
        ModelVariant::BoundVert => {
            require(p.a_up > p.a_lo, "a_up > a_lo")?;
            require(p.c > 0.0, "c > 0")?;
            require(p.a_max >= p.a_lo + p.c, "a_max ≥ a_lo + c")?;
            require(p.a_up >= p.a_lo + 2.0 * p.c, "a_up ≥ a_lo + 2c")?;
        }
        ModelVariant::SafeableNon => {
            require(p.a_up > p.a_lo + 2.0 * p.c, "a_up > a_lo + 2c")?;
            require(p.epsilon >= 0.0, "ε ≥ 0")?;
            require(p.a_max >= p.a_lo, "a_max ≥ a_lo")?;
        }
        ModelVariant::SafeableVert => {
            require(p.c > 0.0, "c > 0")?;
            require(p.a_up > p.a_lo + 2.0 * p.c, "a_up > a_lo + 2c")?;
            require(p.a_max >= p.a_lo + p.c, "a_max ≥ a_lo + c")?;
            require(p.epsilon >= 0.0, "ε ≥ 0")?;
        }
    }
    Ok(ValidatedParams { params: p, variant: m })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> Params {
        Params::default()
    }

    #[test]
    fn defaults_hold_for_every_variant() {
        for m in ModelVariant::ALL {
            validate_params(base(), m).unwrap_or_else(|e| panic!("{m}: {e}"));
        }
    }

    #[test]
    fn inf_non_accepts_a_max_equal_a_lo() {
        let g = STANDARD_G;
        let p = Params { r_p: 500.0, h_p: 100.0, a_lo: g / 4.0, a_max: g / 4.0, ..base() };
        assert!(validate_params(p, ModelVariant::InfNon).is_ok());
    }

    #[test]
    fn inf_vert_rejects_a_max_just_below_a_lo_plus_c() {
        let p = base();
        let p = Params { c: 1.0, a_max: p.a_lo + 1.0 - 0.001, ..p };
        assert_eq!(
            validate_params(p, ModelVariant::InfVert),
            Err(ParamsError::ConstraintViolation("a_max ≥ a_lo + c"))
        );
    }

    #[test]
    fn safeable_non_is_strict_in_a_up() {
        let p = base();
        let p = Params { a_up: p.a_lo + 2.0 * p.c, ..p };
        assert_eq!(
            validate_params(p, ModelVariant::SafeableNon),
            Err(ParamsError::ConstraintViolation("a_up > a_lo + 2c"))
        );
    }

    #[test]
    fn negative_epsilon_only_for_bounded_time_variants() {
        let p = Params { epsilon: -1.0, ..base() };
        assert!(validate_params(p, ModelVariant::BoundNon).is_ok());
        assert!(validate_params(p, ModelVariant::BoundVert).is_ok());
        assert_eq!(
            validate_params(p, ModelVariant::SafeableNon),
            Err(ParamsError::ConstraintViolation("ε ≥ 0"))
        );
        assert_eq!(
            validate_params(p, ModelVariant::SafeableVert),
            Err(ParamsError::ConstraintViolation("ε ≥ 0"))
        );
    }

    #[test]
    fn common_conjuncts() {
        let cases = [
            (Params { r_p: -1.0, ..base() }, "r_p ≥ 0"),
            (Params { h_p: 0.0, ..base() }, "h_p > 0"),
            (Params { r_v: -0.5, ..base() }, "r_v ≥ 0"),
            (Params { a_lo: 0.0, ..base() }, "a_lo > 0"),
            (Params { r_v: f64::NAN, ..base() }, "all parameters finite"),
        ];
        for (p, conjunct) in cases {
            assert_eq!(
                validate_params(p, ModelVariant::InfNon),
                Err(ParamsError::ConstraintViolation(conjunct))
            );
        }
        let p = Params { v_max: 0.0, ..base() };
        assert_eq!(
            validate_params(p, ModelVariant::InfHoriz),
            Err(ParamsError::ConstraintViolation("v_max > 0"))
        );
    }

    #[test]
    fn revalidation_is_idempotent() {
        for m in ModelVariant::ALL {
            let v = validate_params(base(), m).unwrap();
            let again = validate_params(*v.params(), m).unwrap();
            assert_eq!(v, again);
        }
    }

    #[test]
    fn variant_names_round_trip() {
        for m in ModelVariant::ALL {
            assert_eq!(m.name().parse::<ModelVariant>().unwrap(), m);
        }
        assert!("inf-none".parse::<ModelVariant>().is_err());
        assert_eq!(ModelVariant::SafeableVert.number(), 7);
    }
}
