//! Executable models of ACAS X style vertical collision avoidance games.
//!
//! The crate evaluates the implicit safe and safeable regions of seven
//! encounter games exactly, runs the ownship's winning strategies against
//! adversarial intruders in an event-driven engine, and searches for
//! counterexamples.
//!
//! ```
//! use acaslab::advisory::default_catalog;
//! use acaslab::params::{validate_params, ModelVariant, Params};
//! use acaslab::regions::eval_l_inf;
//! use acaslab::state::EncounterState;
//!
//! let p = validate_params(Params::default(), ModelVariant::InfNon).unwrap();
//! let cl1500 = default_catalog().advisory("CL1500").unwrap();
//! let far = EncounterState::new(10_000.0, 0.0, 0.0);
//! assert!(eval_l_inf(&far, &cl1500, &p).holds);
//! ```

pub mod advisory;
pub mod agents;
pub mod cli;
pub mod dynamics;
pub mod engine;
pub mod params;
pub mod regions;
pub mod state;
pub mod units;

pub use advisory::{Advisory, AdvisoryCatalog, Sense};
pub use params::{validate_params, ModelVariant, Params, ValidatedParams};
pub use state::EncounterState;
