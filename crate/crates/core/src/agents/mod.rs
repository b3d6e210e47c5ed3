//! The three players: ownship strategy, intruder policy, advisory issuer.

pub mod intruder;
pub mod issuer;
pub mod strategy;

pub use intruder::{intruder_move, Intruder, IntruderMove, IntruderPolicy, PolicyError, Visible};
pub use issuer::{issue_advisory, AdvisoryIssuer, IssueError, Issued, IssuerMode, Selection};
pub use strategy::{ownship_accel, Band, OwnshipStrategy, Rule, StrategyBoundsError};
