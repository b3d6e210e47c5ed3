//! The chapters of the mdbook guide, compiled so their code blocks run as
//! doctests against the current library.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/encounters.md")]
pub mod encounters {}
#[doc = include_str!("../../../book/src/regions.md")]
pub mod regions {}
#[doc = include_str!("../../../book/src/agents.md")]
pub mod agents {}
#[doc = include_str!("../../../book/src/simulation.md")]
pub mod simulation {}
#[doc = include_str!("../../../book/src/falsification.md")]
pub mod falsification {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
