//! Discrete gauge theory on simplicial complexes.
//!
//! The crate is organised bottom-up: [`complex`] and [`paths`] provide the
//! combinatorics, [`group`] the gauge groups, [`forms`] the integral
//! structures, [`bundle`] and [`connection`] the geometry, and [`dynamics`],
//! [`stats`] and [`runner`] the applied layer.

pub mod bundle;
pub mod complex;
pub mod connection;
pub mod dynamics;
pub mod error;
pub mod forms;
pub mod group;
pub mod paths;
pub mod runner;
pub mod smith;
pub mod stats;

pub use error::{Error, Result};

/// Three-valued answer for searches that can run out of budget.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Yes,
    No,
    Unknown,
}
