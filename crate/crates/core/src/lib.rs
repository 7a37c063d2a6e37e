//! Revenue-optimal selling mechanisms for a single additive buyer over
//! finitely supported value distributions.
//!
//! * [`model`]: distributions, menus and their structural predicates.
//! * [`buyer`]: best responses, exact expected revenue, two-item region
//!   geometry and revenue-monotonicity audits.
//! * [`constructions`]: menu transformations that never lose revenue, each
//!   returning a checked certificate.
//! * [`search`]: exhaustive grid search for optimal menus under structural
//!   constraints.
//! * [`continuous`]: equal-revenue distributions and the constant `w`.
//! * [`randomized`]: lottery menus, false-name deviations, and the revenue LP.
//! * [`reproduce`] and [`commands`]: reproduction targets and the command
//!   surface used by the `mechbench` binary.

pub mod buyer;
pub mod commands;
pub mod constructions;
pub mod continuous;
pub mod data;
pub mod error;
pub mod model;
pub mod properties;
pub mod randomized;
pub mod reproduce;
pub mod rational;
pub mod search;

pub use error::{Error, Result};
pub use rational::Rational;
