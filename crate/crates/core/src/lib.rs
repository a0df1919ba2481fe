//! Tools for extending unplanned experimental designs.
//!
//! The crate measures how well a sampling plan fills the unit cube with the
//! Morris-Mitchell criterion and its size-normalized (intensive) variant,
//! trains surrogate models on existing observations, and proposes the next
//! infill point by maximizing an overall desirability that can include the
//! space-filling improvement as an extra objective.
//!
//! Modules:
//! * [`designs`]: sampling plans, Latin hypercubes, normalization, synthetic data.
//! * [`spacefill`]: Morris-Mitchell criteria, incremental updates and studies.
//! * [`desirability`]: Derringer-Suich transforms and the geometric mean.
//! * [`surrogate`]: random forest and Gaussian process regressors, evaluation.
//! * [`moo`]: objective assembly, differential evolution, Pareto fronts.
//! * [`diagnostics`]: infill-point plots rendered as SVG.
//! * [`cli`]: the `infill` command-line tool.

pub mod cli;
pub mod designs;
pub mod desirability;
pub mod diagnostics;
pub mod error;
pub mod moo;
pub mod spacefill;
pub mod surrogate;

mod rng;

pub use error::{Error, Result};
