//! Simulation and estimation of first-passage probabilities of Lévy
//! processes in the domain of attraction of a stable law, below constant and
//! moving boundaries `1 ± t^γ`.
//!
//! The crate is organized bottom-up: [`rvcalc`] and [`stable`] provide the
//! analytic ingredients, [`levymodel`] the triplet, [`decompose`] the
//! horizon-dependent jump split, [`simulate`] path generation,
//! [`passage`] survival predicates, [`fluctuation`] ladder quantities,
//! [`estimate`] the Monte Carlo estimators and [`cli`] batch runs.

// Negated comparisons are used on purpose so that NaN arguments fail the
// domain checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod decompose;
pub mod error;
pub mod estimate;
pub mod fluctuation;
pub mod levymodel;
pub mod parallel;
pub mod passage;
pub mod quad;
pub mod rng;
pub mod rvcalc;
pub mod simulate;
pub mod stable;
pub mod stats;

pub use error::{Error, Result};
