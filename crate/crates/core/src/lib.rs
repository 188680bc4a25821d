//! Numerical library for symmetric generalized hybrid mappings in
//! finite-dimensional lp spaces: class membership checking, parameter-cone
//! fitting, quasi-nonexpansiveness and demiclosedness probes, and Picard /
//! one-level / two-level fixed-point iteration with full trace diagnostics.
//!
//! The `sgh` binary exposes the experiment surface: `check-class`,
//! `fit-cone`, `iterate`, and `verify-theorems`.

pub mod cli;
pub mod conefit;
pub mod config;
pub mod domain;
pub mod error;
pub mod hybrid;
pub mod iteration;
pub mod mapping;
pub mod modulus;
pub mod properties;
pub mod sampling;
pub mod space;
pub mod verify;

pub use error::{Error, Result};
