//! Orthant probabilities of equicorrelated Gaussian vectors and the
//! geometry of Gaussian polytopes built on them.

// published constants keep their full digits; `!(x < y)` style checks are NaN guards
#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod absorption;
pub mod cli;
pub mod cones;
pub mod error;
pub mod montecarlo;
pub mod numerics;
pub mod orthant;
pub mod polytope_stats;
pub mod spherical;

pub use error::{Error, Result};
