//! Monte Carlo oracles for the analytic quantities.
//!
//! Every estimator splits its samples into fixed-size chunks, each with its
//! own counter-derived ChaCha8 stream, and merges the chunk results in order.
//! Results therefore depend on the [`RngSpec`] only, not on the thread pool.

pub mod estimate;
pub mod estimators;
pub mod geometry;
pub mod lp;
pub mod nnls;
pub mod rng;

pub use estimate::{Estimate, Moments, DEFAULT_CI_LEVEL};
pub use estimators::{
    estimate_absorption, estimate_faces, estimate_gp_frequency, estimate_gp_transform, estimate_intrinsic_volumes,
    estimate_solid_angle, estimate_spherical_fraction, estimate_volume, AbsorptionMode,
};
pub use geometry::{
    goodman_pollack_sample, haar_orthogonal, hull_area_2d, projected_simplex, regular_simplex_vertices,
    sample_gaussian_points, GoodmanPollackSample, SimplexModel,
};
pub use lp::contains;
pub use nnls::nnls;
pub use rng::RngSpec;
