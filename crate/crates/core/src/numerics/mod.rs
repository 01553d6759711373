//! Special functions and quadrature shared by the analytic modules.

pub mod quadrature;
pub mod special;

pub use quadrature::{
    integrate_adaptive, integrate_halfline, integrate_on_breaks, DecayClass, Quadrature,
    QuadratureConfig,
};
pub use special::{
    binomial, dawson, ln_gamma, log_std_normal_cdf, phi_imag_scaled, sphere_surface_area,
    std_normal_cdf, std_normal_pdf, ComplexValue,
};
