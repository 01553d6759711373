//! Regular spherical simplices.
//!
//! `n` unit vectors with pairwise angle `ℓ` span the cone `C_n(r)` with
//! `r = cos ℓ/(1 - cos ℓ)`; the simplex they cut out of `S^{n-1}` therefore
//! occupies the fraction `g_n(-cos ℓ/(1 + (n-1)cos ℓ))` of the sphere.

use std::f64::consts::PI;

use crate::error::{domain, Result};
use crate::numerics::{sphere_surface_area, QuadratureConfig};
use crate::orthant::g_nr;

/// A regular spherical simplex with `n` vertices and side length `ell`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalSimplexQuery {
    pub n: u32,
    pub ell: f64,
}

impl SphericalSimplexQuery {
    pub fn new(n: u32, ell: f64) -> Result<Self> {
        if n < 2 {
            return domain(format!("a spherical simplex needs n >= 2 vertices, got {n}"));
        }
        let max = max_side_length(n);
        if !(ell > 0.0 && ell < max) {
            return domain(format!("side length must lie in (0, {max}), got {ell}"));
        }
        Ok(Self { n, ell })
    }

    /// Parameter of the polar cone, `-cos ℓ/(1 + (n-1)cos ℓ)`.
    pub fn polar_r(&self) -> f64 {
        let c = self.ell.cos();
        -c / (1.0 + (self.n as f64 - 1.0) * c)
    }
}

/// `arccos(-1/(n-1))`, where the simplex becomes a hemisphere.
pub fn max_side_length(n: u32) -> f64 {
    if n <= 2 {
        PI
    } else {
        (-1.0 / (n as f64 - 1.0)).acos()
    }
}

/// Fraction of `S^{n-1}` covered by the simplex.
pub fn spherical_simplex_volume_fraction(
    q: &SphericalSimplexQuery,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let q = SphericalSimplexQuery::new(q.n, q.ell)?;
    g_nr(q.n, q.polar_r(), cfg)
}

/// Surface measure of the simplex, `fraction · 2π^{n/2}/Γ(n/2)`.
pub fn spherical_simplex_volume(q: &SphericalSimplexQuery, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(spherical_simplex_volume_fraction(q, cfg)? * sphere_surface_area(q.n))
}

/// `r = cos ℓ/(1 - cos ℓ)`.
pub fn side_length_to_r(ell: f64) -> Result<f64> {
    if !(ell > 0.0 && ell < PI) {
        return domain(format!("side length must lie in (0, π), got {ell}"));
    }
    let c = ell.cos();
    Ok(c / (1.0 - c))
}

/// Inverse of [`side_length_to_r`]: `ℓ = arccos(r/(1+r))`.
pub fn r_to_side_length(r: f64) -> Result<f64> {
    if !(r.is_finite() && r > -0.5) {
        return domain(format!("r must exceed -1/2, got {r}"));
    }
    Ok((r / (1.0 + r)).clamp(-1.0, 1.0).acos())
}
