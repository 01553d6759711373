//! The orthant probability `g_n(r) = P[η_1 ≤ 0, …, η_n ≤ 0]` for a centred
//! Gaussian vector with unit variances and all correlations equal to
//! `r/(1+r)`, extended to the whole range `r ≥ -1/n`.
//!
//! For `r ≥ 0` it is the mixture `∫ Φⁿ(√r·x) φ(x) dx`. For negative `r` the
//! same formula with an imaginary argument is rewritten through
//! `h(y) = Φ(iy)·e^{-y²/2}`:
//!
//! ```text
//! g_n(r) = 2/√(2π) ∫₀^∞ Re[h(√(-r)·x)ⁿ] · e^{(n(-r)-1)x²/2} dx
//! ```
//!
//! so no factor grows. At `r = -1/n` the exponential disappears and the
//! integrand decays only like `x^{-n}`.

use std::f64::consts::PI;

use crate::error::{domain, Result};
use crate::numerics::special::{ln_gamma, log_std_normal_cdf};
use crate::numerics::{
    integrate_halfline, phi_imag_scaled, DecayClass, Quadrature, QuadratureConfig,
};

/// `sup_y y·|h(y)| ≈ 0.5295`, rounded up.
pub(crate) const H_DECAY: f64 = 0.55;

// below this value of 1 - n|r| the residual Gaussian is too flat to use
const FLAT_GAUSSIAN: f64 = 0.05;

const FRAC_2_SQRT_2PI: f64 = 0.797_884_560_802_865_4;

/// Relative slack when checking `r ≥ -1/n`, so that `-1.0/n as f64` is accepted.
const EDGE_SLACK: f64 = 1e-12;

/// Arguments of `g_n(r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GnQuery {
    pub n: u32,
    pub r: f64,
}

impl GnQuery {
    pub fn new(n: u32, r: f64) -> Result<Self> {
        if !r.is_finite() {
            return domain(format!("r must be finite, got {r}"));
        }
        if n > 0 {
            let edge = -1.0 / n as f64;
            if r < edge * (1.0 + EDGE_SLACK) {
                return domain(format!("g_{n}(r) needs r >= -1/{n}, got {r}"));
            }
        }
        Ok(Self { n, r })
    }

    /// `r` snapped onto the domain when it lies within rounding of `-1/n`.
    fn clamped_r(&self) -> f64 {
        if self.n == 0 {
            self.r
        } else {
            self.r.max(-1.0 / self.n as f64)
        }
    }
}

/// `g_n(r)`.
pub fn g(q: GnQuery, cfg: &QuadratureConfig) -> Result<f64> {
    g_with_error(q, cfg).map(|x| x.value)
}

/// Convenience wrapper validating `(n, r)` on the fly.
pub fn g_nr(n: u32, r: f64, cfg: &QuadratureConfig) -> Result<f64> {
    g(GnQuery::new(n, r)?, cfg)
}

/// `g_n(r)` with the quadrature error estimate.
pub fn g_with_error(q: GnQuery, cfg: &QuadratureConfig) -> Result<Quadrature> {
    let q = GnQuery::new(q.n, q.r)?;
    match q.n {
        0 => return Ok(exact(1.0)),
        1 => return Ok(exact(0.5)),
        _ => {}
    }
    let r = q.clamped_r();
    if r == 0.0 {
        return Ok(exact((-(q.n as f64) * 2f64.ln()).exp()));
    }
    if r > 0.0 {
        g_positive(q.n, r, cfg)
    } else {
        g_negative(q.n, r, cfg)
    }
}

fn exact(value: f64) -> Quadrature {
    Quadrature { value, err: 0.0 }
}

fn g_positive(n: u32, r: f64, cfg: &QuadratureConfig) -> Result<Quadrature> {
    let s = r.sqrt();
    let nf = n as f64;
    // Φⁿ(a) + Φⁿ(-a) ≤ 1, so the integrand is dominated by φ
    let f = |x: f64| {
        let a = s * x;
        let lo = nf * log_std_normal_cdf(-a);
        let hi = nf * log_std_normal_cdf(a);
        (hi.exp() + lo.exp()) * (-0.5 * x * x).exp()
    };
    let q = integrate_halfline(f, DecayClass::gaussian(), &cfg.abs_scaled((2.0 * PI).sqrt()))?;
    Ok(scale(q, 1.0 / (2.0 * PI).sqrt()))
}

fn g_negative(n: u32, r: f64, cfg: &QuadratureConfig) -> Result<Quadrature> {
    let s = (-r).sqrt();
    let nf = n as f64;
    let flat = (1.0 - nf * (-r)).max(0.0);
    if flat >= FLAT_GAUSSIAN {
        // x = t/√flat leaves a standard Gaussian weight
        let c = s / flat.sqrt();
        let f = |t: f64| phi_imag_scaled(c * t).powu(n).re * (-0.5 * t * t).exp();
        let pre = FRAC_2_SQRT_2PI / flat.sqrt();
        let q = integrate_halfline(f, DecayClass::gaussian(), &cfg.abs_scaled(1.0 / pre))?;
        Ok(scale(q, pre))
    } else {
        // y = s·x; |h(y)|ⁿ ≤ (H_DECAY/y)ⁿ bounds the tail
        let w = flat / (2.0 * s * s);
        let f = |y: f64| phi_imag_scaled(y).powu(n).re * (-w * y * y).exp();
        let pre = FRAC_2_SQRT_2PI / s;
        let decay = DecayClass::Polynomial {
            order: nf,
            constant: H_DECAY.powi(n as i32),
        };
        let q = integrate_halfline(f, decay, &cfg.abs_scaled(1.0 / pre))?;
        Ok(scale(q, pre))
    }
}

fn scale(q: Quadrature, c: f64) -> Quadrature {
    Quadrature {
        value: q.value * c,
        err: q.err * c.abs(),
    }
}

/// `g_n'(r) = n(n-1)/(4π(r+1)√(2r+1)) · g_{n-2}(r/(2r+1))`.
pub fn g_prime(n: u32, r: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if n < 2 {
        return domain(format!("g_prime needs n >= 2, got {n}"));
    }
    if !(r.is_finite() && r > -1.0 / n as f64) {
        return domain(format!("g_prime needs r > -1/{n}, got {r}"));
    }
    let nf = n as f64;
    let lead = nf * (nf - 1.0) / (4.0 * PI * (r + 1.0) * (2.0 * r + 1.0).sqrt());
    let inner = GnQuery::new(n - 2, r / (2.0 * r + 1.0))?;
    Ok(lead * g(inner, cfg)?)
}

/// Large-`n` behaviour of `g_n(r)` at fixed `r > 0`:
/// `Γ(1/r)·r^{-1/2}·n^{-1/r}·(4π ln n)^{1/(2r)-1/2}`.
pub fn g_asymptotic_fixed_r(n: u32, r: f64) -> Result<f64> {
    if n < 2 {
        return domain(format!("asymptotic form needs n >= 2, got {n}"));
    }
    if !(r.is_finite() && r > 0.0) {
        return domain(format!("asymptotic form needs r > 0, got {r}"));
    }
    let nf = n as f64;
    let log = ln_gamma(1.0 / r) - 0.5 * r.ln() - nf.ln() / r
        + (0.5 / r - 0.5) * (4.0 * PI * nf.ln()).ln();
    Ok(log.exp())
}

/// Leading term of `g_n(-1/n + ε)` as `ε ↓ 0`:
/// `nⁿΓ(n/2)/(2π^{n/2}Γ(n)√n) · ε^{(n-1)/2}`.
pub fn g_edge_asymptotic(n: u32, eps: f64) -> Result<f64> {
    if n < 1 {
        return domain("edge asymptotic needs n >= 1");
    }
    if !(eps.is_finite() && eps > 0.0) {
        return domain(format!("edge asymptotic needs eps > 0, got {eps}"));
    }
    let nf = n as f64;
    let log = nf * nf.ln() + ln_gamma(0.5 * nf)
        - 2f64.ln()
        - 0.5 * nf * PI.ln()
        - ln_gamma(nf)
        - 0.5 * nf.ln()
        + 0.5 * (nf - 1.0) * eps.ln();
    Ok(log.exp())
}

/// Residual of the moment identities for `h(y) = Φ(iy)e^{-y²/2}`.
///
/// For `n ≥ m+2` returns `|∫_ℝ y^m hⁿ dy|`, which should vanish. For
/// `n = m+1` the integral exists as a principal value and equals
/// `√(π/2)·(i/√(2π))^m`; the modulus of the difference is returned.
pub fn phi_moment_residual(m: u32, n: u32, cfg: &QuadratureConfig) -> Result<f64> {
    if n < m + 1 {
        return domain(format!(
            "moment integral with m={m}, n={n} diverges (needs n >= m+1)"
        ));
    }
    // h(-y) = conj h(y): the two half-lines combine into Re (m even) or i·Im (m odd)
    let even = m.is_multiple_of(2);
    let mi = m as i32;
    let f = move |y: f64| {
        let z = phi_imag_scaled(y).powu(n);
        2.0 * y.powi(mi) * if even { z.re } else { z.im }
    };
    let decay = if n >= m + 2 {
        DecayClass::Polynomial {
            order: (n - m) as f64,
            constant: 2.0 * H_DECAY.powi(n as i32),
        }
    } else {
        // the 1/y parts cancel; what is left carries a factor e^{-y²/2}
        DecayClass::Gaussian {
            constant: 2.0 * (m as f64 + 2.0),
        }
    };
    let q = integrate_halfline(f, decay, cfg)?;
    let (re, im) = if even { (q.value, 0.0) } else { (0.0, q.value) };
    if n >= m + 2 {
        return Ok(re.hypot(im));
    }
    // √(π/2)·(i/√(2π))^m
    let mag = (0.5 * PI).sqrt() * (2.0 * PI).powf(-0.5 * m as f64);
    let (tr, ti) = match m % 4 {
        0 => (mag, 0.0),
        1 => (0.0, mag),
        2 => (-mag, 0.0),
        _ => (0.0, -mag),
    };
    Ok((re - tr).hypot(im - ti))
}

/// Closed form `g_2(r) = 1/4 + arcsin(r/(1+r))/(2π)`.
pub fn g2_closed(r: f64) -> f64 {
    0.25 + (r / (1.0 + r)).clamp(-1.0, 1.0).asin() / (2.0 * PI)
}

/// Closed form `g_3(r) = 1/8 + 3·arcsin(r/(1+r))/(4π)`.
pub fn g3_closed(r: f64) -> f64 {
    0.125 + 3.0 * (r / (1.0 + r)).clamp(-1.0, 1.0).asin() / (4.0 * PI)
}
