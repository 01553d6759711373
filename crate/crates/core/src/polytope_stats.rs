//! Face numbers and volume of the Gaussian polytope `conv(X_1, …, X_n) ⊂ ℝ^d`.

use std::f64::consts::PI;

use crate::absorption::p_unchecked;
use crate::error::{domain, Error, Result};
use crate::numerics::special::log_std_normal_cdf;
use crate::numerics::{binomial, integrate_halfline, ln_gamma, DecayClass, QuadratureConfig};
use crate::orthant::g_nr;

/// Relative agreement demanded between the two face-count formulas.
pub const FACE_AGREEMENT: f64 = 1e-8;
/// Relative agreement demanded between the two volume formulas.
pub const VOLUME_AGREEMENT: f64 = 1e-9;

/// `k`-faces of the polytope of `n` points in `ℝ^d`, weighted by `Vol_k^b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceQuery {
    pub n: u32,
    pub d: u32,
    pub k: u32,
    pub b: f64,
}

impl FaceQuery {
    pub fn new(n: u32, d: u32, k: u32) -> Result<Self> {
        Self::with_exponent(n, d, k, 0.0)
    }

    pub fn with_exponent(n: u32, d: u32, k: u32, b: f64) -> Result<Self> {
        check_nd(n, d)?;
        if k >= d {
            return domain(format!("face dimension k must lie in 0..d, got k={k}, d={d}"));
        }
        if !(b.is_finite() && b >= 0.0) {
            return domain(format!("exponent b must be finite and nonnegative, got {b}"));
        }
        Ok(Self { n, d, k, b })
    }
}

fn check_nd(n: u32, d: u32) -> Result<()> {
    if d < 1 || n < d + 1 {
        return domain(format!("need d >= 1 and n >= d+1, got n={n}, d={d}"));
    }
    Ok(())
}

/// The two evaluations of `E f_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceCount {
    /// Sum over internal/external angles of regular simplices.
    pub angle_sum: f64,
    /// `C(n, k+1)·p_{n-k-1, d-k}(1/(k+1))`.
    pub absorption_form: f64,
}

impl FaceCount {
    pub fn relative_gap(&self) -> f64 {
        (self.angle_sum - self.absorption_form).abs() / self.angle_sum.abs().max(f64::MIN_POSITIVE)
    }

    pub fn agree(&self) -> bool {
        self.relative_gap() <= FACE_AGREEMENT
    }
}

/// `E f_k = 2·n!/(k+1)! Σ_{j = d-2i > k} g_{j-1-k}(-1/j)·g_{n-j}(1/j) / ((j-1-k)!(n-j)!)`.
pub fn expected_faces_angle_sum(q: &FaceQuery, cfg: &QuadratureConfig) -> Result<f64> {
    let q = FaceQuery::with_exponent(q.n, q.d, q.k, q.b)?;
    let (n, k) = (q.n, q.k);
    let mut s = 0.0;
    let mut j = q.d;
    while j > k {
        let jf = j as f64;
        // n!/((k+1)!(j-1-k)!(n-j)!) = C(n, k+1)·C(n-k-1, j-k-1)
        let weight = binomial(n, k + 1) * binomial(n - k - 1, j - k - 1);
        let c = cfg.abs_scaled(1.0 / weight);
        s += weight * g_nr(j - 1 - k, -1.0 / jf, &c)? * g_nr(n - j, 1.0 / jf, &c)?;
        if j < 2 {
            break;
        }
        j -= 2;
    }
    Ok(2.0 * s)
}

/// `E f_k = C(n, k+1)·p_{n-k-1, d-k}(1/(k+1))`.
pub fn expected_faces_absorption_form(q: &FaceQuery, cfg: &QuadratureConfig) -> Result<f64> {
    let q = FaceQuery::with_exponent(q.n, q.d, q.k, q.b)?;
    let sigma2 = 1.0 / (q.k as f64 + 1.0);
    let weight = binomial(q.n, q.k + 1);
    let c = cfg.abs_scaled(1.0 / weight);
    Ok(weight * p_unchecked(q.n - q.k - 1, q.d - q.k, sigma2, &c)?)
}

pub fn expected_faces_both(q: &FaceQuery, cfg: &QuadratureConfig) -> Result<FaceCount> {
    Ok(FaceCount {
        angle_sum: expected_faces_angle_sum(q, cfg)?,
        absorption_form: expected_faces_absorption_form(q, cfg)?,
    })
}

/// Expected number of `k`-faces; both formulas are evaluated and must agree.
pub fn expected_faces(q: &FaceQuery, cfg: &QuadratureConfig) -> Result<f64> {
    let both = expected_faces_both(q, cfg)?;
    if !both.agree() {
        return Err(Error::NumericalDegeneracy(format!(
            "face-count formulas disagree: {} vs {} (relative gap {:e})",
            both.angle_sum,
            both.absorption_form,
            both.relative_gap()
        )));
    }
    Ok(both.angle_sum)
}

/// `ln` of the factor turning `E f_k` into `E Σ_F Vol_k(F)^b`:
/// `(√(k+1)/k!)^b · 2^{kb/2} · Π_{j=1}^k Γ((d+b+1-j)/2)/Γ((d+1-j)/2)`.
pub fn ln_face_functional_factor(d: u32, k: u32, b: f64) -> f64 {
    let kf = k as f64;
    let mut log = b * (0.5 * (kf + 1.0).ln() - ln_gamma(kf + 1.0)) + 0.5 * kf * b * 2f64.ln();
    for j in 1..=k {
        let base = (d + 1 - j) as f64;
        log += ln_gamma(0.5 * (base + b)) - ln_gamma(0.5 * base);
    }
    log
}

/// `E Σ_{F ∈ F_k} Vol_k(F)^b`.
pub fn expected_face_functional(q: &FaceQuery, cfg: &QuadratureConfig) -> Result<f64> {
    let fk = expected_faces(q, cfg)?;
    if q.b == 0.0 {
        return Ok(fk);
    }
    Ok(fk * ln_face_functional_factor(q.d, q.k, q.b).exp())
}

/// The two evaluations of `E Vol_d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumePair {
    /// `π^{d/2}/Γ(d/2+1)·n!/(d!(n-d-1)!)·∫ Φ^{n-d-1}(t) φ^{d+1}(t) dt`.
    pub integral_form: f64,
    /// `C(n,d+1)·√(d+1)/(2^{d/2}Γ(d/2+1))·g_{n-d-1}(1/(d+1))`.
    pub orthant_form: f64,
}

impl VolumePair {
    pub fn relative_gap(&self) -> f64 {
        (self.integral_form - self.orthant_form).abs() / self.orthant_form.abs()
    }
}

fn ln_ball_volume(d: u32) -> f64 {
    let h = 0.5 * d as f64;
    h * PI.ln() - ln_gamma(h + 1.0)
}

pub fn expected_volume_integral_form(n: u32, d: u32, cfg: &QuadratureConfig) -> Result<f64> {
    check_nd(n, d)?;
    let m = (n - d - 1) as f64;
    let e = (d + 1) as f64;
    // φ^{d+1}(t) = (2π)^{-(d+1)/2} e^{-(d+1)t²/2}; the bracket below is at most 1
    let f = |t: f64| {
        let lo = if m == 0.0 { 1.0 } else { (m * log_std_normal_cdf(-t)).exp() };
        let hi = if m == 0.0 { 1.0 } else { (m * log_std_normal_cdf(t)).exp() };
        (lo + hi) * (-0.5 * e * t * t).exp()
    };
    let lead = ln_ball_volume(d) + e.ln() + binomial(n, d + 1).ln() - 0.5 * e * (2.0 * PI).ln();
    let lead = lead.exp();
    let integral = integrate_halfline(f, DecayClass::gaussian(), &cfg.abs_scaled(1.0 / lead))?;
    Ok(lead * integral.value)
}

pub fn expected_volume_orthant_form(n: u32, d: u32, cfg: &QuadratureConfig) -> Result<f64> {
    check_nd(n, d)?;
    let e = (d + 1) as f64;
    let h = 0.5 * d as f64;
    let lead = binomial(n, d + 1) * (0.5 * e.ln() - h * 2f64.ln() - ln_gamma(h + 1.0)).exp();
    Ok(lead * g_nr(n - d - 1, 1.0 / e, &cfg.abs_scaled(1.0 / lead))?)
}

pub fn expected_volume_both(n: u32, d: u32, cfg: &QuadratureConfig) -> Result<VolumePair> {
    Ok(VolumePair {
        integral_form: expected_volume_integral_form(n, d, cfg)?,
        orthant_form: expected_volume_orthant_form(n, d, cfg)?,
    })
}

/// Expected volume; both formulas are evaluated and must agree.
pub fn expected_volume(n: u32, d: u32, cfg: &QuadratureConfig) -> Result<f64> {
    let both = expected_volume_both(n, d, cfg)?;
    if both.relative_gap() > VOLUME_AGREEMENT {
        return Err(Error::NumericalDegeneracy(format!(
            "volume formulas disagree: {} vs {}",
            both.integral_form, both.orthant_form
        )));
    }
    Ok(both.orthant_form)
}

/// `E f_k ~ (2/√d)·C(d,k+1)·g_{d-1-k}(-1/d)·(4π ln n)^{(d-1)/2}`.
pub fn expected_faces_asymptotic(n: u32, d: u32, k: u32, cfg: &QuadratureConfig) -> Result<f64> {
    if n < 3 || d < 1 || k >= d {
        return domain(format!("need n >= 3 and 0 <= k < d, got n={n}, d={d}, k={k}"));
    }
    let df = d as f64;
    let g = g_nr(d - 1 - k, -1.0 / df, cfg)?;
    let growth = (4.0 * PI * (n as f64).ln()).powf(0.5 * (df - 1.0));
    Ok(2.0 / df.sqrt() * binomial(d, k + 1) * g * growth)
}

/// `E Vol_d ~ π^{d/2}/Γ(d/2+1)·(2 ln n)^{d/2}`.
pub fn expected_volume_asymptotic(n: u32, d: u32) -> Result<f64> {
    if n < 3 || d < 1 {
        return domain(format!("need n >= 3 and d >= 1, got n={n}, d={d}"));
    }
    let h = 0.5 * d as f64;
    Ok((ln_ball_volume(d) + h * (2.0 * (n as f64).ln()).ln()).exp())
}

/// Large-`n` form of `p_{n,d}(σ²)`: with `r = σ²/(1+(d-1)σ²)`,
/// `n^{-1/σ²}/(d-1)!·g_{d-1}(-r)·Γ(1/r)·r^{-1/2}·(4π ln n)^{1/(2r)-1/2}`.
pub fn p_asymptotic(n: u32, d: u32, sigma2: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if n < 2 || d < 1 {
        return domain(format!("need n >= 2 and d >= 1, got n={n}, d={d}"));
    }
    if !(sigma2.is_finite() && sigma2 > 0.0) {
        return domain(format!("the asymptotic form needs sigma2 > 0, got {sigma2}"));
    }
    let df = d as f64;
    let r = sigma2 / (1.0 + (df - 1.0) * sigma2);
    let ln_n = (n as f64).ln();
    let log = -ln_n / sigma2 - ln_gamma(df) + ln_gamma(1.0 / r) - 0.5 * r.ln()
        + (0.5 / r - 0.5) * (4.0 * PI * ln_n).ln();
    Ok(g_nr(d - 1, -r, cfg)? * log.exp())
}
