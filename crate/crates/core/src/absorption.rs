//! Probability that a point misses the convex hull of `n` standard Gaussian
//! points in `ℝ^d`.
//!
//! Two flavours: `p_{n,d}(σ²)` for an independent random point `σX`, and
//! `f_{n,d}(|x|)` for a fixed point `x`. The first is a finite alternating
//! sum of conic intrinsic volumes; the second is obtained from it by an
//! explicit Laplace inversion whose kernel `F_{k,n-k}` is written as
//!
//! ```text
//! F(v) = (1/2π) ∫₀^{π/2} G1(ρ sin θ)·G2(ρ cos θ) dθ,   ρ = √(2v),
//! G1(t) = Φ^{n-k}(t) + Φ^{n-k}(-t),   G2(t) = 2·Re Φ^k(it).
//! ```
//!
//! `G2` grows like `e^{kt²/2}`, so everything is carried with the factor
//! `e^{-kv}` already applied, through `h(y) = Φ(iy)e^{-y²/2}`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::cones::intrinsic_volume;
use crate::error::{domain, Result};
use crate::numerics::special::{dawson_over_x, erf_over_x, std_normal_cdf, std_normal_pdf};
use crate::numerics::{
    binomial, integrate_adaptive, integrate_halfline, ln_gamma, phi_imag_scaled, DecayClass,
    QuadratureConfig,
};
use crate::numerics::quadrature::with_fallible;

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;

/// Where the test point sits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AbsorptionParam {
    /// Random point `σX` with `X` standard Gaussian.
    Sigma2(f64),
    /// Fixed point at distance `√(2u)` from the origin.
    U(f64),
}

/// `(n, d)` with the position of the test point; `n ≥ d+1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbsorptionQuery {
    pub n: u32,
    pub d: u32,
    pub param: AbsorptionParam,
}

impl AbsorptionQuery {
    pub fn scaled(n: u32, d: u32, sigma2: f64) -> Result<Self> {
        Self::new(n, d, AbsorptionParam::Sigma2(sigma2))
    }

    pub fn fixed_point(n: u32, d: u32, u: f64) -> Result<Self> {
        Self::new(n, d, AbsorptionParam::U(u))
    }

    /// Fixed point given by its radius `|x|`.
    pub fn at_radius(n: u32, d: u32, radius: f64) -> Result<Self> {
        Self::fixed_point(n, d, 0.5 * radius * radius)
    }

    pub fn new(n: u32, d: u32, param: AbsorptionParam) -> Result<Self> {
        if d < 1 {
            return domain("dimension d must be at least 1");
        }
        if n < d + 1 {
            return domain(format!("need n >= d+1 points, got n={n}, d={d}"));
        }
        let x = match param {
            AbsorptionParam::Sigma2(x) | AbsorptionParam::U(x) => x,
        };
        if !(x.is_finite() && x >= 0.0) {
            return domain(format!("sigma2 and u must be finite and nonnegative, got {x}"));
        }
        Ok(Self { n, d, param })
    }
}

/// `2^{1-n} Σ_{j<d} C(n-1, j)`; equals 1 when `n ≤ d`.
pub fn wendel(n: u32, d: u32) -> f64 {
    if n == 0 || n <= d {
        return 1.0;
    }
    let s: f64 = (0..d).map(|j| binomial(n - 1, j)).sum();
    s * 0.5f64.powi(n as i32 - 1)
}

/// `P[σX ∉ conv(X_1, …, X_n)] = 2(b_{n,d-1}(σ²) + b_{n,d-3}(σ²) + …)`.
pub fn p(q: &AbsorptionQuery, cfg: &QuadratureConfig) -> Result<f64> {
    let q = AbsorptionQuery::new(q.n, q.d, q.param)?;
    match q.param {
        AbsorptionParam::Sigma2(s2) => p_unchecked(q.n, q.d, s2, cfg),
        AbsorptionParam::U(_) => domain("p needs a query built with sigma2"),
    }
}

/// Convenience form of [`p`].
pub fn p_nd(n: u32, d: u32, sigma2: f64, cfg: &QuadratureConfig) -> Result<f64> {
    p(&AbsorptionQuery::scaled(n, d, sigma2)?, cfg)
}

/// The same sum without `n ≥ d+1`; for `n ≤ d` it equals 1.
pub(crate) fn p_unchecked(n: u32, d: u32, sigma2: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let mut s = 0.0;
    let mut k = d as i64 - 1;
    while k >= 0 {
        s += intrinsic_volume(n, k, sigma2, cfg)?;
        k -= 2;
    }
    Ok(2.0 * s)
}

/// The pair of kernels behind `F_{k,n-k}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConvolutionKernelPair {
    pub k: u32,
    pub m: u32,
}

impl ConvolutionKernelPair {
    pub fn new(n: u32, k: u32) -> Result<Self> {
        if k > n {
            return domain(format!("kernel index k={k} exceeds n={n}"));
        }
        Ok(Self { k, m: n - k })
    }

    pub fn n(&self) -> u32 {
        self.k + self.m
    }

    // Φ(t) - 1/2, and (Φ(t) - 1/2)/t without cancellation at 0
    fn centred(t: f64) -> (f64, f64) {
        let z = t * FRAC_1_SQRT_2;
        let e_over_t = 0.5 * FRAC_1_SQRT_2 * erf_over_x(z);
        (e_over_t * t, e_over_t)
    }

    /// `G1(t) = Φ^m(t) + Φ^m(-t)`.
    fn g1(&self, t: f64) -> f64 {
        let m = self.m as i32;
        std_normal_cdf(t).powi(m) + std_normal_cdf(-t).powi(m)
    }

    /// `G1'(t)/t = m·φ(t)·(Φ^{m-1}(t) - Φ^{m-1}(-t))/t`, expanded in odd
    /// powers of `e = Φ(t) - 1/2` so that nothing cancels near 0.
    fn q1(&self, t: f64) -> f64 {
        if self.m < 2 {
            return 0.0;
        }
        let j = self.m - 1;
        let (e, e_over_t) = Self::centred(t);
        let mut s = 0.0;
        for l in (1..=j).step_by(2) {
            s += binomial(j, l) * 0.5f64.powi((j - l) as i32) * e.powi(l as i32 - 1);
        }
        self.m as f64 * std_normal_pdf(t) * 2.0 * e_over_t * s
    }

    /// `G2(t)·e^{-kt²/2} = 2·Re h(t)^k`.
    fn g2_scaled(&self, t: f64) -> f64 {
        2.0 * phi_imag_scaled(t).powu(self.k).re
    }

    /// `G2'(t)/t · e^{-kt²/2} = -(2k/√(2π))·Im[h(t)^{k-1}]/t`, with the
    /// division by `t` carried out analytically on `Im h = D(t/√2)/√π`.
    fn q2_scaled(&self, t: f64) -> f64 {
        if self.k < 2 {
            return 0.0;
        }
        let j = self.k - 1;
        let a = 0.5 * (-0.5 * t * t).exp();
        let z = t * FRAC_1_SQRT_2;
        let b = FRAC_1_SQRT_PI * crate::numerics::dawson(z);
        let b_over_t = FRAC_1_SQRT_PI * FRAC_1_SQRT_2 * dawson_over_x(z);
        // Im (a+ib)^j = Σ_{l odd} C(j,l) a^{j-l} b^l (-1)^{(l-1)/2}
        let mut s = 0.0;
        for l in (1..=j).step_by(2) {
            let sign = if (l / 2) % 2 == 0 { 1.0 } else { -1.0 };
            s += sign * binomial(j, l) * a.powi((j - l) as i32) * b.powi(l as i32 - 1);
        }
        -(2.0 * self.k as f64) * FRAC_1_SQRT_2PI * b_over_t * s
    }
}

/// `e^{-kv}·F_{k,n-k}(v)`; stays bounded for all `v`.
pub fn f_conv_scaled(kernel: &ConvolutionKernelPair, v: f64, cfg: &QuadratureConfig) -> Result<f64> {
    check_v(v)?;
    let rho = (2.0 * v).sqrt();
    let kv = kernel.k as f64 * v;
    let f = |th: f64| {
        let (s, c) = th.sin_cos();
        kernel.g1(rho * s) * kernel.g2_scaled(rho * c) * (-kv * s * s).exp()
    };
    let q = integrate_adaptive(f, 0.0, 0.5 * PI, &cfg.abs_scaled(2.0 * PI))?;
    Ok(q.value / (2.0 * PI))
}

/// `F_{k,n-k}(v)`; overflows to infinity once `kv` exceeds about 700.
#[allow(non_snake_case)]
pub fn F_conv(kernel: &ConvolutionKernelPair, v: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let s = f_conv_scaled(kernel, v, cfg)?;
    Ok(s * (kernel.k as f64 * v).exp())
}

/// `e^{-kv}·F'_{k,n-k}(v)`, by differentiating under the θ-integral.
pub fn f_conv_prime_scaled(
    kernel: &ConvolutionKernelPair,
    v: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    if !(v.is_finite() && v >= 0.0) {
        return domain(format!("v must be finite and nonnegative, got {v}"));
    }
    let rho = (2.0 * v).sqrt();
    let kv = kernel.k as f64 * v;
    // d/dv of G(ρs) is s²·G'(ρs)/(ρs), and e^{-kv} splits as e^{-kvs²}·e^{-kvc²}
    let f = |th: f64| {
        let (s, c) = th.sin_cos();
        let w = (-kv * s * s).exp();
        let a = s * s * kernel.q1(rho * s) * kernel.g2_scaled(rho * c);
        let b = c * c * kernel.g1(rho * s) * kernel.q2_scaled(rho * c);
        (a + b) * w
    };
    let q = integrate_adaptive(f, 0.0, 0.5 * PI, &cfg.abs_scaled(2.0 * PI))?;
    Ok(q.value / (2.0 * PI))
}

/// `F'_{k,n-k}(v)`.
#[allow(non_snake_case)]
pub fn F_conv_prime(kernel: &ConvolutionKernelPair, v: f64, cfg: &QuadratureConfig) -> Result<f64> {
    check_v(v)?;
    let s = f_conv_prime_scaled(kernel, v, cfg)?;
    Ok(s * (kernel.k as f64 * v).exp())
}

fn check_v(v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return domain(format!("v must be finite and positive, got {v}"));
    }
    Ok(())
}

// ∫₀¹ q^{d-1}·e^{-kv}F'(v) dq at v = u(1-q²); the Riemann–Liouville weight
// (u-v)^{d/2-1} dv becomes 2u^{d/2}·q^{d-1} dq
fn a_integral(n: u32, k: u32, d: u32, u: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let kernel = ConvolutionKernelPair::new(n, k)?;
    let inner = cfg.scaled(0.01);
    let f = |q: f64| -> Result<f64> {
        let w = q.powi(d as i32 - 1);
        if w == 0.0 {
            return Ok(0.0);
        }
        Ok(w * f_conv_prime_scaled(&kernel, u * (1.0 - q * q), &inner)?)
    };
    Ok(with_fallible(f, |g| integrate_adaptive(g, 0.0, 1.0, cfg))?.value)
}

/// `a_{n,k}(u) = C(n,k) ∫₀^u e^{-vk} F'_{k,n-k}(v) (u-v)^{d/2-1} dv`.
pub fn a_term(n: u32, k: u32, d: u32, u: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if k > n || d < 1 {
        return domain(format!("a_term needs 0 <= k <= n and d >= 1, got n={n}, k={k}, d={d}"));
    }
    if !(u.is_finite() && u > 0.0) {
        return domain(format!("a_term needs u > 0, got {u}"));
    }
    let i = a_integral(n, k, d, u, cfg)?;
    Ok(binomial(n, k) * 2.0 * u.powf(0.5 * d as f64) * i)
}

/// `f_{n,d}(√(2u)) = P[x ∉ conv(X_1, …, X_n)]` for `|x| = √(2u)`.
pub fn f(q: &AbsorptionQuery, cfg: &QuadratureConfig) -> Result<f64> {
    let q = AbsorptionQuery::new(q.n, q.d, q.param)?;
    let u = match q.param {
        AbsorptionParam::U(u) => u,
        AbsorptionParam::Sigma2(_) => return domain("f needs a query built with u"),
    };
    let base = wendel(q.n, q.d);
    if u == 0.0 {
        return Ok(base);
    }
    // 2u^{1-d/2}·a_{n,k} = 4u·C(n,k)·∫ q^{d-1} e^{-kv}F' dq
    let mut s = 0.0;
    let mut k = q.d as i64 - 1;
    while k >= 0 {
        let kk = k as u32;
        s += binomial(q.n, kk) * a_integral(q.n, kk, q.d, u, cfg)?;
        k -= 2;
    }
    Ok(base + 4.0 * u * s)
}

/// Convenience form of [`f`].
pub fn f_nd(n: u32, d: u32, u: f64, cfg: &QuadratureConfig) -> Result<f64> {
    f(&AbsorptionQuery::fixed_point(n, d, u)?, cfg)
}

/// Planar case in closed form:
/// `f_{n,2}(√(2u)) = P[M_n² + ξ² ≤ 2u] + n·e^{-u}·P[M_{n-1} ≤ √(2u)·W]`,
/// with `M_n` the maximum of `n` standard normals, `ξ` standard normal and
/// `W` arcsine distributed on `[-1, 1]`.
pub fn f_d2_closed(n: u32, u: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if n < 3 {
        return domain(format!("planar closed form needs n >= 3, got {n}"));
    }
    if !(u.is_finite() && u >= 0.0) {
        return domain(format!("u must be finite and nonnegative, got {u}"));
    }
    let nn = n as i32;
    let big_r = (2.0 * u).sqrt();
    let half = 0.5 * PI;
    let second_integrand =
        |th: f64| std_normal_cdf(big_r * th.sin()).powi(nn - 1) / PI;
    let second = integrate_adaptive(second_integrand, -half, half, cfg)?.value;
    let second = n as f64 * (-u).exp() * second;
    if u == 0.0 {
        return Ok(second);
    }
    // t = R sin θ, √(2u - t²) = R cos θ
    let first_integrand = |th: f64| {
        let (s, c) = th.sin_cos();
        let y = big_r * c;
        std_normal_pdf(big_r * s) * (std_normal_cdf(y).powi(nn) - std_normal_cdf(-y).powi(nn)) * y
    };
    let first = integrate_adaptive(first_integrand, -half, half, cfg)?.value;
    Ok(first + second)
}

/// `∫_ℝ Φ^j(x/c) e^{-x²/2} dx` by direct quadrature.
fn phi_power_moment(j: u32, c: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let jj = j as i32;
    let f = |x: f64| {
        (std_normal_cdf(x / c).powi(jj) + std_normal_cdf(-x / c).powi(jj)) * (-0.5 * x * x).exp()
    };
    Ok(integrate_halfline(f, DecayClass::gaussian(), &cfg.scaled(0.1))?.value)
}

/// `C_{n,d} = P[X ∈ conv(X_1, …, X_n)]` for `d ∈ {2, 3, 4}`.
pub fn probability_content(n: u32, d: u32, cfg: &QuadratureConfig) -> Result<f64> {
    if !(2..=4).contains(&d) {
        return domain(format!("probability content is available for d in 2..=4, got {d}"));
    }
    if n < d + 1 {
        return domain(format!("need n >= d+1 points, got n={n}, d={d}"));
    }
    let nf = n as f64;
    let c2 = || -> Result<f64> {
        Ok(1.0 - nf * FRAC_1_SQRT_2PI * phi_power_moment(n - 1, 2f64.sqrt(), cfg)?)
    };
    match d {
        2 => c2(),
        3 => {
            let i = phi_power_moment(n - 2, 3f64.sqrt(), cfg)?;
            Ok(1.0 - nf * (nf - 1.0) / 6.0 * FRAC_1_SQRT_2PI * i - 2.0 / (nf + 1.0))
        }
        _ => {
            let i = phi_power_moment(n - 3, 2.0, cfg)?;
            let angle = 0.125 - 3.0 / (4.0 * PI) * (1.0f64 / 3.0).asin();
            Ok(c2()? - nf * (nf - 1.0) * (nf - 2.0) / 3.0 * FRAC_1_SQRT_2PI * angle * i)
        }
    }
}

/// Right-hand side of the Laplace identity
/// `∫₀^∞ f(√(2u)) u^{d/2-1} e^{-λu} du = 2Γ(d/2) λ^{-d/2} Σ b_{n,d-1-2i}(1/λ)`.
pub fn laplace_transform_rhs(n: u32, d: u32, lambda: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return domain(format!("lambda must be positive, got {lambda}"));
    }
    let half_p = 0.5 * p_nd(n, d, 1.0 / lambda, cfg)?;
    let hd = 0.5 * d as f64;
    Ok(2.0 * (ln_gamma(hd) - hd * lambda.ln()).exp() * half_p)
}

/// Left-hand side of the Laplace identity, integrating [`f`] numerically.
pub fn laplace_transform_of_f(n: u32, d: u32, lambda: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return domain(format!("lambda must be positive, got {lambda}"));
    }
    AbsorptionQuery::fixed_point(n, d, 0.0)?;
    // u = t²/(2λ) turns e^{-λu} into e^{-t²/2}
    let hd = 0.5 * d as f64;
    let integrand = |t: f64| -> Result<f64> {
        if t == 0.0 {
            return Ok(0.0);
        }
        let u = t * t / (2.0 * lambda);
        let fv = f_nd(n, d, u, cfg)?;
        Ok(fv * u.powf(hd - 1.0) * (-0.5 * t * t).exp() * t / lambda)
    };
    // f ≤ 1, so the integrand is below u^{d/2-1}·(t/λ)·e^{-t²/2}
    let decay = DecayClass::Gaussian {
        constant: 100.0 * (1.0 + 1.0 / lambda).powi(d as i32),
    };
    Ok(with_fallible(integrand, |g| integrate_halfline(g, decay, cfg))?.value)
}
