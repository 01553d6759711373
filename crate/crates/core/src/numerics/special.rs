//! Normal distribution function on the real and imaginary axes.
//!
//! `Φ(iy)` grows like `e^{y²/2}`, so it is never formed directly. Everything
//! downstream works with `h(y) = Φ(iy)·e^{-y²/2}`, whose imaginary part is a
//! rescaled Dawson integral:
//!
//! ```text
//! h(y) = e^{-y²/2}/2 + i·F(y/√2)/√π,   F(x) = e^{-x²} ∫₀ˣ e^{t²} dt
//! ```

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;

/// Complex value of `Φ` on the imaginary axis (after rescaling).
pub type ComplexValue = Complex64;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_7;
const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;

/// Standard normal distribution function.
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// Standard normal density.
#[inline]
pub fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x - LN_SQRT_2PI).exp()
}

/// `ln Φ(x)`, accurate deep into the lower tail where `Φ` underflows.
pub fn log_std_normal_cdf(x: f64) -> f64 {
    if x > 0.0 {
        (-std_normal_cdf(-x)).ln_1p()
    } else if x >= -37.0 {
        // erfc keeps full relative accuracy while Φ is still a normal float
        std_normal_cdf(x).ln()
    } else {
        // Φ(x) = φ(x)·R(-x) with the Mills ratio R as a continued fraction
        // R(t) = 1/(t + 1/(t + 2/(t + 3/(t + ...)))).
        let t = -x;
        let mut tail = t;
        for k in (1..=120).rev() {
            tail = t + k as f64 / tail;
        }
        -0.5 * x * x - LN_SQRT_2PI - tail.ln()
    }
}

/// Dawson's integral `F(x) = e^{-x²} ∫₀ˣ e^{t²} dt`.
pub fn dawson(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax <= 6.0 {
        dawson_series(ax)
    } else {
        dawson_asymptotic(ax)
    };
    v.copysign(x)
}

// e^{-x²} Σ x^{2k+1}/(k!(2k+1)); every term is positive.
fn dawson_series(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut k = 0usize;
    loop {
        k += 1;
        term *= x2 / k as f64;
        let contrib = term / (2 * k + 1) as f64;
        sum += contrib;
        if k as f64 > x2 && contrib < 1e-17 * sum {
            break;
        }
    }
    (-x2).exp() * sum
}

// F(x) ~ 1/(2x) Σ (2k-1)!!/(2x²)^k, truncated at the smallest term.
fn dawson_asymptotic(x: f64) -> f64 {
    let y = 0.5 / (x * x);
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        let next = term * (2 * k - 1) as f64 * y;
        if next >= term || next < 1e-17 {
            sum += next;
            break;
        }
        term = next;
        sum += term;
    }
    sum / (2.0 * x)
}

/// `D(x)/x` with the removable singularity at 0 filled in.
pub(crate) fn dawson_over_x(x: f64) -> f64 {
    if x.abs() < 1e-5 {
        1.0 - 2.0 / 3.0 * x * x
    } else {
        dawson(x) / x
    }
}

/// `erf(x)/x` with the removable singularity at 0 filled in.
pub(crate) fn erf_over_x(x: f64) -> f64 {
    if x.abs() < 1e-5 {
        2.0 * FRAC_1_SQRT_PI * (1.0 - x * x / 3.0)
    } else {
        libm::erf(x) / x
    }
}

/// `h(y) = Φ(iy)·e^{-y²/2}`.
pub fn phi_imag_scaled(y: f64) -> ComplexValue {
    Complex64::new(
        0.5 * (-0.5 * y * y).exp(),
        dawson(y * FRAC_1_SQRT_2) * FRAC_1_SQRT_PI,
    )
}

/// Natural log of the gamma function for positive arguments.
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma_r(x).0
}

/// Binomial coefficient as a float; exact for the small arguments used here.
pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for j in 0..k {
        acc = acc * (n - j) as f64 / (j + 1) as f64;
    }
    // below 2^53 the true value is an integer; snap away division residue
    if acc < 9.0e15 {
        acc.round()
    } else {
        acc
    }
}

/// Surface area of the unit sphere `S^{n-1}`: `2π^{n/2}/Γ(n/2)`.
pub fn sphere_surface_area(n: u32) -> f64 {
    let half = 0.5 * n as f64;
    (2f64.ln() + half * PI.ln() - ln_gamma(half)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn cdf_reference_values() {
        assert_eq!(std_normal_cdf(0.0), 0.5);
        // 40-digit mpmath oracle
        assert!(rel(std_normal_cdf(1.0), 0.841_344_746_068_542_948_59) < 1e-15);
        assert!(rel(std_normal_cdf(-5.0), 2.866_515_718_791_939_116_7e-7) < 1e-14);
        assert!(rel(std_normal_cdf(-10.0), 7.619_853_024_160_526_066e-24) < 1e-13);
        assert!(rel(std_normal_cdf(-20.0), 2.753_624_118_606_233_695_1e-89) < 1e-12);
    }

    #[test]
    fn cdf_deep_tail_does_not_flush_early() {
        let v = std_normal_cdf(-38.0);
        assert!(v > 0.0 && v < 1e-300, "{v}");
        // Φ(-40) ≈ 3.7e-351 lies below the smallest subnormal
        let w = std_normal_cdf(-40.0);
        assert!((0.0..1e-300).contains(&w));
    }

    #[test]
    fn cdf_symmetry() {
        for i in -400..=400 {
            let x = i as f64 * 0.025;
            let s = std_normal_cdf(x) + std_normal_cdf(-x);
            assert!((s - 1.0).abs() < 1e-15, "x={x} s={s}");
        }
    }

    #[test]
    fn log_cdf_values() {
        assert!((log_std_normal_cdf(0.0) - 0.5f64.ln()).abs() < 1e-16);
        let cases = [
            (-10.0, -53.231_285_150_512_470_578_347_03),
            (-20.0, -203.917_155_371_097_263_936_804_5),
            (-40.0, -804.608_442_013_753_788_166_606_8),
            (-50.0, -1_254.831_361_139_419_901_254_133),
            (-200.0, -20_006.217_280_898_190_402_093_1),
            (5.0, -2.866_516_129_637_635_933_845_963e-7),
        ];
        for (x, want) in cases {
            assert!(rel(log_std_normal_cdf(x), want) < 1e-12, "x={x}");
        }
        let big = log_std_normal_cdf(50.0);
        assert!(big <= 0.0 && big > -1e-300);
    }

    #[test]
    fn log_cdf_matches_asymptotic_expansion() {
        // ln Φ(x) ≈ -x²/2 - ln(-x√(2π)) + ln(1 - 1/x² + 3/x⁴ - 15/x⁶ + 105/x⁸)
        for x in [-10.0f64, -15.0, -25.0, -60.0] {
            let x2 = x * x;
            let series = 1.0 - 1.0 / x2 + 3.0 / x2.powi(2) - 15.0 / x2.powi(3) + 105.0 / x2.powi(4)
                - 945.0 / x2.powi(5)
                + 10395.0 / x2.powi(6);
            let want = -0.5 * x2 - (-x).ln() - LN_SQRT_2PI + series.ln();
            let tol = if x > -12.0 { 1e-10 } else { 1e-12 };
            assert!(rel(log_std_normal_cdf(x), want) < tol, "x={x}");
        }
    }

    #[test]
    fn exp_log_cdf_consistent() {
        for i in 0..=300 {
            let x = -30.0 + i as f64 * 0.13;
            let a = log_std_normal_cdf(x).exp();
            let b = std_normal_cdf(x);
            assert!(rel(a, b) < 1e-13, "x={x} {a} {b}");
        }
    }

    #[test]
    fn dawson_reference_values() {
        assert_eq!(dawson(0.0), 0.0);
        let cases = [
            (0.1, 0.099_335_992_397_852_866_591),
            (0.5, 0.424_436_383_502_022_295_93),
            (1.0, 0.538_079_506_912_768_419_14),
            (2.0, 0.301_340_388_923_791_966_03),
            (3.5, 0.149_621_593_080_756_484_75),
            (5.0, 0.102_134_074_424_276_835_44),
            (6.0, 0.084_542_688_974_543_852_239),
            (6.5, 0.077_867_818_986_069_871_389),
            (7.0, 0.072_180_974_658_236_292_028),
            (10.0, 0.050_253_847_187_598_528_033),
            (30.0, 0.016_675_941_401_059_175_798),
            (1000.0, 0.000_500_000_250_000_375_000_94),
        ];
        for (x, want) in cases {
            assert!(rel(dawson(x), want) < 1e-13, "x={x} got {}", dawson(x));
            assert_eq!(dawson(-x), -dawson(x));
        }
    }

    #[test]
    fn dawson_maximum_location() {
        let peak = 0.924_138_873_0;
        let f0 = dawson(peak);
        assert!(dawson(peak - 1e-3) < f0 && dawson(peak + 1e-3) < f0);
        assert!(rel(f0, 0.541_044_224_635_181_698_47) < 1e-12);
    }

    #[test]
    fn h_values_and_conjugate_identity() {
        let h0 = phi_imag_scaled(0.0);
        assert_eq!((h0.re, h0.im), (0.5, 0.0));
        let h2 = phi_imag_scaled(2.0);
        assert!((h2.re - 0.5 * (-2.0f64).exp()).abs() < 1e-17);
        for i in -200..=200 {
            let y = i as f64 * 0.37;
            let h = phi_imag_scaled(y);
            let s = h + h.conj();
            assert!((s.re - (-0.5 * y * y).exp()).abs() < 1e-16 && s.im == 0.0);
            assert!(h.norm() <= 1.0);
        }
        // |h(y)|·y → 1/√(2π)
        let y = 1e4;
        assert!(rel(phi_imag_scaled(y).norm() * y, 1.0 / (2.0 * PI).sqrt()) < 1e-7);
    }

    #[test]
    fn h_imag_matches_direct_quadrature() {
        // Im h(2) = e^{-2}/√(2π) ∫₀² e^{t²/2} dt, by composite Simpson on a fine grid
        let n = 20_000;
        let step = 2.0 / n as f64;
        let mut s = 0.0;
        for i in 0..=n {
            let t = i as f64 * step;
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            s += w * (0.5 * t * t).exp();
        }
        let direct = s * step / 3.0 * (-2.0f64).exp() / (2.0 * PI).sqrt();
        assert!(rel(phi_imag_scaled(2.0).im, direct) < 1e-12);
    }

    #[test]
    fn binomials_and_sphere_area() {
        assert_eq!(binomial(4, 2), 6.0);
        assert_eq!(binomial(12, 6), 924.0);
        assert_eq!(binomial(3, 5), 0.0);
        assert!(rel(sphere_surface_area(2), 2.0 * PI) < 1e-15);
        assert!(rel(sphere_surface_area(3), 4.0 * PI) < 1e-15);
    }
}
