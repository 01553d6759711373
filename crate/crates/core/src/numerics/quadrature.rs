//! Globally adaptive Gauss–Kronrod quadrature.
//!
//! Each panel is integrated with the 15-point Kronrod rule and its embedded
//! 7-point Gauss rule; `|K15 − G7|` is the panel error. The panel with the
//! largest error is bisected until the summed error meets the target. Panel
//! sums are accumulated in left-to-right order with compensated summation so
//! results do not depend on the refinement history.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for XGK[1], XGK[3], XGK[5] and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Accuracy controls shared by every integral in the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// Fraction of `abs_tol` that the analytic tail bound of a half-line
    /// integral may consume.
    pub tail_cut: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_subdivisions: 2000,
            tail_cut: 0.5,
        }
    }
}

impl QuadratureConfig {
    pub fn with_tolerance(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }

    /// Same configuration with both tolerances scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            abs_tol: self.abs_tol * factor,
            rel_tol: self.rel_tol * factor,
            ..*self
        }
    }

    /// Same configuration with only the absolute tolerance scaled, for
    /// integrals that are multiplied by a known constant afterwards.
    pub fn abs_scaled(&self, factor: f64) -> Self {
        Self {
            abs_tol: self.abs_tol * factor,
            ..*self
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok_tol = self.abs_tol >= 0.0
            && self.rel_tol >= 0.0
            && (self.abs_tol > 0.0 || self.rel_tol > 0.0)
            && self.abs_tol.is_finite()
            && self.rel_tol.is_finite();
        if !ok_tol {
            return Err(Error::Domain(format!(
                "tolerances must be finite, nonnegative and not both zero (abs={}, rel={})",
                self.abs_tol, self.rel_tol
            )));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::Domain("max_subdivisions must be at least 1".into()));
        }
        if !(self.tail_cut > 0.0 && self.tail_cut < 1.0) {
            return Err(Error::Domain(format!(
                "tail_cut must lie in (0, 1), got {}",
                self.tail_cut
            )));
        }
        Ok(())
    }

    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

/// Value of an integral together with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub err: f64,
}

/// How fast a half-line integrand decays, with the constant of its bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecayClass {
    /// `|f(x)| ≤ constant · e^{-x²/2}` for `x ≥ 1`.
    Gaussian { constant: f64 },
    /// `|f(x)| ≤ constant · x^{-order}` for `x ≥ 1`; needs `order > 1`.
    Polynomial { order: f64, constant: f64 },
}

impl DecayClass {
    pub fn gaussian() -> Self {
        DecayClass::Gaussian { constant: 1.0 }
    }

    pub fn polynomial(order: f64) -> Self {
        DecayClass::Polynomial {
            order,
            constant: 1.0,
        }
    }

    pub fn with_constant(self, constant: f64) -> Self {
        match self {
            DecayClass::Gaussian { .. } => DecayClass::Gaussian { constant },
            DecayClass::Polynomial { order, .. } => DecayClass::Polynomial { order, constant },
        }
    }

    /// Truncation point `T ≥ 1` whose tail bound is at most `budget`, and that bound.
    fn truncation(&self, budget: f64) -> Result<(f64, f64)> {
        match *self {
            DecayClass::Gaussian { constant } => {
                let c = constant.abs().max(f64::MIN_POSITIVE);
                // ∫_T^∞ e^{-x²/2} dx ≤ e^{-T²/2}/T ≤ e^{-T²/2} for T ≥ 1
                let t = (2.0 * (c / budget).ln()).max(1.0).sqrt();
                Ok((t, c * (-0.5 * t * t).exp() / t))
            }
            DecayClass::Polynomial { order, constant } => {
                if !(order > 1.0) {
                    return Err(Error::InvalidDecay(order));
                }
                let c = constant.abs().max(f64::MIN_POSITIVE);
                let t = (c / ((order - 1.0) * budget))
                    .powf(1.0 / (order - 1.0))
                    .max(1.0);
                Ok((t, c * t.powf(1.0 - order) / (order - 1.0)))
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        // largest error first; ties broken by position for determinism
        self.err
            .total_cmp(&other.err)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let pair = f(centre - dx) + f(centre + dx);
        kronrod += w * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let value = kronrod * half;
    let err = ((kronrod - gauss) * half).abs();
    Panel {
        a,
        b,
        value,
        err: if err.is_nan() { f64::INFINITY } else { err },
    }
}

fn neumaier_sum<I: Iterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Adaptive refinement over an initial partition given by `breaks`.
///
/// `slack` is subtracted from the error target (used for truncated tails).
fn adaptive_on_breaks<F: Fn(f64) -> f64>(
    f: &F,
    breaks: &[f64],
    cfg: &QuadratureConfig,
    slack: f64,
) -> Result<Quadrature> {
    let mut heap: BinaryHeap<Panel> = breaks
        .windows(2)
        .map(|w| gauss_kronrod(f, w[0], w[1]))
        .collect();
    let mut frozen: Vec<Panel> = Vec::new();
    let mut subdivisions = 0usize;

    loop {
        let value = neumaier_sum(heap.iter().chain(frozen.iter()).map(|p| p.value));
        let err: f64 = heap.iter().chain(frozen.iter()).map(|p| p.err).sum();
        let target = (cfg.target(value) - slack).max(0.0);
        if !value.is_finite() {
            return Err(Error::NumericalDegeneracy(
                "integrand produced a non-finite value".into(),
            ));
        }
        if err <= target {
            // report in positional order so the sum is history independent
            let mut all: Vec<Panel> = heap.into_iter().chain(frozen).collect();
            all.sort_by(|p, q| p.a.total_cmp(&q.a));
            let value = neumaier_sum(all.iter().map(|p| p.value));
            return Ok(Quadrature { value, err });
        }
        if subdivisions >= cfg.max_subdivisions {
            return Err(Error::NonConvergence {
                err,
                target,
                subdivisions,
            });
        }
        let Some(worst) = heap.pop() else {
            return Err(Error::NonConvergence {
                err,
                target,
                subdivisions,
            });
        };
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) || (worst.b - worst.a) < 1e-14 * mid.abs() {
            frozen.push(worst);
            continue;
        }
        heap.push(gauss_kronrod(f, worst.a, mid));
        heap.push(gauss_kronrod(f, mid, worst.b));
        subdivisions += 1;
    }
}

/// `∫_a^b f(x) dx` by adaptive bisection.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<Quadrature> {
    cfg.validate()?;
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::Domain(format!(
            "integration limits must be finite with a < b, got [{a}, {b}]"
        )));
    }
    adaptive_on_breaks(&f, &[a, b], cfg, 0.0)
}

/// `∫_a^b f(x) dx` with a caller-chosen initial partition.
pub fn integrate_on_breaks<F: Fn(f64) -> f64>(
    f: F,
    breaks: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Quadrature> {
    cfg.validate()?;
    if breaks.len() < 2 || breaks.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Domain("breakpoints must be strictly increasing".into()));
    }
    adaptive_on_breaks(&f, breaks, cfg, 0.0)
}

/// `∫_0^∞ f(x) dx`, truncated where the declared decay bound makes the tail
/// negligible. The tail bound is included in the reported error.
pub fn integrate_halfline<F: Fn(f64) -> f64>(
    f: F,
    decay: DecayClass,
    cfg: &QuadratureConfig,
) -> Result<Quadrature> {
    cfg.validate()?;
    let budget = cfg.tail_cut * cfg.abs_tol.max(f64::MIN_POSITIVE);
    let (cut, tail) = decay.truncation(budget)?;
    // [0,1], [1,2], [2,4], ... so mass near the origin is never skipped
    let mut breaks = vec![0.0, 1.0];
    let mut edge = 1.0f64;
    while edge * 2.0 < cut {
        edge *= 2.0;
        breaks.push(edge);
    }
    if cut > edge {
        breaks.push(cut);
    }
    let q = adaptive_on_breaks(&f, &breaks, cfg, tail)?;
    Ok(Quadrature {
        value: q.value,
        err: q.err + tail,
    })
}

/// Runs `run` on an infallible view of `f`. The first error raised by `f`
/// aborts the result (the quadrature sees NaN from then on).
pub(crate) fn with_fallible<F, G>(f: F, run: G) -> Result<Quadrature>
where
    F: Fn(f64) -> Result<f64>,
    G: FnOnce(&dyn Fn(f64) -> f64) -> Result<Quadrature>,
{
    let first: RefCell<Option<Error>> = RefCell::new(None);
    let g = |x: f64| match f(x) {
        Ok(v) => v,
        Err(e) => {
            first.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let out = run(&g);
    match first.into_inner() {
        Some(e) => Err(e),
        None => out,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::special::{phi_imag_scaled, std_normal_cdf};
    use std::f64::consts::PI;

    #[test]
    fn constant_and_sine() {
        let cfg = QuadratureConfig::default();
        let q = integrate_adaptive(|_| 1.0, 0.0, 1.0, &cfg).unwrap();
        assert!((q.value - 1.0).abs() < 1e-15);
        let q = integrate_adaptive(f64::sin, 0.0, PI, &cfg).unwrap();
        assert!((q.value - 2.0).abs() < 1e-12);
        assert!(q.err <= cfg.target(q.value));
    }

    #[test]
    fn gaussian_density_over_symmetric_interval() {
        let cfg = QuadratureConfig::with_tolerance(1e-13, 0.0);
        let q = integrate_adaptive(
            |x| (-0.5 * x * x).exp() / (2.0 * PI).sqrt(),
            -1.0,
            1.0,
            &cfg,
        )
        .unwrap();
        let want = 2.0 * std_normal_cdf(1.0) - 1.0;
        assert!((q.value - want).abs() < 1e-14);
    }

    #[test]
    fn halfline_gaussian() {
        let cfg = QuadratureConfig::default();
        let q = integrate_halfline(|x| (-0.5 * x * x).exp(), DecayClass::gaussian(), &cfg).unwrap();
        assert!((q.value - (PI / 2.0).sqrt()).abs() < 1e-10);
        assert!(q.err <= cfg.abs_tol.max(cfg.rel_tol * q.value));
    }

    #[test]
    fn halfline_exponential_via_substitution() {
        // ∫ x e^{-x} dx with x = t²/2
        let cfg = QuadratureConfig::default();
        let q = integrate_halfline(
            |t| 0.5 * t * t * t * (-0.5 * t * t).exp(),
            DecayClass::gaussian().with_constant(1e3),
            &cfg,
        )
        .unwrap();
        assert!((q.value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn halfline_polynomial_h_squared() {
        // |h(y)|² ~ 1/(2π y²): reference run at 10x tighter tolerance
        let f = |y: f64| phi_imag_scaled(y).norm_sqr();
        let decay = DecayClass::polynomial(2.0).with_constant(0.3);
        let cfg = QuadratureConfig::with_tolerance(1e-9, 1e-9);
        let coarse = integrate_halfline(f, decay, &cfg).unwrap();
        let fine = integrate_halfline(f, decay, &cfg.scaled(0.1)).unwrap();
        assert!(coarse.value.is_finite());
        assert!((coarse.value - fine.value).abs() <= coarse.err);
    }

    #[test]
    fn invalid_decay_rejected() {
        let cfg = QuadratureConfig::default();
        let e = integrate_halfline(|x| x, DecayClass::polynomial(1.0), &cfg).unwrap_err();
        assert_eq!(e, Error::InvalidDecay(1.0));
    }

    #[test]
    fn budget_exhaustion_reports_nonconvergence() {
        let cfg = QuadratureConfig {
            max_subdivisions: 3,
            ..QuadratureConfig::with_tolerance(1e-14, 0.0)
        };
        let e = integrate_adaptive(|x: f64| x.sqrt().recip(), 1e-12, 1.0, &cfg).unwrap_err();
        assert!(matches!(e, Error::NonConvergence { .. }));
    }

    #[test]
    fn bad_limits_and_config() {
        let cfg = QuadratureConfig::default();
        assert!(integrate_adaptive(|x| x, 1.0, 0.0, &cfg).is_err());
        let bad = QuadratureConfig::with_tolerance(0.0, 0.0);
        assert!(integrate_adaptive(|x| x, 0.0, 1.0, &bad).is_err());
    }

    #[test]
    fn error_estimate_bounds_tighter_rerun() {
        let f = |x: f64| (3.0 * x).cos() * (-x).exp() + x.sqrt();
        let cfg = QuadratureConfig::with_tolerance(1e-8, 1e-8);
        let loose = integrate_adaptive(f, 0.0, 4.0, &cfg).unwrap();
        let tight = integrate_adaptive(f, 0.0, 4.0, &cfg.scaled(1e-3)).unwrap();
        assert!((loose.value - tight.value).abs() <= loose.err);
    }
}
