//! The cones `C_n(r)` spanned by `n` vectors whose Gram matrix has `1+r` on
//! the diagonal and `r` elsewhere.
//!
//! `r = 0` is the orthant, `r → -1/n` degenerates to a half-space and
//! `r → ∞` to a ray. The polar of `C_n(r)` inside its linear hull is
//! `C_n(-r/(1+nr))`, and solid angles and intrinsic volumes are all values of
//! [`g`](crate::orthant::g).

use nalgebra::DVector;

use crate::error::{domain, Error, Result};
use crate::numerics::{binomial, QuadratureConfig};
use crate::orthant::g_nr;

/// Inner-product tolerance of [`cone_membership`].
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// The cone `C_n(r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquicorrelatedCone {
    pub n: u32,
    pub r: f64,
}

impl EquicorrelatedCone {
    pub fn new(n: u32, r: f64) -> Result<Self> {
        if n == 0 {
            return domain("cone dimension n must be at least 1");
        }
        if !(r.is_finite() && r > -1.0 / n as f64) {
            return domain(format!("C_{n}(r) needs r > -1/{n}, got {r}"));
        }
        Ok(Self { n, r })
    }

    /// The polar cone taken inside the linear hull.
    pub fn polar(&self) -> Self {
        Self {
            n: self.n,
            r: -self.r / (1.0 + self.n as f64 * self.r),
        }
    }
}

/// `r ↦ -r/(1+nr)`, an involution of `(-1/n, ∞)`.
pub fn polar_parameter(n: u32, r: f64) -> Result<f64> {
    Ok(EquicorrelatedCone::new(n, r)?.polar().r)
}

/// Gaussian measure of the cone inside its linear hull: `g_n(-r/(1+nr))`.
pub fn solid_angle(c: &EquicorrelatedCone, cfg: &QuadratureConfig) -> Result<f64> {
    g_nr(c.n, c.polar().r, cfg)
}

/// Conic intrinsic volumes `υ_0, …, υ_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntrinsicVolumes {
    pub values: Vec<f64>,
}

impl IntrinsicVolumes {
    pub fn even_sum(&self) -> f64 {
        self.values.iter().step_by(2).sum()
    }

    pub fn odd_sum(&self) -> f64 {
        self.values.iter().skip(1).step_by(2).sum()
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    /// `υ_k`, zero outside `0..=n`.
    pub fn get(&self, k: i64) -> f64 {
        usize::try_from(k)
            .ok()
            .and_then(|k| self.values.get(k).copied())
            .unwrap_or(0.0)
    }
}

/// `b_{n,k}(r) = C(n,k)·g_k(-r/(1+kr))·g_{n-k}(r/(1+kr))`, zero for `k ∉ 0..=n`.
pub fn intrinsic_volume(n: u32, k: i64, r: f64, cfg: &QuadratureConfig) -> Result<f64> {
    EquicorrelatedCone::new(n, r)?;
    if k < 0 || k > n as i64 {
        return Ok(0.0);
    }
    let k = k as u32;
    let t = 1.0 + k as f64 * r;
    let weight = binomial(n, k);
    let c = cfg.abs_scaled(1.0 / weight);
    Ok(weight * g_nr(k, -r / t, &c)? * g_nr(n - k, r / t, &c)?)
}

pub fn intrinsic_volumes(c: &EquicorrelatedCone, cfg: &QuadratureConfig) -> Result<IntrinsicVolumes> {
    let values = (0..=c.n as i64)
        .map(|k| intrinsic_volume(c.n, k, c.r, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(IntrinsicVolumes { values })
}

/// Which angle of the regular simplex `Δ_n` (with `n` vertices) at a face.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AngleKind {
    Internal,
    External,
}

/// Internal angle `g_{n-k}(-1/n)` or external angle `g_{n-k}(1/k)` of the
/// regular simplex with `n` vertices at a face with `k` vertices.
pub fn simplex_angle(n: u32, k: u32, kind: AngleKind, cfg: &QuadratureConfig) -> Result<f64> {
    if n < 2 || k < 1 || k > n {
        return domain(format!("simplex angle needs n >= 2 and 1 <= k <= n, got n={n}, k={k}"));
    }
    let r = match kind {
        AngleKind::Internal => -1.0 / n as f64,
        AngleKind::External => 1.0 / k as f64,
    };
    g_nr(n - k, r, cfg)
}

/// Explicit generators of `C_n(r)` in `ℝ^{n+1}`, with generators of its
/// polar inside the hyperplane `L` spanned by the cone.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeGenerators {
    pub n: usize,
    pub primal: Vec<DVector<f64>>,
    pub polar: Vec<DVector<f64>>,
    /// Unit normal of `L`.
    pub normal: DVector<f64>,
}

impl ConeGenerators {
    pub fn new(cone: &EquicorrelatedCone) -> Self {
        if cone.r >= 0.0 {
            let (u, v, normal) = extended_family(cone.n as usize, cone.r);
            // ⟨u_j, v_i⟩ = δ_ij, so the polar is spanned by -v_i
            let polar = v.into_iter().map(|x| -x).collect();
            Self {
                n: cone.n as usize,
                primal: u,
                polar,
                normal,
            }
        } else {
            // C_n(r) is the polar of C_n(ρ), ρ = -r/(1+nr) > 0
            let (u, v, normal) = extended_family(cone.n as usize, cone.polar().r);
            let primal = v.into_iter().map(|x| -x).collect();
            Self {
                n: cone.n as usize,
                primal,
                polar: u,
                normal,
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.n + 1
    }

    /// Orthogonal projection onto `L`.
    pub fn project(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_dim(x)?;
        Ok(x - &self.normal * self.normal.dot(x))
    }

    /// Gram matrix entries `⟨w_i, w_j⟩` of a generator family.
    pub fn gram(vectors: &[DVector<f64>]) -> Vec<Vec<f64>> {
        vectors
            .iter()
            .map(|a| vectors.iter().map(|b| a.dot(b)).collect())
            .collect()
    }

    fn check_dim(&self, x: &DVector<f64>) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(())
    }
}

// u_i = e_i + σe_{n+1} and the dual family v_i with ⟨u_j, v_i⟩ = δ_ij, for r = σ² ≥ 0
fn extended_family(n: usize, r: f64) -> (Vec<DVector<f64>>, Vec<DVector<f64>>, DVector<f64>) {
    let sigma = r.sqrt();
    let nf = n as f64;
    let c = r / (1.0 + nf * r);
    let tail = sigma / (1.0 + nf * r);
    let u = (0..n)
        .map(|i| {
            let mut x = DVector::zeros(n + 1);
            x[i] = 1.0;
            x[n] = sigma;
            x
        })
        .collect();
    let v = (0..n)
        .map(|i| {
            let mut x = DVector::from_element(n + 1, -c);
            x[i] += 1.0;
            x[n] = tail;
            x
        })
        .collect();
    let mut normal = DVector::from_element(n + 1, sigma);
    normal[n] = -1.0;
    let normal = normal.normalize();
    (u, v, normal)
}

/// Whether `x` lies in the cone: on `L` and nonpositive against every polar
/// generator, both up to [`MEMBERSHIP_TOL`].
pub fn cone_membership(x: &DVector<f64>, gens: &ConeGenerators) -> Result<bool> {
    gens.check_dim(x)?;
    if gens.normal.dot(x).abs() > MEMBERSHIP_TOL {
        return Ok(false);
    }
    Ok(gens.polar.iter().all(|w| w.dot(x) <= MEMBERSHIP_TOL))
}
