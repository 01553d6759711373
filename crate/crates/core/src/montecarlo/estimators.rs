use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal, Uniform};

use super::estimate::{Estimate, Moments, DEFAULT_CI_LEVEL};
use super::geometry::{
    equiangular_unit_vectors, gaussian_matrix, hull_area_2d, projected_simplex, uniform_on_sphere, SimplexModel,
};
use super::lp::contains;
use super::nnls::nnls;
use super::rng::{run_chunks, RngSpec};
use crate::cones::{cone_membership, ConeGenerators, EquicorrelatedCone};
use crate::error::{domain, Error, Result};
use crate::spherical::SphericalSimplexQuery;

/// Uniform draws per sample in the 3-D hit-or-miss volume estimator.
pub const VOLUME_SECONDARY_DRAWS: usize = 32;
/// At most one sample in this many may be discarded as degenerate.
pub const DISCARD_CAP: u64 = 10_000;

/// Where the test point of an absorption trial comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AbsorptionMode {
    /// `σX` with `X` an independent standard Gaussian point.
    ScaledGaussian { sigma2: f64 },
    /// A fixed point at distance `radius` from the origin.
    FixedPoint { radius: f64 },
}

fn check_samples(samples: u64) -> Result<()> {
    if samples == 0 {
        return domain("at least one sample is required");
    }
    Ok(())
}

fn check_polytope(n: usize, d: usize) -> Result<()> {
    if d == 0 || n < d + 1 {
        return domain(format!("need d >= 1 and n >= d + 1, got n={n}, d={d}"));
    }
    Ok(())
}

fn gaussian_vector(d: usize, rng: &mut ChaCha8Rng) -> DVector<f64> {
    DVector::from_iterator(d, (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)))
}

fn chi(k: usize) -> Result<ChiSquared<f64>> {
    ChiSquared::new(k as f64).map_err(|e| Error::Domain(format!("chi distribution with {k} degrees: {e}")))
}

/// Wilson estimate of `P[trial]`.
fn bernoulli<F>(rng: &RngSpec, samples: u64, trial: F) -> Result<Estimate>
where
    F: Fn(&mut ChaCha8Rng) -> Result<bool> + Sync,
{
    check_samples(samples)?;
    let hits = run_chunks(rng, samples, |r, len| {
        let mut hits = 0u64;
        for _ in 0..len {
            hits += trial(r)? as u64;
        }
        Ok(hits)
    })?;
    Ok(Estimate::bernoulli(hits.iter().sum(), samples, DEFAULT_CI_LEVEL))
}

/// Per-sample vector statistics, discarding samples that come back
/// `NumericalDegeneracy`.
fn vector_means<F>(rng: &RngSpec, samples: u64, width: usize, sample: F) -> Result<Vec<Estimate>>
where
    F: Fn(&mut ChaCha8Rng) -> Result<Vec<f64>> + Sync,
{
    check_samples(samples)?;
    let parts = run_chunks(rng, samples, |r, len| {
        let mut m = vec![Moments::default(); width];
        let mut discarded = 0u64;
        for _ in 0..len {
            match sample(r) {
                Ok(v) => m.iter_mut().zip(v).for_each(|(m, x)| m.push(x)),
                Err(Error::NumericalDegeneracy(_)) => discarded += 1,
                Err(e) => return Err(e),
            }
        }
        Ok((m, discarded))
    })?;
    let mut total = vec![Moments::default(); width];
    let mut discarded = 0;
    for (m, dis) in &parts {
        total.iter_mut().zip(m).for_each(|(t, m)| t.merge(m));
        discarded += dis;
    }
    if discarded * DISCARD_CAP > samples || discarded == samples {
        return Err(Error::NumericalDegeneracy(format!(
            "{discarded} of {samples} samples were degenerate"
        )));
    }
    Ok(total
        .iter()
        .map(|m| Estimate::from_moments(m, DEFAULT_CI_LEVEL).with_discarded(discarded))
        .collect())
}

/// Non-absorption probability `P[x ∉ conv(X_1, …, X_n)]`.
pub fn estimate_absorption(
    n: usize,
    d: usize,
    mode: AbsorptionMode,
    samples: u64,
    rng: &RngSpec,
) -> Result<Estimate> {
    check_polytope(n, d)?;
    let scale = match mode {
        AbsorptionMode::ScaledGaussian { sigma2 } if sigma2 >= 0.0 && sigma2.is_finite() => sigma2.sqrt(),
        AbsorptionMode::FixedPoint { radius } if radius >= 0.0 && radius.is_finite() => radius,
        _ => return domain(format!("invalid absorption mode {mode:?}")),
    };
    bernoulli(rng, samples, |r| {
        let pts = gaussian_matrix(d, n, r);
        let x = match mode {
            AbsorptionMode::ScaledGaussian { .. } => gaussian_vector(d, r) * scale,
            // rotation invariance: any point at this radius will do
            AbsorptionMode::FixedPoint { .. } => {
                let mut x = DVector::zeros(d);
                x[0] = scale;
                x
            }
        };
        Ok(!contains(&x, &pts)?)
    })
}

/// Number of columns of `pts` that are not in the hull of the others.
fn vertex_count(pts: &DMatrix<f64>) -> Result<usize> {
    let n = pts.ncols();
    let mut count = 0;
    for i in 0..n {
        let others = pts.clone().remove_column(i);
        if !contains(&pts.column(i).into_owned(), &others)? {
            count += 1;
        }
    }
    Ok(count)
}

/// Mean `k`-face counts, `k = 0, …, d-1`, for `d ∈ {2, 3}`.
///
/// In three dimensions the hull is a.s. simplicial, so `f_1 = 3f_0 - 6` and
/// `f_2 = 2f_0 - 4`.
pub fn estimate_faces(n: usize, d: usize, samples: u64, rng: &RngSpec) -> Result<Vec<Estimate>> {
    check_polytope(n, d)?;
    if !(2..=3).contains(&d) {
        return domain(format!("face counting supports d = 2 or 3, got {d}"));
    }
    vector_means(rng, samples, d, |r| {
        let f0 = vertex_count(&gaussian_matrix(d, n, r))? as f64;
        Ok(if d == 2 { vec![f0, f0] } else { vec![f0, 3.0 * f0 - 6.0, 2.0 * f0 - 4.0] })
    })
}

/// Mean volume of the Gaussian polytope for `d ∈ {2, 3}`; `n ≤ d` gives 0.
pub fn estimate_volume(n: usize, d: usize, samples: u64, rng: &RngSpec) -> Result<Estimate> {
    if n == 0 || !(2..=3).contains(&d) {
        return domain(format!("volume estimation needs n >= 1 and d in {{2, 3}}, got n={n}, d={d}"));
    }
    let unit = Uniform::new_inclusive(-1.0, 1.0).expect("valid range");
    let est = vector_means(rng, samples, 1, |r| {
        let pts = gaussian_matrix(d, n, r);
        if d == 2 {
            return Ok(vec![hull_area_2d(&pts)]);
        }
        if n <= d {
            return Ok(vec![0.0]);
        }
        let half = pts.amax();
        let mut hits = 0;
        for _ in 0..VOLUME_SECONDARY_DRAWS {
            let y = DVector::from_iterator(3, (0..3).map(|_| half * unit.sample(r)));
            hits += contains(&y, &pts)? as usize;
        }
        Ok(vec![(2.0 * half).powi(3) * hits as f64 / VOLUME_SECONDARY_DRAWS as f64])
    })?;
    Ok(est[0])
}

/// Raw frequency of `c·(R_1/R_2)e_1 ∉ Q` for a projected random simplex `Q`.
///
/// Regular model: `n` vertices in `R^{n-1}`, `R_2 ~ χ_{n-d}` and
/// `c = √((nσ²+1)/(n-1))`. Standard model: `conv(e_i)`, `R_2 ~ χ_{n-d+1}`
/// and `c = σ`. In both cases `R_1 ~ χ_d`.
pub fn estimate_gp_frequency(
    n: usize,
    d: usize,
    sigma2: f64,
    model: SimplexModel,
    samples: u64,
    rng: &RngSpec,
) -> Result<Estimate> {
    check_polytope(n, d)?;
    if !(sigma2 >= 0.0 && sigma2.is_finite()) {
        return domain(format!("sigma2 must be finite and nonnegative, got {sigma2}"));
    }
    let (dof, scale) = match model {
        SimplexModel::Regular => (n - d, ((n as f64 * sigma2 + 1.0) / (n as f64 - 1.0)).sqrt()),
        SimplexModel::Standard => (n - d + 1, sigma2.sqrt()),
    };
    let (chi1, chi2) = (chi(d)?, chi(dof)?);
    bernoulli(rng, samples, |r| {
        let q = projected_simplex(n, d, model, r);
        let ratio = chi1.sample(r).sqrt() / chi2.sample(r).sqrt();
        let mut x = DVector::zeros(d);
        x[0] = scale * ratio;
        Ok(!contains(&x, &q.projected_vertices)?)
    })
}

/// The integral transform of the Goodman–Pollack non-absorption probability:
/// the ratio `R_1/R_2` has density twice the transform's weight, so the
/// transform is half the raw frequency.
pub fn estimate_gp_transform(
    n: usize,
    d: usize,
    sigma2: f64,
    model: SimplexModel,
    samples: u64,
    rng: &RngSpec,
) -> Result<Estimate> {
    Ok(estimate_gp_frequency(n, d, sigma2, model, samples, rng)?.scaled(0.5))
}

/// Solid angle of `C_n(r)`: a Gaussian vector projected onto `L(C)` lands in `C`.
pub fn estimate_solid_angle(n: usize, r: f64, samples: u64, rng: &RngSpec) -> Result<Estimate> {
    let gens = ConeGenerators::new(&EquicorrelatedCone::new(n as u32, r)?);
    bernoulli(rng, samples, |rg| {
        let y = gens.project(&gaussian_vector(gens.dim(), rg))?;
        cone_membership(&y, &gens)
    })
}

/// Conic intrinsic volumes `υ_0, …, υ_n` of `C_n(r)`: the metric projection of
/// a Gaussian vector lies in the relative interior of a `k`-face with
/// probability `υ_k`, and `k` is the support size of the NNLS coefficients.
pub fn estimate_intrinsic_volumes(n: usize, r: f64, samples: u64, rng: &RngSpec) -> Result<Vec<Estimate>> {
    let gens = ConeGenerators::new(&EquicorrelatedCone::new(n as u32, r)?);
    let a = DMatrix::from_columns(&gens.primal);
    check_samples(samples)?;
    let hist = run_chunks(rng, samples, |rg, len| {
        let mut h = vec![0u64; n + 1];
        for _ in 0..len {
            let y = gens.project(&gaussian_vector(gens.dim(), rg))?;
            let lambda = nnls(&a, &y)?;
            h[lambda.iter().filter(|&&l| l > 0.0).count()] += 1;
        }
        Ok(h)
    })?;
    Ok((0..=n)
        .map(|k| Estimate::bernoulli(hist.iter().map(|h| h[k]).sum(), samples, DEFAULT_CI_LEVEL))
        .collect())
}

/// Fraction of `S^{n-1}` covered by the regular spherical simplex of side `ell`,
/// by uniform sampling on the sphere and barycentric coordinates.
pub fn estimate_spherical_fraction(n: usize, ell: f64, samples: u64, rng: &RngSpec) -> Result<Estimate> {
    let q = SphericalSimplexQuery::new(n as u32, ell)?;
    let inv = equiangular_unit_vectors(n, q.ell)
        .try_inverse()
        .ok_or_else(|| Error::NumericalDegeneracy("singular vertex matrix".into()))?;
    bernoulli(rng, samples, |r| {
        let x = uniform_on_sphere(n, r);
        Ok((&inv * x).iter().all(|&l| l >= 0.0))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::absorption::{f_d2_closed, p_nd, wendel};
    use crate::cones::{intrinsic_volumes, solid_angle};
    use crate::numerics::QuadratureConfig;
    use crate::polytope_stats::{expected_faces, expected_volume, FaceQuery};
    use crate::spherical::{spherical_simplex_volume_fraction, SphericalSimplexQuery};
    use std::f64::consts::PI;

    fn seeded(seed: u64) -> RngSpec {
        RngSpec::new(seed, 0)
    }

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn wendel_at_zero_radius() {
        let e = estimate_absorption(5, 2, AbsorptionMode::ScaledGaussian { sigma2: 0.0 }, 100_000, &seeded(1)).unwrap();
        assert!(e.covers(wendel(5, 2)), "{e:?}");
    }

    #[test]
    fn absorption_matches_analytic() {
        let e = estimate_absorption(6, 3, AbsorptionMode::ScaledGaussian { sigma2: 1.0 }, 200_000, &seeded(2)).unwrap();
        assert!(e.covers(p_nd(6, 3, 1.0, &cfg()).unwrap()), "{e:?}");
        let e = estimate_absorption(6, 2, AbsorptionMode::FixedPoint { radius: 2f64.sqrt() }, 200_000, &seeded(3))
            .unwrap();
        assert!(e.covers(f_d2_closed(6, 1.0, &cfg()).unwrap()), "{e:?}");
    }

    #[test]
    fn same_spec_same_estimate() {
        let run = || estimate_absorption(5, 2, AbsorptionMode::ScaledGaussian { sigma2: 0.5 }, 9000, &seeded(4)).unwrap();
        assert_eq!(run(), run());
        let other = estimate_absorption(5, 2, AbsorptionMode::ScaledGaussian { sigma2: 0.5 }, 9000, &seeded(5)).unwrap();
        assert_ne!(run().mean, other.mean);
    }

    #[test]
    fn simplex_faces_are_exact() {
        for d in 2..=3 {
            let f = estimate_faces(d + 1, d, 500, &seeded(6)).unwrap();
            for (k, e) in f.iter().enumerate() {
                let want = crate::numerics::binomial((d + 1) as u32, (k + 1) as u32);
                assert_eq!(e.mean, want);
                assert_eq!(e.stderr, 0.0);
            }
        }
    }

    #[test]
    fn face_counts_match_analytic() {
        for (n, d) in [(10, 2), (8, 3)] {
            let f = estimate_faces(n, d, 10_000, &seeded(7)).unwrap();
            for (k, e) in f.iter().enumerate() {
                let want = expected_faces(&FaceQuery::new(n as u32, d as u32, k as u32).unwrap(), &cfg()).unwrap();
                assert!(e.covers(want), "n={n} d={d} k={k} {e:?} want {want}");
            }
        }
    }

    #[test]
    fn volumes() {
        let e = estimate_volume(3, 2, 200_000, &seeded(8)).unwrap();
        assert!(e.covers(3f64.sqrt() / 2.0), "{e:?}");
        let e = estimate_volume(10, 2, 50_000, &seeded(9)).unwrap();
        assert!(e.covers(expected_volume(10, 2, &cfg()).unwrap()), "{e:?}");
        let e = estimate_volume(6, 3, 5_000, &seeded(10)).unwrap();
        assert!(e.covers(expected_volume(6, 3, &cfg()).unwrap()), "{e:?}");
        assert_eq!(estimate_volume(2, 2, 100, &seeded(11)).unwrap().mean, 0.0);
        assert_eq!(estimate_volume(3, 3, 100, &seeded(11)).unwrap().mean, 0.0);
    }

    #[test]
    fn goodman_pollack_at_zero_sigma() {
        let e = estimate_gp_transform(5, 2, 0.0, SimplexModel::Regular, 100_000, &seeded(12)).unwrap();
        assert!(e.covers(wendel(5, 2) / 2.0), "{e:?}");
    }

    #[test]
    fn goodman_pollack_transforms() {
        let one_sided = crate::cones::intrinsic_volume(6, 1, 1.0, &cfg()).unwrap();
        let e = estimate_gp_transform(6, 2, 1.0, SimplexModel::Regular, 100_000, &seeded(20)).unwrap();
        assert!(e.covers(one_sided), "{e:?} vs {one_sided}");
        // conv(e_1..e_n) with the (n+1)/2 weight has the same right-hand side
        let e = estimate_gp_transform(6, 2, 1.0, SimplexModel::Standard, 100_000, &seeded(21)).unwrap();
        assert!(e.covers(one_sided), "{e:?} vs {one_sided}");
        let three = p_nd(7, 3, 0.5, &cfg()).unwrap() / 2.0;
        let e = estimate_gp_transform(7, 3, 0.5, SimplexModel::Standard, 100_000, &seeded(22)).unwrap();
        assert!(e.covers(three), "{e:?} vs {three}");
    }

    #[test]
    fn full_dimensional_projection_is_a_simplex() {
        let mut r = seeded(23).chunk_rng(0);
        for n in 3..=5 {
            let q = crate::montecarlo::goodman_pollack_sample(n, n - 1, &mut r);
            assert_eq!(vertex_count(&q.projected_vertices).unwrap(), n);
        }
    }

    #[test]
    fn gaussian_points_moments() {
        let pts = crate::montecarlo::sample_gaussian_points(1_000_000, 1, &seeded(24));
        assert_eq!(pts, crate::montecarlo::sample_gaussian_points(1_000_000, 1, &seeded(24)));
        let mean = pts.mean();
        let var = pts.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (pts.len() - 1) as f64;
        assert!(mean.abs() < 4.0 / 1000.0);
        assert!((var - 1.0).abs() < 0.01);
    }

    // At level 0.99 the Wilson interval should cover in about 99 of 100
    // independent runs; demand at least 95.
    #[test]
    #[ignore = "slow coverage meta-test"]
    fn wilson_coverage_over_seeds() {
        let want = p_nd(5, 2, 0.5, &cfg()).unwrap();
        let covered = (0..100)
            .filter(|&s| {
                estimate_absorption(5, 2, AbsorptionMode::ScaledGaussian { sigma2: 0.5 }, 100_000, &RngSpec::new(s, 77))
                    .unwrap()
                    .covers(want)
            })
            .count();
        assert!(covered >= 95, "{covered}/100");
        let want = crate::cones::intrinsic_volume(6, 1, 1.0, &cfg()).unwrap();
        let covered = (0..100)
            .filter(|&s| {
                let e = estimate_gp_frequency(6, 2, 1.0, SimplexModel::Regular, 50_000, &RngSpec::new(s, 78)).unwrap();
                e.covers(2.0 * want)
            })
            .count();
        assert!(covered >= 95, "{covered}/100");
    }

    #[test]
    fn solid_angles() {
        let e = estimate_solid_angle(3, 0.0, 100_000, &seeded(13)).unwrap();
        assert!(e.covers(0.125), "{e:?}");
        let e = estimate_solid_angle(2, 1.0, 100_000, &seeded(14)).unwrap();
        assert!(e.covers(1.0 / 6.0), "{e:?}");
        let c = EquicorrelatedCone::new(4, 0.5).unwrap();
        let e = estimate_solid_angle(4, 0.5, 100_000, &seeded(15)).unwrap();
        assert!(e.covers(solid_angle(&c, &cfg()).unwrap()), "{e:?}");
    }

    #[test]
    fn intrinsic_volume_histograms() {
        let v = estimate_intrinsic_volumes(2, 0.0, 100_000, &seeded(16)).unwrap();
        for (e, want) in v.iter().zip([0.25, 0.5, 0.25]) {
            assert!(e.covers(want), "{e:?}");
        }
        let c = EquicorrelatedCone::new(4, 1.0).unwrap();
        let exact = intrinsic_volumes(&c, &cfg()).unwrap();
        let v = estimate_intrinsic_volumes(4, 1.0, 100_000, &seeded(17)).unwrap();
        for (e, want) in v.iter().zip(&exact.values) {
            assert!(e.covers(*want), "{e:?} vs {want}");
        }
        // υ_n is the solid angle itself
        let top = v[4].mean;
        let direct = estimate_solid_angle(4, 1.0, 100_000, &seeded(17)).unwrap();
        assert!((top - direct.mean).abs() < 4.0 * direct.stderr.max(1e-3));
        let v = estimate_intrinsic_volumes(3, -0.2, 50_000, &seeded(18)).unwrap();
        let even: f64 = v.iter().step_by(2).map(|e| e.mean).sum();
        assert!((even - 0.5).abs() < 0.01);
    }

    #[test]
    fn spherical_triangle_fraction() {
        for ell in [0.8, PI / 2.0, 2.0] {
            let q = SphericalSimplexQuery::new(3, ell).unwrap();
            let want = spherical_simplex_volume_fraction(&q, &cfg()).unwrap();
            let e = estimate_spherical_fraction(3, ell, 100_000, &seeded(19)).unwrap();
            assert!(e.z_score(want).abs() < 3.0, "ell={ell} {e:?} {want}");
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let m = AbsorptionMode::ScaledGaussian { sigma2: 1.0 };
        assert!(estimate_absorption(2, 2, m, 10, &seeded(0)).is_err());
        assert!(estimate_absorption(3, 2, m, 0, &seeded(0)).is_err());
        assert!(estimate_absorption(3, 2, AbsorptionMode::FixedPoint { radius: -1.0 }, 10, &seeded(0)).is_err());
        assert!(estimate_faces(6, 4, 10, &seeded(0)).is_err());
        assert!(estimate_volume(6, 1, 10, &seeded(0)).is_err());
        assert!(estimate_solid_angle(3, -0.5, 10, &seeded(0)).is_err());
    }
}
