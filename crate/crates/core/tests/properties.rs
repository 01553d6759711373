use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::Rng;

use gpolytope::absorption::{p_nd, wendel};
use gpolytope::cones::{cone_membership, polar_parameter, ConeGenerators, EquicorrelatedCone};
use gpolytope::montecarlo::lp::{contains, feasible};
use gpolytope::montecarlo::{haar_orthogonal, Estimate, RngSpec, DEFAULT_CI_LEVEL};
use gpolytope::numerics::{std_normal_cdf, QuadratureConfig};
use gpolytope::orthant::g_nr;

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn polar_parameter_is_an_involution(n in 1u32..20, t in 0.0f64..1.0) {
        // r spans (-1/n, 6)
        let r = -1.0 / n as f64 + 1e-3 + t * 6.0;
        let back = polar_parameter(n, polar_parameter(n, r).unwrap()).unwrap();
        prop_assert!((back - r).abs() < 1e-9 * (1.0 + r.abs()));
    }

    #[test]
    fn normal_cdf_symmetry(x in -30.0f64..30.0) {
        prop_assert!((std_normal_cdf(x) + std_normal_cdf(-x) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn g_is_a_probability_and_increasing(n in 2u32..9, a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let lo = -1.0 / n as f64 + 1e-3;
        let (r1, r2) = (lo + a.min(b) * 4.0, lo + a.max(b) * 4.0);
        let (g1, g2) = (g_nr(n, r1, &cfg()).unwrap(), g_nr(n, r2, &cfg()).unwrap());
        prop_assert!((0.0..=0.5).contains(&g1) && (0.0..=0.5).contains(&g2));
        prop_assert!(g2 >= g1 - 1e-10);
    }

    #[test]
    fn absorption_between_wendel_and_one(n in 3u32..10, s2 in 0.0f64..5.0) {
        let d = 2;
        let p = p_nd(n, d, s2, &cfg()).unwrap();
        prop_assert!(p >= wendel(n, d) - 1e-9 && p <= 1.0 + 1e-9);
    }

    #[test]
    fn wilson_interval_contains_the_proportion(n in 1u64..100_000, frac in 0.0f64..=1.0) {
        let s = ((n as f64) * frac).floor() as u64;
        let e = Estimate::bernoulli(s, n, DEFAULT_CI_LEVEL);
        prop_assert!(e.ci_lo <= e.mean && e.mean <= e.ci_hi);
        prop_assert!(e.ci_lo >= 0.0 && e.ci_hi <= 1.0);
    }
}

#[test]
fn cone_membership_agrees_with_lp() {
    let mut rng = RngSpec::new(99, 0).chunk_rng(0);
    for (n, r) in [(3u32, 0.0), (4, 0.8), (3, -0.2), (5, -0.1)] {
        let gens = ConeGenerators::new(&EquicorrelatedCone::new(n, r).unwrap());
        let a = DMatrix::from_columns(&gens.primal);
        let mut inside = 0;
        for _ in 0..1000 {
            let z = DVector::from_fn(gens.dim(), |_, _| rng.sample::<f64, _>(rand_distr::StandardNormal));
            let y = gens.project(&z).unwrap();
            let by_polar = cone_membership(&y, &gens).unwrap();
            let by_lp = feasible(&a, &y).unwrap();
            assert_eq!(by_polar, by_lp, "n={n} r={r} y={y}");
            inside += by_lp as usize;
        }
        assert!(inside > 0 && inside < 1000);
    }
}

#[test]
fn lp_agrees_with_barycentric_solve() {
    let mut rng = RngSpec::new(100, 0).chunk_rng(0);
    let mut disagreements = 0;
    for trial in 0..10_000 {
        let d = 2 + trial % 3;
        let pts = DMatrix::from_fn(d, d + 1, |_, _| rng.sample::<f64, _>(rand_distr::StandardNormal));
        let x = DVector::from_fn(d, |_, _| rng.sample::<f64, _>(rand_distr::StandardNormal) * 0.7);
        let mut sys = DMatrix::from_element(d + 1, d + 1, 1.0);
        sys.rows_mut(0, d).copy_from(&pts);
        let mut rhs = DVector::from_element(d + 1, 1.0);
        rhs.rows_mut(0, d).copy_from(&x);
        let lambda = sys.lu().solve(&rhs).unwrap();
        // skip points on the boundary up to rounding
        if lambda.iter().any(|l| l.abs() < 1e-8) {
            continue;
        }
        let direct = lambda.iter().all(|&l| l > 0.0);
        if contains(&x, &pts).unwrap() != direct {
            disagreements += 1;
        }
    }
    assert_eq!(disagreements, 0);
}

#[test]
fn haar_determinant_and_column_uniformity() {
    let mut rng = RngSpec::new(101, 0).chunk_rng(0);
    let n = 4;
    let draws = 10_000;
    let mut mean = DVector::zeros(n);
    for _ in 0..draws {
        let o = haar_orthogonal(n, &mut rng);
        assert!((o.determinant().abs() - 1.0).abs() < 1e-10);
        mean += o.column(0);
    }
    mean /= draws as f64;
    // each coordinate of a uniform unit vector has variance 1/n
    let se = (1.0 / n as f64 / draws as f64).sqrt();
    assert!(mean.amax() < 4.0 * se, "{mean}");
}

#[test]
fn haar_is_invariant_under_row_permutation() {
    // the entry O[0][0] and (PO)[0][0] = O[1][0] must share a distribution;
    // compare their second moments, both 1/n
    let mut rng = RngSpec::new(102, 0).chunk_rng(0);
    let n = 3;
    let draws = 10_000;
    let (mut a, mut b) = (0.0, 0.0);
    for _ in 0..draws {
        let o = haar_orthogonal(n, &mut rng);
        a += o[(0, 0)].powi(2);
        b += o[(1, 0)].powi(2);
    }
    let (a, b) = (a / draws as f64, b / draws as f64);
    // Var(x²) for a coordinate of a uniform point on S² is 4/45
    let se = (2.0 * 4.0 / 45.0 / draws as f64).sqrt();
    assert!((a - b).abs() < 4.0 * se, "{a} vs {b}");
    assert!((a - 1.0 / 3.0).abs() < 4.0 * se);
}
