use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use super::rng::RngSpec;

/// `rows × cols` matrix of independent standard normals, filled column by column.
pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<f64> {
    DMatrix::from_iterator(rows, cols, (0..rows * cols).map(|_| rng.sample::<f64, _>(StandardNormal)))
}

/// `n` standard Gaussian points in `R^d`, one per column, from chunk 0 of `rng`.
pub fn sample_gaussian_points(n: usize, d: usize, rng: &RngSpec) -> DMatrix<f64> {
    gaussian_matrix(d, n, &mut rng.chunk_rng(0))
}

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the
/// signs of `diag R` folded into `Q`.
pub fn haar_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let qr = gaussian_matrix(n, n, rng).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Vertices of the regular simplex with `n` unit vertices in `R^{n-1}` and
/// pairwise inner product `-1/(n-1)`, as columns.
///
/// The vertex `e_j - 𝟙/n` (rescaled) is written in the Helmert basis of `𝟙^⊥`.
pub fn regular_simplex_vertices(n: usize) -> DMatrix<f64> {
    assert!(n >= 2);
    let scale = (n as f64 / (n as f64 - 1.0)).sqrt();
    DMatrix::from_fn(n - 1, n, |row, j| {
        let k = row + 1;
        let norm = ((k * (k + 1)) as f64).sqrt();
        if j < k {
            scale / norm
        } else if j == k {
            -scale * k as f64 / norm
        } else {
            0.0
        }
    })
}

/// Which simplex is rotated and projected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimplexModel {
    /// `n` vertices in `R^{n-1}` with pairwise inner product `-1/(n-1)`.
    Regular,
    /// `conv(e_1, …, e_n) ⊂ R^n`.
    Standard,
}

/// A random projection `Π O v_j` of a rotated simplex to `R^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct GoodmanPollackSample {
    /// One projected vertex per column.
    pub projected_vertices: DMatrix<f64>,
}

pub fn goodman_pollack_sample<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> GoodmanPollackSample {
    projected_simplex(n, d, SimplexModel::Regular, rng)
}

pub fn projected_simplex<R: Rng + ?Sized>(
    n: usize,
    d: usize,
    model: SimplexModel,
    rng: &mut R,
) -> GoodmanPollackSample {
    assert!(n > d && d >= 1);
    let projected_vertices = match model {
        SimplexModel::Regular => {
            let o = haar_orthogonal(n - 1, rng);
            o.rows(0, d) * regular_simplex_vertices(n)
        }
        // O e_j is the j-th column of O
        SimplexModel::Standard => haar_orthogonal(n, rng).rows(0, d).into_owned(),
    };
    GoodmanPollackSample { projected_vertices }
}

/// Area of the convex hull of planar points (monotone chain + shoelace).
pub fn hull_area_2d(points: &DMatrix<f64>) -> f64 {
    assert_eq!(points.nrows(), 2);
    let mut pts: Vec<(f64, f64)> = points.column_iter().map(|c| (c[0], c[1])).collect();
    if pts.len() < 3 {
        return 0.0;
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0);
    let half = |it: &mut dyn Iterator<Item = &(f64, f64)>| {
        let mut h: Vec<(f64, f64)> = Vec::new();
        for &p in it {
            while h.len() >= 2 && cross(h[h.len() - 2], h[h.len() - 1], p) <= 0.0 {
                h.pop();
            }
            h.push(p);
        }
        h.pop();
        h
    };
    let mut hull = half(&mut pts.iter());
    hull.extend(half(&mut pts.iter().rev()));
    let m = hull.len();
    let twice: f64 = (0..m)
        .map(|i| {
            let (a, b) = (hull[i], hull[(i + 1) % m]);
            a.0 * b.1 - a.1 * b.0
        })
        .sum();
    twice.abs() / 2.0
}

/// `n` unit vectors in `R^n` with pairwise angle `ell`, as columns.
pub fn equiangular_unit_vectors(n: usize, ell: f64) -> DMatrix<f64> {
    // v_i = a e_i + β𝟙 with Gram matrix (1-c)I + c𝟙𝟙ᵀ
    let c = ell.cos();
    let a = (1.0 - c).sqrt();
    let nf = n as f64;
    let beta = (-a + (1.0 - c + nf * c).sqrt()) / nf;
    DMatrix::from_fn(n, n, |i, j| if i == j { a + beta } else { beta })
}

/// Uniform point on `S^{n-1}`.
pub fn uniform_on_sphere<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DVector<f64> {
    loop {
        let z = DVector::from_iterator(n, (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)));
        let norm = z.norm();
        if norm > 0.0 {
            return z / norm;
        }
    }
}
