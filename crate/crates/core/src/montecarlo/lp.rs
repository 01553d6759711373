//! Phase-1 simplex for small dense feasibility problems `Aλ = b, λ ≥ 0`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Largest total infeasibility still counted as feasible.
pub const FEASIBILITY_TOL: f64 = 1e-9;
/// Column entries at or below this are not used as pivots.
pub const PIVOT_TOL: f64 = 1e-12;

const REDUCED_COST_TOL: f64 = 1e-11;
// entries between NOISE_FLOOR and PIVOT_TOL are neither zero nor usable
const NOISE_FLOOR: f64 = 1e-15;

/// True iff `x` is a convex combination of the columns of `points`.
pub fn contains(x: &DVector<f64>, points: &DMatrix<f64>) -> Result<bool> {
    let (d, n) = points.shape();
    if x.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: x.len() });
    }
    if n == 0 {
        return Ok(false);
    }
    let mut a = DMatrix::zeros(d + 1, n);
    a.rows_mut(0, d).copy_from(points);
    a.row_mut(d).fill(1.0);
    let mut b = DVector::zeros(d + 1);
    b.rows_mut(0, d).copy_from(x);
    b[d] = 1.0;
    feasible(&a, &b)
}

/// True iff `Aλ = b` has a solution with `λ ≥ 0`.
pub fn feasible(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<bool> {
    if a.nrows() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), got: b.len() });
    }
    Ok(phase_one(a, b)? <= FEASIBILITY_TOL)
}

/// Minimum total artificial infeasibility, by Bland's rule.
fn phase_one(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<f64> {
    let (m, n) = a.shape();
    let width = n + 1;
    // rows hold [A | b] with b ≥ 0; the artificial columns are the implicit
    // initial basis and are dropped once they leave it
    let mut t = vec![0.0; m * width];
    for i in 0..m {
        let s = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[i * width + j] = s * a[(i, j)];
        }
        t[i * width + n] = s * b[i];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    let max_iter = 50 * (m + n) + 100;
    for _ in 0..max_iter {
        // reduced cost of column j is -Σ over rows with artificial basics
        let entering = (0..n).find(|&j| {
            !basis.contains(&j)
                && -(0..m)
                    .filter(|&i| basis[i] >= n)
                    .map(|i| t[i * width + j])
                    .sum::<f64>()
                    < -REDUCED_COST_TOL
        });
        let Some(j) = entering else {
            return Ok((0..m).filter(|&i| basis[i] >= n).map(|i| t[i * width + n]).sum());
        };
        let mut leave: Option<(usize, f64)> = None;
        let mut tiny = false;
        for i in 0..m {
            let aij = t[i * width + j];
            if aij > PIVOT_TOL {
                let ratio = t[i * width + n] / aij;
                let better = match leave {
                    None => true,
                    Some((l, best)) => ratio < best || (ratio == best && basis[i] < basis[l]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            } else if aij > NOISE_FLOOR {
                tiny = true;
            }
        }
        let Some((p, _)) = leave else {
            let why = if tiny {
                format!("pivot magnitude below {PIVOT_TOL:e} in column {j}")
            } else {
                "unbounded phase-1 direction".to_string()
            };
            return Err(Error::NumericalDegeneracy(why));
        };
        let pivot = t[p * width + j];
        for k in 0..width {
            t[p * width + k] /= pivot;
        }
        for i in 0..m {
            let factor = t[i * width + j];
            if i != p && factor != 0.0 {
                for k in 0..width {
                    t[i * width + k] -= factor * t[p * width + k];
                }
            }
        }
        basis[p] = j;
    }
    Err(Error::NumericalDegeneracy("simplex iteration cap reached".into()))
}
