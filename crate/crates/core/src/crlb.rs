//! Cramér–Rao bounds: inverse of the Fisher matrix.

use nalgebra::DMatrix;
use serde::Serialize;
use thiserror::Error;

use crate::fisher::{FisherMatrix, Method};

/// Fisher matrices whose eigenvalue spread exceeds this are refused.
pub const SINGULAR_EIGEN_RATIO: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CrlbError {
    #[error("Fisher matrix is singular: smallest eigenvalue {min_eig:e}, largest {max_eig:e}")]
    SingularFisher { min_eig: f64, max_eig: f64 },
}

/// Variance bounds for position (m²) and, if estimated, phase (rad²).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrlbReport {
    pub c_x: f64,
    pub c_y: f64,
    pub c_z: f64,
    pub c_phase: Option<f64>,
    #[serde(skip)]
    pub matrix: DMatrix<f64>,
    pub condition_number: f64,
    #[serde(serialize_with = "ser_method")]
    pub method: Method,
}

fn ser_method<S: serde::Serializer>(m: &Method, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(m.as_str())
}

impl CrlbReport {
    /// Build a report from a covariance bound matrix computed elsewhere.
    pub fn from_matrix(matrix: DMatrix<f64>, condition_number: f64, method: Method) -> Self {
        let c_phase = (matrix.nrows() == 4).then(|| matrix[(3, 3)]);
        Self {
            c_x: matrix[(0, 0)],
            c_y: matrix[(1, 1)],
            c_z: matrix[(2, 2)],
            c_phase,
            matrix,
            condition_number,
            method,
        }
    }

    pub fn trace_xy(&self) -> f64 {
        self.c_x + self.c_y
    }
}

/// Cholesky factor `L` of a symmetric positive-definite matrix, or `None`
/// at the first non-positive pivot.
fn cholesky(a: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let n = a.nrows();
    let mut l = DMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > 0.0) {
            return None;
        }
        let d = d.sqrt();
        l[(j, j)] = d;
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    Some(l)
}

/// `A⁻¹` from its Cholesky factor.
fn inverse_from_cholesky(l: &DMatrix<f64>) -> DMatrix<f64> {
    let n = l.nrows();
    // L⁻¹ by forward substitution, then A⁻¹ = L⁻ᵀ L⁻¹.
    let mut li = DMatrix::zeros(n, n);
    for c in 0..n {
        for i in c..n {
            let mut s = if i == c { 1.0 } else { 0.0 };
            for k in c..i {
                s -= l[(i, k)] * li[(k, c)];
            }
            li[(i, c)] = s / l[(i, i)];
        }
    }
    li.transpose() * li
}

/// Inverse of a symmetric positive-definite matrix. Tries a plain Cholesky
/// factorization first and falls back to symmetric (diagonal) pivoting,
/// which orders the elimination by decreasing remaining diagonal.
pub fn spd_inverse(a: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    if let Some(l) = cholesky(a) {
        return Some(inverse_from_cholesky(&l));
    }
    pivoted_spd_inverse(a)
}

/// Cholesky with symmetric pivoting: `Pᵀ A P = L Lᵀ`.
pub fn pivoted_spd_inverse(a: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let n = a.nrows();
    let mut w = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    for j in 0..n {
        let p = (j..n).max_by(|&x, &y| w[(x, x)].total_cmp(&w[(y, y)]))?;
        if p != j {
            w.swap_rows(j, p);
            w.swap_columns(j, p);
            perm.swap(j, p);
        }
        if !(w[(j, j)] > 0.0) {
            return None;
        }
        let d = w[(j, j)].sqrt();
        w[(j, j)] = d;
        for i in j + 1..n {
            w[(i, j)] /= d;
        }
        for c in j + 1..n {
            for i in c..n {
                let v = w[(i, j)] * w[(c, j)];
                w[(i, c)] -= v;
            }
        }
        for c in j + 1..n {
            w[(j, c)] = 0.0;
            for i in c + 1..n {
                w[(c, i)] = w[(i, c)];
            }
        }
    }
    let l = DMatrix::from_fn(n, n, |i, k| if i >= k { w[(i, k)] } else { 0.0 });
    let pinv = inverse_from_cholesky(&l);
    let mut out = DMatrix::zeros(n, n);
    for i in 0..n {
        for k in 0..n {
            out[(perm[i], perm[k])] = pinv[(i, k)];
        }
    }
    Some(out)
}

/// Eigenvalue condition number, or [`CrlbError::SingularFisher`] when the
/// smallest eigenvalue is below [`SINGULAR_EIGEN_RATIO`] times the largest.
pub fn condition_number(m: &DMatrix<f64>) -> Result<f64, CrlbError> {
    let eig = m.clone().symmetric_eigen();
    let max = eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if !(max > 0.0) || min <= SINGULAR_EIGEN_RATIO * max {
        return Err(CrlbError::SingularFisher { min_eig: min, max_eig: max });
    }
    Ok(max / min)
}

/// `C = I⁻¹` with the diagonal bounds extracted.
pub fn crlb_from_fisher(f: &FisherMatrix) -> Result<CrlbReport, CrlbError> {
    let m = f.unit_matrix();
    let cond = condition_number(m)?;
    let c = spd_inverse(m).ok_or(CrlbError::SingularFisher {
        min_eig: f64::NAN,
        max_eig: f64::NAN,
    })?;
    let c = (&c + c.transpose()) * (0.5 / f.noise_factor());
    Ok(CrlbReport::from_matrix(c, cond, f.method()))
}
