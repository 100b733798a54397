//! Dense complex linear algebra shared by the simulator and the metrics.
//!
//! Matrices are plain `nalgebra` dense matrices over `Complex64`. Everything
//! here is small (at most 64x64), so no attempt is made at blocking or
//! sparsity.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;

/// Tolerance for Hermiticity and unitarity claims (max-abs entry deviation).
pub const STRUCTURE_TOL: f64 = 1e-10;

/// Eigenvalues in `[-EIGEN_CLIP_TOL, 0)` are treated as exact zeros.
pub const EIGEN_CLIP_TOL: f64 = 1e-8;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Builds a matrix from row-major complex entries.
pub fn from_rows(rows: usize, cols: usize, entries: &[Complex64]) -> Result<ComplexMatrix> {
    if entries.len() != rows * cols {
        return Err(Error::DimensionMismatch {
            left: entries.len(),
            right: rows * cols,
        });
    }
    Ok(ComplexMatrix::from_row_slice(rows, cols, entries))
}

pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Largest entry of `|M - M†|`.
pub fn hermiticity_error(m: &ComplexMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    max_abs_diff(m, &m.adjoint())
}

pub fn is_hermitian(m: &ComplexMatrix) -> bool {
    hermiticity_error(m) <= STRUCTURE_TOL
}

pub fn is_unitary(m: &ComplexMatrix) -> bool {
    if !m.is_square() {
        return false;
    }
    let id = ComplexMatrix::identity(m.nrows(), m.ncols());
    max_abs_diff(&(m.adjoint() * m), &id) <= STRUCTURE_TOL
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

pub fn trace(m: &ComplexMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues in ascending order.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector for `values[k]`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn new(m: &ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        let err = hermiticity_error(m);
        if err > STRUCTURE_TOL {
            return Err(Error::NotHermitian(err));
        }
        // Symmetrise so round-off never leaks into the solver.
        let sym = (m + m.adjoint()).map(|z| z * 0.5);
        let eig = sym.symmetric_eigen();
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = ComplexMatrix::from_fn(m.nrows(), m.ncols(), |r, k| {
            eig.eigenvectors[(r, order[k])]
        });
        Ok(Self { values, vectors })
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    /// Magnitude below which an eigenvalue is indistinguishable from zero
    /// given the solver's backward error (`16 · n · ε · max|λ|`).
    pub fn rank_tol(&self) -> f64 {
        rank_tol(&self.values)
    }

    /// `V diag(f(λ)) V†`.
    pub fn reassemble(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let mapped: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        self.with_values(&mapped)
    }

    /// `V diag(values) V†`, reusing the eigenvectors.
    pub fn with_values(&self, values: &[f64]) -> ComplexMatrix {
        let n = self.values.len();
        assert_eq!(values.len(), n);
        let mut scaled = self.vectors.clone();
        for (k, &w) in values.iter().enumerate() {
            for r in 0..n {
                scaled[(r, k)] *= w;
            }
        }
        scaled * self.vectors.adjoint()
    }
}

/// `16 · n · ε · max|λ|` for a spectrum of length `n`.
pub fn rank_tol(values: &[f64]) -> f64 {
    let scale = values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    16.0 * values.len() as f64 * f64::EPSILON * scale
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(HermitianEigen::new(m)?.values)
}

/// Principal square root of a Hermitian positive-semidefinite matrix.
///
/// Eigenvalues in `[-1e-8, 0)` are clipped to zero; anything more negative
/// is rejected with [`Error::NotPositive`]. Eigenvalues below the numerical
/// rank tolerance are also zeroed, so a projector comes back as itself
/// rather than picking up `√ε`-sized leakage on its null space.
pub fn matrix_sqrt_psd(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = HermitianEigen::new(m)?;
    let min = eig.min();
    if min < -EIGEN_CLIP_TOL {
        return Err(Error::NotPositive(min));
    }
    let tol = eig.rank_tol();
    Ok(eig.reassemble(|l| if l <= tol { 0.0 } else { l.sqrt() }))
}

/// Serde adapter: a complex matrix as nested rows of `[re, im]` pairs.
pub mod serde_rows {
    use super::ComplexMatrix;
    use num_complex::Complex64;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &ComplexMatrix, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = m
            .row_iter()
            .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
            .collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<ComplexMatrix, D::Error> {
        let rows: Vec<Vec<[f64; 2]>> = Vec::deserialize(d)?;
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != m) {
            return Err(D::Error::custom("ragged matrix rows"));
        }
        let entries: Vec<Complex64> = rows
            .iter()
            .flatten()
            .map(|p| Complex64::new(p[0], p[1]))
            .collect();
        Ok(ComplexMatrix::from_row_slice(n, m, &entries))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(values: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            values.len(),
            values.iter().map(|&v| c(v, 0.0)),
        ))
    }

    #[test]
    fn sqrt_of_identity_is_identity() {
        let id = ComplexMatrix::identity(4, 4);
        assert!(max_abs_diff(&matrix_sqrt_psd(&id).unwrap(), &id) < 1e-12);
    }

    #[test]
    fn sqrt_of_diagonal() {
        let r = matrix_sqrt_psd(&diag(&[4.0, 9.0])).unwrap();
        assert!(max_abs_diff(&r, &diag(&[2.0, 3.0])) < 1e-12);
    }

    #[test]
    fn projector_is_its_own_root() {
        let p = from_rows(2, 2, &[c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0)]).unwrap();
        let r = matrix_sqrt_psd(&p).unwrap();
        assert!(max_abs_diff(&r, &p) < 1e-12);
    }

    #[test]
    fn sqrt_clips_tiny_negatives_and_rejects_large_ones() {
        let r = matrix_sqrt_psd(&diag(&[1.0, -1e-10])).unwrap();
        assert!(max_abs_diff(&r, &diag(&[1.0, 0.0])) < 1e-12);
        assert!(matches!(
            matrix_sqrt_psd(&diag(&[1.0, -1e-3])),
            Err(Error::NotPositive(_))
        ));
    }

    #[test]
    fn sqrt_rejects_non_hermitian() {
        let m = from_rows(2, 2, &[ONE, ONE, ZERO, ONE]).unwrap();
        assert!(matches!(matrix_sqrt_psd(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn eigenvalues_are_ascending() {
        let vals = hermitian_eigenvalues(&diag(&[3.0, -1.0, 2.0])).unwrap();
        assert_eq!(vals.len(), 3);
        assert!((vals[0] + 1.0).abs() < 1e-12 && (vals[2] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn serde_rows_round_trip() {
        let m = from_rows(2, 2, &[c(1.0, 0.5), c(0.0, -1.0), c(0.25, 0.0), ZERO]).unwrap();
        #[derive(serde::Serialize, serde::Deserialize)]
        struct W(#[serde(with = "serde_rows")] ComplexMatrix);
        let s = serde_json::to_string(&W(m.clone())).unwrap();
        assert_eq!(s, "[[[1.0,0.5],[0.0,-1.0]],[[0.25,0.0],[0.0,0.0]]]");
        let back: W = serde_json::from_str(&s).unwrap();
        assert_eq!(back.0, m);
    }
}
