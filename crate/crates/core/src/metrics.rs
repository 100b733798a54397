//! Distances between states and between outcome distributions.
//!
//! Fidelity is the square-root (Uhlmann) form `F(a, b) = Tr √(√a b √a)`, so
//! for a pure target `b = |σ⟩⟨σ|` it reduces to `√⟨σ|a|σ⟩`. It is *not*
//! clamped: a raw tomographic reconstruction with negative eigenvalues can
//! produce `F > 1`, and callers who want a physical answer should run
//! [`project_to_physical`] first.

use crate::error::{Error, Result};
use crate::linalg::{self, HermitianEigen, EIGEN_CLIP_TOL};
use crate::state::{DensityMatrix, ProbabilityDistribution};

fn same_dim(a: &DensityMatrix, b: &DensityMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(())
}

fn is_psd(rho: &DensityMatrix) -> Result<bool> {
    if rho.is_physical() {
        return Ok(true);
    }
    Ok(HermitianEigen::new(rho.matrix())?.min() >= -EIGEN_CLIP_TOL)
}

/// Square-root fidelity `Tr √(√a b √a)`.
///
/// The square root is taken of whichever argument is positive semidefinite
/// (the target `b` first, then `a`): `√b a √b` has the same spectrum as
/// `√a b √a` when both are physical, and it stays well defined when only the
/// target is. Eigenvalues of the sandwich that are negative or below its
/// numerical rank tolerance are dropped before the square root.
pub fn fidelity(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    same_dim(a, b)?;
    let (outer, inner) = if is_psd(b)? {
        (b, a)
    } else if is_psd(a)? {
        (a, b)
    } else {
        let min = HermitianEigen::new(b.matrix())?.min();
        return Err(Error::NotPositive(min));
    };
    let root = linalg::matrix_sqrt_psd(outer.matrix())?;
    let sandwich = &root * inner.matrix() * &root;
    let values = linalg::hermitian_eigenvalues(&sandwich)?;
    let tol = linalg::rank_tol(&values);
    // fold from +0.0: an empty float sum is -0.0.
    Ok(values.iter().filter(|&&l| l > tol).fold(0.0, |acc, l| acc + l.sqrt()))
}

/// `½ Σ |λ_i(ρ − σ)|`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    same_dim(rho, sigma)?;
    let diff = rho.matrix() - sigma.matrix();
    let values = linalg::hermitian_eigenvalues(&diff)?;
    Ok(0.5 * values.iter().map(|l| l.abs()).sum::<f64>())
}

/// `½ Σ_x |p(x) − q(x)|`.
pub fn total_variation_distance(p: &ProbabilityDistribution, q: &ProbabilityDistribution) -> Result<f64> {
    if p.num_bits() != q.num_bits() {
        return Err(Error::OutcomeMismatch {
            left: p.num_bits(),
            right: q.num_bits(),
        });
    }
    Ok(0.5
        * p.probabilities()
            .iter()
            .zip(q.probabilities())
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>())
}

/// Total variation distance between the computational-basis outcome
/// distributions of two states.
///
/// Works directly on the diagonals, so an unphysical reconstruction (whose
/// diagonal may dip below zero) still gets a number, and that number never
/// exceeds the trace distance.
pub fn computational_tvd(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    same_dim(rho, sigma)?;
    Ok(0.5
        * rho
            .diagonal()
            .iter()
            .zip(sigma.diagonal())
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>())
}

/// Projects eigenvalues onto the probability simplex: the closest (in
/// Frobenius norm) unit-trace PSD matrix sharing `a`'s eigenvectors.
///
/// Negative eigenvalues are zeroed and the excess trace is taken evenly from
/// the surviving ones; an already physical input comes back unchanged.
pub fn project_to_physical(a: &DensityMatrix) -> Result<DensityMatrix> {
    let eig = HermitianEigen::new(a.matrix())?;
    let projected = project_onto_simplex(&eig.values);
    DensityMatrix::new(symmetrise(eig.with_values(&projected)))
}

fn symmetrise(m: linalg::ComplexMatrix) -> linalg::ComplexMatrix {
    (&m + m.adjoint()).map(|z| z * 0.5)
}

/// Euclidean projection of `values` onto `{x : x_i >= 0, Σ x_i = 1}`.
pub(crate) fn project_onto_simplex(values: &[f64]) -> Vec<f64> {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut shift = 0.0;
    for (j, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let candidate = (cumulative - 1.0) / (j + 1) as f64;
        if u - candidate > 0.0 {
            shift = candidate;
        }
    }
    values.iter().map(|&v| (v - shift).max(0.0)).collect()
}
