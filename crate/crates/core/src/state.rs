//! State vectors, density matrices and outcome distributions.
//!
//! Basis convention: for an `n`-qubit register, qubit 0 is the most
//! significant bit of the basis index. `|q0 q1 … q(n-1)⟩` is therefore the
//! binary expansion of the index read left to right, and a bitstring label
//! such as `"1100"` is the same thing printed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, HermitianEigen, EIGEN_CLIP_TOL, STRUCTURE_TOL};
use num_complex::Complex64;

/// Largest register handled by the dense representations.
pub const MAX_QUBITS: usize = 6;

/// Normalisation tolerance for state vectors.
pub const NORM_TOL: f64 = 1e-10;

/// Trace tolerance for physical density matrices.
pub const TRACE_TOL: f64 = 1e-8;

pub(crate) fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(dim));
    }
    let n = dim.trailing_zeros() as usize;
    if n > MAX_QUBITS {
        return Err(Error::TooManyQubits(n));
    }
    Ok(n)
}

/// Bit position (from the least significant end) of `qubit` in an
/// `n`-qubit basis index.
#[inline]
pub(crate) fn bit_of(qubit: usize, num_qubits: usize) -> usize {
    num_qubits - 1 - qubit
}

pub(crate) fn check_qubits(qubits: &[usize], num_qubits: usize) -> Result<()> {
    let mut seen = 0u64;
    for &q in qubits {
        if q >= num_qubits {
            return Err(Error::QubitOutOfRange {
                index: q,
                num_qubits,
            });
        }
        if seen & (1 << q) != 0 {
            return Err(Error::DuplicateQubit(q));
        }
        seen |= 1 << q;
    }
    Ok(())
}

/// Extracts the bits of `index` at `qubits` (in the listed order) into a
/// compact index whose most significant bit is `qubits[0]`.
pub(crate) fn gather_bits(index: usize, qubits: &[usize], num_qubits: usize) -> usize {
    qubits.iter().fold(0, |acc, &q| {
        (acc << 1) | ((index >> bit_of(q, num_qubits)) & 1)
    })
}

/// Inverse of [`gather_bits`]: places the bits of `compact` at `qubits`.
pub(crate) fn scatter_bits(compact: usize, qubits: &[usize], num_qubits: usize) -> usize {
    let k = qubits.len();
    qubits.iter().enumerate().fold(0, |acc, (j, &q)| {
        let bit = (compact >> (k - 1 - j)) & 1;
        acc | (bit << bit_of(q, num_qubits))
    })
}

pub(crate) fn bitstring(value: usize, width: usize) -> String {
    (0..width)
        .map(|j| if (value >> (width - 1 - j)) & 1 == 1 { '1' } else { '0' })
        .collect()
}

pub(crate) fn parse_bitstring(s: &str) -> Option<usize> {
    if s.is_empty() || s.len() > usize::BITS as usize {
        return None;
    }
    s.chars().try_fold(0usize, |acc, ch| match ch {
        '0' => Some(acc << 1),
        '1' => Some((acc << 1) | 1),
        _ => None,
    })
}

/// A normalised pure state of `num_qubits` qubits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawState", into = "RawState")]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct RawState {
    amplitudes: Vec<Complex64>,
}

impl TryFrom<RawState> for StateVector {
    type Error = Error;
    fn try_from(raw: RawState) -> Result<Self> {
        StateVector::new(raw.amplitudes)
    }
}

impl From<StateVector> for RawState {
    fn from(s: StateVector) -> Self {
        RawState {
            amplitudes: s.amplitudes,
        }
    }
}

impl StateVector {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let num_qubits = qubits_for_dim(amplitudes.len())?;
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    /// Rescales arbitrary non-zero amplitudes to unit norm.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized(norm * norm));
        }
        Self::new(amplitudes.into_iter().map(|a| a / norm).collect())
    }

    pub fn zero(num_qubits: usize) -> Result<Self> {
        Self::basis(num_qubits, 0)
    }

    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        if num_qubits == 0 {
            return Err(Error::EmptyQubitSet);
        }
        if num_qubits > MAX_QUBITS {
            return Err(Error::TooManyQubits(num_qubits));
        }
        let dim = 1 << num_qubits;
        if index >= dim {
            return Err(Error::DimensionMismatch {
                left: index,
                right: dim,
            });
        }
        let mut amplitudes = vec![linalg::ZERO; dim];
        amplitudes[index] = linalg::ONE;
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    /// Computational basis state from a label such as `"1100"`.
    pub fn from_bits(bits: &str) -> Result<Self> {
        let index = parse_bitstring(bits)
            .ok_or_else(|| Error::InvalidParameter(format!("not a bitstring: {bits:?}")))?;
        Self::basis(bits.len(), index)
    }

    /// `alpha|0⟩ + beta|1⟩`, which must already be normalised.
    pub fn qubit(alpha: Complex64, beta: Complex64) -> Result<Self> {
        Self::new(vec![alpha, beta])
    }

    pub(crate) fn from_raw(num_qubits: usize, amplitudes: Vec<Complex64>) -> Self {
        debug_assert_eq!(amplitudes.len(), 1 << num_qubits);
        Self {
            num_qubits,
            amplitudes,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn to_density(&self) -> DensityMatrix {
        let v = nalgebra::DVector::from_column_slice(&self.amplitudes);
        DensityMatrix {
            num_qubits: self.num_qubits,
            matrix: &v * v.adjoint(),
            physical: true,
        }
    }

    /// Projects `qubit` onto `outcome` and renormalises the remaining
    /// qubits (kept in ascending order).
    pub fn condition_on(&self, qubit: usize, outcome: u8) -> Result<StateVector> {
        check_qubits(&[qubit], self.num_qubits)?;
        if self.num_qubits == 1 {
            return Err(Error::NothingLeft);
        }
        let rest: Vec<usize> = (0..self.num_qubits).filter(|&q| q != qubit).collect();
        let bit = bit_of(qubit, self.num_qubits);
        let mut out = vec![linalg::ZERO; 1 << rest.len()];
        for (i, a) in self.amplitudes.iter().enumerate() {
            if ((i >> bit) & 1) as u8 == outcome {
                out[gather_bits(i, &rest, self.num_qubits)] = *a;
            }
        }
        let p: f64 = out.iter().map(|a| a.norm_sqr()).sum();
        if p < 1e-12 {
            return Err(Error::ZeroProbabilityBranch(p));
        }
        StateVector::normalized(out)
    }
}

/// A density matrix over `num_qubits` qubits.
///
/// Construction checks Hermiticity. Positivity and unit trace are *recorded*
/// in the `physical` flag rather than enforced, so raw tomographic
/// reconstructions (which may have small negative eigenvalues) can be carried
/// through the metrics unchanged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrix {
    num_qubits: usize,
    #[serde(with = "linalg::serde_rows")]
    matrix: ComplexMatrix,
    physical: bool,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        let num_qubits = qubits_for_dim(matrix.nrows())?;
        let err = linalg::hermiticity_error(&matrix);
        if err > STRUCTURE_TOL {
            return Err(Error::NotHermitian(err));
        }
        let physical = Self::check_physical(&matrix)?;
        Ok(Self {
            num_qubits,
            matrix,
            physical,
        })
    }

    fn check_physical(matrix: &ComplexMatrix) -> Result<bool> {
        let tr = linalg::trace(matrix).re;
        if (tr - 1.0).abs() > TRACE_TOL {
            return Ok(false);
        }
        Ok(HermitianEigen::new(matrix)?.min() >= -EIGEN_CLIP_TOL)
    }

    pub fn from_diagonal(values: &[f64]) -> Result<Self> {
        let m = ComplexMatrix::from_fn(values.len(), values.len(), |r, c| {
            if r == c {
                linalg::c(values[r], 0.0)
            } else {
                linalg::ZERO
            }
        });
        Self::new(m)
    }

    pub fn maximally_mixed(num_qubits: usize) -> Result<Self> {
        let dim = 1usize << num_qubits;
        Self::from_diagonal(&vec![1.0 / dim as f64; dim])
    }

    /// Internal constructor for matrices that are Hermitian by construction.
    pub(crate) fn from_hermitian_unchecked(num_qubits: usize, matrix: ComplexMatrix, physical: bool) -> Self {
        Self {
            num_qubits,
            matrix,
            physical,
        }
    }

    pub(crate) fn recheck_physical(mut self) -> Result<Self> {
        self.physical = Self::check_physical(&self.matrix)?;
        Ok(self)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn is_physical(&self) -> bool {
        self.physical
    }

    pub fn trace(&self) -> f64 {
        linalg::trace(&self.matrix).re
    }

    /// `Tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        // Tr(ρ²) = Σ |ρ_ij|² for Hermitian ρ.
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        linalg::hermitian_eigenvalues(&self.matrix)
    }

    /// Diagonal in the computational basis (a quasi-distribution when the
    /// matrix is unphysical).
    pub fn diagonal(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().map(|z| z.re).collect()
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn expectation_of_state(&self, psi: &StateVector) -> Result<f64> {
        if psi.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: psi.dim(),
                right: self.dim(),
            });
        }
        let v = nalgebra::DVector::from_column_slice(psi.amplitudes());
        Ok((v.adjoint() * &self.matrix * &v)[(0, 0)].re)
    }

    /// Reduced state on `keep`, traced over every other qubit. The result
    /// orders the kept qubits ascending regardless of the order given.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        if keep.is_empty() {
            return Err(Error::EmptyQubitSet);
        }
        check_qubits(keep, self.num_qubits)?;
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        let traced: Vec<usize> = (0..self.num_qubits).filter(|q| !keep.contains(q)).collect();
        let n = self.num_qubits;
        let kd = 1 << keep.len();
        let td = 1 << traced.len();
        let mut out = ComplexMatrix::zeros(kd, kd);
        for r in 0..kd {
            let rb = scatter_bits(r, &keep, n);
            for c in 0..kd {
                let cb = scatter_bits(c, &keep, n);
                let mut acc = linalg::ZERO;
                for t in 0..td {
                    let tb = scatter_bits(t, &traced, n);
                    acc += self.matrix[(rb | tb, cb | tb)];
                }
                out[(r, c)] = acc;
            }
        }
        Ok(Self {
            num_qubits: keep.len(),
            matrix: out,
            physical: self.physical,
        })
    }

    /// The `⟨outcome|ρ|outcome⟩` block on `qubit`, over the remaining qubits
    /// in ascending order.
    ///
    /// Without renormalisation the block's trace is the outcome probability.
    /// With it, the block is divided by that probability; a probability below
    /// `1e-12` is then an error.
    pub fn condition_on(&self, qubit: usize, outcome: u8, renormalize: bool) -> Result<DensityMatrix> {
        check_qubits(&[qubit], self.num_qubits)?;
        if outcome > 1 {
            return Err(Error::InvalidParameter(format!("outcome must be 0 or 1, got {outcome}")));
        }
        if self.num_qubits == 1 {
            return Err(Error::NothingLeft);
        }
        let n = self.num_qubits;
        let rest: Vec<usize> = (0..n).filter(|&q| q != qubit).collect();
        let fixed = (outcome as usize) << bit_of(qubit, n);
        let d = 1 << rest.len();
        let mut out = ComplexMatrix::from_fn(d, d, |r, c| {
            self.matrix[(scatter_bits(r, &rest, n) | fixed, scatter_bits(c, &rest, n) | fixed)]
        });
        let p = linalg::trace(&out).re;
        if renormalize {
            if p < 1e-12 {
                return Err(Error::ZeroProbabilityBranch(p));
            }
            out /= linalg::c(p, 0.0);
            let conditioned = Self::from_hermitian_unchecked(rest.len(), out, true);
            return conditioned.recheck_physical();
        }
        Ok(Self {
            num_qubits: rest.len(),
            matrix: out,
            physical: false,
        })
    }
}

/// Functional form of [`DensityMatrix::partial_trace`].
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    rho.partial_trace(keep)
}

/// Functional form of [`DensityMatrix::condition_on`].
pub fn condition_on_ancilla(
    rho: &DensityMatrix,
    qubit: usize,
    outcome: u8,
    renormalize: bool,
) -> Result<DensityMatrix> {
    rho.condition_on(qubit, outcome, renormalize)
}

/// Composition of two registers, the left operand's qubits first.
///
/// Implemented for [`StateVector`] and [`DensityMatrix`]; mixing the two is
/// a type error.
pub trait TensorProduct: Sized {
    fn tensor(&self, other: &Self) -> Result<Self>;
}

impl TensorProduct for StateVector {
    fn tensor(&self, other: &Self) -> Result<Self> {
        let n = self.num_qubits + other.num_qubits;
        if n > MAX_QUBITS {
            return Err(Error::TooManyQubits(n));
        }
        let amps = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        Ok(Self::from_raw(n, amps))
    }
}

impl TensorProduct for DensityMatrix {
    fn tensor(&self, other: &Self) -> Result<Self> {
        let n = self.num_qubits + other.num_qubits;
        if n > MAX_QUBITS {
            return Err(Error::TooManyQubits(n));
        }
        Ok(Self {
            num_qubits: n,
            matrix: linalg::kron(&self.matrix, &other.matrix),
            physical: self.physical && other.physical,
        })
    }
}

pub fn tensor_product<T: TensorProduct>(a: &T, b: &T) -> Result<T> {
    a.tensor(b)
}

/// Outcome probabilities over `num_bits` measured bits, indexed by the
/// bitstring value (first measured qubit most significant).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityDistribution {
    num_bits: usize,
    probabilities: Vec<f64>,
}

/// Tolerance on `Σp = 1`.
pub const DISTRIBUTION_TOL: f64 = 1e-9;

impl ProbabilityDistribution {
    pub fn new(probabilities: Vec<f64>) -> Result<Self> {
        let len = probabilities.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::InvalidDistribution(format!(
                "{len} outcomes is not a power of two"
            )));
        }
        let mut probabilities = probabilities;
        for p in probabilities.iter_mut() {
            if !p.is_finite() || *p < -1e-12 {
                return Err(Error::InvalidDistribution(format!("negative probability {p}")));
            }
            // Round-off from exact simulation.
            *p = p.max(0.0);
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > DISTRIBUTION_TOL {
            return Err(Error::InvalidDistribution(format!("probabilities sum to {total}")));
        }
        Ok(Self {
            num_bits: len.trailing_zeros() as usize,
            probabilities,
        })
    }

    pub fn num_bits(&self) -> usize {
        self.num_bits
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn outcomes(&self) -> Vec<String> {
        (0..self.probabilities.len())
            .map(|i| bitstring(i, self.num_bits))
            .collect()
    }

    pub fn probability(&self, outcome: &str) -> Option<f64> {
        if outcome.len() != self.num_bits {
            return None;
        }
        parse_bitstring(outcome).map(|i| self.probabilities[i])
    }

    /// Applies independent bit flips with probability `flip` to every bit.
    pub fn with_readout_flips(&self, flip: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&flip) {
            return Err(Error::InvalidProbability {
                name: "readout_flip_prob",
                value: flip,
            });
        }
        let mut p = self.probabilities.clone();
        if flip == 0.0 {
            return Ok(self.clone());
        }
        for b in 0..self.num_bits {
            let mask = 1 << b;
            let prev = p.clone();
            for (x, px) in p.iter_mut().enumerate() {
                *px = (1.0 - flip) * prev[x] + flip * prev[x ^ mask];
            }
        }
        Ok(Self {
            num_bits: self.num_bits,
            probabilities: p,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    fn plus() -> StateVector {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        StateVector::qubit(c(h, 0.0), c(h, 0.0)).unwrap()
    }

    fn bell() -> DensityMatrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        StateVector::new(vec![c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)])
            .unwrap()
            .to_density()
    }

    fn assert_close(a: &DensityMatrix, b: &DensityMatrix) {
        assert_eq!(a.dim(), b.dim());
        let d = linalg::max_abs_diff(a.matrix(), b.matrix());
        assert!(d < 1e-12, "matrices differ by {d}");
    }

    #[test]
    fn tensor_of_zeros() {
        let z = StateVector::zero(1).unwrap();
        let zz = tensor_product(&z, &z).unwrap();
        assert_eq!(zz, StateVector::zero(2).unwrap());
    }

    #[test]
    fn tensor_of_projectors_orders_left_first() {
        let one = StateVector::from_bits("1").unwrap().to_density();
        let zero = StateVector::from_bits("0").unwrap().to_density();
        let rho = tensor_product(&one, &zero).unwrap();
        assert_close(&rho, &DensityMatrix::from_diagonal(&[0.0, 0.0, 1.0, 0.0]).unwrap());
    }

    #[test]
    fn tensor_plus_one() {
        let one = StateVector::from_bits("1").unwrap();
        let s = tensor_product(&plus(), &one).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let expected = [0.0, h, 0.0, h];
        for (a, e) in s.amplitudes().iter().zip(expected) {
            assert!((a - c(e, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn partial_trace_examples() {
        let zz = StateVector::from_bits("00").unwrap().to_density();
        assert_close(&zz.partial_trace(&[0]).unwrap(), &StateVector::from_bits("0").unwrap().to_density());

        let marginal = bell().partial_trace(&[0]).unwrap();
        assert_close(&marginal, &DensityMatrix::maximally_mixed(1).unwrap());

        let rho = StateVector::from_bits("1100").unwrap().to_density();
        assert_close(&rho.partial_trace(&[0]).unwrap(), &StateVector::from_bits("1").unwrap().to_density());
        assert_close(&rho.partial_trace(&[3]).unwrap(), &StateVector::from_bits("0").unwrap().to_density());
    }

    #[test]
    fn partial_trace_errors() {
        let rho = bell();
        assert_eq!(rho.partial_trace(&[]), Err(Error::EmptyQubitSet));
        assert!(matches!(rho.partial_trace(&[2]), Err(Error::QubitOutOfRange { .. })));
        assert_eq!(rho.partial_trace(&[1, 1]), Err(Error::DuplicateQubit(1)));
    }

    #[test]
    fn conditioning_examples() {
        let rho = StateVector::from_bits("01").unwrap().to_density();
        let out = rho.condition_on(1, 1, true).unwrap();
        assert_close(&out, &StateVector::from_bits("0").unwrap().to_density());

        let half = bell().condition_on(1, 1, false).unwrap();
        assert_close(&half, &DensityMatrix::new(ComplexMatrix::from_diagonal(
            &nalgebra::DVector::from_vec(vec![c(0.0, 0.0), c(0.5, 0.0)]),
        )).unwrap());
        assert!((half.trace() - 0.5).abs() < 1e-15);

        let zz = StateVector::from_bits("00").unwrap().to_density();
        assert!(matches!(zz.condition_on(1, 1, true), Err(Error::ZeroProbabilityBranch(_))));
    }

    #[test]
    fn state_conditioning_matches_density_conditioning() {
        let h = 0.5;
        let psi = StateVector::new(vec![c(h, 0.0), c(0.0, h), c(-h, 0.0), c(0.0, -h)]).unwrap();
        let a = psi.condition_on(0, 1).unwrap().to_density();
        let b = psi.to_density().condition_on(0, 1, true).unwrap();
        assert_close(&a, &b);
    }

    #[test]
    fn state_vector_validation() {
        assert!(matches!(StateVector::new(vec![c(1.0, 0.0), c(1.0, 0.0)]), Err(Error::NotNormalized(_))));
        assert!(matches!(StateVector::new(vec![c(1.0, 0.0); 3]), Err(Error::NotPowerOfTwo(3))));
        assert!(matches!(StateVector::zero(7), Err(Error::TooManyQubits(7))));
    }

    #[test]
    fn density_flags_unphysical_input() {
        let rho = DensityMatrix::from_diagonal(&[1.2, -0.2]).unwrap();
        assert!(!rho.is_physical());
        assert!(bell().is_physical());
        let non_herm = crate::linalg::from_rows(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!(matches!(DensityMatrix::new(non_herm), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn distribution_validation_and_flips() {
        assert!(ProbabilityDistribution::new(vec![0.5, 0.6]).is_err());
        assert!(ProbabilityDistribution::new(vec![1.5, -0.5]).is_err());
        let d = ProbabilityDistribution::new(vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        let f = d.with_readout_flips(0.1).unwrap();
        let expected = [0.81, 0.09, 0.09, 0.01];
        for (p, e) in f.probabilities().iter().zip(expected) {
            assert!((p - e).abs() < 1e-15);
        }
        assert_eq!(d.probability("00"), Some(1.0));
        assert_eq!(d.outcomes(), vec!["00", "01", "10", "11"]);
    }
}
