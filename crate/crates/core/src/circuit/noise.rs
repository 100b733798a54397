use serde::{Deserialize, Serialize};

use super::{conjugate, standard, Gate};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

/// Gate-level depolarizing noise plus symmetric readout error.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseModel {
    pub depolarizing_prob_1q: f64,
    pub depolarizing_prob_2q: f64,
    pub readout_flip_prob: f64,
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        Self::default()
    }

    /// The same depolarizing probability after every gate.
    pub fn depolarizing(p: f64) -> Self {
        Self {
            depolarizing_prob_1q: p,
            depolarizing_prob_2q: p,
            readout_flip_prob: 0.0,
        }
    }

    pub fn is_noiseless(&self) -> bool {
        *self == Self::default()
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("depolarizing_prob_1q", self.depolarizing_prob_1q),
            ("depolarizing_prob_2q", self.depolarizing_prob_2q),
            ("readout_flip_prob", self.readout_flip_prob),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::InvalidProbability { name, value });
            }
        }
        Ok(())
    }
}

/// Pauli operator on one qubit as a gate sequence (global phases drop out
/// of `P ρ P†`).
fn pauli_gates(letter: u8, q: usize) -> Vec<Gate> {
    match letter {
        0 => vec![],
        1 => vec![Gate::x(q)],
        2 => vec![standard::z(q), Gate::x(q)],
        _ => vec![standard::z(q)],
    }
}

/// Depolarizing channel on `qubits`:
/// `ρ ← (1 − p) ρ + p · (I/2^k ⊗ Tr_qubits ρ)`,
/// evaluated as the Pauli-twirl Kraus sum with weight `1 − p + p/4^k` on the
/// identity and `p/4^k` on each of the other `4^k − 1` Pauli strings.
pub(crate) fn depolarize(rho: &mut ComplexMatrix, qubits: &[usize], p: f64, num_qubits: usize) {
    let k = qubits.len() as u32;
    let count = 4usize.pow(k);
    let w = p / count as f64;
    let mut acc = rho.map(|z| z * (1.0 - p + w));
    for idx in 1..count {
        let mut term = rho.clone();
        for (j, &q) in qubits.iter().enumerate() {
            let letter = ((idx >> (2 * j)) & 3) as u8;
            for g in pauli_gates(letter, q) {
                conjugate(&mut term, &g, num_qubits);
            }
        }
        acc += term.map(|z| z * w);
    }
    *rho = acc;
}
