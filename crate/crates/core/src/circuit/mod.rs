//! Gate-level circuits and their exact simulation.
//!
//! The gate set is deliberately tiny: `X`, the three-parameter `U3`
//! rotation, and its controlled form `CU3`. Every circuit this crate needs is
//! built from those.

mod measure;
mod noise;

pub use measure::{measure_in_basis, sample_shots, Basis, Measurable, ShotTable};
pub use noise::NoiseModel;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, ComplexMatrix};
use crate::state::{bit_of, check_qubits, DensityMatrix, StateVector, MAX_QUBITS};

/// A 2x2 matrix in row-major order.
pub type Mat2 = [[Complex64; 2]; 2];

/// `U3(θ, φ, λ) = [[cos(θ/2), −e^{iλ} sin(θ/2)], [e^{iφ} sin(θ/2), e^{i(φ+λ)} cos(θ/2)]]`.
pub fn u3(theta: f64, phi: f64, lambda: f64) -> Mat2 {
    let (s, co) = (theta / 2.0).sin_cos();
    [
        [c(co, 0.0), -Complex64::from_polar(s, lambda)],
        [Complex64::from_polar(s, phi), Complex64::from_polar(co, phi + lambda)],
    ]
}

/// [`u3`] as a dense matrix.
pub fn u3_matrix(theta: f64, phi: f64, lambda: f64) -> ComplexMatrix {
    mat2_to_matrix(&u3(theta, phi, lambda))
}

pub(crate) fn mat2_to_matrix(m: &Mat2) -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[m[0][0], m[0][1], m[1][0], m[1][1]])
}

const X_MAT: Mat2 = [[linalg::ZERO, linalg::ONE], [linalg::ONE, linalg::ZERO]];

/// Named rotations used for basis changes and the QKD frames.
pub mod standard {
    use super::*;

    pub fn hadamard(target: usize) -> Gate {
        Gate::U3 { target, theta: PI / 2.0, phi: 0.0, lambda: PI }
    }

    /// Phase gate `S = diag(1, i)`.
    pub fn s(target: usize) -> Gate {
        Gate::U3 { target, theta: 0.0, phi: 0.0, lambda: PI / 2.0 }
    }

    pub fn s_dagger(target: usize) -> Gate {
        Gate::U3 { target, theta: 0.0, phi: 0.0, lambda: -PI / 2.0 }
    }

    pub fn z(target: usize) -> Gate {
        Gate::U3 { target, theta: 0.0, phi: 0.0, lambda: PI }
    }

    /// CNOT as a controlled `U3(π, 0, π)`.
    pub fn cnot(control: usize, target: usize) -> Gate {
        Gate::CU3 { control, target, theta: PI, phi: 0.0, lambda: PI }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GateSpec", into = "GateSpec")]
pub enum Gate {
    X { target: usize },
    U3 { target: usize, theta: f64, phi: f64, lambda: f64 },
    CU3 { control: usize, target: usize, theta: f64, phi: f64, lambda: f64 },
}

impl Gate {
    pub fn x(target: usize) -> Self {
        Gate::X { target }
    }

    pub fn u3(target: usize, theta: f64, phi: f64, lambda: f64) -> Self {
        Gate::U3 { target, theta, phi, lambda }
    }

    pub fn cu3(control: usize, target: usize, theta: f64, phi: f64, lambda: f64) -> Self {
        Gate::CU3 { control, target, theta, phi, lambda }
    }

    pub fn target(&self) -> usize {
        match *self {
            Gate::X { target } | Gate::U3 { target, .. } | Gate::CU3 { target, .. } => target,
        }
    }

    /// Qubits the gate touches, control first.
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::X { target } | Gate::U3 { target, .. } => vec![target],
            Gate::CU3 { control, target, .. } => vec![control, target],
        }
    }

    /// The single-qubit block applied to the target.
    pub fn block(&self) -> Mat2 {
        match *self {
            Gate::X { .. } => X_MAT,
            Gate::U3 { theta, phi, lambda, .. } | Gate::CU3 { theta, phi, lambda, .. } => {
                u3(theta, phi, lambda)
            }
        }
    }

    /// Inverse gate: `U3(θ, φ, λ)† = U3(−θ, −λ, −φ)`.
    pub fn inverse(&self) -> Gate {
        match *self {
            Gate::X { target } => Gate::X { target },
            Gate::U3 { target, theta, phi, lambda } => Gate::U3 {
                target,
                theta: -theta,
                phi: -lambda,
                lambda: -phi,
            },
            Gate::CU3 { control, target, theta, phi, lambda } => Gate::CU3 {
                control,
                target,
                theta: -theta,
                phi: -lambda,
                lambda: -phi,
            },
        }
    }

    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        check_qubits(&self.qubits(), num_qubits).map_err(|e| match e {
            Error::DuplicateQubit(q) => Error::InvalidGate(format!("control and target are both qubit {q}")),
            other => other,
        })?;
        if let Gate::U3 { theta, phi, lambda, .. } | Gate::CU3 { theta, phi, lambda, .. } = *self {
            if ![theta, phi, lambda].iter().all(|a| a.is_finite()) {
                return Err(Error::InvalidGate(format!("non-finite angle in {self:?}")));
            }
        }
        Ok(())
    }

    /// Applies the gate in place to a `2^n` amplitude vector (no validation).
    pub(crate) fn apply_to(&self, amps: &mut [Complex64], num_qubits: usize) {
        let m = self.block();
        let tmask = 1usize << bit_of(self.target(), num_qubits);
        let cmask = match *self {
            Gate::CU3 { control, .. } => 1usize << bit_of(control, num_qubits),
            _ => 0,
        };
        for i in 0..amps.len() {
            if i & tmask != 0 || i & cmask != cmask {
                continue;
            }
            let j = i | tmask;
            let (a0, a1) = (amps[i], amps[j]);
            amps[i] = m[0][0] * a0 + m[0][1] * a1;
            amps[j] = m[1][0] * a0 + m[1][1] * a1;
        }
    }

    /// The gate's full `2^n x 2^n` unitary.
    pub fn full_matrix(&self, num_qubits: usize) -> Result<ComplexMatrix> {
        self.validate(num_qubits)?;
        let dim = 1 << num_qubits;
        let mut u = ComplexMatrix::identity(dim, dim);
        for mut col in u.column_iter_mut() {
            self.apply_to(col.as_mut_slice(), num_qubits);
        }
        Ok(u)
    }
}

/// JSON shape of a gate: `{"kind": "cu3", "qubits": [4, 0], "angles": [θ, φ, λ]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GateSpec {
    kind: String,
    qubits: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    angles: Vec<f64>,
}

impl TryFrom<GateSpec> for Gate {
    type Error = Error;
    fn try_from(spec: GateSpec) -> Result<Self> {
        let bad = |why: &str| Error::InvalidGate(format!("{} gate: {why}", spec.kind));
        match (spec.kind.to_ascii_lowercase().as_str(), spec.qubits.as_slice(), spec.angles.as_slice()) {
            ("x", [t], []) => Ok(Gate::x(*t)),
            ("u3", [t], [a, b, l]) => Ok(Gate::u3(*t, *a, *b, *l)),
            ("cu3", [ctl, t], [a, b, l]) => Ok(Gate::cu3(*ctl, *t, *a, *b, *l)),
            ("x" | "u3" | "cu3", _, _) => Err(bad("wrong number of qubits or angles")),
            _ => Err(bad("unknown kind")),
        }
    }
}

impl From<Gate> for GateSpec {
    fn from(g: Gate) -> Self {
        match g {
            Gate::X { target } => GateSpec { kind: "x".into(), qubits: vec![target], angles: vec![] },
            Gate::U3 { target, theta, phi, lambda } => GateSpec {
                kind: "u3".into(),
                qubits: vec![target],
                angles: vec![theta, phi, lambda],
            },
            Gate::CU3 { control, target, theta, phi, lambda } => GateSpec {
                kind: "cu3".into(),
                qubits: vec![control, target],
                angles: vec![theta, phi, lambda],
            },
        }
    }
}

/// An ordered gate list over `num_qubits` qubits, optionally with one qubit
/// set aside as the heterodyne ancilla.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCircuit", into = "RawCircuit")]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<Gate>,
    ancilla: Option<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCircuit {
    num_qubits: usize,
    gates: Vec<Gate>,
    #[serde(default)]
    ancilla: Option<usize>,
}

impl TryFrom<RawCircuit> for Circuit {
    type Error = Error;
    fn try_from(raw: RawCircuit) -> Result<Self> {
        let mut c = Circuit::new(raw.num_qubits, raw.ancilla)?;
        for g in raw.gates {
            c.push(g)?;
        }
        Ok(c)
    }
}

impl From<Circuit> for RawCircuit {
    fn from(c: Circuit) -> Self {
        RawCircuit {
            num_qubits: c.num_qubits,
            gates: c.gates,
            ancilla: c.ancilla,
        }
    }
}

impl Circuit {
    pub fn new(num_qubits: usize, ancilla: Option<usize>) -> Result<Self> {
        if num_qubits == 0 {
            return Err(Error::EmptyQubitSet);
        }
        if num_qubits > MAX_QUBITS {
            return Err(Error::TooManyQubits(num_qubits));
        }
        if let Some(a) = ancilla {
            check_qubits(&[a], num_qubits)?;
        }
        Ok(Self {
            num_qubits,
            gates: Vec::new(),
            ancilla,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn push(&mut self, gate: Gate) -> Result<&mut Self> {
        gate.validate(self.num_qubits)?;
        self.gates.push(gate);
        Ok(self)
    }

    pub fn x(&mut self, target: usize) -> Result<&mut Self> {
        self.push(Gate::x(target))
    }

    pub fn u3(&mut self, target: usize, theta: f64, phi: f64, lambda: f64) -> Result<&mut Self> {
        self.push(Gate::u3(target, theta, phi, lambda))
    }

    pub fn cu3(&mut self, control: usize, target: usize, theta: f64, phi: f64, lambda: f64) -> Result<&mut Self> {
        self.push(Gate::cu3(control, target, theta, phi, lambda))
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn ancilla(&self) -> Option<usize> {
        self.ancilla
    }

    /// Qubits other than the ancilla, ascending.
    pub fn system_qubits(&self) -> Vec<usize> {
        (0..self.num_qubits).filter(|&q| Some(q) != self.ancilla).collect()
    }
}

/// Applies one gate to a state vector.
pub fn apply_gate(state: &StateVector, gate: &Gate) -> Result<StateVector> {
    gate.validate(state.num_qubits())?;
    let mut out = state.clone();
    gate.apply_to(out.amplitudes_mut(), state.num_qubits());
    Ok(out)
}

/// Runs the circuit from `|0…0⟩`.
pub fn run_statevector(circuit: &Circuit) -> Result<StateVector> {
    let n = circuit.num_qubits();
    let mut state = StateVector::zero(n)?;
    for g in circuit.gates() {
        g.apply_to(state.amplitudes_mut(), n);
    }
    Ok(state)
}

/// `ρ ← U ρ U†` for a single gate.
pub(crate) fn conjugate(rho: &mut ComplexMatrix, gate: &Gate, num_qubits: usize) {
    for mut col in rho.column_iter_mut() {
        gate.apply_to(col.as_mut_slice(), num_qubits);
    }
    // (U (Uρ)†)† = U ρ U†
    let mut t = rho.adjoint();
    for mut col in t.column_iter_mut() {
        gate.apply_to(col.as_mut_slice(), num_qubits);
    }
    *rho = t.adjoint();
}

/// Runs the circuit on a density matrix from `|0…0⟩⟨0…0|`, applying
/// depolarizing noise on each gate's qubits after the gate.
///
/// Readout error is not part of the state; it is applied when sampling.
pub fn run_density_matrix(circuit: &Circuit, noise: &NoiseModel) -> Result<DensityMatrix> {
    noise.validate()?;
    let n = circuit.num_qubits();
    let mut rho = StateVector::zero(n)?.to_density().matrix().clone();
    for g in circuit.gates() {
        conjugate(&mut rho, g, n);
        let p = match g {
            Gate::CU3 { .. } => noise.depolarizing_prob_2q,
            _ => noise.depolarizing_prob_1q,
        };
        if p > 0.0 {
            noise::depolarize(&mut rho, &g.qubits(), p, n);
        }
    }
    DensityMatrix::from_hermitian_unchecked(n, symmetrise(rho), true).recheck_physical()
}

fn symmetrise(m: ComplexMatrix) -> ComplexMatrix {
    (&m + m.adjoint()).map(|z| z * 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{is_unitary, max_abs_diff, I};
    use std::f64::consts::FRAC_1_SQRT_2 as H;

    fn approx(a: &ComplexMatrix, b: &ComplexMatrix) -> bool {
        max_abs_diff(a, b) < 1e-12
    }

    #[test]
    fn u3_special_cases() {
        assert!(approx(&u3_matrix(0.0, 0.0, 0.0), &ComplexMatrix::identity(2, 2)));
        assert!(approx(&u3_matrix(PI, 0.0, PI), &mat2_to_matrix(&X_MAT)));
        let h = linalg::from_rows(2, 2, &[c(H, 0.0), c(H, 0.0), c(H, 0.0), c(-H, 0.0)]).unwrap();
        assert!(approx(&u3_matrix(PI / 2.0, 0.0, PI), &h));
        // Direct evaluation of the definition at θ = φ = λ = π/2.
        let y = linalg::from_rows(2, 2, &[c(H, 0.0), -I * H, I * H, c(-H, 0.0)]).unwrap();
        assert!(approx(&u3_matrix(PI / 2.0, PI / 2.0, PI / 2.0), &y));
    }

    #[test]
    fn gates_are_unitary() {
        let gates = [
            Gate::x(0),
            Gate::u3(1, 0.3, -1.2, 2.5),
            Gate::cu3(2, 0, 1.1, 0.4, -0.7),
            standard::cnot(0, 2),
        ];
        for g in gates {
            assert!(is_unitary(&g.full_matrix(3).unwrap()), "{g:?}");
            let prod = g.full_matrix(3).unwrap() * g.inverse().full_matrix(3).unwrap();
            assert!(approx(&prod, &ComplexMatrix::identity(8, 8)), "{g:?}");
        }
    }

    #[test]
    fn apply_gate_examples() {
        let one = apply_gate(&StateVector::zero(1).unwrap(), &Gate::x(0)).unwrap();
        assert_eq!(one, StateVector::from_bits("1").unwrap());

        let cx = Gate::cu3(0, 1, PI, 0.0, PI);
        let fired = apply_gate(&StateVector::from_bits("10").unwrap(), &cx).unwrap();
        assert!((fired.amplitudes()[3] - linalg::ONE).norm() < 1e-12);
        let idle = apply_gate(&StateVector::from_bits("00").unwrap(), &cx).unwrap();
        assert!((idle.amplitudes()[0] - linalg::ONE).norm() < 1e-12);

        assert!(matches!(apply_gate(&idle, &Gate::x(2)), Err(Error::QubitOutOfRange { .. })));
    }

    #[test]
    fn gate_validation() {
        let mut c = Circuit::new(2, None).unwrap();
        assert!(matches!(c.cu3(1, 1, 0.0, 0.0, 0.0), Err(Error::InvalidGate(_))));
        assert!(matches!(c.u3(0, f64::NAN, 0.0, 0.0), Err(Error::InvalidGate(_))));
        assert!(matches!(Circuit::new(2, Some(2)), Err(Error::QubitOutOfRange { .. })));
    }

    #[test]
    fn run_statevector_prefix_and_empty() {
        let mut c = Circuit::new(5, Some(4)).unwrap();
        c.x(0).unwrap().x(1).unwrap();
        assert_eq!(run_statevector(&c).unwrap(), StateVector::from_bits("11000").unwrap());
        let empty = Circuit::new(2, None).unwrap();
        assert_eq!(run_statevector(&empty).unwrap(), StateVector::zero(2).unwrap());
    }

    #[test]
    fn prepared_superposition_through_heterodyne_rotation() {
        // q0 = system, q1 = ancilla in |1⟩ controlling U3(π/2, 0, 0).
        let mut circ = Circuit::new(2, Some(1)).unwrap();
        circ.x(1).unwrap()
            .u3(0, PI / 2.0, PI / 2.0, PI / 2.0).unwrap()
            .cu3(1, 0, PI / 2.0, 0.0, 0.0).unwrap();
        let psi = run_statevector(&circ).unwrap();
        // By hand: U3(π/2,π/2,π/2)|0⟩ = (1, i)/√2, then [[1,-1],[1,1]]/√2 gives ((1-i)/2, (1+i)/2).
        let expected = [linalg::ZERO, c(0.5, -0.5), linalg::ZERO, c(0.5, 0.5)];
        for (a, e) in psi.amplitudes().iter().zip(expected) {
            assert!((a - e).norm() < 1e-12);
        }
    }

    #[test]
    fn noiseless_density_run_matches_statevector() {
        let mut c = Circuit::new(3, Some(2)).unwrap();
        c.x(2).unwrap().u3(0, 0.7, 0.1, -0.4).unwrap().cu3(2, 1, 1.3, 0.2, 0.9).unwrap().push(standard::cnot(0, 1)).unwrap();
        let rho = run_density_matrix(&c, &NoiseModel::default()).unwrap();
        let psi = run_statevector(&c).unwrap().to_density();
        assert!(max_abs_diff(rho.matrix(), psi.matrix()) < 1e-10);
        assert!((rho.purity() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn circuit_json_round_trip_and_schema() {
        let mut c = Circuit::new(2, Some(1)).unwrap();
        c.x(1).unwrap().cu3(1, 0, 0.5, 0.0, 0.0).unwrap();
        let text = c.to_json().unwrap();
        assert_eq!(Circuit::from_json(&text).unwrap(), c);
        let parsed = Circuit::from_json(
            r#"{"num_qubits": 2, "gates": [{"kind": "X", "qubits": [1]}, {"kind": "u3", "qubits": [0], "angles": [1, 0, 0]}], "ancilla": 1}"#,
        )
        .unwrap();
        assert_eq!(parsed.gates().len(), 2);
        assert!(Circuit::from_json(r#"{"num_qubits": 1, "gates": [{"kind": "cu3", "qubits": [0], "angles": [1,0,0]}]}"#).is_err());
        assert!(Circuit::from_json(r#"{"num_qubits": 1, "gates": [{"kind": "x", "qubits": [3]}]}"#).is_err());
    }
}
