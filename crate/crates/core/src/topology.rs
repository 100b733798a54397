//! Circuit layouts used by the protocols: single-mode estimation, the
//! four-mode witness circuit and the boson-sampling interferometer. Every
//! layout puts the system qubits first and the detection ancilla last.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angle::Angle;
use crate::circuit::{run_statevector, Circuit, Gate};
use crate::error::{Error, Result};
use crate::heterodyne::{heterodyne_stage, HeterodyneSetting};
use crate::state::StateVector;

/// Largest number of system modes in a multi-mode layout.
pub const MAX_MODES: usize = 4;

/// Three rotation angles of a `U3` gate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct U3Params {
    pub theta: Angle,
    pub phi: Angle,
    pub lambda: Angle,
}

impl U3Params {
    /// `U3(π/2, π/2, π/2)`, which takes `|0⟩` to `(|0⟩ + i|1⟩)/√2`.
    pub fn half_turn() -> Self {
        let q = Angle::pi_fraction(1, 2).expect("nonzero denominator");
        Self { theta: q, phi: q, lambda: q }
    }

    pub fn validate(&self) -> Result<()> {
        for a in [self.theta, self.phi, self.lambda] {
            if a.value().abs() > 2.0 * PI + 1e-12 {
                return Err(Error::InvalidAngle(format!("{a} is outside [-2pi, 2pi]")));
            }
        }
        Ok(())
    }

    pub fn gate(&self, target: usize) -> Gate {
        Gate::u3(target, self.theta.value(), self.phi.value(), self.lambda.value())
    }
}

/// Preparation of one system qubit from `|0⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QubitPrep {
    Zero,
    One,
    /// An explicit `U3` gate.
    U3(U3Params),
    /// `α|0⟩ + β|1⟩`, realised (up to global phase) by `U3(θ, φ, 0)`.
    Superposition { alpha: Complex64, beta: Complex64 },
}

impl QubitPrep {
    pub fn superposition(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let p = Self::Superposition { alpha, beta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Zero | Self::One => Ok(()),
            Self::U3(params) => params.validate(),
            Self::Superposition { alpha, beta } => {
                let norm = alpha.norm_sqr() + beta.norm_sqr();
                if !norm.is_finite() || (norm - 1.0).abs() > 1e-6 {
                    return Err(Error::NotNormalized(norm));
                }
                Ok(())
            }
        }
    }

    pub fn gates(&self, target: usize) -> Vec<Gate> {
        match self {
            Self::Zero => vec![],
            Self::One => vec![Gate::x(target)],
            Self::U3(params) => vec![params.gate(target)],
            Self::Superposition { alpha, beta } => {
                let theta = 2.0 * beta.norm().atan2(alpha.norm());
                let phi = if beta.norm() > 0.0 && alpha.norm() > 0.0 { beta.arg() - alpha.arg() } else { 0.0 };
                vec![Gate::u3(target, theta, phi, 0.0)]
            }
        }
    }

    /// The prepared single-qubit state.
    pub fn state(&self) -> Result<StateVector> {
        let mut c = Circuit::new(1, None)?;
        for g in self.gates(0) {
            c.push(g)?;
        }
        run_statevector(&c)
    }

    /// Number of Fock levels the state occupies: 1 for `|0⟩`, else 2.
    pub fn levels(&self) -> Result<usize> {
        let s = self.state()?;
        Ok(if s.amplitudes()[1].norm() < 1e-12 { 1 } else { 2 })
    }
}

/// Fock labels `|1⟩^{⊗n} ⊗ |0⟩^{⊗(m−n)}`.
pub fn fock_preps(photons: usize, modes: usize) -> Vec<QubitPrep> {
    (0..modes).map(|i| if i < photons { QubitPrep::One } else { QubitPrep::Zero }).collect()
}

/// Single-mode layout on `[system, ancilla]`: X on the ancilla, the system
/// preparation, then the detection stage.
pub fn single_mode_circuit(prep: &QubitPrep, setting: HeterodyneSetting) -> Result<Circuit> {
    prep.validate()?;
    let mut c = Circuit::new(2, Some(1))?;
    c.x(1)?;
    for g in prep.gates(0) {
        c.push(g)?;
    }
    heterodyne_stage(&c, setting, &[0])
}

/// Multi-mode layout: one preparation per system qubit, ancilla last.
pub fn multi_mode_circuit(preps: &[QubitPrep], setting: HeterodyneSetting) -> Result<Circuit> {
    let m = preps.len();
    if m == 0 || m > MAX_MODES {
        return Err(Error::InvalidModes { photons: 0, modes: m });
    }
    let mut c = Circuit::new(m + 1, Some(m))?;
    for (q, p) in preps.iter().enumerate() {
        p.validate()?;
        for g in p.gates(q) {
            c.push(g)?;
        }
    }
    heterodyne_stage(&c, setting, &(0..m).collect::<Vec<_>>())
}

/// Boson-sampling layout: X on the first `photons` modes, one `U3` per mode
/// standing in for the interferometer, then the detection stage.
pub fn boson_sampling_circuit(photons: usize, modes: usize, interferometer: &[U3Params], setting: HeterodyneSetting) -> Result<Circuit> {
    check_modes(photons, modes)?;
    if interferometer.len() != modes {
        return Err(Error::TargetCountMismatch {
            expected: modes,
            got: interferometer.len(),
        });
    }
    let mut c = Circuit::new(modes + 1, Some(modes))?;
    for q in 0..photons {
        c.x(q)?;
    }
    for (q, u) in interferometer.iter().enumerate() {
        u.validate()?;
        c.push(u.gate(q))?;
    }
    heterodyne_stage(&c, setting, &(0..modes).collect::<Vec<_>>())
}

pub fn check_modes(photons: usize, modes: usize) -> Result<()> {
    if photons == 0 || photons > modes || modes > MAX_MODES {
        return Err(Error::InvalidModes { photons, modes });
    }
    Ok(())
}

/// Ideal state of one system qubit after `gates` (acting on qubit 0) and the
/// detection rotation with the ancilla in `|1⟩`.
pub fn detected_qubit_state(gates: &[Gate], setting: HeterodyneSetting) -> Result<StateVector> {
    let mut c = Circuit::new(1, None)?;
    for g in gates {
        c.push(*g)?;
    }
    c.u3(0, setting.zeta().value(), 0.0, 0.0)?;
    run_statevector(&c)
}
