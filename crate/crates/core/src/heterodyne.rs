//! Heterodyne-style detection stage: an ancilla held in `|1⟩` controls a
//! `U3(ζ, 0, 0)` rotation on every system qubit just before read-out.
//! `ζ = 0` is the balanced setting (the stage acts as the identity) and
//! `ζ = π/2` the unbalanced one.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::angle::Angle;
use crate::circuit::{run_statevector, Circuit, Gate};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HeterodyneSetting {
    Balanced,
    Unbalanced,
    Custom(Angle),
}

impl HeterodyneSetting {
    /// Classifies `ζ`: exactly 0 is balanced, exactly π/2 unbalanced.
    pub fn from_zeta(zeta: Angle) -> Result<Self> {
        check_zeta(zeta)?;
        if zeta.value() == 0.0 {
            Ok(Self::Balanced)
        } else if zeta.approx_eq(std::f64::consts::FRAC_PI_2) {
            Ok(Self::Unbalanced)
        } else {
            Ok(Self::Custom(zeta))
        }
    }

    pub fn zeta(&self) -> Angle {
        match self {
            Self::Balanced => Angle::ZERO,
            Self::Unbalanced => Angle::pi_fraction(1, 2).expect("nonzero denominator"),
            Self::Custom(z) => *z,
        }
    }

    pub fn mode_name(&self) -> &'static str {
        match self {
            Self::Balanced => "balanced",
            Self::Unbalanced => "unbalanced",
            Self::Custom(_) => "custom",
        }
    }

    /// The setting used for the second copy group: balanced and unbalanced
    /// swap; a custom angle is kept.
    pub fn complement(&self) -> Self {
        match self {
            Self::Balanced => Self::Unbalanced,
            Self::Unbalanced => Self::Balanced,
            Self::Custom(z) => Self::Custom(*z),
        }
    }
}

fn check_zeta(zeta: Angle) -> Result<()> {
    let z = zeta.value();
    if !(-1e-12..=std::f64::consts::PI + 1e-12).contains(&z) {
        return Err(Error::InvalidAngle(format!("zeta {zeta} is outside [0, pi]")));
    }
    Ok(())
}

impl fmt::Display for HeterodyneSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (zeta={})", self.mode_name(), self.zeta())
    }
}

impl std::str::FromStr for HeterodyneSetting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "balanced" => Ok(Self::Balanced),
            "unbalanced" => Ok(Self::Unbalanced),
            other => Self::from_zeta(other.parse()?),
        }
    }
}

#[derive(Serialize)]
struct SettingOut {
    mode: &'static str,
    zeta: Angle,
}

impl Serialize for HeterodyneSetting {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SettingOut {
            mode: self.mode_name(),
            zeta: self.zeta(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for HeterodyneSetting {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct SettingIn {
            #[allow(dead_code)]
            mode: Option<String>,
            zeta: Angle,
        }
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
            Full(SettingIn),
        }
        let setting = match Raw::deserialize(d)? {
            Raw::Number(v) => Angle::radians(v).and_then(HeterodyneSetting::from_zeta),
            Raw::Text(t) => t.parse(),
            Raw::Full(s) => HeterodyneSetting::from_zeta(s.zeta),
        };
        setting.map_err(serde::de::Error::custom)
    }
}

/// Appends the detection stage to `circuit`: an X on the ancilla if it is
/// still in `|0⟩`, then `CU3(ζ, 0, 0)` from the ancilla onto each listed
/// system qubit.
pub fn heterodyne_stage(circuit: &Circuit, setting: HeterodyneSetting, system_qubits: &[usize]) -> Result<Circuit> {
    let anc = circuit.ancilla().ok_or(Error::NoAncilla)?;
    if system_qubits.is_empty() {
        return Err(Error::EmptyQubitSet);
    }
    if system_qubits.contains(&anc) {
        return Err(Error::InvalidParameter(format!("qubit {anc} is the ancilla, not a system qubit")));
    }
    let mut out = circuit.clone();
    let ancilla_one = {
        let psi = run_statevector(circuit)?;
        let bit = circuit.num_qubits() - 1 - anc;
        psi.probabilities()
            .iter()
            .enumerate()
            .filter(|(i, _)| (i >> bit) & 1 == 1)
            .map(|(_, p)| p)
            .sum::<f64>()
    };
    if ancilla_one < 1e-12 {
        out.push(Gate::x(anc))?;
    } else if ancilla_one < 1.0 - 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "ancilla must be in |0> or |1> before the detection stage (P(1) = {ancilla_one})"
        )));
    }
    let zeta = setting.zeta().value();
    for &q in system_qubits {
        out.cu3(anc, q, zeta, 0.0, 0.0)?;
    }
    Ok(out)
}
