//! Encoding/decoding basis tables for key distribution.
//!
//! A qubit starts in a computational state, is encoded in one basis and
//! decoded in another, optionally passes the heterodyne detection stage, and
//! is reconstructed by tomography. The score is the fidelity with the initial
//! state: matched bases return it exactly (before detection), mismatched
//! bases scramble it.

use std::fmt;
use std::io;
use std::str::FromStr;

use indexmap::IndexMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::angle::Angle;
use crate::circuit::{standard, Circuit, Gate};
use crate::error::{Error, Result};
use crate::heterodyne::{heterodyne_stage, HeterodyneSetting};
use crate::metrics::fidelity;
use crate::protocols::Verdict;
use crate::rng::derive_seed;
use crate::state::StateVector;
use crate::tomography::{reconstruct_multi_qubit, reconstruct_single_qubit, tomography_sweep, SweepOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SingleBasis {
    Z,
    X,
    Y,
}

impl SingleBasis {
    /// Table row order: z, x, y.
    pub const ALL: [SingleBasis; 3] = [SingleBasis::Z, SingleBasis::X, SingleBasis::Y];

    pub fn label(self) -> &'static str {
        match self {
            Self::Z => "z",
            Self::X => "x",
            Self::Y => "y",
        }
    }

    /// z: identity; x: Hadamard; y: Hadamard then S, taking `|0⟩` to
    /// `(|0⟩ + i|1⟩)/√2`.
    pub fn encoder(self, q: usize) -> Vec<Gate> {
        match self {
            Self::Z => vec![],
            Self::X => vec![standard::hadamard(q)],
            Self::Y => vec![standard::hadamard(q), standard::s(q)],
        }
    }

    pub fn decoder(self, q: usize) -> Vec<Gate> {
        invert(&self.encoder(q))
    }
}

impl FromStr for SingleBasis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "z" => Ok(Self::Z),
            "x" => Ok(Self::X),
            "y" => Ok(Self::Y),
            _ => Err(Error::InvalidParameter(format!("unknown basis {s:?} (expected x, y or z)"))),
        }
    }
}

/// Bell basis `β_ab`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BellBasis {
    B00,
    B01,
    B10,
    B11,
}

impl BellBasis {
    pub const ALL: [BellBasis; 4] = [BellBasis::B00, BellBasis::B01, BellBasis::B10, BellBasis::B11];

    pub fn label(self) -> &'static str {
        match self {
            Self::B00 => "b00",
            Self::B01 => "b01",
            Self::B10 => "b10",
            Self::B11 => "b11",
        }
    }

    fn bits(self) -> (bool, bool) {
        match self {
            Self::B00 => (false, false),
            Self::B01 => (false, true),
            Self::B10 => (true, false),
            Self::B11 => (true, true),
        }
    }

    /// Hadamard on `q0`, CNOT `q0 → q1`, then `Z^a` on `q0` and `X^b` on `q1`.
    pub fn encoder(self, q0: usize, q1: usize) -> Vec<Gate> {
        let (a, b) = self.bits();
        let mut g = vec![standard::hadamard(q0), standard::cnot(q0, q1)];
        if a {
            g.push(standard::z(q0));
        }
        if b {
            g.push(Gate::x(q1));
        }
        g
    }

    pub fn decoder(self, q0: usize, q1: usize) -> Vec<Gate> {
        invert(&self.encoder(q0, q1))
    }
}

impl FromStr for BellBasis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        let digits = t
            .strip_prefix("beta")
            .or_else(|| t.strip_prefix('β'))
            .or_else(|| t.strip_prefix('b'))
            .unwrap_or(&t);
        match digits {
            "00" => Ok(Self::B00),
            "01" => Ok(Self::B01),
            "10" => Ok(Self::B10),
            "11" => Ok(Self::B11),
            _ => Err(Error::InvalidParameter(format!("unknown Bell basis {s:?} (expected b00, b01, b10 or b11)"))),
        }
    }
}

fn invert(gates: &[Gate]) -> Vec<Gate> {
    gates.iter().rev().map(Gate::inverse).collect()
}

/// Plain tomography, or tomography after detection at angle `ζ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QkdMode {
    Simple,
    Heterodyne(Angle),
}

impl QkdMode {
    pub fn heterodyne(zeta: &str) -> Result<Self> {
        let a: Angle = zeta.parse()?;
        HeterodyneSetting::from_zeta(a)?;
        Ok(Self::Heterodyne(a))
    }

    /// The three table columns: ζ = π/3, ζ = π/2 and simple.
    pub fn standard_columns() -> Vec<QkdMode> {
        vec![
            Self::Heterodyne(Angle::pi_fraction(1, 3).expect("nonzero")),
            Self::Heterodyne(Angle::pi_fraction(1, 2).expect("nonzero")),
            Self::Simple,
        ]
    }

    fn setting(&self) -> Result<Option<HeterodyneSetting>> {
        match self {
            Self::Simple => Ok(None),
            Self::Heterodyne(z) => HeterodyneSetting::from_zeta(*z).map(Some),
        }
    }

    fn is_third(&self) -> bool {
        matches!(self, Self::Heterodyne(z) if z.approx_eq(std::f64::consts::FRAC_PI_3))
    }
}

impl fmt::Display for QkdMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Simple => write!(f, "simple"),
            Self::Heterodyne(z) => write!(f, "zeta={z}"),
        }
    }
}

impl FromStr for QkdMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        if t == "simple" {
            return Ok(Self::Simple);
        }
        Self::heterodyne(t.strip_prefix("zeta=").unwrap_or(&t))
    }
}

impl Serialize for QkdMode {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for QkdMode {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

fn score(circuit: &Circuit, system: &[usize], target: &StateVector, opts: &SweepOptions) -> Result<f64> {
    let ex = tomography_sweep(circuit, system, opts)?;
    let a = if system.len() == 1 { reconstruct_single_qubit(&ex)? } else { reconstruct_multi_qubit(&ex)? };
    fidelity(&a, &target.to_density())
}

fn check_initial(initial: u8) -> Result<()> {
    if initial > 1 {
        return Err(Error::InvalidParameter(format!("initial state must be 0 or 1, got {initial}")));
    }
    Ok(())
}

/// Single-qubit layout: system qubit 0 (and ancilla 1 in heterodyne mode).
pub fn qkd_single_circuit(initial: u8, encode: SingleBasis, decode: SingleBasis, mode: QkdMode) -> Result<Circuit> {
    check_initial(initial)?;
    let setting = mode.setting()?;
    let mut c = Circuit::new(if setting.is_some() { 2 } else { 1 }, setting.map(|_| 1))?;
    if initial == 1 {
        c.x(0)?;
    }
    for g in encode.encoder(0).into_iter().chain(decode.decoder(0)) {
        c.push(g)?;
    }
    match setting {
        Some(s) => heterodyne_stage(&c, s, &[0]),
        None => Ok(c),
    }
}

/// Two-qubit Bell layout: system qubits 0 and 1 (and ancilla 2 in
/// heterodyne mode), initial state `|00⟩`.
pub fn qkd_bell_circuit(encode: BellBasis, decode: BellBasis, mode: QkdMode) -> Result<Circuit> {
    let setting = mode.setting()?;
    let mut c = Circuit::new(if setting.is_some() { 3 } else { 2 }, setting.map(|_| 2))?;
    for g in encode.encoder(0, 1).into_iter().chain(decode.decoder(0, 1)) {
        c.push(g)?;
    }
    match setting {
        Some(s) => heterodyne_stage(&c, s, &[0, 1]),
        None => Ok(c),
    }
}

/// Fidelity of the reconstructed qubit with the initial state.
pub fn qkd_single_run(initial: u8, encode: SingleBasis, decode: SingleBasis, mode: QkdMode, opts: &SweepOptions) -> Result<f64> {
    let c = qkd_single_circuit(initial, encode, decode, mode)?;
    score(&c, &[0], &StateVector::basis(1, initial as usize)?, opts)
}

/// Fidelity of the reconstructed pair with `|00⟩`.
pub fn qkd_bell_run(encode: BellBasis, decode: BellBasis, mode: QkdMode, opts: &SweepOptions) -> Result<f64> {
    let c = qkd_bell_circuit(encode, decode, mode)?;
    score(&c, &[0, 1], &StateVector::zero(2)?, opts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum QkdKind {
    Single { initial: u8 },
    Bell,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QkdRow {
    pub encode: String,
    pub decode: String,
    /// One value per table column.
    pub fidelities: Vec<f64>,
}

impl QkdRow {
    pub fn pair(&self) -> String {
        format!("{}-{}", self.encode, self.decode)
    }

    pub fn is_matched(&self) -> bool {
        self.encode == self.decode
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QkdTable {
    #[serde(flatten)]
    pub kind: QkdKind,
    pub modes: Vec<QkdMode>,
    pub rows: Vec<QkdRow>,
}

impl QkdTable {
    pub fn column(&self, mode: QkdMode) -> Result<usize> {
        self.modes
            .iter()
            .position(|m| m.to_string() == mode.to_string())
            .ok_or_else(|| Error::MissingColumn(mode.to_string()))
    }

    pub fn row(&self, pair: &str) -> Option<&QkdRow> {
        self.rows.iter().find(|r| r.pair() == pair)
    }

    pub fn value(&self, pair: &str, mode: QkdMode) -> Result<f64> {
        let col = self.column(mode)?;
        self.row(pair)
            .map(|r| r.fidelities[col])
            .ok_or_else(|| Error::InvalidParameter(format!("no row {pair}")))
    }

    /// `pair,<column>...` with one line per row in table order.
    pub fn write_csv<W: io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["pair".to_string()];
        header.extend(self.modes.iter().map(|m| m.to_string()));
        w.write_record(&header)?;
        for r in &self.rows {
            let mut rec = vec![r.pair()];
            rec.extend(r.fidelities.iter().map(|v| v.to_string()));
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::Csv(e.to_string()))?;
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Every basis pair of the chosen kind under every requested mode. Cell
/// `(row, col)` draws from its own seed stream.
pub fn qkd_table(kind: QkdKind, modes: &[QkdMode], opts: &SweepOptions) -> Result<QkdTable> {
    if modes.is_empty() {
        return Err(Error::InvalidParameter("at least one table column is required".into()));
    }
    let cell_opts = |row: usize, col: usize| SweepOptions {
        seed: derive_seed(opts.seed, (row * modes.len() + col) as u64),
        ..*opts
    };
    let mut rows = Vec::new();
    match kind {
        QkdKind::Single { initial } => {
            check_initial(initial)?;
            for e in SingleBasis::ALL {
                for d in SingleBasis::ALL {
                    let r = rows.len();
                    let fidelities = modes
                        .iter()
                        .enumerate()
                        .map(|(col, &m)| qkd_single_run(initial, e, d, m, &cell_opts(r, col)))
                        .collect::<Result<_>>()?;
                    rows.push(QkdRow {
                        encode: e.label().into(),
                        decode: d.label().into(),
                        fidelities,
                    });
                }
            }
        }
        QkdKind::Bell => {
            for d in BellBasis::ALL {
                let r = rows.len();
                let fidelities = modes
                    .iter()
                    .enumerate()
                    .map(|(col, &m)| qkd_bell_run(BellBasis::B00, d, m, &cell_opts(r, col)))
                    .collect::<Result<_>>()?;
                rows.push(QkdRow {
                    encode: BellBasis::B00.label().into(),
                    decode: d.label().into(),
                    fidelities,
                });
            }
        }
    }
    Ok(QkdTable {
        kind,
        modes: modes.to_vec(),
        rows,
    })
}

/// Built-in threshold for a column, if there is one.
pub fn default_threshold(kind: QkdKind, mode: QkdMode) -> Option<f64> {
    match (kind, mode) {
        (QkdKind::Single { .. }, QkdMode::Simple) => Some(0.9),
        (QkdKind::Bell, QkdMode::Simple) => Some(0.25),
        (QkdKind::Single { .. }, m) if m.is_third() => Some(0.8),
        (QkdKind::Bell, m) if m.is_third() => Some(0.7),
        _ => None,
    }
}

/// Accept iff the pair's fidelity in column `mode` reaches the threshold
/// (the column's default when `threshold` is `None`).
pub fn threshold_verdict(table: &QkdTable, mode: QkdMode, threshold: Option<f64>) -> Result<IndexMap<String, Verdict>> {
    let col = table.column(mode)?;
    let t = match threshold {
        Some(t) => t,
        None => default_threshold(table.kind, mode).ok_or_else(|| Error::NoDefaultThreshold(mode.to_string()))?,
    };
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidThreshold(t));
    }
    Ok(table
        .rows
        .iter()
        .map(|r| (r.pair(), Verdict::judge(r.fidelities[col], t)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::run_statevector;
    use crate::linalg::c;

    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn third() -> QkdMode {
        QkdMode::heterodyne("pi/3").unwrap()
    }

    #[test]
    fn encoders_and_decoders() {
        let mut y = Circuit::new(1, None).unwrap();
        for g in SingleBasis::Y.encoder(0) {
            y.push(g).unwrap();
        }
        let s = run_statevector(&y).unwrap();
        assert!((s.amplitudes()[0] - c(H, 0.0)).norm() < 1e-12);
        assert!((s.amplitudes()[1] - c(0.0, H)).norm() < 1e-12);

        for b in BellBasis::ALL {
            let psi = run_statevector(&qkd_bell_circuit(b, b, QkdMode::Simple).unwrap()).unwrap();
            assert!((psi.amplitudes()[0].norm() - 1.0).abs() < 1e-12, "{b:?}");
        }
        for (d, bits) in [(BellBasis::B01, "01"), (BellBasis::B10, "10"), (BellBasis::B11, "11")] {
            let psi = run_statevector(&qkd_bell_circuit(BellBasis::B00, d, QkdMode::Simple).unwrap()).unwrap();
            let expected = StateVector::from_bits(bits).unwrap();
            assert!((psi.inner(&expected).unwrap().norm() - 1.0).abs() < 1e-12, "{d:?}");
        }
    }

    #[test]
    fn single_examples() {
        let ex = SweepOptions::exact();
        let z = SingleBasis::Z;
        let x = SingleBasis::X;
        assert!((qkd_single_run(0, z, z, QkdMode::Simple, &ex).unwrap() - 1.0).abs() < 1e-12);
        assert!((qkd_single_run(0, z, z, third(), &ex).unwrap() - 0.75f64.sqrt()).abs() < 1e-12);
        let (cs, sn) = ((PI6).cos(), (PI6).sin());
        assert!((qkd_single_run(0, z, x, third(), &ex).unwrap() - (cs - sn) * H).abs() < 1e-12);
        assert!((qkd_single_run(0, z, x, QkdMode::Simple, &ex).unwrap() - H).abs() < 1e-12);
    }

    const PI6: f64 = std::f64::consts::PI / 6.0;

    #[test]
    fn bell_examples() {
        let ex = SweepOptions::exact();
        let expected = [0.75, 0.75f64.sqrt() * 0.5, 0.75f64.sqrt() * 0.5, 0.25];
        for (d, e) in BellBasis::ALL.into_iter().zip(expected) {
            assert!((qkd_bell_run(BellBasis::B00, d, third(), &ex).unwrap() - e).abs() < 1e-12, "{d:?}");
        }
        assert!((qkd_bell_run(BellBasis::B00, BellBasis::B00, QkdMode::Simple, &ex).unwrap() - 1.0).abs() < 1e-12);
        assert!(qkd_bell_run(BellBasis::B00, BellBasis::B11, QkdMode::Simple, &ex).unwrap() < 1e-6);
    }

    #[test]
    fn verdicts() {
        let t = qkd_table(QkdKind::Single { initial: 0 }, &QkdMode::standard_columns(), &SweepOptions::exact()).unwrap();
        let simple = threshold_verdict(&t, QkdMode::Simple, None).unwrap();
        for r in &t.rows {
            let expect = if r.is_matched() { Verdict::Accept } else { Verdict::Reject };
            assert_eq!(simple[&r.pair()], expect, "{}", r.pair());
        }
        let z3 = threshold_verdict(&t, third(), None).unwrap();
        assert_eq!(z3.values().filter(|v| **v == Verdict::Accept).count(), 3);
        assert!(matches!(
            threshold_verdict(&t, QkdMode::heterodyne("pi/2").unwrap(), None),
            Err(Error::NoDefaultThreshold(_))
        ));
        assert!(threshold_verdict(&t, QkdMode::heterodyne("pi/4").unwrap(), Some(0.5)).is_err());

        let mut zeros = t.clone();
        for r in zeros.rows.iter_mut() {
            r.fidelities.iter_mut().for_each(|v| *v = 0.0);
        }
        assert!(threshold_verdict(&zeros, QkdMode::Simple, Some(0.01)).unwrap().values().all(|v| *v == Verdict::Reject));
    }

    #[test]
    fn table_csv_order_and_json() {
        let t = qkd_table(QkdKind::Bell, &[third(), QkdMode::Simple], &SweepOptions::exact()).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "pair,zeta=pi/3,simple");
        assert!(lines[1].starts_with("b00-b00,"));
        assert!(lines[4].starts_with("b00-b11,"));
        assert_eq!(QkdTable::from_json(&t.to_json().unwrap()).unwrap(), t);
    }

    #[test]
    fn parsing() {
        assert_eq!("β01".parse::<BellBasis>().unwrap(), BellBasis::B01);
        assert_eq!("beta11".parse::<BellBasis>().unwrap(), BellBasis::B11);
        assert_eq!("zeta=pi/3".parse::<QkdMode>().unwrap(), third());
        assert!("zeta=4".parse::<QkdMode>().is_err());
        assert!(qkd_single_circuit(2, SingleBasis::Z, SingleBasis::Z, QkdMode::Simple).is_err());
    }
}
