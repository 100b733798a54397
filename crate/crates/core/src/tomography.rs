//! Pauli tomography.
//!
//! A sweep measures every one of the `3^m` X/Y/Z settings on the measured
//! qubits and assembles all `4^m` Pauli expectations. A string with identity
//! letters is readable from every setting that agrees on its non-identity
//! letters; its estimate is the average over all of them. Linear inversion
//! `ρ = 2^{-m} Σ_P ⟨P⟩ P` then gives the (possibly unphysical) estimate.
//!
//! If the circuit designates an ancilla it is read in Z alongside the
//! measured qubits. By default only shots with ancilla = 1 are kept
//! ([`AncillaMode::PostSelect`]); [`AncillaMode::TraceOut`] ignores it.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::circuit::{measure_in_basis, run_density_matrix, sample_shots, Basis, Circuit, NoiseModel, ShotTable};
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::metrics::fidelity;
use crate::rng::derive_seed;
use crate::state::{check_qubits, DensityMatrix, StateVector};

/// Largest register a sweep covers (81 settings).
pub const MAX_SWEEP_QUBITS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_char(ch: char) -> Result<Self> {
        match ch.to_ascii_uppercase() {
            'I' => Ok(Pauli::I),
            'X' => Ok(Pauli::X),
            'Y' => Ok(Pauli::Y),
            'Z' => Ok(Pauli::Z),
            other => Err(Error::InvalidPauli(other)),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    fn basis(self) -> Option<Basis> {
        match self {
            Pauli::I => None,
            Pauli::X => Some(Basis::X),
            Pauli::Y => Some(Basis::Y),
            Pauli::Z => Some(Basis::Z),
        }
    }

    fn from_basis(b: Basis) -> Self {
        match b {
            Basis::X => Pauli::X,
            Basis::Y => Pauli::Y,
            Basis::Z => Pauli::Z,
        }
    }
}

/// Tensor product of Pauli letters, first letter on the first qubit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString(Vec<Pauli>);

impl PauliString {
    pub fn new(letters: Vec<Pauli>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::EmptyQubitSet);
        }
        Ok(Self(letters))
    }

    pub fn identity(len: usize) -> Self {
        Self(vec![Pauli::I; len.max(1)])
    }

    /// All `4^len` strings in lexicographic `I < X < Y < Z` order.
    pub fn all(len: usize) -> Vec<PauliString> {
        let letters = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
        (0..4usize.pow(len as u32))
            .map(|mut k| {
                let mut v = vec![Pauli::I; len];
                for slot in v.iter_mut().rev() {
                    *slot = letters[k % 4];
                    k /= 4;
                }
                PauliString(v)
            })
            .collect()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|&p| p == Pauli::I)
    }

    /// Whether this string can be read off a record taken in `setting`.
    pub fn readable_from(&self, setting: &[Basis]) -> bool {
        setting.len() == self.len()
            && self.0.iter().zip(setting).all(|(p, &b)| p.basis().map_or(true, |pb| pb == b))
    }

    /// Dense `2^m × 2^m` matrix.
    pub fn matrix(&self) -> ComplexMatrix {
        let m = self.len();
        let dim = 1usize << m;
        let mut out = ComplexMatrix::zeros(dim, dim);
        let mut flip = 0usize;
        for (j, p) in self.0.iter().enumerate() {
            if matches!(p, Pauli::X | Pauli::Y) {
                flip |= 1 << (m - 1 - j);
            }
        }
        for col in 0..dim {
            let mut phase = linalg::ONE;
            for (j, p) in self.0.iter().enumerate() {
                let bit = (col >> (m - 1 - j)) & 1;
                let sign = if bit == 1 { -1.0 } else { 1.0 };
                phase *= match p {
                    Pauli::I | Pauli::X => linalg::ONE,
                    Pauli::Y => linalg::c(0.0, sign),
                    Pauli::Z => linalg::c(sign, 0.0),
                };
            }
            out[(col ^ flip, col)] = phase;
        }
        out
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.0 {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::new(s.trim().chars().map(Pauli::from_char).collect::<Result<_>>()?)
    }
}

impl Serialize for PauliString {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Pauli expectation values for one register. Serializes as a JSON object
/// `{"XZ": 0.25, ...}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectationSet {
    num_qubits: usize,
    values: BTreeMap<PauliString, f64>,
}

impl ExpectationSet {
    /// An empty set holding only `⟨I…I⟩ = 1`.
    pub fn new(num_qubits: usize) -> Result<Self> {
        if num_qubits == 0 {
            return Err(Error::EmptyQubitSet);
        }
        let mut values = BTreeMap::new();
        values.insert(PauliString::identity(num_qubits), 1.0);
        Ok(Self { num_qubits, values })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn insert(&mut self, string: PauliString, value: f64) -> Result<()> {
        if string.len() != self.num_qubits {
            return Err(Error::DimensionMismatch {
                left: string.len(),
                right: self.num_qubits,
            });
        }
        if !value.is_finite() {
            return Err(Error::InvalidParameter(format!("expectation of {string} is {value}")));
        }
        if string.is_identity() && (value - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("identity expectation must be 1, got {value}")));
        }
        self.values.insert(string, value);
        Ok(())
    }

    pub fn get(&self, string: &PauliString) -> Option<f64> {
        self.values.get(string).copied()
    }

    /// Lookup by text, e.g. `"XZ"`.
    pub fn value(&self, string: &str) -> Result<f64> {
        let key: PauliString = string.parse()?;
        self.get(&key).ok_or_else(|| Error::MissingExpectation(string.to_string()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PauliString, f64)> {
        self.values.iter().map(|(k, &v)| (k, v))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_complete(&self) -> bool {
        self.values.len() == 4usize.pow(self.num_qubits as u32)
    }

    /// Exact expectations `Tr(ρP)` of every Pauli string.
    pub fn from_density(rho: &DensityMatrix) -> Result<Self> {
        let mut set = Self::new(rho.num_qubits())?;
        for p in PauliString::all(rho.num_qubits()) {
            if p.is_identity() {
                continue;
            }
            let v = linalg::trace(&(rho.matrix() * p.matrix())).re;
            set.insert(p, v)?;
        }
        Ok(set)
    }

    /// `Σ_k w_k · set_k`; the identity stays 1 when the weights sum to 1.
    pub fn mixture(parts: &[(f64, &ExpectationSet)]) -> Result<Self> {
        let first = parts.first().ok_or(Error::EmptyQubitSet)?.1;
        let mut values: BTreeMap<PauliString, f64> = BTreeMap::new();
        for (w, set) in parts {
            if set.num_qubits != first.num_qubits {
                return Err(Error::DimensionMismatch {
                    left: set.num_qubits,
                    right: first.num_qubits,
                });
            }
            for (k, v) in set.iter() {
                *values.entry(k.clone()).or_insert(0.0) += w * v;
            }
        }
        Ok(Self {
            num_qubits: first.num_qubits,
            values,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

impl Serialize for ExpectationSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.values.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExpectationSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = BTreeMap::<PauliString, f64>::deserialize(d)?;
        let m = raw.keys().next().map(PauliString::len).ok_or_else(|| D::Error::custom("empty expectation set"))?;
        let mut set = ExpectationSet::new(m).map_err(D::Error::custom)?;
        for (k, v) in raw {
            set.insert(k, v).map_err(D::Error::custom)?;
        }
        Ok(set)
    }
}

/// Parity estimate `Σ_x (−1)^{parity of x on the non-identity positions} · n_x / shots`.
pub fn expectation_from_counts(table: &ShotTable, string: &PauliString) -> Result<f64> {
    let bases = table.bases();
    if !string.readable_from(&bases) {
        return Err(Error::SettingMismatch {
            setting: table.setting().to_string(),
            string: string.to_string(),
        });
    }
    if table.shots() == 0 {
        return Err(Error::InvalidShotTable(format!("setting {} has no shots", table.setting())));
    }
    let mask = support_mask(string);
    Ok(parity_expectation(&table.frequencies(), mask))
}

fn support_mask(string: &PauliString) -> usize {
    let m = string.len();
    string
        .letters()
        .iter()
        .enumerate()
        .filter(|(_, p)| **p != Pauli::I)
        .fold(0, |acc, (j, _)| acc | 1 << (m - 1 - j))
}

fn parity_expectation(freqs: &[f64], mask: usize) -> f64 {
    freqs
        .iter()
        .enumerate()
        .map(|(x, f)| if (x & mask).count_ones() % 2 == 0 { *f } else { -f })
        .sum()
}

/// Averages every Pauli string readable from each setting's outcome
/// frequencies over all settings that can read it.
fn assemble(records: &[(Vec<Basis>, Vec<f64>)], m: usize) -> Result<ExpectationSet> {
    let mut sums: BTreeMap<PauliString, (f64, usize)> = BTreeMap::new();
    for (bases, freqs) in records {
        for mask in 1..(1usize << m) {
            let letters = (0..m)
                .map(|j| {
                    if (mask >> (m - 1 - j)) & 1 == 1 {
                        Pauli::from_basis(bases[j])
                    } else {
                        Pauli::I
                    }
                })
                .collect();
            let entry = sums.entry(PauliString(letters)).or_insert((0.0, 0));
            entry.0 += parity_expectation(freqs, mask);
            entry.1 += 1;
        }
    }
    let mut set = ExpectationSet::new(m)?;
    for (k, (sum, n)) in sums {
        set.insert(k, sum / n as f64)?;
    }
    Ok(set)
}

/// Expectations from a collection of recorded tables (all of the same
/// width). Repeated settings are averaged like distinct ones.
pub fn expectations_from_tables(tables: &[ShotTable]) -> Result<ExpectationSet> {
    let m = tables.first().ok_or_else(|| Error::InvalidShotTable("no tables".into()))?.num_bits();
    let mut records = Vec::with_capacity(tables.len());
    for t in tables {
        if t.num_bits() != m {
            return Err(Error::OutcomeMismatch {
                left: t.num_bits(),
                right: m,
            });
        }
        if t.shots() == 0 {
            return Err(Error::InvalidShotTable(format!("setting {} has no shots", t.setting())));
        }
        records.push((t.bases(), t.frequencies()));
    }
    assemble(&records, m)
}

/// Single-qubit estimate `½[[1+z, x−iy], [x+iy, 1−z]]`, physical
/// exactly when the Bloch vector has length at most 1.
pub fn reconstruct_single_qubit(ex: &ExpectationSet) -> Result<DensityMatrix> {
    if ex.num_qubits() != 1 {
        return Err(Error::DimensionMismatch {
            left: ex.num_qubits(),
            right: 1,
        });
    }
    let x = ex.value("X")?;
    let y = ex.value("Y")?;
    let z = ex.value("Z")?;
    let half = |v: num_complex::Complex64| v * 0.5;
    let m = linalg::from_rows(
        2,
        2,
        &[
            half(linalg::c(1.0 + z, 0.0)),
            half(linalg::c(x, -y)),
            half(linalg::c(x, y)),
            half(linalg::c(1.0 - z, 0.0)),
        ],
    )?;
    let bloch = (x * x + y * y + z * z).sqrt();
    Ok(DensityMatrix::from_hermitian_unchecked(1, m, bloch <= 1.0))
}

/// Linear inversion `ρ = 2^{-m} Σ_P ⟨P⟩ P` over all `4^m` strings.
pub fn reconstruct_multi_qubit(ex: &ExpectationSet) -> Result<DensityMatrix> {
    let m = ex.num_qubits();
    let dim = 1usize << m;
    let mut acc = ComplexMatrix::zeros(dim, dim);
    for p in PauliString::all(m) {
        let v = ex.get(&p).ok_or_else(|| Error::MissingExpectation(p.to_string()))?;
        acc += p.matrix() * linalg::c(v, 0.0);
    }
    acc *= linalg::c(1.0 / dim as f64, 0.0);
    DensityMatrix::from_hermitian_unchecked(m, acc, false).recheck_physical()
}

/// Shots per setting, or exact outcome probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shots {
    Exact,
    Finite(u64),
}

impl Shots {
    pub fn validate(self) -> Result<Self> {
        if self == Shots::Finite(0) {
            return Err(Error::InvalidParameter("shots must be at least 1".into()));
        }
        Ok(self)
    }
}

impl Default for Shots {
    fn default() -> Self {
        Shots::Finite(8192)
    }
}

impl fmt::Display for Shots {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shots::Exact => write!(f, "exact"),
            Shots::Finite(n) => write!(f, "{n}"),
        }
    }
}

impl FromStr for Shots {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("exact") || s.eq_ignore_ascii_case("inf") {
            return Ok(Shots::Exact);
        }
        s.parse::<u64>()
            .map(Shots::Finite)
            .map_err(|_| Error::InvalidParameter(format!("shots {s:?} is neither a count nor \"exact\"")))?
            .validate()
    }
}

impl Serialize for Shots {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Shots::Exact => s.serialize_str("exact"),
            Shots::Finite(n) => s.serialize_u64(*n),
        }
    }
}

impl<'de> Deserialize<'de> for Shots {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Count(u64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Count(n) => Shots::Finite(n).validate().map_err(serde::de::Error::custom),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AncillaMode {
    /// Keep only records where the ancilla reads 1.
    #[default]
    PostSelect,
    /// Ignore the ancilla entirely.
    TraceOut,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SweepOptions {
    pub shots: Shots,
    pub seed: u64,
    pub noise: NoiseModel,
    pub ancilla: AncillaMode,
}

impl SweepOptions {
    pub fn exact() -> Self {
        Self {
            shots: Shots::Exact,
            ..Self::default()
        }
    }

    pub fn sampled(shots: u64, seed: u64) -> Self {
        Self {
            shots: Shots::Finite(shots),
            seed,
            ..Self::default()
        }
    }
}

/// All `3^m` settings in lexicographic X < Y < Z order.
pub fn all_settings(m: usize) -> Vec<Vec<Basis>> {
    (0..3usize.pow(m as u32))
        .map(|mut k| {
            let mut v = vec![Basis::X; m];
            for slot in v.iter_mut().rev() {
                *slot = Basis::ALL[k % 3];
                k /= 3;
            }
            v
        })
        .collect()
}

fn setting_label(bases: &[Basis]) -> String {
    bases.iter().map(|b| b.as_char()).collect()
}

fn check_sweep(circuit: &Circuit, measured: &[usize], opts: &SweepOptions) -> Result<()> {
    if measured.is_empty() {
        return Err(Error::EmptyQubitSet);
    }
    if measured.len() > MAX_SWEEP_QUBITS {
        return Err(Error::SweepTooLarge(measured.len()));
    }
    check_qubits(measured, circuit.num_qubits())?;
    if let Some(a) = circuit.ancilla() {
        if measured.contains(&a) {
            return Err(Error::InvalidParameter(format!("qubit {a} is the ancilla and cannot be swept")));
        }
    }
    opts.noise.validate()?;
    opts.shots.validate()?;
    Ok(())
}

/// Ancilla qubit read alongside the measured ones, if post-selection applies.
fn post_select_ancilla(circuit: &Circuit, opts: &SweepOptions) -> Option<usize> {
    match opts.ancilla {
        AncillaMode::PostSelect => circuit.ancilla(),
        AncillaMode::TraceOut => None,
    }
}

/// Raw shot tables of a sampled sweep, one per setting, already post-selected
/// on the ancilla when that applies.
pub fn sweep_shot_tables(circuit: &Circuit, measured: &[usize], opts: &SweepOptions) -> Result<Vec<ShotTable>> {
    check_sweep(circuit, measured, opts)?;
    let Shots::Finite(shots) = opts.shots else {
        return Err(Error::InvalidParameter("shot tables need a finite shot count".into()));
    };
    let rho = run_density_matrix(circuit, &opts.noise)?;
    let anc = post_select_ancilla(circuit, opts);
    let mut read: Vec<usize> = measured.to_vec();
    read.extend(anc);
    all_settings(measured.len())
        .into_iter()
        .enumerate()
        .map(|(k, bases)| {
            let mut label = setting_label(&bases);
            if anc.is_some() {
                label.push('Z');
            }
            let dist = measure_in_basis(&rho, &label, &read)?;
            let table = sample_shots(&dist, shots, derive_seed(opts.seed, k as u64), opts.noise.readout_flip_prob)?
                .with_setting(&label)?;
            if anc.is_some() {
                let kept = table.post_select(measured.len(), '1')?;
                if kept.shots() == 0 {
                    return Err(Error::PostSelectionEmpty(label));
                }
                Ok(kept)
            } else {
                Ok(table)
            }
        })
        .collect()
}

/// Full tomographic sweep over `measured` (at most four qubits): every
/// setting is simulated, read out (exactly or with `shots` samples) and
/// the `4^m` expectations are assembled.
pub fn tomography_sweep(circuit: &Circuit, measured: &[usize], opts: &SweepOptions) -> Result<ExpectationSet> {
    check_sweep(circuit, measured, opts)?;
    if let Shots::Finite(_) = opts.shots {
        return expectations_from_tables(&sweep_shot_tables(circuit, measured, opts)?);
    }
    let rho = run_density_matrix(circuit, &opts.noise)?;
    let anc = post_select_ancilla(circuit, opts);
    let m = measured.len();
    let mut read: Vec<usize> = measured.to_vec();
    read.extend(anc);
    let mut records = Vec::new();
    for bases in all_settings(m) {
        let mut label = setting_label(&bases);
        if anc.is_some() {
            label.push('Z');
        }
        let dist = measure_in_basis(&rho, &label, &read)?.with_readout_flips(opts.noise.readout_flip_prob)?;
        let freqs = match anc {
            None => dist.probabilities().to_vec(),
            Some(_) => {
                // Ancilla is the last (least significant) bit; keep the odd entries.
                let kept: Vec<f64> = dist.probabilities().iter().skip(1).step_by(2).copied().collect();
                let p: f64 = kept.iter().sum();
                if p < 1e-12 {
                    return Err(Error::ZeroProbabilityBranch(p));
                }
                kept.into_iter().map(|v| v / p).collect()
            }
        };
        records.push((bases, freqs));
    }
    assemble(&records, m)
}

/// Exact state that a sweep over `measured` estimates: the circuit's output
/// conditioned on ancilla = 1 (or with the ancilla traced out) and reduced to
/// `measured`, in ascending qubit order.
pub fn exact_measured_state(circuit: &Circuit, measured: &[usize], noise: &NoiseModel, ancilla: AncillaMode) -> Result<DensityMatrix> {
    let rho = run_density_matrix(circuit, noise)?;
    let mut keep: Vec<usize> = measured.to_vec();
    keep.sort_unstable();
    match (ancilla, circuit.ancilla()) {
        (AncillaMode::PostSelect, Some(a)) => {
            let conditioned = rho.condition_on(a, 1, true)?;
            let shifted: Vec<usize> = keep.iter().map(|&q| if q > a { q - 1 } else { q }).collect();
            if shifted.len() == conditioned.num_qubits() {
                Ok(conditioned)
            } else {
                conditioned.partial_trace(&shifted)
            }
        }
        _ => {
            if keep.len() == rho.num_qubits() {
                Ok(rho)
            } else {
                rho.partial_trace(&keep)
            }
        }
    }
}

/// `F(Tr_{others} ρ, |t_i⟩⟨t_i|)` for each qubit `i`.
pub fn reduced_fidelities(rho: &DensityMatrix, targets: &[StateVector]) -> Result<Vec<f64>> {
    if targets.len() != rho.num_qubits() {
        return Err(Error::TargetCountMismatch {
            expected: rho.num_qubits(),
            got: targets.len(),
        });
    }
    targets
        .iter()
        .enumerate()
        .map(|(i, t)| {
            if t.num_qubits() != 1 {
                return Err(Error::DimensionMismatch {
                    left: t.num_qubits(),
                    right: 1,
                });
            }
            let reduced = if rho.num_qubits() == 1 { rho.clone() } else { rho.partial_trace(&[i])? };
            fidelity(&reduced, &t.to_density())
        })
        .collect()
}
