use std::collections::BTreeMap;
use std::fmt;
use std::io;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{conjugate, standard, Gate};
use crate::error::{Error, Result};
use crate::rng::stream_rng;
use crate::state::{bitstring, check_qubits, gather_bits, parse_bitstring, DensityMatrix, ProbabilityDistribution, StateVector};

/// Single-qubit measurement basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Basis {
    X,
    Y,
    Z,
}

impl Basis {
    pub const ALL: [Basis; 3] = [Basis::X, Basis::Y, Basis::Z];

    pub fn from_char(ch: char) -> Result<Self> {
        match ch.to_ascii_uppercase() {
            'X' => Ok(Basis::X),
            'Y' => Ok(Basis::Y),
            'Z' => Ok(Basis::Z),
            other => Err(Error::InvalidBasis(other)),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Basis::X => 'X',
            Basis::Y => 'Y',
            Basis::Z => 'Z',
        }
    }

    /// Gates that rotate this basis onto the computational one. For Y the
    /// rotation sends `(|0⟩ + i|1⟩)/√2` to `|0⟩`.
    pub fn rotation(self, qubit: usize) -> Vec<Gate> {
        match self {
            Basis::X => vec![standard::hadamard(qubit)],
            Basis::Y => vec![standard::s_dagger(qubit), standard::hadamard(qubit)],
            Basis::Z => vec![],
        }
    }

    pub fn parse_setting(setting: &str) -> Result<Vec<Basis>> {
        setting.chars().map(Basis::from_char).collect()
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Anything whose computational-basis statistics can be read after a
/// sequence of basis-change gates.
pub trait Measurable {
    fn register_size(&self) -> usize;
    fn probabilities_after(&self, rotations: &[Gate]) -> Vec<f64>;
}

impl Measurable for StateVector {
    fn register_size(&self) -> usize {
        self.num_qubits()
    }

    fn probabilities_after(&self, rotations: &[Gate]) -> Vec<f64> {
        let mut s = self.clone();
        for g in rotations {
            g.apply_to(s.amplitudes_mut(), self.num_qubits());
        }
        s.probabilities()
    }
}

impl Measurable for DensityMatrix {
    fn register_size(&self) -> usize {
        self.num_qubits()
    }

    fn probabilities_after(&self, rotations: &[Gate]) -> Vec<f64> {
        let mut m = self.matrix().clone();
        for g in rotations {
            conjugate(&mut m, g, self.num_qubits());
        }
        m.diagonal().iter().map(|z| z.re).collect()
    }
}

/// Outcome distribution of measuring `qubits` in the per-qubit bases of
/// `setting` (one letter per listed qubit). Outcome bit `j` is `qubits[j]`.
pub fn measure_in_basis<S: Measurable>(state: &S, setting: &str, qubits: &[usize]) -> Result<ProbabilityDistribution> {
    let bases = Basis::parse_setting(setting)?;
    if bases.len() != qubits.len() {
        return Err(Error::SettingLength {
            setting: setting.to_string(),
            expected: qubits.len(),
        });
    }
    if qubits.is_empty() {
        return Err(Error::EmptyQubitSet);
    }
    let n = state.register_size();
    check_qubits(qubits, n)?;
    let rotations: Vec<Gate> = bases
        .iter()
        .zip(qubits)
        .flat_map(|(b, &q)| b.rotation(q))
        .collect();
    let full = state.probabilities_after(&rotations);
    let mut marginal = vec![0.0; 1 << qubits.len()];
    for (i, p) in full.iter().enumerate() {
        marginal[gather_bits(i, qubits, n)] += p;
    }
    ProbabilityDistribution::new(marginal)
}

/// Raw measurement record for one setting.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotTable {
    setting: String,
    counts: BTreeMap<String, u64>,
    shots: u64,
}

#[derive(Debug, Serialize, Deserialize)]
struct CsvRow {
    setting: String,
    bitstring: String,
    count: u64,
}

impl ShotTable {
    pub fn new(setting: impl Into<String>, counts: BTreeMap<String, u64>) -> Result<Self> {
        let setting = setting.into().to_ascii_uppercase();
        Basis::parse_setting(&setting)?;
        let width = setting.len();
        if width == 0 {
            return Err(Error::InvalidShotTable("empty setting".into()));
        }
        for bits in counts.keys() {
            if bits.len() != width || parse_bitstring(bits).is_none() {
                return Err(Error::InvalidShotTable(format!(
                    "outcome {bits:?} does not match setting {setting}"
                )));
            }
        }
        let shots = counts.values().sum();
        Ok(Self { setting, counts, shots })
    }

    pub fn setting(&self) -> &str {
        &self.setting
    }

    pub fn bases(&self) -> Vec<Basis> {
        Basis::parse_setting(&self.setting).expect("validated on construction")
    }

    pub fn num_bits(&self) -> usize {
        self.setting.len()
    }

    pub fn counts(&self) -> &BTreeMap<String, u64> {
        &self.counts
    }

    pub fn count(&self, outcome: &str) -> u64 {
        self.counts.get(outcome).copied().unwrap_or(0)
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    /// Relabels the table with a measurement setting of matching width.
    pub fn with_setting(self, setting: &str) -> Result<Self> {
        if setting.len() != self.num_bits() {
            return Err(Error::SettingLength {
                setting: setting.to_string(),
                expected: self.num_bits(),
            });
        }
        Self::new(setting, self.counts)
    }

    /// Empirical frequencies indexed by outcome value.
    pub fn frequencies(&self) -> Vec<f64> {
        let mut f = vec![0.0; 1 << self.num_bits()];
        if self.shots == 0 {
            return f;
        }
        for (bits, &n) in &self.counts {
            f[parse_bitstring(bits).expect("validated")] = n as f64 / self.shots as f64;
        }
        f
    }

    /// Keeps the shots whose bit at `position` equals `value` and drops that
    /// bit from the record.
    pub fn post_select(&self, position: usize, value: char) -> Result<Self> {
        if position >= self.num_bits() || self.num_bits() < 2 {
            return Err(Error::InvalidShotTable(format!(
                "cannot post-select bit {position} of a {}-bit table",
                self.num_bits()
            )));
        }
        let drop = |s: &str| -> String {
            s.chars().enumerate().filter(|&(i, _)| i != position).map(|(_, c)| c).collect()
        };
        let mut kept = BTreeMap::new();
        for (bits, &n) in &self.counts {
            if bits.chars().nth(position) == Some(value) {
                *kept.entry(drop(bits)).or_insert(0) += n;
            }
        }
        Self::new(drop(&self.setting), kept)
    }

    pub fn write_csv<W: io::Write>(tables: &[ShotTable], writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for t in tables {
            for (bits, &count) in &t.counts {
                w.serialize(CsvRow {
                    setting: t.setting.clone(),
                    bitstring: bits.clone(),
                    count,
                })?;
            }
        }
        w.flush().map_err(|e| Error::Csv(e.to_string()))?;
        Ok(())
    }

    /// Reads tables in the `setting,bitstring,count` schema, one table per
    /// distinct setting, in order of first appearance.
    pub fn read_csv<R: io::Read>(reader: R) -> Result<Vec<ShotTable>> {
        let mut r = csv::Reader::from_reader(reader);
        let mut order: Vec<String> = Vec::new();
        let mut grouped: BTreeMap<String, BTreeMap<String, u64>> = BTreeMap::new();
        for row in r.deserialize() {
            let row: CsvRow = row?;
            let setting = row.setting.trim().to_ascii_uppercase();
            if !grouped.contains_key(&setting) {
                order.push(setting.clone());
            }
            *grouped
                .entry(setting)
                .or_default()
                .entry(row.bitstring.trim().to_string())
                .or_insert(0) += row.count;
        }
        order
            .into_iter()
            .map(|s| {
                let counts = grouped.remove(&s).unwrap_or_default();
                ShotTable::new(s, counts)
            })
            .collect()
    }
}

/// Draws `shots` outcomes from `dist` with a generator seeded by `seed`, then
/// flips each recorded bit independently with probability
/// `readout_flip_prob`. The table's setting defaults to all-`Z`.
pub fn sample_shots(dist: &ProbabilityDistribution, shots: u64, seed: u64, readout_flip_prob: f64) -> Result<ShotTable> {
    if shots == 0 {
        return Err(Error::InvalidParameter("shots must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&readout_flip_prob) {
        return Err(Error::InvalidProbability {
            name: "readout_flip_prob",
            value: readout_flip_prob,
        });
    }
    let bits = dist.num_bits();
    let sampler = WeightedIndex::new(dist.probabilities())
        .map_err(|e| Error::InvalidDistribution(e.to_string()))?;
    let mut rng = stream_rng(seed, 0);
    let mut tally = vec![0u64; 1 << bits];
    for _ in 0..shots {
        let mut outcome = sampler.sample(&mut rng);
        if readout_flip_prob > 0.0 {
            for b in 0..bits {
                if rng.random_bool(readout_flip_prob) {
                    outcome ^= 1 << b;
                }
            }
        }
        tally[outcome] += 1;
    }
    let counts = tally
        .into_iter()
        .enumerate()
        .filter(|&(_, n)| n > 0)
        .map(|(i, n)| (bitstring(i, bits), n))
        .collect();
    ShotTable::new("Z".repeat(bits), counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use std::f64::consts::FRAC_1_SQRT_2 as H;

    #[test]
    fn measurement_examples() {
        let zero = StateVector::zero(1).unwrap();
        assert_eq!(measure_in_basis(&zero, "Z", &[0]).unwrap().probabilities(), &[1.0, 0.0]);
        let x = measure_in_basis(&zero, "X", &[0]).unwrap();
        assert!((x.probabilities()[0] - 0.5).abs() < 1e-12);
        let plus_i = StateVector::qubit(c(H, 0.0), c(0.0, H)).unwrap();
        let y = measure_in_basis(&plus_i, "Y", &[0]).unwrap();
        assert!((y.probabilities()[0] - 1.0).abs() < 1e-12);
        let plus = StateVector::qubit(c(H, 0.0), c(H, 0.0)).unwrap();
        assert!((measure_in_basis(&plus, "X", &[0]).unwrap().probabilities()[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn measurement_errors() {
        let zero = StateVector::zero(2).unwrap();
        assert_eq!(measure_in_basis(&zero, "Q", &[0]), Err(Error::InvalidBasis('Q')));
        assert!(matches!(measure_in_basis(&zero, "ZZ", &[0]), Err(Error::SettingLength { .. })));
        assert!(matches!(measure_in_basis(&zero, "Z", &[5]), Err(Error::QubitOutOfRange { .. })));
    }

    #[test]
    fn marginal_follows_listed_qubit_order() {
        let s = StateVector::from_bits("10").unwrap();
        assert_eq!(measure_in_basis(&s, "ZZ", &[1, 0]).unwrap().probability("01"), Some(1.0));
        assert_eq!(measure_in_basis(&s.to_density(), "Z", &[0]).unwrap().probability("1"), Some(1.0));
    }

    #[test]
    fn deterministic_distribution_sampling() {
        let d = ProbabilityDistribution::new(vec![1.0, 0.0]).unwrap();
        let t = sample_shots(&d, 100, 7, 0.0).unwrap();
        assert_eq!(t.count("0"), 100);
        assert_eq!(t.shots(), 100);
        assert_eq!(t.counts().len(), 1);
    }

    #[test]
    fn sampling_is_seed_deterministic() {
        let d = ProbabilityDistribution::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let a = sample_shots(&d, 5000, 42, 0.05).unwrap();
        let b = sample_shots(&d, 5000, 42, 0.05).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, sample_shots(&d, 5000, 43, 0.05).unwrap());
    }

    /// Binomial bound: σ = 0.5/√10⁶ = 5e-4, so 0.002 is four standard
    /// deviations (two-sided tail ≈ 6e-5).
    #[test]
    fn sampling_frequency_converges() {
        let d = ProbabilityDistribution::new(vec![0.5, 0.5]).unwrap();
        for seed in [0, 1, 2] {
            let t = sample_shots(&d, 1_000_000, seed, 0.0).unwrap();
            let f = t.count("0") as f64 / 1e6;
            assert!((f - 0.5).abs() < 0.002, "seed {seed}: {f}");
        }
    }

    #[test]
    fn zero_shots_rejected() {
        let d = ProbabilityDistribution::new(vec![0.5, 0.5]).unwrap();
        assert!(sample_shots(&d, 0, 0, 0.0).is_err());
    }

    #[test]
    fn post_selection_drops_the_bit() {
        let counts = BTreeMap::from([("01".to_string(), 3), ("11".to_string(), 5), ("10".to_string(), 2)]);
        let t = ShotTable::new("XZ", counts).unwrap();
        let kept = t.post_select(1, '1').unwrap();
        assert_eq!(kept.setting(), "X");
        assert_eq!(kept.shots(), 8);
        assert_eq!(kept.count("1"), 5);
    }

    #[test]
    fn csv_round_trip() {
        let a = ShotTable::new("XZ", BTreeMap::from([("00".to_string(), 4), ("11".to_string(), 6)])).unwrap();
        let b = ShotTable::new("ZZ", BTreeMap::from([("01".to_string(), 10)])).unwrap();
        let mut buf = Vec::new();
        ShotTable::write_csv(&[a.clone(), b.clone()], &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("setting,bitstring,count\nXZ,00,4\n"));
        assert_eq!(ShotTable::read_csv(buf.as_slice()).unwrap(), vec![a, b]);
    }

    #[test]
    fn shot_table_validation() {
        assert!(ShotTable::new("XW", BTreeMap::new()).is_err());
        assert!(ShotTable::new("X", BTreeMap::from([("01".to_string(), 1)])).is_err());
    }
}
