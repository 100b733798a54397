//! Command-line and JSON configuration, merged into one validated
//! [`ExperimentConfig`] before anything runs.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use hetverify::circuit::NoiseModel;
use hetverify::heterodyne::HeterodyneSetting;
use hetverify::protocols::{CopyPlan, WitnessTarget, DEFAULT_THRESHOLD};
use hetverify::qkd::QkdMode;
use hetverify::tomography::{AncillaMode, Shots};
use hetverify::topology::{check_modes, QubitPrep, U3Params, MAX_MODES};
use hetverify::{Angle, Circuit};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const DEFAULT_OUT_DIR: &str = "hetverify-out";

#[derive(Debug, Parser)]
#[command(name = "hetverify", version, about = "Verify simulated quantum states with heterodyne-style detection and tomography")]
pub struct Cli {
    /// JSON run configuration; flags given on the command line win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Single-mode fidelity over N + M copies.
    Protocol1(Flags),
    /// Multi-mode fidelity and witness on up to four qubits.
    Protocol2(Flags),
    /// Boson-sampling verification with a threshold decision.
    Protocol3(Flags),
    /// Single-qubit key-distribution basis table.
    QkdSingle(Flags),
    /// Bell-basis key-distribution table.
    QkdBell(Flags),
    /// Pauli tomography of a circuit read from JSON.
    Tomography(Flags),
}

impl Command {
    fn split(self) -> (CommandName, Flags) {
        match self {
            Command::Protocol1(f) => (CommandName::Protocol1, f),
            Command::Protocol2(f) => (CommandName::Protocol2, f),
            Command::Protocol3(f) => (CommandName::Protocol3, f),
            Command::QkdSingle(f) => (CommandName::QkdSingle, f),
            Command::QkdBell(f) => (CommandName::QkdBell, f),
            Command::Tomography(f) => (CommandName::Tomography, f),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandName {
    Protocol1,
    Protocol2,
    Protocol3,
    QkdSingle,
    QkdBell,
    Tomography,
}

impl CommandName {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Protocol1 => "protocol1",
            Self::Protocol2 => "protocol2",
            Self::Protocol3 => "protocol3",
            Self::QkdSingle => "qkd-single",
            Self::QkdBell => "qkd-bell",
            Self::Tomography => "tomography",
        }
    }

    fn accepts(self, key: &str) -> bool {
        const COMMON: &[&str] = &["shots", "seed", "noise", "ancilla", "out"];
        let own: &[&str] = match self {
            Self::Protocol1 => &["initial", "alpha", "beta", "zeta", "copies", "cutoff", "threshold", "project"],
            Self::Protocol2 => &["initial", "qubits", "zeta", "copies", "cutoff", "witness_target", "threshold", "project"],
            Self::Protocol3 => &[
                "photons",
                "modes",
                "interferometer",
                "zeta",
                "copies",
                "cutoff",
                "witness_target",
                "threshold",
                "project",
            ],
            Self::QkdSingle => &["initial", "zeta", "simple", "threshold"],
            Self::QkdBell => &["zeta", "simple", "threshold"],
            Self::Tomography => &["circuit", "measure"],
        };
        COMMON.contains(&key) || own.contains(&key)
    }
}

fn parse_angle(s: &str) -> Result<Angle, String> {
    s.parse().map_err(|e: hetverify::Error| e.to_string())
}

fn parse_setting(s: &str) -> Result<HeterodyneSetting, String> {
    s.parse().map_err(|e: hetverify::Error| e.to_string())
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    s.trim().parse().map_err(|_| format!("{s:?} is not a complex number (e.g. 0.6, 0.8i, 0.3+0.4i)"))
}

fn parse_qubit(s: &str) -> Result<[ComplexSpec; 2], String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("{s:?}: expected ALPHA,BETA"))?;
    Ok([ComplexSpec::Value(parse_complex(a)?), ComplexSpec::Value(parse_complex(b)?)])
}

fn parse_u3(s: &str) -> Result<U3Params, String> {
    let parts: Vec<&str> = s.split(',').collect();
    let [theta, phi, lambda] = parts.as_slice() else {
        return Err(format!("{s:?}: expected THETA,PHI,LAMBDA"));
    };
    Ok(U3Params {
        theta: parse_angle(theta)?,
        phi: parse_angle(phi)?,
        lambda: parse_angle(lambda)?,
    })
}

fn parse_shots(s: &str) -> Result<Shots, String> {
    s.parse().map_err(|e: hetverify::Error| e.to_string())
}

fn parse_kebab<T: for<'de> Deserialize<'de>>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.trim().to_ascii_lowercase())).map_err(|e| e.to_string())
}

fn parse_probability(s: &str) -> Result<f64, String> {
    let p: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    if !(0.0..=1.0).contains(&p) {
        return Err(format!("{p} is not a probability in [0, 1]"));
    }
    Ok(p)
}

/// Flags shared by every command; ones that do not apply to the chosen
/// command are rejected during validation.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// protocol1: 1 or superposition; protocol2: bits such as 1100; qkd-single: 0 or 1.
    #[arg(long)]
    pub initial: Option<String>,
    /// Amplitude of |0> for a superposition input.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub alpha: Option<Complex64>,
    /// Amplitude of |1> for a superposition input.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub beta: Option<Complex64>,
    /// Per-qubit superposition ALPHA,BETA (repeat once per qubit).
    #[arg(long = "qubit", value_parser = parse_qubit, allow_hyphen_values = true)]
    pub qubits: Vec<[ComplexSpec; 2]>,
    /// Detection angle: balanced, unbalanced, pi/3, 1.047... (repeatable for tables).
    #[arg(long, value_parser = parse_setting)]
    pub zeta: Vec<HeterodyneSetting>,
    /// Leave the simple (no detection) column out of a table.
    #[arg(long)]
    pub no_simple: bool,
    /// Copy counts N and M.
    #[arg(long, num_args = 2, value_names = ["N", "M"])]
    pub copies: Option<Vec<usize>>,
    /// Fock cutoff of the core states.
    #[arg(long)]
    pub cutoff: Option<usize>,
    #[arg(long)]
    pub photons: Option<usize>,
    #[arg(long)]
    pub modes: Option<usize>,
    /// Interferometer gate THETA,PHI,LAMBDA; give one for all modes or one per mode.
    #[arg(long = "u3", value_parser = parse_u3, allow_hyphen_values = true)]
    pub interferometer: Vec<U3Params>,
    /// ideal-output or input-core.
    #[arg(long, value_parser = parse_kebab::<WitnessTarget>)]
    pub witness_target: Option<WitnessTarget>,
    /// Shots per setting, or "exact".
    #[arg(long, value_parser = parse_shots)]
    pub shots: Option<Shots>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Depolarizing probability after every gate.
    #[arg(long, value_parser = parse_probability)]
    pub depolarizing: Option<f64>,
    #[arg(long = "depolarizing-1q", value_parser = parse_probability)]
    pub depolarizing_1q: Option<f64>,
    #[arg(long = "depolarizing-2q", value_parser = parse_probability)]
    pub depolarizing_2q: Option<f64>,
    /// Symmetric readout bit-flip probability.
    #[arg(long, value_parser = parse_probability)]
    pub readout_flip: Option<f64>,
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Project reconstructions onto physical states before scoring.
    #[arg(long)]
    pub project: bool,
    /// post-select or trace-out.
    #[arg(long, value_parser = parse_kebab::<AncillaMode>)]
    pub ancilla: Option<AncillaMode>,
    /// Circuit JSON file for tomography.
    #[arg(long)]
    pub circuit: Option<PathBuf>,
    /// Comma-separated qubits to reconstruct.
    #[arg(long, value_delimiter = ',')]
    pub measure: Option<Vec<usize>>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexSpec {
    Value(Complex64),
    Real(f64),
    Text(#[serde(deserialize_with = "complex_text")] Complex64),
}

fn complex_text<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
    let s = String::deserialize(d)?;
    parse_complex(&s).map_err(serde::de::Error::custom)
}

impl ComplexSpec {
    fn value(self) -> Complex64 {
        match self {
            Self::Value(c) | Self::Text(c) => c,
            Self::Real(r) => Complex64::new(r, 0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T> OneOrMany<T> {
    fn into_vec(self) -> Vec<T> {
        match self {
            Self::One(t) => vec![t],
            Self::Many(v) => v,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Number(u64),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CircuitSpec {
    Inline(Circuit),
    Path(PathBuf),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct NoisePatch {
    depolarizing_prob_1q: Option<f64>,
    depolarizing_prob_2q: Option<f64>,
    readout_flip_prob: Option<f64>,
}

/// Shape of a JSON configuration file. Every key is optional except
/// `command`, which may instead come from the command line.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    command: Option<CommandName>,
    initial: Option<Scalar>,
    alpha: Option<ComplexSpec>,
    beta: Option<ComplexSpec>,
    qubits: Option<Vec<[ComplexSpec; 2]>>,
    zeta: Option<OneOrMany<HeterodyneSetting>>,
    simple: Option<bool>,
    copies: Option<[usize; 2]>,
    cutoff: Option<usize>,
    photons: Option<usize>,
    modes: Option<usize>,
    interferometer: Option<OneOrMany<U3Params>>,
    witness_target: Option<WitnessTarget>,
    shots: Option<Shots>,
    seed: Option<u64>,
    noise: Option<NoisePatch>,
    threshold: Option<f64>,
    project: Option<bool>,
    ancilla: Option<AncillaMode>,
    circuit: Option<CircuitSpec>,
    measure: Option<Vec<usize>>,
    out: Option<PathBuf>,
}

impl RawConfig {
    fn present_keys(&self) -> Vec<&'static str> {
        let mut keys = Vec::new();
        let mut mark = |set: bool, key| {
            if set {
                keys.push(key)
            }
        };
        mark(self.initial.is_some(), "initial");
        mark(self.alpha.is_some(), "alpha");
        mark(self.beta.is_some(), "beta");
        mark(self.qubits.is_some(), "qubits");
        mark(self.zeta.is_some(), "zeta");
        mark(self.simple.is_some(), "simple");
        mark(self.copies.is_some(), "copies");
        mark(self.cutoff.is_some(), "cutoff");
        mark(self.photons.is_some(), "photons");
        mark(self.modes.is_some(), "modes");
        mark(self.interferometer.is_some(), "interferometer");
        mark(self.witness_target.is_some(), "witness_target");
        mark(self.shots.is_some(), "shots");
        mark(self.seed.is_some(), "seed");
        mark(self.noise.is_some(), "noise");
        mark(self.threshold.is_some(), "threshold");
        mark(self.project.is_some(), "project");
        mark(self.ancilla.is_some(), "ancilla");
        mark(self.circuit.is_some(), "circuit");
        mark(self.measure.is_some(), "measure");
        mark(self.out.is_some(), "out");
        keys
    }

    /// Command-line values override file values key by key.
    fn overlay(mut self, f: Flags) -> Self {
        fn set<T>(slot: &mut Option<T>, v: Option<T>) {
            if v.is_some() {
                *slot = v;
            }
        }
        set(&mut self.initial, f.initial.map(Scalar::Text));
        set(&mut self.alpha, f.alpha.map(ComplexSpec::Value));
        set(&mut self.beta, f.beta.map(ComplexSpec::Value));
        set(&mut self.qubits, (!f.qubits.is_empty()).then_some(f.qubits));
        set(&mut self.zeta, (!f.zeta.is_empty()).then_some(OneOrMany::Many(f.zeta)));
        set(&mut self.simple, f.no_simple.then_some(false));
        set(&mut self.copies, f.copies.map(|v| [v[0], v[1]]));
        set(&mut self.cutoff, f.cutoff);
        set(&mut self.photons, f.photons);
        set(&mut self.modes, f.modes);
        set(&mut self.interferometer, (!f.interferometer.is_empty()).then_some(OneOrMany::Many(f.interferometer)));
        set(&mut self.witness_target, f.witness_target);
        set(&mut self.shots, f.shots);
        set(&mut self.seed, f.seed);
        set(&mut self.threshold, f.threshold);
        set(&mut self.project, f.project.then_some(true));
        set(&mut self.ancilla, f.ancilla);
        set(&mut self.circuit, f.circuit.map(CircuitSpec::Path));
        set(&mut self.measure, f.measure);
        set(&mut self.out, f.out);
        let noise_flags = [f.depolarizing, f.depolarizing_1q, f.depolarizing_2q, f.readout_flip];
        if noise_flags.iter().any(Option::is_some) {
            let mut n = self.noise.unwrap_or_default();
            set(&mut n.depolarizing_prob_1q, f.depolarizing);
            set(&mut n.depolarizing_prob_2q, f.depolarizing);
            set(&mut n.depolarizing_prob_1q, f.depolarizing_1q);
            set(&mut n.depolarizing_prob_2q, f.depolarizing_2q);
            set(&mut n.readout_flip_prob, f.readout_flip);
            self.noise = Some(n);
        }
        self
    }
}

/// What to run, fully validated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Experiment {
    Protocol1 {
        initial: QubitPrep,
        setting: HeterodyneSetting,
        plan: CopyPlan,
    },
    Protocol2 {
        initial: Vec<QubitPrep>,
        setting: HeterodyneSetting,
        plan: CopyPlan,
        witness_target: WitnessTarget,
    },
    Protocol3 {
        photons: usize,
        modes: usize,
        interferometer: Vec<U3Params>,
        setting: HeterodyneSetting,
        plan: CopyPlan,
        witness_target: WitnessTarget,
    },
    QkdSingle {
        initial: u8,
        columns: Vec<QkdMode>,
    },
    QkdBell {
        columns: Vec<QkdMode>,
    },
    Tomography {
        circuit: Circuit,
        measure: Vec<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub shots: Shots,
    pub seed: u64,
    pub noise: NoiseModel,
    pub ancilla: AncillaMode,
    pub project: bool,
    /// Protocol threshold, or the override for every table column.
    pub threshold: Option<f64>,
    pub out: PathBuf,
}

impl ExperimentConfig {
    pub fn command(&self) -> CommandName {
        match self.experiment {
            Experiment::Protocol1 { .. } => CommandName::Protocol1,
            Experiment::Protocol2 { .. } => CommandName::Protocol2,
            Experiment::Protocol3 { .. } => CommandName::Protocol3,
            Experiment::QkdSingle { .. } => CommandName::QkdSingle,
            Experiment::QkdBell { .. } => CommandName::QkdBell,
            Experiment::Tomography { .. } => CommandName::Tomography,
        }
    }
}

/// Parses command-line tokens (program name first), reads the `--config`
/// file if one is given, and validates the merged result.
pub fn parse_config<I, T>(args: I) -> Result<ExperimentConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args)?;
    let file = match &cli.config {
        Some(path) => read_config_file(path)?,
        None => RawConfig::default(),
    };
    let raw = match cli.command {
        Some(cmd) => {
            let (name, flags) = cmd.split();
            if let Some(from_file) = file.command {
                if from_file != name {
                    return Err(CliError::Usage(format!(
                        "command line asks for {} but the config file is for {}",
                        name.as_str(),
                        from_file.as_str()
                    )));
                }
            }
            RawConfig {
                command: Some(name),
                ..file
            }
            .overlay(flags)
        }
        None => file,
    };
    validate(raw)
}

fn read_config_file(path: &Path) -> Result<RawConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::ConfigRead {
        path: path.to_path_buf(),
        source,
    })?;
    let mut raw: RawConfig = serde_json::from_str(&text).map_err(|e| CliError::ConfigSyntax {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    // Relative circuit paths in a file are relative to the file.
    if let (Some(CircuitSpec::Path(p)), Some(dir)) = (&raw.circuit, path.parent()) {
        if p.is_relative() {
            raw.circuit = Some(CircuitSpec::Path(dir.join(p)));
        }
    }
    Ok(raw)
}

fn invalid(key: &str, message: impl Into<String>) -> CliError {
    CliError::InvalidValue {
        key: key.to_string(),
        message: message.into(),
    }
}

fn core(key: &'static str) -> impl Fn(hetverify::Error) -> CliError {
    move |e| invalid(key, e.to_string())
}

fn validate(raw: RawConfig) -> Result<ExperimentConfig, CliError> {
    let command = raw
        .command
        .ok_or_else(|| CliError::Usage("no command given (use a subcommand or a config file with \"command\")".into()))?;
    for key in raw.present_keys() {
        if !command.accepts(key) {
            return Err(CliError::NotApplicable {
                key: key.to_string(),
                command: command.as_str(),
            });
        }
    }

    let noise = match raw.noise {
        Some(n) => NoiseModel {
            depolarizing_prob_1q: n.depolarizing_prob_1q.unwrap_or(0.0),
            depolarizing_prob_2q: n.depolarizing_prob_2q.unwrap_or(0.0),
            readout_flip_prob: n.readout_flip_prob.unwrap_or(0.0),
        },
        None => NoiseModel::default(),
    };
    noise.validate().map_err(core("noise"))?;
    let shots = raw.shots.unwrap_or_default();
    shots.validate().map_err(core("shots"))?;
    if let Some(t) = raw.threshold {
        if !(0.0..=1.0).contains(&t) {
            return Err(invalid("threshold", format!("{t} is outside [0, 1]")));
        }
    }

    let single_setting = |default: HeterodyneSetting| -> Result<HeterodyneSetting, CliError> {
        match raw.zeta.clone().map(OneOrMany::into_vec) {
            None => Ok(default),
            Some(v) if v.len() == 1 => Ok(v[0]),
            Some(v) => Err(invalid("zeta", format!("expected one angle, got {}", v.len()))),
        }
    };
    let plan = |default: (usize, usize)| -> Result<CopyPlan, CliError> {
        let [n, m] = raw.copies.unwrap_or([default.0, default.1]);
        let cutoff = raw.cutoff.unwrap_or(2);
        CopyPlan::new(n, m, cutoff).map_err(core("copies"))
    };
    let initial_text = raw.initial.as_ref().map(|s| match s {
        Scalar::Number(n) => n.to_string(),
        Scalar::Text(t) => t.trim().to_ascii_lowercase(),
    });

    let experiment = match command {
        CommandName::Protocol1 => {
            let superposition = match (raw.alpha, raw.beta) {
                (Some(a), Some(b)) => Some(QubitPrep::superposition(a.value(), b.value()).map_err(core("alpha"))?),
                (None, None) => None,
                _ => return Err(invalid("alpha", "alpha and beta must be given together")),
            };
            let initial = match (initial_text.as_deref(), superposition) {
                (None | Some("superposition"), Some(p)) => p,
                (Some("superposition"), None) => return Err(invalid("initial", "superposition needs alpha and beta")),
                (None | Some("1" | "one"), None) => QubitPrep::One,
                (Some("1" | "one"), Some(_)) => return Err(invalid("alpha", "alpha/beta only apply to a superposition input")),
                (Some(other), _) => return Err(invalid("initial", format!("{other:?} (expected 1 or superposition)"))),
            };
            Experiment::Protocol1 {
                initial,
                setting: single_setting(HeterodyneSetting::Balanced)?,
                plan: plan((5, 5))?,
            }
        }
        CommandName::Protocol2 => {
            let initial = match (&initial_text, &raw.qubits) {
                (Some(_), Some(_)) => return Err(invalid("qubits", "give either initial bits or per-qubit superpositions")),
                (None, Some(q)) => q
                    .iter()
                    .map(|[a, b]| QubitPrep::superposition(a.value(), b.value()))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(core("qubits"))?,
                (bits, None) => bits_to_preps(bits.as_deref().unwrap_or("1100"))?,
            };
            if initial.is_empty() || initial.len() > MAX_MODES {
                return Err(invalid("initial", format!("need 1 to {MAX_MODES} qubits, got {}", initial.len())));
            }
            Experiment::Protocol2 {
                initial,
                setting: single_setting(HeterodyneSetting::Balanced)?,
                plan: plan((5, 5))?,
                witness_target: raw.witness_target.unwrap_or(WitnessTarget::IdealOutput),
            }
        }
        CommandName::Protocol3 => {
            let photons = raw.photons.unwrap_or(2);
            let modes = raw.modes.unwrap_or(4);
            check_modes(photons, modes).map_err(core("modes"))?;
            let interferometer = match raw.interferometer.clone().map(OneOrMany::into_vec) {
                None => vec![U3Params::half_turn(); modes],
                Some(v) if v.len() == 1 => vec![v[0]; modes],
                Some(v) if v.len() == modes => v,
                Some(v) => return Err(invalid("interferometer", format!("expected 1 or {modes} gates, got {}", v.len()))),
            };
            for u in &interferometer {
                u.validate().map_err(core("interferometer"))?;
            }
            Experiment::Protocol3 {
                photons,
                modes,
                interferometer,
                setting: single_setting(HeterodyneSetting::Unbalanced)?,
                plan: plan((1, 1))?,
                witness_target: raw.witness_target.unwrap_or(WitnessTarget::InputCore),
            }
        }
        CommandName::QkdSingle | CommandName::QkdBell => {
            let mut columns: Vec<QkdMode> = match raw.zeta.clone().map(OneOrMany::into_vec) {
                None => QkdMode::standard_columns().into_iter().filter(|m| *m != QkdMode::Simple).collect(),
                Some(v) => v.into_iter().map(|s| QkdMode::Heterodyne(s.zeta())).collect(),
            };
            if raw.simple.unwrap_or(true) {
                columns.push(QkdMode::Simple);
            }
            if columns.is_empty() {
                return Err(invalid("simple", "the table would have no columns"));
            }
            if command == CommandName::QkdBell {
                Experiment::QkdBell { columns }
            } else {
                let initial = match initial_text.as_deref() {
                    None | Some("0") => 0,
                    Some("1") => 1,
                    Some(other) => return Err(invalid("initial", format!("{other:?} (expected 0 or 1)"))),
                };
                Experiment::QkdSingle { initial, columns }
            }
        }
        CommandName::Tomography => {
            let circuit = match raw.circuit {
                None => return Err(invalid("circuit", "tomography needs a circuit")),
                Some(CircuitSpec::Inline(c)) => c,
                Some(CircuitSpec::Path(path)) => {
                    let text = fs::read_to_string(&path).map_err(|source| CliError::ConfigRead { path: path.clone(), source })?;
                    Circuit::from_json(&text).map_err(|e| CliError::ConfigSyntax {
                        path: path.clone(),
                        message: e.to_string(),
                    })?
                }
            };
            let measure = raw.measure.clone().unwrap_or_else(|| circuit.system_qubits());
            if measure.is_empty() || measure.len() > hetverify::tomography::MAX_SWEEP_QUBITS {
                return Err(invalid("measure", format!("need 1 to 4 qubits, got {}", measure.len())));
            }
            for &q in &measure {
                if q >= circuit.num_qubits() || Some(q) == circuit.ancilla() {
                    return Err(invalid("measure", format!("qubit {q} is not a system qubit of the circuit")));
                }
            }
            Experiment::Tomography { circuit, measure }
        }
    };

    let is_protocol = matches!(command, CommandName::Protocol1 | CommandName::Protocol2 | CommandName::Protocol3);
    Ok(ExperimentConfig {
        experiment,
        shots,
        seed: raw.seed.unwrap_or(0),
        noise,
        ancilla: raw.ancilla.unwrap_or_default(),
        project: raw.project.unwrap_or(false),
        threshold: raw.threshold.or(is_protocol.then_some(DEFAULT_THRESHOLD)),
        out: raw.out.unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR)),
    })
}

fn bits_to_preps(bits: &str) -> Result<Vec<QubitPrep>, CliError> {
    bits.chars()
        .map(|ch| match ch {
            '0' => Ok(QubitPrep::Zero),
            '1' => Ok(QubitPrep::One),
            _ => Err(invalid("initial", format!("{bits:?} is not a bit string"))),
        })
        .collect()
}
