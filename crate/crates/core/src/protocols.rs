//! Copy-based verification runs.
//!
//! Every protocol simulates `N` copies with the chosen detection setting and
//! `M` further copies with its complement, reconstructs each copy by
//! tomography and compares it with the ideal (noiseless) output of the same
//! circuit. The first group decides the verdict: accept iff its mean
//! fidelity is at least the threshold.
//!
//! The witness `W = 1 − Σ_i (1 − F_i)` combines single-qubit fidelities. With
//! squared fidelities it is a lower bound on the global fidelity by the union
//! bound; with the root fidelities used here that holds for typical states
//! but adversarial ones can break it (see the tests).

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, NoiseModel};
use crate::error::{Error, Result};
use crate::heterodyne::HeterodyneSetting;
use crate::metrics::{computational_tvd, fidelity, project_to_physical, trace_distance};
use crate::rng::derive_seed;
use crate::state::{DensityMatrix, StateVector};
use crate::tomography::{
    exact_measured_state, reconstruct_multi_qubit, reconstruct_single_qubit, reduced_fidelities, tomography_sweep,
    AncillaMode, Shots, SweepOptions,
};
use crate::topology::{
    boson_sampling_circuit, check_modes, detected_qubit_state, fock_preps, multi_mode_circuit, single_mode_circuit,
    QubitPrep, U3Params, MAX_MODES,
};

/// Default acceptance threshold.
pub const DEFAULT_THRESHOLD: f64 = 0.6;

/// Slack used when evaluating the inequality chains.
pub const BOUND_SLACK: f64 = 1e-9;

/// `N` copies with the chosen setting, `M` with its complement, and the Fock
/// cutoff `C` of the core states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CopyPlan {
    pub n: usize,
    pub m: usize,
    pub cutoff: usize,
}

impl CopyPlan {
    pub fn new(n: usize, m: usize, cutoff: usize) -> Result<Self> {
        let plan = Self { n, m, cutoff };
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.m == 0 {
            return Err(Error::InvalidPlan(format!("copy counts must be at least 1 (got N={}, M={})", self.n, self.m)));
        }
        if !(1..=2).contains(&self.cutoff) {
            return Err(Error::InvalidPlan(format!("qubit core states need a cutoff of 1 or 2, got {}", self.cutoff)));
        }
        Ok(())
    }

    pub fn total(&self) -> usize {
        self.n + self.m
    }

    fn check_preps(&self, preps: &[QubitPrep]) -> Result<()> {
        for (i, p) in preps.iter().enumerate() {
            if p.levels()? > self.cutoff {
                return Err(Error::InvalidPlan(format!(
                    "qubit {i} occupies two levels but the cutoff is {}",
                    self.cutoff
                )));
            }
        }
        Ok(())
    }
}

/// Single-mode default: five copies per group.
impl Default for CopyPlan {
    fn default() -> Self {
        Self { n: 5, m: 5, cutoff: 2 }
    }
}

/// Per-qubit states the witness compares against.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessTarget {
    /// The single-qubit states of the ideal output.
    #[default]
    IdealOutput,
    /// The prepared input states (Fock labels for boson sampling).
    InputCore,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Accept,
    Reject,
}

impl Verdict {
    /// Accept iff `fidelity >= threshold`.
    pub fn judge(fidelity: f64, threshold: f64) -> Self {
        if fidelity >= threshold {
            Verdict::Accept
        } else {
            Verdict::Reject
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub lhs: f64,
    pub mid: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl BoundCheck {
    fn new(name: &str, lhs: f64, mid: f64, rhs: f64) -> Self {
        Self {
            name: name.to_string(),
            lhs,
            mid,
            rhs,
            holds: lhs <= mid + BOUND_SLACK && mid <= rhs + BOUND_SLACK,
        }
    }
}

/// The two chains `1 − F ≤ D ≤ √(1 − F²)` and `TVD ≤ D ≤ √(1 − F)`.
/// A failing chain is reported with `holds = false`; nothing is raised.
/// For `F > 1` the square-root bounds are taken as 0.
pub fn bound_check(f: f64, d: f64, tvd: f64) -> Vec<BoundCheck> {
    vec![
        BoundCheck::new("fuchs-van-de-graaf", 1.0 - f, d, (1.0 - f * f).max(0.0).sqrt()),
        BoundCheck::new("tvd-trace-distance", tvd, d, (1.0 - f).max(0.0).sqrt()),
    ]
}

/// `W = 1 − Σ_i (1 − F_i)`.
pub fn fidelity_witness(per_qubit_fidelities: &[f64]) -> Result<f64> {
    if per_qubit_fidelities.is_empty() {
        return Err(Error::EmptyWitness);
    }
    Ok(1.0 - per_qubit_fidelities.iter().map(|f| 1.0 - f).sum::<f64>())
}

/// Shot budget, randomness, noise and decision parameters shared by all
/// protocol runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunOptions {
    pub shots: Shots,
    pub seed: u64,
    pub noise: NoiseModel,
    pub ancilla: AncillaMode,
    /// Project each reconstruction onto the physical states before scoring.
    pub project: bool,
    pub threshold: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            shots: Shots::default(),
            seed: 0,
            noise: NoiseModel::default(),
            ancilla: AncillaMode::default(),
            project: false,
            threshold: DEFAULT_THRESHOLD,
        }
    }
}

impl RunOptions {
    pub fn exact() -> Self {
        Self {
            shots: Shots::Exact,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(Error::InvalidThreshold(self.threshold));
        }
        self.noise.validate()?;
        self.shots.validate()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CopyResult {
    /// 1-based position in the run.
    pub copy: usize,
    /// 0 for the `N` group, 1 for the `M` group.
    pub group: usize,
    pub setting: HeterodyneSetting,
    pub fidelity: f64,
    pub reduced_fidelities: Vec<f64>,
    pub witness: f64,
    pub trace_distance: f64,
    pub tvd: f64,
    /// Whether the (unprojected) reconstruction was a valid state.
    pub physical: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub setting: HeterodyneSetting,
    pub copies: usize,
    pub mean_fidelity: f64,
    pub std_fidelity: f64,
    pub mean_witness: f64,
    pub mean_trace_distance: f64,
    pub mean_tvd: f64,
    pub verdict: Verdict,
    pub bound_checks: Vec<BoundCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolReport {
    pub protocol: u8,
    /// Fidelity of every copy in run order.
    pub fidelities: Vec<f64>,
    /// Mean and sample standard deviation over all copies.
    pub mean: f64,
    pub std: f64,
    /// The first group's mean fidelity, witness and distances.
    pub global_fidelity: f64,
    pub witness: f64,
    pub trace_distance: f64,
    pub tvd: f64,
    pub threshold: f64,
    pub verdict: Verdict,
    pub bound_checks: Vec<BoundCheck>,
    pub groups: Vec<GroupSummary>,
    pub copies: Vec<CopyResult>,
    pub witness_target: WitnessTarget,
    pub ancilla: AncillaMode,
    pub projected: bool,
    pub shots: Shots,
}

/// Arithmetic mean and sample (`n − 1`) standard deviation; the deviation of
/// a single value is 0.
pub fn mean_and_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, 0.0);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

struct Layout<'a> {
    protocol: u8,
    system: Vec<usize>,
    build: &'a dyn Fn(HeterodyneSetting) -> Result<Circuit>,
    witness_targets: &'a dyn Fn(HeterodyneSetting) -> Result<Vec<StateVector>>,
    witness_target: WitnessTarget,
}

fn reconstruct(circuit: &Circuit, system: &[usize], sweep: &SweepOptions) -> Result<DensityMatrix> {
    let ex = tomography_sweep(circuit, system, sweep)?;
    if system.len() == 1 {
        reconstruct_single_qubit(&ex)
    } else {
        reconstruct_multi_qubit(&ex)
    }
}

fn run_copies(layout: &Layout<'_>, setting: HeterodyneSetting, plan: &CopyPlan, opts: &RunOptions) -> Result<ProtocolReport> {
    plan.validate()?;
    opts.validate()?;
    let mut copies = Vec::with_capacity(plan.total());
    let mut groups = Vec::with_capacity(2);
    for (group, (s, count)) in [(setting, plan.n), (setting.complement(), plan.m)].into_iter().enumerate() {
        let circuit = (layout.build)(s)?;
        let ideal = exact_measured_state(&circuit, &layout.system, &NoiseModel::default(), AncillaMode::PostSelect)?;
        let targets = (layout.witness_targets)(s)?;
        let start = copies.len();
        for _ in 0..count {
            let index = copies.len();
            let sweep = SweepOptions {
                shots: opts.shots,
                seed: derive_seed(opts.seed, index as u64),
                noise: opts.noise,
                ancilla: opts.ancilla,
            };
            let raw = reconstruct(&circuit, &layout.system, &sweep)?;
            let physical = raw.is_physical();
            let a = if opts.project { project_to_physical(&raw)? } else { raw };
            let reduced = reduced_fidelities(&a, &targets)?;
            copies.push(CopyResult {
                copy: index + 1,
                group,
                setting: s,
                fidelity: fidelity(&a, &ideal)?,
                witness: fidelity_witness(&reduced)?,
                reduced_fidelities: reduced,
                trace_distance: trace_distance(&a, &ideal)?,
                tvd: computational_tvd(&a, &ideal)?,
                physical,
            });
        }
        let part = &copies[start..];
        let collect = |f: fn(&CopyResult) -> f64| part.iter().map(f).collect::<Vec<_>>();
        let (mean_fidelity, std_fidelity) = mean_and_std(&collect(|c| c.fidelity));
        let mean_witness = mean_and_std(&collect(|c| c.witness)).0;
        let mean_trace_distance = mean_and_std(&collect(|c| c.trace_distance)).0;
        let mean_tvd = mean_and_std(&collect(|c| c.tvd)).0;
        groups.push(GroupSummary {
            setting: s,
            copies: count,
            mean_fidelity,
            std_fidelity,
            mean_witness,
            mean_trace_distance,
            mean_tvd,
            verdict: Verdict::judge(mean_fidelity, opts.threshold),
            bound_checks: bound_check(mean_fidelity, mean_trace_distance, mean_tvd),
        });
    }
    let fidelities: Vec<f64> = copies.iter().map(|c| c.fidelity).collect();
    let (mean, std) = mean_and_std(&fidelities);
    let first = groups[0].clone();
    Ok(ProtocolReport {
        protocol: layout.protocol,
        fidelities,
        mean,
        std,
        global_fidelity: first.mean_fidelity,
        witness: first.mean_witness,
        trace_distance: first.mean_trace_distance,
        tvd: first.mean_tvd,
        threshold: opts.threshold,
        verdict: first.verdict,
        bound_checks: first.bound_checks,
        groups,
        copies,
        witness_target: layout.witness_target,
        ancilla: opts.ancilla,
        projected: opts.project,
        shots: opts.shots,
    })
}

fn per_qubit_targets(preps: &[Vec<crate::circuit::Gate>], target: WitnessTarget, setting: HeterodyneSetting) -> Result<Vec<StateVector>> {
    preps
        .iter()
        .map(|gates| match target {
            WitnessTarget::IdealOutput => detected_qubit_state(gates, setting),
            WitnessTarget::InputCore => detected_qubit_state(gates, HeterodyneSetting::Balanced),
        })
        .collect()
}

/// Single-mode fidelity estimation on the two-qubit layout.
pub fn protocol1_run(initial: &QubitPrep, setting: HeterodyneSetting, plan: &CopyPlan, opts: &RunOptions) -> Result<ProtocolReport> {
    initial.validate()?;
    plan.check_preps(std::slice::from_ref(initial))?;
    let gates = vec![initial.gates(0)];
    let build = |s| single_mode_circuit(initial, s);
    let targets = |s| per_qubit_targets(&gates, WitnessTarget::IdealOutput, s);
    let layout = Layout {
        protocol: 1,
        system: vec![0],
        build: &build,
        witness_targets: &targets,
        witness_target: WitnessTarget::IdealOutput,
    };
    run_copies(&layout, setting, plan, opts)
}

/// Multi-mode witness estimation: one preparation per system qubit (at most
/// four), full tomography on the system register.
pub fn protocol2_run(
    initial: &[QubitPrep],
    setting: HeterodyneSetting,
    plan: &CopyPlan,
    witness: WitnessTarget,
    opts: &RunOptions,
) -> Result<ProtocolReport> {
    if initial.is_empty() || initial.len() > MAX_MODES {
        return Err(Error::InvalidModes {
            photons: 0,
            modes: initial.len(),
        });
    }
    plan.check_preps(initial)?;
    let gates: Vec<_> = initial.iter().map(|p| p.gates(0)).collect();
    let build = |s| multi_mode_circuit(initial, s);
    let targets = |s| per_qubit_targets(&gates, witness, s);
    let layout = Layout {
        protocol: 2,
        system: (0..initial.len()).collect(),
        build: &build,
        witness_targets: &targets,
        witness_target: witness,
    };
    run_copies(&layout, setting, plan, opts)
}

/// Boson-sampling verification: `photons` single photons in `modes` modes,
/// one `U3` per mode, detection, tomography and the threshold decision.
pub fn protocol3_verify(
    photons: usize,
    modes: usize,
    interferometer: &[U3Params],
    setting: HeterodyneSetting,
    plan: &CopyPlan,
    witness: WitnessTarget,
    opts: &RunOptions,
) -> Result<ProtocolReport> {
    check_modes(photons, modes)?;
    opts.validate()?;
    let fock = fock_preps(photons, modes);
    plan.check_preps(&fock)?;
    // Build once to validate the interferometer before any sampling.
    boson_sampling_circuit(photons, modes, interferometer, setting)?;
    let ideal_gates: Vec<_> = (0..modes)
        .map(|q| {
            let mut g = fock[q].gates(0);
            g.push(interferometer[q].gate(0));
            g
        })
        .collect();
    let fock_gates: Vec<_> = fock.iter().map(|p| p.gates(0)).collect();
    let build = |s| boson_sampling_circuit(photons, modes, interferometer, s);
    let targets = |s| match witness {
        WitnessTarget::IdealOutput => per_qubit_targets(&ideal_gates, WitnessTarget::IdealOutput, s),
        WitnessTarget::InputCore => per_qubit_targets(&fock_gates, WitnessTarget::InputCore, s),
    };
    let layout = Layout {
        protocol: 3,
        system: (0..modes).collect(),
        build: &build,
        witness_targets: &targets,
        witness_target: witness,
    };
    run_copies(&layout, setting, plan, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use crate::state::TensorProduct;

    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    // 0.7071 is the rounded published figure, on purpose.
    #[allow(clippy::approx_constant)]
    fn witness_examples() {
        assert_eq!(fidelity_witness(&[1.0; 4]).unwrap(), 1.0);
        assert!((fidelity_witness(&[0.9; 4]).unwrap() - 0.6).abs() < 1e-12);
        assert!((fidelity_witness(&[H; 4]).unwrap() - (1.0 - 4.0 * (1.0 - H))).abs() < 1e-12);
        assert!((fidelity_witness(&[0.7071; 4]).unwrap() + 0.1716).abs() < 1e-4);
        assert_eq!(fidelity_witness(&[]), Err(Error::EmptyWitness));
    }

    #[test]
    fn bound_check_examples() {
        let ideal = bound_check(1.0, 0.0, 0.0);
        assert!(ideal.iter().all(|b| b.holds && b.rhs == 0.0));
        let reported = bound_check(0.6918, 0.3722, 0.1514);
        assert!(reported.iter().all(|b| b.holds));
        assert!((reported[0].lhs - 0.3082).abs() < 1e-12);
        assert!((reported[0].rhs - 0.722_09).abs() < 1e-5);
        assert!((reported[1].rhs - 0.555_16).abs() < 1e-5);
        let broken = bound_check(0.9, 0.5, 0.1);
        assert!(!broken[0].holds);
        assert!((broken[0].rhs - 0.19f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn verdict_boundary_accepts() {
        assert_eq!(Verdict::judge(0.6, 0.6), Verdict::Accept);
        assert_eq!(Verdict::judge(0.6 - 1e-15, 0.6), Verdict::Reject);
    }

    #[test]
    fn sample_std() {
        assert_eq!(mean_and_std(&[0.5]), (0.5, 0.0));
        let (m, s) = mean_and_std(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn plan_validation() {
        assert!(CopyPlan::new(0, 5, 2).is_err());
        assert!(CopyPlan::new(5, 0, 2).is_err());
        assert!(CopyPlan::new(1, 1, 3).is_err());
        let p = CopyPlan::new(1, 1, 1).unwrap();
        assert!(protocol1_run(&QubitPrep::One, HeterodyneSetting::Balanced, &p, &RunOptions::exact()).is_err());
        assert!(protocol1_run(&QubitPrep::Zero, HeterodyneSetting::Balanced, &p, &RunOptions::exact()).is_ok());
    }

    #[test]
    fn noiseless_single_mode_is_perfect() {
        let plus_i = QubitPrep::superposition(c(H, 0.0), c(0.0, H)).unwrap();
        for prep in [QubitPrep::One, plus_i] {
            for s in [HeterodyneSetting::Balanced, HeterodyneSetting::Unbalanced] {
                let r = protocol1_run(&prep, s, &CopyPlan::default(), &RunOptions::exact()).unwrap();
                assert_eq!(r.fidelities.len(), 10);
                assert!(r.fidelities.iter().all(|f| (f - 1.0).abs() < 1e-9), "{:?}", r.fidelities);
                assert!(r.std < 1e-9);
                assert_eq!(r.verdict, Verdict::Accept);
            }
        }
    }

    #[test]
    fn input_core_witness_for_1100() {
        let preps = [QubitPrep::One, QubitPrep::One, QubitPrep::Zero, QubitPrep::Zero];
        let plan = CopyPlan::new(1, 1, 2).unwrap();
        let r = protocol2_run(&preps, HeterodyneSetting::Unbalanced, &plan, WitnessTarget::InputCore, &RunOptions::exact()).unwrap();
        assert!((r.global_fidelity - 1.0).abs() < 1e-9);
        for f in &r.copies[0].reduced_fidelities {
            assert!((f - H).abs() < 1e-9);
        }
        assert!((r.witness - (1.0 - 4.0 * (1.0 - H))).abs() < 1e-9);
        // Second group is balanced: the detection stage is the identity.
        assert!((r.groups[1].mean_witness - 1.0).abs() < 1e-9);
    }

    #[test]
    fn boson_sampling_rejects_bad_modes() {
        let plan = CopyPlan::new(1, 1, 2).unwrap();
        let u = [U3Params::half_turn(); 2];
        assert!(matches!(
            protocol3_verify(3, 2, &u, HeterodyneSetting::Unbalanced, &plan, WitnessTarget::InputCore, &RunOptions::exact()),
            Err(Error::InvalidModes { .. })
        ));
        let bad = RunOptions { threshold: 1.5, ..RunOptions::exact() };
        assert!(matches!(
            protocol3_verify(1, 2, &u, HeterodyneSetting::Unbalanced, &plan, WitnessTarget::InputCore, &bad),
            Err(Error::InvalidThreshold(_))
        ));
    }

    /// With root fidelities the witness is not a lower bound for every state:
    /// `√½|00⟩ + ½|01⟩ + ½|10⟩` against `|00⟩` has both marginals at
    /// fidelity `√¾`, so `W = 2√¾ − 1 ≈ 0.732` while `F = √½ ≈ 0.707`.
    /// The squared form `1 − Σ(1 − F_i²) = 0.5` stays below `F² = 0.5`.
    #[test]
    fn root_witness_can_exceed_fidelity() {
        let psi = StateVector::new(vec![c(H, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(0.0, 0.0)]).unwrap().to_density();
        let zero = StateVector::from_bits("0").unwrap();
        let target = zero.tensor(&zero).unwrap().to_density();
        let reduced = reduced_fidelities(&psi, &[zero.clone(), zero]).unwrap();
        let w = fidelity_witness(&reduced).unwrap();
        let f = fidelity(&psi, &target).unwrap();
        assert!((w - (2.0 * 0.75f64.sqrt() - 1.0)).abs() < 1e-12);
        assert!((f - H).abs() < 1e-12);
        assert!(w > f);
        let squared: Vec<f64> = reduced.iter().map(|x| x * x).collect();
        assert!(fidelity_witness(&squared).unwrap() <= f * f + 1e-12);
    }

    #[test]
    fn report_round_trips_through_json() {
        let plan = CopyPlan::new(2, 1, 2).unwrap();
        let opts = RunOptions { shots: Shots::Finite(256), seed: 5, ..RunOptions::default() };
        let r = protocol1_run(&QubitPrep::One, HeterodyneSetting::Unbalanced, &plan, &opts).unwrap();
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(serde_json::from_str::<ProtocolReport>(&json).unwrap(), r);
    }
}
