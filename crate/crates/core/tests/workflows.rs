use hetverify::circuit::{NoiseModel, ShotTable};
use hetverify::heterodyne::HeterodyneSetting;
use hetverify::linalg::c;
use hetverify::protocols::{
    protocol1_run, protocol2_run, protocol3_verify, CopyPlan, RunOptions, Verdict, WitnessTarget,
};
use hetverify::qkd::{qkd_table, QkdKind, QkdMode};
use hetverify::reference::{SIMULATOR_BELL, SIMULATOR_SINGLE_ZERO};
use hetverify::tomography::{
    exact_measured_state, reconstruct_multi_qubit, sweep_shot_tables, tomography_sweep, AncillaMode, Shots, SweepOptions,
};
use hetverify::topology::{boson_sampling_circuit, multi_mode_circuit, single_mode_circuit, QubitPrep, U3Params};
use hetverify::trace_distance;

const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn sampled(seed: u64) -> RunOptions {
    RunOptions {
        shots: Shots::Finite(8192),
        seed,
        ..RunOptions::default()
    }
}

#[test]
fn single_mode_shot_noise_envelope() {
    let r = protocol1_run(&QubitPrep::One, HeterodyneSetting::Unbalanced, &CopyPlan::default(), &sampled(7)).unwrap();
    assert_eq!(r.fidelities.len(), 10);
    assert!(r.mean >= 0.99 && r.std <= 0.01, "mean {} std {}", r.mean, r.std);
}

#[test]
fn single_mode_mean_tracks_exact_value() {
    let prep = QubitPrep::superposition(c(0.6, 0.0), c(0.0, 0.8)).unwrap();
    let third: HeterodyneSetting = "pi/3".parse().unwrap();
    let exact = protocol1_run(&prep, third, &CopyPlan::default(), &RunOptions::exact()).unwrap().mean;
    for seed in 0..20 {
        let r = protocol1_run(&prep, third, &CopyPlan::default(), &sampled(seed)).unwrap();
        let band = 3.0 * r.std / (r.fidelities.len() as f64).sqrt();
        assert!(r.std > 0.0);
        assert!((r.mean - exact).abs() <= band, "seed {seed}: {} vs {exact} (band {band})", r.mean);
    }
}

#[test]
fn multi_mode_exact_examples() {
    let preps = [QubitPrep::One, QubitPrep::One, QubitPrep::Zero, QubitPrep::Zero];
    let plan = CopyPlan::new(1, 1, 2).unwrap();
    let r = protocol2_run(&preps, HeterodyneSetting::Balanced, &plan, WitnessTarget::IdealOutput, &RunOptions::exact()).unwrap();
    assert!((r.global_fidelity - 1.0).abs() < 1e-9);
    assert!((r.witness - 1.0).abs() < 1e-9);

    let supers: Vec<QubitPrep> = [(0.6, 0.8), (0.8, 0.6), (H, H), (1.0, 0.0)]
        .iter()
        .map(|&(a, b)| QubitPrep::superposition(c(a, 0.0), c(0.0, b)).unwrap())
        .collect();
    let s = protocol2_run(&supers, HeterodyneSetting::Unbalanced, &plan, WitnessTarget::IdealOutput, &RunOptions::exact()).unwrap();
    for g in &s.groups {
        assert!((g.mean_fidelity - 1.0).abs() < 1e-9 && (g.mean_witness - 1.0).abs() < 1e-9);
    }
}

#[test]
fn boson_sampling_accepts_when_noiseless_and_rejects_under_noise() {
    let u = [U3Params::half_turn(); 4];
    let plan = CopyPlan::new(1, 1, 2).unwrap();
    for setting in [HeterodyneSetting::Unbalanced, HeterodyneSetting::Balanced] {
        let r = protocol3_verify(2, 4, &u, setting, &plan, WitnessTarget::IdealOutput, &RunOptions::exact()).unwrap();
        assert!((r.global_fidelity - 1.0).abs() < 1e-9);
        assert!(r.trace_distance < 1e-9 && r.tvd < 1e-9);
        assert_eq!(r.verdict, Verdict::Accept);
        assert!(r.bound_checks.iter().all(|b| b.holds));

        let fock = protocol3_verify(2, 4, &u, setting, &plan, WitnessTarget::InputCore, &RunOptions::exact()).unwrap();
        for f in &fock.copies[0].reduced_fidelities {
            assert!((f - H).abs() < 1e-6);
        }
        assert!((fock.witness - (1.0 - 4.0 * (1.0 - H))).abs() < 1e-6);
    }

    let noisy = RunOptions {
        noise: NoiseModel::depolarizing(0.3),
        ..RunOptions::exact()
    };
    let r = protocol3_verify(2, 4, &u, HeterodyneSetting::Unbalanced, &plan, WitnessTarget::IdealOutput, &noisy).unwrap();
    assert!(r.global_fidelity < 0.6, "{}", r.global_fidelity);
    assert_eq!(r.verdict, Verdict::Reject);
}

#[test]
fn bound_chains_hold_on_mildly_noisy_runs() {
    let u = [U3Params::half_turn(); 4];
    let plan = CopyPlan::new(2, 2, 2).unwrap();
    for p in [0.005, 0.02] {
        let opts = RunOptions {
            noise: NoiseModel::depolarizing(p),
            project: true,
            ..sampled(3)
        };
        let r = protocol3_verify(2, 4, &u, HeterodyneSetting::Unbalanced, &plan, WitnessTarget::IdealOutput, &opts).unwrap();
        for g in &r.groups {
            assert!(g.bound_checks.iter().all(|b| b.holds), "p={p}: {:?}", g.bound_checks);
        }
    }
}

#[test]
fn runs_are_seed_deterministic() {
    let tilt: U3Params = serde_json::from_str(r#"{"theta":"pi/3","phi":"pi/4","lambda":0}"#).unwrap();
    let u = [tilt; 2];
    let plan = CopyPlan::new(1, 1, 2).unwrap();
    let third: HeterodyneSetting = "pi/3".parse().unwrap();
    let run = |seed| protocol3_verify(1, 2, &u, third, &plan, WitnessTarget::IdealOutput, &sampled(seed)).unwrap();
    assert_eq!(run(11), run(11));
    assert_ne!(run(11).fidelities, run(12).fidelities);
}

#[test]
fn exact_tomography_recovers_layout_states() {
    let third: HeterodyneSetting = "pi/3".parse().unwrap();
    let circuits = vec![
        (single_mode_circuit(&QubitPrep::One, third).unwrap(), vec![0]),
        (multi_mode_circuit(&[QubitPrep::One, QubitPrep::Zero], HeterodyneSetting::Unbalanced).unwrap(), vec![0, 1]),
        (boson_sampling_circuit(2, 3, &[U3Params::half_turn(); 3], third).unwrap(), vec![0, 1, 2]),
    ];
    for (circ, system) in circuits {
        for mode in [AncillaMode::PostSelect, AncillaMode::TraceOut] {
            let opts = SweepOptions { ancilla: mode, ..SweepOptions::exact() };
            let rho = reconstruct_multi_qubit(&tomography_sweep(&circ, &system, &opts).unwrap()).unwrap();
            let truth = exact_measured_state(&circ, &system, &NoiseModel::default(), mode).unwrap();
            assert!(trace_distance(&rho, &truth).unwrap() < 1e-10);
        }
    }
}

#[test]
fn shot_tables_round_trip_through_csv() {
    let circ = single_mode_circuit(&QubitPrep::One, HeterodyneSetting::Unbalanced).unwrap();
    let tables = sweep_shot_tables(&circ, &[0], &SweepOptions::sampled(512, 5)).unwrap();
    assert_eq!(tables.len(), 3);
    let mut buf = Vec::new();
    ShotTable::write_csv(&tables, &mut buf).unwrap();
    assert_eq!(ShotTable::read_csv(buf.as_slice()).unwrap(), tables);
}

#[test]
fn sampled_tables_match_simulator_references() {
    let opts = SweepOptions::sampled(8192, 2024);
    let single = qkd_table(QkdKind::Single { initial: 0 }, &QkdMode::standard_columns(), &opts).unwrap();
    for cell in SIMULATOR_SINGLE_ZERO.compare(&single).unwrap() {
        if !cell.anomalous {
            assert!(cell.diff.abs() <= 0.02, "{cell:?}");
        }
    }
    let bell = qkd_table(QkdKind::Bell, &QkdMode::standard_columns(), &opts).unwrap();
    for cell in SIMULATOR_BELL.compare(&bell).unwrap() {
        assert!(cell.diff.abs() <= 0.02, "{cell:?}");
    }
    assert_eq!(bell, qkd_table(QkdKind::Bell, &QkdMode::standard_columns(), &opts).unwrap());
}
