use std::fs;
use std::path::Path;
use std::process::Command;

use hetverify_cli::{parse_config, run_and_report, Outcome, ReportBundle};

fn hetverify(dir: &Path, args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_hetverify"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .output()
        .unwrap();
    (out.status.code().unwrap(), String::from_utf8_lossy(&out.stdout).into_owned() + &String::from_utf8_lossy(&out.stderr))
}

fn bundle(dir: &Path, name: &str) -> ReportBundle {
    serde_json::from_str(&fs::read_to_string(dir.join(name)).unwrap()).unwrap()
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(hetverify(d, &["protocol3", "--shots", "exact"]).0, 0);
    let (code, text) = hetverify(d, &["protocol3", "--shots", "exact", "--depolarizing", "0.3", "--witness-target", "ideal-output"]);
    assert_eq!(code, 2, "{text}");
    assert!(text.contains("Reject"));
    assert_eq!(hetverify(d, &["protocol1", "--copies", "0", "5"]).0, 1);
    assert_eq!(hetverify(d, &["protocol7"]).0, 1);
    assert_eq!(hetverify(d, &["protocol1", "--zeta", "pi/3/2"]).0, 1);
    assert_eq!(hetverify(d, &["tomography"]).0, 1);
    assert_eq!(hetverify(d, &["qkd-single", "--shots", "exact", "--threshold", "0.95", "--zeta", "pi/3"]).0, 2);

    // A plain file where the output directory should go: a runtime failure.
    let blocker = d.join("blocker");
    fs::write(&blocker, "").unwrap();
    assert_eq!(hetverify(&blocker, &["qkd-bell", "--shots", "exact"]).0, 3);
}

#[test]
fn protocol1_noiseless_files() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = hetverify(dir.path(), &["protocol1", "--shots", "exact"]);
    assert_eq!(code, 0);
    let plot = fs::read_to_string(dir.path().join("protocol1-fidelity.dat")).unwrap();
    let rows: Vec<&str> = plot.lines().collect();
    assert_eq!(rows.len(), 10);
    assert!(rows.iter().all(|r| r.ends_with(" 1.000000")), "{plot}");
    let b = bundle(dir.path(), "protocol1.json");
    let Outcome::Protocol { report, .. } = &b.outcome else { panic!("not a protocol report") };
    assert!(report.fidelities.iter().all(|f| (f - 1.0).abs() < 1e-9));
    assert_eq!(b.files.len(), 3);
    assert!(b.files.iter().all(|f| f.exists()));
}

#[test]
fn sampled_plot_data_envelope() {
    let dir = tempfile::tempdir().unwrap();
    // Raw reconstructions are not clamped and can overshoot 1 by shot noise;
    // the envelope is for the default input and for projected states.
    let runs: [&[&str]; 2] = [
        &["protocol1", "--seed", "5"],
        &["protocol1", "--seed", "5", "--zeta", "pi/3", "--alpha", "0.6", "--beta", "0.8i", "--project"],
    ];
    for args in runs {
        let (code, _) = hetverify(dir.path(), args);
        assert_eq!(code, 0);
        let plot = fs::read_to_string(dir.path().join("protocol1-fidelity.dat")).unwrap();
        assert_eq!(plot.lines().count(), 10);
        for row in plot.lines() {
            let f: f64 = row.split_whitespace().nth(1).unwrap().parse().unwrap();
            assert!((0.97..=1.0).contains(&f), "{args:?}: {row}");
        }
    }
}

#[test]
fn qkd_bell_csv() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = hetverify(dir.path(), &["qkd-bell", "--shots", "exact", "--zeta", "pi/3", "--no-simple"]);
    assert_eq!(code, 0);
    let text = fs::read_to_string(dir.path().join("qkd-bell.csv")).unwrap();
    let rows: Vec<Vec<String>> = text.lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect();
    assert_eq!(rows.len(), 4);
    let expected = [0.75, 0.4330, 0.4330, 0.25];
    for (row, e) in rows.iter().zip(expected) {
        let v: f64 = row[1].parse().unwrap();
        assert!((v - e).abs() < 1e-4, "{row:?}");
    }
    let verdicts: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("qkd-bell-verdicts.json")).unwrap()).unwrap();
    assert_eq!(verdicts["zeta=pi/3"]["b00-b00"], "accept");
    assert_eq!(verdicts["zeta=pi/3"]["b00-b01"], "reject");
}

#[test]
fn reports_are_deterministic_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["hetverify", "protocol2", "--seed", "17", "--copies", "1", "1", "--zeta", "pi/3", "--out", dir.path().to_str().unwrap()];
    let config = parse_config(args).unwrap();
    let first = run_and_report(&config).unwrap();
    let on_disk = bundle(dir.path(), "protocol2.json");
    assert_eq!(on_disk, first);
    let second = run_and_report(&config).unwrap();
    assert_eq!(first.outcome, second.outcome);
    assert_eq!(first.config, second.config);
    let csv1 = fs::read(dir.path().join("protocol2-copies.csv")).unwrap();
    run_and_report(&config).unwrap();
    assert_eq!(fs::read(dir.path().join("protocol2-copies.csv")).unwrap(), csv1);
}

#[test]
fn config_file_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let out = dir.path().to_str().unwrap().replace('\\', "/");
    fs::write(
        &cfg,
        format!(r#"{{"command": "qkd-single", "initial": 1, "zeta": ["pi/3"], "shots": "exact", "seed": 4, "out": "{out}"}}"#),
    )
    .unwrap();
    let run = |cfg: &Path| {
        let o = Command::new(env!("CARGO_BIN_EXE_hetverify")).arg("--config").arg(cfg).output().unwrap();
        (o.status.code().unwrap(), String::from_utf8_lossy(&o.stderr).into_owned())
    };
    let (code, text) = run(&cfg);
    assert_eq!(code, 0, "{text}");
    let b = bundle(dir.path(), "qkd-single.json");
    let Outcome::Qkd { table, thresholds, .. } = &b.outcome else { panic!("not a table") };
    assert!((table.rows[0].fidelities[0] - 0.75f64.sqrt()).abs() < 1e-12);
    assert_eq!(thresholds["zeta=pi/3"], 0.8);
    assert_eq!(thresholds["simple"], 0.9);

    fs::write(&cfg, r#"{"command": "qkd-single", "zeta": "pi/3", "shotz": 5}"#).unwrap();
    let (code, text) = run(&cfg);
    assert_eq!(code, 1);
    assert!(text.contains("shotz"), "{text}");
}

#[test]
fn tomography_command() {
    let dir = tempfile::tempdir().unwrap();
    let circuit = dir.path().join("circuit.json");
    fs::write(
        &circuit,
        r#"{"num_qubits": 3, "ancilla": 2, "gates": [
            {"kind": "x", "qubits": [2]},
            {"kind": "u3", "qubits": [0], "angles": [1.5707963267948966, 0, 3.141592653589793]},
            {"kind": "cu3", "qubits": [2, 0], "angles": [1.0471975511965976, 0, 0]},
            {"kind": "cu3", "qubits": [2, 1], "angles": [1.0471975511965976, 0, 0]}
        ]}"#,
    )
    .unwrap();
    let c = circuit.to_str().unwrap();
    let (code, text) = hetverify(dir.path(), &["tomography", "--circuit", c, "--shots", "exact"]);
    assert_eq!(code, 0, "{text}");
    let Outcome::Tomography(t) = bundle(dir.path(), "tomography.json").outcome else { panic!() };
    assert_eq!(t.measure, vec![0, 1]);
    assert!(t.trace_distance < 1e-10);

    let (code, _) = hetverify(dir.path(), &["tomography", "--circuit", c, "--seed", "3"]);
    assert_eq!(code, 0);
    let shots = fs::read_to_string(dir.path().join("tomography-shots.csv")).unwrap();
    assert!(shots.starts_with("setting,bitstring,count"));
    assert_eq!(hetverify(dir.path(), &["tomography", "--circuit", c, "--measure", "2"]).0, 1);
}
