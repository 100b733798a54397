use std::fmt::Write as _;
use std::path::PathBuf;

use hetverify::circuit::ShotTable;
use hetverify::protocols::{protocol1_run, protocol2_run, protocol3_verify, ProtocolReport, RunOptions, Verdict, DEFAULT_THRESHOLD};
use hetverify::qkd::{default_threshold, qkd_table, threshold_verdict, QkdKind, QkdTable};
use hetverify::reference::{hardware_runs, reference_table, CellComparison, HardwareRun, Source};
use hetverify::state::DensityMatrix;
use hetverify::tomography::{
    exact_measured_state, reconstruct_multi_qubit, sweep_shot_tables, tomography_sweep, ExpectationSet, Shots, SweepOptions,
};
use hetverify::{fidelity, trace_distance};
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::config::{Experiment, ExperimentConfig};
use crate::error::{CliError, EXIT_REJECT};
use crate::output::{plot_data, write_atomic};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub version: String,
    pub seed: u64,
    pub timestamp: String,
}

/// Owned copy of a published hardware run for the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardwareFigures {
    pub input: String,
    pub zeta: String,
    pub copies: Option<String>,
    pub fidelity: Option<f64>,
    pub std: Option<f64>,
    pub witness: Option<f64>,
    pub trace_distance: Option<f64>,
    pub tvd: Option<f64>,
}

impl From<HardwareRun> for HardwareFigures {
    fn from(r: HardwareRun) -> Self {
        Self {
            input: r.input.into(),
            zeta: r.zeta.into(),
            copies: r.copies.map(Into::into),
            fidelity: r.fidelity,
            std: r.std,
            witness: r.witness,
            trace_distance: r.trace_distance,
            tvd: r.tvd,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceCells {
    pub source: Source,
    pub cells: Vec<CellComparison>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TomographyResult {
    pub measure: Vec<usize>,
    pub expectations: ExpectationSet,
    pub density: DensityMatrix,
    pub physical: bool,
    /// Against the noiseless-sampling state the sweep estimates.
    pub fidelity: f64,
    pub trace_distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Outcome {
    Protocol {
        report: ProtocolReport,
        /// Published hardware numbers for the same protocol, for display only.
        hardware: Vec<HardwareFigures>,
    },
    Qkd {
        table: QkdTable,
        thresholds: IndexMap<String, f64>,
        /// Column label to per-pair verdicts.
        verdicts: IndexMap<String, IndexMap<String, Verdict>>,
        reference: Vec<ReferenceCells>,
    },
    Tomography(TomographyResult),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub config: ExperimentConfig,
    pub outcome: Outcome,
    pub provenance: Provenance,
    pub files: Vec<PathBuf>,
}

impl ReportBundle {
    /// 0 on accept or success, 2 when a protocol rejects or a matched
    /// key-distribution pair falls below its column threshold.
    pub fn exit_code(&self) -> i32 {
        let rejected = match &self.outcome {
            Outcome::Protocol { report, .. } => report.verdict == Verdict::Reject,
            Outcome::Qkd { table, verdicts, .. } => verdicts.values().any(|col| {
                table
                    .rows
                    .iter()
                    .any(|r| r.is_matched() && col.get(&r.pair()) == Some(&Verdict::Reject))
            }),
            Outcome::Tomography(_) => false,
        };
        if rejected {
            EXIT_REJECT
        } else {
            0
        }
    }

    /// Plain-text digest for the terminal.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        match &self.outcome {
            Outcome::Protocol { report, hardware } => {
                let _ = writeln!(s, "protocol {} ({} copies, shots {})", report.protocol, report.copies.len(), report.shots);
                for (i, g) in report.groups.iter().enumerate() {
                    let _ = writeln!(
                        s,
                        "  group {i} [{}]: fidelity {:.4} ± {:.4}, witness {:.4}, D {:.4}, TVD {:.4} -> {:?}",
                        g.setting, g.mean_fidelity, g.std_fidelity, g.mean_witness, g.mean_trace_distance, g.mean_tvd, g.verdict
                    );
                }
                for b in &report.bound_checks {
                    let _ = writeln!(s, "  {}: {:.4} <= {:.4} <= {:.4} ({})", b.name, b.lhs, b.mid, b.rhs, if b.holds { "holds" } else { "fails" });
                }
                let _ = writeln!(s, "verdict: {:?} (F = {:.4}, threshold {})", report.verdict, report.global_fidelity, report.threshold);
                for h in hardware {
                    let _ = writeln!(
                        s,
                        "  hardware reference {} zeta={}: fidelity {} witness {}",
                        h.input,
                        h.zeta,
                        h.fidelity.map_or("-".into(), |v| format!("{v:.4}")),
                        h.witness.map_or("-".into(), |v| format!("{v:.4}"))
                    );
                }
            }
            Outcome::Qkd { table, verdicts, reference, .. } => {
                let hw = reference.iter().find(|r| r.source == Source::Hardware);
                let _ = writeln!(s, "{:<10}{}", "pair", table.modes.iter().map(|m| format!("{:>22}", m.to_string())).collect::<String>());
                for r in &table.rows {
                    let mut line = format!("{:<10}", r.pair());
                    for (m, v) in table.modes.iter().zip(&r.fidelities) {
                        let label = m.to_string();
                        let hw_value = hw.and_then(|h| h.cells.iter().find(|c| c.pair == r.pair() && c.mode == label)).map(|c| c.reference);
                        let cell = match hw_value {
                            Some(h) => format!("{v:.4} (hw {h:.4})"),
                            None => format!("{v:.4}"),
                        };
                        let _ = write!(line, "{cell:>22}");
                    }
                    let _ = writeln!(s, "{line}");
                }
                for (col, v) in verdicts {
                    let accepted: Vec<&str> = v.iter().filter(|(_, x)| **x == Verdict::Accept).map(|(p, _)| p.as_str()).collect();
                    let list = if accepted.is_empty() { "none".to_string() } else { accepted.join(", ") };
                    let _ = writeln!(s, "{col}: accepted {list}");
                }
            }
            Outcome::Tomography(t) => {
                let _ = writeln!(
                    s,
                    "tomography of qubits {:?}: physical {}, fidelity {:.6}, trace distance {:.6}",
                    t.measure, t.physical, t.fidelity, t.trace_distance
                );
            }
        }
        for f in &self.files {
            let _ = writeln!(s, "wrote {}", f.display());
        }
        s
    }
}

#[derive(Serialize)]
struct CopyRow {
    copy: usize,
    group: usize,
    zeta: String,
    fidelity: f64,
    witness: f64,
    trace_distance: f64,
    tvd: f64,
    physical: bool,
}

fn copies_csv(report: &ProtocolReport) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for c in &report.copies {
        w.serialize(CopyRow {
            copy: c.copy,
            group: c.group,
            zeta: c.setting.zeta().to_string(),
            fidelity: c.fidelity,
            witness: c.witness,
            trace_distance: c.trace_distance,
            tvd: c.tvd,
            physical: c.physical,
        })
        .map_err(|e| hetverify::Error::Csv(e.to_string()))?;
    }
    w.into_inner().map_err(|e| hetverify::Error::Csv(e.to_string()).into())
}

/// Runs the configured experiment, writes its files and returns the bundle.
/// The JSON report is always written; the copy table and plot data
/// accompany protocol runs, the table CSV and verdict map accompany
/// key-distribution runs, and sampled tomography writes its shot tables.
pub fn run_and_report(config: &ExperimentConfig) -> Result<ReportBundle, CliError> {
    let stem = config.command().as_str();
    let path = |suffix: &str| config.out.join(format!("{stem}{suffix}"));
    let run_opts = RunOptions {
        shots: config.shots,
        seed: config.seed,
        noise: config.noise,
        ancilla: config.ancilla,
        project: config.project,
        threshold: config.threshold.unwrap_or(DEFAULT_THRESHOLD),
    };
    let sweep = SweepOptions {
        shots: config.shots,
        seed: config.seed,
        noise: config.noise,
        ancilla: config.ancilla,
    };

    let mut extra: Vec<(PathBuf, Vec<u8>)> = Vec::new();
    let outcome = match &config.experiment {
        Experiment::Protocol1 { .. } | Experiment::Protocol2 { .. } | Experiment::Protocol3 { .. } => {
            let (report, protocol) = match &config.experiment {
                Experiment::Protocol1 { initial, setting, plan } => (protocol1_run(initial, *setting, plan, &run_opts)?, 1),
                Experiment::Protocol2 {
                    initial,
                    setting,
                    plan,
                    witness_target,
                } => (protocol2_run(initial, *setting, plan, *witness_target, &run_opts)?, 2),
                Experiment::Protocol3 {
                    photons,
                    modes,
                    interferometer,
                    setting,
                    plan,
                    witness_target,
                } => (protocol3_verify(*photons, *modes, interferometer, *setting, plan, *witness_target, &run_opts)?, 3),
                _ => unreachable!("matched protocol variants above"),
            };
            let series: Vec<(usize, f64)> = report.copies.iter().map(|c| (c.copy, c.fidelity)).collect();
            extra.push((path("-copies.csv"), copies_csv(&report)?));
            extra.push((path("-fidelity.dat"), plot_data(&series)?.into_bytes()));
            Outcome::Protocol {
                report,
                hardware: hardware_runs(protocol).into_iter().map(Into::into).collect(),
            }
        }
        Experiment::QkdSingle { columns, .. } | Experiment::QkdBell { columns } => {
            let kind = match config.experiment {
                Experiment::QkdSingle { initial, .. } => QkdKind::Single { initial },
                _ => QkdKind::Bell,
            };
            let table = qkd_table(kind, columns, &sweep)?;
            let mut thresholds = IndexMap::new();
            let mut verdicts = IndexMap::new();
            for &mode in columns {
                if let Some(t) = config.threshold.or_else(|| default_threshold(kind, mode)) {
                    thresholds.insert(mode.to_string(), t);
                    verdicts.insert(mode.to_string(), threshold_verdict(&table, mode, Some(t))?);
                }
            }
            let reference = [Source::Simulator, Source::Hardware]
                .into_iter()
                .map(|source| {
                    Ok(ReferenceCells {
                        source,
                        cells: reference_table(kind, source)?.compare(&table)?,
                    })
                })
                .collect::<Result<Vec<_>, hetverify::Error>>()?;
            let mut csv = Vec::new();
            table.write_csv(&mut csv)?;
            extra.push((path(".csv"), csv));
            let verdict_json = serde_json::to_vec_pretty(&verdicts).map_err(hetverify::Error::from)?;
            extra.push((path("-verdicts.json"), verdict_json));
            Outcome::Qkd {
                table,
                thresholds,
                verdicts,
                reference,
            }
        }
        Experiment::Tomography { circuit, measure } => {
            let expectations = tomography_sweep(circuit, measure, &sweep)?;
            if let Shots::Finite(_) = config.shots {
                let mut csv = Vec::new();
                ShotTable::write_csv(&sweep_shot_tables(circuit, measure, &sweep)?, &mut csv)?;
                extra.push((path("-shots.csv"), csv));
            }
            let density = reconstruct_multi_qubit(&expectations)?;
            let truth = exact_measured_state(circuit, measure, &config.noise, config.ancilla)?;
            Outcome::Tomography(TomographyResult {
                measure: measure.clone(),
                physical: density.is_physical(),
                fidelity: fidelity(&density, &truth)?,
                trace_distance: trace_distance(&density, &truth)?,
                expectations,
                density,
            })
        }
    };

    let report_path = path(".json");
    let mut files = vec![report_path.clone()];
    files.extend(extra.iter().map(|(p, _)| p.clone()));
    let bundle = ReportBundle {
        config: config.clone(),
        outcome,
        provenance: Provenance {
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: config.seed,
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        },
        files,
    };
    for (p, bytes) in &extra {
        write_atomic(p, bytes)?;
    }
    let json = serde_json::to_vec_pretty(&bundle).map_err(hetverify::Error::from)?;
    write_atomic(&report_path, &json)?;
    Ok(bundle)
}
