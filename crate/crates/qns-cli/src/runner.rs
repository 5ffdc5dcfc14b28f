//! Orchestration of one spectroscopy run: forward model (or record
//! ingestion), inversion, and artifact emission.

use std::path::PathBuf;
use std::time::Instant;

use num_complex::Complex64;
use qns_core::forward::ScenarioModel;
use qns_core::inversion::{assemble, error_report, solve, ReconstructionResult};
use qns_core::spectra::{ScenarioKind, SpectrumShape};

use crate::config::{ConfigError, Prepared};
use crate::parallel::map_indexed;
use crate::records::{read_records, write_records};
use crate::report::{render_report, render_spectrum_csv, PhaseTimes, RunSummary};

pub struct RunOptions {
    pub out_dir: PathBuf,
    pub threads: usize,
    pub fast_poissonian: bool,
    /// Overrides the config's records path when set.
    pub records_override: Option<PathBuf>,
}

/// Errors beyond configuration: numerical failures map to exit code 3.
#[derive(Debug)]
pub enum RunError {
    Config(ConfigError),
    Numerical(String),
    Io(String),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Config(e) => write!(f, "{e}"),
            RunError::Numerical(m) => write!(f, "numerical failure: {m}"),
            RunError::Io(m) => write!(f, "io error: {m}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

pub struct RunArtifacts {
    pub result: ReconstructionResult,
    pub records: Vec<Vec<Complex64>>,
    pub grid: Vec<f64>,
}

/// Executes a prepared run end to end and writes the artifacts into
/// `opts.out_dir`; returns the reconstruction for callers that inspect it.
pub fn run(prep: &Prepared, opts: &RunOptions) -> Result<RunArtifacts, RunError> {
    let mut times = PhaseTimes::default();
    let t0 = Instant::now();
    let model = &prep.model;
    let cfg = &prep.comb;
    let n = cfg.n_grid();
    let n_sets = model.n_sets();
    times.build = t0.elapsed();

    // Forward phase: ingest or simulate records.
    let t1 = Instant::now();
    let records_path = opts.records_override.as_ref().or(prep.records_path.as_ref());
    let mut degenerate_cells = 0u64;
    let (records, mode) = match records_path {
        Some(path) => (read_records(path, n_sets, n)?, "measured"),
        None => {
            let truth = prep
                .truth
                .as_ref()
                .ok_or_else(|| ConfigError("synthetic mode needs [truth]".into()))?;
            if opts.fast_poissonian {
                let (records, cells) = fast_poissonian_records(prep)?;
                degenerate_cells = cells;
                (records, "synthetic-fast-poissonian")
            } else {
                let jobs = n_sets * n;
                // One failed integral poisons the remaining jobs so a
                // misconfigured run aborts quickly instead of grinding
                // through every round.
                let poisoned = std::sync::atomic::AtomicBool::new(false);
                let values = map_indexed(opts.threads, jobs, |j| {
                    if poisoned.load(std::sync::atomic::Ordering::Relaxed) {
                        return Err(qns_core::Error::Numerical(
                            "skipped after an earlier failure".into(),
                        ));
                    }
                    let set = j / n;
                    let round = j % n + 1;
                    let r = model.measure(truth, cfg, set, round);
                    if r.is_err() {
                        poisoned.store(true, std::sync::atomic::Ordering::Relaxed);
                    }
                    r
                });
                if let Some(e) = values.iter().find_map(|v| match v {
                    Err(qns_core::Error::Numerical(m)) if !m.starts_with("skipped") => {
                        Some(m.clone())
                    }
                    _ => None,
                }) {
                    return Err(RunError::Numerical(e));
                }
                let mut records = vec![Vec::with_capacity(n); n_sets];
                for (j, v) in values.into_iter().enumerate() {
                    records[j / n].push(v.map_err(|e| RunError::Numerical(e.to_string()))?);
                }
                (records, "synthetic")
            }
        }
    };
    times.forward = t1.elapsed();

    // Inversion phase.
    let t2 = Instant::now();
    let problem = assemble(model, cfg, &records).map_err(|e| ConfigError(e.to_string()))?;
    let result = solve(&problem).map_err(|e| RunError::Numerical(e.to_string()))?;
    times.invert = t2.elapsed();

    // Emission phase.
    let t3 = Instant::now();
    std::fs::create_dir_all(&opts.out_dir)
        .map_err(|e| RunError::Io(format!("cannot create {}: {e}", opts.out_dir.display())))?;
    let grid = problem.grid.clone();
    let synthetic_truth = if mode == "measured" { None } else { prep.truth.as_ref() };
    for (i, name) in prep.spectrum_names.iter().enumerate() {
        let truth_col: Option<Vec<f64>> =
            synthetic_truth.map(|t| grid.iter().map(|&w| t.x(i, w)).collect());
        let csv = render_spectrum_csv(&grid, &result.estimates[i], truth_col.as_deref());
        let path = opts.out_dir.join(format!("spectrum_{name}.csv"));
        std::fs::write(&path, csv)
            .map_err(|e| RunError::Io(format!("cannot write {}: {e}", path.display())))?;
    }
    if mode != "measured" {
        write_records(&opts.out_dir.join("records.csv"), &records)
            .map_err(|e| RunError::Io(e.to_string()))?;
    }

    let errors = synthetic_truth.map(|t| {
        let report = error_report(&result, t, &grid, 1e-6);
        prep.spectrum_names.iter().copied().zip(report).collect()
    });
    let summary = RunSummary {
        scenario: scenario_name(prep.scenario),
        mode,
        n_rounds: n,
        etas: (0..n_sets).map(|s| model.eta(s)).collect(),
        result: &result,
        errors,
        times: PhaseTimes { emit: t3.elapsed(), ..times },
        warnings: &prep.sequence_warnings,
        fast_poissonian: opts.fast_poissonian,
        degenerate_cells,
    };
    let report_path = opts.out_dir.join("report.toml");
    std::fs::write(&report_path, render_report(&summary))
        .map_err(|e| RunError::Io(format!("cannot write {}: {e}", report_path.display())))?;

    Ok(RunArtifacts { result, records, grid })
}

fn scenario_name(kind: ScenarioKind) -> &'static str {
    match kind {
        ScenarioKind::QutritRw => "qutrit-rw",
        ScenarioKind::QuditRw => "qudit-rw",
        ScenarioKind::AntimonyW => "antimony-w",
    }
}

/// Closed-form record generation; only defined for the full-Weyl scenario
/// with every reconstructed component Poissonian.
fn fast_poissonian_records(prep: &Prepared) -> Result<(Vec<Vec<Complex64>>, u64), RunError> {
    let ScenarioModel::Antimony(model) = &prep.model else {
        return Err(ConfigError(
            "--fast-poissonian applies to the antimony-w scenario only".into(),
        )
        .into());
    };
    let truth = prep.truth.as_ref().expect("checked by caller");
    let mut decays = [0.0f64; 3];
    for (i, slot) in decays.iter_mut().enumerate() {
        match &truth.components()[i].shape {
            SpectrumShape::Poissonian { decay } => *slot = *decay,
            other => {
                return Err(ConfigError(format!(
                    "--fast-poissonian needs Poissonian truth components, component {i} is {other:?}"
                ))
                .into())
            }
        }
    }
    let cfg = &prep.comb;
    let n = cfg.n_grid();
    let mut records = Vec::with_capacity(model.n_sets());
    let mut cells = 0u64;
    for set in 0..model.n_sets() {
        let mut row = Vec::with_capacity(n);
        for r in 1..=n {
            let c = model.measure_poissonian(decays, cfg, set, r);
            cells += c.degenerate_cells;
            row.push(c.value);
        }
        records.push(row);
    }
    Ok((records, cells))
}
