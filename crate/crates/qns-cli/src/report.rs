//! Run report in the same key/value syntax as the configs.

use std::fmt::Write as _;
use std::time::Duration;

use num_complex::Complex64;
use qns_core::inversion::{ReconstructionResult, SpectrumErrors};

#[derive(Debug, Default)]
pub struct PhaseTimes {
    pub build: Duration,
    pub forward: Duration,
    pub invert: Duration,
    pub emit: Duration,
}

pub struct RunSummary<'a> {
    pub scenario: &'a str,
    pub mode: &'a str,
    pub n_rounds: usize,
    pub etas: Vec<Complex64>,
    pub result: &'a ReconstructionResult,
    pub errors: Option<Vec<(&'static str, SpectrumErrors)>>,
    pub times: PhaseTimes,
    pub warnings: &'a [String],
    pub fast_poissonian: bool,
    pub degenerate_cells: u64,
}

pub fn render_report(s: &RunSummary<'_>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "scenario = {:?}", s.scenario);
    let _ = writeln!(out, "mode = {:?}", s.mode);
    let _ = writeln!(out, "rounds = {}", s.n_rounds);
    let _ = writeln!(out, "fast_poissonian = {}", s.fast_poissonian);
    if s.fast_poissonian {
        let _ = writeln!(out, "degenerate_cells = {}", s.degenerate_cells);
    }
    out.push('\n');
    for (i, eta) in s.etas.iter().enumerate() {
        let _ = writeln!(out, "[sets.{i}]");
        let _ = writeln!(out, "eta_re = {}", eta.re);
        let _ = writeln!(out, "eta_im = {}", eta.im);
        out.push('\n');
    }
    let _ = writeln!(out, "[solve]");
    let _ = writeln!(out, "condition_one_norm = {:.6e}", s.result.condition);
    let _ = writeln!(out, "residual = {:.6e}", s.result.residual);
    let _ = writeln!(out, "max_imag_leakage = {:.6e}", s.result.max_imag);
    let _ = writeln!(out, "least_squares = {}", s.result.least_squares);
    out.push('\n');
    if let Some(errors) = &s.errors {
        for (name, e) in errors {
            let _ = writeln!(out, "[errors.{name}]");
            let _ = writeln!(out, "rmse = {:.6e}", e.rmse);
            let _ = writeln!(out, "max_abs = {:.6e}", e.max_abs);
            let _ = writeln!(out, "rel_rmse = {:.6e}", e.rel_rmse);
            out.push('\n');
        }
    }
    let _ = writeln!(out, "[timing_seconds]");
    let _ = writeln!(out, "build = {:.6}", s.times.build.as_secs_f64());
    let _ = writeln!(out, "forward = {:.6}", s.times.forward.as_secs_f64());
    let _ = writeln!(out, "invert = {:.6}", s.times.invert.as_secs_f64());
    let _ = writeln!(out, "emit = {:.6}", s.times.emit.as_secs_f64());
    if !s.warnings.is_empty() {
        out.push('\n');
        let _ = writeln!(out, "[warnings]");
        for (i, w) in s.warnings.iter().enumerate() {
            let _ = writeln!(out, "w{i} = {w:?}");
        }
    }
    out
}

/// CSV of one spectrum: `k,omega,truth,estimate,abs_error`, frequencies with
/// nine significant digits, LF endings. Truth and error columns stay empty
/// in measured mode.
pub fn render_spectrum_csv(
    grid: &[f64],
    estimate: &[f64],
    truth: Option<&[f64]>,
) -> String {
    let mut out = String::from("k,omega,truth,estimate,abs_error\n");
    for (idx, (w, est)) in grid.iter().zip(estimate.iter()).enumerate() {
        match truth {
            Some(t) => {
                let tv = t[idx];
                let _ = writeln!(
                    out,
                    "{},{:.8e},{},{},{}",
                    idx + 1,
                    w,
                    tv,
                    est,
                    (est - tv).abs()
                );
            }
            None => {
                let _ = writeln!(out, "{},{:.8e},,{},", idx + 1, w, est);
            }
        }
    }
    out
}
