//! Assembly and solution of the comb linear system.
//!
//! Row (set, round r) of the system states the comb identity
//!
//! `(eta_set - record) / comb_prefactor(r) = sum_{k: r | k} sum_i C_i(k w0, T/r) x_i(k w0)`
//!
//! so columns are (frequency k, spectrum i) and the matrix is sparse under
//! the divisibility pattern: row group r touches only frequencies that are
//! multiples of r. Solving the complex system and projecting out the real
//! parts recovers the spectra on the grid.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
use num_traits::Zero;

use crate::error::config;
use crate::forward::{CombConfig, ScenarioModel};
use crate::linalg::{condition_one_norm, lstsq_qr, lu_factor, DenseMatrix};
use crate::spectra::ScenarioSpectra;
use crate::Result;

/// Condition-number threshold beyond which the square solve falls back to
/// least squares.
pub const CONDITION_FALLBACK: f64 = 1e12;

/// The assembled linear system and its index layout.
///
/// Row `set * N + (r - 1)` holds round r of one measurement set; column
/// `(k - 1) * S + i` holds spectrum i at grid frequency `k w0`.
#[derive(Debug, Clone)]
pub struct ReconstructionProblem {
    pub matrix: DenseMatrix,
    pub rhs: Vec<Complex64>,
    pub grid: Vec<f64>,
    pub n_rounds: usize,
    pub n_sets: usize,
    pub n_spectra: usize,
}

/// Solution of the reconstruction system with diagnostics.
#[derive(Debug, Clone)]
pub struct ReconstructionResult {
    /// Real spectra estimates, `estimates[i][k-1]` at frequency `k w0`.
    pub estimates: Vec<Vec<f64>>,
    /// Euclidean residual `||A x - b||_2`.
    pub residual: f64,
    /// One-norm condition estimate of the solved operator.
    pub condition: f64,
    /// Largest imaginary part among solution entries; reported, not dropped.
    pub max_imag: f64,
    /// Whether the least-squares path was taken.
    pub least_squares: bool,
}

/// Builds the linear system from per-set, per-round measurement records
/// (`records[set][r-1]`, r = 1..=N).
pub fn assemble(
    model: &ScenarioModel,
    cfg: &CombConfig,
    records: &[Vec<Complex64>],
) -> Result<ReconstructionProblem> {
    let n = cfg.n_grid();
    let s = model.n_spectra();
    let n_sets = model.n_sets();
    if records.len() != n_sets {
        return Err(config(format!(
            "got records for {} sets, model has {n_sets}",
            records.len()
        )));
    }
    for (si, rec) in records.iter().enumerate() {
        if rec.len() != n {
            return Err(config(format!(
                "set {si} has {} records, expected N = {n}",
                rec.len()
            )));
        }
    }
    if n_sets < s {
        return Err(config(format!(
            "{n_sets} measurement sets cannot determine {s} spectra"
        )));
    }

    let w0 = cfg.omega0();
    let mut matrix = DenseMatrix::zeros(n_sets * n, s * n);
    let mut rhs = vec![Complex64::zero(); n_sets * n];
    for set in 0..n_sets {
        for r in 1..=n {
            let row = set * n + (r - 1);
            let t_r = cfg.round_period(r);
            for k in 1..=n {
                if k % r != 0 {
                    continue;
                }
                let cs = model.coeffs(set, k as f64 * w0, t_r, 1);
                for (i, c) in cs.iter().take(s).enumerate() {
                    matrix.set(row, (k - 1) * s + i, *c);
                }
            }
            let norm = 1.0 / model.comb_prefactor(cfg, r);
            rhs[row] = (model.eta(set) - records[set][r - 1]) * norm;
        }
    }
    Ok(ReconstructionProblem {
        matrix,
        rhs,
        grid: cfg.grid(),
        n_rounds: n,
        n_sets,
        n_spectra: s,
    })
}

/// Solves the assembled system in complex arithmetic: partial-pivot LU when
/// square and well conditioned, Householder least squares otherwise.
pub fn solve(p: &ReconstructionProblem) -> Result<ReconstructionResult> {
    let square = p.matrix.rows == p.matrix.cols;
    let (x, condition, least_squares) = if square {
        // Rounds-descending row ordering puts the nearly-single-entry high
        // rounds first, which partial pivoting rewards.
        let perm = round_descending_permutation(p);
        let (pa, pb) = permute_rows(&p.matrix, &p.rhs, &perm);
        let lu = lu_factor(&pa);
        if lu.null_dim > 0 {
            return Err(crate::Error::Singular { null_dim: lu.null_dim });
        }
        let cond = condition_one_norm(&pa, &lu);
        if cond > CONDITION_FALLBACK {
            (lstsq_qr(&pa, &pb)?, cond, true)
        } else {
            (lu.solve(&pb)?, cond, false)
        }
    } else {
        let x = lstsq_qr(&p.matrix, &p.rhs)?;
        (x, f64::NAN, true)
    };

    let ax = p.matrix.matvec(&x);
    let residual = ax
        .iter()
        .zip(p.rhs.iter())
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>();
    let residual = libm::sqrt(residual);
    let max_imag = x.iter().map(|v| v.im.abs()).fold(0.0, f64::max);

    let s = p.n_spectra;
    let n = p.n_rounds;
    let mut estimates = vec![vec![0.0f64; n]; s];
    for k in 1..=n {
        for i in 0..s {
            estimates[i][k - 1] = x[(k - 1) * s + i].re;
        }
    }
    Ok(ReconstructionResult { estimates, residual, condition, max_imag, least_squares })
}

fn round_descending_permutation(p: &ReconstructionProblem) -> Vec<usize> {
    let n = p.n_rounds;
    let mut perm = Vec::with_capacity(p.n_sets * n);
    for r in (1..=n).rev() {
        for set in 0..p.n_sets {
            perm.push(set * n + (r - 1));
        }
    }
    perm
}

fn permute_rows(a: &DenseMatrix, b: &[Complex64], perm: &[usize]) -> (DenseMatrix, Vec<Complex64>) {
    let mut pa = DenseMatrix::zeros(a.rows, a.cols);
    let mut pb = vec![Complex64::zero(); b.len()];
    for (new_row, &old_row) in perm.iter().enumerate() {
        for j in 0..a.cols {
            pa.set(new_row, j, a.at(old_row, j));
        }
        pb[new_row] = b[old_row];
    }
    (pa, pb)
}

/// Error metrics of one reconstructed spectrum against its truth samples.
#[derive(Debug, Clone, Copy)]
pub struct SpectrumErrors {
    pub rmse: f64,
    pub max_abs: f64,
    /// RMSE over nodes where the truth exceeds `floor_frac` of its peak,
    /// normalized by the truth RMS over the same nodes. NaN when no node
    /// passes the floor.
    pub rel_rmse: f64,
}

/// Per-spectrum error report of a reconstruction against known truth
/// components evaluated on the grid.
pub fn error_report(
    result: &ReconstructionResult,
    truth: &ScenarioSpectra,
    grid: &[f64],
    floor_frac: f64,
) -> Vec<SpectrumErrors> {
    result
        .estimates
        .iter()
        .enumerate()
        .map(|(i, est)| {
            let t: Vec<f64> = grid.iter().map(|&w| truth.x(i, w)).collect();
            spectrum_errors(est, &t, floor_frac)
        })
        .collect()
}

/// Error metrics between one estimate array and one truth array.
pub fn spectrum_errors(estimate: &[f64], truth: &[f64], floor_frac: f64) -> SpectrumErrors {
    let n = truth.len().max(1);
    let mut sq = 0.0;
    let mut max_abs: f64 = 0.0;
    for (e, t) in estimate.iter().zip(truth.iter()) {
        let d = e - t;
        sq += d * d;
        max_abs = max_abs.max(d.abs());
    }
    let rmse = libm::sqrt(sq / n as f64);

    let peak = truth.iter().map(|t| t.abs()).fold(0.0, f64::max);
    let floor = floor_frac * peak;
    let mut sel_sq = 0.0;
    let mut sel_t = 0.0;
    let mut count = 0usize;
    for (e, t) in estimate.iter().zip(truth.iter()) {
        if t.abs() > floor {
            sel_sq += (e - t) * (e - t);
            sel_t += t * t;
            count += 1;
        }
    }
    let rel_rmse = if count > 0 && sel_t > 0.0 {
        libm::sqrt(sel_sq / count as f64) / libm::sqrt(sel_t / count as f64)
    } else {
        f64::NAN
    };
    SpectrumErrors { rmse, max_abs, rel_rmse }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectrum_errors_zero_for_exact_match() {
        let t = [1.0, 2.0, 3.0];
        let e = spectrum_errors(&t, &t, 0.01);
        assert_eq!(e.rmse, 0.0);
        assert_eq!(e.max_abs, 0.0);
        assert_eq!(e.rel_rmse, 0.0);
    }

    #[test]
    fn rel_rmse_respects_floor() {
        let truth = [10.0, 0.001, 10.0];
        let est = [10.0, 5.0, 10.0];
        // Middle node is below 1% of peak, so it is excluded.
        let e = spectrum_errors(&est, &truth, 0.01);
        assert_eq!(e.rel_rmse, 0.0);
        assert!(e.max_abs > 4.0);
    }
}
