//! Scenario forward models: from polyspectra to observable expectations.
//!
//! Each Alvarez-Suter round r applies M repetitions of the reference sequence
//! compressed to duration T/r and measures one Weyl observable. Two routes
//! compute the same expectation:
//!
//! * the integral path `A^r`: eta minus a frequency integral of coefficient
//!   functions against the true spectra (this simulates a measurement);
//! * the comb path `B^r`: eta minus a discrete sum over the comb teeth
//!   `k r w0`, which is the linear form the inversion solves against.
//!
//! Their near-equality for large M is what makes the reconstruction work.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::TAU;
use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{argument, config};
use crate::quad;
use crate::spectra::ScenarioSpectra;
use crate::Result;

pub mod antimony;
pub mod qudit_rw;
pub mod qutrit;

pub use antimony::{
    antimony_beta_tilde, beta_tilde_sums, lambda_antimony, AntimonyModel, AntimonyParams,
    PoissonianContraction,
};
pub use qudit_rw::{eta_lambda_rw, rw_coupling, QuditRwModel};
pub use qutrit::{eta_lambda_qutrit, QutritModel};

/// A single-term Weyl observable `O_mn Z^m X^n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservableSpec {
    pub coeff: Complex64,
    pub m: usize,
    pub n: usize,
}

/// Initial state with at most two Weyl terms: the trace term `1/d` (optional
/// in the model) and one coherence term `V Z^{p0} X^{q0}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialStateSpec {
    pub trace_term_included: bool,
    pub coeff: Complex64,
    pub p0: usize,
    pub q0: usize,
}

impl InitialStateSpec {
    pub fn validate(&self, d: usize) -> Result<()> {
        if self.p0 == 0 && self.q0 == 0 {
            return Err(argument("initial-state term (p0, q0) must differ from (0, 0)"));
        }
        if self.p0 >= d || self.q0 >= d {
            return Err(argument(format!(
                "initial-state term ({}, {}) out of range for d={d}",
                self.p0, self.q0
            )));
        }
        Ok(())
    }

    /// Weyl coefficient of the state at canonical index (a, b).
    pub fn weyl_coeff(&self, d: usize, a: usize, b: usize) -> Complex64 {
        let mut v = Complex64::zero();
        if a == self.p0 && b == self.q0 {
            v += self.coeff;
        }
        if self.trace_term_included && a == 0 && b == 0 {
            v += Complex64::new(1.0 / d as f64, 0.0);
        }
        v
    }
}

/// One measurement set: the observable read out and the state prepared.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementSet {
    pub observable: ObservableSpec,
    pub rho: InitialStateSpec,
}

/// Comb protocol parameters shared by every round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CombConfig {
    /// Base reference-sequence duration T, `[T]`.
    pub t_base: f64,
    /// Repetitions M of the reference sequence per round.
    pub reps: u32,
    /// Maximum detected frequency Omega, rad/`[T]`.
    pub omega_max: f64,
    /// Optional small-frequency start of the measurement integral; when
    /// absent the integral starts at the first comb tooth w0. Starting lower
    /// sharpens the estimate of the first grid bin.
    pub first_bin_start: Option<f64>,
    /// Relative tolerance of the measurement-integral quadrature.
    pub quad_rel_tol: f64,
}

impl CombConfig {
    pub fn new(t_base: f64, reps: u32, omega_max: f64) -> Result<Self> {
        let cfg = CombConfig {
            t_base,
            reps,
            omega_max,
            first_bin_start: None,
            quad_rel_tol: 1e-8,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.t_base.is_nan() || self.t_base <= 0.0 {
            return Err(config("period T must be positive"));
        }
        if self.reps == 0 {
            return Err(config("repetition count M must be >= 1"));
        }
        if self.omega_max <= self.omega0() {
            return Err(config("Omega must exceed the grid step w0 = 2 pi / T"));
        }
        Ok(())
    }

    /// Grid step `w0 = 2 pi / T`.
    pub fn omega0(&self) -> f64 {
        TAU / self.t_base
    }

    /// Grid size `N = floor(Omega / w0)`; rounds run r = 1..=N.
    pub fn n_grid(&self) -> usize {
        (self.omega_max / self.omega0()) as usize
    }

    /// Grid frequencies `k w0`, k = 1..=N.
    pub fn grid(&self) -> Vec<f64> {
        let w0 = self.omega0();
        (1..=self.n_grid()).map(|k| k as f64 * w0).collect()
    }

    /// Lower limit of the measurement integral.
    pub fn integral_lower(&self) -> f64 {
        self.first_bin_start.unwrap_or_else(|| self.omega0())
    }

    /// Base period of round r (1-based): `T / r`.
    pub fn round_period(&self, round: usize) -> f64 {
        self.t_base / round as f64
    }
}

/// A scenario-specific forward model, unified behind one coefficient
/// interface so the measurement paths and the inversion share code.
#[derive(Debug, Clone)]
pub enum ScenarioModel {
    Qutrit(QutritModel),
    QuditRw(QuditRwModel),
    Antimony(AntimonyModel),
}

impl ScenarioModel {
    pub fn n_sets(&self) -> usize {
        match self {
            ScenarioModel::Qutrit(m) => m.n_sets(),
            ScenarioModel::QuditRw(m) => m.n_sets(),
            ScenarioModel::Antimony(m) => m.n_sets(),
        }
    }

    /// Number of unknown real spectra the model's coefficients address.
    pub fn n_spectra(&self) -> usize {
        match self {
            ScenarioModel::Qutrit(_) => 3,
            ScenarioModel::QuditRw(_) => 1,
            ScenarioModel::Antimony(_) => 3,
        }
    }

    /// The offset term eta of one measurement set; independent of frequency,
    /// repetitions, and round.
    pub fn eta(&self, set: usize) -> Complex64 {
        match self {
            ScenarioModel::Qutrit(m) => m.eta(set),
            ScenarioModel::QuditRw(m) => m.eta(set),
            ScenarioModel::Antimony(m) => m.eta(set),
        }
    }

    /// All coefficient functions `C_i(w, t)` of one set, with the filter
    /// duration `t = reps * base_period`.
    pub fn coeffs(
        &self,
        set: usize,
        omega: f64,
        base_period: f64,
        reps: u32,
    ) -> Vec<Complex64> {
        match self {
            ScenarioModel::Qutrit(m) => m.coeffs(set, omega, base_period, reps).to_vec(),
            ScenarioModel::QuditRw(m) => alloc::vec![m.coeff(set, omega, base_period, reps)],
            ScenarioModel::Antimony(m) => m.coeffs(set, omega, base_period, reps).to_vec(),
        }
    }

    /// Prefactor of the measurement integral.
    pub fn integral_prefactor(&self) -> f64 {
        match self {
            ScenarioModel::Antimony(_) => 1.0 / TAU,
            _ => 0.5 / TAU,
        }
    }

    /// Prefactor of the comb sum for round r.
    pub fn comb_prefactor(&self, cfg: &CombConfig, round: usize) -> f64 {
        let t_r = cfg.round_period(round);
        match self {
            ScenarioModel::Antimony(_) => cfg.reps as f64 / t_r,
            _ => cfg.reps as f64 / (2.0 * t_r),
        }
    }

    /// Integral-path expectation `A^r` of one set at round r (1-based),
    /// simulating the measured observable from the true spectra.
    pub fn measure(
        &self,
        truth: &ScenarioSpectra,
        cfg: &CombConfig,
        set: usize,
        round: usize,
    ) -> Result<Complex64> {
        let t_r = cfg.round_period(round);
        let lo = cfg.integral_lower();
        let tooth_spacing = TAU / t_r;
        let w0 = cfg.omega0();
        let breaks =
            quad::comb_breakpoints(lo, cfg.omega_max, tooth_spacing, cfg.reps, 0.25 * w0);
        let n_spec = self.n_spectra();
        let integrand = |omega: f64| -> Complex64 {
            let cs = self.coeffs(set, omega, t_r, cfg.reps);
            let mut acc = Complex64::zero();
            for i in 0..n_spec {
                acc += cs[i] * truth.x(i, omega);
            }
            acc
        };
        let q = quad::integrate(integrand, &breaks, cfg.quad_rel_tol)?;
        Ok(self.eta(set) - q.value * self.integral_prefactor())
    }

    /// Comb-path expectation `B^r`: the discrete sum over comb teeth within
    /// the detection band (harmonics k with `k r <= N`).
    pub fn comb(
        &self,
        truth: &ScenarioSpectra,
        cfg: &CombConfig,
        set: usize,
        round: usize,
    ) -> Complex64 {
        let t_r = cfg.round_period(round);
        let w0 = cfg.omega0();
        let n = cfg.n_grid();
        let n_spec = self.n_spectra();
        let mut acc = Complex64::zero();
        for k in 1..=(n / round) {
            let omega = (round * k) as f64 * w0;
            let cs = self.coeffs(set, omega, t_r, 1);
            for i in 0..n_spec {
                acc += cs[i] * truth.x(i, omega);
            }
        }
        self.eta(set) - acc * self.comb_prefactor(cfg, round)
    }
}
