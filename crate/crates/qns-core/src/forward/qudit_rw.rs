//! Reduced-Weyl forward model for a spin qudit under Z-type dephasing.
//!
//! The noise couples through `beta_a(t) = f_a A(t)` with the spin weights
//! `f_a = (1/d) sum_p xi^{-ap} (I - p)`, so all polyspectra are proportional
//! to one scalar spectrum. After folding to positive frequencies only its
//! even part `R(w)` survives, with coefficient
//!
//! `C = 2 sum_{a, a~, b, b~} f_a f_a~ lambda_{b b~} F_{a,b} F*_{-a~,-b~}`.

use alloc::format;
use alloc::vec::Vec;
use num_complex::Complex64;
use num_traits::Zero;

use crate::error::config;
use crate::filters::{filter_from_segments, repetition_factor, segment_factors};
use crate::pulses::{BasisKind, SwitchIndex, SwitchingTable};
use crate::weyl::Dim;
use crate::Result;

use super::MeasurementSet;

/// Spin coupling weights `f_a = (1/d) sum_p xi^{-ap} (I - p)`, hbar = 1.
pub fn rw_coupling(dim: Dim) -> Vec<Complex64> {
    let d = dim.d();
    let roots = dim.roots();
    let spin = (d as f64 - 1.0) / 2.0;
    (0..d)
        .map(|a| {
            let mut s = Complex64::zero();
            for p in 0..d {
                s += roots.xi(-((a * p) as i64)) * (spin - p as f64);
            }
            s / d as f64
        })
        .collect()
}

/// eta and the lambda table (dense over `(b, b~)`, index `b * d + b~`) of one
/// reduced-Weyl measurement set.
pub fn eta_lambda_rw(dim: Dim, set: &MeasurementSet) -> (Complex64, Vec<Complex64>) {
    let d = dim.d();
    let roots = dim.roots();
    let obs = set.observable;
    let rho = set.rho;
    let (m, n) = (obs.m as i64, obs.n as i64);
    let df = d as f64;

    let v_neg = rho.weyl_coeff(d, dim.canon(-m), dim.canon(-n));
    let eta = df * obs.coeff * v_neg * roots.xi(m * n);

    let q_req = dim.canon(-n);
    let mut lambda = Vec::with_capacity(d * d);
    for b in 0..d as i64 {
        for bt in 0..d as i64 {
            let p_req = dim.canon(-m - b - bt);
            let v = rho.weyl_coeff(d, p_req, q_req);
            let gate = (Complex64::new(1.0, 0.0) - roots.xi(n * b))
                * (Complex64::new(1.0, 0.0) - roots.xi(n * bt))
                * roots.xi(m * n);
            lambda.push(df * obs.coeff * v * gate);
        }
    }
    (eta, lambda)
}

/// Reduced-Weyl forward model: spin weights, switching table, and per-set
/// constants.
#[derive(Debug, Clone)]
pub struct QuditRwModel {
    dim: Dim,
    table: SwitchingTable,
    coupling: Vec<Complex64>,
    sets: Vec<(Complex64, Vec<Complex64>)>,
}

impl QuditRwModel {
    pub fn new(dim: Dim, table: SwitchingTable, sets: &[MeasurementSet]) -> Result<Self> {
        if table.kind() != BasisKind::ReducedWeyl {
            return Err(config("reduced-Weyl model needs a reduced switching table"));
        }
        if table.dim() != dim {
            return Err(config(format!(
                "table dimension {} does not match d = {}",
                table.dim().d(),
                dim.d()
            )));
        }
        for s in sets {
            s.rho.validate(dim.d())?;
        }
        let coupling = rw_coupling(dim);
        let sets = sets.iter().map(|s| eta_lambda_rw(dim, s)).collect();
        Ok(QuditRwModel { dim, table, coupling, sets })
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn table(&self) -> &SwitchingTable {
        &self.table
    }

    pub fn coupling(&self) -> &[Complex64] {
        &self.coupling
    }

    pub fn n_sets(&self) -> usize {
        self.sets.len()
    }

    pub fn eta(&self, set: usize) -> Complex64 {
        self.sets[set].0
    }

    pub fn lambda(&self, set: usize) -> &[Complex64] {
        &self.sets[set].1
    }

    /// Coupling-contracted filter sums at one frequency:
    /// `G_b = sum_a f_a F_{a,b}` and `H_b = sum_a f_a conj(F_{-a,-b})`.
    fn filter_sums(&self, omega: f64, base_period: f64, reps: u32) -> (Vec<Complex64>, Vec<Complex64>) {
        let d = self.dim.d();
        let segs = segment_factors(&self.table.breakpoints(base_period), omega);
        let fac = repetition_factor(omega, base_period, reps);
        let mut filters = Vec::with_capacity(d * d);
        for a in 0..d {
            for b in 0..d {
                let f = filter_from_segments(&self.table, &segs, SwitchIndex::Reduced { a, b });
                filters.push(fac * f);
            }
        }
        let mut g = alloc::vec![Complex64::zero(); d];
        let mut h = alloc::vec![Complex64::zero(); d];
        for b in 0..d {
            for a in 0..d {
                g[b] += self.coupling[a] * filters[a * d + b];
                let na = self.dim.neg(a);
                let nb = self.dim.neg(b);
                h[b] += self.coupling[a] * filters[na * d + nb].conj();
            }
        }
        (g, h)
    }

    /// The folded coefficient `C(m, n, p, w, t)` of one set.
    pub fn coeff(&self, set: usize, omega: f64, base_period: f64, reps: u32) -> Complex64 {
        let d = self.dim.d();
        let lambda = &self.sets[set].1;
        let (g, h) = self.filter_sums(omega, base_period, reps);
        let mut c = Complex64::zero();
        for b in 0..d {
            for bt in 0..d {
                let l = lambda[b * d + bt];
                if l.is_zero() {
                    continue;
                }
                c += l * g[b] * h[bt];
            }
        }
        2.0 * c
    }

    /// The bracket multiplying the odd spectrum component; identically zero
    /// after summation, kept as a testable residual.
    pub fn odd_coefficient_residual(
        &self,
        set: usize,
        omega: f64,
        base_period: f64,
        reps: u32,
    ) -> f64 {
        let d = self.dim.d();
        let lambda = &self.sets[set].1;
        let (g, h) = self.filter_sums(omega, base_period, reps);
        let mut c = Complex64::zero();
        for b in 0..d {
            for bt in 0..d {
                let l = lambda[b * d + bt];
                if l.is_zero() {
                    continue;
                }
                c += l * (g[b] * h[bt] - h[b] * g[bt]);
            }
        }
        c.norm()
    }
}
