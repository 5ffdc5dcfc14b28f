//! Qutrit (d = 3) reduced-Weyl forward model.
//!
//! With the special three-interval switching table, the observable couples to
//! the four polyspectra `S_{ab}` (a, b = +-1) through the constants
//! `lambda^{mn}_{ab}` and the filter products `F_a F*_{-b}`. Folding the
//! frequency axis onto the positive half leaves three real unknowns with
//! coefficients `C_0, C_1, C_2` (the odd component's coefficient vanishes).

use alloc::vec::Vec;
use num_complex::Complex64;
use num_traits::Zero;

use crate::error::config;
use crate::filters::{filter_from_segments, repetition_factor, segment_factors};
use crate::pulses::{BasisKind, SwitchIndex, SwitchingTable};
use crate::weyl::Dim;
use crate::Result;

use super::MeasurementSet;

/// Signed index pair (a, b) with a, b in {+1, -1}; slot 0 is +1, slot 1 is -1.
const SIGNS: [i64; 2] = [1, -1];

/// eta and the lambda table of one qutrit measurement set.
///
/// `lambda[i][j]` carries the `(a, b) = (SIGNS[i], SIGNS[j])` entry.
pub fn eta_lambda_qutrit(set: &MeasurementSet) -> (Complex64, [[Complex64; 2]; 2]) {
    let d = 3usize;
    let roots = Dim::new(d).expect("d=3").roots();
    let obs = set.observable;
    let rho = set.rho;
    let (m, n) = (obs.m as i64, obs.n as i64);

    let v_neg = rho.weyl_coeff(d, (-m).rem_euclid(3) as usize, (-n).rem_euclid(3) as usize);
    let eta = 3.0 * obs.coeff * v_neg * roots.xi(m * n);

    let mut lambda = [[Complex64::zero(); 2]; 2];
    for (ia, &a) in SIGNS.iter().enumerate() {
        for (ib, &b) in SIGNS.iter().enumerate() {
            let gate = (Complex64::new(1.0, 0.0) - roots.xi(-a * n))
                * (Complex64::new(1.0, 0.0) - roots.xi(-b * n))
                * roots.xi(m * n);
            // Coherence branch: the state term at (a + b - m, -n) mod 3.
            let p = (a + b - m).rem_euclid(3) as usize;
            let q = (-n).rem_euclid(3) as usize;
            let mut v = Complex64::zero();
            if p == rho.p0 && q == rho.q0 {
                v += rho.coeff;
            }
            // Trace branch (vanishes unless n = 0, and then the gate is 0;
            // kept literal for the flag's sake).
            if rho.trace_term_included && p == 0 && q == 0 {
                v += Complex64::new(1.0 / 3.0, 0.0);
            }
            lambda[ia][ib] = 3.0 * obs.coeff * v * gate;
        }
    }
    (eta, lambda)
}

/// Qutrit forward model: the special switching table plus per-set constants.
#[derive(Debug, Clone)]
pub struct QutritModel {
    table: SwitchingTable,
    sets: Vec<(Complex64, [[Complex64; 2]; 2])>,
}

impl QutritModel {
    pub fn new(table: SwitchingTable, sets: &[MeasurementSet]) -> Result<Self> {
        if table.kind() != BasisKind::QutritSpecial {
            return Err(config("qutrit model needs the qutrit special switching table"));
        }
        for s in sets {
            s.rho.validate(3)?;
        }
        let sets = sets.iter().map(eta_lambda_qutrit).collect();
        Ok(QutritModel { table, sets })
    }

    pub fn table(&self) -> &SwitchingTable {
        &self.table
    }

    pub fn n_sets(&self) -> usize {
        self.sets.len()
    }

    pub fn eta(&self, set: usize) -> Complex64 {
        self.sets[set].0
    }

    pub fn lambda(&self, set: usize) -> &[[Complex64; 2]; 2] {
        &self.sets[set].1
    }

    /// The folded coefficients `(C_0, C_1, C_2, C_3)` of one set at one
    /// frequency, with filters evaluated over `reps` repetitions of
    /// `base_period`. `C_3` is identically zero.
    pub fn coeffs(
        &self,
        set: usize,
        omega: f64,
        base_period: f64,
        reps: u32,
    ) -> [Complex64; 4] {
        let lambda = &self.sets[set].1;
        let segs = segment_factors(&self.table.breakpoints(base_period), omega);
        let fac = repetition_factor(omega, base_period, reps);
        // F_{+1} and F_{-1}; canonical indices 1 and 2.
        let f_p = fac * filter_from_segments(&self.table, &segs, SwitchIndex::Qutrit { a: 1 });
        let f_m = fac * filter_from_segments(&self.table, &segs, SwitchIndex::Qutrit { a: 2 });

        // lambda[0][0] = (+1,+1), lambda[1][1] = (-1,-1), etc.
        let pp = lambda[0][0] * f_p * f_m.conj();
        let mm = lambda[1][1] * f_m * f_p.conj();
        let c0 = 2.0 * (pp + mm);
        let c1 = Complex64::new(0.0, 2.0) * (pp - mm);
        let c2 = 2.0
            * (lambda[0][1] * f_p * f_p.conj() + lambda[1][0] * f_m * f_m.conj());
        [c0, c1, c2, Complex64::zero()]
    }
}

impl core::fmt::Display for QutritModel {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "qutrit model ({} sets)", self.sets.len())
    }
}
