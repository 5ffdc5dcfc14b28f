//! Filter functions: bounded Fourier transforms of switching functions.
//!
//! For a switching function that is constant on intervals with breakpoints
//! `t_0 = 0 < t_1 < .. < t_L = T_r`,
//!
//! `F(w, T_r) = (-I/w) sum_h y_h (e^{I w t_{h+1}} - e^{I w t_h})`
//!
//! with the `w = 0` branch `F(0, T_r) = sum_h y_h (t_{h+1} - t_h)`. Repeating
//! the base sequence M times multiplies by the geometric comb factor
//! `(1 - e^{I w M T_r}) / (1 - e^{I w T_r})`, which is `M` at comb multiples.

use alloc::vec::Vec;
use num_complex::Complex64;
use num_traits::Zero;

use crate::pulses::{BasisKind, SwitchIndex, SwitchingTable};

/// Threshold on `|1 - e^{I w T_r}|` below which the comb factor switches to
/// its limit value `M`; avoids catastrophic cancellation at the poles of the
/// geometric ratio.
pub const COMB_LIMIT_THRESHOLD: f64 = 1e-9;

/// One filter evaluation request.
#[derive(Debug, Clone, Copy)]
pub struct FilterRequest<'a> {
    pub table: &'a SwitchingTable,
    pub index: SwitchIndex,
    /// Angular frequency, rad / `[T]`.
    pub omega: f64,
    /// Base sequence duration T_r, `[T]`.
    pub period: f64,
    /// Repetition count M >= 1.
    pub reps: u32,
}

/// Per-interval integral factors `(-I/w)(e^{I w t_{h+1}} - e^{I w t_h})`, or
/// the interval lengths at `w = 0`. A filter value is the dot product of
/// these with the interval switching values, so callers evaluating many
/// indices at one frequency compute them once.
pub fn segment_factors(breakpoints: &[f64], omega: f64) -> Vec<Complex64> {
    let n = breakpoints.len() - 1;
    let mut segs = Vec::with_capacity(n);
    if omega == 0.0 {
        for h in 0..n {
            segs.push(Complex64::new(breakpoints[h + 1] - breakpoints[h], 0.0));
        }
    } else {
        let minus_i_over_w = Complex64::new(0.0, -1.0 / omega);
        let mut prev = phase(omega * breakpoints[0]);
        for h in 0..n {
            let next = phase(omega * breakpoints[h + 1]);
            segs.push(minus_i_over_w * (next - prev));
            prev = next;
        }
    }
    segs
}

#[inline]
fn phase(theta: f64) -> Complex64 {
    Complex64::new(libm::cos(theta), libm::sin(theta))
}

/// Filter of one base period from precomputed segment factors.
pub fn filter_from_segments(
    table: &SwitchingTable,
    segments: &[Complex64],
    index: SwitchIndex,
) -> Complex64 {
    let mut f = Complex64::zero();
    for (h, seg) in segments.iter().enumerate() {
        f += table.value(h, index) * seg;
    }
    f
}

/// Single-period filter `F(w, T_r)`.
pub fn filter_single(req: &FilterRequest<'_>) -> Complex64 {
    let segs = segment_factors(&req.table.breakpoints(req.period), req.omega);
    filter_from_segments(req.table, &segs, req.index)
}

/// Comb repetition factor `sum_{n=0}^{M-1} e^{I w n T_r}`.
pub fn repetition_factor(omega: f64, period: f64, reps: u32) -> Complex64 {
    let m = reps as f64;
    if omega == 0.0 {
        return Complex64::new(m, 0.0);
    }
    let unit = phase(omega * period);
    let denom = Complex64::new(1.0, 0.0) - unit;
    if denom.norm() < COMB_LIMIT_THRESHOLD {
        return Complex64::new(m, 0.0);
    }
    (Complex64::new(1.0, 0.0) - phase(omega * period * m)) / denom
}

/// M-repetition filter `F(w, M T_r)`.
pub fn filter_repeated(req: &FilterRequest<'_>) -> Complex64 {
    repetition_factor(req.omega, req.period, req.reps) * filter_single(req)
}

/// Residual of the conjugation identity
/// `conj(F_{-A})(w) = F_A(-w) xi^{-A^n_Z A^n_X + A_Z A_X}`
/// (phase 1 for the reduced and qutrit flavors).
pub fn filter_conjugate_check(req: &FilterRequest<'_>) -> f64 {
    let dim = req.table.dim();
    let neg = FilterRequest { index: req.index.neg(dim), ..*req };
    let mirrored = FilterRequest { omega: -req.omega, ..*req };
    let phase = match req.index {
        SwitchIndex::Weyl { a, b, ap, bp } => {
            debug_assert_eq!(req.table.kind(), BasisKind::Weyl);
            dim.roots().xi((ap * bp) as i64 - (a * b) as i64)
        }
        _ => Complex64::new(1.0, 0.0),
    };
    (filter_repeated(&neg).conj() - filter_repeated(&mirrored) * phase).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulses::{build_switching_table, BasisKind, ReferencePulseSequence};
    use crate::weyl::Dim;
    use core::f64::consts::TAU;

    fn qutrit_table() -> SwitchingTable {
        let dim = Dim::new(3).unwrap();
        let seq = ReferencePulseSequence::qutrit_standard();
        build_switching_table(dim, &seq, BasisKind::QutritSpecial).unwrap()
    }

    #[test]
    fn constant_unity_filter() {
        // The a = 0 qutrit switching function is 1 in every interval, so its
        // filter is the elementary integral of e^{I w t}.
        let table = qutrit_table();
        let t = 1.7;
        let idx = SwitchIndex::Qutrit { a: 0 };
        let at0 = filter_single(&FilterRequest { table: &table, index: idx, omega: 0.0, period: t, reps: 1 });
        assert!((at0 - Complex64::new(t, 0.0)).norm() < 1e-14);

        let w = 3.1;
        let f = filter_single(&FilterRequest { table: &table, index: idx, omega: w, period: t, reps: 1 });
        let want = (Complex64::new(0.0, w * t).exp() - Complex64::new(1.0, 0.0))
            / Complex64::new(0.0, w);
        assert!((f - want).norm() < 1e-13);
    }

    #[test]
    fn repetition_matches_brute_sum() {
        let table = qutrit_table();
        let idx = SwitchIndex::Qutrit { a: 1 };
        let (t, m) = (0.9, 5u32);
        for &w in &[0.37, 4.11, 17.3] {
            let single = filter_single(&FilterRequest { table: &table, index: idx, omega: w, period: t, reps: 1 });
            let mut brute = Complex64::zero();
            for n in 0..m {
                brute += Complex64::new(0.0, w * n as f64 * t).exp() * single;
            }
            let rep = filter_repeated(&FilterRequest { table: &table, index: idx, omega: w, period: t, reps: m });
            assert!((rep - brute).norm() < 1e-12 * brute.norm().max(1.0));
        }
    }

    #[test]
    fn comb_multiple_gives_m_times_single() {
        let table = qutrit_table();
        let idx = SwitchIndex::Qutrit { a: 2 };
        let (t, m) = (1.0, 30u32);
        let w = 3.0 * TAU / t;
        let single = filter_single(&FilterRequest { table: &table, index: idx, omega: w, period: t, reps: 1 });
        let rep = filter_repeated(&FilterRequest { table: &table, index: idx, omega: w, period: t, reps: m });
        assert!((rep - single * m as f64).norm() < 1e-10);
    }

    #[test]
    fn zero_frequency_repetition() {
        let table = qutrit_table();
        let idx = SwitchIndex::Qutrit { a: 1 };
        let (t, m) = (2.0, 7u32);
        let single = filter_single(&FilterRequest { table: &table, index: idx, omega: 0.0, period: t, reps: 1 });
        let rep = filter_repeated(&FilterRequest { table: &table, index: idx, omega: 0.0, period: t, reps: m });
        assert!((rep - single * m as f64).norm() < 1e-13);
    }

    #[test]
    fn qutrit_conjugation_identity() {
        let table = qutrit_table();
        for a in 0..3 {
            for &w in &[0.0, 1.3, 6.7, -12.1] {
                let req = FilterRequest {
                    table: &table,
                    index: SwitchIndex::Qutrit { a },
                    omega: w,
                    period: 1.0,
                    reps: 4,
                };
                assert!(filter_conjugate_check(&req) < 1e-12, "a={a} w={w}");
            }
        }
    }
}
