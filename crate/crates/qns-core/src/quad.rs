//! Adaptive Gauss-Kronrod quadrature for complex-valued integrands.
//!
//! The measurement integrals have comb-shaped integrands: narrow teeth of
//! height ~M^2 at harmonics of the round frequency, oscillatory tails in
//! between. Callers pass breakpoints aligned to the teeth; each panel is then
//! bisected until its 7/15-point Gauss-Kronrod discrepancy fits its share of
//! the global error budget. Summation order is fixed, so results are
//! independent of how work is scheduled upstream.

use alloc::format;
use alloc::vec::Vec;
use num_complex::Complex64;
use num_traits::Zero;

use crate::error::Error;
use crate::Result;

/// 15-point Kronrod abscissae on [0, 1] side of [-1, 1] (symmetric).
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];

/// Kronrod weights matching `XGK`.
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

/// 7-point Gauss weights for the odd Kronrod abscissae.
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

const MAX_DEPTH: u32 = 40;

/// Hard cap on integrand evaluations per call; refinement past this point
/// stops and the leftover discrepancy is reported as unresolved error.
const MAX_EVALS: u64 = 4_000_000;

#[derive(Debug, Clone, Copy)]
pub struct QuadratureResult {
    pub value: Complex64,
    pub abs_err: f64,
    pub evals: u64,
}

struct PanelEstimate {
    kronrod: Complex64,
    err: f64,
}

fn gk15(f: &mut impl FnMut(f64) -> Complex64, a: f64, b: f64, evals: &mut u64) -> PanelEstimate {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    *evals += 15;

    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for k in 0..7 {
        let dx = half * XGK[k];
        let flo = f(center - dx);
        let fhi = f(center + dx);
        let pair = flo + fhi;
        kronrod += pair * WGK[k];
        if k % 2 == 1 {
            gauss += pair * WG[k / 2];
        }
    }
    kronrod *= half;
    gauss *= half;
    PanelEstimate { kronrod, err: (kronrod - gauss).norm() }
}

#[allow(clippy::too_many_arguments)]
fn refine(
    f: &mut impl FnMut(f64) -> Complex64,
    a: f64,
    b: f64,
    est: PanelEstimate,
    tol: f64,
    depth: u32,
    evals: &mut u64,
    unresolved: &mut f64,
) -> Complex64 {
    if est.err <= tol || depth >= MAX_DEPTH || *evals >= MAX_EVALS {
        if est.err > tol {
            *unresolved += est.err;
        }
        return est.kronrod;
    }
    let mid = 0.5 * (a + b);
    let left = gk15(f, a, mid, evals);
    let right = gk15(f, mid, b, evals);
    let half_tol = 0.5 * tol;
    refine(f, a, mid, left, half_tol, depth + 1, evals, unresolved)
        + refine(f, mid, b, right, half_tol, depth + 1, evals, unresolved)
}

/// Integrates `f` over the union of panels defined by `breakpoints`
/// (ascending). The error target is `rel_tol` relative to the integral's own
/// magnitude, distributed over panels by width.
pub fn integrate(
    mut f: impl FnMut(f64) -> Complex64,
    breakpoints: &[f64],
    rel_tol: f64,
) -> Result<QuadratureResult> {
    assert!(breakpoints.len() >= 2, "need at least one panel");
    let total_width: f64 = breakpoints[breakpoints.len() - 1] - breakpoints[0];
    let mut evals: u64 = 0;

    // First pass: coarse estimate fixing the absolute error budget.
    let mut coarse = Vec::with_capacity(breakpoints.len() - 1);
    let mut rough = Complex64::zero();
    for w in breakpoints.windows(2) {
        let est = gk15(&mut f, w[0], w[1], &mut evals);
        rough += est.kronrod;
        coarse.push(est);
    }
    let scale = rough.norm().max(coarse.iter().map(|e| e.kronrod.norm()).fold(0.0, f64::max));
    let budget = rel_tol * scale.max(f64::MIN_POSITIVE);

    // Second pass: refine each panel against its width share of the budget.
    let mut value = Complex64::zero();
    let mut unresolved = 0.0;
    for (w, est) in breakpoints.windows(2).zip(coarse) {
        let tol = budget * ((w[1] - w[0]) / total_width).max(1e-6);
        value += refine(&mut f, w[0], w[1], est, tol, 0, &mut evals, &mut unresolved);
    }

    if unresolved > 10.0 * budget.max(1e-300) {
        return Err(Error::Numerical(format!(
            "quadrature did not converge: unresolved error {unresolved:.3e} \
             against budget {budget:.3e} after {evals} evaluations \
             (partial value {value})"
        )));
    }
    Ok(QuadratureResult { value, abs_err: unresolved, evals })
}

/// Breakpoints for a comb-shaped integrand on `[lo, hi]`: panel edges at the
/// comb teeth `k * tooth_spacing`, a tight window of `w = spacing / reps`
/// around each tooth, and gap panels no wider than `max_gap_panel`.
pub fn comb_breakpoints(
    lo: f64,
    hi: f64,
    tooth_spacing: f64,
    reps: u32,
    max_gap_panel: f64,
) -> Vec<f64> {
    let mut pts = Vec::new();
    let window = tooth_spacing / (reps.max(1) as f64);
    let push = |pts: &mut Vec<f64>, x: f64| {
        if x > lo && x < hi {
            pts.push(x);
        }
    };
    let guard = (4.0 * window).min(0.45 * tooth_spacing);
    let mut k = libm::floor(lo / tooth_spacing).max(0.0) as u64;
    loop {
        let center = k as f64 * tooth_spacing;
        if center - guard > hi {
            break;
        }
        push(&mut pts, center - guard);
        push(&mut pts, center - window);
        push(&mut pts, center);
        push(&mut pts, center + window);
        push(&mut pts, center + guard);
        k += 1;
    }
    pts.push(lo);
    pts.push(hi);
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
    pts.dedup_by(|a, b| (*a - *b).abs() < 1e-15);

    // Split any remaining wide gap.
    let mut out = Vec::with_capacity(pts.len());
    out.push(pts[0]);
    for &x in &pts[1..] {
        let prev = *out.last().expect("nonempty");
        let gap = x - prev;
        if gap > max_gap_panel {
            let n = libm::ceil(gap / max_gap_panel) as usize;
            for i in 1..n {
                out.push(prev + gap * i as f64 / n as f64);
            }
        }
        out.push(x);
    }
    out
}
