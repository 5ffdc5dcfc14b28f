//! Shared oracles for the integration tests. These deliberately avoid the
//! crate's own closed forms and production integrator: filters are checked
//! against composite Gauss-Legendre quadrature of the defining integral, and
//! coefficient contractions against naive full-index loops.

#![allow(dead_code)]

use num_complex::Complex64;
use qns_core::pulses::{SwitchIndex, SwitchingTable};

/// Nodes and weights of an n-point Gauss-Legendre rule on [-1, 1], computed
/// by Newton iteration on the Legendre polynomial.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Chebyshev initial guess.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_and_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_and_derivative(n, x);
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Composite Gauss-Legendre integral of a complex function over [a, b],
/// splitting into enough panels that each spans at most ~4 oscillation
/// periods of `e^{I omega t}`.
pub fn gl_oscillatory(
    f: &dyn Fn(f64) -> Complex64,
    a: f64,
    b: f64,
    omega: f64,
    nodes_per_panel: usize,
) -> Complex64 {
    let wavelengths = (omega.abs() * (b - a)) / std::f64::consts::TAU;
    let panels = ((wavelengths / 4.0).ceil() as usize).max(1);
    let (xs, ws) = gauss_legendre(nodes_per_panel);
    let mut total = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        let lo = a + (b - a) * p as f64 / panels as f64;
        let hi = a + (b - a) * (p + 1) as f64 / panels as f64;
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        for (x, w) in xs.iter().zip(ws.iter()) {
            total += f(mid + half * x) * (w * half);
        }
    }
    total
}

/// Quadrature oracle for a filter function: integrates the defining
/// `y(t) e^{I omega t}` with at least 32 Gauss-Legendre nodes per switching
/// interval (more when the phase turns fast).
pub fn filter_by_quadrature(
    table: &SwitchingTable,
    index: SwitchIndex,
    omega: f64,
    period: f64,
    reps: u32,
) -> Complex64 {
    let base_pts = table.breakpoints(period);
    let mut total = Complex64::new(0.0, 0.0);
    for rep in 0..reps {
        let offset = rep as f64 * period;
        for h in 0..base_pts.len() - 1 {
            let y = table.value(h, index);
            let (a, b) = (base_pts[h] + offset, base_pts[h + 1] + offset);
            total += y * gl_oscillatory(
                &|t| Complex64::new(0.0, omega * t).exp(),
                a,
                b,
                omega,
                32,
            );
        }
    }
    total
}
