//! Small dense complex linear algebra: partial-pivot LU, Householder QR
//! least squares, and a one-norm condition number.
//!
//! Systems here are at most a few hundred unknowns (spectra x grid points),
//! so plain O(n^3) routines with no blocking are entirely adequate.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
use num_traits::Zero;

use crate::error::Error;
use crate::Result;

/// Row-major rectangular complex matrix for the solver layer.
#[derive(Debug, Clone)]
pub struct DenseMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix { rows, cols, data: vec![Complex64::zero(); rows * cols] }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    /// Maximum column absolute sum.
    pub fn one_norm(&self) -> f64 {
        let mut best: f64 = 0.0;
        for j in 0..self.cols {
            let s: f64 = (0..self.rows).map(|i| self.at(i, j).norm()).sum();
            best = best.max(s);
        }
        best
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![Complex64::zero(); self.rows];
        for i in 0..self.rows {
            let mut s = Complex64::zero();
            for j in 0..self.cols {
                s += self.at(i, j) * x[j];
            }
            y[i] = s;
        }
        y
    }
}

/// LU factorization with partial pivoting of a square matrix.
pub struct Lu {
    n: usize,
    lu: DenseMatrix,
    piv: Vec<usize>,
    /// Estimated null-space dimension from vanishing pivots.
    pub null_dim: usize,
}

const PIVOT_EPS: f64 = 1e-300;

pub fn lu_factor(a: &DenseMatrix) -> Lu {
    assert_eq!(a.rows, a.cols, "LU needs a square matrix");
    let n = a.rows;
    let mut lu = a.clone();
    let mut piv = vec![0usize; n];
    let mut null_dim = 0usize;

    for k in 0..n {
        let mut p = k;
        let mut best = lu.at(k, k).norm();
        for i in (k + 1)..n {
            let v = lu.at(i, k).norm();
            if v > best {
                best = v;
                p = i;
            }
        }
        piv[k] = p;
        if p != k {
            for j in 0..n {
                let tmp = lu.at(k, j);
                lu.set(k, j, lu.at(p, j));
                lu.set(p, j, tmp);
            }
        }
        let pivot = lu.at(k, k);
        if pivot.norm() <= PIVOT_EPS {
            null_dim += 1;
            continue;
        }
        for i in (k + 1)..n {
            let factor = lu.at(i, k) / pivot;
            lu.set(i, k, factor);
            if factor.is_zero() {
                continue;
            }
            for j in (k + 1)..n {
                let v = lu.at(i, j) - factor * lu.at(k, j);
                lu.set(i, j, v);
            }
        }
    }
    Lu { n, lu, piv, null_dim }
}

impl Lu {
    pub fn solve(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        if self.null_dim > 0 {
            return Err(Error::Singular { null_dim: self.null_dim });
        }
        let n = self.n;
        let mut x = b.to_vec();
        // The factorization swaps full rows (multipliers included), so the
        // whole pivot sequence applies to the right-hand side before the
        // triangular solves.
        for k in 0..n {
            x.swap(k, self.piv[k]);
        }
        for k in 0..n {
            for i in (k + 1)..n {
                let f = self.lu.at(i, k);
                let delta = f * x[k];
                x[i] -= delta;
            }
        }
        for k in (0..n).rev() {
            for j in (k + 1)..n {
                let delta = self.lu.at(k, j) * x[j];
                x[k] -= delta;
            }
            x[k] /= self.lu.at(k, k);
        }
        Ok(x)
    }

    /// Exact one-norm of the inverse, column by column. O(n^3) on top of the
    /// factorization, which is fine at these sizes.
    pub fn inverse_one_norm(&self) -> Result<f64> {
        let n = self.n;
        let mut best: f64 = 0.0;
        let mut e = vec![Complex64::zero(); n];
        for j in 0..n {
            e[j] = Complex64::new(1.0, 0.0);
            let col = self.solve(&e)?;
            e[j] = Complex64::zero();
            best = best.max(col.iter().map(|v| v.norm()).sum());
        }
        Ok(best)
    }
}

/// One-norm condition number `||A||_1 ||A^-1||_1`; infinite when singular.
pub fn condition_one_norm(a: &DenseMatrix, lu: &Lu) -> f64 {
    match lu.inverse_one_norm() {
        Ok(inv) => a.one_norm() * inv,
        Err(_) => f64::INFINITY,
    }
}

/// Householder-QR least squares for `rows >= cols`. Returns the minimizer of
/// `||A x - b||_2`, or a singular error with the rank deficiency when a
/// diagonal of R collapses.
pub fn lstsq_qr(a: &DenseMatrix, b: &[Complex64]) -> Result<Vec<Complex64>> {
    let (m, n) = (a.rows, a.cols);
    assert!(m >= n, "least squares needs rows >= cols");
    let mut r = a.clone();
    let mut rhs = b.to_vec();

    for k in 0..n {
        // Householder vector for column k.
        let mut norm_sq = 0.0;
        for i in k..m {
            norm_sq += r.at(i, k).norm_sqr();
        }
        let alpha = libm::sqrt(norm_sq);
        if alpha == 0.0 {
            continue;
        }
        let akk = r.at(k, k);
        let phase = if akk.is_zero() { Complex64::new(1.0, 0.0) } else { akk / akk.norm() };
        let v0 = akk + phase * alpha;
        let mut v = vec![Complex64::zero(); m - k];
        v[0] = v0;
        for i in (k + 1)..m {
            v[i - k] = r.at(i, k);
        }
        let vnorm_sq: f64 = v.iter().map(|x| x.norm_sqr()).sum();
        if vnorm_sq == 0.0 {
            continue;
        }
        // Apply H = I - 2 v v^H / (v^H v) to R and rhs.
        for j in k..n {
            let mut dot = Complex64::zero();
            for i in k..m {
                dot += v[i - k].conj() * r.at(i, j);
            }
            let scale = dot * 2.0 / vnorm_sq;
            for i in k..m {
                let val = r.at(i, j) - scale * v[i - k];
                r.set(i, j, val);
            }
        }
        let mut dot = Complex64::zero();
        for i in k..m {
            dot += v[i - k].conj() * rhs[i];
        }
        let scale = dot * 2.0 / vnorm_sq;
        for i in k..m {
            rhs[i] -= scale * v[i - k];
        }
    }

    // Rank check on R's diagonal.
    let rmax = (0..n).map(|k| r.at(k, k).norm()).fold(0.0, f64::max);
    let tol = rmax * 1e-14;
    let null_dim = (0..n).filter(|&k| r.at(k, k).norm() <= tol).count();
    if null_dim > 0 {
        return Err(Error::Singular { null_dim });
    }

    let mut x = rhs[..n].to_vec();
    for k in (0..n).rev() {
        for j in (k + 1)..n {
            let delta = r.at(k, j) * x[j];
            x[k] -= delta;
        }
        x[k] /= r.at(k, k);
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn lu_solves_small_complex_system() {
        let mut a = DenseMatrix::zeros(2, 2);
        a.set(0, 0, c(2.0, 1.0));
        a.set(0, 1, c(0.0, -1.0));
        a.set(1, 0, c(1.0, 0.0));
        a.set(1, 1, c(3.0, 2.0));
        let x_true = [c(1.0, -1.0), c(0.5, 2.0)];
        let b = a.matvec(&x_true);
        let lu = lu_factor(&a);
        let x = lu.solve(&b).unwrap();
        for (got, want) in x.iter().zip(x_true.iter()) {
            assert!((got - want).norm() < 1e-13);
        }
        assert!(condition_one_norm(&a, &lu).is_finite());
    }

    #[test]
    fn lu_roundtrips_random_dense_systems() {
        let mut state = 42u64;
        let mut rnd = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for _ in 0..20 {
            let n = 12;
            let mut a = DenseMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    a.set(i, j, c(rnd(), rnd()));
                }
            }
            let xt: alloc::vec::Vec<Complex64> = (0..n).map(|_| c(rnd(), rnd())).collect();
            let b = a.matvec(&xt);
            let x = lu_factor(&a).solve(&b).unwrap();
            let err = x.iter().zip(xt.iter()).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
            assert!(err < 1e-10, "err {err:.3e}");
        }
    }

    #[test]
    fn singular_matrix_reports_null_dim() {
        let mut a = DenseMatrix::zeros(2, 2);
        a.set(0, 0, c(1.0, 0.0));
        a.set(0, 1, c(2.0, 0.0));
        a.set(1, 0, c(2.0, 0.0));
        a.set(1, 1, c(4.0, 0.0));
        let lu = lu_factor(&a);
        match lu.solve(&[c(1.0, 0.0), c(0.0, 0.0)]) {
            Err(Error::Singular { null_dim }) => assert_eq!(null_dim, 1),
            other => panic!("expected singular, got {other:?}"),
        }
    }

    #[test]
    fn lstsq_recovers_exact_solution_of_tall_system() {
        let mut a = DenseMatrix::zeros(4, 2);
        let entries = [
            [c(1.0, 0.2), c(0.0, 1.0)],
            [c(2.0, -1.0), c(1.0, 0.0)],
            [c(0.5, 0.5), c(3.0, 1.0)],
            [c(-1.0, 0.0), c(0.0, -2.0)],
        ];
        for (i, row) in entries.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                a.set(i, j, *v);
            }
        }
        let x_true = [c(0.3, -0.7), c(1.5, 0.25)];
        let b = a.matvec(&x_true);
        let x = lstsq_qr(&a, &b).unwrap();
        for (got, want) in x.iter().zip(x_true.iter()) {
            assert!((got - want).norm() < 1e-12);
        }
    }
}
