//! Generalized Pauli (Weyl) operators on Z_d and decompositions into them.
//!
//! The Weyl basis is the set of d^2 operators `Z^a X^b` built from the clock
//! operator `Z|i> = xi^i |i>` and the shift operator `X|i> = |i+1 mod d>`,
//! with `xi = exp(2 pi I / d)`. It is orthogonal under the trace inner
//! product, so any d x d matrix decomposes uniquely as
//! `m = sum_ab c_ab Z^a X^b` with `c_ab = tr(X^-b Z^-a m) / d`.
//!
//! Everything is stored with canonical indices in `{0, .., d-1}`; negation is
//! the map `a -> (d - a) mod d`, and signed qutrit-style indices (+-1) are
//! converted on entry.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::TAU;
use num_complex::Complex64;
use num_traits::Zero;

use crate::error::argument;
use crate::matrix::ComplexMatrix;
use crate::Result;

/// Number of levels of the qudit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dim(usize);

impl Dim {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(argument(format!("qudit dimension must be >= 2, got {d}")));
        }
        Ok(Dim(d))
    }

    pub fn d(self) -> usize {
        self.0
    }

    /// The primitive d-th root of unity `xi = exp(2 pi I / d)`.
    pub fn root(self) -> Complex64 {
        Complex64::new(0.0, TAU / self.0 as f64).exp()
    }

    /// Precomputed powers of `xi` for exact-modular phase arithmetic.
    pub fn roots(self) -> Roots {
        Roots::new(self.0)
    }

    /// Canonicalize an arbitrary signed index into `{0, .., d-1}`.
    pub fn canon(self, idx: i64) -> usize {
        idx.rem_euclid(self.0 as i64) as usize
    }

    /// Negation map `a -> (d - a) mod d`.
    pub fn neg(self, a: usize) -> usize {
        (self.0 - a % self.0) % self.0
    }
}

/// Table of the d-th roots of unity; `xi(e)` is `xi^e` for any signed
/// exponent, evaluated through `e mod d` so repeated phases are bit-identical.
#[derive(Debug, Clone)]
pub struct Roots {
    d: usize,
    tab: Vec<Complex64>,
}

impl Roots {
    pub fn new(d: usize) -> Self {
        let tab = (0..d)
            .map(|k| {
                let th = TAU * k as f64 / d as f64;
                Complex64::new(libm::cos(th), libm::sin(th))
            })
            .collect();
        Roots { d, tab }
    }

    #[inline]
    pub fn xi(&self, e: i64) -> Complex64 {
        self.tab[e.rem_euclid(self.d as i64) as usize]
    }
}

/// Index pair (a, b) of a Weyl operator `Z^a X^b`, canonical in Z_d.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WeylIndex {
    pub a: usize,
    pub b: usize,
}

impl WeylIndex {
    pub fn new(dim: Dim, a: usize, b: usize) -> Result<Self> {
        let d = dim.d();
        if a >= d || b >= d {
            return Err(argument(format!("Weyl index ({a},{b}) out of range for d={d}")));
        }
        Ok(WeylIndex { a, b })
    }

    /// Builds from signed indices, e.g. the qutrit-style `-1` for `d - 1`.
    pub fn from_signed(dim: Dim, a: i64, b: i64) -> Self {
        WeylIndex { a: dim.canon(a), b: dim.canon(b) }
    }

    /// Index-wise negation mod d.
    pub fn neg(self, dim: Dim) -> Self {
        WeylIndex { a: dim.neg(self.a), b: dim.neg(self.b) }
    }
}

/// Dense map from `WeylIndex` to a complex coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct WeylCoefficients {
    d: usize,
    c: Vec<Complex64>,
}

impl WeylCoefficients {
    pub fn zeros(dim: Dim) -> Self {
        let d = dim.d();
        WeylCoefficients { d, c: alloc::vec![Complex64::zero(); d * d] }
    }

    pub fn dim(&self) -> Dim {
        Dim(self.d)
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> Complex64 {
        self.c[a * self.d + b]
    }

    #[inline]
    pub fn set(&mut self, a: usize, b: usize, v: Complex64) {
        self.c[a * self.d + b] = v;
    }

    #[inline]
    pub fn add(&mut self, a: usize, b: usize, v: Complex64) {
        self.c[a * self.d + b] += v;
    }

    pub fn iter(&self) -> impl Iterator<Item = (WeylIndex, Complex64)> + '_ {
        let d = self.d;
        self.c
            .iter()
            .enumerate()
            .map(move |(k, &v)| (WeylIndex { a: k / d, b: k % d }, v))
    }

    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        self.c
            .iter()
            .zip(rhs.c.iter())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    /// Residual of the Hermitian-source constraint
    /// `c_ab = xi^{-ab} conj(c_{-a,-b})`; zero (to roundoff) whenever the
    /// coefficients come from a Hermitian matrix.
    pub fn hermiticity_residual(&self) -> f64 {
        let dim = self.dim();
        let roots = dim.roots();
        let mut r: f64 = 0.0;
        for (idx, v) in self.iter() {
            let n = idx.neg(dim);
            let expect = roots.xi(-((idx.a * idx.b) as i64)) * self.get(n.a, n.b).conj();
            r = r.max((v - expect).norm());
        }
        r
    }
}

/// The Weyl operator `Z^a X^b` as a dense matrix.
///
/// Entry (i, j): nonzero iff `i = j + b mod d`, with value `xi^{a i}`.
pub fn weyl_operator(dim: Dim, idx: WeylIndex) -> ComplexMatrix {
    let d = dim.d();
    let roots = dim.roots();
    let mut m = ComplexMatrix::zeros(d);
    for j in 0..d {
        let i = (j + idx.b) % d;
        m[(i, j)] = roots.xi((idx.a * i) as i64);
    }
    m
}

/// Weyl coefficients of an arbitrary square matrix:
/// `c_ab = tr(X^{-b} Z^{-a} m) / d`.
pub fn weyl_decompose(m: &ComplexMatrix) -> Result<WeylCoefficients> {
    let d = m.dim();
    let dim = Dim::new(d)?;
    let roots = dim.roots();
    let mut out = WeylCoefficients::zeros(dim);
    // tr(X^-b Z^-a m) = sum_i xi^{-a i} m[i][(i + b) mod d] ... wait, check:
    // (X^-b Z^-a m)[j][j] = sum_i (X^-b)[j][i'] (Z^-a)[i'][i] m[i][j]
    // X^-b |i> = |i-b>  =>  (X^-b)[j][i'] = delta_{j, i'-b}  =>  i' = j+b
    // (Z^-a)[i'][i] = xi^{-a i'} delta_{i', i}
    // so the trace is sum_j xi^{-a (j+b)} m[(j+b) mod d][j].
    for a in 0..d {
        for b in 0..d {
            let mut s = Complex64::zero();
            for j in 0..d {
                let i = (j + b) % d;
                s += roots.xi(-((a * i) as i64)) * m[(i, j)];
            }
            out.set(a, b, s / d as f64);
        }
    }
    Ok(out)
}

/// `sum_ab c_ab Z^a X^b` as a dense matrix.
pub fn weyl_reconstruct(dim: Dim, c: &WeylCoefficients) -> ComplexMatrix {
    let d = dim.d();
    let roots = dim.roots();
    let mut m = ComplexMatrix::zeros(d);
    for (idx, v) in c.iter() {
        if v.is_zero() {
            continue;
        }
        for j in 0..d {
            let i = (j + idx.b) % d;
            m[(i, j)] += v * roots.xi((idx.a * i) as i64);
        }
    }
    m
}

/// Spin magnetic moment matrices of a d-level system, hbar = 1.
#[derive(Debug, Clone)]
pub struct SpinOperators {
    pub ix: ComplexMatrix,
    pub iy: ComplexMatrix,
    pub iz: ComplexMatrix,
}

/// Spin-I operators in the computational basis with `I = (d-1)/2`:
/// `Iz` diagonal with entries `I - p`, and `Ix`, `Iy` tridiagonal with
/// `(1/2)(delta_{p,q+1} +- delta_{p+1,q}) sqrt((I+1)(p+q+1) - (p+1)(q+1))`.
pub fn spin_operators(dim: Dim) -> SpinOperators {
    let d = dim.d();
    let spin = (d as f64 - 1.0) / 2.0;
    let iz = ComplexMatrix::from_fn(d, |p, q| {
        if p == q {
            Complex64::new(spin - p as f64, 0.0)
        } else {
            Complex64::zero()
        }
    });
    let ladder = |p: usize, q: usize| -> f64 {
        libm::sqrt((spin + 1.0) * (p + q + 1) as f64 - ((p + 1) * (q + 1)) as f64)
    };
    let ix = ComplexMatrix::from_fn(d, |p, q| {
        if p == q + 1 || p + 1 == q {
            Complex64::new(0.5 * ladder(p, q), 0.0)
        } else {
            Complex64::zero()
        }
    });
    let iy = ComplexMatrix::from_fn(d, |p, q| {
        if p == q + 1 {
            Complex64::new(0.0, 0.5 * ladder(p, q))
        } else if p + 1 == q {
            Complex64::new(0.0, -0.5 * ladder(p, q))
        } else {
            Complex64::zero()
        }
    });
    SpinOperators { ix, iy, iz }
}

/// Weyl noise coefficients from a snapshot of the energy/coherence matrix:
/// `beta_ab = (1/d) sum_ij xi^{-a i} delta_{b, i-j} eps_ij`.
///
/// Agrees with [`weyl_decompose`]; kept as the named map because the energy
/// picture is the natural input for dephasing models.
pub fn beta_from_energies(dim: Dim, eps: &ComplexMatrix) -> Result<WeylCoefficients> {
    let d = dim.d();
    if eps.dim() != d {
        return Err(argument(format!("energy matrix is {}x{0}, expected {d}x{d}", eps.dim())));
    }
    let roots = dim.roots();
    let mut out = WeylCoefficients::zeros(dim);
    for a in 0..d {
        for b in 0..d {
            let mut s = Complex64::zero();
            for i in 0..d {
                let j = (i + d - b) % d; // delta_{b, i-j mod d}
                s += roots.xi(-((a * i) as i64)) * eps[(i, j)];
            }
            out.set(a, b, s / d as f64);
        }
    }
    Ok(out)
}

/// Inverse of [`beta_from_energies`]:
/// `eps_nm = sum_ab xi^{a n} delta_{n, m+b} beta_ab`.
pub fn energies_from_beta(dim: Dim, c: &WeylCoefficients) -> ComplexMatrix {
    let d = dim.d();
    let roots = dim.roots();
    ComplexMatrix::from_fn(d, |n, m| {
        let b = (n + d - m) % d;
        let mut s = Complex64::zero();
        for a in 0..d {
            s += roots.xi((a * n) as i64) * c.get(a, b);
        }
        s
    })
}

/// Which operator family indexes a set of polyspectra.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumBasis {
    /// Full Weyl basis: spectra indexed by ((a, b), (a', b')).
    Weyl,
    /// Z-only (reduced) basis: spectra indexed by (a, a').
    ReducedWeyl,
}

/// Key of one polyspectrum entry for [`total_spectrum`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SpectrumKey {
    Rw { a: usize, a2: usize },
    Weyl { a: usize, b: usize, a2: usize, b2: usize },
}

/// Total detected noise power at one frequency, aggregated from the Weyl-basis
/// polyspectra values `s` (already evaluated at that frequency):
///
/// * reduced: `S'(w) = sum_{m m' a a'} xi^{a m + a' m'} S_{a,a'}(w)`
/// * full:    `S'(w) = sum_{m n m' n' a a'} xi^{a m + a' m'} S_{(a, n-m),(a', n'-m')}(w)`
///
/// Every required index entry must be present in `s`.
pub fn total_spectrum(
    dim: Dim,
    basis: SpectrumBasis,
    s: &BTreeMap<SpectrumKey, Complex64>,
) -> Result<Complex64> {
    let d = dim.d();
    let roots = dim.roots();
    let lookup = |key: SpectrumKey| -> Result<Complex64> {
        s.get(&key)
            .copied()
            .ok_or_else(|| argument(format!("missing polyspectrum entry {key:?}")))
    };
    let mut total = Complex64::zero();
    match basis {
        SpectrumBasis::ReducedWeyl => {
            for a in 0..d {
                for m in 0..d {
                    for a2 in 0..d {
                        for m2 in 0..d {
                            let v = lookup(SpectrumKey::Rw { a, a2 })?;
                            total += roots.xi((a * m + a2 * m2) as i64) * v;
                        }
                    }
                }
            }
        }
        SpectrumBasis::Weyl => {
            for a in 0..d {
                for m in 0..d {
                    for n in 0..d {
                        for a2 in 0..d {
                            for m2 in 0..d {
                                for n2 in 0..d {
                                    let key = SpectrumKey::Weyl {
                                        a,
                                        b: (n + d - m) % d,
                                        a2,
                                        b2: (n2 + d - m2) % d,
                                    };
                                    let v = lookup(key)?;
                                    total += roots.xi((a * m + a2 * m2) as i64) * v;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(total)
}
