//! Parameterized real spectral functions and scenario polyspectra.
//!
//! Noise power spectral densities live on the full frequency axis but are
//! built from real functions declared even or odd; evaluation mirrors the
//! positive-range shape by parity. The grid convention pins `S(0) = 0`: zero
//! frequency carries no spectral weight in this protocol.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use num_complex::Complex64;
use crate::error::config;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// One additive Gaussian bump `amplitude * exp(-width (w - center)^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussBump {
    pub amplitude: f64,
    pub center: f64,
    pub width: f64,
}

/// Positive-frequency shape of a real spectral function.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumShape {
    /// `w^2 e^{-g |w|}`.
    Poissonian { decay: f64 },
    /// Sum of Gaussian bumps; an empty list is the zero spectrum.
    GaussianBumps { bumps: Vec<GaussBump> },
    /// `amplitude / (1 + |w - center|)`.
    Rational { amplitude: f64, center: f64 },
    /// Linear interpolation on an ascending grid, zero outside it.
    Tabulated { grid: Vec<(f64, f64)> },
}

impl SpectrumShape {
    fn eval_abs(&self, w: f64) -> f64 {
        match self {
            SpectrumShape::Poissonian { decay } => w * w * libm::exp(-decay * w),
            SpectrumShape::GaussianBumps { bumps } => bumps
                .iter()
                .map(|b| b.amplitude * libm::exp(-b.width * (w - b.center) * (w - b.center)))
                .sum(),
            SpectrumShape::Rational { amplitude, center } => amplitude / (1.0 + (w - center).abs()),
            SpectrumShape::Tabulated { grid } => {
                if grid.is_empty() || w < grid[0].0 || w > grid[grid.len() - 1].0 {
                    return 0.0;
                }
                match grid.binary_search_by(|probe| probe.0.partial_cmp(&w).expect("finite")) {
                    Ok(k) => grid[k].1,
                    Err(k) => {
                        let (x0, y0) = grid[k - 1];
                        let (x1, y1) = grid[k];
                        y0 + (y1 - y0) * (w - x0) / (x1 - x0)
                    }
                }
            }
        }
    }
}

/// A real spectral function with declared parity.
#[derive(Debug, Clone, PartialEq)]
pub struct RealSpectrum {
    pub shape: SpectrumShape,
    pub parity: Parity,
}

impl RealSpectrum {
    pub fn even(shape: SpectrumShape) -> Self {
        RealSpectrum { shape, parity: Parity::Even }
    }

    pub fn odd(shape: SpectrumShape) -> Self {
        RealSpectrum { shape, parity: Parity::Odd }
    }

    pub fn zero() -> Self {
        RealSpectrum::even(SpectrumShape::GaussianBumps { bumps: Vec::new() })
    }

    pub fn zero_odd() -> Self {
        RealSpectrum::odd(SpectrumShape::GaussianBumps { bumps: Vec::new() })
    }
}

/// Evaluates with parity mirroring; exactly zero at `w = 0` (grid convention).
pub fn eval_spectrum(s: &RealSpectrum, omega: f64) -> f64 {
    if omega == 0.0 {
        return 0.0;
    }
    let v = s.shape.eval_abs(omega.abs());
    match s.parity {
        Parity::Even => v,
        Parity::Odd => {
            if omega < 0.0 {
                -v
            } else {
                v
            }
        }
    }
}

/// Which measurement scenario a spectra bundle belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    /// d = 3, reduced Weyl basis: components R1, I1, E (even) and D (odd).
    QutritRw,
    /// General d, reduced Weyl basis: components R (even) and I (odd).
    QuditRw,
    /// d = 8, full Weyl basis: components R0, R0', R1 (even) and I1 (odd).
    AntimonyW,
}

impl ScenarioKind {
    /// Expected component parities, in component order.
    pub fn parities(self) -> &'static [Parity] {
        match self {
            ScenarioKind::QutritRw => &[Parity::Even, Parity::Even, Parity::Even, Parity::Odd],
            ScenarioKind::QuditRw => &[Parity::Even, Parity::Odd],
            ScenarioKind::AntimonyW => &[Parity::Even, Parity::Even, Parity::Even, Parity::Odd],
        }
    }

    /// Number of real spectra the inversion reconstructs (the trailing
    /// components have identically vanishing coefficients).
    pub fn unknown_count(self) -> usize {
        match self {
            ScenarioKind::QutritRw => 3,
            ScenarioKind::QuditRw => 1,
            ScenarioKind::AntimonyW => 3,
        }
    }
}

/// The real components of one scenario's polyspectra.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpectra {
    kind: ScenarioKind,
    components: Vec<RealSpectrum>,
}

impl ScenarioSpectra {
    pub fn new(kind: ScenarioKind, components: Vec<RealSpectrum>) -> Result<Self> {
        let parities = kind.parities();
        if components.len() != parities.len() {
            return Err(config(format!(
                "scenario {kind:?} needs {} components, got {}",
                parities.len(),
                components.len()
            )));
        }
        for (i, (c, want)) in components.iter().zip(parities).enumerate() {
            if c.parity != *want {
                return Err(config(format!(
                    "component {i} of {kind:?} must be {want:?}, got {:?}",
                    c.parity
                )));
            }
        }
        Ok(ScenarioSpectra { kind, components })
    }

    pub fn kind(&self) -> ScenarioKind {
        self.kind
    }

    pub fn components(&self) -> &[RealSpectrum] {
        &self.components
    }

    /// The i-th real component `x_i(w)`.
    pub fn x(&self, i: usize, omega: f64) -> f64 {
        eval_spectrum(&self.components[i], omega)
    }
}

/// Complex polyspectra assembled from the real components at one frequency.
///
/// Keys are scenario-specific index pairs:
/// * `QutritRw`: `(a, b)` with a, b in {1, 2} (canonical +-1),
///   `S_{1,1} = R1 + I*I1`, `S_{-1,-1} = R1 - I*I1`, `S_{1,-1} = E + D`,
///   `S_{-1,1} = E - D`.
/// * `QuditRw`: the single `(0, 0)` entry `R + I*I`.
/// * `AntimonyW`: `(i, i~)` over {0, 1, 2}^2; entries with an index 2 are
///   identically zero (static component, zero-mean noise).
pub fn assemble_polyspectra(
    spec: &ScenarioSpectra,
    omega: f64,
) -> BTreeMap<(usize, usize), Complex64> {
    let mut out = BTreeMap::new();
    match spec.kind {
        ScenarioKind::QutritRw => {
            let r1 = spec.x(0, omega);
            let i1 = spec.x(1, omega);
            let e = spec.x(2, omega);
            let d = spec.x(3, omega);
            out.insert((1, 1), Complex64::new(r1, i1));
            out.insert((2, 2), Complex64::new(r1, -i1));
            out.insert((1, 2), Complex64::new(e + d, 0.0));
            out.insert((2, 1), Complex64::new(e - d, 0.0));
        }
        ScenarioKind::QuditRw => {
            out.insert((0, 0), Complex64::new(spec.x(0, omega), spec.x(1, omega)));
        }
        ScenarioKind::AntimonyW => {
            let r0 = spec.x(0, omega);
            let r0p = spec.x(1, omega);
            let r1 = spec.x(2, omega);
            let i1 = spec.x(3, omega);
            out.insert((0, 0), Complex64::new(r0, 0.0));
            out.insert((1, 1), Complex64::new(r0p, 0.0));
            out.insert((0, 1), Complex64::new(r1, i1));
            out.insert((1, 0), Complex64::new(r1, -i1));
            for j in 0..3 {
                out.insert((2, j), Complex64::new(0.0, 0.0));
                out.insert((j, 2), Complex64::new(0.0, 0.0));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poissonian_value() {
        let s = RealSpectrum::even(SpectrumShape::Poissonian { decay: 0.18 });
        let want = 4.0 * (-0.36f64).exp();
        assert!((eval_spectrum(&s, 2.0) - want).abs() < 1e-14);
        assert!((eval_spectrum(&s, -2.0) - want).abs() < 1e-14);
    }

    #[test]
    fn rational_peak_value() {
        let s = RealSpectrum::even(SpectrumShape::Rational { amplitude: 1.5, center: 6.0 });
        assert!((eval_spectrum(&s, 6.0) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn odd_spectrum_negates() {
        let s = RealSpectrum::odd(SpectrumShape::Poissonian { decay: 0.3 });
        for w in 1..20 {
            let w = w as f64 * 0.7;
            assert_eq!(eval_spectrum(&s, -w), -eval_spectrum(&s, w));
        }
    }

    #[test]
    fn zero_frequency_is_pinned() {
        let s = RealSpectrum::even(SpectrumShape::Rational { amplitude: 2.0, center: 0.0 });
        assert_eq!(eval_spectrum(&s, 0.0), 0.0);
    }

    #[test]
    fn tabulated_interpolates_and_clamps() {
        let s = RealSpectrum::even(SpectrumShape::Tabulated {
            grid: alloc::vec![(1.0, 2.0), (3.0, 6.0)],
        });
        assert!((eval_spectrum(&s, 2.0) - 4.0).abs() < 1e-14);
        assert_eq!(eval_spectrum(&s, 4.0), 0.0);
        assert_eq!(eval_spectrum(&s, 0.5), 0.0);
    }

    #[test]
    fn parity_mismatch_rejected() {
        let bad = ScenarioSpectra::new(
            ScenarioKind::QuditRw,
            alloc::vec![
                RealSpectrum::odd(SpectrumShape::Poissonian { decay: 1.0 }),
                RealSpectrum::odd(SpectrumShape::Poissonian { decay: 1.0 }),
            ],
        );
        assert!(bad.is_err());
    }

    #[test]
    fn antimony_static_entries_vanish() {
        let spec = ScenarioSpectra::new(
            ScenarioKind::AntimonyW,
            alloc::vec![
                RealSpectrum::even(SpectrumShape::Poissonian { decay: 0.2 }),
                RealSpectrum::even(SpectrumShape::Poissonian { decay: 0.22 }),
                RealSpectrum::even(SpectrumShape::Poissonian { decay: 0.25 }),
                RealSpectrum::zero_odd(),
            ],
        )
        .unwrap();
        let m = assemble_polyspectra(&spec, 3.3);
        for j in 0..3 {
            assert_eq!(m[&(2, j)], Complex64::new(0.0, 0.0));
            assert_eq!(m[&(j, 2)], Complex64::new(0.0, 0.0));
        }
    }
}
