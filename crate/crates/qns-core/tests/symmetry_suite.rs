//! Stationarity and conjugation identities of the assembled polyspectra on a
//! dense frequency grid, plus the reduced-scenario odd-coefficient
//! cancellation.

use num_complex::Complex64;
use qns_core::forward::{
    beta_tilde_sums, AntimonyParams, InitialStateSpec, MeasurementSet, ObservableSpec,
    QuditRwModel,
};
use qns_core::pulses::{build_switching_table, BasisKind, ReferencePulseSequence};
use qns_core::spectra::{
    assemble_polyspectra, eval_spectrum, GaussBump, Parity, RealSpectrum, ScenarioKind,
    ScenarioSpectra, SpectrumShape,
};
use qns_core::weyl::Dim;

fn grid() -> Vec<f64> {
    // 100 points straddling zero, incommensurate with any comb.
    (0..100).map(|k| -37.0 + 0.747 * k as f64).collect()
}

fn qutrit_truth() -> ScenarioSpectra {
    ScenarioSpectra::new(
        ScenarioKind::QutritRw,
        vec![
            RealSpectrum::even(SpectrumShape::Poissonian { decay: 0.18 }),
            RealSpectrum::even(SpectrumShape::GaussianBumps {
                bumps: vec![GaussBump { amplitude: 1.0, center: 9.0, width: 0.286 }],
            }),
            RealSpectrum::even(SpectrumShape::Rational { amplitude: 1.5, center: 6.5 }),
            RealSpectrum::odd(SpectrumShape::Poissonian { decay: 0.4 }),
        ],
    )
    .unwrap()
}

#[test]
fn qutrit_polyspectra_identities() {
    let truth = qutrit_truth();
    let dim = Dim::new(3).unwrap();
    for &w in &grid() {
        let sp = assemble_polyspectra(&truth, w);
        let sm = assemble_polyspectra(&truth, -w);
        for a in [1usize, 2] {
            for b in [1usize, 2] {
                let s = sp[&(a, b)];
                // S_{a,b}(w) = S_{b,a}(-w)
                assert!((s - sm[&(b, a)]).norm() < 1e-12, "swap a={a} b={b} w={w}");
                // S_{a,b}(w) = conj S_{-a,-b}(-w)
                let (na, nb) = (dim.neg(a), dim.neg(b));
                assert!((s - sm[&(na, nb)].conj()).norm() < 1e-12, "conj a={a} b={b} w={w}");
            }
        }
    }
}

#[test]
fn parity_assignments_hold() {
    let truth = qutrit_truth();
    for (i, parity) in ScenarioKind::QutritRw.parities().iter().enumerate() {
        for &w in &grid() {
            let (p, m) = (truth.x(i, w), truth.x(i, -w));
            match parity {
                Parity::Even => assert_eq!(p, m),
                Parity::Odd => assert_eq!(p, -m),
            }
        }
    }
    // Grid convention: nothing lives at exactly zero frequency.
    for i in 0..4 {
        assert_eq!(truth.x(i, 0.0), 0.0);
    }
}

#[test]
fn qudit_rw_spectrum_is_conjugate_mirrored() {
    let truth = ScenarioSpectra::new(
        ScenarioKind::QuditRw,
        vec![
            RealSpectrum::even(SpectrumShape::Poissonian { decay: 0.3 }),
            RealSpectrum::odd(SpectrumShape::Poissonian { decay: 0.5 }),
        ],
    )
    .unwrap();
    for &w in &grid() {
        let s = assemble_polyspectra(&truth, w)[&(0, 0)];
        let m = assemble_polyspectra(&truth, -w)[&(0, 0)];
        assert!((s - m.conj()).norm() < 1e-12);
    }
}

fn antimony_truth() -> ScenarioSpectra {
    ScenarioSpectra::new(
        ScenarioKind::AntimonyW,
        vec![
            RealSpectrum::even(SpectrumShape::Poissonian { decay: 0.20 }),
            RealSpectrum::even(SpectrumShape::Poissonian { decay: 0.22 }),
            RealSpectrum::even(SpectrumShape::Poissonian { decay: 0.25 }),
            RealSpectrum::odd(SpectrumShape::GaussianBumps {
                bumps: vec![GaussBump { amplitude: 0.4, center: 5.0, width: 0.1 }],
            }),
        ],
    )
    .unwrap()
}

#[test]
fn antimony_process_spectra_identities() {
    let truth = antimony_truth();
    for &w in &grid() {
        let sp = assemble_polyspectra(&truth, w);
        let sm = assemble_polyspectra(&truth, -w);
        for i in 0..2usize {
            for it in 0..2usize {
                // Stationarity: S~_{i i~}(-w) = S~_{i~ i}(w).
                assert!((sm[&(i, it)] - sp[&(it, i)]).norm() < 1e-12);
                // Real processes: conj S~(w) = S~(-w).
                assert!((sp[&(i, it)].conj() - sm[&(i, it)]).norm() < 1e-12);
            }
        }
        // Entries touching the static component vanish identically.
        for j in 0..3usize {
            assert_eq!(sp[&(2, j)], Complex64::new(0.0, 0.0));
            assert_eq!(sp[&(j, 2)], Complex64::new(0.0, 0.0));
        }
    }
}

#[test]
fn antimony_weyl_basis_polyspectra_conjugation() {
    // The Weyl-basis polyspectra S^{a~ b~}_{a b}(w) built from the
    // decomposition tensors inherit the Hermitian-coefficient constraint:
    // S(w) = conj(S at negated indices)(-w) * xi^{-(ab + a~ b~)}.
    let dim = Dim::new(8).unwrap();
    let d = 8usize;
    let roots = dim.roots();
    let beta1 = beta_tilde_sums(dim, &AntimonyParams::default());
    let truth = antimony_truth();
    let weyl_s = |a: usize, b: usize, at: usize, bt: usize, w: f64| -> Complex64 {
        let sp = assemble_polyspectra(&truth, w);
        let mut total = Complex64::new(0.0, 0.0);
        for i in 0..2usize {
            for it in 0..2usize {
                total += beta1[i][a * d + b] * beta1[it][at * d + bt] * sp[&(i, it)];
            }
        }
        total
    };
    let picks = [(1usize, 0usize, 3usize, 2usize), (2, 2, 5, 6), (7, 0, 0, 6), (4, 2, 4, 0)];
    for &(a, b, at, bt) in &picks {
        for &w in &[0.9, 4.4, -11.3] {
            let lhs = weyl_s(a, b, at, bt, w);
            let rhs = weyl_s(dim.neg(a), dim.neg(b), dim.neg(at), dim.neg(bt), -w).conj()
                * roots.xi(-((a * b + at * bt) as i64));
            assert!(
                (lhs - rhs).norm() < 1e-12,
                "idx=({a},{b},{at},{bt}) w={w}: {lhs} vs {rhs}"
            );
        }
    }
}

#[test]
fn rw_odd_coefficient_cancellation_on_grid() {
    let dim = Dim::new(4).unwrap();
    let table =
        build_switching_table(dim, &ReferencePulseSequence::cycle(dim), BasisKind::ReducedWeyl)
            .unwrap();
    let set = MeasurementSet {
        observable: ObservableSpec { coeff: Complex64::new(1.0, 0.0), m: 3, n: 3 },
        rho: InitialStateSpec {
            trace_term_included: false,
            coeff: Complex64::new(1.0, 0.0),
            p0: 1,
            q0: 1,
        },
    };
    let model = QuditRwModel::new(dim, table, &[set]).unwrap();
    for k in 1..=100 {
        let w = 0.31 * k as f64;
        assert!(model.odd_coefficient_residual(0, w, 2.0, 1) < 1e-12, "w={w}");
    }
}

#[test]
fn tabulated_spectrum_roundtrip_on_grid() {
    // Re-ingesting a reconstructed spectrum as a tabulated component
    // reproduces it at the nodes.
    let src = RealSpectrum::even(SpectrumShape::Poissonian { decay: 0.18 });
    let grid: Vec<(f64, f64)> =
        (1..=30).map(|k| (0.5 * k as f64, eval_spectrum(&src, 0.5 * k as f64))).collect();
    let tab = RealSpectrum::even(SpectrumShape::Tabulated { grid: grid.clone() });
    for (w, v) in &grid {
        assert!((eval_spectrum(&tab, *w) - v).abs() < 1e-14);
        assert!((eval_spectrum(&tab, -*w) - v).abs() < 1e-14);
    }
}
