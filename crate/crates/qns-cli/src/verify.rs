//! Scenario-scoped property suite behind `qns verify`: closed forms against
//! oracles, algebraic identities, and comb self-consistency.

use num_complex::Complex64;
use qns_core::filters::{
    filter_conjugate_check, filter_repeated, filter_single, FilterRequest,
};
use qns_core::forward::ScenarioModel;
use qns_core::inversion::{assemble, error_report, solve};
use qns_core::pulses::{
    build_switching_table, conjugate_weyl_oracle, switching_qutrit, switching_reduced, BasisKind,
    SwitchIndex, SwitchingTable,
};
use qns_core::spectra::{assemble_polyspectra, Parity, ScenarioKind};
use qns_core::weyl::{weyl_decompose, WeylIndex};

use crate::config::Prepared;

pub struct PropertyResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn pass(name: &'static str, detail: impl Into<String>) -> PropertyResult {
    PropertyResult { name, passed: true, detail: detail.into() }
}

fn fail(name: &'static str, detail: impl Into<String>) -> PropertyResult {
    PropertyResult { name, passed: false, detail: detail.into() }
}

/// Runs every property that applies to the prepared scenario. `tamper` is a
/// test hook that corrupts the freshly built oracle-check table before the
/// comparison; production callers pass `None`.
pub fn run_suite(
    prep: &Prepared,
    tamper: Option<&dyn Fn(&mut SwitchingTable)>,
) -> Vec<PropertyResult> {
    let mut out = Vec::new();
    out.push(check_switching_oracle(prep, tamper));
    if prep.scenario == ScenarioKind::QutritRw {
        out.push(check_qutrit_special_values());
    }
    out.push(check_table_hermiticity(prep));
    out.push(check_filter_repetition(prep));
    out.push(check_filter_quadrature(prep));
    out.push(check_filter_conjugation(prep));
    match prep.scenario {
        ScenarioKind::QuditRw => out.push(check_odd_coefficient_cancellation(prep)),
        ScenarioKind::AntimonyW => {
            out.push(check_beta_reconstruction(prep));
            out.push(check_xi_parity(prep));
        }
        ScenarioKind::QutritRw => {}
    }
    if prep.truth.is_some() {
        out.push(check_spectra_symmetry(prep));
        out.push(check_comb_self_consistency(prep));
    }
    out
}

fn model_table(model: &ScenarioModel) -> &SwitchingTable {
    match model {
        ScenarioModel::Qutrit(m) => m.table(),
        ScenarioModel::QuditRw(m) => m.table(),
        ScenarioModel::Antimony(m) => m.table(),
    }
}

fn sample_indices(table: &SwitchingTable, count: usize) -> Vec<SwitchIndex> {
    let d = table.dim().d();
    let mut state = 0x9e3779b97f4a7c15u64;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 33) as usize
    };
    (0..count)
        .map(|_| match table.kind() {
            BasisKind::QutritSpecial => SwitchIndex::Qutrit { a: next() % d },
            BasisKind::ReducedWeyl => SwitchIndex::Reduced { a: next() % d, b: next() % d },
            BasisKind::Weyl => SwitchIndex::Weyl {
                a: next() % d,
                b: next() % d,
                ap: next() % d,
                bp: next() % d,
            },
        })
        .collect()
}

fn check_switching_oracle(
    prep: &Prepared,
    tamper: Option<&dyn Fn(&mut SwitchingTable)>,
) -> PropertyResult {
    const NAME: &str = "switching-oracle";
    let dim = prep.sequence.dim();
    let d = dim.d();
    // Build fresh tables in both closed-form flavors and compare every
    // interval entry with the brute-force conjugation of its pulse.
    let mut reduced = match build_switching_table(dim, &prep.sequence, BasisKind::ReducedWeyl) {
        Ok(t) => t,
        Err(e) => return fail(NAME, e.to_string()),
    };
    let mut full = match build_switching_table(dim, &prep.sequence, BasisKind::Weyl) {
        Ok(t) => t,
        Err(e) => return fail(NAME, e.to_string()),
    };
    if let Some(t) = tamper {
        t(&mut reduced);
        t(&mut full);
    }
    let mut worst = 0.0f64;
    for (h, p) in prep.sequence.pulses().iter().enumerate() {
        for a in 0..d {
            for b in 0..d {
                let oracle = conjugate_weyl_oracle(dim, *p, WeylIndex { a, b });
                for (tgt, want) in oracle.iter() {
                    let got =
                        full.value(h, SwitchIndex::Weyl { a, b, ap: tgt.a, bp: tgt.b });
                    worst = worst.max((got - want).norm());
                    if b == 0 {
                        let got_r = reduced.value(h, SwitchIndex::Reduced { a, b: tgt.a });
                        if tgt.b == 0 {
                            worst = worst.max((got_r - want).norm());
                        }
                    }
                }
            }
        }
    }
    if worst < 1e-12 {
        pass(NAME, format!("max deviation {worst:.2e}"))
    } else {
        fail(NAME, format!("max deviation {worst:.2e} exceeds 1e-12"))
    }
}

fn check_qutrit_special_values() -> PropertyResult {
    const NAME: &str = "qutrit-special-table";
    // The special interval values 1, xi^-a, xi^a arise as conjugation by the
    // pulses (1,2), (2,0), (0,1), mapping source a onto target -a.
    let dim = qns_core::weyl::Dim::new(3).expect("d=3");
    let assignment = [(1usize, 2usize), (2, 0), (0, 1)];
    let mut worst = 0.0f64;
    for (h, &(i, j)) in assignment.iter().enumerate() {
        let p = qns_core::pulses::ResonantPulse { i, j };
        for a in 0..3usize {
            let special = switching_qutrit(h + 1, a).expect("interval in range");
            let ys = switching_reduced(dim, p, a);
            for (m, y) in ys.iter().enumerate() {
                let want = if m == (3 - a) % 3 { special } else { Complex64::new(0.0, 0.0) };
                worst = worst.max((y - want).norm());
            }
        }
    }
    if worst < 1e-12 {
        pass(NAME, format!("max deviation {worst:.2e}"))
    } else {
        fail(NAME, format!("max deviation {worst:.2e} exceeds 1e-12"))
    }
}

fn check_table_hermiticity(prep: &Prepared) -> PropertyResult {
    const NAME: &str = "switching-hermiticity";
    let r = model_table(&prep.model).hermiticity_residual();
    if r < 1e-12 {
        pass(NAME, format!("residual {r:.2e}"))
    } else {
        fail(NAME, format!("residual {r:.2e} exceeds 1e-12"))
    }
}

fn check_filter_repetition(prep: &Prepared) -> PropertyResult {
    const NAME: &str = "filter-repetition";
    let table = model_table(&prep.model);
    let t = prep.comb.t_base;
    let m = prep.comb.reps.min(64);
    let mut worst = 0.0f64;
    for index in sample_indices(table, 12) {
        for k in 1..=20 {
            let w = 0.37 * k as f64 * prep.comb.omega0() / 2.0;
            let single =
                filter_single(&FilterRequest { table, index, omega: w, period: t, reps: 1 });
            let mut brute = Complex64::new(0.0, 0.0);
            for rep in 0..m {
                brute += Complex64::new(0.0, w * rep as f64 * t).exp() * single;
            }
            let fast =
                filter_repeated(&FilterRequest { table, index, omega: w, period: t, reps: m });
            worst = worst.max((fast - brute).norm() / brute.norm().max(1.0));
        }
    }
    if worst < 1e-12 {
        pass(NAME, format!("max relative deviation {worst:.2e}"))
    } else {
        fail(NAME, format!("max relative deviation {worst:.2e} exceeds 1e-12"))
    }
}

fn check_filter_quadrature(prep: &Prepared) -> PropertyResult {
    const NAME: &str = "filter-quadrature";
    let table = model_table(&prep.model);
    let t = prep.comb.t_base;
    let pts = table.breakpoints(t);
    let mut worst = 0.0f64;
    for index in sample_indices(table, 8) {
        for k in 0..12 {
            let w = 1.3 + 4.11 * k as f64;
            let closed =
                filter_single(&FilterRequest { table, index, omega: w, period: t, reps: 1 });
            // Independent path: adaptive quadrature of the defining integral.
            let integrand = |tt: f64| -> Complex64 {
                let mut interval = 0;
                for (hh, win) in pts.windows(2).enumerate() {
                    if tt >= win[0] && tt <= win[1] {
                        interval = hh;
                        break;
                    }
                }
                table.value(interval, index) * Complex64::new(0.0, w * tt).exp()
            };
            match qns_core::quad::integrate(integrand, &pts, 1e-10) {
                Ok(q) => {
                    worst = worst.max((closed - q.value).norm() / q.value.norm().max(1e-3));
                }
                Err(e) => return fail(NAME, e.to_string()),
            }
        }
    }
    if worst < 1e-8 {
        pass(NAME, format!("max relative deviation {worst:.2e}"))
    } else {
        fail(NAME, format!("max relative deviation {worst:.2e} exceeds 1e-8"))
    }
}

fn check_filter_conjugation(prep: &Prepared) -> PropertyResult {
    const NAME: &str = "filter-conjugation";
    let table = model_table(&prep.model);
    let mut worst = 0.0f64;
    for index in sample_indices(table, 14) {
        for k in 0..10 {
            let w = -21.0 + 4.7 * k as f64;
            let req = FilterRequest {
                table,
                index,
                omega: w,
                period: prep.comb.t_base,
                reps: 3,
            };
            worst = worst.max(filter_conjugate_check(&req));
        }
    }
    if worst < 1e-12 {
        pass(NAME, format!("max residual {worst:.2e}"))
    } else {
        fail(NAME, format!("max residual {worst:.2e} exceeds 1e-12"))
    }
}

fn check_odd_coefficient_cancellation(prep: &Prepared) -> PropertyResult {
    const NAME: &str = "odd-coefficient-cancellation";
    let ScenarioModel::QuditRw(model) = &prep.model else {
        return fail(NAME, "scenario mismatch".to_string());
    };
    let mut worst = 0.0f64;
    for set in 0..model.n_sets() {
        for k in 1..=25 {
            let w = 0.41 * k as f64 * prep.comb.omega0();
            worst = worst.max(model.odd_coefficient_residual(
                set,
                w,
                prep.comb.t_base,
                1,
            ));
        }
    }
    if worst < 1e-12 {
        pass(NAME, format!("max residual {worst:.2e}"))
    } else {
        fail(NAME, format!("max residual {worst:.2e} exceeds 1e-12"))
    }
}

fn check_beta_reconstruction(prep: &Prepared) -> PropertyResult {
    const NAME: &str = "beta-reconstruction";
    let ScenarioModel::Antimony(model) = &prep.model else {
        return fail(NAME, "scenario mismatch".to_string());
    };
    let dim = model.dim();
    let d = dim.d();
    // Freeze both noise amplitudes to 1 and rebuild the Hamiltonian matrix.
    let mut rebuilt = qns_core::matrix::ComplexMatrix::zeros(d);
    for a in 0..d {
        for b in 0..d {
            let w = model.beta_tilde_sum(0)[a * d + b]
                + model.beta_tilde_sum(1)[a * d + b]
                + model.beta_tilde_sum(2)[a * d + b];
            rebuilt.add_scaled(
                &qns_core::weyl::weyl_operator(dim, WeylIndex { a, b }),
                w,
            );
        }
    }
    let ops = qns_core::weyl::spin_operators(dim);
    let p = model.params();
    let mut want = ops.ix.mul(&ops.ix);
    want.add_scaled(
        &ops.iz,
        Complex64::new(p.gamma_n * p.b0 + 0.5 * p.hyperfine_sign, 0.0),
    );
    let diff = rebuilt.max_abs_diff(&want);
    // And the summed tensors obey the Hermitian-coefficient constraint.
    let herm = weyl_decompose(&want).map(|c| c.hermiticity_residual()).unwrap_or(f64::NAN);
    if diff < 1e-10 && herm < 1e-12 {
        pass(NAME, format!("matrix deviation {diff:.2e}"))
    } else {
        fail(NAME, format!("matrix deviation {diff:.2e} exceeds 1e-10"))
    }
}

fn check_xi_parity(prep: &Prepared) -> PropertyResult {
    const NAME: &str = "xi-parity";
    let ScenarioModel::Antimony(model) = &prep.model else {
        return fail(NAME, "scenario mismatch".to_string());
    };
    let mut state = 0xfeedbeefu64;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state
    };
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let set = (next() % model.n_sets() as u64) as usize;
        let i = (next() % 2) as usize;
        let it = (next() % 2) as usize;
        let w = (next() % 5000) as f64 / 97.0 + 0.03;
        let xp = model.xi_coefficient(set, i, it, w, prep.comb.t_base, 2);
        let xm = model.xi_coefficient(set, i, it, -w, prep.comb.t_base, 2);
        worst = worst.max((xp - xm).norm() / xp.norm().max(xm.norm()).max(1e-2));
    }
    if worst < 1e-10 {
        pass(NAME, format!("max relative deviation {worst:.2e}"))
    } else {
        fail(NAME, format!("max relative deviation {worst:.2e} exceeds 1e-10"))
    }
}

fn check_spectra_symmetry(prep: &Prepared) -> PropertyResult {
    const NAME: &str = "spectra-symmetry";
    let truth = prep.truth.as_ref().expect("caller gated");
    let dim = prep.sequence.dim();
    let mut worst = 0.0f64;
    for k in 0..100 {
        let w = -33.0 + 0.671 * k as f64;
        let sp = assemble_polyspectra(truth, w);
        let sm = assemble_polyspectra(truth, -w);
        match prep.scenario {
            ScenarioKind::QutritRw => {
                for a in [1usize, 2] {
                    for b in [1usize, 2] {
                        let s = sp[&(a, b)];
                        worst = worst.max((s - sm[&(b, a)]).norm());
                        worst =
                            worst.max((s - sm[&(dim.neg(a), dim.neg(b))].conj()).norm());
                    }
                }
            }
            ScenarioKind::QuditRw => {
                worst = worst.max((sp[&(0, 0)] - sm[&(0, 0)].conj()).norm());
            }
            ScenarioKind::AntimonyW => {
                for i in 0..2usize {
                    for it in 0..2usize {
                        worst = worst.max((sm[&(i, it)] - sp[&(it, i)]).norm());
                        worst = worst.max((sp[&(i, it)].conj() - sm[&(i, it)]).norm());
                    }
                }
                for j in 0..3usize {
                    worst = worst.max(sp[&(2, j)].norm()).max(sp[&(j, 2)].norm());
                }
            }
        }
        // Parity assignments of the real components.
        for (i, parity) in prep.scenario.parities().iter().enumerate() {
            let (pv, mv) = (truth.x(i, w), truth.x(i, -w));
            let dev = match parity {
                Parity::Even => (pv - mv).abs(),
                Parity::Odd => (pv + mv).abs(),
            };
            worst = worst.max(dev);
        }
    }
    if worst < 1e-12 {
        pass(NAME, format!("max deviation {worst:.2e}"))
    } else {
        fail(NAME, format!("max deviation {worst:.2e} exceeds 1e-12"))
    }
}

fn check_comb_self_consistency(prep: &Prepared) -> PropertyResult {
    const NAME: &str = "comb-self-consistency";
    let truth = prep.truth.as_ref().expect("caller gated");
    let model = &prep.model;
    let cfg = &prep.comb;
    let records: Vec<Vec<Complex64>> = (0..model.n_sets())
        .map(|s| (1..=cfg.n_grid()).map(|r| model.comb(truth, cfg, s, r)).collect())
        .collect();
    let problem = match assemble(model, cfg, &records) {
        Ok(p) => p,
        Err(e) => return fail(NAME, e.to_string()),
    };
    let result = match solve(&problem) {
        Ok(r) => r,
        Err(e) => return fail(NAME, e.to_string()),
    };
    let mut worst = 0.0f64;
    for e in error_report(&result, truth, &problem.grid, 1e-6) {
        if e.rel_rmse.is_finite() {
            worst = worst.max(e.rel_rmse);
        }
    }
    if worst < 1e-8 {
        pass(NAME, format!("max relative rmse {worst:.2e}"))
    } else {
        fail(NAME, format!("max relative rmse {worst:.2e} exceeds 1e-8"))
    }
}
