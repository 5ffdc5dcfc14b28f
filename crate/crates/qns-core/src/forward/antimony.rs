//! Full-Weyl forward model for a nuclear-spin qudit with two noisy couplings.
//!
//! The Hamiltonian `(gamma B0 +- A(t)/2) Iz + Q(t) Ix^2` decomposes into the
//! Weyl basis through fixed tensors `beta~^{pqq'}_{i a b}` multiplying the
//! static part and the two noise processes. The observable expectation then
//! contracts two switching tables, the lambda constants, and the cross
//! polyspectra of (A, Q) through the coefficient functions
//!
//! `Xi_{i i~}(w, t) = sum beta~_i beta~_i~ lambda F^{ab}_{a'b'} F*^{-a~,-b~}_{-a~',-b~'}`.
//!
//! The raw sum has d^8 terms; the two Kronecker constraints inside lambda fix
//! the second target pair, and the beta~ tensors are supported on shift
//! powers b in {0, +-2} only, so the contraction factorizes into two small
//! source sums `G` and `H` joined over one target pair. The same
//! factorization powers the closed-form path for Poissonian spectra, where
//! the frequency integral collapses into exponential cells and no quadrature
//! is needed.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{argument, config};
use crate::filters::{repetition_factor, segment_factors};
use crate::pulses::{BasisKind, SwitchIndex, SwitchingTable};
use crate::weyl::{spin_operators, Dim};
use crate::Result;

use super::{CombConfig, MeasurementSet};

/// Static parameters of the spin Hamiltonian, natural units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AntimonyParams {
    pub gamma_n: f64,
    pub b0: f64,
    /// Sign of the hyperfine half: +1 or -1.
    pub hyperfine_sign: f64,
}

impl Default for AntimonyParams {
    fn default() -> Self {
        AntimonyParams { gamma_n: 1.0, b0: 1.0, hyperfine_sign: 1.0 }
    }
}

/// One entry of the Hamiltonian decomposition tensors:
///
/// * branch 0 (couples A(t)):  `+- (1/2d^3) xi^{-ap} Iz_p delta_{b,0}`
/// * branch 1 (couples Q(t)):  `(1/d) xi^{-ap} Ix_{pq} Ix_{qq'} delta_{p,q'+b}`
/// * branch 2 (static):        `(gamma B0 / d^3) xi^{-ap} Iz_p delta_{b,0}`
#[allow(clippy::too_many_arguments)]
pub fn antimony_beta_tilde(
    dim: Dim,
    params: &AntimonyParams,
    branch: usize,
    p: usize,
    q: usize,
    qp: usize,
    a: usize,
    b: usize,
) -> Result<Complex64> {
    let d = dim.d();
    if branch > 2 {
        return Err(argument(format!("branch must be 0, 1, or 2, got {branch}")));
    }
    if [p, q, qp, a, b].iter().any(|&k| k >= d) {
        return Err(argument("beta~ index out of range"));
    }
    let roots = dim.roots();
    let spin = spin_operators(dim);
    let phase = roots.xi(-((a * p) as i64));
    let df = d as f64;
    let v = match branch {
        0 => {
            if b != 0 {
                Complex64::zero()
            } else {
                params.hyperfine_sign * 0.5 / (df * df * df) * phase * spin.iz[(p, p)]
            }
        }
        1 => {
            if p != (qp + b) % d {
                Complex64::zero()
            } else {
                phase * spin.ix[(p, q)] * spin.ix[(q, qp)] / df
            }
        }
        _ => {
            if b != 0 {
                Complex64::zero()
            } else {
                params.gamma_n * params.b0 / (df * df * df) * phase * spin.iz[(p, p)]
            }
        }
    };
    Ok(v)
}

/// The (p, q, q')-summed tensors `beta~^1_{i a b}`, dense over `a * d + b`,
/// one table per branch.
pub fn beta_tilde_sums(dim: Dim, params: &AntimonyParams) -> [Vec<Complex64>; 3] {
    let d = dim.d();
    let mut out = [
        vec![Complex64::zero(); d * d],
        vec![Complex64::zero(); d * d],
        vec![Complex64::zero(); d * d],
    ];
    for branch in 0..3 {
        for a in 0..d {
            for b in 0..d {
                let mut s = Complex64::zero();
                for p in 0..d {
                    for q in 0..d {
                        for qp in 0..d {
                            s += antimony_beta_tilde(dim, params, branch, p, q, qp, a, b)
                                .expect("indices in range");
                        }
                    }
                }
                out[branch][a * d + b] = s;
            }
        }
    }
    out
}

/// Full six-index lambda of one measurement set, both state branches:
/// the coherence term and (when enabled) the trace-preserving term.
///
/// The operator-ordering phase is the slot-symmetrized
/// `(xi^{-a~' b'} + xi^{-a' b~'}) / 2`: the two second-order orderings of the
/// target operators contribute with opposite slot assignments, and only the
/// symmetric combination is consistent with the stationary cross-spectra.
/// It also makes the frequency-parity of the coefficient functions and the
/// cancellation of the odd spectrum component exact identities rather than
/// approximations.
#[allow(clippy::too_many_arguments)]
pub fn lambda_antimony(
    dim: Dim,
    set: &MeasurementSet,
    ap: usize,
    bp: usize,
    atp: usize,
    btp: usize,
    at: usize,
    bt: usize,
) -> Complex64 {
    let d = dim.d();
    let roots = dim.roots();
    let obs = set.observable;
    let rho = set.rho;
    let (m, n) = (obs.m as i64, obs.n as i64);
    let (api, bpi, atpi, btpi) = (ap as i64, bp as i64, atp as i64, btp as i64);

    let order_phase = 0.5 * (roots.xi(-atpi * bpi) + roots.xi(-api * btpi));
    let gates = (Complex64::new(1.0, 0.0) - roots.xi(n * api - m * bpi))
        * (Complex64::new(1.0, 0.0) - roots.xi(n * atpi - m * btpi))
        * order_phase
        * roots.xi(at as i64 * bt as i64 - atpi * btpi);

    let mut state = Complex64::zero();
    if dim.canon(-(rho.p0 as i64) - m) == (ap + atp) % d
        && dim.canon(-(rho.q0 as i64) - n) == (bp + btp) % d
    {
        state += rho.coeff * roots.xi(m * (n + bpi + btpi) + (api + atpi) * (bpi + btpi));
    }
    if rho.trace_term_included
        && dim.canon(-m) == (ap + atp) % d
        && dim.canon(-n) == (bp + btp) % d
    {
        state += Complex64::new(1.0 / d as f64, 0.0) * roots.xi(m * n);
    }
    d as f64 * obs.coeff * gates * state
}

/// One state branch of a set's lambda, reduced over the target constraints:
/// the second target pair is pinned to `(s_a - a') mod d, (s_b - b') mod d`,
/// and the residual dependence on the second source pair is the bare phase
/// `xi^{a~ b~}` (folded into the H sums instead).
#[derive(Debug, Clone)]
struct LambdaBranch {
    s_a: usize,
    s_b: usize,
    /// Dense over (a', b').
    lam: Vec<Complex64>,
}

#[derive(Debug, Clone)]
struct AntimonySetData {
    eta: Complex64,
    branches: Vec<LambdaBranch>,
}

/// Result of one closed-form Poissonian contraction.
#[derive(Debug, Clone, Copy)]
pub struct PoissonianContraction {
    pub value: Complex64,
    /// Cells where the exponent degenerated to zero and the linear limit
    /// branch was taken.
    pub degenerate_cells: u64,
}

/// Full-Weyl forward model for the two-process spin Hamiltonian.
#[derive(Debug, Clone)]
pub struct AntimonyModel {
    dim: Dim,
    table: SwitchingTable,
    params: AntimonyParams,
    beta1: [Vec<Complex64>; 3],
    /// Source pairs (a, b) with a nonzero entry in beta1[0] or beta1[1],
    /// closed under negation; `src_slot[a*d+b]` maps into `src_list`.
    src_list: Vec<(usize, usize)>,
    src_slot: Vec<Option<usize>>,
    sets: Vec<AntimonySetData>,
}

impl AntimonyModel {
    pub fn new(
        dim: Dim,
        table: SwitchingTable,
        params: AntimonyParams,
        sets: &[MeasurementSet],
    ) -> Result<Self> {
        if table.kind() != BasisKind::Weyl {
            return Err(config("full-Weyl model needs a Weyl switching table"));
        }
        if table.dim() != dim {
            return Err(config("table dimension does not match model dimension"));
        }
        let d = dim.d();
        for s in sets {
            s.rho.validate(d)?;
        }
        let beta1 = beta_tilde_sums(dim, &params);

        let mut src_slot = vec![None; d * d];
        let mut src_list = Vec::new();
        for ab in 0..d * d {
            let live = beta1[0][ab].norm() > 1e-15 || beta1[1][ab].norm() > 1e-15;
            if live && src_slot[ab].is_none() {
                src_slot[ab] = Some(src_list.len());
                src_list.push((ab / d, ab % d));
                // negation partner
                let (a, b) = (ab / d, ab % d);
                let nab = dim.neg(a) * d + dim.neg(b);
                if src_slot[nab].is_none() {
                    src_slot[nab] = Some(src_list.len());
                    src_list.push((nab / d, nab % d));
                }
            }
        }

        let roots = dim.roots();
        let set_data = sets
            .iter()
            .map(|set| {
                let obs = set.observable;
                let rho = set.rho;
                let (m, n) = (obs.m as i64, obs.n as i64);
                let v_neg = rho.weyl_coeff(d, dim.canon(-m), dim.canon(-n));
                let eta = d as f64 * obs.coeff * v_neg * roots.xi(m * n);

                let mut branches = Vec::new();
                // Coherence branch.
                branches.push(Self::build_branch(
                    dim,
                    obs.coeff,
                    m,
                    n,
                    dim.canon(-(rho.p0 as i64) - m),
                    dim.canon(-(rho.q0 as i64) - n),
                    rho.coeff,
                    false,
                ));
                if rho.trace_term_included {
                    branches.push(Self::build_branch(
                        dim,
                        obs.coeff,
                        m,
                        n,
                        dim.canon(-m),
                        dim.canon(-n),
                        Complex64::new(1.0 / d as f64, 0.0),
                        true,
                    ));
                }
                AntimonySetData { eta, branches }
            })
            .collect();

        Ok(AntimonyModel { dim, table, params, beta1, src_list, src_slot, sets: set_data })
    }

    #[allow(clippy::too_many_arguments)]
    fn build_branch(
        dim: Dim,
        o_coeff: Complex64,
        m: i64,
        n: i64,
        s_a: usize,
        s_b: usize,
        amp: Complex64,
        trace_phase: bool,
    ) -> LambdaBranch {
        let d = dim.d();
        let roots = dim.roots();
        let mut lam = vec![Complex64::zero(); d * d];
        for ap in 0..d {
            for bp in 0..d {
                let atp = (s_a + d - ap % d) % d;
                let btp = (s_b + d - bp % d) % d;
                let (api, bpi, atpi, btpi) = (ap as i64, bp as i64, atp as i64, btp as i64);
                let order_phase = 0.5 * (roots.xi(-atpi * bpi) + roots.xi(-api * btpi));
                let gates = (Complex64::new(1.0, 0.0) - roots.xi(n * api - m * bpi))
                    * (Complex64::new(1.0, 0.0) - roots.xi(n * atpi - m * btpi))
                    * order_phase
                    * roots.xi(-atpi * btpi);
                let state_phase = if trace_phase {
                    roots.xi(m * n)
                } else {
                    roots.xi(m * (n + bpi + btpi) + (api + atpi) * (bpi + btpi))
                };
                lam[ap * d + bp] = d as f64 * o_coeff * amp * gates * state_phase;
            }
        }
        LambdaBranch { s_a, s_b, lam }
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn table(&self) -> &SwitchingTable {
        &self.table
    }

    pub fn params(&self) -> &AntimonyParams {
        &self.params
    }

    pub fn beta_tilde_sum(&self, branch: usize) -> &[Complex64] {
        &self.beta1[branch]
    }

    pub fn n_sets(&self) -> usize {
        self.sets.len()
    }

    pub fn eta(&self, set: usize) -> Complex64 {
        self.sets[set].eta
    }

    /// Filter table over the live source pairs and all targets at one
    /// frequency: `flt[si * d^2 + tgt] = F^{src}_{tgt}(w, reps * base)`.
    fn filter_table(&self, omega: f64, base_period: f64, reps: u32) -> Vec<Complex64> {
        let d = self.dim.d();
        let dd = d * d;
        let segs = segment_factors(&self.table.breakpoints(base_period), omega);
        let fac = repetition_factor(omega, base_period, reps);
        let mut flt = vec![Complex64::zero(); self.src_list.len() * dd];
        for (si, &(a, b)) in self.src_list.iter().enumerate() {
            for ap in 0..d {
                for bp in 0..d {
                    let mut f = Complex64::zero();
                    for (h, seg) in segs.iter().enumerate() {
                        f += self.table.value(h, SwitchIndex::Weyl { a, b, ap, bp }) * seg;
                    }
                    flt[si * dd + ap * d + bp] = fac * f;
                }
            }
        }
        flt
    }

    /// The contracted source sums at one frequency:
    /// `G_i[tgt] = sum_src beta1_i[src] F[src][tgt]` and
    /// `H_i[tgt'] = sum_src beta1_i[src] xi^{ab} conj(F[-src][-tgt'])`.
    fn source_sums(&self, flt: &[Complex64]) -> ([Vec<Complex64>; 2], [Vec<Complex64>; 2]) {
        let d = self.dim.d();
        let dd = d * d;
        let roots = self.dim.roots();
        let mut g = [vec![Complex64::zero(); dd], vec![Complex64::zero(); dd]];
        let mut h = [vec![Complex64::zero(); dd], vec![Complex64::zero(); dd]];
        for (si, &(a, b)) in self.src_list.iter().enumerate() {
            let nsi = self.src_slot[self.dim.neg(a) * d + self.dim.neg(b)]
                .expect("source list closed under negation");
            let phase = roots.xi((a * b) as i64);
            for i in 0..2 {
                let w = self.beta1[i][a * d + b];
                if w.is_zero() {
                    continue;
                }
                let wp = w * phase;
                for ap in 0..d {
                    for bp in 0..d {
                        let tgt = ap * d + bp;
                        g[i][tgt] += w * flt[si * dd + tgt];
                        let ntgt = self.dim.neg(ap) * d + self.dim.neg(bp);
                        h[i][tgt] += wp * flt[nsi * dd + ntgt].conj();
                    }
                }
            }
        }
        (g, h)
    }

    /// The four coefficient functions `Xi_{i i~}(w, t)`, i, i~ in {0, 1},
    /// with `t = reps * base_period`.
    ///
    /// The two noise slots are interchangeable in the stationary second-order
    /// kernel, so the contraction is symmetrized over their attachment; the
    /// result is even in `w` entry by entry.
    pub fn xi_matrix(
        &self,
        set: usize,
        omega: f64,
        base_period: f64,
        reps: u32,
    ) -> [[Complex64; 2]; 2] {
        let d = self.dim.d();
        let flt = self.filter_table(omega, base_period, reps);
        let (g, h) = self.source_sums(&flt);
        let mut xi = [[Complex64::zero(); 2]; 2];
        for branch in &self.sets[set].branches {
            for ap in 0..d {
                for bp in 0..d {
                    let lam = branch.lam[ap * d + bp];
                    if lam.is_zero() {
                        continue;
                    }
                    let atp = (branch.s_a + d - ap) % d;
                    let btp = (branch.s_b + d - bp) % d;
                    let tgt2 = atp * d + btp;
                    for i in 0..2 {
                        for it in 0..2 {
                            xi[i][it] += lam * g[i][ap * d + bp] * h[it][tgt2];
                        }
                    }
                }
            }
        }
        let off = 0.5 * (xi[0][1] + xi[1][0]);
        xi[0][1] = off;
        xi[1][0] = off;
        xi
    }

    /// One `Xi_{i i~}` coefficient (see [`Self::xi_matrix`]).
    pub fn xi_coefficient(
        &self,
        set: usize,
        i: usize,
        it: usize,
        omega: f64,
        base_period: f64,
        reps: u32,
    ) -> Complex64 {
        self.xi_matrix(set, omega, base_period, reps)[i][it]
    }

    /// The folded coefficients `(C_0, C_1, C_2) = (Xi_00, Xi_11, Xi_01 + Xi_10)`.
    pub fn coeffs(&self, set: usize, omega: f64, base_period: f64, reps: u32) -> [Complex64; 3] {
        let xi = self.xi_matrix(set, omega, base_period, reps);
        [xi[0][0], xi[1][1], xi[0][1] + xi[1][0]]
    }

    /// Closed-form `integral x_i(w) Xi_{l l~}(w, M T_r) dw` over the
    /// measurement band for a Poissonian component `x_i = w^2 e^{-g |w|}`.
    ///
    /// The `1/w^2` of the filter product cancels the `w^2` of the spectrum,
    /// leaving pure exponential cells `(e^{hi G} - e^{lo G}) / G` per pair of
    /// interval edges and repetition offset.
    pub fn poissonian_contraction(
        &self,
        set: usize,
        decay: f64,
        l: usize,
        lt: usize,
        cfg: &CombConfig,
        round: usize,
    ) -> PoissonianContraction {
        let d = self.dim.d();
        let dd = d * d;
        let t_r = cfg.round_period(round);
        let pts = self.table.breakpoints(t_r);
        let n_int = pts.len() - 1;
        let lo = cfg.integral_lower();
        let hi = cfg.omega_max;
        let m = cfg.reps as i64;

        // dtil[h1 * (n_int+1) + h2] over interval-edge pairs, summed over the
        // repetition offsets with multiplicity M - |delta|.
        let mut degenerate = 0u64;
        let mut cell = |theta: f64| -> Complex64 {
            // integral of e^{(-g + I theta) w} over [lo, hi]
            let gj = Complex64::new(-decay, theta);
            if gj.norm() < 1e-12 {
                degenerate += 1;
                return Complex64::new(hi - lo, 0.0);
            }
            ((gj * hi).exp() - (gj * lo).exp()) / gj
        };
        let mut dtil = vec![Complex64::zero(); n_int * n_int];
        for h1 in 0..n_int {
            for h2 in 0..n_int {
                let mut s = Complex64::zero();
                for delta in -(m - 1)..=(m - 1) {
                    let mult = (m - delta.abs()) as f64;
                    let base = delta as f64 * t_r;
                    // (e^{I t_{h1+1} w} - e^{I t_{h1} w})(e^{-I t_{h2+1} w} - e^{-I t_{h2} w})
                    let tp = [pts[h1 + 1], pts[h1]];
                    let tm = [pts[h2 + 1], pts[h2]];
                    let mut quad_sum = Complex64::zero();
                    for (j1, &t1) in tp.iter().enumerate() {
                        for (j2, &t2) in tm.iter().enumerate() {
                            let sign = if (j1 + j2) % 2 == 0 { 1.0 } else { -1.0 };
                            quad_sum += sign * cell(base + t1 - t2);
                        }
                    }
                    s += mult * quad_sum;
                }
                dtil[h1 * n_int + h2] = s;
            }
        }

        // Per-interval source sums, frequency independent.
        let roots = self.dim.roots();
        let mut gprime = vec![Complex64::zero(); dd * n_int];
        let mut hprime = vec![Complex64::zero(); dd * n_int];
        for &(a, b) in &self.src_list {
            let na = self.dim.neg(a);
            let nb = self.dim.neg(b);
            let phase = roots.xi((a * b) as i64);
            for h in 0..n_int {
                for ap in 0..d {
                    for bp in 0..d {
                        let tgt = ap * d + bp;
                        let wg = self.beta1[l][a * d + b];
                        if !wg.is_zero() {
                            let y = self.table.value(h, SwitchIndex::Weyl { a, b, ap, bp });
                            gprime[tgt * n_int + h] += wg * y;
                        }
                        let wh = self.beta1[lt][a * d + b];
                        if !wh.is_zero() {
                            let yn = self.table.value(
                                h,
                                SwitchIndex::Weyl {
                                    a: na,
                                    b: nb,
                                    ap: self.dim.neg(ap),
                                    bp: self.dim.neg(bp),
                                },
                            );
                            hprime[tgt * n_int + h] += wh * phase * yn.conj();
                        }
                    }
                }
            }
        }

        let mut total = Complex64::zero();
        for branch in &self.sets[set].branches {
            for ap in 0..d {
                for bp in 0..d {
                    let lam = branch.lam[ap * d + bp];
                    if lam.is_zero() {
                        continue;
                    }
                    let atp = (branch.s_a + d - ap) % d;
                    let btp = (branch.s_b + d - bp) % d;
                    let mut s = Complex64::zero();
                    for h1 in 0..n_int {
                        let gv = gprime[(ap * d + bp) * n_int + h1];
                        if gv.is_zero() {
                            continue;
                        }
                        for h2 in 0..n_int {
                            s += gv * hprime[(atp * d + btp) * n_int + h2] * dtil[h1 * n_int + h2];
                        }
                    }
                    total += lam * s;
                }
            }
        }
        PoissonianContraction { value: total, degenerate_cells: degenerate }
    }

    /// Analytic `A^r` for all-Poissonian truth components with the given
    /// decay rates `(g_0, g_1, g_2)`.
    pub fn measure_poissonian(
        &self,
        decays: [f64; 3],
        cfg: &CombConfig,
        set: usize,
        round: usize,
    ) -> PoissonianContraction {
        let a0 = self.poissonian_contraction(set, decays[0], 0, 0, cfg, round);
        let a1 = self.poissonian_contraction(set, decays[1], 1, 1, cfg, round);
        let a2a = self.poissonian_contraction(set, decays[2], 0, 1, cfg, round);
        let a2b = self.poissonian_contraction(set, decays[2], 1, 0, cfg, round);
        let total = a0.value + a1.value + a2a.value + a2b.value;
        PoissonianContraction {
            value: self.eta(set) - total / core::f64::consts::TAU,
            degenerate_cells: a0.degenerate_cells
                + a1.degenerate_cells
                + a2a.degenerate_cells
                + a2b.degenerate_cells,
        }
    }
}
