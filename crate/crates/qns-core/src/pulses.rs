//! Resonant pulses, reference pulse sequences, and switching functions.
//!
//! A resonant pulse `P_(i,j) = |i><j| + |j><i| + 1 - |i><i| - |j><j|` swaps
//! two levels and is its own inverse. Conjugating a Weyl operator by a pulse
//! stays inside the Weyl algebra:
//!
//! `P^-1 Z^a X^b P = sum_{a',b'} y^{ab}_{a'b'} Z^{a'} X^{b'}`
//!
//! The coefficients `y` are the switching functions. They are piecewise
//! constant in time over the intervals of a reference pulse sequence, and
//! their Fourier transforms (the filter functions) weight which noise
//! frequencies a measurement senses. Closed forms are implemented for the
//! full Weyl case, the Z-only (reduced) case, and the special three-interval
//! qutrit table, each validated against the brute-force conjugation oracle.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{argument, config};
use crate::matrix::ComplexMatrix;
use crate::weyl::{weyl_decompose, weyl_operator, Dim, Roots, WeylCoefficients, WeylIndex};
use crate::Result;

/// Exact fraction of the sequence period, kept rational so boundaries do not
/// drift when the period is rescaled by 1/r across comb rounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Frac {
    pub num: u64,
    pub den: u64,
}

impl Frac {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(argument("fraction denominator must be nonzero"));
        }
        if num > den {
            return Err(argument(format!("boundary fraction {num}/{den} exceeds 1")));
        }
        if num == 0 {
            return Ok(Frac { num: 0, den: 1 });
        }
        let g = gcd(num, den);
        Ok(Frac { num: num / g, den: den / g })
    }

    pub fn as_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// A transition pulse between levels `i` and `j` of a qudit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResonantPulse {
    pub i: usize,
    pub j: usize,
}

impl ResonantPulse {
    pub fn new(dim: Dim, i: usize, j: usize) -> Result<Self> {
        let d = dim.d();
        if i >= d || j >= d {
            return Err(argument(format!("pulse levels ({i},{j}) out of range for d={d}")));
        }
        if i == j {
            return Err(argument("pulse levels must differ"));
        }
        Ok(ResonantPulse { i, j })
    }
}

/// `P_(i,j)` as a dense matrix: the permutation swapping levels i and j.
pub fn pulse_matrix(dim: Dim, p: ResonantPulse) -> ComplexMatrix {
    let d = dim.d();
    let one = Complex64::new(1.0, 0.0);
    let mut m = ComplexMatrix::zeros(d);
    for k in 0..d {
        if k == p.i {
            m[(p.i, p.j)] = one;
        } else if k == p.j {
            m[(p.j, p.i)] = one;
        } else {
            m[(k, k)] = one;
        }
    }
    m
}

/// Ground-truth switching coefficients by explicit conjugation:
/// `weyl_decompose(P^-1 Z^a X^b P)`.
///
/// This is the oracle every closed-form switching function is tested against.
pub fn conjugate_weyl_oracle(dim: Dim, p: ResonantPulse, idx: WeylIndex) -> WeylCoefficients {
    let pm = pulse_matrix(dim, p); // involutory, P^-1 = P
    let w = weyl_operator(dim, idx);
    let conj = pm.mul(&w).mul(&pm);
    weyl_decompose(&conj).expect("square by construction")
}

/// Closed-form switching coefficients `y^{ijab}_{a'b'}` of `P^-1 Z^a X^b P`.
///
/// Six target `b'` branches: `{0, i-j, j-i, i-j+b, j-i+b, b}`. Branches that
/// collide mod d are accumulated additively. For `b = 0` the delta weight of
/// the first three branches picks up the extra `-(xi^{ai} + xi^{aj})` term
/// that the pair pulses contribute when the shift power vanishes; without it
/// the conjugation of `Z^a` would leave the Z-only span.
pub fn switching_full(dim: Dim, p: ResonantPulse, idx: WeylIndex) -> WeylCoefficients {
    let d = dim.d();
    let roots = dim.roots();
    let (i, j) = (p.i as i64, p.j as i64);
    let (a, b) = (idx.a as i64, idx.b as i64);
    let inv_d = 1.0 / d as f64;

    // Weight shared by the b' in {0, i-j, j-i} branches.
    let mut w = Complex64::zero();
    if idx.b == dim.canon(j - i) {
        w += roots.xi(a * j);
    }
    if idx.b == dim.canon(i - j) {
        w += roots.xi(a * i);
    }
    if idx.b == 0 {
        w -= roots.xi(a * i) + roots.xi(a * j);
    }

    let mut out = WeylCoefficients::zeros(dim);
    for ap in 0..d as i64 {
        let mut add = |bp: i64, v: Complex64| {
            out.add(dim.canon(ap), dim.canon(bp), v * inv_d);
        };
        // b' = 0
        add(0, -(roots.xi(-ap * i) + roots.xi(-ap * j)) * w);
        // b' = i - j and b' = j - i
        add(i - j, roots.xi(-ap * i) * w);
        add(j - i, roots.xi(-ap * j) * w);
        // b' = i - j + b and b' = j - i + b
        add(i - j + b, roots.xi((a - ap) * (i + b)) + roots.xi(-ap * i + a * j));
        add(j - i + b, roots.xi((a - ap) * (j + b)) + roots.xi(-ap * j + a * i));
        // b' = b
        let mut diag = -(roots.xi((a - ap) * i) + roots.xi((a - ap) * j))
            * (roots.xi((a - ap) * b) + Complex64::new(1.0, 0.0));
        if ap == a {
            diag += Complex64::new(d as f64, 0.0);
        }
        add(b, diag);
    }
    out
}

/// Z-only switching function of `P^-1 Z^a P`:
/// `y_{m,a} = delta_{m,a} + (1/d)(xi^{-mj} - xi^{-mi})(xi^{ai} - xi^{aj})`,
/// returned as the map source `a` -> target `m`.
pub fn switching_reduced(dim: Dim, p: ResonantPulse, a: usize) -> Vec<Complex64> {
    let d = dim.d();
    let roots = dim.roots();
    let (i, j) = (p.i as i64, p.j as i64);
    let asi = a as i64;
    let src = (roots.xi(asi * i) - roots.xi(asi * j)) / d as f64;
    (0..d)
        .map(|m| {
            let mi = m as i64;
            let mut y = (roots.xi(-mi * j) - roots.xi(-mi * i)) * src;
            if m == a {
                y += Complex64::new(1.0, 0.0);
            }
            y
        })
        .collect()
}

/// The three-interval qutrit switching values: `1`, `xi^-a`, `xi^a` for
/// intervals 1, 2, 3. Source `beta_a` maps to target `Z^-a` with this
/// coefficient.
pub fn switching_qutrit(interval: usize, a: usize) -> Result<Complex64> {
    let roots = Roots::new(3);
    match interval {
        1 => Ok(Complex64::new(1.0, 0.0)),
        2 => Ok(roots.xi(-(a as i64))),
        3 => Ok(roots.xi(a as i64)),
        _ => Err(argument(format!("qutrit interval must be 1..=3, got {interval}"))),
    }
}

/// Which switching-table flavor a scenario uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    /// Full Weyl table: source (a, b) -> target (a', b').
    Weyl,
    /// Reduced (Z-only) table: source a -> target m.
    ReducedWeyl,
    /// The fixed qutrit three-interval table.
    QutritSpecial,
}

/// An ordered reference pulse sequence with interval start fractions.
///
/// Pulse k opens interval k; interval k runs from `boundaries[k]` to
/// `boundaries[k+1]` (or the period end), in fractions of the base period.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferencePulseSequence {
    dim: Dim,
    pulses: Vec<ResonantPulse>,
    boundaries: Vec<Frac>,
}

/// Non-fatal findings from sequence validation (symmetry/closure conditions
/// the hard check does not enforce).
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceWarnings {
    pub closure_violated: bool,
    pub chained_levels_violated: bool,
}

impl ReferencePulseSequence {
    pub fn new(dim: Dim, pulses: Vec<ResonantPulse>, boundaries: Vec<Frac>) -> Result<Self> {
        if pulses.is_empty() {
            return Err(argument("pulse sequence must contain at least one pulse"));
        }
        if pulses.len() != boundaries.len() {
            return Err(argument(format!(
                "sequence has {} pulses but {} boundaries",
                pulses.len(),
                boundaries.len()
            )));
        }
        if boundaries[0] != (Frac { num: 0, den: 1 }) {
            return Err(argument("first interval boundary must be 0"));
        }
        for w in boundaries.windows(2) {
            // Strictly increasing, compared exactly via cross-multiplication.
            if w[0].num * w[1].den >= w[1].num * w[0].den {
                return Err(argument("interval boundaries must be strictly increasing"));
            }
        }
        Ok(ReferencePulseSequence { dim, pulses, boundaries })
    }

    /// The d-pulse cycle `(0,1), (1,2), .., (d-1,0)` at equally spaced
    /// instants `i/d` of the period.
    pub fn cycle(dim: Dim) -> Self {
        let d = dim.d();
        let pulses = (0..d)
            .map(|i| ResonantPulse { i, j: (i + 1) % d })
            .collect();
        let boundaries = (0..d as u64)
            .map(|i| Frac::new(i, d as u64).expect("valid"))
            .collect();
        ReferencePulseSequence { dim, pulses, boundaries }
    }

    /// The fixed qutrit sequence `(0,1), (1,2), (2,0)` at instants
    /// `0, 1/7, 2/5` of the period.
    pub fn qutrit_standard() -> Self {
        let dim = Dim::new(3).expect("3 >= 2");
        ReferencePulseSequence {
            dim,
            pulses: vec![
                ResonantPulse { i: 0, j: 1 },
                ResonantPulse { i: 1, j: 2 },
                ResonantPulse { i: 2, j: 0 },
            ],
            boundaries: vec![
                Frac { num: 0, den: 1 },
                Frac { num: 1, den: 7 },
                Frac { num: 2, den: 5 },
            ],
        }
    }

    /// The eight-pulse quoct sequence
    /// `(0,4), (4,5), (5,3), (3,6), (6,1), (1,7), (7,2), (2,0)`
    /// at instants `i/8` of the period.
    pub fn antimony_standard() -> Self {
        let dim = Dim::new(8).expect("8 >= 2");
        let levels = [(0, 4), (4, 5), (5, 3), (3, 6), (6, 1), (1, 7), (7, 2), (2, 0)];
        let pulses = levels.iter().map(|&(i, j)| ResonantPulse { i, j }).collect();
        let boundaries = (0..8).map(|i| Frac::new(i, 8).expect("valid")).collect();
        ReferencePulseSequence { dim, pulses, boundaries }
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn pulses(&self) -> &[ResonantPulse] {
        &self.pulses
    }

    pub fn boundaries(&self) -> &[Frac] {
        &self.boundaries
    }

    pub fn len(&self) -> usize {
        self.pulses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pulses.is_empty()
    }

    /// Soft validation of the closure conditions a symmetric sequence is
    /// expected to satisfy; violations are reported, not rejected. The level
    /// chain should link (`j_k = i_{k+1}`) and close back on the first level
    /// (`j_{last} = i_0`), as the canonical cycle and quoct sequences do.
    pub fn warnings(&self) -> SequenceWarnings {
        let first = self.pulses[0];
        let last = self.pulses[self.pulses.len() - 1];
        let closure_violated = self.pulses.len() > 1 && first.i != last.j;
        let chained_levels_violated = self
            .pulses
            .windows(2)
            .any(|w| w[0].j != w[1].i);
        SequenceWarnings { closure_violated, chained_levels_violated }
    }
}

/// Per-interval switching coefficients of a reference pulse sequence.
#[derive(Debug, Clone)]
pub struct SwitchingTable {
    dim: Dim,
    kind: BasisKind,
    boundaries: Vec<Frac>,
    data: TableData,
}

#[derive(Debug, Clone)]
enum TableData {
    /// `[interval][src a*d+b][tgt a'*d+b']`
    Weyl(Vec<Vec<Complex64>>),
    /// `[interval][src a][tgt m]`
    Reduced(Vec<Vec<Complex64>>),
    /// `[interval][a]`, target implicitly `-a`.
    Qutrit(Vec<Vec<Complex64>>),
}

/// Multi-index of one switching (and filter) function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwitchIndex {
    /// Qutrit special table: the single index a.
    Qutrit { a: usize },
    /// Reduced table: noise source index a, target Z power b.
    Reduced { a: usize, b: usize },
    /// Full table: source (a, b), target (a', b').
    Weyl { a: usize, b: usize, ap: usize, bp: usize },
}

impl SwitchIndex {
    /// Index-wise negation mod d.
    pub fn neg(self, dim: Dim) -> Self {
        match self {
            SwitchIndex::Qutrit { a } => SwitchIndex::Qutrit { a: dim.neg(a) },
            SwitchIndex::Reduced { a, b } => {
                SwitchIndex::Reduced { a: dim.neg(a), b: dim.neg(b) }
            }
            SwitchIndex::Weyl { a, b, ap, bp } => SwitchIndex::Weyl {
                a: dim.neg(a),
                b: dim.neg(b),
                ap: dim.neg(ap),
                bp: dim.neg(bp),
            },
        }
    }
}

impl SwitchingTable {
    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn intervals(&self) -> usize {
        self.boundaries.len()
    }

    pub fn boundaries(&self) -> &[Frac] {
        &self.boundaries
    }

    /// Interval breakpoints in absolute time for a base period `t_r`,
    /// including the closing endpoint `t_r`.
    pub fn breakpoints(&self, t_r: f64) -> Vec<f64> {
        let mut pts: Vec<f64> = self.boundaries.iter().map(|f| f.as_f64() * t_r).collect();
        pts.push(t_r);
        pts
    }

    /// Switching value for one multi-index in one interval.
    pub fn value(&self, interval: usize, idx: SwitchIndex) -> Complex64 {
        let d = self.dim.d();
        match (&self.data, idx) {
            (TableData::Qutrit(t), SwitchIndex::Qutrit { a }) => t[interval][a],
            (TableData::Reduced(t), SwitchIndex::Reduced { a, b }) => t[interval][a * d + b],
            (TableData::Weyl(t), SwitchIndex::Weyl { a, b, ap, bp }) => {
                t[interval][(a * d + b) * d * d + ap * d + bp]
            }
            _ => panic!("switch index flavor does not match table kind"),
        }
    }

    /// Residual of the Hermiticity constraint
    /// `y_A = xi^{A^n_Z A^n_X - A_Z A_X} conj(y_{-A})` over the whole table.
    pub fn hermiticity_residual(&self) -> f64 {
        let d = self.dim.d();
        let roots = self.dim.roots();
        let mut r: f64 = 0.0;
        for h in 0..self.intervals() {
            match self.kind {
                BasisKind::QutritSpecial => {
                    for a in 0..d {
                        let idx = SwitchIndex::Qutrit { a };
                        let y = self.value(h, idx);
                        let yn = self.value(h, idx.neg(self.dim));
                        r = r.max((y - yn.conj()).norm());
                    }
                }
                BasisKind::ReducedWeyl => {
                    for a in 0..d {
                        for b in 0..d {
                            let idx = SwitchIndex::Reduced { a, b };
                            let y = self.value(h, idx);
                            let yn = self.value(h, idx.neg(self.dim));
                            r = r.max((y - yn.conj()).norm());
                        }
                    }
                }
                BasisKind::Weyl => {
                    for a in 0..d {
                        for b in 0..d {
                            for ap in 0..d {
                                for bp in 0..d {
                                    let idx = SwitchIndex::Weyl { a, b, ap, bp };
                                    let y = self.value(h, idx);
                                    let yn = self.value(h, idx.neg(self.dim));
                                    let phase =
                                        roots.xi((a * b) as i64 - (ap * bp) as i64);
                                    r = r.max((y - phase * yn.conj()).norm());
                                }
                            }
                        }
                    }
                }
            }
        }
        r
    }

    /// Raw per-interval block, for tests that need to tamper with a copy.
    pub fn raw_interval_mut(&mut self, interval: usize) -> &mut [Complex64] {
        match &mut self.data {
            TableData::Weyl(t) => &mut t[interval],
            TableData::Reduced(t) => &mut t[interval],
            TableData::Qutrit(t) => &mut t[interval],
        }
    }
}

/// Builds the per-interval switching table of a reference pulse sequence.
///
/// `QutritSpecial` is only defined for d = 3 with the standard qutrit pulse
/// list; anything else is a configuration error.
pub fn build_switching_table(
    dim: Dim,
    seq: &ReferencePulseSequence,
    kind: BasisKind,
) -> Result<SwitchingTable> {
    if seq.dim() != dim {
        return Err(config("sequence dimension does not match requested dimension"));
    }
    let d = dim.d();
    let data = match kind {
        BasisKind::Weyl => {
            let mut per = Vec::with_capacity(seq.len());
            for p in seq.pulses() {
                let mut block = vec![Complex64::zero(); d * d * d * d];
                for a in 0..d {
                    for b in 0..d {
                        let y = switching_full(dim, *p, WeylIndex { a, b });
                        for (tgt, v) in y.iter() {
                            block[(a * d + b) * d * d + tgt.a * d + tgt.b] = v;
                        }
                    }
                }
                per.push(block);
            }
            TableData::Weyl(per)
        }
        BasisKind::ReducedWeyl => {
            let mut per = Vec::with_capacity(seq.len());
            for p in seq.pulses() {
                let mut block = vec![Complex64::zero(); d * d];
                for a in 0..d {
                    let ys = switching_reduced(dim, *p, a);
                    for (m, v) in ys.iter().enumerate() {
                        block[a * d + m] = *v;
                    }
                }
                per.push(block);
            }
            TableData::Reduced(per)
        }
        BasisKind::QutritSpecial => {
            if d != 3 {
                return Err(config(format!("qutrit special table requires d=3, got {d}")));
            }
            let std_seq = ReferencePulseSequence::qutrit_standard();
            if seq.pulses() != std_seq.pulses() {
                return Err(config(
                    "qutrit special table requires the standard (0,1),(1,2),(2,0) sequence",
                ));
            }
            let mut per = Vec::with_capacity(3);
            for h in 1..=3 {
                per.push(
                    (0..3)
                        .map(|a| switching_qutrit(h, a).expect("interval in range"))
                        .collect(),
                );
            }
            TableData::Qutrit(per)
        }
    };
    Ok(SwitchingTable { dim, kind, boundaries: seq.boundaries().to_vec(), data })
}

/// Compares the table path against the matrix path for one interval: builds
/// `H = sum beta Z^a X^b`, conjugates it by the interval's pulse directly,
/// and rebuilds it from the switching coefficients. Returns the max
/// entrywise deviation.
pub fn effective_hamiltonian_check(
    dim: Dim,
    seq: &ReferencePulseSequence,
    frozen_beta: &WeylCoefficients,
    interval: usize,
) -> Result<f64> {
    if interval >= seq.len() {
        return Err(argument(format!(
            "interval {interval} out of range for a {}-pulse sequence",
            seq.len()
        )));
    }
    let d = dim.d();
    let p = seq.pulses()[interval];
    let h = crate::weyl::weyl_reconstruct(dim, frozen_beta);
    let pm = pulse_matrix(dim, p);
    let direct = pm.mul(&h).mul(&pm);

    let mut from_table = ComplexMatrix::zeros(d);
    for (src, beta) in frozen_beta.iter() {
        if beta.is_zero() {
            continue;
        }
        let y = switching_full(dim, p, src);
        for (tgt, v) in y.iter() {
            if v.is_zero() {
                continue;
            }
            from_table.add_scaled(&weyl_operator(dim, tgt), beta * v);
        }
    }
    Ok(direct.max_abs_diff(&from_table))
}
