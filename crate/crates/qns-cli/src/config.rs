//! Run configuration: a single TOML file describing the scenario, comb
//! parameters, pulse sequence, measurement sets, and either synthetic truth
//! spectra or a measured-records path.

use std::fmt;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use qns_core::forward::{
    AntimonyModel, AntimonyParams, CombConfig, InitialStateSpec, MeasurementSet, ObservableSpec,
    QuditRwModel, QutritModel, ScenarioModel,
};
use qns_core::pulses::{
    build_switching_table, BasisKind, Frac, ReferencePulseSequence, ResonantPulse,
};
use qns_core::spectra::{GaussBump, RealSpectrum, ScenarioKind, ScenarioSpectra, SpectrumShape};
use qns_core::weyl::Dim;
use serde::Deserialize;

/// A configuration problem; maps to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn bad(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: String,
    pub d: usize,
    /// Reference sequence duration T, `[T]`.
    pub t: f64,
    /// Repetitions M per round.
    pub m: u32,
    /// Maximum detected frequency Omega, rad/`[T]`.
    pub omega: f64,
    /// Lower limit of the measurement integral. Defaults to the first comb
    /// tooth w0; a small value (e.g. 1e-3) sharpens the first grid bin when
    /// the truth vanishes toward zero frequency.
    #[serde(default)]
    pub first_bin_start: Option<f64>,
    /// Quadrature tolerance of the integral path.
    #[serde(default = "default_quad_tol")]
    pub quad_rel_tol: f64,
    /// Seed for randomized pulse sequences.
    #[serde(default)]
    pub seed: u64,
    /// Output directory; `--out` overrides.
    pub out_dir: Option<PathBuf>,
    pub pulse_sequence: PulseSequenceConfig,
    pub sets: Vec<SetConfig>,
    /// Synthetic truth spectra (synthetic mode)...
    pub truth: Option<TruthConfig>,
    /// ...or a CSV of measured records (measured mode); `--records`
    /// overrides.
    pub records: Option<PathBuf>,
    pub antimony: Option<AntimonyConfig>,
}

fn default_quad_tol() -> f64 {
    1e-8
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseSequenceConfig {
    /// Named preset: "qutrit-standard", "cycle", or "antimony-standard".
    pub preset: Option<String>,
    /// Explicit pulse list [[i, j], ..] with matching `boundaries`.
    pub pulses: Option<Vec<[usize; 2]>>,
    /// Interval start fractions as "num/den" strings, first must be "0".
    pub boundaries: Option<Vec<String>>,
    /// Draw a random chained sequence from the config seed instead.
    #[serde(default)]
    pub random: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetConfig {
    pub observable: TermConfig,
    pub rho: TermConfig,
    #[serde(default)]
    pub include_trace_term: bool,
}

/// One Weyl term `coeff * Z^a X^b`; the complex coefficient is `[re, im]`
/// or a bare real number.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermConfig {
    pub a: usize,
    pub b: usize,
    #[serde(default = "default_coeff")]
    pub coeff: Coeff,
}

fn default_coeff() -> Coeff {
    Coeff::Real(1.0)
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Coeff {
    Real(f64),
    Complex([f64; 2]),
}

impl Coeff {
    pub fn value(&self) -> Complex64 {
        match self {
            Coeff::Real(re) => Complex64::new(*re, 0.0),
            Coeff::Complex([re, im]) => Complex64::new(*re, *im),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruthConfig {
    pub components: Vec<ShapeConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ShapeConfig {
    /// `w^2 exp(-decay |w|)`
    Poissonian { decay: f64 },
    /// Sum of `amplitude * exp(-width (w - center)^2)` bumps,
    /// each given as `[amplitude, center, width]`.
    GaussianBumps { bumps: Vec<[f64; 3]> },
    /// `amplitude / (1 + |w - center|)`
    Rational { amplitude: f64, center: f64 },
    /// Piecewise-linear table of `[w, value]` nodes, zero outside.
    Tabulated { points: Vec<[f64; 2]> },
    Zero,
}

impl ShapeConfig {
    fn to_shape(&self) -> SpectrumShape {
        match self {
            ShapeConfig::Poissonian { decay } => SpectrumShape::Poissonian { decay: *decay },
            ShapeConfig::GaussianBumps { bumps } => SpectrumShape::GaussianBumps {
                bumps: bumps
                    .iter()
                    .map(|[a, c, w]| GaussBump { amplitude: *a, center: *c, width: *w })
                    .collect(),
            },
            ShapeConfig::Rational { amplitude, center } => {
                SpectrumShape::Rational { amplitude: *amplitude, center: *center }
            }
            ShapeConfig::Tabulated { points } => SpectrumShape::Tabulated {
                grid: points.iter().map(|[w, v]| (*w, *v)).collect(),
            },
            ShapeConfig::Zero => SpectrumShape::GaussianBumps { bumps: Vec::new() },
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AntimonyConfig {
    #[serde(default = "one")]
    pub gamma_n: f64,
    #[serde(default = "one")]
    pub b0: f64,
    #[serde(default = "one")]
    pub hyperfine_sign: f64,
}

fn one() -> f64 {
    1.0
}

/// Everything a run needs, validated and built from a [`RunConfig`].
pub struct Prepared {
    pub scenario: ScenarioKind,
    pub model: ScenarioModel,
    pub comb: CombConfig,
    pub truth: Option<ScenarioSpectra>,
    pub records_path: Option<PathBuf>,
    pub sequence: ReferencePulseSequence,
    pub spectrum_names: Vec<&'static str>,
    pub sequence_warnings: Vec<String>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| bad(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| bad(format!("{}: {e}", path.display())))
    }

    pub fn scenario_kind(&self) -> Result<ScenarioKind, ConfigError> {
        match self.scenario.as_str() {
            "qutrit-rw" => Ok(ScenarioKind::QutritRw),
            "qudit-rw" => Ok(ScenarioKind::QuditRw),
            "antimony-w" => Ok(ScenarioKind::AntimonyW),
            other => Err(bad(format!(
                "unknown scenario {other:?} (expected qutrit-rw, qudit-rw, or antimony-w)"
            ))),
        }
    }

    pub fn prepare(&self) -> Result<Prepared, ConfigError> {
        let scenario = self.scenario_kind()?;
        match scenario {
            ScenarioKind::QutritRw if self.d != 3 => {
                return Err(bad(format!("qutrit-rw requires d = 3, got {}", self.d)));
            }
            ScenarioKind::AntimonyW if self.d != 8 => {
                return Err(bad(format!("antimony-w requires d = 8, got {}", self.d)));
            }
            _ => {}
        }
        let dim = Dim::new(self.d).map_err(|e| bad(e.to_string()))?;

        let mut comb =
            CombConfig::new(self.t, self.m, self.omega).map_err(|e| bad(e.to_string()))?;
        comb.first_bin_start = self.first_bin_start;
        comb.quad_rel_tol = self.quad_rel_tol;

        let sequence = self.build_sequence(dim)?;
        let warn = sequence.warnings();
        let mut sequence_warnings = Vec::new();
        if warn.closure_violated {
            sequence_warnings
                .push("sequence closure condition violated (first/last pulses unrelated)".into());
        }
        if warn.chained_levels_violated {
            sequence_warnings
                .push("sequence chaining condition violated (j_k != i_{k+1})".into());
        }

        let sets = self.build_sets(dim)?;
        let unknowns = scenario.unknown_count();
        if sets.len() < unknowns {
            return Err(bad(format!(
                "scenario needs at least {unknowns} measurement sets, got {}",
                sets.len()
            )));
        }

        let model = match scenario {
            ScenarioKind::QutritRw => {
                let table = build_switching_table(dim, &sequence, BasisKind::QutritSpecial)
                    .map_err(|e| bad(e.to_string()))?;
                ScenarioModel::Qutrit(
                    QutritModel::new(table, &sets).map_err(|e| bad(e.to_string()))?,
                )
            }
            ScenarioKind::QuditRw => {
                let table = build_switching_table(dim, &sequence, BasisKind::ReducedWeyl)
                    .map_err(|e| bad(e.to_string()))?;
                ScenarioModel::QuditRw(
                    QuditRwModel::new(dim, table, &sets).map_err(|e| bad(e.to_string()))?,
                )
            }
            ScenarioKind::AntimonyW => {
                let table = build_switching_table(dim, &sequence, BasisKind::Weyl)
                    .map_err(|e| bad(e.to_string()))?;
                let params = match &self.antimony {
                    Some(a) => {
                        if a.hyperfine_sign.abs() != 1.0 {
                            return Err(bad("antimony.hyperfine_sign must be +1 or -1"));
                        }
                        AntimonyParams {
                            gamma_n: a.gamma_n,
                            b0: a.b0,
                            hyperfine_sign: a.hyperfine_sign,
                        }
                    }
                    None => AntimonyParams::default(),
                };
                ScenarioModel::Antimony(
                    AntimonyModel::new(dim, table, params, &sets)
                        .map_err(|e| bad(e.to_string()))?,
                )
            }
        };

        let truth = match (&self.truth, &self.records) {
            (Some(t), None) => Some(self.build_truth(scenario, t)?),
            (None, Some(_)) => None,
            (Some(_), Some(_)) => {
                return Err(bad("give either synthetic [truth] or a records path, not both"));
            }
            (None, None) => {
                return Err(bad("need either synthetic [truth] or a records path"));
            }
        };

        let spectrum_names = match scenario {
            ScenarioKind::QutritRw => vec!["r1", "i1", "e"],
            ScenarioKind::QuditRw => vec!["s"],
            ScenarioKind::AntimonyW => vec!["r0", "r0p", "r1"],
        };

        Ok(Prepared {
            scenario,
            model,
            comb,
            truth,
            records_path: self.records.clone(),
            sequence,
            spectrum_names,
            sequence_warnings,
        })
    }

    fn build_sequence(&self, dim: Dim) -> Result<ReferencePulseSequence, ConfigError> {
        let ps = &self.pulse_sequence;
        if let Some(name) = &ps.preset {
            return match name.as_str() {
                "qutrit-standard" => {
                    if dim.d() != 3 {
                        return Err(bad("qutrit-standard sequence requires d = 3"));
                    }
                    Ok(ReferencePulseSequence::qutrit_standard())
                }
                "cycle" => Ok(ReferencePulseSequence::cycle(dim)),
                "antimony-standard" => {
                    if dim.d() != 8 {
                        return Err(bad("antimony-standard sequence requires d = 8"));
                    }
                    Ok(ReferencePulseSequence::antimony_standard())
                }
                other => Err(bad(format!("unknown pulse sequence preset {other:?}"))),
            };
        }
        if ps.random {
            return random_sequence(dim, self.seed).map_err(bad);
        }
        let (pulses, boundaries) = match (&ps.pulses, &ps.boundaries) {
            (Some(p), Some(b)) => (p, b),
            _ => {
                return Err(bad(
                    "pulse_sequence needs a preset, random = true, or explicit pulses + boundaries",
                ))
            }
        };
        let pulses = pulses
            .iter()
            .map(|[i, j]| ResonantPulse::new(dim, *i, *j).map_err(|e| bad(e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        let boundaries = boundaries
            .iter()
            .map(|s| parse_frac(s))
            .collect::<Result<Vec<_>, _>>()?;
        ReferencePulseSequence::new(dim, pulses, boundaries).map_err(|e| bad(e.to_string()))
    }

    fn build_sets(&self, dim: Dim) -> Result<Vec<MeasurementSet>, ConfigError> {
        let d = dim.d();
        self.sets
            .iter()
            .map(|s| {
                let obs = &s.observable;
                if obs.a >= d || obs.b >= d {
                    return Err(bad(format!(
                        "observable index ({}, {}) out of range for d = {d}",
                        obs.a, obs.b
                    )));
                }
                let set = MeasurementSet {
                    observable: ObservableSpec { coeff: obs.coeff.value(), m: obs.a, n: obs.b },
                    rho: InitialStateSpec {
                        trace_term_included: s.include_trace_term,
                        coeff: s.rho.coeff.value(),
                        p0: s.rho.a,
                        q0: s.rho.b,
                    },
                };
                set.rho.validate(d).map_err(|e| bad(e.to_string()))?;
                Ok(set)
            })
            .collect()
    }

    fn build_truth(
        &self,
        scenario: ScenarioKind,
        t: &TruthConfig,
    ) -> Result<ScenarioSpectra, ConfigError> {
        let parities = scenario.parities();
        let mut comps = t.components.clone();
        if comps.len() == parities.len() - 1 {
            // The trailing odd component never enters the reconstruction;
            // allow omitting it.
            comps.push(ShapeConfig::Zero);
        }
        if comps.len() != parities.len() {
            return Err(bad(format!(
                "truth needs {} components for {scenario:?} (or {} with the odd one implied), got {}",
                parities.len(),
                parities.len() - 1,
                t.components.len()
            )));
        }
        let spectra = comps
            .iter()
            .zip(parities)
            .map(|(c, p)| RealSpectrum { shape: c.to_shape(), parity: *p })
            .collect();
        ScenarioSpectra::new(scenario, spectra).map_err(|e| bad(e.to_string()))
    }
}

fn parse_frac(s: &str) -> Result<Frac, ConfigError> {
    let make = |num: u64, den: u64| Frac::new(num, den).map_err(|e| bad(e.to_string()));
    if let Some((num, den)) = s.split_once('/') {
        let num = num.trim().parse::<u64>().map_err(|_| bad(format!("bad fraction {s:?}")))?;
        let den = den.trim().parse::<u64>().map_err(|_| bad(format!("bad fraction {s:?}")))?;
        make(num, den)
    } else {
        let v = s.trim().parse::<u64>().map_err(|_| bad(format!("bad fraction {s:?}")))?;
        make(v, 1)
    }
}

/// Chained random sequence of d pulses (i_k, j_k) with j_k = i_{k+1} and the
/// closure j_{d-1} = i_0, at equally spaced instants; deterministic in the
/// seed (xorshift* generator).
fn random_sequence(dim: Dim, seed: u64) -> Result<ReferencePulseSequence, String> {
    let d = dim.d();
    let mut state = seed.wrapping_mul(0x2545f4914f6cdd1d) | 1;
    let mut next = move |bound: usize| {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state.wrapping_mul(0x2545f4914f6cdd1d) >> 33) as usize % bound
    };
    // A random cyclic visiting order gives a chained, closed sequence.
    let mut levels: Vec<usize> = (0..d).collect();
    for k in (1..d).rev() {
        levels.swap(k, next(k + 1));
    }
    let pulses: Vec<ResonantPulse> = (0..d)
        .map(|k| ResonantPulse { i: levels[k], j: levels[(k + 1) % d] })
        .collect();
    let boundaries = (0..d as u64)
        .map(|i| Frac::new(i, d as u64).expect("valid fraction"))
        .collect();
    ReferencePulseSequence::new(dim, pulses, boundaries).map_err(|e| e.to_string())
}
