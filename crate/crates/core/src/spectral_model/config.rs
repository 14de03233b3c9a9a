//! JSON problem and target files.
//!
//! ```json
//! {
//!   "alpha": 1.5, "omega": 1.0, "N": 16, "T": 1.0, "r": 0.1,
//!   "impulses": [{"t": 0.5, "kind": "reset", "scale": 1.0}],
//!   "nonlocal": [{"c": 0.2, "tau": 0.3}],
//!   "phi": {"kind": "parabola", "params": {"amplitude": 1.0}},
//!   "f": {"kind": "relaxation",
//!         "params": {"f1": "sin", "a": 0.2, "f2": "sin", "b": 0.2, "kernel_rate": 1.0},
//!         "p": 0.25},
//!   "B": {"kind": "identity"}
//! }
//! ```
//!
//! Impulse kinds: `reset` (`I(x) = -scale x`, scale defaults to 1),
//! `linear` (`I(x) = scale x`), `zero`. History kinds: `zero`,
//! `constant {coeffs}`, `affine {offset, slope}` (`phi(s) = offset + s slope`),
//! `parabola {amplitude}` (`amplitude y (pi - y)`), `mode {n, amplitude}`.
//! Nonlinearity kinds: `zero`, `linear {a}`, `relaxation {f1, a, f2, b,
//! kernel_rate}` with `f1`, `f2` one of `none`, `linear`, `sin`; optional
//! `L1`, `L2`, `M1` override the derived constants. Input kinds: `identity`,
//! `zero`, `scaled {scale}`, `diagonal {diag}`, `matrix {rows}`.
//! Unknown keys are rejected everywhere.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::scalar::Real;

use super::{
    HistoryFunction, Impulse, ImpulseMap, Nonlinearity, NonlocalTerm, PointwiseMap, ProblemParams,
    ProblemSpec, SpectralVector,
};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImpulseEntry {
    pub t: f64,
    #[serde(default = "default_impulse_kind")]
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
}

fn default_impulse_kind() -> String {
    "reset".into()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NonlocalEntry {
    pub c: f64,
    pub tau: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KindEntry {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub params: Value,
}

impl KindEntry {
    fn named(kind: &str) -> Self {
        Self {
            kind: kind.into(),
            params: Value::Null,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NonlinearityEntry {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub params: Value,
    #[serde(rename = "L1", default, skip_serializing_if = "Option::is_none")]
    pub l1: Option<f64>,
    #[serde(rename = "L2", default, skip_serializing_if = "Option::is_none")]
    pub l2: Option<f64>,
    #[serde(rename = "M1", default, skip_serializing_if = "Option::is_none")]
    pub m1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
}

/// Parsed problem file, kept for manifests.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub alpha: f64,
    #[serde(default)]
    pub omega: f64,
    #[serde(rename = "N")]
    pub modes: usize,
    #[serde(rename = "T")]
    pub horizon: f64,
    #[serde(default)]
    pub r: f64,
    #[serde(default)]
    pub impulses: Vec<ImpulseEntry>,
    #[serde(default)]
    pub nonlocal: Vec<NonlocalEntry>,
    #[serde(default = "zero_phi")]
    pub phi: KindEntry,
    #[serde(default = "zero_f")]
    pub f: NonlinearityEntry,
    #[serde(rename = "B", default = "identity_input")]
    pub input: KindEntry,
}

fn zero_phi() -> KindEntry {
    KindEntry::named("zero")
}

fn identity_input() -> KindEntry {
    KindEntry::named("identity")
}

fn zero_f() -> NonlinearityEntry {
    NonlinearityEntry {
        kind: "zero".into(),
        params: Value::Null,
        l1: None,
        l2: None,
        m1: None,
        p: None,
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NoParams {}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CoeffParams {
    coeffs: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AffineParams {
    offset: Vec<f64>,
    slope: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AmplitudeParams {
    amplitude: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModeParams {
    n: usize,
    amplitude: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LinearParams {
    a: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RelaxationParams {
    f1: PointwiseName,
    a: f64,
    f2: PointwiseName,
    b: f64,
    #[serde(default = "unit_rate")]
    kernel_rate: f64,
}

fn unit_rate() -> f64 {
    1.0
}

#[derive(Deserialize, Clone, Copy)]
#[serde(rename_all = "snake_case")]
enum PointwiseName {
    None,
    Linear,
    Sin,
}

impl From<PointwiseName> for PointwiseMap {
    fn from(n: PointwiseName) -> Self {
        match n {
            PointwiseName::None => PointwiseMap::None,
            PointwiseName::Linear => PointwiseMap::Linear,
            PointwiseName::Sin => PointwiseMap::Sin,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScaleParams {
    scale: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DiagParams {
    diag: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixParams {
    rows: Vec<Vec<f64>>,
}

fn params<P: DeserializeOwned>(what: &str, kind: &str, value: &Value) -> Result<P> {
    let value = if value.is_null() {
        Value::Object(Default::default())
    } else {
        value.clone()
    };
    serde_json::from_value(value)
        .map_err(|e| Error::Config(format!("{what} kind '{kind}': {e}")))
}

fn vector<T: Real>(what: &str, coeffs: &[f64], modes: usize) -> Result<SpectralVector<T>> {
    if coeffs.len() != modes {
        return Err(Error::Config(format!(
            "{what} has {} coefficients, expected {modes}",
            coeffs.len()
        )));
    }
    Ok(SpectralVector::new(coeffs.iter().map(|&c| T::lit(c)).collect()))
}

/// Sine coefficients of `amplitude * y (pi - y)`: `8 / (sqrt(2 pi) n^3)` for odd `n`.
fn parabola_coeffs<T: Real>(modes: usize, amplitude: T) -> SpectralVector<T> {
    let norm = (T::lit(2.0) / T::PI()).sqrt();
    SpectralVector::new(
        (1..=modes)
            .map(|n| {
                if n % 2 == 1 {
                    amplitude * norm * T::lit(4.0) / T::from_count(n * n * n)
                } else {
                    T::zero()
                }
            })
            .collect(),
    )
}

impl ProblemFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("problem file: {e}")))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&read(path.as_ref())?)
    }

    pub fn to_params<T: Real>(&self) -> Result<ProblemParams<T>> {
        let modes = self.modes;
        let mut p = ProblemParams::new(T::lit(self.alpha), T::lit(self.omega), modes, T::lit(self.horizon));
        p.delay = T::lit(self.r);

        p.impulses = self
            .impulses
            .iter()
            .map(|e| {
                let map = match e.kind.as_str() {
                    "reset" => ImpulseMap::Linear(-T::lit(e.scale.unwrap_or(1.0))),
                    "linear" => ImpulseMap::Linear(T::lit(e.scale.ok_or_else(|| {
                        Error::Config("linear impulse needs a scale".into())
                    })?)),
                    "zero" => ImpulseMap::Zero,
                    other => return Err(Error::Config(format!("unknown impulse kind '{other}'"))),
                };
                Ok(Impulse {
                    time: T::lit(e.t),
                    map,
                })
            })
            .collect::<Result<_>>()?;

        p.nonlocal = self
            .nonlocal
            .iter()
            .map(|e| NonlocalTerm {
                weight: T::lit(e.c),
                anchor: T::lit(e.tau),
            })
            .collect();

        let phi = &self.phi;
        p.phi = match phi.kind.as_str() {
            "zero" => {
                params::<NoParams>("phi", "zero", &phi.params)?;
                HistoryFunction::Zero
            }
            "constant" => {
                let c: CoeffParams = params("phi", "constant", &phi.params)?;
                HistoryFunction::Constant(vector("phi", &c.coeffs, modes)?)
            }
            "affine" => {
                let c: AffineParams = params("phi", "affine", &phi.params)?;
                HistoryFunction::Affine {
                    offset: vector("phi offset", &c.offset, modes)?,
                    slope: vector("phi slope", &c.slope, modes)?,
                }
            }
            "parabola" => {
                let c: AmplitudeParams = params("phi", "parabola", &phi.params)?;
                HistoryFunction::Constant(parabola_coeffs(modes, T::lit(c.amplitude)))
            }
            "mode" => {
                let c: ModeParams = params("phi", "mode", &phi.params)?;
                if c.n == 0 || c.n > modes {
                    return Err(Error::Config(format!("phi mode {} outside 1..={modes}", c.n)));
                }
                HistoryFunction::Constant(SpectralVector::mode(modes, c.n, T::lit(c.amplitude)))
            }
            other => return Err(Error::Config(format!("unknown phi kind '{other}'"))),
        };

        let f = &self.f;
        let nonlinearity = match f.kind.as_str() {
            "zero" => {
                params::<NoParams>("f", "zero", &f.params)?;
                Nonlinearity::zero()
            }
            "linear" => {
                let c: LinearParams = params("f", "linear", &f.params)?;
                Nonlinearity::linear(T::lit(c.a))
            }
            "relaxation" => {
                let c: RelaxationParams = params("f", "relaxation", &f.params)?;
                if !(c.kernel_rate >= 0.0) {
                    return Err(Error::Config("kernel_rate must be non-negative".into()));
                }
                Nonlinearity::relaxation(
                    c.f1.into(),
                    T::lit(c.a),
                    c.f2.into(),
                    T::lit(c.b),
                    T::lit(c.kernel_rate),
                )
            }
            other => return Err(Error::Config(format!("unknown f kind '{other}'"))),
        };
        for (name, v) in [("L1", f.l1), ("L2", f.l2), ("M1", f.m1)] {
            if let Some(v) = v {
                if !(v >= 0.0) {
                    return Err(Error::Config(format!("{name} = {v} must be non-negative")));
                }
            }
        }
        let mut nonlinearity =
            nonlinearity.with_constants(f.l1.map(T::lit), f.l2.map(T::lit), f.m1.map(T::lit));
        if let Some(pv) = f.p {
            nonlinearity = nonlinearity.with_holder_p(T::lit(pv));
        }
        p.nonlinearity = nonlinearity;

        let b = &self.input;
        p.input = match b.kind.as_str() {
            "identity" => {
                params::<NoParams>("B", "identity", &b.params)?;
                DenseMatrix::identity(modes)
            }
            "zero" => {
                params::<NoParams>("B", "zero", &b.params)?;
                DenseMatrix::zeros(modes)
            }
            "scaled" => {
                let c: ScaleParams = params("B", "scaled", &b.params)?;
                DenseMatrix::from_diagonal(&vec![T::lit(c.scale); modes])
            }
            "diagonal" => {
                let c: DiagParams = params("B", "diagonal", &b.params)?;
                DenseMatrix::from_diagonal(vector::<T>("B diagonal", &c.diag, modes)?.coeffs())
            }
            "matrix" => {
                let c: MatrixParams = params("B", "matrix", &b.params)?;
                let rows: Vec<Vec<T>> = c
                    .rows
                    .iter()
                    .map(|r| r.iter().map(|&v| T::lit(v)).collect())
                    .collect();
                DenseMatrix::from_rows(&rows)?
            }
            other => return Err(Error::Config(format!("unknown B kind '{other}'"))),
        };
        Ok(p)
    }

    pub fn to_spec<T: Real>(&self) -> Result<ProblemSpec<T>> {
        ProblemSpec::new(self.to_params()?)
    }
}

/// Target state file `{"coeffs": [...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetFile {
    pub coeffs: Vec<f64>,
}

impl TargetFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("target file: {e}")))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&read(path.as_ref())?)
    }

    pub fn to_vector<T: Real>(&self, modes: usize) -> Result<SpectralVector<T>> {
        vector("target", &self.coeffs, modes)
    }
}

pub(crate) fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))
}

/// Loads and validates a problem file.
pub fn load_problem<T: Real>(path: impl AsRef<Path>) -> Result<ProblemSpec<T>> {
    ProblemFile::load(path)?.to_spec()
}
