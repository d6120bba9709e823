//! JSON spec files: an operator plus analysis settings.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize};

use crate::criteria::{DEFAULT_HORIZON, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::finsec::DEFAULT_SEED;
use crate::operators::OperatorSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub operator: OperatorSpec,
    #[serde(default)]
    pub analysis: Analysis,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Analysis {
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Truncation orders for sweeps, ascending.
    #[serde(default)]
    pub ns: Vec<usize>,
    /// Shifts for sweeps; each is a number or a `[re, im]` pair.
    #[serde(default = "default_lambdas", deserialize_with = "lambdas_from_json")]
    pub lambdas: Vec<Complex64>,
    /// Refuse, rather than assume, hypotheses that are not certified.
    #[serde(default = "default_strict")]
    pub strict: bool,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// `lim n a_n`, for coefficient tables whose limit the kind cannot give.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi: Option<f64>,
}

fn default_horizon() -> usize {
    DEFAULT_HORIZON
}
fn default_tol() -> f64 {
    DEFAULT_TOL
}
fn default_lambdas() -> Vec<Complex64> {
    vec![Complex64::new(0.0, 0.0)]
}
fn default_strict() -> bool {
    true
}
fn default_seed() -> u64 {
    DEFAULT_SEED
}

impl Default for Analysis {
    fn default() -> Self {
        Analysis {
            horizon: DEFAULT_HORIZON,
            tol: DEFAULT_TOL,
            ns: Vec::new(),
            lambdas: default_lambdas(),
            strict: true,
            seed: DEFAULT_SEED,
            chi: None,
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum LambdaInput {
    Real(f64),
    Pair([f64; 2]),
}

fn lambdas_from_json<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Complex64>, D::Error> {
    let raw = Vec::<LambdaInput>::deserialize(d)?;
    Ok(raw
        .into_iter()
        .map(|l| match l {
            LambdaInput::Real(re) => Complex64::new(re, 0.0),
            LambdaInput::Pair([re, im]) => Complex64::new(re, im),
        })
        .collect())
}

impl SpecFile {
    /// Parses and validates; parse errors carry line and column.
    pub fn from_json(text: &str) -> Result<Self> {
        if text.trim().is_empty() {
            return Err(Error::invalid("spec file is empty"));
        }
        let spec: SpecFile = serde_json::from_str(text).map_err(|e| Error::invalid(e.to_string()))?;
        spec.operator.validate()?;
        if spec.analysis.lambdas.iter().any(|l| !(l.re.is_finite() && l.im.is_finite())) {
            return Err(Error::invalid("lambdas must be finite"));
        }
        if !(spec.analysis.tol.is_finite() && spec.analysis.tol > 0.0) {
            return Err(Error::invalid("tol must be positive"));
        }
        Ok(spec)
    }

    /// Canonical pretty JSON with every default written out.
    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec files always serialize")
    }
}
