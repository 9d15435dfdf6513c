//! JSON problem configuration.
//!
//! ```json
//! {
//!   "domain": { "torus": { "dim": 1, "resolution": 32, "side": 1.0 } },
//!   "epsilon": 1.0,
//!   "omega": "identity",
//!   "density": { "expression": "1 + 0.1*cos(2*pi*x1)" },
//!   "solver": { "tol": 1e-10, "max_iter": 100, "stencil_k": 1 }
//! }
//! ```
//!
//! Ball domains use `{"ball": {"dim", "resolution", "radius", "margin"}}`. Scalar
//! fields (`density`, `boundary`, `obstacle`) accept a number, an expression string,
//! `{"constant": c}`, `{"expression": "..."}` or `{"file": "grid.csv"}`; file paths
//! are relative to the config file. `omega` is `"identity"`, `"zero"`,
//! `{"constant": {"re": [[..]], "im": [[..]]}}` or the same with expression strings
//! under `"expression"`. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solver::SolveMethod;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum DomainConfig {
    Torus {
        dim: usize,
        resolution: usize,
        #[serde(default = "one")]
        side: f64,
    },
    Ball {
        dim: usize,
        resolution: usize,
        #[serde(default = "one")]
        radius: f64,
        #[serde(default = "one_usize")]
        margin: usize,
    },
}

fn one() -> f64 {
    1.0
}

fn one_usize() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixConfig<T> {
    pub re: Vec<Vec<T>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<T>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum OmegaConfig {
    #[default]
    Identity,
    Zero,
    Constant(MatrixConfig<f64>),
    Expression(MatrixConfig<String>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum TaggedField {
    Constant(f64),
    Expression(String),
    File(PathBuf),
}

/// A scalar field given as a number, an expression string or a tagged object.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FieldConfig {
    Number(f64),
    Text(String),
    Tagged(TaggedField),
}

impl FieldConfig {
    pub fn tagged(&self) -> TaggedField {
        match self {
            FieldConfig::Number(c) => TaggedField::Constant(*c),
            FieldConfig::Text(s) => TaggedField::Expression(s.clone()),
            FieldConfig::Tagged(t) => t.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodConfig {
    Policy,
    Explicit,
}

impl From<&MethodConfig> for SolveMethod {
    fn from(m: &MethodConfig) -> Self {
        match m {
            MethodConfig::Policy => SolveMethod::Policy,
            MethodConfig::Explicit => SolveMethod::Explicit,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "one_usize")]
    pub stencil_k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<Vec<f64>>,
    #[serde(default = "default_method")]
    pub method: MethodConfig,
}

fn default_tol() -> f64 {
    1e-10
}

fn default_max_iter() -> usize {
    100
}

fn default_method() -> MethodConfig {
    MethodConfig::Policy
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: default_tol(),
            max_iter: default_max_iter(),
            stencil_k: 1,
            schedule: None,
            method: default_method(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub domain: DomainConfig,
    #[serde(default)]
    pub epsilon: f64,
    #[serde(default)]
    pub omega: OmegaConfig,
    pub density: FieldConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<FieldConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub obstacle: Option<FieldConfig>,
    /// Analytic solution used by `converge` and `check`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<String>,
    #[serde(default)]
    pub solver: SolverConfig,
    /// Directory that relative file paths are resolved against; not serialized.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

/// `serde_path_to_error` path as a JSON pointer.
fn pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut s = String::new();
    for seg in path.iter() {
        s.push('/');
        match seg {
            Segment::Seq { index } => s.push_str(&index.to_string()),
            Segment::Map { key } => s.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => s.push_str(variant),
            Segment::Unknown => s.push('?'),
        }
    }
    if s.is_empty() {
        s.push('/');
    }
    s
}

impl ProblemConfig {
    pub fn from_json_str(text: &str, base_dir: &Path) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let mut cfg: ProblemConfig = serde_path_to_error::deserialize(de).map_err(|e| Error::Config {
            pointer: pointer(e.path()),
            msg: e.inner().to_string(),
        })?;
        cfg.base_dir = base_dir.to_path_buf();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_json_str(&text, &base)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    fn validate(&self) -> Result<()> {
        let bad = |pointer: &str, msg: String| Err(Error::Config {
            pointer: pointer.into(),
            msg,
        });
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return bad("/epsilon", format!("must be finite and ≥ 0, got {}", self.epsilon));
        }
        let s = &self.solver;
        if !(s.tol > 0.0) {
            return bad("/solver/tol", format!("must be positive, got {}", s.tol));
        }
        if s.stencil_k == 0 {
            return bad("/solver/stencil_k", "must be ≥ 1".into());
        }
        if let Some(sched) = &s.schedule {
            if sched.is_empty() || sched.iter().any(|&e| !(e > 0.0)) || sched.windows(2).any(|w| w[1] >= w[0]) {
                return bad("/solver/schedule", "must be positive and strictly decreasing".into());
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        match self.domain {
            DomainConfig::Torus { dim, .. } | DomainConfig::Ball { dim, .. } => dim,
        }
    }

    /// Same config at another resolution.
    pub fn with_resolution(&self, res: usize) -> Self {
        let mut c = self.clone();
        match &mut c.domain {
            DomainConfig::Torus { resolution, .. } | DomainConfig::Ball { resolution, .. } => *resolution = res,
        }
        c
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }
}
