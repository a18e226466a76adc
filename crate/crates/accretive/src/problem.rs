//! Declarative experiment descriptions: a JSON file names the space, the
//! operator, the starting point and the rate/sampling parameters.
//! Unknown fields are rejected — certificates are soundness-sensitive
//! and a typo silently falling back to a default would be dangerous.

use crate::error::{Error, Result};
use crate::operator::{OperatorInstance, ScalarFn};
use crate::space::SpaceInstance;
use crate::vector::Vector;
use crate::verify::{GridKind, Instance, SamplingPlan, Slack};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::path::Path;
use std::sync::Arc;

pub const SPEC_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "norm", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpaceDescriptor {
    Euclidean,
    Lp { p: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum FnDescriptor {
    Power { exp: f64 },
    Linear { slope: f64 },
    Exp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OperatorDescriptor {
    LinearPsd { matrix: Vec<Vec<f64>>, q: Vec<f64> },
    Diagonal { fns: Vec<FnDescriptor> },
    Constant { q: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RateParamsSpec {
    pub b: Option<u32>,
    pub n: Option<u32>,
    pub e_bound: Option<u32>,
    pub d_lower: Option<f64>,
    /// Raise an undersized b to the instance minimum instead of erroring.
    pub auto_raise_b: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SamplingSpec {
    pub grid: GridKind,
    pub points_per_decade: u32,
    pub decades: u32,
    pub floor: f64,
    pub seed: u64,
    pub random_samples: usize,
    pub range: Option<(f64, f64)>,
}

impl Default for SamplingSpec {
    fn default() -> Self {
        let p = SamplingPlan::default();
        SamplingSpec {
            grid: p.grid,
            points_per_decade: p.points_per_decade,
            decades: p.decades,
            floor: p.floor,
            seed: p.seed,
            random_samples: p.random_samples,
            range: p.range,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SlackSpec {
    pub sigma: f64,
    pub kappa: f64,
}

impl Default for SlackSpec {
    fn default() -> Self {
        let s = Slack::default();
        SlackSpec {
            sigma: s.sigma,
            kappa: s.kappa,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSpec {
    pub dir: Option<String>,
}

/// The on-disk experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub version: u32,
    pub space: SpaceDescriptor,
    pub operator: OperatorDescriptor,
    pub x0: Vec<f64>,
    #[serde(default)]
    pub rates: RateParamsSpec,
    #[serde(default)]
    pub sampling: SamplingSpec,
    #[serde(default)]
    pub slack: SlackSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

impl ProblemSpec {
    pub fn from_json(s: &str) -> Result<Self> {
        let spec: ProblemSpec =
            serde_json::from_str(s).map_err(|e| Error::Config(format!("spec parse error: {e}")))?;
        if spec.version != SPEC_VERSION {
            return Err(Error::Config(format!(
                "unsupported spec version {} (expected {SPEC_VERSION})",
                spec.version
            )));
        }
        Ok(spec)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    /// Instantiate and validate the experiment.
    pub fn build(&self) -> Result<Problem> {
        let dim = self.x0.len();
        let space = Arc::new(match self.space {
            SpaceDescriptor::Euclidean => SpaceInstance::euclidean(dim)?,
            SpaceDescriptor::Lp { p } => SpaceInstance::lp(dim, p)?,
        });
        let op = Arc::new(match &self.operator {
            OperatorDescriptor::Constant { q } => {
                OperatorInstance::constant(Vector::new(q.clone())?)
            }
            OperatorDescriptor::Diagonal { fns } => {
                let fns: Result<Vec<ScalarFn>> = fns
                    .iter()
                    .map(|f| match *f {
                        FnDescriptor::Power { exp } => ScalarFn::power(exp),
                        FnDescriptor::Linear { slope } => Ok(ScalarFn::Linear { slope }),
                        FnDescriptor::Exp => Ok(ScalarFn::Exp),
                    })
                    .collect();
                OperatorInstance::diagonal(fns?)?
            }
            OperatorDescriptor::LinearPsd { matrix, q } => {
                let rows = matrix.len();
                if rows != dim || matrix.iter().any(|r| r.len() != dim) {
                    return Err(Error::Config(format!(
                        "matrix must be {dim}x{dim} to match x0"
                    )));
                }
                let flat: Vec<f64> = matrix.iter().flatten().copied().collect();
                OperatorInstance::linear_psd(
                    DMatrix::from_row_slice(dim, dim, &flat),
                    Vector::new(q.clone())?,
                )?
            }
        });
        let instance = Instance::new(space, op, Vector::new(self.x0.clone())?)?;

        let b_min = instance.b_bound()?;
        let b = match self.rates.b {
            None => b_min,
            Some(b) if b >= b_min => b,
            Some(b) if self.rates.auto_raise_b => {
                let _ = b;
                b_min
            }
            Some(b) => {
                return Err(Error::Config(format!(
                    "b = {b} is below the instance minimum {b_min}; set auto_raise_b or raise it"
                )))
            }
        };
        let n = match self.rates.n {
            None => instance.n_bound()?,
            Some(n) => n.max(instance.n_bound()?),
        };

        let plan = SamplingPlan {
            grid: self.sampling.grid,
            points_per_decade: self.sampling.points_per_decade,
            decades: self.sampling.decades,
            floor: self.sampling.floor,
            seed: self.sampling.seed,
            random_samples: self.sampling.random_samples,
            range: self.sampling.range,
        };
        let slack = Slack {
            sigma: self.slack.sigma,
            kappa: self.slack.kappa,
        };
        Ok(Problem {
            instance,
            b,
            n,
            e_bound: self.rates.e_bound,
            d_lower: self.rates.d_lower,
            plan,
            slack,
            spec: self.clone(),
        })
    }
}

/// A validated, instantiated experiment.
#[derive(Debug, Clone)]
pub struct Problem {
    pub instance: Instance,
    pub b: u32,
    pub n: u32,
    pub e_bound: Option<u32>,
    pub d_lower: Option<f64>,
    pub plan: SamplingPlan,
    pub slack: Slack,
    pub spec: ProblemSpec,
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"{
        "version": 1,
        "space": {"norm": "lp", "p": 3.0},
        "operator": {"kind": "diagonal", "fns": [{"type": "power", "exp": 3}, {"type": "exp"}]},
        "x0": [0.5, -0.25],
        "rates": {"b": 4},
        "sampling": {"seed": 7}
    }"#;

    #[test]
    fn parses_and_builds() {
        let spec = ProblemSpec::from_json(EXAMPLE).unwrap();
        let problem = spec.build().unwrap();
        assert_eq!(problem.b, 4);
        assert_eq!(problem.plan.seed, 7);
        assert_eq!(problem.instance.space.dim(), 2);
    }

    #[test]
    fn round_trip() {
        let spec = ProblemSpec::from_json(EXAMPLE).unwrap();
        let again = ProblemSpec::from_json(&spec.to_json()).unwrap();
        assert_eq!(spec, again);
    }

    #[test]
    fn rejects_unknown_fields() {
        let bad = r#"{
            "version": 1,
            "space": {"norm": "euclidean"},
            "operator": {"kind": "constant", "q": [1.0]},
            "x0": [0.0],
            "not_a_field": true
        }"#;
        assert!(ProblemSpec::from_json(bad).is_err());
    }

    #[test]
    fn rejects_wrong_version() {
        let bad = r#"{
            "version": 2,
            "space": {"norm": "euclidean"},
            "operator": {"kind": "constant", "q": [1.0]},
            "x0": [0.0]
        }"#;
        assert!(ProblemSpec::from_json(bad).is_err());
    }

    #[test]
    fn undersized_b_requires_auto_raise() {
        let bad = r#"{
            "version": 1,
            "space": {"norm": "euclidean"},
            "operator": {"kind": "constant", "q": [5.0]},
            "x0": [0.0],
            "rates": {"b": 1}
        }"#;
        assert!(ProblemSpec::from_json(bad).unwrap().build().is_err());
        let ok = bad.replace("\"b\": 1", "\"b\": 1, \"auto_raise_b\": true");
        let p = ProblemSpec::from_json(&ok).unwrap().build().unwrap();
        assert_eq!(p.b, 5);
    }

    #[test]
    fn rejects_nonsquare_matrix() {
        let bad = r#"{
            "version": 1,
            "space": {"norm": "euclidean"},
            "operator": {"kind": "linear_psd", "matrix": [[1.0, 0.0]], "q": [0.0, 0.0]},
            "x0": [0.0, 0.0]
        }"#;
        assert!(ProblemSpec::from_json(bad).unwrap().build().is_err());
    }
}
