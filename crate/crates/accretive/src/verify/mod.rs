//! Empirical verification harness: every lemma-level inequality and every
//! rate certificate is run against numerically computed ground truth on a
//! documented sampling grid. Claims are universally quantified; sampling
//! is the falsification strategy, stated honestly in each report.

pub mod axioms;
pub mod certificate;
pub mod quadrature;

pub use axioms::{
    axiom_suite, basic_properties_suite, non_accretive_control, semigroup_law_check,
    space_axiom_suite, SuiteReport,
};
pub use certificate::{
    empirical_threshold, falsified_rate_control, verify_certificate, EmpiricalOutcome,
};

use crate::operator::{OperatorInstance, DEFAULT_RESOLVENT_TOL};
use crate::rates::Direction;
use crate::semigroup::SemigroupEvaluator;
use crate::space::SpaceInstance;
use crate::vector::Vector;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Slack applied to every certified bound: pass iff
/// observed ≤ ε(1+σ) + κ. κ also absorbs the propagated numerical
/// budget (semigroup δ, resolvent tolerance, quadrature error).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Slack {
    pub sigma: f64,
    pub kappa: f64,
}

impl Default for Slack {
    fn default() -> Self {
        Slack {
            sigma: 0.05,
            kappa: 1e-7,
        }
    }
}

impl Slack {
    /// The pass bound for a claim with target ε.
    pub fn bound(&self, eps: f64) -> f64 {
        eps * (1.0 + self.sigma) + self.kappa
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridKind {
    Geometric,
    Uniform,
}

/// Deterministic sampling plan; identical plan + instance yields a
/// bit-identical report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingPlan {
    pub grid: GridKind,
    pub points_per_decade: u32,
    /// Number of decades spanned below an `all_t_below` threshold.
    pub decades: u32,
    /// Absolute floor for sampled t (keeps quotients of increments above
    /// rounding noise); ignored when it would empty the grid.
    pub floor: f64,
    pub seed: u64,
    /// Sample count for the randomized axiom checks.
    pub random_samples: usize,
    /// Explicit range override (lo, hi).
    pub range: Option<(f64, f64)>,
}

impl Default for SamplingPlan {
    fn default() -> Self {
        SamplingPlan {
            grid: GridKind::Geometric,
            points_per_decade: 32,
            decades: 3,
            floor: 1e-12,
            seed: 42,
            random_samples: 10_000,
            range: None,
        }
    }
}

impl SamplingPlan {
    /// Grid over (0, threshold] for `all_t_below` claims.
    pub fn grid_below(&self, threshold: f64) -> crate::Result<Vec<f64>> {
        let (lo, hi) = match self.range {
            Some((lo, hi)) => (lo, hi.min(threshold)),
            None => {
                let hi = threshold;
                let span_lo = hi * 10f64.powi(-(self.decades as i32));
                let floor = self.floor.min(hi / 10.0);
                (span_lo.max(floor), hi)
            }
        };
        self.span(lo, hi)
    }

    /// Grid over [threshold, 64·threshold] for `all_t_above` claims.
    pub fn grid_above(&self, threshold: f64) -> crate::Result<Vec<f64>> {
        let (lo, hi) = match self.range {
            Some((lo, hi)) => (lo.max(threshold), hi),
            None => (threshold, 64.0 * threshold),
        };
        self.span(lo, hi)
    }

    /// Wide probe grid used by the empirical-threshold search.
    pub fn probe_grid(&self, direction: Direction) -> crate::Result<Vec<f64>> {
        let (lo, hi) = match self.range {
            Some(r) => r,
            None => match direction {
                Direction::AllTBelow => (1e-6, 64.0),
                Direction::AllTAbove => (1e-2, 1e12),
            },
        };
        self.span(lo, hi)
    }

    fn span(&self, lo: f64, hi: f64) -> crate::Result<Vec<f64>> {
        if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
            return Err(crate::Error::Config(format!(
                "sampling range [{lo}, {hi}] is empty or invalid"
            )));
        }
        let decades = (hi / lo).log10().max(0.0);
        let count = ((self.points_per_decade as f64 * decades).ceil() as usize).max(1) + 1;
        Ok(match self.grid {
            GridKind::Geometric => (0..count)
                .map(|i| {
                    let frac = i as f64 / (count - 1).max(1) as f64;
                    lo * (hi / lo).powf(frac)
                })
                .collect(),
            GridKind::Uniform => (0..count)
                .map(|i| {
                    let frac = i as f64 / (count - 1).max(1) as f64;
                    lo + (hi - lo) * frac
                })
                .collect(),
        })
    }
}

/// One sampled point of a verification run.
#[derive(Debug, Clone, Serialize)]
pub struct SampleRecord {
    pub t: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    pub observed: f64,
    pub bound: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub marker: Option<String>,
}

impl SampleRecord {
    pub fn new(t: f64, s: Option<f64>, observed: f64, bound: f64) -> Self {
        SampleRecord {
            t,
            s,
            observed,
            bound,
            pass: observed <= bound,
            marker: None,
        }
    }

    pub fn with_marker(mut self, m: impl Into<String>) -> Self {
        self.marker = Some(m.into());
        self
    }
}

/// Result of one verified claim; the aggregate verdict is the
/// conjunction of the per-sample verdicts.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub claim: String,
    pub instance: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub direction: Option<Direction>,
    pub slack: Slack,
    pub seed: u64,
    pub samples: Vec<SampleRecord>,
    pub pass: bool,
    /// Whether this run is supposed to fail (deliberately unsound input).
    pub negative_control: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conservativeness_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn from_samples(
        claim: impl Into<String>,
        instance: impl Into<String>,
        slack: Slack,
        seed: u64,
        samples: Vec<SampleRecord>,
    ) -> Self {
        let pass = samples.iter().all(|s| s.pass);
        VerificationReport {
            claim: claim.into(),
            instance: instance.into(),
            epsilon: None,
            threshold: None,
            direction: None,
            slack,
            seed,
            samples,
            pass,
            negative_control: false,
            conservativeness_ratio: None,
            notes: Vec::new(),
        }
    }

    pub fn worst_margin(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.observed - s.bound)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn csv_header() -> &'static str {
        "claim,instance,epsilon,threshold,samples,failures,worst_margin,pass,negative_control"
    }

    pub fn csv_row(&self) -> String {
        let failures = self.samples.iter().filter(|s| !s.pass).count();
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.claim,
            self.instance,
            self.epsilon.map(|e| e.to_string()).unwrap_or_default(),
            self.threshold.map(|t| t.to_string()).unwrap_or_default(),
            self.samples.len(),
            failures,
            if self.samples.is_empty() {
                String::new()
            } else {
                format!("{:e}", self.worst_margin())
            },
            self.pass,
            self.negative_control,
        )
    }
}

/// A concrete experiment: space + operator + starting point.
#[derive(Clone)]
pub struct Instance {
    pub space: Arc<SpaceInstance>,
    pub op: Arc<OperatorInstance>,
    pub x0: Vector,
}

impl Instance {
    pub fn new(
        space: Arc<SpaceInstance>,
        op: Arc<OperatorInstance>,
        x0: Vector,
    ) -> crate::Result<Self> {
        x0.check_dim(space.dim())?;
        if op.dim() != space.dim() {
            return Err(crate::Error::DimensionMismatch {
                expected: space.dim(),
                got: op.dim(),
            });
        }
        Ok(Instance { space, op, x0 })
    }

    pub fn descriptor(&self) -> String {
        format!("{}/{}", self.space.descriptor(), self.op.descriptor())
    }

    pub fn evaluator(&self) -> SemigroupEvaluator<'_> {
        SemigroupEvaluator::new(&self.space, &self.op, DEFAULT_RESOLVENT_TOL)
    }

    /// Smallest admissible integer bound b ≥ max{‖x0‖, ‖A(x0)‖}.
    pub fn b_bound(&self) -> crate::Result<u32> {
        let v = self.op.apply(&self.x0)?;
        let m = self.space.norm(&self.x0)?.max(self.space.norm(&v)?);
        Ok((m.ceil() as u32).max(1))
    }

    /// Smallest integer n dominating the domain-witness norms.
    pub fn n_bound(&self) -> crate::Result<u32> {
        let (c, dc) = self.op.domain_witness()?;
        let m = self.space.norm(&c)?.max(self.space.norm(&dc)?);
        Ok((m.ceil() as u32).max(1))
    }
}

impl std::fmt::Debug for Instance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Instance({})", self.descriptor())
    }
}

/// Exit-code policy: every regular claim passes and every negative
/// control fails.
pub fn all_reports_ok(reports: &[VerificationReport]) -> bool {
    reports
        .iter()
        .all(|r| if r.negative_control { !r.pass } else { r.pass })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_below_spans_decades_and_ends_at_threshold() {
        let plan = SamplingPlan::default();
        let grid = plan.grid_below(1.0).unwrap();
        assert_eq!(*grid.last().unwrap(), 1.0);
        assert!(grid[0] >= 1e-3 * 0.999 && grid[0] <= 1e-3 * 1.001);
        assert!(grid.windows(2).all(|w| w[0] < w[1]));
        // 32 pts/decade over 3 decades
        assert_eq!(grid.len(), 97);
    }

    #[test]
    fn grid_below_respects_absolute_floor() {
        let plan = SamplingPlan::default();
        // threshold so small that the floor would empty the grid: the
        // floor backs off to threshold/10
        let grid = plan.grid_below(1e-20).unwrap();
        assert!(grid[0] >= 1e-23);
        assert_eq!(*grid.last().unwrap(), 1e-20);
        // moderate threshold: the absolute floor wins over decades
        let grid = plan.grid_below(1e-11).unwrap();
        assert!(grid[0] >= 1e-12 * 0.999);
    }

    #[test]
    fn grid_above_spans_64x() {
        let plan = SamplingPlan::default();
        let grid = plan.grid_above(10.0).unwrap();
        assert_eq!(grid[0], 10.0);
        assert!((grid.last().unwrap() - 640.0).abs() < 1e-9);
    }

    #[test]
    fn uniform_grid_kind() {
        let plan = SamplingPlan {
            grid: GridKind::Uniform,
            points_per_decade: 4,
            ..SamplingPlan::default()
        };
        let grid = plan.grid_above(1.0).unwrap();
        let step = grid[1] - grid[0];
        assert!(grid
            .windows(2)
            .all(|w| (w[1] - w[0] - step).abs() < 1e-9 * step));
    }

    #[test]
    fn empty_range_is_an_error() {
        let plan = SamplingPlan {
            range: Some((5.0, 2.0)),
            ..SamplingPlan::default()
        };
        assert!(plan.grid_below(1.0).is_err());
        let neg = SamplingPlan {
            range: Some((-1.0, 2.0)),
            ..SamplingPlan::default()
        };
        assert!(neg.grid_below(1.0).is_err());
        // grid_above clamps the lower end up to the threshold instead
        assert!(neg.grid_above(1.0).is_ok());
    }

    #[test]
    fn report_aggregation_and_exit_policy() {
        let slack = Slack::default();
        let good = VerificationReport::from_samples(
            "a",
            "i",
            slack,
            0,
            vec![SampleRecord::new(1.0, None, 0.0, 1.0)],
        );
        let mut bad = VerificationReport::from_samples(
            "b",
            "i",
            slack,
            0,
            vec![
                SampleRecord::new(1.0, None, 0.0, 1.0),
                SampleRecord::new(2.0, None, 2.0, 1.0),
            ],
        );
        assert!(good.pass);
        assert!(!bad.pass);
        assert_eq!(bad.worst_margin(), 1.0);
        assert!(!all_reports_ok(&[good.clone(), bad.clone()]));
        bad.negative_control = true;
        assert!(all_reports_ok(&[good, bad.clone()]));
        // a negative control that passes is itself a failure
        bad.pass = true;
        assert!(!all_reports_ok(&[bad]));
    }

    #[test]
    fn slack_bound_formula() {
        let s = Slack::default();
        assert!((s.bound(0.1) - (0.1 * 1.05 + 1e-7)).abs() < 1e-18);
    }
}
