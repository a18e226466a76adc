//! Rate-of-convergence calculators for the resolvent/semigroup
//! asymptotics, producing [`RateCertificate`]s: explicit thresholds t*
//! such that a quantified inequality holds for every t on the certified
//! side of t*.

pub mod plant;
pub mod reich;

use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// A one-argument modulus (e.g. the modulus of uniform convexity η or a
/// range-infimum witness bound f), carried with a short description so
/// certificates can snapshot their provenance.
#[derive(Clone)]
pub struct Modulus1 {
    desc: String,
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl Modulus1 {
    pub fn new(desc: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            desc: desc.into(),
            f: Arc::new(f),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    pub fn desc(&self) -> &str {
        &self.desc
    }
}

impl std::fmt::Debug for Modulus1 {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(fm, "Modulus1({})", self.desc)
    }
}

/// A two-argument modulus (the semi-inner continuity modulus ω(b,ε) or
/// the |A·| modulus φ(ε,b)).
#[derive(Clone)]
pub struct Modulus2 {
    desc: String,
    f: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
}

impl Modulus2 {
    pub fn new(
        desc: impl Into<String>,
        f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            desc: desc.into(),
            f: Arc::new(f),
        }
    }

    pub fn eval(&self, a: f64, b: f64) -> f64 {
        (self.f)(a, b)
    }

    pub fn desc(&self) -> &str {
        &self.desc
    }
}

impl std::fmt::Debug for Modulus2 {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(fm, "Modulus2({})", self.desc)
    }
}

/// Which side of the threshold the claim quantifies over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// The inequality holds for all t ∈ (0, threshold].
    AllTBelow,
    /// The inequality holds for all t ≥ threshold.
    AllTAbove,
}

/// The quantified inequality a certificate refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClaimKind {
    /// |Ax| − ‖x − J_t x‖/t ≤ ε
    ResolventRoc,
    /// ⟨(S(t)x−x)/t, j(x−x₀)⟩ ≤ ⟨y₀, x₀−x⟩_s + ε
    Miyadera,
    /// |Ax| − ‖x − S(t)x‖/t ≤ ε
    SemigroupRoc,
    /// ‖A_t x − A_s x‖ ≤ ε for s ∈ (0, t)
    ResCauchy,
    /// ‖A_t x − (x − S(s)x)/s‖ ≤ ε for s/t ≤ t*
    ResSemiComb,
    /// ‖J_t x − S(t)x‖/t ≤ ε as t → 0
    PlantMain,
    /// |‖J_t x‖/t − d| ≤ ε as t → ∞
    ReichPhiInf,
    /// ‖J_t x‖ ≥ K for t ≥ t*
    ReichEscape,
    /// ‖J_s x/s − J_t x/t‖ ≤ ε for s,t ≥ t*
    ReichResCauchy,
    /// ‖J_t x − S(t)x‖/t ≤ ε as t → ∞
    ReichMain,
}

impl ClaimKind {
    pub fn id(&self) -> &'static str {
        match self {
            ClaimKind::ResolventRoc => "resolvent_roc",
            ClaimKind::Miyadera => "miyadera",
            ClaimKind::SemigroupRoc => "semigroup_roc",
            ClaimKind::ResCauchy => "res_cauchy",
            ClaimKind::ResSemiComb => "res_semi_comb",
            ClaimKind::PlantMain => "plant_main",
            ClaimKind::ReichPhiInf => "reich_phi_inf",
            ClaimKind::ReichEscape => "reich_escape",
            ClaimKind::ReichResCauchy => "reich_res_cauchy",
            ClaimKind::ReichMain => "reich_main",
        }
    }
}

/// Serializable snapshot of the parameters a certificate was computed
/// from; verification refuses instances that contradict it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSnapshot {
    pub family: String,
    pub b: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_lb: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e_bound: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_lower: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_inf: Option<f64>,
    pub eta: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f_witness: Option<String>,
    /// True when any backing modulus is the sampled (non-certified) one.
    pub empirical_modulus: bool,
}

/// Output of every rate calculator.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RateCertificate {
    pub epsilon: f64,
    pub threshold: f64,
    pub direction: Direction,
    pub claim: ClaimKind,
    pub params: ParamSnapshot,
}

impl RateCertificate {
    pub(crate) fn checked(
        epsilon: f64,
        threshold: f64,
        direction: Direction,
        claim: ClaimKind,
        params: ParamSnapshot,
    ) -> crate::Result<Self> {
        if !(threshold.is_finite() && threshold > 0.0) {
            return Err(crate::Error::OutOfRange(format!(
                "certificate threshold must be positive and finite, got {threshold}"
            )));
        }
        Ok(Self {
            epsilon,
            threshold,
            direction,
            claim,
            params,
        })
    }
}
