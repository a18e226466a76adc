//! Small-time rate certificates: explicit thresholds under which the
//! Yosida approximates are Cauchy, track the semigroup difference
//! quotient, and finally satisfy ‖J_t x − S(t)x‖/t ≤ ε on (0, Φ].
//!
//! Parameters: b bounds ‖x‖ and ‖v‖ for the witness v ∈ Ax; n bounds the
//! norms of the fixed domain witness (and λ0 when finite); η is the
//! modulus of uniform convexity, ω the semi-inner continuity modulus,
//! φ the continuity modulus of |A·|. When the range-condition bound λ0
//! is unbounded every min{·, λ0/2} comparand drops out (the limit of the
//! formula as λ0 → ∞).

use super::{ClaimKind, Direction, Modulus1, Modulus2, ParamSnapshot, RateCertificate};
use crate::error::{Error, Result};
use crate::operator::OperatorInstance;
use crate::space::SpaceInstance;
use std::sync::Arc;

#[derive(Debug, Clone)]
pub struct PlantParams {
    pub b: u32,
    pub n: u32,
    pub lambda0: Option<f64>,
    /// Lower bound c ≤ |Ax| for the unsmoothed variants.
    pub c_lb: Option<f64>,
    pub eta: Modulus1,
    pub omega: Modulus2,
    pub phi: Modulus2,
    empirical_modulus: bool,
}

impl PlantParams {
    /// Wire the moduli from a concrete space/operator pair.
    pub fn for_instance(
        space: &Arc<SpaceInstance>,
        op: &Arc<OperatorInstance>,
        b: u32,
        n: u32,
    ) -> Result<Self> {
        if b == 0 || n == 0 {
            return Err(Error::OutOfRange("b and n must be >= 1".into()));
        }
        if let Some(l0) = op.lambda0() {
            if (n as f64) < l0 {
                return Err(Error::OutOfRange(format!(
                    "n = {n} must dominate lambda0 = {l0}"
                )));
            }
        }
        let s_eta = Arc::clone(space);
        let s_omega = Arc::clone(space);
        let op_phi = Arc::clone(op);
        Ok(Self {
            b,
            n,
            lambda0: op.lambda0(),
            c_lb: None,
            eta: Modulus1::new(format!("{}-eta", space.descriptor()), move |e| {
                s_eta.ucx_clamped(e).expect("positive argument")
            }),
            omega: Modulus2::new(format!("{}-omega", space.descriptor()), move |bb, e| {
                s_omega
                    .semi_inner_modulus(bb, e)
                    .expect("positive arguments")
            }),
            phi: Modulus2::new(format!("{}-phi", op.descriptor()), move |e, bb| {
                op_phi.bracket_modulus(e, bb).expect("positive arguments")
            }),
            empirical_modulus: space.omega_is_empirical(),
        })
    }

    /// Construct from explicit moduli (testing / synthetic scenarios).
    pub fn synthetic(
        b: u32,
        n: u32,
        lambda0: Option<f64>,
        eta: Modulus1,
        omega: Modulus2,
        phi: Modulus2,
    ) -> Self {
        Self {
            b,
            n,
            lambda0,
            c_lb: None,
            eta,
            omega,
            phi,
            empirical_modulus: false,
        }
    }

    pub fn with_c_lb(mut self, c: f64) -> Self {
        self.c_lb = Some(c);
        self
    }

    /// b + 2n + 3n² — the norm ceiling for resolvent images J_t x.
    fn norm_arg(&self) -> f64 {
        let n = self.n as f64;
        self.b as f64 + 2.0 * n + 3.0 * n * n
    }

    fn clamp_lambda0(&self, x: f64) -> f64 {
        match self.lambda0 {
            Some(l0) => x.min(l0 / 2.0),
            None => x,
        }
    }

    /// η(min{ε, 2}).
    fn eta_c(&self, eps: f64) -> f64 {
        self.eta.eval(eps.min(2.0))
    }

    pub fn snapshot(&self) -> ParamSnapshot {
        ParamSnapshot {
            family: "plant".into(),
            b: self.b,
            n: Some(self.n),
            lambda0: self.lambda0,
            c_lb: self.c_lb,
            e_bound: None,
            d_lower: None,
            d_inf: None,
            eta: self.eta.desc().into(),
            omega: Some(self.omega.desc().into()),
            phi: Some(self.phi.desc().into()),
            f_witness: None,
            empirical_modulus: self.empirical_modulus,
        }
    }

    fn require_c(&self) -> Result<f64> {
        self.c_lb.filter(|c| *c > 0.0).ok_or_else(|| {
            Error::OutOfRange(
                "unsmoothed variant requires a positive c_lb (lower bound on |Ax|)".into(),
            )
        })
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::OutOfRange(format!(
            "rate argument must be a positive real, got {eps}"
        )));
    }
    Ok(())
}

/// φ₁(ε) = min{φ(ε, b+2n+3n²)/b, λ0/2}: for t ∈ (0, φ₁],
/// |Ax| − ‖x − J_t x‖/t ≤ ε.
pub fn phi1(eps: f64, p: &PlantParams) -> Result<f64> {
    check_eps(eps)?;
    Ok(p.clamp_lambda0(p.phi.eval(eps, p.norm_arg()) / p.b as f64))
}

/// ψ(ε,b,ω) = ω(2b, ε)/(2b): for t ∈ (0, ψ], the directional pairing of
/// (S(t)x − x)/t against j(x − x₀) is ≤ ⟨y₀, x₀ − x⟩_s + ε for graph
/// points (x₀, y₀) with all norms ≤ b.
pub fn psi_miyadera(eps: f64, b: f64, omega: &Modulus2) -> Result<f64> {
    check_eps(eps)?;
    if !(b > 0.0) {
        return Err(Error::OutOfRange(format!("psi requires b > 0, got {b}")));
    }
    Ok(omega.eval(2.0 * b, eps) / (2.0 * b))
}

/// φ₂(ε) = ψ(ε²·min{φ₁(ε/2), λ0/2}/4, b+2n+3n², ω): for t ∈ (0, φ₂],
/// |Ax| − ‖x − S(t)x‖/t ≤ ε.
pub fn phi2(eps: f64, p: &PlantParams) -> Result<f64> {
    check_eps(eps)?;
    let inner = p.clamp_lambda0(phi1(eps / 2.0, p)?);
    psi_miyadera(eps * eps * inner / 4.0, p.norm_arg(), &p.omega)
}

/// Unsmoothed variant assuming |Ax| ≥ c:
/// φ₂′(ε,c) = ψ(ε·c·min{φ₁(min{ε/2, c/2}), λ0/2}/4, b+2n+3n², ω).
pub fn phi2_unsmoothed(eps: f64, p: &PlantParams) -> Result<f64> {
    check_eps(eps)?;
    let c = p.require_c()?;
    let inner = p.clamp_lambda0(phi1((eps / 2.0).min(c / 2.0), p)?);
    psi_miyadera(eps * c * inner / 4.0, p.norm_arg(), &p.omega)
}

/// φ₃(ε) = min{φ₁(ε/3), φ₁(η(min{ε/3b,2})·ε/4), φ₁(ε/4), λ0/2}:
/// for t ∈ (0, φ₃] and s ∈ (0, t), ‖A_t x − A_s x‖ ≤ ε.
pub fn phi3(eps: f64, p: &PlantParams) -> Result<f64> {
    check_eps(eps)?;
    let eta = p.eta_c(eps / (3.0 * p.b as f64));
    let m = phi1(eps / 3.0, p)?
        .min(phi1(eta * eps / 4.0, p)?)
        .min(phi1(eps / 4.0, p)?);
    Ok(p.clamp_lambda0(m))
}

/// Unsmoothed Cauchy threshold assuming |Ax| ≥ c:
/// φ₃′(ε,c) = min{φ₁(ε/3), φ₁(η(min{ε/3b,2})·c/2), φ₁(c/2), λ0/2}.
pub fn phi3_unsmoothed(eps: f64, p: &PlantParams) -> Result<f64> {
    check_eps(eps)?;
    let c = p.require_c()?;
    let eta = p.eta_c(eps / (3.0 * p.b as f64));
    let m = phi1(eps / 3.0, p)?
        .min(phi1(eta * c / 2.0, p)?)
        .min(phi1(c / 2.0, p)?);
    Ok(p.clamp_lambda0(m))
}

/// φ₄(ε) = min{φ₁(ε/3), φ₂(ε/3), φ₁(η(min{ε,2})ε/8), √(φ₂(ε/4)),
/// η(min{ε,2})ε/16b, 1, λ0/2}: for t and s/t in (0, φ₄],
/// ‖A_t x − (x − S(s)x)/s‖ ≤ ε.
pub fn phi4(eps: f64, p: &PlantParams) -> Result<f64> {
    check_eps(eps)?;
    let eta = p.eta_c(eps);
    let m = phi1(eps / 3.0, p)?
        .min(phi2(eps / 3.0, p)?)
        .min(phi1(eta * eps / 8.0, p)?)
        .min(phi2(eps / 4.0, p)?.sqrt())
        .min(eta * eps / (16.0 * p.b as f64))
        .min(1.0);
    Ok(p.clamp_lambda0(m))
}

/// Unsmoothed variant assuming |Ax| ≥ c:
/// φ₄′(ε,c) = min{φ₁(ε/3), φ₂(ε/3), φ₁(η(min{ε,2})c/4), √(φ₂(c/2)),
/// η(min{ε,2})c/8b, 1, λ0/2}.
pub fn phi4_unsmoothed(eps: f64, p: &PlantParams) -> Result<f64> {
    check_eps(eps)?;
    let c = p.require_c()?;
    let eta = p.eta_c(eps);
    let m = phi1(eps / 3.0, p)?
        .min(phi2(eps / 3.0, p)?)
        .min(phi1(eta * c / 4.0, p)?)
        .min(phi2(c / 2.0, p)?.sqrt())
        .min(eta * c / (8.0 * p.b as f64))
        .min(1.0);
    Ok(p.clamp_lambda0(m))
}

/// The combined small-time certificate: Φ = (min{φ₃(ε/2), φ₄(ε/2)})²
/// certifies ‖J_t x − S(t)x‖/t ≤ ε for every t ∈ (0, Φ] and every
/// x ∈ dom A with ‖x‖, ‖A(x)‖ ≤ b.
pub fn plant_rate(eps: f64, p: &PlantParams) -> Result<RateCertificate> {
    check_eps(eps)?;
    let m = phi3(eps / 2.0, p)?.min(phi4(eps / 2.0, p)?);
    RateCertificate::checked(
        eps,
        m * m,
        Direction::AllTBelow,
        ClaimKind::PlantMain,
        p.snapshot(),
    )
}

/// Certificate wrappers for the intermediate claims, so each lemma-level
/// threshold can be fed to the verification harness on its own.
pub fn resolvent_roc_cert(eps: f64, p: &PlantParams) -> Result<RateCertificate> {
    RateCertificate::checked(
        eps,
        phi1(eps, p)?,
        Direction::AllTBelow,
        ClaimKind::ResolventRoc,
        p.snapshot(),
    )
}

pub fn miyadera_cert(eps: f64, p: &PlantParams) -> Result<RateCertificate> {
    RateCertificate::checked(
        eps,
        psi_miyadera(eps, p.b as f64, &p.omega)?,
        Direction::AllTBelow,
        ClaimKind::Miyadera,
        p.snapshot(),
    )
}

pub fn semigroup_roc_cert(eps: f64, p: &PlantParams) -> Result<RateCertificate> {
    RateCertificate::checked(
        eps,
        phi2(eps, p)?,
        Direction::AllTBelow,
        ClaimKind::SemigroupRoc,
        p.snapshot(),
    )
}

pub fn res_cauchy_cert(eps: f64, p: &PlantParams) -> Result<RateCertificate> {
    RateCertificate::checked(
        eps,
        phi3(eps, p)?,
        Direction::AllTBelow,
        ClaimKind::ResCauchy,
        p.snapshot(),
    )
}

pub fn res_semi_comb_cert(eps: f64, p: &PlantParams) -> Result<RateCertificate> {
    RateCertificate::checked(
        eps,
        phi4(eps, p)?,
        Direction::AllTBelow,
        ClaimKind::ResSemiComb,
        p.snapshot(),
    )
}
