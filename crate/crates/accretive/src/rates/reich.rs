//! Large-time rate certificates: thresholds beyond which ‖J_t x‖/t has
//! settled at d = d(0, ran A), the normalized resolvents are Cauchy, and
//! finally ‖J_t x − S(t)x‖/t ≤ ε for every t ≥ Φ.
//!
//! All results here assume the full range condition; the parameter
//! constructor refuses operators with a finite λ0.

use super::{ClaimKind, Direction, Modulus1, ParamSnapshot, RateCertificate};
use crate::error::{Error, Result};
use crate::operator::OperatorInstance;
use crate::semigroup::SemigroupEvaluator;
use crate::space::SpaceInstance;
use crate::vector::Vector;
use std::sync::Arc;

#[derive(Debug, Clone)]
pub struct ReichParams {
    pub b: u32,
    pub eta: Modulus1,
    /// Antitone witness-norm bound for the range infimum.
    pub f: Modulus1,
    /// Integer bound E ≥ d.
    pub e_bound: u32,
    /// Optional analytic lower bound 0 < D ≤ d for the unsmoothed variants.
    pub d_lower: Option<f64>,
    /// d(0, ran A) for reporting.
    pub d_inf: f64,
    empirical_modulus: bool,
}

impl ReichParams {
    pub fn for_instance(
        space: &Arc<SpaceInstance>,
        op: &Arc<OperatorInstance>,
        b: u32,
    ) -> Result<Self> {
        if b == 0 {
            return Err(Error::OutOfRange("b must be >= 1".into()));
        }
        if let Some(l0) = op.lambda0() {
            return Err(Error::Unsupported(format!(
                "large-time certificates need the full range condition; operator has lambda0 = {l0}"
            )));
        }
        let range = op.range_data(space)?;
        let s_eta = Arc::clone(space);
        let f_fn = range.f_fn();
        Ok(Self {
            b,
            eta: Modulus1::new(format!("{}-eta", space.descriptor()), move |e| {
                s_eta.ucx_clamped(e).expect("positive argument")
            }),
            f: Modulus1::new(range.f_desc().to_string(), move |e| f_fn(e)),
            e_bound: range.e_bound,
            d_lower: range.d_lower,
            d_inf: range.d_inf,
            empirical_modulus: space.omega_is_empirical(),
        })
    }

    pub fn synthetic(
        b: u32,
        eta: Modulus1,
        f: Modulus1,
        e_bound: u32,
        d_lower: Option<f64>,
    ) -> Self {
        Self {
            b,
            eta,
            f,
            e_bound,
            d_lower,
            d_inf: d_lower.unwrap_or(0.0),
            empirical_modulus: false,
        }
    }

    fn eta_c(&self, eps: f64) -> f64 {
        self.eta.eval(eps.min(2.0))
    }

    pub fn snapshot(&self) -> ParamSnapshot {
        ParamSnapshot {
            family: "reich".into(),
            b: self.b,
            n: None,
            lambda0: None,
            c_lb: None,
            e_bound: Some(self.e_bound),
            d_lower: self.d_lower,
            d_inf: Some(self.d_inf),
            eta: self.eta.desc().into(),
            omega: None,
            phi: None,
            f_witness: Some(self.f.desc().into()),
            empirical_modulus: self.empirical_modulus,
        }
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

/// φ(ε,b,f) = 8(b + f(ε/2))/ε: for t ≥ φ, |‖J_t x‖/t − d| ≤ ε.
pub fn phi_inf(eps: f64, b: f64, f: &Modulus1) -> Result<f64> {
    check_eps(eps)?;
    if !(b > 0.0) {
        return Err(Error::OutOfRange(format!(
            "phi_inf requires b > 0, got {b}"
        )));
    }
    Ok(8.0 * (b + f.eval(eps / 2.0)) / eps)
}

/// ψ(K,b,D) = (b + K)/D: for t ≥ ψ, ‖J_t x‖ ≥ K (needs d ≥ D > 0).
pub fn psi_escape(k_target: f64, b: f64, d_lower: f64) -> Result<f64> {
    if !(d_lower > 0.0) {
        return Err(Error::OutOfRange(format!(
            "escape rate needs a positive lower bound on d, got {d_lower}"
        )));
    }
    Ok((b + k_target) / d_lower)
}

/// φ₁(ε,b,D,c,η,f) = max{ψ(c+1,b,D), ψ((4/ε+1)c,b,D),
/// 18(c+b)/(D(2η(min{ε/2,2}))²), φ(D(2η(min{ε/2,2}))²/18, b, f)}:
/// for t ≥ φ₁, ‖z/‖z‖ + J_t x/‖J_t x‖‖ ≤ ε for any near-infimum graph
/// value z with ‖z‖ ≤ d + 2dη(min{ε/2,2}) and ‖y‖,‖z‖ ≤ c.
pub fn phi1_reich(
    eps: f64,
    b: f64,
    d_lower: f64,
    c: f64,
    eta: &Modulus1,
    f: &Modulus1,
) -> Result<f64> {
    check_eps(eps)?;
    if !(d_lower > 0.0) || !(c >= 0.0) || !(b > 0.0) {
        return Err(Error::OutOfRange(format!(
            "phi1 requires b > 0, D > 0, c >= 0; got b={b}, D={d_lower}, c={c}"
        )));
    }
    let two_eta = 2.0 * eta.eval((eps / 2.0).min(2.0));
    let gamma = d_lower * two_eta * two_eta / 18.0;
    let t1 = psi_escape(c + 1.0, b, d_lower)?;
    let t2 = psi_escape((4.0 / eps + 1.0) * c, b, d_lower)?;
    let t3 = (c + b) / gamma;
    let t4 = phi_inf(gamma, b, f)?;
    Ok(t1.max(t2).max(t3).max(t4))
}

/// Unsmoothed Cauchy-at-infinity threshold assuming d ≥ D:
/// φ₂′(ε,D) = max{φ(ε/3,b,f), φ₁(ε/6E, b, D, f(2D·η(min{ε/12E,2})), η, f)}.
pub fn phi2_reich_unsmoothed(eps: f64, p: &ReichParams, d_lower: f64) -> Result<f64> {
    check_eps(eps)?;
    let e = p.e_bound as f64;
    let b = p.b as f64;
    let witness_c = p.f.eval(2.0 * d_lower * p.eta_c(eps / (12.0 * e)));
    let t1 = phi_inf(eps / 3.0, b, &p.f)?;
    let t2 = phi1_reich(eps / (6.0 * e), b, d_lower, witness_c, &p.eta, &p.f)?;
    Ok(t1.max(t2))
}

/// Smoothed Cauchy-at-infinity threshold:
/// φ₂(ε) = max{φ(ε/4,b,f), φ(ε/3,b,f),
/// φ₁(ε/6E, b, ε/4, f(ε·η(min{ε/12E,2})/2), η, f)}:
/// for all t,s ≥ φ₂, ‖J_s x/s − J_t x/t‖ ≤ ε.
pub fn phi2_reich(eps: f64, p: &ReichParams) -> Result<f64> {
    check_eps(eps)?;
    let e = p.e_bound as f64;
    let b = p.b as f64;
    let witness_c = p.f.eval(eps * p.eta_c(eps / (12.0 * e)) / 2.0);
    let t1 = phi_inf(eps / 4.0, b, &p.f)?;
    let t2 = phi_inf(eps / 3.0, b, &p.f)?;
    let t3 = phi1_reich(eps / (6.0 * e), b, eps / 4.0, witness_c, &p.eta, &p.f)?;
    Ok(t1.max(t2).max(t3))
}

/// Approximate the limit v_x of −J_t x/t as t → ∞: returns −J_T x/T at
/// T = φ₂(ε/2), which the Cauchy certificate places within ε of v_x.
pub fn v_limit(ev: &SemigroupEvaluator, p: &ReichParams, x: &Vector, eps: f64) -> Result<Vector> {
    check_eps(eps)?;
    let t_big = phi2_reich(eps / 2.0, p)?;
    let j = ev.op().resolvent(t_big, x, ev.resolvent_tol())?;
    Ok(j.scale(-1.0 / t_big))
}

/// Admissible excess over d for the uniqueness-of-limit property: any
/// graph value z with ‖z‖ ≤ d + excess satisfies ‖z − v_x‖ ≤ ε, where
/// excess = min{ε·η(min{ε/16(E+1),2})/4, ε/8}.
pub fn unique_limit_gap(eps: f64, p: &ReichParams) -> Result<f64> {
    check_eps(eps)?;
    let e = p.e_bound as f64;
    let gap = (eps * p.eta_c(eps / (16.0 * (e + 1.0))) / 4.0).min(eps / 8.0);
    Ok(gap)
}

/// The combined large-time certificate:
/// Φ = max{(4/ε)(b + f(m)), (8/ε)f(m), φ₂(ε/2)} with
/// m = min{ε·η(min{(ε/8)/(16(E+1)),2})/32, ε/64}, certifying
/// ‖J_t x − S(t)x‖/t ≤ ε for every t ≥ Φ.
pub fn reich_rate(eps: f64, p: &ReichParams) -> Result<RateCertificate> {
    check_eps(eps)?;
    let e = p.e_bound as f64;
    let b = p.b as f64;
    let m = (eps * p.eta_c((eps / 8.0) / (16.0 * (e + 1.0))) / 32.0).min(eps / 64.0);
    let fm = p.f.eval(m);
    let t1 = 4.0 / eps * (b + fm);
    let t2 = 8.0 / eps * fm;
    let t3 = phi2_reich(eps / 2.0, p)?;
    RateCertificate::checked(
        eps,
        t1.max(t2).max(t3),
        Direction::AllTAbove,
        ClaimKind::ReichMain,
        p.snapshot(),
    )
}

/// Certificate wrappers for the intermediate large-time claims.
pub fn phi_inf_cert(eps: f64, p: &ReichParams) -> Result<RateCertificate> {
    RateCertificate::checked(
        eps,
        phi_inf(eps, p.b as f64, &p.f)?,
        Direction::AllTAbove,
        ClaimKind::ReichPhiInf,
        p.snapshot(),
    )
}

/// Escape certificate ‖J_t x‖ ≥ K for t ≥ (b+K)/D; the `epsilon` field
/// carries K. Requires the analytic lower bound D.
pub fn escape_cert(k_target: f64, p: &ReichParams) -> Result<RateCertificate> {
    let d = p.d_lower.ok_or_else(|| {
        Error::OutOfRange("escape certificate needs d_lower (the claim assumes d > 0)".into())
    })?;
    RateCertificate::checked(
        k_target,
        psi_escape(k_target, p.b as f64, d)?.max(f64::MIN_POSITIVE),
        Direction::AllTAbove,
        ClaimKind::ReichEscape,
        p.snapshot(),
    )
}

pub fn res_cauchy_inf_cert(eps: f64, p: &ReichParams) -> Result<RateCertificate> {
    RateCertificate::checked(
        eps,
        phi2_reich(eps, p)?,
        Direction::AllTAbove,
        ClaimKind::ReichResCauchy,
        p.snapshot(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn const_mod(v: f64) -> Modulus1 {
        Modulus1::new(format!("const({v})"), move |_| v)
    }

    fn synthetic(b: u32, e_bound: u32, fval: f64, d_lower: Option<f64>) -> ReichParams {
        ReichParams::synthetic(b, const_mod(1.0), const_mod(fval), e_bound, d_lower)
    }

    #[test]
    fn phi_inf_hand_values() {
        // 8(2+3)/1 = 40
        assert_relative_eq!(phi_inf(1.0, 2.0, &const_mod(3.0)).unwrap(), 40.0);
        // 8(1+0)/2 = 4
        assert_relative_eq!(phi_inf(2.0, 1.0, &const_mod(0.0)).unwrap(), 4.0);
        // decreasing in ε for constant f
        assert!(phi_inf(0.5, 2.0, &const_mod(3.0)).unwrap() > 40.0);
        assert!(phi_inf(-1.0, 2.0, &const_mod(3.0)).is_err());
    }

    #[test]
    fn psi_escape_hand_values() {
        assert_relative_eq!(psi_escape(10.0, 2.0, 0.5).unwrap(), 24.0);
        assert_relative_eq!(psi_escape(0.0, 0.0, 1.0).unwrap(), 0.0);
        // linear in K
        let base = psi_escape(1.0, 1.0, 0.5).unwrap();
        assert_relative_eq!(psi_escape(2.0, 1.0, 0.5).unwrap() - base, 2.0);
        assert!(psi_escape(1.0, 1.0, 0.0).is_err());
        assert!(psi_escape(1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn phi1_hand_value() {
        // ε=2, b=1, D=1, c=1, η≡1, f≡3:
        // ψ(2,1,1)=3, ψ(3,1,1)=4, 18·2/(1·4)=9, φ(4/18,1,f)=8·4·18/4=144
        let got = phi1_reich(2.0, 1.0, 1.0, 1.0, &const_mod(1.0), &const_mod(3.0)).unwrap();
        assert_relative_eq!(got, 144.0);
        // always ≥ ψ(c+1,b,D)
        for eps in [0.5, 1.0, 3.0] {
            let v = phi1_reich(eps, 1.0, 1.0, 1.0, &const_mod(1.0), &const_mod(3.0)).unwrap();
            assert!(v >= psi_escape(2.0, 1.0, 1.0).unwrap());
        }
    }

    #[test]
    fn phi1_monotone_in_f() {
        let lo = phi1_reich(1.0, 1.0, 0.5, 1.0, &const_mod(1.0), &const_mod(2.0)).unwrap();
        let hi = phi1_reich(1.0, 1.0, 0.5, 1.0, &const_mod(1.0), &const_mod(4.0)).unwrap();
        assert!(hi >= lo);
    }

    /// Independent straight-line evaluation of the φ₂ chain at
    /// E=1, η≡1, b=1, f≡1, ε=6, cross-checked against the module.
    #[test]
    fn phi2_hand_chain() {
        let p = synthetic(1, 1, 1.0, None);
        // spreadsheet-style: φ(1.5) = 8(1+1)/1.5 = 32/3
        let phi_a: f64 = 8.0 * (1.0 + 1.0) / 1.5;
        // φ(2) = 8(1+1)/2 = 8
        let phi_b: f64 = 8.0 * (1.0 + 1.0) / 2.0;
        // φ₁(1, b=1, D=1.5, c=1): ψ(2,1,1.5) = 2; ψ(5,1,1.5) = 4;
        // γ = 1.5·4/18 = 1/3; 18(1+1)/(1.5·4) = 6; φ(1/3) = 8·2·3 = 48
        let phi1_term: f64 = [
            (1.0_f64 + 2.0) / 1.5,
            (1.0_f64 + 5.0) / 1.5,
            2.0_f64 / (1.0_f64 / 3.0),
            8.0_f64 * (1.0 + 1.0) / (1.0 / 3.0),
        ]
        .into_iter()
        .fold(0.0, f64::max);
        let expected = phi_a.max(phi_b).max(phi1_term);
        assert_relative_eq!(expected, 48.0);
        assert_relative_eq!(phi2_reich(6.0, &p).unwrap(), expected, epsilon = 1e-12);
    }

    #[test]
    fn phi2_dominates_phi_term() {
        let p = synthetic(2, 3, 5.0, None);
        for eps in [0.5, 1.0, 2.0] {
            assert!(phi2_reich(eps, &p).unwrap() >= phi_inf(eps / 3.0, 2.0, &p.f).unwrap());
        }
    }

    #[test]
    fn phi2_smoothing_substitution() {
        // φ₂(ε) = max{φ(ε/4), φ₂′(ε, D=ε/4)}
        let p = synthetic(1, 2, 3.0, None);
        for eps in [0.5, 1.0, 4.0] {
            let smooth = phi2_reich(eps, &p).unwrap();
            let unsmooth = phi2_reich_unsmoothed(eps, &p, eps / 4.0).unwrap();
            let with_phi4 = unsmooth.max(phi_inf(eps / 4.0, 1.0, &p.f).unwrap());
            assert_relative_eq!(smooth, with_phi4, epsilon = 1e-12);
        }
    }

    #[test]
    fn unique_limit_gap_hand_value() {
        // E=1, η≡1, ε=1: min{1/4, 1/8} = 1/8
        let p = synthetic(1, 1, 1.0, None);
        assert_relative_eq!(unique_limit_gap(1.0, &p).unwrap(), 0.125);
        // excess ≤ ε/8 always
        for eps in [0.2, 1.0, 5.0] {
            assert!(unique_limit_gap(eps, &p).unwrap() <= eps / 8.0 + 1e-15);
        }
    }

    #[test]
    fn reich_rate_structure() {
        let p = synthetic(2, 1, 1.0, None);
        for eps in [0.5, 1.0] {
            let cert = reich_rate(eps, &p).unwrap();
            assert!(cert.threshold >= phi2_reich(eps / 2.0, &p).unwrap());
            assert!(cert.threshold.is_finite());
            assert_eq!(cert.direction, Direction::AllTAbove);
            assert_eq!(cert.claim, ClaimKind::ReichMain);
        }
    }

    #[test]
    fn for_instance_refuses_finite_lambda0() {
        let space = Arc::new(SpaceInstance::euclidean(1).unwrap());
        let op = Arc::new(
            OperatorInstance::constant(Vector::new(vec![1.0]).unwrap())
                .with_lambda0(1.0)
                .unwrap(),
        );
        assert!(ReichParams::for_instance(&space, &op, 2).is_err());
    }

    #[test]
    fn v_limit_closed_forms() {
        // constant(q): J_t x = x − tq, so v_limit = q − x/T → q
        let space = Arc::new(SpaceInstance::euclidean(2).unwrap());
        let q = Vector::new(vec![1.0, 0.0]).unwrap();
        let op = Arc::new(OperatorInstance::constant(q.clone()));
        let p = ReichParams::for_instance(&space, &op, 2).unwrap();
        let ev = SemigroupEvaluator::new(&space, &op, 1e-12);
        let x = Vector::new(vec![0.5, -0.5]).unwrap();
        for eps in [0.5, 0.25] {
            let v = v_limit(&ev, &p, &x, eps).unwrap();
            assert!(space.norm(&v.sub(&q)).unwrap() <= eps);
        }

        // linear_psd(I,0): J_t x = x/(1+t), v_limit → 0
        let eye = nalgebra::DMatrix::identity(2, 2);
        let op2 = Arc::new(OperatorInstance::linear_psd(eye, Vector::zeros(2)).unwrap());
        let p2 = ReichParams::for_instance(&space, &op2, 2).unwrap();
        let ev2 = SemigroupEvaluator::new(&space, &op2, 1e-12);
        for eps in [0.5, 0.25] {
            let v = v_limit(&ev2, &p2, &x, eps).unwrap();
            assert!(space.norm(&v).unwrap() <= eps);
        }
    }
}
