//! Composite-Simpson evaluation of the two integral inequalities used by
//! the small-time analysis: the resolvent/semigroup comparison
//! ‖J_λx − S(t)x‖ ≤ (1 − t/λ)‖x − J_λx‖ + (2/λ)∫₀ᵗ‖x − S(s)x‖ ds
//! and the directional integral inequality behind the Miyadera bound.

use super::{Instance, SampleRecord, SamplingPlan, Slack, VerificationReport};
use crate::error::{Error, Result};

pub const DEFAULT_NODES: usize = 129;

/// Composite Simpson on [0, b] with an odd node count.
pub fn simpson(mut f: impl FnMut(f64) -> Result<f64>, b: f64, nodes: usize) -> Result<f64> {
    if b == 0.0 {
        return Ok(0.0);
    }
    if nodes < 3 || nodes.is_multiple_of(2) {
        return Err(Error::OutOfRange(format!(
            "simpson needs an odd node count >= 3, got {nodes}"
        )));
    }
    let h = b / (nodes - 1) as f64;
    let mut acc = f(0.0)? + f(b)?;
    for i in 1..nodes - 1 {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(i as f64 * h)?;
    }
    Ok(acc * h / 3.0)
}

/// One evaluation of the comparison inequality at (λ, t).
pub fn clarkson_integral_check(
    inst: &Instance,
    lambda: f64,
    t: f64,
    nodes: usize,
    slack: &Slack,
) -> Result<SampleRecord> {
    if lambda <= 0.0 || t < 0.0 {
        return Err(Error::OutOfRange(format!(
            "comparison inequality needs lambda > 0 and t >= 0, got ({lambda}, {t})"
        )));
    }
    let x = &inst.x0;
    let space = &inst.space;
    let ev = inst.evaluator();
    let delta = 1e-9;
    let j = inst
        .op
        .resolvent(lambda, x, crate::operator::DEFAULT_RESOLVENT_TOL)?;
    let st = ev.evaluate(t, x, delta)?;
    let lhs = space.norm(&j.sub(&st.point))?;
    let base = space.norm(&x.sub(&j))?;
    let integral = simpson(
        |s| {
            let out = ev.evaluate(s, x, delta)?;
            space.norm(&x.sub(&out.point))
        },
        t,
        nodes,
    )?;
    let rhs = (1.0 - t / lambda) * base + 2.0 / lambda * integral;
    // numeric budget: the S-evaluations inside and outside the integral
    let budget = slack.kappa + st.delta_effective + 2.0 / lambda * t * delta;
    Ok(SampleRecord::new(lambda, Some(t), lhs - rhs, budget))
}

/// Sampled comparison-inequality suite entry.
pub fn clarkson_integral_sampled(
    inst: &Instance,
    plan: &SamplingPlan,
    slack: Slack,
) -> Result<VerificationReport> {
    let mut samples = Vec::new();
    for lambda in [0.25, 1.0, 2.5] {
        for t in [0.0, 0.1, 0.7, 2.0] {
            samples.push(clarkson_integral_check(
                inst,
                lambda,
                t,
                DEFAULT_NODES,
                &slack,
            )?);
        }
    }
    let mut rep = VerificationReport::from_samples(
        "resolvent_semigroup_integral",
        inst.descriptor(),
        slack,
        plan.seed,
        samples,
    );
    rep.notes
        .push(format!("composite Simpson, {DEFAULT_NODES} nodes"));
    Ok(rep)
}

/// ⟨S(t)x − x, j(x−x₀)⟩ ≤ ∫₀ᵗ ⟨y₀, x₀ − S(τ)x⟩_s dτ for a graph point
/// (x₀, y₀). The inequality is imported, not re-derived; reports flag it
/// as externally proved.
pub fn miyadera_integral_check(
    inst: &Instance,
    x0_anchor: &crate::vector::Vector,
    t: f64,
    nodes: usize,
    slack: &Slack,
) -> Result<SampleRecord> {
    let x = &inst.x0;
    let space = &inst.space;
    let ev = inst.evaluator();
    let delta = 1e-9;
    let y0 = inst.op.apply(x0_anchor)?;
    let jdir = space.duality_map(&x.sub(x0_anchor))?;
    let st = ev.evaluate(t, x, delta)?;
    let lhs = st.point.sub(x).dot(&jdir);
    let integral = simpson(
        |s| {
            let out = ev.evaluate(s, x, delta)?;
            space.semi_inner(&y0, &x0_anchor.sub(&out.point))
        },
        t,
        nodes,
    )?;
    let budget =
        slack.kappa + st.delta_effective * space.norm(&jdir)? + t * delta * space.norm(&y0)?;
    Ok(SampleRecord::new(t, None, lhs - integral, budget))
}

/// Sampled Miyadera-integral suite entry.
pub fn miyadera_integral_sampled(
    inst: &Instance,
    plan: &SamplingPlan,
    slack: Slack,
) -> Result<VerificationReport> {
    let anchors = [
        crate::vector::Vector::zeros(inst.space.dim()),
        inst.x0.scale(0.5),
    ];
    let mut samples = Vec::new();
    for anchor in &anchors {
        for t in [0.05, 0.3, 1.0] {
            samples.push(miyadera_integral_check(
                inst,
                anchor,
                t,
                DEFAULT_NODES,
                &slack,
            )?);
        }
    }
    let mut rep = VerificationReport::from_samples(
        "miyadera_integral",
        inst.descriptor(),
        slack,
        plan.seed,
        samples,
    );
    rep.notes.push(
        "inequality imported from the literature (external proof); checked numerically".into(),
    );
    Ok(rep)
}
