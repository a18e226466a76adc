//! The bundled invariant suite: duality/semi-inner axioms, operator
//! basic properties, and semigroup properties, each as a seeded sampled
//! check with a per-check tolerance.

use super::quadrature;
use super::{Instance, SampleRecord, SamplingPlan, Slack, VerificationReport};
use crate::error::Result;
use crate::operator::{OperatorInstance, ScalarFn, DEFAULT_RESOLVENT_TOL};
use crate::vector::Vector;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::sync::Arc;

const RTOL: f64 = DEFAULT_RESOLVENT_TOL;

/// Aggregate of all invariant checks for one instance.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub instance: String,
    pub pass: bool,
    pub checks: Vec<VerificationReport>,
}

impl SuiteReport {
    fn new(name: &str, instance: String, checks: Vec<VerificationReport>) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        SuiteReport {
            name: name.into(),
            instance,
            pass,
            checks,
        }
    }
}

struct Ctx<'a> {
    inst: &'a Instance,
    plan: &'a SamplingPlan,
    slack: Slack,
}

impl<'a> Ctx<'a> {
    fn rng(&self, tag: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.plan.seed ^ tag)
    }

    /// Run `body` until `count` samples are collected (body may reject a
    /// draw by returning None); records index in `t` unless body sets it.
    fn sampled(
        &self,
        name: &str,
        tag: u64,
        count: usize,
        mut body: impl FnMut(&mut ChaCha8Rng) -> Result<Option<SampleRecord>>,
    ) -> Result<VerificationReport> {
        let mut rng = self.rng(tag);
        let mut samples = Vec::with_capacity(count);
        let mut attempts = 0usize;
        while samples.len() < count && attempts < count * 50 {
            attempts += 1;
            if let Some(rec) = body(&mut rng)? {
                samples.push(rec);
            }
        }
        Ok(VerificationReport::from_samples(
            name,
            self.inst.descriptor(),
            self.slack,
            self.plan.seed,
            samples,
        ))
    }

    fn lambda_cap(&self) -> f64 {
        match self.inst.op.lambda0() {
            Some(l0) => (0.99 * l0).min(4.0),
            None => 4.0,
        }
    }
}

/// Run every invariant of the space/operator/semigroup modules on this
/// instance and aggregate the verdicts.
pub fn axiom_suite(inst: &Instance, plan: &SamplingPlan, slack: Slack) -> Result<SuiteReport> {
    let ctx = Ctx { inst, plan, slack };
    let n_space = plan.random_samples.max(1);
    let n_op = plan.random_samples.clamp(1, 2000);
    let n_semi = plan.random_samples.clamp(1, 128);

    let mut checks = vec![
        duality_pairing(&ctx, n_space)?,
        duality_cauchy_schwarz(&ctx, n_space)?,
        duality_linearity(&ctx, n_space)?,
        semi_inner_homogeneity(&ctx, n_space)?,
        semi_inner_shift(&ctx, n_space)?,
        semi_inner_bound(&ctx, n_space)?,
        semi_inner_dominates_duality(&ctx, n_space)?,
        difference_quotient(&ctx, n_space)?,
        accretivity_transfer(&ctx, n_space)?,
        reich_duality_lemma(&ctx, n_space)?,
        clarkson_absolute(&ctx, n_space)?,
        clarkson_midpoint(&ctx, n_space)?,
        ucx_certificate(&ctx, n_space)?,
        metric_accretivity(&ctx, n_op)?,
        resolvent_nonexpansive(&ctx, n_op)?,
        resolvent_firmly_nonexpansive(&ctx, n_op)?,
        resolvent_identity(&ctx, n_op)?,
        resolvent_comparison(&ctx, n_op)?,
        yosida_lipschitz(&ctx, n_op)?,
        yosida_bound(&ctx, n_op)?,
        resolvent_zero_continuity(&ctx, n_op)?,
        graph_accretivity(&ctx, n_op)?,
        semigroup_lipschitz_in_t(&ctx, n_semi)?,
        semigroup_nonexpansive(&ctx, n_semi)?,
        semigroup_law(&ctx, n_semi.min(20))?,
        growth_bound(&ctx, n_semi)?,
        equicontinuity(&ctx, n_semi)?,
        yosida_monotone_along_iterates(&ctx, n_semi.min(32))?,
        quadrature::clarkson_integral_sampled(inst, plan, slack)?,
        quadrature::miyadera_integral_sampled(inst, plan, slack)?,
    ];
    if let Some(check) = cl_oracle(&ctx)? {
        checks.push(check);
    }
    Ok(SuiteReport::new("axiom_suite", inst.descriptor(), checks))
}

/// Only the eight basic-properties items of the operator module
/// (nonexpansiveness through graph accretivity), at the stated
/// magnitude-scaled tolerance.
pub fn basic_properties_suite(
    inst: &Instance,
    plan: &SamplingPlan,
    slack: Slack,
) -> Result<SuiteReport> {
    let ctx = Ctx { inst, plan, slack };
    let n = plan.random_samples.max(1);
    let checks = vec![
        resolvent_nonexpansive(&ctx, n)?,
        resolvent_firmly_nonexpansive(&ctx, n)?,
        resolvent_identity(&ctx, n)?,
        resolvent_comparison(&ctx, n)?,
        yosida_lipschitz(&ctx, n)?,
        yosida_bound(&ctx, n)?,
        resolvent_zero_continuity(&ctx, n)?,
        graph_accretivity(&ctx, n)?,
    ];
    Ok(SuiteReport::new(
        "basic_properties",
        inst.descriptor(),
        checks,
    ))
}

/// Only the duality/semi-inner/convexity checks of the space module.
pub fn space_axiom_suite(
    inst: &Instance,
    plan: &SamplingPlan,
    slack: Slack,
) -> Result<SuiteReport> {
    let ctx = Ctx { inst, plan, slack };
    let n = plan.random_samples.max(1);
    let checks = vec![
        duality_pairing(&ctx, n)?,
        duality_cauchy_schwarz(&ctx, n)?,
        duality_linearity(&ctx, n)?,
        semi_inner_homogeneity(&ctx, n)?,
        semi_inner_shift(&ctx, n)?,
        semi_inner_bound(&ctx, n)?,
        semi_inner_dominates_duality(&ctx, n)?,
        difference_quotient(&ctx, n)?,
        accretivity_transfer(&ctx, n)?,
        reich_duality_lemma(&ctx, n)?,
        clarkson_absolute(&ctx, n)?,
        clarkson_midpoint(&ctx, n)?,
        ucx_certificate(&ctx, n)?,
    ];
    Ok(SuiteReport::new("space_axioms", inst.descriptor(), checks))
}

/// The semigroup-law check alone, with an explicit sample count.
pub fn semigroup_law_check(
    inst: &Instance,
    plan: &SamplingPlan,
    slack: Slack,
    samples: usize,
) -> Result<VerificationReport> {
    let ctx = Ctx { inst, plan, slack };
    semigroup_law(&ctx, samples)
}

// ---- space checks -------------------------------------------------------

fn duality_pairing(ctx: &Ctx, n: usize) -> Result<VerificationReport> {
    let s = &ctx.inst.space;
    ctx.sampled("duality_pairing", 0x01, n, |rng| {
        let x = s.sample_ball(3.0, rng);
        let nx = s.norm(&x)?;
        let j = s.duality_map(&x)?;
        let obs = (x.dot(&j) - nx * nx).abs();
        Ok(Some(SampleRecord::new(
            nx,
            None,
            obs,
            1e-10 * nx * nx + 1e-30,
        )))
    })
}

fn duality_cauchy_schwarz(ctx: &Ctx, n: usize) -> Result<VerificationReport> {
    let s = &ctx.inst.space;
    ctx.sampled("duality_cauchy_schwarz", 0x02, n, |rng| {
        let x = s.sample_ball(3.0, rng);
        let y = s.sample_ball(3.0, rng);
        let j = s.duality_map(&x)?;
        let obs = y.dot(&j).abs() - s.norm(&x)? * s.norm(&y)?;
        Ok(Some(SampleRecord::new(s.norm(&x)?, None, obs, 1e-10)))
    })
}

fn duality_linearity(ctx: &Ctx, n: usize) -> Result<VerificationReport> {
    let s = &ctx.inst.space;
    ctx.sampled("duality_linearity", 0x03, n, |rng| {
        let x = s.sample_ball(3.0, rng);
        let u = s.sample_ball(3.0, rng);
        let v = s.sample_ball(3.0, rng);
        let a: f64 = rng.gen_range(-2.0..=2.0);
        let b: f64 = rng.gen_range(-2.0..=2.0);
        let j = s.duality_map(&x)?;
        let lhs = u.scale(a).add(&v.scale(b)).dot(&j);
        let rhs = a * u.dot(&j) + b * v.dot(&j);
        let scale = 1.0 + s.norm(&x)? * (a.abs() * s.norm(&u)? + b.abs() * s.norm(&v)?);
        Ok(Some(SampleRecord::new(
            a,
            Some(b),
            (lhs - rhs).abs(),
            1e-10 * scale,
        )))
    })
}

fn semi_inner_homogeneity(ctx: &Ctx, n: usize) -> Result<VerificationReport> {
    let s = &ctx.inst.space;
    ctx.sampled("semi_inner_homogeneity", 0x04, n, |rng| {
        let x = s.sample_ball(2.0, rng);
        let y = s.sample_ball(2.0, rng);
        let a: f64 = rng.gen_range(0.0..=2.0);
        let b: f64 = rng.gen_range(0.0..=2.0);
        let lhs = s.semi_inner(&y.scale(a), &x.scale(b))?;
        let rhs = a * b * s.semi_inner(&y, &x)?;
        let scale = 1.0 + lhs.abs().max(rhs.abs());
        Ok(Some(SampleRecord::new(
            a,
            Some(b),
            (lhs - rhs).abs(),
            1e-10 * scale,
        )))
    })
}

fn semi_inner_shift(ctx: &Ctx, n: usize) -> Result<VerificationReport> {
    let s = &ctx.inst.space;
    ctx.sampled("semi_inner_shift", 0x05, n, |rng| {
        let x = s.sample_ball(2.0, rng);
        let y = s.sample_ball(2.0, rng);
        let a: f64 = rng.gen_range(-2.0..=2.0);
        let nx = s.norm(&x)?;
        let lhs = s.semi_inner(&x.scale(a).add(&y), &x)?;
        let rhs = a * nx * nx + s.semi_inner(&y, &x)?;
        let scale = 1.0 + lhs.abs().max(rhs.abs());
        Ok(Some(SampleRecord::new(
            a,
            None,
            (lhs - rhs).abs(),
            1e-10 * scale,
        )))
    })
}

fn semi_inner_bound(ctx: &Ctx, n: usize) -> Result<VerificationReport> {
    let s = &ctx.inst.space;
    ctx.sampled("semi_inner_bound", 0x06, n, |rng| {
        let x = s.sample_ball(2.0, rng);
        let y = s.sample_ball(2.0, rng);
        let obs = s.semi_inner(&y, &x)?.abs() - s.norm(&y)? * s.norm(&x)?;
        Ok(Some(SampleRecord::new(s.norm(&x)?, None, obs, 1e-10)))
    })
}

fn semi_inner_dominates_duality(ctx: &Ctx, n: usize) -> Result<VerificationReport> {
    let s = &ctx.inst.space;
    ctx.sampled("semi_inner_dominates_duality", 0x07, n, |rng| {
        let x = s.sample_ball(2.0, rng);
        let y = s.sample_ball(2.0, rng);
        let pairing = y.dot(&s.duality_map(&x)?);
        let si = s.semi_inner(&y, &x)?;
        // smooth instances: equality
        Ok(Some(SampleRecord::new(
            s.norm(&x)?,
            None,
            (pairing - si).abs(),
            1e-10 * (1.0 + si.abs()),
        )))
    })
}

fn difference_quotient(ctx: &Ctx, n: usize) -> Result<VerificationReport> {
    let s = &ctx.inst.space;
    ctx.sampled("difference_quotient", 0x08, n, |rng| {
        let x = s.sample_ball(2.0, rng);
        let y = s.sample_ball(2.0, rng);
        let t = 10f64.powf(rng.gen_range(-6.0..=1.0));
        let j = s.duality_map(&x)?;
        let nx = s.norm(&x)?;
        let quot = nx * (s.norm(&x.axpy(t, &y))? - nx) / t;
        Ok(Some(SampleRecord::new(t, None, y.dot(&j) - quot, 1e-9)))
    })
}

fn accretivity_transfer(ctx: &Ctx, n: usize) -> Result<VerificationReport> {
    let s = &ctx.inst.space;
    ctx.sampled("accretivity_transfer", 0x09, n, |rng| {
        let x = s.sample_ball(2.0, rng);
        let y = s.sample_ball(2.0, rng);
        if y.dot(&s.duality_map(&x)?) < 0.0 {
            return Ok(None);
        }
        let lambda: f64 = rng.gen_range(0.0..=10.0);
        let obs = s.norm(&x)? - s.norm(&x.axpy(lambda, &y))?;
        Ok(Some(SampleRecord::new(lambda, None, obs, 1e-10)))
    })
}

fn reich_duality_lemma(ctx: &Ctx, n: usize) -> Result<VerificationReport> {
    let s = &ctx.inst.space;
    ctx.sampled("reich_duality_lemma", 0x0a, n, |rng| {
        let x = s.sample_unit(rng);
        let y = s.sample_unit(rng);
        let a = s.norm(&x.sub(&y))?;
        if a <= 1e-8 {
            return Ok(None);
        }
        let eta = s.ucx_clamped(a)?;
        let pairing = y.dot(&s.duality_map(&x)?);
        Ok(Some(SampleRecord::new(
            a,
            None,
            2.0 * eta - (1.0 - pairing),
            1e-9,
        )))
    })
}

fn clarkson_absolute(ctx: &Ctx, n: usize) -> Result<VerificationReport> {
    let s = &ctx.inst.space;
    ctx.sampled("clarkson_absolute", 0x0b, n, |rng| {
        let a = s.sample_ball(2.0, rng);
        let b = s.sample_ball(2.0, rng);
        let (na, nb) = (s.norm(&a)?, s.norm(&b)?);
        if na < 1e-6 || nb < 1e-6 {
            return Ok(None);
        }
        let alpha = s.clarkson_angle(&a, &b)?;
        let obs = (na * alpha - s.norm(&a.sub(&b))?).abs() - (na - nb).abs();
        Ok(Some(SampleRecord::new(alpha, None, obs, 1e-9)))
    })
}

fn clarkson_midpoint(ctx: &Ctx, n: usize) -> Result<VerificationReport> {
    let s = &ctx.inst.space;
    ctx.sampled("clarkson_midpoint", 0x0c, n, |rng| {
        let a = s.sample_ball(2.0, rng);
        let b = s.sample_ball(2.0, rng);
        let (na, nb) = (s.norm(&a)?, s.norm(&b)?);
        let sum = a.add(&b);
        let nsum = s.norm(&sum)?;
        if na < 1e-6 || nb < 1e-6 || nsum < 1e-6 {
            return Ok(None);
        }
        let ang = s.clarkson_angle(&sum, &a)?;
        // the bound is only claimed for angles in (0, 2]
        if ang <= 1e-12 {
            return Ok(None);
        }
        let eta = s.ucx_clamped(ang)?;
        let obs = nsum - ((1.0 - 2.0 * eta) * na + nb);
        Ok(Some(SampleRecord::new(ang, None, obs, 1e-9)))
    })
}

fn ucx_certificate(ctx: &Ctx, n: usize) -> Result<VerificationReport> {
    let s = &ctx.inst.space;
    ctx.sampled("ucx_certificate", 0x0d, n, |rng| {
        let x = s.sample_unit(rng);
        let y = s.sample_unit(rng);
        let a = s.norm(&x.sub(&y))?;
        if a <= 1e-10 {
            return Ok(None);
        }
        let eta = s.ucx_clamped(a)?;
        let mid = s.norm(&x.add(&y).scale(0.5))?;
        Ok(Some(SampleRecord::new(a, None, mid - (1.0 - eta), 1e-9)))
    })
}

// ---- operator checks ----------------------------------------------------

fn metric_accretivity(ctx: &Ctx, n: usize) -> Result<VerificationReport> {
    let s = &ctx.inst.space;
    let op = &ctx.inst.op;
    ctx.sampled("metric_accretivity", 0x11, n, |rng| {
        let x = s.sample_ball(2.0, rng);
        let y = s.sample_ball(2.0, rng);
        let lambda: f64 = rng.gen_range(0.0..=4.0);
        let (u, v) = (op.apply(&x)?, op.apply(&y)?);
        let base = s.norm(&x.sub(&y))?;
        let shifted = s.norm(&x.sub(&y).axpy(lambda, &u.sub(&v)))?;
        Ok(Some(SampleRecord::new(lambda, None, base - shifted, 1e-9)))
    })
}

fn resolvent_nonexpansive(ctx: &Ctx, n: usize) -> Result<VerificationReport> {
    let s = &ctx.inst.space;
    let op = &ctx.inst.op;
    let cap = ctx.lambda_cap();
    ctx.sampled("resolvent_nonexpansive", 0x12, n, |rng| {
        let x = s.sample_ball(2.0, rng);
        let y = s.sample_ball(2.0, rng);
        let g: f64 = rng.gen_range(1e-3..=cap);
        let d = s.norm(&op.resolvent(g, &x, RTOL)?.sub(&op.resolvent(g, &y, RTOL)?))?;
        let base = s.norm(&x.sub(&y))?;
        Ok(Some(SampleRecord::new(
            g,
            None,
            d - base,
            1e-8 * (1.0 + base),
        )))
    })
}

fn resolvent_firmly_nonexpansive(ctx: &Ctx, n: usize) -> Result<VerificationReport> {
    let s = &ctx.inst.space;
    let op = &ctx.inst.op;
    let cap = ctx.lambda_cap();
    ctx.sampled("resolvent_firmly_nonexpansive", 0x13, n, |rng| {
        let x = s.sample_ball(2.0, rng);
        let y = s.sample_ball(2.0, rng);
        let g: f64 = rng.gen_range(1e-3..=cap);
        let r: f64 = rng.gen_range(1e-3..=3.0);
        let jd = op.resolvent(g, &x, RTOL)?.sub(&op.resolvent(g, &y, RTOL)?);
        let mix = x.sub(&y).scale(r).add(&jd.scale(1.0 - r));
        let obs = s.norm(&jd)? - s.norm(&mix)?;
        Ok(Some(SampleRecord::new(
            g,
            Some(r),
            obs,
            1e-8 * (1.0 + s.norm(&jd)?),
        )))
    })
}

fn resolvent_identity(ctx: &Ctx, n: usize) -> Result<VerificationReport> {
    let s = &ctx.inst.space;
    let op = &ctx.inst.op;
    let cap = ctx.lambda_cap();
    ctx.sampled("resolvent_identity", 0x14, n, |rng| {
        let x = s.sample_ball(2.0, rng);
        let l: f64 = rng.gen_range(1e-3..=cap);
        let g: f64 = rng.gen_range(1e-3..=cap);
        let jl = op.resolvent(l, &x, RTOL)?;
        let arg = x.scale(g / l).add(&jl.scale(1.0 - g / l));
        let rhs = op.resolvent(g, &arg, RTOL)?;
        let obs = s.norm(&jl.sub(&rhs))?;
        Ok(Some(SampleRecord::new(
            l,
            Some(g),
            obs,
            1e-8 * (1.0 + s.norm(&x)?),
        )))
    })
}

fn resolvent_comparison(ctx: &Ctx, n: usize) -> Result<VerificationReport> {
    let s = &ctx.inst.space;
    let op = &ctx.inst.op;
    let cap = ctx.lambda_cap();
    ctx.sampled("resolvent_comparison", 0x15, n, |rng| {
        let x = s.sample_ball(2.0, rng);
        let g: f64 = rng.gen_range(1e-3..=cap);
        let l: f64 = rng.gen_range(1e-3..=cap);
        let dg = s.norm(&x.sub(&op.resolvent(g, &x, RTOL)?))?;
        let dl = s.norm(&x.sub(&op.resolvent(l, &x, RTOL)?))?;
        let obs = dg - (2.0 + g / l) * dl;
        Ok(Some(SampleRecord::new(g, Some(l), obs, 1e-8 * (1.0 + dl))))
    })
}

fn yosida_lipschitz(ctx: &Ctx, n: usize) -> Result<VerificationReport> {
    let s = &ctx.inst.space;
    let op = &ctx.inst.op;
    let cap = ctx.lambda_cap();
    ctx.sampled("yosida_lipschitz", 0x16, n, |rng| {
        let x = s.sample_ball(2.0, rng);
        let y = s.sample_ball(2.0, rng);
        let g: f64 = rng.gen_range(1e-2..=cap);
        let d = s.norm(&op.yosida(g, &x, RTOL)?.sub(&op.yosida(g, &y, RTOL)?))?;
        let lip = 2.0 / g * s.norm(&x.sub(&y))?;
        Ok(Some(SampleRecord::new(
            g,
            None,
            d - lip,
            1e-8 * (1.0 + lip),
        )))
    })
}

fn yosida_bound(ctx: &Ctx, n: usize) -> Result<VerificationReport> {
    let s = &ctx.inst.space;
    let op = &ctx.inst.op;
    let cap = ctx.lambda_cap();
    ctx.sampled("yosida_bound", 0x17, n, |rng| {
        let x = s.sample_ball(2.0, rng);
        let g: f64 = rng.gen_range(1e-3..=cap);
        let v = op.apply(&x)?;
        let nv = s.norm(&v)?;
        let a = s.norm(&op.yosida(g, &x, RTOL)?)? - nv;
        let b = s.norm(&x.sub(&op.resolvent(g, &x, RTOL)?))? - g * nv;
        Ok(Some(SampleRecord::new(
            g,
            None,
            a.max(b),
            1e-8 * (1.0 + nv),
        )))
    })
}

fn resolvent_zero_continuity(ctx: &Ctx, n: usize) -> Result<VerificationReport> {
    let s = &ctx.inst.space;
    let op = &ctx.inst.op;
    ctx.sampled("resolvent_zero_continuity", 0x18, n, |rng| {
        let x = s.sample_ball(2.0, rng);
        let eps = 10f64.powf(rng.gen_range(-3.0..=0.0));
        let v = op.apply(&x)?;
        let mut t = eps / s.norm(&v)?.max(1.0);
        if let Some(l0) = op.lambda0() {
            t = t.min(0.99 * l0);
        }
        let obs = s.norm(&x.sub(&op.resolvent(t, &x, RTOL)?))? - eps;
        Ok(Some(SampleRecord::new(t, None, obs, 1e-8)))
    })
}

fn graph_accretivity(ctx: &Ctx, n: usize) -> Result<VerificationReport> {
    let s = &ctx.inst.space;
    let op = &ctx.inst.op;
    ctx.sampled("graph_accretivity", 0x19, n, |rng| {
        let x = s.sample_ball(2.0, rng);
        let y = s.sample_ball(2.0, rng);
        let j = s.duality_map(&x.sub(&y))?;
        let pairing = op.apply(&x)?.sub(&op.apply(&y)?).dot(&j);
        Ok(Some(SampleRecord::new(
            s.norm(&x.sub(&y))?,
            None,
            -pairing,
            1e-9,
        )))
    })
}

// ---- semigroup checks ---------------------------------------------------

fn semigroup_lipschitz_in_t(ctx: &Ctx, n: usize) -> Result<VerificationReport> {
    let inst = ctx.inst;
    let delta = 1e-7;
    ctx.sampled("semigroup_lipschitz_in_t", 0x21, n, |rng| {
        let ev = inst.evaluator();
        let t: f64 = rng.gen_range(0.0..=3.0);
        let s_: f64 = rng.gen_range(0.0..=3.0);
        let a = ev.evaluate(t, &inst.x0, delta)?;
        let b = ev.evaluate(s_, &inst.x0, delta)?;
        let v = inst.op.apply(&inst.x0)?;
        let lip = 2.0 * (t - s_).abs() * inst.space.norm(&v)?;
        let obs = inst.space.norm(&a.point.sub(&b.point))? - lip;
        let budget = a.delta_effective + b.delta_effective + 1e-9;
        Ok(Some(SampleRecord::new(t, Some(s_), obs, budget)))
    })
}

fn semigroup_nonexpansive(ctx: &Ctx, n: usize) -> Result<VerificationReport> {
    let inst = ctx.inst;
    let delta = 1e-7;
    ctx.sampled("semigroup_nonexpansive", 0x22, n, |rng| {
        let ev = inst.evaluator();
        let x = inst.space.sample_ball(2.0, rng);
        let y = inst.space.sample_ball(2.0, rng);
        let t: f64 = rng.gen_range(0.0..=3.0);
        let a = ev.evaluate(t, &x, delta)?;
        let b = ev.evaluate(t, &y, delta)?;
        let obs = inst.space.norm(&a.point.sub(&b.point))? - inst.space.norm(&x.sub(&y))?;
        let budget = a.delta_effective + b.delta_effective + 1e-9;
        Ok(Some(SampleRecord::new(t, None, obs, budget)))
    })
}

/// ‖S(t+s)x − S(t)S(s)x‖ ≤ ε_num with the inner point re-entered through
/// the evaluator at a tightened accuracy; the sample bound is the sum of
/// the three effective accuracies.
fn semigroup_law(ctx: &Ctx, n: usize) -> Result<VerificationReport> {
    let inst = ctx.inst;
    let delta = 1e-5 / 3.0;
    ctx.sampled("semigroup_law", 0x23, n, |rng| {
        let ev = inst.evaluator();
        let t: f64 = rng.gen_range(0.0..=2.0);
        let s_: f64 = rng.gen_range(0.0..=2.0);
        let whole = ev.evaluate(t + s_, &inst.x0, delta)?;
        let part = ev.evaluate(s_, &inst.x0, delta)?;
        let outer = ev.evaluate(t, &part.point, delta)?;
        let obs = inst.space.norm(&whole.point.sub(&outer.point))?;
        let budget = whole.delta_effective + part.delta_effective + outer.delta_effective + 1e-9;
        Ok(Some(SampleRecord::new(t, Some(s_), obs, budget)))
    })
}

fn growth_bound(ctx: &Ctx, n: usize) -> Result<VerificationReport> {
    let inst = ctx.inst;
    let delta = 1e-7;
    let (c, dc) = inst.op.domain_witness()?;
    let t_cap = 3.0;
    let bound_base = 1.0
        + inst.space.norm(&inst.x0)?
        + 2.0 * inst.space.norm(&c)?
        + t_cap * inst.space.norm(&dc)?;
    ctx.sampled("growth_bound", 0x24, n, |rng| {
        let ev = inst.evaluator();
        let t: f64 = rng.gen_range(0.0..t_cap);
        let a = ev.evaluate(t, &inst.x0, delta)?;
        let obs = inst.space.norm(&a.point)? - bound_base;
        Ok(Some(SampleRecord::new(
            t,
            None,
            obs,
            a.delta_effective + 1e-9,
        )))
    })
}

fn equicontinuity(ctx: &Ctx, n: usize) -> Result<VerificationReport> {
    let inst = ctx.inst;
    let delta = 1e-9;
    let b = inst.b_bound()?;
    ctx.sampled("equicontinuity", 0x25, n, |rng| {
        let ev = inst.evaluator();
        let m: u32 = rng.gen_range(0..=6);
        let thr = ev.equicontinuity_threshold(b, m)?;
        let t: f64 = rng.gen_range(0.0..=3.0);
        let t2 = t + 0.99 * thr;
        let a = ev.evaluate(t, &inst.x0, delta)?;
        let c = ev.evaluate(t2, &inst.x0, delta)?;
        let obs = inst.space.norm(&a.point.sub(&c.point))? - 2f64.powi(-(m as i32));
        let budget = a.delta_effective + c.delta_effective + 1e-12;
        Ok(Some(SampleRecord::new(t, Some(t2), obs, budget)))
    })
}

/// ‖A_{t/n}(J_{t/n})^i y‖ is nonincreasing in i along the exponential-
/// formula iterates.
fn yosida_monotone_along_iterates(ctx: &Ctx, n: usize) -> Result<VerificationReport> {
    let inst = ctx.inst;
    ctx.sampled("yosida_monotone_along_iterates", 0x26, n, |rng| {
        let t: f64 = rng.gen_range(0.1..=2.0);
        let steps = 16u32;
        let lam = t / steps as f64;
        let y0 = inst.space.sample_ball(2.0, rng);
        let base = inst.space.norm(&inst.op.yosida(lam, &y0, RTOL)?)?;
        let mut y = y0;
        let mut worst: f64 = f64::NEG_INFINITY;
        for _ in 0..steps {
            y = inst.op.resolvent(lam, &y, RTOL)?;
            let a = inst.space.norm(&inst.op.yosida(lam, &y, RTOL)?)?;
            worst = worst.max(a - base);
        }
        Ok(Some(SampleRecord::new(t, None, worst, 1e-8 * (1.0 + base))))
    })
}

/// For the 1-D operator f(y)=y the iterate and semigroup have closed
/// forms; compare against both. Skipped on other instances.
fn cl_oracle(ctx: &Ctx) -> Result<Option<VerificationReport>> {
    let inst = ctx.inst;
    if inst.op.descriptor() != "diagonal[linear(1)]" {
        return Ok(None);
    }
    let ev = inst.evaluator();
    let x = inst.x0[0];
    let mut samples = Vec::new();
    for k in [0u32, 4] {
        let n = crate::semigroup::cl_rate(k, x.abs().max(1.0), 1.0)?;
        for t in [0.1, 0.5, 0.9] {
            let got = ev.cl_iterate(t, &inst.x0, n)?[0];
            let closed = (1.0 + t / n as f64).powi(-(n as i32)) * x;
            samples.push(SampleRecord::new(
                t,
                Some(n as f64),
                (got - closed).abs(),
                10.0 * RTOL * n as f64,
            ));
            samples.push(SampleRecord::new(
                t,
                Some(k as f64),
                (closed - (-t).exp() * x).abs(),
                2f64.powi(-(k as i32)) + 1e-12,
            ));
        }
    }
    let mut rep = VerificationReport::from_samples(
        "cl_convergence_oracle",
        inst.descriptor(),
        ctx.slack,
        ctx.plan.seed,
        samples,
    );
    rep.notes
        .push("closed forms: (1+t/n)^{-n} x and e^{-t} x".into());
    Ok(Some(rep))
}

/// Negative control: a non-accretive diagonal instance (f(y) = −y) must
/// fail the accretivity checks.
pub fn non_accretive_control(plan: &SamplingPlan, slack: Slack) -> Result<VerificationReport> {
    let space = Arc::new(crate::space::SpaceInstance::euclidean(1)?);
    let op = Arc::new(OperatorInstance::diagonal(vec![ScalarFn::Linear {
        slope: -1.0,
    }])?);
    let inst = Instance::new(space, op, Vector::new(vec![0.5])?)?;
    let ctx = Ctx {
        inst: &inst,
        plan,
        slack,
    };
    let mut rep = metric_accretivity(&ctx, plan.random_samples.clamp(1, 500))?;
    rep.claim = "negative_control_non_accretive".into();
    rep.negative_control = true;
    rep.notes
        .push("f(y) = -y violates monotonicity; fail verdicts are the expected outcome".into());
    Ok(rep)
}
