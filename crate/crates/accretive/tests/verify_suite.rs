//! Integration tests for the verification harness: full axiom suites on
//! concrete instances, certificate verification for the intermediate
//! claims, determinism, and the quadrature checks.

use accretive::operator::{OperatorInstance, ScalarFn};
use accretive::rates::{plant, reich, ClaimKind, Direction};
use accretive::space::SpaceInstance;
use accretive::vector::Vector;
use accretive::verify::{
    axiom_suite, empirical_threshold, quadrature, verify_certificate, EmpiricalOutcome, Instance,
    SamplingPlan, Slack,
};
use nalgebra::DMatrix;
use std::sync::Arc;

fn v(coords: &[f64]) -> Vector {
    Vector::new(coords.to_vec()).unwrap()
}

fn plan_small() -> SamplingPlan {
    SamplingPlan {
        random_samples: 300,
        ..SamplingPlan::default()
    }
}

fn identity_instance() -> Instance {
    Instance::new(
        Arc::new(SpaceInstance::euclidean(2).unwrap()),
        Arc::new(OperatorInstance::linear_psd(DMatrix::identity(2, 2), Vector::zeros(2)).unwrap()),
        v(&[0.6, -0.8]),
    )
    .unwrap()
}

fn cube_instance() -> Instance {
    Instance::new(
        Arc::new(SpaceInstance::euclidean(1).unwrap()),
        Arc::new(OperatorInstance::diagonal(vec![ScalarFn::power(3.0).unwrap()]).unwrap()),
        v(&[0.9]),
    )
    .unwrap()
}

fn lin1d_instance() -> Instance {
    Instance::new(
        Arc::new(SpaceInstance::euclidean(1).unwrap()),
        Arc::new(OperatorInstance::diagonal(vec![ScalarFn::Linear { slope: 1.0 }]).unwrap()),
        v(&[1.0]),
    )
    .unwrap()
}

#[test]
fn axiom_suite_passes_on_identity_operator() {
    let suite = axiom_suite(&identity_instance(), &plan_small(), Slack::default()).unwrap();
    for c in &suite.checks {
        assert!(
            c.pass,
            "{} failed: margin {:+.3e}",
            c.claim,
            c.worst_margin()
        );
    }
    assert!(suite.pass);
}

#[test]
fn axiom_suite_passes_on_cubic_operator() {
    let suite = axiom_suite(&cube_instance(), &plan_small(), Slack::default()).unwrap();
    for c in &suite.checks {
        assert!(
            c.pass,
            "{} failed: margin {:+.3e}",
            c.claim,
            c.worst_margin()
        );
    }
}

#[test]
fn axiom_suite_includes_cl_oracle_for_linear_1d() {
    let suite = axiom_suite(&lin1d_instance(), &plan_small(), Slack::default()).unwrap();
    assert!(suite
        .checks
        .iter()
        .any(|c| c.claim == "cl_convergence_oracle" && c.pass));
}

#[test]
fn axiom_suite_is_deterministic() {
    let inst = cube_instance();
    let plan = plan_small();
    let a = axiom_suite(&inst, &plan, Slack::default()).unwrap();
    let b = axiom_suite(&inst, &plan, Slack::default()).unwrap();
    let ja = serde_json::to_string(&a).unwrap();
    let jb = serde_json::to_string(&b).unwrap();
    assert_eq!(ja, jb);
}

#[test]
fn intermediate_plant_certificates_verify() {
    let inst = cube_instance();
    let params = plant::PlantParams::for_instance(&inst.space, &inst.op, 1, 1).unwrap();
    let plan = SamplingPlan::default();
    let slack = Slack::default();
    for eps in [0.5, 0.1] {
        let certs = [
            plant::resolvent_roc_cert(eps, &params).unwrap(),
            plant::semigroup_roc_cert(eps, &params).unwrap(),
            plant::res_cauchy_cert(eps, &params).unwrap(),
            plant::res_semi_comb_cert(eps, &params).unwrap(),
            plant::miyadera_cert(eps, &params).unwrap(),
        ];
        for cert in &certs {
            let rep = verify_certificate(cert, &inst, &plan, &slack).unwrap();
            assert!(
                rep.pass,
                "{} at eps={eps}: margin {:+.3e}",
                rep.claim,
                rep.worst_margin()
            );
        }
    }
}

#[test]
fn intermediate_reich_certificates_verify() {
    let space = Arc::new(SpaceInstance::euclidean(2).unwrap());
    let inst = Instance::new(
        Arc::clone(&space),
        Arc::new(OperatorInstance::constant(v(&[1.0, 0.0]))),
        v(&[0.5, -0.5]),
    )
    .unwrap();
    let params = reich::ReichParams::for_instance(&inst.space, &inst.op, 2).unwrap();
    let plan = SamplingPlan::default();
    let slack = Slack::default();
    for eps in [1.0, 0.5] {
        for cert in [
            reich::phi_inf_cert(eps, &params).unwrap(),
            reich::res_cauchy_inf_cert(eps, &params).unwrap(),
        ] {
            let rep = verify_certificate(&cert, &inst, &plan, &slack).unwrap();
            assert!(
                rep.pass,
                "{} at eps={eps}: margin {:+.3e}",
                rep.claim,
                rep.worst_margin()
            );
        }
    }
    // escape: ‖J_t x‖ ≥ K for t ≥ (b+K)/D on the d = ‖q‖ = 1 instance
    let cert = reich::escape_cert(10.0, &params).unwrap();
    let rep = verify_certificate(&cert, &inst, &plan, &slack).unwrap();
    assert!(rep.pass);
}

#[test]
fn reich_main_observed_vanishes_on_constant() {
    // J_t x − S(t)x = 0 identically for the constant operator
    let inst = Instance::new(
        Arc::new(SpaceInstance::euclidean(2).unwrap()),
        Arc::new(OperatorInstance::constant(v(&[1.0, 0.0]))),
        v(&[0.5, -0.5]),
    )
    .unwrap();
    let params = reich::ReichParams::for_instance(&inst.space, &inst.op, 2).unwrap();
    let cert = reich::reich_rate(0.5, &params).unwrap();
    let rep =
        verify_certificate(&cert, &inst, &SamplingPlan::default(), &Slack::default()).unwrap();
    assert!(rep.pass);
    let worst = rep
        .samples
        .iter()
        .map(|s| s.observed)
        .fold(0.0f64, f64::max);
    assert!(
        worst <= 1e-10,
        "observed should be numerically zero, got {worst}"
    );
}

#[test]
fn snapshot_mismatch_is_refused() {
    let inst = cube_instance();
    // b = 1 < needed bound for a scaled-up starting point
    let big = Instance::new(Arc::clone(&inst.space), Arc::clone(&inst.op), v(&[3.0])).unwrap();
    let params = plant::PlantParams::for_instance(&inst.space, &inst.op, 1, 1).unwrap();
    let cert = plant::plant_rate(0.5, &params).unwrap();
    let err = verify_certificate(&cert, &big, &SamplingPlan::default(), &Slack::default());
    assert!(matches!(err, Err(accretive::Error::SnapshotMismatch(_))));
}

#[test]
fn empirical_threshold_outcomes() {
    let plan = SamplingPlan::default();
    // constant operator: the Plant quantity is identically zero
    let const_inst = Instance::new(
        Arc::new(SpaceInstance::euclidean(2).unwrap()),
        Arc::new(OperatorInstance::constant(v(&[1.0, 0.0]))),
        v(&[0.5, -0.5]),
    )
    .unwrap();
    let (outcome, _) = empirical_threshold(
        &const_inst,
        ClaimKind::PlantMain,
        0.1,
        Direction::AllTBelow,
        &plan,
    )
    .unwrap();
    assert_eq!(outcome, EmpiricalOutcome::AlwaysBelow);

    // identity operator, Reich quantity: the peak is ≈ 0.132·‖x‖ near
    // t = 1, so eps = 0.05 has a finite boundary on the way down
    let (outcome, _) = empirical_threshold(
        &identity_instance(),
        ClaimKind::ReichMain,
        0.05,
        Direction::AllTAbove,
        &plan,
    )
    .unwrap();
    match outcome {
        EmpiricalOutcome::Threshold(t) => {
            assert!(t.is_finite() && (1.0..20.0).contains(&t), "t={t}");
        }
        other => panic!("expected a finite boundary, got {other:?}"),
    }
}

#[test]
fn clarkson_integral_reduces_to_equality_at_t0() {
    let inst = cube_instance();
    let rec = quadrature::clarkson_integral_check(&inst, 0.7, 0.0, 129, &Slack::default()).unwrap();
    assert!(rec.pass);
    assert!(rec.observed.abs() <= 1e-9);
}

#[test]
fn clarkson_integral_closed_form_cases() {
    let slack = Slack::default();
    // 1-D linear: all quantities closed-form
    let lin = lin1d_instance();
    for (lambda, t) in [(0.5, 0.25), (1.0, 1.0), (2.0, 0.5)] {
        let rec = quadrature::clarkson_integral_check(&lin, lambda, t, 129, &slack).unwrap();
        assert!(
            rec.pass,
            "lin1d lambda={lambda} t={t}: {:+.3e}",
            rec.observed
        );
    }
    // constant operator: J_λx = x − λq, S(s)x = x − sq
    let con = Instance::new(
        Arc::new(SpaceInstance::euclidean(2).unwrap()),
        Arc::new(OperatorInstance::constant(v(&[0.3, 0.4]))),
        v(&[1.0, -1.0]),
    )
    .unwrap();
    for (lambda, t) in [(0.5, 0.25), (1.5, 1.0)] {
        let rec = quadrature::clarkson_integral_check(&con, lambda, t, 129, &slack).unwrap();
        assert!(
            rec.pass,
            "constant lambda={lambda} t={t}: {:+.3e}",
            rec.observed
        );
    }
}

#[test]
fn verify_reports_mark_cost_capped_path() {
    let inst = cube_instance();
    let params = plant::PlantParams::for_instance(&inst.space, &inst.op, 1, 1).unwrap();
    let cert = plant::plant_rate(0.25, &params).unwrap();
    let rep =
        verify_certificate(&cert, &inst, &SamplingPlan::default(), &Slack::default()).unwrap();
    assert!(rep
        .samples
        .iter()
        .all(|s| s.marker.as_deref() == Some("closed-form")));
}

#[test]
fn lp_space_axioms_pass_including_weak_convexity_bound() {
    // exercises the (p-1)eps^2/16 lower bound for 1 < p < 2 and the
    // Clarkson inequalities in a genuinely non-Hilbert norm
    let plan = SamplingPlan {
        random_samples: 2000,
        ..SamplingPlan::default()
    };
    for p in [1.5, 4.0] {
        let space = Arc::new(SpaceInstance::lp(2, p).unwrap());
        let inst = Instance::new(
            Arc::clone(&space),
            Arc::new(OperatorInstance::constant(Vector::zeros(2))),
            Vector::zeros(2),
        )
        .unwrap();
        let suite = accretive::verify::space_axiom_suite(&inst, &plan, Slack::default()).unwrap();
        for c in &suite.checks {
            assert!(
                c.pass,
                "lp({p}): {} failed with margin {:+.3e}",
                c.claim,
                c.worst_margin()
            );
        }
    }
}

#[test]
fn lp_plant_certificates_verify_with_empirical_modulus() {
    // the l4 instance goes through the sampled semi-inner modulus; its
    // certificates must still be sound (safety factor 1/2) and reports
    // must carry the empirical flag
    let space = Arc::new(SpaceInstance::lp(2, 4.0).unwrap());
    let inst = Instance::new(
        Arc::clone(&space),
        Arc::new(
            OperatorInstance::diagonal(vec![
                ScalarFn::power(3.0).unwrap(),
                ScalarFn::Linear { slope: 0.5 },
            ])
            .unwrap(),
        ),
        v(&[0.7, -0.4]),
    )
    .unwrap();
    let params = plant::PlantParams::for_instance(
        &inst.space,
        &inst.op,
        inst.b_bound().unwrap(),
        inst.n_bound().unwrap(),
    )
    .unwrap();
    assert!(params.snapshot().empirical_modulus);
    let plan = SamplingPlan::default();
    let slack = Slack::default();
    for eps in [0.5, 0.25] {
        for cert in [
            plant::plant_rate(eps, &params).unwrap(),
            plant::semigroup_roc_cert(eps, &params).unwrap(),
            plant::miyadera_cert(eps, &params).unwrap(),
        ] {
            let rep = verify_certificate(&cert, &inst, &plan, &slack).unwrap();
            assert!(
                rep.pass,
                "lp(4) {} at eps={eps}: margin {:+.3e}",
                rep.claim,
                rep.worst_margin()
            );
            assert!(rep
                .notes
                .iter()
                .any(|n| n.contains("empirically calibrated")));
        }
    }
}

#[test]
fn v_limit_consistency_across_starting_points() {
    // uniqueness of the limit: v_limit from distinct x agree within 2ε
    let space = Arc::new(SpaceInstance::euclidean(2).unwrap());
    let op = Arc::new(OperatorInstance::constant(v(&[1.0, 0.0])));
    let params = reich::ReichParams::for_instance(&space, &op, 3).unwrap();
    let ev = accretive::SemigroupEvaluator::new(&space, &op, 1e-12);
    for eps in [0.5, 0.25] {
        let a = reich::v_limit(&ev, &params, &v(&[0.5, -0.5]), eps).unwrap();
        let b = reich::v_limit(&ev, &params, &v(&[-1.0, 2.0]), eps).unwrap();
        let gap = space.norm(&a.sub(&b)).unwrap();
        assert!(gap <= 2.0 * eps + 1e-7, "eps={eps}: gap={gap}");
    }
}

#[test]
fn unique_limit_gap_certifies_near_infimum_values() {
    // any graph value within d + gap of the infimum is within ε of v_x
    let space = Arc::new(SpaceInstance::euclidean(2).unwrap());
    let op = Arc::new(OperatorInstance::constant(v(&[1.0, 0.0])));
    let params = reich::ReichParams::for_instance(&space, &op, 3).unwrap();
    let ev = accretive::SemigroupEvaluator::new(&space, &op, 1e-12);
    let eps = 0.5;
    let gap = reich::unique_limit_gap(eps, &params).unwrap();
    assert!(gap > 0.0 && gap <= eps / 8.0 + 1e-15);
    // the only graph value is q itself, with ‖q‖ = d exactly ≤ d + gap
    let z = v(&[1.0, 0.0]);
    let vx = reich::v_limit(&ev, &params, &v(&[0.5, -0.5]), eps / 2.0).unwrap();
    assert!(space.norm(&z.sub(&vx)).unwrap() <= eps);
}
