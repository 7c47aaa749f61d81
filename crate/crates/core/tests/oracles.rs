mod common;

use common::*;
use proxkit::functionals::ProxFunctional;
use proxkit::linalg::{LinearOperator, Vector};
use proxkit::newton::{l1_ssn, L1_SSN_STEP_FACTOR};
use proxkit::problems::{
    gen, kkt_residual, oracle_boxqp, oracle_lasso, GenParams, OracleSolution, ProblemSpec, ORACLE_MAX_DIM,
};
use proxkit::splitting::{
    douglas_rachford, fista, primal_dual, prox_gradient, CompositeProblem, LeastSquaresTerm, SolverConfig,
};

fn lasso_solutions(spec: &ProblemSpec, tol: f64) -> Vec<(&'static str, Vector)> {
    let (a, b, alpha) = lasso_data(spec);
    let n = spec.dim();
    let x0 = Vector::zeros(n);
    let cfg = SolverConfig::new(500_000, tol);
    let p = spec.composite().unwrap();
    let op = LinearOperator::new(a.clone());
    let l = op.op_norm(1e-12, 10_000).value.powi(2);
    let split = CompositeProblem::split(
        ProxFunctional::L1 { weight: alpha },
        ProxFunctional::squared_distance(b.clone()),
        op.clone(),
    );
    let f = spec.smooth_part().unwrap();
    vec![
        ("prox_gradient", prox_gradient(&p, &x0, &cfg).unwrap().0),
        ("fista", fista(&p, &x0, &cfg).unwrap().0),
        (
            "douglas_rachford",
            douglas_rachford(
                &LeastSquaresTerm::new(op, b.clone()).unwrap(),
                &ProxFunctional::L1 { weight: alpha },
                &x0,
                &cfg.clone().with_step(1.0 / l),
            )
            .unwrap()
            .0,
        ),
        (
            "primal_dual",
            primal_dual(&split, &x0, &Vector::zeros(b.len()), &cfg).unwrap().0,
        ),
        (
            "l1_ssn",
            l1_ssn(&f, alpha, L1_SSN_STEP_FACTOR / l, &x0, &SolverConfig::new(100, 1e-13))
                .unwrap()
                .0,
        ),
    ]
}

#[test]
fn oracle_is_a_global_lower_bound() {
    let spec = gen(
        &GenParams::Lasso {
            n: 6,
            m: 10,
            alpha: 0.4,
        },
        6,
    )
    .unwrap();
    let oracle = oracle_lasso(&spec, ORACLE_MAX_DIM).unwrap();
    assert_eq!(oracle.patterns_checked, 3usize.pow(6));
    for (name, x) in lasso_solutions(&spec, 1e-8) {
        let j = spec.objective(&x).unwrap();
        assert!(oracle.objective <= j + 1e-9, "{name}: {j} < {}", oracle.objective);
    }
}

#[test]
fn every_solver_reaches_the_oracle_on_small_instances() {
    for seed in 0..14 {
        let spec = small_lasso(seed);
        let oracle = oracle_lasso(&spec, ORACLE_MAX_DIM).unwrap();
        assert!(
            (spec.objective(&oracle.x_opt).unwrap() - oracle.objective).abs()
                <= 1e-15 * oracle.objective.abs().max(1.0)
        );
        for (name, x) in lasso_solutions(&spec, 1e-10) {
            let j = spec.objective(&x).unwrap();
            assert!(
                (j - oracle.objective).abs() <= 1e-8,
                "seed {seed} {name}: {j} vs {}",
                oracle.objective
            );
        }

        let spec = small_boxqp(seed);
        let oracle = oracle_boxqp(&spec, ORACLE_MAX_DIM).unwrap();
        let p = spec.composite().unwrap();
        let x0 = Vector::zeros(spec.dim());
        let cfg = SolverConfig::new(500_000, 1e-10);
        for (name, x) in [
            ("prox_gradient", prox_gradient(&p, &x0, &cfg).unwrap().0),
            ("fista", fista(&p, &x0, &cfg).unwrap().0),
        ] {
            let j = spec.objective(&x).unwrap();
            assert!(
                (j - oracle.objective).abs() <= 1e-8,
                "seed {seed} {name}: {j} vs {}",
                oracle.objective
            );
        }
    }
}

#[test]
fn kkt_residual_bands() {
    for seed in 0..10 {
        for spec in [small_lasso(seed), small_boxqp(seed)] {
            let oracle = match spec {
                ProblemSpec::Lasso { .. } => oracle_lasso(&spec, ORACLE_MAX_DIM).unwrap(),
                _ => oracle_boxqp(&spec, ORACLE_MAX_DIM).unwrap(),
            };
            assert!(oracle.kkt_residual <= 1e-10, "{}", oracle.kkt_residual);
            let n = spec.dim();
            if oracle.x_opt.norm() > 0.0 {
                assert!(kkt_residual(&spec, &Vector::zeros(n), None).unwrap() > 0.0);
            }
            let mut rng = rng(seed);
            let dir = normal_vector(&mut rng, n, 1.0);
            let perturbed = oracle.x_opt.axpy(1e-3 / dir.norm(), &dir);
            let r = kkt_residual(&spec, &perturbed, None).unwrap();
            assert!(r > 0.0 && r < 1e-1, "{} seed {seed}: {r}", spec.kind_name());
        }
    }
}

#[test]
fn huber_residual_vanishes_at_the_minimizer() {
    let spec = gen(
        &GenParams::HuberDenoise {
            n: 20,
            gamma: 0.5,
            alpha: 0.3,
        },
        4,
    )
    .unwrap();
    let p = spec.composite().unwrap();
    let (x, trace) = fista(&p, &Vector::zeros(20), &SolverConfig::new(100_000, 1e-13)).unwrap();
    assert!(trace.is_converged());
    assert!(kkt_residual(&spec, &x, None).unwrap() <= 1e-10);
    assert!(kkt_residual(&spec, &Vector::zeros(20), None).unwrap() > 0.0);
}

#[test]
fn control_oracle_agrees_with_objective_form() {
    let spec = gen(
        &GenParams::Control {
            n: 5,
            m: 7,
            alpha: 4.0,
            lower: -0.15,
            upper: 0.15,
        },
        3,
    )
    .unwrap();
    let oracle = oracle_boxqp(&spec, ORACLE_MAX_DIM).unwrap();
    assert!(oracle.kkt_residual <= 1e-10);
    assert!(oracle.x_opt.iter().all(|&u| (-0.15..=0.15).contains(&u)));
    let p = spec.composite().unwrap();
    let (x, _) = prox_gradient(&p, &Vector::zeros(5), &SolverConfig::new(100_000, 1e-13)).unwrap();
    assert!(x.distance(&oracle.x_opt) <= 1e-10);
}

#[test]
fn certificates_round_trip_as_json() {
    let spec = small_lasso(3);
    let oracle = oracle_lasso(&spec, ORACLE_MAX_DIM).unwrap();
    let json = serde_json::to_string(&oracle).unwrap();
    let back: OracleSolution = serde_json::from_str(&json).unwrap();
    assert_eq!(back, oracle);
    let spec_back = ProblemSpec::from_json(&spec.to_json().unwrap()).unwrap();
    assert_eq!(spec_back, spec);
}

#[test]
fn traces_are_reproducible_apart_from_timing() {
    let strip = |csv: String| -> Vec<String> {
        csv.lines()
            .map(|l| l.rsplit_once(',').map_or(l, |(head, _)| head).to_string())
            .collect()
    };
    let spec = small_lasso(5);
    let p = spec.composite().unwrap();
    let x0 = Vector::zeros(spec.dim());
    let cfg = SolverConfig::new(300, 1e-12);
    let a = fista(&p, &x0, &cfg).unwrap().1.to_csv();
    let b = fista(&p, &x0, &cfg).unwrap().1.to_csv();
    assert_eq!(strip(a), strip(b));
}
