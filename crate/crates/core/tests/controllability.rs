mod support;

use fracsteer_core::controllability::{
    epsilon_sweep, grammian, residual_p, steer, synthesize_control, Grammian, SteerOptions,
    Steering,
};
use fracsteer_core::linalg::DenseMatrix;
use fracsteer_core::mild_solver::{ControlSignal, KernelTable, MildSolver};
use fracsteer_core::spectral_model::{
    load_problem, HistoryFunction, NonlocalTerm, ProblemParams, ProblemSpec, SpectralVector,
    TargetFile,
};
use fracsteer_core::Error;
use support::ml_oracle::MlOracle;

fn config(name: &str) -> String {
    format!("{}/../../configs/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn linear1d() -> ProblemSpec<f64> {
    load_problem::<f64>(config("linear1d.json")).unwrap()
}

fn flagship() -> (ProblemSpec<f64>, SpectralVector<f64>) {
    let spec = load_problem::<f64>(config("flagship.json")).unwrap();
    let h = TargetFile::load(config("h_flagship.json")).unwrap().to_vector(16).unwrap();
    (spec, h)
}

fn zero_history_spec(modes: usize) -> ProblemSpec<f64> {
    ProblemSpec::new(ProblemParams::new(1.5, 0.5, modes, 1.0)).unwrap()
}

fn options(dt: f64) -> SteerOptions<f64> {
    SteerOptions { dt, ..Default::default() }
}

fn free_terminal(spec: &ProblemSpec<f64>, dt: f64) -> SpectralVector<f64> {
    let solver = MildSolver::new(spec, dt).unwrap();
    let u = ControlSignal::zeros(*solver.grid(), spec.modes());
    solver.solve(&u, 1e-13, 50).unwrap().trajectory.terminal().clone()
}

#[test]
fn grammian_of_a_flat_kernel_is_the_horizon() {
    let kernel = KernelTable::<f64>::new(1.5, &[0.0], 0.01, 100).unwrap();
    let g = Grammian::from_kernel(&kernel, &DenseMatrix::identity(1), 100).unwrap();
    assert!((g.matrix()[(0, 0)] - 1.0).abs() < 1e-13);
    assert_eq!(g.quadrature(), "composite trapezoid");
}

// Gamma = \int_0^1 E_{1.5}(-s^1.5)^2 ds; with s = v^2 the integrand is smooth
fn scalar_grammian_reference() -> f64 {
    let oracle = MlOracle::new(1.5, 1.0, 200);
    let n = 200;
    let f = |v: f64| {
        let e = oracle.eval(-(v * v).powf(1.5));
        2.0 * v * e * e
    };
    let h = 1.0 / n as f64;
    let mut sum = f(0.0) + f(1.0);
    for k in 1..n {
        sum += if k % 2 == 1 { 4.0 } else { 2.0 } * f(k as f64 * h);
    }
    sum * h / 3.0
}

#[test]
fn scalar_grammian_matches_reference_integral() {
    let reference = scalar_grammian_reference();
    let spec = linear1d();
    let coarse = grammian(&spec, 1.0 / 200.0).unwrap().matrix()[(0, 0)];
    let fine = grammian(&spec, 1.0 / 400.0).unwrap().matrix()[(0, 0)];
    assert!((fine - reference).abs() < 1e-5, "{fine} vs {reference}");
    assert!((coarse - reference).abs() / (fine - reference).abs() > 3.0);
}

#[test]
fn zero_input_gives_zero_grammian() {
    let mut p = ProblemParams::new(1.5, 1.0, 4, 1.0);
    p.input = DenseMatrix::zeros(4);
    let spec = ProblemSpec::new(p).unwrap();
    let g = grammian(&spec, 0.01).unwrap();
    assert!(g.matrix().is_zero());
}

#[test]
fn grammian_is_symmetric_positive_definite_for_identity_input() {
    let (spec, _) = flagship();
    let g = grammian(&spec, 1.0 / 200.0).unwrap();
    assert_eq!(g.matrix().max_asymmetry(), 0.0);
    let eigs = g.eigenvalues();
    assert!(eigs[0] > 0.0);
    assert!(eigs.windows(2).all(|w| w[0] <= w[1]));

    let mut p = ProblemParams::new(1.5, 1.0, 3, 1.0);
    p.input = DenseMatrix::from_rows(&[vec![1.0, 0.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 0.0]]).unwrap();
    let degenerate = grammian(&ProblemSpec::new(p).unwrap(), 0.01).unwrap();
    assert!(degenerate.min_eigenvalue() > -1e-14);
}

#[test]
fn resolvent_inverts_the_shifted_grammian() {
    let (spec, h) = flagship();
    let g = grammian(&spec, 1.0 / 200.0).unwrap();
    for eps in [1e-1, 1e-3] {
        let q = g.resolvent(eps).unwrap().apply(&h);
        let back = SpectralVector::new(g.matrix().mul_vec(q.coeffs())) + &q * eps;
        assert!(back.distance(&h) < 1e-10 * (1.0 + h.norm()));
    }
    assert!(matches!(g.resolvent(0.0), Err(Error::Parameter(_))));
}

#[test]
fn residual_is_target_minus_free_response() {
    let spec = linear1d();
    let solver = MildSolver::new(&spec, 0.01).unwrap();
    let x = solver.solve(&ControlSignal::zeros(*solver.grid(), 1), 1e-13, 20).unwrap().trajectory;
    let h = SpectralVector::new(vec![2.0]);
    let p = residual_p(&spec, &x, &h).unwrap();
    assert!((p[0] - (2.0 - x.terminal()[0])).abs() < 1e-14);
    let p_free = residual_p(&spec, &x, x.terminal()).unwrap();
    assert!(p_free.norm() < 1e-14);
    assert!(matches!(residual_p(&spec, &x, &SpectralVector::zeros(2)), Err(Error::Domain(_))));
}

#[test]
fn residual_accounts_for_the_nonlocal_term() {
    let mut p = ProblemParams::<f64>::new(1.5, 0.0, 1, 1.0);
    p.phi = HistoryFunction::Constant(SpectralVector::new(vec![1.0]));
    p.nonlocal = vec![NonlocalTerm { weight: 0.5, anchor: 1.0 }];
    let spec = ProblemSpec::new(p).unwrap();
    let solver = MildSolver::new(&spec, 0.01).unwrap();
    let x = solver.solve(&ControlSignal::zeros(*solver.grid(), 1), 1e-13, 100).unwrap().trajectory;
    // no control, so x(T) = S(T)(phi(0) - g(x)(0)) and p(x) = h - x(T)
    let h = SpectralVector::new(vec![0.3]);
    let p = residual_p(&spec, &x, &h).unwrap();
    assert!((p[0] - (0.3 - x.terminal()[0])).abs() < 1e-12);
}

#[test]
fn synthesized_control_examples() {
    let spec = linear1d();
    let solver = MildSolver::new(&spec, 0.01).unwrap();
    let x = solver.solve(&ControlSignal::zeros(*solver.grid(), 1), 1e-13, 20).unwrap().trajectory;

    let u = synthesize_control(&spec, &x, x.terminal(), 0.1).unwrap();
    assert_eq!(u.sup_distance(&ControlSignal::zeros(*x.grid(), 1)), 0.0);

    // scalar case: u(t) = S(T - t) p / (eps + Gamma)
    let h = SpectralVector::new(vec![2.0]);
    let eps = 0.05;
    let gamma = grammian(&spec, 0.01).unwrap().matrix()[(0, 0)];
    let p = 2.0 - x.terminal()[0];
    let u = synthesize_control(&spec, &x, &h, eps).unwrap();
    for (j, s) in u.samples().iter().enumerate() {
        let t = j as f64 * 0.01;
        let kernel = solver.kernel().at(100 - j)[0];
        assert!((s[0] - kernel * p / (eps + gamma)).abs() < 1e-13, "t = {t}");
    }

    let mut params = ProblemParams::new(1.5, 0.0, 1, 1.0);
    params.input = DenseMatrix::zeros(1);
    params.phi = HistoryFunction::Constant(SpectralVector::new(vec![1.0]));
    let blocked = ProblemSpec::new(params).unwrap();
    let u = synthesize_control(&blocked, &x, &h, eps).unwrap();
    assert_eq!(u.energy(), 0.0);
}

#[test]
fn scalar_terminal_error_matches_regularization_identity() {
    let spec = linear1d();
    let dt = 1.0 / 200.0;
    let gamma = grammian(&spec, dt).unwrap().matrix()[(0, 0)];
    let h = SpectralVector::new(vec![2.0]);
    let p = 2.0 - free_terminal(&spec, dt)[0];
    for eps in [1e-1, 1e-2, 1e-3] {
        let out = steer(&spec, &h, eps, &options(dt)).unwrap();
        let expected = eps / (eps + gamma) * p.abs();
        assert!(
            (out.report.terminal_error - expected).abs() < 1e-10,
            "eps {eps}: {} vs {expected}",
            out.report.terminal_error
        );
        assert!(out.report.converged);
        assert!(out.report.outer_iters <= 3);
    }
}

#[test]
fn reachable_free_endpoint_needs_no_control() {
    let spec = linear1d();
    let dt = 0.01;
    let h = free_terminal(&spec, dt);
    let out = steer(&spec, &h, 1e-3, &options(dt)).unwrap();
    assert!(out.report.control_energy < 1e-20);
    assert!(out.report.terminal_error < 1e-12);
}

#[test]
fn control_scales_with_target_for_zero_history() {
    let spec = zero_history_spec(3);
    let dt = 0.01;
    let h = SpectralVector::new(vec![1.0, -0.5, 0.2]);
    let base = steer(&spec, &h, 1e-2, &options(dt)).unwrap();
    for c in [2.0, -3.0, 10.0] {
        let scaled = steer(&spec, &(&h * c), 1e-2, &options(dt)).unwrap();
        let expected = base.control.scaled(c);
        let tol = 1e-10 * (1.0 + c.abs() * expected.sup_distance(&ControlSignal::zeros(*expected.grid(), 3)));
        assert!(scaled.control.sup_distance(&expected) < tol);
        assert!((scaled.report.terminal_error - c.abs() * base.report.terminal_error).abs() < 1e-10);
    }
}

#[test]
fn terminal_error_does_not_increase_as_eps_shrinks() {
    let (spec, h) = flagship();
    let sweep = epsilon_sweep(&spec, &h, &[1e-1, 3e-2, 1e-2, 3e-3], &options(1.0 / 100.0)).unwrap();
    assert!(sweep.entries.iter().all(|e| e.converged()));
    assert!(sweep.non_increasing);
    let errors: Vec<f64> = sweep.entries.iter().map(|e| e.report().terminal_error).collect();
    assert!(errors.windows(2).all(|w| w[1] <= w[0]), "{errors:?}");
}

#[test]
fn blocked_input_leaves_the_residual() {
    let mut p = ProblemParams::new(1.5, 1.0, 2, 1.0);
    p.input = DenseMatrix::zeros(2);
    p.phi = HistoryFunction::Constant(SpectralVector::new(vec![1.0, 0.5]));
    let spec = ProblemSpec::new(p).unwrap();
    let dt = 0.01;
    let h = SpectralVector::new(vec![1.0, 1.0]);
    let gap = free_terminal(&spec, dt).distance(&h);
    let sweep = epsilon_sweep(&spec, &h, &[1.0, 1e-2, 1e-4], &options(dt)).unwrap();
    for entry in &sweep.entries {
        assert!((entry.report().terminal_error - gap).abs() < 1e-12);
        assert_eq!(entry.report().control_energy, 0.0);
    }
}

#[test]
fn sweep_rejects_bad_eps_lists() {
    let spec = linear1d();
    let h = SpectralVector::new(vec![1.0]);
    for list in [vec![], vec![1e-2, 1e-1], vec![1e-1, 1e-1], vec![1e-1, 0.0]] {
        assert!(matches!(epsilon_sweep(&spec, &h, &list, &options(0.01)), Err(Error::Parameter(_))));
    }
    let bad = SteerOptions { damping: 0.05, ..options(0.01) };
    assert!(Steering::new(&spec, bad).is_err());
}

#[test]
fn damping_reaches_the_same_fixed_point() {
    let (spec, h) = flagship();
    let plain = steer(&spec, &h, 1e-2, &options(1.0 / 100.0)).unwrap();
    let damped = steer(&spec, &h, 1e-2, &SteerOptions { damping: 0.5, ..options(1.0 / 100.0) }).unwrap();
    assert!(damped.report.outer_iters > plain.report.outer_iters);
    assert!((damped.report.terminal_error - plain.report.terminal_error).abs() < 1e-7);
}

#[test]
fn outer_failure_reports_update_history() {
    let (spec, h) = flagship();
    let opts = SteerOptions { max_outer: 3, ..options(1.0 / 100.0) };
    let err = steer(&spec, &h, 1e-2, &opts).unwrap_err();
    assert!(!err.report.converged);
    assert_eq!(err.report.control_updates.len(), 3);
    assert!(err.trajectory.is_some() && err.control.is_some());
    assert!(!err.inner_failure);
    assert!(matches!(Error::from(err), Error::NonConvergence { .. }));
}

#[test]
fn flagship_report_matches_golden() {
    let golden: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(format!("{}/tests/golden/flagship_steering.json", env!("CARGO_MANIFEST_DIR")))
            .unwrap(),
    )
    .unwrap();
    let (spec, h) = flagship();
    let eps = golden["eps"].as_f64().unwrap();
    let dt = golden["dt"].as_f64().unwrap();
    let out = steer(&spec, &h, eps, &options(dt)).unwrap();
    let expected_error = golden["terminal_error"].as_f64().unwrap();
    let expected_energy = golden["control_energy"].as_f64().unwrap();
    assert!((out.report.terminal_error - expected_error).abs() <= 1e-9 * expected_error);
    assert!((out.report.control_energy - expected_energy).abs() <= 1e-9 * expected_energy);
    assert_eq!(out.report.outer_iters as u64, golden["outer_iters"].as_u64().unwrap());

    // the frozen values are resolved: a finer grid agrees to well within 1%
    let fine = steer(&spec, &h, eps, &options(dt / 2.0)).unwrap();
    assert!((fine.report.terminal_error - expected_error).abs() < 1e-3 * expected_error);
    assert!((fine.report.control_energy - expected_energy).abs() < 1e-3 * expected_energy);
}

#[test]
fn single_precision_steering_tracks_double() {
    let mut p = ProblemParams::<f32>::new(1.5, 0.0, 1, 1.0);
    p.phi = HistoryFunction::Constant(SpectralVector::new(vec![1.0]));
    let spec32 = ProblemSpec::new(p).unwrap();
    let opts = SteerOptions::<f32> { dt: 0.01, tol: 1e-5, inner_tol: 1e-6, ..Default::default() };
    let out = steer(&spec32, &SpectralVector::new(vec![2.0]), 0.01, &opts).unwrap();
    let reference = steer(&linear1d(), &SpectralVector::new(vec![2.0]), 0.01, &options(0.01)).unwrap();
    assert!((out.report.terminal_error - reference.report.terminal_error).abs() < 1e-4);
}
