use fracsteer_core::mild_solver::{
    contraction_check, contraction_factor, convolve, solve_mild, ControlSignal, KernelTable,
    MildSolver, TimeGrid, Trajectory,
};
use fracsteer_core::ml_special::mittag_leffler;
use fracsteer_core::spectral_model::{
    eval_g, load_problem, ConstantsLedger, HistoryFunction, Impulse, ImpulseMap, Nonlinearity,
    NonlocalTerm, PointwiseMap, ProblemParams, ProblemSpec, SpectralVector,
};
use fracsteer_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ALPHA: f64 = 1.5;

fn config(name: &str) -> String {
    format!("{}/../../configs/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn scalar_spec(impulses: Vec<Impulse<f64>>) -> ProblemSpec<f64> {
    let mut p = ProblemParams::new(ALPHA, 0.0, 1, 1.0);
    p.phi = HistoryFunction::Constant(SpectralVector::new(vec![1.0]));
    p.impulses = impulses;
    ProblemSpec::new(p).unwrap()
}

fn e_alpha(t: f64) -> f64 {
    mittag_leffler(ALPHA, 1.0, -t.powf(ALPHA)).unwrap()
}

#[test]
fn convolution_examples() {
    let spec = scalar_spec(vec![]);
    let grid = TimeGrid::new(1.0, 0.0, 0.01).unwrap();
    let zeros = vec![SpectralVector::zeros(1); 101];
    assert_eq!(convolve(&spec, &grid, &zeros, 0.7).unwrap(), SpectralVector::zeros(1));
    assert!(matches!(convolve(&spec, &grid, &zeros, 0.705), Err(Error::Domain(_))));

    // lambda = 0: the kernel is identically one
    let ones = vec![SpectralVector::new(vec![1.0]); 101];
    let flat = KernelTable::new(ALPHA, &[0.0], 0.01, 100).unwrap();
    for &i in &[0usize, 37, 100] {
        let v = flat.convolve_at(&ones, &ones, i)[0];
        assert!((v - i as f64 * 0.01).abs() < 1e-13);
    }

    // lambda = -1 against a ten times finer grid; both converge at second order
    let coarse = convolve(&spec, &grid, &ones, 1.0).unwrap()[0];
    let fine_grid = TimeGrid::new(1.0, 0.0, 0.001).unwrap();
    let fine_ones = vec![SpectralVector::new(vec![1.0]); 1001];
    let fine = convolve(&spec, &fine_grid, &fine_ones, 1.0).unwrap()[0];
    let exact = mittag_leffler(ALPHA, 2.0, -1.0).unwrap();
    assert!((coarse - fine).abs() < 1e-4, "{coarse} vs {fine}");
    assert!((fine - exact).abs() < 1e-7);
    assert!((coarse - exact).abs() / (fine - exact).abs() > 50.0);
}

#[test]
fn free_response_is_the_mittag_leffler_function() {
    let spec = scalar_spec(vec![]);
    let solver = MildSolver::new(&spec, 1.0 / 200.0).unwrap();
    let out = solver.solve(&ControlSignal::zeros(*solver.grid(), 1), 1e-12, 20).unwrap();
    for i in 0..=200 {
        let t = solver.grid().forward_time(i);
        assert!((out.trajectory.at_forward(i)[0] - e_alpha(t)).abs() < 1e-13);
    }
    assert!(out.warning.is_none());
}

#[test]
fn one_reset_impulse_composes_in_closed_form() {
    let spec = scalar_spec(vec![Impulse { time: 0.5, map: ImpulseMap::Linear(-1.0) }]);
    let solver = MildSolver::new(&spec, 1.0 / 400.0).unwrap();
    let traj = solver.solve(&ControlSignal::zeros(*solver.grid(), 1), 1e-12, 20).unwrap().trajectory;
    let x_left = e_alpha(0.5);
    for i in 0..=400 {
        let t = solver.grid().forward_time(i);
        let expected = if t <= 0.5 { e_alpha(t) } else { e_alpha(t) - e_alpha(t - 0.5) * x_left };
        assert!((traj.at_forward(i)[0] - expected).abs() < 1e-12, "t = {t}");
    }
    let jump = &traj.jumps()[0];
    assert!((jump.left[0] - x_left).abs() < 1e-13);
    assert_eq!(jump.right[0], 0.0);
}

#[test]
fn solve_mild_wrapper_uses_the_control_grid() {
    let spec = scalar_spec(vec![]);
    let grid = TimeGrid::for_spec(&spec, 0.01).unwrap();
    let traj = solve_mild(&spec, &ControlSignal::zeros(grid, 1), 1e-12, 10).unwrap();
    assert_eq!(traj.grid(), &grid);
    assert!((traj.terminal()[0] - e_alpha(1.0)).abs() < 1e-13);
    let wrong = TimeGrid::new(2.0, 0.0, 0.01).unwrap();
    assert!(solve_mild(&spec, &ControlSignal::zeros(wrong, 1), 1e-12, 10).is_err());
}

fn constant_control_error(steps: usize) -> f64 {
    let spec = load_problem::<f64>(config("linear1d.json")).unwrap();
    let solver = MildSolver::new(&spec, 1.0 / steps as f64).unwrap();
    let u = ControlSignal::constant(*solver.grid(), SpectralVector::new(vec![1.0]));
    let traj = solver.solve(&u, 1e-13, 20).unwrap().trajectory;
    (0..=steps)
        .map(|i| {
            let t = solver.grid().forward_time(i);
            let exact = e_alpha(t) + t * mittag_leffler(ALPHA, 2.0, -t.powf(ALPHA)).unwrap();
            (traj.at_forward(i)[0] - exact).abs()
        })
        .fold(0.0, f64::max)
}

#[test]
fn grid_refinement_is_second_order() {
    let errors: Vec<f64> = [100, 200, 400].iter().map(|&n| constant_control_error(n)).collect();
    for w in errors.windows(2) {
        assert!(w[0] / w[1] >= 3.5, "errors {errors:?}");
    }
}

#[test]
fn flagship_refinement_is_consistent() {
    let spec = load_problem::<f64>(config("flagship.json")).unwrap();
    let solve = |steps: usize| {
        let solver = MildSolver::new(&spec, 1.0 / steps as f64).unwrap();
        solver.solve(&ControlSignal::zeros(*solver.grid(), 16), 1e-11, 100).unwrap().trajectory
    };
    let (a, b, c) = (solve(200), solve(400), solve(800));
    // compare on the nodes of the coarsest grid
    let diff = |x: &Trajectory<f64>, y: &Trajectory<f64>, stride: usize| {
        (0..=200)
            .map(|i| x.at_forward(i * stride).distance(y.at_forward(2 * i * stride)))
            .fold(0.0, f64::max)
    };
    let d_coarse = diff(&a, &b, 1);
    let d_fine = diff(&b, &c, 2);
    // Richardson estimate of the 1/400 error from the 1/800 solution
    let extrapolated = d_fine * 4.0 / 3.0;
    assert!(d_fine < d_coarse);
    assert!(d_coarse <= 4.0 * extrapolated, "{d_coarse:e} vs {extrapolated:e}");
}

#[test]
fn jumps_equal_impulse_of_left_limit() {
    let spec = load_problem::<f64>(config("flagship.json")).unwrap();
    let solver = MildSolver::new(&spec, 1.0 / 200.0).unwrap();
    let traj = solver.solve(&ControlSignal::zeros(*solver.grid(), 16), 1e-10, 100).unwrap().trajectory;
    assert_eq!(traj.jumps().len(), 1);
    for jump in traj.jumps() {
        let expected = spec.eval_impulse(jump.impulse, &jump.left).unwrap();
        let actual = &jump.right - &jump.left;
        assert!(actual.distance(&expected) <= 1e-15 * (1.0 + jump.left.norm()));
    }
    // two output rows at the impulse node, left limit first
    let rows = traj.rows();
    let at_jump: Vec<_> = rows.iter().filter(|r| (r.0 - 0.5).abs() < 1e-12).collect();
    assert_eq!(at_jump.len(), 2);
    assert!(at_jump[0].2 && !at_jump[1].2);
}

#[test]
fn superposition_holds_for_linear_dynamics() {
    let mut p = ProblemParams::new(1.3, 0.5, 4, 1.0);
    p.phi = HistoryFunction::Constant(SpectralVector::new(vec![1.0, -0.5, 0.25, 0.1]));
    let spec = ProblemSpec::new(p).unwrap();
    let solver = MildSolver::new(&spec, 0.01).unwrap();
    let grid = *solver.grid();
    let u1 = ControlSignal::from_fn(grid, |t: f64| SpectralVector::new(vec![t.sin(), 1.0, -t, 0.0])).unwrap();
    let u2 = ControlSignal::from_fn(grid, |t: f64| SpectralVector::new(vec![0.3, t * t, 2.0, (3.0 * t).cos()])).unwrap();
    let solve = |u: &ControlSignal<f64>| solver.solve(u, 1e-13, 20).unwrap().trajectory;
    let sum = solve(&u1.combine(1.0, &u2, 1.0));
    let free = solve(&ControlSignal::zeros(grid, 4));
    let (x1, x2) = (solve(&u1), solve(&u2));
    for i in 0..=100 {
        let lhs = sum.at_forward(i);
        let rhs = &(x1.at_forward(i) + x2.at_forward(i)) - free.at_forward(i);
        assert!(lhs.distance(&rhs) < 1e-8);
    }
}

fn random_config(rng: &mut impl Rng) -> ProblemSpec<f64> {
    let modes = rng.gen_range(2..=6);
    let alpha = rng.gen_range(1.2..1.8);
    let mut p = ProblemParams::new(alpha, rng.gen_range(0.0..2.0), modes, 1.0);
    p.delay = 0.1;
    let budget = rng.gen_range(0.1..0.5);
    let split = rng.gen_range(0.2..0.8);
    p.nonlocal = vec![
        NonlocalTerm { weight: budget * split, anchor: 0.2 * rng.gen_range(1..=4) as f64 },
        NonlocalTerm { weight: -budget * (1.0 - split), anchor: 1.0 },
    ];
    p.impulses = vec![Impulse { time: 0.5, map: ImpulseMap::Linear(rng.gen_range(-0.2..0.2)) }];
    p.phi = HistoryFunction::Affine {
        offset: SpectralVector::new((0..modes).map(|_| rng.gen_range(-1.0..1.0)).collect()),
        slope: SpectralVector::new((0..modes).map(|_| rng.gen_range(-1.0..1.0)).collect()),
    };
    p.nonlinearity = Nonlinearity::relaxation(
        PointwiseMap::Sin,
        rng.gen_range(-0.1..0.1),
        PointwiseMap::Sin,
        rng.gen_range(-0.1..0.1),
        1.0,
    );
    ProblemSpec::new(p).unwrap()
}

#[test]
fn residuals_decay_geometrically_when_contractive() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for trial in 0..5 {
        let spec = random_config(&mut rng);
        let factor = fracsteer_core::mild_solver::inner_factor(spec.constants(), 1.0, spec.holder_p()).unwrap();
        assert!(factor < 1.0, "trial {trial}: factor {factor}");
        let solver = MildSolver::new(&spec, 0.01).unwrap();
        let out = solver.solve(&ControlSignal::zeros(*solver.grid(), spec.modes()), 1e-12, 100).unwrap();
        assert!(out.warning.is_none());
        let r = &out.residuals;
        for k in 1..r.len() - 1 {
            assert!(r[k + 1] <= r[k], "trial {trial}: residuals {r:?}");
            assert!(r[k + 1] <= factor * r[k] * 1.01 + 1e-15, "trial {trial}: rate above {factor}");
        }
    }
}

#[test]
fn nonlocal_condition_holds_after_convergence() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let tol = 1e-10;
    for _ in 0..5 {
        let spec = random_config(&mut rng);
        let solver = MildSolver::new(&spec, 0.01).unwrap();
        let traj = solver.solve(&ControlSignal::zeros(*solver.grid(), spec.modes()), tol, 100).unwrap().trajectory;
        for g in 0..=solver.grid().origin() {
            let s = solver.grid().time(g);
            let lhs = &traj.value_at(s).unwrap() + &eval_g(&spec, &traj, s).unwrap();
            assert!(lhs.distance(&spec.phi_at(s)) <= tol);
        }
    }
}

#[test]
fn non_convergence_carries_residual_history() {
    let spec = load_problem::<f64>(config("flagship.json")).unwrap();
    let solver = MildSolver::new(&spec, 0.01).unwrap();
    match solver.solve(&ControlSignal::zeros(*solver.grid(), 16), 1e-14, 3) {
        Err(Error::NonConvergence { residuals }) => assert_eq!(residuals.len(), 3),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn contraction_factor_arithmetic() {
    assert_eq!(contraction_factor(&ConstantsLedger::zero(), 1.0, 0.25, 1.0).unwrap(), 0.0);
    let ledger = ConstantsLedger {
        solution_bound: 1.0,
        input_norm: 1.0,
        impulse_bound: None,
        impulse_lipschitz: 0.1,
        nonlocal_lipschitz: 0.1,
        impulse_count: 1,
        norm_l1: Some(0.0),
        norm_l2: Some(0.0),
        norm_m1: Some(0.0),
    };
    assert!((contraction_factor(&ledger, 1.0, 0.25, 1.0).unwrap() - 0.4_f64).abs() <= 1e-12);
    let missing = ConstantsLedger { norm_l1: None, ..ledger.clone() };
    assert!(matches!(contraction_factor(&missing, 1.0, 0.25, 1.0), Err(Error::Config(_))));
    assert!(contraction_factor(&ledger, 1.0, 0.25, 0.0).is_err());
}

#[test]
fn flagship_contraction_matches_golden() {
    let spec = load_problem::<f64>(config("flagship.json")).unwrap();
    let golden: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(format!("{}/tests/golden/flagship_contraction.json", env!("CARGO_MANIFEST_DIR")))
            .unwrap(),
    )
    .unwrap();
    let expected = golden["factor"].as_f64().unwrap();
    let got = contraction_check(&spec, golden["eps"].as_f64().unwrap()).unwrap();
    assert!((got - expected).abs() <= 1e-12 * expected, "{got} vs {expected}");
}

#[test]
fn single_precision_solver_tracks_double() {
    let mut p = ProblemParams::<f32>::new(1.5, 0.0, 1, 1.0);
    p.phi = HistoryFunction::Constant(SpectralVector::new(vec![1.0]));
    let spec = ProblemSpec::new(p).unwrap();
    let solver = MildSolver::new(&spec, 0.01).unwrap();
    let traj = solver.solve(&ControlSignal::zeros(*solver.grid(), 1), 1e-5, 20).unwrap().trajectory;
    assert!((traj.terminal()[0] as f64 - e_alpha(1.0)).abs() < 1e-5);
}
