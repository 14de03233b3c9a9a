use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use fracsteer_core::controllability::{epsilon_sweep, SteerOptions, Steering, SteeringReport, SweepOutcome};
use fracsteer_core::mild_solver::{contraction_check, inner_factor, ControlSignal, MildSolver};
use fracsteer_core::ml_special::mittag_leffler;
use fracsteer_core::optimal_control::{minimize, ControlParameterization, CostDescriptor, CostFile, MinimizeOptions};
use fracsteer_core::spectral_model::{HistorySegment, ProblemFile, ProblemSpec, SpectralVector, TargetFile};
use fracsteer_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::args::{CheckArgs, MlArgs, OptimizeArgs, SolveArgs, SteerArgs, SteeringArgs, SweepArgs};
use crate::output::{deliver, num, RunManifest};
use crate::CliError;

/// Exit code and note of a command that produced its outputs.
pub struct Completion {
    pub code: i32,
    pub message: Option<String>,
}

impl Completion {
    fn ok() -> Self {
        Self { code: 0, message: None }
    }

    fn non_converged(message: String) -> Self {
        Self { code: 3, message: Some(message) }
    }
}

fn load_spec(path: &Path, manifest: &mut RunManifest) -> Result<ProblemSpec<f64>, CliError> {
    let file = ProblemFile::load(path)?;
    manifest.config = Some(path.to_path_buf());
    let spec = file.to_spec::<f64>()?;
    manifest.parameters = json!({ "problem": file });
    Ok(spec)
}

fn set_param(manifest: &mut RunManifest, key: &str, value: serde_json::Value) {
    if !manifest.parameters.is_object() {
        manifest.parameters = json!({});
    }
    manifest.parameters[key] = value;
}

fn write_out(out: Option<&PathBuf>, contents: &str, manifest: &mut RunManifest) -> Result<(), CliError> {
    deliver(out.map(PathBuf::as_path), contents, manifest)
        .map_err(|e| CliError::Io(format!("{}: {e}", out.map_or("stdout".into(), |p| p.display().to_string()))))
}

fn parse_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let bad = || CliError::Usage(format!("--grid expects from,to,steps, got {text:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let from: f64 = parts[0].parse().map_err(|_| bad())?;
    let to: f64 = parts[1].parse().map_err(|_| bad())?;
    let steps: usize = parts[2].parse().map_err(|_| bad())?;
    if steps == 0 || !from.is_finite() || !to.is_finite() {
        return Err(bad());
    }
    Ok((0..=steps).map(|i| from + (to - from) * i as f64 / steps as f64).collect())
}

pub fn ml(args: &MlArgs, manifest: &mut RunManifest) -> Result<Completion, CliError> {
    let zs = match (&args.grid, args.z) {
        (Some(grid), _) => parse_grid(grid)?,
        (None, Some(z)) => vec![z],
        (None, None) => return Err(CliError::Usage("either --z or --grid is required".into())),
    };
    manifest.parameters = json!({ "alpha": args.alpha, "beta": args.beta, "points": zs.len(), "grid": args.grid, "z": args.z });
    let mut csv = String::from("alpha,beta,z,value\n");
    for z in zs {
        let v = mittag_leffler(args.alpha, args.beta, z)?;
        writeln!(csv, "{},{},{},{}", num(args.alpha), num(args.beta), num(z), num(v)).expect("string write");
    }
    write_out(args.out.as_ref(), &csv, manifest)?;
    Ok(Completion::ok())
}

pub fn solve(args: &SolveArgs, manifest: &mut RunManifest) -> Result<Completion, CliError> {
    let spec = load_spec(&args.config, manifest)?;
    set_param(manifest, "dt", json!(args.dt));
    set_param(manifest, "tol", json!(args.tol));
    set_param(manifest, "max_iter", json!(args.max_iter));
    let solver = MildSolver::new(&spec, args.dt)?;
    let out = solver.solve(&ControlSignal::zeros(*solver.grid(), spec.modes()), args.tol, args.max_iter)?;
    manifest.warnings.extend(out.warning.clone());
    set_param(manifest, "picard_iterations", json!(out.residuals.len()));

    let mut csv = String::from("t");
    for n in 1..=spec.modes() {
        write!(csv, ",mode_{n}").expect("string write");
    }
    csv.push_str(",is_left_limit\n");
    for (t, x, left) in out.trajectory.rows() {
        csv.push_str(&num(t));
        for c in x.coeffs() {
            csv.push(',');
            csv.push_str(&num(*c));
        }
        csv.push_str(if left { ",true\n" } else { ",false\n" });
    }
    write_out(args.out.as_ref(), &csv, manifest)?;
    Ok(Completion::ok())
}

type SteeringInputs = (ProblemSpec<f64>, SpectralVector<f64>, SteerOptions<f64>);

fn steering_setup(args: &SteeringArgs, manifest: &mut RunManifest) -> Result<SteeringInputs, CliError> {
    let spec = load_spec(&args.config, manifest)?;
    let target = TargetFile::load(&args.target)?.to_vector::<f64>(spec.modes())?;
    let opts = SteerOptions {
        dt: args.dt,
        tol: args.tol,
        inner_tol: args.inner_tol,
        max_outer: args.max_outer,
        max_inner: args.max_inner,
        damping: args.damping,
    };
    set_param(
        manifest,
        "steering",
        json!({
            "target": args.target, "target_coeffs": target.coeffs(), "dt": args.dt, "tol": args.tol,
            "inner_tol": args.inner_tol, "max_outer": args.max_outer, "max_inner": args.max_inner,
            "damping": args.damping,
        }),
    );
    Ok((spec, target, opts))
}

#[derive(Serialize)]
struct SteerFile<'a> {
    #[serde(flatten)]
    report: &'a SteeringReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    terminal_state: Option<&'a [f64]>,
    target: &'a [f64],
    #[serde(skip_serializing_if = "Option::is_none")]
    failure: Option<&'a str>,
}

pub fn steer(args: &SteerArgs, manifest: &mut RunManifest) -> Result<Completion, CliError> {
    let (spec, target, opts) = steering_setup(&args.steering, manifest)?;
    if args.eps.is_nan() || args.eps <= 0.0 {
        return Err(Error::Parameter(format!("eps = {} must be positive", args.eps)).into());
    }
    set_param(manifest, "eps", json!(args.eps));
    let steering = Steering::new(&spec, opts)?;
    let (text, completion) = match steering.steer(&target, args.eps) {
        Ok(outcome) => {
            manifest.warnings.extend(outcome.report.warning.clone());
            let file = SteerFile {
                report: &outcome.report,
                terminal_state: Some(outcome.trajectory.terminal().coeffs()),
                target: target.coeffs(),
                failure: None,
            };
            (serde_json::to_string_pretty(&file), Completion::ok())
        }
        Err(err) => {
            let message = err.to_string();
            let file = SteerFile {
                report: &err.report,
                terminal_state: err.trajectory.as_ref().map(|t| t.terminal().coeffs()),
                target: target.coeffs(),
                failure: Some(&err.reason),
            };
            (serde_json::to_string_pretty(&file), Completion::non_converged(message))
        }
    };
    let mut text = text.map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    write_out(args.out.as_ref(), &text, manifest)?;
    Ok(completion)
}

fn parse_eps_list(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("--eps-list entry {s:?} is not a number")))
        })
        .collect()
}

pub fn sweep(args: &SweepArgs, manifest: &mut RunManifest) -> Result<Completion, CliError> {
    let (spec, target, opts) = steering_setup(&args.steering, manifest)?;
    let eps_list = parse_eps_list(&args.eps_list)?;
    set_param(manifest, "eps_list", json!(eps_list));
    let result = epsilon_sweep(&spec, &target, &eps_list, &opts)?;

    let mut csv = String::from("eps,terminal_error,control_energy,outer_iters\n");
    let mut failures = Vec::new();
    for entry in &result.entries {
        let r = entry.report();
        writeln!(csv, "{},{},{},{}", num(entry.eps), num(r.terminal_error), num(r.control_energy), r.outer_iters)
            .expect("string write");
        if let SweepOutcome::Failed { reason, .. } = &entry.outcome {
            failures.push(format!("eps = {}: {reason}", entry.eps));
        }
        manifest.warnings.extend(r.warning.clone());
    }
    manifest.warnings.dedup();
    set_param(manifest, "non_increasing", json!(result.non_increasing));
    set_param(
        manifest,
        "converged",
        json!(result.entries.iter().map(|e| e.converged()).collect::<Vec<_>>()),
    );
    write_out(args.out.as_ref(), &csv, manifest)?;
    if failures.is_empty() {
        Ok(Completion::ok())
    } else {
        Ok(Completion::non_converged(failures.join("; ")))
    }
}

pub fn optimize(args: &OptimizeArgs, manifest: &mut RunManifest) -> Result<Completion, CliError> {
    let spec = load_spec(&args.config, manifest)?;
    let cost_file = match &args.cost {
        Some(path) => CostFile::load(path)?,
        None => CostFile::default(),
    };
    let cost: CostDescriptor<f64> = cost_file.to_descriptor()?;
    let param = ControlParameterization::uniform(args.intervals, spec.modes(), args.lower, args.upper)?;
    let opts = MinimizeOptions {
        dt: args.dt,
        solve_tol: args.tol,
        step: args.step,
        max_evals: args.max_evals,
        stationarity_tol: args.stationarity_tol,
        ..MinimizeOptions::default()
    };
    set_param(
        manifest,
        "optimize",
        json!({
            "cost": cost_file, "intervals": args.intervals, "lower": args.lower, "upper": args.upper,
            "dt": args.dt, "tol": args.tol, "step": args.step, "max_evals": args.max_evals,
            "stationarity_tol": args.stationarity_tol, "fd_step": opts.fd_step,
        }),
    );
    let out = minimize(&spec, &cost, &param, &opts)?;
    let file = json!({
        "J_opt": out.j_opt,
        "params": out.params,
        "history": out.history,
        "converged": out.converged(),
        "stop": out.stop,
        "stationarity": out.stationarity,
        "iterations": out.iterations,
        "evaluations": out.evaluations,
        "intervals": args.intervals,
        "modes": spec.modes(),
    });
    let mut text = serde_json::to_string_pretty(&file).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    write_out(args.out.as_ref(), &text, manifest)?;
    if out.converged() {
        Ok(Completion::ok())
    } else {
        Ok(Completion::non_converged(format!(
            "stopped ({:?}) at stationarity {:e} after {} evaluations",
            out.stop, out.stationarity, out.evaluations
        )))
    }
}

/// Largest observed `||f(x) - f(y)|| / ||x - y||` with the history held fixed,
/// and the same ratio for history perturbations with the state held fixed.
fn sample_lipschitz(spec: &ProblemSpec<f64>, samples: usize, seed: u64) -> Result<(f64, f64), CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = spec.modes();
    let r = spec.delay();
    let (step, count) = if r > 0.0 { (r / 8.0, 9) } else { (1.0, 1) };
    let draw = |rng: &mut ChaCha8Rng| SpectralVector::new((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect());
    let (mut state, mut history) = (0.0_f64, 0.0_f64);
    for _ in 0..samples {
        let t = rng.gen_range(0.0..=spec.horizon());
        let (x, y, z, w) = (draw(&mut rng), draw(&mut rng), draw(&mut rng), draw(&mut rng));
        let hz = HistorySegment::constant(step, count, z.clone())?;
        let hw = HistorySegment::constant(step, count, w.clone())?;
        let dx = x.distance(&y);
        if dx > 0.0 {
            state = state.max(spec.eval_f(t, &x, &hz)?.distance(&spec.eval_f(t, &y, &hz)?) / dx);
        }
        let dh = z.distance(&w);
        if dh > 0.0 {
            history = history.max(spec.eval_f(t, &x, &hz)?.distance(&spec.eval_f(t, &x, &hw)?) / dh);
        }
    }
    Ok((state, history))
}

pub fn check(args: &CheckArgs, seed: u64, manifest: &mut RunManifest) -> Result<Completion, CliError> {
    let spec = load_spec(&args.config, manifest)?;
    set_param(manifest, "eps", json!(args.eps));
    set_param(manifest, "samples", json!(args.samples));
    let factor = contraction_check(&spec, args.eps)?;
    let inner = inner_factor(spec.constants(), spec.horizon(), spec.holder_p())?;
    let (l1, l2, _) = spec.nonlinearity().constants(spec.delay());
    let (state, history) = sample_lipschitz(&spec, args.samples, seed)?;
    let slack = 1.0 + 1e-9;
    let state_ok = l1.is_none_or(|l| state <= l * slack + 1e-15);
    let history_ok = l2.is_none_or(|l| history <= l * slack + 1e-15);
    if inner >= 1.0 {
        manifest.warnings.push(format!("inner contraction factor {inner} >= 1"));
    }
    let report = json!({
        "contraction_factor": factor,
        "eps": args.eps,
        "contractive": factor < 1.0,
        "inner_factor": inner,
        "holder_p": spec.holder_p(),
        "constants": spec.constants(),
        "lipschitz": {
            "declared_state": l1,
            "declared_history": l2,
            "sampled_state": state,
            "sampled_history": history,
            "samples": args.samples,
            "consistent": state_ok && history_ok,
        },
    });
    let mut text = serde_json::to_string_pretty(&report).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    write_out(args.out.as_ref(), &text, manifest)?;
    if state_ok && history_ok {
        Ok(Completion::ok())
    } else {
        Err(CliError::Core(Error::Config(format!(
            "sampled Lipschitz ratios ({state}, {history}) exceed the declared constants ({l1:?}, {l2:?})"
        ))))
    }
}
