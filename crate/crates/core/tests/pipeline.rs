use carleman_core::benchmark::{relative_error_field, run_all, Summary};
use carleman_core::iteration::{run, run_from};
use carleman_core::{
    catalog, io, run_benchmark, BenchConfig, BenchmarkId, Field, Grid2D, IterationParams,
    LinearMethod, Rect, SolverParams,
};

fn grid(n: usize) -> Grid2D {
    Grid2D::square(n, Rect::default()).unwrap()
}

fn strip_times(mut r: carleman_core::IterationReport) -> carleman_core::IterationReport {
    r.records.iter_mut().for_each(|rec| rec.wall_ms = 0.0);
    r
}

#[test]
fn one_iteration_records_one_increment() {
    let spec = catalog(BenchmarkId::Ql1);
    let ip = IterationParams { max_iter: 1, ..Default::default() };
    let (_, report) = run(&spec, &grid(21), &SolverParams::default(), &ip).unwrap();
    assert_eq!(report.iterations(), 1);
    assert_eq!(report.records.len(), 2);
    assert!(report.records[0].increment_l2.is_none());
    assert!(run(&spec, &grid(21), &SolverParams::default(), &IterationParams { max_iter: 0, ..ip }).is_err());
}

#[test]
fn stopping_rule_ends_the_report() {
    let spec = catalog(BenchmarkId::Ql2);
    let (_, report) = run(&spec, &grid(40), &SolverParams::default(), &IterationParams::default()).unwrap();
    assert!(report.converged);
    let inc = report.increments();
    let kappa0 = IterationParams::default().kappa0;
    assert!(*inc.last().unwrap() <= kappa0);
    assert!(inc[..inc.len() - 1].iter().all(|v| *v > kappa0));
    assert_eq!(report.records.len(), inc.len() + 1);
    assert!(report.theta_hat.unwrap() < 1.0);
}

#[test]
fn ql1_converges_quickly() {
    let spec = catalog(BenchmarkId::Ql1);
    let (_, report) = run(&spec, &grid(80), &SolverParams::default(), &IterationParams::default()).unwrap();
    assert!(report.converged);
    assert!(report.iterations() <= 4, "{} iterations", report.iterations());
}

#[test]
fn runs_are_deterministic() {
    let spec = catalog(BenchmarkId::Hj4);
    let ip = IterationParams { max_iter: 4, ..Default::default() };
    let (u1, r1) = run(&spec, &grid(30), &SolverParams::default(), &ip).unwrap();
    let (u2, r2) = run(&spec, &grid(30), &SolverParams::default(), &ip).unwrap();
    assert_eq!(u1, u2);
    assert_eq!(strip_times(r1), strip_times(r2));
}

#[test]
fn solver_failure_keeps_partial_report() {
    let spec = catalog(BenchmarkId::Ql1);
    let g = grid(30);
    let u0 = Field::from_fn(g, |p| (spec.true_solution().unwrap())(p)).unwrap();
    let sp = SolverParams { method: LinearMethod::Iterative, ls_max_iter: 2, ..Default::default() };
    let aborted = run_from(&spec, u0, &sp, &IterationParams::default()).unwrap_err();
    assert_eq!(aborted.partial.records.len(), 1);
    assert!(matches!(aborted.error, carleman_core::Error::LinearSolver { .. }));
}

#[test]
fn parallel_runs_match_sequential_and_coarse_grid_tracks_fine() {
    let coarse = BenchConfig { n: 40, ..Default::default() };
    let seq = run_all(&BenchmarkId::ALL, &coarse, 1).unwrap();
    let par = run_all(&BenchmarkId::ALL, &coarse, 4).unwrap();
    assert_eq!(Summary::from_reports(&seq), Summary::from_reports(&par));

    let fine = run_all(&BenchmarkId::ALL, &BenchConfig::default(), 4).unwrap();
    for (c, f) in seq.iter().zip(&fine) {
        let (ec, ef) = (c.rel_linf_error.unwrap(), f.rel_linf_error.unwrap());
        // QL1 sits at roundoff on both grids
        assert!(ec <= 5.0 * ef || ec < 1e-5, "{}: N=40 {ec:.3e} vs N=80 {ef:.3e}", c.test);
    }
    let mut hj: Vec<f64> = fine[2..].iter().map(|r| r.rel_linf_error.unwrap()).collect();
    hj.sort_by(f64::total_cmp);
    let median = 0.5 * (hj[2] + hj[3]);
    assert!((0.003..=0.12).contains(&median), "median HJ error {median}");
}

#[test]
fn lambda_zero_still_runs() {
    let mut config = BenchConfig { n: 30, ..Default::default() };
    config.solver.carleman.lambda = 0.0;
    let report = run_benchmark(BenchmarkId::Hj1, &config).unwrap();
    assert!(report.failure.is_none());
    assert!(report.rel_linf_error.unwrap().is_finite());
}

#[test]
fn error_metric_uses_current_scale() {
    let g = grid(11);
    let truth = Field::from_fn(g, |p| p[0] + 2.0).unwrap();
    let u = Field::from_fn(g, |p| p[0] + 2.0 + 0.03 * p[1]).unwrap();
    let e = relative_error_field(&u, &truth).unwrap().max_abs();
    let shift = Field::constant(g, 10.0);
    let e_shift = relative_error_field(&(&u + &shift), &(&truth + &shift)).unwrap().max_abs();
    assert!((e - 0.01).abs() < 1e-14);
    assert!((e_shift - 0.03 / 13.0).abs() < 1e-14);
}

#[test]
fn artifacts_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let report = run_benchmark(BenchmarkId::Hj2, &BenchConfig { n: 21, ..Default::default() }).unwrap();
    io::write_bench_artifacts(dir.path(), &report).unwrap();
    let section = std::fs::read_to_string(dir.path().join("hj2_section.csv")).unwrap();
    assert!(section.starts_with("t,u_true,u_comp\n"));
    assert_eq!(section.lines().count(), 22);
    let history = std::fs::read_to_string(dir.path().join("hj2_history.csv")).unwrap();
    assert_eq!(history.lines().count(), report.iteration.records.len() + 1);
    let error = io::read_field_csv(&dir.path().join("hj2_error.csv")).unwrap();
    assert_eq!(Some(error.max_abs()), report.rel_linf_error);
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("hj2_report.json")).unwrap()).unwrap();
    for key in ["test", "params", "iterations", "converged", "theta_hat"] {
        assert!(json.get(key).is_some(), "missing {key}");
    }
    assert!(json["iterations"][0].get("wall_ms").is_some());
}

#[test]
fn matrix_market_dump() {
    let spec = catalog(BenchmarkId::Ql1);
    let sp = SolverParams::default();
    let sys = carleman_core::qr_solver::assemble_initial(&spec, &grid(9), &sp).unwrap();
    let text = io::matrix_market(&sys);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("%%MatrixMarket matrix coordinate real general"));
    let dims: Vec<usize> = lines.next().unwrap().split(' ').map(|t| t.parse().unwrap()).collect();
    assert_eq!(dims, vec![sys.nrows(), sys.ncols(), sys.matrix().nnz()]);
    assert_eq!(lines.count(), sys.matrix().nnz());
    assert_eq!(io::rhs_text(&sys).lines().count(), sys.nrows());
}
