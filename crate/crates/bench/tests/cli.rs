use std::process::Command;

use lcp_bench::{run_ave, run_obstacle, run_ode, AveMode, ObstacleShape, Solver, CSV_HEADER};
use smoothlcp::SolverOptions;

fn bench(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_lcp-bench"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_rows(out: &std::process::Output) -> Vec<Vec<String>> {
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(CSV_HEADER));
    lines
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn random_lcp_single_solver_batch() {
    let out = bench(&[
        "random-lcp",
        "--n",
        "32",
        "--instances",
        "5",
        "--solvers",
        "tlcp",
        "--seed",
        "1",
    ]);
    assert!(out.status.success());
    let rows = stdout_rows(&out);
    assert_eq!(rows.len(), 5);
    for (i, r) in rows.iter().enumerate() {
        assert_eq!(r[2], "tlcp");
        assert_eq!(r[8], "Converged");
        assert_eq!(r[9], (1 + i).to_string());
    }
}

#[test]
fn random_lcp_three_solvers_same_problem() {
    let out = bench(&[
        "random-lcp",
        "--n",
        "32",
        "--instances",
        "1",
        "--solvers",
        "tlcp,soft,ipm",
    ]);
    assert!(out.status.success());
    let rows = stdout_rows(&out);
    assert_eq!(rows.len(), 3);
    let names: Vec<&str> = rows.iter().map(|r| r[2].as_str()).collect();
    assert_eq!(names, ["tlcp", "soft", "reference IPM"]);
    for r in &rows {
        assert!(r[3].parse::<f64>().unwrap() <= 1e-6);
        assert_eq!(r[9], "0");
    }
}

#[test]
fn bad_solver_is_a_usage_error() {
    let out = bench(&["random-lcp", "--solvers", "bogus"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus"));
    assert!(!bench(&["ave", "--solvers", "ipm"]).status.success());
    assert!(!bench(&["random-lcp", "--tol", "-1"]).status.success());
}

#[test]
fn reruns_reproduce_everything_but_time() {
    let args = [
        "random-lcp",
        "--n",
        "16,24",
        "--instances",
        "4",
        "--solvers",
        "tlcp,soft,tlcp2",
        "--seed",
        "9",
    ];
    let a = stdout_rows(&bench(&args));
    let b = stdout_rows(&bench(&args));
    assert_eq!(a.len(), 24);
    for (ra, rb) in a.iter().zip(&b) {
        for c in [0, 1, 2, 3, 4, 5, 6, 8, 9] {
            assert_eq!(ra[c], rb[c]);
        }
    }
}

#[test]
fn csv_file_and_plot_data_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("ob");
    let out = bench(&[
        "obstacle",
        "--n",
        "2",
        "--solvers",
        "soft",
        "--out",
        prefix.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(dir.path().join("ob.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
    let dat = std::fs::read_to_string(dir.path().join("ob_soft.dat")).unwrap();
    assert_eq!(dat.lines().filter(|l| !l.starts_with('#')).count(), 2);

    let prefix = dir.path().join("ode");
    let out = bench(&[
        "ode",
        "--n",
        "20",
        "--solvers",
        "soft",
        "--out",
        prefix.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let dat = std::fs::read_to_string(dir.path().join("ode_soft.dat")).unwrap();
    assert_eq!(dat.lines().nth(1), Some("0 -1 -1"));

    let path = dir.path().join("ave.csv");
    let out = bench(&["ave", "--instances", "0", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(
        std::fs::read_to_string(&path).unwrap(),
        format!("{CSV_HEADER}\n")
    );
}

#[test]
fn flat_obstacle_has_no_contacts() {
    let (rows, profiles) = run_obstacle(
        30,
        ObstacleShape::Zero,
        &[Solver::Soft],
        &SolverOptions::default(),
    )
    .unwrap();
    assert!(rows[0].converged());
    assert_eq!(profiles[0].contacts, 0);
}

#[test]
fn three_bump_membrane_stays_above_obstacle() {
    let (rows, profiles) = run_obstacle(
        50,
        ObstacleShape::ThreeBump,
        &[Solver::Soft],
        &SolverOptions::default(),
    )
    .unwrap();
    assert!(rows[0].converged());
    assert!(profiles[0].min_gap >= -1e-8);
    assert!(profiles[0].contacts > 0);
}

#[test]
fn ode_trajectory_starts_at_initial_value() {
    let (rows, traj) = run_ode(100, &[Solver::Soft], &SolverOptions::default()).unwrap();
    assert!(rows[0].converged());
    assert_eq!(traj[0].t[0], 0.0);
    assert_eq!(traj[0].x_lcp[0], -1.0);
    assert_eq!(traj[0].x_lcp.len(), 101);
    assert!(traj[0].sup_gap.is_finite());
}

#[test]
fn ave_unique_gn_batch_has_no_failures() {
    let (rows, summary) = run_ave(
        AveMode::Unique,
        32,
        100,
        &[Solver::Gn],
        0,
        &SolverOptions::default(),
    )
    .unwrap();
    assert_eq!(rows.len(), 100);
    assert_eq!(summary[0].failures, 0);
    assert_eq!(summary[0].nnz_tot, 0);
}

#[test]
fn ave_general_soft_batch() {
    let (_, summary) = run_ave(
        AveMode::General,
        32,
        100,
        &[Solver::Soft],
        0,
        &SolverOptions::default(),
    )
    .unwrap();
    assert!(summary[0].failures <= 10, "{}", summary[0]);
    assert!(summary[0].nnz_x <= 32);
}
