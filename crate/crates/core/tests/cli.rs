//! End-to-end CLI behavior: exit-code contract, output formats, and the
//! verify/estimate/check-constants subcommands.

use std::path::Path;
use std::process::{Command, Output};

use irlw::config::shipped;

fn irlw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_irlw"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("config.cfg");
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

#[test]
fn run_clean_config_exits_zero_with_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), shipped::DIAG_HILBERT);
    let out = tmp.path().join("out");
    let result = irlw(&["run", "--config", &config, "--out", out.to_str().unwrap()]);
    assert_eq!(
        result.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&result.stderr)
    );

    let stdout = String::from_utf8(result.stdout).unwrap();
    assert!(stdout.contains("status=gamma_converged"));

    // Summary carries the recursion slack, and the slack respects the floor.
    let summary = std::fs::read_to_string(out.join("summary.txt")).unwrap();
    let slack_line = summary
        .lines()
        .find(|l| l.starts_with("min_slack="))
        .expect("summary has min_slack");
    let slack: f64 = slack_line.trim_start_matches("min_slack=").parse().unwrap();
    assert!(slack >= -1e-12);

    // Trace format: fixed header, status only on the final row.
    let trace = std::fs::read_to_string(out.join("trace.csv")).unwrap();
    let mut lines = trace.lines();
    assert_eq!(
        lines.next().unwrap(),
        "k,beta,gamma,residual,err_norm,in_ball,alpha,bound_rhs,status"
    );
    let rows: Vec<&str> = lines.collect();
    for (i, row) in rows.iter().enumerate() {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), 9, "row {i} malformed: {row}");
        if i + 1 < rows.len() {
            assert_eq!(fields[8], "", "status on non-final row {i}");
        } else {
            assert_eq!(fields[8], "gamma_converged");
        }
        // Floats reload exactly from the 17-digit rendering.
        let gamma: f64 = fields[2].parse().unwrap();
        assert!(gamma.is_finite());
    }

    assert!(out.join("analysis.csv").exists());
    assert!(out.join("resolved_config.cfg").exists());
}

#[test]
fn run_oversized_mu_exits_two_naming_the_condition() {
    let tmp = tempfile::tempdir().unwrap();
    let text = shipped::DIAG_HILBERT.replace("mu = auto", "mu = 0.6");
    let config = write_config(tmp.path(), &text);
    let result = irlw(&[
        "run",
        "--config",
        &config,
        "--out",
        tmp.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(result.status.code(), Some(2));
    let stderr = String::from_utf8(result.stderr).unwrap();
    assert!(
        stderr.contains("mu^(q-1) < q/(2^q Lhat^q G_q)"),
        "diagnostic should cite the violated step-size condition, got: {stderr}"
    );
}

#[test]
fn run_unknown_problem_kind_exits_two() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(
        tmp.path(),
        "[problem]\nkind = widget\n[solver]\nmu = auto\n",
    );
    let result = irlw(&["run", "--config", &config]);
    assert_eq!(result.status.code(), Some(2));
    let stderr = String::from_utf8(result.stderr).unwrap();
    assert!(
        stderr.contains("line 2"),
        "parse errors are line-anchored: {stderr}"
    );
}

#[test]
fn run_missing_config_exits_two() {
    let result = irlw(&["run", "--config", "/nonexistent/nope.cfg"]);
    assert_eq!(result.status.code(), Some(2));
}

#[test]
fn run_strict_mode_rejects_unsatisfied_hypotheses() {
    // Hilbert spaces have C_p = 1 <= p, so strict mode must refuse.
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), shipped::DIAG_HILBERT);
    let result = irlw(&[
        "run",
        "--config",
        &config,
        "--strict",
        "--out",
        tmp.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(result.status.code(), Some(2));
    let stderr = String::from_utf8(result.stderr).unwrap();
    assert!(
        stderr.contains("C_p"),
        "strict failure names the condition: {stderr}"
    );
}

#[test]
fn run_eps0_without_radius_exits_two() {
    let tmp = tempfile::tempdir().unwrap();
    let text = shipped::MONOMIAL_M2_EPS0.replace("rho_sq = 0.04", "rho_sq = auto");
    let config = write_config(tmp.path(), &text);
    let result = irlw(&["run", "--config", &config]);
    assert_eq!(result.status.code(), Some(2));
    let stderr = String::from_utf8(result.stderr).unwrap();
    assert!(
        stderr.contains("rho_sq"),
        "message should point at the missing radius: {stderr}"
    );
}

#[test]
fn check_constants_prints_expected_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), shipped::DIAG_HILBERT);
    let result = irlw(&["check-constants", "--config", &config]);
    assert_eq!(result.status.code(), Some(0));
    let stdout = String::from_utf8(result.stdout).unwrap();
    assert!(stdout.contains("mu_max=0.5"), "stdout: {stdout}");
    assert!(stdout.contains("kappa_p=5.20867"), "stdout: {stdout}");
    assert!(
        stdout.contains("beta_admissible_max=INFEASIBLE"),
        "stdout: {stdout}"
    );
    assert!(stdout.contains("rho_sq_formula=inf"), "stdout: {stdout}");
}

#[test]
fn estimate_writes_fit_and_respects_targets() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), shipped::MONOMIAL_M15);
    let out = tmp.path().join("est");
    let result = irlw(&[
        "estimate",
        "--config",
        &config,
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(result.status.code(), Some(0));
    let stdout = String::from_utf8(result.stdout).unwrap();
    let eps_line = stdout
        .lines()
        .find(|l| l.starts_with("fitted_eps="))
        .unwrap();
    let eps: f64 = eps_line.trim_start_matches("fitted_eps=").parse().unwrap();
    assert!(
        (0.23..=0.43).contains(&eps),
        "fitted eps {eps} outside [0.23, 0.43]"
    );

    let csv = std::fs::read_to_string(out.join("stability_fit.csv")).unwrap();
    assert!(csv.starts_with("i,image_gap,bregman\n"));
    assert!(csv.lines().count() > 400);
}

#[test]
fn estimate_diagonal_is_lipschitz() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), shipped::DIAG_HILBERT);
    let result = irlw(&[
        "estimate",
        "--config",
        &config,
        "--out",
        tmp.path().join("e").to_str().unwrap(),
    ]);
    assert_eq!(result.status.code(), Some(0));
    let stdout = String::from_utf8(result.stdout).unwrap();
    let eps_line = stdout
        .lines()
        .find(|l| l.starts_with("fitted_eps="))
        .unwrap();
    let eps: f64 = eps_line.trim_start_matches("fitted_eps=").parse().unwrap();
    assert!(
        (0.95..=1.05).contains(&eps),
        "fitted eps {eps} outside [0.95, 1.05]"
    );
}

#[test]
fn estimate_reports_sampled_space_constants_on_request() {
    let tmp = tempfile::tempdir().unwrap();
    let text = shipped::DIAG_HILBERT
        .replace("c_p = 1", "c_p = estimate")
        .replace("g_q = 1", "g_q = estimate");
    let config = write_config(tmp.path(), &text);
    let result = irlw(&[
        "estimate",
        "--config",
        &config,
        "--out",
        tmp.path().join("e").to_str().unwrap(),
    ]);
    assert_eq!(result.status.code(), Some(0));
    let stdout = String::from_utf8(result.stdout).unwrap();
    let c_p: f64 = stdout
        .lines()
        .find(|l| l.starts_with("c_p="))
        .unwrap()
        .trim_start_matches("c_p=")
        .parse()
        .unwrap();
    // Sampled Hilbert constant sits at 1 up to estimator round-off.
    assert!((c_p - 1.0).abs() < 1e-6, "sampled c_p = {c_p}");
}

#[test]
fn estimate_degenerate_ball_exits_two() {
    let tmp = tempfile::tempdir().unwrap();
    let text = shipped::MONOMIAL_M15.replace(
        "stability_ball_radius = 10.0",
        "stability_ball_radius = 0.0",
    );
    let config = write_config(tmp.path(), &text);
    let result = irlw(&["estimate", "--config", &config]);
    assert_eq!(result.status.code(), Some(2));
}

#[test]
fn verify_single_suite_filter() {
    let result = irlw(&["verify", "--suite", "geometry"]);
    assert_eq!(result.status.code(), Some(0));
    let stdout = String::from_utf8(result.stdout).unwrap();
    assert!(stdout.contains("suite geometry: PASS"));
    assert!(
        !stdout.contains("suite dtn"),
        "filter must select a single suite"
    );
}

#[test]
fn verify_unknown_suite_exits_two() {
    let result = irlw(&["verify", "--suite", "bogus"]);
    assert_eq!(result.status.code(), Some(2));
}

#[test]
fn rerunning_from_the_echoed_config_reproduces_the_run() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), shipped::MONOMIAL_M15);
    let first = tmp.path().join("first");
    let result = irlw(&["run", "--config", &config, "--out", first.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(0));

    let echoed = first.join("resolved_config.cfg");
    let second = tmp.path().join("second");
    let result = irlw(&["run", "--config", echoed.to_str().unwrap(), "--out", second.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(0));

    let a = std::fs::read(first.join("trace.csv")).unwrap();
    let b = std::fs::read(second.join("trace.csv")).unwrap();
    assert_eq!(a, b, "echo rerun produced a different trace");
}

#[test]
fn understated_smoothness_constant_fails_the_recursion_check() {
    // Declaring g_q far below its true value admits a step size the true
    // geometry forbids; the recursion bound then genuinely fails and the run
    // exits 1 (check failure), not 2 (config error).
    let tmp = tempfile::tempdir().unwrap();
    let text = "[space]\ng_q = 0.0001\n\
                [problem]\nkind = diagonal\nsingular_values = 1,1\nground_truth = 0.1,0.1\n\
                [solver]\nmu = 1.5\nrho_sq = 0.125\nschedule = zero\ngamma_tolerance = 1e-9\n\
                [analysis]\nchecks = recursion\n";
    let config = write_config(tmp.path(), text);
    let out = tmp.path().join("out");
    let result = irlw(&["run", "--config", &config, "--out", out.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(1), "stderr: {}", String::from_utf8_lossy(&result.stderr));
    let summary = std::fs::read_to_string(out.join("summary.txt")).unwrap();
    assert!(summary.contains("verdict_recursion=hypotheses-not-satisfied:fail"), "{summary}");
}

#[test]
fn diag_hilbert_summary_exit_contract() {
    // The shipped example produces exit 0 and a summary whose min_slack
    // respects the floor (the documented CI contract).
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), shipped::DIAG_HILBERT);
    let out = tmp.path().join("out");
    let result = irlw(&["run", "--config", &config, "--out", out.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(0));
    let summary = std::fs::read_to_string(out.join("summary.txt")).unwrap();
    assert!(summary.contains("verdict_recursion=hypotheses-not-satisfied:pass"));
    assert!(summary.contains("monotone_descent=true"));
    assert!(summary.contains("in_ball_all=true"));
}
