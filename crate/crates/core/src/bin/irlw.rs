//! Experiment runner and verification entry point.
//!
//! Subcommands:
//! * `run` - load a config, solve, run the enabled checks, write `trace.csv`,
//!   `analysis.csv`, `summary.txt`, and the resolved config echo.
//! * `check-constants` - print the constants table for a config (no solve).
//! * `estimate` - sampled stability fit (and convexity constants on request).
//! * `verify` - run the built-in invariant suites.
//!
//! Exit codes: 0 = clean run with all enabled checks passing, 1 = a check
//! failed, 2 = configuration or infeasibility error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use irlw::analysis::{
    self, check_recursion, check_recursion_quadratic, lipschitz_product_bound, rate_envelope,
    smallest_smoothness_c, EnvelopeInputs, OrderCheck, RateBoundSeries, RecursionCheck,
};
use irlw::config::{parse_config, CheckKind, ExperimentConfig, ResolvedRun};
use irlw::constants;
use irlw::problems::{fit_stability, stability_samples};
use irlw::report::{analysis_csv, fmt_float, stability_csv, summary_text, trace_csv};
use irlw::solver::{solve, IterationTrace};
use irlw::verify::{applicable_checks, run_suites};
use irlw::Error;

#[derive(Parser)]
#[command(
    name = "irlw",
    about = "Iteratively regularized Landweber iteration: experiments and rate verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config: solve, check, and write the report files.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (default `runs/<config stem>`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the config's sampling seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Treat unsatisfied theorem hypotheses as a configuration error.
        #[arg(long)]
        strict: bool,
    },
    /// Print the constants table for a config without iterating.
    CheckConstants {
        #[arg(long)]
        config: PathBuf,
    },
    /// Sampled Hölder stability fit; writes stability_fit.csv.
    Estimate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the built-in invariant suites.
    Verify {
        /// Run a single suite (geometry | bregman | adjoint | stability | recursion | dtn).
        #[arg(long)]
        suite: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run {
            config,
            out,
            seed,
            strict,
        } => cmd_run(&config, out, seed, strict),
        Command::CheckConstants { config } => cmd_check_constants(&config),
        Command::Estimate { config, out, seed } => cmd_estimate(&config, out, seed),
        Command::Verify { suite, seed } => cmd_verify(suite.as_deref(), seed.unwrap_or(42)),
    };
    match code {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

fn load_config(path: &Path) -> Result<ExperimentConfig, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

fn default_out(config: &Path) -> PathBuf {
    let stem = config.file_stem().and_then(|s| s.to_str()).unwrap_or("run");
    PathBuf::from("runs").join(stem)
}

// ---------------------------------------------------------------------------
// run
// ---------------------------------------------------------------------------

struct ChecksOutcome {
    recursion: Option<RecursionCheck>,
    envelope: Option<RateBoundSeries>,
    product: Option<Vec<f64>>,
    order: Option<OrderCheck>,
    verdicts: Vec<(String, String)>,
    any_failed: bool,
}

fn cmd_run(
    config_path: &Path,
    out: Option<PathBuf>,
    seed: Option<u64>,
    strict: bool,
) -> Result<ExitCode, Error> {
    let out_dir = out.unwrap_or_else(|| default_out(config_path));
    let config = load_config(config_path)?;
    let run = config.resolve(seed)?;
    let trace = solve(run.problem.as_ref(), &run.solver)?;

    // Hypothesis audit for the stamp and the strict mode.
    let space = run.problem.domain_space();
    let mut hypothesis_notes = Vec::new();
    if space.c_p() <= space.p() {
        hypothesis_notes.push(format!("C_p = {} <= p = {}", space.c_p(), space.p()));
    }
    if let Some(first) = trace.rows.first() {
        if first.in_ball == Some(false) {
            hypothesis_notes.push("u0 lies outside the ball".to_string());
        }
    }
    if run.solver.allow_mu_override {
        hypothesis_notes.push("mu admissibility check disabled by override".to_string());
    }
    let hypotheses_ok = hypothesis_notes.is_empty();
    if strict && !hypotheses_ok {
        return Err(Error::Infeasible(format!(
            "strict mode: theorem hypotheses not satisfied ({})",
            hypothesis_notes.join("; ")
        )));
    }

    let requested = match &run.analysis.checks {
        Some(list) => list.clone(),
        None => applicable_checks(
            run.problem.constants().stability_eps,
            trace.betas().iter().all(|b| *b > 0.0),
        ),
    };
    let outcome = run_checks(&run, &trace, &requested, hypotheses_ok)?;

    // Report files.
    std::fs::create_dir_all(&out_dir)?;
    std::fs::write(out_dir.join("trace.csv"), trace_csv(&trace))?;
    let gammas = trace.gammas().unwrap_or_default();
    std::fs::write(
        out_dir.join("analysis.csv"),
        analysis_csv(
            &gammas,
            outcome.envelope.as_ref(),
            outcome.product.as_deref(),
            outcome.recursion.as_ref(),
            outcome.order.as_ref(),
        ),
    )?;
    std::fs::write(out_dir.join("resolved_config.cfg"), &run.resolved_text)?;

    let mut summary: Vec<(String, String)> = Vec::new();
    summary.push(("config".into(), config_path.display().to_string()));
    summary.push(("status".into(), trace.status.as_str().into()));
    summary.push(("iterations".into(), trace.rows.len().to_string()));
    if let Some(g) = gammas.last() {
        summary.push(("final_gamma".into(), fmt_float(*g)));
    }
    if let Some(row) = trace.rows.last() {
        summary.push(("final_residual".into(), fmt_float(row.residual)));
    }
    summary.push(("mu".into(), format!("{}", trace.mu)));
    summary.push(("rho_sq".into(), format!("{}", trace.rho_sq)));
    summary.push(("c_p".into(), format!("{}", space.c_p())));
    summary.push(("g_q".into(), format!("{}", space.g_q())));
    summary.push(("hypotheses_satisfied".into(), hypotheses_ok.to_string()));
    if !hypothesis_notes.is_empty() {
        summary.push(("hypothesis_notes".into(), hypothesis_notes.join("; ")));
    }
    let monotone = gammas.windows(2).all(|w| w[1] <= w[0] + 1e-12);
    summary.push(("monotone_descent".into(), monotone.to_string()));
    let in_ball_all = trace.rows.iter().all(|r| r.in_ball != Some(false));
    summary.push(("in_ball_all".into(), in_ball_all.to_string()));
    if let Ok(Some(c)) = smallest_smoothness_c(&trace) {
        summary.push(("smoothness_c_posthoc".into(), fmt_float(c)));
    }
    if let Some(recursion) = &outcome.recursion {
        summary.push(("min_slack".into(), fmt_float(recursion.min_slack)));
    }
    summary.extend(outcome.verdicts.iter().cloned());
    std::fs::write(out_dir.join("summary.txt"), summary_text(&summary))?;

    for (key, value) in &summary {
        println!("{key}={value}");
    }
    println!("wrote {}", out_dir.display());
    Ok(if outcome.any_failed {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn verdict_value(ok: bool, hypotheses_ok: bool) -> String {
    match (hypotheses_ok, ok) {
        (true, true) => "pass".into(),
        (true, false) => "fail".into(),
        (false, true) => "hypotheses-not-satisfied:pass".into(),
        (false, false) => "hypotheses-not-satisfied:fail".into(),
    }
}

fn run_checks(
    run: &ResolvedRun,
    trace: &IterationTrace,
    requested: &[CheckKind],
    hypotheses_ok: bool,
) -> Result<ChecksOutcome, Error> {
    let eps = run.problem.constants().stability_eps;
    let mut outcome = ChecksOutcome {
        recursion: None,
        envelope: None,
        product: None,
        order: None,
        verdicts: Vec::new(),
        any_failed: false,
    };
    let gammas = trace.gammas().ok();
    let posthoc_c = smallest_smoothness_c(trace).ok().flatten();

    for check in requested {
        let key = format!("verdict_{}", check.as_str());
        match check {
            CheckKind::Recursion => {
                let Some(rc) = &trace.rate_constants else {
                    outcome
                        .verdicts
                        .push((key, "skipped:no-rate-constants".into()));
                    continue;
                };
                let recursion = if rc.eps == 0.0 {
                    let (recursion, envelope) = check_recursion_quadratic(trace, rc, posthoc_c)?;
                    outcome.envelope.get_or_insert(envelope);
                    recursion
                } else {
                    check_recursion(trace, rc)?
                };
                let ok = recursion.min_slack >= analysis::RECURSION_SLACK_FLOOR;
                outcome.any_failed |= !ok;
                outcome
                    .verdicts
                    .push((key, verdict_value(ok, hypotheses_ok)));
                outcome.recursion = Some(recursion);
            }
            CheckKind::Envelope => {
                if eps == 0.0 {
                    // Produced together with the quadratic recursion check.
                    if outcome.envelope.is_none() {
                        if let Some(rc) = &trace.rate_constants {
                            let (_, envelope) = check_recursion_quadratic(trace, rc, posthoc_c)?;
                            outcome.envelope = Some(envelope);
                        }
                    }
                } else if eps < 1.0 {
                    let (Some(rc), Some(c)) = (&trace.rate_constants, posthoc_c) else {
                        outcome
                            .verdicts
                            .push((key, "skipped:no-smoothness-constant".into()));
                        continue;
                    };
                    let alpha = trace.alphas();
                    let inputs = EnvelopeInputs {
                        alpha: &alpha,
                        decay_coefficient: rc.k2,
                        k5: rc.k5,
                        smoothness_c: c,
                        rho_sq: rc.rho_sq,
                        eps,
                    };
                    outcome.envelope = Some(rate_envelope(&inputs, alpha.len().saturating_sub(1))?);
                } else {
                    outcome
                        .verdicts
                        .push((key, "not-applicable:lipschitz-exponent".into()));
                    continue;
                }
                if let (Some(series), Some(gammas)) = (&outcome.envelope, &gammas) {
                    let ok = gammas.iter().enumerate().skip(1).all(|(k, g)| {
                        series
                            .predicted_bound
                            .get(k)
                            .map(|b| *g <= b * (1.0 + analysis::ENVELOPE_RTOL))
                            .unwrap_or(true)
                    });
                    outcome.any_failed |= !ok;
                    outcome
                        .verdicts
                        .push((key, verdict_value(ok, hypotheses_ok)));
                } else {
                    outcome.verdicts.push((key, "skipped:no-gamma".into()));
                }
            }
            CheckKind::Product => {
                if eps != 1.0 {
                    outcome
                        .verdicts
                        .push((key, "not-applicable:requires-lipschitz".into()));
                    continue;
                }
                let (Some(rc), Some(c), Some(gammas)) = (&trace.rate_constants, posthoc_c, &gammas)
                else {
                    outcome
                        .verdicts
                        .push((key, "skipped:no-rate-constants".into()));
                    continue;
                };
                let alpha = trace.alphas();
                let pb = lipschitz_product_bound(
                    &alpha,
                    rc.k2,
                    rc.k5,
                    c,
                    rc.rho_sq,
                    alpha.len().saturating_sub(1),
                )?;
                let ok = gammas.iter().enumerate().skip(1).all(|(k, g)| {
                    pb.bound
                        .get(k)
                        .map(|b| *g <= b * (1.0 + analysis::ENVELOPE_RTOL))
                        .unwrap_or(true)
                });
                outcome.any_failed |= !ok;
                outcome
                    .verdicts
                    .push((key, verdict_value(ok, hypotheses_ok)));
                outcome.product = Some(pb.bound);
            }
            CheckKind::Order => {
                let Some(rc) = &trace.rate_constants else {
                    outcome
                        .verdicts
                        .push((key, "skipped:no-rate-constants".into()));
                    continue;
                };
                if trace
                    .betas()
                    .iter()
                    .take(trace.rows.len().saturating_sub(1))
                    .any(|b| *b <= 0.0)
                {
                    outcome
                        .verdicts
                        .push((key, "not-applicable:zero-schedule".into()));
                    continue;
                }
                let q = run.problem.domain_space().q();
                let order = analysis::check_order(trace, q, rc, run.analysis.burn_in)?;
                let all_hold = order.condition_holds.iter().all(|c| *c);
                // The slope requirement only binds when the boundedness
                // condition holds at every iteration.
                let ok = !all_hold || order.fit.slope >= q - 1.0 - 0.15;
                outcome.any_failed |= !ok;
                outcome
                    .verdicts
                    .push(("order_fitted_slope".to_string(), fmt_float(order.fit.slope)));
                outcome
                    .verdicts
                    .push(("order_eta_cap".to_string(), fmt_float(order.eta_cap)));
                outcome
                    .verdicts
                    .push(("order_condition_all".to_string(), all_hold.to_string()));
                outcome
                    .verdicts
                    .push((key, verdict_value(ok, hypotheses_ok)));
                outcome.order = Some(order);
            }
        }
    }
    Ok(outcome)
}

// ---------------------------------------------------------------------------
// check-constants
// ---------------------------------------------------------------------------

fn cmd_check_constants(config_path: &Path) -> Result<ExitCode, Error> {
    let config = load_config(config_path)?;
    let run = config.resolve(None)?;
    let problem = run.problem.as_ref();
    let space = problem.domain_space();
    let consts = problem.constants();

    let mut table: Vec<(String, String)> = Vec::new();
    table.push(("p".into(), format!("{}", space.p())));
    table.push(("q".into(), format!("{}", space.q())));
    table.push(("r".into(), format!("{}", space.r())));
    table.push(("dimension".into(), space.dimension().to_string()));
    table.push(("c_p".into(), format!("{}", space.c_p())));
    table.push(("g_q".into(), format!("{}", space.g_q())));
    table.push((
        "kappa_p".into(),
        format!("{}", constants::kappa_p(space.p())?),
    ));
    table.push(("lipschitz_l".into(), format!("{}", consts.lipschitz_l)));
    table.push((
        "deriv_bound_lhat".into(),
        format!("{}", consts.deriv_bound_lhat),
    ));
    table.push(("stability_cf".into(), format!("{}", consts.stability_cf)));
    table.push(("stability_eps".into(), format!("{}", consts.stability_eps)));
    table.push((
        "mu_max".into(),
        format!("{}", constants::mu_max(space, consts)),
    ));
    if consts.stability_eps == 0.0 {
        match constants::mu_max_eps0(space, consts) {
            Ok(v) => table.push(("mu_max_eps0".into(), format!("{v}"))),
            Err(_) => table.push(("mu_max_eps0".into(), "INFEASIBLE".into())),
        }
    }
    table.push(("mu".into(), format!("{}", run.solver.mu)));
    match constants::rho_squared(space, consts) {
        Ok(v) => table.push(("rho_sq_formula".into(), format!("{v}"))),
        Err(_) => table.push(("rho_sq_formula".into(), "UNDEFINED".into())),
    }
    table.push(("rho_sq_effective".into(), format!("{}", run.rho_sq)));
    match constants::beta_admissible_max(space) {
        Ok(v) => table.push(("beta_admissible_max".into(), format!("{v}"))),
        Err(_) => table.push(("beta_admissible_max".into(), "INFEASIBLE".into())),
    }
    if run.rho_sq.is_finite() {
        match constants::rate_constants(space, consts, run.solver.mu, run.rho_sq) {
            Ok(rc) => {
                table.push(("k1".into(), format!("{}", rc.k1)));
                table.push(("k2".into(), format!("{}", rc.k2)));
                table.push(("k3".into(), format!("{}", rc.k3)));
                table.push(("k4".into(), format!("{}", rc.k4)));
                table.push(("k5".into(), format!("{}", rc.k5)));
                table.push(("m1".into(), format!("{}", rc.m1)));
                table.push(("t".into(), format!("{}", rc.t)));
                table.push((
                    "alpha_at_beta_max".into(),
                    format!("{}", rc.alpha(run.solver.schedule.beta_max())),
                ));
            }
            Err(_) => table.push(("rate_constants".into(), "UNAVAILABLE".into())),
        }
    }
    print!("{}", summary_text(&table));
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// estimate
// ---------------------------------------------------------------------------

fn cmd_estimate(
    config_path: &Path,
    out: Option<PathBuf>,
    seed: Option<u64>,
) -> Result<ExitCode, Error> {
    let out_dir = out.unwrap_or_else(|| default_out(config_path));
    let config = load_config(config_path)?;
    let effective_seed = seed.unwrap_or(config.analysis.seed);
    let problem = config.resolve_problem(seed)?;
    let radius = config
        .analysis
        .stability_ball_radius
        .unwrap_or_else(|| problem.default_stability_radius());

    let samples = stability_samples(
        problem.as_ref(),
        config.analysis.stability_samples,
        effective_seed,
        radius,
    )?;
    let fit = fit_stability(&samples, problem.domain_space().p())?;

    std::fs::create_dir_all(&out_dir)?;
    std::fs::write(out_dir.join("stability_fit.csv"), stability_csv(&samples))?;
    let mut summary: Vec<(String, String)> = vec![
        ("problem".into(), problem.name().into()),
        ("samples".into(), fit.sample_count.to_string()),
        ("ball_radius".into(), format!("{radius}")),
        ("regression_slope".into(), fmt_float(fit.regression_slope)),
        ("fitted_eps".into(), fmt_float(fit.fitted_eps)),
        ("fitted_cf".into(), fmt_float(fit.fitted_cf)),
        ("residual_rms".into(), fmt_float(fit.residual_rms)),
        (
            "declared_eps".into(),
            format!("{}", problem.constants().stability_eps),
        ),
        (
            "declared_cf".into(),
            format!("{}", problem.constants().stability_cf),
        ),
    ];
    let space = problem.domain_space();
    summary.push(("c_p".into(), format!("{}", space.c_p())));
    summary.push(("g_q".into(), format!("{}", space.g_q())));
    std::fs::write(
        out_dir.join("stability_summary.txt"),
        summary_text(&summary),
    )?;
    for (key, value) in &summary {
        println!("{key}={value}");
    }
    println!("wrote {}", out_dir.display());
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

fn cmd_verify(suite: Option<&str>, seed: u64) -> Result<ExitCode, Error> {
    let reports = run_suites(suite, seed)?;
    let mut all_passed = true;
    for report in &reports {
        let line = if report.passed { "PASS" } else { "FAIL" };
        println!("suite {}: {line}", report.name);
        for (key, value) in &report.metrics {
            println!("  {key}={value}");
        }
        for failure in &report.failures {
            println!("  failure: {failure}");
        }
        all_passed &= report.passed;
    }
    Ok(if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
