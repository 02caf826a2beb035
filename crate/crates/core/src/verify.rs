//! Built-in invariant suites behind the `irlw verify` subcommand: geometry
//! round trips, Bregman inequalities against sampled constants, derivative
//! and adjoint oracles, stability fits, recursion checks on every shipped
//! config, and the DtN structure checks.
//!
//! Each suite is deterministic for a fixed seed and returns a report with
//! per-check metrics, so the CLI can print one pass/fail line per suite and
//! CI can grep the numbers.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::analysis;
use crate::config::{parse_config, shipped, CheckKind};
use crate::geometry::{
    bregman, dual_bregman, estimate_convexity_constants, pairing, SpaceGeometry,
};
use crate::problems::{
    estimate_stability, finite_difference_check, DiagonalLinear, ForwardProblem, Monomial,
    ResistorNetwork,
};
use crate::report::fmt_float;
use crate::sampling;
use crate::solver::{solve, TerminalStatus};
use crate::{Error, Result};

/// Outcome of one suite.
#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub name: &'static str,
    pub passed: bool,
    /// Key figures of the suite (max errors, violation counts, ...).
    pub metrics: Vec<(String, String)>,
    pub failures: Vec<String>,
}

impl SuiteReport {
    fn new(name: &'static str) -> Self {
        SuiteReport {
            name,
            passed: true,
            metrics: Vec::new(),
            failures: Vec::new(),
        }
    }

    fn metric(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.metrics.push((key.into(), value.into()));
    }

    fn check(&mut self, ok: bool, failure: impl Into<String>) {
        if !ok {
            self.passed = false;
            self.failures.push(failure.into());
        }
    }
}

pub const SUITE_NAMES: [&str; 6] = [
    "geometry",
    "bregman",
    "adjoint",
    "stability",
    "recursion",
    "dtn",
];

/// Run one suite by name.
pub fn run_suite(name: &str, seed: u64) -> Result<SuiteReport> {
    match name {
        "geometry" => Ok(geometry_suite(seed, 2_000)),
        "bregman" => Ok(bregman_suite(seed, 10_000)),
        "adjoint" => adjoint_suite(seed, 200),
        "stability" => stability_suite(seed, 500),
        "recursion" => recursion_suite(),
        "dtn" => dtn_suite(seed, 50),
        other => Err(Error::InvalidParameter(format!(
            "unknown suite `{other}` (expected one of {SUITE_NAMES:?})"
        ))),
    }
}

/// Run all suites, or the one selected by `filter`.
pub fn run_suites(filter: Option<&str>, seed: u64) -> Result<Vec<SuiteReport>> {
    match filter {
        Some(name) => Ok(vec![run_suite(name, seed)?]),
        None => SUITE_NAMES
            .iter()
            .map(|name| run_suite(name, seed))
            .collect(),
    }
}

/// Duality-map round trips, defining properties, and homogeneity over the
/// exponent/dimension grid.
pub fn geometry_suite(seed: u64, vectors_per_combo: usize) -> SuiteReport {
    let mut report = SuiteReport::new("geometry");
    let mut rng = sampling::rng_from_seed(seed);
    let mut max_round_trip = 0.0f64;
    let mut max_identity = 0.0f64;
    let mut max_homogeneity = 0.0f64;
    for &p in &[1.5, 2.0, 3.0, 4.0] {
        for &dim in &[1usize, 2, 10, 100] {
            let space = SpaceGeometry::new(dim, p, p, None, 1.0, 1.0).expect("valid space");
            for _ in 0..vectors_per_combo {
                let u = space
                    .primal(sampling::standard_normal_vec(&mut rng, dim))
                    .expect("finite sample");
                let norm = u.norm();
                if norm == 0.0 {
                    continue;
                }
                let j = u.duality_map();
                let back = j.inverse_duality_map();
                max_round_trip = max_round_trip.max(back.sub(&u).norm() / norm);

                let dual_norm = j.norm();
                max_identity =
                    max_identity.max((dual_norm - norm.powf(p - 1.0)).abs() / norm.powf(p - 1.0));
                max_identity = max_identity
                    .max((pairing(&u, &j) - norm * dual_norm).abs() / (norm * dual_norm));

                let lambda: f64 = 0.1 + 3.0 * rng.gen::<f64>();
                let scaled_j = u.scale(lambda).duality_map();
                let predicted = j.scale(lambda.powf(p - 1.0));
                max_homogeneity =
                    max_homogeneity.max(scaled_j.sub(&predicted).norm() / predicted.norm());
            }
        }
    }
    report.metric("max_round_trip_rel_error", fmt_float(max_round_trip));
    report.metric("max_identity_rel_error", fmt_float(max_identity));
    report.metric("max_homogeneity_rel_error", fmt_float(max_homogeneity));
    report.check(
        max_round_trip <= 1e-10,
        format!("round trip error {max_round_trip:e} > 1e-10"),
    );
    report.check(
        max_identity <= 1e-10,
        format!("defining-property error {max_identity:e} > 1e-10"),
    );
    report.check(
        max_homogeneity <= 1e-10,
        format!("homogeneity error {max_homogeneity:e} > 1e-10"),
    );
    report
}

/// Bregman inequalities on a fresh sample against seed-fixed estimated
/// constants; at most 0.1% violations at relative 1e-9. The Hilbert case is
/// exact with the stored constants.
pub fn bregman_suite(seed: u64, fresh_pairs: usize) -> SuiteReport {
    let mut report = SuiteReport::new("bregman");

    // Non-Hilbert geometry with sampled constants.
    let space = SpaceGeometry::new(3, 4.0, 4.0, None, 1.0, 1.0).expect("valid space");
    let (c_p, g_q) =
        estimate_convexity_constants(&space, 10_000, seed).expect("estimation succeeds");
    report.metric("sampled_c_p", fmt_float(c_p));
    report.metric("sampled_g_q", fmt_float(g_q));
    let violations = count_violations(&space, c_p, g_q, fresh_pairs, seed.wrapping_add(1));
    let budget = fresh_pairs / 1000;
    report.metric("fresh_violations_primal", violations.0.to_string());
    report.metric("fresh_violations_dual", violations.1.to_string());
    report.check(
        violations.0 <= budget && violations.1 <= budget,
        format!("fresh-sample violations {violations:?} exceed 0.1% of {fresh_pairs}"),
    );

    // Hilbert case: both constants are exactly 1.
    let hilbert = SpaceGeometry::hilbert(4).expect("valid space");
    let hv = count_violations(&hilbert, 1.0, 1.0, fresh_pairs, seed.wrapping_add(2));
    report.metric("hilbert_violations", format!("{}+{}", hv.0, hv.1));
    report.check(
        hv.0 == 0 && hv.1 == 0,
        format!("Hilbert violations {hv:?} with exact constants"),
    );
    report
}

fn count_violations(
    space: &std::sync::Arc<SpaceGeometry>,
    c_p: f64,
    g_q: f64,
    pairs: usize,
    seed: u64,
) -> (usize, usize) {
    let mut rng = sampling::rng_from_seed(seed);
    let p = space.p();
    let q = space.q();
    let n = space.dimension();
    let mut primal_violations = 0;
    let mut dual_violations = 0;
    for _ in 0..pairs {
        let u1 = space
            .primal(sampling::standard_normal_vec(&mut rng, n))
            .expect("finite");
        let u2 = space
            .primal(sampling::standard_normal_vec(&mut rng, n))
            .expect("finite");
        let sep = u1.sub(&u2).norm();
        if sep > 1e-9 {
            let lhs = bregman(&u1, &u2).expect("same space");
            let rhs = c_p / p * sep.powf(p);
            if lhs < rhs * (1.0 - 1e-9) {
                primal_violations += 1;
            }
        }
        let w1 = space
            .dual(sampling::standard_normal_vec(&mut rng, n))
            .expect("finite");
        let w2 = space
            .dual(sampling::standard_normal_vec(&mut rng, n))
            .expect("finite");
        let sep = w1.sub(&w2).norm();
        if sep > 1e-9 {
            let lhs = dual_bregman(&w1, &w2).expect("same space");
            let rhs = g_q / q * sep.powf(q);
            if lhs > rhs * (1.0 + 1e-9) {
                dual_violations += 1;
            }
        }
    }
    (primal_violations, dual_violations)
}

/// The three shipped problems used by the oracle suites.
pub fn shipped_problems() -> Result<Vec<Box<dyn ForwardProblem>>> {
    Ok(vec![
        Box::new(DiagonalLinear::new(vec![2.0, 0.5, 1.0])?),
        Box::new(Monomial::new(3, 1.5)?),
        Box::new(ResistorNetwork::new(
            3,
            1,
            vec![(0, 3), (1, 3), (2, 3)],
            vec![1.0, 1.5, 2.0],
        )?),
    ])
}

/// Derivative (central differences) and adjoint identity oracles on the
/// three shipped problems.
pub fn adjoint_suite(seed: u64, triples: usize) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("adjoint");
    let mut rng = sampling::rng_from_seed(seed);
    for problem in shipped_problems()? {
        let problem = problem.as_ref();
        let name = problem.name();
        let space = problem.domain_space();
        let range = problem.range_space();
        let n = space.dimension();

        let mut max_adjoint = 0.0f64;
        for _ in 0..triples {
            let u = sample_domain_point(problem, &mut rng);
            let h = space
                .primal(sampling::standard_normal_vec(&mut rng, n))
                .expect("finite");
            let w = range
                .dual(sampling::standard_normal_vec(&mut rng, range.dimension()))
                .expect("finite");
            let lhs = pairing(&problem.apply_derivative(&u, &h), &w);
            let rhs = pairing(&h, &problem.apply_adjoint(&u, &w));
            let scale = lhs.abs().max(rhs.abs()).max(1e-30);
            max_adjoint = max_adjoint.max((lhs - rhs).abs() / scale);
        }
        report.metric(format!("{name}_adjoint_rel_error"), fmt_float(max_adjoint));
        report.check(
            max_adjoint <= 1e-10,
            format!("{name}: adjoint identity error {max_adjoint:e} > 1e-10"),
        );

        // Central-difference step and tolerance per problem conditioning:
        // the linear map has no truncation error so a large step minimizes
        // rounding; the nonlinear maps balance truncation against rounding.
        let (step, tol) = match name {
            "diagonal" => (1e-2, 1e-12),
            "monomial" => (1e-5, 1e-6),
            _ => (1e-6, 1e-5),
        };
        let at = sample_domain_point(problem, &mut rng);
        let fd = finite_difference_check(problem, &at, 32, step, seed.wrapping_add(7))?;
        report.metric(format!("{name}_fd_rel_error"), fmt_float(fd.max_rel_error));
        report.check(
            fd.max_rel_error <= tol,
            format!(
                "{name}: finite-difference error {:e} > {tol:e}",
                fd.max_rel_error
            ),
        );
    }
    Ok(report)
}

fn sample_domain_point(
    problem: &dyn ForwardProblem,
    rng: &mut ChaCha8Rng,
) -> crate::geometry::PrimalVector {
    let space = problem.domain_space();
    let n = space.dimension();
    match problem.ground_truth() {
        Some(truth) => {
            // Stay near the truth so restricted-domain problems remain valid.
            loop {
                let delta = sampling::uniform_in_ball(rng, n, 0.1);
                let coeffs: Vec<f64> = truth
                    .coeffs()
                    .iter()
                    .zip(&delta)
                    .map(|(t, d)| t + d)
                    .collect();
                let u = space.primal(coeffs).expect("finite");
                if problem.contains(&u) {
                    return u;
                }
            }
        }
        None => space
            .primal(sampling::standard_normal_vec(rng, n))
            .expect("finite"),
    }
}

/// Stability fits against the analytic exponents: 1 for the diagonal and
/// resistor problems, `2/m − 1` for the monomials.
pub fn stability_suite(seed: u64, samples: usize) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("stability");
    let mut run =
        |name: String, problem: &dyn ForwardProblem, radius: f64, target: f64| -> Result<()> {
            let fit = estimate_stability(problem, samples, seed, radius)?;
            report.metric(format!("{name}_fitted_eps"), fmt_float(fit.fitted_eps));
            report.check(
                (fit.fitted_eps - target).abs() <= 0.1,
                format!(
                    "{name}: fitted eps {} not within 0.1 of {target}",
                    fit.fitted_eps
                ),
            );
            Ok(())
        };

    let diagonal = DiagonalLinear::new(vec![2.0, 0.5, 1.0])?;
    run(
        "diagonal".into(),
        &diagonal,
        diagonal.default_stability_radius(),
        1.0,
    )?;
    for m in [1.25, 1.5, 1.75] {
        let monomial = Monomial::new(2, m)?;
        run(
            format!("monomial_m{m}"),
            &monomial,
            monomial.default_stability_radius(),
            2.0 / m - 1.0,
        )?;
    }
    let resistor = ResistorNetwork::new(3, 1, vec![(0, 3), (1, 3), (2, 3)], vec![1.0, 1.5, 2.0])?;
    run(
        "resistor".into(),
        &resistor,
        resistor.default_stability_radius(),
        1.0,
    )?;
    Ok(report)
}

/// Solve every shipped config and check monotone descent, ball invariance,
/// convergence, and the recursion-bound slack.
pub fn recursion_suite() -> Result<SuiteReport> {
    recursion_suite_on(&shipped::all())
}

/// The recursion suite over an explicit `(name, config text)` list.
pub fn recursion_suite_on(configs: &[(&str, &str)]) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("recursion");
    for (name, text) in configs {
        let run = parse_config(text)?.resolve(None)?;
        let outcome = check_shipped_run(name, &run, &mut report)?;
        report.metric(format!("{name}_iterations"), outcome.to_string());
    }
    Ok(report)
}

/// Numeric outcome of one shipped-config run used by both the suite and the
/// acceptance tests.
pub struct RunVerdict {
    pub trace: crate::solver::IterationTrace,
    pub min_slack: f64,
    pub monotone: bool,
    pub in_ball_all: bool,
    pub final_gamma: f64,
}

/// Solve a resolved run and evaluate the descent/ball/recursion facts.
pub fn evaluate_run(run: &crate::config::ResolvedRun) -> Result<RunVerdict> {
    let trace = solve(run.problem.as_ref(), &run.solver)?;
    let gammas = trace.gammas()?;
    let monotone = gammas.windows(2).all(|w| w[1] <= w[0] + 1e-12);
    let in_ball_all = trace.rows.iter().all(|r| r.in_ball == Some(true));
    let final_gamma = *gammas.last().expect("non-empty trace");
    let min_slack = match &trace.rate_constants {
        Some(rc) => {
            if rc.eps == 0.0 {
                analysis::check_recursion_quadratic(&trace, rc, None)?
                    .0
                    .min_slack
            } else {
                analysis::check_recursion(&trace, rc)?.min_slack
            }
        }
        None => f64::INFINITY,
    };
    Ok(RunVerdict {
        trace,
        min_slack,
        monotone,
        in_ball_all,
        final_gamma,
    })
}

fn check_shipped_run(
    name: &str,
    run: &crate::config::ResolvedRun,
    report: &mut SuiteReport,
) -> Result<usize> {
    let verdict = evaluate_run(run)?;
    report.metric(format!("{name}_min_slack"), fmt_float(verdict.min_slack));
    report.metric(
        format!("{name}_final_gamma"),
        fmt_float(verdict.final_gamma),
    );
    report.check(verdict.monotone, format!("{name}: descent not monotone"));
    report.check(
        verdict.in_ball_all,
        format!("{name}: iterate left the ball"),
    );
    report.check(
        verdict.min_slack >= analysis::RECURSION_SLACK_FLOOR,
        format!(
            "{name}: recursion slack {} below {}",
            verdict.min_slack,
            analysis::RECURSION_SLACK_FLOOR
        ),
    );
    report.check(
        verdict.final_gamma < 1e-8,
        format!("{name}: final gamma {} not below 1e-8", verdict.final_gamma),
    );
    report.check(
        matches!(
            verdict.trace.status,
            TerminalStatus::GammaConverged | TerminalStatus::ResidualConverged
        ),
        format!("{name}: terminal status {:?}", verdict.trace.status),
    );
    Ok(verdict.trace.rows.len())
}

/// Seeded random connected resistor network with at most `max_nodes` nodes.
pub fn random_connected_network(rng: &mut ChaCha8Rng, max_nodes: usize) -> Result<ResistorNetwork> {
    let nodes = 4 + rng.gen_range(0..=(max_nodes.saturating_sub(4)));
    let boundary = 2 + rng.gen_range(0..=2.min(nodes - 3));
    let interior = nodes - boundary;
    let mut edges: Vec<(usize, usize)> = Vec::new();
    // Random attachment tree keeps the graph connected.
    for node in 1..nodes {
        let parent = rng.gen_range(0..node);
        edges.push((parent, node));
    }
    let extras = rng.gen_range(0..=nodes / 2);
    for _ in 0..extras {
        let a = rng.gen_range(0..nodes);
        let b = rng.gen_range(0..nodes);
        if a != b && !edges.contains(&(a, b)) && !edges.contains(&(b, a)) {
            edges.push((a, b));
        }
    }
    let sigma: Vec<f64> = (0..edges.len())
        .map(|_| 0.5 + 1.5 * rng.gen::<f64>())
        .collect();
    ResistorNetwork::new(boundary, interior, edges, sigma)
}

/// DtN structure checks: the hand-computed path-graph pin, symmetry, and
/// zero row sums on random connected graphs.
pub fn dtn_suite(seed: u64, graphs: usize) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("dtn");

    let path = ResistorNetwork::new(2, 1, vec![(0, 2), (2, 1)], vec![1.0, 1.0])?;
    let lambda = path.apply(path.ground_truth().expect("truth"));
    report.check(
        lambda.coeffs() == [0.5, -0.5, -0.5, 0.5],
        format!(
            "path-graph DtN {:?} is not exactly [[0.5,-0.5],[-0.5,0.5]]",
            lambda.coeffs()
        ),
    );

    let mut rng = sampling::rng_from_seed(seed);
    let mut max_asymmetry = 0.0f64;
    let mut max_row_sum = 0.0f64;
    for _ in 0..graphs {
        let net = random_connected_network(&mut rng, 12)?;
        let m = net.dtn_matrix(net.ground_truth().expect("truth"));
        let nb = m.nrows();
        for a in 0..nb {
            let mut row_sum = 0.0;
            for b in 0..nb {
                row_sum += m[(a, b)];
                max_asymmetry = max_asymmetry.max((m[(a, b)] - m[(b, a)]).abs());
            }
            max_row_sum = max_row_sum.max(row_sum.abs());
        }
    }
    report.metric("max_asymmetry", fmt_float(max_asymmetry));
    report.metric("max_row_sum", fmt_float(max_row_sum));
    report.check(
        max_asymmetry <= 1e-12,
        format!("DtN asymmetry {max_asymmetry:e} > 1e-12"),
    );
    report.check(
        max_row_sum <= 1e-12,
        format!("DtN row sum {max_row_sum:e} > 1e-12"),
    );
    Ok(report)
}

/// Which analysis checks apply to a problem's stability exponent.
pub fn applicable_checks(eps: f64, schedule_positive: bool) -> Vec<CheckKind> {
    let mut checks = vec![CheckKind::Recursion];
    if eps > 0.0 && eps < 1.0 {
        checks.push(CheckKind::Envelope);
    }
    if eps == 0.0 {
        // The quadratic variant carries its own envelope.
        checks.push(CheckKind::Envelope);
    }
    if eps == 1.0 {
        checks.push(CheckKind::Product);
    }
    if schedule_positive {
        checks.push(CheckKind::Order);
    }
    checks
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometry_suite_passes_quickly() {
        let report = geometry_suite(3, 50);
        assert!(report.passed, "failures: {:?}", report.failures);
    }

    #[test]
    fn dtn_suite_passes() {
        let report = dtn_suite(5, 10).unwrap();
        assert!(report.passed, "failures: {:?}", report.failures);
    }

    #[test]
    fn unknown_suite_rejected() {
        assert!(run_suite("nonsense", 1).is_err());
    }

    #[test]
    fn corrupted_config_fails_the_suite_by_name() {
        // Starve the run of iterations: the convergence check must fail and
        // the report must carry the fixture's name.
        let corrupted = crate::config::shipped::DIAG_HILBERT
            .replace("max_iterations = 10000", "max_iterations = 3");
        let report = recursion_suite_on(&[("corrupted_diag", &corrupted)]).unwrap();
        assert!(!report.passed);
        assert!(report.failures.iter().any(|f| f.contains("corrupted_diag")));
    }
}
