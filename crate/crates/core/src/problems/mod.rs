//! The forward-problem operation set and the shipped synthetic test problems.
//!
//! A [`ForwardProblem`] packages the nonlinear map `F : U → V`, its Fréchet
//! derivative `F'(u)h`, the adjoint `F'(u)* : V* → U*`, the declared constants
//! `(L, L̂, C_F, ε)`, a known ground truth `u†`, and the exact data
//! `v = F(u†)`. Three concrete problems with controllable Hölder stability
//! ship with the crate:
//!
//! * [`DiagonalLinear`]: `F(u)_i = s_i u_i`; exactly linear, Lipschitz
//!   stability (ε = 1) with `C_F` read off the smallest singular value.
//! * [`Monomial`]: `F(u)_i = |u_i|^{m-1} u_i` for `m ∈ (1, 2]`; stability
//!   exponent `ε = 2/m − 1`, reaching the ε = 0 regime at `m = 2`.
//! * [`ResistorNetwork`]: edge conductances to the boundary
//!   Dirichlet-to-Neumann matrix of a finite resistor network (the Schur
//!   complement of the weighted graph Laplacian onto the boundary nodes);
//!   Lipschitz-stable with empirically calibrated constants.
//!
//! The module also carries the two oracles used throughout the tests:
//! a central-difference derivative check and a sampled log–log stability fit.

mod diagonal;
mod monomial;
mod resistor;

pub use diagonal::DiagonalLinear;
pub use monomial::Monomial;
pub use resistor::ResistorNetwork;

use std::sync::Arc;

use rand_chacha::ChaCha8Rng;

use crate::analysis::linear_fit;
use crate::constants::ProblemConstants;
use crate::geometry::{bregman, shifted_bregman, PrimalVector, SpaceGeometry};
use crate::sampling;
use crate::{Error, Result};

/// Operation set every forward problem implements.
///
/// Implementations are immutable after construction and reentrant; the
/// oracles below thread an explicit seeded generator, so nothing here holds
/// hidden state.
pub trait ForwardProblem: Send + Sync {
    /// Short identifier used in reports.
    fn name(&self) -> &str;

    /// The model space U the unknown lives in.
    fn domain_space(&self) -> &Arc<SpaceGeometry>;

    /// The data space V. Modeled as ℓ² carrying the same gauge exponent as U,
    /// so `j_p` on V is the explicit map `w ↦ ‖w‖^{p-2} w`.
    fn range_space(&self) -> &Arc<SpaceGeometry>;

    /// Evaluate `F(u)`.
    fn apply(&self, u: &PrimalVector) -> PrimalVector;

    /// Evaluate the Fréchet derivative `F'(u)h`; linear in `h`.
    fn apply_derivative(&self, u: &PrimalVector, h: &PrimalVector) -> PrimalVector;

    /// Evaluate the adjoint `F'(u)* w` for `w ∈ V*`, satisfying
    /// `⟨F'(u)h, w⟩ = ⟨h, F'(u)* w⟩` with the weighted pairings of both spaces.
    fn apply_adjoint(
        &self,
        u: &PrimalVector,
        w: &crate::geometry::DualVector,
    ) -> crate::geometry::DualVector;

    /// Declared problem constants `(L, L̂, C_F, ε)`.
    fn constants(&self) -> &ProblemConstants;

    /// Exact solution, when the problem is synthetic with known truth.
    fn ground_truth(&self) -> Option<&PrimalVector>;

    /// Right-hand side `v`; equals `F(u†)` for the shipped problems.
    fn data(&self) -> &PrimalVector;

    /// Largest Bregman-ball radius on which the declared constants are valid,
    /// when the problem restricts its domain ball. `None` means unrestricted.
    fn rho_sq_cap(&self) -> Option<f64> {
        None
    }

    /// Anchor point for stability sampling. Defaults to the ground truth
    /// (zero without one); problems whose interesting stability regime sits
    /// elsewhere override it.
    fn stability_center(&self) -> PrimalVector {
        match self.ground_truth() {
            Some(t) => t.clone(),
            None => self.domain_space().zero_primal(),
        }
    }

    /// Whether `u` is inside the operator's natural domain.
    fn contains(&self, _u: &PrimalVector) -> bool {
        true
    }

    /// Default ball radius for stability sampling when a run does not choose
    /// one. Problems with a restricted domain override this.
    fn default_stability_radius(&self) -> f64 {
        10.0
    }
}

/// Result of [`finite_difference_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct FdCheck {
    /// Max over directions of the relative central-difference error.
    pub max_rel_error: f64,
    pub directions_evaluated: usize,
    /// Directions skipped because `F'(u)h` vanished (or left the domain).
    pub degenerate_skipped: usize,
}

/// Central-difference oracle for the Fréchet derivative:
///
/// ```text
/// max_h ‖ (F(u + δh) − F(u − δh)) / (2δ) − F'(u)h ‖ / ‖F'(u)h‖
/// ```
///
/// over seeded random unit directions `h`. Directions with `F'(u)h = 0`
/// are skipped and counted.
pub fn finite_difference_check(
    problem: &dyn ForwardProblem,
    u: &PrimalVector,
    directions: usize,
    step: f64,
    seed: u64,
) -> Result<FdCheck> {
    if !step.is_finite() || step <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "step must be positive, got {step}"
        )));
    }
    if directions == 0 {
        return Err(Error::InvalidParameter(
            "need at least one direction".into(),
        ));
    }
    let space = problem.domain_space();
    let mut rng = sampling::rng_from_seed(seed);
    let mut max_rel = 0.0f64;
    let mut evaluated = 0;
    let mut skipped = 0;
    for _ in 0..directions {
        let h = space
            .primal(sampling::unit_direction(&mut rng, space.dimension()))
            .expect("unit direction is finite");
        let forward = u.add(&h.scale(step));
        let backward = u.sub(&h.scale(step));
        if !problem.contains(&forward) || !problem.contains(&backward) {
            skipped += 1;
            continue;
        }
        let exact = problem.apply_derivative(u, &h);
        let exact_norm = exact.norm();
        if exact_norm < 1e-14 {
            skipped += 1;
            continue;
        }
        let fd = problem
            .apply(&forward)
            .sub(&problem.apply(&backward))
            .scale(1.0 / (2.0 * step));
        let rel = fd.sub(&exact).norm() / exact_norm;
        max_rel = max_rel.max(rel);
        evaluated += 1;
    }
    if evaluated == 0 {
        return Err(Error::Sampling(
            "every sampled direction was degenerate".into(),
        ));
    }
    Ok(FdCheck {
        max_rel_error: max_rel,
        directions_evaluated: evaluated,
        degenerate_skipped: skipped,
    })
}

/// Fitted Hölder stability parameters from sampled pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityFit {
    /// Smallest constant making the stability inequality hold on every sample
    /// at the fitted exponent.
    pub fitted_cf: f64,
    /// `2·slope/p − 1`, the stability exponent implied by the fitted slope.
    pub fitted_eps: f64,
    /// Log–log regression slope of `Δ_p^{u0}(u1,u2)` against `‖F(u1)−F(u2)‖`;
    /// the model predicts `(1+ε)p/2`.
    pub regression_slope: f64,
    pub sample_count: usize,
    pub residual_rms: f64,
}

/// Draw `(‖F(u1)−F(u2)‖, Δ_p^{u0}(u1,u2))` sample pairs around the problem's
/// stability anchor (`u0 = 0`).
///
/// Pair separations are drawn at log-spaced scales over three decades below
/// `ball_radius`, so a regression sees the scaling law rather than a
/// single-scale cloud. Deterministic for a fixed seed. Pairs whose images
/// coincide to 1e-14 are excluded as degenerate (0/0); if every sample is
/// degenerate the draw fails with a sampling error.
pub fn stability_samples(
    problem: &dyn ForwardProblem,
    sample_count: usize,
    seed: u64,
    ball_radius: f64,
) -> Result<Vec<(f64, f64)>> {
    if sample_count < 2 {
        return Err(Error::InvalidParameter("need at least two samples".into()));
    }
    if !ball_radius.is_finite() || ball_radius <= 0.0 {
        return Err(Error::Sampling(format!(
            "ball radius must be positive, got {ball_radius}"
        )));
    }
    let space = problem.domain_space();
    let n = space.dimension();
    let center = problem.stability_center();
    let mut rng = sampling::rng_from_seed(seed);

    let mut samples = Vec::with_capacity(sample_count);
    for _ in 0..sample_count {
        // Bounded retries per sample keep the generator stream aligned with
        // the sample index, so partial degeneracy stays deterministic.
        for _attempt in 0..64 {
            let scale = sampling::log_uniform_radius(&mut rng, ball_radius, 4.0);
            let x1 = sampling::uniform_in_ball(&mut rng, n, scale);
            let x2 = sampling::uniform_in_ball(&mut rng, n, scale);
            let u1 = offset(&center, &x1);
            let u2 = offset(&center, &x2);
            if !problem.contains(&u1) || !problem.contains(&u2) {
                continue;
            }
            let df = problem.apply(&u1).sub(&problem.apply(&u2)).norm();
            let delta = bregman(&u1, &u2)?;
            if df <= 1e-14 || delta <= 0.0 || !df.is_finite() || !delta.is_finite() {
                continue;
            }
            samples.push((df, delta));
            break;
        }
    }
    if samples.len() < 2 {
        return Err(Error::Sampling(
            "all sampled pairs were degenerate (image separation below 1e-14)".into(),
        ));
    }
    Ok(samples)
}

/// Fit the Hölder stability law `Δ ≤ C_F^p ‖ΔF‖^{(1+ε)p/2}` to drawn samples
/// in log–log coordinates.
pub fn fit_stability(samples: &[(f64, f64)], p: f64) -> Result<StabilityFit> {
    if samples.len() < 2 {
        return Err(Error::Sampling("need at least two usable samples".into()));
    }
    let log_df: Vec<f64> = samples.iter().map(|(df, _)| df.ln()).collect();
    let log_delta: Vec<f64> = samples.iter().map(|(_, d)| d.ln()).collect();
    let fit = linear_fit(&log_df, &log_delta);
    let slope = fit.slope;
    // Largest intercept residual at the fitted slope: the smallest constant
    // covering every sample.
    let max_residual = log_df
        .iter()
        .zip(&log_delta)
        .map(|(x, y)| y - slope * x)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(StabilityFit {
        fitted_cf: (max_residual / p).exp(),
        fitted_eps: 2.0 * slope / p - 1.0,
        regression_slope: slope,
        sample_count: samples.len(),
        residual_rms: fit.residual_rms,
    })
}

/// Draw samples and fit the stability law in one step.
pub fn estimate_stability(
    problem: &dyn ForwardProblem,
    sample_count: usize,
    seed: u64,
    ball_radius: f64,
) -> Result<StabilityFit> {
    let samples = stability_samples(problem, sample_count, seed, ball_radius)?;
    fit_stability(&samples, problem.domain_space().p())
}

fn offset(center: &PrimalVector, delta: &[f64]) -> PrimalVector {
    let coeffs: Vec<f64> = center
        .coeffs()
        .iter()
        .zip(delta)
        .map(|(c, d)| c + d)
        .collect();
    center
        .space()
        .primal(coeffs)
        .expect("offset of finite vectors is finite")
}

/// Draw a point of the Bregman ball `B = {u : Δ_p^{u0}(u†, u) ≤ ρ²}` by
/// rejection from the enclosing norm ball of radius `(p ρ²/C_p)^{1/p}`
/// around `u†` (the inclusion given by the p-convexity inequality).
pub fn sample_in_bregman_ball(
    space: &Arc<SpaceGeometry>,
    u_dag: &PrimalVector,
    u0: &PrimalVector,
    rho_sq: f64,
    rng: &mut ChaCha8Rng,
) -> Result<PrimalVector> {
    let p = space.p();
    let radius = (p * rho_sq / space.c_p()).powf(1.0 / p);
    for _ in 0..100_000 {
        let x = sampling::uniform_in_ball(rng, space.dimension(), radius);
        let candidate = offset(u_dag, &x);
        if shifted_bregman(u_dag, &candidate, u0)? <= rho_sq {
            return Ok(candidate);
        }
    }
    Err(Error::Sampling(
        "rejection sampling in the Bregman ball did not accept".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn fd_check_linear_is_exact() {
        let problem = DiagonalLinear::new(vec![2.0, 0.5]).unwrap();
        let u = problem.domain_space().primal(vec![0.3, -0.7]).unwrap();
        // No truncation error for a linear map, so a large step leaves only
        // rounding of u + step*h, which the step then divides back out.
        let check = finite_difference_check(&problem, &u, 32, 1e-2, 11).unwrap();
        assert!(
            check.max_rel_error <= 1e-12,
            "error {}",
            check.max_rel_error
        );
        assert_eq!(check.degenerate_skipped, 0);
    }

    #[test]
    fn fd_check_monomial() {
        let problem = Monomial::new(2, 1.5).unwrap();
        let u = problem.ground_truth().unwrap().clone();
        let check = finite_difference_check(&problem, &u, 64, 1e-5, 13).unwrap();
        assert!(check.max_rel_error <= 1e-6, "error {}", check.max_rel_error);
    }

    #[test]
    fn fd_check_rejects_bad_step() {
        let problem = DiagonalLinear::new(vec![1.0]).unwrap();
        let u = problem.domain_space().zero_primal();
        assert!(finite_difference_check(&problem, &u, 4, 0.0, 1).is_err());
    }

    #[test]
    fn fd_check_counts_degenerate_directions() {
        // The monomial derivative vanishes identically at the origin, so
        // every direction is degenerate and the oracle reports that.
        let problem = Monomial::new(2, 1.5).unwrap();
        let u = problem.domain_space().zero_primal();
        match finite_difference_check(&problem, &u, 8, 1e-5, 2) {
            Err(Error::Sampling(_)) => {}
            other => panic!("expected an all-degenerate sampling error, got {other:?}"),
        }
    }

    #[test]
    fn derivative_is_linear_in_direction() {
        let mut rng = sampling::rng_from_seed(19);
        for problem in [
            Box::new(DiagonalLinear::new(vec![2.0, 0.5, 1.0]).unwrap()) as Box<dyn ForwardProblem>,
            Box::new(Monomial::new(3, 1.5).unwrap()),
        ] {
            let space = problem.domain_space();
            for _ in 0..50 {
                let u = space
                    .primal(sampling::standard_normal_vec(&mut rng, 3))
                    .unwrap();
                let h1 = space
                    .primal(sampling::standard_normal_vec(&mut rng, 3))
                    .unwrap();
                let h2 = space
                    .primal(sampling::standard_normal_vec(&mut rng, 3))
                    .unwrap();
                let lambda = 1.7;
                let sum = problem.apply_derivative(&u, &h1.add(&h2.scale(lambda)));
                let parts = problem
                    .apply_derivative(&u, &h1)
                    .add(&problem.apply_derivative(&u, &h2).scale(lambda));
                let denom = parts.norm().max(1e-30);
                assert!(sum.sub(&parts).norm() / denom <= 1e-10);
            }
        }
    }

    #[test]
    fn stability_fit_diagonal_is_lipschitz() {
        // Anisotropic singular values scatter the image gap by a bounded
        // direction factor, attenuating the fitted slope slightly below 2.
        let problem = DiagonalLinear::new(vec![2.0, 0.5]).unwrap();
        let fit = estimate_stability(&problem, 500, 42, 10.0).unwrap();
        assert!(
            (fit.fitted_eps - 1.0).abs() <= 0.1,
            "fitted eps {}",
            fit.fitted_eps
        );
        // Isotropic values give the exact law: slope 2, eps 1.
        let problem = DiagonalLinear::new(vec![1.0, 1.0]).unwrap();
        let fit = estimate_stability(&problem, 500, 42, 10.0).unwrap();
        assert!(
            (fit.fitted_eps - 1.0).abs() <= 0.02,
            "fitted eps {}",
            fit.fitted_eps
        );
        assert!((fit.regression_slope - 2.0).abs() <= 0.04);
    }

    #[test]
    fn stability_fit_monomial_target() {
        let problem = Monomial::new(2, 1.5).unwrap();
        let fit = estimate_stability(&problem, 500, 42, 10.0).unwrap();
        assert!(
            (fit.fitted_eps - 1.0 / 3.0).abs() <= 0.1,
            "fitted eps {}",
            fit.fitted_eps
        );
    }

    #[test]
    fn stability_fit_holds_on_every_sample() {
        // Re-draw the same pairs and check the fitted pair covers them.
        let problem = Monomial::new(2, 1.25).unwrap();
        let fit = estimate_stability(&problem, 300, 7, 10.0).unwrap();
        let space = problem.domain_space();
        let p = space.p();
        let mut rng = sampling::rng_from_seed(7);
        for _ in 0..300 {
            let scale = sampling::log_uniform_radius(&mut rng, 10.0, 4.0);
            let x1 = sampling::uniform_in_ball(&mut rng, 2, scale);
            let x2 = sampling::uniform_in_ball(&mut rng, 2, scale);
            let u1 = space.primal(x1).unwrap();
            let u2 = space.primal(x2).unwrap();
            let df = problem.apply(&u1).sub(&problem.apply(&u2)).norm();
            let delta = bregman(&u1, &u2).unwrap();
            if df <= 1e-14 || delta <= 0.0 {
                continue;
            }
            let rhs = fit.fitted_cf.powf(p) * df.powf((1.0 + fit.fitted_eps) * p / 2.0);
            assert!(
                delta <= rhs * (1.0 + 1e-9),
                "sample violates fitted stability pair"
            );
        }
    }

    #[test]
    fn stability_fit_is_deterministic() {
        let problem = Monomial::new(3, 1.75).unwrap();
        let a = estimate_stability(&problem, 200, 5, 10.0).unwrap();
        let b = estimate_stability(&problem, 200, 5, 10.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn stability_fit_degenerate_radius() {
        let problem = DiagonalLinear::new(vec![1.0, 1.0]).unwrap();
        assert!(matches!(
            estimate_stability(&problem, 100, 3, 0.0),
            Err(Error::Sampling(_))
        ));
    }

    #[test]
    fn bregman_ball_sampler_stays_inside() {
        let space = crate::geometry::SpaceGeometry::hilbert(3).unwrap();
        let u_dag = space.primal(vec![1.0, -0.5, 0.2]).unwrap();
        let u0 = space.zero_primal();
        let mut rng = sampling::rng_from_seed(9);
        for _ in 0..200 {
            let u = sample_in_bregman_ball(&space, &u_dag, &u0, 0.05, &mut rng).unwrap();
            assert!(shifted_bregman(&u_dag, &u, &u0).unwrap() <= 0.05);
        }
    }

    #[test]
    fn adjoint_identity_sampled() {
        let problems: Vec<Box<dyn ForwardProblem>> = vec![
            Box::new(DiagonalLinear::new(vec![2.0, 0.5, 1.0]).unwrap()),
            Box::new(Monomial::new(3, 1.5).unwrap()),
        ];
        let mut rng = sampling::rng_from_seed(21);
        for problem in &problems {
            let du = problem.domain_space();
            let dv = problem.range_space();
            for _ in 0..100 {
                let u = du
                    .primal(sampling::standard_normal_vec(&mut rng, du.dimension()))
                    .unwrap();
                let h = du
                    .primal(sampling::standard_normal_vec(&mut rng, du.dimension()))
                    .unwrap();
                let w = dv
                    .dual(sampling::standard_normal_vec(&mut rng, dv.dimension()))
                    .unwrap();
                let lhs = crate::geometry::pairing(&problem.apply_derivative(&u, &h), &w);
                let rhs = crate::geometry::pairing(&h, &problem.apply_adjoint(&u, &w));
                assert_relative_eq!(lhs, rhs, max_relative = 1e-10, epsilon = 1e-12);
            }
        }
    }
}
