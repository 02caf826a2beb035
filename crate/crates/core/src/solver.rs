//! The iteratively regularized Landweber iteration, its unshifted variant,
//! β schedules, stopping rules and per-iteration trace recording.
//!
//! One step of the standard variant:
//!
//! ```text
//! r   = F(u_k) − v
//! d   = (1 − β_k) J_p(u_k − u_0) − μ F'(u_k)* j_p(r)
//! u_{k+1} = u_0 + J_q*(d)
//! ```
//!
//! With `β_k = 0` the step is bit-identical to plain Landweber iteration.
//! The unshifted variant regularizes against `J_p(u_k)` directly and adds
//! `β_k J_p(u_0 − u_k)`; it requires `β_max < ½`.

use crate::constants::{self, RateConstants};
use crate::geometry::{shifted_bregman, PrimalVector};
use crate::problems::ForwardProblem;
use crate::{Error, Result};

/// Shrinkage sequence `{β_k}` feeding the iteration, clamped to `[0, β_max]`
/// with `β_max < 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaSchedule {
    kind: BetaKind,
    beta_max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BetaKind {
    /// `β_k ≡ 0`: plain Landweber iteration.
    Zero,
    /// `β_k = base / (k+1)^s` with `s > 1` so that `Σ β_k < ∞`.
    Power { base: f64, exponent: f64 },
    /// `β_k = base · θ^k` with `θ ∈ (0, 1)`.
    Geometric { base: f64, ratio: f64 },
    /// `β_k = min(base · θ^k, C · γ_k)`: an experiment-mode realization of the
    /// smoothness coupling `β_k ≤ C γ_k`. It presupposes a known ground truth
    /// (γ_k is the error itself), so it verifies the rate theory rather than
    /// being a practical schedule.
    Adaptive {
        base: f64,
        ratio: f64,
        smoothness_c: f64,
    },
}

impl BetaSchedule {
    pub fn zero() -> Self {
        BetaSchedule {
            kind: BetaKind::Zero,
            beta_max: 0.0,
        }
    }

    pub fn power(base: f64, exponent: f64, beta_max: f64) -> Result<Self> {
        if !exponent.is_finite() || exponent <= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "power schedule needs exponent > 1 for a summable sequence, got {exponent}"
            )));
        }
        Self::checked(BetaKind::Power { base, exponent }, base, beta_max)
    }

    pub fn geometric(base: f64, ratio: f64, beta_max: f64) -> Result<Self> {
        if !ratio.is_finite() || ratio <= 0.0 || ratio >= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "geometric ratio must lie in (0, 1), got {ratio}"
            )));
        }
        Self::checked(BetaKind::Geometric { base, ratio }, base, beta_max)
    }

    pub fn adaptive(base: f64, ratio: f64, smoothness_c: f64, beta_max: f64) -> Result<Self> {
        if !ratio.is_finite() || ratio <= 0.0 || ratio >= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "adaptive ratio must lie in (0, 1), got {ratio}"
            )));
        }
        if !smoothness_c.is_finite() || smoothness_c <= 0.0 {
            return Err(Error::InvalidParameter(
                "smoothness constant must be positive".into(),
            ));
        }
        Self::checked(
            BetaKind::Adaptive {
                base,
                ratio,
                smoothness_c,
            },
            base,
            beta_max,
        )
    }

    fn checked(kind: BetaKind, base: f64, beta_max: f64) -> Result<Self> {
        if !base.is_finite() || base <= 0.0 || base >= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "schedule base must lie in (0, 1), got {base}"
            )));
        }
        if !beta_max.is_finite() || beta_max <= 0.0 || beta_max >= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "beta_max must lie in (0, 1), got {beta_max}"
            )));
        }
        Ok(BetaSchedule { kind, beta_max })
    }

    pub fn kind(&self) -> &BetaKind {
        &self.kind
    }

    pub fn beta_max(&self) -> f64 {
        self.beta_max
    }

    /// Lower `β_max` to `bound` if it currently exceeds it (used to clamp a
    /// schedule by the admissibility bound when one exists).
    pub fn clamp_beta_max(mut self, bound: f64) -> Self {
        if bound > 0.0 && bound < self.beta_max {
            self.beta_max = bound;
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.kind, BetaKind::Zero)
    }

    /// Emit `β_k`. The adaptive kind needs the current `γ_k`, hence a run
    /// with known ground truth; without one it is a configuration error.
    pub fn emit(&self, k: usize, gamma_k: Option<f64>) -> Result<f64> {
        let raw = match &self.kind {
            BetaKind::Zero => 0.0,
            BetaKind::Power { base, exponent } => base / ((k + 1) as f64).powf(*exponent),
            BetaKind::Geometric { base, ratio } => base * ratio.powi(k as i32),
            BetaKind::Adaptive {
                base,
                ratio,
                smoothness_c,
            } => {
                let gamma = gamma_k.ok_or_else(|| {
                    Error::Config("adaptive schedule requires a run with known ground truth".into())
                })?;
                (base * ratio.powi(k as i32)).min(smoothness_c * gamma)
            }
        };
        Ok(raw.clamp(0.0, self.beta_max))
    }
}

/// Which dual-anchor form of the iteration to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IterationVariant {
    /// Regularizes the shifted dual iterate `J_p(u_k − u_0)`.
    Standard,
    /// Regularizes `J_p(u_k)` with an explicit `β_k J_p(u_0 − u_k)` pull;
    /// requires `β_max < ½`.
    Unshifted,
}

/// Run parameters for [`solve`].
#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Step size μ; must lie strictly below the mode-appropriate admissible
    /// supremum unless `allow_mu_override` is set.
    pub mu: f64,
    pub schedule: BetaSchedule,
    pub variant: IterationVariant,
    pub max_iterations: usize,
    pub residual_tolerance: f64,
    pub gamma_tolerance: f64,
    /// Initial guess; also the anchor of the shifted Bregman error γ_k.
    pub u0: PrimalVector,
    /// Explicit Bregman-ball radius. `None` uses the closed-form value, which
    /// exists only for ε > 0 and is finite only for L > 0; the effective
    /// radius is additionally capped by the problem's declared domain cap.
    pub rho_sq: Option<f64>,
    /// Run even if μ violates the admissible bound (hypothesis-violation
    /// experiments). The trace then carries no recursion bound column.
    pub allow_mu_override: bool,
    /// Keep every iterate in the trace (used by bit-level comparisons).
    pub record_iterates: bool,
}

/// Why the iteration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminalStatus {
    ResidualConverged,
    GammaConverged,
    MaxIterations,
    /// γ_k exceeded ρ²: a theorem-violation signal when the hypotheses hold.
    LeftBall,
}

impl TerminalStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            TerminalStatus::ResidualConverged => "residual_converged",
            TerminalStatus::GammaConverged => "gamma_converged",
            TerminalStatus::MaxIterations => "max_iterations",
            TerminalStatus::LeftBall => "left_ball",
        }
    }
}

/// One recorded iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub k: usize,
    pub beta: f64,
    /// `γ_k = Δ_p^{u0}(u†, u_k)`; absent without ground truth.
    pub gamma: Option<f64>,
    /// `‖F(u_k) − v‖` in the data-space norm.
    pub residual: f64,
    /// `‖u_k − u†‖` in the model-space norm; absent without ground truth.
    pub err_norm: Option<f64>,
    pub in_ball: Option<bool>,
    pub alpha: f64,
    /// Recursion-bound right-hand side predicting γ_{k+1}; absent when the
    /// run's constants are unavailable (override runs, infinite radius).
    pub bound_rhs: Option<f64>,
}

/// Full record of one solve.
#[derive(Debug, Clone)]
pub struct IterationTrace {
    pub rows: Vec<TraceRow>,
    pub status: TerminalStatus,
    /// Effective ball radius used for the in-ball flags.
    pub rho_sq: f64,
    pub mu: f64,
    /// The recursion constants of the run, when the hypotheses allowed them.
    pub rate_constants: Option<RateConstants>,
    /// Present when the config asked for `record_iterates`.
    pub iterates: Option<Vec<PrimalVector>>,
}

impl IterationTrace {
    /// The γ series; errors when the trace was recorded without ground truth.
    pub fn gammas(&self) -> Result<Vec<f64>> {
        self.rows
            .iter()
            .map(|r| {
                r.gamma.ok_or_else(|| {
                    Error::Precondition("trace carries no gamma values (no ground truth)".into())
                })
            })
            .collect()
    }

    pub fn betas(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.beta).collect()
    }

    pub fn alphas(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.alpha).collect()
    }
}

/// One step of the standard variant. Exact sequencing: residual, dual update,
/// inverse map - nothing else touches the iterate.
pub fn step(
    problem: &dyn ForwardProblem,
    mu: f64,
    u0: &PrimalVector,
    u_k: &PrimalVector,
    beta_k: f64,
) -> PrimalVector {
    let r = problem.apply(u_k).sub(problem.data());
    let jr = r.duality_map();
    let adj = problem.apply_adjoint(u_k, &jr);
    let d = u_k
        .sub(u0)
        .duality_map()
        .scale(1.0 - beta_k)
        .sub(&adj.scale(mu));
    u0.add(&d.inverse_duality_map())
}

/// One step of the unshifted variant:
/// `J_p(u_{k+1}) = J_p(u_k) − μ F'(u_k)* j_p(r) + β_k J_p(u_0 − u_k)`.
pub fn step_variant_b(
    problem: &dyn ForwardProblem,
    mu: f64,
    u0: &PrimalVector,
    u_k: &PrimalVector,
    beta_k: f64,
) -> PrimalVector {
    let r = problem.apply(u_k).sub(problem.data());
    let jr = r.duality_map();
    let adj = problem.apply_adjoint(u_k, &jr);
    let pull = u0.sub(u_k).duality_map().scale(beta_k);
    let d = u_k.duality_map().sub(&adj.scale(mu)).add(&pull);
    d.inverse_duality_map()
}

/// Resolve the effective ball radius for a run: explicit override, else the
/// closed-form value, both capped by the problem's domain cap.
pub fn effective_rho_sq(problem: &dyn ForwardProblem, config_rho: Option<f64>) -> Result<f64> {
    let space = problem.domain_space();
    let consts = problem.constants();
    let base = match config_rho {
        Some(value) => {
            // +infinity is a legitimate "unconstrained ball" override.
            if value.is_nan() || value <= 0.0 {
                return Err(Error::Config(format!(
                    "rho_sq must be positive, got {value}"
                )));
            }
            value
        }
        None => {
            if consts.stability_eps == 0.0 {
                return Err(Error::Config(
                    "the ball radius formula is singular at stability exponent 0; \
                     set rho_sq explicitly"
                        .into(),
                ));
            }
            constants::rho_squared(space, consts)?
        }
    };
    Ok(match problem.rho_sq_cap() {
        Some(cap) => base.min(cap),
        None => base,
    })
}

/// Run the iteration until a stopping rule fires.
///
/// Stopping, in order of precedence at each iterate: residual within
/// tolerance, γ within tolerance, γ above ρ² (recorded as [`TerminalStatus::LeftBall`],
/// not an error - hypothesis-violation runs are a supported experiment), and
/// the iteration cap.
pub fn solve(problem: &dyn ForwardProblem, config: &SolverConfig) -> Result<IterationTrace> {
    let space = problem.domain_space();
    let consts = problem.constants();
    if config.u0.space() != space {
        return Err(Error::Config(
            "u0 does not live in the problem's model space".into(),
        ));
    }
    if !config.mu.is_finite() || config.mu <= 0.0 {
        return Err(Error::Config(format!(
            "step size mu must be positive, got {}",
            config.mu
        )));
    }
    if config.variant == IterationVariant::Unshifted && config.schedule.beta_max() >= 0.5 {
        return Err(Error::Config(format!(
            "the unshifted variant requires beta_max < 1/2, got {}",
            config.schedule.beta_max()
        )));
    }

    // Mode-appropriate admissibility of the step size.
    if !config.allow_mu_override {
        let bound = if consts.stability_eps == 0.0 {
            constants::mu_max_eps0(space, consts)?
        } else {
            constants::mu_max(space, consts)
        };
        if config.mu >= bound {
            let condition = if consts.stability_eps == 0.0 {
                "mu^(q-1) < q/(2^(q-1) G_q Lhat^q) * [1 - (1/2) L C_F^2 (p/C_p)^(2/p)]"
            } else {
                "mu^(q-1) < q/(2^q Lhat^q G_q)"
            };
            return Err(Error::Infeasible(format!(
                "step size mu = {} is not strictly below the admissible supremum {bound:.6e} \
                 ({condition}); set allow_mu_override to run anyway",
                config.mu
            )));
        }
    }

    let rho_sq = effective_rho_sq(problem, config.rho_sq)?;
    let rate = if rho_sq.is_finite() {
        match constants::rate_constants(space, consts, config.mu, rho_sq) {
            Ok(rc) => Some(rc),
            Err(err) => {
                if config.allow_mu_override {
                    None
                } else {
                    return Err(err);
                }
            }
        }
    } else {
        None
    };

    let truth = problem.ground_truth();
    let v = problem.data();
    let mut u = config.u0.clone();
    let mut rows = Vec::new();
    let mut iterates: Option<Vec<PrimalVector>> = config.record_iterates.then(Vec::new);

    let mut k = 0usize;
    let status = loop {
        let residual = problem.apply(&u).sub(v).norm();
        let gamma = match truth {
            Some(t) => Some(shifted_bregman(t, &u, &config.u0)?),
            None => None,
        };
        let err_norm = truth.map(|t| u.sub(t).norm());
        let in_ball = gamma.map(|g| g <= rho_sq);
        let beta = config.schedule.emit(k, gamma)?;
        let alpha = constants::alpha_k(space, beta);
        let bound_rhs = match (&rate, gamma) {
            (Some(rc), Some(g)) => Some(rc.recursion_rhs(g, beta)),
            _ => None,
        };
        rows.push(TraceRow {
            k,
            beta,
            gamma,
            residual,
            err_norm,
            in_ball,
            alpha,
            bound_rhs,
        });
        if let Some(list) = iterates.as_mut() {
            list.push(u.clone());
        }

        if residual <= config.residual_tolerance {
            break TerminalStatus::ResidualConverged;
        }
        if let Some(g) = gamma {
            if g <= config.gamma_tolerance {
                break TerminalStatus::GammaConverged;
            }
            if g > rho_sq {
                break TerminalStatus::LeftBall;
            }
        }
        if k >= config.max_iterations {
            break TerminalStatus::MaxIterations;
        }

        u = match config.variant {
            IterationVariant::Standard => step(problem, config.mu, &config.u0, &u, beta),
            IterationVariant::Unshifted => step_variant_b(problem, config.mu, &config.u0, &u, beta),
        };
        k += 1;
    };

    Ok(IterationTrace {
        rows,
        status,
        rho_sq,
        mu: config.mu,
        rate_constants: rate,
        iterates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{DiagonalLinear, Monomial};
    use approx::assert_relative_eq;

    fn basic_config(u0: PrimalVector, mu: f64) -> SolverConfig {
        SolverConfig {
            mu,
            schedule: BetaSchedule::zero(),
            variant: IterationVariant::Standard,
            max_iterations: 500,
            residual_tolerance: 0.0,
            gamma_tolerance: 1e-10,
            u0,
            rho_sq: Some(0.125),
            allow_mu_override: false,
            record_iterates: false,
        }
    }

    #[test]
    fn emit_beta_values() {
        let s = BetaSchedule::power(0.1, 2.0, 0.5).unwrap();
        assert_relative_eq!(s.emit(1, None).unwrap(), 0.025, max_relative = 1e-15);
        let s = BetaSchedule::geometric(0.1, 0.5, 0.5).unwrap();
        assert_relative_eq!(s.emit(3, None).unwrap(), 0.0125, max_relative = 1e-15);
        let s = BetaSchedule::adaptive(0.1, 0.5, 2.0, 0.5).unwrap();
        assert_eq!(s.emit(0, Some(0.0)).unwrap(), 0.0);
        assert!(s.emit(0, None).is_err());
        // Clamp at beta_max.
        let s = BetaSchedule::geometric(0.4, 0.5, 0.2).unwrap();
        assert_eq!(s.emit(0, None).unwrap(), 0.2);
    }

    #[test]
    fn schedule_validation() {
        assert!(BetaSchedule::power(0.1, 1.0, 0.5).is_err());
        assert!(BetaSchedule::power(0.1, 2.0, 1.0).is_err());
        assert!(BetaSchedule::geometric(0.1, 1.0, 0.5).is_err());
        assert!(BetaSchedule::adaptive(0.1, 0.5, 0.0, 0.5).is_err());
    }

    #[test]
    fn hilbert_scalar_step_hand_value() {
        // F = identity, v = 0, u0 = 0, u_k = 1, mu = 0.5, beta = 0.1 -> 0.4.
        let problem = DiagonalLinear::with_ground_truth(vec![1.0], vec![0.0]).unwrap();
        let space = problem.domain_space();
        let u0 = space.zero_primal();
        let u_k = space.primal(vec![1.0]).unwrap();
        let next = step(&problem, 0.5, &u0, &u_k, 0.1);
        assert_relative_eq!(next.coeffs()[0], 0.4, max_relative = 1e-15);
        // The unshifted variant gives the same value here: 1 − 0.5 − 0.1.
        let next = step_variant_b(&problem, 0.5, &u0, &u_k, 0.1);
        assert_relative_eq!(next.coeffs()[0], 0.4, max_relative = 1e-15);
    }

    #[test]
    fn variants_coincide_at_zero_beta_and_zero_anchor() {
        // With u0 = 0 and beta = 0 the two dual updates are the same formula.
        let problem = Monomial::new(2, 1.5).unwrap();
        let space = problem.domain_space();
        let u0 = space.zero_primal();
        let u_k = space.primal(vec![1.1, 0.9]).unwrap();
        let a = step(&problem, 0.1, &u0, &u_k, 0.0);
        let b = step_variant_b(&problem, 0.1, &u0, &u_k, 0.0);
        assert_eq!(a.coeffs(), b.coeffs());
    }

    #[test]
    fn truth_is_fixed_point() {
        let problem = Monomial::new(2, 1.5).unwrap();
        let truth = problem.ground_truth().unwrap().clone();
        let u0 = problem.domain_space().primal(vec![0.9, 1.1]).unwrap();
        let next = step(&problem, 0.1, &u0, &truth, 0.0);
        for (a, b) in next.coeffs().iter().zip(truth.coeffs()) {
            assert_relative_eq!(a, b, max_relative = 1e-12);
        }
        let next = step_variant_b(&problem, 0.1, &u0, &truth, 0.0);
        for (a, b) in next.coeffs().iter().zip(truth.coeffs()) {
            assert_relative_eq!(a, b, max_relative = 1e-12);
        }
    }

    #[test]
    fn zero_beta_step_is_bitwise_plain_landweber() {
        let problem = Monomial::new(3, 1.5).unwrap();
        let space = problem.domain_space();
        let u0 = space.primal(vec![0.9, 1.0, 1.1]).unwrap();
        let u_k = space.primal(vec![1.05, 0.95, 1.0]).unwrap();
        let with_beta = step(&problem, 0.1, &u0, &u_k, 0.0);
        // Independent sequencing of the plain Landweber update.
        let r = problem.apply(&u_k).sub(problem.data());
        let adj = problem.apply_adjoint(&u_k, &r.duality_map());
        let plain = u0.add(
            &u_k.sub(&u0)
                .duality_map()
                .sub(&adj.scale(0.1))
                .inverse_duality_map(),
        );
        assert_eq!(with_beta.coeffs(), plain.coeffs());
    }

    #[test]
    fn diagonal_zero_schedule_contracts_in_closed_form() {
        // gamma_k = (1 - mu)^{2k} gamma_0 for F = identity.
        let problem = DiagonalLinear::with_ground_truth(vec![1.0, 1.0], vec![0.1, 0.1]).unwrap();
        let space = problem.domain_space().clone();
        let mut config = basic_config(space.zero_primal(), 0.4);
        config.residual_tolerance = 1e-9;
        config.gamma_tolerance = 0.0;
        let trace = solve(&problem, &config).unwrap();
        assert_eq!(trace.status, TerminalStatus::ResidualConverged);
        let gammas = trace.gammas().unwrap();
        for (k, g) in gammas.iter().enumerate() {
            let predicted = 0.6f64.powi(2 * k as i32) * gammas[0];
            // The Bregman evaluation cancels O(|u|^2) terms, so the relative
            // error grows as gamma shrinks toward rounding scale.
            assert_relative_eq!(*g, predicted, max_relative = 1e-6, epsilon = 1e-15);
        }
    }

    #[test]
    fn starting_at_truth_stops_immediately() {
        let problem = DiagonalLinear::new(vec![1.0, 1.0]).unwrap();
        let truth = problem.ground_truth().unwrap().clone();
        let config = basic_config(truth, 0.4);
        let trace = solve(&problem, &config).unwrap();
        assert_eq!(trace.rows.len(), 1);
        assert_eq!(trace.rows[0].gamma, Some(0.0));
    }

    #[test]
    fn oversized_mu_rejected_without_override() {
        let problem = DiagonalLinear::new(vec![1.0, 1.0]).unwrap();
        let space = problem.domain_space().clone();
        // mu_max = 0.5 for unit singular values.
        let config = basic_config(space.zero_primal(), 0.5);
        assert!(matches!(
            solve(&problem, &config),
            Err(Error::Infeasible(_))
        ));
        let mut config = basic_config(space.zero_primal(), 0.5);
        config.allow_mu_override = true;
        let trace = solve(&problem, &config).unwrap();
        assert!(trace.rate_constants.is_none() || !trace.rows.is_empty());
    }

    #[test]
    fn unshifted_variant_needs_small_beta_max() {
        let problem = DiagonalLinear::new(vec![1.0, 1.0]).unwrap();
        let space = problem.domain_space().clone();
        let mut config = basic_config(space.zero_primal(), 0.4);
        config.variant = IterationVariant::Unshifted;
        config.schedule = BetaSchedule::power(0.1, 2.0, 0.5).unwrap();
        assert!(matches!(solve(&problem, &config), Err(Error::Config(_))));
        config.schedule = BetaSchedule::power(0.1, 2.0, 0.49).unwrap();
        assert!(solve(&problem, &config).is_ok());
    }

    #[test]
    fn hilbert_dual_update_matches_textbook_form() {
        // p = q = r = 2: u_{k+1} = u0 + (1-beta)(u_k - u0) - mu F'* (F(u_k)-v) ||F(u_k)-v||^{p-2}.
        let problem = DiagonalLinear::with_ground_truth(vec![2.0, 0.5], vec![0.2, -0.1]).unwrap();
        let space = problem.domain_space();
        let u0 = space.primal(vec![0.05, 0.05]).unwrap();
        let u_k = space.primal(vec![0.3, -0.2]).unwrap();
        let (mu, beta) = (0.05, 0.07);
        let stepped = step(&problem, mu, &u0, &u_k, beta);
        let r = problem.apply(&u_k).sub(problem.data());
        let adj = problem.apply_adjoint(&u_k, &space_dual(&r));
        let direct: Vec<f64> = (0..2)
            .map(|i| {
                u0.coeffs()[i] + (1.0 - beta) * (u_k.coeffs()[i] - u0.coeffs()[i])
                    - mu * adj.coeffs()[i]
            })
            .collect();
        for (a, b) in stepped.coeffs().iter().zip(&direct) {
            assert_relative_eq!(a, b, max_relative = 1e-12);
        }
    }

    fn space_dual(r: &PrimalVector) -> crate::geometry::DualVector {
        // j_p in Hilbert space with p = 2 is the identity embedding.
        r.space().dual(r.coeffs().to_vec()).unwrap()
    }
}
