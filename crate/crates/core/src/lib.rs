//! # irlw
//!
//! Iteratively regularized Landweber iteration for nonlinear ill-posed
//! operator equations `F(u) = v` posed in discretized Banach spaces, together
//! with the machinery needed to *verify* its convergence behaviour at desk
//! scale: duality mappings and Bregman distances on weighted ℓ^r spaces,
//! closed-form evaluation of every step-size and radius bound the iteration
//! depends on, synthetic forward problems with controllable Hölder stability,
//! and per-iteration recursion / rate-envelope checks.
//!
//! The iteration solves `F(u) = v` by the dual-space update
//!
//! ```text
//! J_p(u_{k+1} - u_0) = (1 - β_k) J_p(u_k - u_0) - μ F'(u_k)* j_p(F(u_k) - v)
//! u_{k+1}            = u_0 + J_q*( J_p(u_{k+1} - u_0) )
//! ```
//!
//! where `J_p`, `J_q*`, `j_p` are duality mappings and `β_k` is a shrinkage
//! sequence pulling the iterate toward the initial guess. With `β_k ≡ 0` the
//! scheme reduces to plain Landweber iteration.
//!
//! ## Modules
//!
//! * [`geometry`]: weighted ℓ^r spaces, duality maps, Bregman distances,
//!   sampled convexity/smoothness constants.
//! * [`constants`]: the named constants and admissibility bounds
//!   (`kappa_p`, `mu_max`, `rho_squared`, `beta_admissible_max`, `K1..K5`,
//!   `M1`, `alpha_k`).
//! * [`problems`]: the [`problems::ForwardProblem`] operation set and three
//!   shipped test problems (diagonal linear, componentwise monomial,
//!   resistor-network Dirichlet-to-Neumann map), plus derivative/adjoint and
//!   stability oracles.
//! * [`solver`]: the iteration itself, β schedules, stopping rules and
//!   trace recording.
//! * [`analysis`]: recursion-bound slack, rate envelopes, the ε = 1 product
//!   bound, and the `O(β_k^{q-1})` order check.
//! * [`config`] / [`report`]: the flat sectioned config format and the CSV /
//!   summary writers used by the `irlw` binary.
//! * [`verify`]: the built-in invariant suites behind `irlw verify`.
//!
//! ## Quick start
//!
//! ```
//! use irlw::geometry::SpaceGeometry;
//! use irlw::problems::{DiagonalLinear, ForwardProblem};
//! use irlw::solver::{solve, BetaSchedule, IterationVariant, SolverConfig, TerminalStatus};
//!
//! let problem = DiagonalLinear::new(vec![1.0, 1.0]).unwrap();
//! let space = problem.domain_space().clone();
//! let config = SolverConfig {
//!     mu: 0.4,
//!     schedule: BetaSchedule::zero(),
//!     variant: IterationVariant::Standard,
//!     max_iterations: 200,
//!     residual_tolerance: 1e-12,
//!     gamma_tolerance: 0.0,
//!     u0: space.zero_primal(),
//!     rho_sq: Some(0.125),
//!     allow_mu_override: false,
//!     record_iterates: false,
//! };
//! let trace = solve(&problem, &config).unwrap();
//! assert_eq!(trace.status, TerminalStatus::ResidualConverged);
//! ```

pub mod analysis;
pub mod config;
pub mod constants;
pub mod geometry;
pub mod problems;
pub mod report;
pub mod sampling;
pub mod solver;
pub mod verify;

/// Errors reported by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Vector length does not match the space it is claimed to live in.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A parameter is outside the domain of the operation.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A stated admissibility condition has no solution for these inputs.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// Graph structure is unusable (disconnected, bad indices, ...).
    #[error("graph structure error: {0}")]
    Structure(String),

    /// A sampling-based estimator could not produce usable samples.
    #[error("sampling error: {0}")]
    Sampling(String),

    /// Run configuration is inconsistent.
    #[error("configuration error: {0}")]
    Config(String),

    /// An operation was invoked on data that does not carry what it needs.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Config file could not be parsed; carries the offending line number.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
