//! Closed-form evaluation of every named constant and admissibility bound the
//! iteration and its rate analysis depend on: the gauge constant `kappa_p`,
//! the step-size suprema `mu_max` (Hölder mode) and `mu_max_eps0` (Lipschitz
//! stability exponent ε = 0), the Bregman-ball radius `rho_squared`, the β
//! admissibility bound, and the `K1..K5 / M1 / alpha_k` family entering the
//! per-iteration recursion
//!
//! ```text
//! γ_{k+1} ≤ −K2 γ_k^{2/(1+ε)} + α_k γ_k + K5 β_k        (ε ∈ (0, 1])
//! γ_{k+1} ≤ −M1 γ_k²          + α_k γ_k + K5 β_k        (ε = 0)
//! ```
//!
//! All evaluators are deterministic pure functions.

use crate::geometry::SpaceGeometry;
use crate::{Error, Result};

/// Declared constants of a forward problem: the Fréchet-derivative Lipschitz
/// constant `L`, the derivative bound `L̂`, and the Hölder stability pair
/// `(C_F, ε)` in `Δ_p^{u0}(u1,u2) ≤ C_F^p ‖F(u1)−F(u2)‖^{(1+ε)p/2}`.
///
/// `L = 0` is allowed (exactly linear forward maps); the ball radius formula
/// then degenerates to `+∞` and a run must supply an explicit radius.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemConstants {
    pub lipschitz_l: f64,
    pub deriv_bound_lhat: f64,
    pub stability_cf: f64,
    pub stability_eps: f64,
}

impl ProblemConstants {
    pub fn new(
        lipschitz_l: f64,
        deriv_bound_lhat: f64,
        stability_cf: f64,
        stability_eps: f64,
    ) -> Result<Self> {
        if !lipschitz_l.is_finite() || lipschitz_l < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "lipschitz constant L must be >= 0, got {lipschitz_l}"
            )));
        }
        if !deriv_bound_lhat.is_finite() || deriv_bound_lhat <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "derivative bound must be positive, got {deriv_bound_lhat}"
            )));
        }
        if !stability_cf.is_finite() || stability_cf <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "stability constant C_F must be positive, got {stability_cf}"
            )));
        }
        if !(0.0..=1.0).contains(&stability_eps) {
            return Err(Error::InvalidParameter(format!(
                "stability exponent must lie in [0, 1], got {stability_eps}"
            )));
        }
        Ok(ProblemConstants {
            lipschitz_l,
            deriv_bound_lhat,
            stability_cf,
            stability_eps,
        })
    }
}

/// The four bracketed terms whose minimum enters [`kappa_p`].
///
/// Exposed so callers can see which branch is active at a given `p`.
pub fn kappa_p_terms(p: f64) -> Result<[f64; 4]> {
    if !p.is_finite() || p <= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "kappa_p requires p > 1, got {p}"
        )));
    }
    let q = p / (p - 1.0);
    let sqrt3 = 3f64.sqrt();
    let t1 = (0.5 * p * (p - 1.0)).min(1.0);
    let t2 = (0.5 * p).min(1.0) * (p - 1.0);
    let t3 = (p - 1.0) * (1.0 - (sqrt3 - 1.0).powf(q));
    let t4 = 1.0 - (1.0 + (2.0 - sqrt3) * p / (p - 1.0)).powf(1.0 - p);
    Ok([t1, t2, t3, t4])
}

/// The gauge constant `K_p = 4(2+√3) · min{...}` over the four terms of
/// [`kappa_p_terms`]. Tends to 0 as `p → 1⁺`.
pub fn kappa_p(p: f64) -> Result<f64> {
    let terms = kappa_p_terms(p)?;
    let min = terms.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(4.0 * (2.0 + 3f64.sqrt()) * min)
}

/// Supremum of admissible step sizes in Hölder mode:
/// `mu_max = (q / (2^q L̂^q G_q))^{1/(q-1)}`. Any `μ` strictly below it
/// makes `K1 > 0`.
pub fn mu_max(space: &SpaceGeometry, consts: &ProblemConstants) -> f64 {
    let q = space.q();
    let lhat = consts.deriv_bound_lhat;
    (q / (2f64.powf(q) * lhat.powf(q) * space.g_q())).powf(1.0 / (q - 1.0))
}

/// Supremum of admissible step sizes in the ε = 0 regime:
///
/// ```text
/// mu^{q-1} < q / (2^{q-1} G_q L̂^q) · [1 − ½ L C_F² (p/C_p)^{2/p}]
/// ```
///
/// Errors when the bracket is nonpositive (no admissible μ exists).
pub fn mu_max_eps0(space: &SpaceGeometry, consts: &ProblemConstants) -> Result<f64> {
    let p = space.p();
    let q = space.q();
    let bracket = 1.0
        - 0.5 * consts.lipschitz_l * consts.stability_cf.powi(2) * (p / space.c_p()).powf(2.0 / p);
    if bracket <= 0.0 {
        return Err(Error::Infeasible(format!(
            "no admissible step size with stability exponent 0: \
             (1/2) L C_F^2 (p/C_p)^(2/p) = {:.6} >= 1",
            1.0 - bracket
        )));
    }
    let base = q / (2f64.powf(q - 1.0) * space.g_q() * consts.deriv_bound_lhat.powf(q));
    Ok((base * bracket).powf(1.0 / (q - 1.0)))
}

/// Radius of the Bregman ball `B = {u : Δ_p^{u0}(u†, u) ≤ ρ²}`:
///
/// ```text
/// ρ² = L̂^{-p} (L C_F²)^{-p/ε} (C_p/p)^{1 + 2/ε}
/// ```
///
/// Requires `ε > 0`; with `L = 0` the value is `+∞` (the ball is
/// unconstrained and a run must pick a finite radius itself).
pub fn rho_squared(space: &SpaceGeometry, consts: &ProblemConstants) -> Result<f64> {
    let eps = consts.stability_eps;
    if eps <= 0.0 {
        return Err(Error::InvalidParameter(
            "ball radius formula is singular at stability exponent 0; supply rho_sq explicitly"
                .into(),
        ));
    }
    let p = space.p();
    if consts.lipschitz_l == 0.0 {
        return Ok(f64::INFINITY);
    }
    let value = consts.deriv_bound_lhat.powf(-p)
        * (consts.lipschitz_l * consts.stability_cf.powi(2)).powf(-p / eps)
        * (space.c_p() / p).powf(1.0 + 2.0 / eps);
    Ok(value)
}

/// Largest `β_k` keeping the descent argument monotone when `C_p > p`:
///
/// ```text
/// β ≤ ( (q / (p G_q)) · 2^{1-(p+q)} · (C_p − p) )^{1/(q-1)}
/// ```
///
/// Errors when `C_p ≤ p` (the monotonicity guarantee is unavailable; the
/// sampled ℓ^r constants here always satisfy `C_p ≤ 1 < p`, so this is the
/// expected outcome for the shipped spaces).
pub fn beta_admissible_max(space: &SpaceGeometry) -> Result<f64> {
    let p = space.p();
    let q = space.q();
    if space.c_p() <= p {
        return Err(Error::Infeasible(format!(
            "beta admissibility requires C_p > p, got C_p = {} <= p = {}",
            space.c_p(),
            p
        )));
    }
    let inner = (q / (p * space.g_q())) * 2f64.powf(1.0 - (p + q)) * (space.c_p() - p);
    Ok(inner.powf(1.0 / (q - 1.0)))
}

/// The constant family of the per-iteration recursion, evaluated once per run.
#[derive(Debug, Clone, PartialEq)]
pub struct RateConstants {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub k4: f64,
    /// `k5 = k3 + k4`.
    pub k5: f64,
    /// Quadratic decay coefficient of the ε = 0 recursion.
    pub m1: f64,
    pub mu: f64,
    pub rho_sq: f64,
    /// `t = (1 − ε)/(1 + ε)`.
    pub t: f64,
    pub eps: f64,
    p: f64,
    q: f64,
    alpha_lin: f64,
    alpha_qcoeff: f64,
}

impl RateConstants {
    /// `α_k = 1 + β_k/C_p − β_k + 2^{p+q-2} β_k^q (G_q/q)(p/C_p)`; equal to 1
    /// at `β_k = 0` and converging to 1 as `β_k → 0`.
    pub fn alpha(&self, beta_k: f64) -> f64 {
        1.0 + beta_k * self.alpha_lin + beta_k.powf(self.q) * self.alpha_qcoeff
    }

    /// Coefficient of the decay term: `K2` for ε > 0, `M1` for ε = 0.
    pub fn decay_coefficient(&self) -> f64 {
        if self.eps == 0.0 {
            self.m1
        } else {
            self.k2
        }
    }

    /// Right-hand side of the recursion bound for one step:
    /// `−K2 γ^{2/(1+ε)} + α(β) γ + K5 β` (with `M1` in place of `K2` at ε = 0).
    pub fn recursion_rhs(&self, gamma_k: f64, beta_k: f64) -> f64 {
        let exponent = 2.0 / (1.0 + self.eps);
        -self.decay_coefficient() * gamma_k.powf(exponent)
            + self.alpha(beta_k) * gamma_k
            + self.k5 * beta_k
    }
}

/// `α_k` for a given space and `β_k`, without needing the full constant
/// family: `α_k = 1 + β_k/C_p − β_k + 2^{p+q-2} β_k^q (G_q/q)(p/C_p)`.
pub fn alpha_k(space: &SpaceGeometry, beta_k: f64) -> f64 {
    let p = space.p();
    let q = space.q();
    1.0 + beta_k * (1.0 / space.c_p() - 1.0)
        + beta_k.powf(q) * 2f64.powf(p + q - 2.0) * (space.g_q() / q) * (p / space.c_p())
}

/// Evaluate the recursion constants for a run with step size `mu` and ball
/// radius `rho_sq`.
///
/// ```text
/// K1 = μ/2 − 2^{q-1} (G_q/q) μ^q L̂^q
/// K2 = K1 · C_F^{-2p/(1+ε)}
/// K3 = 2^{p+q-2} (G_q/q) (p/C_p) ρ²
/// K4 = ((p−1)/C_p) ρ²
/// K5 = K3 + K4
/// M1 = C_F^{-2p} [ μ − 2^{q-1} (G_q/q) μ^q L̂^q − (μ/2) L C_F² (p/C_p)^{2/p} ]
/// ```
///
/// Errors when the mode-appropriate decay coefficient is nonpositive, i.e.
/// `μ` is at or above the admissible supremum.
pub fn rate_constants(
    space: &SpaceGeometry,
    consts: &ProblemConstants,
    mu: f64,
    rho_sq: f64,
) -> Result<RateConstants> {
    let p = space.p();
    let q = space.q();
    let g_q = space.g_q();
    let c_p = space.c_p();
    let lhat = consts.deriv_bound_lhat;
    let cf = consts.stability_cf;
    let eps = consts.stability_eps;

    let k1 = mu / 2.0 - 2f64.powf(q - 1.0) * (g_q / q) * mu.powf(q) * lhat.powf(q);
    let k2 = k1 * cf.powf(-2.0 * p / (1.0 + eps));
    let k3 = 2f64.powf(p + q - 2.0) * (g_q / q) * (p / c_p) * rho_sq;
    let k4 = (p - 1.0) / c_p * rho_sq;
    let k5 = k3 + k4;
    let m1 = cf.powf(-2.0 * p)
        * (mu
            - 2f64.powf(q - 1.0) * (g_q / q) * mu.powf(q) * lhat.powf(q)
            - mu / 2.0 * consts.lipschitz_l * cf.powi(2) * (p / c_p).powf(2.0 / p));

    if eps > 0.0 && k1 <= 0.0 {
        return Err(Error::Infeasible(format!(
            "K1 = {k1:.6e} <= 0: step size mu = {mu} is not below the admissible \
             supremum {:.6e} from mu^(q-1) < q/(2^q Lhat^q G_q)",
            mu_max(space, consts)
        )));
    }
    if eps == 0.0 && m1 <= 0.0 {
        return Err(Error::Infeasible(format!(
            "M1 = {m1:.6e} <= 0: step size mu = {mu} is not admissible for \
             stability exponent 0"
        )));
    }

    Ok(RateConstants {
        k1,
        k2,
        k3,
        k4,
        k5,
        m1,
        mu,
        rho_sq,
        t: (1.0 - eps) / (1.0 + eps),
        eps,
        p,
        q,
        alpha_lin: 1.0 / c_p - 1.0,
        alpha_qcoeff: 2f64.powf(p + q - 2.0) * (g_q / q) * (p / c_p),
    })
}
