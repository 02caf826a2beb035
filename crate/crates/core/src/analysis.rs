//! Verification of the rate claims on recorded traces: the per-iteration
//! recursion bound, the `g_k / h_k` rate envelope, the ε = 1 product bound,
//! the ε = 0 quadratic analogs, and the `O(β_k^{q-1})` order check.
//!
//! Everything here is a pure function of an immutable trace plus the run's
//! constants; re-running is bit-identical. Numerical slack policy: recursion
//! checks use an absolute −1e−12 floor, envelope comparisons a 1e−9 relative
//! cushion (double-precision accumulation over at most 10⁴ iterations).

use std::ops::Range;

use crate::constants::RateConstants;
use crate::solver::IterationTrace;
use crate::{Error, Result};

/// Absolute slack floor for recursion checks.
pub const RECURSION_SLACK_FLOOR: f64 = -1e-12;

/// Relative cushion for envelope domination checks.
pub const ENVELOPE_RTOL: f64 = 1e-9;

/// Ordinary least squares fit `y ≈ slope·x + intercept`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope estimate (0 for exact fits).
    pub stderr: f64,
    pub residual_rms: f64,
    pub points: usize,
}

/// Plain OLS on already-transformed coordinates.
pub(crate) fn linear_fit(xs: &[f64], ys: &[f64]) -> LinearFit {
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mean_x) * (x - mean_x)).sum();
    let sxy: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (x - mean_x) * (y - mean_y))
        .sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ssr: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum();
    let dof = (xs.len().max(3) - 2) as f64;
    LinearFit {
        slope,
        intercept,
        stderr: (ssr / dof / sxx).sqrt(),
        residual_rms: (ssr / n).sqrt(),
        points: xs.len(),
    }
}

/// Log–log regression of `ys` against `xs` over an index window.
///
/// Nonpositive values inside the window are filtered out; fewer than 5
/// surviving points is an error.
pub fn convergence_slope(xs: &[f64], ys: &[f64], window: Range<usize>) -> Result<LinearFit> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            expected: xs.len(),
            got: ys.len(),
        });
    }
    let end = window.end.min(xs.len());
    let mut log_x = Vec::new();
    let mut log_y = Vec::new();
    for i in window.start..end {
        if xs[i] > 0.0 && ys[i] > 0.0 {
            log_x.push(xs[i].ln());
            log_y.push(ys[i].ln());
        }
    }
    if log_x.len() < 5 {
        return Err(Error::Precondition(format!(
            "log-log fit needs at least 5 positive points in the window, got {}",
            log_x.len()
        )));
    }
    Ok(linear_fit(&log_x, &log_y))
}

/// Per-step slack of the recursion bound.
#[derive(Debug, Clone, PartialEq)]
pub struct RecursionCheck {
    /// `slack_k = RHS_k − γ_{k+1}` for each consecutive pair of rows.
    pub slack: Vec<f64>,
    pub min_slack: f64,
}

/// Evaluate `slack_k = [−K2 γ_k^{2/(1+ε)} + α_k γ_k + K5 β_k] − γ_{k+1}`
/// along the trace (with `M1` in place of `K2` for ε = 0 constants).
///
/// Negative slack beyond [`RECURSION_SLACK_FLOOR`] on an admissible run means
/// the recursion bound failed; on deliberate hypothesis-violation runs it is
/// simply reported.
pub fn check_recursion(trace: &IterationTrace, rc: &RateConstants) -> Result<RecursionCheck> {
    let gammas = trace.gammas()?;
    let betas = trace.betas();
    let mut slack = Vec::with_capacity(gammas.len().saturating_sub(1));
    for k in 0..gammas.len().saturating_sub(1) {
        let rhs = rc.recursion_rhs(gammas[k], betas[k]);
        slack.push(rhs - gammas[k + 1]);
    }
    let min_slack = slack.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(RecursionCheck { slack, min_slack })
}

/// The constants and per-k series of the rate envelope.
#[derive(Debug, Clone, PartialEq)]
pub struct RateBoundSeries {
    /// `d_k = α_k + C·K5`.
    pub d: Vec<f64>,
    /// `e_k = K2/d_k` (or `M1/d_k` at ε = 0).
    pub e: Vec<f64>,
    /// `f_k = t · e_k · d_k^{-t}`.
    pub f: Vec<f64>,
    /// `g_k = Π_{i<k} d_i`, `g_0 = 1`.
    pub g: Vec<f64>,
    /// `h_k` per the envelope recurrence, `h_0 = 0`, `h_1 = f_0`.
    pub h: Vec<f64>,
    pub alpha: Vec<f64>,
    /// `t = (1−ε)/(1+ε)`.
    pub t: f64,
    /// `K2` (or `M1` at ε = 0).
    pub decay_coefficient: f64,
    pub k5: f64,
    pub smoothness_c: f64,
    pub rho_sq: f64,
    /// `predicted_bound[k]` dominates `γ_k` for `k ≥ 1`; index 0 holds ρ².
    pub predicted_bound: Vec<f64>,
    /// `η_k = γ_k / β_k^{q-1}`; filled by the order check, empty otherwise.
    pub eta: Vec<f64>,
    pub eta_cap: f64,
}

/// Inputs to [`rate_envelope`].
#[derive(Debug, Clone)]
pub struct EnvelopeInputs<'a> {
    /// `α_k` series, at least `k_max` entries.
    pub alpha: &'a [f64],
    /// `K2` for ε ∈ (0,1), `M1` for the ε = 0 variant.
    pub decay_coefficient: f64,
    pub k5: f64,
    /// The constant in the smoothness coupling `β_k ≤ C γ_k`.
    pub smoothness_c: f64,
    pub rho_sq: f64,
    pub eps: f64,
}

/// The rate envelope for ε ∈ (0, 1):
///
/// ```text
/// γ_k ≤ ( (g_k ρ²)^{-t} + h_k )^{-1/t},   t = (1−ε)/(1+ε),
/// h_k = Σ_{j=1}^{k-1} (d_j ⋯ d_{k-1})^{-1/t} f_{j-1} + f_{k-1},  h_1 = f_0.
/// ```
///
/// The boundary exponents ε ∈ {0, 1} are routed to
/// [`check_recursion_quadratic`] and [`lipschitz_product_bound`].
pub fn rate_envelope(inputs: &EnvelopeInputs<'_>, k_max: usize) -> Result<RateBoundSeries> {
    if inputs.eps <= 0.0 || inputs.eps >= 1.0 || inputs.eps.is_nan() {
        return Err(Error::InvalidParameter(format!(
            "rate envelope is defined for stability exponents strictly inside (0, 1), got {}; \
             use the quadratic (0) or product (1) form instead",
            inputs.eps
        )));
    }
    let t = (1.0 - inputs.eps) / (1.0 + inputs.eps);
    envelope_core(inputs, k_max, t)
}

fn envelope_core(inputs: &EnvelopeInputs<'_>, k_max: usize, t: f64) -> Result<RateBoundSeries> {
    if inputs.alpha.len() < k_max {
        return Err(Error::Precondition(format!(
            "need {k_max} alpha values, got {}",
            inputs.alpha.len()
        )));
    }
    if !inputs.rho_sq.is_finite() || inputs.rho_sq <= 0.0 {
        return Err(Error::InvalidParameter("rho_sq must be positive".into()));
    }
    let alpha = &inputs.alpha[..k_max];
    let d: Vec<f64> = alpha
        .iter()
        .map(|a| a + inputs.smoothness_c * inputs.k5)
        .collect();
    let e: Vec<f64> = d.iter().map(|dk| inputs.decay_coefficient / dk).collect();
    let f: Vec<f64> = d
        .iter()
        .zip(&e)
        .map(|(dk, ek)| t * ek * dk.powf(-t))
        .collect();

    let mut g = Vec::with_capacity(k_max + 1);
    g.push(1.0);
    for k in 0..k_max {
        let prev = g[k];
        g.push(prev * d[k]);
    }

    // h_{k+1} = d_k^{-1/t} h_k + f_k, h_1 = f_0.
    let mut h = vec![0.0; k_max + 1];
    if k_max >= 1 {
        h[1] = f[0];
        for k in 1..k_max {
            h[k + 1] = d[k].powf(-1.0 / t) * h[k] + f[k];
        }
    }

    let mut predicted = Vec::with_capacity(k_max + 1);
    predicted.push(inputs.rho_sq);
    for k in 1..=k_max {
        predicted.push(((g[k] * inputs.rho_sq).powf(-t) + h[k]).powf(-1.0 / t));
    }

    Ok(RateBoundSeries {
        d,
        e,
        f,
        g,
        h,
        alpha: alpha.to_vec(),
        t,
        decay_coefficient: inputs.decay_coefficient,
        k5: inputs.k5,
        smoothness_c: inputs.smoothness_c,
        rho_sq: inputs.rho_sq,
        predicted_bound: predicted,
        eta: Vec::new(),
        eta_cap: f64::NAN,
    })
}

/// The ε = 1 product bound `γ_k ≤ Π_{i<k} (−K2 + α_i + K5·C) ρ²`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductBound {
    /// `bound[k]`; index 0 is the empty product, ρ².
    pub bound: Vec<f64>,
    pub factors: Vec<f64>,
    /// Whether each factor lies in (0, 1); factors outside make the bound
    /// vacuous (flagged, not an error).
    pub factor_contractive: Vec<bool>,
}

pub fn lipschitz_product_bound(
    alpha: &[f64],
    k2: f64,
    k5: f64,
    smoothness_c: f64,
    rho_sq: f64,
    k_max: usize,
) -> Result<ProductBound> {
    if alpha.len() < k_max {
        return Err(Error::Precondition(format!(
            "need {k_max} alpha values, got {}",
            alpha.len()
        )));
    }
    let factors: Vec<f64> = alpha[..k_max]
        .iter()
        .map(|a| -k2 + a + k5 * smoothness_c)
        .collect();
    let factor_contractive = factors.iter().map(|f| *f > 0.0 && *f < 1.0).collect();
    let mut bound = Vec::with_capacity(k_max + 1);
    bound.push(rho_sq);
    for k in 0..k_max {
        let prev = bound[k];
        bound.push(prev * factors[k]);
    }
    Ok(ProductBound {
        bound,
        factors,
        factor_contractive,
    })
}

/// ε = 0 variant: recursion slack with exponent 2 and constant `M1`, and the
/// envelope specialized to `t = 1`, `γ_k ≤ ((g_k ρ²)^{-1} + h_k)^{-1}`.
pub fn check_recursion_quadratic(
    trace: &IterationTrace,
    rc: &RateConstants,
    smoothness_c: Option<f64>,
) -> Result<(RecursionCheck, RateBoundSeries)> {
    if rc.eps != 0.0 {
        return Err(Error::Precondition(format!(
            "quadratic recursion check applies to stability exponent 0, got {}",
            rc.eps
        )));
    }
    let recursion = check_recursion(trace, rc)?;
    let c = match smoothness_c {
        Some(c) => c,
        None => smallest_smoothness_c(trace)?.ok_or_else(|| {
            Error::Precondition("no finite smoothness constant fits this trace".into())
        })?,
    };
    let alpha = trace.alphas();
    let k_max = alpha.len().saturating_sub(1);
    let inputs = EnvelopeInputs {
        alpha: &alpha,
        decay_coefficient: rc.m1,
        k5: rc.k5,
        smoothness_c: c,
        rho_sq: rc.rho_sq,
        eps: 0.0,
    };
    let series = envelope_core(&inputs, k_max, 1.0)?;
    Ok((recursion, series))
}

/// Smallest constant `C` making `β_k ≤ C γ_k` hold at every step of the
/// trace (the last row's β never feeds a step and is excluded).
///
/// `Ok(None)` when no finite constant works (some step had `β_k > 0` with
/// `γ_k = 0`); `Ok(Some(0.0))` for zero schedules.
pub fn smallest_smoothness_c(trace: &IterationTrace) -> Result<Option<f64>> {
    let gammas = trace.gammas()?;
    let betas = trace.betas();
    let steps = gammas.len().saturating_sub(1);
    let mut c = 0.0f64;
    for k in 0..steps {
        if betas[k] == 0.0 {
            continue;
        }
        if gammas[k] <= 0.0 {
            return Ok(None);
        }
        c = c.max(betas[k] / gammas[k]);
    }
    Ok(Some(c))
}

/// Result of the `O(β_k^{q-1})` order check.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderCheck {
    /// `η_k = γ_k / β_k^{q-1}`.
    pub eta: Vec<f64>,
    /// Max of `η_k` over the burn-in-trimmed window.
    pub eta_cap: f64,
    /// Per-k truth of `K5 + η β_k^{-1} [α_k − (β_{k+1}/β_k)^{q-1}] ≤ 0`
    /// with `η = eta_cap`.
    pub condition_holds: Vec<bool>,
    /// Log–log slope of γ against β over the tail window; `q − 1` or larger
    /// when the order claim holds.
    pub fit: LinearFit,
}

/// Check the order claim `γ_k = O(β_k^{q-1})` on a trace driven by a strictly
/// positive (power or geometric) schedule.
///
/// `burn_in` is the fraction of initial iterations excluded from the cap and
/// the slope fit (transient before the asymptotic regime).
pub fn check_order(
    trace: &IterationTrace,
    q: f64,
    rc: &RateConstants,
    burn_in: f64,
) -> Result<OrderCheck> {
    let gammas = trace.gammas()?;
    let betas = trace.betas();
    if betas.iter().any(|b| *b <= 0.0) {
        return Err(Error::Precondition(
            "order check needs strictly positive beta at every iteration (zero schedules have no order)".into(),
        ));
    }
    if !(0.0..1.0).contains(&burn_in) {
        return Err(Error::InvalidParameter(format!(
            "burn-in fraction must lie in [0, 1), got {burn_in}"
        )));
    }
    let n = gammas.len();
    let eta: Vec<f64> = gammas
        .iter()
        .zip(&betas)
        .map(|(g, b)| g / b.powf(q - 1.0))
        .collect();
    let start = ((n as f64) * burn_in).ceil() as usize;
    let start = start.min(n.saturating_sub(1));
    let eta_cap = eta[start..]
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);

    let mut condition_holds = Vec::with_capacity(n.saturating_sub(1));
    for k in 0..n.saturating_sub(1) {
        let ratio_pow = (betas[k + 1] / betas[k]).powf(q - 1.0);
        let lhs = rc.k5 + eta_cap / betas[k] * (trace.rows[k].alpha - ratio_pow);
        condition_holds.push(lhs <= 0.0);
    }

    let fit = convergence_slope(&betas, &gammas, start..n)?;
    Ok(OrderCheck {
        eta,
        eta_cap,
        condition_holds,
        fit,
    })
}
