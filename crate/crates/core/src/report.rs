//! CSV and summary serialization for traces and analysis results.
//!
//! Floating-point fields are written with 17 significant digits so a reload
//! reproduces the exact bits; absent optional fields are written as empty
//! cells. All writers are deterministic: same inputs, same bytes.

use std::fmt::Write as _;

use crate::analysis::{OrderCheck, RateBoundSeries, RecursionCheck};
use crate::solver::IterationTrace;

/// 17-significant-digit rendering (bit-faithful for f64).
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        }
    } else {
        format!("{x:.16e}")
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

/// Render a trace as CSV with the fixed header
/// `k,beta,gamma,residual,err_norm,in_ball,alpha,bound_rhs,status`.
/// Only the final row carries the terminal status.
pub fn trace_csv(trace: &IterationTrace) -> String {
    let mut out = String::from("k,beta,gamma,residual,err_norm,in_ball,alpha,bound_rhs,status\n");
    let last = trace.rows.len().saturating_sub(1);
    for (i, row) in trace.rows.iter().enumerate() {
        let status = if i == last { trace.status.as_str() } else { "" };
        let in_ball = match row.in_ball {
            Some(true) => "true",
            Some(false) => "false",
            None => "",
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            row.k,
            fmt_float(row.beta),
            fmt_opt(row.gamma),
            fmt_float(row.residual),
            fmt_opt(row.err_norm),
            in_ball,
            fmt_float(row.alpha),
            fmt_opt(row.bound_rhs),
            status
        );
    }
    out
}

/// Per-iteration analysis table: gamma against the predicted bound, recursion
/// slack, eta, and the order-condition flag, with empty cells where a check
/// did not run or does not extend to that k.
pub fn analysis_csv(
    gammas: &[f64],
    bound: Option<&RateBoundSeries>,
    product_bound: Option<&[f64]>,
    recursion: Option<&RecursionCheck>,
    order: Option<&OrderCheck>,
) -> String {
    let mut out = String::from("k,gamma,bound,product_bound,slack,eta,order_cond\n");
    for (k, gamma) in gammas.iter().enumerate() {
        let bound_k = bound.and_then(|b| b.predicted_bound.get(k).copied());
        let product_k = product_bound.and_then(|b| b.get(k).copied());
        let slack_k = recursion.and_then(|r| r.slack.get(k).copied());
        let eta_k = order.and_then(|o| o.eta.get(k).copied());
        let cond_k = order
            .and_then(|o| o.condition_holds.get(k).copied())
            .map(|c| if c { "true" } else { "false" })
            .unwrap_or("");
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            k,
            fmt_float(*gamma),
            fmt_opt(bound_k),
            fmt_opt(product_k),
            fmt_opt(slack_k),
            fmt_opt(eta_k),
            cond_k
        );
    }
    out
}

/// Flat `key=value` summary block, one entry per line, insertion order.
pub fn summary_text(entries: &[(String, String)]) -> String {
    let mut out = String::new();
    for (k, v) in entries {
        let _ = writeln!(out, "{k}={v}");
    }
    out
}

/// Stability-fit sample table used by the `estimate` subcommand.
pub fn stability_csv(samples: &[(f64, f64)]) -> String {
    let mut out = String::from("i,image_gap,bregman\n");
    for (i, (df, delta)) in samples.iter().enumerate() {
        let _ = writeln!(out, "{},{},{}", i, fmt_float(*df), fmt_float(*delta));
    }
    out
}
