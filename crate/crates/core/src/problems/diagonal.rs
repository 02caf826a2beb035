//! Diagonal linear forward map: the simplest operator with exact Lipschitz
//! stability (`ε = 1`), used as the ground-truth-checkable reference problem.

use std::sync::Arc;

use crate::constants::ProblemConstants;
use crate::geometry::{DualVector, PrimalVector, SpaceGeometry};
use crate::problems::ForwardProblem;
use crate::{Error, Result};

/// `F(u)_i = s_i u_i` on a Hilbert domain (`p = r = 2`, unit weights).
///
/// The derivative is `F` itself, so the Lipschitz constant of `F'` is exactly
/// 0, the derivative bound is `max_i s_i`, and the stability constant follows
/// from `Δ₂ = ½‖u1−u2‖² ≤ ½ s_min^{-2} ‖F(u1)−F(u2)‖²`.
///
/// Because `L = 0`, the ball-radius formula degenerates to `+∞`; runs supply
/// an explicit radius instead.
#[derive(Debug)]
pub struct DiagonalLinear {
    domain: Arc<SpaceGeometry>,
    range: Arc<SpaceGeometry>,
    singular_values: Vec<f64>,
    truth: PrimalVector,
    data: PrimalVector,
    consts: ProblemConstants,
}

impl DiagonalLinear {
    /// Ground truth defaults to `0.1` in every coordinate.
    pub fn new(singular_values: Vec<f64>) -> Result<Self> {
        let truth = vec![0.1; singular_values.len()];
        Self::with_ground_truth(singular_values, truth)
    }

    pub fn with_ground_truth(singular_values: Vec<f64>, ground_truth: Vec<f64>) -> Result<Self> {
        Self::with_space_constants(singular_values, ground_truth, None)
    }

    /// Build with explicit model-space constants `(c_p, g_q)` in place of the
    /// exact Hilbert values. Conservative sampled constants (`c_p ≤ 1 ≤ g_q`)
    /// keep every inequality valid.
    pub fn with_space_constants(
        singular_values: Vec<f64>,
        ground_truth: Vec<f64>,
        space_constants: Option<(f64, f64)>,
    ) -> Result<Self> {
        if singular_values.is_empty() {
            return Err(Error::InvalidParameter(
                "need at least one singular value".into(),
            ));
        }
        if singular_values.iter().any(|s| !s.is_finite() || *s <= 0.0) {
            return Err(Error::InvalidParameter(
                "all singular values must be positive".into(),
            ));
        }
        if ground_truth.len() != singular_values.len() {
            return Err(Error::DimensionMismatch {
                expected: singular_values.len(),
                got: ground_truth.len(),
            });
        }
        let n = singular_values.len();
        let (c_p, g_q) = space_constants.unwrap_or((1.0, 1.0));
        let domain = SpaceGeometry::new(n, 2.0, 2.0, None, c_p, g_q)?;
        let range = SpaceGeometry::hilbert(n)?;
        let truth = domain.primal(ground_truth)?;
        let s_max = singular_values.iter().cloned().fold(0.0, f64::max);
        let s_min = singular_values
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        let consts = ProblemConstants::new(0.0, s_max, 0.5f64.sqrt() / s_min, 1.0)?;
        let data = range.primal(
            singular_values
                .iter()
                .zip(truth.coeffs())
                .map(|(s, u)| s * u)
                .collect(),
        )?;
        Ok(DiagonalLinear {
            domain,
            range,
            singular_values,
            truth,
            data,
            consts,
        })
    }

    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }
}

impl ForwardProblem for DiagonalLinear {
    fn name(&self) -> &str {
        "diagonal"
    }

    fn domain_space(&self) -> &Arc<SpaceGeometry> {
        &self.domain
    }

    fn range_space(&self) -> &Arc<SpaceGeometry> {
        &self.range
    }

    fn apply(&self, u: &PrimalVector) -> PrimalVector {
        let coeffs = self
            .singular_values
            .iter()
            .zip(u.coeffs())
            .map(|(s, x)| s * x)
            .collect();
        self.range
            .primal(coeffs)
            .expect("diagonal image of finite vector is finite")
    }

    fn apply_derivative(&self, _u: &PrimalVector, h: &PrimalVector) -> PrimalVector {
        self.apply(h)
    }

    fn apply_adjoint(&self, _u: &PrimalVector, w: &DualVector) -> DualVector {
        // General weighted adjoint of a diagonal map: a_j = s_j w_j * wV_j / wU_j.
        let wv = self.range.weights();
        let wu = self.domain.weights();
        let coeffs = self
            .singular_values
            .iter()
            .zip(w.coeffs())
            .zip(wv.iter().zip(wu))
            .map(|((s, x), (v, u))| s * x * v / u)
            .collect();
        self.domain
            .dual(coeffs)
            .expect("adjoint image of finite vector is finite")
    }

    fn constants(&self) -> &ProblemConstants {
        &self.consts
    }

    fn ground_truth(&self) -> Option<&PrimalVector> {
        Some(&self.truth)
    }

    fn data(&self) -> &PrimalVector {
        &self.data
    }
}
