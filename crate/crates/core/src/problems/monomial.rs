//! Componentwise monomial forward map with tunable Hölder stability exponent.

use std::sync::Arc;

use crate::constants::ProblemConstants;
use crate::geometry::{DualVector, PrimalVector, SpaceGeometry};
use crate::problems::ForwardProblem;
use crate::{Error, Result};

/// `F(u)_i = |u_i|^{m-1} u_i` for `m ∈ (1, 2]` on a Hilbert domain.
///
/// Around its degenerate point (the origin) the map obeys the lower bound
/// `‖u1 − u2‖ ≲ ‖F(u1) − F(u2)‖^{1/m}`, so in the `p = 2` Bregman form the
/// stability exponent is `ε = 2/m − 1`: `m = 2` lands exactly on the ε = 0
/// regime and `m → 1` recovers the Lipschitz case.
///
/// The second derivative blows up at 0 for `m < 2`, so the declared constants
/// are computed on a design ball of radius `R` around the ground truth whose
/// points keep `|u_i| ≥ 0.5`; construction rejects truth/radius combinations
/// violating that. On that ball, with `b_min/b_max` the entry bounds:
///
/// ```text
/// L̂ = m b_max^{m-1},   L = m (m−1) b_min^{m-2},
/// C_F² = ½ (2R)^{2-τ} (m b_min^{m-1})^{-τ},  τ = 2/m
/// ```
///
/// and the ball radius for runs is capped at `R²/2` so the Bregman ball stays
/// inside the design ball.
#[derive(Debug)]
pub struct Monomial {
    domain: Arc<SpaceGeometry>,
    range: Arc<SpaceGeometry>,
    m: f64,
    truth: PrimalVector,
    data: PrimalVector,
    consts: ProblemConstants,
    design_radius: f64,
}

impl Monomial {
    /// Ground truth defaults to all ones, design radius to 0.3.
    pub fn new(dimension: usize, m: f64) -> Result<Self> {
        Self::with_options(dimension, m, None, None)
    }

    pub fn with_options(
        dimension: usize,
        m: f64,
        ground_truth: Option<Vec<f64>>,
        design_radius: Option<f64>,
    ) -> Result<Self> {
        Self::with_space_constants(dimension, m, ground_truth, design_radius, None)
    }

    /// Build with explicit model-space constants `(c_p, g_q)` in place of the
    /// exact Hilbert values.
    pub fn with_space_constants(
        dimension: usize,
        m: f64,
        ground_truth: Option<Vec<f64>>,
        design_radius: Option<f64>,
        space_constants: Option<(f64, f64)>,
    ) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidParameter("dimension must be >= 1".into()));
        }
        if !m.is_finite() || m <= 1.0 || m > 2.0 {
            return Err(Error::InvalidParameter(format!(
                "monomial exponent must lie in (1, 2], got {m}"
            )));
        }
        let truth_coeffs = ground_truth.unwrap_or_else(|| vec![1.0; dimension]);
        let radius = design_radius.unwrap_or(0.3);
        if !radius.is_finite() || radius <= 0.0 {
            return Err(Error::InvalidParameter(
                "design radius must be positive".into(),
            ));
        }
        let t_min = truth_coeffs
            .iter()
            .map(|x| x.abs())
            .fold(f64::INFINITY, f64::min);
        let t_max = truth_coeffs.iter().map(|x| x.abs()).fold(0.0, f64::max);
        let b_min = t_min - radius;
        if b_min < 0.5 {
            return Err(Error::InvalidParameter(format!(
                "ball entries must stay >= 0.5 in magnitude: min |truth| − radius = {b_min}"
            )));
        }
        let b_max = t_max + radius;

        let lhat = m * b_max.powf(m - 1.0);
        let lipschitz = m * (m - 1.0) * b_min.powf(m - 2.0);
        let tau = 2.0 / m;
        let slope_min = m * b_min.powf(m - 1.0);
        let cf_sq = 0.5 * (2.0 * radius).powf(2.0 - tau) * slope_min.powf(-tau);
        let eps = 2.0 / m - 1.0;
        let consts = ProblemConstants::new(lipschitz, lhat, cf_sq.sqrt(), eps)?;

        let (c_p, g_q) = space_constants.unwrap_or((1.0, 1.0));
        let domain = SpaceGeometry::new(dimension, 2.0, 2.0, None, c_p, g_q)?;
        let range = SpaceGeometry::hilbert(dimension)?;
        let truth = domain.primal(truth_coeffs)?;
        let data = range.primal(truth.coeffs().iter().map(|&x| power_map(x, m)).collect())?;
        Ok(Monomial {
            domain,
            range,
            m,
            truth,
            data,
            consts,
            design_radius: radius,
        })
    }

    pub fn exponent(&self) -> f64 {
        self.m
    }

    pub fn design_radius(&self) -> f64 {
        self.design_radius
    }
}

#[inline]
fn power_map(x: f64, m: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.abs().powf(m - 1.0) * x
    }
}

impl ForwardProblem for Monomial {
    fn name(&self) -> &str {
        "monomial"
    }

    fn domain_space(&self) -> &Arc<SpaceGeometry> {
        &self.domain
    }

    fn range_space(&self) -> &Arc<SpaceGeometry> {
        &self.range
    }

    fn apply(&self, u: &PrimalVector) -> PrimalVector {
        let coeffs = u.coeffs().iter().map(|&x| power_map(x, self.m)).collect();
        self.range
            .primal(coeffs)
            .expect("monomial image of finite vector is finite")
    }

    fn apply_derivative(&self, u: &PrimalVector, h: &PrimalVector) -> PrimalVector {
        let coeffs = u
            .coeffs()
            .iter()
            .zip(h.coeffs())
            .map(|(&x, &d)| self.m * x.abs().powf(self.m - 1.0) * d)
            .collect();
        self.range
            .primal(coeffs)
            .expect("derivative image of finite vector is finite")
    }

    fn apply_adjoint(&self, u: &PrimalVector, w: &DualVector) -> DualVector {
        let wv = self.range.weights();
        let wu = self.domain.weights();
        let coeffs = u
            .coeffs()
            .iter()
            .zip(w.coeffs())
            .zip(wv.iter().zip(wu))
            .map(|((&x, &y), (v, uw))| self.m * x.abs().powf(self.m - 1.0) * y * v / uw)
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

    fn rho_sq_cap(&self) -> Option<f64> {
        // Bregman radius keeping the ball inside the design ball (p = 2).
        Some(self.design_radius * self.design_radius / 2.0)
    }

    /// The scaling regime of interest sits at the map's degenerate point.
    fn stability_center(&self) -> PrimalVector {
        self.domain.zero_primal()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exponent_endpoints() {
        assert_eq!(
            Monomial::new(2, 2.0).unwrap().constants().stability_eps,
            0.0
        );
        assert_relative_eq!(
            Monomial::new(2, 1.5).unwrap().constants().stability_eps,
            1.0 / 3.0,
            max_relative = 1e-15
        );
        assert!(Monomial::new(2, 1.0).is_err());
        assert!(Monomial::new(2, 2.5).is_err());
    }

    #[test]
    fn map_values() {
        let problem = Monomial::new(1, 2.0).unwrap();
        let u = problem.domain.primal(vec![-3.0]).unwrap();
        assert_eq!(problem.apply(&u).coeffs(), &[-9.0]);
        let zero = problem.domain.zero_primal();
        assert_eq!(problem.apply(&zero).coeffs(), &[0.0]);
    }

    #[test]
    fn truth_bounded_away_from_zero_enforced() {
        assert!(Monomial::with_options(2, 1.5, Some(vec![0.6, 1.0]), Some(0.3)).is_err());
        assert!(Monomial::with_options(2, 1.5, Some(vec![0.9, -1.0]), Some(0.3)).is_ok());
    }

    #[test]
    fn lipschitz_constant_at_m2() {
        // m = 2 gives L = 2 independent of the ball.
        let problem = Monomial::new(3, 2.0).unwrap();
        assert_relative_eq!(problem.constants().lipschitz_l, 2.0, max_relative = 1e-15);
    }

    #[test]
    fn declared_bounds_hold_on_design_ball_corners() {
        let problem = Monomial::new(2, 1.5).unwrap();
        let lhat = problem.constants().deriv_bound_lhat;
        // Derivative diagonal entries at the extreme ball point 1 + R.
        let b_max: f64 = 1.3;
        assert!(1.5 * b_max.powf(0.5) <= lhat * (1.0 + 1e-12));
    }
}
