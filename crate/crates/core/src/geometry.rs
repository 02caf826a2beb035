//! Weighted finite-dimensional ℓ^r spaces: norms, duality mappings, their
//! inverses, Bregman distances, and sampling-based estimation of the
//! convexity/smoothness constants `C_p` and `G_q`.
//!
//! A [`SpaceGeometry`] fixes a dimension `n`, a norm exponent `r > 1`, a gauge
//! exponent `p > 1` (with conjugate `q = p/(p-1)`), strictly positive
//! quadrature weights `w_i`, and the two constants `c_p`, `g_q` entering the
//! Bregman–norm inequalities
//!
//! ```text
//! Δ_p(u1, u2) ≥ (c_p / p) ‖u1 - u2‖^p            (primal, p-convexity)
//! Δ_q(w1, w2) ≤ (g_q / q) ‖w1 - w2‖_*^q          (dual, q-smoothness)
//! ```
//!
//! The norm is `‖u‖ = (Σ_i w_i |u_i|^r)^{1/r}`, the duality pairing is the
//! weighted form `⟨u, g⟩ = Σ_i w_i u_i g_i`, and the dual norm is the weighted
//! ℓ^s norm with `s = r/(r-1)`. With that pairing the duality map with gauge
//! `t ↦ t^{p-1}` has the closed form
//!
//! ```text
//! J_p(u)_i = ‖u‖^{p-r} |u_i|^{r-2} u_i
//! ```
//!
//! and satisfies `⟨u, J_p(u)⟩ = ‖u‖ ‖J_p(u)‖_*` and `‖J_p(u)‖_* = ‖u‖^{p-1}`.
//! Its inverse is the dual-space duality map with gauge `t ↦ t^{q-1}`,
//! `J_q*(g)_i = ‖g‖_*^{q-s} |g_i|^{s-2} g_i`, so the round trip
//! `J_q*(J_p(u)) = u` is an algebraic identity (and a test oracle here).
//!
//! In the Hilbert configuration `p = r = 2` both maps are the identity,
//! `Δ_2(u1, u2) = ½‖u1 - u2‖²`, and `c_p = g_q = 1` exactly.

use std::sync::Arc;

use crate::sampling;
use crate::{Error, Result};

/// Negative Bregman values within this absolute tolerance are clamped to 0;
/// anything more negative is left visible (it would indicate a real defect).
pub const BREGMAN_CLAMP: f64 = 1e-12;

/// Relative tolerance for the algebraic duality-map identities.
pub const IDENTITY_RTOL: f64 = 1e-10;

/// Geometry of a weighted finite-dimensional ℓ^r space with gauge exponent p.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceGeometry {
    dimension: usize,
    r: f64,
    p: f64,
    q: f64,
    weights: Vec<f64>,
    c_p: f64,
    g_q: f64,
}

impl SpaceGeometry {
    /// Build a space with explicit convexity/smoothness constants.
    ///
    /// `q` is always derived as `p/(p-1)`, never stored independently.
    /// `weights = None` means all weights equal to 1.
    pub fn new(
        dimension: usize,
        p: f64,
        r: f64,
        weights: Option<Vec<f64>>,
        c_p: f64,
        g_q: f64,
    ) -> Result<Arc<Self>> {
        if dimension == 0 {
            return Err(Error::InvalidParameter("dimension must be >= 1".into()));
        }
        if !p.is_finite() || p <= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "gauge exponent p must be > 1, got {p}"
            )));
        }
        if !r.is_finite() || r <= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "norm exponent r must be > 1, got {r}"
            )));
        }
        if !c_p.is_finite() || !g_q.is_finite() || c_p <= 0.0 || g_q <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "convexity/smoothness constants must be positive, got c_p={c_p}, g_q={g_q}"
            )));
        }
        let weights = match weights {
            Some(w) => {
                if w.len() != dimension {
                    return Err(Error::DimensionMismatch {
                        expected: dimension,
                        got: w.len(),
                    });
                }
                if w.iter().any(|x| !x.is_finite() || *x <= 0.0) {
                    return Err(Error::InvalidParameter(
                        "all weights must be strictly positive".into(),
                    ));
                }
                w
            }
            None => vec![1.0; dimension],
        };
        let q = p / (p - 1.0);
        Ok(Arc::new(SpaceGeometry {
            dimension,
            r,
            p,
            q,
            weights,
            c_p,
            g_q,
        }))
    }

    /// The Hilbert configuration `p = r = 2`, unit weights, `c_p = g_q = 1`.
    pub fn hilbert(dimension: usize) -> Result<Arc<Self>> {
        Self::new(dimension, 2.0, 2.0, None, 1.0, 1.0)
    }

    /// Build a space whose `c_p`/`g_q` are estimated by sampling.
    ///
    /// The estimation only uses norms and duality maps, which do not depend
    /// on the constants, so the two-phase construction is consistent.
    pub fn with_estimated_constants(
        dimension: usize,
        p: f64,
        r: f64,
        weights: Option<Vec<f64>>,
        sample_count: usize,
        seed: u64,
    ) -> Result<Arc<Self>> {
        let provisional = Self::new(dimension, p, r, weights.clone(), 1.0, 1.0)?;
        let (c_p, g_q) = estimate_convexity_constants(&provisional, sample_count, seed)?;
        Self::new(dimension, p, r, weights, c_p, g_q)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Norm exponent r.
    pub fn r(&self) -> f64 {
        self.r
    }

    /// Gauge exponent p.
    pub fn p(&self) -> f64 {
        self.p
    }

    /// Conjugate gauge exponent, `q = p/(p-1)`.
    pub fn q(&self) -> f64 {
        self.q
    }

    /// Conjugate of the norm exponent, `s = r/(r-1)`: the dual-space norm exponent.
    pub fn s(&self) -> f64 {
        self.r / (self.r - 1.0)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Convexity constant in `Δ_p ≥ (c_p/p)‖·‖^p`.
    pub fn c_p(&self) -> f64 {
        self.c_p
    }

    /// Dual smoothness constant in `Δ_q ≤ (g_q/q)‖·‖_*^q`.
    pub fn g_q(&self) -> f64 {
        self.g_q
    }

    /// Wrap coefficients as a primal vector of this space.
    pub fn primal(self: &Arc<Self>, coeffs: Vec<f64>) -> Result<PrimalVector> {
        check_coeffs(self, &coeffs)?;
        Ok(PrimalVector {
            space: self.clone(),
            coeffs,
        })
    }

    /// Wrap coefficients as a dual vector (an element of U*).
    pub fn dual(self: &Arc<Self>, coeffs: Vec<f64>) -> Result<DualVector> {
        check_coeffs(self, &coeffs)?;
        Ok(DualVector {
            space: self.clone(),
            coeffs,
        })
    }

    pub fn zero_primal(self: &Arc<Self>) -> PrimalVector {
        PrimalVector {
            space: self.clone(),
            coeffs: vec![0.0; self.dimension],
        }
    }

    pub fn zero_dual(self: &Arc<Self>) -> DualVector {
        DualVector {
            space: self.clone(),
            coeffs: vec![0.0; self.dimension],
        }
    }
}

fn check_coeffs(space: &SpaceGeometry, coeffs: &[f64]) -> Result<()> {
    if coeffs.len() != space.dimension {
        return Err(Error::DimensionMismatch {
            expected: space.dimension,
            got: coeffs.len(),
        });
    }
    if coeffs.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter(
            "vector entries must be finite".into(),
        ));
    }
    Ok(())
}

/// `|x|^e * sign(x)`, with the 0 ↦ 0 convention for every exponent.
#[inline]
fn signed_pow(x: f64, e: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.abs().powf(e) * x.signum()
    }
}

fn weighted_r_norm(weights: &[f64], coeffs: &[f64], r: f64) -> f64 {
    let sum: f64 = weights
        .iter()
        .zip(coeffs)
        .map(|(w, x)| w * x.abs().powf(r))
        .sum();
    sum.powf(1.0 / r)
}

/// An element of the primal space U, tagged with its geometry.
#[derive(Debug, Clone)]
pub struct PrimalVector {
    space: Arc<SpaceGeometry>,
    coeffs: Vec<f64>,
}

/// An element of the dual space U*, tagged with the *predual* geometry.
///
/// Its norm is the weighted ℓ^s norm with `s = r/(r-1)` and the same weights.
#[derive(Debug, Clone)]
pub struct DualVector {
    space: Arc<SpaceGeometry>,
    coeffs: Vec<f64>,
}

impl PrimalVector {
    /// Unchecked constructor for internal paths that deliberately propagate
    /// non-finite values (e.g. a singular linear solve) instead of erroring.
    pub(crate) fn raw(space: Arc<SpaceGeometry>, coeffs: Vec<f64>) -> Self {
        debug_assert_eq!(space.dimension, coeffs.len());
        PrimalVector { space, coeffs }
    }

    pub fn space(&self) -> &Arc<SpaceGeometry> {
        &self.space
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// The weighted ℓ^r norm `(Σ_i w_i |u_i|^r)^{1/r}`.
    pub fn norm(&self) -> f64 {
        weighted_r_norm(&self.space.weights, &self.coeffs, self.space.r)
    }

    /// The duality map `J_p(u)_i = ‖u‖^{p-r} |u_i|^{r-2} u_i`.
    ///
    /// `J_p(0) = 0` in every exponent regime; for `p < r` this bypasses the
    /// `0^{p-r}` singularity of the formula and is the unique element
    /// satisfying the defining properties of the map.
    pub fn duality_map(&self) -> DualVector {
        let norm = self.norm();
        if norm == 0.0 {
            return DualVector {
                space: self.space.clone(),
                coeffs: vec![0.0; self.coeffs.len()],
            };
        }
        let prefactor = norm.powf(self.space.p - self.space.r);
        let coeffs = self
            .coeffs
            .iter()
            .map(|&x| prefactor * signed_pow(x, self.space.r - 1.0))
            .collect();
        DualVector {
            space: self.space.clone(),
            coeffs,
        }
    }

    pub fn add(&self, rhs: &PrimalVector) -> PrimalVector {
        assert_eq!(
            self.coeffs.len(),
            rhs.coeffs.len(),
            "primal vector dimensions differ"
        );
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        PrimalVector {
            space: self.space.clone(),
            coeffs,
        }
    }

    pub fn sub(&self, rhs: &PrimalVector) -> PrimalVector {
        assert_eq!(
            self.coeffs.len(),
            rhs.coeffs.len(),
            "primal vector dimensions differ"
        );
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        PrimalVector {
            space: self.space.clone(),
            coeffs,
        }
    }

    pub fn scale(&self, factor: f64) -> PrimalVector {
        let coeffs = self.coeffs.iter().map(|a| a * factor).collect();
        PrimalVector {
            space: self.space.clone(),
            coeffs,
        }
    }
}

impl DualVector {
    pub(crate) fn raw(space: Arc<SpaceGeometry>, coeffs: Vec<f64>) -> Self {
        debug_assert_eq!(space.dimension, coeffs.len());
        DualVector { space, coeffs }
    }

    pub fn space(&self) -> &Arc<SpaceGeometry> {
        &self.space
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// The dual norm: weighted ℓ^s with `s = r/(r-1)`.
    pub fn norm(&self) -> f64 {
        weighted_r_norm(&self.space.weights, &self.coeffs, self.space.s())
    }

    /// The inverse duality map `J_q*` with gauge `t ↦ t^{q-1}`:
    /// `J_q*(g)_i = ‖g‖_*^{q-s} |g_i|^{s-2} g_i`, mapping U* back onto U.
    pub fn inverse_duality_map(&self) -> PrimalVector {
        let norm = self.norm();
        if norm == 0.0 {
            return PrimalVector {
                space: self.space.clone(),
                coeffs: vec![0.0; self.coeffs.len()],
            };
        }
        let s = self.space.s();
        let prefactor = norm.powf(self.space.q - s);
        let coeffs = self
            .coeffs
            .iter()
            .map(|&x| prefactor * signed_pow(x, s - 1.0))
            .collect();
        PrimalVector {
            space: self.space.clone(),
            coeffs,
        }
    }

    pub fn add(&self, rhs: &DualVector) -> DualVector {
        assert_eq!(
            self.coeffs.len(),
            rhs.coeffs.len(),
            "dual vector dimensions differ"
        );
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        DualVector {
            space: self.space.clone(),
            coeffs,
        }
    }

    pub fn sub(&self, rhs: &DualVector) -> DualVector {
        assert_eq!(
            self.coeffs.len(),
            rhs.coeffs.len(),
            "dual vector dimensions differ"
        );
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        DualVector {
            space: self.space.clone(),
            coeffs,
        }
    }

    pub fn scale(&self, factor: f64) -> DualVector {
        let coeffs = self.coeffs.iter().map(|a| a * factor).collect();
        DualVector {
            space: self.space.clone(),
            coeffs,
        }
    }
}

fn same_space(a: &SpaceGeometry, b: &SpaceGeometry) -> Result<()> {
    if a.dimension != b.dimension {
        return Err(Error::DimensionMismatch {
            expected: a.dimension,
            got: b.dimension,
        });
    }
    if a != b {
        return Err(Error::InvalidParameter(
            "vectors live in different space geometries".into(),
        ));
    }
    Ok(())
}

/// The weighted duality pairing `⟨u, g⟩ = Σ_i w_i u_i g_i`.
pub fn pairing(u: &PrimalVector, g: &DualVector) -> f64 {
    debug_assert_eq!(u.coeffs.len(), g.coeffs.len());
    u.space
        .weights
        .iter()
        .zip(u.coeffs.iter().zip(&g.coeffs))
        .map(|(w, (a, b))| w * a * b)
        .sum()
}

/// Bregman distance of the convex functional `u ↦ (1/p)‖u‖^p`:
///
/// ```text
/// Δ_p(u1, u2) = (1/p)‖u1‖^p − (1/p)‖u2‖^p − ⟨J_p(u2), u1 − u2⟩
/// ```
///
/// Nonnegative, zero iff `u1 = u2`. Small negative round-off (within
/// [`BREGMAN_CLAMP`]) is clamped to 0.
pub fn bregman(u1: &PrimalVector, u2: &PrimalVector) -> Result<f64> {
    same_space(&u1.space, &u2.space)?;
    let p = u1.space.p;
    let value =
        u1.norm().powf(p) / p - u2.norm().powf(p) / p - pairing(&u1.sub(u2), &u2.duality_map());
    Ok(clamp_bregman(value))
}

/// The `u0`-shifted Bregman distance `Δ_p^{u0}(u†, u) = Δ_p(u† − u0, u − u0)`.
pub fn shifted_bregman(u_dag: &PrimalVector, u: &PrimalVector, u0: &PrimalVector) -> Result<f64> {
    same_space(&u_dag.space, &u.space)?;
    same_space(&u_dag.space, &u0.space)?;
    bregman(&u_dag.sub(u0), &u.sub(u0))
}

/// Bregman distance on the dual space with gauge `q`,
/// `Δ_q(w1, w2) = (1/q)‖w1‖_*^q − (1/q)‖w2‖_*^q − ⟨J_q*(w2), w1 − w2⟩`.
///
/// This is the quantity bounded above by `(g_q/q)‖w1 − w2‖_*^q` when the dual
/// space is q-smooth.
pub fn dual_bregman(w1: &DualVector, w2: &DualVector) -> Result<f64> {
    same_space(&w1.space, &w2.space)?;
    let q = w1.space.q;
    let value = w1.norm().powf(q) / q
        - w2.norm().powf(q) / q
        - pairing(&w2.inverse_duality_map(), &w1.sub(w2));
    Ok(clamp_bregman(value))
}

fn clamp_bregman(value: f64) -> f64 {
    if value < 0.0 && value > -BREGMAN_CLAMP {
        0.0
    } else {
        value
    }
}

/// Sampled estimates of the convexity constant `c_p` (infimum of
/// `p·Δ_p(u1,u2)/‖u1−u2‖^p` over primal pairs) and of the dual smoothness
/// constant `g_q` (supremum of `q·Δ_q(w1,w2)/‖w1−w2‖_*^q` over dual pairs).
///
/// Deterministic for a fixed seed. The returned pair makes the two
/// inequalities hold on every drawn sample by construction; on a fresh sample
/// a small violation rate is expected since these are empirical, not proven,
/// constants. In the Hilbert configuration both ratios are identically 1.
pub fn estimate_convexity_constants(
    space: &Arc<SpaceGeometry>,
    sample_count: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if sample_count == 0 {
        return Err(Error::InvalidParameter("sample_count must be >= 1".into()));
    }
    let mut rng = sampling::rng_from_seed(seed);
    let n = space.dimension();
    let p = space.p();
    let q = space.q();

    let mut c_p_est = f64::INFINITY;
    let mut g_q_est = 0.0f64;
    for _ in 0..sample_count {
        // Primal pair for the convexity ratio.
        let (a, b) = distinct_pair(&mut rng, n);
        let u1 = space.primal(a).expect("sampled coefficients are finite");
        let u2 = space.primal(b).expect("sampled coefficients are finite");
        let sep = u1.sub(&u2).norm();
        let ratio = p * bregman(&u1, &u2)? / sep.powf(p);
        if ratio.is_finite() {
            c_p_est = c_p_est.min(ratio);
        }

        // Dual pair for the smoothness ratio.
        let (a, b) = distinct_pair(&mut rng, n);
        let w1 = space.dual(a).expect("sampled coefficients are finite");
        let w2 = space.dual(b).expect("sampled coefficients are finite");
        let sep = w1.sub(&w2).norm();
        let ratio = q * dual_bregman(&w1, &w2)? / sep.powf(q);
        if ratio.is_finite() {
            g_q_est = g_q_est.max(ratio);
        }
    }
    if !c_p_est.is_finite() || c_p_est <= 0.0 || g_q_est <= 0.0 {
        return Err(Error::Sampling(
            "degenerate convexity/smoothness sample".into(),
        ));
    }
    Ok((c_p_est, g_q_est))
}

/// Draw a pair of normal vectors separated by at least 1e-6 in ℓ².
fn distinct_pair(rng: &mut rand_chacha::ChaCha8Rng, n: usize) -> (Vec<f64>, Vec<f64>) {
    loop {
        let a = sampling::standard_normal_vec(rng, n);
        let b = sampling::standard_normal_vec(rng, n);
        let sep: f64 = a
            .iter()
            .zip(&b)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt();
        if sep > 1e-6 {
            return (a, b);
        }
    }
}
