//! Finite resistor-network Dirichlet-to-Neumann forward map.
//!
//! Conductances on the edges of a connected graph determine the weighted
//! graph Laplacian `L(σ)`; with nodes ordered boundary-first the DtN map is
//! the Schur complement onto the boundary block,
//!
//! ```text
//! Λ(σ) = L_BB − L_BI L_II⁻¹ L_IB,
//! ```
//!
//! the discrete boundary operator taking imposed boundary potentials to
//! boundary currents. `Λ` is symmetric with zero row sums (current
//! conservation). Writing `P` for the harmonic-extension matrix (identity on
//! boundary rows, `−L_II⁻¹ L_IB` on interior rows), the Fréchet derivative
//! has the quadratic-form representation
//!
//! ```text
//! g1ᵀ (dΛ[δσ]) g2 = Σ_e δσ_e (∇φ1)_e (∇φ2)_e,   φ = P g,
//! ```
//!
//! the discrete analog of the sesquilinear form of the continuum problem:
//! each edge contributes `δσ_e c_e c_eᵀ` with `c_e = Pᵀ(e_i − e_j)`.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::constants::ProblemConstants;
use crate::geometry::{DualVector, PrimalVector, SpaceGeometry};
use crate::problems::ForwardProblem;
use crate::sampling;
use crate::{Error, Result};

#[derive(Debug, Clone)]
struct Topology {
    boundary: usize,
    nodes: usize,
    edges: Vec<(usize, usize)>,
}

impl Topology {
    fn laplacian(&self, sigma: &[f64]) -> DMatrix<f64> {
        let mut l = DMatrix::zeros(self.nodes, self.nodes);
        for (&(i, j), &s) in self.edges.iter().zip(sigma) {
            l[(i, i)] += s;
            l[(j, j)] += s;
            l[(i, j)] -= s;
            l[(j, i)] -= s;
        }
        l
    }

    /// DtN matrix and harmonic-extension matrix `P` (nodes × boundary).
    ///
    /// A singular interior block (possible off the positive-conductance
    /// domain) yields NaN entries rather than a panic.
    fn schur(&self, sigma: &[f64]) -> (DMatrix<f64>, DMatrix<f64>) {
        let nb = self.boundary;
        let ni = self.nodes - nb;
        let l = self.laplacian(sigma);
        let l_bb = l.view((0, 0), (nb, nb)).into_owned();
        let mut p = DMatrix::zeros(self.nodes, nb);
        for a in 0..nb {
            p[(a, a)] = 1.0;
        }
        if ni == 0 {
            return (l_bb, p);
        }
        let l_bi = l.view((0, nb), (nb, ni)).into_owned();
        let l_ib = l.view((nb, 0), (ni, nb)).into_owned();
        let l_ii = l.view((nb, nb), (ni, ni)).into_owned();
        let lu = l_ii.lu();
        match lu.solve(&l_ib) {
            Some(w) => {
                let lambda = &l_bb - &l_bi * &w;
                for i in 0..ni {
                    for a in 0..nb {
                        p[(nb + i, a)] = -w[(i, a)];
                    }
                }
                (lambda, p)
            }
            None => (
                DMatrix::from_element(nb, nb, f64::NAN),
                DMatrix::from_element(self.nodes, nb, f64::NAN),
            ),
        }
    }

    /// Edge gradient of the extension columns: `c_e[a] = P[i,a] − P[j,a]`.
    fn edge_gradients(&self, p: &DMatrix<f64>) -> Vec<Vec<f64>> {
        self.edges
            .iter()
            .map(|&(i, j)| (0..self.boundary).map(|a| p[(i, a)] - p[(j, a)]).collect())
            .collect()
    }

    /// Full Jacobian of the flattened DtN map at `sigma`: one column per edge.
    fn jacobian(&self, sigma: &[f64]) -> DMatrix<f64> {
        let nb = self.boundary;
        let (_, p) = self.schur(sigma);
        let grads = self.edge_gradients(&p);
        let mut jac = DMatrix::zeros(nb * nb, self.edges.len());
        for (e, c) in grads.iter().enumerate() {
            for a in 0..nb {
                for b in 0..nb {
                    jac[(a * nb + b, e)] = c[a] * c[b];
                }
            }
        }
        jac
    }
}

/// Resistor-network DtN problem: edge conductances in `U = ℓ²(|E|)` map to
/// the row-major flattened boundary DtN matrix in `V = ℓ²(nb²)`.
///
/// Stability is declared Lipschitz (`ε = 1`); `L`, `L̂`, and `C_F` are
/// calibrated empirically at construction by seeded sampling on a ball of
/// radius `0.25 · min σ†` around the true conductances (with safety margins),
/// since the theory guarantees their existence but not values.
#[derive(Debug)]
pub struct ResistorNetwork {
    topo: Topology,
    domain: Arc<SpaceGeometry>,
    range: Arc<SpaceGeometry>,
    truth: PrimalVector,
    data: PrimalVector,
    consts: ProblemConstants,
    sample_radius: f64,
}

impl ResistorNetwork {
    pub fn new(
        boundary_nodes: usize,
        interior_nodes: usize,
        edges: Vec<(usize, usize)>,
        sigma_truth: Vec<f64>,
    ) -> Result<Self> {
        Self::with_space_constants(boundary_nodes, interior_nodes, edges, sigma_truth, None)
    }

    /// Build with explicit model-space constants `(c_p, g_q)` in place of the
    /// exact Hilbert values.
    pub fn with_space_constants(
        boundary_nodes: usize,
        interior_nodes: usize,
        edges: Vec<(usize, usize)>,
        sigma_truth: Vec<f64>,
        space_constants: Option<(f64, f64)>,
    ) -> Result<Self> {
        if boundary_nodes < 2 {
            return Err(Error::Structure("need at least two boundary nodes".into()));
        }
        let nodes = boundary_nodes + interior_nodes;
        if edges.is_empty() {
            return Err(Error::Structure("need at least one edge".into()));
        }
        if sigma_truth.len() != edges.len() {
            return Err(Error::DimensionMismatch {
                expected: edges.len(),
                got: sigma_truth.len(),
            });
        }
        for &(i, j) in &edges {
            if i >= nodes || j >= nodes {
                return Err(Error::Structure(format!(
                    "edge ({i}, {j}) references a node outside 0..{nodes}"
                )));
            }
            if i == j {
                return Err(Error::Structure(format!("self-loop at node {i}")));
            }
        }
        if sigma_truth.iter().any(|s| !s.is_finite() || *s <= 0.0) {
            return Err(Error::InvalidParameter(
                "all conductances must be positive".into(),
            ));
        }
        if !connected(nodes, &edges) {
            return Err(Error::Structure("graph is not connected".into()));
        }

        let topo = Topology {
            boundary: boundary_nodes,
            nodes,
            edges,
        };
        let (c_p, g_q) = space_constants.unwrap_or((1.0, 1.0));
        let domain = SpaceGeometry::new(topo.edges.len(), 2.0, 2.0, None, c_p, g_q)?;
        let range = SpaceGeometry::hilbert(boundary_nodes * boundary_nodes)?;
        let truth = domain.primal(sigma_truth)?;
        let (lambda, _) = topo.schur(truth.coeffs());
        let data = range.primal(flatten(&lambda))?;

        let sigma_min = truth.coeffs().iter().cloned().fold(f64::INFINITY, f64::min);
        let sample_radius = 0.25 * sigma_min;
        let consts = calibrate(&topo, truth.coeffs(), sample_radius)?;

        Ok(ResistorNetwork {
            topo,
            domain,
            range,
            truth,
            data,
            consts,
            sample_radius,
        })
    }

    /// Radius of the calibration ball the declared constants were sampled on.
    pub fn sample_radius(&self) -> f64 {
        self.sample_radius
    }

    /// The DtN matrix at `sigma`, unflattened.
    pub fn dtn_matrix(&self, sigma: &PrimalVector) -> DMatrix<f64> {
        self.topo.schur(sigma.coeffs()).0
    }
}

fn flatten(m: &DMatrix<f64>) -> Vec<f64> {
    let (nr, nc) = m.shape();
    let mut out = Vec::with_capacity(nr * nc);
    for a in 0..nr {
        for b in 0..nc {
            out.push(m[(a, b)]);
        }
    }
    out
}

fn connected(nodes: usize, edges: &[(usize, usize)]) -> bool {
    let mut parent: Vec<usize> = (0..nodes).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for &(i, j) in edges {
        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
        parent[a] = b;
    }
    let root = find(&mut parent, 0);
    (0..nodes).all(|x| find(&mut parent, x) == root)
}

/// Empirical `(L, L̂, C_F)` on the calibration ball, with safety margins so
/// fresh samples stay below the declared values.
fn calibrate(topo: &Topology, sigma_truth: &[f64], radius: f64) -> Result<ProblemConstants> {
    let mut rng = sampling::rng_from_seed(0xD7);
    let ne = topo.edges.len();
    let nb = topo.boundary;
    let samples = 160;

    let mut points: Vec<Vec<f64>> = Vec::with_capacity(samples);
    for _ in 0..samples {
        let x = sampling::uniform_in_ball(&mut rng, ne, radius);
        let sigma: Vec<f64> = sigma_truth.iter().zip(&x).map(|(s, d)| s + d).collect();
        points.push(sigma);
    }

    let jacobians: Vec<DMatrix<f64>> = points.iter().map(|s| topo.jacobian(s)).collect();
    let mut lhat = 0.0f64;
    for jac in &jacobians {
        lhat = lhat.max(jac.singular_values().max());
    }

    let mut lipschitz = 0.0f64;
    let mut cf_sq = 0.0f64;
    for pair in points.windows(2).zip(jacobians.windows(2)) {
        let ((a, b), (ja, jb)) = ((&pair.0[0], &pair.0[1]), (&pair.1[0], &pair.1[1]));
        let sep: f64 = a
            .iter()
            .zip(b)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt();
        if sep < 1e-12 {
            continue;
        }
        lipschitz = lipschitz.max((ja - jb).singular_values().max() / sep);

        let fa = topo.schur(a).0;
        let fb = topo.schur(b).0;
        let df: f64 = (0..nb * nb)
            .map(|k| {
                let d = fa[(k / nb, k % nb)] - fb[(k / nb, k % nb)];
                d * d
            })
            .sum::<f64>()
            .sqrt();
        if df > 1e-14 {
            // Hilbert Bregman distance of the pair against the image gap.
            cf_sq = cf_sq.max(0.5 * sep * sep / (df * df));
        }
    }
    if cf_sq == 0.0 {
        return Err(Error::Sampling(
            "calibration pairs were all degenerate".into(),
        ));
    }

    ProblemConstants::new(1.05 * lipschitz, 1.05 * lhat, 1.5 * cf_sq.sqrt(), 1.0)
}

impl ForwardProblem for ResistorNetwork {
    fn name(&self) -> &str {
        "resistor"
    }

    fn domain_space(&self) -> &Arc<SpaceGeometry> {
        &self.domain
    }

    fn range_space(&self) -> &Arc<SpaceGeometry> {
        &self.range
    }

    fn apply(&self, u: &PrimalVector) -> PrimalVector {
        let (lambda, _) = self.topo.schur(u.coeffs());
        let coeffs = flatten(&lambda);
        match self.range.primal(coeffs.clone()) {
            Ok(v) => v,
            // Singular interior block: surface the NaNs instead of panicking.
            Err(_) => PrimalVector::raw(self.range.clone(), coeffs),
        }
    }

    fn apply_derivative(&self, u: &PrimalVector, h: &PrimalVector) -> PrimalVector {
        let nb = self.topo.boundary;
        let (_, p) = self.topo.schur(u.coeffs());
        let grads = self.topo.edge_gradients(&p);
        let mut out = vec![0.0; nb * nb];
        for (c, &he) in grads.iter().zip(h.coeffs()) {
            for a in 0..nb {
                for b in 0..nb {
                    out[a * nb + b] += he * c[a] * c[b];
                }
            }
        }
        match self.range.primal(out.clone()) {
            Ok(v) => v,
            Err(_) => PrimalVector::raw(self.range.clone(), out),
        }
    }

    fn apply_adjoint(&self, u: &PrimalVector, w: &DualVector) -> DualVector {
        let nb = self.topo.boundary;
        let (_, p) = self.topo.schur(u.coeffs());
        let grads = self.topo.edge_gradients(&p);
        let coeffs: Vec<f64> = grads
            .iter()
            .map(|c| {
                let mut acc = 0.0;
                for a in 0..nb {
                    for b in 0..nb {
                        acc += c[a] * c[b] * w.coeffs()[a * nb + b];
                    }
                }
                acc
            })
            .collect();
        match self.domain.dual(coeffs.clone()) {
            Ok(v) => v,
            Err(_) => DualVector::raw(self.domain.clone(), coeffs),
        }
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
        Some(self.sample_radius * self.sample_radius / 2.0)
    }

    fn contains(&self, u: &PrimalVector) -> bool {
        u.coeffs().iter().all(|&s| s > 0.0)
    }

    fn default_stability_radius(&self) -> f64 {
        0.8 * self.sample_radius
    }
}
