//! Stochastic blockmodels: generators, planted-bisection spectral
//! recovery, regularized spectral clustering, and misclassification
//! measurement.

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::spectra::{eig_dense, kmeans, ClusterLabels};

/// Blockmodel: per-vertex block labels and a symmetric k x k edge
/// probability matrix.
#[derive(Debug, Clone)]
pub struct SbmModel {
    pub k: usize,
    pub z: Vec<usize>,
    pub b: Array2<f64>,
}

impl SbmModel {
    pub fn new(k: usize, z: Vec<usize>, b: Array2<f64>) -> Result<Self> {
        if b.nrows() != k || b.ncols() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                got: b.nrows(),
            });
        }
        for i in 0..k {
            for j in 0..k {
                let p = b[[i, j]];
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::InvalidParameter(format!(
                        "block probability {p} outside [0, 1]"
                    )));
                }
                if (b[[i, j]] - b[[j, i]]).abs() > 1e-12 {
                    return Err(Error::InvalidParameter(
                        "block matrix must be symmetric".into(),
                    ));
                }
            }
        }
        if z.iter().any(|&c| c >= k) {
            return Err(Error::InvalidParameter("block label out of range".into()));
        }
        Ok(SbmModel { k, z, b })
    }

    pub fn n(&self) -> usize {
        self.z.len()
    }
}

/// Degree-corrected blockmodel: blockmodel plus positive per-vertex degree
/// parameters, with every pairwise edge probability validated in [0, 1].
#[derive(Debug, Clone)]
pub struct DcSbmModel {
    pub base: SbmModel,
    pub theta: Vec<f64>,
}

impl DcSbmModel {
    pub fn new(base: SbmModel, theta: Vec<f64>) -> Result<Self> {
        if theta.len() != base.n() {
            return Err(Error::DimensionMismatch {
                expected: base.n(),
                got: theta.len(),
            });
        }
        if theta.iter().any(|&t| !(t > 0.0)) {
            return Err(Error::InvalidParameter(
                "theta parameters must be positive".into(),
            ));
        }
        // Max theta per block bounds every pairwise product.
        let mut max_theta = vec![0.0f64; base.k];
        for (i, &t) in theta.iter().enumerate() {
            max_theta[base.z[i]] = max_theta[base.z[i]].max(t);
        }
        for r in 0..base.k {
            for s in 0..base.k {
                if max_theta[r] * max_theta[s] * base.b[[r, s]] > 1.0 + 1e-12 {
                    return Err(Error::InvalidParameter(format!(
                        "theta_i theta_j B exceeds 1 between blocks {r} and {s}"
                    )));
                }
            }
        }
        Ok(DcSbmModel { base, theta })
    }

    /// Expected degree of vertex i under the model (excluding self-pairs).
    pub fn expected_degree(&self, i: usize) -> f64 {
        let n = self.base.n();
        (0..n)
            .filter(|&j| j != i)
            .map(|j| self.theta[i] * self.theta[j] * self.base.b[[self.base.z[i], self.base.z[j]]])
            .sum()
    }
}

/// Samples a blockmodel graph: each unordered pair gets an edge
/// independently with its block probability. Deterministic per seed.
pub fn gen_sbm(model: &SbmModel, seed: u64) -> Result<Graph> {
    let n = model.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            let p = model.b[[model.z[u], model.z[v]]];
            if rng.random_bool(p) {
                edges.push((u, v, 1.0));
            }
        }
    }
    Graph::new(n, &edges)
}

/// Samples a degree-corrected blockmodel graph with
/// `P[edge ij] = theta_i theta_j B[z_i, z_j]`.
pub fn gen_dcsbm(model: &DcSbmModel, seed: u64) -> Result<Graph> {
    let n = model.base.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            let p = model.theta[u]
                * model.theta[v]
                * model.base.b[[model.base.z[u], model.base.z[v]]];
            if rng.random_bool(p.min(1.0)) {
                edges.push((u, v, 1.0));
            }
        }
    }
    Graph::new(n, &edges)
}

/// A sampled planted bisection with its ground truth and population
/// spectral data.
#[derive(Debug, Clone)]
pub struct PlantedBisection {
    pub graph: Graph,
    pub truth: ClusterLabels,
    /// Population eigenvalues n(p+q)/2 and n(p-q)/2.
    pub mu1: f64,
    pub mu2: f64,
    /// Set when p <= q: the recovery theory says nothing there.
    pub theory_void: bool,
}

/// Two equal blocks, within-probability `p`, across-probability `q`.
/// `p <= q` is allowed but flagged as outside the recovery theory.
pub fn gen_planted_bisection(n: usize, p: f64, q: f64, seed: u64) -> Result<PlantedBisection> {
    if n < 2 || n % 2 != 0 {
        return Err(Error::InfeasibleParams(format!(
            "planted bisection needs even n >= 2, got {n}"
        )));
    }
    let half = n / 2;
    let z: Vec<usize> = (0..n).map(|v| usize::from(v >= half)).collect();
    let b = ndarray::array![[p, q], [q, p]];
    let model = SbmModel::new(2, z.clone(), b)?;
    let graph = gen_sbm(&model, seed)?;
    Ok(PlantedBisection {
        graph,
        truth: ClusterLabels { labels: z, k: 2 },
        mu1: n as f64 * (p + q) / 2.0,
        mu2: n as f64 * (p - q) / 2.0,
        theory_void: p <= q,
    })
}

/// Bisection recovery by the sign split of the eigenvector of the
/// second-largest adjacency eigenvalue, from the dense oracle.
pub fn recover_bisection_adjacency(g: &Graph) -> Result<ClusterLabels> {
    let n = g.vertex_count();
    if n < 4 {
        return Err(Error::InvalidParameter(
            "bisection recovery needs n >= 4".into(),
        ));
    }
    let a = g.adjacency_matrix();
    let eig = eig_dense(&a, 1e-8)?;
    // Ascending order: second-largest is column n-2.
    let v2 = eig.vectors.column(n - 2);
    let labels = (0..n).map(|i| usize::from(v2[i] < 0.0)).collect();
    Ok(ClusterLabels { labels, k: 2 })
}

/// Output of regularized spectral clustering.
#[derive(Debug, Clone)]
pub struct RecoveryReport {
    pub labels: ClusterLabels,
    /// Permutation-minimized disagreement with the truth, when given.
    pub misclassified_fraction: Option<f64>,
    pub tau_used: f64,
    /// Minimum expected degree of the generating model, when known.
    pub min_expected_degree: Option<f64>,
    /// Smallest nonzero eigenvector row norm before projection to the
    /// sphere; reported for observability, never used in control flow.
    pub min_leverage: Option<f64>,
    /// Vertices whose eigenvector rows were exactly zero.
    pub zero_rows: usize,
}

/// Regularized spectral clustering: top-k eigenvectors of
/// `L_tau = (D + tau I)^{-1/2} A (D + tau I)^{-1/2}`, rows projected to
/// the unit sphere, then k-means with the given seed.
///
/// `tau > 0` admits isolated vertices; `tau = 0` with an isolated vertex
/// is an error. Zero rows are left at zero for clustering and assigned by
/// nearest centroid in the unnormalized space.
pub fn rsc(
    g: &Graph,
    k: usize,
    tau: f64,
    seed: u64,
    truth: Option<&ClusterLabels>,
) -> Result<RecoveryReport> {
    if k < 2 {
        return Err(Error::InvalidParameter("rsc needs k >= 2".into()));
    }
    let n = g.vertex_count();
    if k > n {
        return Err(Error::InvalidParameter(format!(
            "k={k} exceeds vertex count {n}"
        )));
    }
    if tau < 0.0 {
        return Err(Error::InvalidParameter("tau must be nonnegative".into()));
    }
    if tau == 0.0 {
        for v in 0..n {
            if g.degree(v) <= 0.0 {
                return Err(Error::IsolatedVertex(v));
            }
        }
    }
    let mut l_tau = Array2::<f64>::zeros((n, n));
    for e in g.edges() {
        let s = e.weight / ((g.degree(e.u) + tau) * (g.degree(e.v) + tau)).sqrt();
        l_tau[[e.u, e.v]] = s;
        l_tau[[e.v, e.u]] = s;
    }
    let eig = eig_dense(&l_tau, 1e-8)?;
    // Top-k eigenvectors (largest eigenvalues of L_tau).
    let mut rows = Array2::<f64>::zeros((n, k));
    for j in 0..k {
        rows.column_mut(j).assign(&eig.vectors.column(n - 1 - j));
    }
    let mut min_leverage = f64::INFINITY;
    let mut zero_rows = 0usize;
    let mut normalized = rows.clone();
    for i in 0..n {
        let norm: f64 = (0..k).map(|j| rows[[i, j]] * rows[[i, j]]).sum::<f64>().sqrt();
        if norm <= 1e-12 {
            zero_rows += 1;
            continue;
        }
        min_leverage = min_leverage.min(norm);
        for j in 0..k {
            normalized[[i, j]] /= norm;
        }
    }
    let labels = kmeans(&normalized, k, seed);
    let misclassified_fraction = match truth {
        Some(t) => Some(misclassification_rate(&labels, t)?),
        None => None,
    };
    Ok(RecoveryReport {
        labels,
        misclassified_fraction,
        tau_used: tau,
        min_expected_degree: None,
        min_leverage: if min_leverage.is_finite() {
            Some(min_leverage)
        } else {
            None
        },
        zero_rows,
    })
}

/// Minimum disagreement fraction between two labelings over all
/// permutations of the class ids (k <= 8; the search is exhaustive).
pub fn misclassification_rate(found: &ClusterLabels, truth: &ClusterLabels) -> Result<f64> {
    if found.labels.len() != truth.labels.len() {
        return Err(Error::DimensionMismatch {
            expected: truth.labels.len(),
            got: found.labels.len(),
        });
    }
    let k = found.k.max(truth.k);
    if k > 8 {
        return Err(Error::InvalidParameter(
            "misclassification search is exhaustive; k must be <= 8".into(),
        ));
    }
    let n = found.labels.len();
    let mut perm: Vec<usize> = (0..k).collect();
    let mut best = usize::MAX;
    permute(&mut perm, 0, &mut |p| {
        let wrong = found
            .labels
            .iter()
            .zip(truth.labels.iter())
            .filter(|&(&f, &t)| p[f] != t)
            .count();
        best = best.min(wrong);
    });
    Ok(best as f64 / n as f64)
}

fn permute(items: &mut Vec<usize>, start: usize, visit: &mut impl FnMut(&[usize])) {
    if start == items.len() {
        visit(items);
        return;
    }
    for i in start..items.len() {
        items.swap(start, i);
        permute(items, start + 1, visit);
        items.swap(start, i);
    }
}

/// Two-point degree-parameter sampler for degree-corrected experiments:
/// a fraction of heavy vertices at `heavy` and the rest at `light`,
/// block-normalized so each block's thetas average to one.
pub fn two_point_theta(
    z: &[usize],
    k: usize,
    heavy: f64,
    light: f64,
    heavy_fraction: f64,
    seed: u64,
) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = z.len();
    let mut theta: Vec<f64> = (0..n)
        .map(|_| {
            if rng.random::<f64>() < heavy_fraction {
                heavy
            } else {
                light
            }
        })
        .collect();
    // Normalize within each block to mean one.
    for block in 0..k {
        let members: Vec<usize> = (0..n).filter(|&i| z[i] == block).collect();
        if members.is_empty() {
            continue;
        }
        let mean: f64 = members.iter().map(|&i| theta[i]).sum::<f64>() / members.len() as f64;
        for &i in &members {
            theta[i] /= mean;
        }
    }
    theta
}
