//! Symmetric eigensolvers, Fiedler vectors, sweep-cut partitioning, and
//! spectral clustering.
//!
//! [`eig_dense`] wraps the cyclic Jacobi solver and is the trusted oracle
//! for every spectral claim in the crate at desk scale (n up to ~2048).
//! [`fiedler_iterative`] is a power-iteration alternative for larger
//! problems; it is checked against the dense path, never the reverse.

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{connected_components, laplacian, partition_quality, Graph, LaplacianKind, NodeSet};
use crate::linalg;

/// Ascending eigenvalues with orthonormal eigenvectors of a symmetric
/// operator.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    /// Eigenvalues, ascending.
    pub values: Array1<f64>,
    /// Orthonormal eigenvectors as columns, sign-canonicalized so the first
    /// nonzero coordinate of each is positive.
    pub vectors: Array2<f64>,
    /// Achieved max over i of ||M v_i - lambda_i v_i||_2.
    pub residual_tol: f64,
}

/// Full dense eigendecomposition of a symmetric matrix.
///
/// `tol` bounds the residual `||M v - lambda v||`; the Jacobi iteration runs
/// until the off-diagonal mass is small enough to certify it.
pub fn eig_dense(m: &Array2<f64>, tol: f64) -> Result<EigenSystem> {
    let (values, vectors) = linalg::jacobi_eigh(m, (tol * 1e-2).min(1e-10))?;
    let n = m.nrows();
    let mut residual: f64 = 0.0;
    for j in 0..n {
        let v = vectors.column(j);
        let mv = m.dot(&v);
        let r = &mv - &(&v * values[j]);
        residual = residual.max(r.dot(&r).sqrt());
    }
    if residual > tol {
        return Err(Error::NoConvergence(0));
    }
    Ok(EigenSystem {
        values,
        vectors,
        residual_tol: residual,
    })
}

/// Second-smallest eigenpair of the chosen Laplacian.
#[derive(Debug, Clone)]
pub struct FiedlerPair {
    pub lambda2: f64,
    pub vector: Array1<f64>,
    /// False when the graph is disconnected; the vector is then a
    /// component-indicator 0-eigenvector and `lambda2` is exactly 0.
    pub connected: bool,
}

/// Fiedler value and vector.
///
/// For [`LaplacianKind::RandomWalk`] this solves the generalized problem
/// `L u = lambda D u` through the symmetric kind and the D^{-1/2}
/// transform. A disconnected graph is not an error: it reports
/// `lambda2 = 0` with a component-indicator vector and `connected: false`.
pub fn fiedler(g: &Graph, kind: LaplacianKind) -> Result<FiedlerPair> {
    let n = g.vertex_count();
    if n < 2 {
        return Err(Error::InvalidParameter("fiedler needs n >= 2".into()));
    }
    let labels = connected_components(g);
    let components = labels.iter().max().map(|&c| c + 1).unwrap_or(0);
    if components > 1 {
        let in_c0: Vec<bool> = labels.iter().map(|&c| c == 0).collect();
        let mut v = Array1::<f64>::zeros(n);
        let (wa, wb): (f64, f64) = match kind {
            LaplacianKind::Combinatorial => (
                in_c0.iter().filter(|&&b| b).count() as f64,
                in_c0.iter().filter(|&&b| !b).count() as f64,
            ),
            _ => {
                let va: f64 = (0..n).filter(|&i| in_c0[i]).map(|i| g.degree(i)).sum();
                let vb = g.volume() - va;
                (va.max(f64::MIN_POSITIVE), vb.max(f64::MIN_POSITIVE))
            }
        };
        for i in 0..n {
            v[i] = if in_c0[i] { 1.0 / wa } else { -1.0 / wb };
        }
        if kind == LaplacianKind::NormalizedSymmetric {
            for i in 0..n {
                v[i] *= g.degree(i).sqrt();
            }
        }
        let norm = v.dot(&v).sqrt();
        return Ok(FiedlerPair {
            lambda2: 0.0,
            vector: &v / norm,
            connected: false,
        });
    }

    match kind {
        LaplacianKind::Combinatorial => {
            let l = laplacian(g, LaplacianKind::Combinatorial)?;
            let eig = eig_dense(&l, 1e-8)?;
            Ok(FiedlerPair {
                lambda2: eig.values[1],
                vector: eig.vectors.column(1).to_owned(),
                connected: true,
            })
        }
        LaplacianKind::NormalizedSymmetric => {
            let l = laplacian(g, LaplacianKind::NormalizedSymmetric)?;
            let eig = eig_dense(&l, 1e-8)?;
            Ok(FiedlerPair {
                lambda2: eig.values[1],
                vector: eig.vectors.column(1).to_owned(),
                connected: true,
            })
        }
        LaplacianKind::RandomWalk => {
            let l = laplacian(g, LaplacianKind::NormalizedSymmetric)?;
            let eig = eig_dense(&l, 1e-8)?;
            let mut v = eig.vectors.column(1).to_owned();
            for i in 0..n {
                v[i] /= g.degree(i).sqrt();
            }
            // D-normalize: u^T D u = 1 for the generalized eigenvector.
            let d_norm: f64 = (0..n).map(|i| g.degree(i) * v[i] * v[i]).sum::<f64>().sqrt();
            Ok(FiedlerPair {
                lambda2: eig.values[1],
                vector: &v / d_norm,
                connected: true,
            })
        }
    }
}

/// Iterative Fiedler pair by power iteration with deflation of the trivial
/// eigenvector, for graphs too large for the dense oracle.
///
/// Iterates on a shifted operator so the target eigenvalue is extremal,
/// deflates the known 0-eigenvector each step, and stops when the Rayleigh
/// residual drops below `tol`.
pub fn fiedler_iterative(
    g: &Graph,
    kind: LaplacianKind,
    tol: f64,
    max_iter: usize,
) -> Result<FiedlerPair> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let n = g.vertex_count();
    let sym_kind = match kind {
        LaplacianKind::Combinatorial => LaplacianKind::Combinatorial,
        _ => LaplacianKind::NormalizedSymmetric,
    };
    let l = laplacian(g, sym_kind)?;
    let shift = match sym_kind {
        LaplacianKind::Combinatorial => 2.0 * g.degrees().iter().cloned().fold(0.0, f64::max),
        _ => 2.0,
    };
    let mut trivial = Array1::<f64>::zeros(n);
    for i in 0..n {
        trivial[i] = match sym_kind {
            LaplacianKind::Combinatorial => 1.0,
            _ => g.degree(i).sqrt(),
        };
    }
    let tnorm = trivial.dot(&trivial).sqrt();
    trivial /= tnorm;

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut x = Array1::<f64>::from_shape_fn(n, |_| rng.random::<f64>() - 0.5);
    x = linalg::project_out(&x, &trivial);
    let mut lambda = 0.0;
    let mut converged = false;
    for _ in 0..max_iter {
        let mut y = &x * shift - l.dot(&x);
        y = linalg::project_out(&y, &trivial);
        let norm = y.dot(&y).sqrt();
        if norm == 0.0 {
            break;
        }
        x = &y / norm;
        lambda = x.dot(&l.dot(&x));
        let resid = {
            let r = l.dot(&x) - &(&x * lambda);
            let r = linalg::project_out(&r, &trivial);
            r.dot(&r).sqrt()
        };
        if resid <= tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence(max_iter));
    }
    let mut v = x;
    if kind == LaplacianKind::RandomWalk {
        for i in 0..n {
            v[i] /= g.degree(i).sqrt();
        }
        let d_norm: f64 = (0..n).map(|i| g.degree(i) * v[i] * v[i]).sum::<f64>().sqrt();
        v /= d_norm;
    }
    linalg::canonicalize_signs_vec(&mut v);
    Ok(FiedlerPair {
        lambda2: lambda,
        vector: v,
        connected: true,
    })
}

/// Result of sweeping a per-vertex vector over all prefixes of its sorted
/// order.
#[derive(Debug, Clone)]
pub struct SweepResult {
    /// Vertices in the scanned order (ascending value, ties by id).
    pub order: Vec<usize>,
    /// Length of the best prefix (1..=n-1).
    pub best_index: usize,
    /// Best prefix, or its complement when that side has smaller volume.
    pub best_set: NodeSet,
    pub best_conductance: f64,
    /// Conductance of each scanned prefix.
    pub profile: Vec<f64>,
}

/// Scans all n-1 prefixes of the vertices sorted by `x` ascending (ties by
/// id) and returns the minimum-conductance prefix.
///
/// An exactly constant `x` makes every ordering arbitrary; that degenerate
/// case deterministically returns the length-1 prefix.
pub fn sweep_cut(g: &Graph, x: &[f64]) -> Result<SweepResult> {
    let n = g.vertex_count();
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: x.len(),
        });
    }
    if n < 2 {
        return Err(Error::InvalidParameter("sweep needs n >= 2".into()));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(a.cmp(&b)));

    let constant = x.iter().all(|&v| v == x[0]);

    let total_vol = g.volume();
    let mut in_set = vec![false; n];
    let mut vol_s = 0.0;
    let mut cut = 0.0;
    let mut profile = Vec::with_capacity(n - 1);
    let mut best_index = 1;
    let mut best_phi = f64::INFINITY;
    for (idx, &v) in order.iter().enumerate().take(n - 1) {
        in_set[v] = true;
        vol_s += g.degree(v);
        let mut to_set = 0.0;
        for &(u, w) in g.neighbors(v) {
            if in_set[u] {
                to_set += w;
            }
        }
        cut += g.degree(v) - 2.0 * to_set;
        let phi = cut / vol_s.min(total_vol - vol_s);
        profile.push(phi);
        if phi < best_phi {
            best_phi = phi;
            best_index = idx + 1;
        }
    }

    if constant {
        let first = NodeSet::new(n, [order[0]])?;
        let phi = profile[0];
        return Ok(SweepResult {
            order,
            best_index: 1,
            best_set: first,
            best_conductance: phi,
            profile: vec![phi],
        });
    }

    let prefix = NodeSet::new(n, order[..best_index].iter().copied())?;
    let prefix_vol: f64 = prefix.members().iter().map(|&v| g.degree(v)).sum();
    let best_set = if prefix_vol <= total_vol - prefix_vol {
        prefix
    } else {
        prefix.complement()
    };
    Ok(SweepResult {
        order,
        best_index,
        best_set,
        best_conductance: best_phi,
        profile,
    })
}

/// Cheeger-inequality report for a connected graph: normalized lambda_2,
/// the sweep-cut conductance of the degree-scaled Fiedler vector, and the
/// two-sided bound that sandwiches it.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CheegerReport {
    pub lambda2: f64,
    pub sweep_phi: f64,
    /// lambda_2 / 2.
    pub lower: f64,
    /// sqrt(2 lambda_2).
    pub upper: f64,
}

/// Computes the normalized Fiedler pair, sweeps D^{-1/2} v_2, and asserts
/// lambda_2/2 <= phi <= sqrt(2 lambda_2) before returning.
///
/// A violation would be a defect in this library, so it surfaces as an
/// invariant-violation error rather than a value.
pub fn cheeger_report(g: &Graph) -> Result<CheegerReport> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let pair = fiedler(g, LaplacianKind::NormalizedSymmetric)?;
    let n = g.vertex_count();
    let mut scaled = pair.vector.clone();
    for i in 0..n {
        scaled[i] /= g.degree(i).sqrt();
    }
    let sweep = sweep_cut(g, scaled.as_slice().unwrap())?;
    let report = CheegerReport {
        lambda2: pair.lambda2,
        sweep_phi: sweep.best_conductance,
        lower: pair.lambda2 / 2.0,
        upper: (2.0 * pair.lambda2).sqrt(),
    };
    let tol = 1e-9;
    if report.sweep_phi < report.lower - tol || report.sweep_phi > report.upper + tol {
        return Err(Error::InvariantViolation(format!(
            "Cheeger sandwich failed: {} <= {} <= {}",
            report.lower, report.sweep_phi, report.upper
        )));
    }
    Ok(report)
}

/// Per-vertex cluster assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterLabels {
    pub labels: Vec<usize>,
    pub k: usize,
}

/// Spectral clustering variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClusterVariant {
    /// Bottom-k eigenvectors of L = D - A.
    Unnormalized,
    /// Bottom-k generalized eigenvectors of L u = lambda D u.
    RandomWalk,
    /// Bottom-k eigenvectors of the normalized Laplacian with rows
    /// projected to the unit sphere before clustering.
    NormalizedRownorm,
}

/// k-way spectral clustering: bottom-k eigenvectors of the chosen
/// Laplacian, then k-means on the rows.
pub fn spectral_cluster(
    g: &Graph,
    k: usize,
    variant: ClusterVariant,
    seed: u64,
) -> Result<ClusterLabels> {
    let n = g.vertex_count();
    if k > n {
        return Err(Error::InvalidParameter(format!(
            "k={k} exceeds vertex count {n}"
        )));
    }
    if k <= 1 {
        return Ok(ClusterLabels {
            labels: vec![0; n],
            k: 1,
        });
    }
    if variant != ClusterVariant::Unnormalized && !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let mut rows = match variant {
        ClusterVariant::Unnormalized => {
            let l = laplacian(g, LaplacianKind::Combinatorial)?;
            let eig = eig_dense(&l, 1e-8)?;
            bottom_k(&eig.vectors, k)
        }
        ClusterVariant::RandomWalk => {
            let l = laplacian(g, LaplacianKind::NormalizedSymmetric)?;
            let eig = eig_dense(&l, 1e-8)?;
            let mut u = bottom_k(&eig.vectors, k);
            for i in 0..n {
                let scale = 1.0 / g.degree(i).sqrt();
                for j in 0..k {
                    u[[i, j]] *= scale;
                }
            }
            u
        }
        ClusterVariant::NormalizedRownorm => {
            let l = laplacian(g, LaplacianKind::NormalizedSymmetric)?;
            let eig = eig_dense(&l, 1e-8)?;
            let mut u = bottom_k(&eig.vectors, k);
            for i in 0..n {
                let norm: f64 = (0..k).map(|j| u[[i, j]] * u[[i, j]]).sum::<f64>().sqrt();
                if norm > 0.0 {
                    for j in 0..k {
                        u[[i, j]] /= norm;
                    }
                }
            }
            u
        }
    };
    // Tiny jitter-free clean-up: exact zeros stay zeros.
    rows.iter_mut().for_each(|v| {
        if v.abs() < 1e-300 {
            *v = 0.0;
        }
    });
    Ok(kmeans(&rows, k, seed))
}

fn bottom_k(vectors: &Array2<f64>, k: usize) -> Array2<f64> {
    let n = vectors.nrows();
    let mut u = Array2::<f64>::zeros((n, k));
    for j in 0..k {
        u.column_mut(j).assign(&vectors.column(j));
    }
    u
}

/// Lloyd's algorithm with k-means++ seeding, deterministic per seed.
///
/// Runs to an assignment fixpoint or 100 iterations; an emptied cluster is
/// re-seeded at the point farthest from its assigned centroid.
pub fn kmeans(points: &Array2<f64>, k: usize, seed: u64) -> ClusterLabels {
    let n = points.nrows();
    assert!(k >= 1 && k <= n, "kmeans needs 1 <= k <= n");
    let dim = points.ncols();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let dist2 = |a: usize, c: &Array1<f64>| -> f64 {
        let mut s = 0.0;
        for j in 0..dim {
            let d = points[[a, j]] - c[j];
            s += d * d;
        }
        s
    };

    // k-means++ seeding.
    let mut centroids: Vec<Array1<f64>> = Vec::with_capacity(k);
    let first = rng.random_range(0..n);
    centroids.push(points.row(first).to_owned());
    while centroids.len() < k {
        let weights: Vec<f64> = (0..n)
            .map(|i| {
                centroids
                    .iter()
                    .map(|c| dist2(i, c))
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        let total: f64 = weights.iter().sum();
        let chosen = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = n - 1;
            for (i, &w) in weights.iter().enumerate() {
                if target < w {
                    pick = i;
                    break;
                }
                target -= w;
            }
            pick
        } else {
            // All points coincide with some centroid; any choice is
            // equivalent, take the lowest id for determinism.
            (0..n)
                .find(|&i| weights[i] >= 0.0)
                .unwrap_or(0)
        };
        centroids.push(points.row(chosen).to_owned());
    }

    let mut labels = vec![0usize; n];
    for _ in 0..100 {
        let mut changed = false;
        for i in 0..n {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (c, centroid) in centroids.iter().enumerate() {
                let d = dist2(i, centroid);
                if d < best_d {
                    best_d = d;
                    best = c;
                }
            }
            if labels[i] != best {
                labels[i] = best;
                changed = true;
            }
        }

        let mut counts = vec![0usize; k];
        let mut sums = vec![Array1::<f64>::zeros(dim); k];
        for i in 0..n {
            counts[labels[i]] += 1;
            for j in 0..dim {
                sums[labels[i]][j] += points[[i, j]];
            }
        }
        for c in 0..k {
            if counts[c] == 0 {
                // Re-seed an emptied cluster at the farthest point from its
                // current centroid.
                let far = (0..n)
                    .max_by(|&a, &b| {
                        dist2(a, &centroids[labels[a]])
                            .total_cmp(&dist2(b, &centroids[labels[b]]))
                    })
                    .unwrap();
                centroids[c] = points.row(far).to_owned();
                labels[far] = c;
                changed = true;
            } else {
                centroids[c] = &sums[c] / counts[c] as f64;
            }
        }
        if !changed {
            break;
        }
    }
    ClusterLabels { labels, k }
}

/// Spectrum-derived connectivity facts.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SpectralFacts {
    /// Multiplicity of eigenvalue 0 of the normalized Laplacian; equals the
    /// number of connected components.
    pub num_zero_eigs: usize,
    /// True iff the largest normalized eigenvalue reaches 2, which happens
    /// exactly when some component with an edge is bipartite.
    pub has_bipartite_component: bool,
}

/// Counts zero eigenvalues of the normalized Laplacian (threshold 1e-8
/// relative to the largest eigenvalue) and tests for bipartite components
/// via the eigenvalue-2 criterion. Cross-checked against breadth-first
/// component counting; a disagreement is an invariant violation.
pub fn spectral_facts(g: &Graph) -> Result<SpectralFacts> {
    let n = g.vertex_count();
    // Isolated vertices get a zero row so they contribute eigenvalue 0,
    // matching their role as singleton components.
    let mut l = Array2::<f64>::zeros((n, n));
    for v in 0..n {
        if g.degree(v) > 0.0 {
            l[[v, v]] = 1.0;
        }
    }
    for e in g.edges() {
        let s = -e.weight / (g.degree(e.u) * g.degree(e.v)).sqrt();
        l[[e.u, e.v]] = s;
        l[[e.v, e.u]] = s;
    }
    let eig = eig_dense(&l, 1e-8)?;
    let lam_max = eig.values[n - 1].max(0.0);
    let zero_tol = 1e-8 * lam_max.max(1.0);
    let num_zero = eig.values.iter().filter(|&&v| v.abs() <= zero_tol).count();

    let labels = connected_components(g);
    let components = labels.iter().max().map(|&c| c + 1).unwrap_or(0);
    if num_zero != components {
        return Err(Error::InvariantViolation(format!(
            "zero-eigenvalue count {num_zero} disagrees with component count {components}"
        )));
    }
    Ok(SpectralFacts {
        num_zero_eigs: num_zero,
        has_bipartite_component: lam_max >= 2.0 - 1e-8,
    })
}
