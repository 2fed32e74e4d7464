//! Random-walk operators, stationary distributions, mixing bounds, heat
//! kernels, dense personalized PageRank, and the regularized-SDP
//! characterization of diffusion kernels.
//!
//! Convention, fixed once for the whole crate: distributions are column
//! vectors acted on from the left, the walk matrix W = A D^{-1} is
//! column-stochastic, and the teleport parameter `alpha` means
//! `pi = alpha * s + (1 - alpha) * W pi`. The lazy walk (I + W)/2 is the
//! default for PageRank. To convert results quoted for the damping
//! convention, substitute alpha -> 1 - alpha.

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{laplacian, Graph, LaplacianKind, NodeSet};
use crate::linalg;
use crate::par::run_trials;
use crate::spectra::eig_dense;

/// Column-stochastic random-walk operator on a graph.
#[derive(Debug, Clone)]
pub struct WalkOperator {
    pub matrix: Array2<f64>,
    pub lazy: bool,
}

/// W = A D^{-1}, or (I + W)/2 when `lazy`. Columns sum to one.
pub fn walk_matrix(g: &Graph, lazy: bool) -> Result<WalkOperator> {
    let n = g.vertex_count();
    for v in 0..n {
        if g.degree(v) <= 0.0 {
            return Err(Error::IsolatedVertex(v));
        }
    }
    let mut w = Array2::<f64>::zeros((n, n));
    for e in g.edges() {
        w[[e.u, e.v]] = e.weight / g.degree(e.v);
        w[[e.v, e.u]] = e.weight / g.degree(e.u);
    }
    if lazy {
        w *= 0.5;
        for i in 0..n {
            w[[i, i]] += 0.5;
        }
    }
    Ok(WalkOperator { matrix: w, lazy })
}

/// Stationary distribution pi_i = d_i / Vol(G) of a connected graph.
pub fn stationary(g: &Graph) -> Result<Array1<f64>> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let vol = g.volume();
    Ok(Array1::from_iter(g.degrees().iter().map(|&d| d / vol)))
}

/// Applies the walk `t` times to a distribution. Entries a hair below zero
/// from roundoff are clamped to zero.
pub fn evolve(w: &WalkOperator, p0: &Array1<f64>, t: usize) -> Array1<f64> {
    let mut p = p0.clone();
    for _ in 0..t {
        p = w.matrix.dot(&p);
        p.mapv_inplace(|x| if x < 0.0 && x > -1e-14 { 0.0 } else { x });
    }
    p
}

/// One row of a mixing-bound profile.
#[derive(Debug, Clone, serde::Serialize)]
pub struct MixingRecord {
    pub t: usize,
    pub l1_dist: f64,
    pub bound: f64,
}

/// Checks the regular-graph mixing bound
/// `||(A/d)^t p - u||_1 <= sqrt(n) * alpha^t` for every `t <= t_max`,
/// with `alpha = max(|mu_2|, |mu_n|)/d` taken from the dense adjacency
/// spectrum. Errors unless the graph is unweighted, d-regular, and
/// connected; returns the per-step profile.
pub fn mixing_bound_check(g: &Graph, p0: &Array1<f64>, t_max: usize) -> Result<Vec<MixingRecord>> {
    let n = g.vertex_count();
    let d = g.degree(0);
    if g.edges().iter().any(|e| e.weight != 1.0) || g.degrees().iter().any(|&x| x != d) {
        return Err(Error::InvalidParameter(
            "mixing bound needs an unweighted d-regular graph".into(),
        ));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let a = g.adjacency_matrix();
    let eig = eig_dense(&a, 1e-8)?;
    // Eigenvalues ascending: mu_n is the first, mu_2 the second from the top.
    let alpha = (eig.values[0].abs().max(eig.values[n - 2].abs())) / d;

    let walk = walk_matrix(g, false)?;
    let uniform = Array1::from_elem(n, 1.0 / n as f64);
    let mut p = p0.clone();
    let mut profile = Vec::with_capacity(t_max + 1);
    for t in 0..=t_max {
        let l1 = (&p - &uniform).iter().map(|x| x.abs()).sum::<f64>();
        let bound = (n as f64).sqrt() * alpha.powi(t as i32);
        if l1 > bound + 1e-9 {
            return Err(Error::InvariantViolation(format!(
                "mixing bound violated at t={t}: {l1} > {bound}"
            )));
        }
        profile.push(MixingRecord { t, l1_dist: l1, bound });
        p = evolve(&walk, &p, 1);
    }
    Ok(profile)
}

/// Heat kernel H_t = exp(-t L) of the combinatorial Laplacian, via the
/// dense eigendecomposition. Symmetric, PSD, rows sum to one.
pub fn heat_kernel(g: &Graph, t: f64) -> Result<Array2<f64>> {
    if t < 0.0 {
        return Err(Error::InvalidParameter("heat kernel needs t >= 0".into()));
    }
    let l = laplacian(g, LaplacianKind::Combinatorial)?;
    let eig = eig_dense(&l, 1e-8)?;
    let n = g.vertex_count();
    let mut scaled = Array2::<f64>::zeros((n, n));
    for j in 0..n {
        let decay = (-t * eig.values[j].max(0.0)).exp();
        for i in 0..n {
            scaled[[i, j]] = eig.vectors[[i, j]] * decay;
        }
    }
    Ok(linalg::matmul(&scaled, &eig.vectors.t().to_owned()))
}

/// Dense personalized PageRank: the unique solution of
/// `pi = alpha s + (1 - alpha) W pi`, solved directly.
///
/// `lazy` selects the walk; the lazy walk is the default convention for
/// PageRank in this crate.
pub fn pagerank_dense(g: &Graph, alpha: f64, s: &Array1<f64>, lazy: bool) -> Result<Array1<f64>> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "teleport alpha must be in (0, 1], got {alpha}"
        )));
    }
    let n = g.vertex_count();
    if s.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: s.len() });
    }
    let w = walk_matrix(g, lazy)?;
    // (I - (1 - alpha) W) pi = alpha s
    let mut m = &w.matrix * -(1.0 - alpha);
    for i in 0..n {
        m[[i, i]] += 1.0;
    }
    linalg::solve_linear(&m, &(s * alpha))
}

/// Both sides of the normalized-cut identity
/// `NCUT(S) = P[leave S | in S] + P[leave S-bar | in S-bar]` for the
/// stationary-start one-step walk, asserted equal to 1e-10.
#[derive(Debug, Clone, serde::Serialize)]
pub struct NcutWalkRecord {
    pub ncut: f64,
    pub p_leave_s: f64,
    pub p_leave_sbar: f64,
}

pub fn ncut_walk_check(g: &Graph, s: &NodeSet) -> Result<NcutWalkRecord> {
    if !s.is_proper() {
        return Err(Error::EmptyOrFullSet);
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let pi = stationary(g)?;
    // One-step joint probabilities, enumerated edge by edge: the walk sits
    // at i with mass pi_i and crosses (i -> j) with probability w_ij / d_i.
    let mut cross = 0.0;
    for e in g.edges() {
        if s.contains(e.u) != s.contains(e.v) {
            cross += pi[e.u] * e.weight / g.degree(e.u) + pi[e.v] * e.weight / g.degree(e.v);
        }
    }
    let mass_s: f64 = s.members().iter().map(|&v| pi[v]).sum();
    let p_leave_s = 0.5 * cross / mass_s;
    let p_leave_sbar = 0.5 * cross / (1.0 - mass_s);

    let score = crate::graph::partition_quality(g, s)?;
    let record = NcutWalkRecord {
        ncut: score.ncut,
        p_leave_s,
        p_leave_sbar,
    };
    if (record.ncut - (p_leave_s + p_leave_sbar)).abs() > 1e-10 {
        return Err(Error::InvariantViolation(format!(
            "NCUT identity failed: {} vs {}",
            record.ncut,
            p_leave_s + p_leave_sbar
        )));
    }
    Ok(record)
}

/// Draws `trials` random disjoint vertex-set pairs (S, T) and checks the
/// quasi-randomness bound
/// `|E(S,T) - (d/n)|S||T|| <= lambda sqrt(|S||T|)` with lambda from the
/// dense adjacency spectrum. Returns the largest observed ratio of the two
/// sides. Errors on non-regular input.
pub fn expander_mixing_check(g: &Graph, trials: usize, seed: u64) -> Result<f64> {
    let n = g.vertex_count();
    let d = g.degree(0);
    if g.edges().iter().any(|e| e.weight != 1.0) || g.degrees().iter().any(|&x| x != d) {
        return Err(Error::InvalidParameter(
            "expander mixing needs an unweighted d-regular graph".into(),
        ));
    }
    let a = g.adjacency_matrix();
    let eig = eig_dense(&a, 1e-8)?;
    let lambda = eig.values[0].abs().max(eig.values[n - 2].abs());

    let ratios = run_trials(trials, |trial| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(trial as u64));
        // Random tri-partition: each vertex to S, T, or neither.
        let mut in_s = vec![false; n];
        let mut in_t = vec![false; n];
        let mut s_size = 0usize;
        let mut t_size = 0usize;
        for v in 0..n {
            match rng.random_range(0..3) {
                0 => {
                    in_s[v] = true;
                    s_size += 1;
                }
                1 => {
                    in_t[v] = true;
                    t_size += 1;
                }
                _ => {}
            }
        }
        if s_size == 0 || t_size == 0 {
            return 0.0;
        }
        let mut e_st = 0.0;
        for e in g.edges() {
            if (in_s[e.u] && in_t[e.v]) || (in_s[e.v] && in_t[e.u]) {
                e_st += e.weight;
            }
        }
        let expected = d / n as f64 * (s_size * t_size) as f64;
        let rhs = lambda * ((s_size * t_size) as f64).sqrt();
        (e_st - expected).abs() / rhs
    });
    Ok(ratios.into_iter().fold(0.0, f64::max))
}

/// Regularizers whose constrained minimizers are diffusion kernels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regularizer {
    /// von Neumann entropy: sum of p log p over the spectrum.
    Entropy,
    /// -log det, over the nontrivial subspace.
    LogDet,
    /// (1/p) ||X||_p^p with exponent `p`.
    PNorm { p: f64 },
}

/// Trace-one PSD kernel, deflated against the trivial direction of the
/// normalized Laplacian, together with the regularization weight and
/// regularizer it optimizes.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    pub x: Array2<f64>,
    /// Regularization weight eta; the objective is `L . X + (1/eta) G(X)`.
    pub eta: f64,
    pub regularizer: Regularizer,
}

/// Diffusion kernels with their matching regularizers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelKind {
    /// exp(-t L_sym), entropy-regularized; eta = t.
    Heat { t: f64 },
    /// PageRank resolvent (gamma I + (1-gamma) L_sym)^{-1}, log-det
    /// regularized; eta solves the stationarity condition for gamma.
    Pagerank { gamma: f64 },
    /// t-step lazy walk (I - (1-alpha) L_sym)^t, p-norm regularized with
    /// p = 1 + 1/t.
    LazyPower { alpha: f64, t: usize },
}

/// Builds the trace-normalized, trivial-direction-deflated diffusion kernel
/// of the requested kind.
pub fn diffusion_kernel(g: &Graph, kind: KernelKind) -> Result<DensityMatrix> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let n = g.vertex_count();
    let l = laplacian(g, LaplacianKind::NormalizedSymmetric)?;
    let eig = eig_dense(&l, 1e-8)?;

    // f(lambda_i) over the nontrivial spectrum (i >= 1; the i = 0 direction
    // is the deflated trivial one).
    let (f, eta, regularizer): (Box<dyn Fn(f64) -> f64>, f64, Regularizer) = match kind {
        KernelKind::Heat { t } => {
            if t < 0.0 {
                return Err(Error::InvalidParameter("heat kernel needs t >= 0".into()));
            }
            (Box::new(move |lam: f64| (-t * lam).exp()), t, Regularizer::Entropy)
        }
        KernelKind::Pagerank { gamma } => {
            if !(gamma > 0.0 && gamma <= 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "pagerank kernel needs gamma in (0, 1], got {gamma}"
                )));
            }
            let trace_def: f64 = eig
                .values
                .iter()
                .skip(1)
                .map(|&lam| 1.0 / (gamma + (1.0 - gamma) * lam))
                .sum();
            (
                Box::new(move |lam: f64| 1.0 / (gamma + (1.0 - gamma) * lam)),
                (1.0 - gamma) * trace_def,
                Regularizer::LogDet,
            )
        }
        KernelKind::LazyPower { alpha, t } => {
            if !(0.0..1.0).contains(&alpha) || t == 0 {
                return Err(Error::InvalidParameter(format!(
                    "lazy power kernel needs alpha in [0, 1) and t >= 1, got alpha={alpha}, t={t}"
                )));
            }
            let trace_def: f64 = eig
                .values
                .iter()
                .skip(1)
                .map(|&lam| (1.0 - (1.0 - alpha) * lam).max(0.0).powi(t as i32))
                .sum();
            let p = 1.0 + 1.0 / t as f64;
            (
                Box::new(move |lam: f64| (1.0 - (1.0 - alpha) * lam).max(0.0).powi(t as i32)),
                (1.0 - alpha) / trace_def.powf(1.0 / t as f64),
                Regularizer::PNorm { p },
            )
        }
    };

    let weights: Vec<f64> = eig.values.iter().skip(1).map(|&lam| f(lam)).collect();
    let trace: f64 = weights.iter().sum();
    if trace <= 0.0 {
        return Err(Error::InvalidParameter(
            "kernel trace vanished after deflation".into(),
        ));
    }
    let mut x = Array2::<f64>::zeros((n, n));
    for (j, &wj) in weights.iter().enumerate() {
        let col = eig.vectors.column(j + 1);
        let scale = wj / trace;
        if scale == 0.0 {
            continue;
        }
        for a in 0..n {
            for b in 0..n {
                x[[a, b]] += scale * col[a] * col[b];
            }
        }
    }
    Ok(DensityMatrix { x, eta, regularizer })
}

/// Outcome of the sampled local-optimality check.
#[derive(Debug, Clone, serde::Serialize)]
pub struct OptimalityCheck {
    pub optimal: bool,
    /// min over candidates of F(candidate) - F(kernel); nonnegative up to
    /// roundoff when the kernel is the constrained minimizer.
    pub margin: f64,
}

/// Verifies that a diffusion kernel minimizes its regularized objective
/// `F(X) = L_sym . X + (1/eta) G(X)` over the feasible set
/// {X PSD, trace X = 1, X orthogonal to the trivial direction} by comparing
/// against `trials` sampled feasible perturbations.
///
/// Candidates are rank-2 tangent moves away from the kernel, projected back
/// to the feasible set, at step sizes {1e-3, 1e-2, 1e-1}, plus the rank-one
/// second-eigenvector candidate.
pub fn verify_regularized_optimum(
    g: &Graph,
    dm: &DensityMatrix,
    kind: KernelKind,
    trials: usize,
    seed: u64,
) -> Result<OptimalityCheck> {
    match (kind, dm.regularizer) {
        (KernelKind::Heat { .. }, Regularizer::Entropy) => {}
        (KernelKind::Pagerank { .. }, Regularizer::LogDet) => {}
        (KernelKind::LazyPower { .. }, Regularizer::PNorm { .. }) => {}
        (k, r) => {
            return Err(Error::MismatchedRegularizer(format!(
                "kernel {k:?} does not pair with {r:?}"
            )))
        }
    }
    if dm.eta <= 0.0 {
        return Err(Error::InvalidParameter(
            "optimality check needs eta > 0".into(),
        ));
    }
    let n = g.vertex_count();
    let l = laplacian(g, LaplacianKind::NormalizedSymmetric)?;

    // Orthonormal basis Q of the complement of the trivial direction
    // D^{1/2} 1; everything runs in the reduced (n-1)-dim space.
    let mut trivial = Array1::<f64>::zeros(n);
    for i in 0..n {
        trivial[i] = g.degree(i).sqrt();
    }
    let q = linalg::orthonormal_complement(&trivial);
    let l_red = q.t().dot(&l).dot(&q);
    let x_red = q.t().dot(&dm.x).dot(&q);

    let eta = dm.eta;
    let regularizer = dm.regularizer;
    let objective = move |x: &Array2<f64>| -> Result<f64> {
        let fit = (&l_red * x).sum();
        let (vals, _) = linalg::jacobi_eigh(x, 1e-12)?;
        let reg = match regularizer {
            Regularizer::Entropy => vals
                .iter()
                .map(|&p| if p > 1e-300 { p * p.ln() } else { 0.0 })
                .sum::<f64>(),
            Regularizer::LogDet => {
                let mut s = 0.0;
                for &p in vals.iter() {
                    if p <= 1e-300 {
                        return Ok(f64::INFINITY);
                    }
                    s -= p.ln();
                }
                s
            }
            Regularizer::PNorm { p } => {
                vals.iter().map(|&v| v.max(0.0).powf(p)).sum::<f64>() / p
            }
        };
        Ok(fit + reg / eta)
    };

    let f_star = objective(&x_red)?;
    let m = n - 1;

    // Rank-one candidate along the second eigenvector of the graph (the
    // unregularized optimizer), expressed in the reduced basis.
    let l_red2 = q.t().dot(&l).dot(&q);
    let fiedler_candidate = {
        let (_, vecs) = linalg::jacobi_eigh(&l_red2, 1e-12)?;
        let v = vecs.column(0).to_owned();
        let mut x = Array2::<f64>::zeros((m, m));
        for a in 0..m {
            for b in 0..m {
                x[[a, b]] = v[a] * v[b];
            }
        }
        x
    };

    let steps = [1e-3, 1e-2, 1e-1];
    let margins = run_trials(trials + 1, |trial| -> Result<f64> {
        let cand = if trial == trials {
            fiedler_candidate.clone()
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(trial as u64));
            let mut za = Array1::<f64>::zeros(m);
            let mut zb = Array1::<f64>::zeros(m);
            for i in 0..m {
                za[i] = rng.random::<f64>() - 0.5;
                zb[i] = rng.random::<f64>() - 0.5;
            }
            let na = za.dot(&za).sqrt();
            let nb = zb.dot(&zb).sqrt();
            za /= na;
            zb /= nb;
            let step = steps[trial % steps.len()];
            let mut cand = x_red.clone();
            for a in 0..m {
                for b in 0..m {
                    cand[[a, b]] += step * (za[a] * za[b] - zb[a] * zb[b]);
                }
            }
            // Project back to the PSD trace-one set.
            let (vals, vecs) = linalg::jacobi_eigh(&cand, 1e-12)?;
            let clamped: Vec<f64> = vals.iter().map(|&v| v.max(0.0)).collect();
            let total: f64 = clamped.iter().sum();
            if total <= 0.0 {
                return Ok(f64::INFINITY);
            }
            let mut proj = Array2::<f64>::zeros((m, m));
            for (j, &pj) in clamped.iter().enumerate() {
                if pj == 0.0 {
                    continue;
                }
                let col = vecs.column(j);
                for a in 0..m {
                    for b in 0..m {
                        proj[[a, b]] += pj / total * col[a] * col[b];
                    }
                }
            }
            proj
        };
        Ok(objective(&cand)? - f_star)
    });

    let mut margin = f64::INFINITY;
    for r in margins {
        margin = margin.min(r?);
    }
    Ok(OptimalityCheck {
        optimal: margin >= -1e-8,
        margin,
    })
}
