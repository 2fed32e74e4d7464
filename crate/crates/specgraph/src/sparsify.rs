//! Leverage-score sampling sparsifiers and spectral-similarity
//! measurement.
//!
//! The sampler draws edges i.i.d. with replacement, with probability
//! proportional to leverage (weight times effective resistance), and
//! accumulates `w_e / (r p_e)` per draw. That estimator is unbiased for
//! the Laplacian quadratic form; independent-coin sparsification is a
//! different scheme and is not what is implemented here.

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{laplacian, Graph, LaplacianKind};
use crate::linalg;
use crate::resistance::leverage_scores;
use crate::spectra::eig_dense;

/// Where edge sampling probabilities come from.
#[derive(Debug, Clone)]
pub enum ProbabilitySource {
    /// Exact leverage scores from the dense pseudo-inverse.
    ExactLeverage,
    /// Caller-supplied per-edge probabilities, in the graph's canonical
    /// edge order. Checked against `beta * leverage / (n - 1)` from below.
    Supplied(Vec<f64>),
}

/// Sparsifier configuration: sample count, probability-quality factor,
/// seed, and probability source.
#[derive(Debug, Clone)]
pub struct SparsifierConfig {
    /// Number of i.i.d. edge draws.
    pub r: usize,
    /// Quality factor beta in (0, 1]: supplied probabilities must satisfy
    /// `p'_e >= beta * leverage_e / (n - 1)`.
    pub beta: f64,
    pub seed: u64,
    pub source: ProbabilitySource,
}

impl SparsifierConfig {
    pub fn exact(r: usize, seed: u64) -> Self {
        SparsifierConfig {
            r,
            beta: 1.0,
            seed,
            source: ProbabilitySource::ExactLeverage,
        }
    }
}

fn edge_probabilities(g: &Graph, cfg: &SparsifierConfig) -> Result<Vec<f64>> {
    if cfg.r == 0 {
        return Err(Error::InvalidParameter("sample count r must be >= 1".into()));
    }
    if !(cfg.beta > 0.0 && cfg.beta <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "beta must be in (0, 1], got {}",
            cfg.beta
        )));
    }
    let lev = leverage_scores(g)?;
    match &cfg.source {
        ProbabilitySource::ExactLeverage => Ok(lev.iter().map(|l| l.probability).collect()),
        ProbabilitySource::Supplied(p) => {
            if p.len() != g.edge_count() {
                return Err(Error::DimensionMismatch {
                    expected: g.edge_count(),
                    got: p.len(),
                });
            }
            let total: f64 = p.iter().sum();
            if !(total > 0.0) {
                return Err(Error::InvalidParameter(
                    "supplied probabilities must have positive mass".into(),
                ));
            }
            let n = g.vertex_count() as f64;
            let mut normalized = Vec::with_capacity(p.len());
            for (e, (&pe, l)) in p.iter().zip(lev.iter()).enumerate() {
                let pe = pe / total;
                if pe <= 0.0 {
                    let edge = g.edges()[e];
                    return Err(Error::ZeroProbabilityEdge(edge.u, edge.v));
                }
                if pe < cfg.beta * l.leverage / (n - 1.0) - 1e-12 {
                    return Err(Error::InvalidParameter(format!(
                        "probability {pe} on edge ({}, {}) undercuts beta * leverage / (n-1)",
                        l.u, l.v
                    )));
                }
                normalized.push(pe);
            }
            Ok(normalized)
        }
    }
}

/// Draws `cfg.r` edges i.i.d. with replacement and returns the reweighted
/// subgraph; a sampled edge accumulates `w_e / (r p_e)` per draw, so the
/// expected total weight equals the original total weight. The sketch can
/// be disconnected for small `r`.
pub fn sparsify(g: &Graph, cfg: &SparsifierConfig) -> Result<Graph> {
    let probs = edge_probabilities(g, cfg)?;
    let m = g.edge_count();
    // Cumulative table for categorical draws.
    let mut cdf = Vec::with_capacity(m);
    let mut acc = 0.0;
    for &p in &probs {
        acc += p;
        cdf.push(acc);
    }
    let total = acc;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut accum = vec![0.0f64; m];
    for _ in 0..cfg.r {
        let u = rng.random::<f64>() * total;
        let idx = match cdf.binary_search_by(|probe| probe.total_cmp(&u)) {
            Ok(i) => (i + 1).min(m - 1),
            Err(i) => i.min(m - 1),
        };
        accum[idx] += g.edges()[idx].weight / (cfg.r as f64 * probs[idx]);
    }
    let edges: Vec<(usize, usize, f64)> = g
        .edges()
        .iter()
        .zip(accum.iter())
        .filter(|(_, &w)| w > 0.0)
        .map(|(e, &w)| (e.u, e.v, w))
        .collect();
    Graph::new(g.vertex_count(), &edges)
}

/// Spectral closeness of two graphs on the same vertices.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SimilarityReport {
    /// Smallest sigma with `L_h / sigma <= L_g <= sigma L_h` on the
    /// nontrivial subspace; infinite when `h` cannot support `g`'s forms
    /// (e.g. a disconnected sketch of a connected graph).
    pub sigma: f64,
    /// Generalized eigenvalues of (L_g, L_h) on the nontrivial subspace.
    pub eigenvalue_ratios: Vec<f64>,
}

/// Measures sigma-spectral similarity through the generalized eigenvalues
/// of the two Laplacians restricted to the complement of the ones vector,
/// then cross-checks with quadratic-form ratios on 100 random vectors.
///
/// A disconnected `h` against a connected `g` reports `sigma = inf` rather
/// than erroring; that is the honest signal that the sketch is unusable.
pub fn spectral_similarity(g: &Graph, h: &Graph) -> Result<SimilarityReport> {
    let n = g.vertex_count();
    if h.vertex_count() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: h.vertex_count(),
        });
    }
    let lg = laplacian(g, LaplacianKind::Combinatorial)?;
    let lh = laplacian(h, LaplacianKind::Combinatorial)?;
    let ones = Array1::from_elem(n, 1.0);
    let q = linalg::orthonormal_complement(&ones);
    let ag = q.t().dot(&lg).dot(&q);
    let ah = q.t().dot(&lh).dot(&q);

    // h must be positive definite on the reduced space (i.e. connected)
    // for finite similarity.
    let eh = eig_dense(&ah, 1e-8)?;
    let scale = eh.values[n - 2].max(1.0);
    if eh.values[0] <= 1e-10 * scale {
        return Ok(SimilarityReport {
            sigma: f64::INFINITY,
            eigenvalue_ratios: Vec::new(),
        });
    }
    // B^{-1/2} A B^{-1/2} via h's eigensystem.
    let m = n - 1;
    let mut bihalf = Array2::<f64>::zeros((m, m));
    for j in 0..m {
        let s = 1.0 / eh.values[j].sqrt();
        for i in 0..m {
            bihalf[[i, j]] = eh.vectors[[i, j]] * s;
        }
    }
    let bihalf = bihalf.dot(&eh.vectors.t().to_owned());
    let c = bihalf.dot(&ag).dot(&bihalf);
    let ec = eig_dense(&c, 1e-8)?;
    let ratios: Vec<f64> = ec.values.to_vec();
    let mut sigma = 1.0f64;
    for &rho in &ratios {
        if rho <= 0.0 {
            sigma = f64::INFINITY;
        } else {
            sigma = sigma.max(rho).max(1.0 / rho);
        }
    }

    if sigma.is_finite() {
        // Quadratic-form cross-check on random nontrivial vectors.
        let mut rng = ChaCha8Rng::seed_from_u64(0xf0f0);
        for _ in 0..100 {
            let mut x = Array1::<f64>::zeros(n);
            for i in 0..n {
                x[i] = rng.random::<f64>() - 0.5;
            }
            let x = linalg::project_out(&x, &ones);
            let num = x.dot(&lg.dot(&x));
            let den = x.dot(&lh.dot(&x));
            if den <= 0.0 {
                continue;
            }
            let ratio = num / den;
            if ratio > sigma * (1.0 + 1e-8) + 1e-10
                || ratio < (1.0 / sigma) * (1.0 - 1e-8) - 1e-10
            {
                return Err(Error::InvariantViolation(format!(
                    "quadratic-form ratio {ratio} escapes [1/sigma, sigma] with sigma {sigma}"
                )));
            }
        }
    }
    Ok(SimilarityReport {
        sigma,
        eigenvalue_ratios: ratios,
    })
}

/// Measures how well a sampled sketch preserves the geometry of the
/// weighted incidence span: `|| I - (S U)^T (S U) ||_2`, where U is an
/// orthonormal basis of the span built from the dense eigensystem of the
/// Laplacian and S is the sampling operator of the draw.
pub fn embedding_check(g: &Graph, cfg: &SparsifierConfig) -> Result<f64> {
    let probs = edge_probabilities(g, cfg)?;
    let u = incidence_basis(g)?;
    let m = g.edge_count();
    let k = g.vertex_count() - 1;

    let mut cdf = Vec::with_capacity(m);
    let mut acc = 0.0;
    for &p in &probs {
        acc += p;
        cdf.push(acc);
    }
    let total = acc;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    // (SU)^T (SU) = sum over draws of u_e u_e^T / (r p_e).
    let mut gram = Array2::<f64>::zeros((k, k));
    for _ in 0..cfg.r {
        let x = rng.random::<f64>() * total;
        let idx = match cdf.binary_search_by(|probe| probe.total_cmp(&x)) {
            Ok(i) => (i + 1).min(m - 1),
            Err(i) => i.min(m - 1),
        };
        let row = u.row(idx);
        let scale = 1.0 / (cfg.r as f64 * probs[idx]);
        for a in 0..k {
            for b in 0..k {
                gram[[a, b]] += scale * row[a] * row[b];
            }
        }
    }
    let mut dev = -gram;
    for i in 0..k {
        dev[[i, i]] += 1.0;
    }
    linalg::spectral_norm_sym(&dev)
}

/// Gram matrix of the full, identity-scaled sample: every edge taken once
/// with no reweighting, which reproduces `U^T U = I` exactly.
pub fn embedding_full_sample_gap(g: &Graph) -> Result<f64> {
    let u = incidence_basis(g)?;
    let k = g.vertex_count() - 1;
    let gram = u.t().dot(&u);
    let mut dev = -gram;
    for i in 0..k {
        dev[[i, i]] += 1.0;
    }
    linalg::spectral_norm_sym(&dev)
}

/// Orthonormal m x (n-1) basis of the column span of the weighted
/// incidence matrix: U = Phi V diag(lambda^{-1/2}) over nonzero
/// eigenvalues of L = Phi^T Phi.
fn incidence_basis(g: &Graph) -> Result<Array2<f64>> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let n = g.vertex_count();
    let m = g.edge_count();
    let l = laplacian(g, LaplacianKind::Combinatorial)?;
    let eig = eig_dense(&l, 1e-8)?;
    let mut u = Array2::<f64>::zeros((m, n - 1));
    for (row, e) in g.edges().iter().enumerate() {
        let sw = e.weight.sqrt();
        for j in 1..n {
            // Row of Phi = W^{1/2} B dotted with the j-th eigenvector.
            let phi_v = sw * (eig.vectors[[e.u, j]] - eig.vectors[[e.v, j]]);
            u[[row, j - 1]] = phi_v / eig.values[j].sqrt();
        }
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_family, gen_random, Family, RandomModel};
    use crate::par::run_trials;
    use approx::assert_abs_diff_eq;

    #[test]
    fn sketch_is_a_valid_laplacian_and_unbiased_in_weight() {
        let g = gen_random(RandomModel::Gnp { n: 60, p: 0.2 }, 40).unwrap();
        assert!(g.is_connected());
        let original: f64 = g.edges().iter().map(|e| e.weight).sum();
        let totals = run_trials(100, |t| {
            let cfg = SparsifierConfig::exact(600, 1000 + t as u64);
            let h = sparsify(&g, &cfg).unwrap();
            // Valid Laplacian: positive weights, no self-loops, subset of
            // the original edge set.
            for e in h.edges() {
                assert!(e.weight > 0.0);
                assert!(g.edge_weight(e.u, e.v).is_some());
            }
            h.edges().iter().map(|e| e.weight).sum::<f64>()
        });
        let mean: f64 = totals.iter().sum::<f64>() / totals.len() as f64;
        assert!(
            (mean - original).abs() <= 0.02 * original,
            "mean weight {mean} vs original {original}"
        );
    }

    #[test]
    fn quadratic_form_is_unbiased_for_a_fixed_vector() {
        let g = gen_random(RandomModel::Gnp { n: 30, p: 0.3 }, 77).unwrap();
        assert!(g.is_connected());
        let lg = laplacian(&g, LaplacianKind::Combinatorial).unwrap();
        let x = Array1::from_shape_fn(30, |i| ((i * 37 % 11) as f64) / 11.0 - 0.5);
        let want = x.dot(&lg.dot(&x));
        let vals = run_trials(200, |t| {
            let cfg = SparsifierConfig::exact(400, 31_000 + t as u64);
            let h = sparsify(&g, &cfg).unwrap();
            let lh = laplacian(&h, LaplacianKind::Combinatorial).unwrap();
            x.dot(&lh.dot(&x))
        });
        let mean: f64 = vals.iter().sum::<f64>() / vals.len() as f64;
        assert!(
            (mean - want).abs() <= 0.02 * want,
            "mean form {mean} vs exact {want}"
        );
    }

    #[test]
    fn huge_sample_reproduces_the_spectrum_of_k8() {
        let g = gen_family(Family::Complete(8)).unwrap();
        let cfg = SparsifierConfig::exact(1_000_000, 5);
        let h = sparsify(&g, &cfg).unwrap();
        let report = spectral_similarity(&g, &h).unwrap();
        for rho in &report.eigenvalue_ratios {
            assert!((rho - 1.0).abs() <= 0.05, "ratio {rho}");
        }
    }

    #[test]
    fn tree_leverages_are_uniform_and_samples_cover() {
        let t = gen_family(Family::BinaryTree(10)).unwrap();
        let lev = crate::resistance::leverage_scores(&t).unwrap();
        for row in &lev {
            assert_abs_diff_eq!(row.probability, 1.0 / 9.0, epsilon = 1e-10);
        }
        let cfg = SparsifierConfig::exact(90, 3);
        let h = sparsify(&t, &cfg).unwrap();
        assert_eq!(h.edge_count(), 9, "r = 10(n-1) draws should hit every tree edge");
    }

    #[test]
    fn similarity_identity_scaling_and_path_vs_cycle() {
        let g = gen_random(RandomModel::Gnp { n: 14, p: 0.4 }, 3).unwrap();
        assert!(g.is_connected());
        let report = spectral_similarity(&g, &g).unwrap();
        assert_abs_diff_eq!(report.sigma, 1.0, epsilon = 1e-7);

        let doubled_edges: Vec<(usize, usize, f64)> = g
            .edges()
            .iter()
            .map(|e| (e.u, e.v, 2.0 * e.weight))
            .collect();
        let doubled = Graph::new(14, &doubled_edges).unwrap();
        let report = spectral_similarity(&g, &doubled).unwrap();
        assert_abs_diff_eq!(report.sigma, 2.0, epsilon = 1e-7);

        // A path and a cycle are only n-spectrally similar; at n = 16 the
        // separation is at least n/4.
        let n = 16;
        let path = gen_family(Family::Path(n)).unwrap();
        let mut edges: Vec<(usize, usize, f64)> =
            path.edges().iter().map(|e| (e.u, e.v, e.weight)).collect();
        edges.push((0, n - 1, 1.0));
        let cycle = Graph::new(n, &edges).unwrap();
        let report = spectral_similarity(&cycle, &path).unwrap();
        assert!(report.sigma >= n as f64 / 4.0, "sigma {}", report.sigma);
    }

    #[test]
    fn disconnected_sketch_reports_infinite_sigma() {
        let g = gen_family(Family::Dumbbell(5)).unwrap();
        // Tiny sample: overwhelmingly likely to miss enough edges to
        // disconnect; search a seed that does.
        let mut found = false;
        for seed in 0..50 {
            let cfg = SparsifierConfig::exact(3, seed);
            let h = sparsify(&g, &cfg).unwrap();
            if !h.is_connected() {
                let report = spectral_similarity(&g, &h).unwrap();
                assert!(report.sigma.is_infinite());
                found = true;
                break;
            }
        }
        assert!(found, "no disconnected sketch found in 50 seeds");
    }

    #[test]
    fn embedding_norm_small_at_the_standard_sample_size() {
        let g = gen_random(RandomModel::Gnp { n: 50, p: 0.3 }, 8).unwrap();
        assert!(g.is_connected());
        let n = 50f64;
        let r = (20.0 * n * n.ln() / 0.25).ceil() as usize;
        let ok = run_trials(10, |t| {
            let cfg = SparsifierConfig::exact(r, 700 + t as u64);
            embedding_check(&g, &cfg).unwrap() <= 0.5
        });
        let passes = ok.iter().filter(|&&b| b).count();
        assert!(passes >= 9, "{passes}/10 seeds under the norm target");
    }

    #[test]
    fn full_identity_sample_has_zero_gap() {
        let g = gen_random(RandomModel::Gnp { n: 20, p: 0.3 }, 2).unwrap();
        assert!(g.is_connected());
        assert!(embedding_full_sample_gap(&g).unwrap() <= 1e-8);
    }

    #[test]
    fn uniform_probabilities_undersample_the_bridge() {
        let g = gen_family(Family::Dumbbell(6)).unwrap();
        let m = g.edge_count();
        let uniform = vec![1.0 / m as f64; m];
        let r = 600;
        // beta small enough that uniform is admissible on this graph.
        let trials: Vec<(f64, f64)> = run_trials(10, |t| {
            let ucfg = SparsifierConfig {
                r,
                beta: 0.2,
                seed: 50 + t as u64,
                source: ProbabilitySource::Supplied(uniform.clone()),
            };
            let lcfg = SparsifierConfig::exact(r, 50 + t as u64);
            (
                embedding_check(&g, &ucfg).unwrap(),
                embedding_check(&g, &lcfg).unwrap(),
            )
        });
        let uniform_mean: f64 = trials.iter().map(|t| t.0).sum::<f64>() / 10.0;
        let leverage_mean: f64 = trials.iter().map(|t| t.1).sum::<f64>() / 10.0;
        assert!(
            uniform_mean > leverage_mean,
            "uniform {uniform_mean} should exceed leverage {leverage_mean}"
        );
    }

    #[test]
    fn supplied_probabilities_are_validated() {
        let g = gen_family(Family::Dumbbell(4)).unwrap();
        let m = g.edge_count();
        let mut probs = vec![1.0 / m as f64; m];
        // Zero out the bridge edge (leverage 1): must be rejected.
        let bridge_idx = g
            .edges()
            .iter()
            .position(|e| e.u == 3 && e.v == 4)
            .unwrap();
        probs[bridge_idx] = 0.0;
        let cfg = SparsifierConfig {
            r: 10,
            beta: 1.0,
            seed: 0,
            source: ProbabilitySource::Supplied(probs),
        };
        assert!(matches!(
            sparsify(&g, &cfg),
            Err(Error::ZeroProbabilityEdge(3, 4))
        ));

        // Uniform probabilities with beta = 1 undercut the bridge.
        let uniform = vec![1.0 / m as f64; m];
        let cfg = SparsifierConfig {
            r: 10,
            beta: 1.0,
            seed: 0,
            source: ProbabilitySource::Supplied(uniform),
        };
        assert!(sparsify(&g, &cfg).is_err());
    }
}
