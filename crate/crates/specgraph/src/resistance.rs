//! Laplacian pseudo-inverse, effective resistances, total resistance, and
//! edge leverage scores.
//!
//! Everything here goes through the dense pseudo-inverse at desk scale;
//! resistances are never approximated by a solver, so downstream
//! sparsification tests rest on oracle-grade values. (Fast solvers could
//! in principle produce the resistances that the sparsifier feeding those
//! solvers needs; that bootstrapping route is deliberately not built.)

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{laplacian, Graph, LaplacianKind};
use crate::linalg;
use crate::par::run_trials;
use crate::spectra::{eig_dense, EigenSystem};

/// Dense pseudo-inverse of the combinatorial Laplacian of a connected
/// graph, with the eigensystem it came from.
#[derive(Debug, Clone)]
pub struct PinvOperator {
    pub pinv: Array2<f64>,
    pub eigen: EigenSystem,
}

/// L^+ = V diag(0, 1/lambda_2, ...) V^T, zeroing the null eigenvalue.
///
/// Satisfies `L^+ 1 = 0` and `L L^+ = I - J/n` on connected graphs.
pub fn lap_pinv(g: &Graph) -> Result<PinvOperator> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let l = laplacian(g, LaplacianKind::Combinatorial)?;
    let eigen = eig_dense(&l, 1e-8)?;
    let n = g.vertex_count();
    let zero_tol = 1e-8 * eigen.values[n - 1].max(1.0);
    let mut scaled = Array2::<f64>::zeros((n, n));
    for j in 0..n {
        let lam = eigen.values[j];
        let inv = if lam.abs() <= zero_tol { 0.0 } else { 1.0 / lam };
        for i in 0..n {
            scaled[[i, j]] = eigen.vectors[[i, j]] * inv;
        }
    }
    let pinv = linalg::matmul(&scaled, &eigen.vectors.t().to_owned());
    Ok(PinvOperator { pinv, eigen })
}

impl PinvOperator {
    /// Effective resistance (e_a - e_b)^T L^+ (e_a - e_b); zero iff a = b.
    pub fn resistance(&self, a: usize, b: usize) -> f64 {
        if a == b {
            return 0.0;
        }
        self.pinv[[a, a]] - 2.0 * self.pinv[[a, b]] + self.pinv[[b, b]]
    }
}

/// Effective resistance between two vertices of a connected graph.
pub fn effective_resistance(g: &Graph, a: usize, b: usize) -> Result<f64> {
    let n = g.vertex_count();
    if a >= n {
        return Err(Error::EndpointOutOfRange { vertex: a, n });
    }
    if b >= n {
        return Err(Error::EndpointOutOfRange { vertex: b, n });
    }
    Ok(lap_pinv(g)?.resistance(a, b))
}

/// Total effective resistance: the sum over unordered vertex pairs.
///
/// Computed two ways, by the pairwise sum and by the spectral formula
/// `n * sum_i 1/lambda_i` over nonzero eigenvalues, asserted to agree to
/// 1e-6 (relative); the spectral value is returned.
pub fn total_resistance(g: &Graph) -> Result<f64> {
    let op = lap_pinv(g)?;
    let n = g.vertex_count();
    let mut pair_sum = 0.0;
    for a in 0..n {
        for b in (a + 1)..n {
            pair_sum += op.resistance(a, b);
        }
    }
    let zero_tol = 1e-8 * op.eigen.values[n - 1].max(1.0);
    let spectral: f64 = n as f64
        * op.eigen
            .values
            .iter()
            .filter(|&&lam| lam.abs() > zero_tol)
            .map(|&lam| 1.0 / lam)
            .sum::<f64>();
    let scale = pair_sum.abs().max(spectral.abs()).max(1.0);
    if (pair_sum - spectral).abs() > 1e-6 * scale {
        return Err(Error::InvariantViolation(format!(
            "total resistance mismatch: pair sum {pair_sum} vs spectral {spectral}"
        )));
    }
    Ok(spectral)
}

/// Per-edge resistance, leverage, and sampling probability.
#[derive(Debug, Clone, serde::Serialize)]
pub struct EdgeLeverage {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
    pub resistance: f64,
    /// w_e * R_e; in (0, 1], summing to n - 1 over the graph.
    pub leverage: f64,
    /// Leverage normalized to a probability distribution over edges.
    pub probability: f64,
}

/// Leverage scores of every edge: the importance weights for spectral
/// sparsification. Asserts the rank identity sum(leverage) = n - 1.
pub fn leverage_scores(g: &Graph) -> Result<Vec<EdgeLeverage>> {
    let op = lap_pinv(g)?;
    let n = g.vertex_count();
    let mut rows: Vec<EdgeLeverage> = g
        .edges()
        .iter()
        .map(|e| {
            let r = op.resistance(e.u, e.v);
            EdgeLeverage {
                u: e.u,
                v: e.v,
                weight: e.weight,
                resistance: r,
                leverage: e.weight * r,
                probability: 0.0,
            }
        })
        .collect();
    let total: f64 = rows.iter().map(|r| r.leverage).sum();
    if (total - (n as f64 - 1.0)).abs() > 1e-6 {
        return Err(Error::InvariantViolation(format!(
            "leverage sum {total} differs from n - 1 = {}",
            n - 1
        )));
    }
    for row in &mut rows {
        if !(row.leverage > 0.0 && row.leverage <= 1.0 + 1e-8) {
            return Err(Error::InvariantViolation(format!(
                "leverage {} outside (0, 1] on edge ({}, {})",
                row.leverage, row.u, row.v
            )));
        }
        // Normalizing by the computed total keeps the probabilities an
        // exact distribution under roundoff.
        row.probability = row.leverage / total;
    }
    Ok(rows)
}

/// Shortest-path distance with edge lengths 1/w (series resistance), via
/// Dijkstra. This is the geodesic that effective resistance is compared
/// against: equal on trees, strictly smaller once parallel paths exist.
pub fn resistance_geodesic(g: &Graph, from: usize) -> Vec<f64> {
    let n = g.vertex_count();
    let mut dist = vec![f64::INFINITY; n];
    dist[from] = 0.0;
    let mut done = vec![false; n];
    for _ in 0..n {
        let mut best = usize::MAX;
        let mut best_d = f64::INFINITY;
        for v in 0..n {
            if !done[v] && dist[v] < best_d {
                best = v;
                best_d = dist[v];
            }
        }
        if best == usize::MAX {
            break;
        }
        done[best] = true;
        for &(u, w) in g.neighbors(best) {
            let cand = best_d + 1.0 / w;
            if cand < dist[u] {
                dist[u] = cand;
            }
        }
    }
    dist
}

/// Largest triangle-inequality violation over sampled vertex triples
/// (nonpositive up to 1e-10 when the metric property holds). Also asserts
/// resistance never exceeds the geodesic distance.
pub fn resistance_metric_check(g: &Graph, trials: usize, seed: u64) -> Result<f64> {
    let op = lap_pinv(g)?;
    let n = g.vertex_count();
    if n < 3 {
        return Ok(0.0);
    }
    let geodesics: Vec<Vec<f64>> = (0..n).map(|v| resistance_geodesic(g, v)).collect();
    for a in 0..n {
        for b in 0..n {
            if op.resistance(a, b) > geodesics[a][b] + 1e-9 {
                return Err(Error::InvariantViolation(format!(
                    "resistance exceeds geodesic between {a} and {b}"
                )));
            }
        }
    }
    let violations = run_trials(trials, |trial| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(trial as u64));
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        let c = rng.random_range(0..n);
        op.resistance(a, c) - op.resistance(a, b) - op.resistance(b, c)
    });
    let worst = violations.into_iter().fold(f64::NEG_INFINITY, f64::max);
    if worst > 1e-10 {
        return Err(Error::InvariantViolation(format!(
            "triangle inequality violated by {worst}"
        )));
    }
    Ok(worst)
}
