//! Strongly and weakly local clustering.
//!
//! Two residual-push algorithms are implemented separately rather than as
//! one parameterized hybrid, because they maintain different exact
//! invariants:
//!
//! - [`push_ppr`]: the lazy-walk approximate-PageRank push (ACL style).
//!   Maintains `p + ppr_alpha(r) = ppr_alpha(seed)` exactly, where
//!   `ppr_alpha` uses the walk `rho I + (1 - rho) A D^{-1}`.
//! - [`push_l1`]: the direct-walk variant whose `rho = 1` output exactly
//!   solves a sparsity-regularized 2-norm cut problem. Maintains
//!   `r = (1 - beta) v - (I - beta A D^{-1}) x` exactly.
//!
//! [`mov_solve`] is the weakly local path: the spectral program with a
//! degree-weighted correlation constraint, solved through the generalized
//! eigensystem plus bisection on the dual parameter.

use std::collections::VecDeque;

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::graph::{laplacian, Graph, LaplacianKind, NodeSet};
use crate::linalg;
use crate::spectra::{eig_dense, sweep_cut, SweepResult};

/// D-normalized seed vector for the correlation-constrained spectral
/// program: positive on the set, negative off it, with `s^T D 1 = 0` and
/// `s^T D s = 1` by construction.
#[derive(Debug, Clone)]
pub struct SeedVector {
    pub s: Array1<f64>,
    pub origin_set: Option<NodeSet>,
}

/// Builds the seed vector of a proper nonempty vertex set.
pub fn seed_vector(g: &Graph, t: &NodeSet) -> Result<SeedVector> {
    if !t.is_proper() {
        return Err(Error::EmptyOrFullSet);
    }
    let n = g.vertex_count();
    let vol_t: f64 = t.members().iter().map(|&v| g.degree(v)).sum();
    let vol_rest = g.volume() - vol_t;
    let scale = (vol_t * vol_rest / g.volume()).sqrt();
    let mut s = Array1::<f64>::zeros(n);
    for v in 0..n {
        s[v] = if t.contains(v) {
            scale / vol_t
        } else {
            -scale / vol_rest
        };
    }
    let sv = SeedVector {
        s,
        origin_set: Some(t.clone()),
    };
    debug_assert!(seed_invariants(g, &sv.s).is_ok());
    Ok(sv)
}

fn seed_invariants(g: &Graph, s: &Array1<f64>) -> Result<()> {
    let d1: f64 = (0..g.vertex_count()).map(|i| g.degree(i) * s[i]).sum();
    let ds: f64 = (0..g.vertex_count()).map(|i| g.degree(i) * s[i] * s[i]).sum();
    if d1.abs() > 1e-10 || (ds - 1.0).abs() > 1e-10 {
        return Err(Error::InvariantViolation(format!(
            "seed vector normalization off: s^T D 1 = {d1}, s^T D s = {ds}"
        )));
    }
    Ok(())
}

/// State of a residual-push run: approximation `p`, residual `r`, the
/// vector the run started from, its parameters, and work counters.
///
/// For [`push_ppr`], `alpha` is the teleport and `eps` the residual
/// threshold. For [`push_l1`], the same fields hold `beta` and `tau`.
#[derive(Debug, Clone)]
pub struct PushState {
    pub p: Array1<f64>,
    pub r: Array1<f64>,
    /// Initial residual-generating vector (the seed distribution for
    /// [`push_ppr`], `d_S / vol(S)` for [`push_l1`]).
    pub seed: Array1<f64>,
    pub alpha: f64,
    pub eps: f64,
    pub rho: f64,
    pub push_count: usize,
    /// Sum of the degrees of pushed vertices across all pushes.
    pub work_volume: f64,
}

impl PushState {
    /// Volume of the support of `p`.
    pub fn support_volume(&self, g: &Graph) -> f64 {
        (0..g.vertex_count())
            .filter(|&v| self.p[v] > 0.0)
            .map(|v| g.degree(v))
            .sum()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.p.len()).filter(|&v| self.p[v] > 0.0).collect()
    }
}

/// Approximate personalized PageRank by residual pushing.
///
/// Processes vertices whose residual is over `eps * degree` in FIFO order
/// (ties broken by vertex id at initialization). Each push moves
/// `alpha * r_u` into `p_u`, keeps `(1 - alpha) * rho * r_u` at `u`, and
/// spreads the remaining `(1 - alpha) * (1 - rho) * r_u` over the
/// neighbors in proportion to edge weight. With `rho = 1/2` this is the
/// classical lazy-walk push; the terminal residual satisfies
/// `r <= eps * d` entrywise.
pub fn push_ppr(
    g: &Graph,
    seed: &[(usize, f64)],
    alpha: f64,
    eps: f64,
    rho: f64,
) -> Result<PushState> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "push teleport alpha must be in (0, 1), got {alpha}"
        )));
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter("push needs eps > 0".into()));
    }
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "push laziness rho must be in (0, 1], got {rho}"
        )));
    }
    let n = g.vertex_count();
    let mut r = Array1::<f64>::zeros(n);
    let mut total = 0.0;
    for &(v, mass) in seed {
        if v >= n {
            return Err(Error::EndpointOutOfRange { vertex: v, n });
        }
        if mass < 0.0 {
            return Err(Error::InvalidParameter(
                "seed distribution must be nonnegative".into(),
            ));
        }
        r[v] += mass;
        total += mass;
    }
    if total > 1.0 + 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "seed mass {total} exceeds 1"
        )));
    }
    let seed_vec = r.clone();
    let mut state = PushState {
        p: Array1::zeros(n),
        r,
        seed: seed_vec,
        alpha,
        eps,
        rho,
        push_count: 0,
        work_volume: 0.0,
    };
    let mut queue: VecDeque<usize> = VecDeque::new();
    let mut queued = vec![false; n];
    for v in 0..n {
        if state.r[v] >= eps * g.degree(v) && g.degree(v) > 0.0 {
            queue.push_back(v);
            queued[v] = true;
        }
    }
    while let Some(u) = queue.pop_front() {
        queued[u] = false;
        let du = g.degree(u);
        let ru = state.r[u];
        if ru < eps * du {
            continue;
        }
        state.p[u] += alpha * ru;
        state.r[u] = (1.0 - alpha) * rho * ru;
        let spread = (1.0 - alpha) * (1.0 - rho) * ru;
        for &(v, w) in g.neighbors(u) {
            state.r[v] += spread * w / du;
            if !queued[v] && state.r[v] >= eps * g.degree(v) {
                queue.push_back(v);
                queued[v] = true;
            }
        }
        state.push_count += 1;
        state.work_volume += du;
        if !queued[u] && state.r[u] >= eps * du {
            queue.push_back(u);
            queued[u] = true;
        }
    }
    Ok(state)
}

/// Dense PageRank with the same generalized-lazy walk a push run uses,
/// so exactness checks can compare against the identical operator.
pub fn ppr_dense_for_push(g: &Graph, alpha: f64, rho: f64, s: &Array1<f64>) -> Result<Array1<f64>> {
    let n = g.vertex_count();
    let base = crate::diffusion::walk_matrix(g, false)?;
    // rho I + (1 - rho) W
    let mut m = &base.matrix * -((1.0 - alpha) * (1.0 - rho));
    for i in 0..n {
        m[[i, i]] += 1.0 - (1.0 - alpha) * rho;
    }
    linalg::solve_linear(&m, &(s * alpha))
}

/// Sweeps `p_v / d_v` in decreasing order over the support of `p` and its
/// boundary, evaluating conductance in the full graph.
pub fn push_sweep(g: &Graph, st: &PushState) -> Result<SweepResult> {
    let n = g.vertex_count();
    let support = st.support();
    if support.is_empty() {
        return Err(Error::InvalidParameter(
            "push sweep needs a nonzero approximation vector".into(),
        ));
    }
    let mut in_scope = vec![false; n];
    for &v in &support {
        in_scope[v] = true;
        for &(u, _) in g.neighbors(v) {
            in_scope[u] = true;
        }
    }
    let mut scope: Vec<usize> = (0..n).filter(|&v| in_scope[v]).collect();
    // Decreasing p/d, ties by id.
    scope.sort_by(|&a, &b| {
        let qa = st.p[a] / g.degree(a);
        let qb = st.p[b] / g.degree(b);
        qb.total_cmp(&qa).then(a.cmp(&b))
    });
    let limit = scope.len().min(n - 1);

    let total_vol = g.volume();
    let mut in_set = vec![false; n];
    let mut vol_s = 0.0;
    let mut cut = 0.0;
    let mut profile = Vec::with_capacity(limit);
    let mut best_index = 1;
    let mut best_phi = f64::INFINITY;
    for (idx, &v) in scope.iter().enumerate().take(limit) {
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
    let prefix = NodeSet::new(n, scope[..best_index].iter().copied())?;
    let prefix_vol: f64 = prefix.members().iter().map(|&v| g.degree(v)).sum();
    let best_set = if prefix_vol <= total_vol - prefix_vol {
        prefix
    } else {
        prefix.complement()
    };
    Ok(SweepResult {
        order: scope,
        best_index,
        best_set,
        best_conductance: best_phi,
        profile,
    })
}

/// Direct-walk push whose `rho = 1` output exactly solves the
/// sparsity-regularized cut problem.
///
/// Seeds at `v = d_S / vol(S)`, starts from `x = 0, r = (1 - beta) v`, and
/// while any `r_j > tau * d_j` pushes `m = r_j - tau * d_j * rho` into
/// `x_j`, resets `r_j` to `tau * d_j * rho`, and gives each neighbor
/// `beta * m * w_ij / d_j`. The identity
/// `r = (1 - beta) v - (I - beta A D^{-1}) x` holds after every push, and
/// `0 <= r <= tau * d` at termination (up to one part in 1e12: the
/// threshold carries that much relative slack, without which rounding can
/// pin a one-ulp excess that bounces between neighbors forever).
pub fn push_l1(
    g: &Graph,
    seed_set: &NodeSet,
    beta: f64,
    tau: f64,
    rho: f64,
) -> Result<PushState> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "push_l1 needs beta in (0, 1), got {beta}"
        )));
    }
    if !(tau > 0.0) {
        return Err(Error::InvalidParameter("push_l1 needs tau > 0".into()));
    }
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "push_l1 needs rho in (0, 1], got {rho}"
        )));
    }
    if !seed_set.is_proper() {
        return Err(Error::EmptyOrFullSet);
    }
    let n = g.vertex_count();
    let vol_s: f64 = seed_set.members().iter().map(|&v| g.degree(v)).sum();
    let mut v = Array1::<f64>::zeros(n);
    for &u in seed_set.members() {
        v[u] = g.degree(u) / vol_s;
    }
    let mut state = PushState {
        p: Array1::zeros(n),
        r: &v * (1.0 - beta),
        seed: v,
        alpha: beta,
        eps: tau,
        rho,
        push_count: 0,
        work_volume: 0.0,
    };
    // Relative slack in the trigger keeps the push size bounded away from
    // zero, so the loop cannot livelock on one-ulp excesses.
    let over = |r: f64, d: f64| r > tau * d * (1.0 + 1e-12);
    let mut queue: VecDeque<usize> = VecDeque::new();
    let mut queued = vec![false; n];
    for u in 0..n {
        if over(state.r[u], g.degree(u)) {
            queue.push_back(u);
            queued[u] = true;
        }
    }
    while let Some(j) = queue.pop_front() {
        queued[j] = false;
        let dj = g.degree(j);
        let rj = state.r[j];
        if !over(rj, dj) {
            continue;
        }
        let m = rj - tau * dj * rho;
        state.p[j] += m;
        state.r[j] = tau * dj * rho;
        for &(i, w) in g.neighbors(j) {
            state.r[i] += beta * m * w / dj;
            if !queued[i] && over(state.r[i], g.degree(i)) {
                queue.push_back(i);
                queued[i] = true;
            }
        }
        state.push_count += 1;
        state.work_volume += dj;
        if !queued[j] && over(state.r[j], dj) {
            queue.push_back(j);
            queued[j] = true;
        }
    }
    Ok(state)
}

/// Residual of the exact push_l1 identity
/// `r = (1 - beta) v - (I - beta A D^{-1}) x`, as a max-abs deviation.
pub fn push_l1_identity_gap(g: &Graph, st: &PushState) -> f64 {
    let n = g.vertex_count();
    let beta = st.alpha;
    let mut expect = &st.seed * (1.0 - beta) - &st.p;
    for j in 0..n {
        if st.p[j] == 0.0 {
            continue;
        }
        let share = beta * st.p[j] / g.degree(j);
        for &(i, w) in g.neighbors(j) {
            expect[i] += share * w;
        }
    }
    (0..n)
        .map(|i| (expect[i] - st.r[i]).abs())
        .fold(0.0, f64::max)
}

/// Optimality conditions of the sparsity-regularized cut problem, checked
/// on a `rho = 1` push_l1 output.
#[derive(Debug, Clone, serde::Serialize)]
pub struct GmOptimalityReport {
    pub solution_nonnegative: bool,
    pub residual_in_bounds: bool,
    /// |x^T (tau d - r)|, which complementary slackness makes zero.
    pub slackness_violation: f64,
    /// Max-abs gap in the linear residual identity.
    pub identity_gap: f64,
    pub all_pass: bool,
}

/// Evaluates the four optimality conditions: `x >= 0`, `0 <= r <= tau d`,
/// complementary slackness `x^T (tau d - r) = 0`, and the residual
/// identity. Returns the violations rather than erroring; with `rho < 1`
/// slackness is expected to fail.
pub fn gm_optimality_check(g: &Graph, st: &PushState) -> GmOptimalityReport {
    let n = g.vertex_count();
    let tau = st.eps;
    let solution_nonnegative = st.p.iter().all(|&x| x >= 0.0);
    let residual_in_bounds = (0..n).all(|i| {
        st.r[i] >= -1e-12 && st.r[i] <= tau * g.degree(i) + 1e-12
    });
    let slackness_violation: f64 = (0..n)
        .map(|i| st.p[i] * (tau * g.degree(i) - st.r[i]))
        .sum::<f64>()
        .abs();
    let identity_gap = push_l1_identity_gap(g, st);
    let all_pass = solution_nonnegative
        && residual_in_bounds
        && slackness_violation <= 1e-10
        && identity_gap <= 1e-12;
    GmOptimalityReport {
        solution_nonnegative,
        residual_in_bounds,
        slackness_violation,
        identity_gap,
        all_pass,
    }
}

/// Solution of the correlation-constrained spectral program.
#[derive(Debug, Clone)]
pub struct MovSolution {
    /// D-normalized solution vector, orthogonal to the degree-weighted
    /// ones vector, signed so `x^T D s >= 0`.
    pub x: Array1<f64>,
    /// Dual parameter; strictly below the generalized lambda_2 when the
    /// correlation constraint is active, equal to it otherwise.
    pub gamma: f64,
    pub kappa: f64,
    /// Normalization scalar: `x = c (L - gamma D)^+ D s`.
    pub c: f64,
    pub correlation_achieved: f64,
    /// True when the requested correlation is already met by the
    /// generalized Fiedler vector, so the constraint does not bind.
    pub constraint_inactive: bool,
}

/// Solves the locally-biased spectral program: minimize `x^T L x` subject
/// to `x^T D x = 1`, `x^T D 1 = 0`, and `(x^T D s)^2 >= kappa`.
///
/// The solution is `c (L - gamma D)^+ D s` with `gamma` found by bisection
/// so the correlation constraint is met with equality; `kappa` at or below
/// the Fiedler correlation returns the generalized Fiedler vector with the
/// constraint inactive.
pub fn mov_solve(g: &Graph, seed: &SeedVector, kappa: f64) -> Result<MovSolution> {
    if !(0.0..1.0).contains(&kappa) {
        return Err(Error::InvalidParameter(format!(
            "correlation target kappa must be in [0, 1), got {kappa}"
        )));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    seed_invariants(g, &seed.s)?;
    let n = g.vertex_count();
    let lsym = laplacian(g, LaplacianKind::NormalizedSymmetric)?;
    let eig = eig_dense(&lsym, 1e-8)?;
    let values = &eig.values;
    let lambda2 = values[1];

    // Coefficients of D^{1/2} s in the nontrivial eigenbasis.
    let mut ds_half = Array1::<f64>::zeros(n);
    for i in 0..n {
        ds_half[i] = g.degree(i).sqrt() * seed.s[i];
    }
    let coeffs: Vec<f64> = (1..n).map(|j| eig.vectors.column(j).dot(&ds_half)).collect();

    // Total correlation available in the lambda_2 eigenspace.
    let fiedler_corr: f64 = (1..n)
        .filter(|&j| values[j] <= lambda2 + 1e-12)
        .map(|j| coeffs[j - 1] * coeffs[j - 1])
        .sum();
    if fiedler_corr < 1e-10 {
        return Err(Error::SeedOrthogonalToFiedler);
    }

    let build = |gamma: f64| -> (Array1<f64>, f64) {
        // y = (L - gamma D)^+ D s in D^{1/2} coordinates.
        let mut y_half = Array1::<f64>::zeros(n);
        for j in 1..n {
            let denom = values[j] - gamma;
            let scale = coeffs[j - 1] / denom;
            for i in 0..n {
                y_half[i] += scale * eig.vectors[[i, j]];
            }
        }
        let norm = y_half.dot(&y_half).sqrt();
        (y_half, norm)
    };
    let correlation = |gamma: f64| -> f64 {
        let num: f64 = (1..n)
            .map(|j| coeffs[j - 1] * coeffs[j - 1] / (values[j] - gamma))
            .sum();
        let den: f64 = (1..n)
            .map(|j| {
                let c = coeffs[j - 1];
                c * c / ((values[j] - gamma) * (values[j] - gamma))
            })
            .sum();
        num * num / den
    };

    if kappa <= fiedler_corr + 1e-8 {
        // Constraint inactive: the generalized Fiedler direction already
        // meets the correlation target. Limit of the solution path as
        // gamma approaches lambda_2: the lambda_2 eigenspace weighted by
        // the seed coefficients.
        let mut y_half = Array1::<f64>::zeros(n);
        for j in 1..n {
            if values[j] <= lambda2 + 1e-12 {
                let c = coeffs[j - 1];
                for i in 0..n {
                    y_half[i] += c * eig.vectors[[i, j]];
                }
            }
        }
        let norm = y_half.dot(&y_half).sqrt();
        let mut x = Array1::<f64>::zeros(n);
        for i in 0..n {
            x[i] = y_half[i] / norm / g.degree(i).sqrt();
        }
        let corr = {
            let xds: f64 = (0..n).map(|i| g.degree(i) * x[i] * seed.s[i]).sum();
            xds * xds
        };
        return Ok(MovSolution {
            x,
            gamma: lambda2,
            kappa,
            c: 1.0 / norm,
            correlation_achieved: corr,
            constraint_inactive: true,
        });
    }

    // Active constraint: bisect gamma in (-inf, lambda_2). Correlation is
    // monotone non-increasing in gamma, 1 in the -inf limit.
    let hi = lambda2 - 1e-9;
    let mut lo = -1e6;
    let mut widen = 0;
    while correlation(lo) < kappa {
        lo *= 2.0;
        widen += 1;
        if widen > 60 {
            return Err(Error::NoConvergence(widen));
        }
    }
    let mut lo_corr = correlation(lo);
    let mut a = lo;
    let mut b = hi;
    let mut gamma;
    let mut steps = 0;
    loop {
        gamma = 0.5 * (a + b);
        let corr = correlation(gamma);
        if corr > lo_corr + 1e-9 {
            return Err(Error::InvariantViolation(
                "correlation failed to decrease along the bisection".into(),
            ));
        }
        if (corr - kappa).abs() <= 1e-8 {
            break;
        }
        if corr > kappa {
            a = gamma;
            lo_corr = corr;
        } else {
            b = gamma;
        }
        steps += 1;
        if steps > 200 {
            return Err(Error::NoConvergence(steps));
        }
    }

    let (y_half, norm) = build(gamma);
    let mut x = Array1::<f64>::zeros(n);
    for i in 0..n {
        x[i] = y_half[i] / norm / g.degree(i).sqrt();
    }
    let xds: f64 = (0..n).map(|i| g.degree(i) * x[i] * seed.s[i]).sum();
    let (x, xds) = if xds < 0.0 { (-x, -xds) } else { (x, xds) };
    Ok(MovSolution {
        x,
        gamma,
        kappa,
        c: 1.0 / norm,
        correlation_achieved: xds * xds,
        constraint_inactive: false,
    })
}

/// A graph augmented with a source tied to a seed set and a sink tied to
/// its complement, both with degree-proportional weights.
#[derive(Debug, Clone)]
pub struct LocalizedCutGraph {
    pub graph: Graph,
    pub s_node: usize,
    pub t_node: usize,
    pub alpha: f64,
}

/// Builds the localized cut graph: `s` joins every seed vertex `v` with
/// weight `alpha * d_v`, `t` joins every other vertex the same way, and
/// the base edges are unchanged. `alpha = 0` leaves `s` and `t` isolated.
pub fn localized_cut_graph(g: &Graph, s: &NodeSet, alpha: f64) -> Result<LocalizedCutGraph> {
    if !s.is_proper() {
        return Err(Error::EmptyOrFullSet);
    }
    if alpha < 0.0 {
        return Err(Error::InvalidParameter("alpha must be nonnegative".into()));
    }
    let n = g.vertex_count();
    let mut edges: Vec<(usize, usize, f64)> =
        g.edges().iter().map(|e| (e.u, e.v, e.weight)).collect();
    if alpha > 0.0 {
        for v in 0..n {
            let anchor = if s.contains(v) { n } else { n + 1 };
            edges.push((anchor, v, alpha * g.degree(v)));
        }
    }
    Ok(LocalizedCutGraph {
        graph: Graph::new(n + 2, &edges)?,
        s_node: n,
        t_node: n + 1,
        alpha,
    })
}

/// Verifies that the PageRank-style solve `(alpha D + L) z = alpha d_S /
/// vol(S)` is a rescaled solution of the 2-norm cut problem on the
/// localized cut graph: pinning the source to 1 and the sink to 0 and
/// minimizing the quadratic form, the free block must equal `vol(S) z`.
/// Returns the max-abs deviation between the two routes.
pub fn pr_cut_equivalence_check(g: &Graph, s: &NodeSet, alpha: f64) -> Result<f64> {
    if alpha <= 0.0 {
        return Err(Error::InvalidParameter(
            "equivalence check needs alpha > 0".into(),
        ));
    }
    let n = g.vertex_count();
    let vol_s: f64 = s.members().iter().map(|&v| g.degree(v)).sum();

    // Route 1: direct PageRank-style solve.
    let l = laplacian(g, LaplacianKind::Combinatorial)?;
    let mut lhs = l.clone();
    for i in 0..n {
        lhs[[i, i]] += alpha * g.degree(i);
    }
    let mut rhs = Array1::<f64>::zeros(n);
    for &v in s.members() {
        rhs[v] = alpha * g.degree(v) / vol_s;
    }
    let z = linalg::solve_linear(&lhs, &rhs)?;

    // Route 2: through the localized cut graph, built as an actual graph.
    let lcg = localized_cut_graph(g, s, alpha)?;
    let l_aug = laplacian(&lcg.graph, LaplacianKind::Combinatorial)?;
    // x_s = 1, x_t = 0; stationarity over the free block G:
    // L[G,G] x_G = -L[G, s_node].
    let mut a = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            a[[i, j]] = l_aug[[i, j]];
        }
    }
    let mut b = Array1::<f64>::zeros(n);
    for i in 0..n {
        b[i] = -l_aug[[i, lcg.s_node]];
    }
    let x_g = linalg::solve_linear(&a, &b)?;

    let mut worst: f64 = 0.0;
    for i in 0..n {
        worst = worst.max((x_g[i] - vol_s * z[i]).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffusion::pagerank_dense;
    use crate::graph::{gen_family, gen_random, partition_quality, Family, RandomModel};
    use approx::assert_abs_diff_eq;

    #[test]
    fn seed_vector_invariants_and_k4_values() {
        let k4 = gen_family(Family::Complete(4)).unwrap();
        let t = NodeSet::new(4, [0, 1]).unwrap();
        let sv = seed_vector(&k4, &t).unwrap();
        seed_invariants(&k4, &sv.s).unwrap();
        // vol(T) = vol(T-bar) = 6, Vol = 12: entries are +-sqrt(3)/6.
        let want = 3f64.sqrt() / 6.0;
        assert_abs_diff_eq!(sv.s[0], want, epsilon = 1e-12);
        assert_abs_diff_eq!(sv.s[3], -want, epsilon = 1e-12);

        // Self-correlation of a set with itself is exactly 1.
        let corr: f64 = (0..4).map(|i| k4.degree(i) * sv.s[i] * sv.s[i]).sum();
        assert_abs_diff_eq!(corr * corr, 1.0, epsilon = 1e-12);

        assert!(seed_vector(&k4, &NodeSet::new(4, []).unwrap()).is_err());
        assert!(seed_vector(&k4, &NodeSet::new(4, 0..4).unwrap()).is_err());
    }

    #[test]
    fn push_with_huge_eps_does_nothing() {
        let g = gen_family(Family::Star(8)).unwrap();
        let st = push_ppr(&g, &[(0, 1.0)], 0.2, 10.0, 0.5).unwrap();
        assert_eq!(st.push_count, 0);
        assert!(st.p.iter().all(|&x| x == 0.0));
        assert_abs_diff_eq!(st.r[0], 1.0);
    }

    fn push_exactness_gap(g: &Graph, st: &PushState) -> f64 {
        // p + ppr(r) must equal ppr(seed) for the same walk.
        let via_r = ppr_dense_for_push(g, st.alpha, st.rho, &st.r).unwrap();
        let direct = ppr_dense_for_push(g, st.alpha, st.rho, &st.seed).unwrap();
        (0..g.vertex_count())
            .map(|i| (st.p[i] + via_r[i] - direct[i]).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn push_is_exact_against_dense_oracle() {
        let g = gen_family(Family::Star(8)).unwrap();
        let st = push_ppr(&g, &[(0, 1.0)], 0.2, 1e-6, 0.5).unwrap();
        assert!(push_exactness_gap(&g, &st) < 1e-10);
        for v in 0..8 {
            assert!(st.r[v] <= 1e-6 * g.degree(v) + 1e-15);
        }
        let l1 = st.p.sum() + st.r.sum();
        assert!(l1 <= 1.0 + 1e-12);

        // Lazy-walk push against the standard lazy PageRank.
        let lazy = pagerank_dense(&g, 0.2, &st.seed, true).unwrap();
        let via = ppr_dense_for_push(&g, 0.2, 0.5, &st.seed).unwrap();
        for i in 0..8 {
            assert_abs_diff_eq!(lazy[i], via[i], epsilon = 1e-12);
        }
    }

    #[test]
    fn push_invariant_holds_at_intermediate_checkpoints() {
        let g = gen_random(RandomModel::Gnp { n: 30, p: 0.2 }, 3).unwrap();
        assert!(g.is_connected());
        // Checkpoints realized as runs with progressively smaller eps: each
        // terminal state is a valid intermediate state of a finer run.
        for eps in [1e-2, 1e-3, 1e-4, 1e-5, 1e-6] {
            let st = push_ppr(&g, &[(0, 1.0)], 0.3, eps, 0.5).unwrap();
            assert!(push_exactness_gap(&g, &st) < 1e-10, "eps {eps}");
            assert!(st.p.sum() + st.r.sum() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn push_work_and_support_bounds() {
        let g = gen_random(RandomModel::Gnp { n: 40, p: 0.15 }, 9).unwrap();
        for &(alpha, eps) in &[(0.1, 1e-4), (0.5, 1e-5)] {
            let st = push_ppr(&g, &[(0, 1.0)], alpha, eps, 0.5).unwrap();
            // Total pushed volume is bounded by 1/(alpha eps).
            assert!(st.work_volume <= 1.0 / (alpha * eps) * (1.0 + 1e-9));
            // Support volume bound for the half-lazy push.
            assert!(st.support_volume(&g) <= 2.0 / ((1.0 + alpha) * eps) + 1e-9);
        }
    }

    #[test]
    fn push_sweep_recovers_dumbbell_clique() {
        let g = gen_family(Family::Dumbbell(6)).unwrap();
        let st = push_ppr(&g, &[(2, 1.0)], 0.05, 1e-7, 0.5).unwrap();
        let sweep = push_sweep(&g, &st).unwrap();
        let mut side: Vec<usize> = sweep.best_set.members().to_vec();
        side.sort_unstable();
        assert_eq!(side, vec![0, 1, 2, 3, 4, 5]);
        assert_abs_diff_eq!(sweep.best_conductance, 1.0 / 31.0, epsilon = 1e-12);

        // Every scanned prefix matches an exhaustive conductance evaluation.
        for (idx, &phi) in sweep.profile.iter().enumerate() {
            let set = NodeSet::new(12, sweep.order[..=idx].iter().copied()).unwrap();
            let score = partition_quality(&g, &set).unwrap();
            assert_abs_diff_eq!(phi, score.conductance_phi, epsilon = 1e-12);
        }
    }

    #[test]
    fn restricted_sweep_matches_padded_full_sweep() {
        let g = gen_random(RandomModel::Gnp { n: 25, p: 0.2 }, 5).unwrap();
        assert!(g.is_connected());
        let st = push_ppr(&g, &[(1, 1.0)], 0.3, 1e-3, 0.5).unwrap();
        let restricted = push_sweep(&g, &st).unwrap();
        // Padded vector: -p/d everywhere (zeros off support), so the
        // ascending full sweep scans the same prefixes.
        let padded: Vec<f64> = (0..25).map(|v| -st.p[v] / g.degree(v)).collect();
        let full = sweep_cut(&g, &padded).unwrap();
        let scanned = restricted.profile.len();
        // The support-and-boundary region is scanned identically as long as
        // the padded order agrees; compare the overlapping profile.
        let support_len = st
            .support()
            .len();
        for k in 0..support_len.min(scanned) {
            assert_abs_diff_eq!(restricted.profile[k], full.profile[k], epsilon = 1e-12);
        }
    }

    #[test]
    fn push_l1_identity_and_termination() {
        let g = gen_family(Family::Dumbbell(6)).unwrap();
        let s = NodeSet::new(12, 0..6).unwrap();
        let st = push_l1(&g, &s, 0.9, 1e-4, 1.0).unwrap();
        assert!(push_l1_identity_gap(&g, &st) <= 1e-12);
        for i in 0..12 {
            assert!(st.r[i] >= 0.0);
            assert!(st.r[i] <= 1e-4 * g.degree(i) + 1e-15);
        }
    }

    #[test]
    fn gm_conditions_pass_at_rho_one_and_slackness_fails_below() {
        let g = gen_random(RandomModel::Gnp { n: 40, p: 0.2 }, 8).unwrap();
        assert!(g.is_connected());
        let s = NodeSet::new(40, 0..5).unwrap();
        for tau in [1e-3, 1e-5] {
            let st = push_l1(&g, &s, 0.9, tau, 1.0).unwrap();
            let report = gm_optimality_check(&g, &st);
            assert!(report.all_pass, "tau {tau}: {report:?}");
        }
        let st_half = push_l1(&g, &s, 0.9, 1e-3, 0.5).unwrap();
        let report = gm_optimality_check(&g, &st_half);
        assert!(report.slackness_violation > 1e-10);
        assert!(report.identity_gap <= 1e-12);
    }

    #[test]
    fn push_l1_approaches_dense_cut_solution_as_tau_shrinks() {
        let g = gen_family(Family::Dumbbell(5)).unwrap();
        let s = NodeSet::new(10, 0..5).unwrap();
        let beta = 0.9;
        let alpha = (1.0 - beta) / beta;
        // Dense route: (alpha D + L) z = alpha v; the push solution tends
        // to D z.
        let l = laplacian(&g, LaplacianKind::Combinatorial).unwrap();
        let mut lhs = l;
        for i in 0..10 {
            lhs[[i, i]] += alpha * g.degree(i);
        }
        let vol_s = 21.0;
        let mut rhs = Array1::<f64>::zeros(10);
        for &v in s.members() {
            rhs[v] = alpha * g.degree(v) / vol_s;
        }
        let z = linalg::solve_linear(&lhs, &rhs).unwrap();
        let st = push_l1(&g, &s, beta, 1e-9, 1.0).unwrap();
        for i in 0..10 {
            assert_abs_diff_eq!(st.p[i], g.degree(i) * z[i], epsilon = 1e-5);
        }
    }

    #[test]
    fn mov_kappa_zero_returns_generalized_fiedler() {
        let g = gen_family(Family::Dumbbell(6)).unwrap();
        let t = NodeSet::new(12, 0..6).unwrap();
        let sv = seed_vector(&g, &t).unwrap();
        let sol = mov_solve(&g, &sv, 0.0).unwrap();
        assert!(sol.constraint_inactive);
        let pair = crate::spectra::fiedler(&g, LaplacianKind::RandomWalk).unwrap();
        let dot: f64 = (0..12)
            .map(|i| g.degree(i) * sol.x[i] * pair.vector[i])
            .sum();
        assert!(dot.abs() >= 0.999, "cos {dot}");
    }

    #[test]
    fn mov_high_kappa_approaches_the_seed() {
        let g = gen_family(Family::Dumbbell(6)).unwrap();
        let t = NodeSet::new(12, 0..6).unwrap();
        let sv = seed_vector(&g, &t).unwrap();
        let sol = mov_solve(&g, &sv, 0.999).unwrap();
        let cos: f64 = (0..12)
            .map(|i| g.degree(i) * sol.x[i] * sv.s[i])
            .sum();
        assert!(cos.abs() >= 0.99, "cos {cos}");
        assert!(!sol.constraint_inactive);
        assert_abs_diff_eq!(sol.correlation_achieved, 0.999, epsilon = 1e-7);
    }

    #[test]
    fn mov_mid_kappa_satisfies_the_stationarity_equation() {
        let g = gen_family(Family::Dumbbell(6)).unwrap();
        let t = NodeSet::new(12, [0, 1, 2]).unwrap();
        let sv = seed_vector(&g, &t).unwrap();
        let sol = mov_solve(&g, &sv, 0.5).unwrap();
        // (L - gamma D) x = (1/c') D s on the nontrivial subspace.
        let l = laplacian(&g, LaplacianKind::Combinatorial).unwrap();
        let mut lhs = l.dot(&sol.x);
        for i in 0..12 {
            lhs[i] -= sol.gamma * g.degree(i) * sol.x[i];
        }
        let mut ds = Array1::<f64>::zeros(12);
        for i in 0..12 {
            ds[i] = g.degree(i) * sv.s[i];
        }
        // The proportionality constant is 1/c up to the sign flip applied
        // to x; recover it by projection.
        let scale = lhs.dot(&ds) / ds.dot(&ds);
        let resid = &lhs - &(&ds * scale);
        assert!(resid.dot(&resid).sqrt() <= 1e-7, "residual {}", resid.dot(&resid).sqrt());

        // D-orthogonality to the ones vector and D-normalization.
        let d1: f64 = (0..12).map(|i| g.degree(i) * sol.x[i]).sum();
        assert!(d1.abs() < 1e-8);
        let dx: f64 = (0..12).map(|i| g.degree(i) * sol.x[i] * sol.x[i]).sum();
        assert_abs_diff_eq!(dx, 1.0, epsilon = 1e-8);
    }

    #[test]
    fn mov_negative_gamma_is_a_rescaled_ppr_vector() {
        let g = gen_random(RandomModel::Gnp { n: 16, p: 0.4 }, 6).unwrap();
        assert!(g.is_connected());
        let t = NodeSet::new(16, [0, 1]).unwrap();
        let sv = seed_vector(&g, &t).unwrap();
        let sol = mov_solve(&g, &sv, 0.98).unwrap();
        assert!(sol.gamma < 0.0, "gamma {}", sol.gamma);
        // x should be proportional to (L + |gamma| D)^{-1} D s, which is
        // the non-lazy PageRank resolvent with alpha = |gamma|/(1+|gamma|)
        // applied to D s.
        let alpha = -sol.gamma / (1.0 - sol.gamma);
        let mut ds = Array1::<f64>::zeros(16);
        for i in 0..16 {
            ds[i] = g.degree(i) * sv.s[i];
        }
        let pr = pagerank_dense(&g, alpha, &ds, false).unwrap();
        // pagerank returns pi with pi = D z scaling; x ~ z = D^{-1} pi.
        let zz: Vec<f64> = (0..16).map(|i| pr[i] / g.degree(i)).collect();
        let num: f64 = (0..16).map(|i| zz[i] * sol.x[i]).sum();
        let den: f64 = zz.iter().map(|v| v * v).sum::<f64>().sqrt()
            * sol.x.dot(&sol.x).sqrt();
        assert!(num.abs() / den >= 0.999999, "alignment {}", num.abs() / den);
    }

    #[test]
    fn mov_rejects_orthogonal_seed() {
        // On K_4 the lambda_2 eigenspace is everything nontrivial, so no
        // valid seed is orthogonal to it; build the degenerate case on a
        // path instead, where the Fiedler vector is odd around the center
        // and a symmetric seed is D-orthogonal to it.
        let g = gen_family(Family::Path(3)).unwrap();
        let mut s = Array1::<f64>::zeros(3);
        // Symmetric around the middle vertex: orthogonal to the odd
        // Fiedler vector in the D inner product.
        let d0 = 1.0f64;
        let d1 = 2.0f64;
        let (a, b) = {
            // Solve a*d0*2 + b*d1 = 0 with D-norm 1.
            let b_over_a = -2.0 * d0 / d1;
            let norm = (2.0 * d0 + b_over_a * b_over_a * d1).sqrt();
            (1.0 / norm, b_over_a / norm)
        };
        s[0] = a;
        s[1] = b;
        s[2] = a;
        let sv = SeedVector { s, origin_set: None };
        assert!(matches!(
            mov_solve(&g, &sv, 0.5),
            Err(Error::SeedOrthogonalToFiedler)
        ));
    }

    #[test]
    fn localized_cut_graph_shape() {
        let k4 = gen_family(Family::Complete(4)).unwrap();
        let s = NodeSet::new(4, [0, 1]).unwrap();
        let lcg = localized_cut_graph(&k4, &s, 1.0).unwrap();
        assert_eq!(lcg.graph.vertex_count(), 6);
        // s and t each absorb alpha * vol(side) = 6.
        assert_abs_diff_eq!(lcg.graph.degree(lcg.s_node), 6.0);
        assert_abs_diff_eq!(lcg.graph.degree(lcg.t_node), 6.0);
        assert_abs_diff_eq!(
            lcg.graph.volume(),
            k4.volume() + 2.0 * (6.0 + 6.0),
            epsilon = 1e-12
        );

        let degenerate = localized_cut_graph(&k4, &s, 0.0).unwrap();
        assert_abs_diff_eq!(degenerate.graph.degree(degenerate.s_node), 0.0);
    }

    #[test]
    fn pr_cut_equivalence_on_dumbbell_and_singletons() {
        let g = gen_family(Family::Dumbbell(6)).unwrap();
        let s = NodeSet::new(12, 0..6).unwrap();
        assert!(pr_cut_equivalence_check(&g, &s, 0.1).unwrap() <= 1e-8);

        let single = NodeSet::new(12, [3]).unwrap();
        assert!(pr_cut_equivalence_check(&g, &single, 1.0).unwrap() <= 1e-8);

        // Small alpha: the harmonic-like limit still matches.
        assert!(pr_cut_equivalence_check(&g, &s, 1e-4).unwrap() <= 1e-8);
    }
}

