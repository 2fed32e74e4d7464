//! Laplacian linear-system solving: dense oracle solve, conjugate
//! gradient, sparsifier-preconditioned CG, and the three classical
//! semi-supervised label-propagation systems.
//!
//! Solutions of `L x = b` live on the subspace orthogonal to the ones
//! vector; `b` is projected there up front and every iterate is
//! re-projected, which removes the null space without pivoting tricks.
//! The CG stopping rule converts the 2-norm residual into a certified
//! L-norm bound through oracle eigenvalue extremes, which is conservative.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::graph::{connected_components, laplacian, Graph, LaplacianKind};
use crate::linalg;
use crate::resistance::lap_pinv;
use crate::spectra::eig_dense;

/// Solution of a Laplacian system with its certification data.
#[derive(Debug, Clone)]
pub struct SolveReport {
    /// Solution, orthogonal to the ones vector.
    pub x: Array1<f64>,
    pub iterations: usize,
    /// ||x - L^+ b||_L / ||L^+ b||_L against the dense oracle.
    pub rel_error_l: f64,
    pub eps_requested: f64,
    /// False when the iteration budget ran out before certification.
    pub converged: bool,
}

fn project_to_zero_sum(b: &Array1<f64>) -> Array1<f64> {
    let mean = b.sum() / b.len() as f64;
    b - mean
}

fn l_norm_error(l: &Array2<f64>, x: &Array1<f64>, x_opt: &Array1<f64>) -> f64 {
    let diff = x - x_opt;
    let num = diff.dot(&l.dot(&diff)).max(0.0).sqrt();
    let den = x_opt.dot(&l.dot(x_opt)).max(0.0).sqrt();
    if den == 0.0 {
        num
    } else {
        num / den
    }
}

/// Exact solve through the dense pseudo-inverse. `b` is projected onto the
/// zero-sum subspace first.
pub fn solve_dense(g: &Graph, b: &Array1<f64>) -> Result<SolveReport> {
    let op = lap_pinv(g)?;
    let b = project_to_zero_sum(b);
    let x = op.pinv.dot(&b);
    Ok(SolveReport {
        x,
        iterations: 0,
        rel_error_l: 0.0,
        eps_requested: 0.0,
        converged: true,
    })
}

/// Conjugate gradient on the zero-sum subspace, stopping when the
/// residual-derived L-norm bound certifies `eps` or the iteration budget
/// runs out (in which case the best iterate is returned with
/// `converged: false`).
pub fn solve_cg(g: &Graph, b: &Array1<f64>, eps: f64, max_iter: usize) -> Result<SolveReport> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter("cg needs eps > 0".into()));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let l = laplacian(g, LaplacianKind::Combinatorial)?;
    let eig = eig_dense(&l, 1e-8)?;
    let n = g.vertex_count();
    let lambda2 = eig.values[1];
    let lambda_max = eig.values[n - 1];
    let b = project_to_zero_sum(b);
    let b_norm = b.dot(&b).sqrt();
    // ||x - x*||_L <= ||r|| / sqrt(lambda2) and ||x*||_L >= ||b|| /
    // sqrt(lambda_max), so this residual target certifies eps in L-norm.
    let target = eps * b_norm * (lambda2 / lambda_max).sqrt();

    let mut x = Array1::<f64>::zeros(n);
    let mut r = b.clone();
    let mut p = r.clone();
    let mut rr = r.dot(&r);
    let mut iterations = 0;
    let mut converged = rr.sqrt() <= target;
    while !converged && iterations < max_iter {
        let lp = l.dot(&p);
        let alpha = rr / p.dot(&lp);
        x = &x + &(&p * alpha);
        r = &r - &(&lp * alpha);
        // Null-space hygiene: re-project each iterate.
        x = project_to_zero_sum(&x);
        r = project_to_zero_sum(&r);
        let rr_next = r.dot(&r);
        let beta = rr_next / rr;
        p = &r + &(&p * beta);
        rr = rr_next;
        iterations += 1;
        converged = rr.sqrt() <= target;
    }
    let x_opt = lap_pinv(g)?.pinv.dot(&b);
    Ok(SolveReport {
        rel_error_l: l_norm_error(&l, &x, &x_opt),
        x,
        iterations,
        eps_requested: eps,
        converged,
    })
}

/// Preconditioned conjugate gradient, where each preconditioner
/// application solves the sparsifier's Laplacian system exactly by dense
/// factorization. Errors if the preconditioner graph is disconnected.
pub fn solve_pcg(
    g: &Graph,
    b: &Array1<f64>,
    eps: f64,
    max_iter: usize,
    precond: &Graph,
) -> Result<SolveReport> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter("pcg needs eps > 0".into()));
    }
    if precond.vertex_count() != g.vertex_count() {
        return Err(Error::DimensionMismatch {
            expected: g.vertex_count(),
            got: precond.vertex_count(),
        });
    }
    if !precond.is_connected() {
        return Err(Error::DisconnectedPreconditioner);
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let l = laplacian(g, LaplacianKind::Combinatorial)?;
    let eig = eig_dense(&l, 1e-8)?;
    let n = g.vertex_count();
    let lambda2 = eig.values[1];
    let lambda_max = eig.values[n - 1];
    let b = project_to_zero_sum(b);
    let b_norm = b.dot(&b).sqrt();
    let target = eps * b_norm * (lambda2 / lambda_max).sqrt();

    let m_inv = lap_pinv(precond)?;
    let apply_precond = |r: &Array1<f64>| project_to_zero_sum(&m_inv.pinv.dot(r));

    let mut x = Array1::<f64>::zeros(n);
    let mut r = b.clone();
    let mut z = apply_precond(&r);
    let mut p = z.clone();
    let mut rz = r.dot(&z);
    let mut iterations = 0;
    let mut converged = r.dot(&r).sqrt() <= target;
    while !converged && iterations < max_iter {
        let lp = l.dot(&p);
        let alpha = rz / p.dot(&lp);
        x = &x + &(&p * alpha);
        r = &r - &(&lp * alpha);
        x = project_to_zero_sum(&x);
        r = project_to_zero_sum(&r);
        z = apply_precond(&r);
        let rz_next = r.dot(&z);
        let beta = rz_next / rz;
        p = &z + &(&p * beta);
        rz = rz_next;
        iterations += 1;
        converged = r.dot(&r).sqrt() <= target;
    }
    let x_opt = lap_pinv(g)?.pinv.dot(&b);
    Ok(SolveReport {
        rel_error_l: l_norm_error(&l, &x, &x_opt),
        x,
        iterations,
        eps_requested: eps,
        converged,
    })
}

/// Labeled vertices with classes in 0..num_classes.
#[derive(Debug, Clone)]
pub struct LabelSet {
    labeled: Vec<(usize, usize)>,
    num_classes: usize,
}

impl LabelSet {
    pub fn new(n: usize, labeled: &[(usize, usize)], num_classes: usize) -> Result<Self> {
        if labeled.is_empty() {
            return Err(Error::NoLabels);
        }
        let mut seen_class = vec![false; num_classes];
        for &(v, c) in labeled {
            if v >= n {
                return Err(Error::EndpointOutOfRange { vertex: v, n });
            }
            if c >= num_classes {
                return Err(Error::InvalidParameter(format!(
                    "class {c} out of range for {num_classes} classes"
                )));
            }
            seen_class[c] = true;
        }
        if !seen_class.iter().all(|&s| s) {
            return Err(Error::InvalidParameter(
                "every requested class needs at least one labeled vertex".into(),
            ));
        }
        Ok(LabelSet {
            labeled: labeled.to_vec(),
            num_classes,
        })
    }

    pub fn labeled(&self) -> &[(usize, usize)] {
        &self.labeled
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    /// +-1 one-vs-rest indicator for `class_j`, zero on unlabeled vertices.
    pub fn signed_indicator(&self, n: usize, class_j: usize) -> Array1<f64> {
        let mut s = Array1::<f64>::zeros(n);
        for &(v, c) in &self.labeled {
            s[v] = if c == class_j { 1.0 } else { -1.0 };
        }
        s
    }
}

/// Soft-label scores from the regularized cut system
/// `(D_S + L) y = s`, with `s` the +-1 class indicator on labeled
/// vertices and `D_S` the diagonal of `|s|`.
pub fn ssl_joachims(g: &Graph, labels: &LabelSet, class_j: usize) -> Result<Array1<f64>> {
    let n = g.vertex_count();
    let s = labels.signed_indicator(n, class_j);
    let l = laplacian(g, LaplacianKind::Combinatorial)?;
    let mut lhs = l;
    for i in 0..n {
        lhs[[i, i]] += s[i].abs();
    }
    linalg::solve_linear(&lhs, &s)
}

/// Harmonic extension with hard labels: classes {0, 1} are pinned at +1
/// and -1, and every unlabeled value solves
/// `L_UU f_U = -L_UL f_L`, making it the weighted average of its
/// neighbors. Every component must contain a label.
pub fn ssl_zgl(g: &Graph, labels: &LabelSet) -> Result<Array1<f64>> {
    if labels.num_classes() > 2 {
        return Err(Error::InvalidParameter(
            "harmonic labels are binary: classes must be {0} or {0, 1}".into(),
        ));
    }
    let n = g.vertex_count();
    let mut fixed: Vec<Option<f64>> = vec![None; n];
    for &(v, c) in labels.labeled() {
        fixed[v] = Some(if c == 0 { 1.0 } else { -1.0 });
    }
    let comp = connected_components(g);
    let ncomp = comp.iter().max().map(|&c| c + 1).unwrap_or(0);
    let mut has_label = vec![false; ncomp];
    for v in 0..n {
        if fixed[v].is_some() {
            has_label[comp[v]] = true;
        }
    }
    if !has_label.iter().all(|&h| h) {
        return Err(Error::UnlabeledComponent);
    }

    let unlabeled: Vec<usize> = (0..n).filter(|&v| fixed[v].is_none()).collect();
    let mut f = Array1::<f64>::zeros(n);
    for v in 0..n {
        if let Some(val) = fixed[v] {
            f[v] = val;
        }
    }
    if unlabeled.is_empty() {
        return Ok(f);
    }
    let l = laplacian(g, LaplacianKind::Combinatorial)?;
    let k = unlabeled.len();
    let mut luu = Array2::<f64>::zeros((k, k));
    let mut rhs = Array1::<f64>::zeros(k);
    for (i, &u) in unlabeled.iter().enumerate() {
        for (j, &v) in unlabeled.iter().enumerate() {
            luu[[i, j]] = l[[u, v]];
        }
        let mut acc = 0.0;
        for &(v, w) in g.neighbors(u) {
            if let Some(val) = fixed[v] {
                acc += w * val;
            }
        }
        rhs[i] = acc; // = -L_UL f_L
    }
    let fu = linalg::solve_linear(&luu, &rhs)?;
    for (i, &u) in unlabeled.iter().enumerate() {
        f[u] = fu[i];
    }
    Ok(f)
}

/// Normalized label spreading: the fixed point
/// `Y* = (1 - alpha) (I - alpha W~)^{-1} S` of the iteration
/// `Y(t+1) = alpha W~ Y(t) + (1 - alpha) S`, with
/// `W~ = D^{-1/2} A D^{-1/2}` and `S` the n x c one-hot label matrix.
///
/// Algebraically equivalent form: with `alpha' = (1 - alpha)/alpha`,
/// `Y* = alpha' D^{1/2} (L + alpha' D)^{-1} D^{1/2} S`.
pub fn ssl_zhou(g: &Graph, labels: &LabelSet, alpha: f64) -> Result<Array2<f64>> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "spreading alpha must be in (0, 1), got {alpha}"
        )));
    }
    let n = g.vertex_count();
    let c = labels.num_classes();
    let wt = normalized_adjacency(g)?;
    let mut lhs = &wt * (-alpha);
    for i in 0..n {
        lhs[[i, i]] += 1.0;
    }
    let s = one_hot(labels, n);
    let mut y = Array2::<f64>::zeros((n, c));
    for class in 0..c {
        let col = s.column(class).to_owned();
        let sol = linalg::solve_linear(&lhs, &(&col * (1.0 - alpha)))?;
        y.column_mut(class).assign(&sol);
    }
    Ok(y)
}

/// One step of the label-spreading iteration, exposed for fixpoint tests.
pub fn ssl_zhou_iterate(
    g: &Graph,
    labels: &LabelSet,
    alpha: f64,
    y: &Array2<f64>,
) -> Result<Array2<f64>> {
    let wt = normalized_adjacency(g)?;
    let s = one_hot(labels, g.vertex_count());
    Ok(&wt.dot(y) * alpha + &(&s * (1.0 - alpha)))
}

fn normalized_adjacency(g: &Graph) -> Result<Array2<f64>> {
    let n = g.vertex_count();
    for v in 0..n {
        if g.degree(v) <= 0.0 {
            return Err(Error::IsolatedVertex(v));
        }
    }
    let mut wt = Array2::<f64>::zeros((n, n));
    for e in g.edges() {
        let s = e.weight / (g.degree(e.u) * g.degree(e.v)).sqrt();
        wt[[e.u, e.v]] = s;
        wt[[e.v, e.u]] = s;
    }
    Ok(wt)
}

fn one_hot(labels: &LabelSet, n: usize) -> Array2<f64> {
    let mut s = Array2::<f64>::zeros((n, labels.num_classes()));
    for &(v, c) in labels.labeled() {
        s[[v, c]] = 1.0;
    }
    s
}
