//! Weighted undirected simple graphs, generators, and cut objectives.
//!
//! Graphs are immutable after construction: dense 0-based vertex ids, at
//! most one edge per unordered pair, strictly positive weights, no
//! self-loops. Parallel resistors are modeled by weights, not multi-edges,
//! which keeps every Laplacian definition canonical. Degrees and volumes
//! are weighted throughout.

use std::collections::{HashSet, VecDeque};

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

/// Immutable weighted undirected simple graph.
///
/// Edges are stored canonically (`u < v`, sorted) alongside a
/// neighbor-indexed adjacency permitting O(deg) iteration.
#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<(usize, f64)>>,
    degrees: Vec<f64>,
}

impl Graph {
    /// Builds a graph from an edge list, validating every invariant.
    pub fn new(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "graph needs at least one vertex".into(),
            ));
        }
        let mut canonical = Vec::with_capacity(edges.len());
        let mut seen = HashSet::with_capacity(edges.len());
        for &(u, v, w) in edges {
            if u >= n {
                return Err(Error::EndpointOutOfRange { vertex: u, n });
            }
            if v >= n {
                return Err(Error::EndpointOutOfRange { vertex: v, n });
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::NonPositiveWeight { u, v, weight: w });
            }
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                return Err(Error::DuplicateEdge(key.0, key.1));
            }
            canonical.push(Edge {
                u: key.0,
                v: key.1,
                weight: w,
            });
        }
        canonical.sort_by(|a, b| (a.u, a.v).cmp(&(b.u, b.v)));

        let mut adjacency = vec![Vec::new(); n];
        let mut degrees = vec![0.0; n];
        for e in &canonical {
            adjacency[e.u].push((e.v, e.weight));
            adjacency[e.v].push((e.u, e.weight));
            degrees[e.u] += e.weight;
            degrees[e.v] += e.weight;
        }
        for nbrs in &mut adjacency {
            nbrs.sort_by_key(|&(v, _)| v);
        }
        Ok(Graph {
            n,
            edges: canonical,
            adjacency,
            degrees,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Canonical edge list: `u < v`, sorted lexicographically.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.adjacency[v]
    }

    /// Weighted degree of `v`: sum of incident edge weights.
    pub fn degree(&self, v: usize) -> f64 {
        self.degrees[v]
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    /// Vol(G) = sum of weighted degrees = twice the total edge weight.
    pub fn volume(&self) -> f64 {
        self.degrees.iter().sum()
    }

    pub fn min_degree(&self) -> f64 {
        self.degrees.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Weight of the edge between `u` and `v`, if present.
    pub fn edge_weight(&self, u: usize, v: usize) -> Option<f64> {
        self.adjacency[u]
            .binary_search_by_key(&v, |&(w, _)| w)
            .ok()
            .map(|idx| self.adjacency[u][idx].1)
    }

    pub fn adjacency_matrix(&self) -> Array2<f64> {
        let mut a = Array2::<f64>::zeros((self.n, self.n));
        for e in &self.edges {
            a[[e.u, e.v]] = e.weight;
            a[[e.v, e.u]] = e.weight;
        }
        a
    }

    pub fn is_connected(&self) -> bool {
        let labels = connected_components(self);
        labels.iter().all(|&c| c == 0)
    }
}

/// Which Laplacian to form from a graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaplacianKind {
    /// L = D - A.
    Combinatorial,
    /// I - D^{-1/2} A D^{-1/2}; eigenvalues in [0, 2].
    NormalizedSymmetric,
    /// I - D^{-1} A; same spectrum as the symmetric kind.
    RandomWalk,
}

/// Dense Laplacian of the requested kind.
///
/// Normalized kinds reject isolated vertices, whose degree scaling is
/// undefined.
pub fn laplacian(g: &Graph, kind: LaplacianKind) -> Result<Array2<f64>> {
    let n = g.vertex_count();
    if kind != LaplacianKind::Combinatorial {
        for v in 0..n {
            if g.degree(v) <= 0.0 {
                return Err(Error::IsolatedVertex(v));
            }
        }
    }
    let mut l = Array2::<f64>::zeros((n, n));
    match kind {
        LaplacianKind::Combinatorial => {
            for v in 0..n {
                l[[v, v]] = g.degree(v);
            }
            for e in g.edges() {
                l[[e.u, e.v]] = -e.weight;
                l[[e.v, e.u]] = -e.weight;
            }
        }
        LaplacianKind::NormalizedSymmetric => {
            for v in 0..n {
                l[[v, v]] = 1.0;
            }
            for e in g.edges() {
                let s = -e.weight / (g.degree(e.u) * g.degree(e.v)).sqrt();
                l[[e.u, e.v]] = s;
                l[[e.v, e.u]] = s;
            }
        }
        LaplacianKind::RandomWalk => {
            for v in 0..n {
                l[[v, v]] = 1.0;
            }
            for e in g.edges() {
                l[[e.u, e.v]] = -e.weight / g.degree(e.u);
                l[[e.v, e.u]] = -e.weight / g.degree(e.v);
            }
        }
    }
    Ok(l)
}

/// A set of vertices, used as one side of a cut.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeSet {
    members: Vec<usize>,
    mask: Vec<bool>,
}

impl NodeSet {
    /// Builds a vertex set for a graph on `n` vertices; ids are deduplicated
    /// and must be in range.
    pub fn new(n: usize, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut mask = vec![false; n];
        for v in members {
            if v >= n {
                return Err(Error::EndpointOutOfRange { vertex: v, n });
            }
            mask[v] = true;
        }
        let members = (0..n).filter(|&v| mask[v]).collect();
        Ok(NodeSet { members, mask })
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn contains(&self, v: usize) -> bool {
        self.mask[v]
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn ground_size(&self) -> usize {
        self.mask.len()
    }

    pub fn complement(&self) -> NodeSet {
        let mask: Vec<bool> = self.mask.iter().map(|&b| !b).collect();
        let members = (0..mask.len()).filter(|&v| mask[v]).collect();
        NodeSet { members, mask }
    }

    /// True when the set is neither empty nor the full vertex set.
    pub fn is_proper(&self) -> bool {
        !self.members.is_empty() && self.members.len() < self.mask.len()
    }
}

/// The quotient-cut objectives of a vertex set, all computed in one pass.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct PartitionScore {
    /// Total weight of edges crossing the cut, each counted once.
    pub cut: f64,
    pub vol_s: f64,
    pub vol_sbar: f64,
    /// cut / min(|S|, |S̄|).
    pub expansion_h: f64,
    /// cut * n / (|S| * |S̄|).
    pub sparsity: f64,
    /// cut / min(vol S, vol S̄).
    pub conductance_phi: f64,
    /// cut / vol S + cut / vol S̄.
    pub ncut: f64,
}

/// Evaluates every quotient-cut objective for a proper nonempty subset.
pub fn partition_quality(g: &Graph, s: &NodeSet) -> Result<PartitionScore> {
    if s.ground_size() != g.vertex_count() {
        return Err(Error::DimensionMismatch {
            expected: g.vertex_count(),
            got: s.ground_size(),
        });
    }
    if !s.is_proper() {
        return Err(Error::EmptyOrFullSet);
    }
    let mut cut = 0.0;
    for e in g.edges() {
        if s.contains(e.u) != s.contains(e.v) {
            cut += e.weight;
        }
    }
    let vol_s: f64 = s.members().iter().map(|&v| g.degree(v)).sum();
    let vol_sbar = g.volume() - vol_s;
    let size_s = s.len() as f64;
    let size_sbar = (g.vertex_count() - s.len()) as f64;
    Ok(PartitionScore {
        cut,
        vol_s,
        vol_sbar,
        expansion_h: cut / size_s.min(size_sbar),
        sparsity: cut * g.vertex_count() as f64 / (size_s * size_sbar),
        conductance_phi: cut / vol_s.min(vol_sbar),
        ncut: cut / vol_s + cut / vol_sbar,
    })
}

/// Component labels per vertex: 0..c-1, breadth-first from the lowest
/// unvisited id.
pub fn connected_components(g: &Graph) -> Vec<usize> {
    let n = g.vertex_count();
    let mut labels = vec![usize::MAX; n];
    let mut next = 0;
    for start in 0..n {
        if labels[start] != usize::MAX {
            continue;
        }
        let mut queue = VecDeque::from([start]);
        labels[start] = next;
        while let Some(v) = queue.pop_front() {
            for &(u, _) in g.neighbors(v) {
                if labels[u] == usize::MAX {
                    labels[u] = next;
                    queue.push_back(u);
                }
            }
        }
        next += 1;
    }
    labels
}

/// Deterministic graph families, all unweighted (w = 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Path on `n >= 2` vertices.
    Path(usize),
    /// Cycle on `n >= 3` vertices.
    Cycle(usize),
    /// rows x cols grid, both >= 1 with at least 2 vertices total.
    Grid2d(usize, usize),
    /// Complete graph on `n >= 2` vertices.
    Complete(usize),
    /// Central vertex 0 plus `n - 1` leaves; `n >= 2` total vertices.
    Star(usize),
    /// Hypercube on 2^dim vertices, `dim >= 1`.
    Hypercube(usize),
    /// Complete binary tree on `n >= 2` vertices; children of i are 2i+1, 2i+2.
    BinaryTree(usize),
    /// Two K_k cliques (`k >= 2`) joined by a single bridge edge.
    Dumbbell(usize),
    /// K_k (`k >= 2`) with a path of `len >= 1` extra vertices attached.
    Lollipop(usize, usize),
}

pub fn gen_family(family: Family) -> Result<Graph> {
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    let n;
    match family {
        Family::Path(len) => {
            if len < 2 {
                return Err(min_size("path", "n >= 2", len));
            }
            n = len;
            for i in 0..len - 1 {
                edges.push((i, i + 1, 1.0));
            }
        }
        Family::Cycle(len) => {
            if len < 3 {
                return Err(min_size("cycle", "n >= 3", len));
            }
            n = len;
            for i in 0..len {
                edges.push((i, (i + 1) % len, 1.0));
            }
        }
        Family::Grid2d(rows, cols) => {
            if rows == 0 || cols == 0 || rows * cols < 2 {
                return Err(min_size("grid2d", "rows, cols >= 1 and >= 2 cells", rows * cols));
            }
            n = rows * cols;
            let at = |r: usize, c: usize| r * cols + c;
            for r in 0..rows {
                for c in 0..cols {
                    if c + 1 < cols {
                        edges.push((at(r, c), at(r, c + 1), 1.0));
                    }
                    if r + 1 < rows {
                        edges.push((at(r, c), at(r + 1, c), 1.0));
                    }
                }
            }
        }
        Family::Complete(k) => {
            if k < 2 {
                return Err(min_size("complete", "n >= 2", k));
            }
            n = k;
            for u in 0..k {
                for v in (u + 1)..k {
                    edges.push((u, v, 1.0));
                }
            }
        }
        Family::Star(k) => {
            if k < 2 {
                return Err(min_size("star", "n >= 2", k));
            }
            n = k;
            for leaf in 1..k {
                edges.push((0, leaf, 1.0));
            }
        }
        Family::Hypercube(dim) => {
            if dim == 0 {
                return Err(min_size("hypercube", "dim >= 1", dim));
            }
            n = 1 << dim;
            for v in 0..n {
                for bit in 0..dim {
                    let u = v ^ (1 << bit);
                    if v < u {
                        edges.push((v, u, 1.0));
                    }
                }
            }
        }
        Family::BinaryTree(len) => {
            if len < 2 {
                return Err(min_size("binary_tree", "n >= 2", len));
            }
            n = len;
            for i in 0..len {
                for child in [2 * i + 1, 2 * i + 2] {
                    if child < len {
                        edges.push((i, child, 1.0));
                    }
                }
            }
        }
        Family::Dumbbell(k) => {
            if k < 2 {
                return Err(min_size("dumbbell", "k >= 2", k));
            }
            n = 2 * k;
            for u in 0..k {
                for v in (u + 1)..k {
                    edges.push((u, v, 1.0));
                    edges.push((k + u, k + v, 1.0));
                }
            }
            // Bridge between the last vertex of the first clique and the
            // first vertex of the second.
            edges.push((k - 1, k, 1.0));
        }
        Family::Lollipop(k, len) => {
            if k < 2 {
                return Err(min_size("lollipop", "k >= 2", k));
            }
            if len < 1 {
                return Err(min_size("lollipop", "stem length >= 1", len));
            }
            n = k + len;
            for u in 0..k {
                for v in (u + 1)..k {
                    edges.push((u, v, 1.0));
                }
            }
            for i in 0..len {
                let prev = if i == 0 { k - 1 } else { k + i - 1 };
                edges.push((prev, k + i, 1.0));
            }
        }
    }
    Graph::new(n, &edges)
}

fn min_size(family: &'static str, requirement: &'static str, given: usize) -> Error {
    Error::SizeBelowMinimum {
        family,
        requirement,
        given: given.to_string(),
    }
}

/// Seeded random graph models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RandomModel {
    /// Erdos–Renyi: each pair independently with probability `p`.
    Gnp { n: usize, p: f64 },
    /// Uniform-ish d-regular graph via the pairing model, restarted on any
    /// self-loop or duplicate edge.
    DRegular { n: usize, d: usize },
    /// Cycle plus a random perfect matching avoiding ring edges; 3-regular.
    RingPlusMatching { n: usize },
}

const PAIRING_RESTART_CAP: usize = 1000;

/// Generates a random graph, bit-for-bit reproducible per seed.
pub fn gen_random(model: RandomModel, seed: u64) -> Result<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match model {
        RandomModel::Gnp { n, p } => {
            if n == 0 {
                return Err(min_size("gnp", "n >= 1", n));
            }
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InfeasibleParams(format!(
                    "gnp probability {p} outside [0, 1]"
                )));
            }
            let mut edges = Vec::new();
            for u in 0..n {
                for v in (u + 1)..n {
                    if rng.random_bool(p) {
                        edges.push((u, v, 1.0));
                    }
                }
            }
            Graph::new(n, &edges)
        }
        RandomModel::DRegular { n, d } => {
            if d >= n {
                return Err(Error::InfeasibleParams(format!(
                    "d_regular needs d < n, got d={d}, n={n}"
                )));
            }
            if n * d % 2 != 0 {
                return Err(Error::InfeasibleParams(format!(
                    "d_regular needs n*d even, got n={n}, d={d}"
                )));
            }
            if d == 0 {
                return Graph::new(n, &[]);
            }
            'restart: for _ in 0..PAIRING_RESTART_CAP {
                let mut stubs: Vec<usize> = (0..n * d).map(|i| i / d).collect();
                stubs.shuffle(&mut rng);
                let mut seen = HashSet::new();
                let mut edges = Vec::with_capacity(n * d / 2);
                for pair in stubs.chunks_exact(2) {
                    let (u, v) = (pair[0], pair[1]);
                    if u == v {
                        continue 'restart;
                    }
                    if !seen.insert((u.min(v), u.max(v))) {
                        continue 'restart;
                    }
                    edges.push((u, v, 1.0));
                }
                return Graph::new(n, &edges);
            }
            Err(Error::RetryCapExceeded(PAIRING_RESTART_CAP))
        }
        RandomModel::RingPlusMatching { n } => {
            if n < 4 || n % 2 != 0 {
                return Err(Error::InfeasibleParams(format!(
                    "ring_plus_matching needs even n >= 4, got {n}"
                )));
            }
            'outer: for _ in 0..PAIRING_RESTART_CAP {
                let mut perm: Vec<usize> = (0..n).collect();
                perm.shuffle(&mut rng);
                let mut edges: Vec<(usize, usize, f64)> =
                    (0..n).map(|i| (i, (i + 1) % n, 1.0)).collect();
                let ring: HashSet<(usize, usize)> = (0..n)
                    .map(|i| {
                        let j = (i + 1) % n;
                        (i.min(j), i.max(j))
                    })
                    .collect();
                for pair in perm.chunks_exact(2) {
                    let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
                    if ring.contains(&(u, v)) {
                        continue 'outer;
                    }
                    edges.push((u, v, 1.0));
                }
                return Graph::new(n, &edges);
            }
            Err(Error::RetryCapExceeded(PAIRING_RESTART_CAP))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn triangle_has_expected_degrees() {
        let g = Graph::new(3, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap();
        assert_eq!(g.degrees(), &[2.0, 2.0, 2.0]);
        assert_abs_diff_eq!(g.volume(), 6.0);
    }

    #[test]
    fn weighted_edge_volume() {
        let g = Graph::new(2, &[(0, 1, 3.5)]).unwrap();
        assert_abs_diff_eq!(g.volume(), 7.0);
    }

    #[test]
    fn rejects_invalid_edges() {
        assert!(matches!(
            Graph::new(2, &[(0, 0, 1.0)]),
            Err(Error::SelfLoop(0))
        ));
        assert!(matches!(
            Graph::new(2, &[(0, 1, 1.0), (1, 0, 2.0)]),
            Err(Error::DuplicateEdge(0, 1))
        ));
        assert!(matches!(
            Graph::new(2, &[(0, 3, 1.0)]),
            Err(Error::EndpointOutOfRange { vertex: 3, n: 2 })
        ));
        assert!(matches!(
            Graph::new(2, &[(0, 1, 0.0)]),
            Err(Error::NonPositiveWeight { .. })
        ));
        assert!(matches!(
            Graph::new(2, &[(0, 1, -2.0)]),
            Err(Error::NonPositiveWeight { .. })
        ));
    }

    #[test]
    fn laplacian_small_cases() {
        let k2 = gen_family(Family::Complete(2)).unwrap();
        let l = laplacian(&k2, LaplacianKind::Combinatorial).unwrap();
        assert_eq!(l, ndarray::array![[1.0, -1.0], [-1.0, 1.0]]);

        let p3 = gen_family(Family::Path(3)).unwrap();
        let l = laplacian(&p3, LaplacianKind::Combinatorial).unwrap();
        assert_eq!(
            l,
            ndarray::array![[1.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 1.0]]
        );

        let tri = gen_family(Family::Complete(3)).unwrap();
        let l = laplacian(&tri, LaplacianKind::NormalizedSymmetric).unwrap();
        for i in 0..3 {
            assert_abs_diff_eq!(l[[i, i]], 1.0, epsilon = 1e-15);
            for j in 0..3 {
                if i != j {
                    assert_abs_diff_eq!(l[[i, j]], -0.5, epsilon = 1e-15);
                }
            }
        }
    }

    #[test]
    fn normalized_laplacian_rejects_isolated_vertex() {
        let g = Graph::new(3, &[(0, 1, 1.0)]).unwrap();
        assert!(matches!(
            laplacian(&g, LaplacianKind::NormalizedSymmetric),
            Err(Error::IsolatedVertex(2))
        ));
    }

    #[test]
    fn families_have_documented_shapes() {
        let p4 = gen_family(Family::Path(4)).unwrap();
        assert_eq!(p4.edge_count(), 3);
        assert_eq!(p4.degrees(), &[1.0, 2.0, 2.0, 1.0]);

        let h3 = gen_family(Family::Hypercube(3)).unwrap();
        assert_eq!(h3.vertex_count(), 8);
        assert_eq!(h3.edge_count(), 12);
        assert!(h3.degrees().iter().all(|&d| d == 3.0));

        let db = gen_family(Family::Dumbbell(5)).unwrap();
        assert_eq!(db.edge_count(), 21);
        let lp = gen_family(Family::Lollipop(6, 6)).unwrap();
        assert_eq!(lp.vertex_count(), 12);
        assert_eq!(lp.edge_count(), 15 + 6);

        let bt = gen_family(Family::BinaryTree(7)).unwrap();
        assert_eq!(bt.edge_count(), 6);
        assert!(bt.is_connected());

        assert!(gen_family(Family::Cycle(2)).is_err());
        assert!(gen_family(Family::Path(1)).is_err());
    }

    #[test]
    fn partition_scores_k4_dumbbell_path() {
        let k4 = gen_family(Family::Complete(4)).unwrap();
        let s = NodeSet::new(4, [0, 1]).unwrap();
        let score = partition_quality(&k4, &s).unwrap();
        assert_abs_diff_eq!(score.cut, 4.0);
        assert_abs_diff_eq!(score.vol_s, 6.0);
        assert_abs_diff_eq!(score.conductance_phi, 4.0 / 6.0, epsilon = 1e-15);

        let db = gen_family(Family::Dumbbell(5)).unwrap();
        let side = NodeSet::new(10, 0..5).unwrap();
        let score = partition_quality(&db, &side).unwrap();
        assert_abs_diff_eq!(score.cut, 1.0);
        assert_abs_diff_eq!(score.conductance_phi, 1.0 / 21.0, epsilon = 1e-15);

        let p4 = gen_family(Family::Path(4)).unwrap();
        let s = NodeSet::new(4, [0, 1]).unwrap();
        let score = partition_quality(&p4, &s).unwrap();
        assert_abs_diff_eq!(score.cut, 1.0);
        assert_abs_diff_eq!(score.expansion_h, 0.5);
        assert_abs_diff_eq!(score.conductance_phi, 1.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn partition_rejects_improper_sets() {
        let k4 = gen_family(Family::Complete(4)).unwrap();
        let empty = NodeSet::new(4, []).unwrap();
        assert!(matches!(
            partition_quality(&k4, &empty),
            Err(Error::EmptyOrFullSet)
        ));
        let full = NodeSet::new(4, 0..4).unwrap();
        assert!(matches!(
            partition_quality(&k4, &full),
            Err(Error::EmptyOrFullSet)
        ));
    }

    #[test]
    fn partition_is_complement_symmetric() {
        let g = gen_random(RandomModel::Gnp { n: 24, p: 0.3 }, 7).unwrap();
        let s = NodeSet::new(24, 0..9).unwrap();
        let a = partition_quality(&g, &s).unwrap();
        let b = partition_quality(&g, &s.complement()).unwrap();
        assert_abs_diff_eq!(a.cut, b.cut, epsilon = 1e-12);
        assert_abs_diff_eq!(a.sparsity, b.sparsity, epsilon = 1e-12);
        assert_abs_diff_eq!(a.conductance_phi, b.conductance_phi, epsilon = 1e-12);
        assert_abs_diff_eq!(a.ncut, b.ncut, epsilon = 1e-12);
        assert_abs_diff_eq!(a.expansion_h, b.expansion_h, epsilon = 1e-12);
    }

    #[test]
    fn regular_conductance_equals_expansion_over_d() {
        let g = gen_random(RandomModel::DRegular { n: 16, d: 3 }, 5).unwrap();
        let s = NodeSet::new(16, 0..5).unwrap();
        let score = partition_quality(&g, &s).unwrap();
        assert_abs_diff_eq!(
            score.conductance_phi,
            score.expansion_h / 3.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn components_bfs_labels() {
        let tri = gen_family(Family::Complete(3)).unwrap();
        assert_eq!(connected_components(&tri), vec![0, 0, 0]);

        let two = Graph::new(4, &[(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        assert_eq!(connected_components(&two), vec![0, 0, 1, 1]);

        let iso = gen_random(RandomModel::Gnp { n: 50, p: 0.0 }, 0).unwrap();
        let labels = connected_components(&iso);
        assert_eq!(labels, (0..50).collect::<Vec<_>>());
    }

    #[test]
    fn gnp_extremes() {
        let k5 = gen_random(RandomModel::Gnp { n: 5, p: 1.0 }, 99).unwrap();
        assert_eq!(k5.edge_count(), 10);
        assert!(matches!(
            gen_random(RandomModel::DRegular { n: 5, d: 3 }, 0),
            Err(Error::InfeasibleParams(_))
        ));
    }

    #[test]
    fn gnp_edge_count_within_binomial_bounds() {
        // Independent oracle: Binomial(C(200,2), 0.1) mean and std.
        let trials = C2_200 as f64;
        let mean = trials * 0.1;
        let sd = (trials * 0.1 * 0.9).sqrt();
        for seed in 0..3 {
            let g = gen_random(RandomModel::Gnp { n: 200, p: 0.1 }, seed).unwrap();
            let m = g.edge_count() as f64;
            assert!(
                (m - mean).abs() <= 4.0 * sd,
                "edge count {m} outside 4 sigma of {mean}"
            );
        }
    }
    const C2_200: usize = 200 * 199 / 2;

    #[test]
    fn random_generators_are_seed_deterministic() {
        for model in [
            RandomModel::Gnp { n: 40, p: 0.2 },
            RandomModel::DRegular { n: 20, d: 3 },
            RandomModel::RingPlusMatching { n: 20 },
        ] {
            let a = gen_random(model, 123).unwrap();
            let b = gen_random(model, 123).unwrap();
            assert_eq!(a.edges(), b.edges());
        }
    }

    #[test]
    fn d_regular_is_regular_and_simple() {
        let g = gen_random(RandomModel::DRegular { n: 64, d: 3 }, 11).unwrap();
        assert!(g.degrees().iter().all(|&d| d == 3.0));
        assert_eq!(g.edge_count(), 64 * 3 / 2);
    }

    #[test]
    fn ring_plus_matching_is_cubic() {
        let g = gen_random(RandomModel::RingPlusMatching { n: 24 }, 3).unwrap();
        assert!(g.degrees().iter().all(|&d| d == 3.0));
    }

    #[test]
    fn degree_is_neighbor_weight_sum() {
        let g = gen_random(RandomModel::Gnp { n: 30, p: 0.25 }, 4).unwrap();
        for v in 0..30 {
            let s: f64 = g.neighbors(v).iter().map(|&(_, w)| w).sum();
            assert_abs_diff_eq!(s, g.degree(v), epsilon = 1e-12);
        }
        assert_abs_diff_eq!(
            g.volume(),
            2.0 * g.edges().iter().map(|e| e.weight).sum::<f64>(),
            epsilon = 1e-12
        );
    }
}
