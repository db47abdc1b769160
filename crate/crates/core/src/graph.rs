//! Weighted undirected graphs with the cut/volume/conductance primitives
//! shared by every algorithm in this crate.

use alloc::vec;
use alloc::vec::Vec;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("self-loop at node {0}")]
    SelfLoop(usize),
    #[error("node id {id} out of range for graph of {n} nodes")]
    NodeOutOfRange { id: usize, n: usize },
    #[error("edge ({u}, {v}) has non-finite or negative weight {w}")]
    BadWeight { u: usize, v: usize, w: f64 },
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("node set is empty or has zero volume")]
    ZeroVolume,
    #[error("partition has unassigned nodes")]
    NotFullyAssigned,
    #[error("part index {part} out of range for k = {k}")]
    PartOutOfRange { part: usize, k: usize },
    #[error("partition covers {got} nodes, graph has {expected}")]
    SizeMismatch { got: usize, expected: usize },
}

/// A single undirected edge, stored canonically with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

/// Immutable undirected weighted graph in adjacency form.
///
/// Node ids are dense in `[0, n)`. Edges are stored once (canonical `u < v`)
/// and mirrored into a CSR adjacency so both endpoints can iterate their
/// incident edges. Zero-weight edges are dropped at construction; self-loops
/// and duplicates are rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
    adj_offsets: Vec<usize>,
    adj: Vec<(usize, f64)>,
    degree: Vec<f64>,
}

impl WeightedGraph {
    pub fn from_edges<I>(n: usize, raw: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut edges = Vec::new();
        for (u, v, w) in raw {
            if u >= n {
                return Err(GraphError::NodeOutOfRange { id: u, n });
            }
            if v >= n {
                return Err(GraphError::NodeOutOfRange { id: v, n });
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            if !w.is_finite() || w < 0.0 {
                return Err(GraphError::BadWeight { u, v, w });
            }
            if w == 0.0 {
                continue;
            }
            let (a, b) = if u < v { (u, v) } else { (v, u) };
            edges.push(Edge { u: a, v: b, w });
        }
        edges.sort_unstable_by(|e, f| (e.u, e.v).cmp(&(f.u, f.v)));
        for pair in edges.windows(2) {
            if pair[0].u == pair[1].u && pair[0].v == pair[1].v {
                return Err(GraphError::DuplicateEdge(pair[0].u, pair[0].v));
            }
        }

        let mut counts = vec![0usize; n];
        for e in &edges {
            counts[e.u] += 1;
            counts[e.v] += 1;
        }
        let mut adj_offsets = Vec::with_capacity(n + 1);
        let mut acc = 0;
        adj_offsets.push(0);
        for c in &counts {
            acc += c;
            adj_offsets.push(acc);
        }
        let mut cursor = adj_offsets.clone();
        let mut adj = vec![(0usize, 0.0f64); 2 * edges.len()];
        for e in &edges {
            adj[cursor[e.u]] = (e.v, e.w);
            cursor[e.u] += 1;
            adj[cursor[e.v]] = (e.u, e.w);
            cursor[e.v] += 1;
        }
        // Edges are sorted by (u, v), so each node's neighbor slice comes out
        // sorted as well; binary search in `edge_weight` relies on this.
        let mut degree = vec![0.0f64; n];
        for u in 0..n {
            let mut d = 0.0;
            for &(_, w) in &adj[adj_offsets[u]..adj_offsets[u + 1]] {
                d += w;
            }
            degree[u] = d;
        }

        Ok(Self {
            n,
            edges,
            adj_offsets,
            adj,
            degree,
        })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Neighbors of `u` with edge weights, sorted by neighbor id.
    pub fn neighbors(&self, u: usize) -> &[(usize, f64)] {
        &self.adj[self.adj_offsets[u]..self.adj_offsets[u + 1]]
    }

    /// Weighted degree d_u.
    pub fn degree(&self, u: usize) -> f64 {
        self.degree[u]
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degree
    }

    /// vol(V) = sum of all weighted degrees = twice the total edge weight.
    pub fn total_volume(&self) -> f64 {
        self.degree.iter().sum()
    }

    /// Weight of the edge {u, v}, or None if not present.
    pub fn edge_weight(&self, u: usize, v: usize) -> Option<f64> {
        if u >= self.n || v >= self.n {
            return None;
        }
        let nbrs = self.neighbors(u);
        nbrs.binary_search_by(|&(x, _)| x.cmp(&v))
            .ok()
            .map(|i| nbrs[i].1)
    }

    pub fn has_isolated_nodes(&self) -> bool {
        self.degree.iter().any(|&d| d == 0.0)
    }

    /// vol(S) for a membership mask of length n.
    pub fn set_volume(&self, in_set: &[bool]) -> f64 {
        self.degree
            .iter()
            .zip(in_set)
            .filter(|(_, &m)| m)
            .map(|(d, _)| d)
            .sum()
    }

    /// Connected components, as a per-node component index plus the count.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let mut comp = vec![usize::MAX; self.n];
        let mut count = 0;
        let mut stack = Vec::new();
        for start in 0..self.n {
            if comp[start] != usize::MAX {
                continue;
            }
            comp[start] = count;
            stack.push(start);
            while let Some(u) = stack.pop() {
                for &(v, _) in self.neighbors(u) {
                    if comp[v] == usize::MAX {
                        comp[v] = count;
                        stack.push(v);
                    }
                }
            }
            count += 1;
        }
        (comp, count)
    }
}

/// Total weight of edges crossing between S and its complement.
///
/// `in_set` is a membership mask of length n. Symmetric in S vs V∖S.
pub fn cut_weight(g: &WeightedGraph, in_set: &[bool]) -> f64 {
    debug_assert_eq!(in_set.len(), g.node_count());
    g.edges()
        .iter()
        .filter(|e| in_set[e.u] != in_set[e.v])
        .map(|e| e.w)
        .sum()
}

/// Conductance φ(S) = w(S, V∖S) / vol(S).
///
/// Errors when S is empty or has zero volume. The denominator is vol(S)
/// itself, not min(vol(S), vol(V∖S)); values can exceed 1 when S holds more
/// than half the volume.
pub fn conductance(g: &WeightedGraph, in_set: &[bool]) -> Result<f64, GraphError> {
    let vol = g.set_volume(in_set);
    if vol <= 0.0 {
        return Err(GraphError::ZeroVolume);
    }
    Ok(cut_weight(g, in_set) / vol)
}

/// A k-way node partition. Part ids are dense in `[0, k)`; nodes may be
/// left unassigned (algorithm outputs can be partial).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    k: usize,
    assignment: Vec<Option<usize>>,
}

impl Partition {
    pub fn new(k: usize, assignment: Vec<Option<usize>>) -> Result<Self, GraphError> {
        for part in assignment.iter().flatten() {
            if *part >= k {
                return Err(GraphError::PartOutOfRange { part: *part, k });
            }
        }
        Ok(Self { k, assignment })
    }

    /// Fully-assigned partition from plain labels.
    pub fn from_labels(k: usize, labels: impl IntoIterator<Item = usize>) -> Result<Self, GraphError> {
        Self::new(k, labels.into_iter().map(Some).collect())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn part_of(&self, node: usize) -> Option<usize> {
        self.assignment[node]
    }

    pub fn assignment(&self) -> &[Option<usize>] {
        &self.assignment
    }

    pub fn is_fully_assigned(&self) -> bool {
        self.assignment.iter().all(|a| a.is_some())
    }

    pub fn unassigned_count(&self) -> usize {
        self.assignment.iter().filter(|a| a.is_none()).count()
    }

    /// Membership mask for one part.
    pub fn part_mask(&self, part: usize) -> Vec<bool> {
        self.assignment.iter().map(|&a| a == Some(part)).collect()
    }

    /// Node count per part.
    pub fn part_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.k];
        for part in self.assignment.iter().flatten() {
            sizes[*part] += 1;
        }
        sizes
    }
}

/// max_i φ(A_i) over the parts of a fully-assigned partition.
///
/// This evaluates the k-way expansion objective on one given partition; it
/// does not search for the optimum.
pub fn partition_max_conductance(g: &WeightedGraph, p: &Partition) -> Result<f64, GraphError> {
    if p.len() != g.node_count() {
        return Err(GraphError::SizeMismatch {
            got: p.len(),
            expected: g.node_count(),
        });
    }
    if !p.is_fully_assigned() {
        return Err(GraphError::NotFullyAssigned);
    }
    let mut worst = 0.0f64;
    for part in 0..p.k() {
        let mask = p.part_mask(part);
        let phi = conductance(g, &mask)?;
        if phi > worst {
            worst = phi;
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;

    /// Complete graph on `n` nodes with unit weights, node ids offset by `base`.
    pub(crate) fn clique_edges(base: usize, n: usize) -> Vec<(usize, usize, f64)> {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                edges.push((base + i, base + j, 1.0));
            }
        }
        edges
    }

    fn two_cliques_bridge(side: usize) -> WeightedGraph {
        let mut edges = clique_edges(0, side);
        edges.extend(clique_edges(side, side));
        edges.push((0, side, 1.0));
        WeightedGraph::from_edges(2 * side, edges).unwrap()
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert_eq!(
            WeightedGraph::from_edges(4, [(3, 3, 1.0)]).unwrap_err(),
            GraphError::SelfLoop(3)
        );
        assert_eq!(
            WeightedGraph::from_edges(2, [(0, 2, 1.0)]).unwrap_err(),
            GraphError::NodeOutOfRange { id: 2, n: 2 }
        );
        assert!(matches!(
            WeightedGraph::from_edges(2, [(0, 1, -1.0)]).unwrap_err(),
            GraphError::BadWeight { .. }
        ));
        assert!(matches!(
            WeightedGraph::from_edges(2, [(0, 1, f64::NAN)]).unwrap_err(),
            GraphError::BadWeight { .. }
        ));
        assert_eq!(
            WeightedGraph::from_edges(3, [(0, 1, 1.0), (1, 0, 2.0)]).unwrap_err(),
            GraphError::DuplicateEdge(0, 1)
        );
    }

    #[test]
    fn zero_weight_edges_dropped() {
        let g = WeightedGraph::from_edges(3, [(0, 1, 0.0), (1, 2, 2.0)]).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.degree(0), 0.0);
        assert!(g.has_isolated_nodes());
    }

    #[test]
    fn degrees_and_volume_agree() {
        let g = WeightedGraph::from_edges(4, [(0, 1, 0.5), (1, 2, 1.5), (2, 3, 2.0), (0, 3, 1.0)])
            .unwrap();
        assert_eq!(g.degree(1), 2.0);
        let total_w: f64 = g.edges().iter().map(|e| e.w).sum();
        assert!((g.total_volume() - 2.0 * total_w).abs() < 1e-12);
        assert_eq!(g.edge_weight(1, 0), Some(0.5));
        assert_eq!(g.edge_weight(0, 2), None);
    }

    #[test]
    fn cut_weight_disjoint_triangles_is_zero() {
        let mut edges = clique_edges(0, 3);
        edges.extend(clique_edges(3, 3));
        let g = WeightedGraph::from_edges(6, edges).unwrap();
        let s = [true, true, true, false, false, false];
        assert_eq!(cut_weight(&g, &s), 0.0);
    }

    #[test]
    fn cut_weight_single_edge() {
        let g = WeightedGraph::from_edges(2, [(0, 1, 3.0)]).unwrap();
        assert_eq!(cut_weight(&g, &[true, false]), 3.0);
    }

    #[test]
    fn cut_weight_two_cliques_one_bridge() {
        let g = two_cliques_bridge(100);
        let mut s = vec![false; 200];
        for m in s.iter_mut().take(100) {
            *m = true;
        }
        assert_eq!(cut_weight(&g, &s), 1.0);
    }

    #[test]
    fn conductance_whole_graph_is_zero() {
        let g = two_cliques_bridge(4);
        let s = vec![true; 8];
        assert_eq!(conductance(&g, &s).unwrap(), 0.0);
    }

    #[test]
    fn conductance_single_vertex_of_k4() {
        let g = WeightedGraph::from_edges(4, clique_edges(0, 4)).unwrap();
        let s = [true, false, false, false];
        assert!((conductance(&g, &s).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn conductance_two_triangles_bridge() {
        // S = the triangle containing a bridge endpoint: vol(S) = 2+2+3 = 7, cut = 1.
        let g = two_cliques_bridge(3);
        let s = [true, true, true, false, false, false];
        assert!((conductance(&g, &s).unwrap() - 1.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn conductance_rejects_empty_and_zero_volume() {
        let g = two_cliques_bridge(3);
        assert_eq!(conductance(&g, &[false; 6]).unwrap_err(), GraphError::ZeroVolume);
        let h = WeightedGraph::from_edges(3, [(0, 1, 1.0)]).unwrap();
        // Node 2 is isolated: nonempty S but zero volume.
        assert_eq!(
            conductance(&h, &[false, false, true]).unwrap_err(),
            GraphError::ZeroVolume
        );
    }

    #[test]
    fn partition_validation() {
        assert!(Partition::from_labels(2, [0, 1, 1]).is_ok());
        assert!(matches!(
            Partition::from_labels(2, [0, 2]).unwrap_err(),
            GraphError::PartOutOfRange { part: 2, k: 2 }
        ));
        let p = Partition::new(2, vec![Some(0), None]).unwrap();
        assert!(!p.is_fully_assigned());
        assert_eq!(p.unassigned_count(), 1);
    }

    #[test]
    fn max_conductance_on_components_is_zero() {
        let mut edges = clique_edges(0, 3);
        edges.extend(clique_edges(3, 4));
        let g = WeightedGraph::from_edges(7, edges).unwrap();
        let p = Partition::from_labels(2, [0, 0, 0, 1, 1, 1, 1]).unwrap();
        assert_eq!(partition_max_conductance(&g, &p).unwrap(), 0.0);
    }

    #[test]
    fn max_conductance_two_cliques_bridge() {
        // Each side of K_20 + K_20 + bridge: vol = 20*19 + 1 = 381, cut = 1.
        let g = two_cliques_bridge(20);
        let labels = (0..40).map(|v| usize::from(v >= 20));
        let p = Partition::from_labels(2, labels).unwrap();
        let got = partition_max_conductance(&g, &p).unwrap();
        assert!((got - 1.0 / 381.0).abs() < 1e-15, "got {got}");
    }

    #[test]
    fn max_conductance_single_part_is_zero() {
        let g = two_cliques_bridge(3);
        let p = Partition::from_labels(1, [0; 6]).unwrap();
        assert_eq!(partition_max_conductance(&g, &p).unwrap(), 0.0);
    }

    #[test]
    fn max_conductance_rejects_zero_volume_part() {
        let g = WeightedGraph::from_edges(3, [(0, 1, 1.0)]).unwrap();
        let p = Partition::from_labels(2, [0, 0, 1]).unwrap();
        assert_eq!(
            partition_max_conductance(&g, &p).unwrap_err(),
            GraphError::ZeroVolume
        );
    }

    #[test]
    fn max_conductance_invariant_under_relabeling() {
        let g = two_cliques_bridge(5);
        let p = Partition::from_labels(2, (0..10).map(|v| usize::from(v >= 5))).unwrap();
        let q = Partition::from_labels(2, (0..10).map(|v| usize::from(v < 5))).unwrap();
        assert_eq!(
            partition_max_conductance(&g, &p).unwrap(),
            partition_max_conductance(&g, &q).unwrap()
        );
    }

    #[test]
    fn components_found() {
        let mut edges = clique_edges(0, 3);
        edges.extend(clique_edges(3, 3));
        let g = WeightedGraph::from_edges(7, edges).unwrap();
        let (comp, count) = g.components();
        assert_eq!(count, 3); // two triangles + isolated node 6
        assert_eq!(comp[0], comp[2]);
        assert_ne!(comp[0], comp[3]);
        let _ = format!("{:?}", comp);
    }
}
