//! Weighted directed graphs over agents `1..=n`, their Laplacians, and the
//! reachability/condensation helpers the controllability tests build on.
//!
//! Conventions used across the crate:
//!
//! * Agent ids are 1-based everywhere in the public API.
//! * An edge `src -> dst` means information flows from `src` to `dst`; in the
//!   adjacency matrix it lands at `A[dst-1][src-1]` (rows index the receiving
//!   agent), and the Laplacian is `L = D - A` with `D` the diagonal of
//!   weighted in-degrees. Rows of `L` therefore sum to zero.
//! * Self-loops, duplicate edges, and non-positive weights are rejected at
//!   construction; every `DirectedGraph` is valid by the time it exists.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use crate::{Error, Matrix, Result};

/// A weighted directed edge between 1-based agent ids.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub weight: f64,
}

/// A validated weighted digraph on nodes `1..=n`.
///
/// Edges are stored sorted by `(src, dst)`, which makes serialisation and all
/// iteration orders deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectedGraph {
    n: usize,
    edges: Vec<Edge>,
    /// out[i] = indices into `edges` with src == i+1, ascending dst.
    out: Vec<Vec<usize>>,
    /// inc[i] = indices into `edges` with dst == i+1, ascending src.
    inc: Vec<Vec<usize>>,
}

impl DirectedGraph {
    /// Build a graph from `(src, dst, weight)` triples.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut list: Vec<Edge> = Vec::new();
        for (src, dst, weight) in edges {
            for id in [src, dst] {
                if id == 0 || id > n {
                    return Err(Error::NodeOutOfRange { id, n });
                }
            }
            if src == dst {
                return Err(Error::SelfLoop(src));
            }
            if !(weight.is_finite() && weight > 0.0) {
                return Err(Error::BadWeight { src, dst, weight });
            }
            list.push(Edge { src, dst, weight });
        }
        list.sort_by_key(|e| (e.src, e.dst));
        if let Some(w) = list.windows(2).find(|w| (w[0].src, w[0].dst) == (w[1].src, w[1].dst)) {
            return Err(Error::DuplicateEdge { src: w[0].src, dst: w[0].dst });
        }
        let mut out = vec![Vec::new(); n];
        let mut inc = vec![Vec::new(); n];
        for (k, e) in list.iter().enumerate() {
            out[e.src - 1].push(k);
        }
        // Incoming lists in ascending src order: edges are sorted by (src, dst),
        // so a stable pass already yields ascending src per destination.
        for (k, e) in list.iter().enumerate() {
            inc[e.dst - 1].push(k);
        }
        Ok(Self { n, edges: list, out, inc })
    }

    /// Build an unweighted graph (all weights 1) from `(src, dst)` pairs.
    pub fn unit(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        Self::new(n, edges.into_iter().map(|(s, d)| (s, d, 1.0)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges sorted by `(src, dst)`.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Weight of `src -> dst`, if that edge exists.
    pub fn weight(&self, src: usize, dst: usize) -> Option<f64> {
        self.edges
            .binary_search_by_key(&(src, dst), |e| (e.src, e.dst))
            .ok()
            .map(|k| self.edges[k].weight)
    }

    /// Nodes that `v` points to, ascending.
    pub fn out_neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.out[v - 1].iter().map(|&k| self.edges[k].dst)
    }

    /// Edges arriving at `v`, ascending src.
    pub fn in_edges(&self, v: usize) -> impl Iterator<Item = &Edge> + '_ {
        self.inc[v - 1].iter().map(|&k| &self.edges[k])
    }

    /// Number of edges arriving at `v`.
    pub fn in_degree(&self, v: usize) -> usize {
        self.inc[v - 1].len()
    }

    /// Sum of weights arriving at `v`.
    pub fn weighted_in_degree(&self, v: usize) -> f64 {
        self.inc[v - 1].iter().map(|&k| self.edges[k].weight).sum()
    }

    /// Weighted adjacency matrix; `A[dst-1][src-1] = weight`.
    pub fn adjacency(&self) -> Matrix {
        let mut a = Matrix::zeros(self.n, self.n);
        for e in &self.edges {
            a[(e.dst - 1, e.src - 1)] = e.weight;
        }
        a
    }

    /// 0/1 edge-presence matrix in the same orientation as [`Self::adjacency`].
    pub fn adjacency_indicator(&self) -> Matrix {
        let mut a = Matrix::zeros(self.n, self.n);
        for e in &self.edges {
            a[(e.dst - 1, e.src - 1)] = 1.0;
        }
        a
    }

    /// In-degree Laplacian `L = D - A`.
    ///
    /// Off-diagonal entries are `-weight` verbatim; each diagonal entry is the
    /// single rounded sum of the weights into that node, so row sums vanish
    /// exactly whenever those weights sum exactly (integers, dyadics).
    pub fn laplacian(&self) -> Matrix {
        let mut l = Matrix::zeros(self.n, self.n);
        for e in &self.edges {
            l[(e.dst - 1, e.src - 1)] = -e.weight;
        }
        for v in 1..=self.n {
            l[(v - 1, v - 1)] = self.weighted_in_degree(v);
        }
        l
    }

    /// Same topology, new weights: `f` maps each current edge to its new weight.
    pub fn reweighted(&self, mut f: impl FnMut(&Edge) -> f64) -> Result<Self> {
        Self::new(self.n, self.edges.iter().map(|e| (e.src, e.dst, f(e))))
    }

    /// All nodes reachable from `starts` (including the starts), ascending.
    pub fn reachable_set(&self, starts: &[usize]) -> Result<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::new();
        for &s in starts {
            if s == 0 || s > self.n {
                return Err(Error::NodeOutOfRange { id: s, n: self.n });
            }
            if !seen[s - 1] {
                seen[s - 1] = true;
                queue.push_back(s);
            }
        }
        while let Some(v) = queue.pop_front() {
            for w in self.out_neighbors(v) {
                if !seen[w - 1] {
                    seen[w - 1] = true;
                    queue.push_back(w);
                }
            }
        }
        Ok((1..=self.n).filter(|&v| seen[v - 1]).collect())
    }

    /// Partition nodes by BFS distance from `source`.
    pub fn distance_partition(&self, source: usize) -> Result<DistancePartition> {
        if source == 0 || source > self.n {
            return Err(Error::NodeOutOfRange { id: source, n: self.n });
        }
        let mut dist = vec![usize::MAX; self.n];
        dist[source - 1] = 0;
        let mut queue = VecDeque::from([source]);
        let mut max_d = 0;
        while let Some(v) = queue.pop_front() {
            for w in self.out_neighbors(v) {
                if dist[w - 1] == usize::MAX {
                    dist[w - 1] = dist[v - 1] + 1;
                    max_d = max_d.max(dist[w - 1]);
                    queue.push_back(w);
                }
            }
        }
        let mut cells = vec![Vec::new(); max_d + 1];
        let mut unreachable = Vec::new();
        for v in 1..=self.n {
            match dist[v - 1] {
                usize::MAX => unreachable.push(v),
                d => cells[d].push(v),
            }
        }
        Ok(DistancePartition { source, cells, unreachable })
    }

    /// Relabel nodes in BFS order from `root`: the root becomes 1, then nodes
    /// at distance 1 in ascending old id, and so on. Fails if any node is
    /// unreachable from `root`.
    ///
    /// Returns `(perm, relabeled)` where `perm[old - 1]` is the new label.
    pub fn bfs_relabel(&self, root: usize) -> Result<(Vec<usize>, DirectedGraph)> {
        let part = self.distance_partition(root)?;
        if !part.unreachable.is_empty() {
            return Err(Error::UnreachableNodes { root, unreachable: part.unreachable });
        }
        let mut perm = vec![0usize; self.n];
        let mut next = 1;
        for cell in &part.cells {
            for &v in cell {
                perm[v - 1] = next;
                next += 1;
            }
        }
        let relabeled = DirectedGraph::new(
            self.n,
            self.edges.iter().map(|e| (perm[e.src - 1], perm[e.dst - 1], e.weight)),
        )?;
        Ok((perm, relabeled))
    }

    /// Strongly connected components, each sorted ascending, listed by their
    /// smallest member.
    pub fn strongly_connected_components(&self) -> Vec<Vec<usize>> {
        let mut st = TarjanState {
            g: self,
            index: vec![usize::MAX; self.n],
            low: vec![0; self.n],
            on_stack: vec![false; self.n],
            stack: Vec::new(),
            next: 0,
            comps: Vec::new(),
        };
        for v in 0..self.n {
            if st.index[v] == usize::MAX {
                st.strong_connect(v);
            }
        }
        let mut comps = st.comps;
        for c in &mut comps {
            c.sort_unstable();
        }
        comps.sort_unstable_by_key(|c| c[0]);
        comps
    }

    /// Nodes `r` such that every node is reachable from `r` — the roots of
    /// spanning trees. Nonempty exactly when the condensation has a single
    /// source component, in which case the roots are that component's nodes.
    pub fn spanning_tree_roots(&self) -> Vec<usize> {
        let sources = self.source_components();
        if sources.len() == 1 {
            sources.into_iter().next().unwrap()
        } else {
            Vec::new()
        }
    }

    /// Minimum number of roots whose joint reachable set covers the graph:
    /// one per source component of the condensation.
    pub fn min_forest_root_count(&self) -> usize {
        self.source_components().len()
    }

    pub(crate) fn source_components(&self) -> Vec<Vec<usize>> {
        let comps = self.strongly_connected_components();
        let mut comp_of = vec![0usize; self.n];
        for (ci, c) in comps.iter().enumerate() {
            for &v in c {
                comp_of[v - 1] = ci;
            }
        }
        let mut has_incoming = vec![false; comps.len()];
        for e in &self.edges {
            let (cu, cv) = (comp_of[e.src - 1], comp_of[e.dst - 1]);
            if cu != cv {
                has_incoming[cv] = true;
            }
        }
        comps
            .into_iter()
            .enumerate()
            .filter_map(|(ci, c)| (!has_incoming[ci]).then_some(c))
            .collect()
    }

    /// True when all nodes have the same in-degree (edge count, not weight).
    pub fn is_in_degree_regular(&self) -> bool {
        self.in_degree_regular_degree().is_ok()
    }

    /// The common in-degree, or which pair of nodes breaks regularity.
    pub fn in_degree_regular_degree(&self) -> Result<usize> {
        let d0 = self.in_degree(1);
        for v in 2..=self.n {
            let dv = self.in_degree(v);
            if dv != d0 {
                return Err(Error::NotInDegreeRegular { a: 1, da: d0, b: v, db: dv });
            }
        }
        Ok(d0)
    }

    /// If the graph is a rooted directed tree (every non-root has exactly one
    /// incoming edge and is reachable from the root), return the root.
    pub fn tree_root(&self) -> Result<usize> {
        if self.edges.len() != self.n - 1 {
            return Err(Error::NotATree("edge count must be n - 1"));
        }
        let mut root = None;
        for v in 1..=self.n {
            match self.in_degree(v) {
                0 => {
                    if root.replace(v).is_some() {
                        return Err(Error::NotATree("more than one node without incoming edges"));
                    }
                }
                1 => {}
                _ => return Err(Error::NotATree("a node has more than one incoming edge")),
            }
        }
        let root = root.ok_or(Error::NotATree("no node without incoming edges"))?;
        if self.reachable_set(&[root])?.len() != self.n {
            return Err(Error::NotATree("nodes unreachable from the root"));
        }
        Ok(root)
    }

    /// In a rooted tree, the parent of each node (`None` for the root).
    pub(crate) fn tree_parents(&self) -> Result<Vec<Option<usize>>> {
        let root = self.tree_root()?;
        let mut parent = vec![None; self.n];
        for e in &self.edges {
            parent[e.dst - 1] = Some(e.src);
        }
        debug_assert!(parent[root - 1].is_none());
        Ok(parent)
    }
}

/// Whether two distinct tree nodes lie in different branches: their paths from
/// the root diverge, i.e. neither is an ancestor of the other.
pub fn different_branches(tree: &DirectedGraph, a: usize, b: usize) -> Result<bool> {
    assert_ne!(a, b, "different_branches needs two distinct nodes");
    for id in [a, b] {
        if id == 0 || id > tree.n() {
            return Err(Error::NodeOutOfRange { id, n: tree.n() });
        }
    }
    let parent = tree.tree_parents()?;
    let mut on_a_path = vec![false; tree.n()];
    let mut v = a;
    loop {
        on_a_path[v - 1] = true;
        match parent[v - 1] {
            Some(p) => v = p,
            None => break,
        }
    }
    let mut v = b;
    let lca = loop {
        if on_a_path[v - 1] {
            break v;
        }
        v = parent[v - 1].expect("walk reaches the root, which is on every path");
    };
    Ok(lca != a && lca != b)
}

/// BFS distance classes from a source node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistancePartition {
    pub source: usize,
    /// `cells[d]` = nodes at distance `d`, ascending; `cells[0] == [source]`.
    pub cells: Vec<Vec<usize>>,
    /// Nodes with no path from the source, ascending.
    pub unreachable: Vec<usize>,
}

struct TarjanState<'a> {
    g: &'a DirectedGraph,
    index: Vec<usize>,
    low: Vec<usize>,
    on_stack: Vec<bool>,
    stack: Vec<usize>,
    next: usize,
    comps: Vec<Vec<usize>>,
}

impl TarjanState<'_> {
    /// Standard Tarjan over 0-based node ids.
    fn strong_connect(&mut self, v: usize) {
        self.index[v] = self.next;
        self.low[v] = self.next;
        self.next += 1;
        self.stack.push(v);
        self.on_stack[v] = true;
        for w in self.g.out_neighbors(v + 1).map(|w| w - 1).collect::<Vec<_>>() {
            if self.index[w] == usize::MAX {
                self.strong_connect(w);
                self.low[v] = self.low[v].min(self.low[w]);
            } else if self.on_stack[w] {
                self.low[v] = self.low[v].min(self.index[w]);
            }
        }
        if self.low[v] == self.index[v] {
            let mut comp = Vec::new();
            loop {
                let w = self.stack.pop().unwrap();
                self.on_stack[w] = false;
                comp.push(w + 1);
                if w == v {
                    break;
                }
            }
            self.comps.push(comp);
        }
    }
}

/// Error from the text format, pointing at the offending line (1-based).
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl DirectedGraph {
    /// Parse the line-oriented text format:
    ///
    /// ```text
    /// # comment
    /// n 5
    /// 1 2          # weight defaults to 1
    /// 3 5 2.5
    /// ```
    ///
    /// The first data line must be `n <node-count>`; every other data line is
    /// `src dst [weight]` with 1-based ids. `#` starts a comment anywhere.
    pub fn from_text(text: &str) -> core::result::Result<Self, ParseError> {
        let err = |line: usize, message: String| ParseError { line, message };
        let mut n: Option<usize> = None;
        let mut edges: Vec<(usize, usize, f64)> = Vec::new();
        let mut seen: Vec<((usize, usize), usize)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let data = raw.split('#').next().unwrap_or("").trim();
            if data.is_empty() {
                continue;
            }
            let tokens: Vec<&str> = data.split_whitespace().collect();
            if tokens[0] == "n" {
                if n.is_some() {
                    return Err(err(line, "duplicate node-count line".into()));
                }
                if tokens.len() != 2 {
                    return Err(err(line, "expected `n <node-count>`".into()));
                }
                let count: usize = tokens[1]
                    .parse()
                    .map_err(|_| err(line, format!("invalid node count `{}`", tokens[1])))?;
                if count == 0 {
                    return Err(err(line, "node count must be at least 1".into()));
                }
                n = Some(count);
                continue;
            }
            let n = n.ok_or_else(|| {
                err(line, "first data line must be the node count `n <count>`".into())
            })?;
            if tokens.len() < 2 || tokens.len() > 3 {
                return Err(err(line, "expected `src dst [weight]`".into()));
            }
            let id = |t: &str| -> core::result::Result<usize, ParseError> {
                let v: usize = t
                    .parse()
                    .map_err(|_| err(line, format!("invalid node id `{t}`")))?;
                if v == 0 || v > n {
                    return Err(err(line, format!("node id {v} out of range 1..={n}")));
                }
                Ok(v)
            };
            let (src, dst) = (id(tokens[0])?, id(tokens[1])?);
            if src == dst {
                return Err(err(line, format!("self-loop on node {src} is not allowed")));
            }
            let weight = match tokens.get(2) {
                Some(t) => t
                    .parse::<f64>()
                    .map_err(|_| err(line, format!("invalid weight `{t}`")))?,
                None => 1.0,
            };
            if !(weight.is_finite() && weight > 0.0) {
                return Err(err(line, format!("weight must be positive and finite, got {weight}")));
            }
            if seen.iter().any(|&(pair, _)| pair == (src, dst)) {
                return Err(err(line, format!("duplicate edge {src} -> {dst}")));
            }
            seen.push(((src, dst), line));
            edges.push((src, dst, weight));
        }
        let n = n.ok_or_else(|| err(text.lines().count().max(1), "missing node-count line `n <count>`".into()))?;
        DirectedGraph::new(n, edges).map_err(|e| err(0, e.to_string()))
    }

    /// Canonical text form: node count, then edges sorted by `(src, dst)` with
    /// explicit weights. Round-trips through [`DirectedGraph::from_text`].
    pub fn to_text(&self) -> String {
        let mut s = format!("n {}\n", self.n);
        for e in &self.edges {
            s.push_str(&format!("{} {} {}\n", e.src, e.dst, e.weight));
        }
        s
    }
}

impl FromStr for DirectedGraph {
    type Err = ParseError;

    fn from_str(s: &str) -> core::result::Result<Self, Self::Err> {
        Self::from_text(s)
    }
}

impl fmt::Display for DirectedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex1() -> DirectedGraph {
        // 4 agents: 1 feeds 2,3,4; 2 feeds 3,4; 3 feeds 4.
        DirectedGraph::unit(4, [(1, 2), (1, 3), (2, 3), (1, 4), (2, 4), (3, 4)]).unwrap()
    }

    fn ex2() -> DirectedGraph {
        DirectedGraph::unit(5, [(1, 2), (5, 2), (2, 3), (3, 4), (3, 5), (4, 5)]).unwrap()
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert_eq!(DirectedGraph::unit(0, []), Err(Error::EmptyGraph));
        assert_eq!(
            DirectedGraph::unit(2, [(1, 3)]),
            Err(Error::NodeOutOfRange { id: 3, n: 2 })
        );
        assert_eq!(DirectedGraph::unit(2, [(2, 2)]), Err(Error::SelfLoop(2)));
        assert_eq!(
            DirectedGraph::unit(2, [(1, 2), (1, 2)]),
            Err(Error::DuplicateEdge { src: 1, dst: 2 })
        );
        assert_eq!(
            DirectedGraph::new(2, [(1, 2, 0.0)]),
            Err(Error::BadWeight { src: 1, dst: 2, weight: 0.0 })
        );
        assert_eq!(
            DirectedGraph::new(2, [(1, 2, -1.5)]),
            Err(Error::BadWeight { src: 1, dst: 2, weight: -1.5 })
        );
        assert!(DirectedGraph::new(2, [(1, 2, f64::NAN)]).is_err());
    }

    #[test]
    fn single_node_graph_is_fine() {
        let g = DirectedGraph::unit(1, []).unwrap();
        assert_eq!(g.laplacian(), Matrix::zeros(1, 1));
        assert_eq!(g.spanning_tree_roots(), vec![1]);
        assert_eq!(g.min_forest_root_count(), 1);
    }

    #[test]
    fn laplacian_matches_hand_computation() {
        let l = ex1().laplacian();
        #[rustfmt::skip]
        let want = Matrix::from_row_slice(4, 4, &[
             0.0,  0.0,  0.0, 0.0,
            -1.0,  1.0,  0.0, 0.0,
            -1.0, -1.0,  2.0, 0.0,
            -1.0, -1.0, -1.0, 3.0,
        ]);
        assert_eq!(l, want);

        let l2 = ex2().laplacian();
        #[rustfmt::skip]
        let want2 = Matrix::from_row_slice(5, 5, &[
             0.0,  0.0,  0.0,  0.0,  0.0,
            -1.0,  2.0,  0.0,  0.0, -1.0,
             0.0, -1.0,  1.0,  0.0,  0.0,
             0.0,  0.0, -1.0,  1.0,  0.0,
             0.0,  0.0, -1.0, -1.0,  2.0,
        ]);
        assert_eq!(l2, want2);
    }

    #[test]
    fn laplacian_row_sums_vanish_exactly_for_exact_weights() {
        let g = DirectedGraph::new(
            4,
            [
                (1, 2, 1.0),
                (1, 3, 2.0),
                (2, 3, 0.5),
                (3, 4, 0.25),
                (2, 4, 4.0),
                (4, 1, 8.0),
            ],
        )
        .unwrap();
        let ones = nalgebra::DVector::from_element(4, 1.0);
        assert_eq!(g.laplacian() * ones, nalgebra::DVector::zeros(4));
    }

    #[test]
    fn adjacency_orientation_rows_are_receivers() {
        let g = DirectedGraph::new(3, [(1, 2, 2.5)]).unwrap();
        let a = g.adjacency();
        assert_eq!(a[(1, 0)], 2.5);
        assert_eq!(a[(0, 1)], 0.0);
        assert_eq!(g.adjacency_indicator()[(1, 0)], 1.0);

        // A = D - L with D the diagonal of weighted in-degrees.
        let g2 = ex2();
        let d = Matrix::from_diagonal(&nalgebra::DVector::from_iterator(
            5,
            (1..=5).map(|v| g2.weighted_in_degree(v)),
        ));
        assert_eq!(g2.adjacency(), d - g2.laplacian());

        let cycle = DirectedGraph::unit(3, [(1, 2), (2, 3), (3, 1)]).unwrap();
        let ind = cycle.adjacency_indicator();
        for (i, j) in [(1, 0), (2, 1), (0, 2)] {
            assert_eq!(ind[(i, j)], 1.0);
        }
        assert_eq!(ind.sum(), 3.0);
    }

    #[test]
    fn distance_partition_layers() {
        let p = ex2().distance_partition(1).unwrap();
        assert_eq!(p.cells, vec![vec![1], vec![2], vec![3], vec![4, 5]]);
        assert!(p.unreachable.is_empty());

        let p3 = ex2().distance_partition(3).unwrap();
        assert_eq!(p3.cells, vec![vec![3], vec![4, 5], vec![2]]);
        assert_eq!(p3.unreachable, vec![1]);
    }

    #[test]
    fn bfs_relabel_orders_by_distance_then_id() {
        let g = DirectedGraph::unit(3, [(3, 1), (1, 2)]).unwrap();
        let (perm, h) = g.bfs_relabel(3).unwrap();
        assert_eq!(perm, vec![2, 3, 1]);
        assert_eq!(h, DirectedGraph::unit(3, [(1, 2), (2, 3)]).unwrap());

        let err = g.bfs_relabel(1).unwrap_err();
        assert_eq!(err, Error::UnreachableNodes { root: 1, unreachable: vec![3] });
    }

    #[test]
    fn scc_and_spanning_roots() {
        let g = ex2();
        assert_eq!(
            g.strongly_connected_components(),
            vec![vec![1], vec![2, 3, 4, 5]]
        );
        assert_eq!(g.spanning_tree_roots(), vec![1]);
        assert_eq!(g.min_forest_root_count(), 1);

        let cycle = DirectedGraph::unit(3, [(1, 2), (2, 3), (3, 1)]).unwrap();
        assert_eq!(cycle.spanning_tree_roots(), vec![1, 2, 3]);

        let edgeless = DirectedGraph::unit(3, []).unwrap();
        assert_eq!(edgeless.spanning_tree_roots(), Vec::<usize>::new());
        assert_eq!(edgeless.min_forest_root_count(), 3);

        // Two source components feeding a shared sink.
        let vee = DirectedGraph::unit(3, [(1, 3), (2, 3)]).unwrap();
        assert_eq!(vee.spanning_tree_roots(), Vec::<usize>::new());
        assert_eq!(vee.min_forest_root_count(), 2);
    }

    #[test]
    fn in_degree_regularity() {
        let cycle = DirectedGraph::unit(3, [(1, 2), (2, 3), (3, 1)]).unwrap();
        assert_eq!(cycle.in_degree_regular_degree().unwrap(), 1);
        assert!(!ex2().is_in_degree_regular());
    }

    #[test]
    fn tree_recognition() {
        let star = DirectedGraph::unit(3, [(1, 2), (1, 3)]).unwrap();
        assert_eq!(star.tree_root().unwrap(), 1);

        let path = DirectedGraph::unit(3, [(3, 1), (1, 2)]).unwrap();
        assert_eq!(path.tree_root().unwrap(), 3);

        assert!(ex1().tree_root().is_err());
        // Right edge count, but a 2-cycle hides inside.
        let trap = DirectedGraph::unit(4, [(1, 2), (3, 4), (4, 3)]).unwrap();
        assert!(trap.tree_root().is_err());
    }

    #[test]
    fn branch_relation() {
        let t = DirectedGraph::unit(4, [(1, 2), (2, 3), (1, 4)]).unwrap();
        assert!(different_branches(&t, 3, 4).unwrap());
        assert!(different_branches(&t, 2, 4).unwrap());
        assert!(!different_branches(&t, 2, 3).unwrap());
        assert!(!different_branches(&t, 1, 3).unwrap());
    }

    #[test]
    fn parse_and_roundtrip() {
        let text = "# example\nn 5\n\n1 2\n5 2 1 # unit\n2 3\n3 4\n3 5\n4 5 1.0\n";
        let g = DirectedGraph::from_text(text).unwrap();
        assert_eq!(g, ex2());
        let canon = g.to_text();
        assert_eq!(canon, "n 5\n1 2 1\n2 3 1\n3 4 1\n3 5 1\n4 5 1\n5 2 1\n");
        assert_eq!(DirectedGraph::from_text(&canon).unwrap(), g);

        let weighted = DirectedGraph::new(2, [(1, 2, 0.30000000000000004)]).unwrap();
        let rt = DirectedGraph::from_text(&weighted.to_text()).unwrap();
        assert_eq!(rt.weight(1, 2), Some(0.30000000000000004));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let cases = [
            ("n 2\n1 2\n1 2\n", 3, "duplicate edge"),
            ("n 2\n1 3\n", 2, "out of range"),
            ("1 2\nn 2\n", 1, "node count"),
            ("n 2\n1 2 -3\n", 2, "positive"),
            ("n 2\nn 2\n", 2, "duplicate node-count"),
            ("n 0\n", 1, "at least 1"),
            ("n 2\n1 1\n", 2, "self-loop"),
            ("n 2\n1 2 x\n", 2, "invalid weight"),
            ("n 2\n1\n", 2, "expected"),
            ("# nothing\n", 1, "missing node-count"),
        ];
        for (text, line, needle) in cases {
            let e = DirectedGraph::from_text(text).unwrap_err();
            assert_eq!(e.line, line, "case {text:?} -> {e}");
            assert!(e.message.contains(needle), "case {text:?} -> {e}");
        }
    }
}
