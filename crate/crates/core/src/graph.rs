//! The comparability graph of a quotient poset: one vertex per class, one
//! edge per strictly comparable pair (not only covering pairs). Spanning
//! trees are breadth-first with neighbours taken in label order, so trees,
//! fundamental cycles and everything derived from them are deterministic.

use std::collections::VecDeque;
use std::fmt;

use crate::error::{Error, Result};
use crate::preorder::QuotientPoset;

/// An edge, oriented from the smaller class to the larger one.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub lower: usize,
    pub upper: usize,
}

impl Edge {
    /// Endpoints sorted by vertex index (label order).
    pub fn key(&self) -> (usize, usize) {
        (self.lower.min(self.upper), self.lower.max(self.upper))
    }

    pub fn touches(&self, v: usize) -> bool {
        self.lower == v || self.upper == v
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComparabilityGraph {
    labels: Vec<String>,
    less: Vec<bool>,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<usize>>,
    components: usize,
}

impl ComparabilityGraph {
    pub fn build(q: &QuotientPoset) -> Self {
        let k = q.len();
        let labels = (0..k).map(|c| q.representative(c).to_string()).collect();
        let mut less = vec![false; k * k];
        let mut edges = Vec::new();
        let mut adjacency = vec![Vec::new(); k];
        for a in 0..k {
            for b in 0..k {
                if q.lt(a, b) {
                    less[a * k + b] = true;
                    edges.push(Edge { lower: a, upper: b });
                    adjacency[a].push(b);
                    adjacency[b].push(a);
                }
            }
        }
        edges.sort_by_key(Edge::key);
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
        }
        let components = q.connected_components().len();
        ComparabilityGraph { labels, less, edges, adjacency, components }
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn vertex_by_label(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbours(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn component_count(&self) -> usize {
        self.components
    }

    pub fn is_connected(&self) -> bool {
        self.components == 1
    }

    /// Cyclomatic number `m - n + c`.
    pub fn cyclomatic_number(&self) -> usize {
        self.edge_count() + self.components - self.vertex_count()
    }

    pub fn less(&self, a: usize, b: usize) -> bool {
        self.less[a * self.vertex_count() + b]
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.less(a, b) || self.less(b, a)
    }

    /// The edge joining `a` and `b`, if they are comparable.
    pub fn edge_between(&self, a: usize, b: usize) -> Option<Edge> {
        if self.less(a, b) {
            Some(Edge { lower: a, upper: b })
        } else if self.less(b, a) {
            Some(Edge { lower: b, upper: a })
        } else {
            None
        }
    }

    pub fn check_path(&self, path: &SemiPath) -> Result<()> {
        for w in path.vertices.windows(2) {
            if !self.adjacent(w[0], w[1]) {
                return Err(Error::Domain(format!(
                    "invalid semi-path: {} and {} are not comparable",
                    self.label(w[0]),
                    self.label(w[1])
                )));
            }
        }
        Ok(())
    }

    /// Breadth-first spanning tree from `root`.
    pub fn spanning_tree(&self, root: usize) -> Result<SpanningTree> {
        if !self.is_connected() {
            return Err(Error::Disconnected(self.components));
        }
        let n = self.vertex_count();
        if root >= n {
            return Err(Error::Domain(format!("root {root} is not a vertex")));
        }
        let mut parent = vec![None; n];
        let mut depth = vec![0; n];
        let mut seen = vec![false; n];
        let mut tree_edges = Vec::with_capacity(n.saturating_sub(1));
        let mut queue = VecDeque::from([root]);
        seen[root] = true;
        while let Some(v) = queue.pop_front() {
            for &u in &self.adjacency[v] {
                if !seen[u] {
                    seen[u] = true;
                    parent[u] = Some(v);
                    depth[u] = depth[v] + 1;
                    tree_edges.push(self.edge_between(v, u).expect("adjacent"));
                    queue.push_back(u);
                }
            }
        }
        let mut in_tree = tree_edges.clone();
        in_tree.sort_by_key(Edge::key);
        let non_tree_edges = self
            .edges
            .iter()
            .copied()
            .filter(|e| in_tree.binary_search_by_key(&e.key(), Edge::key).is_err())
            .collect();
        Ok(SpanningTree { root, parent, depth, tree_edges, non_tree_edges })
    }

    /// One cycle per non-tree edge, in edge order. Each starts at the
    /// smaller-labelled endpoint, crosses the non-tree edge and returns
    /// along the tree.
    pub fn fundamental_cycles(&self, tree: &SpanningTree) -> Vec<FundamentalCycle> {
        tree.non_tree_edges
            .iter()
            .map(|&edge| {
                let (x, y) = edge.key();
                let mut vertices = vec![x];
                vertices.extend(tree.path(y, x).vertices);
                FundamentalCycle { edge, path: SemiPath { vertices } }
            })
            .collect()
    }

    pub fn format_path(&self, path: &SemiPath) -> String {
        path.vertices
            .iter()
            .map(|&v| self.label(v))
            .collect::<Vec<_>>()
            .join("-")
    }

    pub fn format_edge(&self, e: Edge) -> String {
        let (a, b) = e.key();
        format!("{}-{}", self.label(a), self.label(b))
    }

    /// Every simple semi-path from `from` to `to`.
    pub fn simple_paths(&self, from: usize, to: usize) -> Vec<SemiPath> {
        let mut out = Vec::new();
        let mut on_path = vec![false; self.vertex_count()];
        let mut stack = vec![from];
        on_path[from] = true;
        self.extend_paths(to, &mut stack, &mut on_path, &mut out);
        out
    }

    fn extend_paths(&self, to: usize, stack: &mut Vec<usize>, on_path: &mut [bool], out: &mut Vec<SemiPath>) {
        let v = *stack.last().expect("non-empty");
        if v == to {
            out.push(SemiPath { vertices: stack.clone() });
            return;
        }
        for &u in &self.adjacency[v] {
            if !on_path[u] {
                on_path[u] = true;
                stack.push(u);
                self.extend_paths(to, stack, on_path, out);
                stack.pop();
                on_path[u] = false;
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanningTree {
    root: usize,
    parent: Vec<Option<usize>>,
    depth: Vec<usize>,
    tree_edges: Vec<Edge>,
    non_tree_edges: Vec<Edge>,
}

impl SpanningTree {
    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    /// Tree edges in discovery order; a parent is always discovered before its children.
    pub fn tree_edges(&self) -> &[Edge] {
        &self.tree_edges
    }

    pub fn non_tree_edges(&self) -> &[Edge] {
        &self.non_tree_edges
    }

    pub fn contains_edge(&self, e: Edge) -> bool {
        self.tree_edges.iter().any(|t| t.key() == e.key())
    }

    /// Vertices in breadth-first order (root first).
    pub fn bfs_order(&self) -> Vec<usize> {
        let mut order = vec![self.root];
        for e in &self.tree_edges {
            let child = if self.parent[e.lower] == Some(e.upper) { e.lower } else { e.upper };
            order.push(child);
        }
        order
    }

    /// The unique tree semi-path from `x` to `y`.
    pub fn path(&self, x: usize, y: usize) -> SemiPath {
        let (mut a, mut b) = (x, y);
        let mut up = vec![a];
        let mut down = vec![b];
        while self.depth[a] > self.depth[b] {
            a = self.parent[a].expect("non-root");
            up.push(a);
        }
        while self.depth[b] > self.depth[a] {
            b = self.parent[b].expect("non-root");
            down.push(b);
        }
        while a != b {
            a = self.parent[a].expect("non-root");
            b = self.parent[b].expect("non-root");
            up.push(a);
            down.push(b);
        }
        down.pop();
        up.extend(down.into_iter().rev());
        SemiPath { vertices: up }
    }
}

/// A walk in the comparability graph that ignores edge direction.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SemiPath {
    pub vertices: Vec<usize>,
}

impl SemiPath {
    pub fn new(vertices: Vec<usize>) -> Self {
        assert!(!vertices.is_empty(), "a semi-path has at least one vertex");
        SemiPath { vertices }
    }

    pub fn len(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn start(&self) -> usize {
        self.vertices[0]
    }

    pub fn end(&self) -> usize {
        *self.vertices.last().expect("non-empty")
    }

    pub fn reversed(&self) -> Self {
        SemiPath { vertices: self.vertices.iter().rev().copied().collect() }
    }

    /// `self` followed by `other`; `other` must start where `self` ends.
    pub fn concat(&self, other: &SemiPath) -> Self {
        assert_eq!(self.end(), other.start(), "paths are not concatenable");
        let mut vertices = self.vertices.clone();
        vertices.extend_from_slice(&other.vertices[1..]);
        SemiPath { vertices }
    }
}

impl fmt::Display for SemiPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.vertices.iter().map(usize::to_string).collect();
        f.write_str(&parts.join("-"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FundamentalCycle {
    pub edge: Edge,
    /// Closed vertex sequence; first and last vertices coincide.
    pub path: SemiPath,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preorder::Preorder;

    fn graph(elements: &[&str], rel: &[(&str, &str)]) -> ComparabilityGraph {
        ComparabilityGraph::build(&Preorder::close_relations(elements, rel).unwrap().quotient())
    }

    fn crown() -> ComparabilityGraph {
        graph(&["a", "b", "c", "d"], &[("a", "c"), ("a", "d"), ("b", "c"), ("b", "d")])
    }

    fn names(g: &ComparabilityGraph, edges: &[Edge]) -> Vec<String> {
        edges.iter().map(|&e| g.format_edge(e)).collect()
    }

    #[test]
    fn crown_graph() {
        let g = crown();
        assert_eq!(names(&g, g.edges()), ["a-c", "a-d", "b-c", "b-d"]);
        assert_eq!(g.cyclomatic_number(), 1);
        let t = g.spanning_tree(0).unwrap();
        assert_eq!(names(&g, t.tree_edges()), ["a-c", "a-d", "b-c"]);
        assert_eq!(names(&g, t.non_tree_edges()), ["b-d"]);
        assert_eq!(g.format_path(&t.path(1, 3)), "b-c-a-d");
        assert_eq!(g.format_path(&t.path(0, 2)), "a-c");
        assert_eq!(t.path(2, 2).len(), 0);
        let cycles = g.fundamental_cycles(&t);
        assert_eq!(cycles.len(), 1);
        assert_eq!(g.format_path(&cycles[0].path), "b-d-a-c-b");
    }

    #[test]
    fn chain_is_a_triangle() {
        let g = graph(&["a", "b", "c"], &[("a", "b"), ("b", "c")]);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.cyclomatic_number(), 1);
        let t = g.spanning_tree(0).unwrap();
        assert_eq!(names(&g, t.tree_edges()), ["a-b", "a-c"]);
        assert_eq!(names(&g, t.non_tree_edges()), ["b-c"]);
    }

    #[test]
    fn antichain_and_singleton() {
        let g = graph(&["a", "b"], &[]);
        assert_eq!(g.edge_count(), 0);
        assert_eq!(g.component_count(), 2);
        assert!(matches!(g.spanning_tree(0), Err(Error::Disconnected(2))));
        let s = graph(&["a"], &[]);
        let t = s.spanning_tree(0).unwrap();
        assert!(t.tree_edges().is_empty());
        assert!(s.fundamental_cycles(&t).is_empty());
    }

    #[test]
    fn diamond_has_two_cycles() {
        let g = graph(&["a", "b", "c", "d"], &[("a", "b"), ("b", "d"), ("a", "c"), ("c", "d")]);
        assert_eq!(g.edge_count(), 5);
        assert_eq!(g.cyclomatic_number(), 2);
        let t = g.spanning_tree(0).unwrap();
        assert_eq!(g.fundamental_cycles(&t).len(), 2);
    }

    #[test]
    fn tree_graph_has_no_cycles() {
        let g = graph(&["a", "b", "c"], &[("a", "b"), ("a", "c")]);
        let t = g.spanning_tree(1).unwrap();
        assert_eq!(g.cyclomatic_number(), 0);
        assert!(g.fundamental_cycles(&t).is_empty());
        assert_eq!(g.format_path(&t.path(1, 2)), "b-a-c");
    }

    #[test]
    fn simple_paths_in_crown() {
        let g = crown();
        let paths = g.simple_paths(1, 3);
        let mut shown: Vec<String> = paths.iter().map(|p| g.format_path(p)).collect();
        shown.sort();
        assert_eq!(shown, ["b-c-a-d", "b-d"]);
        assert!(g.check_path(&SemiPath::new(vec![0, 1])).is_err());
    }
}
