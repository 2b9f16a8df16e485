//! Rooted, undirected, edge-weighted graphs.
//!
//! A [`RootedGraph`] is immutable once built. Every edge has length at least
//! one, there are no self-loops or parallel edges, and every vertex is
//! reachable from the root. Shortest-path data is computed once on first use
//! and cached.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};
use std::fmt;
use std::sync::OnceLock;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId(pub usize);

impl VertexId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl EdgeId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub length: Rational,
}

impl Edge {
    /// The endpoint opposite `x`. `x` must be an endpoint.
    pub fn other(&self, x: VertexId) -> VertexId {
        if self.u == x {
            self.v
        } else {
            debug_assert_eq!(self.v, x);
            self.u
        }
    }

    pub fn touches(&self, x: VertexId) -> bool {
        self.u == x || self.v == x
    }
}

/// Shortest-path data from the root.
///
/// `parent(v)` is the smallest-id neighbour `u` with `d(u) + λ(u,v) = d(v)`,
/// so the shortest-path tree and `λ_v` are deterministic.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMap {
    pub dist: Vec<Rational>,
    pub parent: Vec<Option<VertexId>>,
    pub parent_edge: Vec<Option<EdgeId>>,
    /// Length of the last edge on the chosen shortest path; zero at the root.
    pub lambda: Vec<Rational>,
}

impl DistanceMap {
    pub fn d(&self, v: VertexId) -> &Rational {
        &self.dist[v.0]
    }

    pub fn lambda(&self, v: VertexId) -> &Rational {
        &self.lambda[v.0]
    }

    pub fn dist_f64(&self) -> Vec<f64> {
        self.dist.iter().map(rational::to_f64).collect()
    }
}

#[derive(Debug)]
pub struct RootedGraph {
    edges: Vec<Edge>,
    adjacency: Vec<Vec<(VertexId, EdgeId)>>,
    root: VertexId,
    labels: Vec<String>,
    distances: OnceLock<DistanceMap>,
}

impl Clone for RootedGraph {
    fn clone(&self) -> Self {
        RootedGraph {
            edges: self.edges.clone(),
            adjacency: self.adjacency.clone(),
            root: self.root,
            labels: self.labels.clone(),
            distances: self.distances.clone(),
        }
    }
}

impl PartialEq for RootedGraph {
    fn eq(&self, other: &Self) -> bool {
        self.root == other.root && self.edges == other.edges && self.labels == other.labels
    }
}

/// A graph derived from another one, with the vertex each new id came from.
/// For contractions the new root stands for every merged vertex; `origin`
/// then records the old root.
#[derive(Clone, Debug, PartialEq)]
pub struct MappedGraph {
    pub graph: RootedGraph,
    pub origin: Vec<VertexId>,
}

/// Validates and builds a graph with default labels (`"0"`, `"1"`, ...).
pub fn build_graph(
    vertex_count: usize,
    edges: &[(usize, usize, Rational)],
    root: usize,
) -> Result<RootedGraph> {
    if vertex_count < 2 {
        return Err(Error::TooFewVertices { min: 2, got: vertex_count });
    }
    let labels = (0..vertex_count).map(|i| i.to_string()).collect();
    RootedGraph::from_parts(labels, edges, root)
}

impl RootedGraph {
    /// Builds a graph from labelled vertices. Unlike [`build_graph`] a single
    /// vertex is accepted, since contractions can produce one.
    pub fn from_parts(
        labels: Vec<String>,
        edges: &[(usize, usize, Rational)],
        root: usize,
    ) -> Result<RootedGraph> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::TooFewVertices { min: 1, got: 0 });
        }
        if root >= n {
            return Err(Error::VertexOutOfRange { vertex: root, count: n });
        }
        let mut seen_labels = std::collections::HashSet::new();
        for l in &labels {
            if !seen_labels.insert(l.as_str()) {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        let mut pairs = std::collections::HashSet::new();
        let mut stored = Vec::with_capacity(edges.len());
        let mut adjacency = vec![Vec::new(); n];
        for (id, (u, v, len)) in edges.iter().enumerate() {
            for &x in [u, v] {
                if x >= n {
                    return Err(Error::VertexOutOfRange { vertex: x, count: n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(*u));
            }
            if *len < Rational::one() {
                return Err(Error::LengthBelowOne { u: *u, v: *v, length: rational::format(len) });
            }
            if !pairs.insert((*u.min(v), *u.max(v))) {
                return Err(Error::DuplicateEdge(*u.min(v), *u.max(v)));
            }
            adjacency[*u].push((VertexId(*v), EdgeId(id)));
            adjacency[*v].push((VertexId(*u), EdgeId(id)));
            stored.push(Edge { u: VertexId(*u), v: VertexId(*v), length: len.clone() });
        }
        for list in &mut adjacency {
            list.sort();
        }
        let graph = RootedGraph {
            edges: stored,
            adjacency,
            root: VertexId(root),
            labels,
            distances: OnceLock::new(),
        };
        let reached = graph.reachable_from_root();
        if let Some(v) = reached.iter().position(|r| !r) {
            return Err(Error::DisconnectedGraph(VertexId(v)));
        }
        Ok(graph)
    }

    fn reachable_from_root(&self) -> Vec<bool> {
        let mut seen = vec![false; self.vertex_count()];
        let mut stack = vec![self.root];
        seen[self.root.0] = true;
        while let Some(x) = stack.pop() {
            for &(y, _) in &self.adjacency[x.0] {
                if !seen[y.0] {
                    seen[y.0] = true;
                    stack.push(y);
                }
            }
        }
        seen
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    /// Number of non-root vertices (the `n` of the `n + 1` vertex convention).
    pub fn n(&self) -> usize {
        self.vertex_count() - 1
    }

    pub fn root(&self) -> VertexId {
        self.root
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e.0]
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (0..self.vertex_count()).map(VertexId)
    }

    /// Non-root vertices in increasing id order.
    pub fn non_root(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices().filter(move |&v| v != self.root)
    }

    /// Neighbours with connecting edges, sorted by neighbour id.
    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, EdgeId)] {
        &self.adjacency[v.0]
    }

    pub fn edge_between(&self, a: VertexId, b: VertexId) -> Option<EdgeId> {
        self.adjacency[a.0].iter().find(|(x, _)| *x == b).map(|&(_, e)| e)
    }

    pub fn label(&self, v: VertexId) -> &str {
        &self.labels[v.0]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn vertex_by_label(&self, label: &str) -> Option<VertexId> {
        self.labels.iter().position(|l| l == label).map(VertexId)
    }

    pub fn total_length(&self) -> Rational {
        rational::sum(self.edges.iter().map(|e| &e.length))
    }

    pub fn is_tree(&self) -> bool {
        self.edges.len() + 1 == self.vertex_count()
    }

    pub fn is_unweighted(&self) -> bool {
        self.edges.iter().all(|e| e.length.is_one())
    }

    /// A tree whose every edge is incident to the root.
    pub fn is_star(&self) -> bool {
        self.is_tree() && self.edges.iter().all(|e| e.touches(self.root))
    }

    pub fn distances(&self) -> &DistanceMap {
        self.distances.get_or_init(|| shortest_distances(self))
    }

    pub fn radius(&self) -> Rational {
        self.distances().dist.iter().max().cloned().unwrap_or_else(Rational::zero)
    }

    /// Multi-source Dijkstra; each vertex's predecessor is its smallest-id
    /// neighbour on some shortest path from the source set.
    pub fn dijkstra_from(&self, sources: &[VertexId]) -> (Vec<Option<Rational>>, Vec<Option<(VertexId, EdgeId)>>) {
        let n = self.vertex_count();
        let mut dist: Vec<Option<Rational>> = vec![None; n];
        let mut heap = BinaryHeap::new();
        for &s in sources {
            dist[s.0] = Some(Rational::zero());
            heap.push(Reverse((Rational::zero(), s.0)));
        }
        let mut done = vec![false; n];
        while let Some(Reverse((dx, x))) = heap.pop() {
            if done[x] {
                continue;
            }
            done[x] = true;
            for &(y, e) in &self.adjacency[x] {
                let cand = &dx + &self.edges[e.0].length;
                let better = match &dist[y.0] {
                    None => true,
                    Some(cur) => cand < *cur,
                };
                if better {
                    dist[y.0] = Some(cand.clone());
                    heap.push(Reverse((cand, y.0)));
                }
            }
        }
        let mut pred = vec![None; n];
        for v in 0..n {
            let Some(dv) = &dist[v] else { continue };
            if dv.is_zero() {
                continue;
            }
            pred[v] = self.adjacency[v]
                .iter()
                .find(|(u, e)| dist[u.0].as_ref().is_some_and(|du| &(du + &self.edges[e.0].length) == dv))
                .copied();
        }
        (dist, pred)
    }

    /// Edges on the shortest path from `sources` to `target`, in walking
    /// order from the source side.
    pub fn shortest_path_edges(&self, sources: &[VertexId], target: VertexId) -> Vec<EdgeId> {
        let (_, pred) = self.dijkstra_from(sources);
        let mut path = Vec::new();
        let mut x = target;
        while let Some((p, e)) = pred[x.0] {
            path.push(e);
            x = p;
        }
        path.reverse();
        path
    }
}

pub fn shortest_distances(g: &RootedGraph) -> DistanceMap {
    let (dist, pred) = g.dijkstra_from(&[g.root]);
    let dist: Vec<Rational> = dist.into_iter().map(|d| d.expect("graph is connected")).collect();
    let parent = pred.iter().map(|p| p.map(|(u, _)| u)).collect();
    let parent_edge = pred.iter().map(|p| p.map(|(_, e)| e)).collect();
    let lambda = pred
        .iter()
        .map(|p| p.map_or_else(Rational::zero, |(_, e)| g.edges[e.0].length.clone()))
        .collect();
    DistanceMap { dist, parent, parent_edge, lambda }
}

/// `{v : d(v) <= r}` in increasing id order; always contains the root.
pub fn ball_vertices(g: &RootedGraph, r: &Rational) -> Vec<VertexId> {
    let dm = g.distances();
    g.vertices().filter(|v| dm.d(*v) <= r).collect()
}

/// Subgraph induced on a vertex set containing the root, renumbered in
/// increasing original id.
pub fn induced_subgraph(g: &RootedGraph, keep: &[VertexId]) -> Result<MappedGraph> {
    let mut index = vec![None; g.vertex_count()];
    let mut origin: Vec<VertexId> = keep.to_vec();
    origin.sort();
    origin.dedup();
    for (new, old) in origin.iter().enumerate() {
        index[old.0] = Some(new);
    }
    let root = index[g.root.0].ok_or(Error::NotARootedSubtree)?;
    let edges: Vec<_> = g
        .edges
        .iter()
        .filter_map(|e| Some((index[e.u.0]?, index[e.v.0]?, e.length.clone())))
        .collect();
    let labels = origin.iter().map(|v| g.labels[v.0].clone()).collect();
    let graph = RootedGraph::from_parts(labels, &edges, root)?;
    Ok(MappedGraph { graph, origin })
}

/// The subgraph `G_r` induced on the closed ball of radius `r`.
pub fn induced_ball_subgraph(g: &RootedGraph, r: &Rational) -> MappedGraph {
    induced_subgraph(g, &ball_vertices(g, r)).expect("a ball around the root is connected")
}

/// Spanning tree made of the chosen parent edges; vertex ids are unchanged
/// and edges keep their relative order.
pub fn shortest_path_tree(g: &RootedGraph) -> RootedGraph {
    let dm = g.distances();
    let mut chosen: Vec<EdgeId> = dm.parent_edge.iter().flatten().copied().collect();
    chosen.sort();
    let edges: Vec<_> = chosen
        .iter()
        .map(|e| {
            let e = g.edge(*e);
            (e.u.0, e.v.0, e.length.clone())
        })
        .collect();
    RootedGraph::from_parts(g.labels.clone(), &edges, g.root.0).expect("parent edges span the graph")
}

/// Merges every vertex touched by `searched` into the root. Edges that would
/// become parallel keep the minimum length; edges inside the merged region
/// disappear. An empty edge set returns the graph unchanged.
pub fn contract_to_root(g: &RootedGraph, searched: &[EdgeId]) -> Result<MappedGraph> {
    let n = g.vertex_count();
    let mut merged = vec![false; n];
    merged[g.root.0] = true;
    let mut unique: Vec<EdgeId> = searched.to_vec();
    unique.sort();
    unique.dedup();
    for e in &unique {
        if e.0 >= g.edge_count() {
            return Err(Error::UnknownEdge(e.0));
        }
    }
    // A subtree containing the root: grow from the root one incident edge at a time.
    let mut pending = unique.clone();
    let mut progress = true;
    while progress && !pending.is_empty() {
        progress = false;
        let mut rest = Vec::new();
        for e in pending {
            let edge = g.edge(e);
            match (merged[edge.u.0], merged[edge.v.0]) {
                (true, true) => return Err(Error::NotARootedSubtree),
                (true, false) => {
                    merged[edge.v.0] = true;
                    progress = true;
                }
                (false, true) => {
                    merged[edge.u.0] = true;
                    progress = true;
                }
                (false, false) => rest.push(e),
            }
        }
        pending = rest;
    }
    if !pending.is_empty() {
        return Err(Error::NotARootedSubtree);
    }

    let mut index = vec![0usize; n];
    let mut origin = vec![g.root];
    for v in g.vertices() {
        if merged[v.0] {
            index[v.0] = 0;
        } else {
            index[v.0] = origin.len();
            origin.push(v);
        }
    }
    let mut best: BTreeMap<(usize, usize), (usize, Rational)> = BTreeMap::new();
    for (id, e) in g.edges.iter().enumerate() {
        let (a, b) = (index[e.u.0], index[e.v.0]);
        if a == b {
            continue;
        }
        let key = (a.min(b), a.max(b));
        match best.get(&key) {
            Some((_, len)) if *len <= e.length => {}
            _ => {
                best.insert(key, (id, e.length.clone()));
            }
        }
    }
    let mut kept: Vec<(usize, (usize, usize), Rational)> =
        best.into_iter().map(|(k, (id, len))| (id, k, len)).collect();
    kept.sort_by_key(|(id, _, _)| *id);
    let edges: Vec<_> = kept
        .into_iter()
        .map(|(id, (a, b), len)| {
            // keep the original orientation where possible
            let e = g.edge(EdgeId(id));
            if index[e.u.0] == a {
                (a, b, len)
            } else {
                (b, a, len)
            }
        })
        .collect();
    let labels = origin.iter().map(|v| g.labels[v.0].clone()).collect();
    let graph = RootedGraph::from_parts(labels, &edges, 0)?;
    Ok(MappedGraph { graph, origin })
}

/// Star on the same vertex set with one root edge of length `d(v)` per vertex.
pub fn star_closure(g: &RootedGraph) -> RootedGraph {
    let dm = g.distances();
    let edges: Vec<_> = g.non_root().map(|v| (g.root.0, v.0, dm.d(v).clone())).collect();
    RootedGraph::from_parts(g.labels.clone(), &edges, g.root.0).expect("star closure is valid")
}

/// Star with leaves `1..=n` in the given order of lengths, rooted at 0.
pub fn star(lengths: &[Rational]) -> Result<RootedGraph> {
    let edges: Vec<_> = lengths.iter().enumerate().map(|(i, l)| (0, i + 1, l.clone())).collect();
    build_graph(lengths.len() + 1, &edges, 0)
}


#[cfg(test)]
pub(crate) mod props {
    use super::*;
    use crate::rational::int;
    use proptest::prelude::*;

    /// Connected graph: random spanning tree plus optional extra edges.
    pub fn arb_graph(max_n: usize) -> impl Strategy<Value = RootedGraph> {
        (2..=max_n).prop_flat_map(|n| {
            let parents = (1..n).map(|i| 0..i).collect::<Vec<_>>();
            let extra = proptest::collection::vec((0..n, 0..n, 1i64..6), 0..n);
            (parents, proptest::collection::vec(1i64..6, n - 1), extra).prop_map(move |(par, lens, extra)| {
                let mut edges: Vec<(usize, usize, Rational)> =
                    par.iter().enumerate().map(|(i, &p)| (p, i + 1, int(lens[i]))).collect();
                let mut seen: std::collections::HashSet<(usize, usize)> =
                    edges.iter().map(|(a, b, _)| (*a.min(b), *a.max(b))).collect();
                for (a, b, l) in extra {
                    if a != b && seen.insert((a.min(b), a.max(b))) {
                        edges.push((a, b, int(l)));
                    }
                }
                build_graph(n, &edges, 0).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn parent_structure(g in arb_graph(8)) {
            let dm = g.distances();
            for v in g.non_root() {
                let p = dm.parent[v.0].unwrap();
                prop_assert!(dm.d(p) < dm.d(v));
                prop_assert_eq!(dm.d(p) + dm.lambda(v), dm.d(v).clone());
                prop_assert!(*dm.d(v) >= int(1));
            }
        }

        #[test]
        fn derived_graphs_preserve_distances(g in arb_graph(8)) {
            let dm = g.distances();
            let closure = star_closure(&g);
            prop_assert_eq!(&closure.distances().dist, &dm.dist);
            let t = shortest_path_tree(&g);
            prop_assert!(t.is_tree());
            prop_assert_eq!(&t.distances().dist, &dm.dist);
        }

        #[test]
        fn balls_are_nested(g in arb_graph(8)) {
            let mut radii: Vec<Rational> = g.distances().dist.clone();
            radii.sort();
            let mut prev: Vec<VertexId> = vec![];
            for r in radii {
                let cur = ball_vertices(&g, &r);
                prop_assert!(prev.iter().all(|v| cur.contains(v)));
                prev = cur;
            }
        }

        #[test]
        fn contraction_never_increases_distance(g in arb_graph(8), take in 0usize..8) {
            // contract a prefix of the shortest-path tree grown in distance order
            let dm = g.distances();
            let mut order: Vec<VertexId> = g.non_root().collect();
            order.sort_by(|a, b| dm.d(*a).cmp(dm.d(*b)).then(a.cmp(b)));
            let chosen: Vec<EdgeId> = order.iter().take(take).map(|v| dm.parent_edge[v.0].unwrap()).collect();
            let c = contract_to_root(&g, &chosen).unwrap();
            for (new, old) in c.origin.iter().enumerate().skip(1) {
                prop_assert!(c.graph.distances().dist[new] <= dm.dist[old.0]);
            }
        }
    }
}
