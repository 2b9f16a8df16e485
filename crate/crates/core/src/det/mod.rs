//! Deterministic searches: the distance order on trees and unweighted
//! graphs, a doubling strategy built from Steiner trees, and an exhaustive
//! branch-and-bound for the exact search ratio.

pub mod steiner;

use std::collections::VecDeque;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{ball_vertices, EdgeId, RootedGraph, VertexId};
use crate::oracle::enumerate::{check_cap, frontier};
use crate::rational::{self, Rational};
use crate::search::{search_ratio, validate_search, ExpandingSearch};

pub use steiner::{steiner_tree, SteinerMode, SteinerResult, MAX_EXACT_TERMINALS};

fn require_tree_or_unweighted(g: &RootedGraph) -> Result<()> {
    if g.is_tree() || g.is_unweighted() {
        Ok(())
    } else {
        Err(Error::UnsupportedGraphClass("weighted graph that is not a tree"))
    }
}

/// Visits vertices by increasing distance (ties by id), each through its
/// shortest-path-tree parent edge. Optimal on trees and unweighted graphs.
pub fn distance_order_search(g: &RootedGraph) -> Result<(ExpandingSearch, Rational)> {
    require_tree_or_unweighted(g)?;
    let dm = g.distances();
    let mut order: Vec<VertexId> = g.non_root().collect();
    order.sort_by(|a, b| dm.d(*a).cmp(dm.d(*b)).then(a.cmp(b)));
    let edges: Vec<EdgeId> = order.iter().map(|v| dm.parent_edge[v.0].expect("non-root vertex")).collect();
    let s = validate_search(g, &edges)?;
    let ratio = search_ratio(g, &s).ratio;
    Ok((s, ratio))
}

/// `σ` as a maximum over the finitely many radii `r ∈ {d(v)}`: the tree
/// length of the ball over `r` on trees, its vertex count minus one over `r`
/// on unweighted graphs.
pub fn sigma_closed_form(g: &RootedGraph) -> Result<Rational> {
    require_tree_or_unweighted(g)?;
    let dm = g.distances();
    let mut radii: Vec<&Rational> = g.non_root().map(|v| dm.d(v)).collect();
    radii.sort();
    radii.dedup();
    let tree = g.is_tree();
    let best = radii
        .into_iter()
        .map(|r| {
            let inside = g.non_root().filter(|v| dm.d(*v) <= r);
            let size = if tree {
                rational::sum(inside.map(|v| dm.lambda(v)))
            } else {
                Rational::from_integer((inside.count() as i64).into())
            };
            size / r
        })
        .max();
    Ok(best.unwrap_or_else(Rational::zero))
}

/// Exact `σ(G)` over every dominance-reduced search, by branch and bound.
/// Among optimal searches the lexicographically smallest vertex order wins.
pub fn brute_force_sigma(g: &RootedGraph, cap: u128) -> Result<(Rational, ExpandingSearch)> {
    check_cap(g, cap)?;
    if g.n() == 0 {
        return Ok((Rational::zero(), ExpandingSearch::from_parts_unchecked(vec![], vec![])));
    }
    let mut reached = vec![false; g.vertex_count()];
    reached[g.root().0] = true;
    let first = frontier(g, &reached);
    let best = first
        .par_iter()
        .filter_map(|&(v, e)| {
            let mut b = Bnb {
                g,
                reached: reached.clone(),
                edges: vec![e],
                order: vec![v],
                best: None,
            };
            b.reached[v.0] = true;
            let len = &g.edge(e).length;
            let ratio = len / g.distances().d(v);
            b.descend(len.clone(), ratio);
            b.best
        })
        .min_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.order().cmp(b.1.order())))
        .expect("some vertex is adjacent to the root");
    Ok(best)
}

struct Bnb<'a> {
    g: &'a RootedGraph,
    reached: Vec<bool>,
    edges: Vec<EdgeId>,
    order: Vec<VertexId>,
    best: Option<(Rational, ExpandingSearch)>,
}

impl Bnb<'_> {
    fn beaten(&self, x: &Rational) -> bool {
        self.best.as_ref().is_some_and(|(b, _)| x >= b)
    }

    fn descend(&mut self, elapsed: Rational, worst: Rational) {
        if self.beaten(&worst) {
            return;
        }
        if self.order.len() == self.g.n() {
            let s = ExpandingSearch::from_parts_unchecked(self.edges.clone(), self.order.clone());
            self.best = Some((worst, s));
            return;
        }
        // every unreached vertex is found at least one unit later
        let dm = self.g.distances();
        let next = &elapsed + Rational::one();
        let bound = self
            .g
            .non_root()
            .filter(|v| !self.reached[v.0])
            .map(|v| &next / dm.d(v))
            .max()
            .expect("unreached vertex");
        if self.beaten(&bound) {
            return;
        }
        for (v, e) in frontier(self.g, &self.reached) {
            let t = &elapsed + &self.g.edge(e).length;
            let r = &t / dm.d(v);
            let w = if r > worst { r } else { worst.clone() };
            self.reached[v.0] = true;
            self.edges.push(e);
            self.order.push(v);
            self.descend(t, w);
            self.order.pop();
            self.edges.pop();
            self.reached[v.0] = false;
        }
    }
}

/// One doubling phase: the tree spanning the ball of radius `radius`.
#[derive(Clone, Debug, PartialEq)]
pub struct DoublingPhase {
    pub radius: Rational,
    pub terminals: usize,
    pub tree_length: Rational,
    /// Edges of this phase that were new to the search.
    pub searched: Vec<EdgeId>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DoublingResult {
    pub search: ExpandingSearch,
    pub ratio: Rational,
    /// `σ_S ≤ certified_factor · σ`: 4 with exact trees, 8 with the 2-approximation.
    pub certified_factor: u32,
    pub phases: Vec<DoublingPhase>,
}

/// Searches Steiner trees of the balls of radius `1, 2, 4, …` in turn, each
/// root to leaf, skipping edges to already reached vertices.
pub fn doubling_search(g: &RootedGraph, mode: SteinerMode) -> Result<DoublingResult> {
    let radius = g.radius();
    let mut reached = vec![false; g.vertex_count()];
    reached[g.root().0] = true;
    let mut edges = Vec::with_capacity(g.n());
    let mut phases = Vec::new();
    let mut j = 0u32;
    loop {
        let r = rational::pow2(j);
        let terms = ball_vertices(g, &r);
        let tree = steiner_tree(g, &terms, mode)?;
        let mut searched = Vec::new();
        for (child, e) in root_to_leaf(g, &tree.edges) {
            if !reached[child.0] {
                reached[child.0] = true;
                searched.push(e);
            }
        }
        edges.extend_from_slice(&searched);
        phases.push(DoublingPhase { radius: r.clone(), terminals: terms.len(), tree_length: tree.total_length, searched });
        if r >= radius {
            break;
        }
        j += 1;
    }
    let search = validate_search(g, &edges)?;
    let ratio = search_ratio(g, &search).ratio;
    Ok(DoublingResult { search, ratio, certified_factor: 2 * 2 * mode.approximation_factor(), phases })
}

/// Tree edges in breadth-first order from the root, children by id, each
/// paired with the vertex it leads to.
fn root_to_leaf(g: &RootedGraph, tree: &[EdgeId]) -> Vec<(VertexId, EdgeId)> {
    let mut adj: Vec<Vec<(VertexId, EdgeId)>> = vec![vec![]; g.vertex_count()];
    for &e in tree {
        let edge = g.edge(e);
        adj[edge.u.0].push((edge.v, e));
        adj[edge.v.0].push((edge.u, e));
    }
    for list in &mut adj {
        list.sort();
    }
    let mut seen = vec![false; g.vertex_count()];
    seen[g.root().0] = true;
    let mut out = Vec::with_capacity(tree.len());
    let mut queue = VecDeque::from([g.root()]);
    while let Some(x) = queue.pop_front() {
        for &(y, e) in &adj[x.0] {
            if !seen[y.0] {
                seen[y.0] = true;
                out.push((y, e));
                queue.push_back(y);
            }
        }
    }
    out
}
