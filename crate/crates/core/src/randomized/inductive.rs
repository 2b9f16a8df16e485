//! The inductive `(n+1)/2` strategy for unweighted graphs, and lifting star
//! strategies to arbitrary graphs.

use num_traits::One;

use crate::error::{Error, Result};
use crate::graph::{induced_subgraph, star_closure, EdgeId, RootedGraph, VertexId};
use crate::rational::{self, Rational};
use crate::search::{cheapest_link, validate_search, ExpandingSearch, MixedSearch};

/// Removes a farthest vertex `v*` (largest id among ties), solves the rest
/// recursively as `s`, and mixes "shortest path to `v*`, then `s`" with
/// probability `1/(2 d(v*))` against "`s`, then `v*`".
pub fn unweighted_inductive_strategy(g: &RootedGraph) -> Result<MixedSearch> {
    if !g.is_unweighted() {
        return Err(Error::UnsupportedGraphClass("weighted graph"));
    }
    if g.n() == 0 {
        return Err(Error::EmptySet);
    }
    inductive(g)
}

fn inductive(g: &RootedGraph) -> Result<MixedSearch> {
    let dm = g.distances();
    if g.n() == 1 {
        let v = g.non_root().next().expect("one vertex");
        let e = cheapest_link(g, &root_only(g), v).expect("connected");
        return Ok(MixedSearch::point(validate_search(g, &[e])?));
    }
    let far = g
        .non_root()
        .max_by(|a, b| dm.d(*a).cmp(dm.d(*b)).then(a.cmp(b)))
        .expect("non-root vertex");
    let keep: Vec<VertexId> = g.vertices().filter(|&v| v != far).collect();
    let sub = induced_subgraph(g, &keep)?;
    let inner = inductive(&sub.graph)?;

    let lift_edge = |e: EdgeId| {
        let edge = sub.graph.edge(e);
        g.edge_between(sub.origin[edge.u.0], sub.origin[edge.v.0]).expect("induced edge")
    };
    let p = Rational::one() / (rational::int(2) * dm.d(far));
    let q = Rational::one() - &p;
    let path: Vec<EdgeId> = g.shortest_path_edges(&[g.root()], far);

    let mut weights = Vec::with_capacity(2 * inner.support().len());
    for (s, w) in inner.support() {
        let base: Vec<EdgeId> = s.edges().iter().map(|&e| lift_edge(e)).collect();

        let mut reached = root_only(g);
        let mut first = Vec::with_capacity(g.n());
        for &e in path.iter().chain(&base) {
            let edge = g.edge(e);
            if reached[edge.u.0] && reached[edge.v.0] {
                continue;
            }
            reached[edge.u.0] = true;
            reached[edge.v.0] = true;
            first.push(e);
        }
        weights.push((validate_search(g, &first)?, w * &p));

        let mut reached = vec![true; g.vertex_count()];
        reached[far.0] = false;
        let mut last = base;
        last.push(cheapest_link(g, &reached, far).expect("connected"));
        weights.push((validate_search(g, &last)?, w * &q));
    }
    MixedSearch::merged(weights)
}

fn root_only(g: &RootedGraph) -> Vec<bool> {
    let mut r = vec![false; g.vertex_count()];
    r[g.root().0] = true;
    r
}

/// Follows a vertex order on `g`, appending a shortest path from the
/// searched region to each vertex not yet reached.
pub fn lift_star_search(g: &RootedGraph, order: &[VertexId]) -> Result<ExpandingSearch> {
    let mut reached = root_only(g);
    let mut edges = Vec::with_capacity(g.n());
    for &v in order {
        if v.0 >= g.vertex_count() {
            return Err(Error::VertexOutOfRange { vertex: v.0, count: g.vertex_count() });
        }
        if reached[v.0] {
            continue;
        }
        let sources: Vec<VertexId> = g.vertices().filter(|u| reached[u.0]).collect();
        for e in g.shortest_path_edges(&sources, v) {
            let edge = g.edge(e);
            reached[edge.u.0] = true;
            reached[edge.v.0] = true;
            edges.push(e);
        }
    }
    validate_search(g, &edges)
}

/// Lifts every support search of a strategy on the star closure of `g`.
pub fn lift_star_strategy(g: &RootedGraph, star_mixed: &MixedSearch) -> Result<MixedSearch> {
    star_mixed.validate_on(&star_closure(g))?;
    MixedSearch::merged(
        star_mixed
            .support()
            .iter()
            .map(|(s, p)| Ok((lift_star_search(g, s.order())?, p.clone())))
            .collect::<Result<Vec<_>>>()?,
    )
}
