//! Randomized Searcher strategies.

pub mod deepening;
pub mod inductive;
pub mod star;

use crate::error::{Error, Result};
use crate::graph::{RootedGraph, VertexId};
use crate::rational::Rational;
use crate::search::{validate_search, ExpandingSearch, MixedSearch};

pub use deepening::{deepening_ratio_estimate, DeepeningEstimate, DeepeningSample, DeepeningSampler, CI_Z99};
pub use inductive::{lift_star_search, lift_star_strategy, unweighted_inductive_strategy};
pub use star::{game_value_v, star_recursive_mixed, star_recursive_strategy, star_rho_formula, StarState, StarTrace};

/// Depth-first search of a tree from the root. With `reverse` the children
/// of every vertex are taken in decreasing id order, which reaches the
/// leaves in the opposite order.
pub fn dfs_search(h: &RootedGraph, reverse: bool) -> Result<ExpandingSearch> {
    if !h.is_tree() {
        return Err(Error::NotATree);
    }
    let mut edges = Vec::with_capacity(h.n());
    let mut stack = vec![(h.root(), None)];
    let mut seen = vec![false; h.vertex_count()];
    while let Some((x, via)) = stack.pop() {
        seen[x.0] = true;
        edges.extend(via);
        let kids = h.neighbors(x).iter().filter(|(y, _)| !seen[y.0]);
        let mut kids: Vec<_> = kids.copied().collect();
        if !reverse {
            kids.reverse();
        }
        stack.extend(kids.into_iter().map(|(y, e)| (y, Some(e))));
    }
    validate_search(h, &edges)
}

/// Equal mixture of a depth-first search and its leaf-reversed twin.
pub fn rdfs(h: &RootedGraph) -> Result<MixedSearch> {
    let half = Rational::new(1.into(), 2.into());
    MixedSearch::merged([(dfs_search(h, false)?, half.clone()), (dfs_search(h, true)?, half)])
}

/// `(λ(H) + d(v)) / 2`, the expected time of a leaf under [`rdfs`].
pub fn rdfs_leaf_time(h: &RootedGraph, v: VertexId) -> Rational {
    (h.total_length() + h.distances().d(v)) / Rational::from_integer(2.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::gen::fig1;
    use crate::graph::{build_graph, star, EdgeId};
    use crate::rational::{frac, int};
    use crate::search::mixed_payoffs;
    use proptest::prelude::*;

    #[test]
    fn dfs_orders() {
        let g = fig1();
        assert_eq!(dfs_search(&g, false).unwrap().order(), [VertexId(1), VertexId(2), VertexId(3), VertexId(4)]);
        assert_eq!(dfs_search(&g, true).unwrap().order(), [VertexId(2), VertexId(4), VertexId(3), VertexId(1)]);
        let cycle = build_graph(3, &[(0, 1, int(1)), (1, 2, int(1)), (0, 2, int(1))], 0).unwrap();
        assert_eq!(dfs_search(&cycle, false), Err(Error::NotATree));
    }

    #[test]
    fn rdfs_examples() {
        let g = star(&[int(1), int(1)]).unwrap();
        let p = mixed_payoffs(&g, &rdfs(&g).unwrap());
        assert_eq!(p.expected_time[1], frac(3, 2));
        assert_eq!(p.expected_time[2], frac(3, 2));

        let path = build_graph(3, &[(0, 1, int(1)), (1, 2, int(1))], 0).unwrap();
        let s = rdfs(&path).unwrap();
        assert_eq!(s.support().len(), 1);
        assert_eq!(mixed_payoffs(&path, &s).expected_time[2], int(2));

        let g = fig1();
        let p = mixed_payoffs(&g, &rdfs(&g).unwrap());
        assert_eq!(p.expected_time[4], frac(11, 2));
        assert_eq!(rdfs_leaf_time(&g, VertexId(4)), frac(11, 2));
        // B is internal: the subtree below it is never paid for before it
        assert_eq!(p.expected_time[2], frac(7, 2));
        assert!(p.expected_time[2] < rdfs_leaf_time(&g, VertexId(2)));
    }

    fn arb_tree(max_n: usize) -> impl Strategy<Value = RootedGraph> {
        (1..max_n)
            .prop_flat_map(|n| {
                (
                    proptest::collection::vec(any::<prop::sample::Index>(), n),
                    proptest::collection::vec(1i64..6, n),
                )
            })
            .prop_map(|(parents, lens)| {
                let edges: Vec<_> =
                    parents.iter().zip(lens).enumerate().map(|(i, (p, l))| (p.index(i + 1), i + 1, int(l))).collect();
                build_graph(edges.len() + 1, &edges, 0).unwrap()
            })
    }

    proptest! {
        #[test]
        fn rdfs_average_on_leaves_and_below_elsewhere(g in arb_tree(10)) {
            let p = mixed_payoffs(&g, &rdfs(&g).unwrap());
            let dm = g.distances();
            for v in g.non_root() {
                let leaf = g.neighbors(v).len() == 1;
                // the untouched subtree under an internal vertex is exactly the shortfall
                let below: Rational = g
                    .non_root()
                    .filter(|&u| u != v && is_ancestor(&g, v, u))
                    .map(|u| dm.lambda(u).clone())
                    .fold(int(0), |a, x| a + x);
                prop_assert_eq!(&p.expected_time[v.0] + &below / int(2), rdfs_leaf_time(&g, v));
                if leaf {
                    prop_assert_eq!(&p.expected_time[v.0], &rdfs_leaf_time(&g, v));
                }
            }
        }
    }

    fn is_ancestor(g: &RootedGraph, a: VertexId, mut u: VertexId) -> bool {
        let dm = g.distances();
        while let Some(p) = dm.parent[u.0] {
            if p == a {
                return true;
            }
            u = p;
        }
        false
    }

    #[test]
    fn reverse_dfs_uses_every_edge_once() {
        let g = fig1();
        let mut e: Vec<EdgeId> = dfs_search(&g, true).unwrap().edges().to_vec();
        e.sort();
        assert_eq!(e, (0..4).map(EdgeId).collect::<Vec<_>>());
    }
}
