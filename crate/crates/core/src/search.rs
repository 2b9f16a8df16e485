//! Expanding searches, their payoffs, and Hider-side lower bounds.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, RootedGraph, VertexId};
use crate::rational::{self, Rational};

/// An edge sequence whose every prefix is a subtree containing the root,
/// reaching every vertex. Each edge introduces exactly one new vertex,
/// recorded in `order`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExpandingSearch {
    edges: Vec<EdgeId>,
    order: Vec<VertexId>,
}

impl ExpandingSearch {
    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    /// Non-root vertices in the order they are reached.
    pub fn order(&self) -> &[VertexId] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Vertex order connected greedily: each vertex joins the searched tree
    /// by a minimum-length edge (smallest edge id on ties).
    pub fn from_vertex_order(g: &RootedGraph, order: &[VertexId]) -> Result<ExpandingSearch> {
        let mut reached = vec![false; g.vertex_count()];
        reached[g.root().0] = true;
        let mut edges = Vec::with_capacity(order.len());
        for (pos, &v) in order.iter().enumerate() {
            if v.0 >= g.vertex_count() {
                return Err(Error::VertexOutOfRange { vertex: v.0, count: g.vertex_count() });
            }
            if reached[v.0] {
                return Err(Error::PrefixNotTree { position: pos });
            }
            let e = cheapest_link(g, &reached, v).ok_or(Error::PrefixNotTree { position: pos })?;
            reached[v.0] = true;
            edges.push(e);
        }
        let missing = reached.iter().filter(|r| !**r).count();
        if missing > 0 {
            return Err(Error::IncompleteCover { missing });
        }
        Ok(ExpandingSearch { edges, order: order.to_vec() })
    }

    pub(crate) fn from_parts_unchecked(edges: Vec<EdgeId>, order: Vec<VertexId>) -> ExpandingSearch {
        ExpandingSearch { edges, order }
    }
}

/// Minimum-length edge from `v` into the reached set, smallest id on ties.
pub(crate) fn cheapest_link(g: &RootedGraph, reached: &[bool], v: VertexId) -> Option<EdgeId> {
    g.neighbors(v)
        .iter()
        .filter(|(u, _)| reached[u.0])
        .map(|&(_, e)| e)
        .min_by(|a, b| g.edge(*a).length.cmp(&g.edge(*b).length).then(a.cmp(b)))
}

/// Checks that `edges` is an expanding search of `g`.
pub fn validate_search(g: &RootedGraph, edges: &[EdgeId]) -> Result<ExpandingSearch> {
    let mut reached = vec![false; g.vertex_count()];
    reached[g.root().0] = true;
    let mut order = Vec::with_capacity(edges.len());
    for (pos, &e) in edges.iter().enumerate() {
        if e.0 >= g.edge_count() {
            return Err(Error::UnknownEdge(e.0));
        }
        let edge = g.edge(e);
        let fresh = match (reached[edge.u.0], reached[edge.v.0]) {
            (true, false) => edge.v,
            (false, true) => edge.u,
            _ => return Err(Error::PrefixNotTree { position: pos }),
        };
        reached[fresh.0] = true;
        order.push(fresh);
    }
    let missing = reached.iter().filter(|r| !**r).count();
    if missing > 0 {
        return Err(Error::IncompleteCover { missing });
    }
    Ok(ExpandingSearch { edges: edges.to_vec(), order })
}

/// Per-vertex search times `T(S, v)` and normalized times `T(S, v) / d(v)`,
/// indexed by vertex id. Root entries are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct PayoffTable {
    pub time: Vec<Rational>,
    pub normalized: Vec<Rational>,
}

pub fn search_times(g: &RootedGraph, s: &ExpandingSearch) -> PayoffTable {
    check_fits(g, s).expect("search belongs to this graph");
    let dm = g.distances();
    let mut time = vec![Rational::zero(); g.vertex_count()];
    let mut normalized = vec![Rational::zero(); g.vertex_count()];
    let mut elapsed = Rational::zero();
    for (&e, &v) in s.edges.iter().zip(&s.order) {
        elapsed += &g.edge(e).length;
        normalized[v.0] = &elapsed / dm.d(v);
        time[v.0] = elapsed.clone();
    }
    PayoffTable { time, normalized }
}

/// Floating-point search times, for hot loops.
pub fn search_times_f64(lengths: &[f64], s: &ExpandingSearch, out: &mut [f64]) {
    let mut elapsed = 0.0;
    for (&e, &v) in s.edges.iter().zip(&s.order) {
        elapsed += lengths[e.0];
        out[v.0] = elapsed;
    }
}

fn check_fits(g: &RootedGraph, s: &ExpandingSearch) -> Result<()> {
    if s.order.len() != g.n() || s.edges.iter().any(|e| e.0 >= g.edge_count()) {
        return Err(Error::ForeignSearch(format!(
            "search of length {} on a graph with {} non-root vertices",
            s.order.len(),
            g.n()
        )));
    }
    Ok(())
}

/// A maximum over non-root vertices with its smallest-id maximizer.
#[derive(Clone, Debug, PartialEq)]
pub struct RatioWitness {
    pub ratio: Rational,
    pub witness: VertexId,
    /// Every maximizer, increasing id.
    pub witnesses: Vec<VertexId>,
}

fn max_over_vertices(g: &RootedGraph, values: &[Rational]) -> RatioWitness {
    let ratio = g.non_root().map(|v| &values[v.0]).max().cloned().unwrap_or_else(Rational::zero);
    let witnesses: Vec<VertexId> = g.non_root().filter(|v| values[v.0] == ratio).collect();
    RatioWitness { witness: witnesses.first().copied().unwrap_or(g.root()), ratio, witnesses }
}

/// `σ_S(G)`: the largest normalized search time.
pub fn search_ratio(g: &RootedGraph, s: &ExpandingSearch) -> RatioWitness {
    max_over_vertices(g, &search_times(g, s).normalized)
}

/// A finite probability distribution over expanding searches.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedSearch {
    support: Vec<(ExpandingSearch, Rational)>,
}

impl MixedSearch {
    pub fn new(support: Vec<(ExpandingSearch, Rational)>) -> Result<MixedSearch> {
        if support.is_empty() {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        if support.iter().any(|(_, p)| p.is_negative()) {
            return Err(Error::InvalidDistribution("negative probability".into()));
        }
        let total = rational::sum(support.iter().map(|(_, p)| p));
        if !total.is_one() {
            return Err(Error::InvalidDistribution(format!("probabilities sum to {total}")));
        }
        let len = support[0].0.len();
        if support.iter().any(|(s, _)| s.len() != len) {
            return Err(Error::InvalidDistribution("searches of different lengths".into()));
        }
        Ok(MixedSearch { support })
    }

    pub fn point(s: ExpandingSearch) -> MixedSearch {
        MixedSearch { support: vec![(s, Rational::one())] }
    }

    /// Merges equal searches, ordering the support by search.
    pub fn merged(weights: impl IntoIterator<Item = (ExpandingSearch, Rational)>) -> Result<MixedSearch> {
        let mut acc: BTreeMap<ExpandingSearch, Rational> = BTreeMap::new();
        for (s, p) in weights {
            *acc.entry(s).or_insert_with(Rational::zero) += p;
        }
        MixedSearch::new(acc.into_iter().filter(|(_, p)| !p.is_zero()).collect())
    }

    pub fn support(&self) -> &[(ExpandingSearch, Rational)] {
        &self.support
    }

    pub fn validate_on(&self, g: &RootedGraph) -> Result<()> {
        for (s, _) in &self.support {
            validate_search(g, s.edges())?;
        }
        Ok(())
    }
}

/// Expected search times of a mixed search.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedPayoffs {
    pub expected_time: Vec<Rational>,
    pub normalized: Vec<Rational>,
    pub ratio: RatioWitness,
}

/// `T̂(s, v)` for every vertex, and `ρ_s = max_v T̂(s, v)`.
pub fn mixed_payoffs(g: &RootedGraph, s: &MixedSearch) -> MixedPayoffs {
    let n = g.vertex_count();
    let expected_time = s
        .support
        .par_iter()
        .map(|(search, p)| {
            let table = search_times(g, search);
            table.time.into_iter().map(|t| t * p).collect::<Vec<_>>()
        })
        .reduce(
            || vec![Rational::zero(); n],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    let dm = g.distances();
    let normalized: Vec<Rational> = g
        .vertices()
        .map(|v| if v == g.root() { Rational::zero() } else { &expected_time[v.0] / dm.d(v) })
        .collect();
    let ratio = max_over_vertices(g, &normalized);
    MixedPayoffs { expected_time, normalized, ratio }
}

/// A probability distribution over the non-root vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct HiderDistribution {
    probs: Vec<Rational>,
}

impl HiderDistribution {
    /// `probs` is indexed by vertex id; the root entry must be zero.
    pub fn new(g: &RootedGraph, probs: Vec<Rational>) -> Result<HiderDistribution> {
        if probs.len() != g.vertex_count() {
            return Err(Error::InvalidDistribution(format!(
                "{} entries for {} vertices",
                probs.len(),
                g.vertex_count()
            )));
        }
        if !probs[g.root().0].is_zero() {
            return Err(Error::InvalidDistribution("root has positive probability".into()));
        }
        if probs.iter().any(|p| p.is_negative()) {
            return Err(Error::InvalidDistribution("negative probability".into()));
        }
        if !rational::sum(&probs).is_one() {
            return Err(Error::InvalidDistribution("probabilities do not sum to 1".into()));
        }
        Ok(HiderDistribution { probs })
    }

    pub fn point(g: &RootedGraph, v: VertexId) -> Result<HiderDistribution> {
        let mut probs = vec![Rational::zero(); g.vertex_count()];
        probs[v.0] = Rational::one();
        HiderDistribution::new(g, probs)
    }

    pub fn prob(&self, v: VertexId) -> &Rational {
        &self.probs[v.0]
    }

    pub fn probs(&self) -> &[Rational] {
        &self.probs
    }
}

/// `T̂(s, h) = Σ_S Σ_v p_S h_v T̂(S, v)`.
pub fn expected_payoff(g: &RootedGraph, s: &MixedSearch, h: &HiderDistribution) -> Rational {
    let payoffs = mixed_payoffs(g, s);
    g.non_root().map(|v| &payoffs.normalized[v.0] * h.prob(v)).fold(Rational::zero(), |a, x| a + x)
}

/// A certified lower bound on `ρ(G)` with the Hider strategy achieving it.
#[derive(Clone, Debug, PartialEq)]
pub struct HiderBound {
    pub bound: Rational,
    pub set: Vec<VertexId>,
    pub hider: HiderDistribution,
}

/// Hider mix on `set` with probabilities `λ_v d(v) / Δ(set)`. Every search has
/// expected normalized time at least `Σ_{i≤j} λ_i λ_j / Δ(set)` against it.
pub fn hider_set_bound(g: &RootedGraph, set: &[VertexId]) -> Result<HiderBound> {
    let mut set: Vec<VertexId> = set.to_vec();
    set.sort();
    set.dedup();
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    if let Some(v) = set.iter().find(|v| v.0 >= g.vertex_count() || **v == g.root()) {
        return Err(Error::InvalidParams(format!("vertex {v} is not a non-root vertex")));
    }
    let dm = g.distances();
    let weight = |v: &VertexId| dm.lambda(*v) * dm.d(*v);
    let delta: Rational = set.iter().map(weight).fold(Rational::zero(), |a, x| a + x);
    let lam_sum: Rational = rational::sum(set.iter().map(|v| dm.lambda(*v)));
    let lam_sq: Rational = set.iter().map(|v| dm.lambda(*v) * dm.lambda(*v)).fold(Rational::zero(), |a, x| a + x);
    // Σ_{i≤j} λ_i λ_j = (Λ² + Σ λ²) / 2 whatever the order.
    let bound = (&lam_sum * &lam_sum + lam_sq) / (rational::int(2) * &delta);
    let mut probs = vec![Rational::zero(); g.vertex_count()];
    for v in &set {
        probs[v.0] = weight(v) / &delta;
    }
    let hider = HiderDistribution::new(g, probs)?;
    Ok(HiderBound { bound, set, hider })
}

/// Best [`hider_set_bound`] over the distance prefixes `{v : d(v) ≤ r}`; with
/// `all_subsets` and at most 15 non-root vertices, over every non-empty subset.
/// Ties keep the first (smallest) set found.
pub fn best_prefix_bound(g: &RootedGraph, all_subsets: bool) -> Result<HiderBound> {
    let n = g.n();
    if n == 0 {
        return Err(Error::EmptySet);
    }
    let mut best: Option<HiderBound> = None;
    let mut consider = |set: Vec<VertexId>| -> Result<()> {
        let b = hider_set_bound(g, &set)?;
        if best.as_ref().is_none_or(|cur| b.bound > cur.bound) {
            best = Some(b);
        }
        Ok(())
    };
    if all_subsets && n <= 15 {
        let verts: Vec<VertexId> = g.non_root().collect();
        for mask in 1u32..(1 << n) {
            consider(verts.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, v)| *v).collect())?;
        }
    } else {
        let dm = g.distances();
        let mut radii: Vec<&Rational> = g.non_root().map(|v| dm.d(v)).collect();
        radii.sort();
        radii.dedup();
        for r in radii {
            consider(g.non_root().filter(|v| dm.d(*v) <= r).collect())?;
        }
    }
    Ok(best.expect("at least one candidate set"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::gen::fig1;
    use crate::graph::{build_graph, star};
    use crate::rational::{frac, int};

    fn v(i: usize) -> VertexId {
        VertexId(i)
    }

    fn edge(g: &RootedGraph, a: &str, b: &str) -> EdgeId {
        g.edge_between(g.vertex_by_label(a).unwrap(), g.vertex_by_label(b).unwrap()).unwrap()
    }

    fn fig1_example_search(g: &RootedGraph) -> ExpandingSearch {
        let s = [edge(g, "O", "B"), edge(g, "O", "A"), edge(g, "B", "D"), edge(g, "B", "C")];
        validate_search(g, &s).unwrap()
    }

    #[test]
    fn validates_fig1_example() {
        let g = fig1();
        let s = fig1_example_search(&g);
        assert_eq!(s.order(), &[v(2), v(1), v(4), v(3)]);
        let bad = [edge(&g, "B", "D"), edge(&g, "O", "B"), edge(&g, "O", "A"), edge(&g, "B", "C")];
        assert_eq!(validate_search(&g, &bad), Err(Error::PrefixNotTree { position: 0 }));
        let short = [edge(&g, "O", "B"), edge(&g, "O", "A"), edge(&g, "B", "D")];
        assert_eq!(validate_search(&g, &short), Err(Error::IncompleteCover { missing: 1 }));
    }

    #[test]
    fn rejects_cycles() {
        let g = build_graph(3, &[(0, 1, int(1)), (0, 2, int(1)), (1, 2, int(1))], 0).unwrap();
        let s = [EdgeId(0), EdgeId(1), EdgeId(2)];
        assert_eq!(validate_search(&g, &s), Err(Error::PrefixNotTree { position: 2 }));
    }

    #[test]
    fn fig1_times_and_ratio() {
        let g = fig1();
        let s = fig1_example_search(&g);
        let t = search_times(&g, &s);
        assert_eq!(t.time[4], int(6));
        assert_eq!(t.time[2], int(2));
        assert_eq!(t.time[1], int(5));
        assert_eq!(t.time[3], int(8));
        let r = search_ratio(&g, &s);
        assert_eq!(r.ratio, int(2));
        assert_eq!(r.witnesses, vec![v(3), v(4)]);
        assert_eq!(r.witness, v(3));
    }

    #[test]
    fn single_edge() {
        let g = build_graph(2, &[(0, 1, int(4))], 0).unwrap();
        let s = validate_search(&g, &[EdgeId(0)]).unwrap();
        assert_eq!(search_times(&g, &s).normalized[1], int(1));
        assert_eq!(search_ratio(&g, &s).ratio, int(1));
    }

    #[test]
    fn uniform_star_ratio_is_n() {
        let g = star(&vec![int(1); 5]).unwrap();
        let order: Vec<VertexId> = vec![v(3), v(1), v(5), v(2), v(4)];
        let s = ExpandingSearch::from_vertex_order(&g, &order).unwrap();
        let r = search_ratio(&g, &s);
        assert_eq!(r.ratio, int(5));
        assert_eq!(r.witness, v(4));
    }

    fn all_orders_uniform(g: &RootedGraph) -> MixedSearch {
        fn perms(items: &[VertexId]) -> Vec<Vec<VertexId>> {
            if items.len() <= 1 {
                return vec![items.to_vec()];
            }
            let mut out = vec![];
            for i in 0..items.len() {
                let mut rest = items.to_vec();
                let x = rest.remove(i);
                for mut p in perms(&rest) {
                    p.insert(0, x);
                    out.push(p);
                }
            }
            out
        }
        let leaves: Vec<VertexId> = g.non_root().collect();
        let ps = perms(&leaves);
        let w = frac(1, ps.len() as i64);
        MixedSearch::new(ps.iter().map(|p| (ExpandingSearch::from_vertex_order(g, p).unwrap(), w.clone())).collect())
            .unwrap()
    }

    #[test]
    fn mixed_payoffs_on_uniform_stars() {
        let g2 = star(&[int(1), int(1)]).unwrap();
        let m = all_orders_uniform(&g2);
        let p = mixed_payoffs(&g2, &m);
        assert_eq!(p.normalized[1], frac(3, 2));
        assert_eq!(p.normalized[2], frac(3, 2));
        assert_eq!(p.ratio.ratio, frac(3, 2));

        let g3 = star(&[int(1), int(1), int(1)]).unwrap();
        assert_eq!(mixed_payoffs(&g3, &all_orders_uniform(&g3)).ratio.ratio, int(2));

        let h = HiderDistribution::new(&g2, vec![int(0), frac(1, 2), frac(1, 2)]).unwrap();
        assert_eq!(expected_payoff(&g2, &m, &h), frac(3, 2));
    }

    #[test]
    fn point_mass_matches_pure_search() {
        let g = fig1();
        let s = fig1_example_search(&g);
        let m = MixedSearch::point(s.clone());
        let p = mixed_payoffs(&g, &m);
        assert_eq!(p.normalized, search_times(&g, &s).normalized);
        assert_eq!(p.ratio, search_ratio(&g, &s));
        let h = HiderDistribution::point(&g, v(4)).unwrap();
        assert_eq!(expected_payoff(&g, &m, &h), int(2));
    }

    #[test]
    fn mixed_search_validation() {
        let g = fig1();
        let s = fig1_example_search(&g);
        assert!(MixedSearch::new(vec![(s.clone(), frac(1, 2))]).is_err());
        assert!(MixedSearch::new(vec![(s.clone(), frac(3, 2)), (s.clone(), frac(-1, 2))]).is_err());
        assert!(MixedSearch::new(vec![]).is_err());
        let m = MixedSearch::merged(vec![(s.clone(), frac(1, 2)), (s.clone(), frac(1, 2))]).unwrap();
        assert_eq!(m.support().len(), 1);
        assert!(HiderDistribution::new(&g, vec![int(1), int(0), int(0), int(0), int(0)]).is_err());
    }

    #[test]
    fn hider_set_bound_examples() {
        let g = star(&[int(1), int(1), int(1)]).unwrap();
        let all: Vec<VertexId> = g.non_root().collect();
        let b = hider_set_bound(&g, &all).unwrap();
        assert_eq!(b.bound, int(2));
        assert_eq!(b.hider.prob(v(1)), &frac(1, 3));

        let single = hider_set_bound(&fig1(), &[v(4)]).unwrap();
        assert_eq!(single.bound, frac(1, 3)); // λ_D / d(D) = 1/3

        let g12 = star(&[int(1), int(2)]).unwrap();
        assert_eq!(hider_set_bound(&g12, &[v(1), v(2)]).unwrap().bound, frac(7, 5));
        assert_eq!(hider_set_bound(&g12, &[]), Err(Error::EmptySet));
    }

    #[test]
    fn best_prefix_examples() {
        let g4 = star(&vec![int(1); 4]).unwrap();
        let b = best_prefix_bound(&g4, false).unwrap();
        assert_eq!(b.bound, frac(5, 2));
        assert_eq!(b.set.len(), 4);

        let g12 = star(&[int(1), int(2)]).unwrap();
        let b = best_prefix_bound(&g12, false).unwrap();
        assert_eq!(b.bound, frac(7, 5));
        assert_eq!(b.set, vec![v(1), v(2)]);
        assert_eq!(best_prefix_bound(&g12, true).unwrap().bound, frac(7, 5));

        let g1 = build_graph(2, &[(0, 1, int(3))], 0).unwrap();
        assert_eq!(best_prefix_bound(&g1, false).unwrap().bound, int(1));
    }

    #[test]
    fn all_subsets_dominates_prefixes() {
        let g = fig1();
        let p = best_prefix_bound(&g, false).unwrap();
        let a = best_prefix_bound(&g, true).unwrap();
        assert!(a.bound >= p.bound);
    }
}
