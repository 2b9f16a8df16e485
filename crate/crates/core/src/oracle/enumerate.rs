//! Enumeration of expanding searches up to edge-choice dominance.
//!
//! Only vertex orders are enumerated: each next vertex must be adjacent to
//! the reached set and joins it by a minimum-length edge (smallest edge id on
//! ties). A shorter connecting edge weakly lowers every later search time,
//! so some optimal strategy of either kind lives on this set.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, RootedGraph, VertexId};
use crate::search::{cheapest_link, ExpandingSearch};

pub const DEFAULT_CAP: u128 = 10_000_000;

const MAX_COUNT_STATES: usize = 1 << 22;

/// Vertices adjacent to the reached set, increasing id, with their cheapest link.
pub(crate) fn frontier(g: &RootedGraph, reached: &[bool]) -> Vec<(VertexId, EdgeId)> {
    g.vertices()
        .filter(|v| !reached[v.0])
        .filter_map(|v| cheapest_link(g, reached, v).map(|e| (v, e)))
        .collect()
}

/// Exact number of dominance-reduced searches, saturating at `u128::MAX`.
pub fn count_searches(g: &RootedGraph) -> Result<u128> {
    let n = g.n();
    if n > 64 {
        return Err(Error::CapExceeded { what: "non-root vertices for enumeration", count: n as u128, cap: 64 });
    }
    // bit i = i-th non-root vertex
    let verts: Vec<VertexId> = g.non_root().collect();
    let mut bit = vec![usize::MAX; g.vertex_count()];
    for (i, v) in verts.iter().enumerate() {
        bit[v.0] = i;
    }
    let neighbor_masks: Vec<u64> = verts
        .iter()
        .map(|v| {
            g.neighbors(*v)
                .iter()
                .filter(|(u, _)| *u != g.root())
                .fold(0u64, |m, (u, _)| m | 1u64 << bit[u.0])
        })
        .collect();
    let root_adjacent: u64 =
        g.neighbors(g.root()).iter().fold(0u64, |m, (u, _)| m | 1u64 << bit[u.0]);
    let full: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };

    fn count(
        mask: u64,
        full: u64,
        root_adjacent: u64,
        neighbor_masks: &[u64],
        memo: &mut HashMap<u64, u128>,
    ) -> Result<u128> {
        if mask == full {
            return Ok(1);
        }
        if let Some(&c) = memo.get(&mask) {
            return Ok(c);
        }
        if memo.len() >= MAX_COUNT_STATES {
            return Err(Error::CapExceeded {
                what: "search-count states",
                count: memo.len() as u128,
                cap: MAX_COUNT_STATES as u128,
            });
        }
        let mut reach = root_adjacent;
        let mut m = mask;
        while m != 0 {
            let i = m.trailing_zeros() as usize;
            reach |= neighbor_masks[i];
            m &= m - 1;
        }
        let mut avail = reach & !mask & full;
        let mut total: u128 = 0;
        while avail != 0 {
            let i = avail.trailing_zeros() as u64;
            avail &= avail - 1;
            let c = count(mask | 1 << i, full, root_adjacent, neighbor_masks, memo)?;
            total = total.saturating_add(c);
        }
        memo.insert(mask, total);
        Ok(total)
    }

    let mut memo = HashMap::new();
    count(0, full, root_adjacent, &neighbor_masks, &mut memo)
}

/// Checks the search count against `cap` before any enumeration starts.
pub fn check_cap(g: &RootedGraph, cap: u128) -> Result<u128> {
    let count = count_searches(g)?;
    if count > cap {
        return Err(Error::CapExceeded { what: "expanding searches", count, cap });
    }
    Ok(count)
}

/// All dominance-reduced searches in lexicographic vertex order.
pub fn enumerate_searches(g: &RootedGraph, cap: u128) -> Result<Vec<ExpandingSearch>> {
    check_cap(g, cap)?;
    let mut reached = vec![false; g.vertex_count()];
    reached[g.root().0] = true;
    let first = frontier(g, &reached);
    let shards: Vec<Vec<ExpandingSearch>> = first
        .par_iter()
        .map(|&(v, e)| {
            let mut reached = reached.clone();
            reached[v.0] = true;
            let mut out = Vec::new();
            let mut edges = vec![e];
            let mut order = vec![v];
            extend(g, &mut reached, &mut edges, &mut order, &mut out);
            out
        })
        .collect();
    Ok(shards.into_iter().flatten().collect())
}

fn extend(
    g: &RootedGraph,
    reached: &mut Vec<bool>,
    edges: &mut Vec<EdgeId>,
    order: &mut Vec<VertexId>,
    out: &mut Vec<ExpandingSearch>,
) {
    if order.len() == g.n() {
        out.push(ExpandingSearch::from_parts_unchecked(edges.clone(), order.clone()));
        return;
    }
    for (v, e) in frontier(g, reached) {
        reached[v.0] = true;
        edges.push(e);
        order.push(v);
        extend(g, reached, edges, order, out);
        order.pop();
        edges.pop();
        reached[v.0] = false;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::gen::fig1;
    use crate::graph::{build_graph, star};
    use crate::rational::int;
    use crate::search::validate_search;

    #[test]
    fn counts() {
        assert_eq!(count_searches(&star(&vec![int(1); 3]).unwrap()).unwrap(), 6);
        let path = build_graph(3, &[(0, 1, int(1)), (1, 2, int(1))], 0).unwrap();
        assert_eq!(count_searches(&path).unwrap(), 1);
        assert_eq!(count_searches(&fig1()).unwrap(), 8);
        assert_eq!(count_searches(&star(&vec![int(1); 8]).unwrap()).unwrap(), 40_320);
    }

    #[test]
    fn enumerates_valid_distinct_searches() {
        let g = fig1();
        let all = enumerate_searches(&g, DEFAULT_CAP).unwrap();
        assert_eq!(all.len(), 8);
        for s in &all {
            assert_eq!(validate_search(&g, s.edges()).unwrap(), *s);
        }
        let mut sorted = all.clone();
        sorted.sort_by(|a, b| a.order().cmp(b.order()));
        sorted.dedup();
        assert_eq!(sorted.len(), 8);
        assert_eq!(sorted.iter().map(|s| s.order()).collect::<Vec<_>>(), all.iter().map(|s| s.order()).collect::<Vec<_>>());
    }

    #[test]
    fn cap_is_enforced() {
        let g = star(&vec![int(1); 5]).unwrap();
        assert!(matches!(enumerate_searches(&g, 100), Err(Error::CapExceeded { count: 120, .. })));
    }

    #[test]
    fn picks_cheapest_connecting_edge() {
        // triangle with a cheap side: reaching 2 after 1 should use 1-2 (length 1) not 0-2 (length 5)
        let g = build_graph(3, &[(0, 1, int(1)), (0, 2, int(5)), (1, 2, int(1))], 0).unwrap();
        let all = enumerate_searches(&g, DEFAULT_CAP).unwrap();
        let s = all.iter().find(|s| s.order() == [VertexId(1), VertexId(2)]).unwrap();
        assert_eq!(s.edges(), &[EdgeId(0), EdgeId(2)]);
    }
}
