//! Steiner trees: exact subset dynamic programming for small terminal sets and
//! a metric-closure spanning-tree 2-approximation.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, RootedGraph, VertexId};
use crate::rational::{self, Rational};

pub const MAX_EXACT_TERMINALS: usize = 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SteinerMode {
    Exact,
    Mst2Approx,
}

impl SteinerMode {
    /// Bound on `length / optimum`.
    pub fn approximation_factor(self) -> u32 {
        match self {
            SteinerMode::Exact => 1,
            SteinerMode::Mst2Approx => 2,
        }
    }
}

impl fmt::Display for SteinerMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SteinerMode::Exact => "exact",
            SteinerMode::Mst2Approx => "mst2",
        })
    }
}

impl std::str::FromStr for SteinerMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(SteinerMode::Exact),
            "mst2" | "mst-2approx" => Ok(SteinerMode::Mst2Approx),
            other => Err(Error::InvalidParams(format!("unknown Steiner mode {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SteinerResult {
    /// Tree edges in increasing id order.
    pub edges: Vec<EdgeId>,
    pub total_length: Rational,
    pub mode: SteinerMode,
}

/// Shortest paths between every pair of vertices.
struct AllPairs {
    dist: Vec<Vec<Rational>>,
    /// `pred[s][v]`: last hop on the chosen shortest path from `s` to `v`.
    pred: Vec<Vec<Option<(VertexId, EdgeId)>>>,
}

impl AllPairs {
    fn new(g: &RootedGraph) -> AllPairs {
        let mut dist = Vec::with_capacity(g.vertex_count());
        let mut pred = Vec::with_capacity(g.vertex_count());
        for s in g.vertices() {
            let (d, p) = g.dijkstra_from(&[s]);
            dist.push(d.into_iter().map(|x| x.expect("connected")).collect());
            pred.push(p);
        }
        AllPairs { dist, pred }
    }

    fn path(&self, from: VertexId, to: VertexId, out: &mut BTreeSet<EdgeId>) {
        let mut x = to;
        while let Some((p, e)) = self.pred[from.0][x.0] {
            out.insert(e);
            x = p;
        }
    }
}

/// Minimum-length (exact) or 2-approximate tree connecting `terminals`.
/// The root is always added to the terminal set.
pub fn steiner_tree(g: &RootedGraph, terminals: &[VertexId], mode: SteinerMode) -> Result<SteinerResult> {
    let mut terms: Vec<VertexId> = terminals.to_vec();
    terms.push(g.root());
    terms.sort();
    terms.dedup();
    if let Some(v) = terms.iter().find(|v| v.0 >= g.vertex_count()) {
        return Err(Error::VertexOutOfRange { vertex: v.0, count: g.vertex_count() });
    }
    if mode == SteinerMode::Exact && terms.len() > MAX_EXACT_TERMINALS {
        return Err(Error::TooManyTerminalsForExact { max: MAX_EXACT_TERMINALS, got: terms.len() });
    }
    if terms.len() == 1 {
        return Ok(SteinerResult { edges: vec![], total_length: Rational::zero(), mode });
    }
    let ap = AllPairs::new(g);
    let union = match mode {
        SteinerMode::Exact => exact_union(g, &ap, &terms),
        SteinerMode::Mst2Approx => mst_union(&ap, &terms),
    };
    let edges = prune_to_tree(g, &union, &terms);
    let total_length = rational::sum(edges.iter().map(|e| &g.edge(*e).length));
    Ok(SteinerResult { edges, total_length, mode })
}

/// Subset DP: `best[S][v]` is the cheapest tree spanning the terminal subset
/// `S` plus vertex `v`. The root terminal is the final anchor.
fn exact_union(g: &RootedGraph, ap: &AllPairs, terms: &[VertexId]) -> BTreeSet<EdgeId> {
    let root = g.root();
    let others: Vec<VertexId> = terms.iter().copied().filter(|&t| t != root).collect();
    let k = others.len();
    let n = g.vertex_count();
    let full = (1usize << k) - 1;

    #[derive(Clone)]
    enum Choice {
        Leaf(usize),
        /// reach `via` along a shortest path, then split the subset there
        Split { via: usize, part: usize },
    }
    let mut best: Vec<Vec<Option<Rational>>> = vec![vec![None; n]; full + 1];
    let mut choice: Vec<Vec<Option<Choice>>> = vec![vec![None; n]; full + 1];
    for (i, t) in others.iter().enumerate() {
        for v in 0..n {
            best[1 << i][v] = Some(ap.dist[t.0][v].clone());
            choice[1 << i][v] = Some(Choice::Leaf(i));
        }
    }
    for mask in 1..=full {
        if mask.count_ones() < 2 {
            continue;
        }
        // merge two complementary parts at u; the part holding the lowest bit
        // is enumerated once per split
        let low = mask & mask.wrapping_neg();
        let mut merged: Vec<Option<(Rational, usize)>> = vec![None; n];
        let mut sub = (mask - 1) & mask;
        while sub > 0 {
            if sub & low != 0 {
                let rest = mask ^ sub;
                for u in 0..n {
                    let (Some(a), Some(b)) = (&best[sub][u], &best[rest][u]) else { continue };
                    let c = a + b;
                    if merged[u].as_ref().is_none_or(|(m, _)| c < *m) {
                        merged[u] = Some((c, sub));
                    }
                }
            }
            sub = (sub - 1) & mask;
        }
        for v in 0..n {
            let mut cur: Option<(Rational, Choice)> = None;
            for u in 0..n {
                let Some((m, part)) = &merged[u] else { continue };
                let c = m + &ap.dist[u][v];
                if cur.as_ref().is_none_or(|(b, _)| c < *b) {
                    cur = Some((c, Choice::Split { via: u, part: *part }));
                }
            }
            if let Some((c, ch)) = cur {
                best[mask][v] = Some(c);
                choice[mask][v] = Some(ch);
            }
        }
    }

    let mut out = BTreeSet::new();
    let mut stack = vec![(full, root.0)];
    while let Some((mask, v)) = stack.pop() {
        match choice[mask][v].clone().expect("filled") {
            Choice::Leaf(i) => ap.path(others[i], VertexId(v), &mut out),
            Choice::Split { via, part } => {
                ap.path(VertexId(via), VertexId(v), &mut out);
                stack.push((part, via));
                stack.push((mask ^ part, via));
            }
        }
    }
    out
}

/// Prim's tree on the metric closure of the terminals, unfolded to paths.
fn mst_union(ap: &AllPairs, terms: &[VertexId]) -> BTreeSet<EdgeId> {
    let k = terms.len();
    let mut in_tree = vec![false; k];
    let mut link: Vec<Option<(Rational, usize)>> = vec![None; k];
    in_tree[0] = true;
    for j in 1..k {
        link[j] = Some((ap.dist[terms[0].0][terms[j].0].clone(), 0));
    }
    let mut out = BTreeSet::new();
    for _ in 1..k {
        let next = (0..k)
            .filter(|&j| !in_tree[j])
            .min_by(|&a, &b| link[a].as_ref().unwrap().0.cmp(&link[b].as_ref().unwrap().0).then(a.cmp(&b)))
            .expect("remaining terminal");
        let (_, from) = link[next].clone().unwrap();
        ap.path(terms[from], terms[next], &mut out);
        in_tree[next] = true;
        for j in 0..k {
            if !in_tree[j] {
                let d = &ap.dist[terms[next].0][terms[j].0];
                if link[j].as_ref().is_none_or(|(cur, _)| d < cur) {
                    link[j] = Some((d.clone(), next));
                }
            }
        }
    }
    out
}

/// Spanning tree of the edge union grown from the root, with non-terminal
/// leaves trimmed repeatedly.
fn prune_to_tree(g: &RootedGraph, union: &BTreeSet<EdgeId>, terms: &[VertexId]) -> Vec<EdgeId> {
    let n = g.vertex_count();
    let mut adj: Vec<Vec<(VertexId, EdgeId)>> = vec![vec![]; n];
    for &e in union {
        let edge = g.edge(e);
        adj[edge.u.0].push((edge.v, e));
        adj[edge.v.0].push((edge.u, e));
    }
    for list in &mut adj {
        list.sort();
    }
    let mut seen = vec![false; n];
    let mut tree: Vec<(VertexId, VertexId, EdgeId)> = Vec::new();
    let mut queue = std::collections::VecDeque::from([g.root()]);
    seen[g.root().0] = true;
    while let Some(x) = queue.pop_front() {
        for &(y, e) in &adj[x.0] {
            if !seen[y.0] {
                seen[y.0] = true;
                tree.push((x, y, e));
                queue.push_back(y);
            }
        }
    }
    let mut is_terminal = vec![false; n];
    for t in terms {
        is_terminal[t.0] = true;
    }
    loop {
        let mut degree = vec![0usize; n];
        for (a, b, _) in &tree {
            degree[a.0] += 1;
            degree[b.0] += 1;
        }
        let before = tree.len();
        tree.retain(|(_, child, _)| !(degree[child.0] == 1 && !is_terminal[child.0]));
        if tree.len() == before {
            break;
        }
    }
    let mut edges: Vec<EdgeId> = tree.into_iter().map(|(_, _, e)| e).collect();
    edges.sort();
    edges
}
