//! Reproducible instance families.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{build_graph, star, RootedGraph};
use crate::rational::{frac, int, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    UniformStar,
    RandomStar,
    RandomTree,
    RandomUnweighted,
    /// Connected graph with random lengths: a random spanning tree plus
    /// independent extra edges.
    RandomGraph,
    Fig1,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::UniformStar,
        Family::RandomStar,
        Family::RandomTree,
        Family::RandomUnweighted,
        Family::RandomGraph,
        Family::Fig1,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::UniformStar => "uniform-star",
            Family::RandomStar => "random-star",
            Family::RandomTree => "random-tree",
            Family::RandomUnweighted => "random-unweighted",
            Family::RandomGraph => "random-graph",
            Family::Fig1 => "fig1",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Family> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown family {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GenParams {
    /// Non-root vertices.
    pub n: usize,
    /// Lengths are drawn from `[1, max_len]`.
    pub max_len: i64,
    /// Lengths are multiples of `1/denominator`.
    pub denominator: i64,
    /// Probability of each extra edge in the graph families.
    pub edge_prob: f64,
}

impl Default for GenParams {
    fn default() -> GenParams {
        GenParams { n: 5, max_len: 10, denominator: 1, edge_prob: 0.3 }
    }
}

impl GenParams {
    fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::InvalidParams("n must be at least 1".into()));
        }
        if self.max_len < 1 || self.denominator < 1 {
            return Err(Error::InvalidParams("lengths need max_len ≥ 1 and denominator ≥ 1".into()));
        }
        if !(0.0..=1.0).contains(&self.edge_prob) {
            return Err(Error::InvalidParams("edge_prob must lie in [0, 1]".into()));
        }
        Ok(())
    }

    fn length<R: Rng>(&self, rng: &mut R) -> Rational {
        let q = self.denominator;
        frac(rng.gen_range(q..=self.max_len * q), q)
    }
}

/// The five-vertex example: `O–A` (3), `O–B` (2), `B–C` (2), `B–D` (1).
pub fn fig1() -> RootedGraph {
    let labels = ["O", "A", "B", "C", "D"].map(String::from).to_vec();
    let edges = [(0, 1, int(3)), (0, 2, int(2)), (2, 3, int(2)), (2, 4, int(1))];
    RootedGraph::from_parts(labels, &edges, 0).expect("valid example")
}

const CONNECT_ATTEMPTS: usize = 10_000;

pub fn gen_instance(family: Family, params: &GenParams, seed: u64) -> Result<RootedGraph> {
    if family == Family::Fig1 {
        return Ok(fig1());
    }
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = params.n;
    match family {
        Family::UniformStar => star(&vec![int(1); n]),
        Family::RandomStar => star(&(0..n).map(|_| params.length(&mut rng)).collect::<Vec<_>>()),
        Family::RandomTree => {
            let edges: Vec<_> = (1..=n).map(|v| (rng.gen_range(0..v), v, params.length(&mut rng))).collect();
            build_graph(n + 1, &edges, 0)
        }
        Family::RandomUnweighted => {
            for _ in 0..CONNECT_ATTEMPTS {
                let mut edges = Vec::new();
                for u in 0..=n {
                    for v in u + 1..=n {
                        if rng.gen_bool(params.edge_prob) {
                            edges.push((u, v, int(1)));
                        }
                    }
                }
                match build_graph(n + 1, &edges, 0) {
                    Ok(g) => return Ok(g),
                    Err(Error::DisconnectedGraph(_)) => continue,
                    Err(e) => return Err(e),
                }
            }
            Err(Error::InvalidParams(format!(
                "no connected graph after {CONNECT_ATTEMPTS} draws; raise edge_prob"
            )))
        }
        Family::RandomGraph => {
            // random labelled tree over a shuffled vertex order, then extras
            let mut perm: Vec<usize> = (1..=n).collect();
            perm.shuffle(&mut rng);
            perm.insert(0, 0);
            let mut present = vec![vec![false; n + 1]; n + 1];
            let mut edges = Vec::new();
            for i in 1..=n {
                let (u, v) = (perm[rng.gen_range(0..i)], perm[i]);
                present[u][v] = true;
                present[v][u] = true;
                edges.push((u.min(v), u.max(v), params.length(&mut rng)));
            }
            for u in 0..=n {
                for v in u + 1..=n {
                    if !present[u][v] && rng.gen_bool(params.edge_prob) {
                        edges.push((u, v, params.length(&mut rng)));
                    }
                }
            }
            edges.sort_by_key(|a| (a.0, a.1));
            build_graph(n + 1, &edges, 0)
        }
        Family::Fig1 => unreachable!("handled above"),
    }
}
