//! The randomized deepening strategy: random dyadic cuts split the vertices
//! into distance levels, and each level's contracted subtree is searched by
//! an independent random depth-first search.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{shortest_path_tree, EdgeId, RootedGraph, VertexId};
use crate::rational;
use crate::search::{validate_search, ExpandingSearch};

/// Two-sided 99% normal quantile.
pub const CI_Z99: f64 = 2.5758293035489;

const CHUNK: usize = 1024;

/// One realization of the strategy.
#[derive(Clone, Debug, PartialEq)]
pub struct DeepeningSample {
    /// `x_0 = 1, x_1, …, x_t, x_{t+1} = 2^t`.
    pub cuts: Vec<f64>,
    /// `levels[i] = {v : x_i ≤ d(v) < x_{i+1}}`, increasing id.
    pub levels: Vec<Vec<VertexId>>,
    /// Edges of each contracted phase tree, in original ids.
    pub phase_trees: Vec<Vec<EdgeId>>,
    /// `true` where the phase ran the leaf-reversed search.
    pub coins: Vec<bool>,
    pub search: ExpandingSearch,
}

/// Precomputed tree data for repeated sampling.
#[derive(Clone, Debug)]
pub struct DeepeningSampler {
    tree: RootedGraph,
    t: u32,
    dist: Vec<f64>,
    lambda: Vec<f64>,
    parent: Vec<Option<VertexId>>,
    children: Vec<Vec<VertexId>>,
}

impl DeepeningSampler {
    pub fn new(tree: &RootedGraph) -> Result<DeepeningSampler> {
        if !tree.is_tree() {
            return Err(Error::NotATree);
        }
        let dm = tree.distances();
        let radius = tree.radius();
        let mut t = 0u32;
        while rational::pow2(t) <= radius {
            t += 1;
        }
        let mut children = vec![Vec::new(); tree.vertex_count()];
        for v in tree.non_root() {
            children[dm.parent[v.0].expect("non-root").0].push(v);
        }
        Ok(DeepeningSampler {
            tree: tree.clone(),
            t,
            dist: dm.dist_f64(),
            lambda: dm.lambda.iter().map(rational::to_f64).collect(),
            parent: dm.parent.clone(),
            children,
        })
    }

    /// Smallest `t` with every distance below `2^t`.
    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn tree(&self) -> &RootedGraph {
        &self.tree
    }

    fn draw_cuts<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        let mut cuts = Vec::with_capacity(self.t as usize + 2);
        cuts.push(1.0);
        for i in 1..=self.t {
            let lo = f64::powi(2.0, i as i32 - 1);
            cuts.push(rng.gen_range(lo..=2.0 * lo));
        }
        cuts.push(f64::powi(2.0, self.t as i32));
        cuts
    }

    fn level_of(&self, cuts: &[f64], level: &mut [usize]) {
        for v in self.tree.non_root() {
            let d = self.dist[v.0];
            // last i with x_i ≤ d; x_0 = 1 ≤ d always
            level[v.0] = (1..cuts.len() - 1).rev().find(|&i| cuts[i] <= d).unwrap_or(0);
        }
    }

    /// Depth-first order of one phase tree. Its top vertices are those whose
    /// parent lies in the contracted region; they hang off the root in id order.
    fn phase_order(&self, level: &[usize], i: usize, reverse: bool, out: &mut Vec<VertexId>) {
        let root = self.tree.root();
        let in_level = |v: VertexId| v != root && level[v.0] == i;
        let mut tops: Vec<VertexId> = self
            .tree
            .non_root()
            .filter(|&v| in_level(v) && self.parent[v.0].is_none_or(|p| !in_level(p)))
            .collect();
        if !reverse {
            tops.reverse();
        }
        let mut stack = tops;
        while let Some(x) = stack.pop() {
            out.push(x);
            let kids = self.children[x.0].iter().copied().filter(|&y| in_level(y));
            if reverse {
                stack.extend(kids);
            } else {
                let mut kids: Vec<_> = kids.collect();
                kids.reverse();
                stack.extend(kids);
            }
        }
    }

    /// Draws cuts and one coin per phase, and realizes the search.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> DeepeningSample {
        let cuts = self.draw_cuts(rng);
        let mut level = vec![0; self.tree.vertex_count()];
        self.level_of(&cuts, &mut level);
        let phases = self.t as usize + 1;
        let mut levels = vec![Vec::new(); phases];
        for v in self.tree.non_root() {
            levels[level[v.0]].push(v);
        }
        let dm = self.tree.distances();
        let mut order = Vec::with_capacity(self.tree.n());
        let mut phase_trees = Vec::with_capacity(phases);
        let mut coins = Vec::with_capacity(phases);
        for i in 0..phases {
            let coin: bool = rng.gen();
            coins.push(coin);
            let start = order.len();
            self.phase_order(&level, i, coin, &mut order);
            let mut tree_edges: Vec<EdgeId> =
                order[start..].iter().map(|v| dm.parent_edge[v.0].expect("non-root")).collect();
            tree_edges.sort();
            phase_trees.push(tree_edges);
        }
        let edges: Vec<EdgeId> = order.iter().map(|v| dm.parent_edge[v.0].expect("non-root")).collect();
        let search = validate_search(&self.tree, &edges).expect("phases cover the tree level by level");
        DeepeningSample { cuts, levels, phase_trees, coins, search }
    }

    /// Search times averaged over the phase coins for one cut draw. Every
    /// phase contributes its full length to later phases, so the average
    /// over all coin patterns is the mean of the two orders within each phase.
    pub fn expected_times<R: Rng>(&self, rng: &mut R, level: &mut [usize], order: &mut Vec<VertexId>, out: &mut [f64]) {
        let cuts = self.draw_cuts(rng);
        self.level_of(&cuts, level);
        let mut offset = 0.0;
        for i in 0..=self.t as usize {
            for reverse in [false, true] {
                order.clear();
                self.phase_order(level, i, reverse, order);
                let mut clock = offset;
                for v in order.iter() {
                    clock += self.lambda[v.0];
                    if reverse {
                        out[v.0] = 0.5 * (out[v.0] + clock);
                    } else {
                        out[v.0] = clock;
                    }
                }
                if reverse {
                    offset = clock;
                }
            }
        }
    }
}

/// One realized sample on a tree.
pub fn deepening_sample(tree: &RootedGraph, seed: u64) -> Result<DeepeningSample> {
    let sampler = DeepeningSampler::new(tree)?;
    Ok(sampler.sample(&mut ChaCha8Rng::seed_from_u64(seed)))
}

/// Monte-Carlo estimate of the strategy's expected search times.
#[derive(Clone, Debug, PartialEq)]
pub struct DeepeningEstimate {
    pub trials: usize,
    pub mean_time: Vec<f64>,
    /// Mean normalized time per vertex; zero at the root.
    pub mean_normalized: Vec<f64>,
    /// 99% confidence half-width of `mean_normalized`; infinite for one trial.
    pub ci_half_width: Vec<f64>,
    /// `max_v mean_normalized[v]`.
    pub ratio: f64,
    pub ratio_ci_half_width: f64,
    pub witness: VertexId,
}

/// Estimates `T̂(s, v)` for every vertex. Non-trees are searched through
/// their shortest-path tree. Each trial draws one set of cuts and averages
/// over the phase coins exactly. Trials run in fixed-size chunks with their
/// own random streams, so the result does not depend on the thread count.
pub fn deepening_ratio_estimate(g: &RootedGraph, trials: usize, seed: u64) -> Result<DeepeningEstimate> {
    if trials == 0 {
        return Err(Error::InvalidParams("trials must be at least 1".into()));
    }
    let tree = if g.is_tree() { g.clone() } else { shortest_path_tree(g) };
    let sampler = DeepeningSampler::new(&tree)?;
    let nv = tree.vertex_count();
    let dist = &sampler.dist;
    let chunks = trials.div_ceil(CHUNK);
    let partial: Vec<(Vec<f64>, Vec<f64>, Vec<f64>)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let runs = CHUNK.min(trials - c * CHUNK);
            let mut time = vec![0.0; nv];
            let mut norm = vec![0.0; nv];
            let mut norm_sq = vec![0.0; nv];
            let mut out = vec![0.0; nv];
            let mut level = vec![0; nv];
            let mut order = Vec::with_capacity(nv);
            for _ in 0..runs {
                sampler.expected_times(&mut rng, &mut level, &mut order, &mut out);
                for v in tree.non_root() {
                    let x = out[v.0] / dist[v.0];
                    time[v.0] += out[v.0];
                    norm[v.0] += x;
                    norm_sq[v.0] += x * x;
                }
            }
            (time, norm, norm_sq)
        })
        .collect();
    let mut time = vec![0.0; nv];
    let mut norm = vec![0.0; nv];
    let mut norm_sq = vec![0.0; nv];
    for (a, b, c) in partial {
        for v in 0..nv {
            time[v] += a[v];
            norm[v] += b[v];
            norm_sq[v] += c[v];
        }
    }
    let k = trials as f64;
    let mean_time: Vec<f64> = time.iter().map(|x| x / k).collect();
    let mean_normalized: Vec<f64> = norm.iter().map(|x| x / k).collect();
    let ci_half_width: Vec<f64> = (0..nv)
        .map(|v| {
            if trials < 2 {
                return f64::INFINITY;
            }
            let var = ((norm_sq[v] - k * mean_normalized[v] * mean_normalized[v]) / (k - 1.0)).max(0.0);
            CI_Z99 * (var / k).sqrt()
        })
        .collect();
    let witness = tree
        .non_root()
        .fold(None::<VertexId>, |best, v| match best {
            Some(b) if mean_normalized[b.0] >= mean_normalized[v.0] => Some(b),
            _ => Some(v),
        })
        .unwrap_or(tree.root());
    Ok(DeepeningEstimate {
        trials,
        ratio: mean_normalized[witness.0],
        ratio_ci_half_width: ci_half_width[witness.0],
        witness,
        mean_time,
        mean_normalized,
        ci_half_width,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::gen::fig1;
    use crate::graph::{build_graph, star};
    use crate::oracle::{exact_rho, DEFAULT_CAP};
    use crate::rational::int;
    use crate::search::search_ratio;

    #[test]
    fn t_is_the_dyadic_cover() {
        assert_eq!(DeepeningSampler::new(&fig1()).unwrap().t(), 3);
        assert_eq!(DeepeningSampler::new(&star(&[int(1), int(1)]).unwrap()).unwrap().t(), 1);
        let cycle = build_graph(3, &[(0, 1, int(1)), (1, 2, int(1)), (0, 2, int(1))], 0).unwrap();
        assert!(matches!(DeepeningSampler::new(&cycle), Err(Error::NotATree)));
    }

    #[test]
    fn samples_are_well_formed() {
        let g = fig1();
        let sampler = DeepeningSampler::new(&g).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut split = 0;
        for _ in 0..2000 {
            let s = sampler.sample(&mut rng);
            assert_eq!(s.cuts.len(), 5);
            assert_eq!(s.cuts[0], 1.0);
            assert_eq!(s.cuts[4], 8.0);
            for i in 1..=3 {
                let lo = f64::powi(2.0, i - 1);
                assert!(lo <= s.cuts[i as usize] && s.cuts[i as usize] <= 2.0 * lo);
            }
            let mut all: Vec<VertexId> = s.levels.concat();
            all.sort();
            assert_eq!(all, g.non_root().collect::<Vec<_>>());
            for (i, level) in s.levels.iter().enumerate() {
                for v in level {
                    let d = rational::to_f64(g.distances().d(*v));
                    assert!(s.cuts[i] <= d && d < s.cuts[i + 1]);
                }
                assert_eq!(s.phase_trees[i].len(), level.len());
            }
            let level_of = |v: usize| s.levels.iter().position(|l| l.contains(&VertexId(v))).unwrap();
            if s.cuts[2] > 2.0 && s.cuts[2] <= 3.0 {
                split += 1;
                assert!(level_of(2) < level_of(1));
                assert_eq!(level_of(1), level_of(4));
            }
            assert_eq!(s.search.len(), 4);
        }
        assert!(split > 0);
    }

    #[test]
    fn unit_star_two_is_exact() {
        let g = star(&[int(1), int(1)]).unwrap();
        for trials in [1, 2, 17, 5000] {
            let e = deepening_ratio_estimate(&g, trials, 3).unwrap();
            assert_eq!(e.mean_time[1], 1.5);
            assert_eq!(e.mean_time[2], 1.5);
        }
        for seed in 0..20 {
            let s = deepening_sample(&star(&vec![int(1); 3]).unwrap(), seed).unwrap();
            assert_eq!(s.search.len(), 3);
            // every leaf sits at distance 1 < x_1
            assert_eq!(s.levels[0].len(), 3);
        }
    }

    #[test]
    fn single_trial_is_one_cut_draw() {
        let g = star(&[int(1), int(3)]).unwrap();
        let e = deepening_ratio_estimate(&g, 1, 11).unwrap();
        assert!(e.ratio_ci_half_width.is_infinite());
        // the same draw, realized with both coins for the phase of each vertex
        let sampler = DeepeningSampler::new(&g).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        rng.set_stream(0);
        let mut out = vec![0.0; 3];
        sampler.expected_times(&mut rng, &mut [0; 3], &mut Vec::new(), &mut out);
        assert_eq!(e.mean_time, out);
    }

    #[test]
    fn deterministic_in_seed_and_independent_of_threads() {
        let g = fig1();
        let a = deepening_ratio_estimate(&g, 5000, 42).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| deepening_ratio_estimate(&g, 5000, 42).unwrap());
        assert_eq!(a, b);
        assert_ne!(a, deepening_ratio_estimate(&g, 5000, 43).unwrap());
    }

    #[test]
    fn fig1_within_the_approximation_bound() {
        let g = fig1();
        let e = deepening_ratio_estimate(&g, 100_000, 1).unwrap();
        let rho = exact_rho(&g, DEFAULT_CAP).unwrap().solution.value;
        assert!(e.ratio <= 1.25 * rho + 0.5 + 3.0 * e.ratio_ci_half_width);
        // a realized search is never better than the deterministic optimum
        let s = deepening_sample(&g, 5).unwrap();
        assert!(search_ratio(&g, &s.search).ratio >= int(2));
    }
}
