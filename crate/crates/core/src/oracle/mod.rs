//! Exact randomized search ratio on small instances.
//!
//! The Searcher picks an expanding search, the Hider a non-root vertex, and
//! the payoff is the normalized search time. [`exact_rho`] enumerates the
//! searches, builds the payoff matrix in exact rationals, and solves the game
//! by linear programming with a mandatory duality-gap certificate.

pub mod enumerate;
pub mod lp;

use std::collections::HashMap;

use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{RootedGraph, VertexId};
use crate::rational::{self, Rational};
use crate::search::{search_times, ExpandingSearch, HiderDistribution, MixedSearch};

pub use enumerate::{check_cap, count_searches, enumerate_searches, DEFAULT_CAP};
pub use lp::{solve_2x2, solve_matrix_game, MatrixGameSolution};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Rows are searches, columns the non-root vertices in increasing id order.
#[derive(Clone, Debug, PartialEq)]
pub struct PayoffMatrix {
    pub searches: Vec<ExpandingSearch>,
    pub vertices: Vec<VertexId>,
    pub entries: Vec<Vec<Rational>>,
}

impl PayoffMatrix {
    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        self.entries.iter().map(|r| r.iter().map(rational::to_f64).collect()).collect()
    }

    /// `min_S max_v T̂(S, v)` with the first row attaining it.
    pub fn sigma(&self) -> (Rational, usize) {
        let mut best: Option<(Rational, usize)> = None;
        for (i, row) in self.entries.iter().enumerate() {
            let m = row.iter().max().cloned().unwrap_or_else(Rational::zero);
            if best.as_ref().is_none_or(|(b, _)| m < *b) {
                best = Some((m, i));
            }
        }
        best.expect("non-empty matrix")
    }
}

pub fn payoff_matrix(g: &RootedGraph, searches: Vec<ExpandingSearch>) -> PayoffMatrix {
    let vertices: Vec<VertexId> = g.non_root().collect();
    let entries = searches
        .par_iter()
        .map(|s| {
            let t = search_times(g, s);
            vertices.iter().map(|v| t.normalized[v.0].clone()).collect()
        })
        .collect();
    PayoffMatrix { searches, vertices, entries }
}

/// Solution of the search game.
#[derive(Clone, Debug, PartialEq)]
pub struct GameSolution {
    pub value: f64,
    /// Hider's best payoff against `row_mix`.
    pub upper: f64,
    /// Searcher's best payoff against `col_mix`.
    pub lower: f64,
    pub row_mix: MixedSearch,
    pub col_mix: HiderDistribution,
    pub certificate_gap: f64,
    /// Whether the gap was recomputed in exact arithmetic.
    pub exact_certificate: bool,
    pub rows_solved: usize,
}

/// Above this many matrix entries the certificate stays in floating point.
const EXACT_CERTIFICATE_ENTRIES: usize = 40_000;
/// Pairwise row-dominance pruning is quadratic; skip it above this many rows.
const DOMINANCE_ROWS: usize = 6_000;

/// Indices of rows kept after removing duplicates and rows that are
/// entrywise at least some other row.
fn prune_rows(m: &PayoffMatrix, approx: &[Vec<f64>]) -> Vec<usize> {
    let mut seen: HashMap<&Vec<Rational>, ()> = HashMap::new();
    let distinct: Vec<usize> = (0..m.entries.len()).filter(|&i| seen.insert(&m.entries[i], ()).is_none()).collect();
    if distinct.len() > DOMINANCE_ROWS {
        return distinct;
    }
    let dominated = |i: usize, j: usize| -> bool {
        // row i ≥ row j entrywise (i is no better for the Searcher)
        approx[i].iter().zip(&approx[j]).all(|(x, y)| x + 1e-12 >= *y)
            && m.entries[i].iter().zip(&m.entries[j]).all(|(x, y)| x >= y)
    };
    distinct
        .iter()
        .copied()
        .filter(|&i| !distinct.iter().any(|&j| j != i && dominated(i, j)))
        .collect()
}

fn exact_gap(m: &PayoffMatrix, rows: &[usize], p: &[Rational], h: &[Rational]) -> (Rational, Rational) {
    let cols = m.vertices.len();
    let mut col_payoff = vec![Rational::zero(); cols];
    for (k, &i) in rows.iter().enumerate() {
        if p[k].is_zero() {
            continue;
        }
        for (acc, x) in col_payoff.iter_mut().zip(&m.entries[i]) {
            *acc += &p[k] * x;
        }
    }
    let upper = col_payoff.into_iter().max().expect("columns");
    let lower = m
        .entries
        .iter()
        .map(|r| r.iter().zip(h).fold(Rational::zero(), |a, (x, w)| a + x * w))
        .min()
        .expect("rows");
    (upper, lower)
}

fn to_exact_distribution(w: &[f64]) -> Vec<Rational> {
    let exact: Vec<Rational> = w.iter().map(|&x| rational::from_f64(x)).collect();
    let total = rational::sum(&exact);
    exact.into_iter().map(|x| x / &total).collect()
}

pub fn solve_zero_sum(g: &RootedGraph, m: &PayoffMatrix, tolerance: f64) -> Result<GameSolution> {
    if m.entries.is_empty() {
        return Err(Error::InvalidParams("payoff matrix has no rows".into()));
    }
    let approx = m.to_f64();
    let kept = prune_rows(m, &approx);
    let reduced: Vec<Vec<f64>> = kept.iter().map(|&i| approx[i].clone()).collect();
    let sol = solve_matrix_game(&reduced, f64::INFINITY)?;

    let p = to_exact_distribution(&sol.row_mix);
    let h_cols = to_exact_distribution(&sol.col_mix);
    let mut h = vec![Rational::zero(); g.vertex_count()];
    for (v, w) in m.vertices.iter().zip(&h_cols) {
        h[v.0] = w.clone();
    }

    let entries = m.entries.len() * m.vertices.len();
    let (upper, lower, exact_certificate) = if entries <= EXACT_CERTIFICATE_ENTRIES {
        let (u, l) = exact_gap(m, &kept, &p, &h_cols);
        (rational::to_f64(&u), rational::to_f64(&l), true)
    } else {
        let mut row_full = vec![0.0; m.entries.len()];
        for (k, &i) in kept.iter().enumerate() {
            row_full[i] = sol.row_mix[k];
        }
        let (u, l) = lp::certificate(&approx, &row_full, &sol.col_mix);
        (u, l, false)
    };
    let certificate_gap = (upper - lower).max(0.0);
    if !(certificate_gap <= tolerance) {
        return Err(Error::NumericalFailure(format!(
            "duality gap {certificate_gap:e} exceeds tolerance {tolerance:e}"
        )));
    }
    let row_mix = MixedSearch::new(
        kept.iter()
            .zip(p)
            .filter(|(_, w)| !w.is_zero())
            .map(|(&i, w)| (m.searches[i].clone(), w))
            .collect(),
    )?;
    let col_mix = HiderDistribution::new(g, h)?;
    Ok(GameSolution {
        value: sol.value,
        upper,
        lower,
        row_mix,
        col_mix,
        certificate_gap,
        exact_certificate,
        rows_solved: kept.len(),
    })
}

/// Exact `ρ(G)` with the deterministic ratio read off the same matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactRho {
    pub solution: GameSolution,
    pub sigma: Rational,
    pub sigma_search: ExpandingSearch,
    pub search_count: usize,
    /// `σ/2 ≤ ρ ≤ σ` (within tolerance); only checked on trees and unweighted graphs.
    pub half_sigma_bracket: Option<bool>,
}

pub fn exact_rho(g: &RootedGraph, cap: u128) -> Result<ExactRho> {
    exact_rho_with_tolerance(g, cap, DEFAULT_TOLERANCE)
}

pub fn exact_rho_with_tolerance(g: &RootedGraph, cap: u128, tolerance: f64) -> Result<ExactRho> {
    let searches = enumerate_searches(g, cap)?;
    let search_count = searches.len();
    let m = payoff_matrix(g, searches);
    let (sigma, row) = m.sigma();
    let solution = solve_zero_sum(g, &m, tolerance)?;
    let half_sigma_bracket = (g.is_tree() || g.is_unweighted()).then(|| {
        let s = rational::to_f64(&sigma);
        s / 2.0 - tolerance <= solution.value && solution.value <= s + tolerance
    });
    Ok(ExactRho { sigma_search: m.searches[row].clone(), solution, sigma, search_count, half_sigma_bracket })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::gen::fig1;
    use crate::graph::{build_graph, star};
    use crate::rational::{frac, int};
    use crate::search::{expected_payoff, mixed_payoffs};

    #[test]
    fn payoff_rows() {
        let g = star(&[int(1), int(1)]).unwrap();
        let m = payoff_matrix(&g, enumerate_searches(&g, DEFAULT_CAP).unwrap());
        assert_eq!(m.entries, vec![vec![int(1), int(2)], vec![int(2), int(1)]]);

        let g = fig1();
        let m = payoff_matrix(&g, enumerate_searches(&g, DEFAULT_CAP).unwrap());
        let row = m
            .searches
            .iter()
            .position(|s| s.order() == [VertexId(2), VertexId(1), VertexId(4), VertexId(3)])
            .unwrap();
        assert_eq!(m.entries[row], vec![frac(5, 3), int(1), int(2), int(2)]);

        let g = build_graph(2, &[(0, 1, int(2))], 0).unwrap();
        let m = payoff_matrix(&g, enumerate_searches(&g, DEFAULT_CAP).unwrap());
        assert_eq!(m.entries, vec![vec![int(1)]]);
    }

    #[test]
    fn uniform_stars() {
        let g = star(&vec![int(1); 3]).unwrap();
        let r = exact_rho(&g, DEFAULT_CAP).unwrap();
        assert!((r.solution.value - 2.0).abs() < 1e-9);
        assert_eq!(r.sigma, int(3));
        assert!(r.solution.certificate_gap <= 1e-9);
        let g = star(&vec![int(1); 4]).unwrap();
        assert!((exact_rho(&g, DEFAULT_CAP).unwrap().solution.value - 2.5).abs() < 1e-9);
    }

    #[test]
    fn star_one_two() {
        let g = star(&[int(1), int(2)]).unwrap();
        let r = exact_rho(&g, DEFAULT_CAP).unwrap();
        assert!((r.solution.value - 1.4).abs() < 1e-9);
        assert!(r.solution.exact_certificate);
    }

    #[test]
    fn unit_path() {
        let g = build_graph(3, &[(0, 1, int(1)), (1, 2, int(1))], 0).unwrap();
        let r = exact_rho(&g, DEFAULT_CAP).unwrap();
        assert!((r.solution.value - 1.0).abs() < 1e-12);
        assert_eq!(r.search_count, 1);
    }

    #[test]
    fn fig1_regression() {
        let g = fig1();
        let r = exact_rho(&g, DEFAULT_CAP).unwrap();
        assert_eq!(r.sigma, int(2));
        assert_eq!(r.half_sigma_bracket, Some(true));
        let v = r.solution.value;
        assert!((1.0..=2.0).contains(&v));
        // agrees with an independent LP solve of the eight-row matrix
        assert!((v - FIG1_RHO).abs() < 1e-9, "fig1 rho = {v}");
        // the returned strategies realize the value in exact arithmetic
        let payoffs = mixed_payoffs(&g, &r.solution.row_mix);
        assert!((rational::to_f64(&payoffs.ratio.ratio) - v).abs() < 1e-9);
        let vs_hider = expected_payoff(&g, &r.solution.row_mix, &r.solution.col_mix);
        assert!((rational::to_f64(&vs_hider) - v).abs() < 1e-9);
    }

    const FIG1_RHO: f64 = 41.0 / 24.0;

    #[test]
    fn pruning_keeps_the_value() {
        // a duplicated and a dominated row
        let g = star(&[int(1), int(1)]).unwrap();
        let mut m = payoff_matrix(&g, enumerate_searches(&g, DEFAULT_CAP).unwrap());
        m.searches.push(m.searches[0].clone());
        m.entries.push(vec![int(3), int(3)]);
        let approx = m.to_f64();
        assert_eq!(prune_rows(&m, &approx), vec![0, 1]);
        let s = solve_zero_sum(&g, &m, 1e-9).unwrap();
        assert!((s.value - 1.5).abs() < 1e-12);
    }
}
