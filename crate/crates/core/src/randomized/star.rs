//! Stars: the closed-form randomized ratio and an inductively built
//! strategy that mixes "new edge last" with "new edge at a random point".

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::graph::{star, RootedGraph, VertexId};
use crate::oracle::solve_2x2;
use crate::rational::{self, Rational};
use crate::search::{ExpandingSearch, MixedSearch};

fn sorted(c: &[Rational]) -> Vec<Rational> {
    let mut c = c.to_vec();
    c.sort();
    c
}

fn from_usize(n: usize) -> Rational {
    rational::int(n as i64)
}

/// `max_k (μ_k² + D_k) / (2 D_k)` over prefixes of the sorted lengths, with
/// the smallest maximizing `k` (1-based).
pub fn star_rho_formula(c: &[Rational]) -> (Rational, usize) {
    let c = sorted(c);
    let mut mu = Rational::zero();
    let mut dd = Rational::zero();
    let mut best: Option<(Rational, usize)> = None;
    for (i, x) in c.iter().enumerate() {
        mu += x;
        dd += x * x;
        let r = (&mu * &mu + &dd) / (rational::int(2) * &dd);
        if best.as_ref().is_none_or(|(b, _)| r > *b) {
            best = Some((r, i + 1));
        }
    }
    best.unwrap_or((Rational::zero(), 0))
}

/// Every prefix length attaining [`star_rho_formula`].
pub fn star_argmax_prefixes(c: &[Rational]) -> Vec<usize> {
    let (rho, _) = star_rho_formula(c);
    let c = sorted(c);
    let mut mu = Rational::zero();
    let mut dd = Rational::zero();
    let mut out = Vec::new();
    for (i, x) in c.iter().enumerate() {
        mu += x;
        dd += x * x;
        if (&mu * &mu + &dd) / (rational::int(2) * &dd) == rho {
            out.push(i + 1);
        }
    }
    out
}

/// `k/2 + 1 − (k/2)(r − 1/k)² / (r² + 1/k)` for `r = d_{k+1}/μ_k ∈ [1/k, 2/k]`.
pub fn game_value_v(k: usize, d_over_mu: &Rational) -> Result<Rational> {
    let kk = from_usize(k);
    let inv = Rational::one() / &kk;
    if k == 0 || *d_over_mu < inv || *d_over_mu > rational::int(2) * &inv {
        return Err(Error::OutOfRegime { k, ratio: rational::format(d_over_mu) });
    }
    let half_k = &kk / rational::int(2);
    let gap = d_over_mu - &inv;
    Ok(&half_k + Rational::one() - &half_k * &gap * &gap / (d_over_mu * d_over_mu + &inv))
}

/// The strategy `s_k` on the first `k` leaves.
#[derive(Clone, Debug, PartialEq)]
pub struct StarState {
    pub k: usize,
    /// `d_1 ≤ … ≤ d_k`.
    pub lengths: Vec<Rational>,
    pub mu: Rational,
    /// `Σ d_i²`.
    pub d_sq: Rational,
    /// `T(s_k, v_i)` for `i = 1..k`.
    pub times: Vec<Rational>,
    /// `ρ_{s_k} = max_i T(s_k, v_i) / d_i`.
    pub rho: Rational,
    /// The step that produced this state; `None` for `k = 1`.
    pub step: Option<StarStep>,
}

/// The 2×2 game that mixes `s⁺` (new edge last) and `s⁻` (new edge inserted
/// at a uniform time).
#[derive(Clone, Debug, PartialEq)]
pub struct StarStep {
    /// Rows `s⁺, s⁻`; columns: an old vertex, the new vertex.
    pub table: [[Rational; 2]; 2],
    /// Probability of `s⁺`.
    pub plus_weight: Rational,
    pub table_value: Rational,
    /// `d_{k+1} ≥ 2μ_k/k`: playing `s⁺` alone already caps the ratio at `k/2 + 1`.
    pub plus_suffices: bool,
    /// Worst payoff of pure `s⁺` in the table.
    pub plus_alone: Rational,
    /// The worst-case game with `ρ_{s_k}` and `D_k` replaced by their extremes,
    /// with its closed form, when `1/k ≤ d_{k+1}/μ_k ≤ 2/k`.
    pub bound_game: Option<(Rational, Rational)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StarTrace {
    pub states: Vec<StarState>,
    /// `ρ_{s_n}`.
    pub rho: Rational,
    /// Leaf `i` of the sorted star holds `lengths[i - 1]`.
    pub graph: RootedGraph,
}

/// Builds `s_1, …, s_n` analytically on the star with the sorted lengths.
pub fn star_recursive_strategy(c: &[Rational]) -> Result<StarTrace> {
    let c = sorted(c);
    if c.is_empty() {
        return Err(Error::InvalidParams("a star needs at least one leaf".into()));
    }
    let graph = star(&c)?;
    let mut state = StarState {
        k: 1,
        lengths: vec![c[0].clone()],
        mu: c[0].clone(),
        d_sq: &c[0] * &c[0],
        times: vec![c[0].clone()],
        rho: Rational::one(),
        step: None,
    };
    let mut states = vec![state.clone()];
    for d in &c[1..] {
        state = extend(&state, d);
        states.push(state.clone());
    }
    Ok(StarTrace { rho: state.rho.clone(), states, graph })
}

fn extend(s: &StarState, d: &Rational) -> StarState {
    let one = Rational::one();
    let two = rational::int(2);
    let k = from_usize(s.k);
    let mu = &s.mu;
    let grow = &one + d / mu;
    let new_plus = mu / d + &one;
    let new_minus = mu / (&two * d) + &one - &s.d_sq / (&two * mu * d);
    let table = [[s.rho.clone(), new_plus.clone()], [&s.rho * &grow, new_minus]];
    let (q, table_value) = solve_2x2(table.clone());
    let plus_suffices = *d >= &two * mu / &k;
    let plus_alone = if s.rho > new_plus { s.rho.clone() } else { new_plus.clone() };

    let r = d / mu;
    let bound_game = game_value_v(s.k, &r).ok().map(|v| {
        let half = (&k + &one) / &two;
        let worst = [
            [half.clone(), &one / &r + &one],
            [&half * (&one + &r), &one / (&two * &r) + &one - &one / (&two * &k * &r)],
        ];
        (solve_2x2(worst).1, v)
    });

    // s⁻ delays an old vertex with probability T_i / μ and finds the new
    // one at the start of a length-biased edge, plus d
    let p_minus = &one - &q;
    let mut times: Vec<Rational> =
        s.times.iter().map(|t| &q * t + &p_minus * t * &grow).collect();
    let minus_new = (mu * mu - &s.d_sq) / (&two * mu) + d;
    times.push(&q * (mu + d) + &p_minus * minus_new);

    let mut lengths = s.lengths.clone();
    lengths.push(d.clone());
    let rho = times.iter().zip(&lengths).map(|(t, l)| t / l).max().expect("non-empty");
    StarState {
        k: s.k + 1,
        lengths,
        mu: mu + d,
        d_sq: &s.d_sq + d * d,
        times,
        rho,
        step: Some(StarStep { table, plus_weight: q, table_value, plus_suffices, plus_alone, bound_game }),
    }
}

/// The explicit mixture `s_n` over leaf orders; leaf `i` is vertex `i`.
pub fn star_recursive_mixed(trace: &StarTrace) -> Result<MixedSearch> {
    const MAX_LEAVES: usize = 7;
    let n = trace.graph.n();
    if n > MAX_LEAVES {
        return Err(Error::CapExceeded { what: "star leaves for materialization", count: n as u128, cap: MAX_LEAVES as u128 });
    }
    let lengths = &trace.states.last().expect("non-empty").lengths;
    let mut support: Vec<(Vec<usize>, Rational)> = vec![(vec![1], Rational::one())];
    for state in &trace.states[1..] {
        let step = state.step.as_ref().expect("later states have a step");
        let new = state.k;
        let mu = rational::sum(&lengths[..new - 1]);
        let mut next = Vec::new();
        for (order, p) in &support {
            let mut plus = order.clone();
            plus.push(new);
            next.push((plus, p * &step.plus_weight));
            let rest = p * (Rational::one() - &step.plus_weight);
            if rest.is_zero() {
                continue;
            }
            for slot in 0..order.len() {
                let mut minus = order.clone();
                minus.insert(slot, new);
                let w = &rest * &lengths[order[slot] - 1] / &mu;
                next.push((minus, w));
            }
        }
        support = next;
    }
    let g = &trace.graph;
    MixedSearch::merged(support.into_iter().map(|(order, p)| {
        let order: Vec<VertexId> = order.into_iter().map(VertexId).collect();
        (ExpandingSearch::from_vertex_order(g, &order).expect("leaf orders are searches"), p)
    }))
}
