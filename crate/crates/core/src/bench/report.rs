//! Experiment rows and their CSV form.
//!
//! Columns: `instance, family, n, method, kind, ratio, certified_bound,
//! oracle, wall_ms`. `kind` is `sigma` for deterministic ratios, `rho` for
//! randomized ones, `rho-lower` for Hider lower bounds and `rho-cap` for the
//! `(n+1)/2` cap. `certified_bound` is the value the method is proven not to
//! exceed, when it is computable. `oracle` is the exact optimum of the same
//! quantity; it is left empty on bound rows. Floats carry 12 significant
//! digits; empty cells mean "not computed".

use std::time::Instant;

use rayon::prelude::*;

use crate::det::{brute_force_sigma, distance_order_search, doubling_search, SteinerMode};
use crate::error::{Error, Result};
use crate::graph::{star_closure, RootedGraph, VertexId};
use crate::oracle::{exact_rho, DEFAULT_CAP};
use crate::randomized::{
    deepening_ratio_estimate, lift_star_strategy, star_recursive_mixed, star_recursive_strategy, star_rho_formula,
    unweighted_inductive_strategy,
};
use crate::rational::{self, format_sig12, Rational};
use crate::search::{best_prefix_bound, mixed_payoffs, ExpandingSearch, MixedSearch};

use super::gen::{gen_instance, Family, GenParams};

pub const COLUMNS: [&str; 9] =
    ["instance", "family", "n", "method", "kind", "ratio", "certified_bound", "oracle", "wall_ms"];

#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub instance: String,
    pub family: String,
    pub n: usize,
    pub method: String,
    pub kind: &'static str,
    pub ratio: f64,
    pub certified_bound: Option<f64>,
    pub oracle: Option<f64>,
    pub wall_ms: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReportConfig {
    pub cap: u128,
    /// Compute exact optima where the search count is within `cap`.
    pub oracle: bool,
    pub steiner: SteinerMode,
    pub trials: usize,
    pub seed: u64,
}

impl Default for ReportConfig {
    fn default() -> ReportConfig {
        ReportConfig { cap: DEFAULT_CAP, oracle: false, steiner: SteinerMode::Exact, trials: 10_000, seed: 0 }
    }
}

/// Leaves beyond which explicit star mixtures are not built.
const MATERIALIZE_LEAVES: usize = 7;
/// The inductive strategy doubles its support with every vertex.
const INDUCTIVE_VERTICES: usize = 12;

struct Ctx<'a> {
    instance: &'a str,
    family: &'a str,
    g: &'a RootedGraph,
}

impl Ctx<'_> {
    fn row(&self, method: &str, kind: &'static str, ratio: f64, started: Instant) -> ReportRow {
        ReportRow {
            instance: self.instance.to_string(),
            family: self.family.to_string(),
            n: self.g.n(),
            method: method.to_string(),
            kind,
            ratio,
            certified_bound: None,
            oracle: None,
            wall_ms: started.elapsed().as_secs_f64() * 1e3,
        }
    }
}

/// `Ok(None)` when the optimum is out of reach under `cap`.
fn optional<T>(r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(x) => Ok(Some(x)),
        Err(Error::CapExceeded { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn f(x: &Rational) -> f64 {
    rational::to_f64(x)
}

pub fn sigma_rows(instance: &str, family: &str, g: &RootedGraph, cfg: &ReportConfig) -> Result<Vec<ReportRow>> {
    let ctx = Ctx { instance, family, g };
    let mut rows = Vec::new();
    let oracle = if cfg.oracle { optional(brute_force_sigma(g, cfg.cap))?.map(|(s, _)| f(&s)) } else { None };
    if g.is_tree() || g.is_unweighted() {
        let t = Instant::now();
        let (_, sigma) = distance_order_search(g)?;
        let mut row = ctx.row("distance-order", "sigma", f(&sigma), t);
        row.certified_bound = Some(f(&sigma));
        row.oracle = oracle;
        rows.push(row);
    }
    let t = Instant::now();
    let d = doubling_search(g, cfg.steiner)?;
    let mut row = ctx.row(&format!("doubling-{}", cfg.steiner), "sigma", f(&d.ratio), t);
    row.certified_bound = oracle.map(|s| d.certified_factor as f64 * s);
    row.oracle = oracle;
    rows.push(row);
    Ok(rows)
}

/// The recursive star strategy on the star closure, lifted back to `g`.
fn lifted_star(g: &RootedGraph) -> Result<MixedSearch> {
    let closure = star_closure(g);
    let dm = g.distances();
    let mut by_length: Vec<VertexId> = g.non_root().collect();
    by_length.sort_by(|a, b| dm.d(*a).cmp(dm.d(*b)).then(a.cmp(b)));
    let lengths: Vec<Rational> = by_length.iter().map(|v| dm.d(*v).clone()).collect();
    let trace = star_recursive_strategy(&lengths)?;
    let on_sorted = star_recursive_mixed(&trace)?;
    // leaf i of the sorted star is by_length[i - 1]
    let on_closure = on_sorted
        .support()
        .iter()
        .map(|(s, p)| {
            let order: Vec<VertexId> = s.order().iter().map(|v| by_length[v.0 - 1]).collect();
            Ok((ExpandingSearch::from_vertex_order(&closure, &order)?, p.clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    lift_star_strategy(g, &MixedSearch::merged(on_closure)?)
}

pub fn rho_rows(instance: &str, family: &str, g: &RootedGraph, cfg: &ReportConfig) -> Result<Vec<ReportRow>> {
    let ctx = Ctx { instance, family, g };
    let n = g.n();
    let cap = (n as f64 + 1.0) / 2.0;
    let oracle = if cfg.oracle { optional(exact_rho(g, cfg.cap))?.map(|r| r.solution.value) } else { None };
    let mut rows = Vec::new();

    let t = Instant::now();
    let lower = best_prefix_bound(g, n <= 15)?;
    rows.push(ctx.row("best-prefix", "rho-lower", f(&lower.bound), t));

    let mut constructive = |method: &str, ratio: f64, bound: Option<f64>, t: Instant| {
        let mut row = ctx.row(method, "rho", ratio, t);
        row.certified_bound = bound;
        row.oracle = oracle;
        rows.push(row);
    };
    if g.is_star() {
        let t = Instant::now();
        let lengths: Vec<Rational> = g.edges().iter().map(|e| e.length.clone()).collect();
        let (rho, _) = star_rho_formula(&lengths);
        constructive("star-formula", f(&rho), Some(f(&rho)), t);
        let t = Instant::now();
        let trace = star_recursive_strategy(&lengths)?;
        constructive("star-recursive", f(&trace.rho), Some(cap), t);
    } else if n <= MATERIALIZE_LEAVES {
        let t = Instant::now();
        let lifted = lifted_star(g)?;
        constructive("lifted-star", f(&mixed_payoffs(g, &lifted).ratio.ratio), Some(cap), t);
    }
    if g.is_unweighted() && n <= INDUCTIVE_VERTICES {
        let t = Instant::now();
        let s = unweighted_inductive_strategy(g)?;
        constructive("inductive", f(&mixed_payoffs(g, &s).ratio.ratio), Some(cap), t);
    }
    if g.is_tree() || g.is_unweighted() {
        let t = Instant::now();
        let e = deepening_ratio_estimate(g, cfg.trials, cfg.seed)?;
        constructive("deepening", e.ratio, oracle.map(|r| 1.25 * r + 0.5), t);
    }

    let t = Instant::now();
    rows.push(ctx.row("uniform-star-cap", "rho-cap", cap, t));
    Ok(rows)
}

/// Exact `ρ` and `σ`; unlike the other reports, exceeding the cap is an error.
pub fn oracle_rows(instance: &str, family: &str, g: &RootedGraph, cfg: &ReportConfig) -> Result<Vec<ReportRow>> {
    let ctx = Ctx { instance, family, g };
    let t = Instant::now();
    let r = exact_rho(g, cfg.cap)?;
    let mut rho = ctx.row("lp", "rho", r.solution.value, t);
    rho.certified_bound = Some(r.solution.upper);
    rho.oracle = Some(r.solution.value);
    let t = Instant::now();
    let (sigma, _) = brute_force_sigma(g, cfg.cap)?;
    let mut det = ctx.row("brute-force", "sigma", f(&sigma), t);
    det.certified_bound = Some(f(&sigma));
    det.oracle = Some(f(&sigma));
    Ok(vec![rho, det])
}

/// Generates `instances` graphs with seeds `seed, seed+1, …` and reports
/// both ratios for each, in seed order.
pub fn bench_rows(family: Family, params: &GenParams, instances: usize, cfg: &ReportConfig) -> Result<Vec<ReportRow>> {
    let per_instance: Vec<Result<Vec<ReportRow>>> = (0..instances as u64)
        .into_par_iter()
        .map(|k| {
            let seed = cfg.seed.wrapping_add(k);
            let g = gen_instance(family, params, seed)?;
            let id = format!("{family}-{seed}");
            let mut rows = sigma_rows(&id, family.name(), &g, cfg)?;
            rows.extend(rho_rows(&id, family.name(), &g, cfg)?);
            Ok(rows)
        })
        .collect();
    let mut out = Vec::new();
    for rows in per_instance {
        out.extend(rows?);
    }
    Ok(out)
}

fn cell(x: Option<f64>) -> String {
    x.map(format_sig12).unwrap_or_default()
}

pub fn write_csv<W: std::io::Write>(out: W, rows: &[ReportRow]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COLUMNS)?;
    for r in rows {
        w.write_record([
            r.instance.clone(),
            r.family.clone(),
            r.n.to_string(),
            r.method.clone(),
            r.kind.to_string(),
            format_sig12(r.ratio),
            cell(r.certified_bound),
            cell(r.oracle),
            format!("{:.3}", r.wall_ms),
        ])?;
    }
    w.flush()
}

pub fn to_csv(rows: &[ReportRow]) -> String {
    let mut buf = Vec::new();
    write_csv(&mut buf, rows).expect("writing to memory");
    String::from_utf8(buf).expect("utf-8")
}
