//! The 3-SAT reduction behind the hardness of computing the search ratio,
//! and the search built from a satisfying assignment.

use crate::error::{Error, Result};
use crate::graph::{EdgeId, RootedGraph, VertexId};
use crate::rational::{self, frac, int, Rational};
use crate::search::{search_ratio, validate_search, ExpandingSearch};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    /// Zero-based variable index.
    pub var: usize,
    pub positive: bool,
}

impl Literal {
    pub fn satisfied_by(self, assignment: &[bool]) -> bool {
        assignment[self.var] == self.positive
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SatInstance {
    pub n_vars: usize,
    pub clauses: Vec<[Literal; 3]>,
}

impl SatInstance {
    pub fn new(n_vars: usize, clauses: Vec<[Literal; 3]>) -> Result<SatInstance> {
        if let Some(l) = clauses.iter().flatten().find(|l| l.var >= n_vars) {
            return Err(Error::InvalidParams(format!("literal on variable {} of {n_vars}", l.var + 1)));
        }
        Ok(SatInstance { n_vars, clauses })
    }

    /// Builds clauses from DIMACS-style signed 1-based literals, padding
    /// short clauses by repeating their first literal.
    pub fn from_signed(n_vars: usize, clauses: &[Vec<i64>]) -> Result<SatInstance> {
        let mut out = Vec::with_capacity(clauses.len());
        for c in clauses {
            out.push(pad_clause(c).map_err(Error::InvalidParams)?);
        }
        SatInstance::new(n_vars, out)
    }

    pub fn satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| c.iter().any(|l| l.satisfied_by(assignment)))
    }
}

fn pad_clause(c: &[i64]) -> std::result::Result<[Literal; 3], String> {
    if c.is_empty() || c.len() > 3 {
        return Err(format!("clause with {} literals; expected 1 to 3", c.len()));
    }
    let lit = |x: i64| Literal { var: x.unsigned_abs() as usize - 1, positive: x > 0 };
    let first = lit(c[0]);
    let get = |i: usize| c.get(i).map_or(first, |&x| lit(x));
    Ok([first, get(1), get(2)])
}

/// Reads the DIMACS CNF subset: `c` comments, one `p cnf <vars> <clauses>`
/// header, and zero-terminated clauses of one to three literals.
pub fn parse_dimacs(text: &str) -> Result<SatInstance> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<Vec<i64>> = Vec::new();
    let mut current: Vec<i64> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |msg: String| Error::Parse { line, msg };
        let content = raw.trim();
        if content.is_empty() || content.starts_with('c') {
            continue;
        }
        if content.starts_with('%') {
            break;
        }
        if let Some(rest) = content.strip_prefix('p') {
            let f: Vec<&str> = rest.split_whitespace().collect();
            match f.as_slice() {
                ["cnf", n, m] if header.is_none() => {
                    let n = n.parse().map_err(|_| err(format!("bad variable count {n:?}")))?;
                    let m = m.parse().map_err(|_| err(format!("bad clause count {m:?}")))?;
                    header = Some((n, m));
                }
                _ => return Err(err("expected one `p cnf <vars> <clauses>` header".into())),
            }
            continue;
        }
        let (n, _) = header.ok_or_else(|| err("clause before the header".into()))?;
        for tok in content.split_whitespace() {
            let x: i64 = tok.parse().map_err(|_| err(format!("bad literal {tok:?}")))?;
            if x == 0 {
                if current.is_empty() {
                    return Err(err("empty clause".into()));
                }
                if current.len() > 3 {
                    return Err(err(format!("clause with {} literals; expected at most 3", current.len())));
                }
                clauses.push(std::mem::take(&mut current));
            } else {
                if x.unsigned_abs() as usize > n {
                    return Err(err(format!("literal {x} beyond {n} variables")));
                }
                current.push(x);
            }
        }
    }
    let (n, m) = header.ok_or(Error::Parse { line: 0, msg: "missing `p cnf` header".into() })?;
    if !current.is_empty() {
        return Err(Error::Parse { line: 0, msg: "last clause is not terminated by 0".into() });
    }
    if clauses.len() != m {
        return Err(Error::Parse { line: 0, msg: format!("header announces {m} clauses, found {}", clauses.len()) });
    }
    SatInstance::from_signed(n, &clauses)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Root,
    P,
    /// Zero-based clause index.
    Clause(usize),
    /// Zero-based variable index.
    Variable(usize),
    Literal { var: usize, value: bool },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReductionOutput {
    pub formula: SatInstance,
    pub graph: RootedGraph,
    /// `1 + (2/3)(n + m)`: the formula is satisfiable iff `σ(G) ≤ R`.
    pub r: Rational,
    /// Indexed by vertex id.
    pub roles: Vec<Role>,
    /// Clauses whose three literal slots name fewer than three distinct literals.
    pub degenerate_clauses: Vec<usize>,
}

impl ReductionOutput {
    fn n(&self) -> usize {
        self.formula.n_vars
    }

    fn m(&self) -> usize {
        self.formula.clauses.len()
    }

    pub fn p(&self) -> VertexId {
        VertexId(1)
    }

    pub fn clause(&self, j: usize) -> VertexId {
        VertexId(2 + j)
    }

    pub fn variable(&self, i: usize) -> VertexId {
        VertexId(2 + self.m() + i)
    }

    pub fn literal(&self, i: usize, value: bool) -> VertexId {
        VertexId(2 + self.m() + self.n() + 2 * i + value as usize)
    }

    fn edge(&self, a: VertexId, b: VertexId) -> EdgeId {
        self.graph.edge_between(a, b).expect("edge of the construction")
    }
}

/// Vertices `O, P, C_1..C_m, X_1..X_n, X_1^0, X_1^1, …`; unit edges inside
/// each variable gadget and to `P`, length-2 clause–literal edges, and
/// length-3 edges from the root to `P` and every clause and variable vertex.
pub fn sat_reduce(f: &SatInstance) -> Result<ReductionOutput> {
    let (n, m) = (f.n_vars, f.clauses.len());
    if m < n {
        return Err(Error::PreconditionMViolated { vars: n, clauses: m });
    }
    let clause = |j: usize| 2 + j;
    let var = |i: usize| 2 + m + i;
    let lit = |i: usize, value: bool| 2 + m + n + 2 * i + value as usize;
    let mut labels = vec!["O".to_string(), "P".to_string()];
    let mut roles = vec![Role::Root, Role::P];
    for j in 0..m {
        labels.push(format!("C{}", j + 1));
        roles.push(Role::Clause(j));
    }
    for i in 0..n {
        labels.push(format!("X{}", i + 1));
        roles.push(Role::Variable(i));
    }
    for i in 0..n {
        for value in [false, true] {
            labels.push(format!("X{}_{}", i + 1, value as u8));
            roles.push(Role::Literal { var: i, value });
        }
    }
    let mut edges = Vec::new();
    for i in 0..n {
        for value in [false, true] {
            edges.push((var(i), lit(i, value), int(1)));
            edges.push((1, lit(i, value), int(1)));
        }
    }
    let mut degenerate_clauses = Vec::new();
    for (j, c) in f.clauses.iter().enumerate() {
        let mut distinct: Vec<Literal> = c.to_vec();
        distinct.sort();
        distinct.dedup();
        if distinct.len() < 3 {
            degenerate_clauses.push(j);
        }
        for l in distinct {
            edges.push((clause(j), lit(l.var, l.positive), int(2)));
        }
    }
    for j in 0..m {
        edges.push((0, clause(j), int(3)));
    }
    for i in 0..n {
        edges.push((0, var(i), int(3)));
    }
    edges.push((0, 1, int(3)));
    let graph = RootedGraph::from_parts(labels, &edges, 0)?;
    let r = int(1) + frac(2, 3) * rational::int((n + m) as i64);
    Ok(ReductionOutput { formula: f.clone(), graph, r, roles, degenerate_clauses })
}

#[derive(Clone, Debug, PartialEq)]
pub struct WitnessSearch {
    pub search: ExpandingSearch,
    pub ratio: Rational,
    /// `λ(H^b)`: the prefix covering every vertex at distance 3.
    pub tree_length: Rational,
    /// Clauses the assignment leaves unsatisfied, attached by their root edge.
    pub unsatisfied: Vec<usize>,
}

/// The tree `H^b` searched in construction order, completed by the unused
/// literal vertices.
pub fn sat_witness_search(red: &ReductionOutput, b: &[bool]) -> Result<WitnessSearch> {
    let n = red.n();
    if b.len() != n {
        return Err(Error::InvalidParams(format!("assignment has {} bits for {n} variables", b.len())));
    }
    let g = &red.graph;
    let mut edges = vec![red.edge(g.root(), red.p())];
    for (i, &bit) in b.iter().enumerate() {
        edges.push(red.edge(red.p(), red.literal(i, bit)));
    }
    let mut unsatisfied = Vec::new();
    for (j, c) in red.formula.clauses.iter().enumerate() {
        match c.iter().find(|l| l.satisfied_by(b)) {
            Some(l) => edges.push(red.edge(red.literal(l.var, l.positive), red.clause(j))),
            None => {
                unsatisfied.push(j);
                edges.push(red.edge(g.root(), red.clause(j)));
            }
        }
    }
    for (i, &bit) in b.iter().enumerate() {
        edges.push(red.edge(red.literal(i, bit), red.variable(i)));
    }
    let tree_length = rational::sum(edges.iter().map(|e| &g.edge(*e).length));
    for (i, &bit) in b.iter().enumerate() {
        edges.push(red.edge(red.p(), red.literal(i, !bit)));
    }
    let search = validate_search(g, &edges)?;
    let ratio = search_ratio(g, &search).ratio;
    Ok(WitnessSearch { search, ratio, tree_length, unsatisfied })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::det::brute_force_sigma;
    use crate::oracle::DEFAULT_CAP;
    use proptest::prelude::*;

    fn sat_fixture() -> SatInstance {
        SatInstance::from_signed(1, &[vec![1, 1, 1]]).unwrap()
    }

    fn unsat_fixture() -> SatInstance {
        SatInstance::from_signed(1, &[vec![1], vec![-1]]).unwrap()
    }

    #[test]
    fn dimacs() {
        let f = parse_dimacs("c demo\np cnf 3 3\n1 -2 3 0\n2 0 -1\n3 0\n").unwrap();
        assert_eq!(f.n_vars, 3);
        assert_eq!(f.clauses[1], [Literal { var: 1, positive: true }; 3]);
        assert_eq!(f.clauses[2][0], Literal { var: 0, positive: false });
        assert_eq!(f.clauses[2][1], Literal { var: 2, positive: true });
        assert!(matches!(parse_dimacs("p cnf 1 1\n1 1 1 1 0\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_dimacs("p cnf 1 1\n2 0\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_dimacs("p cnf 1 2\n1 0\n"), Err(Error::Parse { line: 0, .. })));
        assert!(matches!(parse_dimacs("1 0\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_dimacs("p cnf 1 1\n0\n"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn reduction_shape() {
        let red = sat_reduce(&unsat_fixture()).unwrap();
        assert_eq!(red.graph.vertex_count(), 7);
        assert_eq!(red.graph.edge_count(), 10);
        assert_eq!(red.r, int(3));
        assert_eq!(red.degenerate_clauses, vec![0, 1]);
        assert_eq!(sat_reduce(&sat_fixture()).unwrap().r, frac(7, 3));
        let two = SatInstance::from_signed(2, &[vec![1]]).unwrap();
        assert!(matches!(sat_reduce(&two), Err(Error::PreconditionMViolated { vars: 2, clauses: 1 })));
    }

    #[test]
    fn satisfiable_fixture() {
        let red = sat_reduce(&sat_fixture()).unwrap();
        let w = sat_witness_search(&red, &[true]).unwrap();
        assert_eq!(w.tree_length, int(7));
        assert_eq!(w.tree_length, int(3) * &red.r);
        assert!(w.unsatisfied.is_empty());
        assert!(w.ratio <= red.r);
        let bad = sat_witness_search(&red, &[false]).unwrap();
        assert_eq!(bad.unsatisfied, vec![0]);
        assert!(sat_witness_search(&red, &[true, false]).is_err());
    }

    #[test]
    fn unsatisfiable_fixture() {
        let red = sat_reduce(&unsat_fixture()).unwrap();
        assert!(brute_force_sigma(&red.graph, DEFAULT_CAP).unwrap().0 > red.r);
    }

    fn distance_partition_holds(red: &ReductionOutput) -> bool {
        let dm = red.graph.distances();
        red.graph.non_root().all(|v| {
            let want = match red.roles[v.0] {
                Role::Literal { .. } => 4,
                _ => 3,
            };
            *dm.d(v) == int(want)
        })
    }

    fn arb_formula() -> impl Strategy<Value = SatInstance> {
        (1usize..=3).prop_flat_map(|n| {
            let lit = (1..=n as i64, any::<bool>()).prop_map(|(v, s)| if s { v } else { -v });
            proptest::collection::vec(proptest::collection::vec(lit, 3), n..=n + 2)
                .prop_map(move |c| SatInstance::from_signed(n, &c).unwrap())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn witnesses_and_distances(f in arb_formula()) {
            let red = sat_reduce(&f).unwrap();
            prop_assert!(distance_partition_holds(&red));
            for mask in 0..(1u32 << f.n_vars) {
                let b: Vec<bool> = (0..f.n_vars).map(|i| mask >> i & 1 == 1).collect();
                let w = sat_witness_search(&red, &b).unwrap();
                prop_assert_eq!(w.unsatisfied.is_empty(), f.satisfied_by(&b));
                if f.satisfied_by(&b) {
                    prop_assert_eq!(&w.tree_length, &(int(3) * &red.r));
                    prop_assert!(w.ratio <= red.r);
                }
            }
        }
    }
}
