//! Problem instances: undirected graphs, 3-CNF formulas and interior points.
//!
//! External text uses DIMACS conventions (1-based vertices and variables).
//! Everything inside the crate is 0-based; the conversion happens only in
//! the parsers and renderers of this module.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

/// Simple undirected graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl Graph {
    /// Builds a graph from 0-based edges. Each edge is stored as `(min, max)`.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::validation(format!(
                    "edge ({a}, {b}) has an endpoint outside 0..{n}"
                )));
            }
            if a == b {
                return Err(Error::validation(format!("self-loop at vertex {a}")));
            }
            if !set.insert((a.min(b), a.max(b))) {
                return Err(Error::validation(format!("duplicate edge ({a}, {b})")));
            }
        }
        Ok(Self { n, edges: set })
    }

    pub fn empty(n: usize) -> Self {
        Self {
            n,
            edges: BTreeSet::new(),
        }
    }

    /// Cycle `0 - 1 - ... - (n-1) - 0`.
    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a cycle needs at least 3 vertices");
        Self::new(n, (0..n).map(|i| (i, (i + 1) % n))).expect("cycle edges are valid")
    }

    pub fn path(n: usize) -> Self {
        Self::new(n, (1..n).map(|i| (i - 1, i))).expect("path edges are valid")
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
        Self::new(n, edges).expect("complete graph edges are valid")
    }

    /// The Petersen graph: outer 5-cycle, inner pentagram, spokes.
    pub fn petersen() -> Self {
        let mut edges = Vec::with_capacity(15);
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((5 + i, 5 + (i + 2) % 5));
            edges.push((i, i + 5));
        }
        Self::new(10, edges).expect("Petersen edges are valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        (0..self.n).filter(|&u| u != v && self.has_edge(u, v)).collect()
    }

    /// Adjacency lists indexed by vertex, each sorted ascending.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    /// Two-coloring test by breadth-first search.
    pub fn is_bipartite(&self) -> bool {
        let adj = self.adjacency();
        let mut color: Vec<Option<bool>> = vec![None; self.n];
        for start in 0..self.n {
            if color[start].is_some() {
                continue;
            }
            color[start] = Some(false);
            let mut queue = std::collections::VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                let c = color[v].unwrap();
                for &u in &adj[v] {
                    match color[u] {
                        None => {
                            color[u] = Some(!c);
                            queue.push_back(u);
                        }
                        Some(cu) if cu == c => return false,
                        Some(_) => {}
                    }
                }
            }
        }
        true
    }
}

/// Parses a DIMACS edge-format document (`p edge n m`, then `e i j` lines).
pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges = BTreeSet::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            Some("p") => {
                if header.is_some() {
                    return Err(parse_err(line_no, "second problem line"));
                }
                match tokens.next() {
                    Some("edge") | Some("col") => {}
                    other => {
                        return Err(parse_err(
                            line_no,
                            format!("expected `p edge`, found format {other:?}"),
                        ))
                    }
                }
                let n = parse_count(tokens.next(), line_no, "vertex count")?;
                let m = parse_count(tokens.next(), line_no, "edge count")?;
                if tokens.next().is_some() {
                    return Err(parse_err(line_no, "trailing tokens on problem line"));
                }
                header = Some((n, m));
            }
            Some("e") => {
                let (n, _) = header.ok_or_else(|| parse_err(line_no, "edge before problem line"))?;
                let a = parse_vertex(tokens.next(), line_no, n)?;
                let b = parse_vertex(tokens.next(), line_no, n)?;
                if tokens.next().is_some() {
                    return Err(parse_err(line_no, "trailing tokens on edge line"));
                }
                if a == b {
                    return Err(Error::validation(format!(
                        "line {line_no}: self-loop at vertex {}",
                        a + 1
                    )));
                }
                if !edges.insert((a.min(b), a.max(b))) {
                    return Err(Error::validation(format!(
                        "line {line_no}: duplicate edge {} {}",
                        a + 1,
                        b + 1
                    )));
                }
            }
            Some(other) => {
                return Err(parse_err(line_no, format!("unknown line type `{other}`")));
            }
            None => unreachable!("blank lines are skipped"),
        }
    }

    let (n, m) = header.ok_or_else(|| parse_err(1, "missing `p edge n m` problem line"))?;
    if edges.len() != m {
        return Err(Error::validation(format!(
            "problem line declares {m} edges but {} were listed",
            edges.len()
        )));
    }
    Ok(Graph { n, edges })
}

/// Renders a graph in DIMACS edge format.
pub fn render_graph(g: &Graph) -> String {
    let mut out = format!("p edge {} {}\n", g.n, g.edges.len());
    for (a, b) in g.edges() {
        out.push_str(&format!("e {} {}\n", a + 1, b + 1));
    }
    out
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_count(tok: Option<&str>, line: usize, what: &str) -> Result<usize> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| parse_err(line, format!("invalid {what} `{tok}`")))
}

fn parse_vertex(tok: Option<&str>, line: usize, n: usize) -> Result<usize> {
    let tok = tok.ok_or_else(|| parse_err(line, "missing endpoint"))?;
    let v: i64 = tok
        .parse()
        .map_err(|_| parse_err(line, format!("invalid endpoint `{tok}`")))?;
    if v < 1 || v as u64 > n as u64 {
        return Err(Error::Range {
            line,
            value: v,
            max: n,
        });
    }
    Ok(v as usize - 1)
}

/// A literal over a 0-based variable index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub var: usize,
    pub positive: bool,
}

impl Literal {
    pub fn pos(var: usize) -> Self {
        Self {
            var,
            positive: true,
        }
    }

    pub fn neg(var: usize) -> Self {
        Self {
            var,
            positive: false,
        }
    }

    pub fn complement(self) -> Self {
        Self {
            var: self.var,
            positive: !self.positive,
        }
    }

    /// From a signed, 1-based DIMACS literal. Panics on 0.
    pub fn from_dimacs(lit: i64) -> Self {
        assert!(lit != 0, "0 is the clause terminator, not a literal");
        Self {
            var: lit.unsigned_abs() as usize - 1,
            positive: lit > 0,
        }
    }

    pub fn to_dimacs(self) -> i64 {
        let v = self.var as i64 + 1;
        if self.positive {
            v
        } else {
            -v
        }
    }

    /// `x` for a positive literal, `-x` for a negative one.
    pub fn value(self, x: &[f64]) -> f64 {
        let v = x[self.var];
        if self.positive {
            v
        } else {
            -v
        }
    }

    /// Truth under a ±1 assignment (`+1` is true).
    pub fn is_true(self, assignment: &[i8]) -> bool {
        (assignment[self.var] > 0) == self.positive
    }

    /// Index of the literal's node in the 2n-node literal digraph:
    /// `x_i -> 2i`, `!x_i -> 2i + 1`.
    pub fn node(self) -> usize {
        2 * self.var + usize::from(!self.positive)
    }

    pub fn from_node(node: usize) -> Self {
        Self {
            var: node / 2,
            positive: node.is_multiple_of(2),
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(f, "x{}", self.var + 1)
        } else {
            write!(f, "!x{}", self.var + 1)
        }
    }
}

/// A 3-literal clause over distinct variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Clause(pub [Literal; 3]);

impl Clause {
    pub fn new(lits: [Literal; 3]) -> Result<Self> {
        let [a, b, c] = lits;
        if a.var == b.var || a.var == c.var || b.var == c.var {
            return Err(Error::validation(format!(
                "clause ({a} | {b} | {c}) repeats a variable"
            )));
        }
        Ok(Self(lits))
    }

    pub fn from_dimacs(lits: [i64; 3]) -> Result<Self> {
        if lits.contains(&0) {
            return Err(Error::validation("0 is not a literal"));
        }
        Self::new(lits.map(Literal::from_dimacs))
    }

    pub fn literals(&self) -> &[Literal; 3] {
        &self.0
    }

    pub fn is_satisfied(&self, assignment: &[i8]) -> bool {
        self.0.iter().any(|l| l.is_true(assignment))
    }

    pub fn max_var(&self) -> usize {
        self.0.iter().map(|l| l.var).max().unwrap()
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.0;
        write!(f, "({a} | {b} | {c})")
    }
}

/// Conjunction of 3-literal clauses over variables `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfFormula {
    n: usize,
    clauses: Vec<Clause>,
}

impl CnfFormula {
    pub fn new(n: usize, clauses: Vec<Clause>) -> Result<Self> {
        if let Some(c) = clauses.iter().find(|c| c.max_var() >= n) {
            return Err(Error::validation(format!(
                "clause {c} uses a variable outside 1..={n}"
            )));
        }
        Ok(Self { n, clauses })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn unsatisfied_count(&self, assignment: &[i8]) -> usize {
        self.clauses
            .iter()
            .filter(|c| !c.is_satisfied(assignment))
            .count()
    }
}

/// Parses a DIMACS CNF document restricted to 3-SAT.
///
/// Clauses may span lines; each ends at a `0` token. A lone `%` line (as in
/// the SATLIB benchmark files) ends the clause section.
pub fn parse_cnf(text: &str) -> Result<CnfFormula> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut pending: Vec<i64> = Vec::new();
    let mut pending_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line == "%" {
            break;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(parse_err(line_no, "second problem line"));
            }
            let mut tokens = line.split_whitespace().skip(1);
            if tokens.next() != Some("cnf") {
                return Err(parse_err(line_no, "expected `p cnf n m`"));
            }
            let n = parse_count(tokens.next(), line_no, "variable count")?;
            let m = parse_count(tokens.next(), line_no, "clause count")?;
            if tokens.next().is_some() {
                return Err(parse_err(line_no, "trailing tokens on problem line"));
            }
            header = Some((n, m));
            continue;
        }
        let (n, _) = header.ok_or_else(|| parse_err(line_no, "clause before problem line"))?;
        for tok in line.split_whitespace() {
            let lit: i64 = tok
                .parse()
                .map_err(|_| parse_err(line_no, format!("invalid literal `{tok}`")))?;
            if lit == 0 {
                clauses.push(finish_clause(&pending, pending_line)?);
                pending.clear();
                continue;
            }
            if lit.unsigned_abs() > n as u64 {
                return Err(Error::Range {
                    line: line_no,
                    value: lit,
                    max: n,
                });
            }
            if pending.is_empty() {
                pending_line = line_no;
            }
            pending.push(lit);
        }
    }

    let (n, m) = header.ok_or_else(|| parse_err(1, "missing `p cnf n m` problem line"))?;
    if !pending.is_empty() {
        return Err(parse_err(pending_line, "clause not terminated by 0"));
    }
    if clauses.len() != m {
        return Err(Error::validation(format!(
            "problem line declares {m} clauses but {} were listed",
            clauses.len()
        )));
    }
    CnfFormula::new(n, clauses)
}

fn finish_clause(lits: &[i64], line: usize) -> Result<Clause> {
    let arr: [i64; 3] = lits.try_into().map_err(|_| {
        Error::validation(format!(
            "line {line}: clause has {} literals, only 3-SAT is supported",
            lits.len()
        ))
    })?;
    Clause::from_dimacs(arr).map_err(|e| match e {
        Error::Validation(msg) => Error::Validation(format!("line {line}: {msg}")),
        other => other,
    })
}

pub fn render_cnf(f: &CnfFormula) -> String {
    let mut out = format!("p cnf {} {}\n", f.n, f.clauses.len());
    for c in &f.clauses {
        let [a, b, d] = c.0;
        out.push_str(&format!(
            "{} {} {} 0\n",
            a.to_dimacs(),
            b.to_dimacs(),
            d.to_dimacs()
        ));
    }
    out
}

/// A point strictly inside the cube `(-1, 1)^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct InteriorPoint {
    coords: Vec<f64>,
}

impl InteriorPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if let Some((i, v)) = coords
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && v.abs() < 1.0))
        {
            return Err(Error::domain(format!(
                "coordinate {} = {v} is not strictly inside (-1, 1)",
                i + 1
            )));
        }
        Ok(Self { coords })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            coords: vec![0.0; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.coords
    }
}

impl AsRef<[f64]> for InteriorPoint {
    fn as_ref(&self) -> &[f64] {
        &self.coords
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_triangle() {
        let g = parse_graph("p edge 3 3\ne 1 2\ne 2 3\ne 1 3\n").unwrap();
        assert_eq!(g, Graph::complete(3));
    }

    #[test]
    fn parses_five_cycle_with_comments() {
        let text = "c a pentagon\n\np edge 5 5\n e 1 2\ne 2 3\ne 3 4\ne 4   5\ne 5 1\n";
        assert_eq!(parse_graph(text).unwrap(), Graph::cycle(5));
    }

    #[test]
    fn endpoint_out_of_range() {
        let err = parse_graph("p edge 2 1\ne 1 3\n").unwrap_err();
        assert!(matches!(
            err,
            Error::Range {
                line: 2,
                value: 3,
                max: 2
            }
        ));
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let err = parse_graph("p edge 3 1\ne 1 x\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = parse_graph("p edge 3 1\nq 1 2\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn duplicate_and_reversed_edges_rejected() {
        assert!(matches!(
            parse_graph("p edge 3 2\ne 1 2\ne 2 1\n"),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            parse_graph("p edge 3 1\ne 2 2\n"),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn parses_single_clause() {
        let f = parse_cnf("p cnf 3 1\n1 2 -3 0\n").unwrap();
        assert_eq!(f.n(), 3);
        assert_eq!(
            f.clauses()[0],
            Clause([Literal::pos(0), Literal::pos(1), Literal::neg(2)])
        );
    }

    #[test]
    fn repeated_variable_rejected() {
        assert!(matches!(
            parse_cnf("p cnf 3 1\n1 1 2 0\n"),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            parse_cnf("p cnf 3 1\n1 -1 2 0\n"),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn wrong_arity_rejected() {
        assert!(matches!(
            parse_cnf("p cnf 4 1\n1 2 3 4 0\n"),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            parse_cnf("p cnf 4 1\n1 2 0\n"),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn clause_pair_and_multiline_clauses() {
        let f = parse_cnf("p cnf 5 2\n1 2 -3 0\n3 4\n 5 0\n%\n0\n").unwrap();
        assert_eq!(f.m(), 2);
        assert_eq!(
            f.clauses()[1],
            Clause([Literal::pos(2), Literal::pos(3), Literal::pos(4)])
        );
    }

    #[test]
    fn unterminated_clause() {
        assert!(matches!(
            parse_cnf("p cnf 3 1\n1 2 3\n"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn literal_nodes_pair_up() {
        for v in 0..5 {
            let p = Literal::pos(v);
            assert_eq!(p.node() ^ 1, p.complement().node());
            assert_eq!(Literal::from_node(p.node()), p);
            assert_eq!(Literal::from_dimacs(p.to_dimacs()), p);
        }
    }

    #[test]
    fn interior_point_is_open() {
        assert!(InteriorPoint::new(vec![0.5, -0.99]).is_ok());
        assert!(InteriorPoint::new(vec![1.0]).is_err());
        assert!(InteriorPoint::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn petersen_is_cubic() {
        let g = Graph::petersen();
        assert_eq!(g.edge_count(), 15);
        assert!(g.adjacency().iter().all(|a| a.len() == 3));
        assert!(!g.is_bipartite());
        assert!(Graph::cycle(6).is_bipartite());
    }

    fn arb_graph() -> impl Strategy<Value = Graph> {
        (1usize..9).prop_flat_map(|n| {
            proptest::collection::vec((0..n, 0..n), 0..20).prop_map(move |pairs| {
                let edges: BTreeSet<_> = pairs
                    .into_iter()
                    .filter(|(a, b)| a != b)
                    .map(|(a, b)| (a.min(b), a.max(b)))
                    .collect();
                Graph::new(n, edges).unwrap()
            })
        })
    }

    fn arb_formula() -> impl Strategy<Value = CnfFormula> {
        (3usize..8).prop_flat_map(|n| {
            proptest::collection::vec(
                (
                    proptest::sample::subsequence((0..n).collect::<Vec<_>>(), 3),
                    any::<[bool; 3]>(),
                ),
                0..10,
            )
            .prop_map(move |raw| {
                let clauses = raw
                    .into_iter()
                    .map(|(vars, signs)| {
                        Clause::new([0, 1, 2].map(|k| Literal {
                            var: vars[k],
                            positive: signs[k],
                        }))
                        .unwrap()
                    })
                    .collect();
                CnfFormula::new(n, clauses).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn graph_round_trip(g in arb_graph()) {
            prop_assert_eq!(parse_graph(&render_graph(&g)).unwrap(), g);
        }

        #[test]
        fn edge_order_is_irrelevant(g in arb_graph(), seed in any::<u64>()) {
            let text = render_graph(&g);
            let mut lines: Vec<&str> = text.lines().skip(1).collect();
            // deterministic shuffle
            let len = lines.len();
            for i in (1..len).rev() {
                let j = (seed.wrapping_mul(6364136223846793005).wrapping_add(i as u64) % (i as u64 + 1)) as usize;
                lines.swap(i, j);
            }
            let shuffled = format!("p edge {} {}\n{}\n", g.n(), g.edge_count(), lines.join("\n"));
            prop_assert_eq!(parse_graph(&shuffled).unwrap(), g);
        }

        #[test]
        fn cnf_round_trip(f in arb_formula()) {
            prop_assert_eq!(parse_cnf(&render_cnf(&f)).unwrap(), f);
        }
    }
}
