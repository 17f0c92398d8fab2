//! Inequality systems in the ±1 formulation.
//!
//! Independent sets: `w_i = 1` in the set, `-1` outside; every edge gives
//! `w_i + w_j <= 0` and every odd cycle of length `2k+1` the sharper
//! `sum w <= -1`. Clauses: with `v(x) = x`, `v(!x) = -x`, a clause is
//! violated only when all three literals are `-1`, so `v1 + v2 + v3 >= -1`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instances::{Clause, Graph, InteriorPoint, Literal};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
}

/// `sum coeffs[i] x_i  (<= | >=)  rhs`, indices 0-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearInequality {
    pub coeffs: BTreeMap<usize, f64>,
    pub rhs: f64,
    pub sense: Sense,
}

impl LinearInequality {
    pub fn new(coeffs: BTreeMap<usize, f64>, rhs: f64, sense: Sense) -> Result<Self> {
        let coeffs: BTreeMap<usize, f64> = coeffs.into_iter().filter(|(_, c)| *c != 0.0).collect();
        if coeffs.is_empty() {
            return Err(Error::validation("inequality has no nonzero coefficient"));
        }
        if !rhs.is_finite() || coeffs.values().any(|c| !c.is_finite()) {
            return Err(Error::domain("inequality has non-finite data"));
        }
        Ok(Self { coeffs, rhs, sense })
    }

    pub fn lhs(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|(&i, c)| c * x[i]).sum()
    }

    /// Nonnegative exactly when `x` satisfies the inequality.
    pub fn slack(&self, x: &[f64]) -> f64 {
        match self.sense {
            Sense::Le => self.rhs - self.lhs(x),
            Sense::Ge => self.lhs(x) - self.rhs,
        }
    }

    pub fn holds(&self, x: &[f64], tol: f64) -> bool {
        self.slack(x) >= -tol
    }

    /// Termwise sum of two inequalities of the same sense.
    pub fn sum(&self, other: &Self) -> Result<Self> {
        if self.sense != other.sense {
            return Err(Error::validation("cannot add inequalities of opposite sense"));
        }
        let mut coeffs = self.coeffs.clone();
        for (&i, &c) in &other.coeffs {
            *coeffs.entry(i).or_insert(0.0) += c;
        }
        Self::new(coeffs, self.rhs + other.rhs, self.sense)
    }

    pub fn scale(&self, k: f64) -> Result<Self> {
        if !(k > 0.0) {
            return Err(Error::domain("scale factor must be positive"));
        }
        Self::new(
            self.coeffs.iter().map(|(&i, &c)| (i, c * k)).collect(),
            self.rhs * k,
            self.sense,
        )
    }

    pub fn max_index(&self) -> usize {
        *self.coeffs.keys().next_back().expect("nonempty")
    }
}

impl fmt::Display for LinearInequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (&i, &c)) in self.coeffs.iter().enumerate() {
            let sign = if c < 0.0 { "-" } else if k > 0 { "+" } else { "" };
            let mag = c.abs();
            let sep = if k > 0 { " " } else { "" };
            if mag == 1.0 {
                write!(f, "{sep}{sign}{}w{}", if k > 0 { " " } else { "" }, i + 1)?;
            } else {
                write!(f, "{sep}{sign}{}{mag}*w{}", if k > 0 { " " } else { "" }, i + 1)?;
            }
        }
        let op = match self.sense {
            Sense::Le => "<=",
            Sense::Ge => ">=",
        };
        write!(f, " {op} {}", self.rhs)
    }
}

/// `w_i + w_j <= 0` per edge, or `(w_i + w_j)/2 <= 0` when `halved`.
pub fn edge_inequalities(g: &Graph, halved: bool) -> Vec<LinearInequality> {
    let c = if halved { 0.5 } else { 1.0 };
    g.edges()
        .map(|(i, j)| {
            LinearInequality::new(BTreeMap::from([(i, c), (j, c)]), 0.0, Sense::Le)
                .expect("two nonzero coefficients")
        })
        .collect()
}

/// `sum_{v in cycle} w_v <= -1` for an odd cycle of `g`.
pub fn odd_cycle_inequality(g: &Graph, cycle: &[usize]) -> Result<LinearInequality> {
    let len = cycle.len();
    if len < 3 || len.is_multiple_of(2) {
        return Err(Error::validation(format!(
            "odd cycle needs odd length >= 3, got {len}"
        )));
    }
    let distinct: BTreeSet<usize> = cycle.iter().copied().collect();
    if distinct.len() != len {
        return Err(Error::validation("cycle repeats a vertex"));
    }
    if let Some(&v) = cycle.iter().find(|&&v| v >= g.n()) {
        return Err(Error::validation(format!("vertex {} not in graph", v + 1)));
    }
    for k in 0..len {
        let (a, b) = (cycle[k], cycle[(k + 1) % len]);
        if !g.has_edge(a, b) {
            return Err(Error::validation(format!("{} - {} is not an edge", a + 1, b + 1)));
        }
    }
    LinearInequality::new(cycle.iter().map(|&v| (v, 1.0)).collect(), -1.0, Sense::Le)
}

/// Replacement of base edges by odd paths.
#[derive(Debug, Clone)]
pub struct SubdivisionMap {
    base: Graph,
    /// base edge -> interior vertices of its replacement path, in order from
    /// the smaller endpoint
    interiors: BTreeMap<(usize, usize), Vec<usize>>,
    subdivided: Graph,
}

impl SubdivisionMap {
    /// `lengths` maps base edges to the (odd) length of their replacement
    /// path; unlisted edges keep length 1. New vertices are numbered after
    /// the base vertices in edge order.
    pub fn new(base: &Graph, lengths: impl IntoIterator<Item = ((usize, usize), usize)>) -> Result<Self> {
        let mut want = BTreeMap::new();
        for ((a, b), len) in lengths {
            let key = (a.min(b), a.max(b));
            if !base.has_edge(key.0, key.1) {
                return Err(Error::validation(format!(
                    "{} - {} is not a base edge",
                    key.0 + 1,
                    key.1 + 1
                )));
            }
            if len % 2 == 0 {
                return Err(Error::validation(format!("replacement length {len} is not odd")));
            }
            if want.insert(key, len).is_some() {
                return Err(Error::validation("edge listed twice"));
            }
        }
        let mut next = base.n();
        let mut interiors = BTreeMap::new();
        let mut edges = Vec::new();
        for (a, b) in base.edges() {
            let len = want.get(&(a, b)).copied().unwrap_or(1);
            let inner: Vec<usize> = (next..next + len - 1).collect();
            next += len - 1;
            let mut walk = vec![a];
            walk.extend(&inner);
            walk.push(b);
            edges.extend(walk.windows(2).map(|p| (p[0], p[1])));
            interiors.insert((a, b), inner);
        }
        Ok(Self {
            base: base.clone(),
            interiors,
            subdivided: Graph::new(next, edges)?,
        })
    }

    pub fn base(&self) -> &Graph {
        &self.base
    }

    pub fn graph(&self) -> &Graph {
        &self.subdivided
    }

    pub fn interior(&self, a: usize, b: usize) -> Option<&[usize]> {
        self.interiors.get(&(a.min(b), a.max(b))).map(Vec::as_slice)
    }
}

/// Lifts a unit-coefficient inequality on the base graph: every interior
/// vertex of a subdivided edge inside the support joins with coefficient 1,
/// and the right-hand side is unchanged.
pub fn lift_inequality(ineq: &LinearInequality, map: &SubdivisionMap) -> Result<LinearInequality> {
    if ineq.coeffs.values().any(|&c| c != 1.0) {
        return Err(Error::Unsupported(
            "lifting is defined only for unit base coefficients".into(),
        ));
    }
    if ineq.max_index() >= map.base().n() {
        return Err(Error::Dimension {
            expected: map.base().n(),
            found: ineq.max_index() + 1,
        });
    }
    let mut coeffs = ineq.coeffs.clone();
    for (&(a, b), inner) in &map.interiors {
        if ineq.coeffs.contains_key(&a) && ineq.coeffs.contains_key(&b) {
            coeffs.extend(inner.iter().map(|&v| (v, 1.0)));
        }
    }
    LinearInequality::new(coeffs, ineq.rhs, ineq.sense)
}

/// `v(l1) + v(l2) + v(l3) >= -1` over variable indices.
pub fn clause_inequality(c: &Clause) -> LinearInequality {
    disjunction_inequality(c.literals()).expect("clause variables are distinct")
}

/// `sum v(l) >= 2 - r` for a disjunction of `r` literals on distinct
/// variables; reduces to the clause inequality for `r = 3`.
pub fn disjunction_inequality(lits: &[Literal]) -> Result<LinearInequality> {
    let mut coeffs = BTreeMap::new();
    for l in lits {
        if coeffs.insert(l.var, if l.positive { 1.0 } else { -1.0 }).is_some() {
            return Err(Error::validation("disjunction repeats a variable"));
        }
    }
    LinearInequality::new(coeffs, 2.0 - lits.len() as f64, Sense::Ge)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum JoinResult {
    /// Sorted, duplicate-free disjunction.
    Clause(Vec<Literal>),
    Tautology,
}

/// Resolution on `pivot` (0-based variable): the union of the remaining
/// literals, with repeated literals merged.
pub fn join_clauses(c1: &[Literal], c2: &[Literal], pivot: usize) -> Result<JoinResult> {
    let find = |c: &[Literal]| c.iter().find(|l| l.var == pivot).copied();
    match (find(c1), find(c2)) {
        (Some(a), Some(b)) if a == b.complement() => {}
        (Some(_), Some(_)) => {
            return Err(Error::validation(format!(
                "pivot x{} has the same polarity in both clauses",
                pivot + 1
            )))
        }
        _ => {
            return Err(Error::validation(format!(
                "pivot x{} missing from a clause",
                pivot + 1
            )))
        }
    }
    let rest: BTreeSet<Literal> = c1
        .iter()
        .chain(c2)
        .filter(|l| l.var != pivot)
        .copied()
        .collect();
    if rest.iter().any(|l| rest.contains(&l.complement())) {
        return Ok(JoinResult::Tautology);
    }
    Ok(JoinResult::Clause(rest.into_iter().collect()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ChainClass {
    OpenPath,
    OrdinaryCycle,
    MobiusCycle,
    Invalid,
}

/// A chain `(l1 v l2 v !l3), (l3 v l4 v !l5), ...` with its literals
/// `l1 .. l_{2k+1}` identified.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainAnalysis {
    pub class: ChainClass,
    /// `l1 .. l_{2k+1}`; empty for invalid chains
    pub literals: Vec<Literal>,
    /// pivot variables between consecutive clauses
    pub pivots: Vec<usize>,
}

impl ChainAnalysis {
    fn invalid() -> Self {
        Self {
            class: ChainClass::Invalid,
            literals: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn k(&self) -> usize {
        self.pivots.len() + 1
    }
}

pub fn classify_chain(chain: &[Clause]) -> ChainClass {
    analyze_chain(chain).class
}

/// Identifies the linking literals of a clause chain and classifies its
/// closure.
pub fn analyze_chain(chain: &[Clause]) -> ChainAnalysis {
    let k = chain.len();
    if k == 0 {
        return ChainAnalysis::invalid();
    }
    // the unique complementary pair between consecutive clauses
    let mut pivots = Vec::with_capacity(k - 1);
    for pair in chain.windows(2) {
        let (a, b) = (pair[0].literals(), pair[1].literals());
        let shared: Vec<(Literal, Literal)> = a
            .iter()
            .flat_map(|x| b.iter().filter(move |y| y.var == x.var).map(move |y| (*x, *y)))
            .collect();
        let links: Vec<usize> = shared
            .iter()
            .filter(|(x, y)| *x == y.complement())
            .map(|(x, _)| x.var)
            .collect();
        // with two clauses the closing pair is shared too; the link is then
        // the complementary pair listed last in the first clause
        let allowed = if k == 2 { 2 } else { 1 };
        match links.last() {
            Some(&v) if shared.len() <= allowed => pivots.push(v),
            _ => return ChainAnalysis::invalid(),
        }
    }

    let lit_of = |c: &Clause, var: usize| *c.literals().iter().find(|l| l.var == var).unwrap();
    let others = |c: &Clause, skip: &[usize]| -> Vec<Literal> {
        c.literals().iter().filter(|l| !skip.contains(&l.var)).copied().collect()
    };

    // candidates for l1 (clause 1 minus its exit) and for !l_{2k+1} (clause k
    // minus its entry)
    let first_skip: Vec<usize> = pivots.first().copied().into_iter().collect();
    let last_skip: Vec<usize> = pivots.last().copied().into_iter().collect();
    let head = others(&chain[0], &first_skip);
    let tail = others(&chain[k - 1], &last_skip);

    let closure: Vec<(Literal, Literal)> = if k == 1 {
        Vec::new()
    } else {
        head.iter()
            .flat_map(|h| tail.iter().filter(move |t| t.var == h.var).map(move |t| (*h, *t)))
            .collect()
    };
    let (class, l1, last_bar) = match closure.as_slice() {
        [] => {
            let last_bar = if k == 1 { head[2] } else { tail[1] };
            let l1 = head[0];
            (ChainClass::OpenPath, l1, last_bar)
        }
        [(h, t)] if *t == h.complement() => (ChainClass::OrdinaryCycle, *h, *t),
        [(h, t)] => (ChainClass::MobiusCycle, *h, *t),
        _ => return ChainAnalysis::invalid(),
    };

    // l1, l2, then per clause j >= 2 the entry and free literal, then l_{2k+1}
    let l2 = *head.iter().find(|l| **l != l1 && (k > 1 || **l != last_bar)).unwrap();
    let mut literals = vec![l1, l2];
    for j in 1..k {
        literals.push(lit_of(&chain[j], pivots[j - 1]));
        let free = if j + 1 < k {
            others(&chain[j], &[pivots[j - 1], pivots[j]])[0]
        } else {
            *tail.iter().find(|l| **l != last_bar).unwrap()
        };
        literals.push(free);
    }
    literals.push(last_bar.complement());

    // every variable other than the links and the closure must be fresh
    let expected = match class {
        ChainClass::OpenPath => 2 * k + 1,
        _ => 2 * k,
    };
    let vars: BTreeSet<usize> = chain
        .iter()
        .flat_map(|c| c.literals().iter().map(|l| l.var))
        .collect();
    if vars.len() != expected {
        return ChainAnalysis::invalid();
    }
    ChainAnalysis {
        class,
        literals,
        pivots,
    }
}

/// Left fold of `join_clauses` along the chain's pivots.
pub fn fold_chain(chain: &[Clause]) -> Result<JoinResult> {
    let analysis = analyze_chain(chain);
    if analysis.class == ChainClass::Invalid {
        return Err(Error::validation("not a valid clause chain"));
    }
    let mut acc: Vec<Literal> = chain[0].literals().to_vec();
    for (c, &p) in chain[1..].iter().zip(&analysis.pivots) {
        match join_clauses(&acc, c.literals(), p)? {
            JoinResult::Clause(lits) => acc = lits,
            JoinResult::Tautology => return Ok(JoinResult::Tautology),
        }
    }
    acc.sort();
    Ok(JoinResult::Clause(acc))
}

fn chain_even_literals(a: &ChainAnalysis) -> impl Iterator<Item = Literal> + '_ {
    // l2, l4, ..., l_{2k}
    (1..=a.k()).map(|j| a.literals[2 * j - 1])
}

/// `v(l1) + v(l2) + v(l4) + ... + v(l_2k) >= 1 - k`.
pub fn mobius_sharper_inequality(chain: &[Clause]) -> Result<LinearInequality> {
    let a = analyze_chain(chain);
    if a.class != ChainClass::MobiusCycle {
        return Err(Error::validation(format!("chain is {:?}, not a mobius cycle", a.class)));
    }
    let lits: Vec<Literal> = std::iter::once(a.literals[0]).chain(chain_even_literals(&a)).collect();
    let ineq = disjunction_inequality(&lits)?;
    debug_assert_eq!(ineq.rhs, 1.0 - a.k() as f64);
    Ok(ineq)
}

/// The sum of the chain's clause inequalities: `2 v(l1) + v(l2) + ... >= -k`.
pub fn mobius_implied_inequality(chain: &[Clause]) -> Result<LinearInequality> {
    let a = analyze_chain(chain);
    if a.class != ChainClass::MobiusCycle {
        return Err(Error::validation(format!("chain is {:?}, not a mobius cycle", a.class)));
    }
    chain
        .iter()
        .map(clause_inequality)
        .try_fold(None::<LinearInequality>, |acc, c| {
            Ok(Some(match acc {
                None => c,
                Some(s) => s.sum(&c)?,
            }))
        })
        .map(|s| s.expect("chain is nonempty"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceMode {
    /// points of the open simplex
    Simplex,
    /// positive slack vectors
    Slack,
}

fn check_even_p(p: u32) -> Result<()> {
    if p < 2 || p % 2 == 1 {
        return Err(Error::validation(format!("p must be an even integer >= 2, got {p}")));
    }
    Ok(())
}

/// Projectively invariant distance.
///
/// Simplex: `(1/2) (sum (x_i/y_i - y_i/x_i)^p)^(1/p)`. Slack:
/// `(sum [(1/2)(s_i/t_i - t_i/s_i)]^p)^(1/p)`.
pub fn projective_distance(x: &[f64], y: &[f64], p: u32, mode: DistanceMode) -> Result<f64> {
    check_even_p(p)?;
    if x.len() != y.len() {
        return Err(Error::Dimension {
            expected: x.len(),
            found: y.len(),
        });
    }
    if x.iter().chain(y).any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::domain("coordinates must be positive and finite"));
    }
    let p_i = p as i32;
    match mode {
        DistanceMode::Simplex => {
            for v in [x, y] {
                let total: f64 = v.iter().sum();
                if (total - 1.0).abs() > 1e-9 {
                    return Err(Error::domain(format!("simplex point sums to {total}")));
                }
            }
            let s: f64 = x.iter().zip(y).map(|(a, b)| (a / b - b / a).powi(p_i)).sum();
            Ok(0.5 * s.powf(1.0 / p as f64))
        }
        DistanceMode::Slack => {
            let s: f64 = x
                .iter()
                .zip(y)
                .map(|(a, b)| (0.5 * (a / b - b / a)).powi(p_i))
                .sum();
            Ok(s.powf(1.0 / p as f64))
        }
    }
}

/// `sum (dx_i / x_i)^p`.
pub fn metric_form(x: &[f64], dx: &[f64], p: u32) -> Result<f64> {
    check_even_p(p)?;
    if x.len() != dx.len() {
        return Err(Error::Dimension {
            expected: x.len(),
            found: dx.len(),
        });
    }
    if x.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::domain("base point must be positive"));
    }
    Ok(x.iter().zip(dx).map(|(a, d)| (d / a).powi(p as i32)).sum())
}

/// `sum w_i + beta sum w_i^2`.
pub fn nonconvex_objective(w: &[f64], beta: f64) -> f64 {
    w.iter().sum::<f64>() + beta * w.iter().map(|v| v * v).sum::<f64>()
}

/// Coordinatewise sign; zero rounds to `+1`.
pub fn round_to_hypercube(w: &InteriorPoint) -> Vec<i8> {
    w.as_slice().iter().map(|&v| if v < 0.0 { -1 } else { 1 }).collect()
}
