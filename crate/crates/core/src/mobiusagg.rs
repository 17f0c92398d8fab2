//! Mobius-cycle aggregation for 3-SAT.
//!
//! Literal `x_i` is node `2i` and `!x_i` node `2i + 1` of a digraph on `2n`
//! nodes, so complementing a literal flips the low bit. Each clause
//! contributes its six implications `!a -> b` as directed edges carrying
//! its kernel `exp(-z s)`, `s = 1 + v(l1) + v(l2) + v(l3)`. A walk from `!u` to `u` closed by the
//! completion edge `u -> !u` is a mobius chain, and
//! `phi = tr(M_c B)` with `B = sum_{k=2}^{m} A^k / (2k)` collects all of them.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::instances::{CnfFormula, Literal};
use crate::linalg::{czero, CMatrix};

/// Literal-node layout: `x_i -> 2i`, `!x_i -> 2i + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LiteralIndex {
    n: usize,
}

impl LiteralIndex {
    pub fn new(n: usize) -> Self {
        Self { n }
    }

    pub fn nodes(&self) -> usize {
        2 * self.n
    }

    pub fn node(&self, lit: Literal) -> usize {
        lit.node()
    }

    pub fn literal(&self, node: usize) -> Literal {
        Literal::from_node(node)
    }

    pub fn bar(&self, node: usize) -> usize {
        node ^ 1
    }
}

fn check_point(f: &CnfFormula, x: &[f64]) -> Result<()> {
    if x.len() != f.n() {
        return Err(Error::Dimension {
            expected: f.n(),
            found: x.len(),
        });
    }
    if let Some(v) = x.iter().find(|v| !v.is_finite()) {
        return Err(Error::domain(format!("non-finite coordinate {v}")));
    }
    Ok(())
}

/// `exp(-z s)` for the clause slack `s = 1 + v(l1) + v(l2) + v(l3)`.
pub fn clause_kernel(c: &crate::instances::Clause, z: Complex64, x: &[f64]) -> Complex64 {
    let s = 1.0 + c.literals().iter().map(|l| l.value(x)).sum::<f64>();
    (-z * s).exp()
}

/// The six implications `!a -> b` between the clause's literals, as node
/// pairs. The set is closed under `(i, j) -> (!j, !i)`.
pub fn clause_edges(c: &crate::instances::Clause) -> [(usize, usize); 6] {
    let [l1, l2, l3] = c.literals().map(Literal::node);
    [
        (l1 ^ 1, l2),
        (l1 ^ 1, l3),
        (l2 ^ 1, l3),
        (l2 ^ 1, l1),
        (l3 ^ 1, l1),
        (l3 ^ 1, l2),
    ]
}

/// Clause matrix with parallel edges summed.
pub fn clause_matrix(f: &CnfFormula, z: Complex64, x: &[f64]) -> Result<CMatrix> {
    check_point(f, x)?;
    let nodes = 2 * f.n();
    let mut a = CMatrix::zeros(nodes, nodes);
    for c in f.clauses() {
        let k = clause_kernel(c, z, x);
        for (i, j) in clause_edges(c) {
            a[(i, j)] += k;
        }
    }
    Ok(a)
}

/// `M(x_i, !x_i) = exp(z (1 - x_i))`, `M(!x_i, x_i) = exp(z (1 + x_i))`.
pub fn mobius_completion(f: &CnfFormula, z: Complex64, x: &[f64]) -> Result<CMatrix> {
    check_point(f, x)?;
    let nodes = 2 * f.n();
    let mut m = CMatrix::zeros(nodes, nodes);
    for (i, &xi) in x.iter().enumerate() {
        m[(2 * i, 2 * i + 1)] = (z * (1.0 - xi)).exp();
        m[(2 * i + 1, 2 * i)] = (z * (1.0 + xi)).exp();
    }
    Ok(m)
}

#[derive(Debug, Clone)]
pub struct MobiusReport {
    pub z: Complex64,
    pub phi: Complex64,
    /// `tr(M_c A^k) / (2k)` for `k = 2..=m`
    pub per_length: Vec<Complex64>,
    pub nodes: usize,
}

/// `phi = tr(M_c B)`, `B = sum_{k=2}^{m} A^k / (2k)`, `m` the clause count.
pub fn mobius_potential(f: &CnfFormula, z: Complex64, x: &[f64]) -> Result<MobiusReport> {
    let a = clause_matrix(f, z, x)?;
    let mc = mobius_completion(f, z, x)?;
    let nodes = a.nrows();
    let mut per_length = Vec::new();
    let mut phi = czero();
    if f.m() >= 2 {
        let mut p = &a * &a;
        for k in 2..=f.m() {
            if k > 2 {
                p = &p * &a;
            }
            // tr(M_c P) touches only the (bar u, u) entries of P
            let t: Complex64 = (0..nodes).map(|u| mc[(u, u ^ 1)] * p[(u ^ 1, u)]).sum();
            let term = t / (2.0 * k as f64);
            per_length.push(term);
            phi += term;
        }
    }
    Ok(MobiusReport {
        z,
        phi,
        per_length,
        nodes,
    })
}

/// True when no literal reaches its complement in at most `m` steps of the
/// clause digraph.
pub fn lp_sufficiency_flag(f: &CnfFormula) -> bool {
    let nodes = 2 * f.n();
    let mut adj = vec![Vec::new(); nodes];
    for c in f.clauses() {
        for (i, j) in clause_edges(c) {
            adj[i].push(j);
        }
    }
    let steps = f.m();
    (0..nodes).all(|start| {
        // layered reachability: walks may revisit nodes
        let mut frontier = vec![false; nodes];
        frontier[start] = true;
        for _ in 0..steps {
            let mut next = vec![false; nodes];
            for (u, _) in frontier.iter().enumerate().filter(|(_, on)| **on) {
                for &v in &adj[u] {
                    next[v] = true;
                }
            }
            if next[start ^ 1] {
                return false;
            }
            if next == frontier {
                break;
            }
            frontier = next;
        }
        true
    })
}

impl fmt::Display for MobiusReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "phi({}) = {}", self.z, self.phi)
    }
}
