//! Brute-force references. Everything here is exponential by design and
//! guarded by hard size limits; a guard violation is an error, never a
//! truncated answer.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::instances::{Clause, CnfFormula, Graph, Literal};
use crate::linalg::{czero, rng};

pub const WALK_MAX_LEN: usize = 8;
pub const WALK_MAX_N: usize = 10;
pub const CYCLE_MAX_N: usize = 12;
pub const MOBIUS_MAX_N: usize = 6;
pub const MOBIUS_MAX_M: usize = 8;
pub const ASSIGN_MAX_N: usize = 20;

fn guard(what: &'static str, limit: usize, found: usize) -> Result<()> {
    if found > limit {
        Err(Error::Guard { what, limit, found })
    } else {
        Ok(())
    }
}

/// Erdos-Renyi graph `G(n, p)`, seeded.
pub fn random_graph(n: usize, p: f64, seed: u64) -> Graph {
    let mut r = rng(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if r.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    Graph::new(n, edges).expect("generated edges are valid")
}

/// Uniform random 3-CNF with `m` clauses over `n >= 3` variables, seeded.
pub fn random_formula(n: usize, m: usize, seed: u64) -> CnfFormula {
    assert!(n >= 3, "3-CNF needs at least 3 variables");
    let mut r = rng(seed);
    let clauses = (0..m)
        .map(|_| {
            let mut vars = [0usize; 3];
            let mut k = 0;
            while k < 3 {
                let v = r.random_range(0..n);
                if !vars[..k].contains(&v) {
                    vars[k] = v;
                    k += 1;
                }
            }
            let lits = vars.map(|v| Literal {
                var: v,
                positive: r.random::<bool>(),
            });
            Clause::new(lits).expect("distinct variables")
        })
        .collect();
    CnfFormula::new(n, clauses).expect("in range")
}

#[derive(Debug, Clone, PartialEq)]
pub struct WalkRecord {
    pub vertices: Vec<usize>,
    /// product of `exp(-z s_e)` over the walk's edges
    pub value: Complex64,
}

impl WalkRecord {
    pub fn len(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.len() <= 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WalkEnds {
    Pair(usize, usize),
    Closed,
}

fn edge_kernel(z: Complex64, w: &[f64], a: usize, b: usize) -> Complex64 {
    let slack = -(w[a] + w[b]) / 2.0;
    (-z * slack).exp()
}

/// Every rooted directed walk with `l` edges between the requested ends.
pub fn enumerate_walks(
    g: &Graph,
    z: Complex64,
    w: &[f64],
    l: usize,
    ends: WalkEnds,
) -> Result<Vec<WalkRecord>> {
    guard("walk enumeration (length)", WALK_MAX_LEN, l)?;
    guard("walk enumeration (vertices)", WALK_MAX_N, g.n())?;
    if w.len() != g.n() {
        return Err(Error::Dimension {
            expected: g.n(),
            found: w.len(),
        });
    }
    let starts: Vec<usize> = match ends {
        WalkEnds::Pair(i, j) => {
            if i >= g.n() || j >= g.n() {
                return Err(Error::validation("walk endpoint out of range"));
            }
            vec![i]
        }
        WalkEnds::Closed => (0..g.n()).collect(),
    };
    let adj = g.adjacency();
    let mut out = Vec::new();
    for s in starts {
        let target = match ends {
            WalkEnds::Pair(_, j) => j,
            WalkEnds::Closed => s,
        };
        let mut path = vec![s];
        extend_walks(&adj, z, w, l, target, &mut path, Complex64::new(1.0, 0.0), &mut out);
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn extend_walks(
    adj: &[Vec<usize>],
    z: Complex64,
    w: &[f64],
    l: usize,
    target: usize,
    path: &mut Vec<usize>,
    value: Complex64,
    out: &mut Vec<WalkRecord>,
) {
    let last = *path.last().unwrap();
    if path.len() == l + 1 {
        if last == target {
            out.push(WalkRecord {
                vertices: path.clone(),
                value,
            });
        }
        return;
    }
    for &next in &adj[last] {
        path.push(next);
        extend_walks(adj, z, w, l, target, path, value * edge_kernel(z, w, last, next), out);
        path.pop();
    }
}

/// Sum of record values in enumeration order.
pub fn walk_total(records: &[WalkRecord]) -> Complex64 {
    records.iter().map(|r| r.value).sum()
}

/// Every simple odd cycle of length at most `max_len`, once each, as the
/// rotation starting at its smallest vertex in the direction whose second
/// vertex is smaller.
pub fn enumerate_odd_cycles(g: &Graph, max_len: usize) -> Result<Vec<Vec<usize>>> {
    guard("odd cycle enumeration", CYCLE_MAX_N, g.n())?;
    let adj = g.adjacency();
    let mut out = Vec::new();
    for s in 0..g.n() {
        let mut path = vec![s];
        let mut used = vec![false; g.n()];
        used[s] = true;
        cycle_dfs(&adj, s, max_len, &mut path, &mut used, &mut out);
    }
    out.sort();
    Ok(out)
}

fn cycle_dfs(
    adj: &[Vec<usize>],
    s: usize,
    max_len: usize,
    path: &mut Vec<usize>,
    used: &mut [bool],
    out: &mut Vec<Vec<usize>>,
) {
    let last = *path.last().unwrap();
    let len = path.len();
    if len >= 3 && len % 2 == 1 && adj[last].contains(&s) && path[1] < last {
        out.push(path.clone());
    }
    if len == max_len {
        return;
    }
    for &next in &adj[last] {
        if next > s && !used[next] {
            used[next] = true;
            path.push(next);
            cycle_dfs(adj, s, max_len, path, used, out);
            path.pop();
            used[next] = false;
        }
    }
}

/// `sum over cycles of exp(-z sum_e s_e)`, the exact odd-cycle inequality
/// aggregate for cycles of length `l`.
pub fn cycle_kernel_sum(g: &Graph, z: Complex64, w: &[f64], l: usize) -> Result<Complex64> {
    Ok(enumerate_odd_cycles(g, l)?
        .into_iter()
        .filter(|c| c.len() == l)
        .map(|c| {
            (0..l)
                .map(|k| edge_kernel(z, w, c[k], c[(k + 1) % l]))
                .product::<Complex64>()
        })
        .sum())
}

/// Directed literal-digraph edges of every clause: `!a -> b` for each
/// ordered pair of distinct literals, with kernel `exp(-z s)`,
/// `s = 1 + v(l1) + v(l2) + v(l3)`.
pub fn clause_edges(f: &CnfFormula, z: Complex64, x: &[f64]) -> Vec<(usize, usize, Complex64)> {
    let mut out = Vec::new();
    for c in f.clauses() {
        let lits = c.literals();
        let s = 1.0 + lits.iter().map(|l| l.value(x)).sum::<f64>();
        let k = (-z * s).exp();
        for a in lits {
            for b in lits {
                if a != b {
                    out.push((a.complement().node(), b.node(), k));
                }
            }
        }
    }
    out
}

/// Closing weight of the special edge `u -> bar(u)`.
fn completion_weight(z: Complex64, x: &[f64], u: usize) -> Complex64 {
    let lit = Literal::from_node(u);
    let xi = x[lit.var];
    if lit.positive {
        (z * (1.0 - xi)).exp()
    } else {
        (z * (1.0 + xi)).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobiusWalkSum {
    /// `sum_k sum_{walks bar(u) -> u of length k} value * M(u, bar u) / (2k)`
    pub phi: Complex64,
    /// each walk identified with its complemented reversal, counted once,
    /// without the `1/(2k)` factor
    pub distinct_chain_sum: Complex64,
    /// number of rooted walks found
    pub walks: usize,
}

/// Enumerates directed walks from each literal node to its complement over
/// the clause edge multiset, lengths `2..=k_max`, closed by the completion
/// edge.
pub fn enumerate_mobius_walks(
    f: &CnfFormula,
    z: Complex64,
    x: &[f64],
    k_max: usize,
) -> Result<MobiusWalkSum> {
    guard("mobius walk enumeration (variables)", MOBIUS_MAX_N, f.n())?;
    guard("mobius walk enumeration (clauses)", MOBIUS_MAX_M, f.m())?;
    guard("mobius walk enumeration (length)", MOBIUS_MAX_M, k_max)?;
    if x.len() != f.n() {
        return Err(Error::Dimension {
            expected: f.n(),
            found: x.len(),
        });
    }
    let nodes = 2 * f.n();
    let mut out_edges: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); nodes];
    for (a, b, k) in clause_edges(f, z, x) {
        out_edges[a].push((b, k));
    }

    // vertex sequence -> summed value over parallel-edge choices
    let mut walks: BTreeMap<Vec<usize>, Complex64> = BTreeMap::new();
    for start in 0..nodes {
        let target = start ^ 1;
        let mut path = vec![start];
        mobius_dfs(&out_edges, target, k_max, &mut path, Complex64::new(1.0, 0.0), &mut walks);
    }

    let mut phi = czero();
    let mut distinct = czero();
    let mut count = 0;
    for (seq, value) in &walks {
        let k = seq.len() - 1;
        if k < 2 {
            continue;
        }
        // walk bar(u) -> u closed by M(u, bar u); seq ends at u
        let u = *seq.last().unwrap();
        let closed = value * completion_weight(z, x, u);
        phi += closed / (2.0 * k as f64);
        let mirror: Vec<usize> = seq.iter().rev().map(|v| v ^ 1).collect();
        if *seq <= mirror {
            distinct += closed;
        }
        count += 1;
    }
    Ok(MobiusWalkSum {
        phi,
        distinct_chain_sum: distinct,
        walks: count,
    })
}

fn mobius_dfs(
    out_edges: &[Vec<(usize, Complex64)>],
    target: usize,
    k_max: usize,
    path: &mut Vec<usize>,
    value: Complex64,
    walks: &mut BTreeMap<Vec<usize>, Complex64>,
) {
    let last = *path.last().unwrap();
    if path.len() > 1 && last == target {
        *walks.entry(path.clone()).or_insert_with(czero) += value;
    }
    if path.len() == k_max + 1 {
        return;
    }
    for &(next, k) in &out_edges[last] {
        path.push(next);
        mobius_dfs(out_edges, target, k_max, path, value * k, walks);
        path.pop();
    }
}

/// Whether some literal reaches its complement within `max_len` steps,
/// by explicit path search.
pub fn has_mobius_chain(f: &CnfFormula, max_len: usize) -> Result<bool> {
    guard("mobius chain search (variables)", MOBIUS_MAX_N, f.n())?;
    guard("mobius chain search (clauses)", MOBIUS_MAX_M, f.m())?;
    let z = Complex64::new(0.0, 0.0);
    let zero = vec![0.0; f.n()];
    Ok(enumerate_mobius_walks(f, z, &zero, max_len.min(MOBIUS_MAX_M))?.walks > 0
        || (max_len >= 1 && length_one_chain(f)))
}

fn length_one_chain(f: &CnfFormula) -> bool {
    clause_edges(f, Complex64::new(0.0, 0.0), &vec![0.0; f.n()])
        .iter()
        .any(|&(a, b, _)| b == a ^ 1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssignmentScan {
    pub satisfiable: bool,
    /// `min sum_c prod_{l in c} (1 - v(l))` over the cube vertices
    pub min_f: f64,
    /// first minimizer in scan order (variable 0 is the least significant
    /// bit; bit set means `-1`)
    pub argmin: Vec<i8>,
}

/// Exhaustive scan of all `2^n` sign vectors.
pub fn enumerate_assignments(f: &CnfFormula) -> Result<AssignmentScan> {
    guard("assignment enumeration", ASSIGN_MAX_N, f.n())?;
    let n = f.n();
    let mut best: Option<(f64, Vec<i8>)> = None;
    for mask in 0u32..(1u32 << n) {
        let x: Vec<f64> = (0..n)
            .map(|i| if mask >> i & 1 == 1 { -1.0 } else { 1.0 })
            .collect();
        let value: f64 = f
            .clauses()
            .iter()
            .map(|c| c.literals().iter().map(|l| 1.0 - l.value(&x)).product::<f64>())
            .sum();
        if best.as_ref().is_none_or(|(b, _)| value < *b) {
            best = Some((value, x.iter().map(|&v| v as i8).collect()));
        }
    }
    let (min_f, argmin) = best.expect("at least the empty assignment");
    Ok(AssignmentScan {
        satisfiable: min_f == 0.0,
        min_f,
        argmin,
    })
}

/// `count` points uniform on the unit sphere in `R^n` (normalized
/// Gaussians).
pub fn sphere_sample(n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| loop {
            let v: Vec<f64> = (0..n).map(|_| r.sample(StandardNormal)).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-12 {
                break v.into_iter().map(|x| x / norm).collect();
            }
        })
        .collect()
}

/// Central difference of derivative order 1 or 2.
pub fn finite_difference(f: impl Fn(f64) -> f64, x: f64, h: f64, order: u32) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::domain("step must be positive"));
    }
    match order {
        1 => Ok((f(x + h) - f(x - h)) / (2.0 * h)),
        2 => Ok((f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)),
        _ => Err(Error::Unsupported(format!("derivative order {order}"))),
    }
}

/// Central-difference gradient of a complex-valued function.
pub fn gradient_fd(f: impl Fn(&[f64]) -> Complex64, x: &[f64], h: f64) -> Vec<Complex64> {
    (0..x.len())
        .map(|i| {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[i] += h;
            xm[i] -= h;
            (f(&xp) - f(&xm)) / (2.0 * h)
        })
        .collect()
}

/// Second-order central-difference Hessian of a complex-valued function.
pub fn hessian_fd(f: impl Fn(&[f64]) -> Complex64, x: &[f64], h: f64) -> Vec<Vec<Complex64>> {
    let n = x.len();
    let at = |di: usize, si: f64, dj: usize, sj: f64| {
        let mut y = x.to_vec();
        y[di] += si * h;
        y[dj] += sj * h;
        f(&y)
    };
    let f0 = f(x);
    let mut out = vec![vec![czero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            out[i][j] = if i == j {
                (at(i, 1.0, i, 0.0) - f0 * 2.0 + at(i, -1.0, i, 0.0)) / (h * h)
            } else {
                (at(i, 1.0, j, 1.0) - at(i, 1.0, j, -1.0) - at(i, -1.0, j, 1.0)
                    + at(i, -1.0, j, -1.0))
                    / (4.0 * h * h)
            };
        }
    }
    out
}
