//! Odd-cycle aggregation for maximum independent set.
//!
//! Each edge inequality `(w_i + w_j)/2 <= 0` has slack `s_ij = -(w_i+w_j)/2`
//! and kernel `exp(-z s_ij)`. The edge matrix carries these kernels, so entry
//! `(i, j)` of `A^l` sums the kernel products of all length-`l` walks from `i`
//! to `j`, and `tr(A^l) / (2l)` sums them over closed walks counted once per
//! vertex and direction. Summing odd lengths up to `n` and multiplying by
//! `e^z` turns every implied closed-odd-walk inequality (`sum w <= 0`) into
//! the sharper odd-cycle form (`sum w <= -1`).
//!
//! Vertex indices are 0-based throughout this module.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::expsup::ExpSuperposition;
use crate::instances::Graph;
use crate::jproduct::{join, Tensor};
use crate::linalg::{all_finite, cre, czero, trace, CMatrix, SplitMatrix};

/// Graphs up to this size use plain iterated multiplication under
/// [`Method::Auto`].
pub const DIRECT_MAX_N: usize = 40;

/// Hessian assembly keeps every power `A^1..A^n` in memory.
pub const HESSIAN_MAX_N: usize = 160;

#[derive(Debug, Clone)]
pub struct EdgeMatrix {
    z: Complex64,
    w: Vec<f64>,
    matrix: CMatrix,
}

impl EdgeMatrix {
    pub fn z(&self) -> Complex64 {
        self.z
    }

    pub fn w(&self) -> &[f64] {
        &self.w
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }
}

fn check_point(g: &Graph, w: &[f64]) -> Result<()> {
    if w.len() != g.n() {
        return Err(Error::Dimension {
            expected: g.n(),
            found: w.len(),
        });
    }
    if let Some(v) = w.iter().find(|v| !v.is_finite()) {
        return Err(Error::domain(format!("non-finite coordinate {v}")));
    }
    Ok(())
}

/// `A_ij = exp((z/2)(w_i + w_j))` on edges, zero elsewhere.
pub fn edge_matrix(g: &Graph, z: Complex64, w: &[f64]) -> Result<EdgeMatrix> {
    check_point(g, w)?;
    let n = g.n();
    let mut a = CMatrix::zeros(n, n);
    for (i, j) in g.edges() {
        let v = (z * 0.5 * (w[i] + w[j])).exp();
        a[(i, j)] = v;
        a[(j, i)] = v;
    }
    Ok(EdgeMatrix {
        z,
        w: w.to_vec(),
        matrix: a,
    })
}

fn matrix_power(a: &CMatrix, l: usize) -> CMatrix {
    let mut result = CMatrix::identity(a.nrows(), a.ncols());
    let mut base = a.clone();
    let mut k = l;
    while k > 0 {
        if k & 1 == 1 {
            result = &result * &base;
        }
        k >>= 1;
        if k > 0 {
            base = &base * &base;
        }
    }
    result
}

/// `(A^l)_ij`: kernel products summed over all length-`l` walks `i -> j`.
pub fn walk_sum_pair(
    g: &Graph,
    z: Complex64,
    w: &[f64],
    l: usize,
    i: usize,
    j: usize,
) -> Result<Complex64> {
    if l == 0 {
        return Err(Error::validation("walk length must be at least 1"));
    }
    if i >= g.n() || j >= g.n() {
        return Err(Error::Dimension {
            expected: g.n(),
            found: i.max(j) + 1,
        });
    }
    let a = edge_matrix(g, z, w)?.into_matrix();
    Ok(matrix_power(&a, l)[(i, j)])
}

/// `psi_l = tr(A^l) / (2l)`.
pub fn closed_walks(g: &Graph, z: Complex64, w: &[f64], l: usize) -> Result<Complex64> {
    if l < 3 {
        return Err(Error::validation("closed walks need length at least 3"));
    }
    let a = edge_matrix(g, z, w)?.into_matrix();
    Ok(trace(&matrix_power(&a, l)) / (2.0 * l as f64))
}

/// Largest `k` with `2k + 1 <= n`.
pub fn k_max(n: usize) -> usize {
    n.saturating_sub(1) / 2
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Derivatives {
    #[default]
    None,
    Gradient,
    Hessian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    /// Iterated multiplication for small graphs, otherwise a spectral route
    /// for real `z` and Paterson-Stockmeyer for complex `z`.
    #[default]
    Auto,
    /// One multiplication per odd power: O(n^4) overall.
    Direct,
    /// Symmetric eigendecomposition; real `z` only. O(n^3).
    Spectral,
    /// Paterson-Stockmeyer evaluation of the odd power series in `A^2`:
    /// O(sqrt(n)) products, O(n^3.5) overall.
    PatersonStockmeyer,
}

impl Method {
    fn resolve(self, n: usize, z: Complex64) -> Self {
        match self {
            Method::Auto if n <= DIRECT_MAX_N => Method::Direct,
            Method::Auto if z.im == 0.0 => Method::Spectral,
            Method::Auto => Method::PatersonStockmeyer,
            m => m,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LengthTerm {
    pub length: usize,
    /// `tr(A^l) / (2l)`
    pub psi: Complex64,
    /// `e^z` times `psi`
    pub psi_sharp: Complex64,
}

#[derive(Debug, Clone)]
pub struct WalkPotentialReport {
    pub n: usize,
    pub z: Complex64,
    pub k_max: usize,
    pub method: Method,
    pub per_length: Vec<LengthTerm>,
    /// `B = sum_{k=1}^{k_max} A^{2k+1} / (2(2k+1))`
    pub b: CMatrix,
    pub psi: Complex64,
    pub psi_sharp: Complex64,
    /// `d psi_sharp / d w_p`
    pub gradient: Option<Vec<Complex64>>,
    /// `d^2 psi_sharp / d w_p d w_q`
    pub hessian: Option<CMatrix>,
}

struct SeriesEval {
    per_length: Vec<Complex64>,
    b: CMatrix,
    /// diagonal of `C = sum_k A^{2k+1}`
    c_diag: Vec<Complex64>,
}

/// The odd-walk potential `psi = tr B`, its sharper form `e^z tr B`, and
/// optionally first and second derivatives in `w`.
pub fn walk_potential(
    g: &Graph,
    z: Complex64,
    w: &[f64],
    derivatives: Derivatives,
    method: Method,
) -> Result<WalkPotentialReport> {
    let n = g.n();
    if n < 3 {
        return Err(Error::validation("walk potential needs at least 3 vertices"));
    }
    let em = edge_matrix(g, z, w)?;
    let method = method.resolve(n, z);
    let km = k_max(n);
    let series = match method {
        Method::Direct => series_direct(em.matrix(), km),
        Method::Spectral => {
            if z.im != 0.0 {
                return Err(Error::Unsupported(
                    "spectral evaluation needs a real z (the edge matrix must be real symmetric)"
                        .into(),
                ));
            }
            series_spectral(em.matrix(), km)
        }
        Method::PatersonStockmeyer => series_paterson_stockmeyer(em.matrix(), km),
        Method::Auto => unreachable!("resolved above"),
    };

    let ez = z.exp();
    let per_length: Vec<LengthTerm> = series
        .per_length
        .iter()
        .enumerate()
        .map(|(k, &psi)| LengthTerm {
            length: 2 * k + 3,
            psi,
            psi_sharp: ez * psi,
        })
        .collect();
    // fixed summation order: ascending length
    let psi: Complex64 = per_length.iter().map(|t| t.psi).sum();
    if !(psi * ez).is_finite() || !all_finite(&series.b) {
        return Err(Error::domain(
            "walk series overflows f64: the edge matrix spectral radius is too large for this n; \
             increase Re z or move w deeper into the interior",
        ));
    }

    let gradient = match derivatives {
        Derivatives::None => None,
        _ => Some(series.c_diag.iter().map(|c| z * 0.5 * ez * c).collect()),
    };
    let hessian = match derivatives {
        Derivatives::Hessian => Some(hessian_sharp(em.matrix(), z, km)?),
        _ => None,
    };

    Ok(WalkPotentialReport {
        n,
        z,
        k_max: km,
        method,
        per_length,
        b: series.b,
        psi,
        psi_sharp: ez * psi,
        gradient,
        hessian,
    })
}

fn series_direct(a: &CMatrix, km: usize) -> SeriesEval {
    let n = a.nrows();
    let a2 = a * a;
    let mut p = a.clone();
    let mut b = CMatrix::zeros(n, n);
    let mut c_diag = vec![czero(); n];
    let mut per_length = Vec::with_capacity(km);
    for k in 1..=km {
        p = &p * &a2;
        let l = (2 * k + 1) as f64;
        per_length.push(trace(&p) / (2.0 * l));
        b += p.map(|v| v / (2.0 * l));
        for (d, i) in c_diag.iter_mut().zip(0..n) {
            *d += p[(i, i)];
        }
    }
    SeriesEval {
        per_length,
        b,
        c_diag,
    }
}

fn series_spectral(a: &CMatrix, km: usize) -> SeriesEval {
    let n = a.nrows();
    let real: DMatrix<f64> = a.map(|v| v.re);
    let eig = SymmetricEigen::new(real);
    let mu = &eig.eigenvalues;
    let v = &eig.eigenvectors;

    let mut f = vec![0.0; n];
    let mut gsum = vec![0.0; n];
    let mut per_length = vec![czero(); km];
    for (idx, &m) in mu.iter().enumerate() {
        let m2 = m * m;
        let mut pw = m;
        for k in 1..=km {
            pw *= m2;
            let l = (2 * k + 1) as f64;
            f[idx] += pw / (2.0 * l);
            gsum[idx] += pw;
            per_length[k - 1] += cre(pw / (2.0 * l));
        }
    }
    let scaled_b = DMatrix::from_fn(n, n, |i, j| v[(i, j)] * f[j]);
    let b_real = &scaled_b * v.transpose();
    let c_diag = (0..n)
        .map(|p| cre((0..n).map(|j| v[(p, j)] * v[(p, j)] * gsum[j]).sum()))
        .collect();
    SeriesEval {
        per_length,
        b: b_real.map(cre),
        c_diag,
    }
}

fn series_paterson_stockmeyer(a: &CMatrix, km: usize) -> SeriesEval {
    let n = a.nrows();
    let a_s = SplitMatrix::from_complex(a);
    let y = a_s.mul(&a_s);
    // q(Y) = sum_{k=0}^{km} coef[k] Y^k, then the odd series is A q(A^2)
    let terms = km + 1;
    let s = ((terms as f64).sqrt().ceil() as usize).max(1);
    let blocks = terms.div_ceil(s);

    let mut babies = Vec::with_capacity(s + 1);
    babies.push(SplitMatrix::identity(n));
    for i in 1..=s {
        babies.push(babies[i - 1].mul(&y));
    }
    let giant = &babies[s];

    let coef_b = |k: usize| {
        if k == 0 {
            czero()
        } else {
            cre(1.0 / (2.0 * (2 * k + 1) as f64))
        }
    };
    let coef_c = |k: usize| if k == 0 { czero() } else { cre(1.0) };

    let block = |r: usize, coef: &dyn Fn(usize) -> Complex64| {
        let mut q = SplitMatrix::zeros(n);
        for i in 0..s {
            let k = r * s + i;
            if k < terms {
                q.add_scaled(coef(k), &babies[i]);
            }
        }
        q
    };
    let horner = |coef: &dyn Fn(usize) -> Complex64| {
        let mut acc = block(blocks - 1, coef);
        for r in (0..blocks - 1).rev() {
            acc = acc.mul(giant);
            acc.add_scaled(cre(1.0), &block(r, coef));
        }
        acc
    };
    let qb = horner(&coef_b);
    let qc = horner(&coef_c);
    let b = a_s.mul(&qb).to_complex();
    let c_diag = (0..n)
        .map(|p| {
            let mut acc = czero();
            for k in 0..n {
                acc += a[(p, k)] * Complex64::new(qc.re[(k, p)], qc.im[(k, p)]);
            }
            acc
        })
        .collect();

    // tr(A Y^k) for k = rs + i: tr((A Y^{rs}) Y^i)
    let mut per_length = vec![czero(); km];
    let mut lead = a_s.clone();
    for r in 0..blocks {
        for i in 0..s {
            let k = r * s + i;
            if (1..=km).contains(&k) {
                let l = (2 * k + 1) as f64;
                per_length[k - 1] = lead.trace_of_product(&babies[i]) / (2.0 * l);
            }
        }
        if r + 1 < blocks {
            lead = lead.mul(giant);
        }
    }
    SeriesEval {
        per_length,
        b,
        c_diag,
    }
}

/// Weight of `A^a (.)J A^b` in the first-derivative expansion of `A^k`:
/// 1 when one exponent is zero, 2 otherwise. Confirmed numerically by
/// [`derive_join_weights`].
pub fn first_order_join_weight(alpha: &[usize]) -> f64 {
    match alpha.iter().filter(|&&x| x > 0).count() {
        2 => 2.0,
        _ => 1.0,
    }
}

/// Hessian of `e^z tr B` in `w`.
///
/// `d/dw_q (A^l)_pp = (z/2) sum_{a+b=l} W(a,b) (A^a)_pq (A^b)_qp`; summing
/// over odd `l` and regrouping by the left exponent gives one Hadamard
/// product per power against a parity-class partial sum of powers.
fn hessian_sharp(a: &CMatrix, z: Complex64, km: usize) -> Result<CMatrix> {
    let n = a.nrows();
    if n > HESSIAN_MAX_N {
        return Err(Error::Guard {
            what: "hessian assembly",
            limit: HESSIAN_MAX_N,
            found: n,
        });
    }
    let top = 2 * km + 1;
    let mut powers = Vec::with_capacity(top + 1);
    powers.push(CMatrix::identity(n, n));
    for i in 1..=top {
        powers.push(&powers[i - 1] * a);
    }
    // inner(l) = sum_{a+b=l} W(a,b) A^a o A^b, with W = 1 at the ends and 2 inside
    let mut acc = CMatrix::zeros(n, n);
    // prefix[j] = sum of A^i for i <= j with i of the same parity as j
    let mut prefix: Vec<CMatrix> = Vec::with_capacity(top + 1);
    for j in 0..=top {
        let mut m = powers[j].clone();
        if j >= 2 {
            m += &prefix[j - 2];
        }
        prefix.push(m);
    }
    for i in 1..top {
        // partners j >= 1 with i + j odd and 3 <= i + j <= top
        let lo = if i >= 2 { 1 } else { 2 };
        let lo = if (i + lo) % 2 == 1 { lo } else { lo + 1 };
        let hi = top - i;
        if lo > hi {
            continue;
        }
        let hi = if (i + hi) % 2 == 1 { hi } else { hi - 1 };
        if lo > hi {
            continue;
        }
        let mut partners = prefix[hi].clone();
        if lo >= 2 {
            partners -= &prefix[lo - 2];
        }
        acc += powers[i].component_mul(&partners).map(|v| v * 2.0);
    }
    for k in 1..=km {
        let l = 2 * k + 1;
        for p in 0..n {
            acc[(p, p)] += powers[l][(p, p)] * 2.0;
        }
    }
    let scale = z * z * 0.25 * z.exp();
    Ok(acc.map(|v| v * scale))
}

/// `dA/dw_p = (z/2) { I (.)J_p A + A (.)J_p I }`, assembled from join
/// products with the identity and read off at family member `p`.
pub fn edge_matrix_derivative(g: &Graph, z: Complex64, w: &[f64], p: usize) -> Result<CMatrix> {
    let a = edge_matrix(g, z, w)?.into_matrix();
    joined_with_identity(&a, p).map(|m| m.map(|v| v * z * 0.5))
}

/// `M (.)J_p I + I (.)J_p M` at family member `p`.
fn joined_with_identity(m: &CMatrix, p: usize) -> Result<CMatrix> {
    let n = m.nrows();
    if p >= n {
        return Err(Error::Dimension {
            expected: n,
            found: p + 1,
        });
    }
    let id = CMatrix::identity(n, n);
    let left = join(
        &Tensor::matrix("i", "q", &id)?,
        &Tensor::matrix("q", "j", m)?,
        &["q"],
    )?;
    let right = join(
        &Tensor::matrix("i", "q", m)?,
        &Tensor::matrix("q", "j", &id)?,
        &["q"],
    )?;
    let sum = left.family_member("q", p)?.to_matrix()? + right.family_member("q", p)?.to_matrix()?;
    Ok(sum)
}

/// `d^2 A / dw_p dw_q = (z/2) { dA/dw_p (.)J_q I + I (.)J_q dA/dw_p }`.
pub fn edge_matrix_second_derivative(
    g: &Graph,
    z: Complex64,
    w: &[f64],
    p: usize,
    q: usize,
) -> Result<CMatrix> {
    let dp = edge_matrix_derivative(g, z, w, p)?;
    joined_with_identity(&dp, q).map(|m| m.map(|v| v * z * 0.5))
}

/// First (or, with `q`, second) derivative of `A^k` in `w`, by the product
/// rule recurrence `d(A^k) = d(A^{k-1}) A + A^{k-1} dA`.
pub fn power_derivative(
    g: &Graph,
    z: Complex64,
    w: &[f64],
    k: usize,
    p: usize,
    q: Option<usize>,
) -> Result<CMatrix> {
    if k == 0 {
        return Err(Error::validation("power must be at least 1"));
    }
    let a = edge_matrix(g, z, w)?.into_matrix();
    let dp = edge_matrix_derivative(g, z, w, p)?;
    let n = a.nrows();
    let mut pow = CMatrix::identity(n, n);
    let mut d_p = CMatrix::zeros(n, n);
    match q {
        None => {
            for _ in 0..k {
                d_p = &d_p * &a + &pow * &dp;
                pow = &pow * &a;
            }
            Ok(d_p)
        }
        Some(q) => {
            let dq = edge_matrix_derivative(g, z, w, q)?;
            let dpq = edge_matrix_second_derivative(g, z, w, p, q)?;
            let mut d_q = CMatrix::zeros(n, n);
            let mut d_pq = CMatrix::zeros(n, n);
            for _ in 0..k {
                d_pq = &d_pq * &a + &d_p * &dq + &d_q * &dp + &pow * &dpq;
                d_p = &d_p * &a + &pow * &dp;
                d_q = &d_q * &a + &pow * &dq;
                pow = &pow * &a;
            }
            Ok(d_pq)
        }
    }
}

/// Compositions of `k` into `parts` nonnegative integers, lexicographic.
pub fn compositions(k: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![k]];
    }
    let mut out = Vec::new();
    for first in 0..=k {
        for mut rest in compositions(k - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// `dA^k/dw_p` assembled as `(z/2) sum_alpha W(alpha) A^a1 (.)J_p A^a2` from
/// explicit join products.
pub fn power_derivative_join_form(
    g: &Graph,
    z: Complex64,
    w: &[f64],
    k: usize,
    p: usize,
) -> Result<CMatrix> {
    let a = edge_matrix(g, z, w)?.into_matrix();
    let n = a.nrows();
    let mut out = CMatrix::zeros(n, n);
    for alpha in compositions(k, 2) {
        let fam = join(
            &Tensor::matrix("i", "p", &matrix_power(&a, alpha[0]))?,
            &Tensor::matrix("p", "j", &matrix_power(&a, alpha[1]))?,
            &["p"],
        )?;
        let member = fam.family_member("p", p)?.to_matrix()?;
        out += member.map(|v| v * first_order_join_weight(&alpha));
    }
    Ok(out.map(|v| v * z * 0.5))
}

#[derive(Debug, Clone, PartialEq)]
pub struct JoinWeight {
    pub alpha: Vec<usize>,
    pub rank: usize,
    pub weight: f64,
}

#[derive(Debug, Clone)]
pub struct JoinWeightFit {
    pub k: usize,
    pub order: usize,
    pub weights: Vec<JoinWeight>,
    /// max entrywise residual of the fitted expansion, relative to the target
    pub residual: f64,
}

impl JoinWeightFit {
    /// `(rank, weight)` pairs when every composition of a given rank shares a
    /// single weight (to within `tol`); `None` otherwise.
    pub fn rank_only(&self, tol: f64) -> Option<Vec<(usize, f64)>> {
        let mut by_rank: Vec<(usize, f64)> = Vec::new();
        for jw in &self.weights {
            match by_rank.iter().find(|(r, _)| *r == jw.rank) {
                Some((_, wv)) if (wv - jw.weight).abs() > tol => return None,
                Some(_) => {}
                None => by_rank.push((jw.rank, jw.weight)),
            }
        }
        by_rank.sort_by_key(|(r, _)| *r);
        Some(by_rank)
    }
}

/// Recovers the weights of the join-product expansions of the first
/// (`order = 1`) or second (`order = 2`) derivative of `A^k` by least squares
/// against the product-rule recurrence on a generic complex instance.
///
/// First order: `dA^k/dw_p = (z/2) sum_{a1+a2=k} W A^a1 (.)J_p A^a2`.
/// Second order: `d^2A^k/dw_p dw_q = (z^2/4)(1/2!) sum_{a1+a2+a3=k} W
/// [A^a1 (.)J_p A^a2 (.)J_q A^a3 + A^a1 (.)J_q A^a2 (.)J_p A^a3]`.
pub fn derive_join_weights(k: usize, order: usize) -> Result<JoinWeightFit> {
    if !(1..=6).contains(&k) {
        return Err(Error::Guard {
            what: "join weight derivation (k)",
            limit: 6,
            found: k,
        });
    }
    if !(1..=2).contains(&order) {
        return Err(Error::validation("order must be 1 or 2"));
    }
    // n > k keeps the powers linearly independent
    let n = 8;
    let g = Graph::complete(n);
    let z = Complex64::new(0.7, 0.4);
    let w: Vec<f64> = (0..n).map(|i| 0.8 * ((i as f64 * 1.7).sin())).collect();
    let a = edge_matrix(&g, z, &w)?.into_matrix();
    let powers: Vec<CMatrix> = (0..=k).map(|e| matrix_power(&a, e)).collect();
    let alphas = compositions(k, order + 1);

    // rows: (re, im) for every (i, j, p[, q]); columns: one per alpha
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut rhs: Vec<f64> = Vec::new();
    let mut push = |basis: Vec<Complex64>, target: Complex64| {
        rows.push(basis.iter().map(|b| b.re).collect());
        rhs.push(target.re);
        rows.push(basis.iter().map(|b| b.im).collect());
        rhs.push(target.im);
    };
    if order == 1 {
        for p in 0..n {
            let target = power_derivative(&g, z, &w, k, p, None)?.map(|v| v / (z * 0.5));
            for i in 0..n {
                for j in 0..n {
                    let basis = alphas
                        .iter()
                        .map(|al| powers[al[0]][(i, p)] * powers[al[1]][(p, j)])
                        .collect();
                    push(basis, target[(i, j)]);
                }
            }
        }
    } else {
        let norm = z * z * 0.25 * 0.5;
        for p in 0..n {
            for q in 0..n {
                let target = power_derivative(&g, z, &w, k, p, Some(q))?.map(|v| v / norm);
                for i in 0..n {
                    for j in 0..n {
                        let basis = alphas
                            .iter()
                            .map(|al| {
                                let (x, y, u) = (&powers[al[0]], &powers[al[1]], &powers[al[2]]);
                                x[(i, p)] * y[(p, q)] * u[(q, j)] + x[(i, q)] * y[(q, p)] * u[(p, j)]
                            })
                            .collect();
                        push(basis, target[(i, j)]);
                    }
                }
            }
        }
    }

    let m = DMatrix::from_fn(rows.len(), alphas.len(), |r, c| rows[r][c]);
    let b = nalgebra::DVector::from_vec(rhs);
    let svd = m.clone().svd(true, true);
    let sol = svd
        .solve(&b, 1e-12)
        .map_err(|e| Error::domain(format!("least squares failed: {e}")))?;
    let resid = (&m * &sol - &b).amax() / b.amax().max(1e-300);
    let weights = alphas
        .into_iter()
        .zip(sol.iter())
        .map(|(alpha, &weight)| JoinWeight {
            rank: alpha.iter().filter(|&&x| x > 0).count(),
            alpha,
            weight,
        })
        .collect();
    Ok(JoinWeightFit {
        k,
        order,
        weights,
        residual: resid,
    })
}

/// `phi = sum_i c_i e^{lambda_i} tr B(lambda_i)`: the sharper walk potential
/// under the kernel represented by `sup`.
pub fn superposed_potential(g: &Graph, w: &[f64], sup: &ExpSuperposition) -> Result<Complex64> {
    let mut total = czero();
    for t in sup.terms() {
        let rep = walk_potential(g, t.rate, w, Derivatives::None, Method::Auto)?;
        total += t.coeff * rep.psi_sharp;
    }
    Ok(total)
}
