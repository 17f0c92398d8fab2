//! Finite superpositions of exponentials, `psi(s) ~ sum_i c_i exp(-lambda_i s)`.
//!
//! With `1/s = int_0^inf exp(-s x) dx` and the substitution `x = exp(-a t)`,
//! the trapezoidal rule on the integer grid `t = i` gives rates
//! `lambda_i = exp(-i a)` and weights `c_i = a lambda_i`. Shifting `i` by one
//! rescales `s` by `e^a`, so one window of indices covers a band of scales
//! and the ladder only has to widen the window as slacks shrink.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{cre, czero};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpTerm {
    pub coeff: Complex64,
    pub rate: Complex64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExpSuperposition {
    terms: Vec<ExpTerm>,
}

impl ExpSuperposition {
    /// Rejects non-finite entries and repeated rates.
    pub fn new(terms: Vec<ExpTerm>) -> Result<Self> {
        for (idx, t) in terms.iter().enumerate() {
            let finite = [t.coeff.re, t.coeff.im, t.rate.re, t.rate.im]
                .iter()
                .all(|v| v.is_finite());
            if !finite {
                return Err(Error::domain(format!("term {idx} is not finite")));
            }
            if terms[..idx].iter().any(|o| o.rate == t.rate) {
                return Err(Error::validation(format!("rate {} repeated", t.rate)));
            }
        }
        Ok(Self { terms })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn single(coeff: Complex64, rate: Complex64) -> Self {
        Self {
            terms: vec![ExpTerm { coeff, rate }],
        }
    }

    pub fn terms(&self) -> &[ExpTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn evaluate(&self, s: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|t| t.coeff * (-t.rate * s).exp())
            .sum()
    }

    /// Term-list union; coefficients of shared rates are added.
    pub fn combine(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        for t in &other.terms {
            match terms.iter_mut().find(|o| o.rate == t.rate) {
                Some(o) => o.coeff += t.coeff,
                None => terms.push(*t),
            }
        }
        Self { terms }
    }

    /// `sum_s psi(s)` regrouped as `sum_i c_i sum_s exp(-lambda_i s)`.
    pub fn evaluate_distributive(&self, slacks: &[f64]) -> Complex64 {
        self.terms
            .iter()
            .map(|t| t.coeff * slacks.iter().map(|&s| (-t.rate * s).exp()).sum::<Complex64>())
            .sum()
    }
}

/// One-dimensional kernels with a closed-form quadrature family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kernel {
    /// `1/s`
    Reciprocal,
    /// `1/s^2 = int_0^inf x exp(-s x) dx`
    ReciprocalSquare,
}

impl Kernel {
    pub fn eval(self, s: f64) -> f64 {
        match self {
            Kernel::Reciprocal => 1.0 / s,
            Kernel::ReciprocalSquare => 1.0 / (s * s),
        }
    }

    /// Trapezoidal superposition on indices `-m..=M`.
    pub fn superposition(self, a: f64, m: u32, big_m: u32) -> Result<ExpSuperposition> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::domain(format!("step a must be positive, got {a}")));
        }
        let power = match self {
            Kernel::Reciprocal => 1,
            Kernel::ReciprocalSquare => 2,
        };
        let terms = (-(m as i64)..=big_m as i64)
            .map(|i| {
                let lambda = (-(i as f64) * a).exp();
                ExpTerm {
                    coeff: cre(a * lambda.powi(power)),
                    rate: cre(lambda),
                }
            })
            .collect();
        Ok(ExpSuperposition { terms })
    }

    /// Smallest window `(m, M)` whose truncation error stays below `tol`
    /// (relative) for every `s` in `[s_lo, s_hi]`.
    ///
    /// Dropping rates above `lambda_max` loses about `exp(-lambda_max s)`
    /// relative to the kernel, dropping rates below `lambda_min` about
    /// `(lambda_min s)^p`, so small slacks set the top of the window and
    /// large slacks the bottom.
    pub fn covering_window(self, a: f64, s_lo: f64, s_hi: f64, tol: f64) -> Result<(u32, u32)> {
        if !(a > 0.0 && 0.0 < s_lo && s_lo <= s_hi && tol > 0.0 && tol < 1.0) {
            return Err(Error::domain("need a > 0, 0 < s_lo <= s_hi and 0 < tol < 1"));
        }
        let (lambda_max, lambda_min) = match self {
            Kernel::Reciprocal => ((1.0 / tol).ln() / s_lo, tol / s_hi),
            Kernel::ReciprocalSquare => (((1.0 / tol).ln() + 3.0) / s_lo, (2.0 * tol).sqrt() / s_hi),
        };
        let m = (lambda_max.ln() / a).ceil().max(0.0) as u32;
        let big_m = (-lambda_min.ln() / a).ceil().max(0.0) as u32;
        Ok((m, big_m))
    }
}

/// `1/s ~ sum_{i=-m}^{M} a lambda_i exp(-lambda_i s)`, `lambda_i = exp(-i a)`.
pub fn reciprocal_superposition(a: f64, m: u32, big_m: u32) -> Result<ExpSuperposition> {
    Kernel::Reciprocal.superposition(a, m, big_m)
}

/// Nested regions `R_i = [e^-i, e^j_max]`, `i = 1..=depth`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegionLadder {
    pub depth: u32,
    pub j_max: u32,
}

pub const DEFAULT_LADDER_BASE: u32 = 4;

impl RegionLadder {
    /// Bounds `(e^-i, e^j_max)` of region `i`.
    pub fn region(&self, i: u32) -> Option<(f64, f64)> {
        (1..=self.depth)
            .contains(&i)
            .then(|| ((-(i as f64)).exp(), (self.j_max as f64).exp()))
    }

    /// Window `(m, M) = (ceil(j_max / a), ceil(depth / a))`.
    pub fn window(&self, a: f64) -> (u32, u32) {
        (
            (self.j_max as f64 / a).ceil() as u32,
            (self.depth as f64 / a).ceil() as u32,
        )
    }

    pub fn reciprocal(&self, a: f64) -> Result<ExpSuperposition> {
        let (m, big_m) = self.window(a);
        reciprocal_superposition(a, m, big_m)
    }
}

/// Depth grows by one per iteration from `base`.
pub fn ladder_for_iterations(iterations: u32, j_max: u32, base: u32) -> RegionLadder {
    RegionLadder {
        depth: base + iterations,
        j_max,
    }
}

/// `n` points spaced evenly in `ln s` over `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp())
            .collect(),
    }
}

/// Largest `|approx - psi| / |psi|` over `grid`.
pub fn max_rel_error(sup: &ExpSuperposition, kernel: Kernel, grid: &[f64]) -> f64 {
    grid.iter()
        .map(|&s| {
            let exact = kernel.eval(s);
            (sup.evaluate(s) - exact).norm() / exact.abs()
        })
        .fold(0.0, f64::max)
}

/// Kernel specification for the planar builder.
#[derive(Debug, Clone, PartialEq)]
pub enum KernelSpec {
    Library(Kernel),
    /// Samples `(s, psi(s))` sorted by `s`, linearly interpolated; constant
    /// outside the sampled range.
    Sampled(Vec<(f64, f64)>),
}

impl KernelSpec {
    pub fn eval(&self, s: f64) -> f64 {
        match self {
            KernelSpec::Library(k) => k.eval(s),
            KernelSpec::Sampled(pts) => {
                let idx = pts.partition_point(|&(x, _)| x < s);
                if idx == 0 {
                    pts[0].1
                } else if idx == pts.len() {
                    pts[pts.len() - 1].1
                } else {
                    let ((x0, y0), (x1, y1)) = (pts[idx - 1], pts[idx]);
                    y0 + (y1 - y0) * (s - x0) / (x1 - x0)
                }
            }
        }
    }

    fn validate(&self) -> Result<()> {
        if let KernelSpec::Sampled(pts) = self {
            if pts.is_empty() {
                return Err(Error::validation("sampled kernel has no points"));
            }
            if pts.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
                return Err(Error::domain("sampled kernel has non-finite samples"));
            }
            if pts.windows(2).any(|p| p[0].0 >= p[1].0) {
                return Err(Error::validation("sampled kernel abscissae must increase"));
            }
        }
        Ok(())
    }
}

/// Axis-aligned rectangle `[u0, u1] x [v0, v1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub u0: f64,
    pub u1: f64,
    pub v0: f64,
    pub v1: f64,
}

impl Rect {
    pub fn is_empty(&self) -> bool {
        !(self.u0 < self.u1 && self.v0 < self.v1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarTerm {
    pub coeff: f64,
    pub mu: f64,
    pub lambda: f64,
}

pub fn evaluate_2d(terms: &[PlanarTerm], u: f64, v: f64) -> f64 {
    terms
        .iter()
        .map(|t| t.coeff * (-(t.mu * u + t.lambda * v)).exp())
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarOptions {
    pub tolerance: f64,
    pub max_terms: usize,
    /// rates are spread over `[-rate_span, rate_span]` per axis, scaled to the
    /// rectangle
    pub rate_span: f64,
}

impl Default for PlanarOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-3,
            max_terms: 400,
            rate_span: 3.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PlanarFit {
    pub terms: Vec<PlanarTerm>,
    /// max relative error on the interior check grid
    pub max_rel_error: f64,
}

/// Exponential approximation of `psi(c - u^2 + v^2)` on `rect`.
///
/// Rates form a tensor grid of `p` values per axis and the coefficients are
/// fitted by least squares on a `(2p+2)`-point sample grid; `p` grows until
/// the error on a staggered interior grid meets the tolerance or the term
/// budget runs out.
pub fn superposition_2d(
    kernel: &KernelSpec,
    c: f64,
    rect: Rect,
    opts: PlanarOptions,
) -> Result<PlanarFit> {
    kernel.validate()?;
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::domain(format!("c must be positive, got {c}")));
    }
    if rect.is_empty() {
        return Ok(PlanarFit {
            terms: Vec::new(),
            max_rel_error: 0.0,
        });
    }
    if rect.u0 < 0.0 || rect.v0 < 0.0 {
        return Err(Error::validation("rectangle must lie in the quarter-plane u, v >= 0"));
    }
    let target = |u: f64, v: f64| kernel.eval(c - u * u + v * v);
    let (wu, wv) = (rect.u1 - rect.u0, rect.v1 - rect.v0);
    let axis = |lo: f64, width: f64, k: usize, count: usize, offset: f64| {
        lo + width * (k as f64 + offset) / count as f64
    };

    let mut best = f64::INFINITY;
    let mut p = 1;
    while p * p <= opts.max_terms {
        let rates = |width: f64| -> Vec<f64> {
            if p == 1 {
                vec![0.0]
            } else {
                (0..p)
                    .map(|k| opts.rate_span * (2.0 * k as f64 / (p - 1) as f64 - 1.0) / width)
                    .collect()
            }
        };
        let (mus, lambdas) = (rates(wu), rates(wv));
        let pairs: Vec<(f64, f64)> = mus
            .iter()
            .flat_map(|&mu| lambdas.iter().map(move |&la| (mu, la)))
            .collect();

        let g = 2 * p + 2;
        let samples: Vec<(f64, f64)> = (0..=g)
            .flat_map(|i| (0..=g).map(move |j| (i, j)))
            .map(|(i, j)| (axis(rect.u0, wu, i, g, 0.0), axis(rect.v0, wv, j, g, 0.0)))
            .collect();
        // rows weighted by 1/psi so the fit targets relative error
        let design = DMatrix::from_fn(samples.len(), pairs.len(), |r, col| {
            let (u, v) = samples[r];
            let (mu, la) = pairs[col];
            (-(mu * (u - rect.u0) + la * (v - rect.v0))).exp() / target(u, v)
        });
        let rhs = DVector::from_element(samples.len(), 1.0);
        let sol = design
            .svd(true, true)
            .solve(&rhs, 1e-13)
            .map_err(|e| Error::domain(format!("least squares failed: {e}")))?;
        // fold the rectangle origin shift into the coefficients
        let terms: Vec<PlanarTerm> = pairs
            .iter()
            .zip(sol.iter())
            .map(|(&(mu, lambda), &k)| PlanarTerm {
                coeff: k * (mu * rect.u0 + lambda * rect.v0).exp(),
                mu,
                lambda,
            })
            .collect();

        let check = 4 * p + 3;
        let err = (0..check)
            .flat_map(|i| (0..check).map(move |j| (i, j)))
            .map(|(i, j)| {
                let u = axis(rect.u0, wu, i, check, 0.5);
                let v = axis(rect.v0, wv, j, check, 0.5);
                let exact = target(u, v);
                (evaluate_2d(&terms, u, v) - exact).abs() / exact.abs().max(1e-300)
            })
            .fold(0.0, f64::max);
        if err <= opts.tolerance {
            return Ok(PlanarFit {
                terms,
                max_rel_error: err,
            });
        }
        best = best.min(err);
        p += 1;
    }
    Err(Error::domain(format!(
        "tolerance {} not reached within {} terms (best max relative error {best:.3e})",
        opts.tolerance, opts.max_terms
    )))
}

/// `sum_i c_i exp(-lambda_i s)` at a complex `s`; used when composing with
/// complex rates.
pub fn evaluate_complex(sup: &ExpSuperposition, s: Complex64) -> Complex64 {
    sup.terms
        .iter()
        .fold(czero(), |acc, t| acc + t.coeff * (-t.rate * s).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sixty_three_terms() {
        let sup = reciprocal_superposition(0.5, 2, 60).unwrap();
        assert_eq!(sup.len(), 63);
        let rates: Vec<f64> = sup.terms().iter().map(|t| t.rate.re).collect();
        assert!((rates[0] - 1f64.exp()).abs() < 1e-15);
        assert!((rates[62] - (-30f64).exp()).abs() < 1e-28);
    }

    #[test]
    fn printed_window_truncates_extreme_slacks() {
        // rates in [e^-30, e] cannot resolve 1/s at either end of [e^-30, e]
        let sup = reciprocal_superposition(0.5, 2, 60).unwrap();
        assert!((sup.evaluate(1.0).re - 1.0).abs() > 1e-2);
        let tiny = (-30f64).exp();
        assert!((sup.evaluate(tiny).re * tiny - 1.0).abs() > 0.5);
    }

    #[test]
    fn covering_window_meets_tolerance() {
        let (lo, hi) = ((-30f64).exp(), 1f64.exp());
        let (m, big_m) = Kernel::Reciprocal.covering_window(0.5, lo, hi, 1e-7).unwrap();
        let sup = reciprocal_superposition(0.5, m, big_m).unwrap();
        let grid = log_grid(lo, hi, 200);
        assert!(max_rel_error(&sup, Kernel::Reciprocal, &grid) <= 1e-6);
        assert!(sup.len() > 63);
        assert!((sup.evaluate(1.0).re - 1.0).abs() <= 1e-6);
    }

    #[test]
    fn reciprocal_square_family() {
        let (lo, hi) = ((-12f64).exp(), 1f64.exp());
        let (m, big_m) = Kernel::ReciprocalSquare.covering_window(0.5, lo, hi, 1e-8).unwrap();
        let sup = Kernel::ReciprocalSquare.superposition(0.5, m, big_m).unwrap();
        let grid = log_grid(lo, hi, 100);
        assert!(max_rel_error(&sup, Kernel::ReciprocalSquare, &grid) <= 1e-6);
    }

    #[test]
    fn trivial_superpositions() {
        assert_eq!(ExpSuperposition::empty().evaluate(2.0), czero());
        let one = ExpSuperposition::single(cre(1.0), czero());
        for s in [0.0, 1.0, 17.5] {
            assert_eq!(one.evaluate(s), cre(1.0));
        }
        let dup = vec![
            ExpTerm { coeff: cre(1.0), rate: cre(2.0) },
            ExpTerm { coeff: cre(3.0), rate: cre(2.0) },
        ];
        assert!(ExpSuperposition::new(dup).is_err());
    }

    #[test]
    fn shift_identity() {
        let a = 0.5;
        for s in log_grid(1e-8, 2.0, 30) {
            let lhs = reciprocal_superposition(a, 2, 60).unwrap().evaluate(a.exp() * s);
            let rhs = reciprocal_superposition(a, 3, 59).unwrap().evaluate(s) * (-a).exp();
            assert!((lhs - rhs).norm() <= 1e-14 * rhs.norm());
        }
    }

    #[test]
    fn ladder_policy() {
        let l0 = ladder_for_iterations(0, 1, DEFAULT_LADDER_BASE);
        assert_eq!(l0.depth, 4);
        for it in 0..20 {
            let (a, b) = (
                ladder_for_iterations(it, 1, DEFAULT_LADDER_BASE),
                ladder_for_iterations(it + 1, 1, DEFAULT_LADDER_BASE),
            );
            assert!(b.depth >= a.depth);
        }
        let l = ladder_for_iterations(26, 1, DEFAULT_LADDER_BASE);
        assert_eq!(l.window(0.5), (2, 60));
        for i in 1..l.depth {
            let (lo, hi) = l.region(i).unwrap();
            let (lo2, hi2) = l.region(i + 1).unwrap();
            assert!(lo2 <= lo && hi <= hi2);
        }
        assert!(l.region(0).is_none());
    }

    #[test]
    fn planar_trivial_cases() {
        let empty = Rect { u0: 0.0, u1: 0.0, v0: 0.0, v1: 1.0 };
        let k = KernelSpec::Library(Kernel::Reciprocal);
        assert!(superposition_2d(&k, 2.0, empty, PlanarOptions::default())
            .unwrap()
            .terms
            .is_empty());
        let constant = KernelSpec::Sampled(vec![(-10.0, 1.0), (10.0, 1.0)]);
        let unit = Rect { u0: 0.0, u1: 1.0, v0: 0.0, v1: 1.0 };
        let fit = superposition_2d(&constant, 2.0, unit, PlanarOptions::default()).unwrap();
        assert_eq!(fit.terms.len(), 1);
        let t = fit.terms[0];
        assert!((t.coeff - 1.0).abs() < 1e-12 && t.mu == 0.0 && t.lambda == 0.0);
    }

    #[test]
    fn planar_reciprocal() {
        let unit = Rect { u0: 0.0, u1: 1.0, v0: 0.0, v1: 1.0 };
        let k = KernelSpec::Library(Kernel::Reciprocal);
        let fit = superposition_2d(&k, 2.0, unit, PlanarOptions::default()).unwrap();
        assert!(fit.terms.len() <= 400);
        assert!(fit.max_rel_error <= 1e-3);
        let tight = PlanarOptions { tolerance: 1e-30, max_terms: 9, ..Default::default() };
        assert!(superposition_2d(&k, 2.0, unit, tight).is_err());
    }

    proptest! {
        #[test]
        fn linearity(s in 0.01f64..5.0, a1 in 0.2f64..1.0, a2 in 0.2f64..1.0) {
            let x = reciprocal_superposition(a1, 2, 10).unwrap();
            let y = Kernel::ReciprocalSquare.superposition(a2, 1, 8).unwrap();
            let lhs = x.combine(&y).evaluate(s);
            let rhs = x.evaluate(s) + y.evaluate(s);
            prop_assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm());
        }

        #[test]
        fn distributive_regrouping(slacks in proptest::collection::vec(0.01f64..3.0, 1..20)) {
            let sup = reciprocal_superposition(0.5, 2, 60).unwrap();
            let direct: Complex64 = slacks.iter().map(|&s| sup.evaluate(s)).sum();
            let regrouped = sup.evaluate_distributive(&slacks);
            prop_assert!((direct - regrouped).norm() <= 1e-12 * direct.norm());
        }
    }
}
