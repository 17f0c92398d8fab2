//! Exact multivariate polynomials over the rationals.
//!
//! A [`Polynomial`] lives in a fixed, named variable universe. Terms are kept
//! in a `BTreeMap` keyed by dense exponent vectors, so two polynomials over
//! the same universe are equal iff their maps are equal. Zero coefficients are
//! never stored.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;
pub type Exponents = Vec<u32>;

pub fn rat(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> Rational {
    BigRational::from_integer(BigInt::from(v))
}

/// Inverse stereographic projection: a rational point of the unit sphere in
/// `n + 1` dimensions from `n` rational parameters.
pub fn rational_sphere_point(t: &[Rational]) -> Vec<Rational> {
    let norm2: Rational = t.iter().map(|v| v * v).sum();
    let denom = &norm2 + Rational::one();
    let mut out: Vec<Rational> = t.iter().map(|v| int(2) * v / &denom).collect();
    out.push((norm2 - Rational::one()) / denom);
    out
}

#[derive(Clone, PartialEq, Eq)]
pub struct Polynomial {
    vars: Arc<[String]>,
    terms: BTreeMap<Exponents, Rational>,
}

impl Polynomial {
    pub fn zero(vars: &[&str]) -> Self {
        Self::zero_in(vars.iter().map(|v| v.to_string()).collect())
    }

    fn zero_in(vars: Arc<[String]>) -> Self {
        Self {
            vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: &[&str], c: Rational) -> Self {
        let mut p = Self::zero(vars);
        let e = vec![0; p.arity()];
        p.push_term(e, c);
        p
    }

    /// Constant in the same universe as `self`.
    pub fn constant_like(&self, c: Rational) -> Self {
        Self::constant_in(self.vars.clone(), c)
    }

    pub fn zero_like(&self) -> Self {
        Self::zero_in(self.vars.clone())
    }

    /// `sum x_i^2 - 1` over the whole universe.
    pub fn sphere_relation(vars: &[&str]) -> Self {
        let mut p = Self::constant(vars, -Rational::one());
        for i in 0..vars.len() {
            let mut e = vec![0; vars.len()];
            e[i] = 2;
            p.push_term(e, Rational::one());
        }
        p
    }

    /// The polynomial `var` itself.
    pub fn var(vars: &[&str], name: &str) -> Result<Self> {
        let mut p = Self::zero(vars);
        let idx = p.var_index(name)?;
        let mut e = vec![0; p.arity()];
        e[idx] = 1;
        p.push_term(e, Rational::one());
        Ok(p)
    }

    /// Builds from `(coefficient, exponents)` pairs, merging duplicates.
    pub fn from_terms(
        vars: &[&str],
        terms: impl IntoIterator<Item = (Rational, Exponents)>,
    ) -> Result<Self> {
        let mut p = Self::zero(vars);
        for (c, e) in terms {
            if e.len() != p.arity() {
                return Err(Error::Dimension {
                    expected: p.arity(),
                    found: e.len(),
                });
            }
            p.push_term(e, c);
        }
        Ok(p)
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn arity(&self) -> usize {
        self.vars.len()
    }

    pub fn var_index(&self, name: &str) -> Result<usize> {
        self.vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::validation(format!("unknown variable `{name}`")))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Rational)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Coefficient of the given monomial (zero when absent).
    pub fn coeff(&self, e: &[u32]) -> Rational {
        self.terms.get(e).cloned().unwrap_or_else(Rational::zero)
    }

    /// Constant term as a rational, if the polynomial is constant.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.iter().all(|&x| x == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|e| e[var]).max().unwrap_or(0)
    }

    fn push_term(&mut self, e: Exponents, c: Rational) {
        use std::collections::btree_map::Entry;
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn same_universe(&self, other: &Self) -> Result<()> {
        if self.vars != other.vars {
            return Err(Error::validation(format!(
                "variable universes differ: {:?} vs {:?}",
                self.vars, other.vars
            )));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_universe(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.push_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.same_universe(other)?;
        let mut acc: BTreeMap<Exponents, Rational> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Exponents = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                *acc.entry(e).or_insert_with(Rational::zero) += ca * cb;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Ok(Self {
            vars: self.vars.clone(),
            terms: acc,
        })
    }

    pub fn scalar_mul(&self, k: &Rational) -> Self {
        if k.is_zero() {
            return Self::zero_in(self.vars.clone());
        }
        Self {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * k)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut result = Self::constant_in(self.vars.clone(), Rational::one());
        let mut base = self.clone();
        let mut k = k;
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

    fn constant_in(vars: Arc<[String]>, c: Rational) -> Self {
        let mut p = Self::zero_in(vars);
        let e = vec![0; p.arity()];
        p.push_term(e, c);
        p
    }

    /// Composition `self[var := replacement]`.
    pub fn substitute(&self, var: usize, replacement: &Self) -> Result<Self> {
        self.same_universe(replacement)?;
        if var >= self.arity() {
            return Err(Error::Dimension {
                expected: self.arity(),
                found: var + 1,
            });
        }
        let max_e = self.degree_in(var);
        let powers: Vec<Self> = std::iter::successors(
            Some(Self::constant_in(self.vars.clone(), Rational::one())),
            |p| Some(p * replacement),
        )
        .take(max_e as usize + 1)
        .collect();
        let mut out = Self::zero_in(self.vars.clone());
        for (e, c) in &self.terms {
            let mut rest = e.clone();
            rest[var] = 0;
            let mono = Self {
                vars: self.vars.clone(),
                terms: BTreeMap::from([(rest, c.clone())]),
            };
            out = &out + &(&mono * &powers[e[var] as usize]);
        }
        Ok(out)
    }

    /// Simultaneous substitution of every variable, producing a polynomial in
    /// the universe of the replacements (which must all share one universe).
    pub fn compose(&self, replacements: &[Self]) -> Result<Self> {
        if replacements.len() != self.arity() {
            return Err(Error::Dimension {
                expected: self.arity(),
                found: replacements.len(),
            });
        }
        let target = match replacements.first() {
            Some(r) => r.vars.clone(),
            None => return Ok(self.clone()),
        };
        for r in replacements {
            if r.vars != target {
                return Err(Error::validation("replacements use different universes"));
            }
        }
        let one = Self::constant_in(target.clone(), Rational::one());
        let mut out = Self::zero_in(target);
        for (e, c) in &self.terms {
            let mut term = one.scalar_mul(c);
            for (r, &k) in replacements.iter().zip(e) {
                if k > 0 {
                    term = &term * &r.pow(k);
                }
            }
            out = &out + &term;
        }
        Ok(out)
    }

    /// Formal partial derivative.
    pub fn derivative(&self, var: usize) -> Self {
        let mut out = Self::zero_in(self.vars.clone());
        for (e, c) in &self.terms {
            if e[var] == 0 {
                continue;
            }
            let mut d = e.clone();
            d[var] -= 1;
            out.push_term(d, c * int(e[var] as i64));
        }
        out
    }

    /// Rewrites `v^2 -> 1 - sum_{u != v} u^2` until every term has degree at
    /// most one in `v`. The result agrees with `self` on the unit sphere.
    pub fn reduce_mod_sphere(&self, pivot: usize) -> Self {
        let mut rest = Self::constant_in(self.vars.clone(), Rational::one());
        for u in (0..self.arity()).filter(|&u| u != pivot) {
            let mut e = vec![0; self.arity()];
            e[u] = 2;
            rest.push_term(e, -Rational::one());
        }
        let max_half = self.degree_in(pivot) / 2;
        let powers: Vec<Self> = std::iter::successors(
            Some(Self::constant_in(self.vars.clone(), Rational::one())),
            |p| Some(p * &rest),
        )
        .take(max_half as usize + 1)
        .collect();
        let mut out = Self::zero_in(self.vars.clone());
        for (e, c) in &self.terms {
            let half = e[pivot] / 2;
            if half == 0 {
                out.push_term(e.clone(), c.clone());
                continue;
            }
            let mut base = e.clone();
            base[pivot] %= 2;
            let mono = Self {
                vars: self.vars.clone(),
                terms: BTreeMap::from([(base, c.clone())]),
            };
            out = &out + &(&mono * &powers[half as usize]);
        }
        out
    }

    /// Exact quotient `self / divisor` when the division leaves no remainder.
    ///
    /// Uses the lexicographic division algorithm; for a single divisor the
    /// remainder vanishes exactly when `divisor` divides `self`.
    pub fn div_exact(&self, divisor: &Self) -> Result<Option<Self>> {
        self.same_universe(divisor)?;
        let (lead_e, lead_c) = match divisor.terms.iter().next_back() {
            Some((e, c)) => (e.clone(), c.clone()),
            None => return Err(Error::domain("division by the zero polynomial")),
        };
        let mut rem = self.clone();
        let mut quot = Self::zero_in(self.vars.clone());
        while let Some((e, c)) = rem.terms.iter().next_back() {
            if e.iter().zip(&lead_e).any(|(a, b)| a < b) {
                return Ok(None);
            }
            let qe: Exponents = e.iter().zip(&lead_e).map(|(a, b)| a - b).collect();
            let qc = c / &lead_c;
            let step = Self {
                vars: self.vars.clone(),
                terms: BTreeMap::from([(qe.clone(), qc.clone())]),
            };
            rem = &rem - &(&step * divisor);
            quot.push_term(qe, qc);
        }
        Ok(Some(quot))
    }

    /// The polynomial `g` with `g^n == self`, for odd `n`, if one exists.
    pub fn odd_root(&self, n: u32) -> Option<Self> {
        assert!(n % 2 == 1, "odd_root needs an odd exponent");
        if self.is_zero() {
            return Some(self.clone());
        }
        let (lead_e, lead_c) = self.terms.iter().next_back().unwrap();
        if lead_e.iter().any(|e| e % n != 0) {
            return None;
        }
        let root_e: Exponents = lead_e.iter().map(|e| e / n).collect();
        let root_c = rational_root(lead_c, n)?;
        let mut g = Self {
            vars: self.vars.clone(),
            terms: BTreeMap::from([(root_e.clone(), root_c.clone())]),
        };
        // n * LT(g)^(n-1), the linearisation of g^n around the leading term
        let lin_e: Exponents = root_e.iter().map(|e| e * (n - 1)).collect();
        let lin_c = int(n as i64) * num_traits::pow(root_c, (n - 1) as usize);
        let limit = self.terms.len() * 4 + 16;
        for _ in 0..limit {
            let r = self - &g.pow(n);
            let (re, rc) = match r.terms.iter().next_back() {
                None => return Some(g),
                Some(t) => t,
            };
            if re.iter().zip(&lin_e).any(|(a, b)| a < b) {
                return None;
            }
            let te: Exponents = re.iter().zip(&lin_e).map(|(a, b)| a - b).collect();
            if te >= root_e {
                return None;
            }
            g.push_term(te, rc / &lin_c);
        }
        None
    }

    pub fn eval_rational(&self, point: &[Rational]) -> Result<Rational> {
        self.check_point(point.len())?;
        let mut total = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    t *= num_traits::pow(x.clone(), k as usize);
                }
            }
            total += t;
        }
        Ok(total)
    }

    pub fn eval_f64(&self, point: &[f64]) -> Result<f64> {
        self.check_point(point.len())?;
        let mut total = 0.0;
        for (e, c) in &self.terms {
            let mut t = c.to_f64().unwrap_or(f64::NAN);
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    t *= x.powi(k as i32);
                }
            }
            total += t;
        }
        Ok(total)
    }

    fn check_point(&self, len: usize) -> Result<()> {
        if len != self.arity() {
            return Err(Error::Dimension {
                expected: self.arity(),
                found: len,
            });
        }
        Ok(())
    }

    /// Re-expresses the polynomial in a larger universe. Every current
    /// variable must appear in `vars`.
    pub fn embed(&self, vars: &[&str]) -> Result<Self> {
        let map: Vec<usize> = self
            .vars
            .iter()
            .map(|v| {
                vars.iter()
                    .position(|w| w == v)
                    .ok_or_else(|| Error::validation(format!("variable `{v}` missing in target")))
            })
            .collect::<Result<_>>()?;
        let mut out = Self::zero(vars);
        for (e, c) in &self.terms {
            let mut ne = vec![0; vars.len()];
            for (k, &dst) in map.iter().enumerate() {
                ne[dst] = e[k];
            }
            out.push_term(ne, c.clone());
        }
        Ok(out)
    }

    /// Size of the textual description, used for proof-length accounting.
    pub fn description_size(&self) -> usize {
        self.terms.len().max(1)
    }

    /// Parses the text format: sums and products of rational constants,
    /// variables, powers `^k` and parenthesised subexpressions.
    pub fn parse(text: &str, vars: &[&str]) -> Result<Self> {
        let mut parser = Parser {
            chars: text.chars().collect(),
            pos: 0,
            vars: vars.iter().map(|v| v.to_string()).collect(),
        };
        let p = parser.expr()?;
        parser.skip_ws();
        if parser.pos != parser.chars.len() {
            return Err(parser.error("unexpected trailing input"));
        }
        Ok(p)
    }
}

fn rational_root(c: &Rational, n: u32) -> Option<Rational> {
    let (num, den) = (c.numer(), c.denom());
    let (rn, rd) = (num.nth_root(n), den.nth_root(n));
    (rn.pow(n) == *num && rd.pow(n) == *den).then(|| BigRational::new(rn, rd))
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms.iter().rev().enumerate() {
            let sign = if c.is_negative() { "-" } else { "+" };
            if k == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let mag = c.abs();
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &x)| x > 0)
                .map(|(i, &x)| {
                    if x == 1 {
                        self.vars[i].clone()
                    } else {
                        format!("{}^{x}", self.vars[i])
                    }
                })
                .collect();
            if mono.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{mag}*{}", mono.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial[{}]({self})", self.vars.join(","))
    }
}

// Operator impls panic on universe mismatch; use the `checked_*` methods
// when operands come from untrusted input.
impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.checked_add(rhs).expect("polynomial universes differ")
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.checked_sub(rhs).expect("polynomial universes differ")
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.checked_mul(rhs).expect("polynomial universes differ")
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

impl Add for Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: Polynomial) -> Polynomial {
        &self + &rhs
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: Polynomial) -> Polynomial {
        &self - &rhs
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: Polynomial) -> Polynomial {
        &self * &rhs
    }
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    vars: Arc<[String]>,
}

impl Parser {
    fn error(&self, msg: &str) -> Error {
        Error::Parse {
            line: 1,
            message: format!("polynomial column {}: {msg}", self.pos + 1),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn one(&self) -> Polynomial {
        Polynomial::constant_in(self.vars.clone(), Rational::one())
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let mut acc = Polynomial::zero_in(self.vars.clone());
        let mut first = true;
        loop {
            let sign = match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    1
                }
                Some('-') => {
                    self.pos += 1;
                    -1
                }
                _ if first => 1,
                _ => break,
            };
            first = false;
            let t = self.term()?;
            acc = if sign > 0 { &acc + &t } else { &acc - &t };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    let f = self.power()?;
                    acc = &acc * &f;
                }
                Some('/') => {
                    self.pos += 1;
                    let d = self.power()?;
                    let c = d
                        .as_constant()
                        .filter(|c| !c.is_zero())
                        .ok_or_else(|| self.error("can only divide by a nonzero constant"))?;
                    acc = acc.scalar_mul(&c.recip());
                }
                // implicit multiplication: `3x`, `x y`, `x(y+1)`
                Some(c) if c.is_alphanumeric() || c == '(' || c == '_' => {
                    let f = self.power()?;
                    acc = &acc * &f;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<Polynomial> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            self.skip_ws();
            let k = self.integer()?;
            let k: u32 = k
                .to_u32()
                .ok_or_else(|| self.error("exponent must be a small nonnegative integer"))?;
            return Ok(base.pow(k));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an integer"));
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        Ok(s.parse().expect("digits parse as BigInt"))
    }

    fn atom(&mut self) -> Result<Polynomial> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some('-') => {
                self.pos += 1;
                Ok(-&self.power()?)
            }
            Some(c) if c.is_ascii_digit() => {
                let v = self.integer()?;
                Ok(self.one().scalar_mul(&BigRational::from_integer(v)))
            }
            Some(c) if c.is_alphabetic() || c == '_' => {
                let start = self.pos;
                while self.pos < self.chars.len()
                    && (self.chars[self.pos].is_alphanumeric() || self.chars[self.pos] == '_')
                {
                    self.pos += 1;
                }
                let name: String = self.chars[start..self.pos].iter().collect();
                let idx = self
                    .vars
                    .iter()
                    .position(|v| *v == name)
                    .ok_or_else(|| self.error(&format!("unknown variable `{name}`")))?;
                let mut e = vec![0; self.vars.len()];
                e[idx] = 1;
                Ok(Polynomial {
                    vars: self.vars.clone(),
                    terms: BTreeMap::from([(e, Rational::one())]),
                })
            }
            _ => Err(self.error("expected a number, variable or `(`")),
        }
    }
}
