//! Positivity proofs.
//!
//! A [`ProofTree`] is checked bottom-up: every node concludes `p >= 0` (or
//! `p > 0`) for an explicit polynomial `p`, on all of `R^n` or on the zero
//! set of some relations. The checker never trusts a claimed conclusion; it
//! recomputes each one from the children with exact rational arithmetic.
//!
//! [`SosCertificate`]s express a target as a weighted sum of squares modulo
//! a variety. Without the multipliers of the non-sphere relations the exact
//! check reduces modulo the unit sphere alone, which suffices for both
//! built-in certificates.

use std::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instances::CnfFormula;
use crate::oracles::sphere_sample;
use crate::polyalg::{int, rat, Polynomial, Rational};

/// Where a conclusion holds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Domain {
    Reals,
    /// the common zero set of the relations
    Variety(Vec<Polynomial>),
}

impl Domain {
    fn meet(&self, other: &Domain) -> Domain {
        match (self, other) {
            (Domain::Reals, d) | (d, Domain::Reals) => d.clone(),
            (Domain::Variety(a), Domain::Variety(b)) => {
                let mut rel = a.clone();
                rel.extend(b.iter().filter(|g| !a.contains(g)).cloned());
                Domain::Variety(rel)
            }
        }
    }
}

/// Which reading of the composition rule a [`ProofTree::Compose`] uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComposeVariant {
    /// `f >= 0` on `R^n` gives `f(g) >= 0`.
    AllReals,
    /// `f >= 0` on the nonnegative orthant and every `g_i >= 0` gives
    /// `f(g) >= 0`.
    Orthant,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProofTree {
    /// `alpha > 0`, stated in the universe of `vars`.
    Const { vars: Vec<String>, alpha: Rational },
    /// `g^2 >= 0`.
    Square(Polynomial),
    Sum(Box<ProofTree>, Box<ProofTree>),
    Product(Box<ProofTree>, Box<ProofTree>),
    /// `target >= 0` on `V(relations)` because `target - child` lies in the
    /// ideal: either `target - child == sum a_j g_j` for the given
    /// multipliers, or, with no multipliers, the difference reduces to zero
    /// modulo the unit sphere (which must be among the relations).
    ModVariety {
        child: Box<ProofTree>,
        target: Polynomial,
        relations: Vec<Polynomial>,
        multipliers: Option<Vec<Polynomial>>,
    },
    /// `h(y) = f(g_1(y), ..., g_n(y))`. For the orthant variant `inner`
    /// proves each `g_i >= 0`.
    Compose {
        lemma: Box<ProofTree>,
        substitutions: Vec<Polynomial>,
        variant: ComposeVariant,
        inner: Vec<ProofTree>,
    },
    /// `h = f / g` from `f >= 0` and `g > 0`.
    Divide { numerator: Box<ProofTree>, divisor: Box<ProofTree> },
    /// `g >= 0` from `g^(2k+1) >= 0`.
    OddRadical { child: Box<ProofTree>, k: u32 },
    /// A named, separately proved inequality. Its internal proof is checked
    /// but counts as a single step.
    Lemma { name: String, proof: Box<ProofTree> },
}

impl ProofTree {
    pub fn constant(vars: &[&str], alpha: Rational) -> Self {
        ProofTree::Const {
            vars: vars.iter().map(|v| v.to_string()).collect(),
            alpha,
        }
    }

    pub fn sum(a: ProofTree, b: ProofTree) -> Self {
        ProofTree::Sum(Box::new(a), Box::new(b))
    }

    pub fn product(a: ProofTree, b: ProofTree) -> Self {
        ProofTree::Product(Box::new(a), Box::new(b))
    }

    fn kind(&self) -> &'static str {
        match self {
            ProofTree::Const { .. } => "Const",
            ProofTree::Square(_) => "Square",
            ProofTree::Sum(..) => "Sum",
            ProofTree::Product(..) => "Product",
            ProofTree::ModVariety { .. } => "ModVariety",
            ProofTree::Compose { .. } => "Compose",
            ProofTree::Divide { .. } => "Divide",
            ProofTree::OddRadical { .. } => "OddRadical",
            ProofTree::Lemma { .. } => "Lemma",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Conclusion {
    pub poly: Polynomial,
    /// `poly > 0` rather than `>= 0`
    pub strict: bool,
    pub domain: Domain,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Accept {
        conclusion: Conclusion,
        /// nodes plus substitution description sizes
        proof_length: usize,
    },
    Reject {
        /// path of child indices from the root to the failing node
        path: Vec<usize>,
        node: &'static str,
        reason: String,
    },
}

impl Verdict {
    pub fn is_accept(&self) -> bool {
        matches!(self, Verdict::Accept { .. })
    }
}

struct Rejection {
    path: Vec<usize>,
    node: &'static str,
    reason: String,
}

type Checked = std::result::Result<(Conclusion, usize), Rejection>;

fn reject(node: &ProofTree, reason: impl Into<String>) -> Checked {
    Err(Rejection {
        path: Vec::new(),
        node: node.kind(),
        reason: reason.into(),
    })
}

fn descend(idx: usize, r: Checked) -> Checked {
    r.map_err(|mut e| {
        e.path.insert(0, idx);
        e
    })
}

/// Recomputes every conclusion in `t`.
pub fn check_proof(t: &ProofTree) -> Verdict {
    match check(t) {
        Ok((conclusion, proof_length)) => Verdict::Accept {
            conclusion,
            proof_length,
        },
        Err(r) => Verdict::Reject {
            path: r.path,
            node: r.node,
            reason: r.reason,
        },
    }
}

fn check(t: &ProofTree) -> Checked {
    match t {
        ProofTree::Const { vars, alpha } => {
            if !alpha.is_positive() {
                return reject(t, format!("constant {alpha} is not positive"));
            }
            let names: Vec<&str> = vars.iter().map(String::as_str).collect();
            let poly = Polynomial::constant(&names, alpha.clone());
            Ok((
                Conclusion {
                    poly,
                    strict: true,
                    domain: Domain::Reals,
                },
                1,
            ))
        }
        ProofTree::Square(g) => Ok((
            Conclusion {
                poly: g * g,
                strict: false,
                domain: Domain::Reals,
            },
            1,
        )),
        ProofTree::Sum(a, b) | ProofTree::Product(a, b) => {
            let (ca, la) = descend(0, check(a))?;
            let (cb, lb) = descend(1, check(b))?;
            let is_sum = matches!(t, ProofTree::Sum(..));
            let poly = if is_sum {
                ca.poly.checked_add(&cb.poly)
            } else {
                ca.poly.checked_mul(&cb.poly)
            };
            let poly = match poly {
                Ok(p) => p,
                Err(e) => return reject(t, e.to_string()),
            };
            let strict = if is_sum {
                ca.strict || cb.strict
            } else {
                ca.strict && cb.strict
            };
            Ok((
                Conclusion {
                    poly,
                    strict,
                    domain: ca.domain.meet(&cb.domain),
                },
                la + lb + 1,
            ))
        }
        ProofTree::ModVariety {
            child,
            target,
            relations,
            multipliers,
        } => {
            let (c, l) = descend(0, check(child))?;
            let diff = match target.checked_sub(&c.poly) {
                Ok(d) => d,
                Err(e) => return reject(t, e.to_string()),
            };
            let ok = match multipliers {
                Some(a) => {
                    if a.len() != relations.len() {
                        return reject(t, "one multiplier per relation required");
                    }
                    let mut combo = diff.zero_like();
                    for (aj, gj) in a.iter().zip(relations) {
                        match aj.checked_mul(gj).and_then(|p| combo.checked_add(&p)) {
                            Ok(p) => combo = p,
                            Err(e) => return reject(t, e.to_string()),
                        }
                    }
                    diff == combo
                }
                None => {
                    if !relations.iter().any(is_sphere_relation) {
                        return reject(t, "no multipliers and no sphere relation to reduce by");
                    }
                    sphere_reduces_to_zero(&diff)
                }
            };
            if !ok {
                return reject(t, "target differs from the child outside the ideal");
            }
            Ok((
                Conclusion {
                    poly: target.clone(),
                    // strictness is not transported across the variety
                    strict: false,
                    domain: c.domain.meet(&Domain::Variety(relations.clone())),
                },
                l + 1,
            ))
        }
        ProofTree::Compose {
            lemma,
            substitutions,
            variant,
            inner,
        } => {
            let (c, l) = descend(0, check(lemma))?;
            if c.domain != Domain::Reals {
                return reject(t, "composition needs a lemma valid on all of R^n");
            }
            let poly = match c.poly.compose(substitutions) {
                Ok(p) => p,
                Err(e) => return reject(t, e.to_string()),
            };
            let mut len = l + 1 + substitutions.iter().map(Polynomial::description_size).sum::<usize>();
            if *variant == ComposeVariant::Orthant {
                if inner.len() != substitutions.len() {
                    return reject(t, "orthant composition needs a proof of g_i >= 0 for every i");
                }
                for (i, (p, g)) in inner.iter().zip(substitutions).enumerate() {
                    let (ci, li) = descend(i + 1, check(p))?;
                    if ci.domain != Domain::Reals || ci.poly != *g {
                        return reject(t, format!("inner proof {i} does not establish g_{i} >= 0 on R^m"));
                    }
                    len += li;
                }
            }
            Ok((
                Conclusion {
                    poly,
                    strict: c.strict,
                    domain: Domain::Reals,
                },
                len,
            ))
        }
        ProofTree::Divide { numerator, divisor } => {
            let (cf, lf) = descend(0, check(numerator))?;
            let (cg, lg) = descend(1, check(divisor))?;
            if !cg.strict {
                return reject(t, "divisor is not certified strictly positive");
            }
            if cf.domain != Domain::Reals || cg.domain != Domain::Reals {
                return reject(t, "division is only checked for statements on R^n");
            }
            let h = match cf.poly.div_exact(&cg.poly) {
                Ok(Some(h)) => h,
                Ok(None) => return reject(t, "divisor does not divide the numerator"),
                Err(e) => return reject(t, e.to_string()),
            };
            Ok((
                Conclusion {
                    poly: h,
                    strict: cf.strict,
                    domain: Domain::Reals,
                },
                lf + lg + 1,
            ))
        }
        ProofTree::OddRadical { child, k } => {
            let (c, l) = descend(0, check(child))?;
            let n = 2 * k + 1;
            match c.poly.odd_root(n) {
                Some(g) => Ok((
                    Conclusion {
                        poly: g,
                        strict: c.strict,
                        domain: c.domain,
                    },
                    l + 1,
                )),
                None => reject(t, format!("not a perfect power of exponent {n}")),
            }
        }
        ProofTree::Lemma { proof, .. } => {
            let (c, _) = descend(0, check(proof))?;
            Ok((c, 1))
        }
    }
}

/// Whether `g` is a nonzero multiple of `sum x_i^2 - 1` over its universe.
pub fn is_sphere_relation(g: &Polynomial) -> bool {
    let names: Vec<&str> = g.vars().iter().map(String::as_str).collect();
    let sphere = Polynomial::sphere_relation(&names);
    let c = g.coeff(&vec![0; g.arity()]);
    !c.is_zero() && g.scalar_mul(&(-Rational::one() / c)) == sphere
}

/// True when reducing modulo the sphere on some pivot variable gives zero.
fn sphere_reduces_to_zero(p: &Polynomial) -> bool {
    p.is_zero() || (0..p.arity()).any(|v| p.reduce_mod_sphere(v).is_zero())
}

/// `(x1 - x2)^2 (...)`-style named lemmas with O(1) symbolic proofs.
pub mod lemmas {
    use super::*;

    /// Two-term Cauchy-Schwarz: `(a^2 + b^2)(c^2 + d^2) - (ac + bd)^2 >= 0`,
    /// as the square of `ad - bc`.
    pub fn cauchy_schwarz_2() -> ProofTree {
        let vars = ["a", "b", "c", "d"];
        let p = Polynomial::parse("a d - b c", &vars).expect("valid");
        ProofTree::Lemma {
            name: "cauchy-schwarz-2".into(),
            proof: Box::new(ProofTree::Square(p)),
        }
    }

    /// `x^2 + y^2 - 2xy >= 0`.
    pub fn two_squares() -> ProofTree {
        let vars = ["x", "y"];
        ProofTree::Lemma {
            name: "two-squares".into(),
            proof: Box::new(ProofTree::Square(Polynomial::parse("x - y", &vars).expect("valid"))),
        }
    }
}

/// Polynomial text plus a weight, as stored in certificate files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedSquareText {
    pub coeff: String,
    pub poly: String,
}

/// On-disk certificate: polynomials in the text format of
/// [`Polynomial::parse`], coefficients as rationals such as `"3/4"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SosCertificateFile {
    #[serde(default)]
    pub name: Option<String>,
    pub variables: Vec<String>,
    pub target: String,
    pub squares: Vec<WeightedSquareText>,
    #[serde(default)]
    pub relations: Vec<String>,
    #[serde(default)]
    pub multipliers: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SosCertificate {
    pub name: Option<String>,
    pub target: Polynomial,
    /// `(c_i, S_i)` with every `c_i > 0`
    pub squares: Vec<(Rational, Polynomial)>,
    pub relations: Vec<Polynomial>,
    pub multipliers: Option<Vec<Polynomial>>,
}

pub fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n: num_bigint::BigInt = num
        .parse()
        .map_err(|_| Error::Parse { line: 0, message: format!("bad rational `{text}`") })?;
    let d: num_bigint::BigInt = den
        .parse()
        .map_err(|_| Error::Parse { line: 0, message: format!("bad rational `{text}`") })?;
    if d.is_zero() {
        return Err(Error::Parse { line: 0, message: format!("zero denominator in `{text}`") });
    }
    Ok(Rational::new(n, d))
}

impl SosCertificate {
    pub fn new(
        target: Polynomial,
        squares: Vec<(Rational, Polynomial)>,
        relations: Vec<Polynomial>,
        multipliers: Option<Vec<Polynomial>>,
    ) -> Result<Self> {
        if let Some((c, _)) = squares.iter().find(|(c, _)| !c.is_positive()) {
            return Err(Error::validation(format!("square weight {c} is not positive")));
        }
        if let Some(m) = &multipliers {
            if m.len() != relations.len() {
                return Err(Error::validation("one multiplier per relation required"));
            }
        }
        for p in squares.iter().map(|(_, s)| s).chain(&relations).chain(multipliers.iter().flatten()) {
            if p.vars() != target.vars() {
                return Err(Error::validation("all polynomials must share the target's variables"));
            }
        }
        Ok(Self {
            name: None,
            target,
            squares,
            relations,
            multipliers,
        })
    }

    pub fn from_file(file: &SosCertificateFile) -> Result<Self> {
        let vars: Vec<&str> = file.variables.iter().map(String::as_str).collect();
        let parse = |s: &str| Polynomial::parse(s, &vars);
        let target = parse(&file.target)?;
        let squares = file
            .squares
            .iter()
            .map(|w| Ok((parse_rational(&w.coeff)?, parse(&w.poly)?)))
            .collect::<Result<Vec<_>>>()?;
        let relations = file.relations.iter().map(|s| parse(s)).collect::<Result<Vec<_>>>()?;
        let multipliers = match &file.multipliers {
            Some(m) => Some(m.iter().map(|s| parse(s)).collect::<Result<Vec<_>>>()?),
            None => None,
        };
        let mut cert = Self::new(target, squares, relations, multipliers)?;
        cert.name = file.name.clone();
        Ok(cert)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: SosCertificateFile = serde_json::from_str(text)?;
        Self::from_file(&file)
    }

    pub fn to_file(&self) -> SosCertificateFile {
        SosCertificateFile {
            name: self.name.clone(),
            variables: self.target.vars().to_vec(),
            target: self.target.to_string(),
            squares: self
                .squares
                .iter()
                .map(|(c, s)| WeightedSquareText {
                    coeff: c.to_string(),
                    poly: s.to_string(),
                })
                .collect(),
            relations: self.relations.iter().map(ToString::to_string).collect(),
            multipliers: self
                .multipliers
                .as_ref()
                .map(|m| m.iter().map(ToString::to_string).collect()),
        }
    }

    /// `f - sum c_i S_i^2`.
    pub fn residual(&self) -> Polynomial {
        let mut r = self.target.clone();
        for (c, s) in &self.squares {
            r = &r - &(s * s).scalar_mul(c);
        }
        r
    }

    /// The certificate as a proof tree: weighted squares summed, then moved
    /// to the target modulo the relations.
    pub fn to_proof(&self) -> Result<ProofTree> {
        let vars: Vec<&str> = self.target.vars().iter().map(String::as_str).collect();
        let mut acc: Option<ProofTree> = None;
        for (c, s) in &self.squares {
            let term = ProofTree::product(ProofTree::constant(&vars, c.clone()), ProofTree::Square(s.clone()));
            acc = Some(match acc {
                None => term,
                Some(a) => ProofTree::sum(a, term),
            });
        }
        let child = acc.ok_or_else(|| Error::validation("certificate has no squares"))?;
        Ok(ProofTree::ModVariety {
            child: Box::new(child),
            target: self.target.clone(),
            relations: self.relations.clone(),
            multipliers: self.multipliers.clone(),
        })
    }
}

/// `z^6 + x^4 y^2 + x^2 y^4 - 3 x^2 y^2 z^2` as `(1/4) S1^2 + S2^2 + S3^2 +
/// S4^2 + (3/4) S5^2` modulo the sphere.
pub fn motzkin_certificate() -> SosCertificate {
    let vars = ["x", "y", "z"];
    let p = |s: &str| Polynomial::parse(s, &vars).expect("valid literal");
    let mut cert = SosCertificate::new(
        p("z^6 + x^4 y^2 + x^2 y^4 - 3 x^2 y^2 z^2"),
        vec![
            (rat(1, 4), p("x y (x^2 - y^2)")),
            (int(1), p("x^4 + y^4 - 2x^2 - 2y^2 + x^2 y^2 + 1")),
            (int(1), p("x z (x^2 + 2y^2 - 1)")),
            (int(1), p("y z (2x^2 + y^2 - 1)")),
            (rat(3, 4), p("x y (3x^2 + 3y^2 - 2)")),
        ],
        vec![Polynomial::sphere_relation(&vars)],
        None,
    )
    .expect("well-formed");
    cert.name = Some("motzkin".into());
    cert
}

/// Robinson's form with weights `(1, 3/4, 1/4, 1, 1)` modulo the sphere.
pub fn robinson_certificate() -> SosCertificate {
    let vars = ["x", "y", "z"];
    let p = |s: &str| Polynomial::parse(s, &vars).expect("valid literal");
    let mut cert = SosCertificate::new(
        p("x^6 + y^6 + z^6 - (x^4 y^2 + x^2 y^4 + y^4 z^2 + y^2 z^4 + z^4 x^2 + z^2 x^4) + 3 x^2 y^2 z^2"),
        vec![
            (int(1), p("-x^3 y + x y^3")),
            (rat(3, 4), p("-1 + 3x^2 - 2x^4 - 4x^2 y^2 + 2y^2")),
            (rat(1, 4), p("1 - x^2 - 2x^4 + 4x^2 y^2 - 4y^2 + 4y^4")),
            (int(1), p("-2x^3 z - x y^2 z + x z")),
            (int(1), p("-x^2 y z - 2y^3 z + y z")),
        ],
        vec![Polynomial::sphere_relation(&vars)],
        None,
    )
    .expect("well-formed");
    cert.name = Some("robinson".into());
    cert
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Strategy {
    ExactSphere,
    Numeric { tol: f64, samples: usize, seed: u64 },
}

impl Strategy {
    pub fn numeric_default() -> Self {
        Strategy::Numeric {
            tol: 1e-9,
            samples: 1000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CertVerdict {
    Accept,
    Reject,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SosReport {
    pub verdict: CertVerdict,
    /// "exact-sphere" or "numeric"
    pub strategy: &'static str,
    /// exact: term count of the reduced residual; numeric: points sampled
    pub residual_terms: usize,
    /// exact: largest reduced residual coefficient; numeric: max |r| over
    /// the samples
    pub residual_norm: f64,
    pub warning: Option<String>,
}

/// Checks `f - sum c_i S_i^2 == 0` on the certificate's variety.
pub fn verify_sos_certificate(cert: &SosCertificate, strategy: Strategy) -> Result<SosReport> {
    let residual = cert.residual();
    match strategy {
        Strategy::ExactSphere => {
            if let Some(a) = &cert.multipliers {
                let mut r = residual.clone();
                for (aj, gj) in a.iter().zip(&cert.relations) {
                    r = &r - &(aj * gj);
                }
                return Ok(exact_report(&r, None));
            }
            if !cert.relations.iter().any(is_sphere_relation) {
                let mut rep = verify_sos_certificate(cert, Strategy::numeric_default())?;
                rep.warning = Some("no sphere relation; fell back to numeric sampling".into());
                return Ok(rep);
            }
            let reduced = (0..residual.arity())
                .map(|v| residual.reduce_mod_sphere(v))
                .min_by_key(Polynomial::term_count)
                .unwrap_or_else(|| residual.clone());
            let extra = cert.relations.iter().any(|g| !is_sphere_relation(g));
            if !reduced.is_zero() && extra {
                let mut rep = verify_sos_certificate(cert, Strategy::numeric_default())
                    .unwrap_or_else(|e| SosReport {
                        verdict: CertVerdict::Reject,
                        strategy: "numeric",
                        residual_terms: 0,
                        residual_norm: f64::NAN,
                        warning: Some(e.to_string()),
                    });
                let note = "residual not closed by sphere reduction alone; fell back to numeric sampling";
                rep.warning = Some(match rep.warning {
                    Some(w) => format!("{note}; {w}"),
                    None => note.into(),
                });
                return Ok(rep);
            }
            Ok(exact_report(&reduced, None))
        }
        Strategy::Numeric { tol, samples, seed } => {
            if !(tol >= 0.0) {
                return Err(Error::domain("tolerance must be nonnegative"));
            }
            if cert.relations.iter().any(|g| !is_sphere_relation(g)) {
                return Err(Error::Unsupported(
                    "numeric sampling covers the unit sphere only".into(),
                ));
            }
            let n = residual.arity();
            let mut worst: f64 = 0.0;
            for pt in sphere_sample(n, samples, seed) {
                worst = worst.max(residual.eval_f64(&pt)?.abs());
            }
            Ok(SosReport {
                verdict: if worst <= tol {
                    CertVerdict::Accept
                } else {
                    CertVerdict::Reject
                },
                strategy: "numeric",
                residual_terms: samples,
                residual_norm: worst,
                warning: None,
            })
        }
    }
}

fn exact_report(r: &Polynomial, warning: Option<String>) -> SosReport {
    let norm = r
        .terms()
        .map(|(_, c)| c.abs().to_f64().unwrap_or(f64::INFINITY))
        .fold(0.0, f64::max);
    SosReport {
        verdict: if r.is_zero() {
            CertVerdict::Accept
        } else {
            CertVerdict::Reject
        },
        strategy: "exact-sphere",
        residual_terms: r.term_count(),
        residual_norm: norm,
        warning,
    }
}

/// Variable names `x1 .. xn`.
pub fn sat_variables(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

/// `f = sum_c prod_{l in c} (1 - v(l))`: 0 at satisfying ±1 points of a
/// clause, 8 at its violating point.
pub fn sat_nonneg_encoding(f: &CnfFormula) -> Polynomial {
    let names = sat_variables(f.n());
    let vars: Vec<&str> = names.iter().map(String::as_str).collect();
    let one = Polynomial::constant(&vars, Rational::one());
    let mut total = Polynomial::zero(&vars);
    for c in f.clauses() {
        let mut p = one.clone();
        for l in c.literals() {
            let x = Polynomial::var(&vars, vars[l.var]).expect("in universe");
            let factor = if l.positive { &one - &x } else { &one + &x };
            p = &p * &factor;
        }
        total = &total + &p;
    }
    total
}

pub const LAMBDA: &str = "lambda";

/// `df/dx_i - lambda x_i` for every variable, then `sum x_i^2 - 1`, in the
/// universe of `f` extended by [`LAMBDA`].
pub fn critical_point_relations(f: &Polynomial) -> Result<Vec<Polynomial>> {
    if f.vars().iter().any(|v| v == LAMBDA) {
        return Err(Error::validation(format!("`{LAMBDA}` is reserved for the multiplier")));
    }
    let base: Vec<&str> = f.vars().iter().map(String::as_str).collect();
    let mut ext = base.clone();
    ext.push(LAMBDA);
    let g = f.embed(&ext)?;
    let lambda = Polynomial::var(&ext, LAMBDA)?;
    let mut out = Vec::with_capacity(base.len() + 1);
    for (i, name) in base.iter().enumerate() {
        let xi = Polynomial::var(&ext, name)?;
        out.push(&g.derivative(i) - &(&lambda * &xi));
    }
    out.push(Polynomial::sphere_relation(&base).embed(&ext)?);
    Ok(out)
}

impl fmt::Display for SosReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:?} ({}; residual norm {:.3e})",
            self.verdict, self.strategy, self.residual_norm
        )
    }
}
