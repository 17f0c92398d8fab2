use std::collections::BTreeMap;
use std::path::Path;

use contagg::expsup::{log_grid, Kernel};
use contagg::formulation::{
    analyze_chain, fold_chain, lift_inequality, mobius_implied_inequality, mobius_sharper_inequality,
    odd_cycle_inequality, ChainClass, JoinResult, LinearInequality, Sense, SubdivisionMap,
};
use contagg::mobiusagg::{lp_sufficiency_flag, mobius_potential};
use contagg::oracles::{
    enumerate_assignments, enumerate_mobius_walks, enumerate_odd_cycles, enumerate_walks,
    finite_difference, sphere_sample, walk_total, WalkEnds,
};
use contagg::proofkernel::{verify_sos_certificate, CertVerdict, SosCertificate, Strategy};
use contagg::walkagg::{walk_potential, Derivatives, Method};
use contagg::{parse_cnf, parse_graph, CnfFormula, Complex64, Graph, InteriorPoint, Polynomial};
use serde::{Deserialize, Serialize};

use crate::args::*;
use crate::output::{emit_csv_or_json, emit_json, read_text, CliError, CliResult, Cx};

pub const SEED_ENV: &str = "CONTAGG_SEED";

pub fn resolve_seed(common: &Common) -> CliResult<u64> {
    if let Some(s) = common.seed {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{SEED_ENV}=`{v}` is not an unsigned integer"))),
        Err(_) => Ok(0),
    }
}

pub fn run(cli: &Cli) -> CliResult<()> {
    let common = &cli.common;
    match &cli.command {
        Command::MisPotential(a) => mis_potential(common, a),
        Command::SatPotential(a) => sat_potential(common, a),
        Command::VerifyCert(a) => verify_cert(common, a),
        Command::ApproxRecip(a) => approx_recip(common, a),
        Command::Oracle(o) => oracle(common, o),
        Command::LiftIneq(a) => lift_ineq(common, a),
        Command::ClassifyChain(a) => classify_chain(common, a),
    }
}

fn load_graph(p: &Path) -> CliResult<Graph> {
    Ok(parse_graph(&read_text(p)?)?)
}

fn load_formula(p: &Path) -> CliResult<CnfFormula> {
    Ok(parse_cnf(&read_text(p)?)?)
}

/// `zero`, a JSON array, or numbers separated by whitespace or commas.
fn load_point(spec: &str, n: usize) -> CliResult<Vec<f64>> {
    let coords = if spec == "zero" {
        vec![0.0; n]
    } else {
        let text = read_text(Path::new(spec))?;
        let t = text.trim();
        if t.starts_with('[') {
            serde_json::from_str::<Vec<f64>>(t).map_err(contagg::Error::from)?
        } else {
            t.split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<f64>().map_err(|_| {
                        CliError::Core(contagg::Error::Parse {
                            line: 0,
                            message: format!("{spec}: `{s}` is not a number"),
                        })
                    })
                })
                .collect::<CliResult<Vec<f64>>>()?
        }
    };
    if coords.len() != n {
        return Err(contagg::Error::Dimension {
            expected: n,
            found: coords.len(),
        }
        .into());
    }
    Ok(InteriorPoint::new(coords)?.into_vec())
}

fn cx_list(v: &[Complex64]) -> Vec<Cx> {
    v.iter().copied().map(Cx::from).collect()
}

#[derive(Serialize)]
struct MisConfig<'a> {
    graph: &'a Path,
    z: Vec<Cx>,
    w: &'a str,
    derivatives: &'static str,
    method: &'static str,
}

#[derive(Serialize)]
struct LengthRow {
    length: usize,
    psi: Cx,
    psi_sharp: Cx,
}

#[derive(Serialize)]
struct MisReport {
    z: Cx,
    n: usize,
    k_max: usize,
    method: &'static str,
    per_length: Vec<LengthRow>,
    psi: Cx,
    psi_sharp: Cx,
    #[serde(skip_serializing_if = "Option::is_none")]
    gradient: Option<Vec<Cx>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    hessian: Option<Vec<Vec<Cx>>>,
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Auto => "auto",
        Method::Direct => "direct",
        Method::Spectral => "spectral",
        Method::PatersonStockmeyer => "paterson-stockmeyer",
    }
}

fn mis_potential(common: &Common, a: &MisArgs) -> CliResult<()> {
    let g = load_graph(&a.graph)?;
    let w = load_point(&a.w, g.n())?;
    let derivs = if a.hess {
        Derivatives::Hessian
    } else if a.grad {
        Derivatives::Gradient
    } else {
        Derivatives::None
    };
    let method = match a.method {
        MethodArg::Auto => Method::Auto,
        MethodArg::Direct => Method::Direct,
        MethodArg::Spectral => Method::Spectral,
        MethodArg::Ps => Method::PatersonStockmeyer,
    };
    let mut reports = Vec::with_capacity(a.z.len());
    for &z in &a.z {
        let r = walk_potential(&g, z, &w, derivs, method)?;
        reports.push(MisReport {
            z: z.into(),
            n: r.n,
            k_max: r.k_max,
            method: method_name(r.method),
            per_length: r
                .per_length
                .iter()
                .map(|t| LengthRow {
                    length: t.length,
                    psi: t.psi.into(),
                    psi_sharp: t.psi_sharp.into(),
                })
                .collect(),
            psi: r.psi.into(),
            psi_sharp: r.psi_sharp.into(),
            // the gradient is also filled in when the Hessian was asked for
            gradient: r.gradient.as_deref().map(cx_list),
            hessian: r
                .hessian
                .as_ref()
                .map(|h| (0..h.nrows()).map(|i| (0..h.ncols()).map(|j| h[(i, j)].into()).collect()).collect()),
        });
    }
    let config = MisConfig {
        graph: &a.graph,
        z: cx_list(&a.z),
        w: &a.w,
        derivatives: match derivs {
            Derivatives::None => "none",
            Derivatives::Gradient => "gradient",
            Derivatives::Hessian => "hessian",
        },
        method: method_name(method),
    };
    emit_json(common, "mis-potential", &config, &reports)
}

#[derive(Serialize)]
struct SatConfig<'a> {
    formula: &'a Path,
    z: Vec<Cx>,
    x: &'a str,
}

#[derive(Serialize)]
struct SatPerZ {
    z: Cx,
    phi: Cx,
    per_length: Vec<Cx>,
}

#[derive(Serialize)]
struct SatReport {
    n: usize,
    m: usize,
    matrix_dims: [usize; 2],
    lp_sufficiency_flag: bool,
    potentials: Vec<SatPerZ>,
}

fn sat_potential(common: &Common, a: &SatArgs) -> CliResult<()> {
    let f = load_formula(&a.formula)?;
    let x = load_point(&a.x, f.n())?;
    let mut potentials = Vec::new();
    let mut nodes = 2 * f.n();
    for &z in &a.z {
        let r = mobius_potential(&f, z, &x)?;
        nodes = r.nodes;
        potentials.push(SatPerZ {
            z: z.into(),
            phi: r.phi.into(),
            per_length: cx_list(&r.per_length),
        });
    }
    let report = SatReport {
        n: f.n(),
        m: f.m(),
        matrix_dims: [nodes, nodes],
        lp_sufficiency_flag: lp_sufficiency_flag(&f),
        potentials,
    };
    let config = SatConfig {
        formula: &a.formula,
        z: cx_list(&a.z),
        x: &a.x,
    };
    emit_json(common, "sat-potential", &config, &report)
}

#[derive(Serialize)]
struct CertConfig<'a> {
    file: &'a Path,
    strategy: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

#[derive(Serialize)]
struct CertReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    variables: Vec<String>,
    squares: usize,
    verdict: CertVerdict,
    strategy: &'static str,
    residual_terms: usize,
    residual_norm: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    warning: Option<String>,
}

fn verify_cert(common: &Common, a: &CertArgs) -> CliResult<()> {
    let cert = SosCertificate::from_json(&read_text(&a.file)?)?;
    let (strategy, config) = match a.strategy {
        StrategyArg::Exact => (
            Strategy::ExactSphere,
            CertConfig {
                file: &a.file,
                strategy: "exact",
                tol: None,
                samples: None,
                seed: None,
            },
        ),
        StrategyArg::Numeric => {
            let seed = resolve_seed(common)?;
            (
                Strategy::Numeric {
                    tol: a.tol,
                    samples: a.samples,
                    seed,
                },
                CertConfig {
                    file: &a.file,
                    strategy: "numeric",
                    tol: Some(a.tol),
                    samples: Some(a.samples),
                    seed: Some(seed),
                },
            )
        }
    };
    let rep = verify_sos_certificate(&cert, strategy)?;
    let report = CertReport {
        name: cert.name.clone(),
        variables: cert.target.vars().to_vec(),
        squares: cert.squares.len(),
        verdict: rep.verdict,
        strategy: rep.strategy,
        residual_terms: rep.residual_terms,
        residual_norm: rep.residual_norm,
        warning: rep.warning,
    };
    emit_json(common, "verify-cert", &config, &report)?;
    match rep.verdict {
        CertVerdict::Accept => Ok(()),
        CertVerdict::Reject => Err(CliError::Rejected),
    }
}

#[derive(Serialize)]
struct RecipConfig {
    kernel: &'static str,
    a: f64,
    m: u32,
    #[serde(rename = "M")]
    big_m: u32,
    sweep: [f64; 2],
    points: usize,
}

#[derive(Serialize)]
struct RecipTerm {
    coeff: f64,
    rate: f64,
}

#[derive(Serialize)]
struct RecipRow {
    s: f64,
    approx: f64,
    exact: f64,
    rel_err: f64,
}

#[derive(Serialize)]
struct RecipReport {
    terms: Vec<RecipTerm>,
    max_rel_err: f64,
    rows: Vec<RecipRow>,
}

fn approx_recip(common: &Common, a: &RecipArgs) -> CliResult<()> {
    let kernel = match a.kernel {
        KernelArg::Recip => Kernel::Reciprocal,
        KernelArg::Recip2 => Kernel::ReciprocalSquare,
    };
    if a.points < 2 {
        return Err(CliError::Usage("--points must be at least 2".into()));
    }
    let sup = kernel.superposition(a.a, a.m, a.big_m)?;
    let rows: Vec<RecipRow> = log_grid(a.sweep.0, a.sweep.1, a.points)
        .into_iter()
        .map(|s| {
            let approx = sup.evaluate(s).re;
            let exact = kernel.eval(s);
            RecipRow {
                s,
                approx,
                exact,
                rel_err: (approx - exact).abs() / exact,
            }
        })
        .collect();
    let report = RecipReport {
        terms: sup
            .terms()
            .iter()
            .map(|t| RecipTerm {
                coeff: t.coeff.re,
                rate: t.rate.re,
            })
            .collect(),
        max_rel_err: rows.iter().map(|r| r.rel_err).fold(0.0, f64::max),
        rows,
    };
    let config = RecipConfig {
        kernel: match a.kernel {
            KernelArg::Recip => "1/s",
            KernelArg::Recip2 => "1/s^2",
        },
        a: a.a,
        m: a.m,
        big_m: a.big_m,
        sweep: [a.sweep.0, a.sweep.1],
        points: a.points,
    };
    let table: Vec<Vec<f64>> = report.rows.iter().map(|r| vec![r.s, r.approx, r.exact, r.rel_err]).collect();
    emit_csv_or_json(
        common,
        "approx-recip",
        &config,
        &report,
        &[
            format!("terms {}", report.terms.len()),
            format!("max_rel_err {:e}", report.max_rel_err),
        ],
        &["s", "approx", "exact", "rel_err"],
        &table,
    )
}

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|i| i + 1).collect()
}

fn oracle(common: &Common, cmd: &OracleCommand) -> CliResult<()> {
    match cmd {
        OracleCommand::Walks(a) => {
            #[derive(Serialize)]
            struct Walk {
                vertices: Vec<usize>,
                value: Cx,
            }
            #[derive(Serialize)]
            struct Report {
                count: usize,
                total: Cx,
                #[serde(skip_serializing_if = "Option::is_none")]
                walks: Option<Vec<Walk>>,
            }
            let g = load_graph(&a.graph)?;
            let w = load_point(&a.w, g.n())?;
            let ends = match a.pair {
                Some((i, j)) => WalkEnds::Pair(i, j),
                None => WalkEnds::Closed,
            };
            let recs = enumerate_walks(&g, a.z, &w, a.length, ends)?;
            let report = Report {
                count: recs.len(),
                total: walk_total(&recs).into(),
                walks: a.list.then(|| {
                    recs.iter()
                        .map(|r| Walk {
                            vertices: one_based(&r.vertices),
                            value: r.value.into(),
                        })
                        .collect()
                }),
            };
            let config = serde_json::json!({
                "graph": a.graph, "z": Cx::from(a.z), "w": a.w, "length": a.length,
                "pair": a.pair.map(|(i, j)| [i + 1, j + 1]).map_or(serde_json::Value::from("closed"), |p| p.into()),
            });
            emit_json(common, "oracle walks", &config, &report)
        }
        OracleCommand::Cycles(a) => {
            let g = load_graph(&a.graph)?;
            let max_len = a.max_len.unwrap_or(g.n());
            let cycles: Vec<Vec<usize>> = enumerate_odd_cycles(&g, max_len)?.iter().map(|c| one_based(c)).collect();
            let config = serde_json::json!({ "graph": a.graph, "max_len": max_len });
            emit_json(common, "oracle cycles", &config, &serde_json::json!({ "count": cycles.len(), "cycles": cycles }))
        }
        OracleCommand::MobiusWalks(a) => {
            let f = load_formula(&a.formula)?;
            let x = load_point(&a.x, f.n())?;
            let k_max = a.k_max.unwrap_or(f.m());
            let r = enumerate_mobius_walks(&f, a.z, &x, k_max)?;
            let config = serde_json::json!({ "formula": a.formula, "z": Cx::from(a.z), "x": a.x, "k_max": k_max });
            let report = serde_json::json!({
                "phi": Cx::from(r.phi),
                "distinct_chain_sum": Cx::from(r.distinct_chain_sum),
                "walks": r.walks,
            });
            emit_json(common, "oracle mobius-walks", &config, &report)
        }
        OracleCommand::Assignments(a) => {
            let f = load_formula(&a.formula)?;
            let s = enumerate_assignments(&f)?;
            let config = serde_json::json!({ "formula": a.formula });
            let report = serde_json::json!({
                "satisfiable": s.satisfiable,
                "min_f": s.min_f,
                "min_unsatisfied": (s.min_f / 8.0).round() as usize,
                "argmin": s.argmin,
            });
            emit_json(common, "oracle assignments", &config, &report)
        }
        OracleCommand::SphereSample(a) => {
            let seed = resolve_seed(common)?;
            let pts = sphere_sample(a.n, a.count, seed);
            let config = serde_json::json!({ "n": a.n, "count": a.count, "seed": seed });
            emit_json(common, "oracle sphere-sample", &config, &pts)
        }
        OracleCommand::FiniteDifference(a) => {
            let p = Polynomial::parse(&a.poly, &[a.var.as_str()])?;
            if !(a.h > 0.0) {
                return Err(contagg::Error::Domain("step h must be positive".into()).into());
            }
            let value = finite_difference(|t| p.eval_f64(&[t]).expect("univariate"), a.at, a.h, a.order)?;
            let config = serde_json::json!({ "poly": a.poly, "var": a.var, "at": a.at, "h": a.h, "order": a.order });
            emit_json(common, "oracle finite-difference", &config, &serde_json::json!({ "value": value }))
        }
    }
}

/// Inequality as read and written by the CLI: 1-based keys.
#[derive(Debug, Serialize, Deserialize)]
struct IneqRecord {
    coeffs: BTreeMap<usize, f64>,
    rhs: f64,
    sense: Sense,
    #[serde(skip_deserializing, skip_serializing_if = "String::is_empty", default)]
    text: String,
}

impl IneqRecord {
    fn from_core(q: &LinearInequality) -> Self {
        Self {
            coeffs: q.coeffs.iter().map(|(&i, &c)| (i + 1, c)).collect(),
            rhs: q.rhs,
            sense: q.sense,
            text: q.to_string(),
        }
    }

    fn to_core(&self) -> CliResult<LinearInequality> {
        if self.coeffs.contains_key(&0) {
            return Err(CliError::Core(contagg::Error::Validation("inequality indices are 1-based".into())));
        }
        Ok(LinearInequality::new(
            self.coeffs.iter().map(|(&i, &c)| (i - 1, c)).collect(),
            self.rhs,
            self.sense,
        )?)
    }
}

fn lift_ineq(common: &Common, a: &LiftArgs) -> CliResult<()> {
    let base = load_graph(&a.graph)?;
    let base_ineq = match (&a.cycle, &a.ineq) {
        (Some(c), None) => odd_cycle_inequality(&base, &c.0)?,
        (None, Some(p)) => {
            let rec: IneqRecord = serde_json::from_str(&read_text(p)?).map_err(contagg::Error::from)?;
            rec.to_core()?
        }
        _ => return Err(CliError::Usage("give exactly one of --cycle or --ineq".into())),
    };
    let lengths: Vec<((usize, usize), usize)> = a.subdivide.iter().flat_map(|s| s.0.iter().copied()).collect();
    let map = SubdivisionMap::new(&base, lengths.iter().copied())?;
    let lifted = lift_inequality(&base_ineq, &map)?;
    let mut config = serde_json::json!({
        "graph": a.graph,
        "subdivide": lengths.iter().map(|((x, y), l)| format!("{}-{}:{}", x + 1, y + 1, l)).collect::<Vec<_>>(),
    });
    if let Some(c) = &a.cycle {
        config["cycle"] = one_based(&c.0).into();
    }
    if let Some(p) = &a.ineq {
        config["ineq"] = p.display().to_string().into();
    }
    let report = serde_json::json!({
        "base": IneqRecord::from_core(&base_ineq),
        "lifted": IneqRecord::from_core(&lifted),
        "subdivided": {
            "n": map.graph().n(),
            "edges": map.graph().edges().map(|(x, y)| [x + 1, y + 1]).collect::<Vec<_>>(),
        },
    });
    emit_json(common, "lift-ineq", &config, &report)
}

fn classify_chain(common: &Common, a: &ChainArgs) -> CliResult<()> {
    let f = load_formula(&a.formula)?;
    let chain = f.clauses();
    let info = analyze_chain(chain);
    let mut report = serde_json::json!({
        "class": info.class,
        "clauses": chain.len(),
    });
    if info.class != ChainClass::Invalid {
        report["k"] = info.k().into();
        report["literals"] = info.literals.iter().map(|l| l.to_dimacs()).collect::<Vec<_>>().into();
        report["pivots"] = info.pivots.iter().map(|v| v + 1).collect::<Vec<_>>().into();
        report["fold"] = match fold_chain(chain)? {
            JoinResult::Tautology => "tautology".into(),
            JoinResult::Clause(lits) => lits.iter().map(|l| l.to_dimacs()).collect::<Vec<_>>().into(),
        };
    }
    if info.class == ChainClass::MobiusCycle {
        report["sharper"] = serde_json::to_value(IneqRecord::from_core(&mobius_sharper_inequality(chain)?))
            .map_err(contagg::Error::from)?;
        report["implied"] = serde_json::to_value(IneqRecord::from_core(&mobius_implied_inequality(chain)?))
            .map_err(contagg::Error::from)?;
    }
    let config = serde_json::json!({ "formula": a.formula });
    emit_json(common, "classify-chain", &config, &report)
}
