//! Acceptance run: one line per criterion.
//!
//! Runs without the libtest harness. Exits nonzero if any criterion fails
//! unless it is listed in `KNOWN_FAILURES`; known failures still print FAIL
//! together with the measured numbers.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use contagg::expsup::{log_grid, max_rel_error, reciprocal_superposition, Kernel};
use contagg::formulation::{edge_inequalities, lift_inequality, odd_cycle_inequality, SubdivisionMap};
use contagg::jproduct::{contract, join, tensor_product, transpose, Tensor};
use contagg::linalg::{random_cmatrix, rng, CMatrix};
use contagg::mobiusagg::mobius_potential;
use contagg::oracles::{
    cycle_kernel_sum, enumerate_assignments, enumerate_mobius_walks, enumerate_odd_cycles,
    enumerate_walks, gradient_fd, has_mobius_chain, hessian_fd, random_formula, random_graph,
    walk_total, WalkEnds,
};
use contagg::polyalg::{rat, Polynomial, Rational};
use contagg::proofkernel::{
    motzkin_certificate, robinson_certificate, sat_nonneg_encoding, verify_sos_certificate,
    CertVerdict, SosCertificate, Strategy,
};
use contagg::walkagg::{closed_walks, walk_potential, walk_sum_pair, Derivatives, Method};
use contagg::{parse_cnf, Clause, CnfFormula, Complex64, Graph};
use rand::Rng;

/// Criteria expected to fail; see the project notes.
const KNOWN_FAILURES: &[u32] = &[8];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Strictly interior point of the edge relaxation, `w in (-1, 0)`.
fn seeded_w(n: usize, seed: u64) -> Vec<f64> {
    let mut r = rng(seed);
    (0..n).map(|_| r.random_range(-0.9..-0.1)).collect()
}

fn certificate_check(cert: &SosCertificate, numeric_tol: f64) -> Outcome {
    let t = Instant::now();
    let exact = verify_sos_certificate(cert, Strategy::ExactSphere).expect("exact check runs");
    let numeric = verify_sos_certificate(
        cert,
        Strategy::Numeric {
            tol: numeric_tol,
            samples: 1000,
            seed: 11,
        },
    )
    .expect("numeric check runs");
    let el = t.elapsed();
    let pass = exact.verdict == CertVerdict::Accept
        && exact.residual_terms == 0
        && exact.warning.is_none()
        && numeric.verdict == CertVerdict::Accept
        && el < Duration::from_secs(1);
    outcome(
        pass,
        format!(
            "reduced residual terms {}, numeric max |r| {:.2e}, {:.0} ms",
            exact.residual_terms,
            numeric.residual_norm,
            el.as_secs_f64() * 1e3
        ),
    )
}

fn criterion_1() -> Outcome {
    certificate_check(&motzkin_certificate(), 1e-12)
}

fn criterion_2() -> Outcome {
    certificate_check(&robinson_certificate(), 1e-12)
}

/// Five weight mutations plus one coefficient of each square.
fn mutations(cert: &SosCertificate) -> Vec<SosCertificate> {
    let bump = rat(1, 10);
    let mut out = Vec::new();
    for i in 0..cert.squares.len() {
        let mut m = cert.clone();
        m.squares[i].0 = &m.squares[i].0 + &bump;
        out.push(m);
    }
    let vars: Vec<&str> = cert.target.vars().iter().map(String::as_str).collect();
    for i in 0..cert.squares.len() {
        let mut m = cert.clone();
        let s = &m.squares[i].1;
        let (exps, _) = s.terms().next().expect("nonzero square");
        let delta = Polynomial::from_terms(&vars, [(bump.clone(), exps.clone())]).unwrap();
        m.squares[i].1 = s + &delta;
        out.push(m);
    }
    out
}

fn criterion_3() -> Outcome {
    let mut rejected = 0;
    let mut total = 0;
    for cert in [motzkin_certificate(), robinson_certificate()] {
        for m in mutations(&cert) {
            total += 1;
            let v = verify_sos_certificate(&m, Strategy::ExactSphere).unwrap();
            if v.verdict == CertVerdict::Reject {
                rejected += 1;
            }
        }
    }
    outcome(total == 20 && rejected == total, format!("{rejected}/{total} mutations rejected"))
}

fn mis_graphs() -> Vec<(String, Graph)> {
    let mut gs = vec![
        ("C3".to_string(), Graph::cycle(3)),
        ("C5".to_string(), Graph::cycle(5)),
        ("C7".to_string(), Graph::cycle(7)),
        ("Petersen".to_string(), Graph::petersen()),
    ];
    for seed in 0..5 {
        gs.push((format!("G(8,0.4)#{seed}"), random_graph(8, 0.4, 100 + seed)));
    }
    gs
}

fn criterion_4() -> Outcome {
    let t = Instant::now();
    let zs = [c(0.0, 0.0), c(1.0, 0.0), c(0.5, 1.3)];
    let mut worst: f64 = 0.0;
    let mut checks = 0;
    for (_, g) in mis_graphs() {
        for ws in 0..3 {
            let w = seeded_w(g.n(), 7 + ws);
            for &z in &zs {
                for l in 1..=7 {
                    let oracle = walk_total(&enumerate_walks(&g, z, &w, l, WalkEnds::Closed).unwrap())
                        / (2.0 * l as f64);
                    let got = if l >= 3 {
                        closed_walks(&g, z, &w, l).unwrap()
                    } else {
                        (0..g.n())
                            .map(|i| walk_sum_pair(&g, z, &w, l, i, i).unwrap())
                            .sum::<Complex64>()
                            / (2.0 * l as f64)
                    };
                    worst = worst.max(rel(got, oracle));
                    checks += 1;
                }
            }
        }
    }
    let el = t.elapsed();
    outcome(
        worst <= 1e-10 && el < Duration::from_secs(30),
        format!("{checks} checks, max rel err {worst:.2e}, {:.2} s", el.as_secs_f64()),
    )
}

fn criterion_5() -> Outcome {
    let mut worst_cycle: f64 = 0.0;
    let mut worst_sharp: f64 = 0.0;
    for k in 1..=3 {
        let n = 2 * k + 1;
        let g = Graph::cycle(n);
        for (i, z) in [c(0.5, 0.0), c(1.0, 0.0), c(0.5, 1.3)].into_iter().enumerate() {
            let w = seeded_w(n, 40 + i as u64);
            let rep = walk_potential(&g, z, &w, Derivatives::None, Method::Auto).unwrap();
            let term = rep.per_length.iter().find(|t| t.length == n).expect("top length present");
            // slack of the implied inequality sum w <= 0
            let s: f64 = -w.iter().sum::<f64>();
            let kernel = (-z * s).exp();
            let oracle = cycle_kernel_sum(&g, z, &w, n).unwrap();
            worst_cycle = worst_cycle.max(rel(term.psi, kernel)).max(rel(oracle, kernel));
            worst_sharp = worst_sharp.max(rel(term.psi_sharp, z.exp() * term.psi));
        }
    }
    outcome(
        worst_cycle <= 1e-12 && worst_sharp <= 1e-12,
        format!("psi_l vs e^(-zs) {worst_cycle:.2e}, psi~_l vs e^z psi_l {worst_sharp:.2e}"),
    )
}

fn criterion_6() -> Outcome {
    let instances = [
        (random_graph(7, 0.5, 1), c(0.8, 0.0)),
        (Graph::cycle(5), c(0.5, 1.3)),
        (Graph::petersen(), c(1.0, 0.0)),
        (random_graph(9, 0.4, 2), c(0.3, -0.7)),
        (random_graph(6, 0.7, 3), c(1.2, 0.4)),
    ];
    let h = 1e-5;
    let mut worst_g: f64 = 0.0;
    let mut worst_h: f64 = 0.0;
    for (seed, (g, z)) in instances.iter().enumerate() {
        let w = seeded_w(g.n(), 60 + seed as u64);
        let rep = walk_potential(g, *z, &w, Derivatives::Hessian, Method::Auto).unwrap();
        let f = |x: &[f64]| {
            walk_potential(g, *z, x, Derivatives::None, Method::Auto)
                .unwrap()
                .psi_sharp
        };
        let fd_g = gradient_fd(f, &w, h);
        let an_g = rep.gradient.unwrap();
        let gnorm = an_g.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        let gdiff = an_g.iter().zip(&fd_g).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        worst_g = worst_g.max(gdiff / gnorm);
        let fd_h = hessian_fd(f, &w, h);
        let an_h = rep.hessian.unwrap();
        let n = g.n();
        let hnorm = an_h.norm();
        let hdiff = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| (an_h[(i, j)] - fd_h[i][j]).norm_sqr())
            .sum::<f64>()
            .sqrt();
        worst_h = worst_h.max(hdiff / hnorm);
    }
    outcome(
        worst_g <= 1e-5 && worst_h <= 1e-5,
        format!("gradient rel err {worst_g:.2e}, Hessian rel err {worst_h:.2e}"),
    )
}

fn mat(r: &str, c: &str, m: &CMatrix) -> Tensor {
    Tensor::matrix(r, c, m).unwrap()
}

/// Axis names, sizes and family flags. The variance recorded on a family
/// axis depends on which operand it was taken from, so it is left out.
fn layout(t: &Tensor) -> Vec<(String, usize, bool)> {
    t.axes().iter().map(|a| (a.name.clone(), a.dim, a.family)).collect()
}

fn criterion_7() -> Outcome {
    let mut r = rng(77);
    let tol = 1e-10;
    let mut fails: BTreeMap<&str, usize> = BTreeMap::new();
    let mut note = |law: &'static str, ok: bool| {
        if !ok {
            *fails.entry(law).or_default() += 1;
        }
    };
    for _ in 0..100 {
        let (p, q, rr, s) = (
            r.random_range(1..5),
            r.random_range(1..5),
            r.random_range(1..5),
            r.random_range(1..5),
        );
        let a0 = random_cmatrix(p, q, &mut r);
        let a1 = random_cmatrix(p, q, &mut r);
        let b0 = random_cmatrix(q, rr, &mut r);
        let b1 = random_cmatrix(q, rr, &mut r);
        let cm = random_cmatrix(rr, s, &mut r);
        let alpha = c(r.random_range(-2.0..2.0), r.random_range(-2.0..2.0));
        let beta = c(r.random_range(-2.0..2.0), r.random_range(-2.0..2.0));
        let (ta, ta1, tb, tb1, tc) = (
            mat("p", "q", &a0),
            mat("p", "q", &a1),
            mat("q", "r", &b0),
            mat("q", "r", &b1),
            mat("r", "s", &cm),
        );
        let j = |x: &Tensor, y: &Tensor| join(x, y, &["q"]).unwrap();
        let scale = j(&ta, &tb).max_abs().max(1.0);

        // bilinearity in each slot
        let lhs = j(&ta.scale(alpha).add(&ta1.scale(beta)).unwrap(), &tb);
        let rhs = j(&ta, &tb).scale(alpha).add(&j(&ta1, &tb).scale(beta)).unwrap();
        let left_ok = lhs.max_abs_diff(&rhs) <= tol * scale.max(lhs.max_abs());
        let lhs = j(&ta, &tb.scale(alpha).add(&tb1.scale(beta)).unwrap());
        let rhs = j(&ta, &tb).scale(alpha).add(&j(&ta, &tb1).scale(beta)).unwrap();
        note("bilinearity", left_ok && lhs.max_abs_diff(&rhs) <= tol * scale.max(lhs.max_abs()));

        // associativity
        let l = join(&j(&ta, &tb), &tc, &["r"]).unwrap();
        let rgt = join(&ta, &join(&tb, &tc, &["r"]).unwrap(), &["q"]).unwrap();
        note(
            "associativity",
            l.axes() == rgt.axes() && l.max_abs_diff(&rgt) <= tol * l.max_abs().max(1.0),
        );

        // contraction of the join is the ordinary product
        let prod = contract(&j(&ta, &tb)).to_matrix().unwrap();
        let want = &a0 * &b0;
        note(
            "contraction",
            (prod - &want).norm() <= tol * want.norm().max(1.0),
        );

        // rank law
        let fam = j(&ta, &tb);
        let tp = tensor_product(&ta, &tb, &["q"]).unwrap();
        note(
            "rank law",
            tp.rank() == ta.rank() + tb.rank() - 2 && fam.rank() + fam.family_rank() == ta.rank() + tb.rank() - 1,
        );

        // derivative rule along A(t) = a0 + t a1, B(t) = b0 + t b1
        let t0 = r.random_range(-1.0..1.0);
        let at = |t: f64| ta.add(&ta1.scale(c(t, 0.0))).unwrap();
        let bt = |t: f64| tb.add(&tb1.scale(c(t, 0.0))).unwrap();
        // bilinear in t, so the unit-step central difference is exact
        let numeric = j(&at(t0 + 1.0), &bt(t0 + 1.0))
            .add(&j(&at(t0 - 1.0), &bt(t0 - 1.0)).scale(c(-1.0, 0.0)))
            .unwrap()
            .scale(c(0.5, 0.0));
        let rule = j(&ta1, &bt(t0)).add(&j(&at(t0), &tb1)).unwrap();
        note(
            "derivative rule",
            numeric.max_abs_diff(&rule) <= tol * rule.max_abs().max(1.0) * 10.0,
        );

        // reversal: (A J B J C)^T = C^T J B^T J A^T
        let abc = join(&j(&ta, &tb), &tc, &["r"]).unwrap();
        let rev = join(
            &join(&transpose(&tc), &transpose(&tb), &["r"]).unwrap(),
            &transpose(&ta),
            &["q"],
        )
        .unwrap();
        let tabc = transpose(&abc);
        note(
            "triple transpose",
            layout(&tabc) == layout(&rev) && tabc.max_abs_diff(&rev) <= tol * tabc.max_abs().max(1.0),
        );
    }
    let detail = if fails.is_empty() {
        "6 laws x 100 trials".to_string()
    } else {
        format!("failures: {fails:?}")
    };
    outcome(fails.is_empty(), detail)
}

fn criterion_8() -> Outcome {
    let a = 0.5;
    let sup = reciprocal_superposition(a, 2, 60).unwrap();
    let grid = log_grid((-30f64).exp(), 1f64.exp(), 200);
    let err = max_rel_error(&sup, Kernel::Reciprocal, &grid);
    let mut shift: f64 = 0.0;
    let shifted = reciprocal_superposition(a, 3, 59).unwrap();
    for &s in &grid {
        let lhs = sup.evaluate(a.exp() * s);
        let rhs = shifted.evaluate(s) * (-a).exp();
        shift = shift.max((lhs - rhs).norm() / rhs.norm());
    }
    outcome(
        sup.len() == 63 && err <= 1e-6 && shift <= 1e-14,
        format!(
            "{} terms, max rel err {err:.3e} (bound 1e-6), shift identity {shift:.1e}",
            sup.len()
        ),
    )
}

fn mobius_free_formula() -> CnfFormula {
    // all-positive clauses: every implication edge enters a positive literal
    parse_cnf("p cnf 5 4\n1 2 3 0\n2 4 5 0\n1 3 5 0\n3 4 5 0\n").unwrap()
}

fn criterion_9() -> Outcome {
    let mut formulas: Vec<CnfFormula> = (0..9)
        .map(|s| random_formula(3 + (s as usize % 4), 3 + (s as usize % 6), 900 + s))
        .collect();
    formulas.push(mobius_free_formula());
    let mut worst: f64 = 0.0;
    let mut zero_ok = false;
    for (i, f) in formulas.iter().enumerate() {
        let mut r = rng(300 + i as u64);
        let x: Vec<f64> = (0..f.n()).map(|_| r.random_range(-0.3..0.3)).collect();
        let z = c(0.7, 0.4);
        let rep = mobius_potential(f, z, &x).unwrap();
        let oracle = enumerate_mobius_walks(f, z, &x, f.m()).unwrap();
        worst = worst.max(rel(rep.phi, oracle.phi));
        if rep.phi == Complex64::new(0.0, 0.0)
            && oracle.walks == 0
            && !has_mobius_chain(f, f.m()).unwrap()
        {
            zero_ok = true;
        }
    }
    outcome(
        worst <= 1e-10 && zero_ok,
        format!("max rel err {worst:.2e}, mobius-free zero case confirmed: {zero_ok}"),
    )
}

fn criterion_10() -> Outcome {
    let mut table_ok = true;
    for signs in 0..8u32 {
        let lits: Vec<i64> = (0..3).map(|k| if signs >> k & 1 == 1 { -(k + 1) } else { k + 1 }).collect();
        let clause = Clause::from_dimacs([lits[0], lits[1], lits[2]]).unwrap();
        let f = CnfFormula::new(3, vec![clause]).unwrap();
        let poly = sat_nonneg_encoding(&f);
        let mut zeros = 0;
        for mask in 0..8u32 {
            let a: Vec<i8> = (0..3).map(|k| if mask >> k & 1 == 1 { -1 } else { 1 }).collect();
            let x: Vec<Rational> = a.iter().map(|&v| Rational::from_integer(v.into())).collect();
            let v = poly.eval_rational(&x).unwrap();
            let sat = clause.is_satisfied(&a);
            if sat && v == Rational::from_integer(0.into()) {
                zeros += 1;
            } else if sat || v != Rational::from_integer(8.into()) {
                table_ok = false;
            }
        }
        table_ok &= zeros == 7;
    }
    let mut scan_ok = true;
    for seed in 0..5 {
        let n = 8 + seed as usize;
        let f = random_formula(n, 5 * n, 500 + seed);
        let scan = enumerate_assignments(&f).unwrap();
        let min_unsat = (0u32..1 << n)
            .map(|mask| {
                let a: Vec<i8> = (0..n).map(|k| if mask >> k & 1 == 1 { -1 } else { 1 }).collect();
                f.unsatisfied_count(&a)
            })
            .min()
            .unwrap();
        scan_ok &= scan.min_f == 8.0 * min_unsat as f64 && scan.satisfiable == (min_unsat == 0);
    }
    outcome(
        table_ok && scan_ok,
        format!("case table {}, assignment scans {}", ok(table_ok), ok(scan_ok)),
    )
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "mismatch"
    }
}

/// Every independent set of `g` as a ±1 vector.
fn independent_sets(g: &Graph) -> Vec<Vec<f64>> {
    let n = g.n();
    let edges: Vec<(usize, usize)> = g.edges().collect();
    (0u32..1 << n)
        .filter(|mask| edges.iter().all(|&(a, b)| mask >> a & 1 == 0 || mask >> b & 1 == 0))
        .map(|mask| (0..n).map(|k| if mask >> k & 1 == 1 { 1.0 } else { -1.0 }).collect())
        .collect()
}

fn criterion_11() -> Outcome {
    let tri = Graph::complete(3);
    let map = SubdivisionMap::new(&tri, [((1, 2), 3)]).unwrap();
    let lifted = lift_inequality(&odd_cycle_inequality(&tri, &[0, 1, 2]).unwrap(), &map).unwrap();
    let inner = map.interior(1, 2).unwrap();
    let c5_cycle = [0, 1, inner[0], inner[1], 2];
    let c5 = odd_cycle_inequality(map.graph(), &c5_cycle).unwrap();
    let c5_ok = map.graph().edge_count() == 5 && lifted == c5;

    let mut sets_ok = true;
    let mut checked = 0;
    for seed in 0..5u64 {
        let mut r = rng(1100 + seed);
        let base = loop {
            let g = random_graph(6, 0.5, 1200 + seed * 31 + r.random_range(0..1000));
            if !enumerate_odd_cycles(&g, 5).unwrap().is_empty() {
                break g;
            }
        };
        let edges: Vec<(usize, usize)> = base.edges().collect();
        let mut budget = 12 - base.n();
        let mut lengths = Vec::new();
        for &e in &edges {
            if budget >= 2 && r.random::<bool>() {
                lengths.push((e, 3));
                budget -= 2;
            }
        }
        let map = SubdivisionMap::new(&base, lengths).unwrap();
        let mut ineqs = edge_inequalities(&base, false);
        for cyc in enumerate_odd_cycles(&base, base.n()).unwrap() {
            ineqs.push(odd_cycle_inequality(&base, &cyc).unwrap());
        }
        let lifted: Vec<_> = ineqs.iter().map(|q| lift_inequality(q, &map).unwrap()).collect();
        let sets = independent_sets(map.graph());
        for q in &lifted {
            for x in &sets {
                checked += 1;
                if !q.holds(x, 1e-12) {
                    sets_ok = false;
                }
            }
        }
    }
    outcome(
        c5_ok && sets_ok,
        format!("triangle lifts to C5: {}, {checked} (inequality, set) pairs: {}", ok(c5_ok), ok(sets_ok)),
    )
}

fn criterion_12() -> Outcome {
    let sizes = [125usize, 250, 500];
    let mut times = Vec::new();
    for &n in &sizes {
        let g = random_graph(n, 8.0 / n as f64, 1300 + n as u64);
        let w = vec![-0.5; n];
        // z = 3 keeps the largest eigenvalue of A near 2, so A^n stays finite
        let best = (0..2)
            .map(|_| {
                let t = Instant::now();
                let rep = walk_potential(&g, c(3.0, 0.0), &w, Derivatives::Gradient, Method::Auto).unwrap();
                assert!(rep.psi_sharp.is_finite());
                t.elapsed().as_secs_f64()
            })
            .fold(f64::INFINITY, f64::min);
        times.push(best);
    }
    // least-squares slope of log t against log n
    let xs: Vec<f64> = sizes.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = times.iter().map(|t| t.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / 3.0, ys.iter().sum::<f64>() / 3.0);
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    outcome(
        slope <= 3.5 && times[2] < 60.0,
        format!(
            "t(125, 250, 500) = {:.3}, {:.3}, {:.3} s, fitted exponent {slope:.2}",
            times[0], times[1], times[2]
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, fn() -> Outcome); 12] = [
        (1, "Motzkin certificate", criterion_1),
        (2, "Robinson certificate", criterion_2),
        (3, "mutation rejection", criterion_3),
        (4, "MIS walk identity", criterion_4),
        (5, "cycle specialization", criterion_5),
        (6, "derivatives vs finite differences", criterion_6),
        (7, "join-product laws", criterion_7),
        (8, "quadrature", criterion_8),
        (9, "SAT potential vs mobius walks", criterion_9),
        (10, "clause polynomial", criterion_10),
        (11, "subdivision lifting", criterion_11),
        (12, "scaling", criterion_12),
    ];
    let mut unexpected = Vec::new();
    for (id, name, run) in criteria {
        let o = run();
        let known = KNOWN_FAILURES.contains(&id);
        let tag = match (o.pass, known) {
            (true, false) => "PASS",
            (true, true) => "PASS (listed as known failure)",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        println!("criterion {id:>2} {tag}: {name}: {}", o.detail);
        if !o.pass && !known {
            unexpected.push(id);
        }
    }
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected failures: {unexpected:?}");
        ExitCode::FAILURE
    }
}
