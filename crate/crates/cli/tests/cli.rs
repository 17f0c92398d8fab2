use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_contagg"))
        .args(args)
        .env_remove("CONTAGG_SEED")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn motzkin_certificate_is_accepted() {
    let out = run(&["--no-timestamp", "verify-cert", path(&data("motzkin.json"))]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["verdict"], "Accept");
    assert_eq!(v["result"]["residual_terms"], 0);
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert!(v.get("timestamp").is_none());
}

#[test]
fn perturbed_certificate_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(data("robinson.json")).unwrap().replacen("\"3/4\"", "\"17/20\"", 1);
    let p = dir.path().join("bad.json");
    fs::write(&p, text).unwrap();
    for strategy in ["exact", "numeric"] {
        let out = run(&["--no-timestamp", "verify-cert", path(&p), "--strategy", strategy]);
        assert_eq!(out.status.code(), Some(1), "{strategy}");
        assert_eq!(json(&out)["result"]["verdict"], "Reject");
    }
}

#[test]
fn c5_sharper_potential_is_e() {
    let out = run(&["--no-timestamp", "mis-potential", path(&data("c5.dimacs")), "--z", "1,0", "--w", "zero"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let r = &v["result"][0];
    assert!((r["psi"]["re"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((r["psi_sharp"]["re"].as_f64().unwrap() - 1f64.exp()).abs() < 1e-12);
    assert_eq!(r["psi_sharp"]["im"].as_f64().unwrap(), 0.0);
}

#[test]
fn gradient_and_hessian_are_reported() {
    let out = run(&[
        "--no-timestamp", "mis-potential", path(&data("c5.dimacs")), "--z", "0.5,1.3", "--z", "1",
        "--w", path(&data("w5.txt")), "--hess",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"].as_array().unwrap().len(), 2);
    assert_eq!(v["result"][0]["gradient"].as_array().unwrap().len(), 5);
    assert_eq!(v["result"][1]["hessian"].as_array().unwrap().len(), 5);
}

#[test]
fn sixty_three_term_csv() {
    let out = run(&["--no-timestamp", "approx-recip", "--a", "0.5", "--m", "2", "--M", "60"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l == "# terms 63"));
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "s,approx,exact,rel_err");
    assert_eq!(rows.len(), 201);
    let first: Vec<f64> = rows[1].split(',').map(|c| c.parse().unwrap()).collect();
    assert!((first[0] - (-30f64).exp()).abs() < 1e-25);
}

#[test]
fn json_out_file_and_byte_identical_reruns() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let out = run(&[
            "--no-timestamp", "--seed", "7", "--out", path(p), "verify-cert", path(&data("motzkin.json")),
            "--strategy", "numeric",
        ]);
        assert_eq!(out.status.code(), Some(0));
        assert!(out.stdout.is_empty());
    }
    let (ta, tb) = (fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let v: Value = serde_json::from_slice(&ta).unwrap();
    assert_eq!(v["config"]["seed"], 7);
}

#[test]
fn seed_comes_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_contagg"))
        .args(["--no-timestamp", "oracle", "sphere-sample", "--n", "3", "--count", "2"])
        .env("CONTAGG_SEED", "42")
        .output()
        .unwrap();
    assert_eq!(json(&out)["config"]["seed"], 42);
    let flag = run(&["--no-timestamp", "--seed", "42", "oracle", "sphere-sample", "--n", "3", "--count", "2"]);
    assert_eq!(out.stdout, flag.stdout);
    let other = run(&["--no-timestamp", "oracle", "sphere-sample", "--n", "3", "--count", "2"]);
    assert_ne!(out.stdout, other.stdout);
}

#[test]
fn timestamp_present_by_default() {
    let out = run(&["classify-chain", path(&data("mobius2.cnf"))]);
    assert!(json(&out)["timestamp"].as_u64().is_some());
}

#[test]
fn sat_potential_report() {
    let out = run(&["--no-timestamp", "sat-potential", path(&data("mobius2.cnf")), "--z", "0.5,0", "--x", "zero"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["matrix_dims"], serde_json::json!([8, 8]));
    assert_eq!(v["result"]["lp_sufficiency_flag"], false);
    let phi = v["result"]["potentials"][0]["phi"]["re"].as_f64().unwrap();
    let oracle = run(&["--no-timestamp", "oracle", "mobius-walks", path(&data("mobius2.cnf")), "--z", "0.5"]);
    let want = json(&oracle)["result"]["phi"]["re"].as_f64().unwrap();
    assert!((phi - want).abs() <= 1e-12 * want.abs());

    let free = run(&["--no-timestamp", "sat-potential", path(&data("positive.cnf")), "--z", "1"]);
    let v = json(&free);
    assert_eq!(v["result"]["lp_sufficiency_flag"], true);
    assert_eq!(v["result"]["potentials"][0]["phi"]["re"].as_f64().unwrap(), 0.0);
}

#[test]
fn chain_and_lift() {
    let v = json(&run(&["--no-timestamp", "classify-chain", path(&data("mobius2.cnf"))]));
    assert_eq!(v["result"]["class"], "MobiusCycle");
    assert_eq!(v["result"]["sharper"]["text"], "w1 + w2 + w4 >= -1");

    let v = json(&run(&[
        "--no-timestamp", "lift-ineq", path(&data("k3.dimacs")), "--cycle", "1,2,3", "--subdivide", "2-3:3",
    ]));
    let lifted = &v["result"]["lifted"];
    assert_eq!(lifted["rhs"].as_f64().unwrap(), -1.0);
    assert_eq!(lifted["coeffs"].as_object().unwrap().len(), 5);
    assert_eq!(v["result"]["subdivided"]["n"], 5);
}

#[test]
fn exit_codes() {
    // unknown flag: usage, 2
    let out = run(&["mis-potential", path(&data("c5.dimacs")), "--z", "1", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    // missing file: 2
    assert_eq!(run(&["mis-potential", "no/such/file", "--z", "1"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    // parse error: 2
    let bad = dir.path().join("bad.dimacs");
    fs::write(&bad, "p edge 3 1\ne 1 x\n").unwrap();
    assert_eq!(run(&["mis-potential", path(&bad), "--z", "1"]).status.code(), Some(2));
    // validation error (self-loop): 1
    let looped = dir.path().join("loop.dimacs");
    fs::write(&looped, "p edge 3 1\ne 2 2\n").unwrap();
    assert_eq!(run(&["mis-potential", path(&looped), "--z", "1"]).status.code(), Some(1));
    // point outside the cube: 1
    let w = dir.path().join("w.txt");
    fs::write(&w, "0 0 1 0 0").unwrap();
    assert_eq!(run(&["mis-potential", path(&data("c5.dimacs")), "--z", "1", "--w", path(&w)]).status.code(), Some(1));
    // csv requested from a json-only command: 2
    assert_eq!(run(&["--out", "csv", "classify-chain", path(&data("mobius2.cnf"))]).status.code(), Some(2));
    // oracle guard exceeded: 1
    let big = dir.path().join("big.dimacs");
    let mut text = String::from("p edge 12 11\n");
    for i in 1..12 {
        text.push_str(&format!("e {i} {}\n", i + 1));
    }
    fs::write(&big, text).unwrap();
    assert_eq!(run(&["oracle", "walks", path(&big), "--length", "3"]).status.code(), Some(1));
}

#[test]
fn oracle_commands() {
    let v = json(&run(&["--no-timestamp", "oracle", "cycles", path(&data("c5.dimacs"))]));
    assert_eq!(v["result"]["cycles"], serde_json::json!([[1, 2, 3, 4, 5]]));
    let v = json(&run(&["--no-timestamp", "oracle", "walks", path(&data("c5.dimacs")), "--length", "5", "--list"]));
    assert_eq!(v["result"]["count"], 10);
    assert_eq!(v["result"]["walks"].as_array().unwrap().len(), 10);
    let v = json(&run(&["--no-timestamp", "oracle", "assignments", path(&data("positive.cnf"))]));
    assert_eq!(v["result"]["satisfiable"], true);
    let v = json(&run(&["--no-timestamp", "oracle", "finite-difference", "--poly", "x^2", "--at", "3"]));
    assert!((v["result"]["value"].as_f64().unwrap() - 6.0).abs() < 1e-6);
}
