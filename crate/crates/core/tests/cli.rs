use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn dagrel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dagrel"))
        .args(args)
        .env_remove("DAGREL_SEED")
        .output()
        .expect("binary runs")
}

fn write(dir: &TempDir, name: &str, value: &Value) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, serde_json::to_string(value).unwrap()).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn uniform2() -> Value {
    json!({ "points": ["a0", "a1"], "weights": ["1/2", "1/2"] })
}

/// The flip of a uniform coin.
fn flip() -> Value {
    json!({ "src": uniform2(), "dst": uniform2(), "entries": [["a0", "a1", "1"], ["a1", "a0", "1"]] })
}

fn sorted_entries(m: &Value) -> Vec<(String, String, String)> {
    let mut e: Vec<(String, String, String)> = serde_json::from_value(m["entries"].clone()).unwrap();
    e.sort();
    e
}

#[test]
fn compose_finprob_gives_the_product() {
    let dir = TempDir::new().unwrap();
    let sample = json!({
        "src": uniform2(),
        "dst": uniform2(),
        "entries": [["a0", "a0", "3/4"], ["a1", "a0", "1/4"], ["a0", "a1", "1/4"], ["a1", "a1", "3/4"]]
    });
    let r = write(&dir, "r.json", &sample);
    let f = write(&dir, "s.json", &flip());
    let out = dagrel(&["compose", "--category", "finprob", s(&r), s(&f)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    // flip ∘ r swaps the rows of r
    let e = sorted_entries(&v);
    let t = |b: &str, a: &str, q: &str| (b.to_string(), a.to_string(), q.to_string());
    assert_eq!(e, vec![t("a0", "a0", "1/4"), t("a0", "a1", "3/4"), t("a1", "a0", "3/4"), t("a1", "a1", "1/4")]);
}

#[test]
fn check_axioms_msurj_reports_no_failures() {
    let out = dagrel(&["check-axioms", "--category", "msurj", "--seed", "42", "--samples", "50"]);
    assert_eq!(out.status.code(), Some(0));
    let reports = stdout_json(&out);
    let reports = reports.as_array().unwrap();
    assert_eq!(reports.len(), 6);
    for r in reports {
        assert_eq!(r["failed"], 0, "{r}");
        assert_eq!(r["seed"], 42);
        assert!(r["checked"].as_u64().unwrap() > 0);
    }
}

#[test]
fn roundtrip_mat_summary() {
    let out = dagrel(&["roundtrip", "--category", "mat", "--dims", "4", "--tol", "1e-8", "--samples", "50"]);
    assert_eq!(out.status.code(), Some(0));
    let w = stdout_json(&out);
    assert_eq!(w["instance"], "mat");
    assert_eq!(w["samples"], 50);
    for key in ["functoriality", "full_faithful", "eta", "triangle"] {
        assert_eq!(w[key]["failed"], 0, "{key}");
    }
}

#[test]
fn same_seed_same_bytes() {
    let a = dagrel(&["check-axioms", "-c", "finprob", "--suite", "roundtrip", "--samples", "20", "--seed", "7"]);
    let b = dagrel(&["check-axioms", "-c", "finprob", "--suite", "roundtrip", "--samples", "20", "--seed", "7"]);
    assert_eq!(a.stdout, b.stdout);
    let c = Command::new(env!("CARGO_BIN_EXE_dagrel"))
        .args(["check-axioms", "-c", "finprob", "--suite", "roundtrip", "--samples", "20"])
        .env("DAGREL_SEED", "7")
        .output()
        .unwrap();
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn mutation_makes_check_axioms_fail() {
    let out = dagrel(&["check-axioms", "-c", "mat", "--suite", "dagger", "--mutation", "identity-dagger-mat", "--samples", "30"]);
    assert_eq!(out.status.code(), Some(1));
    let reports = stdout_json(&out);
    let r = &reports[0];
    assert!(r["failed"].as_u64().unwrap() > 0);
    assert!(!r["witnesses"].as_array().unwrap().is_empty());
}

#[test]
fn validate_reports_column_sum() {
    let dir = TempDir::new().unwrap();
    let bad = json!({ "src": uniform2(), "dst": uniform2(), "entries": [["a0", "a0", "9/10"], ["a1", "a1", "1"]] });
    let p = write(&dir, "bad.json", &bad);
    let out = dagrel(&["validate", "-c", "finprob", s(&p)]);
    assert_eq!(out.status.code(), Some(2));
    let rep = stdout_json(&out);
    assert_eq!(rep["failed"], 1);
    assert!(rep["witnesses"][0]["detail"].as_str().unwrap().contains("column sum"));

    let good = write(&dir, "good.json", &flip());
    let out = dagrel(&["validate", "-c", "finprob", s(&good)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["failed"], 0);
}

#[test]
fn validate_flags_a_large_norm() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("m.txt");
    std::fs::write(&p, "1.5 0\n0 1\n").unwrap();
    let out = dagrel(&["validate", "-c", "mat", "--text", s(&p)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).contains("contraction"));
}

#[test]
fn input_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let junk = dir.path().join("junk.json");
    std::fs::write(&junk, "{\"dom\": [\"1\"]").unwrap();
    assert_eq!(dagrel(&["dagger", "-c", "msurj", s(&junk)]).status.code(), Some(2));
    let missing = json!({ "dom": ["1"], "cod": ["x"] });
    let p = write(&dir, "missing.json", &missing);
    let out = dagrel(&["dagger", "-c", "msurj", s(&p)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("table"));
    assert_eq!(dagrel(&["dagger", "-c", "msurj", "/nonexistent.json"]).status.code(), Some(2));
    assert_eq!(dagrel(&["dagger", s(&p)]).status.code(), Some(2));
    assert_eq!(dagrel(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn wrong_verb_category_pairs_exit_2() {
    let dir = TempDir::new().unwrap();
    let r = write(&dir, "r.json", &json!({ "dom": ["1"], "cod": ["x"], "pairs": [["1", "x"]] }));
    let out = dagrel(&["dilator", "-c", "pinj", s(&r)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("codilator"));
    assert_eq!(dagrel(&["codilator", "-c", "msurj", s(&r)]).status.code(), Some(2));
}

#[test]
fn pinj_codilator_by_hand() {
    let dir = TempDir::new().unwrap();
    let r = write(&dir, "r.json", &json!({ "dom": ["1", "2"], "cod": ["x"], "pairs": [["1", "x"]] }));
    let out = dagrel(&["codilator", "-c", "pinj", s(&r)]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    let apex: Vec<String> = serde_json::from_value(v["left"]["cod"].clone()).unwrap();
    assert_eq!(apex.len(), 2);
    assert!(apex.contains(&"x".to_string()));
    assert!(apex.contains(&"2".to_string()));
}

#[test]
fn mat_codilator_of_a_half() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("r.txt");
    std::fs::write(&p, "0.5\n").unwrap();
    let out = dagrel(&["codilator", "-c", "mat", "--trace", s(&p)]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["trace"]["d"], 1);
    let e = v["trace"]["e"]["entries"][0][0].as_f64().unwrap();
    assert!((e.abs() - 3f64.sqrt() / 2.0).abs() < 1e-12);
    let leg = &v["result"]["left"];
    assert_eq!(leg["rows"], 2);
    assert_eq!(leg["cols"], 1);
}

#[test]
fn dilator_msurj_with_trace_verifies_itself() {
    let dir = TempDir::new().unwrap();
    let r = write(&dir, "r.json", &json!({ "dom": ["1"], "cod": ["x", "y"], "table": { "1": ["x", "y"] } }));
    let out = dagrel(&["dilator", "-c", "msurj", "--trace", s(&r)]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["result"]["left"]["dom"].as_array().unwrap().len(), 2);
    assert_eq!(v["trace"]["dilation"], true);
    assert_eq!(v["trace"]["jointly_monic"], true);
}

#[test]
fn rel_compose_traces_every_step() {
    let dir = TempDir::new().unwrap();
    // r = {1 -> x, 2 -> x, 2 -> y} and s = {x -> p, y -> p} as projection spans
    let r = json!({
        "left": { "dom": ["1x", "2x", "2y"], "cod": ["1", "2"], "table": { "1x": ["1"], "2x": ["2"], "2y": ["2"] } },
        "right": { "dom": ["1x", "2x", "2y"], "cod": ["x", "y"], "table": { "1x": ["x"], "2x": ["x"], "2y": ["y"] } }
    });
    let sp = json!({
        "left": { "dom": ["xp", "yp"], "cod": ["x", "y"], "table": { "xp": ["x"], "yp": ["y"] } },
        "right": { "dom": ["xp", "yp"], "cod": ["p"], "table": { "xp": ["p"], "yp": ["p"] } }
    });
    let (rp, spp) = (write(&dir, "r.json", &r), write(&dir, "s.json", &sp));
    let out_path = dir.path().join("out.json");
    let out = dagrel(&["rel-compose", "-c", "msurj", "--trace", "--out", s(&out_path), s(&rp), s(&spp)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    for key in ["pullback", "outer", "factorization", "result"] {
        assert!(!v["trace"][key].is_null(), "{key}");
    }
    // {1, 2} relate to p, through the pairs (1, p) and (2, p)
    assert_eq!(v["result"]["rep"]["left"]["dom"].as_array().unwrap().len(), 2);
    assert_eq!(v["result"]["target"], json!(["p"]));
}

#[test]
fn rel_compose_rejects_non_monic_spans() {
    let dir = TempDir::new().unwrap();
    let twice = json!({
        "left": { "dom": ["u", "v"], "cod": ["1"], "table": { "u": ["1"], "v": ["1"] } },
        "right": { "dom": ["u", "v"], "cod": ["x"], "table": { "u": ["x"], "v": ["x"] } }
    });
    let p = write(&dir, "r.json", &twice);
    let out = dagrel(&["rel-compose", "-c", "msurj", s(&p), s(&p)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("jointly monic"));
}

#[test]
fn factorize_and_independent_msurj() {
    let dir = TempDir::new().unwrap();
    let f = json!({ "dom": ["1", "2"], "cod": ["a", "b"], "table": { "1": ["a"], "2": ["b"] } });
    let p = write(&dir, "span.json", &json!({ "left": f, "right": f }));
    let out = dagrel(&["factorize", "-c", "msurj", "--trace", s(&p)]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["trace"]["jointly_monic"], true);
    assert!(!v["result"]["epi"].is_null());

    let one = json!({ "dom": ["a", "b"], "cod": ["a", "b"], "table": { "a": ["a"], "b": ["b"] } });
    let sq = write(&dir, "sq.json", &json!({ "f": f, "g": f, "u": one, "v": one }));
    let out = dagrel(&["independent", "-c", "msurj", s(&sq)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out), json!(true));
}

#[test]
fn pinj_factorize_is_a_cofactorisation() {
    let dir = TempDir::new().unwrap();
    let f = json!({ "dom": ["1"], "cod": ["a", "b"], "pairs": [["1", "a"]] });
    let p = write(&dir, "cospan.json", &json!({ "left": f, "right": f }));
    let out = dagrel(&["factorize", "-c", "pinj", s(&p)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert!(!v["mono"].is_null());
    assert!(v.get("epi").is_none());
}

#[test]
fn indpull_over_a_point_is_the_product() {
    let dir = TempDir::new().unwrap();
    let to_pt = |xs: &[&str]| {
        let table: serde_json::Map<String, Value> = xs.iter().map(|x| (x.to_string(), json!(["*"]))).collect();
        json!({ "dom": xs, "cod": ["*"], "table": table })
    };
    let p = write(&dir, "cospan.json", &json!({ "left": to_pt(&["1", "2"]), "right": to_pt(&["x", "y", "z"]) }));
    let out = dagrel(&["indpull", "-c", "msurj", "--trace", s(&p)]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["result"]["left"]["dom"].as_array().unwrap().len(), 6);
    assert_eq!(v["trace"]["independent"], true);
    assert_eq!(v["trace"]["commutes"], true);
}

#[test]
fn text_output_and_demo() {
    let out = dagrel(&["demo", "l2-codilator"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("rank d = 1"));
    assert_eq!(dagrel(&["demo", "nope"]).status.code(), Some(2));
    let out = dagrel(&["check-axioms", "-c", "pinj", "--suite", "dagger", "--samples", "10", "--text"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("dagger pinj"));
}

#[test]
fn timing_is_opt_in() {
    let out = dagrel(&["check-axioms", "-c", "pinj", "--suite", "dagger", "--samples", "5"]);
    assert!(stdout_json(&out)[0]["wall_time_ms"].is_null());
    let out = dagrel(&["check-axioms", "-c", "pinj", "--suite", "dagger", "--samples", "5", "--timing"]);
    assert!(stdout_json(&out)[0]["wall_time_ms"].is_u64());
}
