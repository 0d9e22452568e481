use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bundle-decomp")).args(args).current_dir(dir).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn write_json(path: &Path, v: &Value) {
    std::fs::write(path, serde_json::to_string_pretty(v).unwrap()).unwrap();
}

fn planted(dir: &Path) {
    let o = bin(
        &["generate", "--kind", "planted-decomposition", "--n", "256", "--blocks", "2", "--d", "0.3", "--seed", "3", "--out", "host.txt", "--report", "gen.json"],
        dir,
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

fn check<'a>(report: &'a Value, section: &str, name: &str) -> &'a Value {
    report[section]["checks"].as_array().unwrap().iter().find(|c| c["name"] == name).unwrap_or_else(|| panic!("no check {name}"))
}

#[test]
fn odd_degree_product_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(&["generate", "--kind", "regular", "--n", "5", "--r", "3", "--out", "g.txt"], dir.path());
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("3-regular"));
}

#[test]
fn regular_generator_reports_profile() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(&["generate", "--kind", "regular", "--n", "100", "--r", "3", "--out", "g.txt", "--report", "r.json"], dir.path());
    assert_eq!(code(&o), 0);
    let r = json(&dir.path().join("r.json"));
    assert_eq!(r["results"]["degree_profile"]["holds"], true);
    assert_eq!(r["results"]["edges"], 150);
}

#[test]
fn missing_input_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(&["edge-decompose", "--input", "nope.txt", "--epsilon", "0.2", "--d", "0.3"], dir.path());
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("nope.txt"));
}

#[test]
fn unknown_flag_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&bin(&["params", "--epsilon", "0.1", "--bogus"], dir.path())), 1);
    assert_eq!(code(&bin(&["--help"], dir.path())), 0);
}

#[test]
fn strict_infeasible_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    planted(dir.path());
    let o = bin(&["vertex-partition", "--input", "host.txt", "--epsilon", "0.2", "--d", "0.3", "--strict"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("feasibility"));
    let o = bin(&["params", "--epsilon", "0.2", "--d", "0.3", "--n", "1e6", "--strict", "--out", "p.json"], dir.path());
    assert_eq!(code(&o), 2);
    assert_eq!(json(&dir.path().join("p.json"))["results"]["feasible_edge"], false);
}

#[test]
fn partition_verifies_to_identical_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    planted(dir.path());
    let o = bin(&["vertex-partition", "--input", "host.txt", "--epsilon", "0.2", "--d", "0.3", "--seed", "5", "--out", "part.json"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = bin(&["verify", "--graph", "host.txt", "--partition", "part.json", "--out", "v.json"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let (a, b) = (json(&dir.path().join("part.json")), json(&dir.path().join("v.json")));
    assert_eq!(a["assertions"], b["assertions"]);
    assert_eq!(a["clauses"], b["clauses"]);
    assert_eq!(check(&b, "assertions", "cover")["pass"], true);
}

#[test]
fn overlapping_clusters_fail_cover() {
    let dir = tempfile::tempdir().unwrap();
    planted(dir.path());
    bin(&["vertex-partition", "--input", "host.txt", "--epsilon", "0.2", "--d", "0.3", "--out", "part.json"], dir.path());
    let mut art = json(&dir.path().join("part.json"));
    let a = &mut art["results"]["partition"]["a"];
    let v = a[0][0].clone();
    a[1].as_array_mut().unwrap().push(v);
    write_json(&dir.path().join("bad.json"), &art);
    let o = bin(&["verify", "--graph", "host.txt", "--partition", "bad.json", "--out", "v.json"], dir.path());
    assert_eq!(code(&o), 3);
    let cover = check(&json(&dir.path().join("v.json")), "assertions", "cover").clone();
    assert_eq!(cover["pass"], false);
    assert!(cover["detail"].as_str().unwrap().contains("both"));
}

#[test]
fn decomposition_verifies_and_detects_stray_edges() {
    let dir = tempfile::tempdir().unwrap();
    planted(dir.path());
    let o = bin(&["edge-decompose", "--input", "host.txt", "--epsilon", "0.2", "--d", "0.3", "--out", "dec.json"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = bin(&["verify", "--graph", "host.txt", "--decomposition", "dec.json"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let mut art = json(&dir.path().join("dec.json"));
    art["results"]["decomposition"]["h0"].as_array_mut().unwrap().push(serde_json::json!([0, 1]));
    write_json(&dir.path().join("bad.json"), &art);
    let o = bin(&["verify", "--graph", "host.txt", "--decomposition", "bad.json", "--out", "v.json"], dir.path());
    assert_eq!(code(&o), 3);
    assert_eq!(check(&json(&dir.path().join("v.json")), "assertions", "edges-from-host")["pass"], false);
}

fn packing(dir: &Path) -> Value {
    let o = bin(&["generate", "--kind", "regular", "--n", "400", "--r", "380", "--seed", "2", "--out", "g.txt"], dir);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = bin(
        &["pack", "--graph", "g.txt", "--pattern-name", "K2,2", "--epsilon", "0.05", "--d", "0.3", "--seed", "2", "--out", "pack.json"],
        dir,
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    json(&dir.join("pack.json"))
}

#[test]
fn tampered_embedding_names_the_copy() {
    let dir = tempfile::tempdir().unwrap();
    let mut art = packing(dir.path());
    let o = bin(&["verify", "--graph", "g.txt", "--packing", "pack.json", "--out", "v.json"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(json(&dir.path().join("v.json"))["assertions"], art["assertions"]);
    let copies = art["results"]["result"]["embeddings"].as_array().unwrap().len();
    assert!(copies > 2);
    let g = std::fs::read_to_string(dir.path().join("g.txt")).unwrap();
    let host = bundle_decomp_core::graph::parse_edge_list(&g).unwrap();
    let (_, nb) = art["results"]["pattern"]["edges"].as_array().unwrap().iter().map(|e| (e[0].as_u64().unwrap(), e[1].as_u64().unwrap())).find(|e| e.0 == 0).unwrap();
    let map = art["results"]["result"]["embeddings"][1]["map"].as_array_mut().unwrap();
    let used: Vec<usize> = map.iter().map(|v| v.as_u64().unwrap() as usize).collect();
    let stranger = (0..host.n()).find(|&v| !used.contains(&v) && !host.has_edge(v, used[nb as usize])).unwrap();
    map[0] = serde_json::json!(stranger);
    write_json(&dir.path().join("bad.json"), &art);
    let o = bin(&["verify", "--graph", "g.txt", "--packing", "bad.json", "--out", "v.json"], dir.path());
    assert_eq!(code(&o), 3);
    let emb = check(&json(&dir.path().join("v.json")), "assertions", "embeddings").clone();
    assert_eq!(emb["pass"], false);
    assert!(emb["detail"].as_str().unwrap().starts_with("copy 1:"), "{emb}");
}

#[test]
fn schema_mismatch_names_the_pointer() {
    let dir = tempfile::tempdir().unwrap();
    let mut art = packing(dir.path());
    art["results"]["result"]["embeddings"][0]["map"][2] = serde_json::json!("seven");
    write_json(&dir.path().join("bad.json"), &art);
    let o = bin(&["verify", "--graph", "g.txt", "--packing", "bad.json"], dir.path());
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("/results/result/embeddings/0/map/2"), "{}", stderr(&o));
}

#[test]
fn run_config_drives_the_full_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    planted(dir.path());
    std::fs::create_dir(dir.path().join("cfg")).unwrap();
    let cfg = serde_json::json!({
        "input": "../host.txt",
        "epsilon": 0.2,
        "d": 0.3,
        "seed": 9,
        "out": "../run.json",
    });
    write_json(&dir.path().join("cfg/run.json"), &cfg);
    let o = bin(&["run", "--config", "cfg/run.json"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = json(&dir.path().join("run.json"));
    assert_eq!(r["passed"], true);
    assert_eq!(r["config"]["seed"], 9);
    assert!(r["results"]["k"].as_u64().unwrap() >= 1);
    assert!(r["assertions"]["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));

    let mut bad = cfg.clone();
    bad["epsilom"] = serde_json::json!(0.1);
    write_json(&dir.path().join("cfg/bad.json"), &bad);
    let o = bin(&["run", "--config", "cfg/bad.json"], dir.path());
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("epsilom"));
}
