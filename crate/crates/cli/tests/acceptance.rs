//! Acceptance criteria AC1-AC9. Prints one line per criterion and exits
//! nonzero if any fails.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use bundle_decomp_core::generate::{self, PlantedDecomposition};
use bundle_decomp_core::graph::LocalPair;
use bundle_decomp_core::packing::{
    named_graph, one_subdivision, pack_balanced, pack_unbalanced, verify_packing, PackConfig, PackingResult, PatternGraph,
};
use bundle_decomp_core::partition::{
    assign_probabilities, exceptional_report, roll_partition, sampled_bundle_trial, verify_partition, AssignConfig,
    PartitionCheckConfig,
};
use bundle_decomp_core::regularity::{brute_force_local, extract_bundle, kr_check_local, kr_epsilon};
use bundle_decomp_core::decomp::{decompose_edges, DecomposeConfig};
use bundle_decomp_core::rng::chernoff_bound;
use bundle_decomp_core::{BipartiteHost, Error, Graph, RngStream, Strictness};
use rayon::prelude::*;
use serde_json::Value;

const SEEDS: u64 = 100;
/// Stream for host generation, kept apart from the pipeline's streams.
const HOST_STREAM: u64 = 77;

struct Verdict {
    pass: bool,
    summary: String,
}

fn verdict(pass: bool, summary: String) -> Verdict {
    Verdict { pass, summary }
}

fn random_local(a: usize, b: usize, p: f64, rng: &mut RngStream) -> LocalPair {
    let edges: Vec<(usize, usize)> = (0..a).flat_map(|i| (0..b).map(move |j| (i, j))).filter(|_| rng.uniform() < p).collect();
    LocalPair::from_edges(a, b, &edges)
}

fn structured(m: usize, family: usize) -> LocalPair {
    let edges: Vec<(usize, usize)> = (0..m)
        .flat_map(|i| (0..m).map(move |j| (i, j)))
        .filter(|&(i, j)| match family {
            0 => true,
            1 => i != j,
            _ => (i < m / 2) == (j < m / 2),
        })
        .collect();
    LocalPair::from_edges(m, m, &edges)
}

/// AC1: every codegree certification at ε = (16η)^(1/5) is confirmed by the
/// exhaustive certifier.
fn ac1() -> Verdict {
    let etas = [0.17, 0.2, 0.25, 1.0 / 3.0, 0.5];
    let rows: Vec<(usize, usize, usize, usize)> = (0..10_000u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = RngStream::new(t, 1);
            let lp = if t % 10 == 0 {
                structured(6 + (t as usize / 10) % 7, (t as usize / 70) % 3)
            } else {
                let a = 6 + rng.below(7);
                let b = 6 + rng.below(7);
                let p = 0.1 + 0.8 * rng.uniform();
                random_local(a, b, p, &mut rng)
            };
            let (mut applied, mut certified, mut contradictions, mut nontrivial) = (0, 0, 0, 0);
            for &eta in &etas {
                let Ok(v) = kr_check_local(&lp, eta) else { continue };
                applied += 1;
                if v.is_certified() {
                    certified += 1;
                    let eps = kr_epsilon(eta);
                    if eps < 1.0 {
                        nontrivial += 1;
                    }
                    if !brute_force_local(&lp, eps, 16).expect("parts within cap").is_certified() {
                        contradictions += 1;
                    }
                }
            }
            (applied, certified, contradictions, nontrivial)
        })
        .collect();
    let sum = |f: fn(&(usize, usize, usize, usize)) -> usize| rows.iter().map(f).sum::<usize>();
    let (applied, certified, contradictions, nontrivial) = (sum(|r| r.0), sum(|r| r.1), sum(|r| r.2), sum(|r| r.3));
    verdict(
        contradictions == 0,
        format!(
            "10000 pairs, {applied} codegree runs, {certified} certified, {contradictions} contradictions; {nontrivial} certificates with eps < 1"
        ),
    )
}

/// AC2: size, edge and retention bounds of the bundle extraction, exact.
/// Size bound, edge bound, and the retention bound when it applies.
type BundleBounds = (bool, bool, Option<bool>);

fn ac2() -> Verdict {
    let outcomes: Vec<Result<BundleBounds, String>> = (0..1_000u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = RngStream::new(t, 2);
            let eps: f64 = [0.01, 0.02, 0.05, 0.08][t as usize % 4];
            let host = if t % 2 == 0 {
                // certified: small random pair accepted by the exhaustive check
                loop {
                    let m = 6 + rng.below(7);
                    let p = 0.1 + 0.4 * rng.uniform();
                    let edges: Vec<(usize, usize)> =
                        (0..m).flat_map(|i| (0..m).map(move |j| (i, j))).filter(|_| rng.uniform() < p).collect();
                    let lp = LocalPair::from_edges(m, m, &edges);
                    let density = lp.edge_count() as f64 / (m * m) as f64;
                    if density == 0.0 || density > 0.5 {
                        continue;
                    }
                    // smallest grid ε at which the pair is regular
                    if [0.2, 0.3, 0.4, 0.5].iter().any(|&e| brute_force_local(&lp, e, 16).unwrap().is_certified()) {
                        break BipartiteHost::from_local_edges(m, m, &edges).unwrap();
                    }
                }
            } else {
                // assumed: planted bundle; slack <= εm/2 keeps every degree
                // within εm of the realised mean degree
                let lo = 50.max((2.0 / eps).ceil() as usize);
                let m = lo + rng.below(301 - lo);
                let d = 0.1 + 0.35 * rng.uniform();
                let slack = 1.0 + (eps * m as f64 / 2.0 - 1.0) * rng.uniform();
                generate::planted_bundle(m, d, slack, &mut rng).map_err(|e| e.to_string())?
            };
            let f = host.pair();
            let d = f.density().map_err(|e| e.to_string())?;
            let eps = if t % 2 == 0 {
                let lp = f.local();
                *[0.2, 0.3, 0.4, 0.5].iter().find(|&&e| brute_force_local(&lp, e, 16).unwrap().is_certified()).unwrap()
            } else {
                eps
            };
            let m = f.part_a().len() as f64;
            let e_f = f.edge_count() as f64;
            match extract_bundle(&f, eps, d, Strictness::Relaxed) {
                Ok((h, stats)) => {
                    let m1 = h.part_a().len().min(h.part_b().len()) as f64;
                    let e_h = h.edge_count() as f64;
                    if m1 as usize != stats.m1 || e_h as usize != stats.edges_after {
                        return Err(format!("input {t}: stats disagree with the returned pair"));
                    }
                    let size = m1 >= (1.0 - 2.0 * eps) * m;
                    let edges = e_h >= e_f - 4.0 * eps * m * m;
                    let retention = (2.0 * eps.sqrt() <= d).then_some(e_h >= (1.0 - d) * e_f);
                    Ok((size, edges, retention))
                }
                // a failed size or edge bound
                Err(Error::BundleConclusion(_)) => Ok((false, false, None)),
                Err(e) => Err(format!("input {t}: {e}")),
            }
        })
        .collect();
    let errors: Vec<&String> = outcomes.iter().filter_map(|o| o.as_ref().err()).collect();
    let ok: Vec<_> = outcomes.iter().filter_map(|o| o.as_ref().ok()).collect();
    let size = ok.iter().filter(|o| o.0).count();
    let edges = ok.iter().filter(|o| o.1).count();
    let applicable = ok.iter().filter(|o| o.2.is_some()).count();
    let retained = ok.iter().filter(|o| o.2 == Some(true)).count();
    verdict(
        errors.is_empty() && size == 1000 && edges == 1000 && retained == applicable,
        format!(
            "1000 inputs: size bound {size}, edge bound {edges}, retention {retained}/{applicable}, errors {}{}",
            errors.len(),
            errors.first().map(|e| format!(" (first: {e})")).unwrap_or_default()
        ),
    )
}

/// AC3: sampling harness on a planted (0.03, 0.3)-bundle, k = 2000, p = 0.3.
fn ac3() -> Verdict {
    let (eps, d, k, p) = (0.03, 0.3, 2000, 0.3);
    let mut rng = RngStream::new(3, HOST_STREAM);
    let host = generate::planted_bundle(k, d, 1.0, &mut rng).expect("planted bundle");
    let rep = sampled_bundle_trial(&host.pair(), eps, d, p, &RngStream::new(3, 0), SEEDS as usize, Strictness::Relaxed)
        .expect("relaxed trial runs");
    let need = 95;
    let pass = [rep.size_passes, rep.degree_passes, rep.density_passes, rep.bundle_passes].iter().all(|&c| c >= need);
    verdict(
        pass,
        format!(
            "100 trials: size window {}, degree window {}, density window {}, codegree certificate at eps' = {:.4}: {} (need >= {need} each)",
            rep.size_passes, rep.degree_passes, rep.density_passes, rep.epsilon_prime, rep.bundle_passes
        ),
    )
}

/// AC4: partition clauses on planted 4-block hosts, n = 2048 per side.
fn ac4() -> Verdict {
    let (eps, d) = (0.2, 0.3);
    let rows: Vec<Result<[bool; 5], String>> = (0..SEEDS)
        .map(|seed| {
            let spec = PlantedDecomposition { n: 2048, blocks: 4, block_density: d, noise: 0.0 };
            let (host, _) = generate::planted_decomposition(&spec, &mut RngStream::new(seed, HOST_STREAM)).map_err(|e| e.to_string())?;
            let pair = host.pair();
            let root = RngStream::new(seed, 0);
            let dec = decompose_edges(&pair, eps, d, &DecomposeConfig::default(), &root.derive(2)).map_err(|e| e.to_string())?;
            let r = ((1.0 + d.powi(4) / 4.0) * pair.edge_count() as f64 / 2048.0).max(1.0);
            let pa = assign_probabilities(&dec, r, eps, &AssignConfig::default()).map_err(|e| e.to_string())?;
            let vp = roll_partition(&pa, &root.derive(3));
            let rep = verify_partition(&pair, &vp, eps, d, &PartitionCheckConfig::default()).map_err(|e| e.to_string())?;
            let ex = exceptional_report(&dec, &vp, d, None, r).map_err(|e| e.to_string())?;
            let a = &rep.audit;
            Ok([
                a.passed("cover"),
                a.passed("cluster-balance"),
                a.passed("bundle") && a.passed("bundle-density"),
                a.passed("exceptional-size-relaxed"),
                ex.counting_identity,
            ])
        })
        .collect();
    let errors = rows.iter().filter(|r| r.is_err()).count();
    let count = |i: usize| rows.iter().filter(|r| r.as_ref().is_ok_and(|c| c[i])).count();
    let c = [count(0), count(1), count(2), count(3), count(4)];
    let pass = errors == 0 && c[..4].iter().all(|&x| x >= 90) && c[4] == SEEDS as usize;
    verdict(
        pass,
        format!(
            "100 seeds: cover {}, balance {}, bundle {}, exceptional below relaxed bound {}, counting identity {}, errors {errors}",
            c[0], c[1], c[2], c[3], c[4]
        ),
    )
}

/// AC5: empirical binomial tails against the Chernoff form.
fn ac5() -> Verdict {
    let trials = 10_000u64;
    let p = 0.3;
    let mut worst = Vec::new();
    let mut pass = true;
    for expectation in [30.0, 300.0, 3000.0] {
        let n = (expectation / p) as usize;
        let sums: Vec<f64> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = RngStream::new(t, 5);
                (0..n).filter(|_| rng.uniform() < p).count() as f64
            })
            .collect();
        for mu in [0.1, 0.5, 1.0] {
            let freq = sums.iter().filter(|&&x| (x - expectation).abs() >= mu * expectation).count() as f64 / trials as f64;
            let bound = chernoff_bound(mu, expectation).unwrap().bound;
            let limit = bound + 3.0 * (bound / trials as f64).sqrt();
            if freq > limit {
                pass = false;
            }
            worst.push(format!("E={expectation} mu={mu}: {freq:.4} <= {limit:.4}"));
        }
    }
    verdict(pass, format!("9 grid points, 10000 trials each; {}", worst.join(", ")))
}

fn host(seed: u64) -> Graph {
    generate::regular(2000, 600, &mut RngStream::new(seed, HOST_STREAM)).expect("600-regular host")
}

fn pattern(name: &str, subdivide: bool) -> PatternGraph {
    let g = named_graph(name).unwrap();
    if subdivide {
        one_subdivision(&g)
    } else {
        PatternGraph::from_graph(&g).unwrap()
    }
}

fn pack(g: &Graph, h: &PatternGraph, seed: u64) -> PackingResult {
    let cfg = PackConfig { rho: Some(600.0), ..Default::default() };
    let rng = RngStream::new(seed, 0);
    if h.is_balanced() {
        pack_balanced(g, h, 0.2, 0.3, &cfg, &rng).expect("relaxed packing runs")
    } else {
        pack_unbalanced(g, h, 0.2, 0.3, &cfg, &rng).expect("relaxed packing runs")
    }
}

/// Runs of AC7 and AC8, shared with the soundness check of AC6.
struct PackRuns {
    c4: Vec<PackingResult>,
    p3: Vec<PackingResult>,
    k4: Vec<PackingResult>,
    patterns: [PatternGraph; 3],
    hosts: Vec<Graph>,
}

fn pack_runs() -> PackRuns {
    let patterns = [pattern("C4", false), pattern("P3", false), pattern("K4", true)];
    let hosts: Vec<Graph> = (0..SEEDS).map(host).collect();
    let run = |h: &PatternGraph| -> Vec<PackingResult> { hosts.iter().zip(0..).map(|(g, s)| pack(g, h, s)).collect() };
    PackRuns { c4: run(&patterns[0]), p3: run(&patterns[1]), k4: run(&patterns[2]), patterns, hosts }
}

/// AC6: every returned embedding re-verifies.
fn ac6(runs: &PackRuns) -> Verdict {
    let (mut copies, mut bad) = (0, Vec::new());
    for (results, h) in [(&runs.c4, &runs.patterns[0]), (&runs.p3, &runs.patterns[1]), (&runs.k4, &runs.patterns[2])] {
        for (res, g) in results.iter().zip(&runs.hosts) {
            copies += res.embeddings.len();
            let audit = verify_packing(g, h, &res.embeddings, &res.uncovered);
            let first = audit.failures().next().map(|c| format!("{}: {:?}", c.name, c.detail));
            bad.extend(first);
        }
    }
    verdict(bad.is_empty(), format!("300 packings, {copies} copies, {} failed re-verification{}", bad.len(), bad.first().map(|b| format!(" ({b})")).unwrap_or_default()))
}

/// AC7: C4 coverage on a 600-regular host with 2000 vertices.
fn ac7(runs: &PackRuns) -> Verdict {
    let cov: Vec<f64> = runs.c4.iter().map(PackingResult::coverage).collect();
    let good = cov.iter().filter(|&&c| c >= 0.85).count();
    let mean = cov.iter().sum::<f64>() / cov.len() as f64;
    let k: f64 = runs.c4.iter().map(|r| r.k as f64).sum::<f64>() / cov.len() as f64;
    verdict(good >= 90, format!("coverage >= 0.85 in {good}/100 seeds (mean {mean:.3}, min {:.3}, mean K {k:.2})", cov.iter().cloned().fold(1.0, f64::min)))
}

/// AC8: unbalanced packer leftovers and the uncovered-vertex accounting.
fn ac8(runs: &PackRuns) -> Verdict {
    let mut parts = Vec::new();
    let mut pass = true;
    for (name, results, h) in [("P3", &runs.p3, &runs.patterns[1]), ("S(K4)", &runs.k4, &runs.patterns[2])] {
        let hh = h.h();
        let leftover_ok = results.iter().filter(|r| r.clusters.iter().all(|c| c.leftover <= hh)).count();
        let identity_ok = results
            .iter()
            .filter(|r| {
                let leftover: usize = r.clusters.iter().map(|c| c.leftover).sum();
                let dropped = usize::from(r.dropped.is_some());
                let residue = r.exceptional_residue.len();
                r.uncovered.len() == leftover + residue + dropped && r.uncovered.len() <= r.k * hh + residue + dropped
            })
            .count();
        pass &= leftover_ok >= 90 && identity_ok == results.len();
        let cov = results.iter().map(PackingResult::coverage).sum::<f64>() / results.len() as f64;
        parts.push(format!("{name}: leftover <= h in {leftover_ok}/100, accounting {identity_ok}/100, mean coverage {cov:.3}"));
    }
    verdict(pass, parts.join("; "))
}

fn cli(dir: &Path, args: &[&str]) -> (i32, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_bundle-decomp")).args(args).current_dir(dir).output().expect("binary runs");
    (o.status.code().unwrap_or(-1), String::from_utf8_lossy(&o.stdout).into_owned())
}

fn strip_timings(text: &str) -> Value {
    let mut v: Value = serde_json::from_str(text).expect("report is JSON");
    if let Some(o) = v.as_object_mut() {
        o.remove("timings_ms");
    }
    v
}

/// AC9: each subcommand twice with the same seed, JSON compared without timings.
fn ac9() -> Verdict {
    let script: &[&[&str]] = &[
        &["generate", "--kind", "regular", "--n", "400", "--r", "380", "--seed", "4", "--out", "g.txt"],
        &["generate", "--kind", "bipartite-density", "--m", "12", "--p", "0.5", "--seed", "4", "--out", "small.txt"],
        &["generate", "--kind", "planted-bundle", "--m", "300", "--d", "0.3", "--slack", "4", "--seed", "4", "--out", "bundle.txt"],
        &["generate", "--kind", "planted-decomposition", "--n", "256", "--blocks", "2", "--d", "0.3", "--seed", "4", "--out", "host.txt"],
        &["check-regular", "--input", "small.txt", "--mode", "brute", "--epsilon", "0.3"],
        &["check-regular", "--input", "bundle.txt", "--epsilon", "0.9"],
        &["extract-bundle", "--input", "bundle.txt", "--epsilon", "0.05", "--d", "0.3"],
        &["edge-decompose", "--input", "host.txt", "--epsilon", "0.2", "--d", "0.3", "--seed", "4", "--out", "dec.json"],
        &["vertex-partition", "--input", "host.txt", "--epsilon", "0.2", "--d", "0.3", "--seed", "4", "--out", "part.json"],
        &["pack", "--graph", "g.txt", "--pattern-name", "K2,2", "--epsilon", "0.05", "--d", "0.3", "--seed", "4", "--out", "pack.json"],
        &["pack", "--graph", "g.txt", "--pattern-name", "P3", "--mode", "unbalanced", "--epsilon", "0.05", "--d", "0.3", "--seed", "4"],
        &["verify", "--graph", "host.txt", "--decomposition", "dec.json"],
        &["verify", "--graph", "host.txt", "--partition", "part.json"],
        &["verify", "--graph", "g.txt", "--packing", "pack.json"],
        &["params", "--epsilon", "0.2", "--d", "0.3", "--n", "2048"],
        &["run", "--config", "run.json"],
    ];
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let config = r#"{ "input": "host.txt", "epsilon": 0.2, "d": 0.3, "seed": 4, "pack": { "pattern_name": "C4" } }"#;
    let mut outputs: [Vec<Value>; 2] = [Vec::new(), Vec::new()];
    let mut failures = Vec::new();
    for (dir, out) in dirs.iter().zip(outputs.iter_mut()) {
        std::fs::write(dir.path().join("run.json"), config).unwrap();
        for args in script {
            let (code, stdout) = cli(dir.path(), args);
            if code != 0 {
                failures.push(format!("{} exited {code}", args[..2].join(" ")));
            }
            let text = match args.iter().position(|a| *a == "--out") {
                Some(i) if args[i + 1].ends_with(".json") => std::fs::read_to_string(dir.path().join(args[i + 1])).unwrap(),
                Some(i) => {
                    out.push(Value::String(std::fs::read_to_string(dir.path().join(args[i + 1])).unwrap()));
                    stdout
                }
                None => stdout,
            };
            out.push(strip_timings(&text));
        }
    }
    let differing: Vec<usize> = (0..outputs[0].len()).filter(|&i| outputs[0][i] != outputs[1][i]).collect();
    verdict(
        failures.is_empty() && differing.is_empty() && outputs[0].len() == outputs[1].len(),
        format!(
            "{} subcommand runs twice, {} artifacts compared, {} differ, {} nonzero exits{}",
            script.len(),
            outputs[0].len(),
            differing.len(),
            failures.len(),
            failures.first().map(|f| format!(" ({f})")).unwrap_or_default()
        ),
    )
}

fn report(id: &str, start: Instant, v: Verdict) -> bool {
    println!("{id} {} [{:.1}s] {}", if v.pass { "PASS" } else { "FAIL" }, start.elapsed().as_secs_f64(), v.summary);
    v.pass
}

fn main() {
    let only: Vec<String> = std::env::args().skip(1).filter(|a| a.starts_with("AC")).collect();
    let wanted = |id: &str| only.is_empty() || only.iter().any(|o| o == id);
    let mut all = true;
    let independent = [("AC1", ac1 as fn() -> Verdict), ("AC2", ac2), ("AC3", ac3), ("AC4", ac4), ("AC5", ac5)];
    for (id, f) in independent {
        if wanted(id) {
            all &= report(id, Instant::now(), f());
        }
    }
    if ["AC6", "AC7", "AC8"].iter().any(|id| wanted(id)) {
        let start = Instant::now();
        let runs = pack_runs();
        for (id, f) in [("AC6", ac6 as fn(&PackRuns) -> Verdict), ("AC7", ac7), ("AC8", ac8)] {
            if wanted(id) {
                all &= report(id, start, f(&runs));
            }
        }
    }
    if wanted("AC9") {
        all &= report("AC9", Instant::now(), ac9());
    }
    if !all {
        std::process::exit(1);
    }
}
