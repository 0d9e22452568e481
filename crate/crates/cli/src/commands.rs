//! One function per subcommand. Each builds a report and returns the exit code.

use bundle_decomp_core::audit::Audit;
use bundle_decomp_core::decomp::{
    decompose_edges, params_and_feasibility, verify_edge_decomposition, DecomposeConfig, EdgeDecomposition,
};
use bundle_decomp_core::generate::{self, PlantedDecomposition};
use bundle_decomp_core::graph::{degree_profile, write_bipartite, write_edge_list};
use bundle_decomp_core::packing::pipeline::{BIPARTITION_STREAM, CLUSTER_STREAM, DECOMPOSITION_STREAM, DICE_STREAM};
use bundle_decomp_core::packing::{
    audit_packing, named_graph, one_subdivision, pack_balanced, pack_unbalanced, BoundCheck, PackConfig, PackingResult,
    PatternGraph,
};
use bundle_decomp_core::partition::{
    assign_probabilities, exceptional_report, roll_partition, verify_partition, AssignConfig, ExceptionalReport,
    PartitionCheckConfig, PartitionReport, VertexPartition,
};
use bundle_decomp_core::regularity::{
    brute_force_regular, bundle_cleanup, deviation, extract_bundle, kr_check, kr_eta_for, BundleStats, DEFAULT_BRUTE_CAP,
};
use bundle_decomp_core::{BipartitePair, Error, Graph, RngStream, Strictness};
use serde_json::json;

use crate::args::*;
use crate::report::*;

fn strictness(strict: bool) -> Strictness {
    if strict {
        Strictness::Strict
    } else {
        Strictness::Relaxed
    }
}

pub fn generate(a: &GenerateArgs) -> CmdResult<i32> {
    let mut rep = Report::new("generate", a, Some(a.seed), false);
    rep.stream("generate", 0);
    let mut rng = RngStream::new(a.seed, 0);
    match a.kind {
        GraphKind::Regular => {
            let (n, r) = (required(a.n, "n")?, required(a.r, "r")?);
            let g = rep.timed("generate", || generate::regular(n, r, &mut rng))?;
            let profile = degree_profile(&g, r, 0.0);
            rep.assertions.push("degree-profile", profile.holds, None);
            write_file(&a.out, &write_edge_list(&g))?;
            rep.set_results(json!({ "kind": a.kind, "n": n, "edges": g.edge_count(), "degree_profile": profile }));
        }
        GraphKind::BipartiteDensity => {
            let (m, p) = (required(a.m, "m")?, required(a.p, "p")?);
            let host = rep.timed("generate", || generate::bipartite_density(m, m, p, &mut rng))?;
            let density = host.pair().density()?;
            write_file(&a.out, &write_bipartite(&host))?;
            rep.set_results(json!({ "kind": a.kind, "m": m, "p": p, "edges": host.pair().edge_count(), "density": density }));
        }
        GraphKind::PlantedBundle => {
            let (m, d) = (required(a.m, "m")?, required(a.d, "d")?);
            let host = rep.timed("generate", || generate::planted_bundle(m, d, a.slack, &mut rng))?;
            let pair = host.pair();
            let (lo, hi) = (d * m as f64 - a.slack, d * m as f64 + a.slack);
            let inside = |k: &usize| (*k as f64) >= lo && (*k as f64) <= hi;
            let ok = pair.degrees_a().iter().all(inside) && pair.degrees_b().iter().all(inside);
            rep.assertions.push("degree-window", ok, None);
            write_file(&a.out, &write_bipartite(&host))?;
            rep.set_results(json!({
                "kind": a.kind,
                "m": m,
                "d": d,
                "slack": a.slack,
                "density": pair.density()?,
                "degree_window": [lo, hi],
                "expected_delta": (d * m as f64 - a.slack) / m as f64,
            }));
        }
        GraphKind::PlantedDecomposition => {
            let spec = PlantedDecomposition {
                n: required(a.n, "n")?,
                blocks: required(a.blocks, "blocks")?,
                block_density: required(a.d, "d")?,
                noise: a.noise,
            };
            let (host, blocks) = rep.timed("generate", || generate::planted_decomposition(&spec, &mut rng))?;
            write_file(&a.out, &write_bipartite(&host))?;
            let blocks: Vec<_> = blocks.iter().map(|(a, b)| json!({ "a": a, "b": b })).collect();
            rep.set_results(json!({ "kind": a.kind, "spec": spec, "edges": host.pair().edge_count(), "blocks": blocks }));
        }
    }
    rep.emit(a.report.as_deref())
}

pub fn check_regular(a: &CheckRegularArgs) -> CmdResult<i32> {
    let host = read_pair(&a.input)?;
    let p = host.pair();
    let mut rep = Report::new("check-regular", a, None, false);
    let verdict = rep.timed("check", || match a.mode {
        RegularityMode::Brute => brute_force_regular(&p, a.epsilon, a.cap.unwrap_or(DEFAULT_BRUTE_CAP)),
        RegularityMode::Kr => kr_check(&p, a.eta.unwrap_or_else(|| kr_eta_for(a.epsilon))),
    })?;
    if let Some(w) = &verdict.witness {
        let dev = deviation(&p, &w.x, &w.y)?;
        rep.assertions.push("witness-recheck", dev > verdict.epsilon, Some(format!("deviation {dev}")));
    }
    rep.set_results(&verdict);
    rep.emit(a.out.as_deref())
}

fn bundle_assertions(audit: &mut Audit, stats: &BundleStats) {
    audit.push("size-bound", stats.size_bound_ok, Some(format!("m1 = {}, m = {}", stats.m1, stats.m)));
    audit.push(
        "edge-bound",
        stats.edge_bound_ok,
        Some(format!("e(H) = {}, e(F) = {}", stats.edges_after, stats.edges_before)),
    );
    let detail = if stats.retention_applicable { None } else { Some("not applicable".to_string()) };
    audit.push("retention", stats.retention_ok || !stats.retention_applicable, detail);
}

pub fn extract(a: &ExtractBundleArgs) -> CmdResult<i32> {
    let host = read_pair(&a.input)?;
    let f = host.pair();
    let mut rep = Report::new("extract-bundle", a, None, a.strict);
    let (h, stats) = match rep.timed("extract", || extract_bundle(&f, a.epsilon, a.d, strictness(a.strict))) {
        Ok(out) => out,
        Err(Error::BundleConclusion(_)) => bundle_cleanup(&f, a.epsilon, a.d)?,
        Err(e @ Error::BundleHypothesis(_)) if a.strict => return Err(Failure::Gate(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    bundle_assertions(&mut rep.assertions, &stats);
    rep.warnings.extend(stats.warnings.iter().cloned());
    rep.set_results(json!({
        "stats": stats,
        "bundle": { "a": h.part_a(), "b": h.part_b() },
        "density": if h.part_a().is_empty() { 0.0 } else { h.density()? },
    }));
    rep.emit(a.out.as_deref())
}

pub fn decompose_config(f: &DecomposeFlags, strictness: Strictness) -> DecomposeConfig {
    let base = DecomposeConfig::default();
    DecomposeConfig {
        max_pairs: f.max_pairs.unwrap_or(base.max_pairs),
        patience: f.patience.unwrap_or(base.patience),
        m_floor: f.m_floor.unwrap_or(base.m_floor),
        candidates_per_round: f.candidates.unwrap_or(base.candidates_per_round),
        brute_cap: f.cap.unwrap_or(base.brute_cap),
        strictness,
        ..base
    }
}

/// Strict-mode gate on the theorem's ranges for `(ε, d, n)`.
pub fn feasibility_gate(epsilon: f64, d: f64, n: usize, d_g: f64, vertex: bool) -> CmdResult<()> {
    let p = params_and_feasibility(epsilon, d, n.max(3) as f64, d_g)?;
    let ok = if vertex { p.feasible_vertex } else { p.feasible_edge };
    if ok {
        return Ok(());
    }
    let ln_n_min = if vertex { p.ln_n_min_vertex } else { p.ln_n_min_edge };
    Err(Failure::Gate(format!(
        "feasibility: epsilon/d lower bounds violated at n = {n} (need epsilon >= {:.4}, d >= {:.4}, ln n > {ln_n_min:.1})",
        p.epsilon_floor, p.d_floor
    )))
}

/// Hard and soft checks of a stored or fresh decomposition.
pub fn decomposition_checks(pair: &BipartitePair<'_>, dec: &EdgeDecomposition) -> (Audit, Audit) {
    let audit = verify_edge_decomposition(pair, dec, dec.epsilon, dec.d);
    let (soft, hard): (Vec<_>, Vec<_>) = audit.checks.into_iter().partition(|c| c.name == "h0-density");
    (Audit { checks: hard }, Audit { checks: soft })
}

fn decomposition_bounds(dec: &EdgeDecomposition) -> Vec<BoundCheck> {
    let Some(p) = &dec.params else { return Vec::new() };
    let mut out = Vec::new();
    let k = dec.pairs.len();
    if k > 0 {
        let ln_k = (k as f64).ln();
        out.push(BoundCheck {
            name: "log of the number of pairs".into(),
            formula: "ln(8 d_G / d) + (100/eps^2) ln(1/d)".into(),
            value: p.ln_k_max,
            observed: ln_k,
            holds: ln_k <= p.ln_k_max,
        });
    }
    if let Some(m) = dec.min_pair_size() {
        let ln_m = (m as f64).ln();
        out.push(BoundCheck {
            name: "log of the smallest pair side".into(),
            formula: "ln(n/2) - (50/eps^2) ln(1/d)".into(),
            value: p.ln_m_min,
            observed: ln_m,
            holds: ln_m >= p.ln_m_min,
        });
    }
    out
}

fn decomposition_summary(dec: &EdgeDecomposition) -> serde_json::Value {
    json!({
        "k": dec.pairs.len(),
        "min_pair_size": dec.min_pair_size(),
        "h0_edges": dec.h0.len(),
        "h0_density": dec.h0_density(),
        "rounds": dec.rounds,
    })
}

pub fn edge_decompose(a: &DecomposeArgs) -> CmdResult<i32> {
    let host = read_pair(&a.input)?;
    let pair = host.pair();
    if a.strict {
        feasibility_gate(a.epsilon, a.d, pair.part_a().len(), pair.density().unwrap_or(0.0), false)?;
    }
    let mut rep = Report::new("edge-decompose", a, Some(a.seed), a.strict);
    rep.stream("decomposition", DECOMPOSITION_STREAM);
    let cfg = decompose_config(&a.decompose, strictness(a.strict));
    let rng = RngStream::new(a.seed, 0).derive(DECOMPOSITION_STREAM);
    let dec = rep.timed("decompose", || decompose_edges(&pair, a.epsilon, a.d, &cfg, &rng))?;
    let (hard, soft) = decomposition_checks(&pair, &dec);
    rep.assertions = hard;
    rep.clauses = soft;
    rep.bounds = decomposition_bounds(&dec);
    rep.warnings.extend(dec.notes.iter().cloned());
    rep.set_results(json!({ "summary": decomposition_summary(&dec), "decomposition": dec }));
    rep.emit(a.out.as_deref())
}

pub struct PartitionChecks {
    pub hard: Audit,
    pub soft: Audit,
    pub report: Option<PartitionReport>,
    pub exceptional: ExceptionalReport,
}

/// Everything checkable about a vertex partition from the partition, its
/// decomposition and the pair alone.
pub fn partition_checks(
    pair: &BipartitePair<'_>,
    vp: &VertexPartition,
    dec: &EdgeDecomposition,
    psi: Option<f64>,
    r: f64,
) -> CmdResult<PartitionChecks> {
    let mut hard = Audit::default();
    let mut soft = Audit::default();
    let report = match verify_partition(pair, vp, vp.epsilon, vp.d, &PartitionCheckConfig::default()) {
        Ok(rep) => {
            for c in &rep.audit.checks {
                if c.name == "cover" {
                    hard.checks.push(c.clone());
                } else {
                    soft.checks.push(c.clone());
                }
            }
            Some(rep)
        }
        Err(Error::PartitionStructure(msg)) => {
            hard.fail("cover", msg);
            None
        }
        Err(e) => return Err(e.into()),
    };
    let exceptional = exceptional_report(dec, vp, vp.d, psi, r)?;
    hard.push(
        "exceptional-counting",
        exceptional.counting_identity,
        Some(format!("{} high-degree vertices, degree sum {}", exceptional.high_degree.len(), exceptional.high_degree_sum)),
    );
    Ok(PartitionChecks { hard, soft, report, exceptional })
}

fn mean_degree(pair: &BipartitePair<'_>) -> f64 {
    pair.edge_count() as f64 / pair.part_a().len().max(1) as f64
}

pub struct PartitionRun {
    pub dec: EdgeDecomposition,
    pub vp: VertexPartition,
    pub r: f64,
    pub pair_p: Vec<f64>,
    pub clamps: usize,
    pub checks: PartitionChecks,
}

#[allow(clippy::too_many_arguments)]
pub fn run_partition(
    rep: &mut Report,
    pair: &BipartitePair<'_>,
    epsilon: f64,
    d: f64,
    r: Option<f64>,
    psi: Option<f64>,
    flags: &DecomposeFlags,
    strict: bool,
    seed: u64,
) -> CmdResult<PartitionRun> {
    let root = RngStream::new(seed, 0);
    rep.stream("decomposition", DECOMPOSITION_STREAM);
    rep.stream("dice", DICE_STREAM);
    let cfg = decompose_config(flags, strictness(strict));
    let dec = rep.timed("decompose", || decompose_edges(pair, epsilon, d, &cfg, &root.derive(DECOMPOSITION_STREAM)))?;
    let r = r.unwrap_or_else(|| ((1.0 + d.powi(4) / 4.0) * mean_degree(pair)).max(1.0));
    let pa = assign_probabilities(&dec, r, epsilon, &AssignConfig::default())?;
    let vp = rep.timed("roll", || roll_partition(&pa, &root.derive(DICE_STREAM)));
    let checks = rep.timed("verify", || partition_checks(pair, &vp, &dec, psi, r))?;
    if !pa.sandwich.hypotheses_hold {
        rep.warnings.push("degree sandwich hypotheses do not hold for this r".into());
    }
    Ok(PartitionRun { pair_p: pa.pair_p.clone(), clamps: pa.clamp_log.len(), dec, vp, r, checks })
}

pub fn vertex_partition(a: &PartitionArgs) -> CmdResult<i32> {
    let host = read_pair(&a.input)?;
    let pair = host.pair();
    if a.strict {
        feasibility_gate(a.epsilon, a.d, pair.part_a().len(), pair.density().unwrap_or(0.0), true)?;
    }
    let mut rep = Report::new("vertex-partition", a, Some(a.seed), a.strict);
    let run = run_partition(&mut rep, &pair, a.epsilon, a.d, a.r, a.psi, &a.decompose, a.strict, a.seed)?;
    rep.assertions = run.checks.hard;
    rep.clauses = run.checks.soft;
    rep.set_results(json!({
        "k": run.vp.k,
        "r": run.r,
        "pair_p": run.pair_p,
        "clamped_dice": run.clamps,
        "partition": run.vp,
        "partition_report": run.checks.report,
        "exceptional": run.checks.exceptional,
        "decomposition": run.dec,
    }));
    rep.emit(a.out.as_deref())
}

pub fn pack_config(f: &PackFlags, strict: bool) -> PackConfig {
    let mut cfg = PackConfig { strictness: strictness(strict), rho: f.rho, floor: f.floor, ..Default::default() };
    if let Some(t) = f.drc_trials {
        cfg.dense.drc_trials = t;
    }
    cfg.dense.bt = f.bt;
    if let Some(r) = f.repair {
        cfg.repair = r;
    }
    if let Some(b) = f.embed_budget {
        cfg.embed_budget = b;
    }
    cfg.decompose.strictness = cfg.strictness;
    cfg
}

pub fn load_pattern(file: Option<&std::path::Path>, name: Option<&str>, mode: PackMode) -> CmdResult<PatternGraph> {
    let g: Graph = match (file, name) {
        (Some(p), _) => read_graph(p)?,
        (None, Some(n)) => named_graph(n)?,
        (None, None) => return Err(Failure::Usage("--pattern or --pattern-name is required".into())),
    };
    Ok(match mode {
        PackMode::Subdivide => one_subdivision(&g),
        _ => PatternGraph::from_graph(&g)?,
    })
}

#[allow(clippy::too_many_arguments)]
pub fn run_pack(
    rep: &mut Report,
    g: &Graph,
    h: &PatternGraph,
    mode: PackMode,
    epsilon: f64,
    d: f64,
    cfg: &PackConfig,
    seed: u64,
) -> CmdResult<PackingResult> {
    rep.stream("bipartition", BIPARTITION_STREAM);
    rep.stream("decomposition", DECOMPOSITION_STREAM);
    rep.stream("dice", DICE_STREAM);
    rep.stream("cluster_base", CLUSTER_STREAM);
    let rng = RngStream::new(seed, 0);
    let balanced = match mode {
        PackMode::Balanced => true,
        PackMode::Unbalanced => false,
        PackMode::Subdivide => h.is_balanced(),
    };
    let res = rep.timed("pack", || {
        if balanced {
            pack_balanced(g, h, epsilon, d, cfg, &rng)
        } else {
            pack_unbalanced(g, h, epsilon, d, cfg, &rng)
        }
    })?;
    Ok(res)
}

pub fn pack(a: &PackArgs) -> CmdResult<i32> {
    let g = read_graph(&a.graph)?;
    let h = load_pattern(a.pattern.as_deref(), a.pattern_name.as_deref(), a.mode)?;
    let mut rep = Report::new("pack", a, Some(a.seed), a.strict);
    let cfg = pack_config(&a.pack, a.strict);
    let res = run_pack(&mut rep, &g, &h, a.mode, a.epsilon, a.d, &cfg, a.seed)?;
    rep.assertions = res.assertions.clone();
    if let Some(p) = &res.partition {
        rep.clauses = p.audit.clone();
    }
    rep.bounds = res.bounds.clone();
    rep.set_results(json!({
        "copies": res.embeddings.len(),
        "coverage": res.coverage(),
        "pattern": h,
        "result": res,
    }));
    rep.emit(a.out.as_deref())
}

pub fn verify(a: &VerifyArgs) -> CmdResult<i32> {
    let mut rep = Report::new("verify", a, None, false);
    let (kind, path) = match (&a.partition, &a.decomposition, &a.packing) {
        (Some(p), _, _) => ("partition", p),
        (_, Some(p), _) => ("decomposition", p),
        (_, _, Some(p)) => ("packing", p),
        _ => return Err(Failure::Usage("one of --partition, --decomposition, --packing is required".into())),
    };
    let art = read_json(path)?;
    let source: String = typed(&art, "/command")?;
    match kind {
        "partition" => {
            let host = read_pair(&a.graph)?;
            let vp: VertexPartition = typed(&art, "/results/partition")?;
            let dec: EdgeDecomposition = typed(&art, "/results/decomposition")?;
            let r: f64 = typed(&art, "/results/r")?;
            let psi: f64 = typed(&art, "/results/exceptional/psi")?;
            let checks = partition_checks(&host.pair(), &vp, &dec, Some(psi), r)?;
            rep.assertions = checks.hard;
            rep.clauses = checks.soft;
        }
        "decomposition" => {
            let host = read_pair(&a.graph)?;
            let dec: EdgeDecomposition = typed(&art, "/results/decomposition")?;
            let (hard, soft) = decomposition_checks(&host.pair(), &dec);
            rep.assertions = hard;
            rep.clauses = soft;
            rep.bounds = decomposition_bounds(&dec);
        }
        _ => {
            let g = read_graph(&a.graph)?;
            let h: PatternGraph = typed(&art, "/results/pattern")?;
            let res: PackingResult = typed(&art, "/results/result")?;
            rep.assertions = audit_packing(&g, &h, &res);
            rep.bounds = res.bounds;
        }
    }
    rep.set_results(json!({ "artifact": kind, "source_command": source }));
    rep.emit(a.out.as_deref())
}

pub fn params(a: &ParamsArgs) -> CmdResult<i32> {
    let p = params_and_feasibility(a.epsilon, a.d, a.n, a.d_g)?;
    let mut rep = Report::new("params", a, None, false);
    let feasible = p.feasible_edge && p.feasible_vertex;
    if !feasible {
        rep.warnings.push("parameters are outside the theorem's ranges at this n".into());
    }
    rep.set_results(&p);
    let code = rep.emit(a.out.as_deref())?;
    if a.strict && !feasible {
        eprintln!("error: feasibility: epsilon/d lower bounds violated at n = {}", a.n);
        return Ok(2);
    }
    Ok(code)
}
