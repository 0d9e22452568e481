//! Packing when the host is near-regular: partition into bundles, then fill
//! each bundle with copies of the doubled pattern found by dependent random choice.

use rayon::prelude::*;

use super::dense::embed_in_dense;
use super::embed::Embedding;
use super::pattern::{balance_double, PatternGraph};
use super::pipeline::{audit_packing, prepare, split_copies, uncovered, BoundCheck, ClusterStats, PackConfig, PackingResult, CLUSTER_STREAM};
use crate::audit::Audit;
use crate::error::{Error, Result};
use crate::graph::{BipartitePair, Graph};
use crate::rng::RngStream;
use crate::Strictness;

/// Natural log of the largest pattern size allowed in strict mode:
/// `ε^(1/5) / (16 D) · exp(-(D + 101/ε²) ln(1/d)) · 3^(-D) · n`.
pub fn ln_pattern_bound(epsilon: f64, d: f64, big_d: usize, n: usize) -> f64 {
    let dd = big_d as f64;
    0.2 * epsilon.ln() - (16.0 * dd).ln() - (dd + 101.0 / (epsilon * epsilon)) * (1.0 / d).ln() - dd * 3f64.ln()
        + (n as f64).ln()
}

fn strict_gate(g: &Graph, h: &PatternGraph, epsilon: f64, d: f64, rho: f64) -> Result<()> {
    let n = g.n();
    let ln_bound = ln_pattern_bound(epsilon, d, h.max_degree().max(1), n.max(1));
    if (h.h() as f64).ln() > ln_bound {
        return Err(Error::PatternTooLarge { h: h.h(), bound: ln_bound.exp() });
    }
    if !(epsilon > 0.0 && epsilon < 0.1) {
        return Err(Error::Feasibility(format!("epsilon = {epsilon} outside (0, 1/10)")));
    }
    if !(20.0 * epsilon.powf(0.2) <= d && d < 1.0 / 3.0) {
        return Err(Error::Feasibility(format!("d = {d} outside [20 eps^(1/5), 1/3)")));
    }
    if rho < 3.0 * d.cbrt() * n as f64 {
        return Err(Error::Feasibility(format!("rho = {rho} < 3 d^(1/3) n")));
    }
    let slack = d.powi(4) / 10.0;
    if g.degrees().iter().any(|&k| (k as f64) < (1.0 - slack) * rho || (k as f64) > (1.0 + slack) * rho) {
        return Err(Error::Feasibility(format!("host is not (1 ± d^4/10) rho-regular for rho = {rho}")));
    }
    let ln_n_min = 2f64.ln() + 150.0 * (1.0 / d).ln() / (epsilon * epsilon);
    if (n as f64).ln() <= ln_n_min {
        return Err(Error::Feasibility(format!("n = {n} <= 2 exp(150 ln(1/d) / eps^2) = e^{ln_n_min:.1}")));
    }
    Ok(())
}

struct ClusterRun {
    stats: ClusterStats,
    embeddings: Vec<Embedding>,
    log: Vec<String>,
}

fn fill_cluster(
    g: &Graph,
    doubled: &PatternGraph,
    a: &[usize],
    b: &[usize],
    index: usize,
    epsilon_prime: f64,
    cfg: &PackConfig,
    mut rng: RngStream,
) -> ClusterRun {
    let mut stats = ClusterStats { index, size_a: a.len(), size_b: b.len(), ..Default::default() };
    let mut log = Vec::new();
    let mut embeddings = Vec::new();
    // ε' >= 1 would stop before the first copy; run until the search fails instead
    let frac = if epsilon_prime < 1.0 { epsilon_prime } else { 0.0 };
    let (min_a, min_b) = (frac * a.len() as f64, frac * b.len() as f64);
    let mut vac_a = a.to_vec();
    let mut vac_b = b.to_vec();
    loop {
        if vac_a.is_empty() || vac_b.is_empty() || (vac_a.len() as f64) < min_a || (vac_b.len() as f64) < min_b {
            stats.stopped_by_vacancy = true;
            break;
        }
        let pair = BipartitePair::new(g, vac_a.clone(), vac_b.clone()).expect("vacant parts come from a valid pair");
        let density = pair.density().unwrap_or(0.0);
        if density == 0.0 {
            break;
        }
        match embed_in_dense(&pair, doubled, density, &cfg.dense, &mut rng) {
            Ok(out) => match out.embedding {
                Some(e) => {
                    let used: std::collections::HashSet<usize> = e.map.iter().copied().collect();
                    vac_a.retain(|v| !used.contains(v));
                    vac_b.retain(|v| !used.contains(v));
                    stats.copies += doubled.copies;
                    embeddings.extend(split_copies(&e.map, doubled.copies));
                }
                None => {
                    log.push(format!("cluster {index}: search failed with {} + {} vacant", vac_a.len(), vac_b.len()));
                    break;
                }
            },
            Err(e) => {
                log.push(format!("cluster {index}: {e}"));
                break;
            }
        }
    }
    stats.leftover = vac_a.len() + vac_b.len();
    ClusterRun { stats, embeddings, log }
}

/// Balanced-host packing. Uncovered vertices are the exceptional clusters,
/// the per-bundle leftovers and the vertex dropped for odd `n`.
pub fn pack_balanced(g: &Graph, h: &PatternGraph, epsilon: f64, d: f64, cfg: &PackConfig, rng: &RngStream) -> Result<PackingResult> {
    let rho_hint = cfg.rho.unwrap_or_else(|| if g.n() == 0 { 0.0 } else { 2.0 * g.edge_count() as f64 / g.n() as f64 });
    if cfg.strictness == Strictness::Strict {
        strict_gate(g, h, epsilon, d, rho_hint)?;
    }
    let prep = prepare(g, epsilon, d, cfg, rng)?;
    let doubled = balance_double(h);
    let epsilon_prime = prep.report.epsilon_prime;
    let mut log = vec![format!(
        "bipartition {} + {}, K = {}, exceptional {}",
        prep.bip.a.len(),
        prep.bip.b.len(),
        prep.vp.k,
        prep.vp.exceptional()
    )];
    if epsilon_prime >= 1.0 {
        log.push(format!("epsilon' = {epsilon_prime:.4} >= 1: bundles are filled until the search fails"));
    }
    let runs: Vec<ClusterRun> = (1..=prep.vp.k)
        .into_par_iter()
        .map(|i| {
            let stream = rng.derive(CLUSTER_STREAM + i as u64);
            fill_cluster(g, &doubled, &prep.vp.a[i], &prep.vp.b[i], i, epsilon_prime, cfg, stream)
        })
        .collect();
    let mut embeddings = Vec::new();
    let mut clusters = Vec::new();
    for run in runs {
        embeddings.extend(run.embeddings);
        log.extend(run.log);
        clusters.push(run.stats);
    }
    let uncovered = uncovered(g, &embeddings);
    let n = g.n();
    let bound = 5.0 * d.cbrt() * n as f64;
    let bounds = vec![BoundCheck {
        name: "uncovered vertices".into(),
        formula: "5 d^(1/3) n".into(),
        value: bound,
        observed: uncovered.len() as f64,
        holds: (uncovered.len() as f64) <= bound,
    }];
    let mut exceptional_residue: Vec<usize> = prep.vp.a[0].iter().chain(&prep.vp.b[0]).copied().collect();
    exceptional_residue.sort_unstable();
    let mut res = PackingResult {
        mode: "balanced".into(),
        h: h.h(),
        n,
        embeddings,
        uncovered,
        dropped: prep.bip.dropped,
        k: prep.vp.k,
        rho: prep.rho,
        r: prep.r,
        epsilon_prime,
        exceptional_residue,
        clusters,
        bounds,
        assertions: Audit::default(),
        partition: Some(prep.report),
        log,
    };
    res.assertions = audit_packing(g, h, &res);
    Ok(res)
}
