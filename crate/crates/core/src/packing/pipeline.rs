//! Configuration, result types and the partition stage shared by both packers.

use serde::{Deserialize, Serialize};

use super::dense::DenseConfig;
use super::embed::{verify_packing, Embedding};
use super::pattern::PatternGraph;
use crate::audit::Audit;
use crate::decomp::{decompose_edges, DecomposeConfig};
use crate::error::Result;
use crate::graph::{BipartitePair, Graph};
use crate::partition::{
    assign_probabilities, roll_partition, verify_partition, AssignConfig, PartitionCheckConfig, PartitionReport,
    VertexPartition,
};
use crate::rng::{random_balanced_bipartition, Bipartition, RngStream};
use crate::Strictness;

pub const BIPARTITION_STREAM: u64 = 1;
pub const DECOMPOSITION_STREAM: u64 = 2;
pub const DICE_STREAM: u64 = 3;
/// Cluster `i` runs on `CLUSTER_STREAM + i`.
pub const CLUSTER_STREAM: u64 = 1_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PackConfig {
    pub strictness: Strictness,
    /// Degree scale of the host; mean degree when absent.
    pub rho: Option<f64>,
    pub dense: DenseConfig,
    /// Relocations allowed per stuck copy in the super-regular embedder.
    pub repair: usize,
    /// Search budget per copy in the super-regular embedder.
    pub embed_budget: usize,
    /// Vacancy floor for the codegree-chain phase; `h / δ^h` when absent.
    pub floor: Option<f64>,
    pub decompose: DecomposeConfig,
    pub assign: AssignConfig,
    pub check: PartitionCheckConfig,
}

impl Default for PackConfig {
    fn default() -> Self {
        PackConfig {
            strictness: Strictness::Relaxed,
            rho: None,
            dense: DenseConfig::default(),
            repair: 64,
            embed_budget: 2_000,
            floor: None,
            decompose: DecomposeConfig::default(),
            assign: AssignConfig::default(),
            check: PartitionCheckConfig::default(),
        }
    }
}

/// A formula value next to what the run observed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub formula: String,
    pub value: f64,
    pub observed: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ClusterStats {
    pub index: usize,
    pub size_a: usize,
    pub size_b: usize,
    pub copies: usize,
    pub leftover: usize,
    pub absorbed_a: usize,
    pub absorbed_b: usize,
    pub chain_copies: usize,
    pub chain_aborts: usize,
    pub planned_copies: usize,
    pub failed_copies: usize,
    pub repairs: usize,
    pub plan_bound_ok: bool,
    pub stopped_by_vacancy: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PackingResult {
    pub mode: String,
    pub h: usize,
    pub n: usize,
    pub embeddings: Vec<Embedding>,
    pub uncovered: Vec<usize>,
    pub dropped: Option<usize>,
    pub k: usize,
    pub rho: f64,
    pub r: f64,
    pub epsilon_prime: f64,
    /// Exceptional vertices never assigned to a cluster.
    pub exceptional_residue: Vec<usize>,
    pub clusters: Vec<ClusterStats>,
    pub bounds: Vec<BoundCheck>,
    pub assertions: Audit,
    pub partition: Option<PartitionReport>,
    pub log: Vec<String>,
}

impl PackingResult {
    pub fn coverage(&self) -> f64 {
        if self.n == 0 {
            return 1.0;
        }
        1.0 - self.uncovered.len() as f64 / self.n as f64
    }
}

pub(crate) struct Prepared {
    pub bip: Bipartition,
    pub vp: VertexPartition,
    pub report: PartitionReport,
    pub rho: f64,
    pub r: f64,
}

/// Random balanced bipartition, edge decomposition of `G[A, B]`, and the
/// vertex partition with reference degree `r = (1 + d^4/4) ρ / 2`.
pub(crate) fn prepare(g: &Graph, epsilon: f64, d: f64, cfg: &PackConfig, rng: &RngStream) -> Result<Prepared> {
    let bip = random_balanced_bipartition(g, &mut rng.derive(BIPARTITION_STREAM))?;
    let pair = BipartitePair::new(g, bip.a.clone(), bip.b.clone())?;
    let rho = cfg.rho.unwrap_or_else(|| if g.n() == 0 { 0.0 } else { 2.0 * g.edge_count() as f64 / g.n() as f64 });
    let r = ((1.0 + d.powi(4) / 4.0) * rho / 2.0).max(1.0);
    let dec = decompose_edges(&pair, epsilon, d, &cfg.decompose, &rng.derive(DECOMPOSITION_STREAM))?;
    let pa = assign_probabilities(&dec, r, epsilon, &cfg.assign)?;
    let vp = roll_partition(&pa, &rng.derive(DICE_STREAM));
    let report = verify_partition(&pair, &vp, epsilon, d, &cfg.check)?;
    Ok(Prepared { bip, vp, report, rho, r })
}

/// Vertices of `g` in no embedding.
pub(crate) fn uncovered(g: &Graph, embeddings: &[Embedding]) -> Vec<usize> {
    let mut used = vec![false; g.n()];
    for e in embeddings {
        for &v in &e.map {
            if v < g.n() {
                used[v] = true;
            }
        }
    }
    (0..g.n()).filter(|&v| !used[v]).collect()
}

/// Every hard assertion on a packing, recomputed from the result alone so a
/// stored result re-audits to the same verdicts.
pub fn audit_packing(g: &Graph, pattern: &PatternGraph, res: &PackingResult) -> Audit {
    let mut audit = verify_packing(g, pattern, &res.embeddings, &res.uncovered);
    match res.mode.as_str() {
        "balanced" => {
            let eps = res.epsilon_prime;
            let bad = res.clusters.iter().find(|c| {
                c.stopped_by_vacancy && eps < 1.0 && (c.leftover as f64) >= 3.0 * eps * c.size_a.max(c.size_b) as f64
            });
            audit.push("leftover-per-bundle", bad.is_none(), bad.map(|c| format!("bundle {}: {} left", c.index, c.leftover)));
        }
        "unbalanced" => {
            let leftover: usize = res.clusters.iter().map(|c| c.leftover).sum();
            let dropped = usize::from(res.dropped.is_some());
            let accounted = leftover + res.exceptional_residue.len() + dropped;
            audit.push(
                "uncovered-accounting",
                res.uncovered.len() == accounted,
                Some(format!(
                    "uncovered {} vs leftovers {leftover} + unassigned {} + dropped {dropped}",
                    res.uncovered.len(),
                    res.exceptional_residue.len()
                )),
            );
            let bad = res.clusters.iter().find(|c| !c.plan_bound_ok && c.size_a.min(c.size_b) >= pattern.h());
            audit.push("assignment-plan", bad.is_none(), bad.map(|c| format!("cluster {}: {} left", c.index, c.leftover)));
        }
        _ => {}
    }
    audit
}

/// Splits embeddings of a multi-copy pattern into embeddings of one copy.
pub(crate) fn split_copies(map: &[usize], copies: usize) -> Vec<Embedding> {
    let size = map.len() / copies;
    map.chunks(size).map(|c| Embedding { map: c.to_vec() }).collect()
}
