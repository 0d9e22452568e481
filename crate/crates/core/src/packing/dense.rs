//! Embedding a bipartite pattern into a dense pair by dependent random choice.

use serde::{Deserialize, Serialize};

use super::embed::{search_copy, verify_embedding, Embedding, Order};
use super::pattern::PatternGraph;
use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::graph::BipartitePair;
use crate::rng::RngStream;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DenseConfig {
    pub drc_trials: usize,
    /// Search budget per trial; `None` means `10 h`.
    pub bt: Option<usize>,
}

impl Default for DenseConfig {
    fn default() -> Self {
        DenseConfig { drc_trials: 32, bt: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DenseOutcome {
    pub embedding: Option<Embedding>,
    /// Most pattern vertices placed in any trial.
    pub best_partial: usize,
    /// `8 D d^(-D) h`
    pub threshold: f64,
    /// Whether `|A| + |B|` reaches the threshold (the pair's density is not checked).
    pub guaranteed: bool,
    pub trials: usize,
}

/// Repeatedly samples `D` vertices of one side (alternating sides between
/// trials), takes their common neighbourhood `U` on the other side, and
/// searches for a copy with `X` inside `U` and `Y` on the sampled side.
pub fn embed_in_dense(
    p: &BipartitePair<'_>,
    pattern: &PatternGraph,
    d: f64,
    cfg: &DenseConfig,
    rng: &mut RngStream,
) -> Result<DenseOutcome> {
    if !(d > 0.0) {
        return Err(Error::Parameter(format!("density floor d = {d} must be positive")));
    }
    let g = p.graph();
    let h = pattern.h();
    let big_d = pattern.max_degree().max(1);
    let threshold = 8.0 * big_d as f64 * d.powi(-(big_d as i32)) * h as f64;
    let size = p.part_a().len() + p.part_b().len();
    let mut out = DenseOutcome { embedding: None, best_partial: 0, threshold, guaranteed: size as f64 >= threshold, trials: 0 };
    if p.part_a().is_empty() || p.part_b().is_empty() {
        return Ok(out);
    }
    let budget = cfg.bt.unwrap_or(10 * h);
    for t in 0..cfg.drc_trials {
        out.trials = t + 1;
        let (sample_side, u_side) = if t % 2 == 0 { (p.part_b(), p.mask_a()) } else { (p.part_a(), p.mask_b()) };
        let picks = rng.sample_indices(sample_side.len(), big_d.min(sample_side.len()));
        let mut u = u_side.clone();
        for &i in &picks {
            u.intersect_with(g.row(sample_side[i]));
        }
        if u.count() < pattern.x.len() {
            continue;
        }
        let y_side = BitSet::from_indices(g.n(), sample_side.iter().copied());
        match search_copy(g, pattern, &u, &y_side, Order::Random, budget, rng) {
            Ok(map) => {
                let e = Embedding { map };
                verify_embedding(g, pattern, &e).map_err(Error::Precondition)?;
                out.best_partial = h;
                out.embedding = Some(e);
                return Ok(out);
            }
            Err(depth) => out.best_partial = out.best_partial.max(depth),
        }
    }
    Ok(out)
}
