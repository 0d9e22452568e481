//! `run`: decompose, partition, verify and optionally pack from one config file.

use std::path::{Path, PathBuf};

use bundle_decomp_core::audit::Audit;
use serde::Deserialize;
use serde_json::json;

use crate::args::{DecomposeFlags, PackFlags, PackMode, RunArgs};
use crate::commands::{feasibility_gate, load_pattern, pack_config, run_pack, run_partition};
use crate::report::*;

#[derive(Debug, Deserialize, serde::Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Bipartite pair file, relative to the config's directory.
    pub input: PathBuf,
    pub epsilon: f64,
    pub d: f64,
    #[serde(default)]
    pub r: Option<f64>,
    #[serde(default)]
    pub psi: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub strict: bool,
    #[serde(default)]
    pub decompose: DecomposeFlags,
    #[serde(default)]
    pub pack: Option<PackSection>,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Deserialize, serde::Serialize)]
#[serde(deny_unknown_fields)]
pub struct PackSection {
    /// Pattern edge list, relative to the config's directory.
    #[serde(default)]
    pub pattern: Option<PathBuf>,
    #[serde(default)]
    pub pattern_name: Option<String>,
    #[serde(default = "balanced")]
    pub mode: PackMode,
    #[serde(default)]
    pub flags: PackFlags,
}

fn balanced() -> PackMode {
    PackMode::Balanced
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn prefixed(into: &mut Audit, prefix: &str, from: Audit) {
    for mut c in from.checks {
        c.name = format!("{prefix}.{}", c.name);
        into.checks.push(c);
    }
}

pub fn run(a: &RunArgs) -> CmdResult<i32> {
    let raw = read_json(&a.config)?;
    let cfg: RunConfig = typed(&raw, "")?;
    let base = a.config.parent().map(Path::to_path_buf).unwrap_or_default();
    let host = read_pair(&resolve(&base, &cfg.input))?;
    let pair = host.pair();
    if cfg.strict {
        feasibility_gate(cfg.epsilon, cfg.d, pair.part_a().len(), pair.density().unwrap_or(0.0), true)?;
    }
    let mut rep = Report::new("run", &cfg, Some(cfg.seed), cfg.strict);
    let part = run_partition(&mut rep, &pair, cfg.epsilon, cfg.d, cfg.r, cfg.psi, &cfg.decompose, cfg.strict, cfg.seed)?;
    prefixed(&mut rep.assertions, "partition", part.checks.hard);
    prefixed(&mut rep.clauses, "partition", part.checks.soft);
    let mut results = json!({
        "k": part.vp.k,
        "r": part.r,
        "pair_p": part.pair_p,
        "clamped_dice": part.clamps,
        "partition": part.vp,
        "partition_report": part.checks.report,
        "exceptional": part.checks.exceptional,
        "decomposition": part.dec,
    });
    if let Some(p) = &cfg.pack {
        let file = p.pattern.as_ref().map(|f| resolve(&base, f));
        let h = load_pattern(file.as_deref(), p.pattern_name.as_deref(), p.mode)?;
        let pc = pack_config(&p.flags, cfg.strict);
        let res = run_pack(&mut rep, &host.graph, &h, p.mode, cfg.epsilon, cfg.d, &pc, cfg.seed)?;
        prefixed(&mut rep.assertions, "pack", res.assertions.clone());
        if let Some(pr) = &res.partition {
            prefixed(&mut rep.clauses, "pack", pr.audit.clone());
        }
        rep.bounds.extend(res.bounds.iter().cloned());
        results["packing"] = json!({ "copies": res.embeddings.len(), "coverage": res.coverage(), "pattern": h, "result": res });
    }
    rep.set_results(results);
    let out = a.out.clone().or_else(|| cfg.out.as_ref().map(|o| resolve(&base, o)));
    rep.emit(out.as_deref())
}
