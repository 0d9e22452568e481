//! Packing for patterns with `|X| > |Y|`: exceptional vertices are absorbed
//! into clusters, covered by codegree chains, and the remaining bundle is
//! balanced and filled copy by copy.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::embed::{verify_embedding, Embedding, Placer};
use super::pattern::PatternGraph;
use super::pipeline::{audit_packing, prepare, uncovered, BoundCheck, ClusterStats, PackConfig, PackingResult, CLUSTER_STREAM};
use crate::audit::Audit;
use crate::bitset::{and_count, BitSet};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::partition::VertexPartition;
use crate::regularity::BundleCertificate;
use crate::rng::RngStream;
use crate::Strictness;

/// Exceptional vertices placed next to clusters. Index `i` refers to cluster
/// `i`; index 0 is unused.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Absorption {
    pub s0: Vec<Vec<usize>>,
    pub t0: Vec<Vec<usize>>,
    pub residue: Vec<usize>,
    pub log: Vec<String>,
}

/// Intake cap `⌊12 d^(2/9) m⌋` for a cluster side of size `m`.
pub fn intake_cap(d: f64, m: usize) -> usize {
    (12.0 * d.powf(2.0 / 9.0) * m as f64).floor() as usize
}

/// Assigns each exceptional vertex to an eligible cluster on its own side,
/// least loaded first. `v ∈ A_0` is eligible for `A_i` when
/// `deg(v, B_i) ≥ ρ |B_i| / (3n)`.
pub fn absorb_exceptional(g: &Graph, vp: &VertexPartition, rho: f64, d: f64) -> Absorption {
    let k = vp.k;
    let n = g.n() as f64;
    let mut out = Absorption { s0: vec![Vec::new(); k + 1], t0: vec![Vec::new(); k + 1], ..Default::default() };
    for (side, (own, other)) in [(&vp.a, &vp.b), (&vp.b, &vp.a)].into_iter().enumerate() {
        let masks: Vec<BitSet> = (0..=k).map(|i| BitSet::from_indices(g.n(), other[i].iter().copied())).collect();
        let caps: Vec<usize> = (0..=k).map(|i| intake_cap(d, own[i].len())).collect();
        let mut load = vec![0usize; k + 1];
        let mut overflow = 0;
        let mut exceptional = own[0].clone();
        exceptional.sort_unstable();
        for v in exceptional {
            let eligible: Vec<usize> = (1..=k)
                .filter(|&i| {
                    let deg = and_count(g.row(v), masks[i].words()) as f64;
                    !other[i].is_empty() && deg * 3.0 * n >= rho * other[i].len() as f64
                })
                .collect();
            let pick = eligible.iter().copied().filter(|&i| load[i] < caps[i]).min_by_key(|&i| (load[i], i));
            match pick {
                Some(i) => {
                    load[i] += 1;
                    if side == 0 {
                        out.s0[i].push(v);
                    } else {
                        out.t0[i].push(v);
                    }
                }
                None => {
                    if !eligible.is_empty() {
                        overflow += 1;
                    }
                    out.residue.push(v);
                }
            }
        }
        let name = if side == 0 { "A" } else { "B" };
        if overflow > 0 {
            out.log.push(format!("{name} side: {overflow} eligible vertices left out by the intake cap"));
        }
    }
    let unassigned = out.residue.len();
    if unassigned > 0 {
        out.log.push(format!("{unassigned} exceptional vertices stay unassigned"));
    }
    out.residue.sort_unstable();
    out
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ChainOutcome {
    pub embeddings: Vec<Embedding>,
    /// Vertices of `S_0` still vacant.
    pub residue: Vec<usize>,
    /// Vertices of `T_1` used as images of `Y`.
    pub used_t: Vec<usize>,
    pub aborts: usize,
    pub log: Vec<String>,
}

/// Covers `S_0` by copies of `H` with `X` inside `S_0` and `Y` on a chain
/// `u_1, …, u_|Y|` of `T_1` vertices, each of maximum degree into the common
/// neighbourhood of the previous ones. A chain whose common neighbourhood
/// drops below `δ^i |S'_0|` aborts the phase. Stops once fewer than `floor`
/// vertices of `S_0` are vacant (`h / δ^h` by default).
pub fn moho_embed(g: &Graph, s0: &[usize], t1: &[usize], h: &PatternGraph, delta: f64, floor: Option<f64>) -> ChainOutcome {
    let floor = floor.unwrap_or_else(|| h.h() as f64 / delta.powi(h.h() as i32));
    let mut out = ChainOutcome::default();
    let mut vacant_s = BitSet::from_indices(g.n(), s0.iter().copied());
    let mut vacant_t: Vec<usize> = t1.to_vec();
    vacant_t.sort_unstable();
    let (nx, ny) = (h.x.len(), h.y.len());
    loop {
        let size = vacant_s.count();
        if size == 0 || (size as f64) < floor || vacant_t.len() < ny || size < nx {
            break;
        }
        let mut common = vacant_s.clone();
        let mut chain: Vec<usize> = Vec::with_capacity(ny);
        let mut aborted = false;
        for i in 1..=ny {
            let best = vacant_t
                .iter()
                .copied()
                .filter(|u| !chain.contains(u))
                .map(|u| (and_count(g.row(u), common.words()), u))
                .max_by_key(|&(deg, u)| (deg, std::cmp::Reverse(u)));
            let Some((deg, u)) = best else {
                aborted = true;
                break;
            };
            if (deg as f64) < delta.powi(i as i32) * size as f64 {
                out.log.push(format!("chain step {i}: best degree {deg} < delta^{i} * {size}"));
                aborted = true;
                break;
            }
            common.intersect_with(g.row(u));
            chain.push(u);
        }
        if !aborted && common.count() < nx {
            out.log.push(format!("common neighbourhood {} smaller than |X| = {nx}", common.count()));
            aborted = true;
        }
        if aborted {
            out.aborts += 1;
            break;
        }
        let mut map = vec![usize::MAX; h.h()];
        for (&y, &u) in h.y.iter().zip(&chain) {
            map[y] = u;
        }
        for (&x, v) in h.x.iter().zip(common.iter()) {
            map[x] = v;
            vacant_s.remove(v);
        }
        vacant_t.retain(|u| !chain.contains(u));
        out.used_t.extend(&chain);
        let e = Embedding { map };
        debug_assert!(verify_embedding(g, h, &e).is_ok());
        out.embeddings.push(e);
    }
    out.residue = vacant_s.to_vec();
    out
}

/// How many copies go into `(S_2, T_2)` and in which orientation.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssignmentPlan {
    pub s_size: usize,
    pub t_size: usize,
    /// `||S_2| − |T_2||`.
    pub imbalance: usize,
    /// True when `S_2` is the larger side (ties count as S).
    pub larger_is_s: bool,
    /// Copies of `H` with `X` on the larger side.
    pub balancing: usize,
    /// Copies of the doubled pattern, two `H` copies in opposite orientations each.
    pub doubled: usize,
    /// Extra single copies; `true` puts `X` on S.
    pub top_up: Vec<bool>,
    pub assigned: usize,
    /// Fewer than `h` vertices left unassigned.
    pub bound_holds: bool,
    /// Fewer than `h + Δ_H` left; divisibility can rule out anything better
    /// (two sides of 193 and `K_{4,1}` leave 6).
    pub within_slack: bool,
    /// The smaller side ran out before the imbalance was worked off.
    pub capacity_limited: bool,
}

impl AssignmentPlan {
    pub fn copies(&self) -> usize {
        self.balancing + 2 * self.doubled + self.top_up.len()
    }

    /// Orientation of every planned copy, `true` meaning `X` on S.
    pub fn orientations(&self) -> Vec<bool> {
        let mut out = vec![self.larger_is_s; self.balancing];
        for _ in 0..self.doubled {
            out.push(true);
            out.push(false);
        }
        out.extend(&self.top_up);
        out
    }
}

pub fn balance_assignment(s_size: usize, t_size: usize, h: &PatternGraph) -> Result<AssignmentPlan> {
    let dh = h.delta_h();
    if dh == 0 {
        return Err(Error::BalancedPattern);
    }
    let (nx, ny) = (h.x.len(), h.y.len());
    let larger_is_s = s_size >= t_size;
    let (mut big, mut small) = if larger_is_s { (s_size, t_size) } else { (t_size, s_size) };
    let imbalance = big - small;
    let wanted = imbalance / dh;
    let mut balancing = wanted.min(big / nx.max(1));
    if let Some(cap) = small.checked_div(ny) {
        balancing = balancing.min(cap);
    }
    big -= balancing * nx;
    small -= balancing * ny;
    let hh = h.h();
    let doubled = big.min(small) / hh;
    big -= doubled * hh;
    small -= doubled * hh;
    let mut top_up = Vec::new();
    loop {
        let (x_big, fits) = if big >= small { (true, big >= nx && small >= ny) } else { (false, small >= nx && big >= ny) };
        if !fits {
            break;
        }
        if x_big {
            big -= nx;
            small -= ny;
        } else {
            small -= nx;
            big -= ny;
        }
        top_up.push(x_big == larger_is_s);
    }
    let total = s_size + t_size;
    let assigned = total - big - small;
    Ok(AssignmentPlan {
        s_size,
        t_size,
        imbalance,
        larger_is_s,
        balancing,
        doubled,
        top_up,
        assigned,
        bound_holds: assigned + hh > total,
        within_slack: assigned + hh + dh > total,
        capacity_limited: balancing < wanted,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuperRegularConfig {
    /// Proceed without a certificate.
    pub assume: bool,
    pub budget: usize,
    pub repair: usize,
}

impl Default for SuperRegularConfig {
    fn default() -> Self {
        SuperRegularConfig { assume: false, budget: 2_000, repair: 64 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SuperRegularOutcome {
    pub embeddings: Vec<Embedding>,
    pub planned: usize,
    pub failed: usize,
    pub repairs: usize,
    pub log: Vec<String>,
}

/// Places the planned copies in random order with `X` on the prescribed side,
/// relocating earlier copies when a copy gets stuck. Every returned embedding
/// has been re-verified.
pub fn embed_super_regular(
    g: &Graph,
    s: &[usize],
    t: &[usize],
    h: &PatternGraph,
    plan: &AssignmentPlan,
    certificate: Option<&BundleCertificate>,
    cfg: &SuperRegularConfig,
    rng: &mut RngStream,
) -> Result<SuperRegularOutcome> {
    if certificate.is_none() && !cfg.assume {
        return Err(Error::Precondition("super-regular placement needs a certificate or assume = true".into()));
    }
    let mut orientations = plan.orientations();
    rng.shuffle(&mut orientations);
    let mut placer = Placer::new(g, h, s, t);
    let mut out = SuperRegularOutcome { planned: orientations.len(), ..Default::default() };
    for x_on_s in orientations {
        if !placer.place(x_on_s, cfg.budget, cfg.repair, rng) {
            out.failed += 1;
        }
    }
    if out.failed > 0 {
        out.log.push(format!("{} of {} planned copies not placed", out.failed, out.planned));
    }
    out.repairs = placer.repairs;
    for map in placer.copies {
        let e = Embedding { map };
        if let Err(msg) = verify_embedding(g, h, &e) {
            return Err(Error::Precondition(format!("placed copy failed verification: {msg}")));
        }
        out.embeddings.push(e);
    }
    Ok(out)
}

/// Natural log of `(8h/d) d^(-100/ε²)`.
pub fn ln_leftover_constant(h: usize, epsilon: f64, d: f64) -> f64 {
    (8.0 * h as f64 / d).ln() + 100.0 / (epsilon * epsilon) * (1.0 / d).ln()
}

fn strict_gate(g: &Graph, epsilon: f64, d: f64, rho: f64) -> Result<()> {
    let n = g.n() as f64;
    if !(epsilon > 0.0 && epsilon < 0.1) {
        return Err(Error::Feasibility(format!("epsilon = {epsilon} outside (0, 1/10)")));
    }
    if !(10.0 * epsilon.powf(0.2) <= d && d < 0.01) {
        return Err(Error::Feasibility(format!("d = {d} outside [10 eps^(1/5), 1/100)")));
    }
    if rho < 10.0 * d.powf(1.0 / 9.0) * n {
        return Err(Error::Feasibility(format!("rho = {rho} < 10 d^(1/9) n")));
    }
    let ln_n_min = 150.0 * (1.0 / d).ln() / (epsilon * epsilon);
    if n.ln() <= ln_n_min {
        return Err(Error::Feasibility(format!("n = {n} <= exp(150 ln(1/d) / eps^2) = e^{ln_n_min:.1}")));
    }
    Ok(())
}

struct ClusterRun {
    stats: ClusterStats,
    embeddings: Vec<Embedding>,
    log: Vec<String>,
}

#[allow(clippy::too_many_arguments)]
fn pack_cluster(
    g: &Graph,
    h: &PatternGraph,
    index: usize,
    (a, b): (&[usize], &[usize]),
    (s0, t0): (&[usize], &[usize]),
    delta: f64,
    certificate: Option<&BundleCertificate>,
    cfg: &PackConfig,
    mut rng: RngStream,
) -> Result<ClusterRun> {
    let mut stats = ClusterStats {
        index,
        size_a: a.len(),
        size_b: b.len(),
        absorbed_a: s0.len(),
        absorbed_b: t0.len(),
        ..Default::default()
    };
    let mut log = Vec::new();
    let s1: Vec<usize> = a.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
    let t1: Vec<usize> = b.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
    let first = moho_embed(g, s0, &t1, h, delta, cfg.floor);
    let second = moho_embed(g, t0, &s1, h, delta, cfg.floor);
    let mut embeddings = Vec::new();
    let mut used = std::collections::HashSet::new();
    for (tag, chain) in [("S0", first), ("T0", second)] {
        stats.chain_aborts += chain.aborts;
        stats.chain_copies += chain.embeddings.len();
        for line in chain.log {
            log.push(format!("cluster {index} {tag}: {line}"));
        }
        for e in chain.embeddings {
            used.extend(e.map.iter().copied());
            embeddings.push(e);
        }
    }
    let s2: Vec<usize> = a.iter().chain(s0).copied().filter(|v| !used.contains(v)).collect();
    let t2: Vec<usize> = b.iter().chain(t0).copied().filter(|v| !used.contains(v)).collect();
    let plan = balance_assignment(s2.len(), t2.len(), h)?;
    stats.plan_bound_ok = plan.within_slack || plan.capacity_limited;
    if plan.capacity_limited {
        log.push(format!("cluster {index}: sides {} and {} too uneven to balance", s2.len(), t2.len()));
    }
    stats.planned_copies = plan.copies();
    let sr_cfg = SuperRegularConfig {
        assume: cfg.strictness == Strictness::Relaxed,
        budget: cfg.embed_budget,
        repair: cfg.repair,
    };
    let placed = if s2.is_empty() && t2.is_empty() {
        SuperRegularOutcome::default()
    } else {
        embed_super_regular(g, &s2, &t2, h, &plan, certificate, &sr_cfg, &mut rng)?
    };
    stats.failed_copies = placed.failed;
    stats.repairs = placed.repairs;
    for line in placed.log {
        log.push(format!("cluster {index}: {line}"));
    }
    let placed_vertices = placed.embeddings.len() * h.h();
    embeddings.extend(placed.embeddings);
    stats.copies = embeddings.len();
    stats.leftover = s2.len() + t2.len() - placed_vertices;
    Ok(ClusterRun { stats, embeddings, log })
}

/// Unbalanced-pattern packing. Uncovered vertices are the per-cluster
/// leftovers, the exceptional vertices no cluster could take, and the vertex
/// dropped for odd `n`.
pub fn pack_unbalanced(g: &Graph, h: &PatternGraph, epsilon: f64, d: f64, cfg: &PackConfig, rng: &RngStream) -> Result<PackingResult> {
    if h.is_balanced() {
        return Err(Error::NeedsUnbalanced);
    }
    let rho_hint = cfg.rho.unwrap_or_else(|| if g.n() == 0 { 0.0 } else { 2.0 * g.edge_count() as f64 / g.n() as f64 });
    if cfg.strictness == Strictness::Strict {
        strict_gate(g, epsilon, d, rho_hint)?;
    }
    let prep = prepare(g, epsilon, d, cfg, rng)?;
    let absorption = absorb_exceptional(g, &prep.vp, prep.rho.max(1.0), d);
    let delta = d.powf(1.0 / 9.0);
    let mut log = vec![format!(
        "bipartition {} + {}, K = {}, exceptional {}, unassigned after absorption {}",
        prep.bip.a.len(),
        prep.bip.b.len(),
        prep.vp.k,
        prep.vp.exceptional(),
        absorption.residue.len()
    )];
    log.extend(absorption.log.iter().cloned());
    let runs: Vec<Result<ClusterRun>> = (1..=prep.vp.k)
        .into_par_iter()
        .map(|i| {
            pack_cluster(
                g,
                h,
                i,
                (&prep.vp.a[i], &prep.vp.b[i]),
                (&absorption.s0[i], &absorption.t0[i]),
                delta,
                prep.report.certificates.get(i - 1).and_then(|c| c.as_ref()),
                cfg,
                rng.derive(CLUSTER_STREAM + i as u64),
            )
        })
        .collect();
    let mut embeddings = Vec::new();
    let mut clusters = Vec::new();
    for run in runs {
        let run = run?;
        embeddings.extend(run.embeddings);
        log.extend(run.log);
        clusters.push(run.stats);
    }
    let uncovered = uncovered(g, &embeddings);
    let leftover: usize = clusters.iter().map(|c| c.leftover).sum();
    let dropped = usize::from(prep.bip.dropped.is_some());
    let k = prep.vp.k;
    let kh = (k * h.h()) as f64;
    let bounds = vec![
        BoundCheck {
            name: "uncovered inside clusters".into(),
            formula: "K h".into(),
            value: kh,
            observed: leftover as f64,
            holds: leftover as f64 <= kh,
        },
        BoundCheck {
            name: "uncovered vertices".into(),
            formula: "K h + unassigned exceptional + dropped".into(),
            value: kh + (absorption.residue.len() + dropped) as f64,
            observed: uncovered.len() as f64,
            holds: uncovered.len() as f64 <= kh + (absorption.residue.len() + dropped) as f64,
        },
        BoundCheck {
            name: "log of the leftover constant".into(),
            formula: "ln(8h/d) + (100/eps^2) ln(1/d)".into(),
            value: ln_leftover_constant(h.h(), epsilon, d),
            observed: (uncovered.len().max(1) as f64).ln(),
            holds: (uncovered.len().max(1) as f64).ln() <= ln_leftover_constant(h.h(), epsilon, d),
        },
    ];
    let mut res = PackingResult {
        mode: "unbalanced".into(),
        h: h.h(),
        n: g.n(),
        embeddings,
        uncovered,
        dropped: prep.bip.dropped,
        k,
        rho: prep.rho,
        r: prep.r,
        epsilon_prime: prep.report.epsilon_prime,
        exceptional_residue: absorption.residue,
        clusters,
        bounds,
        assertions: Audit::default(),
        partition: Some(prep.report),
        log,
    };
    res.assertions = audit_packing(g, h, &res);
    Ok(res)
}
