//! Randomized vertex partition built from an edge decomposition: every vertex
//! rolls a die whose faces are the pairs containing it (plus "exceptional"),
//! weighted by each pair's share of the reference degree.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::audit::Audit;
use crate::decomp::EdgeDecomposition;
use crate::error::{Error, Result};
use crate::exact;
use crate::graph::BipartitePair;
use crate::regularity::{check_bundle, BundleCertificate, BundleMode, BundleOutcome};
use crate::rng::{bernoulli_subset, RngStream};
use crate::Strictness;

const DICE_STREAM: u64 = 0xd1ce;

/// Die of one vertex: `(pair index, probability)` faces, pair indices from 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Die {
    pub vertex: usize,
    pub faces: Vec<(usize, f64)>,
    pub p0: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Clamp {
    pub vertex: usize,
    pub total: f64,
}

/// Comparison of `p_0(v)` with `deg(v, H_0)/r`, which should sit in
/// `[deg/r, deg/r + d^4]` under the theorem-scale hypotheses.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub hypotheses_hold: bool,
    pub violations: usize,
    pub examples: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityAssignment {
    pub r: f64,
    pub epsilon: f64,
    pub d: f64,
    /// `p(H_i) = (d(H_i) - ε) m_i / r`, stored at `i - 1`.
    pub pair_p: Vec<f64>,
    pub host_a: Vec<usize>,
    pub host_b: Vec<usize>,
    pub dice: Vec<Die>,
    pub clamp_log: Vec<Clamp>,
    pub sandwich: SandwichReport,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AssignConfig {
    /// Totals up to `1 + clamp_tolerance` are renormalized rather than rejected.
    pub clamp_tolerance: f64,
}

impl Default for AssignConfig {
    fn default() -> Self {
        AssignConfig { clamp_tolerance: 0.1 }
    }
}

/// `deg(v, H_0)` for every vertex touched by `H_0`.
pub fn h0_degrees(dec: &EdgeDecomposition) -> HashMap<usize, usize> {
    let mut deg = HashMap::new();
    for &(x, y) in &dec.h0 {
        *deg.entry(x).or_insert(0) += 1;
        *deg.entry(y).or_insert(0) += 1;
    }
    deg
}

pub fn assign_probabilities(dec: &EdgeDecomposition, r: f64, epsilon: f64, cfg: &AssignConfig) -> Result<ProbabilityAssignment> {
    if !(r >= 1.0) {
        return Err(Error::Parameter(format!("r = {r} < 1")));
    }
    let mut pair_p = Vec::with_capacity(dec.pairs.len());
    let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, p) in dec.pairs.iter().enumerate() {
        let m = p.a.len();
        if m == 0 || m != p.b.len() {
            return Err(Error::Unbalanced { a: p.a.len(), b: p.b.len() });
        }
        let density = p.edges.len() as f64 / (m * m) as f64;
        let prob = ((density - epsilon) * m as f64 / r).max(0.0);
        if prob > 1.0 {
            return Err(Error::Probability(format!("p(H_{}) = {prob:.6} > 1", i + 1)));
        }
        pair_p.push(prob);
        for &v in p.a.iter().chain(&p.b) {
            members.entry(v).or_default().push(i + 1);
        }
    }
    let n = dec.host_a.len() as f64;
    let d = dec.d;
    let hypotheses_hold = r >= d.cbrt() * n && 10.0 * epsilon.powf(0.2) <= d && d < 1.0 / 3.0;
    let h0 = h0_degrees(dec);
    let mut dice = Vec::with_capacity(dec.host_a.len() + dec.host_b.len());
    let mut clamp_log = Vec::new();
    let mut sandwich = SandwichReport { hypotheses_hold, ..Default::default() };
    for &v in dec.host_a.iter().chain(&dec.host_b) {
        let faces: Vec<(usize, f64)> = members
            .get(&v)
            .map(|ids| ids.iter().map(|&i| (i, pair_p[i - 1])).collect())
            .unwrap_or_default();
        let total: f64 = faces.iter().map(|f| f.1).sum();
        let die = if total > 1.0 + cfg.clamp_tolerance {
            return Err(Error::Probability(format!("vertex {v}: sum of p(H_i) = {total:.6} > 1")));
        } else if total > 1.0 {
            clamp_log.push(Clamp { vertex: v, total });
            Die { vertex: v, faces: faces.into_iter().map(|(i, p)| (i, p / total)).collect(), p0: 0.0 }
        } else {
            Die { vertex: v, faces, p0: 1.0 - total }
        };
        let base = *h0.get(&v).unwrap_or(&0) as f64 / r;
        if die.p0 < base - 1e-12 || die.p0 > base + d.powi(4) + 1e-12 {
            sandwich.violations += 1;
            if sandwich.examples.len() < 8 {
                sandwich.examples.push(v);
            }
        }
        dice.push(die);
    }
    Ok(ProbabilityAssignment {
        r,
        epsilon,
        d,
        pair_p,
        host_a: dec.host_a.clone(),
        host_b: dec.host_b.clone(),
        dice,
        clamp_log,
        sandwich,
    })
}

/// Clusters `A_0..A_K`, `B_0..B_K`; index 0 holds the exceptional vertices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexPartition {
    pub k: usize,
    pub epsilon: f64,
    pub d: f64,
    pub a: Vec<Vec<usize>>,
    pub b: Vec<Vec<usize>>,
}

impl VertexPartition {
    pub fn exceptional(&self) -> usize {
        self.a[0].len() + self.b[0].len()
    }
}

/// Face of `die` hit by the uniform `u`: faces in increasing pair index, then 0.
pub fn roll(die: &Die, u: f64) -> usize {
    let mut acc = 0.0;
    for &(i, p) in &die.faces {
        acc += p;
        if u < acc {
            return i;
        }
    }
    0
}

pub fn roll_partition(pa: &ProbabilityAssignment, rng: &RngStream) -> VertexPartition {
    let stream = rng.derive(DICE_STREAM);
    let k = pa.pair_p.len();
    let mut a = vec![Vec::new(); k + 1];
    let mut b = vec![Vec::new(); k + 1];
    let split = pa.host_a.len();
    for (pos, die) in pa.dice.iter().enumerate() {
        let face = roll(die, stream.uniform_at(die.vertex as u64));
        if pos < split {
            a[face].push(die.vertex);
        } else {
            b[face].push(die.vertex);
        }
    }
    for c in a.iter_mut().chain(b.iter_mut()) {
        c.sort_unstable();
    }
    VertexPartition { k, epsilon: pa.epsilon, d: pa.d, a, b }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PartitionCheckConfig {
    /// Relaxed bound on `|A_0 ∪ B_0|` as a fraction of `|A ∪ B|`.
    pub exceptional_fraction: f64,
    /// Relaxed lower bound on cluster sizes.
    pub cluster_floor: usize,
}

impl Default for PartitionCheckConfig {
    fn default() -> Self {
        PartitionCheckConfig { exceptional_fraction: 0.5, cluster_floor: 8 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionReport {
    pub audit: Audit,
    pub n: usize,
    pub exceptional: usize,
    /// `8 d^(1/3) n`
    pub exceptional_bound: f64,
    pub exceptional_relaxed_bound: f64,
    /// `d^(101/ε²) n / 4`
    pub cluster_floor: f64,
    /// `(64 ε)^(1/5)`
    pub epsilon_prime: f64,
    #[serde(deserialize_with = "crate::json_float::nullable_vec")]
    pub densities: Vec<f64>,
    pub certificates: Vec<Option<BundleCertificate>>,
}

/// Checks a partition of `g`'s sides. Anything other than a disjoint cover is
/// an error; every quantitative clause is a report entry.
pub fn verify_partition(
    g: &BipartitePair<'_>,
    vp: &VertexPartition,
    epsilon: f64,
    d: f64,
    cfg: &PartitionCheckConfig,
) -> Result<PartitionReport> {
    for (side, clusters, part) in [("A", &vp.a, g.part_a()), ("B", &vp.b, g.part_b())] {
        if clusters.len() != vp.k + 1 {
            return Err(Error::PartitionStructure(format!("side {side} has {} clusters, expected {}", clusters.len(), vp.k + 1)));
        }
        let mut owner: HashMap<usize, usize> = HashMap::new();
        for (i, c) in clusters.iter().enumerate() {
            for &v in c {
                if part.binary_search(&v).is_err() {
                    return Err(Error::PartitionStructure(format!("vertex {v} in {side}_{i} is not in side {side}")));
                }
                if let Some(j) = owner.insert(v, i) {
                    return Err(Error::PartitionStructure(format!("vertex {v} in both {side}_{j} and {side}_{i}")));
                }
            }
        }
        if let Some(v) = part.iter().find(|v| !owner.contains_key(v)) {
            return Err(Error::PartitionStructure(format!("vertex {v} of side {side} is in no cluster")));
        }
    }
    let mut audit = Audit::default();
    audit.pass("cover");
    let n = g.part_a().len();
    let exceptional = vp.exceptional();
    let exceptional_bound = 8.0 * d.cbrt() * n as f64;
    let exceptional_relaxed_bound = cfg.exceptional_fraction * (g.part_a().len() + g.part_b().len()) as f64;
    let summary = format!("|A_0 ∪ B_0| = {exceptional}");
    audit.push("exceptional-size", (exceptional as f64) < exceptional_bound, Some(format!("{summary}, bound {exceptional_bound:.3}")));
    audit.push(
        "exceptional-size-relaxed",
        (exceptional as f64) < exceptional_relaxed_bound,
        Some(format!("{summary}, bound {exceptional_relaxed_bound:.3}")),
    );
    let cluster_floor = (101.0 / (epsilon * epsilon) * d.ln()).exp() * n as f64 / 4.0;
    let smallest = (1..=vp.k).map(|i| vp.a[i].len().min(vp.b[i].len())).min();
    let floor_detail = smallest.map(|s| format!("smallest cluster {s}"));
    audit.push("cluster-size", smallest.is_none_or(|s| s as f64 >= cluster_floor), floor_detail.clone());
    audit.push("cluster-size-relaxed", smallest.is_none_or(|s| s >= cfg.cluster_floor), floor_detail);
    let e2 = exact::q(2.0 * epsilon * epsilon);
    let unbalanced = (1..=vp.k).find(|&i| {
        let (x, y) = (vp.a[i].len() as i64, vp.b[i].len() as i64);
        exact::qi((x - y).abs()) > &e2 * exact::qi(x)
    });
    match unbalanced {
        None => audit.pass("cluster-balance"),
        Some(i) => audit.fail("cluster-balance", format!("|A_{i}| = {}, |B_{i}| = {}", vp.a[i].len(), vp.b[i].len())),
    }
    let epsilon_prime = (64.0 * epsilon).powf(0.2);
    let eta = 4.0 * epsilon;
    let checked: Vec<(f64, std::result::Result<BundleCertificate, String>)> = (1..=vp.k)
        .into_par_iter()
        .map(|i| {
            let pair = BipartitePair::new(g.graph(), vp.a[i].clone(), vp.b[i].clone()).map_err(|e| e.to_string())?;
            let di = pair.density().map_err(|e| e.to_string())?;
            let outcome = check_bundle(&pair, epsilon_prime, di, BundleMode::Kr { eta }).map_err(|e| e.to_string())?;
            match outcome {
                BundleOutcome::Certified(c) => Ok((di, Ok(c))),
                BundleOutcome::Refuted(r) => Ok((di, Err(format!("{r:?}")))),
            }
        })
        .map(|r: std::result::Result<_, String>| r.unwrap_or_else(|e| (f64::NAN, Err(e))))
        .collect();
    let mut certificates = Vec::with_capacity(vp.k);
    let mut densities = Vec::with_capacity(vp.k);
    let mut bundle_fail = None;
    let mut density_fail = None;
    for (i, (di, res)) in checked.into_iter().enumerate() {
        densities.push(di);
        match res {
            Ok(c) => certificates.push(Some(c)),
            Err(e) => {
                certificates.push(None);
                bundle_fail.get_or_insert(format!("pair {}: {e}", i + 1));
            }
        }
        if !(di >= d - 2.0 * epsilon) {
            density_fail.get_or_insert(format!("pair {}: density {di:.6} < d - 2 eps", i + 1));
        }
    }
    match bundle_fail {
        None => audit.pass("bundle"),
        Some(s) => audit.fail("bundle", s),
    }
    match density_fail {
        None => audit.pass("bundle-density"),
        Some(s) => audit.fail("bundle-density", s),
    }
    Ok(PartitionReport {
        audit,
        n,
        exceptional,
        exceptional_bound,
        exceptional_relaxed_bound,
        cluster_floor,
        epsilon_prime,
        densities,
        certificates,
    })
}

/// Accounting for vertices with large degree in `H_0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExceptionalReport {
    pub psi: f64,
    pub n: usize,
    pub r: f64,
    /// `{v : deg(v, H_0) >= ψ n}`
    pub high_degree: Vec<usize>,
    /// `2 e(H_0) / (ψ n)`
    pub high_degree_bound: f64,
    pub h0_edges: usize,
    pub high_degree_sum: usize,
    /// `|L| ψ n <= Σ_L deg(v, H_0) <= 2 e(H_0)`, checked exactly.
    pub counting_identity: bool,
    pub observed: usize,
    /// `8 d^(1/3) n`
    pub observed_bound: f64,
    pub exceeds_observed_bound: bool,
    /// `2 d^4 n + 2 ψ n² / r + 5 d n / ψ`
    pub expectation_bound: f64,
}

pub fn exceptional_report(dec: &EdgeDecomposition, vp: &VertexPartition, d: f64, psi: Option<f64>, r: f64) -> Result<ExceptionalReport> {
    let psi = psi.unwrap_or_else(|| d.powf(2.0 / 3.0));
    if !(psi > 0.0 && psi < 1.0) {
        return Err(Error::Parameter(format!("psi = {psi} outside (0, 1)")));
    }
    let n = dec.host_a.len();
    let deg = h0_degrees(dec);
    let cut = exact::q(psi) * exact::qi(n as i64);
    let mut high_degree: Vec<usize> =
        deg.iter().filter(|(_, &k)| exact::qi(k as i64) >= cut).map(|(&v, _)| v).collect();
    high_degree.sort_unstable();
    let high_degree_sum: usize = high_degree.iter().map(|v| deg[v]).sum();
    let h0_edges = dec.h0.len();
    let counting_identity = exact::qi(high_degree.len() as i64) * &cut <= exact::qi(high_degree_sum as i64)
        && high_degree_sum <= 2 * h0_edges;
    let nf = n as f64;
    let observed = vp.exceptional();
    let observed_bound = 8.0 * d.cbrt() * nf;
    Ok(ExceptionalReport {
        psi,
        n,
        r,
        high_degree_bound: 2.0 * h0_edges as f64 / (psi * nf),
        high_degree,
        h0_edges,
        high_degree_sum,
        counting_identity,
        observed,
        observed_bound,
        exceeds_observed_bound: observed as f64 >= observed_bound,
        expectation_bound: 2.0 * d.powi(4) * nf + 2.0 * psi * nf * nf / r + 5.0 * d * nf / psi,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub size_a: usize,
    pub size_b: usize,
    pub size_ok: bool,
    /// Vertices whose degree leaves `(d ± 2ε)` times the opposite sample.
    pub degree_failures: usize,
    pub degree_ok: bool,
    pub density: f64,
    pub density_ok: bool,
    pub bundle_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub k: usize,
    pub p: f64,
    pub epsilon: f64,
    pub d: f64,
    pub epsilon_prime: f64,
    pub eta: f64,
    pub trials: usize,
    pub size_passes: usize,
    pub degree_passes: usize,
    pub density_passes: usize,
    pub bundle_passes: usize,
    pub warnings: Vec<String>,
    pub outcomes: Vec<TrialOutcome>,
}

/// Samples `X_R ⊆ X`, `Y_R ⊆ Y` with probability `p` per vertex, `trials`
/// times, and records which conclusions of the sampling lemma hold.
pub fn sampled_bundle_trial(
    f: &BipartitePair<'_>,
    epsilon: f64,
    d: f64,
    p: f64,
    rng: &RngStream,
    trials: usize,
    strictness: Strictness,
) -> Result<TrialReport> {
    let k = f.part_a().len();
    if k != f.part_b().len() || k < 2 {
        return Err(Error::Unbalanced { a: k, b: f.part_b().len() });
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::SamplingHypothesis(format!("p = {p} outside (0, 1]")));
    }
    let ln_k = (k as f64).ln();
    let mut warnings = Vec::new();
    if !(d > 0.0 && d < 1.0 / 3.0) {
        warnings.push(format!("d = {d} outside (0, 1/3)"));
    }
    if !(epsilon > 1.0 / ln_k.sqrt()) {
        warnings.push(format!("epsilon = {epsilon} <= 1/sqrt(ln k) = {:.4}", 1.0 / ln_k.sqrt()));
    }
    if epsilon > d / 10.0 + 1e-12 {
        warnings.push(format!("epsilon = {epsilon} > d/10"));
    }
    let p_floor = 30.0 * ln_k.powi(3) / k as f64;
    if p < p_floor {
        warnings.push(format!("p = {p} < 30 ln^3 k / k = {p_floor:.4}"));
    }
    if strictness == Strictness::Strict && !warnings.is_empty() {
        return Err(Error::SamplingHypothesis(warnings.join("; ")));
    }
    let epsilon_prime = (64.0 * epsilon).powf(0.2);
    let eta = 4.0 * epsilon;
    let pk = exact::q(p) * exact::qi(k as i64);
    let e2 = exact::q(epsilon * epsilon);
    let size_lo = (exact::one() - &e2) * &pk;
    let size_hi = (exact::one() + &e2) * &pk;
    let (dq, e2q) = (exact::q(d), exact::q(2.0 * epsilon));
    let (lo_frac, hi_frac) = (&dq - &e2q, &dq + &e2q);
    let outcomes: Vec<TrialOutcome> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut s = rng.derive(t);
            let x = bernoulli_subset(f.part_a(), p, &mut s);
            let y = bernoulli_subset(f.part_b(), p, &mut s);
            let in_window = |s: usize| {
                let s = exact::qi(s as i64);
                s >= size_lo && s <= size_hi
            };
            let size_ok = in_window(x.len()) && in_window(y.len());
            if x.is_empty() || y.is_empty() {
                return TrialOutcome {
                    size_a: x.len(),
                    size_b: y.len(),
                    size_ok,
                    degree_failures: x.len() + y.len(),
                    degree_ok: false,
                    density: 0.0,
                    density_ok: false,
                    bundle_ok: false,
                };
            }
            let sub = f.induced(&x, &y).expect("samples are subsets");
            let window = |other: usize| {
                let o = exact::qi(other as i64);
                (exact::at_least(&(&lo_frac * &o)), exact::at_most(&(&hi_frac * &o)))
            };
            let (alo, ahi) = window(y.len());
            let (blo, bhi) = window(x.len());
            let degree_failures = sub.degrees_a().iter().filter(|&&g| (g as i64) < alo || g as i64 > ahi).count()
                + sub.degrees_b().iter().filter(|&&g| (g as i64) < blo || g as i64 > bhi).count();
            let rho = exact::ratio(sub.edge_count(), x.len() * y.len());
            let density_ok = rho >= lo_frac && rho <= hi_frac;
            let bundle_ok = matches!(
                check_bundle(&sub, epsilon_prime, d - 2.0 * epsilon, BundleMode::Kr { eta }),
                Ok(BundleOutcome::Certified(_))
            );
            TrialOutcome {
                size_a: x.len(),
                size_b: y.len(),
                size_ok,
                degree_failures,
                degree_ok: degree_failures == 0,
                density: exact::to_f64(&rho),
                density_ok,
                bundle_ok,
            }
        })
        .collect();
    let count = |f: fn(&TrialOutcome) -> bool| outcomes.iter().filter(|o| f(o)).count();
    Ok(TrialReport {
        k,
        p,
        epsilon,
        d,
        epsilon_prime,
        eta,
        trials,
        size_passes: count(|o| o.size_ok),
        degree_passes: count(|o| o.degree_ok),
        density_passes: count(|o| o.density_ok),
        bundle_passes: count(|o| o.bundle_ok),
        warnings,
        outcomes,
    })
}
