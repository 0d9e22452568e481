//! Regular-pair certification.
//!
//! Three routes decide quasirandomness of a pair: exhaustive subset
//! enumeration (small pairs only), the codegree criterion of Kohayakawa and
//! Rödl (one-directional: failure is *inconclusive*, not a refutation), and an
//! explicit assumption. Degree windows and bundle extraction sit on top.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bitset::and_count;
use crate::error::{Error, Result};
use crate::exact::{self, Q};
use crate::graph::{BipartitePair, LocalPair};
use crate::Strictness;

pub const DEFAULT_BRUTE_CAP: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictKind {
    Certified,
    Refuted,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    BruteForce,
    Kr,
    Assumed,
}

/// Sub-pair `(X, Y)` whose density deviates from the pair's by more than ε.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub x: Vec<usize>,
    pub y: Vec<usize>,
    pub density: f64,
    pub deviation: f64,
}

/// Counts behind a codegree-criterion decision.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KrStats {
    pub eta: f64,
    /// Vertices of A passing the degree condition.
    pub qualifying: usize,
    /// Unordered pairs passing both conditions.
    pub good_pairs: u64,
    /// `|D|` must exceed this value.
    pub required_above: f64,
    pub degree_floor: i64,
    pub codegree_ceiling: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularityVerdict {
    pub kind: VerdictKind,
    pub method: Method,
    pub epsilon: f64,
    pub density: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kr: Option<KrStats>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl RegularityVerdict {
    pub fn is_certified(&self) -> bool {
        self.kind == VerdictKind::Certified
    }

    pub fn assumed(epsilon: f64, density: f64) -> Self {
        RegularityVerdict {
            kind: VerdictKind::Certified,
            method: Method::Assumed,
            epsilon,
            density,
            kr: None,
            witness: None,
        }
    }

    pub fn eta(&self) -> Option<f64> {
        self.kr.as_ref().map(|k| k.eta)
    }
}

/// ε certified by the codegree criterion at `eta`: `(16 eta)^(1/5)`.
pub fn kr_epsilon(eta: f64) -> f64 {
    (16.0 * eta).powf(0.2)
}

/// The `eta` whose codegree certificate is exactly `epsilon`.
pub fn kr_eta_for(epsilon: f64) -> f64 {
    epsilon.powi(5) / 16.0
}

/// Exhaustive ε-regularity check over all `X ⊆ A`, `Y ⊆ B` with
/// `|X| >= ε|A|` and `|Y| >= ε|B|`.
///
/// For a fixed `X` the extreme densities over `|Y| = s` are attained by the `s`
/// B-vertices with the most (resp. fewest) neighbours in `X`, so only `X` is
/// enumerated. Witness order: `X` by increasing bitmask over the sorted part,
/// then `|Y|`, then the upward deviation before the downward one; ties among
/// equal degrees go to the lower index.
pub fn brute_force_regular(p: &BipartitePair<'_>, epsilon: f64, cap: usize) -> Result<RegularityVerdict> {
    let (ma, mb) = (p.part_a().len(), p.part_b().len());
    if ma > cap || mb > cap {
        return Err(Error::BruteForceCap { a: ma, b: mb, cap });
    }
    let mut v = brute_force_local(&p.local(), epsilon, cap)?;
    if let Some(w) = v.witness.as_mut() {
        w.x.iter_mut().for_each(|i| *i = p.part_a()[*i]);
        w.y.iter_mut().for_each(|j| *j = p.part_b()[*j]);
        w.y.sort_unstable();
    }
    Ok(v)
}

/// [`brute_force_regular`] on a pair in local coordinates; witness indices are local.
pub fn brute_force_local(lp: &LocalPair, epsilon: f64, cap: usize) -> Result<RegularityVerdict> {
    let (ma, mb) = (lp.size_a, lp.size_b);
    if ma > cap || mb > cap || ma > 63 {
        return Err(Error::BruteForceCap { a: ma, b: mb, cap: cap.min(63) });
    }
    if ma == 0 || mb == 0 {
        return Err(Error::EmptySide);
    }
    if !(epsilon > 0.0) {
        return Err(Error::Parameter(format!("epsilon {epsilon} must be positive")));
    }
    let e = lp.edge_count() as u128;
    let eps = exact::q(epsilon);
    let need_x = exact::at_least(&(&eps * exact::qi(ma as i64))).max(1) as usize;
    let need_y = exact::at_least(&(&eps * exact::qi(mb as i64))).max(1) as usize;
    let density = e as f64 / (ma * mb) as f64;
    let certified = RegularityVerdict {
        kind: VerdictKind::Certified,
        method: Method::BruteForce,
        epsilon,
        density,
        kr: None,
        witness: None,
    };
    if need_x > ma || need_y > mb {
        return Ok(certified);
    }
    let total = (ma * mb) as u128;
    // best deviation as num/den with den = |X||Y||A||B|
    let mut best: Option<(u128, u128, u64, u128, Vec<usize>)> = None;
    let mut counts: Vec<(usize, usize)> = Vec::with_capacity(mb);
    for mask in 1u64..(1u64 << ma) {
        let sx = mask.count_ones() as usize;
        if sx < need_x {
            continue;
        }
        counts.clear();
        counts.extend((0..mb).map(|j| ((lp.row_b(j)[0] & mask).count_ones() as usize, j)));
        let mut desc = counts.clone();
        desc.sort_by(|l, r| r.0.cmp(&l.0).then(l.1.cmp(&r.1)));
        let mut asc = counts.clone();
        asc.sort_by(|l, r| l.0.cmp(&r.0).then(l.1.cmp(&r.1)));
        let (mut top, mut bot) = (0u128, 0u128);
        for s in 1..=mb {
            top += desc[s - 1].0 as u128;
            bot += asc[s - 1].0 as u128;
            if s < need_y {
                continue;
            }
            let den = (sx * s) as u128 * total;
            let base = e * (sx * s) as u128;
            for (sum, order) in [(top, &desc), (bot, &asc)] {
                let num = (sum * total).abs_diff(base);
                let better = match &best {
                    None => true,
                    Some((bn, bd, ..)) => num * bd > bn * den,
                };
                if better {
                    let y: Vec<usize> = order[..s].iter().map(|&(_, j)| j).collect();
                    best = Some((num, den, mask, sum, y));
                }
            }
        }
    }
    let (num, den, mask, inside, y) = best.expect("at least one admissible subset pair");
    let deviation = exact::ratio(num as usize, den as usize);
    if deviation <= eps {
        return Ok(certified);
    }
    let x: Vec<usize> = (0..ma).filter(|i| mask >> i & 1 == 1).collect();
    Ok(RegularityVerdict {
        kind: VerdictKind::Refuted,
        method: Method::BruteForce,
        epsilon,
        density,
        kr: None,
        witness: Some(Witness {
            density: inside as f64 / (x.len() * y.len()) as f64,
            deviation: exact::to_f64(&deviation),
            x,
            y,
        }),
    })
}

/// Codegree criterion: counts unordered pairs `{x, x'} ⊆ A` with both degrees at
/// least `(ρ - η)|B|` and codegree at most `(ρ + η)^2 |B|`; certifies
/// `(16η)^(1/5)`-regularity when there are more than `(1 - 5η)|A|^2 / 2`.
pub fn kr_check(p: &BipartitePair<'_>, eta: f64) -> Result<RegularityVerdict> {
    kr_check_local(&p.local(), eta)
}

pub fn kr_check_local(lp: &LocalPair, eta: f64) -> Result<RegularityVerdict> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::Parameter(format!("eta {eta} outside (0, 1)")));
    }
    let (ma, mb) = (lp.size_a, lp.size_b);
    if ma == 0 || mb == 0 {
        return Err(Error::EmptySide);
    }
    let etaq = exact::q(eta);
    if exact::qi(ma as i64) * &etaq < exact::qi(2) {
        return Err(Error::KrHypothesis { size: ma, need: 2.0 / eta });
    }
    let e = lp.edge_count();
    let rho = exact::ratio(e, ma * mb);
    let mbq = exact::qi(mb as i64);
    let degree_floor = exact::at_least(&((&rho - &etaq) * &mbq));
    let up = &rho + &etaq;
    let codegree_ceiling = exact::at_most(&(&up * &up * &mbq));
    let qualifying: Vec<usize> =
        (0..ma).filter(|&i| lp.degree_a(i) as i64 >= degree_floor).collect();
    let good_pairs: u64 = qualifying
        .par_iter()
        .enumerate()
        .map(|(k, &i)| {
            let ri = lp.row_a(i);
            qualifying[k + 1..]
                .iter()
                .filter(|&&j| and_count(ri, lp.row_a(j)) as i64 <= codegree_ceiling)
                .count() as u64
        })
        .sum();
    let required: Q = (exact::one() - exact::qi(5) * &etaq) * exact::qi((ma * ma) as i64) / exact::qi(2);
    let certified = (good_pairs as i64) >= exact::above(&required);
    Ok(RegularityVerdict {
        kind: if certified { VerdictKind::Certified } else { VerdictKind::Inconclusive },
        method: Method::Kr,
        epsilon: kr_epsilon(eta),
        density: e as f64 / (ma * mb) as f64,
        kr: Some(KrStats {
            eta,
            qualifying: qualifying.len(),
            good_pairs,
            required_above: exact::to_f64(&required),
            degree_floor,
            codegree_ceiling,
        }),
        witness: None,
    })
}

/// Vertices whose degree leaves `(d ± ε)` times the opposite part.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DegreeOutliers {
    pub a_low: Vec<usize>,
    pub a_high: Vec<usize>,
    pub b_low: Vec<usize>,
    pub b_high: Vec<usize>,
}

pub fn degree_outliers(p: &BipartitePair<'_>, epsilon: f64) -> Result<DegreeOutliers> {
    let d = p.density_exact()?;
    let eps = exact::q(epsilon);
    let split = |part: &[usize], degs: Vec<usize>, other: usize| {
        let o = exact::qi(other as i64);
        let low_below = exact::at_least(&((&d - &eps) * &o));
        let high_above = exact::at_most(&((&d + &eps) * &o));
        let mut low = Vec::new();
        let mut high = Vec::new();
        for (&v, deg) in part.iter().zip(degs) {
            if (deg as i64) < low_below {
                low.push(v);
            } else if deg as i64 > high_above {
                high.push(v);
            }
        }
        (low, high)
    };
    let (a_low, a_high) = split(p.part_a(), p.degrees_a(), p.part_b().len());
    let (b_low, b_high) = split(p.part_b(), p.degrees_b(), p.part_a().len());
    Ok(DegreeOutliers { a_low, a_high, b_low, b_high })
}

/// Restricts a regular pair to large subsets; returns the slice and
/// `ε' = max(ε/α, 2ε)`.
pub fn slice<'g>(
    p: &BipartitePair<'g>,
    a_sub: &[usize],
    b_sub: &[usize],
    epsilon: f64,
    alpha: f64,
) -> Result<(BipartitePair<'g>, f64)> {
    if !(alpha > epsilon) {
        return Err(Error::Slicing(format!("alpha {alpha} <= epsilon {epsilon}")));
    }
    let sub = p.induced(a_sub, b_sub)?;
    let al = exact::q(alpha);
    for (got, full, side) in [
        (sub.part_a().len(), p.part_a().len(), "A"),
        (sub.part_b().len(), p.part_b().len(), "B"),
    ] {
        if exact::qi(got as i64) < &al * exact::qi(full as i64) {
            return Err(Error::Slicing(format!("|{side}'| = {got} < {alpha} * {full}")));
        }
    }
    Ok((sub, (epsilon / alpha).max(2.0 * epsilon)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum BundleMode {
    Brute { cap: usize },
    Kr { eta: f64 },
    Assume,
}

/// Evidence that a pair is an `(ε, δ)`-bundle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BundleCertificate {
    pub epsilon: f64,
    pub delta: f64,
    pub density: f64,
    pub degree_window_a: [usize; 2],
    pub degree_window_b: [usize; 2],
    pub regular_via: Method,
    /// ε of the regularity certificate; equals `epsilon` except on the codegree route.
    pub regularity_epsilon: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    /// `(ε, δ - ε)`: the super-regularity implied by the bundle.
    pub super_regular: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "reason")]
pub enum BundleRefutation {
    DegreeWindow { vertex: usize, degree: usize, lo: i64, hi: i64 },
    Regularity { verdict: RegularityVerdict },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "outcome")]
pub enum BundleOutcome {
    Certified(BundleCertificate),
    Refuted(BundleRefutation),
}

impl BundleOutcome {
    pub fn certificate(&self) -> Option<&BundleCertificate> {
        match self {
            BundleOutcome::Certified(c) => Some(c),
            BundleOutcome::Refuted(_) => None,
        }
    }
}

/// Integer degree windows `[lo, hi]` for A-vertices and B-vertices.
fn bundle_windows(p: &BipartitePair<'_>, epsilon: f64, delta: f64) -> ((i64, i64), (i64, i64)) {
    let (dq, eq) = (exact::q(delta), exact::q(epsilon));
    (
        exact::window(&dq, &eq, p.part_b().len()),
        exact::window(&dq, &eq, p.part_a().len()),
    )
}

pub fn check_bundle(p: &BipartitePair<'_>, epsilon: f64, delta: f64, mode: BundleMode) -> Result<BundleOutcome> {
    let density = p.density()?;
    match mode {
        BundleMode::Brute { cap } if p.part_a().len() > cap || p.part_b().len() > cap => {
            return Err(Error::BruteForceCap { a: p.part_a().len(), b: p.part_b().len(), cap });
        }
        BundleMode::Kr { eta } if (p.part_a().len() as f64) * eta < 2.0 => {
            return Err(Error::KrHypothesis { size: p.part_a().len(), need: 2.0 / eta });
        }
        _ => {}
    }
    let (wa, wb) = bundle_windows(p, epsilon, delta);
    let da = p.degrees_a();
    let db = p.degrees_b();
    for (part, degs, (lo, hi)) in [(p.part_a(), &da, wa), (p.part_b(), &db, wb)] {
        if let Some((&v, &deg)) = part.iter().zip(degs.iter()).find(|(_, &d)| (d as i64) < lo || d as i64 > hi) {
            return Ok(BundleOutcome::Refuted(BundleRefutation::DegreeWindow { vertex: v, degree: deg, lo, hi }));
        }
    }
    let verdict = match mode {
        BundleMode::Brute { cap } => brute_force_regular(p, epsilon, cap)?,
        BundleMode::Kr { eta } => kr_check(p, eta)?,
        BundleMode::Assume => RegularityVerdict::assumed(epsilon, density),
    };
    if !verdict.is_certified() {
        return Ok(BundleOutcome::Refuted(BundleRefutation::Regularity { verdict }));
    }
    let span = |d: &[usize]| [d.iter().copied().min().unwrap_or(0), d.iter().copied().max().unwrap_or(0)];
    Ok(BundleOutcome::Certified(BundleCertificate {
        epsilon,
        delta,
        density,
        degree_window_a: span(&da),
        degree_window_b: span(&db),
        regular_via: verdict.method,
        regularity_epsilon: verdict.epsilon,
        eta: verdict.eta(),
        super_regular: [epsilon, delta - epsilon],
    }))
}

/// `(ε, δ)`-super-regularity: ε-regular (by the given verdict) with all degrees
/// at least δ times the opposite part.
pub fn is_super_regular(p: &BipartitePair<'_>, delta: f64) -> bool {
    let dq = exact::q(delta);
    let floor_a = exact::at_least(&(&dq * exact::qi(p.part_b().len() as i64)));
    let floor_b = exact::at_least(&(&dq * exact::qi(p.part_a().len() as i64)));
    p.degrees_a().iter().all(|&d| d as i64 >= floor_a) && p.degrees_b().iter().all(|&d| d as i64 >= floor_b)
}

/// Bookkeeping for one bundle extraction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BundleStats {
    pub m: usize,
    pub m1: usize,
    pub edges_before: usize,
    pub edges_after: usize,
    pub discarded_low: Vec<usize>,
    pub discarded_high: Vec<usize>,
    pub discarded_rebalance: Vec<usize>,
    /// `m1 >= (1 - 2ε) m`
    pub size_bound_ok: bool,
    /// `e(H) >= e(F) - 4ε m^2`
    pub edge_bound_ok: bool,
    /// `2 sqrt(ε) <= d`, under which `e(H) >= (1 - d) e(F)` is also required.
    pub retention_applicable: bool,
    pub retention_ok: bool,
    pub warnings: Vec<String>,
}

/// Outcome of the degree cleanup in local coordinates. Discarded entries are
/// `(in_a, index)`.
#[derive(Clone, Debug)]
pub(crate) struct LocalCleanup {
    pub keep_a: Vec<usize>,
    pub keep_b: Vec<usize>,
    pub low: Vec<(bool, usize)>,
    pub high: Vec<(bool, usize)>,
    pub rebalance: Vec<(bool, usize)>,
    pub edges_after: usize,
}

/// Drops vertices with degree below `(d - ε) m`, then above `(d + ε) m` (degrees
/// and `m` from the input), then the lowest-indexed surplus of the larger side.
pub(crate) fn cleanup_local(lp: &LocalPair, epsilon: f64, d: f64) -> LocalCleanup {
    let m = lp.size_a.max(lp.size_b);
    let (dq, eq) = (exact::q(d), exact::q(epsilon));
    let mq = exact::qi(m as i64);
    let low_cut = exact::at_least(&((&dq - &eq) * &mq));
    let high_cut = exact::at_most(&((&dq + &eq) * &mq));
    let mut low = Vec::new();
    let mut high = Vec::new();
    let mut keep = |in_a: bool, degs: Vec<usize>| -> Vec<usize> {
        let mut kept = Vec::with_capacity(degs.len());
        for (v, &deg) in degs.iter().enumerate() {
            if (deg as i64) < low_cut {
                low.push((in_a, v));
            } else {
                kept.push(v);
            }
        }
        kept.retain(|&v| {
            let over = degs[v] as i64 > high_cut;
            if over {
                high.push((in_a, v));
            }
            !over
        });
        kept
    };
    let mut keep_a = keep(true, (0..lp.size_a).map(|i| lp.degree_a(i)).collect());
    let mut keep_b = keep(false, (0..lp.size_b).map(|j| lp.degree_b(j)).collect());
    let mut rebalance = Vec::new();
    if keep_a.len() > keep_b.len() {
        rebalance.extend(keep_a.drain(..keep_a.len() - keep_b.len()).map(|v| (true, v)));
    } else if keep_b.len() > keep_a.len() {
        rebalance.extend(keep_b.drain(..keep_b.len() - keep_a.len()).map(|v| (false, v)));
    }
    let edges_after = keep_a.iter().map(|&i| keep_b.iter().filter(|&&j| lp.has(i, j)).count()).sum();
    LocalCleanup { keep_a, keep_b, low, high, rebalance, edges_after }
}

/// Degree cleanup shared by bundle extraction and the decomposition heuristic,
/// with no hypothesis checks; the bound flags in the stats are still filled in.
pub fn bundle_cleanup<'g>(f: &BipartitePair<'g>, epsilon: f64, d: f64) -> Result<(BipartitePair<'g>, BundleStats)> {
    let lp = f.local();
    let c = cleanup_local(&lp, epsilon, d);
    let global = |(in_a, v): (bool, usize)| if in_a { f.part_a()[v] } else { f.part_b()[v] };
    let a: Vec<usize> = c.keep_a.iter().map(|&i| f.part_a()[i]).collect();
    let b: Vec<usize> = c.keep_b.iter().map(|&j| f.part_b()[j]).collect();
    let h = f.induced(&a, &b)?;
    let m = lp.size_a.max(lp.size_b);
    let mut stats = bound_stats(m, h.part_a().len(), f.edge_count(), c.edges_after, epsilon, d);
    stats.discarded_low = c.low.into_iter().map(global).collect();
    stats.discarded_high = c.high.into_iter().map(global).collect();
    stats.discarded_rebalance = c.rebalance.into_iter().map(global).collect();
    Ok((h, stats))
}

pub(crate) fn bound_stats(m: usize, m1: usize, edges_before: usize, edges_after: usize, epsilon: f64, d: f64) -> BundleStats {
    let (dq, eq) = (exact::q(d), exact::q(epsilon));
    let mq = exact::qi(m as i64);
    let size_bound_ok = exact::qi(m1 as i64) >= (exact::one() - exact::qi(2) * &eq) * &mq;
    let loss = exact::qi(4) * &eq * &mq * &mq;
    let edge_bound_ok = exact::qi(edges_after as i64) >= exact::qi(edges_before as i64) - loss;
    let retention_applicable = exact::qi(4) * &eq <= &dq * &dq;
    let retention_ok = !retention_applicable
        || exact::qi(edges_after as i64) >= (exact::one() - &dq) * exact::qi(edges_before as i64);
    BundleStats {
        m,
        m1,
        edges_before,
        edges_after,
        discarded_low: Vec::new(),
        discarded_high: Vec::new(),
        discarded_rebalance: Vec::new(),
        size_bound_ok,
        edge_bound_ok,
        retention_applicable,
        retention_ok,
        warnings: Vec::new(),
    }
}

/// Extracts a `(3ε, d)`-bundle from a balanced ε-regular pair of density `d`.
///
/// Strict mode enforces `0 < ε < 1/10` and `3ε <= d <= 1/2`; relaxed mode only
/// enforces `0 < d <= 1/2` and records the rest as warnings. In both modes a
/// failed size or edge bound is an error, since it means the input was not
/// ε-regular.
pub fn extract_bundle<'g>(
    f: &BipartitePair<'g>,
    epsilon: f64,
    d: f64,
    strictness: Strictness,
) -> Result<(BipartitePair<'g>, BundleStats)> {
    if !(d > 0.0 && d <= 0.5) {
        return Err(Error::BundleHypothesis(format!("d = {d} outside (0, 1/2]")));
    }
    if !(epsilon > 0.0) {
        return Err(Error::BundleHypothesis(format!("epsilon = {epsilon} must be positive")));
    }
    if !f.is_balanced() {
        return Err(Error::Unbalanced { a: f.part_a().len(), b: f.part_b().len() });
    }
    let mut warnings = Vec::new();
    if epsilon >= 0.1 {
        warnings.push(format!("epsilon = {epsilon} >= 1/10"));
    }
    if exact::qi(3) * exact::q(epsilon) > exact::q(d) {
        warnings.push(format!("d = {d} < 3 epsilon"));
    }
    if strictness == Strictness::Strict && !warnings.is_empty() {
        return Err(Error::BundleHypothesis(warnings.join("; ")));
    }
    let (h, mut stats) = bundle_cleanup(f, epsilon, d)?;
    stats.warnings = warnings;
    if !stats.size_bound_ok {
        return Err(Error::BundleConclusion(format!("m1 = {} < (1 - 2 eps) m = {}", stats.m1, stats.m)));
    }
    if !stats.edge_bound_ok {
        return Err(Error::BundleConclusion(format!(
            "e(H) = {} < e(F) - 4 eps m^2 (e(F) = {})",
            stats.edges_after, stats.edges_before
        )));
    }
    if !stats.retention_ok {
        return Err(Error::BundleConclusion(format!(
            "e(H) = {} < (1 - d) e(F) (e(F) = {})",
            stats.edges_after, stats.edges_before
        )));
    }
    Ok((h, stats))
}

/// Brute-force deviation of one sub-pair; used by tests and the audit path.
pub fn deviation(p: &BipartitePair<'_>, x: &[usize], y: &[usize]) -> Result<f64> {
    let sub = p.induced(x, y)?;
    Ok((sub.density()? - p.density()?).abs())
}
