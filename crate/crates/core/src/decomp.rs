//! Edge decomposition of a balanced bipartite graph into regular pairs plus a
//! sparse exceptional graph, and the parameter calculator for its bounds.
//!
//! The decomposition itself is a sample-extract-certify heuristic: grow a dense
//! sub-pair around a random seed vertex, clean its degrees, certify it, remove
//! its edges from the residual, repeat.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::audit::Audit;
use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::exact;
use crate::graph::{BipartitePair, LocalPair};
use crate::regularity::{self, RegularityVerdict};
use crate::rng::RngStream;
use crate::Strictness;

/// Theorem-scale bounds for given `(ε, d, n, d_G)`. Quantities that overflow
/// `f64` are also kept as natural logarithms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionParams {
    pub epsilon: f64,
    pub d: f64,
    pub n: f64,
    pub d_g: f64,
    /// `½ d^(50/ε²) n`
    #[serde(deserialize_with = "crate::json_float::nullable")]
    pub m_min: f64,
    pub ln_m_min: f64,
    /// `8 (d_G/d) d^(-100/ε²)`
    #[serde(deserialize_with = "crate::json_float::nullable")]
    pub k_max: f64,
    #[serde(deserialize_with = "crate::json_float::nullable")]
    pub ln_k_max: f64,
    /// `exp(50 ln(1/d) / ε²)`
    #[serde(deserialize_with = "crate::json_float::nullable")]
    pub n_min_edge: f64,
    pub ln_n_min_edge: f64,
    /// `exp(150 ln(1/d) / ε²)`
    #[serde(deserialize_with = "crate::json_float::nullable")]
    pub n_min_vertex: f64,
    pub ln_n_min_vertex: f64,
    /// `(ln ln n / ln n)^(1/2)`
    #[serde(deserialize_with = "crate::json_float::nullable")]
    pub epsilon_floor: f64,
    /// `10 (ln ln n / ln n)^(1/10)`
    #[serde(deserialize_with = "crate::json_float::nullable")]
    pub d_floor: f64,
    pub epsilon_ok: bool,
    pub d_ok: bool,
    pub feasible_edge: bool,
    pub feasible_vertex: bool,
    pub log_base: String,
}

pub fn params_and_feasibility(epsilon: f64, d: f64, n: f64, d_g: f64) -> Result<DecompositionParams> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::Parameter(format!("epsilon = {epsilon} outside (0, 1/2)")));
    }
    if !(d > 0.0 && d < 1.0) {
        return Err(Error::Parameter(format!("d = {d} outside (0, 1)")));
    }
    if !(n >= 3.0) {
        return Err(Error::Parameter(format!("n = {n} < 3")));
    }
    let e2 = epsilon * epsilon;
    let ln_d = d.ln();
    let ln_n = n.ln();
    let ln_m_min = 0.5f64.ln() + 50.0 / e2 * ln_d + ln_n;
    let ln_k_max = 8.0f64.ln() + (d_g / d).ln() - 100.0 / e2 * ln_d;
    let ln_n_min_edge = -50.0 * ln_d / e2;
    let ln_n_min_vertex = -150.0 * ln_d / e2;
    let ratio = ln_n.ln() / ln_n;
    let epsilon_floor = ratio.sqrt();
    let d_floor = 10.0 * ratio.powf(0.1);
    let epsilon_ok = epsilon >= epsilon_floor;
    let d_ok = d >= d_floor;
    Ok(DecompositionParams {
        epsilon,
        d,
        n,
        d_g,
        m_min: ln_m_min.exp(),
        ln_m_min,
        k_max: ln_k_max.exp(),
        ln_k_max,
        n_min_edge: ln_n_min_edge.exp(),
        ln_n_min_edge,
        n_min_vertex: ln_n_min_vertex.exp(),
        ln_n_min_vertex,
        epsilon_floor,
        d_floor,
        epsilon_ok,
        d_ok,
        feasible_edge: epsilon_ok && d_ok && ln_n > ln_n_min_edge,
        feasible_vertex: epsilon_ok && d_ok && ln_n > ln_n_min_vertex,
        log_base: "natural".into(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecomposeConfig {
    pub max_pairs: usize,
    pub patience: usize,
    pub m_floor: usize,
    pub candidates_per_round: usize,
    /// Pairs with parts up to this size are certified by enumeration.
    pub brute_cap: usize,
    /// Largest η tried by the relaxed certification ladder.
    pub eta_max: f64,
    pub strictness: Strictness,
}

impl Default for DecomposeConfig {
    fn default() -> Self {
        DecomposeConfig {
            max_pairs: 64,
            patience: 8,
            m_floor: 64,
            candidates_per_round: 4,
            brute_cap: 12,
            eta_max: 1.0 / 16.0,
            strictness: Strictness::Relaxed,
        }
    }
}

/// One regular pair `H_i`: its parts and the edges it owns (global ids, `(a, b)`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecomposedPair {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
    pub density: f64,
    pub verdict: RegularityVerdict,
}

impl DecomposedPair {
    pub fn local(&self) -> LocalPair {
        let ia: HashMap<usize, usize> = self.a.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let ib: HashMap<usize, usize> = self.b.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .filter_map(|(x, y)| Some((*ia.get(x)?, *ib.get(y)?)))
            .collect();
        LocalPair::from_edges(self.a.len(), self.b.len(), &edges)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeDecomposition {
    pub epsilon: f64,
    pub d: f64,
    pub host_a: Vec<usize>,
    pub host_b: Vec<usize>,
    pub pairs: Vec<DecomposedPair>,
    pub h0: Vec<(usize, usize)>,
    pub rounds: usize,
    pub params: Option<DecompositionParams>,
    pub notes: Vec<String>,
}

impl EdgeDecomposition {
    /// Owner of every edge: `0` for `H_0`, `i` for `H_i`.
    pub fn assignment(&self) -> HashMap<(usize, usize), usize> {
        let mut owner = HashMap::new();
        for &e in &self.h0 {
            owner.insert(e, 0);
        }
        for (i, p) in self.pairs.iter().enumerate() {
            for &e in &p.edges {
                owner.insert(e, i + 1);
            }
        }
        owner
    }

    pub fn h0_density(&self) -> f64 {
        let cells = self.host_a.len() * self.host_b.len();
        if cells == 0 {
            0.0
        } else {
            self.h0.len() as f64 / cells as f64
        }
    }

    pub fn min_pair_size(&self) -> Option<usize> {
        self.pairs.iter().map(|p| p.a.len()).min()
    }
}

/// Residual biadjacency in local coordinates.
struct Residual {
    rows_a: Vec<BitSet>,
    rows_b: Vec<BitSet>,
    edges: usize,
}

impl Residual {
    fn new(lp: &LocalPair) -> Self {
        let rows_a = (0..lp.size_a)
            .map(|i| BitSet::from_indices(lp.size_b, (0..lp.size_b).filter(|&j| lp.has(i, j))))
            .collect();
        let rows_b = (0..lp.size_b)
            .map(|j| BitSet::from_indices(lp.size_a, (0..lp.size_a).filter(|&i| lp.has(i, j))))
            .collect();
        Residual { rows_a, rows_b, edges: lp.edge_count() }
    }

    fn remove(&mut self, i: usize, j: usize) {
        if self.rows_a[i].remove(j) {
            self.rows_b[j].remove(i);
            self.edges -= 1;
        }
    }
}

/// Up to `m` indices with the highest score; ties broken by the random keys.
fn top_by(scores: &[usize], keys: &[u64], m: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&x, &y| scores[y].cmp(&scores[x]).then(keys[x].cmp(&keys[y])));
    idx.truncate(m);
    idx.sort_unstable();
    idx
}

struct Candidate {
    a: Vec<usize>,
    b: Vec<usize>,
    edges: Vec<(usize, usize)>,
    verdict: RegularityVerdict,
}

/// Certifies a cleaned candidate: enumeration for small parts, otherwise the
/// codegree criterion at `ε⁵/16`, or (relaxed) the smallest η on a doubling
/// ladder that certifies.
fn certify(lp: &LocalPair, epsilon: f64, cfg: &DecomposeConfig) -> Option<RegularityVerdict> {
    let m = lp.size_a;
    if m <= cfg.brute_cap {
        return regularity::brute_force_local(lp, epsilon, cfg.brute_cap).ok().filter(|v| v.is_certified());
    }
    let eta0 = regularity::kr_eta_for(epsilon);
    if cfg.strictness == Strictness::Strict {
        return regularity::kr_check_local(lp, eta0).ok().filter(|v| v.is_certified());
    }
    let mut eta = eta0.max(2.0 / m as f64 * (1.0 + 1e-12));
    // the 2/m start carries a relative nudge; let the last rung land on eta_max
    while eta <= cfg.eta_max * (1.0 + 1e-9) {
        if let Ok(v) = regularity::kr_check_local(lp, eta.min(cfg.eta_max)) {
            if v.is_certified() {
                return Some(v);
            }
        }
        eta *= 2.0;
    }
    None
}

fn size_ladder(n: usize, floor: usize) -> Vec<usize> {
    let mut sizes = Vec::new();
    let mut m = n;
    while m >= floor.max(1) {
        sizes.push(m);
        m /= 2;
    }
    if sizes.is_empty() {
        sizes.push(n.min(floor).max(1));
    }
    sizes
}

fn try_candidate(
    res: &Residual,
    epsilon: f64,
    target: &exact::Q,
    ladder: &[usize],
    cfg: &DecomposeConfig,
    mut rng: RngStream,
) -> Option<Candidate> {
    let (na, nb) = (res.rows_a.len(), res.rows_b.len());
    let live: Vec<usize> = (0..na).filter(|&i| !res.rows_a[i].is_empty()).collect();
    if live.is_empty() {
        return None;
    }
    let seed = live[rng.below(live.len())];
    let y0 = &res.rows_a[seed];
    let keys_a: Vec<u64> = (0..na).map(|_| rand::RngCore::next_u64(&mut rng)).collect();
    let keys_b: Vec<u64> = (0..nb).map(|_| rand::RngCore::next_u64(&mut rng)).collect();
    let into_y0: Vec<usize> = res.rows_a.iter().map(|r| r.intersection_count(y0)).collect();
    for &m in ladder {
        if m > na || m > nb {
            continue;
        }
        let x = top_by(&into_y0, &keys_a, m);
        let xs = BitSet::from_indices(na, x.iter().copied());
        let into_x: Vec<usize> = res.rows_b.iter().map(|r| r.intersection_count(&xs)).collect();
        let y = top_by(&into_x, &keys_b, m);
        let ys = BitSet::from_indices(nb, y.iter().copied());
        let into_y: Vec<usize> = res.rows_a.iter().map(|r| r.intersection_count(&ys)).collect();
        let x = top_by(&into_y, &keys_a, m);
        let edges: Vec<(usize, usize)> = x
            .iter()
            .enumerate()
            .flat_map(|(li, &i)| y.iter().enumerate().filter(move |&(_, &j)| res.rows_a[i].contains(j)).map(move |(lj, _)| (li, lj)))
            .collect();
        if edges.is_empty() {
            continue;
        }
        let lp = LocalPair::from_edges(m, m, &edges);
        let dens = edges.len() as f64 / (m * m) as f64;
        let c = regularity::cleanup_local(&lp, epsilon, dens);
        let m1 = c.keep_a.len();
        if m1 == 0 || exact::qi(c.edges_after as i64) < target * exact::qi((m1 * m1) as i64) {
            continue;
        }
        let a: Vec<usize> = c.keep_a.iter().map(|&li| x[li]).collect();
        let b: Vec<usize> = c.keep_b.iter().map(|&lj| y[lj]).collect();
        let sub_edges: Vec<(usize, usize)> = a
            .iter()
            .enumerate()
            .flat_map(|(li, &i)| b.iter().enumerate().filter(move |&(_, &j)| res.rows_a[i].contains(j)).map(move |(lj, _)| (li, lj)))
            .collect();
        let sub = LocalPair::from_edges(m1, m1, &sub_edges);
        if let Some(verdict) = certify(&sub, epsilon, cfg) {
            let edges = sub_edges.iter().map(|&(li, lj)| (a[li], b[lj])).collect();
            return Some(Candidate { a, b, edges, verdict });
        }
    }
    None
}

/// Greedy decomposition of a balanced pair. Each round samples
/// `candidates_per_round` candidates in parallel, each on its own stream, and
/// extracts the lowest-numbered one that passes.
pub fn decompose_edges(
    g: &BipartitePair<'_>,
    epsilon: f64,
    d: f64,
    cfg: &DecomposeConfig,
    rng: &RngStream,
) -> Result<EdgeDecomposition> {
    if !g.is_balanced() {
        return Err(Error::Unbalanced { a: g.part_a().len(), b: g.part_b().len() });
    }
    if !(d > 0.0 && d < 1.0) {
        return Err(Error::Parameter(format!("d = {d} outside (0, 1)")));
    }
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::Parameter(format!("epsilon = {epsilon} outside (0, 1/2)")));
    }
    let n = g.part_a().len();
    let lp = g.local();
    let mut res = Residual::new(&lp);
    let cells = (n * n).max(1);
    let d_g = res.edges as f64 / cells as f64;
    let mut out = EdgeDecomposition {
        epsilon,
        d,
        host_a: g.part_a().to_vec(),
        host_b: g.part_b().to_vec(),
        pairs: Vec::new(),
        h0: Vec::new(),
        rounds: 0,
        params: if n >= 3 { params_and_feasibility(epsilon, d, n as f64, d_g).ok() } else { None },
        notes: Vec::new(),
    };
    if d > d_g {
        out.notes.push(format!("d = {d} exceeds host density {d_g:.6}; K = 0 is admissible"));
    }
    let ladder = size_ladder(n, cfg.m_floor);
    let per_round = cfg.candidates_per_round.max(1);
    let mut failed = 0;
    while out.pairs.len() < cfg.max_pairs && failed < cfg.patience && res.edges > 0 {
        let round = out.rounds as u64;
        out.rounds += 1;
        let dres = exact::ratio(res.edges, cells);
        let floor = exact::q(d).max(dres);
        let target = (exact::one() - exact::q(epsilon) / exact::qi(3)) * floor;
        let found: Vec<Option<Candidate>> = (0..per_round as u64)
            .into_par_iter()
            .map(|c| try_candidate(&res, epsilon, &target, &ladder, cfg, rng.derive(round * per_round as u64 + c)))
            .collect();
        match found.into_iter().flatten().next() {
            Some(c) => {
                failed = 0;
                for &(i, j) in &c.edges {
                    res.remove(i, j);
                }
                let m = c.a.len();
                out.pairs.push(DecomposedPair {
                    a: c.a.iter().map(|&i| g.part_a()[i]).collect(),
                    b: c.b.iter().map(|&j| g.part_b()[j]).collect(),
                    density: c.edges.len() as f64 / (m * m) as f64,
                    edges: c.edges.iter().map(|&(i, j)| (g.part_a()[i], g.part_b()[j])).collect(),
                    verdict: c.verdict,
                });
            }
            None => failed += 1,
        }
    }
    for (i, row) in res.rows_a.iter().enumerate() {
        out.h0.extend(row.iter().map(|j| (g.part_a()[i], g.part_b()[j])));
    }
    let covered: usize = out.pairs.iter().map(|p| p.edges.len()).sum::<usize>() + out.h0.len();
    if covered != g.edge_count() {
        return Err(Error::Precondition(format!("edge conservation broken: {covered} != {}", g.edge_count())));
    }
    Ok(out)
}

/// Re-checks a decomposition of `g` from scratch.
pub fn verify_edge_decomposition(g: &BipartitePair<'_>, dec: &EdgeDecomposition, epsilon: f64, d: f64) -> Audit {
    let mut audit = Audit::default();
    let graph = g.graph();
    let (ma, mb) = (g.mask_a(), g.mask_b());
    let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
    let mut stray = None;
    let mut duplicate = None;
    let all = dec.h0.iter().map(|&e| (0, e)).chain(
        dec.pairs.iter().enumerate().flat_map(|(i, p)| p.edges.iter().map(move |&e| (i + 1, e))),
    );
    for (owner, (x, y)) in all {
        let in_host = x < graph.n() && y < graph.n() && ma.contains(x) && mb.contains(y) && graph.has_edge(x, y);
        if !in_host && stray.is_none() {
            stray = Some(format!("({x}, {y}) in H_{owner} is not an edge of G[A, B]"));
        }
        if let Some(prev) = seen.insert((x, y), owner) {
            if duplicate.is_none() {
                duplicate = Some(format!("({x}, {y}) in H_{prev} and H_{owner}"));
            }
        }
    }
    match stray {
        None => audit.pass("edges-from-host"),
        Some(s) => audit.fail("edges-from-host", s),
    }
    match duplicate {
        None => audit.pass("edge-disjoint"),
        Some(s) => audit.fail("edge-disjoint", s),
    }
    match g.cross_edges().into_iter().find(|e| !seen.contains_key(e)) {
        None => audit.pass("coverage"),
        Some((x, y)) => audit.fail("coverage", format!("({x}, {y}) not covered")),
    }
    let target = (exact::one() - exact::q(epsilon) / exact::qi(3)) * exact::q(d);
    let mut balanced = None;
    let mut inside = None;
    let mut dense = None;
    let mut certified = None;
    for (i, p) in dec.pairs.iter().enumerate() {
        let k = i + 1;
        if p.a.len() != p.b.len() && balanced.is_none() {
            balanced = Some(format!("H_{k}: |A| = {}, |B| = {}", p.a.len(), p.b.len()));
        }
        let lp = p.local();
        if lp.edge_count() != p.edges.len() && inside.is_none() {
            inside = Some(format!("H_{k} has edges outside its parts"));
        }
        let cells = p.a.len() * p.b.len();
        if (cells == 0 || exact::ratio(p.edges.len(), cells) < target) && dense.is_none() {
            dense = Some(format!("H_{k}: density {:.6} below (1 - eps/3) d", p.density));
        }
        let recheck = match p.verdict.eta() {
            Some(eta) => regularity::kr_check_local(&lp, eta).map(|v| v.is_certified()),
            None if p.a.len() <= 12 && p.b.len() <= 12 => {
                regularity::brute_force_local(&lp, p.verdict.epsilon, 12).map(|v| v.is_certified())
            }
            None => Ok(true),
        };
        if !matches!(recheck, Ok(true)) && certified.is_none() {
            certified = Some(format!("H_{k} does not re-certify"));
        }
    }
    for (name, v) in [("balanced", balanced), ("pair-edges-inside", inside), ("pair-density", dense), ("certificates", certified)] {
        match v {
            None => audit.pass(name),
            Some(s) => audit.fail(name, s),
        }
    }
    let cells = g.part_a().len() * g.part_b().len();
    if cells == 0 || exact::ratio(dec.h0.len(), cells) < exact::q(d) {
        audit.pass("h0-density");
    } else {
        audit.fail("h0-density", format!("d(H_0) = {:.6} >= d = {d}", dec.h0_density()));
    }
    audit
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::BipartiteHost;

    #[test]
    fn params_examples() {
        let p = params_and_feasibility(0.49999, 0.5, 1e6, 0.5).unwrap();
        assert!(p.m_min < 1e-50 && !p.feasible_edge);
        let p = params_and_feasibility(0.1, 0.5, 1e6, 0.5).unwrap();
        assert!((p.ln_n_min_edge - 3465.7).abs() < 0.1);
        assert!(p.n_min_edge.is_infinite());
        let p = params_and_feasibility(0.3, 0.5, 2f64.powi(64), 0.5).unwrap();
        assert!((p.epsilon_floor - 0.292).abs() < 1e-3);
        assert!(p.d_floor > 1.0 && !p.d_ok && !p.feasible_vertex);
    }

    #[test]
    fn edgeless_host() {
        let h = BipartiteHost::from_local_edges(8, 8, &[]).unwrap();
        let dec = decompose_edges(&h.pair(), 0.2, 0.3, &DecomposeConfig::default(), &RngStream::new(1, 0)).unwrap();
        assert!(dec.pairs.is_empty() && dec.h0.is_empty());
        assert!(verify_edge_decomposition(&h.pair(), &dec, 0.2, 0.3).all_pass());
    }

    #[test]
    fn target_above_host_density() {
        let edges: Vec<_> = (0..20).flat_map(|a| (0..6).map(move |j| (a, (a + j) % 20))).collect();
        let h = BipartiteHost::from_local_edges(20, 20, &edges).unwrap();
        let dec = decompose_edges(&h.pair(), 0.2, 0.9, &DecomposeConfig::default(), &RngStream::new(1, 0)).unwrap();
        assert!(dec.pairs.is_empty());
        assert_eq!(dec.h0.len(), 120);
        // d(G) = 0.3 < 0.9
        assert!(verify_edge_decomposition(&h.pair(), &dec, 0.2, 0.9).all_pass());
        assert!(!verify_edge_decomposition(&h.pair(), &dec, 0.2, 0.2).passed("h0-density"));
    }

    #[test]
    fn complete_blocks_are_extracted() {
        let edges: Vec<_> = (0..16).flat_map(|a| (0..16).filter(move |&b| (a < 8) == (b < 8)).map(move |b| (a, b))).collect();
        let h = BipartiteHost::from_local_edges(16, 16, &edges).unwrap();
        let cfg = DecomposeConfig { m_floor: 4, ..Default::default() };
        let dec = decompose_edges(&h.pair(), 0.2, 0.3, &cfg, &RngStream::new(3, 0)).unwrap();
        let audit = verify_edge_decomposition(&h.pair(), &dec, 0.2, 0.3);
        assert!(audit.all_pass(), "{audit:?}");
        assert_eq!(dec.h0.len(), 0);
        assert_eq!(dec.pairs.len(), 2);
    }

    #[test]
    fn duplicated_edge_is_reported() {
        let edges: Vec<_> = (0..16).flat_map(|a| (0..16).filter(move |&b| (a < 8) == (b < 8)).map(move |b| (a, b))).collect();
        let h = BipartiteHost::from_local_edges(16, 16, &edges).unwrap();
        let cfg = DecomposeConfig { m_floor: 4, ..Default::default() };
        let mut dec = decompose_edges(&h.pair(), 0.2, 0.3, &cfg, &RngStream::new(3, 0)).unwrap();
        let e = dec.pairs[0].edges[0];
        dec.pairs[1].edges.push(e);
        let audit = verify_edge_decomposition(&h.pair(), &dec, 0.2, 0.3);
        let c = audit.get("edge-disjoint").unwrap();
        assert!(!c.pass);
        assert!(c.detail.as_ref().unwrap().contains(&format!("({}, {})", e.0, e.1)));
    }
}
