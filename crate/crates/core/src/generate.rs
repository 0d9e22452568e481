//! Seeded instance generators.

use std::collections::HashMap;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{BipartiteHost, Graph};
use crate::rng::RngStream;

fn key(u: usize, v: usize) -> (usize, usize) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

/// Uniform-ish random `r`-regular graph: a random pairing of `n r` points,
/// then loops and repeated edges removed by random switches
/// `{u v, x y} -> {u x, v y}`.
pub fn regular(n: usize, r: usize, rng: &mut RngStream) -> Result<Graph> {
    if r >= n || (n * r) % 2 == 1 {
        return Err(Error::DegreeSequence(format!("no {r}-regular graph on {n} vertices")));
    }
    if r == 0 {
        return Ok(Graph::empty(n));
    }
    let mut points: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, r)).collect();
    rng.shuffle(&mut points);
    let mut edges: Vec<(usize, usize)> = points.chunks(2).map(|c| key(c[0], c[1])).collect();
    let mut mult: HashMap<(usize, usize), usize> = HashMap::with_capacity(edges.len());
    for &e in &edges {
        *mult.entry(e).or_default() += 1;
    }
    let is_bad = |e: (usize, usize), mult: &HashMap<(usize, usize), usize>| e.0 == e.1 || mult[&e] > 1;
    let mut bad: Vec<usize> = (0..edges.len()).filter(|&i| is_bad(edges[i], &mult)).collect();
    let mut budget = 1000 * (bad.len() + 1) + 10_000;
    while let Some(i) = bad.pop() {
        if !is_bad(edges[i], &mult) {
            continue;
        }
        loop {
            if budget == 0 {
                return Err(Error::DegreeSequence(format!("switch repair did not converge for n = {n}, r = {r}")));
            }
            budget -= 1;
            let (u, v) = edges[i];
            let j = rng.below(edges.len());
            let (mut x, mut y) = edges[j];
            if rng.next_u32() & 1 == 1 {
                std::mem::swap(&mut x, &mut y);
            }
            if j == i || u == x || u == y || v == x || v == y {
                continue;
            }
            if is_bad(edges[j], &mult) || mult.contains_key(&key(u, x)) || mult.contains_key(&key(v, y)) {
                continue;
            }
            for old in [edges[i], edges[j]] {
                let c = mult.get_mut(&old).expect("edge counted");
                *c -= 1;
                if *c == 0 {
                    mult.remove(&old);
                }
            }
            edges[i] = key(u, x);
            edges[j] = key(v, y);
            *mult.entry(edges[i]).or_default() += 1;
            *mult.entry(edges[j]).or_default() += 1;
            break;
        }
    }
    Graph::new(n, &edges)
}

/// Each of the `na × nb` cross pairs independently with probability `p`.
pub fn bipartite_density(na: usize, nb: usize, p: f64, rng: &mut RngStream) -> Result<BipartiteHost> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Parameter(format!("p = {p} outside [0, 1]")));
    }
    let mut edges = Vec::new();
    for a in 0..na {
        for b in 0..nb {
            if rng.uniform() < p {
                edges.push((a, b));
            }
        }
    }
    BipartiteHost::from_local_edges(na, nb, &edges)
}

/// `k × k` random pair of density about `d` whose degrees are then pushed into
/// `[d k - slack, d k + slack]`: vertices above the window drop edges to their
/// highest-degree neighbours, vertices below gain edges to the lowest-degree
/// non-neighbours.
pub fn planted_bundle(k: usize, d: f64, slack: f64, rng: &mut RngStream) -> Result<BipartiteHost> {
    if k == 0 || !(d > 0.0 && d < 1.0) || slack < 1.0 {
        return Err(Error::Parameter(format!("planted bundle needs k > 0, 0 < d < 1, slack >= 1 (got {k}, {d}, {slack})")));
    }
    let mut adj = vec![vec![false; k]; k];
    for row in adj.iter_mut() {
        for cell in row.iter_mut() {
            *cell = rng.uniform() < d;
        }
    }
    let lo = (d * k as f64 - slack).ceil().max(0.0) as usize;
    let hi = ((d * k as f64 + slack).floor() as usize).min(k);
    let mut deg_a: Vec<usize> = adj.iter().map(|r| r.iter().filter(|&&x| x).count()).collect();
    let mut deg_b: Vec<usize> = (0..k).map(|j| adj.iter().filter(|r| r[j]).count()).collect();
    for _ in 0..50 {
        let mut changed = false;
        for side in [true, false] {
            for v in 0..k {
                let deg = if side { deg_a[v] } else { deg_b[v] };
                if deg > hi || deg < lo {
                    changed = true;
                    let add = deg < lo;
                    let mut cands: Vec<usize> = (0..k)
                        .filter(|&w| {
                            let has = if side { adj[v][w] } else { adj[w][v] };
                            has != add
                        })
                        .collect();
                    let other = if side { &deg_b } else { &deg_a };
                    let mut keyed: Vec<(usize, u32, usize)> = cands
                        .iter()
                        .map(|&w| (if add { other[w] } else { usize::MAX - other[w] }, rng.next_u32(), w))
                        .collect();
                    keyed.sort_unstable();
                    cands = keyed.into_iter().map(|(_, _, w)| w).collect();
                    let need = if add { lo - deg } else { deg - hi };
                    for &w in cands.iter().take(need) {
                        let (a, b) = if side { (v, w) } else { (w, v) };
                        adj[a][b] = add;
                        if add {
                            deg_a[a] += 1;
                            deg_b[b] += 1;
                        } else {
                            deg_a[a] -= 1;
                            deg_b[b] -= 1;
                        }
                    }
                }
            }
        }
        if !changed {
            let edges: Vec<(usize, usize)> =
                (0..k).flat_map(|a| (0..k).map(move |b| (a, b))).filter(|&(a, b)| adj[a][b]).collect();
            return BipartiteHost::from_local_edges(k, k, &edges);
        }
    }
    Err(Error::DegreeSequence(format!("degree repair did not settle for k = {k}, d = {d}, slack = {slack}")))
}

/// A planted block `(A_i, B_i)` in host ids.
pub type Block = (Vec<usize>, Vec<usize>);

/// Parameters of a planted-decomposition host.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantedDecomposition {
    /// Vertices per side.
    pub n: usize,
    pub blocks: usize,
    pub block_density: f64,
    /// Density of the background noise across all cross pairs.
    pub noise: f64,
}

/// Host whose sides are split into `blocks` consecutive equal blocks; block
/// `i` of A and block `i` of B form a random pair of density `block_density`,
/// and every other cross pair is an edge with probability `noise`. Returns the
/// planted blocks as `(A_i, B_i)` in host ids.
pub fn planted_decomposition(
    spec: &PlantedDecomposition,
    rng: &mut RngStream,
) -> Result<(BipartiteHost, Vec<Block>)> {
    let PlantedDecomposition { n, blocks, block_density, noise } = *spec;
    if blocks == 0 || blocks > n {
        return Err(Error::Parameter(format!("{blocks} blocks on {n} vertices")));
    }
    let size = n / blocks;
    let block_of = |v: usize| (v / size).min(blocks - 1);
    let mut edges = Vec::new();
    for a in 0..n {
        for b in 0..n {
            let p = if block_of(a) == block_of(b) { block_density } else { noise };
            if rng.uniform() < p {
                edges.push((a, b));
            }
        }
    }
    let host = BipartiteHost::from_local_edges(n, n, &edges)?;
    let planted = (0..blocks)
        .map(|i| {
            let members: Vec<usize> = (0..n).filter(|&v| block_of(v) == i).collect();
            (members.clone(), members.iter().map(|&v| v + n).collect())
        })
        .collect();
    Ok((host, planted))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regular_is_regular() {
        let mut rng = RngStream::new(5, 0);
        for (n, r) in [(10, 3), (50, 7), (200, 60)] {
            let g = regular(n, r, &mut rng).unwrap();
            assert!(g.degrees().iter().all(|&d| d == r), "n={n} r={r}");
        }
        assert!(regular(5, 3, &mut rng).is_err());
    }

    #[test]
    fn planted_bundle_windows() {
        let mut rng = RngStream::new(9, 0);
        let h = planted_bundle(200, 0.3, 5.0, &mut rng).unwrap();
        let p = h.pair();
        assert!(p.degrees_a().iter().chain(p.degrees_b().iter()).all(|&d| (55..=65).contains(&d)));
    }

    #[test]
    fn planted_decomposition_blocks() {
        let spec = PlantedDecomposition { n: 40, blocks: 4, block_density: 1.0, noise: 0.0 };
        let (h, blocks) = planted_decomposition(&spec, &mut RngStream::new(1, 0)).unwrap();
        assert_eq!(h.graph.edge_count(), 4 * 100);
        assert_eq!(blocks[1].0, (10..20).collect::<Vec<_>>());
        assert_eq!(blocks[1].1, (50..60).collect::<Vec<_>>());
    }
}
