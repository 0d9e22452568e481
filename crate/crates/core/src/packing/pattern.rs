//! Bipartite pattern graphs.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Bipartite pattern with parts `X` (the larger) and `Y`.
///
/// `copies` counts the copies of the original pattern it contains (2 after
/// doubling an unbalanced pattern); copy `c` occupies vertices
/// `c*h/copies .. (c+1)*h/copies`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PatternRecord")]
pub struct PatternGraph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    pub x: Vec<usize>,
    pub y: Vec<usize>,
    pub copies: usize,
    pub doubled: bool,
    #[serde(skip)]
    adj: Vec<Vec<usize>>,
}

/// Stored form; parts are re-validated on load.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PatternRecord {
    n: usize,
    edges: Vec<(usize, usize)>,
    x: Vec<usize>,
    y: Vec<usize>,
    copies: usize,
    doubled: bool,
}

impl TryFrom<PatternRecord> for PatternGraph {
    type Error = Error;

    fn try_from(r: PatternRecord) -> Result<Self> {
        if r.copies == 0 || !r.n.is_multiple_of(r.copies) {
            return Err(Error::Precondition(format!("{} copies do not split {} vertices", r.copies, r.n)));
        }
        let p = PatternGraph::with_parts(r.n, &r.edges, r.x, r.y)?;
        Ok(PatternGraph { copies: r.copies, doubled: r.doubled, ..p })
    }
}

impl PatternGraph {
    fn build(n: usize, edges: Vec<(usize, usize)>, mut x: Vec<usize>, mut y: Vec<usize>, copies: usize, doubled: bool) -> Self {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        x.sort_unstable();
        y.sort_unstable();
        PatternGraph { n, edges, x, y, copies, doubled, adj }
    }

    /// Two-colours each component, putting its larger colour class into `X`
    /// (ties: the class of the lowest-indexed vertex).
    pub fn from_graph(g: &Graph) -> Result<Self> {
        let n = g.n();
        let mut colour = vec![u8::MAX; n];
        let (mut x, mut y) = (Vec::new(), Vec::new());
        for s in 0..n {
            if colour[s] != u8::MAX {
                continue;
            }
            colour[s] = 0;
            let mut comp = vec![s];
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for v in g.neighbors(u) {
                    if colour[v] == u8::MAX {
                        colour[v] = 1 - colour[u];
                        comp.push(v);
                        queue.push_back(v);
                    } else if colour[v] == colour[u] {
                        return Err(Error::NotBipartite(v));
                    }
                }
            }
            let zeros = comp.iter().filter(|&&v| colour[v] == 0).count();
            let big = if 2 * zeros >= comp.len() { 0 } else { 1 };
            for v in comp {
                if colour[v] == big {
                    x.push(v);
                } else {
                    y.push(v);
                }
            }
        }
        Ok(Self::build(n, g.edges(), x, y, 1, false))
    }

    /// Pattern with explicitly given parts; fails unless every edge crosses.
    pub fn with_parts(n: usize, edges: &[(usize, usize)], x: Vec<usize>, y: Vec<usize>) -> Result<Self> {
        let mut side = vec![None; n];
        for (v, s) in x.iter().map(|&v| (v, true)).chain(y.iter().map(|&v| (v, false))) {
            if v >= n {
                return Err(Error::OutOfRange { vertex: v, n });
            }
            if side[v].replace(s).is_some() {
                return Err(Error::Overlap(v));
            }
        }
        if let Some(v) = (0..n).find(|&v| side[v].is_none()) {
            return Err(Error::Precondition(format!("pattern vertex {v} is in neither part")));
        }
        if x.len() < y.len() {
            return Err(Error::Precondition("X must be the larger part".into()));
        }
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::OutOfRange { vertex: u.max(v), n });
            }
            if side[u] == side[v] {
                return Err(Error::NotBipartite(u));
            }
        }
        Ok(Self::build(n, edges.to_vec(), x, y, 1, false))
    }

    pub fn h(&self) -> usize {
        self.n
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// `|X| - |Y|`
    pub fn delta_h(&self) -> usize {
        self.x.len() - self.y.len()
    }

    pub fn is_balanced(&self) -> bool {
        self.x.len() == self.y.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn in_x(&self, v: usize) -> bool {
        self.x.binary_search(&v).is_ok()
    }

    /// Size of one original copy.
    pub fn base_h(&self) -> usize {
        self.n / self.copies
    }

    /// Vertex order in which every vertex after the first of its component
    /// has an earlier neighbour.
    pub fn bfs_order(&self) -> Vec<usize> {
        let mut seen = vec![false; self.n];
        let mut order = Vec::with_capacity(self.n);
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                order.push(u);
                for &v in &self.adj[u] {
                    if !seen[v] {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            }
        }
        order
    }
}

/// Replaces every edge by a path of length 2. Branch vertices keep ids
/// `0..v`, the subdivision vertex of the `k`-th edge (in `edges()` order) is `v + k`.
pub fn one_subdivision(h: &Graph) -> PatternGraph {
    let v = h.n();
    let base = h.edges();
    let mut edges = Vec::with_capacity(2 * base.len());
    for (k, &(a, b)) in base.iter().enumerate() {
        edges.push((a, v + k));
        edges.push((b, v + k));
    }
    let branch: Vec<usize> = (0..v).collect();
    let sub: Vec<usize> = (v..v + base.len()).collect();
    let (x, y) = if branch.len() >= sub.len() { (branch, sub) } else { (sub, branch) };
    PatternGraph::build(v + base.len(), edges, x, y, 1, false)
}

/// `H` itself if balanced (tagged as doubled), otherwise two disjoint copies,
/// the second with its parts swapped, so both parts have `|X| + |Y|` vertices.
pub fn balance_double(h: &PatternGraph) -> PatternGraph {
    if h.is_balanced() {
        let mut out = h.clone();
        out.doubled = true;
        return out;
    }
    let n = h.n;
    let mut edges = h.edges.clone();
    edges.extend(h.edges.iter().map(|&(u, v)| (u + n, v + n)));
    let x: Vec<usize> = h.x.iter().copied().chain(h.y.iter().map(|v| v + n)).collect();
    let y: Vec<usize> = h.y.iter().copied().chain(h.x.iter().map(|v| v + n)).collect();
    PatternGraph::build(2 * n, edges, x, y, 2 * h.copies, true)
}

/// Small named graphs: `K2`, `P<k>` (path on k vertices), `C<k>`, `K<k>`,
/// `K<a>,<b>`, `S<k>` (star with k leaves).
pub fn named_graph(name: &str) -> Result<Graph> {
    let bad = || Error::Parameter(format!("unknown pattern name {name:?}"));
    let num = |s: &str| s.parse::<usize>().map_err(|_| bad());
    let (head, rest) = name.split_at(1.min(name.len()));
    match head {
        "P" => {
            let k = num(rest)?;
            Graph::new(k, &(1..k).map(|i| (i - 1, i)).collect::<Vec<_>>())
        }
        "C" => {
            let k = num(rest)?;
            if k < 3 {
                return Err(bad());
            }
            Graph::new(k, &(0..k).map(|i| (i, (i + 1) % k)).collect::<Vec<_>>())
        }
        "S" => {
            let k = num(rest)?;
            Graph::new(k + 1, &(1..=k).map(|i| (0, i)).collect::<Vec<_>>())
        }
        "K" => match rest.split_once(',') {
            Some((a, b)) => {
                let (a, b) = (num(a)?, num(b)?);
                Graph::new(a + b, &(0..a).flat_map(|i| (0..b).map(move |j| (i, a + j))).collect::<Vec<_>>())
            }
            None => {
                let k = num(rest)?;
                Graph::new(k, &(0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect::<Vec<_>>())
            }
        },
        _ => Err(bad()),
    }
}
