//! Embeddings, their verification, and the backtracking/swap-repair placer
//! shared by the packing engines.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::pattern::PatternGraph;
use crate::audit::Audit;
use crate::bitset::{and_count, BitSet};
use crate::graph::Graph;
use crate::rng::RngStream;

/// Image of pattern vertex `i` is `map[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Embedding {
    pub map: Vec<usize>,
}

pub fn verify_embedding(g: &Graph, pattern: &PatternGraph, e: &Embedding) -> Result<(), String> {
    if e.map.len() != pattern.h() {
        return Err(format!("maps {} vertices, pattern has {}", e.map.len(), pattern.h()));
    }
    if let Some(&v) = e.map.iter().find(|&&v| v >= g.n()) {
        return Err(format!("image {v} out of range"));
    }
    let mut sorted = e.map.clone();
    sorted.sort_unstable();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(format!("vertex {} used twice", w[0]));
    }
    if let Some(&(u, v)) = pattern.edges.iter().find(|&&(u, v)| !g.has_edge(e.map[u], e.map[v])) {
        return Err(format!("pattern edge ({u}, {v}) maps to non-edge ({}, {})", e.map[u], e.map[v]));
    }
    Ok(())
}

/// Re-checks a packing: each copy injective and edge-preserving, copies
/// pairwise disjoint, and `uncovered` exactly the vertices no copy uses.
pub fn verify_packing(g: &Graph, pattern: &PatternGraph, embeddings: &[Embedding], uncovered: &[usize]) -> Audit {
    let mut audit = Audit::default();
    let mut bad_copy = None;
    for (i, e) in embeddings.iter().enumerate() {
        if let Err(msg) = verify_embedding(g, pattern, e) {
            bad_copy = Some(format!("copy {i}: {msg}"));
            break;
        }
    }
    match bad_copy {
        None => audit.pass("embeddings"),
        Some(s) => audit.fail("embeddings", s),
    }
    let mut owner: Vec<Option<usize>> = vec![None; g.n()];
    let mut clash = None;
    for (i, e) in embeddings.iter().enumerate() {
        for &v in e.map.iter().filter(|&&v| v < g.n()) {
            if let Some(j) = owner[v] {
                if j != i && clash.is_none() {
                    clash = Some(format!("vertex {v} in copies {j} and {i}"));
                }
            }
            owner[v] = Some(i);
        }
    }
    match clash {
        None => audit.pass("disjoint"),
        Some(s) => audit.fail("disjoint", s),
    }
    let mut expected: Vec<usize> = (0..g.n()).filter(|&v| owner[v].is_none()).collect();
    let mut got = uncovered.to_vec();
    got.sort_unstable();
    expected.sort_unstable();
    if got == expected {
        audit.pass("uncovered-complement");
    } else {
        let first = expected.iter().find(|v| got.binary_search(v).is_err()).or_else(|| got.iter().find(|v| expected.binary_search(v).is_err()));
        audit.fail("uncovered-complement", format!("mismatch at vertex {first:?}"));
    }
    audit
}

const NONE: usize = usize::MAX;

/// Candidate ordering inside the search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Order {
    Random,
    /// Fewest vacant neighbours first, ties random.
    Tightest,
}

/// Depth-first search for one copy of `pattern` with `X` inside `allowed_x`
/// and `Y` inside `allowed_y` (both already restricted to vacant vertices).
/// Returns the map, or the deepest partial depth reached.
pub(crate) fn search_copy(
    g: &Graph,
    pattern: &PatternGraph,
    allowed_x: &BitSet,
    allowed_y: &BitSet,
    order_policy: Order,
    budget: usize,
    rng: &mut RngStream,
) -> Result<Vec<usize>, usize> {
    let order = pattern.bfs_order();
    let mut map = vec![NONE; pattern.h()];
    let mut st = Search { g, pattern, allowed_x, allowed_y, order_policy, budget, best: 0, order: &order };
    if st.dfs(0, &mut map, rng) {
        Ok(map)
    } else {
        Err(st.best)
    }
}

struct Search<'a> {
    g: &'a Graph,
    pattern: &'a PatternGraph,
    allowed_x: &'a BitSet,
    allowed_y: &'a BitSet,
    order_policy: Order,
    budget: usize,
    best: usize,
    order: &'a [usize],
}

impl Search<'_> {
    fn dfs(&mut self, idx: usize, map: &mut [usize], rng: &mut RngStream) -> bool {
        self.best = self.best.max(idx);
        if idx == self.order.len() {
            return true;
        }
        let v = self.order[idx];
        let in_x = self.pattern.in_x(v);
        let mut cand = if in_x { self.allowed_x.clone() } else { self.allowed_y.clone() };
        for &u in self.pattern.neighbors(v) {
            if map[u] != NONE {
                cand.intersect_with(self.g.row(map[u]));
            }
        }
        for &w in map.iter().filter(|&&w| w != NONE) {
            cand.remove(w);
        }
        let other = if in_x { self.allowed_y } else { self.allowed_x };
        let list = ordered(self.g, cand.to_vec(), other, self.order_policy, rng);
        for c in list {
            if self.budget == 0 {
                return false;
            }
            self.budget -= 1;
            map[v] = c;
            if self.dfs(idx + 1, map, rng) {
                return true;
            }
            map[v] = NONE;
        }
        false
    }
}

fn ordered(g: &Graph, mut list: Vec<usize>, other: &BitSet, policy: Order, rng: &mut RngStream) -> Vec<usize> {
    match policy {
        Order::Random => {
            rng.shuffle(&mut list);
            list
        }
        Order::Tightest => {
            let mut keyed: Vec<(usize, u64, usize)> =
                list.into_iter().map(|c| (and_count(g.row(c), other.words()), rng.next_u64(), c)).collect();
            keyed.sort_unstable();
            keyed.into_iter().map(|(_, _, c)| c).collect()
        }
    }
}

/// Places many copies inside a fixed vertex set, keeping track of owners so
/// that a stuck copy can relocate a vertex of an earlier copy.
pub(crate) struct Placer<'a> {
    g: &'a Graph,
    pattern: &'a PatternGraph,
    pub s_side: BitSet,
    pub t_side: BitSet,
    pub vacant: BitSet,
    owner: Vec<Option<(u32, u32)>>,
    pub copies: Vec<Vec<usize>>,
    pub repairs: usize,
}

impl<'a> Placer<'a> {
    pub fn new(g: &'a Graph, pattern: &'a PatternGraph, s: &[usize], t: &[usize]) -> Self {
        let n = g.n();
        let s_side = BitSet::from_indices(n, s.iter().copied());
        let t_side = BitSet::from_indices(n, t.iter().copied());
        let mut vacant = s_side.clone();
        vacant.union_with(&t_side);
        Placer { g, pattern, s_side, t_side, vacant, owner: vec![None; n], copies: Vec::new(), repairs: 0 }
    }

    fn sides(&self, x_on_s: bool) -> (&BitSet, &BitSet) {
        if x_on_s {
            (&self.s_side, &self.t_side)
        } else {
            (&self.t_side, &self.s_side)
        }
    }

    fn commit(&mut self, map: Vec<usize>) {
        let id = self.copies.len() as u32;
        for (q, &v) in map.iter().enumerate() {
            self.vacant.remove(v);
            self.owner[v] = Some((id, q as u32));
        }
        self.copies.push(map);
    }

    /// One copy with `X` on the S side iff `x_on_s`: a bounded search among
    /// vacant vertices first, then vertex-by-vertex placement that may move
    /// up to `repair` vertices of earlier copies.
    pub fn place(&mut self, x_on_s: bool, budget: usize, repair: usize, rng: &mut RngStream) -> bool {
        let (sx, sy) = self.sides(x_on_s);
        let mut ax = sx.clone();
        ax.intersect_with(self.vacant.words());
        let mut ay = sy.clone();
        ay.intersect_with(self.vacant.words());
        if let Ok(map) = search_copy(self.g, self.pattern, &ax, &ay, Order::Tightest, budget, rng) {
            self.commit(map);
            return true;
        }
        if repair == 0 {
            return false;
        }
        self.place_with_repair(x_on_s, repair, rng)
    }

    fn constrained(&self, v: usize, map: &[usize], x_on_s: bool) -> BitSet {
        let (sx, sy) = self.sides(x_on_s);
        let mut cand = if self.pattern.in_x(v) { sx.clone() } else { sy.clone() };
        for &u in self.pattern.neighbors(v) {
            if map[u] != NONE {
                cand.intersect_with(self.g.row(map[u]));
            }
        }
        cand
    }

    fn place_with_repair(&mut self, x_on_s: bool, mut repair: usize, rng: &mut RngStream) -> bool {
        let order = self.pattern.bfs_order();
        let mut map = vec![NONE; self.pattern.h()];
        let mut taken: Vec<usize> = Vec::new();
        let release = |me: &mut Self, taken: &[usize]| {
            for &w in taken {
                me.vacant.insert(w);
            }
        };
        for &v in &order {
            let cand = self.constrained(v, &map, x_on_s);
            let mut free = cand.clone();
            free.intersect_with(self.vacant.words());
            let other = if self.pattern.in_x(v) == x_on_s { self.t_side.clone() } else { self.s_side.clone() };
            let mut vac_other = other;
            vac_other.intersect_with(self.vacant.words());
            if let Some(&c) = ordered(self.g, free.to_vec(), &vac_other, Order::Tightest, rng).first() {
                map[v] = c;
                self.vacant.remove(c);
                taken.push(c);
                continue;
            }
            // occupied candidates whose occupant can move to a vacant vertex
            let mut occupied: Vec<usize> = cand.iter().filter(|&w| self.owner[w].is_some()).collect();
            rng.shuffle(&mut occupied);
            let mut done = false;
            for w in occupied {
                if repair == 0 {
                    break;
                }
                let (c, q) = self.owner[w].expect("occupied");
                let (c, q) = (c as usize, q as usize);
                let mut spot = if self.s_side.contains(w) { self.s_side.clone() } else { self.t_side.clone() };
                spot.intersect_with(self.vacant.words());
                for &q2 in self.pattern.neighbors(q) {
                    spot.intersect_with(self.g.row(self.copies[c][q2]));
                }
                repair -= 1;
                if let Some(z) = spot.iter().next() {
                    self.copies[c][q] = z;
                    self.owner[z] = Some((c as u32, q as u32));
                    self.vacant.remove(z);
                    self.owner[w] = None;
                    self.repairs += 1;
                    map[v] = w;
                    taken.push(w);
                    done = true;
                    break;
                }
            }
            if !done {
                release(self, &taken);
                return false;
            }
        }
        self.commit(map);
        true
    }
}
