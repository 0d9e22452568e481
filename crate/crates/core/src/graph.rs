//! Simple graphs with bitset adjacency, bipartite pair views, and the text
//! formats used for graphs on disk.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::bitset::{and_count, words_for, BitSet, Ones};
use crate::error::{Error, Result};
use crate::exact::{self, Q};

/// Undirected simple graph on `0..n` with one bitset row per vertex.
#[derive(Clone, Debug)]
pub struct Graph {
    n: usize,
    words: usize,
    adj: Vec<u64>,
    degrees: Vec<usize>,
    edge_count: usize,
}

impl Graph {
    /// Builds a simple graph, deduplicating repeated and reversed edges.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Graph> {
        let mut g = Graph::empty(n);
        for &(u, v) in edges {
            g.check_edge(u, v)?;
            g.insert_edge(u, v);
        }
        Ok(g)
    }

    pub fn empty(n: usize) -> Graph {
        let words = words_for(n);
        Graph { n, words, adj: vec![0; n * words], degrees: vec![0; n], edge_count: 0 }
    }

    fn check_edge(&self, u: usize, v: usize) -> Result<()> {
        for w in [u, v] {
            if w >= self.n {
                return Err(Error::OutOfRange { vertex: w, n: self.n });
            }
        }
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        Ok(())
    }

    /// Inserts `uv`; returns false when the edge was already present.
    pub(crate) fn insert_edge(&mut self, u: usize, v: usize) -> bool {
        let w = self.words;
        let bit_v = 1u64 << (v & 63);
        if self.adj[u * w + (v >> 6)] & bit_v != 0 {
            return false;
        }
        self.adj[u * w + (v >> 6)] |= bit_v;
        self.adj[v * w + (u >> 6)] |= 1u64 << (u & 63);
        self.degrees[u] += 1;
        self.degrees[v] += 1;
        self.edge_count += 1;
        true
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn degree(&self, v: usize) -> usize {
        self.degrees[v]
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    #[inline]
    pub fn row(&self, v: usize) -> &[u64] {
        &self.adj[v * self.words..(v + 1) * self.words]
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.row(u)[v >> 6] & (1u64 << (v & 63)) != 0
    }

    pub fn neighbors(&self, v: usize) -> Ones<'_> {
        Ones::new(self.row(v))
    }

    /// `deg(v, S)` for a vertex set given as a bitset over `0..n`.
    #[inline]
    pub fn degree_into(&self, v: usize, set: &BitSet) -> usize {
        and_count(self.row(v), set.words())
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count);
        for u in 0..self.n {
            out.extend(self.neighbors(u).filter(|&v| v > u).map(|v| (u, v)));
        }
        out
    }

    /// `e(G) / C(n, 2)`.
    pub fn density(&self) -> Result<f64> {
        if self.n < 2 {
            return Err(Error::EmptySide);
        }
        Ok(self.edge_count as f64 / (self.n * (self.n - 1) / 2) as f64)
    }

    pub fn induced(&self, vertices: &[usize]) -> Result<Graph> {
        let mut pos = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            if v >= self.n {
                return Err(Error::OutOfRange { vertex: v, n: self.n });
            }
            pos[v] = i;
        }
        let mut g = Graph::empty(vertices.len());
        for (i, &v) in vertices.iter().enumerate() {
            for u in self.neighbors(v) {
                if pos[u] != usize::MAX && pos[u] > i {
                    g.insert_edge(i, pos[u]);
                }
            }
        }
        Ok(g)
    }
}

/// Bipartite view `G[A, B]`: only edges between the two parts are visible.
#[derive(Clone, Debug)]
pub struct BipartitePair<'g> {
    graph: &'g Graph,
    a: Vec<usize>,
    b: Vec<usize>,
    a_mask: BitSet,
    b_mask: BitSet,
}

impl<'g> BipartitePair<'g> {
    pub fn new(graph: &'g Graph, mut a: Vec<usize>, mut b: Vec<usize>) -> Result<Self> {
        a.sort_unstable();
        a.dedup();
        b.sort_unstable();
        b.dedup();
        let n = graph.n();
        let mut a_mask = BitSet::new(n);
        for &v in &a {
            if v >= n {
                return Err(Error::OutOfRange { vertex: v, n });
            }
            a_mask.insert(v);
        }
        let mut b_mask = BitSet::new(n);
        for &v in &b {
            if v >= n {
                return Err(Error::OutOfRange { vertex: v, n });
            }
            if a_mask.contains(v) {
                return Err(Error::Overlap(v));
            }
            b_mask.insert(v);
        }
        Ok(BipartitePair { graph, a, b, a_mask, b_mask })
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn part_a(&self) -> &[usize] {
        &self.a
    }

    pub fn part_b(&self) -> &[usize] {
        &self.b
    }

    pub fn mask_a(&self) -> &BitSet {
        &self.a_mask
    }

    pub fn mask_b(&self) -> &BitSet {
        &self.b_mask
    }

    pub fn is_balanced(&self) -> bool {
        self.a.len() == self.b.len()
    }

    /// Degree of `x` into part B (for `x` in A) or into part A (for `x` in B).
    #[inline]
    pub fn cross_degree(&self, x: usize) -> usize {
        if self.a_mask.contains(x) {
            self.graph.degree_into(x, &self.b_mask)
        } else {
            self.graph.degree_into(x, &self.a_mask)
        }
    }

    pub fn degrees_a(&self) -> Vec<usize> {
        self.a.iter().map(|&x| self.graph.degree_into(x, &self.b_mask)).collect()
    }

    pub fn degrees_b(&self) -> Vec<usize> {
        self.b.iter().map(|&y| self.graph.degree_into(y, &self.a_mask)).collect()
    }

    /// `e(A, B)`.
    pub fn edge_count(&self) -> usize {
        self.degrees_a().iter().sum()
    }

    pub fn cross_edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for &x in &self.a {
            let mut row = self.b_mask.clone();
            row.intersect_with(self.graph.row(x));
            out.extend(row.iter().map(|y| (x, y)));
        }
        out
    }

    /// `d(A, B)` as an exact rational.
    pub fn density_exact(&self) -> Result<Q> {
        if self.a.is_empty() || self.b.is_empty() {
            return Err(Error::EmptySide);
        }
        Ok(exact::ratio(self.edge_count(), self.a.len() * self.b.len()))
    }

    pub fn density(&self) -> Result<f64> {
        if self.a.is_empty() || self.b.is_empty() {
            return Err(Error::EmptySide);
        }
        Ok(self.edge_count() as f64 / (self.a.len() * self.b.len()) as f64)
    }

    /// `G[X, Y]` for `X ⊆ A`, `Y ⊆ B`, sharing the underlying graph.
    pub fn induced(&self, x: &[usize], y: &[usize]) -> Result<BipartitePair<'g>> {
        if let Some(&v) = x.iter().find(|&&v| !self.a_mask.contains(v)) {
            return Err(Error::NotSubset(v));
        }
        if let Some(&v) = y.iter().find(|&&v| !self.b_mask.contains(v)) {
            return Err(Error::NotSubset(v));
        }
        BipartitePair::new(self.graph, x.to_vec(), y.to_vec())
    }

    /// Dense local copy: A-rows over local B indices and B-rows over local A indices.
    pub fn local(&self) -> LocalPair {
        LocalPair::from_pair(self)
    }
}

/// Biadjacency of a pair in local coordinates, used by the certifiers.
#[derive(Clone, Debug)]
pub struct LocalPair {
    pub size_a: usize,
    pub size_b: usize,
    words_b: usize,
    words_a: usize,
    rows_a: Vec<u64>,
    rows_b: Vec<u64>,
}

impl LocalPair {
    pub fn from_pair(p: &BipartitePair<'_>) -> LocalPair {
        let (ma, mb) = (p.a.len(), p.b.len());
        let mut lp = LocalPair::empty(ma, mb);
        for (i, &x) in p.a.iter().enumerate() {
            let row = p.graph.row(x);
            for (j, &y) in p.b.iter().enumerate() {
                if row[y >> 6] & (1u64 << (y & 63)) != 0 {
                    lp.set(i, j);
                }
            }
        }
        lp
    }

    pub fn from_edges(size_a: usize, size_b: usize, edges: &[(usize, usize)]) -> LocalPair {
        let mut lp = LocalPair::empty(size_a, size_b);
        for &(i, j) in edges {
            lp.set(i, j);
        }
        lp
    }

    fn empty(size_a: usize, size_b: usize) -> LocalPair {
        let (words_a, words_b) = (words_for(size_a), words_for(size_b));
        LocalPair {
            size_a,
            size_b,
            words_a,
            words_b,
            rows_a: vec![0; size_a * words_b],
            rows_b: vec![0; size_b * words_a],
        }
    }

    fn set(&mut self, i: usize, j: usize) {
        self.rows_a[i * self.words_b + (j >> 6)] |= 1u64 << (j & 63);
        self.rows_b[j * self.words_a + (i >> 6)] |= 1u64 << (i & 63);
    }

    #[inline]
    pub fn row_a(&self, i: usize) -> &[u64] {
        &self.rows_a[i * self.words_b..(i + 1) * self.words_b]
    }

    #[inline]
    pub fn row_b(&self, j: usize) -> &[u64] {
        &self.rows_b[j * self.words_a..(j + 1) * self.words_a]
    }

    pub fn has(&self, i: usize, j: usize) -> bool {
        self.row_a(i)[j >> 6] & (1u64 << (j & 63)) != 0
    }

    pub fn degree_a(&self, i: usize) -> usize {
        crate::bitset::popcount(self.row_a(i))
    }

    pub fn degree_b(&self, j: usize) -> usize {
        crate::bitset::popcount(self.row_b(j))
    }

    pub fn edge_count(&self) -> usize {
        crate::bitset::popcount(&self.rows_a)
    }
}

/// Degree statistics against a reference degree `r` and slack `lambda`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreeProfile {
    pub min_deg: usize,
    pub max_deg: usize,
    pub r: usize,
    pub lambda: f64,
    /// `r(1 - lambda) <= deg(v) <= r` for every vertex.
    pub holds: bool,
    /// The same window written as `(a ± b)`-regularity.
    pub pm_center: f64,
    pub pm_radius: f64,
    pub pm_holds: bool,
}

pub fn degree_profile(g: &Graph, r: usize, lambda: f64) -> DegreeProfile {
    let min_deg = g.degrees().iter().copied().min().unwrap_or(0);
    let max_deg = g.degrees().iter().copied().max().unwrap_or(0);
    let rq = exact::qi(r as i64);
    let lam = exact::q(lambda);
    let lo = exact::at_least(&(&rq * (exact::one() - &lam)));
    let holds = g.n() == 0 || (min_deg as i64 >= lo && max_deg <= r);
    let two = exact::qi(2);
    let center = &rq * (exact::one() - &lam / &two);
    let radius = &rq * &lam / &two;
    let pm_lo = exact::at_least(&(&center - &radius));
    let pm_hi = exact::at_most(&(&center + &radius));
    let pm_holds = g.n() == 0 || (min_deg as i64 >= pm_lo && max_deg as i64 <= pm_hi);
    DegreeProfile {
        min_deg,
        max_deg,
        r,
        lambda,
        holds,
        pm_center: exact::to_f64(&center),
        pm_radius: exact::to_f64(&radius),
        pm_holds,
    }
}

/// A graph together with a fixed bipartition `A ∪ B` of (some of) its vertices.
#[derive(Clone, Debug)]
pub struct BipartiteHost {
    pub graph: Graph,
    pub a: Vec<usize>,
    pub b: Vec<usize>,
}

impl BipartiteHost {
    /// Host with parts `0..na` and `na..na+nb`; edges are given as `(a, b)` local indices.
    pub fn from_local_edges(na: usize, nb: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph::empty(na + nb);
        for &(a, b) in edges {
            if a >= na {
                return Err(Error::OutOfRange { vertex: a, n: na });
            }
            if b >= nb {
                return Err(Error::OutOfRange { vertex: b, n: nb });
            }
            g.insert_edge(a, na + b);
        }
        Ok(BipartiteHost { graph: g, a: (0..na).collect(), b: (na..na + nb).collect() })
    }

    pub fn pair(&self) -> BipartitePair<'_> {
        BipartitePair::new(&self.graph, self.a.clone(), self.b.clone())
            .expect("host parts are disjoint")
    }

    pub fn local_edges(&self) -> Vec<(usize, usize)> {
        let na = self.a.len();
        self.pair().cross_edges().into_iter().map(|(x, y)| (x, y - na)).collect()
    }
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let body = line.split('#').next().unwrap_or("");
        let toks: Vec<&str> = body.split_whitespace().collect();
        (!toks.is_empty()).then_some((i + 1, toks))
    })
}

fn parse_nums(line: usize, toks: &[&str], want: usize) -> Result<Vec<usize>> {
    if toks.len() != want {
        return Err(Error::Parse { line, msg: format!("expected {want} fields, found {}", toks.len()) });
    }
    toks.iter()
        .map(|t| t.parse::<usize>().map_err(|e| Error::Parse { line, msg: format!("{t:?}: {e}") }))
        .collect()
}

/// Parses the edge-list format: header `n m`, then `m` lines `u v`.
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut lines = data_lines(text);
    let (hl, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "missing header".into() })?;
    let h = parse_nums(hl, &header, 2)?;
    let (n, m) = (h[0], h[1]);
    let mut g = Graph::empty(n);
    let mut seen = 0;
    for (line, toks) in lines {
        let e = parse_nums(line, &toks, 2)?;
        g.check_edge(e[0], e[1]).map_err(|err| Error::Parse { line, msg: err.to_string() })?;
        g.insert_edge(e[0], e[1]);
        seen += 1;
    }
    if seen != m {
        return Err(Error::Parse { line: hl, msg: format!("header declares {m} edges, found {seen}") });
    }
    Ok(g)
}

/// Parses the bipartite format: header `nA nB m`, then `m` lines `a b`.
pub fn parse_bipartite(text: &str) -> Result<BipartiteHost> {
    let mut lines = data_lines(text);
    let (hl, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "missing header".into() })?;
    let h = parse_nums(hl, &header, 3)?;
    let (na, nb, m) = (h[0], h[1], h[2]);
    let mut edges = Vec::with_capacity(m);
    for (line, toks) in lines {
        let e = parse_nums(line, &toks, 2)?;
        if e[0] >= na || e[1] >= nb {
            return Err(Error::Parse { line, msg: format!("index out of range: {} {}", e[0], e[1]) });
        }
        edges.push((e[0], e[1]));
    }
    if edges.len() != m {
        return Err(Error::Parse { line: hl, msg: format!("header declares {m} edges, found {}", edges.len()) });
    }
    BipartiteHost::from_local_edges(na, nb, &edges)
}

pub fn write_edge_list(g: &Graph) -> String {
    let edges = g.edges();
    let mut s = format!("{} {}\n", g.n(), edges.len());
    for (u, v) in edges {
        let _ = writeln!(s, "{u} {v}");
    }
    s
}

pub fn write_bipartite(host: &BipartiteHost) -> String {
    let edges = host.local_edges();
    let mut s = format!("{} {} {}\n", host.a.len(), host.b.len(), edges.len());
    for (a, b) in edges {
        let _ = writeln!(s, "{a} {b}");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete_pair(m: usize) -> BipartiteHost {
        let edges: Vec<_> = (0..m).flat_map(|a| (0..m).map(move |b| (a, b))).collect();
        BipartiteHost::from_local_edges(m, m, &edges).unwrap()
    }

    #[test]
    fn build_single_edge() {
        let g = Graph::new(2, &[(0, 1)]).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.degrees(), &[1, 1]);
    }

    #[test]
    fn build_dedups_reversed_edges() {
        let g = Graph::new(3, &[(0, 1), (1, 0)]).unwrap();
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn build_rejects_self_loop() {
        let err = Graph::new(3, &[(0, 0)]).unwrap_err();
        assert_eq!(err.to_string(), "self-loop at 0");
        assert!(matches!(Graph::new(3, &[(0, 3)]), Err(Error::OutOfRange { vertex: 3, .. })));
    }

    #[test]
    fn densities() {
        let k33 = complete_pair(3);
        assert_eq!(k33.pair().density().unwrap(), 1.0);
        let empty = BipartiteHost::from_local_edges(3, 3, &[]).unwrap();
        assert_eq!(empty.pair().density().unwrap(), 0.0);
        // C4 with parts {0,2}, {1,3}
        let c4 = Graph::new(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let p = BipartitePair::new(&c4, vec![0, 2], vec![1, 3]).unwrap();
        assert_eq!(p.density().unwrap(), 1.0);
        let e = BipartitePair::new(&c4, vec![], vec![1]).unwrap();
        assert_eq!(e.density().unwrap_err().to_string(), "empty side");
        assert!((c4.density().unwrap() - 4.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn induced_pairs() {
        let k22 = complete_pair(2);
        let p = k22.pair();
        let same = p.induced(&[0, 1], &[2, 3]).unwrap();
        assert_eq!(same.edge_count(), p.edge_count());
        assert_eq!(p.induced(&[0], &[2]).unwrap().density().unwrap(), 1.0);
        let g = Graph::new(4, &[(0, 2)]).unwrap();
        let q = BipartitePair::new(&g, vec![0, 1], vec![2, 3]).unwrap();
        assert_eq!(q.induced(&[1], &[2, 3]).unwrap().density().unwrap(), 0.0);
        assert_eq!(q.induced(&[2], &[3]).unwrap_err(), Error::NotSubset(2));
    }

    #[test]
    fn degree_profiles() {
        // K4 is 3-regular
        let k4 = Graph::new(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        assert!(degree_profile(&k4, 3, 0.0).holds);
        let p = degree_profile(&k4, 4, 0.0);
        assert!(!p.holds);
        assert_eq!(p.max_deg, 3);
        // degrees 9 and 10: K_{10,10} minus a perfect matching on one vertex pair... use a
        // bipartite 10x10 with one missing edge.
        let mut edges: Vec<_> = (0..10).flat_map(|a| (0..10).map(move |b| (a, b))).collect();
        edges.retain(|&e| e != (0, 0));
        let h = BipartiteHost::from_local_edges(10, 10, &edges).unwrap();
        let p = degree_profile(&h.graph, 10, 0.1);
        assert_eq!((p.min_deg, p.max_deg), (9, 10));
        assert!(p.holds);
        assert!(p.pm_holds);
    }

    #[test]
    fn text_formats() {
        let g = parse_edge_list("# comment\n3 2\n0 1\n1 2 # trailing\n").unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(parse_edge_list(&write_edge_list(&g)).unwrap().edges(), g.edges());
        let err = parse_edge_list("3 1\n1 1\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        let h = parse_bipartite("2 3 2\n0 2\n1 0\n").unwrap();
        assert_eq!(h.graph.n(), 5);
        assert!(h.graph.has_edge(0, 4));
        assert_eq!(parse_bipartite(&write_bipartite(&h)).unwrap().local_edges(), h.local_edges());
        assert!(parse_bipartite("1 1 1\n0 1\n").is_err());
    }
}
