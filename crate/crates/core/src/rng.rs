//! Seeded, splittable randomness and the tail bound used throughout.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::graph::Graph;

/// A `(seed, stream_id)`-addressed ChaCha stream.
///
/// Sequential draws go through [`RngCore`]. [`RngStream::uniform_at`] reads the
/// stream at a fixed counter position instead, so per-index draws do not depend
/// on evaluation order. The two access patterns overlap; derive a separate
/// stream for each.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        RngStream { seed, stream_id, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Child stream for `label`; independent of how much of `self` was consumed.
    pub fn derive(&self, label: u64) -> RngStream {
        RngStream::new(self.seed, mix(self.stream_id ^ mix(label)))
    }

    /// Uniform draw in `[0, 1)` at counter position `index`.
    pub fn uniform_at(&self, index: u64) -> f64 {
        let mut r = ChaCha8Rng::seed_from_u64(self.seed);
        r.set_stream(self.stream_id);
        r.set_word_pos(index as u128 * 2);
        to_unit(r.next_u64())
    }

    pub fn uniform(&mut self) -> f64 {
        to_unit(self.rng.next_u64())
    }

    /// `k` distinct indices from `0..n` (all of them when `k >= n`), in draw order.
    pub fn sample_indices(&mut self, n: usize, k: usize) -> Vec<usize> {
        rand::seq::index::sample(&mut self.rng, n, k.min(n)).into_vec()
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        use rand::seq::SliceRandom;
        items.shuffle(&mut self.rng);
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }
}

#[inline]
fn to_unit(x: u64) -> f64 {
    (x >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.rng.try_fill_bytes(dest)
    }
}

/// Two-sided tail bound for a sum of independent indicators.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailBound {
    pub mu: f64,
    pub expectation: f64,
    pub bound: f64,
}

/// `P(|X - E X| >= mu E X) <= 2 exp(-mu^2 E X / 3)`, valid for `0 <= mu <= 3/2`.
pub fn chernoff_bound(mu: f64, expectation: f64) -> Result<TailBound> {
    if !(0.0..=1.5).contains(&mu) {
        return Err(Error::ChernoffRange(mu));
    }
    if !(expectation >= 0.0) {
        return Err(Error::Parameter(format!("expectation {expectation} must be nonnegative")));
    }
    Ok(TailBound { mu, expectation, bound: 2.0 * (-mu * mu * expectation / 3.0).exp() })
}

/// Keeps each element of `set` independently with probability `p`; output sorted.
pub fn bernoulli_subset(set: &[usize], p: f64, rng: &mut RngStream) -> Vec<usize> {
    let mut out: Vec<usize> = set.iter().copied().filter(|_| rng.uniform() < p).collect();
    out.sort_unstable();
    out
}

/// Random equal split of the vertex set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bipartition {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    /// Highest-indexed vertex, left out when `n` is odd.
    pub dropped: Option<usize>,
    /// `deg(v, A)` and `deg(v, B)` for every vertex of the graph.
    pub deg_a: Vec<usize>,
    pub deg_b: Vec<usize>,
}

/// Coin-flip split followed by moving the lowest-indexed surplus vertices across.
pub fn random_balanced_bipartition(g: &Graph, rng: &mut RngStream) -> Result<Bipartition> {
    let n = g.n();
    if n <= 1 {
        return Err(Error::Degenerate(format!("cannot bipartition {n} vertices")));
    }
    let (used, dropped) = if n % 2 == 1 { (n - 1, Some(n - 1)) } else { (n, None) };
    let half = used / 2;
    let mut a = Vec::new();
    let mut b = Vec::new();
    for v in 0..used {
        if rng.next_u64() & 1 == 0 {
            a.push(v);
        } else {
            b.push(v);
        }
    }
    if a.len() > half {
        let moved: Vec<usize> = a.drain(..a.len() - half).collect();
        b.extend(moved);
    } else if b.len() > half {
        let moved: Vec<usize> = b.drain(..b.len() - half).collect();
        a.extend(moved);
    }
    a.sort_unstable();
    b.sort_unstable();
    let am = BitSet::from_indices(n, a.iter().copied());
    let bm = BitSet::from_indices(n, b.iter().copied());
    let deg_a = (0..n).map(|v| g.degree_into(v, &am)).collect();
    let deg_b = (0..n).map(|v| g.degree_into(v, &bm)).collect();
    Ok(Bipartition { a, b, dropped, deg_a, deg_b })
}
