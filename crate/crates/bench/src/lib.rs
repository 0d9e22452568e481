//! Fixtures shared by the benchmarks.

use bundle_decomp_core::generate::{self, PlantedDecomposition};
use bundle_decomp_core::{BipartiteHost, Graph, RngStream};

/// Random `m × m` pair of density `p`.
pub fn random_pair(m: usize, p: f64, seed: u64) -> BipartiteHost {
    generate::bipartite_density(m, m, p, &mut RngStream::new(seed, 0)).expect("valid density")
}

/// Host with `blocks` planted dense blocks of density 0.3 and no noise.
pub fn planted_blocks(n: usize, blocks: usize, seed: u64) -> BipartiteHost {
    let spec = PlantedDecomposition { n, blocks, block_density: 0.3, noise: 0.0 };
    generate::planted_decomposition(&spec, &mut RngStream::new(seed, 0)).expect("valid spec").0
}

pub fn regular(n: usize, r: usize, seed: u64) -> Graph {
    generate::regular(n, r, &mut RngStream::new(seed, 0)).expect("n r even")
}
