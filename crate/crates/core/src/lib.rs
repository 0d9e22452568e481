//! Regular-pair certification, bundle decompositions and bipartite packing.

// `!(x > 0.0)` is used on purpose so that NaN parameters are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::too_many_arguments)]

pub mod audit;
pub mod bitset;
pub mod decomp;
pub mod error;
pub mod exact;
pub mod generate;
pub mod graph;
mod json_float;
pub mod packing;
pub mod partition;
pub mod regularity;
pub mod rng;

use serde::{Deserialize, Serialize};

pub use error::{Error, Result};
pub use graph::{BipartiteHost, BipartitePair, Graph, LocalPair};
pub use regularity::{BundleCertificate, BundleMode, RegularityVerdict, VerdictKind};
pub use rng::RngStream;

/// Whether hypotheses of a construction are enforced (`Strict`) or only
/// recorded as warnings (`Relaxed`, for desk-scale runs).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strictness {
    Strict,
    #[default]
    Relaxed,
}
