//! Packing vertex-disjoint copies of a bipartite pattern.

pub mod balanced;
pub mod dense;
pub mod embed;
pub mod pattern;
pub mod pipeline;
pub mod unbalanced;

pub use dense::{embed_in_dense, DenseConfig, DenseOutcome};
pub use embed::{verify_embedding, verify_packing, Embedding};
pub use pattern::{balance_double, named_graph, one_subdivision, PatternGraph};
pub use pipeline::{audit_packing, BoundCheck, ClusterStats, PackConfig, PackingResult};
pub use balanced::pack_balanced;
pub use unbalanced::{
    absorb_exceptional, balance_assignment, embed_super_regular, moho_embed, pack_unbalanced, Absorption,
    AssignmentPlan, ChainOutcome, SuperRegularConfig, SuperRegularOutcome,
};
