use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("self-loop at {0}")]
    SelfLoop(usize),
    #[error("vertex {vertex} out of range (n = {n})")]
    OutOfRange { vertex: usize, n: usize },
    #[error("empty side")]
    EmptySide,
    #[error("vertex {0} is not in the parent part")]
    NotSubset(usize),
    #[error("vertex {0} appears on both sides of the pair")]
    Overlap(usize),
    #[error("degenerate graph: {0}")]
    Degenerate(String),
    #[error("Chernoff form invalid: mu = {0} outside [0, 3/2]")]
    ChernoffRange(f64),
    #[error("use KR certifier: parts {a}x{b} exceed brute-force cap {cap}")]
    BruteForceCap { a: usize, b: usize, cap: usize },
    #[error("KR hypothesis violated: |A| = {size} < 2/eta = {need:.3}")]
    KrHypothesis { size: usize, need: f64 },
    #[error("slicing hypothesis violated: {0}")]
    Slicing(String),
    #[error("lemma hypothesis violated: {0}")]
    BundleHypothesis(String),
    #[error("bundle extraction bound failed: {0}")]
    BundleConclusion(String),
    #[error("graph is not balanced: {a} vs {b}")]
    Unbalanced { a: usize, b: usize },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("degrees inconsistent with r: {0}")]
    Probability(String),
    #[error("partition is not a disjoint cover: {0}")]
    PartitionStructure(String),
    #[error("sampling lemma hypothesis violated: {0}")]
    SamplingHypothesis(String),
    #[error("pattern is not bipartite (odd cycle through {0})")]
    NotBipartite(usize),
    #[error("use balanced pipeline: pattern parts are equal")]
    BalancedPattern,
    #[error("use pack_balanced: pattern is balanced")]
    NeedsUnbalanced,
    #[error("h too large: h = {h} > {bound:.3e}")]
    PatternTooLarge { h: usize, bound: f64 },
    #[error("feasibility: {0}")]
    Feasibility(String),
    #[error("infeasible degree sequence: {0}")]
    DegreeSequence(String),
    #[error("precondition: {0}")]
    Precondition(String),
}

impl Error {
    /// Strict-mode hypothesis gates, as opposed to malformed input.
    pub fn is_feasibility_gate(&self) -> bool {
        matches!(self, Error::Feasibility(_) | Error::PatternTooLarge { .. })
    }
}
