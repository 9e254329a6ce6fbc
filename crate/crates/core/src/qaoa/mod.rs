//! Max-Cut QAOA on clustered graphs: instances, circuits, separator-driven cut
//! plans, fragment-count formulas and parameter optimisation.
//!
//! The layer convention is `H^{⊗n}` followed, per layer, by `RZZ(2γ)` on every
//! edge and `RX(2β)` on every qubit. Cost values are `⟨f⟩` with
//! `f(x) = (1/M) Σ_{(i,j)∈E} (−1)^{x_i ⊕ x_j}`, so lower is better.

mod circuit;
mod cuts;
mod graph;
mod optimize;
mod partition;

pub use circuit::{build_qaoa_circuit, maxcut_cost_operator, EdgeOrder, QAOAParams};
pub use cuts::{count_fragment_configs, max_fragment_qubits, plan_qaoa_cuts, CutStructure};
pub use graph::{generate_clustered_graph, ClusteredGraphSpec, Graph, VertexLabel, MAX_GENERATION_ATTEMPTS};
pub use optimize::{exact_cost, grid_search_p1, optimize_params, Evaluator, Init, OptimizeResult, OptimizerConfig};
pub use partition::{chain_partition, find_balanced_separator, separator_partition, EdgePartition};

use thiserror::Error;

use crate::cutting::CutError;
use crate::sim::SimError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QaoaError {
    #[error("invalid graph spec: {0}")]
    InvalidSpec(String),
    #[error("no connected instance after {attempts} attempts")]
    RetryBudget { attempts: usize },
    #[error("graph has no edges")]
    EmptyEdges,
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("vertex set does not disconnect the graph")]
    NotSeparating,
    #[error("no balanced separator of size <= {max_size}")]
    NoSeparator { max_size: usize },
    #[error("invalid edge partition: {0}")]
    InvalidPartition(String),
    #[error("cut plan violates a structural bound: {0}")]
    Structure(String),
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Cut(#[from] CutError),
    #[error("invalid JSON: {0}")]
    Format(String),
}

impl QaoaError {
    pub fn is_numerical(&self) -> bool {
        match self {
            QaoaError::Sim(e) => e.is_numerical(),
            QaoaError::Cut(e) => e.is_numerical(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, QaoaError>;
