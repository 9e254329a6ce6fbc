//! Wire cutting: plans, the Monte Carlo estimator and exact reference paths.
//!
//! A [`CutPlan`] lists groups of parallel wires, each cut just before a
//! position in the op list, and assigns every non-terminal op to a fragment.
//! The estimator simulates each fragment on its own register and executes the
//! circuit in op order, so cyclic communication between fragments needs no
//! special handling.

mod exact;
mod exec;
mod plan;
mod shots;

pub use exact::{exact_cut_expectation, exact_qtilde, modified_circuit, MAX_EXACT_GROUPS};
pub use exec::{estimate, sample_cut, Estimate, ShotConfig};
pub use plan::{plan_bipartition, CutGroup, CutMethod, CutPlan, Fragment};
pub use shots::{run_indexed, CHUNK_SHOTS};

use thiserror::Error;

use crate::channels::ChannelError;
use crate::clifford::CliffordError;
use crate::sim::SimError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CutError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Clifford(#[from] CliffordError),
    #[error("op {op} acts outside the allowed half of the bipartition")]
    NotComposed { op: usize },
    #[error("nothing to cut")]
    NothingToCut,
    #[error("wire {wire} has no op on both sides of position {position}")]
    WireNotCuttable { wire: usize, position: usize },
    #[error("wire {wire} is cut twice between the same pair of ops")]
    DuplicateCut { wire: usize },
    #[error("group {group} spans several upstream or downstream fragments")]
    InconsistentGroup { group: usize },
    #[error("ops {a} and {b} share wire {wire} without a cut but lie in different fragments")]
    UncutAdjacency { wire: usize, a: usize, b: usize },
    #[error("fragment assignment does not cover op {op}")]
    Unassigned { op: usize },
    #[error("fragment {fragment} has {qubits} qubits, cap is {cap}")]
    FragmentTooWide {
        fragment: usize,
        qubits: usize,
        cap: usize,
    },
    #[error("cut circuits must be gate-only apart from terminal measurements")]
    NotUnitary,
    #[error("{groups} cut groups exceed the exact-enumeration cap of {cap}")]
    TooManyGroups { groups: usize, cap: usize },
    #[error("{0}")]
    Unsupported(&'static str),
    #[error("shot value {value} exceeds the per-shot bound {bound}")]
    BoundViolated { value: f64, bound: f64 },
    #[error("invalid cut plan JSON: {0}")]
    Format(String),
    #[error("worker pool: {0}")]
    Pool(String),
}

impl CutError {
    pub fn is_numerical(&self) -> bool {
        match self {
            CutError::Sim(e) => e.is_numerical(),
            CutError::BoundViolated { .. } => true,
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, CutError>;
