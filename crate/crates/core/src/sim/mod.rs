//! Exact dense simulation of small circuits.
//!
//! [`Statevector`] drives per-shot Monte Carlo runs: mid-circuit measurements
//! sample from the Born rule and collapse the state. [`DensityMatrix`] is the
//! exact channel-averaged reference path, where cut locations are bound to
//! superoperators instead of sampled instances.

mod circuit;
mod density;
mod exact;
mod gates;
mod kernels;
mod observable;
mod pauli;
mod shot;
mod state;

pub use circuit::{Circuit, CircuitOp, Gate, GateKind, PrepSource};
pub use density::{run_density, DensityMatrix};
pub use exact::{exact_distribution, exact_expectation, exact_expectation_with_cap, final_state};
pub use gates::gate_matrix;
pub use kernels::{apply_dense, apply_single};
pub use observable::DiagonalObservable;
pub use pauli::{Eigen, Pauli};
pub use shot::{run_shot, ChannelInstance, ShotRecord};
pub use state::{apply_gate, Statevector};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("wire {wire} out of range for {num_qubits} qubits")]
    WireOutOfRange { wire: usize, num_qubits: usize },
    #[error("gate {kind} expects {expected} wires, got {got}")]
    Arity {
        kind: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("repeated wire {0} in a single operation")]
    RepeatedWire(usize),
    #[error("empty wire list")]
    EmptyWires,
    #[error("{what} needs {qubits} qubits, cap is {cap}")]
    CapExceeded {
        what: &'static str,
        qubits: usize,
        cap: usize,
    },
    #[error("no terminal measurement")]
    NoTerminalMeasurement,
    #[error("wire {0} has no terminal measurement")]
    MissingTerminalMeasurement(usize),
    #[error("channel slot {0} has no binding")]
    UnboundSlot(usize),
    #[error("duplicate channel slot id {0}")]
    DuplicateSlot(usize),
    #[error("binding for slot {slot} acts on {expected} qubits, slot has {got} wires")]
    BindingWidth {
        slot: usize,
        expected: usize,
        got: usize,
    },
    #[error("prepare op refers to unknown measurement tag {0:?}")]
    UnknownTag(String),
    #[error("prepared bit pattern {bits:#b} does not fit {width} wires")]
    PatternWidth { bits: u64, width: usize },
    #[error("sampled a measurement branch of probability {0:e}, state is corrupt")]
    ZeroProbabilityBranch(f64),
    #[error("superoperator at slot {slot} changed the trace by {drift:e}")]
    NonTracePreserving { slot: usize, drift: f64 },
    #[error("operation not supported on this path: {0}")]
    Unsupported(&'static str),
    #[error("invalid circuit JSON: {0}")]
    Format(String),
    #[error("amplitude vector of length {0} is not a power of two")]
    BadLength(usize),
    #[error("state norm drifted to {0}")]
    NormDrift(f64),
}

impl SimError {
    /// Errors that signal a broken numerical invariant rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            SimError::ZeroProbabilityBranch(_)
                | SimError::NonTracePreserving { .. }
                | SimError::NormDrift(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, SimError>;
