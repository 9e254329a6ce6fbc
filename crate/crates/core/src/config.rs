//! Numerical tolerances and simulator limits.
//!
//! Every threshold used by the library lives here so the checks in the
//! simulators, the channel code and the test suites agree with each other.

/// Allowed drift of `‖ψ‖²` away from one after unitary evolution.
pub const NORM_TOL: f64 = 1e-10;

/// Hermiticity and unit-trace tolerance for density matrices.
pub const DENSITY_TOL: f64 = 1e-10;

/// Smallest eigenvalue accepted for a density matrix or a Choi matrix.
pub const PSD_TOL: f64 = -1e-9;

/// Maximum trace drift after applying a bound superoperator.
pub const TRACE_DRIFT_TOL: f64 = 1e-8;

/// Unitarity check `‖U†U - 1‖_max`.
pub const UNITARY_TOL: f64 = 1e-10;

/// Residual accepted for exact identity reconstructions.
pub const IDENTITY_RESIDUAL_TOL: f64 = 1e-12;

/// Agreement between the exact cut estimator and the uncut simulator.
pub const UNBIASED_TOL: f64 = 1e-10;

/// Bound on `|f(x)|` for diagonal observables, with room for rounding.
pub const OBSERVABLE_BOUND_TOL: f64 = 1e-12;

/// Probability below which a sampled measurement branch is treated as corrupt.
pub const ZERO_BRANCH_TOL: f64 = 1e-300;

/// Simulation size caps. Beyond these the simulators fail loudly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimLimits {
    pub statevector_qubits: usize,
    pub density_qubits: usize,
}

impl SimLimits {
    pub const DEFAULT: SimLimits = SimLimits {
        statevector_qubits: 16,
        density_qubits: 10,
    };
}

impl Default for SimLimits {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Largest Clifford register accepted by the sampler.
pub const MAX_CLIFFORD_QUBITS: usize = 12;

/// Largest Clifford register converted to a dense unitary.
pub const MAX_CLIFFORD_UNITARY_QUBITS: usize = 10;
