//! Wire cutting for small quantum circuits.
//!
//! The crate is organised bottom-up:
//!
//! - [`sim`]: dense statevector and density-matrix simulation, including
//!   mid-circuit measurement by collapse.
//! - [`clifford`]: uniform Clifford sampling on symplectic tableaux and the
//!   2-design check that backs the randomized measurement channel.
//! - [`channels`]: the two measure-and-prepare channels, their superoperator
//!   forms and the two identity decompositions (randomized and Pauli).
//! - [`cutting`]: cut plans, the Monte Carlo estimator, exact reference paths
//!   and sampling from cut circuits.
//! - [`qaoa`]: clustered Max-Cut instances, QAOA circuits, separator-driven cut
//!   planning and parameter optimisation.
//!
//! Conventions used everywhere: qubit 0 is the least-significant bit of a
//! basis-state index, `RZZ(θ) = exp(-iθ/2 Z⊗Z)`, `RX(θ) = exp(-iθ/2 X)`, and
//! superoperators act on column-stacked operators.

pub mod channels;
pub mod clifford;
pub mod config;
pub mod cutting;
pub mod qaoa;
pub mod rng;
pub mod sim;

pub use num_complex::Complex64 as C64;

/// Dense complex matrix used for unitaries, density matrices and superoperators.
pub type CMatrix = nalgebra::DMatrix<C64>;
