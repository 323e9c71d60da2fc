//! Finite-dimensional quantum measurement statistics computed two ways: with
//! the projection rule, and with hidden joint-value labels that assign every
//! observable a value at once.
//!
//! The core types are [`QuantumState`] and [`Observable`]. Label-space tables
//! live in [`labels`]; the remaining modules build the scenarios on top.

pub mod correlated;
pub mod error;
pub mod hilbert;
pub mod labels;
pub mod measurement;
pub mod rng;
pub mod spin;
pub mod two_slit;

pub use error::{Error, Result};
pub use hilbert::{amplitudes, born_probabilities, eigendecompose, project, Observable, QuantumState};
pub use num_complex::Complex64 as C64;
