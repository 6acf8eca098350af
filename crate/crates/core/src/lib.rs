//! Two-phase Neumann eigenvalues on thin shells around a closed interface.
//!
//! The shell `Ω(ε)` is the set of points within distance `ε` of a closed
//! interface `Γ`; the conductivity is `σ₋` inside and `σ₊` outside. The
//! crate computes the interface spectrum, solves the shell problem, and
//! compares `ε`-sweeps with the first-order asymptotic laws.

pub mod asymptotics;
pub mod error;
pub mod geometry;
pub mod interface_spectrum;
pub mod linalg;
pub mod p2;
pub mod quadrature;
pub mod shell_solver;
pub mod sweep;

pub use error::{Error, Result};
