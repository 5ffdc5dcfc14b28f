//! Qudit noise spectroscopy in the Weyl basis.
//!
//! This crate implements the algorithmic core of a frequency-comb noise
//! spectroscopy protocol for d-level systems: generalized Pauli (Weyl)
//! operator algebra, resonant pulse sequences and their switching functions,
//! closed-form filter functions, parameterized noise polyspectra, the
//! scenario-specific forward models that map polyspectra to observable
//! expectation values, and the linear inversion that recovers the spectra
//! from measurement records.
//!
//! The crate is `no_std` (with `alloc`); IO, configuration, and the CLI live
//! in the companion `qns-cli` crate.

#![no_std]
// Index-based loops mirror the summation formulas they implement.
#![allow(clippy::needless_range_loop)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod error;
pub mod filters;
pub mod forward;
pub mod inversion;
pub mod linalg;
pub mod matrix;
pub mod pulses;
pub mod quad;
pub mod spectra;
pub mod weyl;

pub use error::Error;
pub use matrix::ComplexMatrix;
pub use weyl::{Dim, WeylCoefficients, WeylIndex};

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
