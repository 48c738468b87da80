//! Simulation of macrorealism-violation experiments on a driven qubit.
//!
//! Two protocols are implemented on top of a small dense simulator:
//!
//! - [`lg`]: Leggett-Garg two-time correlators from sequential projective
//!   measurements, the K-string combinations, and finite-shot violation scans.
//! - [`qndm`]: a detector qubit coupled three times to the system stores the
//!   measured observable in its phase; interferometric readout of the detector
//!   gives the quasi-characteristic function.
//!
//! [`spectral`] turns the quasi-characteristic function into a quasi-probability
//! distribution and decides whether it has negative regions.
//!
//! Basis convention: qubit 0 is the most significant bit of a basis index, so
//! for the system (0) and detector (1) pair the basis order is
//! `|0S 0D>, |0S 1D>, |1S 0D>, |1S 1D>`.

// comparisons are negated on purpose so that NaN is rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod lg;
pub mod qndm;
pub mod seed;
pub mod sim;
pub mod spectral;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Qubit index of the driven system.
pub const SYSTEM: usize = 0;
/// Qubit index of the non-demolition detector.
pub const DETECTOR: usize = 1;
