//! Circuit construction, simulation and analysis for universal symmetric
//! optimal `1 -> M` quantum telecloning with mid-circuit measurement and
//! classical feed-forward.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the experiment
//! driver and the command line live in the `teleclone` crate.
//!
//! Module map:
//!
//! - [`circuit`]: the instruction-list IR shared by every other module.
//! - [`dicke`]: split & cyclic shift / Dicke state unitaries and the three
//!   telecloning circuit families.
//! - [`sim`]: dense state-vector and density-matrix simulation, seeded shot
//!   sampling, noise channels.
//! - [`tomography`]: parallel single-qubit Pauli tomography with a
//!   maximum-likelihood fit.
//! - [`analysis`]: fidelity, optimal-cloning bounds, Bloch vectors and
//!   entanglement measures.
//! - [`hardware`]: the 27-qubit heavy-hex device model, layouts, native-gate
//!   transpilation and X-X dynamical decoupling.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod analysis;
pub mod circuit;
pub mod dicke;
mod error;
pub mod hardware;
pub mod linalg;
pub mod sim;
pub mod tomography;

pub use error::{Error, Result};

/// Complex amplitude type used throughout the crate.
pub type C64 = num_complex::Complex64;
