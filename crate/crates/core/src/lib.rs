//! Quantum-volume random-circuit benchmarking for single-QPU and two-QPU
//! distributed quantum computing devices.
//!
//! The crate is organised bottom-up:
//!
//! * [`topology`]: extended connectivity graphs and swap routing.
//! * [`noisemodel`]: cost matrices, allocation matrices and effective
//!   preserving factors.
//! * [`analytic`]: closed-form fidelity / heavy-output / cross-entropy
//!   predictions and their correspondences.
//! * [`circuits`]: Haar SU(4) sampling, QV circuits, KAK synthesis, EJPP
//!   telegates and the device compiler.
//! * [`sim`]: statevector and Monte Carlo trajectory simulation, plus the
//!   HOP / LXE estimators.
//! * [`experiment`]: the sweep runners behind the command-line tool.

pub mod analytic;
pub mod circuits;
mod error;
pub mod experiment;
pub mod linalg;
pub mod noisemodel;
pub mod seed;
pub mod sim;
pub mod topology;

pub use error::{Error, Result};
