//! Ideal and noisy simulation of compiled circuits, and the HOP / LXE
//! estimators.

pub mod metrics;
pub mod program;
mod state;
pub mod trajectory;

pub use metrics::{
    estimate_agf, heavy_set, hop, ideal_distribution, lxe, pack_samples, CircuitMetrics, HeavySet, MetricsResult,
};
pub use program::{lower, lower_working, NoiseAttachment, NoiseMode, Op, Program};
pub use state::StateVector;
pub use trajectory::{evolve, ideal_run, run_noisy, run_shots, IdealRun};
