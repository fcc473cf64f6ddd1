//! Learning-augmented online TSP.
//!
//! `space` holds the metric spaces, `tsp` the exact offline solvers, `sim` the
//! instance model and event-driven simulator, `oracle` the domination oracles,
//! `swag` the online policies and `bench` the experiment harness.

pub mod bench;
pub mod error;
pub mod oracle;
pub mod sim;
pub mod space;
pub mod swag;
pub mod tsp;

pub use error::Error;

/// Absolute tolerance used for every length and time comparison.
pub const TOL: f64 = 1e-9;
