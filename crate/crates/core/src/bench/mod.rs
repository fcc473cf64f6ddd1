//! Experiment harness: random instances, prediction perturbation, fixtures
//! and ratio sweeps.

pub mod fixtures;
pub mod gen;
pub mod sweep;

pub use fixtures::{run_fixture, Expect, FixtureId, FixtureReport};
pub use gen::{
    eta_rng, generate, instance_id, item_rng, perturb_predictions, perturb_toward, random_instance, random_point, random_predictions, random_space, Algo,
    SweepSpec,
};
pub use sweep::{ceiling, evaluate, guarantee, sweep, Skip, SweepReport, SweepRow, CSV_HEADER};
