pub mod instance;
pub mod route;
pub mod simulate;

pub use instance::{Instance, Request, Variant};
pub use route::{beta, prediction_error, released_fraction, route_length, RouteTable};
pub use simulate::{
    run_adaptive, simulate, Action, Adversary, EventKind, Plan, Policy, RunResult, Setup, StaticAdversary, TrajEvent, View,
};
