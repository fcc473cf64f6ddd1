use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point {0} does not belong to a {1} space")]
    WrongPoint(String, &'static str),
    #[error("point outside the space: {0}")]
    OutOfSpace(String),
    #[error("traveled length {traveled} outside [0, {dist}]")]
    TraveledOutOfRange { traveled: f64, dist: f64 },
    #[error("size cap exceeded: {what} has {got} items, cap is {cap}")]
    SizeCap { what: &'static str, got: usize, cap: usize },
    #[error("invalid space: {0}")]
    InvalidSpace(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("oracle {oracle} cannot run on a {space} space")]
    IncompatibleOracle { oracle: &'static str, space: &'static str },
    #[error("event at {got} arrives before the previous event at {last}")]
    OutOfOrder { got: f64, last: f64 },
    #[error("adversary released request {id} at {at}, before the current time {now}")]
    ReleaseInPast { id: usize, at: f64, now: f64 },
    #[error("simulation error: {0}")]
    Sim(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
