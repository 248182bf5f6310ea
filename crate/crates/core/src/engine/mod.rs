//! Discrete-event machinery: simulated clock, ordered event queue, and
//! reproducible random streams with the variate samplers the model needs.

mod event;
mod rng;

pub use event::{Event, EventQueue, Scheduler, SimClock};
pub use rng::{Exponential, RngStream, Triangular, RNG_ALGORITHM};

use crate::Minutes;

#[derive(Debug, thiserror::Error)]
pub enum EngineError {
    #[error("event scheduled at t={fire_time} before current clock t={now}")]
    ScheduleInPast { fire_time: Minutes, now: Minutes },
    #[error("event time must be finite, got {0}")]
    NonFiniteTime(Minutes),
    #[error("triangular parameters must satisfy min <= mode <= max, got ({min}, {mode}, {max})")]
    InvalidTriangular { min: f64, mode: f64, max: f64 },
    #[error("exponential rate must be positive and finite, got {0}")]
    InvalidRate(f64),
    #[error("probability must lie in [0, 1], got {0}")]
    InvalidProbability(f64),
}
