//! Fixed-step closed-loop simulation of event-triggered secure consensus.

// `!(x > 0.0)` is how NaN gets rejected here
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod batch;
pub mod log;
pub mod metrics;
pub mod scenario;
pub mod sim;
pub mod spec;

pub use batch::{run_batch, run_batch_seq};
pub use log::{EventRecord, LogHeader, TrajectoryLog};
pub use metrics::{metrics, Metrics};
pub use scenario::{mat_to_rows, Integrator, Scenario, ValidationError};
pub use sim::{run, run_with, EngineError, RunOptions, RunOutput};
pub use spec::ScenarioSpec;
