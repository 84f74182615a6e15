use crate::scenario::Scenario;
use crate::sim::{run_with, EngineError, RunOptions, RunOutput};

/// Independent runs, in parallel when the `parallel` feature is on. Order is preserved.
pub fn run_batch(scenarios: &[Scenario], opts: RunOptions) -> Vec<Result<RunOutput, EngineError>> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        scenarios.par_iter().map(|s| run_with(s, opts)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        run_batch_seq(scenarios, opts)
    }
}

pub fn run_batch_seq(
    scenarios: &[Scenario],
    opts: RunOptions,
) -> Vec<Result<RunOutput, EngineError>> {
    scenarios.iter().map(|s| run_with(s, opts)).collect()
}
