//! Experiment definitions, seeded initial conditions, the simulation
//! runner with invariant monitors, and the convergence/energy study
//! drivers behind the benchmark CLI.

pub mod config;
pub mod convergence;
pub mod examples;
pub mod ic;
pub mod rng;
pub mod runner;
pub mod trace;

pub use config::{ModelChoice, RunConfig, SchemeId};
pub use convergence::{
    compare_sav_esav, convergence_study, energy_ladder, CompareReport, ConvRow,
    ConvergenceReport, LadderEntry,
};
pub use ic::{initial_condition, IcFields};
pub use runner::{run_simulation, run_with, RunOptions, RunOutcome};

/// Worker-thread cap for ladder parallelism: the smaller of the requested
/// count, available cores, and the `ESAV_THREADS` environment variable.
pub fn worker_cap(requested: usize) -> usize {
    let avail = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    let env_cap = std::env::var("ESAV_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or(usize::MAX);
    requested.max(1).min(avail).min(env_cap)
}
