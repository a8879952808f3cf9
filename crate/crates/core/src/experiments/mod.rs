//! Monte Carlo harness: episodes, instance sweeps and their statistics.

pub mod config;
pub mod episode;
pub mod seeds;
pub mod stats;
pub mod suite;

pub use config::{ExperimentConfig, PValueMethod, CONFIG_KEYS};
pub use episode::{run_episode, EpisodeOptions, EpisodeTrace, RoundDiagnostics};
pub use suite::{run_instance, run_suite, seed_schedule, InstanceResult, SuiteReport};
