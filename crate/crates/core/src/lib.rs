//! Tools for turning honey-bee waggle-dance observations into a symbol
//! corpus and measuring it the way corpus linguists measure text.
//!
//! The pipeline runs in stages, each usable on its own:
//!
//! - [`ingest`] parses observation tables and re-derives every computed
//!   column (direction, averages, plot coordinates) to catch errors.
//! - [`articulator`] quantizes observations into words under a
//!   [`QuantizationScheme`] and reports the scheme's information budget.
//! - [`zipf`] builds rank-frequency tables, fits power-law exponents and
//!   looks for two-regime curves.
//! - [`entropy`] computes unigram and n-gram entropies and compares a
//!   corpus against random baselines.
//! - [`randlang`] generates intermittent-silence random text.
//! - [`least_effort`] simulates signal–object matrices under the combined
//!   speaker/hearer cost and sweeps the weighting parameter.
//! - [`pipeline`] wires the stages into the `dancecorpus` command.

pub mod articulator;
pub mod corpus;
pub mod entropy;
pub mod ingest;
pub mod least_effort;
pub mod pipeline;
pub mod randlang;
pub mod zipf;

pub use articulator::{articulate, info_budget, QuantizationScheme};
pub use corpus::SymbolCorpus;
pub use entropy::{compare_to_random, entropy_report, ngram_entropy, shannon_entropy};
pub use ingest::{parse_observations, validate_observation, DanceObservation};
pub use least_effort::{
    effort_summary, minimize, sweep, LambdaSweepResult, OptimizerParams, SignalObjectMatrix,
    SweepConfig,
};
pub use randlang::{generate_random_text, RandomTextSpec};
pub use zipf::{fit_power_law, rank_frequency, FitMethod, FitRange, PowerLawFit, RankFrequencyTable};
