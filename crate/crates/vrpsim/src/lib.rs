//! Batched multi-agent simulation environments for vehicle routing
//! problems with time windows.
//!
//! Seven problem variants share one engine: capacitated routing with hard
//! and soft time windows, team orienteering, pickup-and-delivery,
//! split delivery, prize collecting, and multi-depot routing. Agents act
//! strictly sequentially; after every step the selector picks the next
//! active agent and observations are computed against the latest state.
//!
//! The crate provides:
//!
//! * [`instance`] — immutable instance data, the travel-time kernel, and
//!   instance validation;
//! * [`generate`] — toy fixtures, a seeded random generator, dihedral
//!   augmentation, and reproducible dataset splits;
//! * [`benchmark`] — parsers for Solomon, Li&Lim and Cordeau files;
//! * [`codec`] — a schema-versioned on-disk format with manifests;
//! * [`rules`] — per-problem feasibility masks and transition deltas;
//! * [`env`] — the sequential-agent engine with batched rollouts;
//! * [`obs`] — the five observation families behind a feature registry;
//! * [`selector`] — round-robin, smallest-time and random agent selection;
//! * [`reward`] — dense/sparse rewards and terminal penalties;
//! * [`policy`] — scripted baselines, the gap metric, batch summaries;
//! * [`oracle`] — a brute-force optimum for desk-scale verification.

pub mod benchmark;
pub mod codec;
pub mod env;
pub mod error;
pub mod generate;
pub mod instance;
pub mod obs;
pub mod oracle;
pub mod policy;
pub mod reward;
pub mod rules;
pub mod selector;
pub mod solution;

pub use env::{
    batch_rollout, Env, EnvConfig, EpisodeStats, RewardMode, RolloutOptions, StepOutcome,
};
pub use error::{
    CodecError, EnvError, GenerateError, InstanceError, MetricError, OracleError, ParseError,
};
pub use generate::{
    augment_instance, generate_random, generate_toy, GenerationSpec, InstanceSet, Split,
};
pub use instance::{
    build_travel_matrix, validate_instance, InstanceData, Problem, ValidationReport,
};
pub use obs::{ObsConfig, ObservationBundle};
pub use oracle::{brute_force_optimum, OracleLimits, OracleResult};
pub use policy::{aggregate_stats, gap, BatchSummary, Policy, PolicyKind};
pub use rules::RuleConfig;
pub use selector::SelectorKind;
pub use solution::{evaluate_solution, EvalOutcome, Route, Visit};
