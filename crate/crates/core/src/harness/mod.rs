//! Experiment sweeps: episode generation, per-target CSV records,
//! aggregation with confidence intervals, human-curve comparison, plots and
//! the acceptance self-checks.

pub mod aggregate;
pub mod config;
pub mod episode;
pub mod human;
pub mod plot;
pub mod records;
pub mod runner;
pub mod selftest;

pub use aggregate::{aggregate_curves, alpha_bins, weight_bins, wilson_interval, Aggregates, BinRow, CurveRow, POOLED, Z95};
pub use config::{ExperimentConfig, WORKERS_ENV};
pub use episode::{build_episode, generate_scenes, scene_graph, target_label, EpisodeFile, EpisodeScenes};
pub use human::{compare_to_human, compare_variants, ComparisonRow, HumanComparison, HumanCurve, HumanPoint, ProblemClass};
pub use plot::render_plots;
pub use records::{read_records, EpisodeRecord, FailureRecord, TraceRow};
pub use runner::{cell_seed, run_cell, run_experiment, run_sweep, CellOptions, CellOutput, RunOutput, SweepResult};
pub use selftest::{run_all, run_criterion, CriterionResult, CRITERIA};
