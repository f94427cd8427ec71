use std::path::PathBuf;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use super::config::ExperimentConfig;
use super::episode::{build_episode, generate_scenes};
use super::records::{write_csv, write_csv_with_header, EpisodeRecord, FailureRecord, TraceRow, FAILURE_HEADER};
use crate::error::{PsiError, Result};
use crate::psi::{baseline_prototype, classify, induce_schemas_observed, ModelConfig, Variant};
use crate::relgraph::EdgeWeights;
use crate::scenegen::Catalog;

/// Seed of a sweep cell: the first 8 bytes (little-endian) of
/// SHA-256(`"{master}|{problem}|{shots}|{seed}|{variant}"`).
pub fn cell_seed(master: u64, problem: &str, shots: usize, seed: u64, variant: &str) -> u64 {
    let digest = Sha256::digest(format!("{master}|{problem}|{shots}|{seed}|{variant}").as_bytes());
    u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"))
}

/// Coordinates of one sweep cell.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Cell {
    pub problem: String,
    pub shots: usize,
    pub seed: u64,
    pub variant: usize,
}

/// Records (and optional trace) of one cell.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CellOutput {
    pub records: Vec<EpisodeRecord>,
    pub trace: Vec<TraceRow>,
}

#[derive(Clone, Copy, Debug)]
pub struct CellOptions {
    pub master_seed: u64,
    pub noise: bool,
    pub targets: usize,
    pub trace: bool,
    pub timing: bool,
}

impl From<&ExperimentConfig> for CellOptions {
    fn from(c: &ExperimentConfig) -> Self {
        CellOptions {
            master_seed: c.master_seed,
            noise: c.noise,
            targets: c.targets_per_episode,
            trace: c.trace,
            timing: c.timing,
        }
    }
}

/// Generates one episode, trains the model and classifies every target.
pub fn run_cell(
    catalog: &Catalog,
    problem: &str,
    shots: usize,
    seed: u64,
    model: &ModelConfig,
    options: &CellOptions,
) -> Result<CellOutput> {
    let start = Instant::now();
    let label = model.label();
    let cseed = cell_seed(options.master_seed, problem, shots, seed, &label);
    let mut rng = ChaCha8Rng::seed_from_u64(cseed);
    let scenes = generate_scenes(catalog, problem, shots, options.targets, &mut rng)?;
    let episode = build_episode(&scenes, model.variant.extractor(), catalog, options.noise, seed, &mut rng)?;
    let base = EpisodeRecord {
        problem_id: problem.to_string(),
        seed,
        variant: label,
        total_shots: shots,
        target_index: 0,
        true_label: crate::relgraph::Label::Positive,
        predicted_label: crate::relgraph::Label::Positive,
        correct: 0,
        sim_pos: 0.0,
        sim_neg: 0.0,
        final_alpha: None,
        w_inside: 0.0,
        w_touching: 0.0,
        w_same_shape: 0.0,
        w_normalized_distance: 0.0,
        w_mirrored: 0.0,
        w_same_size: 0.0,
        w_reflection: 0.0,
        final_loss: None,
        steps: 0,
        wall_time_ms: 0,
        distinguishing_relation: episode.meta.distinguishing_relation,
        cell_seed: cseed,
    };
    let mut out = CellOutput::default();
    let mut outcomes = Vec::with_capacity(episode.targets.len());
    let mut base = base;
    match model.variant {
        Variant::PrototypeGlobal => {
            let vectors = |gs: &[crate::relgraph::ObjectGraph]| gs.iter().map(|g| g.node(0).to_vec()).collect::<Vec<_>>();
            let (pos, neg) = (vectors(&episode.positives), vectors(&episode.negatives));
            base.set_weights(EdgeWeights::uniform().values());
            for t in &episode.targets {
                outcomes.push(baseline_prototype(&pos, &neg, t.graph.node(0))?);
            }
        }
        Variant::Psi | Variant::PsiPatches => {
            let trace = &mut out.trace;
            let model_fit = induce_schemas_observed(&episode, model, &mut rng, |s| {
                if options.trace {
                    let w = s.terms.weights.values();
                    trace.push(TraceRow {
                        step: s.step,
                        loss: s.terms.loss,
                        alpha: s.terms.alpha,
                        g_pos: s.terms.g_pos,
                        g_neg: s.terms.g_neg,
                        w_inside: w[0],
                        w_touching: w[1],
                        w_same_shape: w[2],
                        w_normalized_distance: w[3],
                        w_mirrored: w[4],
                        w_same_size: w[5],
                        w_reflection: w[6],
                    });
                }
            })?;
            base.final_alpha = (model.variant == Variant::Psi).then_some(model_fit.alpha);
            base.set_weights(model_fit.edge_weights.values());
            base.final_loss = Some(model_fit.final_loss());
            base.steps = model_fit.steps;
            for t in &episode.targets {
                outcomes.push(classify(&model_fit, &t.graph, model, &mut rng)?);
            }
        }
    }
    let elapsed = if options.timing { start.elapsed().as_millis() as u64 } else { 0 };
    for (i, (t, c)) in episode.targets.iter().zip(outcomes).enumerate() {
        let mut r = base.clone();
        r.target_index = i;
        r.true_label = t.label;
        r.predicted_label = c.predicted;
        r.correct = (c.predicted == t.label) as u8;
        r.sim_pos = c.sim_pos;
        r.sim_neg = c.sim_neg;
        r.wall_time_ms = elapsed;
        out.records.push(r);
    }
    Ok(out)
}

/// Everything a sweep produced, in deterministic order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SweepResult {
    pub records: Vec<EpisodeRecord>,
    pub failures: Vec<FailureRecord>,
    /// Per-cell traces (only when tracing), keyed by the trace file stem.
    pub traces: Vec<(String, Vec<TraceRow>)>,
}

/// Runs every cell of `config` on `workers` threads. Failing cells are
/// logged and skipped.
pub fn run_sweep(config: &ExperimentConfig, catalog: &Catalog, workers: usize) -> Result<SweepResult> {
    config.validate(catalog)?;
    let options = CellOptions::from(config);
    let mut cells = Vec::new();
    for problem in &config.problems {
        for &shots in &config.shot_counts {
            for &seed in &config.seeds {
                for variant in 0..config.variants.len() {
                    cells.push(Cell { problem: problem.clone(), shots, seed, variant });
                }
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| PsiError::InvalidConfig(format!("cannot start {workers} workers: {e}")))?;
    let outputs: Vec<(Cell, Result<CellOutput>)> = pool.install(|| {
        cells
            .into_par_iter()
            .map(|cell| {
                let model = &config.variants[cell.variant];
                let r = run_cell(catalog, &cell.problem, cell.shots, cell.seed, model, &options);
                (cell, r)
            })
            .collect()
    });
    let mut result = SweepResult::default();
    for (cell, output) in outputs {
        let label = config.variants[cell.variant].label();
        match output {
            Ok(o) => {
                result.records.extend(o.records);
                if config.trace && !o.trace.is_empty() {
                    result.traces.push((format!("{}_{}_{}_{}", cell.problem, cell.shots, cell.seed, label), o.trace));
                }
            }
            Err(e) => result.failures.push(FailureRecord {
                problem_id: cell.problem.clone(),
                seed: cell.seed,
                variant: label,
                total_shots: cell.shots,
                error: e.to_string(),
            }),
        }
    }
    result.records.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    result.failures.sort_by(|a, b| {
        (&a.problem_id, a.total_shots, a.seed, &a.variant).cmp(&(&b.problem_id, b.total_shots, b.seed, &b.variant))
    });
    result.traces.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(result)
}

/// Files written by [`run_experiment`].
#[derive(Clone, Debug, PartialEq)]
pub struct RunOutput {
    pub records: PathBuf,
    pub failures: PathBuf,
    pub record_count: usize,
    pub failure_count: usize,
}

/// Runs the sweep and writes `records.csv`, `failures.csv` and, when
/// tracing, `traces/<problem>_<shots>_<seed>_<variant>.csv` under the
/// output directory.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunOutput> {
    let catalog = config.catalog()?;
    config.validate(&catalog)?;
    let workers = config.worker_count()?;
    let result = run_sweep(config, &catalog, workers)?;
    let dir = &config.output_dir;
    std::fs::create_dir_all(dir)?;
    let records = dir.join("records.csv");
    let failures = dir.join("failures.csv");
    write_csv_with_header(&records, &RECORD_HEADER, &result.records)?;
    write_csv_with_header(&failures, &FAILURE_HEADER, &result.failures)?;
    if config.trace {
        let traces = dir.join("traces");
        std::fs::create_dir_all(&traces)?;
        for (stem, rows) in &result.traces {
            write_csv(&traces.join(format!("{stem}.csv")), rows)?;
        }
    }
    Ok(RunOutput { records, failures, record_count: result.records.len(), failure_count: result.failures.len() })
}

pub const RECORD_HEADER: [&str; 23] = [
    "problem_id",
    "seed",
    "variant",
    "total_shots",
    "target_index",
    "true_label",
    "predicted_label",
    "correct",
    "sim_pos",
    "sim_neg",
    "final_alpha",
    "w_inside",
    "w_touching",
    "w_same_shape",
    "w_normalized_distance",
    "w_mirrored",
    "w_same_size",
    "w_reflection",
    "final_loss",
    "steps",
    "wall_time_ms",
    "distinguishing_relation",
    "cell_seed",
];
