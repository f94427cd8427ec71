use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::relgraph::{Label, Relation, NUM_RELATIONS};

/// One classified target. Serialized as one CSV row; weights are flattened
/// into one column per relation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub problem_id: String,
    pub seed: u64,
    pub variant: String,
    pub total_shots: usize,
    pub target_index: usize,
    pub true_label: Label,
    pub predicted_label: Label,
    pub correct: u8,
    pub sim_pos: f64,
    pub sim_neg: f64,
    /// Empty for models without a mixing weight.
    pub final_alpha: Option<f64>,
    pub w_inside: f64,
    pub w_touching: f64,
    pub w_same_shape: f64,
    pub w_normalized_distance: f64,
    pub w_mirrored: f64,
    pub w_same_size: f64,
    pub w_reflection: f64,
    /// Empty for models without a loss.
    pub final_loss: Option<f64>,
    pub steps: usize,
    pub wall_time_ms: u64,
    pub distinguishing_relation: Option<Relation>,
    /// Seed of the random stream the cell ran with.
    pub cell_seed: u64,
}

impl EpisodeRecord {
    pub fn weights(&self) -> [f64; NUM_RELATIONS] {
        [
            self.w_inside,
            self.w_touching,
            self.w_same_shape,
            self.w_normalized_distance,
            self.w_mirrored,
            self.w_same_size,
            self.w_reflection,
        ]
    }

    pub fn set_weights(&mut self, w: &[f64; NUM_RELATIONS]) {
        [
            self.w_inside,
            self.w_touching,
            self.w_same_shape,
            self.w_normalized_distance,
            self.w_mirrored,
            self.w_same_size,
            self.w_reflection,
        ] = *w;
    }

    /// Deterministic output order.
    pub fn sort_key(&self) -> (&str, usize, u64, &str, usize) {
        (&self.problem_id, self.total_shots, self.seed, &self.variant, self.target_index)
    }
}

/// A sweep cell that could not be completed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub problem_id: String,
    pub seed: u64,
    pub variant: String,
    pub total_shots: usize,
    pub error: String,
}

/// One optimizer step of an induction run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub step: usize,
    pub loss: f64,
    pub alpha: f64,
    pub g_pos: f64,
    pub g_neg: f64,
    pub w_inside: f64,
    pub w_touching: f64,
    pub w_same_shape: f64,
    pub w_normalized_distance: f64,
    pub w_mirrored: f64,
    pub w_same_size: f64,
    pub w_reflection: f64,
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Like [`write_csv`] but writes the header even when `rows` is empty.
pub fn write_csv_with_header<T: Serialize>(path: &Path, header: &[&str], rows: &[T]) -> Result<()> {
    if !rows.is_empty() {
        return write_csv(path, rows);
    }
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    w.flush()?;
    Ok(())
}

pub fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<std::result::Result<Vec<T>, _>>()?)
}

pub fn read_records(path: &Path) -> Result<Vec<EpisodeRecord>> {
    read_csv(path)
}

pub const FAILURE_HEADER: [&str; 5] = ["problem_id", "seed", "variant", "total_shots", "error"];
