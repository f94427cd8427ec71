use std::path::Path;

use serde::{Deserialize, Serialize};

use super::aggregate::{CurveRow, POOLED};
use super::records::read_csv;
use crate::error::{PsiError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemClass {
    FirstOrder,
    SecondOrder,
}

/// One point of an external human accuracy curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HumanPoint {
    pub problem_class: ProblemClass,
    pub total_shots: usize,
    pub accuracy: f64,
}

/// Human accuracy by total shots, read from a CSV with columns
/// `problem_class,total_shots,accuracy`.
#[derive(Clone, Debug, PartialEq)]
pub struct HumanCurve {
    pub points: Vec<HumanPoint>,
}

impl HumanCurve {
    pub fn new(points: Vec<HumanPoint>) -> Result<Self> {
        for p in &points {
            if !(0.0..=1.0).contains(&p.accuracy) {
                return Err(PsiError::InvalidConfig(format!(
                    "human accuracy {} at {} shots is outside [0, 1]",
                    p.accuracy, p.total_shots
                )));
            }
        }
        let mut keys: Vec<_> = points.iter().map(|p| (p.problem_class, p.total_shots)).collect();
        keys.sort();
        if keys.windows(2).any(|w| w[0] == w[1]) {
            return Err(PsiError::InvalidConfig("human curve repeats a (problem_class, total_shots) pair".into()));
        }
        Ok(HumanCurve { points })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::new(read_csv(path).map_err(|e| PsiError::InvalidConfig(format!("{}: {e}", path.display())))?)
    }

    /// (shots, accuracy) pairs of one class, sorted by shots.
    pub fn class_curve(&self, class: ProblemClass) -> Vec<(usize, f64)> {
        let mut c: Vec<_> =
            self.points.iter().filter(|p| p.problem_class == class).map(|p| (p.total_shots, p.accuracy)).collect();
        c.sort_by_key(|p| p.0);
        c
    }
}

/// Deviation between a model curve and a human curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HumanComparison {
    /// Percentage points.
    pub rmse: f64,
    /// Percentage points.
    pub mae: f64,
    /// Shot counts present in both curves.
    pub matched: usize,
}

/// RMSE and MAE, in percentage points, over the shot counts both curves
/// contain. Curves are (shots, accuracy in [0, 1]) pairs.
pub fn compare_to_human(model: &[(usize, f64)], human: &[(usize, f64)]) -> Result<HumanComparison> {
    let gaps: Vec<f64> = model
        .iter()
        .filter_map(|&(s, a)| human.iter().find(|h| h.0 == s).map(|h| 100.0 * (a - h.1)))
        .collect();
    if gaps.is_empty() {
        return Err(PsiError::InvalidConfig("model and human curves share no shot count".into()));
    }
    let n = gaps.len() as f64;
    Ok(HumanComparison {
        rmse: (gaps.iter().map(|g| g * g).sum::<f64>() / n).sqrt(),
        mae: gaps.iter().map(|g| g.abs()).sum::<f64>() / n,
        matched: gaps.len(),
    })
}

/// One line of `comparison.csv`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub variant: String,
    pub problem_class: ProblemClass,
    pub matched: usize,
    pub rmse: f64,
    pub mae: f64,
}

/// Compares every variant's pooled curve against the first-order human
/// curve (all built-in problems are first-order).
pub fn compare_variants(curves: &[CurveRow], human: &HumanCurve) -> Result<Vec<ComparisonRow>> {
    let target = human.class_curve(ProblemClass::FirstOrder);
    if target.is_empty() {
        return Err(PsiError::InvalidConfig("human curve has no first-order rows".into()));
    }
    let mut variants: Vec<&str> = curves.iter().map(|r| r.variant.as_str()).collect();
    variants.dedup();
    variants
        .into_iter()
        .map(|v| {
            let model: Vec<_> =
                curves.iter().filter(|r| r.variant == v && r.problem_id == POOLED).map(|r| (r.total_shots, r.accuracy)).collect();
            let c = compare_to_human(&model, &target)?;
            Ok(ComparisonRow { variant: v.to_string(), problem_class: ProblemClass::FirstOrder, matched: c.matched, rmse: c.rmse, mae: c.mae })
        })
        .collect()
}
