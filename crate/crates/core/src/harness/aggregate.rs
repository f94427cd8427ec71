use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use std::path::Path;

use super::records::{read_csv, write_csv, EpisodeRecord};
use crate::error::Result;
use crate::relgraph::NUM_RELATIONS;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959964;

/// Problem id of rows pooled over every problem.
pub const POOLED: &str = "*";

/// Wilson score interval for `successes` of `n` at quantile `z`.
pub fn wilson_interval(successes: usize, n: usize, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let (k, n) = (successes as f64, n as f64);
    let p = k / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // Rounding can put a bound just past `p` when `k` is 0 or `n`.
    ((center - half).clamp(0.0, p), (center + half).clamp(p, 1.0))
}

/// Accuracy of one (variant, problem, shots) cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub variant: String,
    pub problem_id: String,
    pub total_shots: usize,
    pub n: usize,
    pub correct: usize,
    pub accuracy: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Empty when no record of the cell has a mixing weight.
    pub mean_alpha: Option<f64>,
    pub mean_w_inside: f64,
    pub mean_w_touching: f64,
    pub mean_w_same_shape: f64,
    pub mean_w_normalized_distance: f64,
    pub mean_w_mirrored: f64,
    pub mean_w_same_size: f64,
    pub mean_w_reflection: f64,
    /// Mean weight of each record's distinguishing relation.
    pub mean_w_distinguishing: Option<f64>,
}

impl CurveRow {
    pub fn mean_weights(&self) -> [f64; NUM_RELATIONS] {
        [
            self.mean_w_inside,
            self.mean_w_touching,
            self.mean_w_same_shape,
            self.mean_w_normalized_distance,
            self.mean_w_mirrored,
            self.mean_w_same_size,
            self.mean_w_reflection,
        ]
    }
}

#[derive(Default)]
struct Acc {
    n: usize,
    correct: usize,
    alpha: (f64, usize),
    weights: [f64; NUM_RELATIONS],
    distinguishing: (f64, usize),
}

impl Acc {
    fn add(&mut self, r: &EpisodeRecord) {
        self.n += 1;
        self.correct += r.correct as usize;
        if let Some(a) = r.final_alpha {
            self.alpha.0 += a;
            self.alpha.1 += 1;
        }
        let w = r.weights();
        for (acc, x) in self.weights.iter_mut().zip(w) {
            *acc += x;
        }
        if let Some(rel) = r.distinguishing_relation {
            self.distinguishing.0 += w[rel.index()];
            self.distinguishing.1 += 1;
        }
    }

    fn row(&self, variant: &str, problem: &str, shots: usize) -> CurveRow {
        let mean = |(s, c): (f64, usize)| (c > 0).then(|| s / c as f64);
        let w = self.weights.map(|x| x / self.n as f64);
        let (ci_low, ci_high) = wilson_interval(self.correct, self.n, Z95);
        CurveRow {
            variant: variant.to_string(),
            problem_id: problem.to_string(),
            total_shots: shots,
            n: self.n,
            correct: self.correct,
            accuracy: self.correct as f64 / self.n as f64,
            ci_low,
            ci_high,
            mean_alpha: mean(self.alpha),
            mean_w_inside: w[0],
            mean_w_touching: w[1],
            mean_w_same_shape: w[2],
            mean_w_normalized_distance: w[3],
            mean_w_mirrored: w[4],
            mean_w_same_size: w[5],
            mean_w_reflection: w[6],
            mean_w_distinguishing: mean(self.distinguishing),
        }
    }
}

/// Per-(variant, problem, shots) accuracy with Wilson 95% intervals, plus
/// rows pooled over problems under problem id [`POOLED`]. Sorted by
/// variant, problem, shots.
pub fn aggregate_curves(records: &[EpisodeRecord]) -> Vec<CurveRow> {
    let mut cells: BTreeMap<(&str, &str, usize), Acc> = BTreeMap::new();
    for r in records {
        cells.entry((&r.variant, &r.problem_id, r.total_shots)).or_default().add(r);
        cells.entry((&r.variant, POOLED, r.total_shots)).or_default().add(r);
    }
    cells.iter().map(|(&(v, p, s), acc)| acc.row(v, p, s)).collect()
}

/// Accuracy of the records whose binned quantity falls in `[bin_low, bin_high)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinRow {
    pub variant: String,
    pub bin_low: f64,
    pub bin_high: f64,
    pub n: usize,
    pub correct: usize,
    pub accuracy: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Number of equal-width bins over [0, 1].
pub const BINS: usize = 10;

fn bin_accuracy(records: &[EpisodeRecord], quantity: impl Fn(&EpisodeRecord) -> Option<f64>) -> Vec<BinRow> {
    let mut cells: BTreeMap<(&str, usize), (usize, usize)> = BTreeMap::new();
    for r in records {
        let Some(x) = quantity(r) else { continue };
        let bin = ((x * BINS as f64).floor().max(0.0) as usize).min(BINS - 1);
        let c = cells.entry((&r.variant, bin)).or_default();
        c.0 += 1;
        c.1 += r.correct as usize;
    }
    cells
        .into_iter()
        .map(|((v, bin), (n, correct))| {
            let (ci_low, ci_high) = wilson_interval(correct, n, Z95);
            BinRow {
                variant: v.to_string(),
                bin_low: bin as f64 / BINS as f64,
                bin_high: (bin + 1) as f64 / BINS as f64,
                n,
                correct,
                accuracy: correct as f64 / n as f64,
                ci_low,
                ci_high,
            }
        })
        .collect()
}

/// Accuracy by final alpha, for records that have one.
pub fn alpha_bins(records: &[EpisodeRecord]) -> Vec<BinRow> {
    bin_accuracy(records, |r| r.final_alpha)
}

/// Accuracy by the final weight of the distinguishing relation.
pub fn weight_bins(records: &[EpisodeRecord]) -> Vec<BinRow> {
    bin_accuracy(records, |r| r.distinguishing_relation.map(|rel| r.weights()[rel.index()]))
}

/// Everything `aggregate` derives from a records file.
#[derive(Clone, Debug, PartialEq)]
pub struct Aggregates {
    pub curves: Vec<CurveRow>,
    pub alpha_bins: Vec<BinRow>,
    pub weight_bins: Vec<BinRow>,
}

impl Aggregates {
    pub fn from_records(records: &[EpisodeRecord]) -> Self {
        Aggregates { curves: aggregate_curves(records), alpha_bins: alpha_bins(records), weight_bins: weight_bins(records) }
    }

    /// Pooled or per-problem curve of one variant as (shots, row) pairs.
    pub fn curve<'a>(&'a self, variant: &'a str, problem: &'a str) -> impl Iterator<Item = &'a CurveRow> + 'a {
        self.curves.iter().filter(move |r| r.variant == variant && r.problem_id == problem)
    }

    /// Writes `curves.csv`, `alpha_bins.csv` and `weight_bins.csv`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        write_csv(&dir.join("curves.csv"), &self.curves)?;
        write_csv(&dir.join("alpha_bins.csv"), &self.alpha_bins)?;
        write_csv(&dir.join("weight_bins.csv"), &self.weight_bins)?;
        Ok(())
    }

    /// Reads what [`Aggregates::write`] wrote.
    pub fn read(dir: &Path) -> Result<Self> {
        Ok(Aggregates {
            curves: read_csv(&dir.join("curves.csv"))?,
            alpha_bins: read_csv(&dir.join("alpha_bins.csv"))?,
            weight_bins: read_csv(&dir.join("weight_bins.csv"))?,
        })
    }

    /// Variant labels in sorted order.
    pub fn variants(&self) -> Vec<&str> {
        let mut v: Vec<&str> = self.curves.iter().map(|r| r.variant.as_str()).collect();
        v.dedup();
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relgraph::{Label, Relation};

    fn rec(variant: &str, problem: &str, shots: usize, correct: bool, alpha: Option<f64>, w0: f64) -> EpisodeRecord {
        let mut r = EpisodeRecord {
            problem_id: problem.into(),
            seed: 0,
            variant: variant.into(),
            total_shots: shots,
            target_index: 0,
            true_label: Label::Positive,
            predicted_label: if correct { Label::Positive } else { Label::Negative },
            correct: correct as u8,
            sim_pos: 0.0,
            sim_neg: 0.0,
            final_alpha: alpha,
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
            distinguishing_relation: Some(Relation::Inside),
            cell_seed: 0,
        };
        let rest = (1.0 - w0) / 6.0;
        r.set_weights(&[w0, rest, rest, rest, rest, rest, rest]);
        r
    }

    #[test]
    fn wilson_examples() {
        let (lo, hi) = wilson_interval(10, 10, 1.96);
        assert!((lo - 0.722).abs() < 5e-4 && hi == 1.0, "{lo}");
        let (lo, hi) = wilson_interval(0, 10, 1.96);
        assert!((hi - 0.278).abs() < 5e-4 && lo == 0.0, "{hi}");
        let (lo, hi) = wilson_interval(5, 10, 1.96);
        assert!(((0.5 - lo) - (hi - 0.5)).abs() < 1e-12);
    }

    #[test]
    fn curves_pool_problems_and_average_cells() {
        let records = vec![
            rec("a", "P1", 2, true, Some(0.2), 0.4),
            rec("a", "P1", 2, false, Some(0.4), 0.2),
            rec("a", "P2", 2, true, None, 1.0),
            rec("b", "P1", 4, true, None, 0.1),
        ];
        let curves = aggregate_curves(&records);
        let keys: Vec<_> = curves.iter().map(|r| (r.variant.as_str(), r.problem_id.as_str(), r.total_shots)).collect();
        assert_eq!(keys, [("a", "*", 2), ("a", "P1", 2), ("a", "P2", 2), ("b", "*", 4), ("b", "P1", 4)]);
        let pooled = &curves[0];
        assert_eq!((pooled.n, pooled.correct), (3, 2));
        assert!((pooled.mean_alpha.unwrap() - 0.3).abs() < 1e-12);
        assert!((curves[1].mean_w_inside - 0.3).abs() < 1e-12);
        assert_eq!(curves[2].mean_alpha, None);
        assert!((pooled.mean_w_distinguishing.unwrap() - 1.6 / 3.0).abs() < 1e-12);
        assert!((curves[1].mean_weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(curves, aggregate_curves(&records));
        let dir = tempfile::tempdir().unwrap();
        let agg = Aggregates::from_records(&records);
        agg.write(dir.path()).unwrap();
        assert_eq!(Aggregates::read(dir.path()).unwrap(), agg);
        assert_eq!(agg.variants(), ["a", "b"]);
    }

    #[test]
    fn bins_cover_the_unit_interval() {
        let records = vec![
            rec("a", "P1", 2, true, Some(0.0), 0.05),
            rec("a", "P1", 2, false, Some(0.99), 0.15),
            rec("a", "P1", 2, true, Some(1.0), 1.0),
        ];
        let a = alpha_bins(&records);
        assert_eq!(a.iter().map(|b| (b.bin_low, b.n)).collect::<Vec<_>>(), [(0.0, 1), (0.9, 2)]);
        assert_eq!(a[1].correct, 1);
        let w = weight_bins(&records);
        assert_eq!(w.iter().map(|b| b.n).sum::<usize>(), 3);
        for b in a.iter().chain(&w) {
            assert!(0.0 <= b.ci_low && b.ci_low <= b.accuracy && b.accuracy <= b.ci_high && b.ci_high <= 1.0);
        }
    }
}
