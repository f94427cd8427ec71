use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{PsiError, Result};
use crate::psi::ModelConfig;
use crate::scenegen::Catalog;

fn default_targets() -> usize {
    4
}

fn default_output() -> PathBuf {
    PathBuf::from("results")
}

/// A sweep over problems × shot counts × seeds × model variants.
///
/// ```json
/// {
///   "master_seed": 1,
///   "problems": ["P-INSIDE", "P-TOUCH"],
///   "shot_counts": [2, 4, 8],
///   "seeds": [0, 1, 2],
///   "variants": [{"variant": "psi", "alpha": "adaptive"},
///                {"variant": "psi", "alpha": {"fixed": 0}},
///                {"variant": "prototype-global"}],
///   "noise": true,
///   "targets_per_episode": 4,
///   "output_dir": "results"
/// }
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub master_seed: u64,
    pub problems: Vec<String>,
    /// Total support examples per episode, split evenly between classes.
    pub shot_counts: Vec<usize>,
    /// Seed indices; each cell's seed is derived from these.
    pub seeds: Vec<u64>,
    pub variants: Vec<ModelConfig>,
    #[serde(default)]
    pub noise: bool,
    #[serde(default = "default_targets")]
    pub targets_per_episode: usize,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    /// Worker threads; defaults to the available parallelism. The
    /// `PSI_WORKERS` environment variable overrides both.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    /// Write a per-step CSV for every induction run.
    #[serde(default)]
    pub trace: bool,
    /// Record wall-clock time per cell. Off by default so results are
    /// byte-identical across runs.
    #[serde(default)]
    pub timing: bool,
    /// Problem catalog file; the built-in catalog when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub catalog: Option<PathBuf>,
}

/// Environment variable overriding the worker count.
pub const WORKERS_ENV: &str = "PSI_WORKERS";

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: ExperimentConfig = serde_json::from_str(text).map_err(|e| PsiError::InvalidConfig(e.to_string()))?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PsiError::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn catalog(&self) -> Result<Catalog> {
        match &self.catalog {
            Some(path) => Catalog::load(path),
            None => Ok(Catalog::builtin()),
        }
    }

    pub fn validate(&self, catalog: &Catalog) -> Result<()> {
        let bad = |m: String| Err(PsiError::InvalidConfig(m));
        if self.problems.is_empty() || self.shot_counts.is_empty() || self.seeds.is_empty() || self.variants.is_empty() {
            return bad("problems, shot_counts, seeds and variants must all be non-empty".into());
        }
        for p in &self.problems {
            catalog.problem(p).map_err(|_| PsiError::InvalidConfig(format!("unknown problem {p:?}")))?;
        }
        if let Some(s) = self.shot_counts.iter().find(|&&s| s < 2 || s % 2 != 0) {
            return bad(format!("shot count {s} must be even and at least 2"));
        }
        if self.targets_per_episode == 0 {
            return bad("targets_per_episode must be at least 1".into());
        }
        if self.workers == Some(0) {
            return bad("workers must be at least 1".into());
        }
        let mut labels = BTreeSet::new();
        for v in &self.variants {
            v.validate()?;
            if !labels.insert(v.label()) {
                return bad(format!("duplicate variant label {:?}; set distinct names", v.label()));
            }
        }
        for (what, dup) in [
            ("problem", has_duplicates(&self.problems)),
            ("shot count", has_duplicates(&self.shot_counts)),
            ("seed", has_duplicates(&self.seeds)),
        ] {
            if dup {
                return bad(format!("duplicate {what}"));
            }
        }
        Ok(())
    }

    /// Worker count after applying the environment override.
    pub fn worker_count(&self) -> Result<usize> {
        if let Ok(v) = std::env::var(WORKERS_ENV) {
            return match v.trim().parse::<usize>() {
                Ok(n) if n >= 1 => Ok(n),
                _ => Err(PsiError::InvalidConfig(format!("{WORKERS_ENV}={v:?} is not a positive integer"))),
            };
        }
        Ok(self
            .workers
            .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)))
    }
}

fn has_duplicates<T: Ord>(items: &[T]) -> bool {
    let set: BTreeSet<&T> = items.iter().collect();
    set.len() != items.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"{
        "master_seed": 1,
        "problems": ["P-INSIDE", "P-TOUCH"],
        "shot_counts": [2, 4, 8],
        "seeds": [0, 1, 2],
        "variants": [{"variant": "psi", "alpha": "adaptive"},
                     {"variant": "psi", "alpha": {"fixed": 0}},
                     {"variant": "prototype-global"}],
        "noise": true,
        "targets_per_episode": 4,
        "output_dir": "results"
    }"#;

    #[test]
    fn documented_example_parses_and_validates() {
        let c = ExperimentConfig::from_json(EXAMPLE).unwrap();
        c.validate(&Catalog::builtin()).unwrap();
        assert_eq!(c.variants[1].label(), "psi-alpha0");
        assert!(!c.trace && !c.timing);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let catalog = Catalog::builtin();
        let base = ExperimentConfig::from_json(EXAMPLE).unwrap();
        let cases: Vec<Box<dyn Fn(&mut ExperimentConfig)>> = vec![
            Box::new(|c| c.shot_counts = vec![3]),
            Box::new(|c| c.shot_counts = vec![0]),
            Box::new(|c| c.targets_per_episode = 0),
            Box::new(|c| c.problems = vec!["P-NOPE".into()]),
            Box::new(|c| c.seeds.clear()),
            Box::new(|c| c.variants.push(c.variants[0].clone())),
            Box::new(|c| c.seeds = vec![1, 1]),
        ];
        for (i, f) in cases.iter().enumerate() {
            let mut c = base.clone();
            f(&mut c);
            assert!(matches!(c.validate(&catalog), Err(PsiError::InvalidConfig(_))), "case {i}");
        }
        assert!(ExperimentConfig::from_json(r#"{"problems": []}"#).is_err());
        assert!(ExperimentConfig::from_json(&EXAMPLE.replace("\"noise\"", "\"noize\"")).is_err());
    }
}
