//! Command-line front end: episode export, sweeps, aggregation, human
//! comparison, plots and self-checks.
//!
//! Exit codes: 0 success, 1 invalid configuration or arguments, 2 runtime
//! failure (including failed self-checks).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use psi::features::Extractor;
use psi::harness::{
    build_episode, compare_variants, generate_scenes, read_records, render_plots, run_all, run_criterion, run_experiment,
    Aggregates, ComparisonRow, EpisodeFile, ExperimentConfig, HumanCurve,
};
use psi::optim::gradcheck::{check_loss_gradients, random_case};
use psi::optim::{AlphaMode, LossConfig};
use psi::scenegen::{scene_svg, Catalog};
use psi::PsiError;

#[derive(Parser)]
#[command(name = "psi", version, about = "Schema induction over object–relation graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample one episode and write it as JSON.
    Generate {
        #[arg(long)]
        problem: String,
        /// Total support examples, split evenly between classes.
        #[arg(long, default_value_t = 4)]
        shots: usize,
        #[arg(long, default_value_t = 4)]
        targets: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "object")]
        extractor: Extractor,
        /// Add relation noise to object graphs.
        #[arg(long)]
        noise: bool,
        /// Problem catalog file; the built-in catalog when absent.
        #[arg(long)]
        catalog: Option<PathBuf>,
        #[arg(long, short)]
        out: PathBuf,
        /// Also render every scene as SVG into this directory.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Execute an experiment config file.
    Run { config: PathBuf },
    /// Aggregate a records file into curves and bins.
    Aggregate {
        records: PathBuf,
        /// Output directory; the records file's directory when absent.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Compare each variant's pooled curve with a human curve.
    Compare {
        /// Results directory holding records.csv or curves.csv.
        results: PathBuf,
        #[arg(long)]
        human: PathBuf,
    },
    /// Render SVG plots for a results directory.
    Plot {
        results: PathBuf,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Check analytic gradients against central differences.
    Gradcheck {
        #[arg(long, default_value_t = 50)]
        cases: usize,
        #[arg(long, default_value_t = 1e-5)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-4)]
        threshold: f64,
    },
    /// Run the acceptance criteria.
    Selftest {
        /// Only these criteria (1–11).
        #[arg(long, value_delimiter = ',')]
        criterion: Vec<u8>,
        #[arg(long)]
        workers: Option<usize>,
    },
}

enum Failure {
    Invalid(String),
    Runtime(String),
}

impl From<PsiError> for Failure {
    fn from(e: PsiError) -> Self {
        match e {
            PsiError::InvalidConfig(_) | PsiError::UnknownProblem(_) => Failure::Invalid(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}

fn load_aggregates(results: &Path) -> Result<Aggregates, Failure> {
    let records = results.join("records.csv");
    if records.exists() {
        return Ok(Aggregates::from_records(&read_records(&records)?));
    }
    if results.join("curves.csv").exists() {
        return Ok(Aggregates::read(results)?);
    }
    Err(Failure::Invalid(format!("{} has neither records.csv nor curves.csv", results.display())))
}

fn execute(command: Command) -> Result<(), Failure> {
    match command {
        Command::Generate { problem, shots, targets, seed, extractor, noise, catalog, out, svg } => {
            let catalog = match catalog {
                Some(p) => Catalog::load(&p)?,
                None => Catalog::builtin(),
            };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let scenes = generate_scenes(&catalog, &problem, shots, targets, &mut rng)?;
            let episode = build_episode(&scenes, extractor, &catalog, noise, seed, &mut rng)?;
            EpisodeFile::new(&episode, extractor, noise).write(&out)?;
            println!("wrote {}", out.display());
            if let Some(dir) = svg {
                std::fs::create_dir_all(&dir).map_err(PsiError::from)?;
                let groups = [("positive", &scenes.positives), ("negative", &scenes.negatives), ("target", &scenes.targets)];
                for (kind, list) in groups {
                    for (i, s) in list.iter().enumerate() {
                        std::fs::write(dir.join(format!("{kind}_{i}.svg")), scene_svg(s)).map_err(PsiError::from)?;
                    }
                }
                println!("rendered {} scenes into {}", shots + targets, dir.display());
            }
        }
        Command::Run { config } => {
            let config = ExperimentConfig::load(&config)?;
            let out = run_experiment(&config)?;
            println!("{} records -> {}", out.record_count, out.records.display());
            println!("{} failed cells -> {}", out.failure_count, out.failures.display());
        }
        Command::Aggregate { records, out } => {
            if !records.is_file() {
                return Err(Failure::Invalid(format!("no records file at {}", records.display())));
            }
            let agg = Aggregates::from_records(&read_records(&records)?);
            let dir = out.unwrap_or_else(|| records.parent().map(Path::to_path_buf).unwrap_or_default());
            agg.write(&dir)?;
            println!("{} curve rows -> {}", agg.curves.len(), dir.join("curves.csv").display());
        }
        Command::Compare { results, human } => {
            let agg = load_aggregates(&results)?;
            let rows = compare_variants(&agg.curves, &HumanCurve::load(&human)?)?;
            println!("{:<32} {:>7} {:>9} {:>9}", "variant", "matched", "RMSE(pp)", "MAE(pp)");
            for r in &rows {
                println!("{:<32} {:>7} {:>9.3} {:>9.3}", r.variant, r.matched, r.rmse, r.mae);
            }
            psi::harness::records::write_csv::<ComparisonRow>(&results.join("comparison.csv"), &rows)?;
        }
        Command::Plot { results, out } => {
            let agg = load_aggregates(&results)?;
            for p in render_plots(&agg, &out.unwrap_or(results))? {
                println!("wrote {}", p.display());
            }
        }
        Command::Gradcheck { cases, eps, seed, threshold } => {
            if !(eps > 0.0) {
                return Err(Failure::Invalid(format!("eps {eps} must be positive")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let config = LossConfig { alpha: AlphaMode::Adaptive, contrastive: true, nodes_only: false, ..LossConfig::default() };
            let mut worst = 0.0f64;
            for i in 0..cases {
                let (episode, params) = random_case(&mut rng, 6);
                let g = check_loss_gradients(&params, &episode, &config, eps)?;
                let at = g.worst_index.map(|j| params.name(j)).unwrap_or_else(|| "-".into());
                println!("case {i:>3}: {} nodes, {} compared, max rel error {:.3e} at {at}", episode.node_count(), g.compared, g.max_relative_error);
                worst = worst.max(g.max_relative_error);
            }
            println!("worst {worst:.3e} (threshold {threshold:e})");
            if worst >= threshold {
                return Err(Failure::Runtime("gradient check failed".into()));
            }
        }
        Command::Selftest { criterion, workers } => {
            let workers = workers.unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
            let results = if criterion.is_empty() {
                run_all(workers)
            } else {
                criterion.iter().map(|&id| run_criterion(id, workers)).collect::<Result<Vec<_>, _>>()?
            };
            for r in &results {
                println!("{}", r.line());
            }
            let failed = results.iter().filter(|r| !r.passed).count();
            println!("{} of {} criteria passed", results.len() - failed, results.len());
            if failed > 0 {
                return Err(Failure::Runtime(format!("{failed} criteria failed")));
            }
        }
    }
    Ok(())
}
