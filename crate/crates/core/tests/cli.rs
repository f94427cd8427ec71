//! The `psi` binary: subcommands, outputs and exit codes.

use std::path::Path;
use std::process::{Command, Output};

fn psi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_psi")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn write_config(dir: &Path) -> std::path::PathBuf {
    let config = serde_json::json!({
        "master_seed": 4,
        "problems": ["P-TOUCH", "P-REFLECT"],
        "shot_counts": [2, 4],
        "seeds": [0],
        "variants": [
            {"variant": "psi", "alpha": "adaptive", "steps": 30},
            {"variant": "prototype-global"}
        ],
        "noise": true,
        "targets_per_episode": 2,
        "output_dir": dir.join("results"),
        "workers": 1,
        "trace": true
    });
    let path = dir.join("config.json");
    std::fs::write(&path, config.to_string()).unwrap();
    path
}

#[test]
fn every_subcommand_is_listed() {
    let out = psi(&["--help"]);
    assert_eq!(code(&out), 0);
    let help = String::from_utf8(out.stdout).unwrap();
    for sub in ["generate", "run", "aggregate", "compare", "plot", "gradcheck", "selftest"] {
        assert!(help.contains(sub), "missing {sub}");
    }
}

#[test]
fn bad_arguments_exit_with_one() {
    assert_eq!(code(&psi(&["frobnicate"])), 1);
    assert_eq!(code(&psi(&["generate", "--problem", "P-TOUCH"])), 1);
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("e.json");
    assert_eq!(code(&psi(&["generate", "--problem", "P-NOPE", "-o", out.to_str().unwrap()])), 1);
    assert_eq!(code(&psi(&["generate", "--problem", "P-TOUCH", "--shots", "3", "-o", out.to_str().unwrap()])), 1);
    assert_eq!(code(&psi(&["run", dir.path().join("missing.json").to_str().unwrap()])), 1);
    assert_eq!(code(&psi(&["selftest", "--criterion", "12"])), 1);
    assert_eq!(code(&psi(&["aggregate", dir.path().join("records.csv").to_str().unwrap()])), 1);
}

#[test]
fn unreadable_records_are_a_runtime_failure() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("records.csv");
    std::fs::write(&bad, "problem_id,seed\nP-TOUCH\n").unwrap();
    assert_eq!(code(&psi(&["aggregate", bad.to_str().unwrap()])), 2);
}

#[test]
fn generate_writes_a_loadable_episode_and_scene_svgs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("episode.json");
    let svg = dir.path().join("scenes");
    let args = ["generate", "--problem", "P-INSIDE", "--shots", "4", "--targets", "2", "--seed", "9", "--noise"];
    let mut full: Vec<&str> = args.to_vec();
    full.extend(["-o", out.to_str().unwrap(), "--svg", svg.to_str().unwrap()]);
    let res = psi(&full);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));

    let file = psi::harness::EpisodeFile::read(&out).unwrap();
    assert_eq!(file.problem_id, "P-INSIDE");
    assert!(file.noise);
    let episode = file.into_episode().unwrap();
    assert_eq!((episode.positives.len(), episode.negatives.len(), episode.targets.len()), (2, 2, 2));
    assert_eq!(std::fs::read_dir(&svg).unwrap().count(), 6);

    // Same seed, same bytes.
    let again = dir.path().join("again.json");
    let mut full: Vec<&str> = args.to_vec();
    full.extend(["-o", again.to_str().unwrap()]);
    assert_eq!(code(&psi(&full)), 0);
    assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn run_aggregate_plot_compare() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let results = dir.path().join("results");

    let run = psi(&["run", config.to_str().unwrap()]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    let records = results.join("records.csv");
    let lines = std::fs::read_to_string(&records).unwrap().lines().count();
    assert_eq!(lines, 1 + 2 * 2 * 2 * 2);
    // One trace per psi cell; the prototype has no optimization.
    assert_eq!(std::fs::read_dir(results.join("traces")).unwrap().count(), 4);

    assert_eq!(code(&psi(&["aggregate", records.to_str().unwrap()])), 0);
    for f in ["curves.csv", "alpha_bins.csv", "weight_bins.csv"] {
        assert!(results.join(f).exists(), "{f}");
    }

    assert_eq!(code(&psi(&["plot", results.to_str().unwrap()])), 0);
    for f in ["accuracy_by_shots.svg", "alpha.svg", "edge_weights.svg"] {
        assert!(results.join(f).exists(), "{f}");
    }

    let human = dir.path().join("human.csv");
    std::fs::write(&human, "problem_class,total_shots,accuracy\nfirst-order,2,0.6\nfirst-order,4,0.7\nsecond-order,4,0.5\n")
        .unwrap();
    let cmp = psi(&["compare", results.to_str().unwrap(), "--human", human.to_str().unwrap()]);
    assert_eq!(code(&cmp), 0, "{}", String::from_utf8_lossy(&cmp.stderr));
    let table = std::fs::read_to_string(results.join("comparison.csv")).unwrap();
    assert_eq!(table.lines().count(), 3);
    assert!(table.contains("psi-adaptive") && table.contains("prototype-global"));

    std::fs::write(&human, "problem_class,total_shots,accuracy\nfirst-order,2,1.5\n").unwrap();
    assert_eq!(code(&psi(&["compare", results.to_str().unwrap(), "--human", human.to_str().unwrap()])), 1);
}

#[test]
fn gradcheck_passes_and_reports_the_worst_case() {
    let out = psi(&["gradcheck", "--cases", "5", "--seed", "3"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("case")).count(), 5);
    assert!(text.contains("worst"));
}

#[test]
fn selftest_prints_one_line_per_requested_criterion() {
    let out = psi(&["selftest", "--criterion", "1,3,11"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8(out.stdout).unwrap();
    let verdicts: Vec<_> = text.lines().filter(|l| l.starts_with("PASS") || l.starts_with("FAIL")).collect();
    assert_eq!(verdicts.len(), 3);
    assert!(verdicts.iter().all(|l| l.starts_with("PASS")));
}
