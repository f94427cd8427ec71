//! Invariants of the public API under random inputs.

use proptest::prelude::*;
use psi::features::Extractor;
use psi::harness::{
    aggregate_curves, build_episode, cell_seed, compare_to_human, generate_scenes, target_label, wilson_interval,
    EpisodeFile, EpisodeRecord, POOLED, Z95,
};
use psi::optim::{assignment_total, hungarian_maximize, ContinuousMappingMatrix, PermutationMatrix};
use psi::relgraph::graph_similarity;
use psi::scenegen::Catalog;
use psi::Label;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PROBLEMS: [&str; 5] = ["P-INSIDE", "P-TOUCH", "P-SAMESHAPE", "P-REFLECT", "P-SAMESIZE"];

fn record(problem: &str, shots: usize, seed: u64, target: usize, correct: bool) -> EpisodeRecord {
    let true_label = target_label(target);
    let other = match true_label {
        Label::Positive => Label::Negative,
        Label::Negative => Label::Positive,
    };
    let mut r = EpisodeRecord {
        problem_id: problem.into(),
        seed,
        variant: "psi-adaptive".into(),
        total_shots: shots,
        target_index: target,
        true_label,
        predicted_label: if correct { true_label } else { other },
        correct: correct as u8,
        sim_pos: 0.5,
        sim_neg: 0.5,
        final_alpha: Some(0.5),
        w_inside: 0.0,
        w_touching: 0.0,
        w_same_shape: 0.0,
        w_normalized_distance: 0.0,
        w_mirrored: 0.0,
        w_same_size: 0.0,
        w_reflection: 0.0,
        final_loss: Some(0.0),
        steps: 1,
        wall_time_ms: 0,
        distinguishing_relation: None,
        cell_seed: 0,
    };
    r.set_weights(&[1.0 / 7.0; 7]);
    r
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wilson_interval_brackets_the_rate(n in 1usize..500, frac in 0.0f64..=1.0) {
        let k = ((n as f64) * frac).round() as usize;
        let (lo, hi) = wilson_interval(k, n, Z95);
        let p = k as f64 / n as f64;
        prop_assert!(0.0 <= lo && lo <= p && p <= hi && hi <= 1.0);
        // Four times the data at the same rate gives a narrower interval.
        let (lo4, hi4) = wilson_interval(4 * k, 4 * n, Z95);
        prop_assert!(hi4 - lo4 < hi - lo);
    }

    #[test]
    fn cell_seeds_are_stable_and_separate_cells(master in any::<u64>(), p in 0usize..5, shots in 1usize..8, seed in 0u64..100) {
        let s = cell_seed(master, PROBLEMS[p], 2 * shots, seed, "psi-adaptive");
        prop_assert_eq!(s, cell_seed(master, PROBLEMS[p], 2 * shots, seed, "psi-adaptive"));
        prop_assert_ne!(s, cell_seed(master, PROBLEMS[p], 2 * shots, seed, "psi-alpha0"));
        prop_assert_ne!(s, cell_seed(master, PROBLEMS[p], 2 * shots + 2, seed, "psi-adaptive"));
        prop_assert_ne!(s, cell_seed(master, PROBLEMS[p], 2 * shots, seed + 1, "psi-adaptive"));
        prop_assert_ne!(s, cell_seed(master.wrapping_add(1), PROBLEMS[p], 2 * shots, seed, "psi-adaptive"));
    }

    #[test]
    fn pooled_rows_sum_their_problems(outcomes in proptest::collection::vec((0usize..5, 0usize..3, any::<bool>()), 1..120)) {
        let records: Vec<_> = outcomes
            .iter()
            .enumerate()
            .map(|(i, &(p, s, ok))| record(PROBLEMS[p], 2 << s, i as u64, i % 4, ok))
            .collect();
        let curves = aggregate_curves(&records);
        for row in curves.iter().filter(|r| r.problem_id == POOLED) {
            let parts: Vec<_> = curves.iter().filter(|r| r.problem_id != POOLED && r.total_shots == row.total_shots).collect();
            prop_assert_eq!(row.n, parts.iter().map(|r| r.n).sum::<usize>());
            prop_assert_eq!(row.correct, parts.iter().map(|r| r.correct).sum::<usize>());
        }
        for row in &curves {
            prop_assert!(row.ci_low <= row.accuracy && row.accuracy <= row.ci_high);
        }
        let total: usize = curves.iter().filter(|r| r.problem_id == POOLED).map(|r| r.n).sum();
        prop_assert_eq!(total, records.len());
    }

    #[test]
    fn human_comparison_is_symmetric_and_ordered(points in proptest::collection::vec((0.0f64..=1.0, 0.0f64..=1.0), 1..8)) {
        let model: Vec<_> = points.iter().enumerate().map(|(i, p)| (2 << i, p.0)).collect();
        let human: Vec<_> = points.iter().enumerate().map(|(i, p)| (2 << i, p.1)).collect();
        let ab = compare_to_human(&model, &human).unwrap();
        let ba = compare_to_human(&human, &model).unwrap();
        prop_assert_eq!(ab.matched, points.len());
        prop_assert!((ab.rmse - ba.rmse).abs() < 1e-12 && (ab.mae - ba.mae).abs() < 1e-12);
        prop_assert!(0.0 <= ab.mae && ab.mae <= ab.rmse + 1e-12);
        let own = compare_to_human(&model, &model).unwrap();
        prop_assert_eq!((own.rmse, own.mae), (0.0, 0.0));
    }

    #[test]
    fn constant_gap_gives_equal_rmse_and_mae(gap in 0.0f64..0.5, n in 1usize..6) {
        let model: Vec<_> = (0..n).map(|i| (2 << i, 0.25 + gap)).collect();
        let human: Vec<_> = (0..n).map(|i| (2 << i, 0.25)).collect();
        let c = compare_to_human(&model, &human).unwrap();
        prop_assert!((c.rmse - 100.0 * gap).abs() < 1e-9);
        prop_assert!((c.mae - 100.0 * gap).abs() < 1e-9);
    }

    #[test]
    fn hungarian_beats_every_permutation(rows in 1usize..=6, cols in 1usize..=6, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data: Vec<f64> = (0..rows * cols).map(|_| rng.random_range(-1.0..1.0)).collect();
        let score = ContinuousMappingMatrix::new(rows, cols, data).unwrap();
        let best = hungarian_maximize(&score);
        prop_assert_eq!(best.count(), rows.min(cols));
        let best_total = assignment_total(&score, &best);
        for _ in 0..20 {
            let mut order: Vec<usize> = (0..cols).collect();
            order.shuffle(&mut rng);
            let assigned = (0..rows).map(|r| (r < cols).then(|| order[r])).collect();
            let other = PermutationMatrix::new(rows, cols, assigned).unwrap();
            prop_assert!(assignment_total(&score, &other) <= best_total + 1e-12);
        }
    }

    #[test]
    fn graph_similarity_is_a_convex_mix(alpha in 0.0f64..=1.0, gn in -1.0f64..=1.0, ge in -1.0f64..=1.0) {
        let g = graph_similarity(alpha, gn, ge);
        prop_assert!(gn.min(ge) - 1e-12 <= g && g <= gn.max(ge) + 1e-12);
        prop_assert_eq!(graph_similarity(1.0, gn, ge), gn);
        prop_assert_eq!(graph_similarity(0.0, gn, ge), ge);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn episodes_survive_the_json_round_trip(p in 0usize..5, half in 1usize..4, targets in 1usize..5, seed in any::<u64>(), noise in any::<bool>(), patches in any::<bool>()) {
        let catalog = Catalog::builtin();
        let extractor = if patches { Extractor::Patch } else { Extractor::Object };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scenes = generate_scenes(&catalog, PROBLEMS[p], 2 * half, targets, &mut rng).unwrap();
        let episode = build_episode(&scenes, extractor, &catalog, noise, seed, &mut rng).unwrap();
        prop_assert_eq!(episode.positives.len(), half);
        prop_assert_eq!(episode.negatives.len(), half);
        for (i, t) in episode.targets.iter().enumerate() {
            prop_assert_eq!(t.label, target_label(i));
        }

        let file = EpisodeFile::new(&episode, extractor, noise);
        let text = serde_json::to_string(&file).unwrap();
        let back: EpisodeFile = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &file);
        let restored = back.into_episode().unwrap();
        prop_assert_eq!(restored.positives, episode.positives);
        prop_assert_eq!(restored.negatives, episode.negatives);
        prop_assert_eq!(restored.targets.len(), episode.targets.len());
    }

    #[test]
    fn scene_sampling_is_a_function_of_the_seed(p in 0usize..5, seed in any::<u64>()) {
        let catalog = Catalog::builtin();
        let a = generate_scenes(&catalog, PROBLEMS[p], 4, 2, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let b = generate_scenes(&catalog, PROBLEMS[p], 4, 2, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert_eq!(a, b);
    }
}
