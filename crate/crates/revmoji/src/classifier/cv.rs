//! Stratified k-fold cross-validation with pooled-confusion metrics.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::features::DesignMatrix;

use super::forest::{predict, train_forest, ForestParams};
use super::metrics::{ConfusionMatrix, EvalMetrics};

/// Assign each index to one of `k` folds, stratified by class.
///
/// Within each class (label 0 first, then 1), indices are shuffled by a
/// generator seeded with `seed` and dealt round-robin, so per-fold
/// per-class counts differ by at most one.
pub fn stratified_folds(labels: &[u8], k: usize, seed: u64) -> Result<Vec<usize>> {
    if k < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 folds, got {k}")));
    }
    let mut by_class: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for (i, &label) in labels.iter().enumerate() {
        by_class[usize::from(label == 1)].push(i);
    }
    for (label, members) in by_class.iter().enumerate() {
        if members.len() < k {
            return Err(Error::ClassTooSmall {
                label: label as u8,
                count: members.len(),
                folds: k,
            });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![0usize; labels.len()];
    for members in by_class.iter_mut() {
        members.shuffle(&mut rng);
        for (j, &idx) in members.iter().enumerate() {
            assignment[idx] = j % k;
        }
    }
    Ok(assignment)
}

/// Stratified k-fold cross-validation. Each fold trains on the remaining
/// folds (forest seed `params.seed + fold + 1`, wrapping) and predicts the
/// held-out rows; metrics are computed once on the pooled out-of-fold
/// confusion matrix with "useful" as the positive class.
pub fn evaluate_cv(x: &DesignMatrix, k: usize, params: &ForestParams) -> Result<EvalMetrics> {
    let folds = stratified_folds(&x.labels, k, params.seed)?;
    let confusions: Vec<Result<ConfusionMatrix>> = (0..k)
        .into_par_iter()
        .map(|fold| {
            let mut train_rows = Vec::new();
            let mut train_labels = Vec::new();
            let mut test_idx = Vec::new();
            for (i, &assigned) in folds.iter().enumerate() {
                if assigned == fold {
                    test_idx.push(i);
                } else {
                    train_rows.push(x.rows[i].clone());
                    train_labels.push(x.labels[i]);
                }
            }
            let train = DesignMatrix::new(
                x.mode,
                x.feature_names.clone(),
                train_rows,
                train_labels,
            );
            let fold_params = ForestParams {
                seed: params.seed.wrapping_add(fold as u64 + 1),
                ..*params
            };
            let model = train_forest(&train, &fold_params)?;
            let mut confusion = ConfusionMatrix::default();
            for i in test_idx {
                let (label, _) = predict(&model, &x.rows[i])?;
                confusion.record(x.labels[i], label);
            }
            Ok(confusion)
        })
        .collect();

    let mut pooled = ConfusionMatrix::default();
    for c in confusions {
        pooled.merge(&c?);
    }
    Ok(EvalMetrics::from_confusion(pooled))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::MatrixMode;
    use rand::Rng;

    #[test]
    fn balanced_divisible_case_is_exact() {
        let labels: Vec<u8> = std::iter::repeat(1u8)
            .take(50)
            .chain(std::iter::repeat(0u8).take(50))
            .collect();
        let folds = stratified_folds(&labels, 10, 7).unwrap();
        for fold in 0..10 {
            let pos = labels
                .iter()
                .zip(&folds)
                .filter(|(&l, &f)| l == 1 && f == fold)
                .count();
            let neg = labels
                .iter()
                .zip(&folds)
                .filter(|(&l, &f)| l == 0 && f == fold)
                .count();
            assert_eq!((pos, neg), (5, 5));
        }
    }

    #[test]
    fn uneven_class_deals_round_robin() {
        // 52 positive, 50 negative, k = 10
        let labels: Vec<u8> = std::iter::repeat(1u8)
            .take(52)
            .chain(std::iter::repeat(0u8).take(50))
            .collect();
        let folds = stratified_folds(&labels, 10, 42).unwrap();

        // independent round-robin oracle: class c of size n puts n % k folds
        // at ceil(n/k) and the rest at floor(n/k)
        let mut pos_counts = vec![0usize; 10];
        let mut neg_counts = vec![0usize; 10];
        for (i, &f) in folds.iter().enumerate() {
            if labels[i] == 1 {
                pos_counts[f] += 1;
            } else {
                neg_counts[f] += 1;
            }
        }
        let mut pos_sorted = pos_counts.clone();
        pos_sorted.sort_unstable();
        assert_eq!(pos_sorted, vec![5, 5, 5, 5, 5, 5, 5, 5, 6, 6]);
        assert!(pos_counts.iter().all(|&c| c == 5 || c == 6));
        assert!(neg_counts.iter().all(|&c| c == 5));
    }

    #[test]
    fn assignment_is_a_partition_and_deterministic() {
        let labels: Vec<u8> = (0..40).map(|i| (i % 2) as u8).collect();
        let a = stratified_folds(&labels, 4, 9).unwrap();
        let b = stratified_folds(&labels, 4, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), labels.len());
        assert!(a.iter().all(|&f| f < 4));
    }

    #[test]
    fn small_class_is_rejected() {
        let mut labels = vec![0u8; 10];
        labels.extend([1u8, 1, 1]);
        assert!(matches!(
            stratified_folds(&labels, 10, 1),
            Err(Error::ClassTooSmall { label: 1, count: 3, folds: 10 })
        ));
    }

    fn margin_data(n_per_class: usize, seed: u64) -> DesignMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for _ in 0..n_per_class {
            rows.push(vec![rng.gen_range(-2.0..-0.5), rng.gen_range(-1.0..1.0)]);
            labels.push(0u8);
            rows.push(vec![rng.gen_range(0.5..2.0), rng.gen_range(-1.0..1.0)]);
            labels.push(1u8);
        }
        DesignMatrix::new(
            MatrixMode::TextFeatures,
            vec!["x".into(), "noise".into()],
            rows,
            labels,
        )
    }

    #[test]
    fn clean_margin_scores_high() {
        let x = margin_data(60, 3);
        let params = ForestParams {
            n_trees: 30,
            ..Default::default()
        };
        let m = evaluate_cv(&x, 10, &params).unwrap();
        assert!(m.accuracy >= 0.95, "accuracy {}", m.accuracy);
        assert!(m.mcc >= 0.9, "mcc {}", m.mcc);
    }

    #[test]
    fn shuffled_labels_score_near_zero() {
        let mut x = margin_data(500, 5);
        // destroy the signal: reshuffle labels independently of features
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        x.labels.shuffle(&mut rng);
        let params = ForestParams {
            n_trees: 30,
            ..Default::default()
        };
        let m = evaluate_cv(&x, 10, &params).unwrap();
        assert!(m.mcc.abs() < 0.15, "mcc {}", m.mcc);
    }

    #[test]
    fn cv_is_deterministic() {
        let x = margin_data(40, 13);
        let params = ForestParams {
            n_trees: 15,
            ..Default::default()
        };
        let a = evaluate_cv(&x, 5, &params).unwrap();
        let b = evaluate_cv(&x, 5, &params).unwrap();
        assert_eq!(a, b);
    }
}
