//! From-scratch Random Forest: axis-aligned threshold splits chosen by
//! Gini gain over bootstrap samples.
//!
//! Determinism contract: tree `t` draws all of its randomness from a
//! generator seeded `params.seed ^ t`, so parallel and serial training
//! build identical models. Globally constant feature columns are excluded
//! from the candidate pool before any sampling, which makes models
//! invariant to appended constant columns.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::features::DesignMatrix;

/// Candidate feature count per split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MaxFeatures {
    /// `max(1, floor(sqrt(active features)))`.
    Sqrt,
    /// Every active feature.
    All,
    /// A fixed number, capped to the active feature count.
    Fixed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ForestParams {
    pub n_trees: usize,
    /// `None` grows until purity or the minimum leaf size.
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    pub max_features: MaxFeatures,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 100,
            max_depth: None,
            min_samples_leaf: 1,
            max_features: MaxFeatures::Sqrt,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub enum TreeNode {
    Split {
        feature: usize,
        /// Samples with `value <= threshold` go left.
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        /// Class sample counts `(not useful, useful)` at this leaf.
        counts: (u32, u32),
    },
}

/// One trained tree stored as an arena; node 0 is the root.
#[derive(Debug, Clone, Serialize)]
pub struct DecisionTree {
    nodes: Vec<TreeNode>,
}

impl DecisionTree {
    /// Positive-class frequency at the leaf reached by `x`.
    fn leaf_frequency(&self, x: &[f64]) -> f64 {
        let mut idx = 0;
        loop {
            match &self.nodes[idx] {
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    idx = if x[*feature] <= *threshold { *left } else { *right };
                }
                TreeNode::Leaf { counts } => {
                    let total = counts.0 + counts.1;
                    return counts.1 as f64 / total as f64;
                }
            }
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn root(&self) -> &TreeNode {
        &self.nodes[0]
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RandomForestModel {
    pub trees: Vec<DecisionTree>,
    pub feature_count: usize,
    pub params: ForestParams,
}

impl RandomForestModel {
    /// JSON dump of the tree structures, for debugging.
    pub fn debug_json(&self) -> String {
        serde_json::to_string(self).expect("model serializes")
    }
}

/// Fit a forest on a design matrix. Requires at least two rows, both
/// classes present, and finite features throughout.
pub fn train_forest(x: &DesignMatrix, params: &ForestParams) -> Result<RandomForestModel> {
    let n = x.rows.len();
    if n < 2 {
        return Err(Error::TooFewRows { need: 2, got: n });
    }
    let n_features = x.feature_count();
    for (r, row) in x.rows.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite { row: r, column: c });
            }
        }
    }
    let has_pos = x.labels.iter().any(|&l| l == 1);
    let has_neg = x.labels.iter().any(|&l| l == 0);
    if !has_pos || !has_neg {
        return Err(Error::SingleClass);
    }
    if let MaxFeatures::Fixed(k) = params.max_features {
        if k == 0 || k > n_features {
            return Err(Error::InvalidInput(format!(
                "fixed feature count {k} outside 1..={n_features}"
            )));
        }
    }

    // Constant columns carry no split information; dropping them from the
    // candidate pool keeps models identical when such columns are appended.
    let active: Vec<usize> = (0..n_features)
        .filter(|&c| {
            let first = x.rows[0][c];
            x.rows.iter().any(|row| row[c] != first)
        })
        .collect();

    let trees: Vec<DecisionTree> = (0..params.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed ^ t as u64);
            grow_tree(x, params, &active, &mut rng)
        })
        .collect();

    Ok(RandomForestModel {
        trees,
        feature_count: n_features,
        params: *params,
    })
}

/// Predict one row: the score is the mean leaf positive-class frequency
/// over all trees; the label is 1 when the score reaches 0.5.
pub fn predict(model: &RandomForestModel, x: &[f64]) -> Result<(u8, f64)> {
    if x.len() != model.feature_count {
        return Err(Error::DimensionMismatch {
            expected: model.feature_count,
            got: x.len(),
        });
    }
    let sum: f64 = model.trees.iter().map(|t| t.leaf_frequency(x)).sum();
    let score = sum / model.trees.len() as f64;
    let label = u8::from(score >= 0.5);
    Ok((label, score))
}

fn grow_tree(
    x: &DesignMatrix,
    params: &ForestParams,
    active: &[usize],
    rng: &mut ChaCha8Rng,
) -> DecisionTree {
    let n = x.rows.len();
    let bootstrap: Vec<u32> = (0..n).map(|_| rng.gen_range(0..n) as u32).collect();

    let mut nodes: Vec<TreeNode> = Vec::new();
    // Explicit stack avoids recursion limits on deep trees. Entries carry
    // the slot the finished node must land in.
    struct Work {
        slot: usize,
        samples: Vec<u32>,
        depth: usize,
    }
    nodes.push(TreeNode::Leaf { counts: (0, 0) }); // placeholder for root
    let mut stack = vec![Work {
        slot: 0,
        samples: bootstrap,
        depth: 0,
    }];

    while let Some(work) = stack.pop() {
        let counts = class_counts(x, &work.samples);
        let pure = counts.0 == 0 || counts.1 == 0;
        let depth_stop = params.max_depth.is_some_and(|d| work.depth >= d);
        let too_small = work.samples.len() < 2 * params.min_samples_leaf.max(1);
        let split = if pure || depth_stop || too_small {
            None
        } else {
            best_split(x, &work.samples, params, active, rng)
        };
        match split {
            None => nodes[work.slot] = TreeNode::Leaf { counts },
            Some((feature, threshold)) => {
                let (left_samples, right_samples): (Vec<u32>, Vec<u32>) = work
                    .samples
                    .iter()
                    .partition(|&&s| x.rows[s as usize][feature] <= threshold);
                let left = nodes.len();
                nodes.push(TreeNode::Leaf { counts: (0, 0) });
                let right = nodes.len();
                nodes.push(TreeNode::Leaf { counts: (0, 0) });
                nodes[work.slot] = TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                };
                stack.push(Work {
                    slot: right,
                    samples: right_samples,
                    depth: work.depth + 1,
                });
                stack.push(Work {
                    slot: left,
                    samples: left_samples,
                    depth: work.depth + 1,
                });
            }
        }
    }
    DecisionTree { nodes }
}

fn class_counts(x: &DesignMatrix, samples: &[u32]) -> (u32, u32) {
    let mut counts = (0u32, 0u32);
    for &s in samples {
        if x.labels[s as usize] == 1 {
            counts.1 += 1;
        } else {
            counts.0 += 1;
        }
    }
    counts
}

fn gini(counts: (u32, u32)) -> f64 {
    let total = (counts.0 + counts.1) as f64;
    if total == 0.0 {
        return 0.0;
    }
    let p0 = counts.0 as f64 / total;
    let p1 = counts.1 as f64 / total;
    1.0 - p0 * p0 - p1 * p1
}

/// Best `(feature, threshold)` by Gini gain over the sampled candidate
/// features. Candidates are visited in ascending feature order and
/// thresholds in ascending value order, so the first strict maximum wins:
/// ties resolve to the lowest feature index, then the lowest threshold.
fn best_split(
    x: &DesignMatrix,
    samples: &[u32],
    params: &ForestParams,
    active: &[usize],
    rng: &mut ChaCha8Rng,
) -> Option<(usize, f64)> {
    if active.is_empty() {
        return None;
    }
    let m = match params.max_features {
        MaxFeatures::Sqrt => ((active.len() as f64).sqrt().floor() as usize).max(1),
        MaxFeatures::All => active.len(),
        MaxFeatures::Fixed(k) => k.min(active.len()),
    };
    let mut candidates: Vec<usize> = if m >= active.len() {
        active.to_vec()
    } else {
        // partial Fisher-Yates: first m entries are the sample
        let mut pool = active.to_vec();
        for j in 0..m {
            let pick = j + rng.gen_range(0..pool.len() - j);
            pool.swap(j, pick);
        }
        pool.truncate(m);
        pool
    };
    candidates.sort_unstable();

    let parent_counts = class_counts(x, samples);
    let parent_gini = gini(parent_counts);
    let total = samples.len() as f64;
    let min_leaf = params.min_samples_leaf.max(1) as u32;

    let mut best: Option<(f64, usize, f64)> = None; // (gain, feature, threshold)
    let mut values: Vec<(f64, u8)> = Vec::with_capacity(samples.len());
    for &feature in &candidates {
        values.clear();
        values.extend(
            samples
                .iter()
                .map(|&s| (x.rows[s as usize][feature], x.labels[s as usize])),
        );
        values.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite features"));

        let mut left = (0u32, 0u32);
        let mut right = parent_counts;
        let mut i = 0usize;
        while i < values.len() {
            // consume one run of equal values
            let v = values[i].0;
            while i < values.len() && values[i].0 == v {
                if values[i].1 == 1 {
                    left.1 += 1;
                    right.1 -= 1;
                } else {
                    left.0 += 1;
                    right.0 -= 1;
                }
                i += 1;
            }
            if i == values.len() {
                break; // no value above v: nothing to send right
            }
            let next = values[i].0;
            let left_n = left.0 + left.1;
            let right_n = right.0 + right.1;
            if left_n < min_leaf || right_n < min_leaf {
                continue;
            }
            let weighted = (left_n as f64 / total) * gini(left)
                + (right_n as f64 / total) * gini(right);
            let gain = parent_gini - weighted;
            if gain > 1e-12 && best.map_or(true, |(bg, _, _)| gain > bg) {
                let mid = (v + next) / 2.0;
                let threshold = if mid < next { mid } else { v };
                best = Some((gain, feature, threshold));
            }
        }
    }
    best.map(|(_, feature, threshold)| (feature, threshold))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::{DesignMatrix, MatrixMode};

    fn separable(n_per_class: usize) -> DesignMatrix {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for i in 0..n_per_class {
            rows.push(vec![-1.0 - i as f64 * 0.01, 0.5]);
            labels.push(0);
            rows.push(vec![1.0 + i as f64 * 0.01, 0.5]);
            labels.push(1);
        }
        DesignMatrix::new(
            MatrixMode::TextFeatures,
            vec!["x".into(), "c".into()],
            rows,
            labels,
        )
    }

    #[test]
    fn separable_data_trains_to_perfect_accuracy() {
        let x = separable(50);
        let model = train_forest(&x, &ForestParams::default()).unwrap();
        let correct = x
            .rows
            .iter()
            .zip(&x.labels)
            .filter(|(row, &label)| predict(&model, row).unwrap().0 == label)
            .count();
        assert_eq!(correct, x.rows.len());
    }

    #[test]
    fn same_seed_same_predictions() {
        let x = separable(30);
        let params = ForestParams {
            n_trees: 25,
            ..Default::default()
        };
        let a = train_forest(&x, &params).unwrap();
        let b = train_forest(&x, &params).unwrap();
        for probe in [[-3.0, 0.5], [0.2, 0.5], [7.0, 0.5], [-0.005, 0.5]] {
            assert_eq!(
                predict(&a, &probe).unwrap(),
                predict(&b, &probe).unwrap()
            );
        }
    }

    #[test]
    fn single_stump_matches_exhaustive_search() {
        let x = separable(25);
        let params = ForestParams {
            n_trees: 1,
            max_depth: Some(1),
            max_features: MaxFeatures::All,
            ..Default::default()
        };
        let model = train_forest(&x, &params).unwrap();

        // Independent oracle: exhaustive split search over all features and
        // thresholds on the tree's bootstrap sample.
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let n = x.rows.len();
        let bootstrap: Vec<u32> = (0..n).map(|_| rng.gen_range(0..n) as u32).collect();
        let mut best: Option<(f64, usize, f64)> = None;
        for feature in 0..2 {
            let mut vals: Vec<(f64, u8)> = bootstrap
                .iter()
                .map(|&s| (x.rows[s as usize][feature], x.labels[s as usize]))
                .collect();
            vals.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            let parent = {
                let pos = vals.iter().filter(|v| v.1 == 1).count() as f64;
                let neg = vals.len() as f64 - pos;
                let t = vals.len() as f64;
                1.0 - (pos / t).powi(2) - (neg / t).powi(2)
            };
            let mut i = 0;
            let (mut lp, mut ln) = (0f64, 0f64);
            let (mut rp, mut rn) = (
                vals.iter().filter(|v| v.1 == 1).count() as f64,
                vals.iter().filter(|v| v.1 == 0).count() as f64,
            );
            while i < vals.len() {
                let v = vals[i].0;
                while i < vals.len() && vals[i].0 == v {
                    if vals[i].1 == 1 {
                        lp += 1.0;
                        rp -= 1.0;
                    } else {
                        ln += 1.0;
                        rn -= 1.0;
                    }
                    i += 1;
                }
                if i == vals.len() {
                    break;
                }
                let t = vals.len() as f64;
                let gl = 1.0 - (lp / (lp + ln)).powi(2) - (ln / (lp + ln)).powi(2);
                let gr = 1.0 - (rp / (rp + rn)).powi(2) - (rn / (rp + rn)).powi(2);
                let gain = parent - ((lp + ln) / t) * gl - ((rp + rn) / t) * gr;
                if gain > 1e-12 && best.map_or(true, |(bg, _, _)| gain > bg) {
                    let mid = (v + vals[i].0) / 2.0;
                    let threshold = if mid < vals[i].0 { mid } else { v };
                    best = Some((gain, feature, threshold));
                }
            }
        }
        let (_, oracle_feature, oracle_threshold) = best.expect("separable data splits");

        match model.trees[0].root() {
            TreeNode::Split {
                feature, threshold, ..
            } => {
                assert_eq!(*feature, oracle_feature);
                assert!((threshold - oracle_threshold).abs() < 1e-12);
                // the margin straddles zero on this data
                assert!(*threshold > -1.0 && *threshold < 1.0);
            }
            TreeNode::Leaf { .. } => panic!("stump must split"),
        }
    }

    #[test]
    fn single_class_is_rejected() {
        let x = DesignMatrix::new(
            MatrixMode::TextFeatures,
            vec!["x".into()],
            vec![vec![1.0], vec![2.0]],
            vec![1, 1],
        );
        assert!(matches!(
            train_forest(&x, &ForestParams::default()),
            Err(Error::SingleClass)
        ));
    }

    #[test]
    fn non_finite_feature_is_rejected() {
        let x = DesignMatrix::new(
            MatrixMode::TextFeatures,
            vec!["x".into()],
            vec![vec![1.0], vec![f64::NAN]],
            vec![0, 1],
        );
        assert!(matches!(
            train_forest(&x, &ForestParams::default()),
            Err(Error::NonFinite { row: 1, column: 0 })
        ));
    }

    #[test]
    fn prediction_dimension_checked() {
        let x = separable(10);
        let model = train_forest(&x, &ForestParams::default()).unwrap();
        assert!(matches!(
            predict(&model, &[1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn all_trees_positive_scores_one() {
        let x = separable(20);
        let model = train_forest(&x, &ForestParams::default()).unwrap();
        let (label, score) = predict(&model, &[100.0, 0.5]).unwrap();
        assert_eq!(label, 1);
        assert_eq!(score, 1.0);
    }

    #[test]
    fn appended_constant_column_changes_nothing() {
        let base = separable(40);
        let padded = DesignMatrix::new(
            MatrixMode::TextPlusEmojiFeatures,
            vec!["x".into(), "c".into(), "z1".into(), "z2".into()],
            base.rows
                .iter()
                .map(|r| {
                    let mut row = r.clone();
                    row.push(0.0);
                    row.push(0.0);
                    row
                })
                .collect(),
            base.labels.clone(),
        );
        let params = ForestParams {
            n_trees: 20,
            ..Default::default()
        };
        let a = train_forest(&base, &params).unwrap();
        let b = train_forest(&padded, &params).unwrap();
        for probe in [[-2.0, 0.5], [-0.3, 0.5], [0.3, 0.5], [4.0, 0.5]] {
            let mut padded_probe = probe.to_vec();
            padded_probe.push(0.0);
            padded_probe.push(0.0);
            assert_eq!(
                predict(&a, &probe).unwrap(),
                predict(&b, &padded_probe).unwrap()
            );
        }
    }
}
