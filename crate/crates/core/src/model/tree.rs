//! CART decision tree with Gini impurity and per-node random feature
//! subsampling.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::AspectLabel;
use crate::error::{Error, Result};

/// Per-class sample counts in [`AspectLabel::ALL`] order.
pub type ClassCounts = [u64; 3];

#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode {
    Internal {
        feature_index: usize,
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
    Leaf {
        class_counts: ClassCounts,
    },
}

impl TreeNode {
    /// Routes a sample to its leaf: value <= threshold goes left.
    pub fn leaf_counts(&self, x: &[f64]) -> &ClassCounts {
        match self {
            TreeNode::Leaf { class_counts } => class_counts,
            TreeNode::Internal {
                feature_index,
                threshold,
                left,
                right,
            } => {
                if x[*feature_index] <= *threshold {
                    left.leaf_counts(x)
                } else {
                    right.leaf_counts(x)
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Internal { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeParams {
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    pub features_per_split: usize,
}

/// Gini impurity of a count vector: 1 - sum p_i^2.
pub fn gini(counts: &ClassCounts) -> f64 {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let total = total as f64;
    1.0 - counts
        .iter()
        .map(|&c| {
            let p = c as f64 / total;
            p * p
        })
        .sum::<f64>()
}

fn count_classes(y: &[AspectLabel], indices: &[usize]) -> ClassCounts {
    let mut counts = [0u64; 3];
    for &i in indices {
        counts[y[i].index()] += 1;
    }
    counts
}

/// Trains a single tree on the full sample set with a fresh RNG.
pub fn train_tree(
    x: &[Vec<f64>],
    y: &[AspectLabel],
    params: &TreeParams,
    seed: u64,
) -> Result<TreeNode> {
    let indices: Vec<usize> = (0..x.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    train_tree_on(x, y, &indices, params, &mut rng)
}

/// Trains a tree on the given sample indices, consuming the supplied RNG in
/// deterministic depth-first order.
pub fn train_tree_on(
    x: &[Vec<f64>],
    y: &[AspectLabel],
    indices: &[usize],
    params: &TreeParams,
    rng: &mut ChaCha8Rng,
) -> Result<TreeNode> {
    if x.is_empty() || indices.is_empty() {
        return Err(Error::invalid("cannot train a tree on an empty sample set"));
    }
    if x.len() != y.len() {
        return Err(Error::invalid("feature matrix and label vector lengths differ"));
    }
    let width = x[0].len();
    if x.iter().any(|row| row.len() != width) {
        return Err(Error::invalid("feature vectors have inconsistent lengths"));
    }
    Ok(grow(x, y, indices.to_vec(), params, rng, 0))
}

fn grow(
    x: &[Vec<f64>],
    y: &[AspectLabel],
    indices: Vec<usize>,
    params: &TreeParams,
    rng: &mut ChaCha8Rng,
    depth: usize,
) -> TreeNode {
    let counts = count_classes(y, &indices);
    let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
    let depth_stop = params.max_depth.map_or(false, |d| depth >= d);
    if pure || depth_stop || indices.len() < params.min_samples_split {
        return TreeNode::Leaf {
            class_counts: counts,
        };
    }

    let n_features = x[0].len();
    let mut candidates: Vec<usize> = (0..n_features).collect();
    candidates.shuffle(rng);
    let mut drawn: Vec<usize> = candidates
        .into_iter()
        .take(params.features_per_split.min(n_features))
        .collect();
    // ties break toward the lower feature index, then the lower threshold
    drawn.sort_unstable();

    let mut best: Option<(usize, f64, f64)> = None; // (feature, threshold, weighted gini)
    let total = indices.len() as f64;
    for &feature in &drawn {
        let mut values: Vec<f64> = indices.iter().map(|&i| x[i][feature]).collect();
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        values.dedup();
        for window in values.windows(2) {
            let threshold = (window[0] + window[1]) / 2.0;
            let mut left = [0u64; 3];
            let mut right = [0u64; 3];
            for &i in &indices {
                if x[i][feature] <= threshold {
                    left[y[i].index()] += 1;
                } else {
                    right[y[i].index()] += 1;
                }
            }
            let nl: u64 = left.iter().sum();
            let nr: u64 = right.iter().sum();
            if nl == 0 || nr == 0 {
                continue;
            }
            let weighted =
                (nl as f64 / total) * gini(&left) + (nr as f64 / total) * gini(&right);
            if best.map_or(true, |(_, _, b)| weighted < b) {
                best = Some((feature, threshold, weighted));
            }
        }
    }

    let Some((feature_index, threshold, _)) = best else {
        // all drawn features constant over this node
        return TreeNode::Leaf {
            class_counts: counts,
        };
    };

    let (left_idx, right_idx): (Vec<usize>, Vec<usize>) = indices
        .into_iter()
        .partition(|&i| x[i][feature_index] <= threshold);
    TreeNode::Internal {
        feature_index,
        threshold,
        left: Box::new(grow(x, y, left_idx, params, rng, depth + 1)),
        right: Box::new(grow(x, y, right_idx, params, rng, depth + 1)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use AspectLabel::{Bad, Good};

    fn params(features_per_split: usize) -> TreeParams {
        TreeParams {
            max_depth: None,
            min_samples_split: 2,
            features_per_split,
        }
    }

    #[test]
    fn pure_data_single_leaf() {
        let x = vec![vec![1.0], vec![2.0], vec![3.0]];
        let y = vec![Good, Good, Good];
        let tree = train_tree(&x, &y, &params(1), 0).unwrap();
        assert_eq!(
            tree,
            TreeNode::Leaf {
                class_counts: [3, 0, 0]
            }
        );
    }

    #[test]
    fn four_point_split_matches_gini_oracle() {
        let x = vec![vec![1.0], vec![2.0], vec![3.0], vec![4.0]];
        let y = vec![Bad, Bad, Good, Good];
        let tree = train_tree(&x, &y, &params(1), 0).unwrap();
        match &tree {
            TreeNode::Internal {
                feature_index,
                threshold,
                left,
                right,
            } => {
                assert_eq!(*feature_index, 0);
                assert_eq!(*threshold, 2.5);
                assert_eq!(
                    **left,
                    TreeNode::Leaf {
                        class_counts: [0, 0, 2]
                    }
                );
                assert_eq!(
                    **right,
                    TreeNode::Leaf {
                        class_counts: [2, 0, 0]
                    }
                );
            }
            other => panic!("expected internal root, got {other:?}"),
        }
    }

    #[test]
    fn gini_values() {
        assert_eq!(gini(&[2, 2, 0]), 0.5);
        assert_eq!(gini(&[4, 0, 0]), 0.0);
        assert_eq!(gini(&[0, 0, 0]), 0.0);
        let g = gini(&[1, 1, 1]);
        assert!((g - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn split_never_increases_weighted_impurity() {
        let x: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64, (i * 7 % 5) as f64]).collect();
        let y: Vec<AspectLabel> = (0..20)
            .map(|i| if i % 3 == 0 { Good } else { Bad })
            .collect();
        let tree = train_tree(&x, &y, &params(2), 42).unwrap();
        check_impurity(&tree, &x, &y);
    }

    fn node_counts(node: &TreeNode) -> ClassCounts {
        match node {
            TreeNode::Leaf { class_counts } => *class_counts,
            TreeNode::Internal { left, right, .. } => {
                let l = node_counts(left);
                let r = node_counts(right);
                [l[0] + r[0], l[1] + r[1], l[2] + r[2]]
            }
        }
    }

    fn check_impurity(node: &TreeNode, x: &[Vec<f64>], y: &[AspectLabel]) {
        if let TreeNode::Internal { left, right, .. } = node {
            let parent = node_counts(node);
            let l = node_counts(left);
            let r = node_counts(right);
            let np: u64 = parent.iter().sum();
            let nl: u64 = l.iter().sum();
            let nr: u64 = r.iter().sum();
            let weighted = (nl as f64 / np as f64) * gini(&l)
                + (nr as f64 / np as f64) * gini(&r);
            assert!(weighted <= gini(&parent) + 1e-12);
            check_impurity(left, x, y);
            check_impurity(right, x, y);
        }
    }

    #[test]
    fn max_depth_respected() {
        let x: Vec<Vec<f64>> = (0..16).map(|i| vec![i as f64]).collect();
        let y: Vec<AspectLabel> = (0..16)
            .map(|i| if i % 2 == 0 { Good } else { Bad })
            .collect();
        let p = TreeParams {
            max_depth: Some(2),
            min_samples_split: 2,
            features_per_split: 1,
        };
        let tree = train_tree(&x, &y, &p, 0).unwrap();
        assert!(tree.depth() <= 2);
    }

    #[test]
    fn empty_input_is_error() {
        assert!(train_tree(&[], &[], &params(1), 0).is_err());
    }
}
