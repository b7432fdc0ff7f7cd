//! Random forest training, probability prediction and persistence.

use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::corpus::{Aspect, AspectLabel};
use crate::error::{Error, Result};
use crate::model::tree::{train_tree_on, TreeNode, TreeParams};

/// Training hyperparameters; defaults follow standard random-forest
/// practice and everything is configurable.
#[derive(Debug, Clone, PartialEq)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    /// Features drawn per split; `None` means ceil(sqrt(m)).
    pub features_per_split: Option<usize>,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 100,
            max_depth: None,
            min_samples_split: 2,
            features_per_split: None,
        }
    }
}

impl ForestParams {
    fn resolve_features_per_split(&self, n_features: usize) -> usize {
        match self.features_per_split {
            Some(k) => k.max(1).min(n_features),
            None => (n_features as f64).sqrt().ceil() as usize,
        }
    }
}

/// Class probability distribution in [`AspectLabel::ALL`] order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabelDistribution(pub [f64; 3]);

impl LabelDistribution {
    pub fn get(&self, label: AspectLabel) -> f64 {
        self.0[label.index()]
    }

    /// Argmax class; ties resolve by the GOOD > OK > BAD priority order.
    pub fn argmax(&self) -> AspectLabel {
        let mut best = AspectLabel::Good;
        for label in AspectLabel::ALL {
            if self.get(label) > self.get(best) {
                best = label;
            }
        }
        best
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomForest {
    pub trees: Vec<TreeNode>,
    pub params: ForestParams,
    pub features_per_split: usize,
    pub master_seed: u64,
    pub aspect: Aspect,
    pub feature_names: Vec<String>,
}

/// Trains `params.n_trees` trees on bootstrap samples. Tree i draws its
/// bootstrap and split features from an RNG seeded with master_seed + i, so
/// the result is independent of worker scheduling.
pub fn train_forest(
    x: &[Vec<f64>],
    y: &[AspectLabel],
    feature_names: &[String],
    aspect: Aspect,
    params: &ForestParams,
    master_seed: u64,
) -> Result<RandomForest> {
    if x.is_empty() {
        return Err(Error::invalid("cannot train a forest on an empty sample set"));
    }
    if x.len() != y.len() {
        return Err(Error::invalid("feature matrix and label vector lengths differ"));
    }
    let n_features = x[0].len();
    if feature_names.len() != n_features {
        return Err(Error::invalid(format!(
            "{} feature names for {n_features} features",
            feature_names.len()
        )));
    }
    let features_per_split = params.resolve_features_per_split(n_features);
    let tree_params = TreeParams {
        max_depth: params.max_depth,
        min_samples_split: params.min_samples_split,
        features_per_split,
    };
    let trees: Vec<TreeNode> = (0..params.n_trees)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(master_seed.wrapping_add(i as u64));
            let bootstrap: Vec<usize> =
                (0..x.len()).map(|_| rng.gen_range(0..x.len())).collect();
            train_tree_on(x, y, &bootstrap, &tree_params, &mut rng)
        })
        .collect::<Result<_>>()?;
    Ok(RandomForest {
        trees,
        params: params.clone(),
        features_per_split,
        master_seed,
        aspect,
        feature_names: feature_names.to_vec(),
    })
}

impl RandomForest {
    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }

    /// Soft-voting class distribution: each tree's leaf counts are
    /// normalized, then averaged over trees.
    pub fn predict_proba(&self, x: &[f64]) -> Result<LabelDistribution> {
        if x.len() != self.feature_names.len() {
            return Err(Error::invalid(format!(
                "feature vector length {} does not match model ({})",
                x.len(),
                self.feature_names.len()
            )));
        }
        let mut acc = [0.0f64; 3];
        for tree in &self.trees {
            let counts = tree.leaf_counts(x);
            let total: u64 = counts.iter().sum();
            for (a, &c) in acc.iter_mut().zip(counts) {
                *a += c as f64 / total as f64;
            }
        }
        for a in acc.iter_mut() {
            *a /= self.trees.len() as f64;
        }
        Ok(LabelDistribution(acc))
    }

    /// Versioned structured-text serialization with a preorder tree encoding.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "simpqe-rf v1 aspect={} n_trees={} seed={}\n",
            self.aspect,
            self.trees.len(),
            self.master_seed
        );
        out.push_str(&format!(
            "params max_depth={} min_samples_split={} features_per_split={}\n",
            self.params
                .max_depth
                .map_or("none".to_string(), |d| d.to_string()),
            self.params.min_samples_split,
            self.features_per_split
        ));
        out.push_str(&format!("features {}\n", self.feature_names.join(" ")));
        for (i, tree) in self.trees.iter().enumerate() {
            out.push_str(&format!("tree {i}\n"));
            write_node(tree, &mut out);
        }
        out.push_str("end\n");
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn from_text(text: &str, source: &str) -> Result<RandomForest> {
        let mut lines = text.lines().enumerate().peekable();
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::parse(source, 1, "empty model file"))?;
        let mut parts = header.split_whitespace();
        if parts.next() != Some("simpqe-rf") || parts.next() != Some("v1") {
            return Err(Error::parse(source, 1, "expected 'simpqe-rf v1' header"));
        }
        let mut aspect = None;
        let mut n_trees = None;
        let mut seed = None;
        for part in parts {
            match part.split_once('=') {
                Some(("aspect", v)) => aspect = Some(v.parse::<Aspect>().map_err(|e| {
                    Error::parse(source, 1, e.to_string())
                })?),
                Some(("n_trees", v)) => n_trees = Some(v.parse::<usize>().map_err(|_| {
                    Error::parse(source, 1, format!("bad n_trees '{v}'"))
                })?),
                Some(("seed", v)) => seed = Some(v.parse::<u64>().map_err(|_| {
                    Error::parse(source, 1, format!("bad seed '{v}'"))
                })?),
                _ => return Err(Error::parse(source, 1, format!("bad header field '{part}'"))),
            }
        }
        let (Some(aspect), Some(n_trees), Some(master_seed)) = (aspect, n_trees, seed) else {
            return Err(Error::parse(source, 1, "incomplete model header"));
        };

        let (_, params_line) = lines
            .next()
            .ok_or_else(|| Error::parse(source, 2, "missing params line"))?;
        let mut max_depth = None;
        let mut min_samples_split = None;
        let mut features_per_split = None;
        let mut parts = params_line.split_whitespace();
        if parts.next() != Some("params") {
            return Err(Error::parse(source, 2, "expected params line"));
        }
        for part in parts {
            match part.split_once('=') {
                Some(("max_depth", "none")) => max_depth = Some(None),
                Some(("max_depth", v)) => {
                    max_depth = Some(Some(v.parse::<usize>().map_err(|_| {
                        Error::parse(source, 2, format!("bad max_depth '{v}'"))
                    })?))
                }
                Some(("min_samples_split", v)) => {
                    min_samples_split = Some(v.parse::<usize>().map_err(|_| {
                        Error::parse(source, 2, format!("bad min_samples_split '{v}'"))
                    })?)
                }
                Some(("features_per_split", v)) => {
                    features_per_split = Some(v.parse::<usize>().map_err(|_| {
                        Error::parse(source, 2, format!("bad features_per_split '{v}'"))
                    })?)
                }
                _ => return Err(Error::parse(source, 2, format!("bad params field '{part}'"))),
            }
        }
        let (Some(max_depth), Some(min_samples_split), Some(features_per_split)) =
            (max_depth, min_samples_split, features_per_split)
        else {
            return Err(Error::parse(source, 2, "incomplete params line"));
        };

        let (_, features_line) = lines
            .next()
            .ok_or_else(|| Error::parse(source, 3, "missing features line"))?;
        let feature_names: Vec<String> = features_line
            .strip_prefix("features ")
            .ok_or_else(|| Error::parse(source, 3, "expected features line"))?
            .split_whitespace()
            .map(str::to_string)
            .collect();

        let mut trees = Vec::with_capacity(n_trees);
        for i in 0..n_trees {
            let (idx, line) = lines.next().ok_or_else(|| {
                Error::parse(source, 0, format!("truncated file: tree {i} missing"))
            })?;
            if line != format!("tree {i}") {
                return Err(Error::parse(source, idx + 1, format!("expected 'tree {i}'")));
            }
            trees.push(read_node(&mut lines, source)?);
        }
        match lines.next() {
            Some((_, "end")) => {}
            _ => return Err(Error::parse(source, 0, "truncated file: missing end marker")),
        }
        Ok(RandomForest {
            trees,
            params: ForestParams {
                n_trees,
                max_depth,
                min_samples_split,
                features_per_split: Some(features_per_split),
            },
            features_per_split,
            master_seed,
            aspect,
            feature_names,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<RandomForest> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text, &path.display().to_string())
    }
}

fn write_node(node: &TreeNode, out: &mut String) {
    match node {
        TreeNode::Internal {
            feature_index,
            threshold,
            left,
            right,
        } => {
            // Display for f64 round-trips exactly
            out.push_str(&format!("N {feature_index} {threshold}\n"));
            write_node(left, out);
            write_node(right, out);
        }
        TreeNode::Leaf { class_counts } => {
            out.push_str(&format!(
                "L {} {} {}\n",
                class_counts[0], class_counts[1], class_counts[2]
            ));
        }
    }
}

fn read_node<'a, I>(lines: &mut std::iter::Peekable<I>, source: &str) -> Result<TreeNode>
where
    I: Iterator<Item = (usize, &'a str)>,
{
    let (idx, line) = lines
        .next()
        .ok_or_else(|| Error::parse(source, 0, "truncated file inside tree encoding"))?;
    let lineno = idx + 1;
    let fields: Vec<&str> = line.split_whitespace().collect();
    match fields.as_slice() {
        ["N", feature, threshold] => {
            let feature_index: usize = feature
                .parse()
                .map_err(|_| Error::parse(source, lineno, "bad feature index"))?;
            let threshold: f64 = threshold
                .parse()
                .map_err(|_| Error::parse(source, lineno, "bad threshold"))?;
            let left = Box::new(read_node(lines, source)?);
            let right = Box::new(read_node(lines, source)?);
            Ok(TreeNode::Internal {
                feature_index,
                threshold,
                left,
                right,
            })
        }
        ["L", g, o, b] => {
            let parse = |v: &str| {
                v.parse::<u64>()
                    .map_err(|_| Error::parse(source, lineno, "bad leaf count"))
            };
            let class_counts = [parse(g)?, parse(o)?, parse(b)?];
            if class_counts.iter().sum::<u64>() == 0 {
                return Err(Error::parse(source, lineno, "leaf with zero samples"));
            }
            Ok(TreeNode::Leaf { class_counts })
        }
        _ => Err(Error::parse(source, lineno, format!("bad tree node line '{line}'"))),
    }
}
