//! From-scratch random forest (CART + Gini), threshold labeling policy and
//! the rule engine deriving the overall aspect.

mod forest;
mod policy;
mod tree;

pub use forest::{train_forest, ForestParams, LabelDistribution, RandomForest};
pub use policy::{predict_label, predict_overall, ThresholdPolicy};
pub use tree::{gini, train_tree, ClassCounts, TreeNode, TreeParams};
