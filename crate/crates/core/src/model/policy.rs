//! Threshold-based labeling and the rule engine for the overall aspect.

use crate::corpus::AspectLabel;
use crate::error::{Error, Result};
use crate::model::forest::LabelDistribution;

/// Confidence threshold the top class must reach; below it the safe
/// middle class OK is assigned instead.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdPolicy {
    tau: f64,
}

impl ThresholdPolicy {
    pub fn new(tau: f64) -> Result<Self> {
        if tau > 0.0 && tau <= 1.0 {
            Ok(ThresholdPolicy { tau })
        } else {
            Err(Error::invalid(format!("tau {tau} outside (0, 1]")))
        }
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }
}

/// Argmax class (ties: GOOD > OK > BAD) if its probability reaches tau,
/// otherwise OK.
pub fn predict_label(proba: &LabelDistribution, policy: ThresholdPolicy) -> AspectLabel {
    let top = proba.argmax();
    if proba.get(top) >= policy.tau {
        top
    } else {
        AspectLabel::Ok
    }
}

/// The overall rule engine: GOOD iff both inputs GOOD, BAD if either input
/// BAD, OK otherwise.
pub fn predict_overall(simplicity: AspectLabel, meaning: AspectLabel) -> AspectLabel {
    use AspectLabel::{Bad, Good, Ok};
    match (simplicity, meaning) {
        (Good, Good) => Good,
        (Bad, _) | (_, Bad) => Bad,
        _ => Ok,
    }
}
