//! Metrics, confusion matrices, k-fold cross-validation orchestration and
//! result-table rendering.

use std::collections::HashMap;

use crate::corpus::{label_to_score, stratified_kfold, Aspect, AspectLabel, Dataset};
use crate::error::{Error, Result};
use crate::features::{build_idf, FeatureExtractor, PairFeatures, Resources};
use crate::model::{
    predict_label, predict_overall, train_forest, ForestParams, LabelDistribution,
    ThresholdPolicy,
};
use crate::textproc::Preprocessor;

/// 3x3 gold-by-predicted count matrix in [`AspectLabel::ALL`] order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConfusionMatrix(pub [[u64; 3]; 3]);

impl ConfusionMatrix {
    pub fn count(&self, gold: AspectLabel, pred: AspectLabel) -> u64 {
        self.0[gold.index()][pred.index()]
    }

    pub fn total(&self) -> u64 {
        self.0.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..3).map(|i| self.0[i][i]).sum()
    }

    pub fn gold_marginal(&self, label: AspectLabel) -> u64 {
        self.0[label.index()].iter().sum()
    }

    pub fn pred_marginal(&self, label: AspectLabel) -> u64 {
        self.0.iter().map(|row| row[label.index()]).sum()
    }
}

fn check_lengths(gold: &[AspectLabel], pred: &[AspectLabel]) -> Result<()> {
    if gold.len() != pred.len() {
        return Err(Error::invalid(format!(
            "gold ({}) and predicted ({}) label counts differ",
            gold.len(),
            pred.len()
        )));
    }
    if gold.is_empty() {
        return Err(Error::invalid("cannot evaluate zero predictions"));
    }
    Ok(())
}

/// Percentage of exact label matches.
pub fn accuracy(gold: &[AspectLabel], pred: &[AspectLabel]) -> Result<f64> {
    check_lengths(gold, pred)?;
    let matches = gold.iter().zip(pred).filter(|(g, p)| g == p).count();
    Ok(100.0 * matches as f64 / gold.len() as f64)
}

/// Mean absolute error under the 0/50/100 label scoring.
pub fn mae(gold: &[AspectLabel], pred: &[AspectLabel]) -> Result<f64> {
    check_lengths(gold, pred)?;
    let sum: f64 = gold
        .iter()
        .zip(pred)
        .map(|(g, p)| (label_to_score(*g) - label_to_score(*p)).abs())
        .sum();
    Ok(sum / gold.len() as f64)
}

/// Root mean squared error under the 0/50/100 label scoring.
pub fn rmse(gold: &[AspectLabel], pred: &[AspectLabel]) -> Result<f64> {
    check_lengths(gold, pred)?;
    let sum: f64 = gold
        .iter()
        .zip(pred)
        .map(|(g, p)| {
            let d = label_to_score(*g) - label_to_score(*p);
            d * d
        })
        .sum();
    Ok((sum / gold.len() as f64).sqrt())
}

/// Per-run metrics plus the confusion matrix they derive from.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub aspect: Aspect,
    pub run_name: String,
    pub accuracy_pct: f64,
    pub mae: f64,
    pub rmse: f64,
    pub confusion: ConfusionMatrix,
    pub n: usize,
}

impl EvaluationReport {
    pub fn from_labels(
        aspect: Aspect,
        run_name: impl Into<String>,
        gold: &[AspectLabel],
        pred: &[AspectLabel],
    ) -> Result<EvaluationReport> {
        let accuracy_pct = accuracy(gold, pred)?;
        let mut confusion = ConfusionMatrix::default();
        for (g, p) in gold.iter().zip(pred) {
            confusion.0[g.index()][p.index()] += 1;
        }
        Ok(EvaluationReport {
            aspect,
            run_name: run_name.into(),
            accuracy_pct,
            mae: mae(gold, pred)?,
            rmse: rmse(gold, pred)?,
            confusion,
            n: gold.len(),
        })
    }
}

/// One prediction for one pair under one aspect.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionRow {
    pub pair_id: String,
    pub aspect: Aspect,
    pub gold: Option<AspectLabel>,
    pub pred: AspectLabel,
    pub proba: LabelDistribution,
}

/// Per-fold outcome, including the id bookkeeping that proves training-fold
/// hygiene.
#[derive(Debug, Clone)]
pub struct FoldReport {
    pub report: EvaluationReport,
    pub train_ids: Vec<String>,
    pub test_ids: Vec<String>,
    /// Pair ids whose sentences entered the fold's IDF document set.
    pub idf_pair_ids: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct CvOutcome {
    pub pooled: EvaluationReport,
    pub folds: Vec<FoldReport>,
    pub predictions: Vec<PredictionRow>,
}

#[derive(Debug, Clone)]
pub struct CvConfig {
    pub k: usize,
    pub seed: u64,
    pub params: ForestParams,
    pub policy: ThresholdPolicy,
}

fn forest_seed(base: u64, fold: usize, aspect: Aspect) -> u64 {
    let aspect_idx = Aspect::ALL.iter().position(|a| *a == aspect).unwrap() as u64;
    base.wrapping_add(
        ((fold as u64) * 4 + aspect_idx + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15),
    )
}

fn fit_and_predict(
    train: &[&PairFeatures],
    test: &[&PairFeatures],
    labels: &HashMap<&str, AspectLabel>,
    aspect: Aspect,
    params: &ForestParams,
    seed: u64,
) -> Result<Vec<LabelDistribution>> {
    let x: Vec<Vec<f64>> = train.iter().map(|f| f.vector(aspect).raw()).collect();
    let y: Vec<AspectLabel> = train
        .iter()
        .map(|f| {
            labels.get(f.pair_id.as_str()).copied().ok_or_else(|| {
                Error::invalid(format!("pair '{}' has no {aspect} label", f.pair_id))
            })
        })
        .collect::<Result<_>>()?;
    let names = train[0].vector(aspect).names();
    let forest = train_forest(&x, &y, &names, aspect, params, seed)?;
    test.iter()
        .map(|f| forest.predict_proba(&f.vector(aspect).raw()))
        .collect()
}

/// K-fold cross-validation. Each fold trains on the remaining folds only,
/// including the IDF document set, then predicts the held-out fold. The
/// OVERALL aspect is derived from fold-internal simplicity and meaning
/// models through the rule engine, never trained directly.
pub fn cross_validate(
    ds: &Dataset,
    resources: &Resources,
    pre: &Preprocessor,
    aspect: Aspect,
    cfg: &CvConfig,
) -> Result<CvOutcome> {
    let folds = stratified_kfold(ds, aspect, cfg.k, cfg.seed)?;
    let pair_by_id: HashMap<&str, &crate::corpus::SentencePair> =
        ds.pairs.iter().map(|p| (p.id.as_str(), p)).collect();

    let mut fold_reports = Vec::with_capacity(folds.len());
    let mut predictions = Vec::new();
    let mut pooled_gold = Vec::new();
    let mut pooled_pred = Vec::new();

    for (fold_idx, test_ids) in folds.iter().enumerate() {
        let test_set: std::collections::HashSet<&str> =
            test_ids.iter().map(String::as_str).collect();
        let train_pairs: Vec<&crate::corpus::SentencePair> = ds
            .pairs
            .iter()
            .filter(|p| !test_set.contains(p.id.as_str()))
            .collect();
        let test_pairs: Vec<&crate::corpus::SentencePair> = test_ids
            .iter()
            .map(|id| pair_by_id[id.as_str()])
            .collect();

        let idf = build_idf(train_pairs.iter().copied(), pre)?;
        let idf_pair_ids = idf.source_pair_ids().to_vec();
        let extractor = FeatureExtractor::new(resources, pre, idf);
        let train_feats: Vec<PairFeatures> = train_pairs
            .iter()
            .map(|p| extractor.assemble(p))
            .collect::<Result<_>>()?;
        let test_feats: Vec<PairFeatures> = test_pairs
            .iter()
            .map(|p| extractor.assemble(p))
            .collect::<Result<_>>()?;
        let train_refs: Vec<&PairFeatures> = train_feats.iter().collect();
        let test_refs: Vec<&PairFeatures> = test_feats.iter().collect();

        let labels_for = |a: Aspect| -> HashMap<&str, AspectLabel> {
            ds.pairs
                .iter()
                .filter_map(|p| p.label(a).map(|l| (p.id.as_str(), l)))
                .collect()
        };

        let fold_preds: Vec<(AspectLabel, LabelDistribution)> = if aspect == Aspect::Overall {
            let simp = fit_and_predict(
                &train_refs,
                &test_refs,
                &labels_for(Aspect::Simplicity),
                Aspect::Simplicity,
                &cfg.params,
                forest_seed(cfg.seed, fold_idx, Aspect::Simplicity),
            )?;
            let mean = fit_and_predict(
                &train_refs,
                &test_refs,
                &labels_for(Aspect::Meaning),
                Aspect::Meaning,
                &cfg.params,
                forest_seed(cfg.seed, fold_idx, Aspect::Meaning),
            )?;
            simp.iter()
                .zip(&mean)
                .map(|(s, m)| {
                    let label = predict_overall(
                        predict_label(s, cfg.policy),
                        predict_label(m, cfg.policy),
                    );
                    let mut onehot = [0.0; 3];
                    onehot[label.index()] = 1.0;
                    (label, LabelDistribution(onehot))
                })
                .collect()
        } else {
            fit_and_predict(
                &train_refs,
                &test_refs,
                &labels_for(aspect),
                aspect,
                &cfg.params,
                forest_seed(cfg.seed, fold_idx, aspect),
            )?
            .into_iter()
            .map(|proba| (predict_label(&proba, cfg.policy), proba))
            .collect()
        };

        let mut fold_gold = Vec::new();
        let mut fold_pred = Vec::new();
        for (pair, (pred, proba)) in test_pairs.iter().zip(&fold_preds) {
            let gold = pair.label(aspect).ok_or_else(|| {
                Error::invalid(format!("pair '{}' has no {aspect} label", pair.id))
            })?;
            fold_gold.push(gold);
            fold_pred.push(*pred);
            predictions.push(PredictionRow {
                pair_id: pair.id.clone(),
                aspect,
                gold: Some(gold),
                pred: *pred,
                proba: *proba,
            });
        }
        pooled_gold.extend(&fold_gold);
        pooled_pred.extend(&fold_pred);

        fold_reports.push(FoldReport {
            report: EvaluationReport::from_labels(
                aspect,
                format!("fold{fold_idx}"),
                &fold_gold,
                &fold_pred,
            )?,
            train_ids: train_pairs.iter().map(|p| p.id.clone()).collect(),
            test_ids: test_ids.clone(),
            idf_pair_ids,
        });
    }

    let run_name = format!("{}-rf-{}", aspect, cfg.policy.tau());
    let pooled = EvaluationReport::from_labels(aspect, run_name, &pooled_gold, &pooled_pred)?;
    Ok(CvOutcome {
        pooled,
        folds: fold_reports,
        predictions,
    })
}

const SCORE_FOOTER: &str = "labels scored as bad=0, ok=50, good=100 for MAE/RMSE";

/// Renders an aligned result table, one row per run.
pub fn render_report(reports: &[EvaluationReport]) -> String {
    let name_width = reports
        .iter()
        .map(|r| r.run_name.len())
        .chain(std::iter::once("System Name".len()))
        .max()
        .unwrap();
    let mut out = format!(
        "{:<name_width$}  {:>9}  {:>7}  {:>7}\n",
        "System Name", "Accuracy", "MAE", "RMSE"
    );
    for r in reports {
        out.push_str(&format!(
            "{:<name_width$}  {:>8.2}%  {:>7.2}  {:>7.2}\n",
            r.run_name, r.accuracy_pct, r.mae, r.rmse
        ));
    }
    if !reports.is_empty() {
        out.push_str(&format!("({SCORE_FOOTER})\n"));
    }
    out
}

/// Machine-readable variant of the result table.
pub fn report_to_tsv(reports: &[EvaluationReport]) -> String {
    let mut out = String::from("system\taspect\taccuracy_pct\tmae\trmse\tn\n");
    for r in reports {
        out.push_str(&format!(
            "{}\t{}\t{:.2}\t{:.2}\t{:.2}\t{}\n",
            r.run_name, r.aspect, r.accuracy_pct, r.mae, r.rmse, r.n
        ));
    }
    out
}

/// Predictions dump: `pair_id aspect gold pred p_good p_ok p_bad`.
pub fn predictions_to_tsv(rows: &[PredictionRow]) -> String {
    let mut out = String::from("pair_id\taspect\tgold\tpred\tp_good\tp_ok\tp_bad\n");
    for row in rows {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{:.6}\t{:.6}\t{:.6}\n",
            row.pair_id,
            row.aspect,
            row.gold.map_or(String::new(), |g| g.to_string()),
            row.pred,
            row.proba.get(AspectLabel::Good),
            row.proba.get(AspectLabel::Ok),
            row.proba.get(AspectLabel::Bad),
        ));
    }
    out
}

/// Parses the predictions dump format written by [`predictions_to_tsv`].
pub fn parse_predictions_tsv(text: &str, source: &str) -> Result<Vec<PredictionRow>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == "pair_id\taspect\tgold\tpred\tp_good\tp_ok\tp_bad" => {}
        Some((_, h)) => {
            return Err(Error::parse(source, 1, format!("unexpected header '{h}'")))
        }
        None => return Err(Error::parse(source, 1, "empty predictions file")),
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 7 {
            return Err(Error::parse(
                source,
                idx + 1,
                format!("expected 7 columns, found {}", cols.len()),
            ));
        }
        let parse_label = |s: &str| -> Result<AspectLabel> {
            s.parse()
                .map_err(|_| Error::parse(source, idx + 1, format!("bad label '{s}'")))
        };
        let parse_p = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|_| Error::parse(source, idx + 1, format!("bad probability '{s}'")))
        };
        rows.push(PredictionRow {
            pair_id: cols[0].to_string(),
            aspect: cols[1]
                .parse()
                .map_err(|_| Error::parse(source, idx + 1, format!("bad aspect '{}'", cols[1])))?,
            gold: if cols[2].is_empty() {
                None
            } else {
                Some(parse_label(cols[2])?)
            },
            pred: parse_label(cols[3])?,
            proba: LabelDistribution([parse_p(cols[4])?, parse_p(cols[5])?, parse_p(cols[6])?]),
        });
    }
    Ok(rows)
}
