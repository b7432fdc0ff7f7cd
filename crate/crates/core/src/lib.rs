//! Quality estimation for automatic text simplification.
//!
//! Given a pair of an original and a simplified English sentence, this crate
//! predicts good/ok/bad quality labels along four aspects: grammaticality,
//! meaning preservation, simplicity, and an overall judgment. The pipeline
//! is fully deterministic and self-contained:
//!
//! * [`textproc`] — tokenizer, Porter stemmer, heuristic POS tagger,
//!   stopword handling.
//! * [`resources`] — n-gram language model with stupid backoff, word
//!   embeddings, synonym lexicon, word-frequency tables, cue-phrase list.
//! * [`features`] — the nine per-pair features grouped by aspect, plus
//!   TF-IDF bookkeeping.
//! * [`model`] — from-scratch random forests (CART + Gini), the confidence
//!   threshold policy, and the rule engine that derives the overall label.
//! * [`corpus`] — dataset I/O, label mapping, stratified k-fold splits.
//! * [`evaluation`] — accuracy/MAE/RMSE, cross-validation, result tables.

pub mod corpus;
pub mod error;
pub mod evaluation;
pub mod features;
pub mod model;
pub mod resources;
pub mod textproc;

pub use corpus::{
    dataset_stats, label_to_score, load_dataset, save_dataset, score_to_label,
    stratified_kfold, Aspect, AspectLabel, Dataset, SentencePair,
};
pub use error::{Error, Result};
pub use evaluation::{
    accuracy, cross_validate, mae, render_report, rmse, CvConfig, CvOutcome,
    EvaluationReport,
};
pub use features::{build_idf, build_idf_for_dataset, FeatureExtractor, PairFeatures, Resources};
pub use model::{
    predict_label, predict_overall, train_forest, ForestParams, RandomForest, ThresholdPolicy,
};
pub use resources::{
    CuePhraseList, EmbeddingTable, FrequencyTable, NGramModel, SynonymLexicon,
};
pub use textproc::{porter_stem, tokenize, Preprocessor};
