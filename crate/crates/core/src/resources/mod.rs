//! Corpus-derived resources: n-gram language model, word embeddings,
//! synonym lexicon, stem-frequency tables and the cue-phrase inventory.

mod cues;
mod embeddings;
mod freq;
mod ngram;
mod synonyms;

pub use cues::{count_cue_phrases, CuePhraseList};
pub use embeddings::EmbeddingTable;
pub use freq::{avg_stem_frequency, FrequencyTable};
pub use ngram::{NGramModel, DEFAULT_BACKOFF_ALPHA, END_MARKER, START_MARKER};
pub use synonyms::SynonymLexicon;
