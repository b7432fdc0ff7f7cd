//! The nine feature values computed per sentence pair, grouped into the
//! three per-aspect vectors that feed the classifiers.

use std::collections::{BTreeMap, HashMap};

use crate::corpus::{Aspect, Dataset, SentencePair};
use crate::error::{Error, Result};
use crate::resources::{
    avg_stem_frequency, count_cue_phrases, CuePhraseList, EmbeddingTable, FrequencyTable,
    NGramModel, SynonymLexicon,
};
use crate::textproc::{Preprocessor, TokenizedSentence};

pub const GRAMMATICALITY_FEATURES: [&str; 2] = ["loglik_per_token", "perplexity"];
pub const MEANING_FEATURES: [&str; 2] = ["embedding_similarity", "synonym_cosine"];
pub const SIMPLICITY_FEATURES: [&str; 6] = [
    "tfidf_cosine",
    "length_diff",
    "avg_word_len_diff",
    "regular_wiki_freq_diff",
    "simple_wiki_freq_diff",
    "cue_diff",
];

/// All ten feature names in dump order.
pub fn all_feature_names() -> Vec<&'static str> {
    GRAMMATICALITY_FEATURES
        .into_iter()
        .chain(MEANING_FEATURES)
        .chain(SIMPLICITY_FEATURES)
        .collect()
}

/// Named feature values for one aspect, in fixed order.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub aspect: Aspect,
    pub values: Vec<(String, f64)>,
}

impl FeatureVector {
    pub fn raw(&self) -> Vec<f64> {
        self.values.iter().map(|(_, v)| *v).collect()
    }

    pub fn names(&self) -> Vec<String> {
        self.values.iter().map(|(n, _)| n.clone()).collect()
    }
}

/// The three per-aspect feature vectors for one pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PairFeatures {
    pub pair_id: String,
    pub grammaticality: FeatureVector,
    pub meaning: FeatureVector,
    pub simplicity: FeatureVector,
}

impl PairFeatures {
    pub fn vector(&self, aspect: Aspect) -> &FeatureVector {
        match aspect {
            Aspect::Grammaticality => &self.grammaticality,
            Aspect::Meaning => &self.meaning,
            Aspect::Simplicity => &self.simplicity,
            Aspect::Overall => panic!("the overall aspect has no feature vector"),
        }
    }

    /// All ten values in dump order.
    pub fn all_values(&self) -> Vec<f64> {
        let mut out = self.grammaticality.raw();
        out.extend(self.meaning.raw());
        out.extend(self.simplicity.raw());
        out
    }
}

/// Cosine of two sparse vectors; 0 when either vector is all-zero.
///
/// The vectors are ordered maps so the floating-point accumulation order —
/// and therefore the result — is identical across runs and processes.
pub fn sparse_cosine(a: &BTreeMap<String, f64>, b: &BTreeMap<String, f64>) -> f64 {
    let dot: f64 = a
        .iter()
        .filter_map(|(k, va)| b.get(k).map(|vb| va * vb))
        .sum();
    let na: f64 = a.values().map(|v| v * v).sum::<f64>().sqrt();
    let nb: f64 = b.values().map(|v| v * v).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

fn dense_cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

/// Smoothed inverse document frequency over the dataset's sentences, each
/// sentence treated as a document: idf = ln((D+1)/(df+1)) + 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Idf {
    values: HashMap<String, f64>,
    n_docs: usize,
    /// Ids of the pairs whose sentences formed the document set. Recorded
    /// so evaluation can prove held-out pairs never leak into the IDF.
    source_pair_ids: Vec<String>,
}

impl Idf {
    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn source_pair_ids(&self) -> &[String] {
        &self.source_pair_ids
    }

    /// IDF weight of a stem; unseen stems get the df = 0 smoothing value.
    pub fn weight(&self, stem: &str) -> f64 {
        match self.values.get(stem) {
            Some(v) => *v,
            None => ((self.n_docs + 1) as f64).ln() + 1.0,
        }
    }

    /// Text serialization; weights use the shortest exact f64 rendering so
    /// a reload reproduces bit-identical cosines.
    pub fn to_text(&self) -> String {
        let mut out = format!("simpqe-idf v1 docs={}\n", self.n_docs);
        out.push_str("ids\t");
        out.push_str(&self.source_pair_ids.join(","));
        out.push('\n');
        let mut entries: Vec<(&String, &f64)> = self.values.iter().collect();
        entries.sort_by(|a, b| a.0.cmp(b.0));
        for (stem, weight) in entries {
            out.push_str(&format!("{stem}\t{weight}\n"));
        }
        out
    }

    pub fn save(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn from_text(text: &str, source: &str) -> Result<Idf> {
        let mut lines = text.lines().enumerate();
        let header = lines
            .next()
            .ok_or_else(|| Error::parse(source, 1, "empty IDF file"))?
            .1;
        let n_docs = header
            .strip_prefix("simpqe-idf v1 docs=")
            .and_then(|v| v.parse::<usize>().ok())
            .ok_or_else(|| Error::parse(source, 1, "expected 'simpqe-idf v1 docs=N' header"))?;
        let ids_line = lines
            .next()
            .ok_or_else(|| Error::parse(source, 2, "missing ids line"))?
            .1;
        let ids = ids_line
            .strip_prefix("ids\t")
            .ok_or_else(|| Error::parse(source, 2, "expected 'ids<TAB>...' line"))?;
        let source_pair_ids: Vec<String> = if ids.is_empty() {
            Vec::new()
        } else {
            ids.split(',').map(str::to_string).collect()
        };
        let mut values = HashMap::new();
        for (idx, line) in lines {
            let (stem, weight) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(source, idx + 1, "expected stem<TAB>weight"))?;
            let weight: f64 = weight
                .parse()
                .map_err(|_| Error::parse(source, idx + 1, format!("bad weight '{weight}'")))?;
            if values.insert(stem.to_string(), weight).is_some() {
                return Err(Error::parse(source, idx + 1, format!("duplicate stem '{stem}'")));
            }
        }
        Ok(Idf {
            values,
            n_docs,
            source_pair_ids,
        })
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Idf> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text, &path.display().to_string())
    }
}

/// Builds the IDF table from both sides of every supplied pair (D = 2·pairs).
pub fn build_idf<'a, I>(pairs: I, pre: &Preprocessor) -> Result<Idf>
where
    I: IntoIterator<Item = &'a SentencePair>,
{
    let mut df: HashMap<String, usize> = HashMap::new();
    let mut n_docs = 0usize;
    let mut source_pair_ids = Vec::new();
    for pair in pairs {
        source_pair_ids.push(pair.id.clone());
        for text in [&pair.original, &pair.simplified] {
            let sentence = pre.preprocess(text)?;
            let mut stems: Vec<&str> =
                sentence.content_tokens().map(|t| t.stem.as_str()).collect();
            stems.sort_unstable();
            stems.dedup();
            for stem in stems {
                *df.entry(stem.to_string()).or_insert(0) += 1;
            }
            n_docs += 1;
        }
    }
    if n_docs == 0 {
        return Err(Error::invalid("cannot build IDF from an empty dataset"));
    }
    let values = df
        .into_iter()
        .map(|(stem, d)| {
            let idf = ((n_docs + 1) as f64 / (d + 1) as f64).ln() + 1.0;
            (stem, idf)
        })
        .collect();
    Ok(Idf {
        values,
        n_docs,
        source_pair_ids,
    })
}

pub fn build_idf_for_dataset(ds: &Dataset, pre: &Preprocessor) -> Result<Idf> {
    build_idf(&ds.pairs, pre)
}

/// Log-likelihood per scored position and perplexity of the simplified
/// sentence under the language model.
pub fn feat_grammaticality(
    pair: &SentencePair,
    lm: &NGramModel,
    pre: &Preprocessor,
) -> Result<(f64, f64)> {
    let sentence = pre.preprocess(&pair.simplified)?;
    let tokens: Vec<String> = sentence.tokens.iter().map(|t| t.lower.clone()).collect();
    if tokens.is_empty() {
        return Err(Error::invalid(format!(
            "pair '{}': simplified sentence is empty after tokenization",
            pair.id
        )));
    }
    let loglik = lm.sentence_loglik(&tokens);
    let positions = lm.scored_positions(tokens.len()) as f64;
    let perplexity = lm.perplexity(&tokens)?;
    Ok((loglik / positions, perplexity))
}

fn embedded_vectors<'a>(
    sentence: &TokenizedSentence,
    emb: &'a EmbeddingTable,
) -> Vec<&'a [f64]> {
    sentence
        .tokens
        .iter()
        .filter(|t| !t.is_punct)
        .filter_map(|t| emb.get(&t.lower))
        .collect()
}

/// Mean pairwise cosine between all (original word, simplified word) vector
/// pairs; stopwords retained, punctuation and OOV words dropped. 0 when
/// either side has no vectors.
pub fn feat_embedding_similarity(
    pair: &SentencePair,
    emb: &EmbeddingTable,
    pre: &Preprocessor,
) -> Result<f64> {
    let original = pre.preprocess(&pair.original)?;
    let simplified = pre.preprocess(&pair.simplified)?;
    let o = embedded_vectors(&original, emb);
    let s = embedded_vectors(&simplified, emb);
    if o.is_empty() || s.is_empty() {
        return Ok(0.0);
    }
    let mut sum = 0.0;
    for vo in &o {
        for vs in &s {
            sum += dense_cosine(vo, vs);
        }
    }
    Ok(sum / (o.len() * s.len()) as f64)
}

fn synonym_expanded_vector(
    sentence: &TokenizedSentence,
    syn: &SynonymLexicon,
) -> BTreeMap<String, f64> {
    let mut vector: BTreeMap<String, f64> = BTreeMap::new();
    for token in sentence.tokens.iter().filter(|t| !t.is_punct) {
        *vector.entry(token.lower.clone()).or_insert(0.0) += 1.0;
        if token.pos.is_open_class() {
            for s in syn.synonyms(&token.lower, token.pos) {
                *vector.entry(s.to_string()).or_insert(0.0) += 1.0;
            }
        }
    }
    vector
}

/// Cosine of the two synonym-expanded term-count vectors.
pub fn feat_synonym_cosine(
    pair: &SentencePair,
    syn: &SynonymLexicon,
    pre: &Preprocessor,
) -> Result<f64> {
    let original = pre.preprocess(&pair.original)?;
    let simplified = pre.preprocess(&pair.simplified)?;
    Ok(sparse_cosine(
        &synonym_expanded_vector(&original, syn),
        &synonym_expanded_vector(&simplified, syn),
    ))
}

fn tfidf_vector(sentence: &TokenizedSentence, idf: &Idf) -> BTreeMap<String, f64> {
    let mut tf: BTreeMap<String, f64> = BTreeMap::new();
    for token in sentence.content_tokens() {
        *tf.entry(token.stem.clone()).or_insert(0.0) += 1.0;
    }
    for (stem, value) in tf.iter_mut() {
        *value *= idf.weight(stem);
    }
    tf
}

/// Cosine of the two tf·idf stem vectors.
pub fn feat_tfidf_cosine(pair: &SentencePair, idf: &Idf, pre: &Preprocessor) -> Result<f64> {
    let original = pre.preprocess(&pair.original)?;
    let simplified = pre.preprocess(&pair.simplified)?;
    Ok(sparse_cosine(
        &tfidf_vector(&original, idf),
        &tfidf_vector(&simplified, idf),
    ))
}

/// Signed open-class word count difference, original minus simplified.
pub fn feat_length_diff(pair: &SentencePair, pre: &Preprocessor) -> Result<i64> {
    let original = pre.preprocess(&pair.original)?;
    let simplified = pre.preprocess(&pair.simplified)?;
    Ok(original.open_class_count() as i64 - simplified.open_class_count() as i64)
}

fn avg_word_len(sentence: &TokenizedSentence) -> f64 {
    let lens: Vec<usize> = sentence
        .tokens
        .iter()
        .filter(|t| !t.is_punct)
        .map(|t| t.surface.chars().count())
        .collect();
    if lens.is_empty() {
        0.0
    } else {
        lens.iter().sum::<usize>() as f64 / lens.len() as f64
    }
}

/// Mean character count difference over non-punctuation tokens.
pub fn feat_avg_word_len_diff(pair: &SentencePair, pre: &Preprocessor) -> Result<f64> {
    let original = pre.preprocess(&pair.original)?;
    let simplified = pre.preprocess(&pair.simplified)?;
    Ok(avg_word_len(&original) - avg_word_len(&simplified))
}

/// Average stem frequency difference under a frequency table.
pub fn feat_freq_diff(
    pair: &SentencePair,
    table: &FrequencyTable,
    pre: &Preprocessor,
) -> Result<f64> {
    let original = pre.preprocess(&pair.original)?;
    let simplified = pre.preprocess(&pair.simplified)?;
    Ok(avg_stem_frequency(&original, table) - avg_stem_frequency(&simplified, table))
}

/// Signed cue-phrase count difference, original minus simplified.
pub fn feat_cue_diff(
    pair: &SentencePair,
    cues: &CuePhraseList,
    pre: &Preprocessor,
) -> Result<i64> {
    let original = pre.preprocess(&pair.original)?;
    let simplified = pre.preprocess(&pair.simplified)?;
    Ok(count_cue_phrases(&original, cues) as i64 - count_cue_phrases(&simplified, cues) as i64)
}

/// The immutable resource bundle shared by all feature extraction.
pub struct Resources {
    pub lm: NGramModel,
    pub embeddings: EmbeddingTable,
    pub synonyms: SynonymLexicon,
    pub regular_freq: FrequencyTable,
    pub simple_freq: FrequencyTable,
    pub cues: CuePhraseList,
}

/// Computes full feature vectors against a resource bundle and an IDF table.
///
/// The IDF is kept separate from [`Resources`] because cross-validation
/// rebuilds it from training folds only.
pub struct FeatureExtractor<'a> {
    pub resources: &'a Resources,
    pub pre: &'a Preprocessor,
    pub idf: Idf,
}

impl<'a> FeatureExtractor<'a> {
    pub fn new(resources: &'a Resources, pre: &'a Preprocessor, idf: Idf) -> Self {
        FeatureExtractor {
            resources,
            pre,
            idf,
        }
    }

    /// Computes all nine features and assembles the three aspect vectors.
    pub fn assemble(&self, pair: &SentencePair) -> Result<PairFeatures> {
        let r = self.resources;
        let (loglik_per_token, perplexity) = feat_grammaticality(pair, &r.lm, self.pre)?;
        let embedding_similarity = feat_embedding_similarity(pair, &r.embeddings, self.pre)?;
        let synonym_cosine = feat_synonym_cosine(pair, &r.synonyms, self.pre)?;
        let tfidf_cosine = feat_tfidf_cosine(pair, &self.idf, self.pre)?;
        let length_diff = feat_length_diff(pair, self.pre)? as f64;
        let avg_word_len_diff = feat_avg_word_len_diff(pair, self.pre)?;
        let regular_diff = feat_freq_diff(pair, &r.regular_freq, self.pre)?;
        let simple_diff = feat_freq_diff(pair, &r.simple_freq, self.pre)?;
        let cue_diff = feat_cue_diff(pair, &r.cues, self.pre)? as f64;

        let named = |names: &[&str], values: Vec<f64>, aspect| FeatureVector {
            aspect,
            values: names
                .iter()
                .map(|n| n.to_string())
                .zip(values)
                .collect(),
        };
        Ok(PairFeatures {
            pair_id: pair.id.clone(),
            grammaticality: named(
                &GRAMMATICALITY_FEATURES,
                vec![loglik_per_token, perplexity],
                Aspect::Grammaticality,
            ),
            meaning: named(
                &MEANING_FEATURES,
                vec![embedding_similarity, synonym_cosine],
                Aspect::Meaning,
            ),
            simplicity: named(
                &SIMPLICITY_FEATURES,
                vec![
                    tfidf_cosine,
                    length_diff,
                    avg_word_len_diff,
                    regular_diff,
                    simple_diff,
                    cue_diff,
                ],
                Aspect::Simplicity,
            ),
        })
    }

    /// Extracts features for every pair, preserving dataset order.
    pub fn assemble_all(&self, pairs: &[SentencePair]) -> Result<Vec<PairFeatures>> {
        use rayon::prelude::*;
        pairs.par_iter().map(|p| self.assemble(p)).collect()
    }
}

/// Renders the feature dump TSV: `pair_id` plus the ten feature columns,
/// values with 10 significant digits.
pub fn features_to_tsv(features: &[PairFeatures]) -> String {
    let mut out = String::from("pair_id");
    for name in all_feature_names() {
        out.push('\t');
        out.push_str(name);
    }
    out.push('\n');
    for pf in features {
        out.push_str(&pf.pair_id);
        for v in pf.all_values() {
            out.push('\t');
            out.push_str(&format!("{v:.9e}"));
        }
        out.push('\n');
    }
    out
}
