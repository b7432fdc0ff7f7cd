//! Count-based n-gram language model with stupid backoff scoring.

use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};

pub const START_MARKER: &str = "<s>";
pub const END_MARKER: &str = "</s>";
pub const DEFAULT_BACKOFF_ALPHA: f64 = 0.4;

/// Order-n count tables plus the corpus totals needed for backoff scoring.
///
/// Scores are stupid backoff scores, not a normalized distribution; the
/// perplexity transform is applied to them as-is.
#[derive(Debug, Clone, PartialEq)]
pub struct NGramModel {
    order: usize,
    backoff_alpha: f64,
    /// `counts[l]` maps (l+1)-grams to counts.
    counts: Vec<HashMap<Vec<String>, u64>>,
    total_unigrams: u64,
    vocab_size: u64,
}

impl NGramModel {
    /// Counts all n-grams of sizes 1..=order over the sentence stream.
    ///
    /// For order >= 2 each sentence is padded with order-1 start markers and
    /// one end marker; an order-1 model uses the raw tokens.
    pub fn train<I, S>(sentences: I, order: usize) -> Result<NGramModel>
    where
        I: IntoIterator<Item = Vec<S>>,
        S: Into<String>,
    {
        if order < 1 {
            return Err(Error::invalid("n-gram order must be >= 1"));
        }
        let mut counts: Vec<HashMap<Vec<String>, u64>> = vec![HashMap::new(); order];
        let mut nonempty = false;
        for sentence in sentences {
            let tokens: Vec<String> = sentence.into_iter().map(Into::into).collect();
            if tokens.is_empty() {
                continue;
            }
            nonempty = true;
            let padded = pad(&tokens, order);
            for n in 1..=order {
                for gram in padded.windows(n) {
                    *counts[n - 1].entry(gram.to_vec()).or_insert(0) += 1;
                }
            }
        }
        if !nonempty {
            return Err(Error::invalid("cannot train an n-gram model on an empty corpus"));
        }
        let total_unigrams = counts[0].values().sum();
        let vocab_size = counts[0].len() as u64;
        Ok(NGramModel {
            order,
            backoff_alpha: DEFAULT_BACKOFF_ALPHA,
            counts,
            total_unigrams,
            vocab_size,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn total_unigrams(&self) -> u64 {
        self.total_unigrams
    }

    pub fn vocab_size(&self) -> u64 {
        self.vocab_size
    }

    pub fn backoff_alpha(&self) -> f64 {
        self.backoff_alpha
    }

    /// Count of grams stored at each level, level 1 first.
    pub fn level_sizes(&self) -> Vec<usize> {
        self.counts.iter().map(HashMap::len).collect()
    }

    fn count(&self, gram: &[String]) -> u64 {
        self.counts
            .get(gram.len() - 1)
            .and_then(|m| m.get(gram))
            .copied()
            .unwrap_or(0)
    }

    /// Stupid backoff score of `word` after `context`; always positive.
    ///
    /// Seen (context, word) pairs score the maximum-likelihood ratio; unseen
    /// pairs back off to a shorter context with multiplicative penalty
    /// alpha; out-of-vocabulary words floor at 1/(N + |V| + 1).
    pub fn backoff_score(&self, context: &[String], word: &str) -> f64 {
        let mut penalty = 1.0;
        let mut context = context;
        loop {
            if context.is_empty() {
                let c = self.count(std::slice::from_ref(&word.to_string()));
                let base = if c > 0 {
                    c as f64 / self.total_unigrams as f64
                } else {
                    1.0 / (self.total_unigrams + self.vocab_size + 1) as f64
                };
                return penalty * base;
            }
            let mut gram = context.to_vec();
            gram.push(word.to_string());
            let joint = self.count(&gram);
            if joint > 0 {
                let ctx = self.count(context);
                return penalty * joint as f64 / ctx as f64;
            }
            penalty *= self.backoff_alpha;
            context = &context[1..];
        }
    }

    /// Sum of log10 backoff scores over the scored positions of `tokens`
    /// (tokens plus the end marker when order >= 2).
    pub fn sentence_loglik(&self, tokens: &[String]) -> f64 {
        let padded = pad(tokens, self.order);
        let first = self.order - 1;
        let mut loglik = 0.0;
        for i in first..padded.len() {
            let context = &padded[i.saturating_sub(self.order - 1)..i];
            loglik += self.backoff_score(context, &padded[i]).log10();
        }
        loglik
    }

    /// Number of scored positions for a sentence of `n` tokens.
    pub fn scored_positions(&self, n: usize) -> usize {
        if self.order >= 2 {
            n + 1
        } else {
            n
        }
    }

    /// 10^(-loglik / T) where T is the number of scored positions.
    pub fn perplexity(&self, tokens: &[String]) -> Result<f64> {
        if tokens.is_empty() {
            return Err(Error::invalid("cannot compute perplexity of an empty sentence"));
        }
        let t = self.scored_positions(tokens.len()) as f64;
        Ok(10f64.powf(-self.sentence_loglik(tokens) / t))
    }

    /// Versioned text serialization; output is byte-identical for equal models.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "simpqe-ngram v1 order={} alpha={} N={} V={}\n",
            self.order, self.backoff_alpha, self.total_unigrams, self.vocab_size
        );
        for (level, table) in self.counts.iter().enumerate() {
            let mut entries: Vec<(&Vec<String>, &u64)> = table.iter().collect();
            entries.sort();
            for (gram, count) in entries {
                out.push_str(&format!("{}\t{}\t{}\n", level + 1, gram.join(" "), count));
            }
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn from_text(text: &str, source: &str) -> Result<NGramModel> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::parse(source, 1, "empty model file"))?;
        let mut order = None;
        let mut alpha = None;
        let mut n_total = None;
        let mut vocab = None;
        let mut parts = header.split_whitespace();
        if parts.next() != Some("simpqe-ngram") || parts.next() != Some("v1") {
            return Err(Error::parse(source, 1, "expected 'simpqe-ngram v1' header"));
        }
        for part in parts {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::parse(source, 1, format!("bad header field '{part}'")))?;
            let err = || Error::parse(source, 1, format!("bad header value '{value}'"));
            match key {
                "order" => order = Some(value.parse::<usize>().map_err(|_| err())?),
                "alpha" => alpha = Some(value.parse::<f64>().map_err(|_| err())?),
                "N" => n_total = Some(value.parse::<u64>().map_err(|_| err())?),
                "V" => vocab = Some(value.parse::<u64>().map_err(|_| err())?),
                other => return Err(Error::parse(source, 1, format!("unknown header key '{other}'"))),
            }
        }
        let (Some(order), Some(alpha), Some(n_total), Some(vocab)) =
            (order, alpha, n_total, vocab)
        else {
            return Err(Error::parse(source, 1, "incomplete model header"));
        };
        if order < 1 {
            return Err(Error::parse(source, 1, "order must be >= 1"));
        }
        let mut counts: Vec<HashMap<Vec<String>, u64>> = vec![HashMap::new(); order];
        for (idx, line) in lines {
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 3 {
                return Err(Error::parse(source, idx + 1, "expected 'level<TAB>gram<TAB>count'"));
            }
            let level: usize = cols[0]
                .parse()
                .map_err(|_| Error::parse(source, idx + 1, "bad level"))?;
            if level < 1 || level > order {
                return Err(Error::parse(source, idx + 1, format!("level {level} out of range")));
            }
            let gram: Vec<String> = cols[1].split(' ').map(str::to_string).collect();
            if gram.len() != level {
                return Err(Error::parse(source, idx + 1, "gram length does not match level"));
            }
            let count: u64 = cols[2]
                .parse()
                .map_err(|_| Error::parse(source, idx + 1, "bad count"))?;
            if count == 0 {
                return Err(Error::parse(source, idx + 1, "zero count"));
            }
            counts[level - 1].insert(gram, count);
        }
        let model = NGramModel {
            order,
            backoff_alpha: alpha,
            counts,
            total_unigrams: n_total,
            vocab_size: vocab,
        };
        let actual_n: u64 = model.counts[0].values().sum();
        if actual_n != n_total || model.counts[0].len() as u64 != vocab {
            return Err(Error::parse(
                source,
                1,
                "header totals disagree with stored unigram counts",
            ));
        }
        Ok(model)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<NGramModel> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text, &path.display().to_string())
    }
}

fn pad(tokens: &[String], order: usize) -> Vec<String> {
    if order < 2 {
        return tokens.to_vec();
    }
    let mut padded = Vec::with_capacity(tokens.len() + order);
    padded.extend(std::iter::repeat(START_MARKER.to_string()).take(order - 1));
    padded.extend(tokens.iter().cloned());
    padded.push(END_MARKER.to_string());
    padded
}
