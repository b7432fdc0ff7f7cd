//! Stem-frequency tables over stopword-filtered, stemmed corpora.

use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::textproc::{Preprocessor, TokenizedSentence};

#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyTable {
    counts: HashMap<String, u64>,
    total: u64,
    source_name: String,
}

impl FrequencyTable {
    /// Counts stems of non-stopword, non-punctuation tokens over the lines
    /// of a corpus. An empty corpus yields an empty table with total 0.
    pub fn build<'a, I>(lines: I, name: &str, pre: &Preprocessor) -> Result<FrequencyTable>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut counts: HashMap<String, u64> = HashMap::new();
        let mut total = 0u64;
        for line in lines {
            let sentence = pre.preprocess(line)?;
            for token in sentence.content_tokens() {
                *counts.entry(token.stem.clone()).or_insert(0) += 1;
                total += 1;
            }
        }
        Ok(FrequencyTable {
            counts,
            total,
            source_name: name.to_string(),
        })
    }

    pub fn count(&self, stem: &str) -> u64 {
        self.counts.get(stem).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn source_name(&self) -> &str {
        &self.source_name
    }

    pub fn distinct_stems(&self) -> usize {
        self.counts.len()
    }

    /// Versioned text serialization; byte-identical for equal tables.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "simpqe-freq v1 total={} name={}\n",
            self.total, self.source_name
        );
        let mut entries: Vec<(&String, &u64)> = self.counts.iter().collect();
        entries.sort();
        for (stem, count) in entries {
            out.push_str(&format!("{stem}\t{count}\n"));
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn from_text(text: &str, source: &str) -> Result<FrequencyTable> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::parse(source, 1, "empty frequency table file"))?;
        let mut parts = header.split_whitespace();
        if parts.next() != Some("simpqe-freq") || parts.next() != Some("v1") {
            return Err(Error::parse(source, 1, "expected 'simpqe-freq v1' header"));
        }
        let mut total = None;
        let mut name = None;
        for part in parts {
            match part.split_once('=') {
                Some(("total", v)) => {
                    total = Some(v.parse::<u64>().map_err(|_| {
                        Error::parse(source, 1, format!("bad total '{v}'"))
                    })?)
                }
                Some(("name", v)) => name = Some(v.to_string()),
                _ => return Err(Error::parse(source, 1, format!("bad header field '{part}'"))),
            }
        }
        let (Some(total), Some(name)) = (total, name) else {
            return Err(Error::parse(source, 1, "incomplete header"));
        };
        let mut counts = HashMap::new();
        for (idx, line) in lines {
            if line.is_empty() {
                continue;
            }
            let (stem, count) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(source, idx + 1, "expected 'stem<TAB>count'"))?;
            let count: u64 = count
                .parse()
                .map_err(|_| Error::parse(source, idx + 1, "bad count"))?;
            if count == 0 {
                return Err(Error::parse(source, idx + 1, "zero count"));
            }
            counts.insert(stem.to_string(), count);
        }
        let actual: u64 = counts.values().sum();
        if actual != total {
            return Err(Error::parse(
                source,
                1,
                format!("header total {total} disagrees with stored counts {actual}"),
            ));
        }
        Ok(FrequencyTable {
            counts,
            total,
            source_name: name,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<FrequencyTable> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text, &path.display().to_string())
    }
}

/// Mean table count over the sentence's content-token stems; absent stems
/// count 0, and a sentence with no content tokens scores 0.
pub fn avg_stem_frequency(sentence: &TokenizedSentence, table: &FrequencyTable) -> f64 {
    let mut sum = 0u64;
    let mut n = 0u64;
    for token in sentence.content_tokens() {
        sum += table.count(&token.stem);
        n += 1;
    }
    if n == 0 {
        0.0
    } else {
        sum as f64 / n as f64
    }
}
