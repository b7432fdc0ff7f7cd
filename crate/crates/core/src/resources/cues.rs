//! Cue-phrase inventory and greedy longest-match counting.

use std::collections::HashSet;
use std::path::Path;

use crate::error::{Error, Result};
use crate::textproc::TokenizedSentence;

const SHIPPED_CUES: &str = include_str!("../../data/cue_phrases.txt");

/// A list of lowercase cue phrases, each a non-empty token sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CuePhraseList {
    phrases: Vec<Vec<String>>,
    max_len: usize,
}

impl CuePhraseList {
    /// The 100-entry inventory shipped with the crate.
    pub fn shipped() -> Self {
        Self::from_text(SHIPPED_CUES, "shipped").expect("shipped cue list is valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<CuePhraseList> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text, &path.display().to_string())
    }

    pub fn from_text(text: &str, source: &str) -> Result<CuePhraseList> {
        let mut phrases = Vec::new();
        let mut seen = HashSet::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if line != line.to_lowercase() {
                return Err(Error::parse(source, idx + 1, "cue phrases must be lowercase"));
            }
            let tokens: Vec<String> = line.split_whitespace().map(str::to_string).collect();
            if !seen.insert(tokens.clone()) {
                return Err(Error::parse(source, idx + 1, format!("duplicate phrase '{line}'")));
            }
            phrases.push(tokens);
        }
        let max_len = phrases.iter().map(Vec::len).max().unwrap_or(0);
        Ok(CuePhraseList { phrases, max_len })
    }

    pub fn len(&self) -> usize {
        self.phrases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phrases.is_empty()
    }

    fn matches_at(&self, tokens: &[&str], pos: usize) -> Option<usize> {
        let mut best = None;
        for phrase in &self.phrases {
            let n = phrase.len();
            if pos + n > tokens.len() || best.map_or(false, |b| n <= b) {
                continue;
            }
            if phrase.iter().zip(&tokens[pos..pos + n]).all(|(p, t)| p == t) {
                best = Some(n);
            }
        }
        best
    }
}

/// Number of non-overlapping cue-phrase matches, case-insensitive, greedy
/// longest match left to right.
pub fn count_cue_phrases(sentence: &TokenizedSentence, cues: &CuePhraseList) -> usize {
    let tokens: Vec<&str> = sentence.tokens.iter().map(|t| t.lower.as_str()).collect();
    let mut count = 0;
    let mut pos = 0;
    while pos < tokens.len() {
        match cues.matches_at(&tokens, pos) {
            Some(n) => {
                count += 1;
                pos += n;
            }
            None => pos += 1,
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textproc::Preprocessor;

    fn cues(lines: &str) -> CuePhraseList {
        CuePhraseList::from_text(lines, "mem").unwrap()
    }

    #[test]
    fn shipped_list_has_100_phrases() {
        assert_eq!(CuePhraseList::shipped().len(), 100);
    }

    #[test]
    fn counts_unigram_matches() {
        let pre = Preprocessor::shipped();
        let s = pre.preprocess("However , because it rained").unwrap();
        assert_eq!(count_cue_phrases(&s, &cues("however\nbecause\n")), 2);
    }

    #[test]
    fn longest_match_wins() {
        let pre = Preprocessor::shipped();
        let s = pre.preprocess("as soon as").unwrap();
        assert_eq!(count_cue_phrases(&s, &cues("as soon as\nas\n")), 1);
        assert_eq!(count_cue_phrases(&s, &cues("as\n")), 2);
    }

    #[test]
    fn empty_sentence() {
        let pre = Preprocessor::shipped();
        let s = pre.preprocess("").unwrap();
        assert_eq!(count_cue_phrases(&s, &CuePhraseList::shipped()), 0);
    }

    #[test]
    fn count_bounded_by_tokens() {
        let pre = Preprocessor::shipped();
        let s = pre.preprocess("so so so and and").unwrap();
        let c = count_cue_phrases(&s, &CuePhraseList::shipped());
        assert!(c <= s.tokens.len());
        assert_eq!(c, 5);
    }

    #[test]
    fn rejects_duplicates() {
        assert!(CuePhraseList::from_text("however\nhowever\n", "mem").is_err());
    }
}
