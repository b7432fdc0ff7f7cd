//! Coarse part-of-speech tagging with a pluggable tagger interface.

use std::collections::HashMap;
use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Five-way coarse POS tag set: the four open classes plus OTHER for
/// closed-class words and punctuation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CoarsePos {
    Noun,
    Verb,
    Adj,
    Adv,
    Other,
}

impl CoarsePos {
    pub fn is_open_class(self) -> bool {
        !matches!(self, CoarsePos::Other)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CoarsePos::Noun => "NOUN",
            CoarsePos::Verb => "VERB",
            CoarsePos::Adj => "ADJ",
            CoarsePos::Adv => "ADV",
            CoarsePos::Other => "OTHER",
        }
    }
}

impl fmt::Display for CoarsePos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CoarsePos {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "NOUN" => Ok(CoarsePos::Noun),
            "VERB" => Ok(CoarsePos::Verb),
            "ADJ" => Ok(CoarsePos::Adj),
            "ADV" => Ok(CoarsePos::Adv),
            "OTHER" => Ok(CoarsePos::Other),
            other => Err(Error::invalid(format!("unknown POS code '{other}'"))),
        }
    }
}

/// A tagger assigns one coarse tag per token, in order.
pub trait Tagger: Send + Sync {
    fn tag(&self, tokens: &[String]) -> Result<Vec<CoarsePos>>;
}

/// Convenience wrapper matching the operation-style call shape.
pub fn pos_tag(tokens: &[String], tagger: &dyn Tagger) -> Result<Vec<CoarsePos>> {
    let tags = tagger.tag(tokens)?;
    debug_assert_eq!(tags.len(), tokens.len());
    Ok(tags)
}

const CLOSED_CLASS: &str = include_str!("../../data/closed_class.txt");

/// Deterministic rule-based tagger: punctuation and closed-class words tag
/// OTHER, suffix rules cover ADV/VERB/ADJ, everything else defaults to NOUN.
pub struct HeuristicTagger {
    closed_class: HashSet<String>,
}

impl HeuristicTagger {
    /// Uses the closed-class lexicon shipped with the crate.
    pub fn new() -> Self {
        Self::from_lexicon_str(CLOSED_CLASS)
    }

    pub fn from_lexicon_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::from_lexicon_str(&text))
    }

    pub fn from_lexicon_str(text: &str) -> Self {
        let closed_class = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_string)
            .collect();
        HeuristicTagger { closed_class }
    }

    fn tag_one(&self, token: &str) -> CoarsePos {
        if is_punctuation(token) {
            return CoarsePos::Other;
        }
        let lower = token.to_lowercase();
        if self.closed_class.contains(&lower) {
            return CoarsePos::Other;
        }
        if lower.ends_with("ly") {
            return CoarsePos::Adv;
        }
        if lower.chars().count() >= 5
            && ["ing", "ed", "ize", "ate"].iter().any(|s| lower.ends_with(s))
        {
            return CoarsePos::Verb;
        }
        if ["ous", "ful", "ive", "able", "al"].iter().any(|s| lower.ends_with(s)) {
            return CoarsePos::Adj;
        }
        CoarsePos::Noun
    }
}

impl Default for HeuristicTagger {
    fn default() -> Self {
        Self::new()
    }
}

impl Tagger for HeuristicTagger {
    fn tag(&self, tokens: &[String]) -> Result<Vec<CoarsePos>> {
        Ok(tokens.iter().map(|t| self.tag_one(t)).collect())
    }
}

/// True when the token contains no alphanumeric character.
pub fn is_punctuation(token: &str) -> bool {
    !token.is_empty() && !token.chars().any(char::is_alphanumeric)
}

/// Tagger backed by externally tagged sentences in the vertical
/// `token<TAB>tag` format with blank lines between sentences.
///
/// Sentences are keyed by their exact token sequence; tagging a sentence
/// that was not supplied (or whose token count differs) is an error.
pub struct PreTaggedTagger {
    sentences: HashMap<Vec<String>, Vec<CoarsePos>>,
}

impl PreTaggedTagger {
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_str_named(&text, &path.display().to_string())
    }

    pub fn from_str_named(text: &str, source: &str) -> Result<Self> {
        let mut sentences = HashMap::new();
        let mut tokens = Vec::new();
        let mut tags = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim_end();
            if line.is_empty() {
                if !tokens.is_empty() {
                    sentences.insert(std::mem::take(&mut tokens), std::mem::take(&mut tags));
                }
                continue;
            }
            let (token, tag) = line.split_once('\t').ok_or_else(|| {
                Error::parse(source, idx + 1, "expected 'token<TAB>tag'")
            })?;
            let tag: CoarsePos = tag
                .trim()
                .parse()
                .map_err(|e: Error| Error::parse(source, idx + 1, e.to_string()))?;
            tokens.push(token.to_string());
            tags.push(tag);
        }
        if !tokens.is_empty() {
            sentences.insert(tokens, tags);
        }
        Ok(PreTaggedTagger { sentences })
    }
}

impl Tagger for PreTaggedTagger {
    fn tag(&self, tokens: &[String]) -> Result<Vec<CoarsePos>> {
        match self.sentences.get(tokens) {
            Some(tags) => Ok(tags.clone()),
            None => Err(Error::invalid(format!(
                "no pre-tagged sentence matches the {} tokens starting with '{}'",
                tokens.len(),
                tokens.first().map(String::as_str).unwrap_or("")
            ))),
        }
    }
}
