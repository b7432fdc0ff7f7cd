//! Preprocessing substrate: tokenization, stopword filtering, Porter
//! stemming and coarse POS tagging.

mod porter;
mod tagger;

pub use porter::porter_stem;
pub use tagger::{
    is_punctuation, pos_tag, CoarsePos, HeuristicTagger, PreTaggedTagger, Tagger,
};

use std::collections::HashSet;
use std::path::Path;

use crate::error::{Error, Result};

/// Characters split off token edges by the tokenizer.
const EDGE_PUNCT: &[char] = &['.', ',', ';', ':', '!', '?', '"', '\'', '(', ')', '[', ']'];

/// Splits text on whitespace, then peels leading/trailing punctuation into
/// separate tokens. Internal hyphens and apostrophes stay attached.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for chunk in text.split_whitespace() {
        let mut core = chunk;
        let mut leading = Vec::new();
        while let Some(c) = core.chars().next() {
            if EDGE_PUNCT.contains(&c) {
                leading.push(c.to_string());
                core = &core[c.len_utf8()..];
            } else {
                break;
            }
        }
        let mut trailing = Vec::new();
        while let Some(c) = core.chars().last() {
            if EDGE_PUNCT.contains(&c) {
                trailing.push(c.to_string());
                core = &core[..core.len() - c.len_utf8()];
            } else {
                break;
            }
        }
        out.extend(leading);
        if !core.is_empty() {
            out.push(core.to_string());
        }
        out.extend(trailing.into_iter().rev());
    }
    out
}

/// One token with all derived annotations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    pub lower: String,
    pub stem: String,
    pub pos: CoarsePos,
    pub is_stopword: bool,
    pub is_punct: bool,
}

/// A fully preprocessed sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizedSentence {
    pub tokens: Vec<Token>,
    pub raw: String,
}

impl TokenizedSentence {
    /// Count of open-class (NOUN/VERB/ADJ/ADV) tokens.
    pub fn open_class_count(&self) -> usize {
        self.tokens.iter().filter(|t| t.pos.is_open_class()).count()
    }

    /// Tokens that are neither stopwords nor punctuation.
    pub fn content_tokens(&self) -> impl Iterator<Item = &Token> {
        self.tokens.iter().filter(|t| !t.is_stopword && !t.is_punct)
    }
}

pub fn open_class_count(sentence: &TokenizedSentence) -> usize {
    sentence.open_class_count()
}

const STOPWORDS: &str = include_str!("../../data/stopwords.txt");

/// Stopword list; case-insensitive membership.
#[derive(Debug, Clone)]
pub struct StopwordList {
    words: HashSet<String>,
}

impl StopwordList {
    /// The English list shipped with the crate.
    pub fn shipped() -> Self {
        Self::from_str_contents(STOPWORDS)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::from_str_contents(&text))
    }

    pub fn from_str_contents(text: &str) -> Self {
        let words = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_string)
            .collect();
        StopwordList { words }
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(&word.to_lowercase())
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Bundles a tagger and stopword list into the preprocessing pipeline used
/// by every feature extractor and resource builder.
pub struct Preprocessor {
    tagger: Box<dyn Tagger>,
    stopwords: StopwordList,
}

impl Preprocessor {
    pub fn new(tagger: Box<dyn Tagger>, stopwords: StopwordList) -> Self {
        Preprocessor { tagger, stopwords }
    }

    /// Heuristic tagger plus shipped stopword list.
    pub fn shipped() -> Self {
        Self::new(Box::new(HeuristicTagger::new()), StopwordList::shipped())
    }

    pub fn stopwords(&self) -> &StopwordList {
        &self.stopwords
    }

    /// Tokenize, lowercase, tag, stem and flag stopwords/punctuation.
    pub fn preprocess(&self, text: &str) -> Result<TokenizedSentence> {
        let surfaces = tokenize(text);
        let tags = self.tagger.tag(&surfaces)?;
        if tags.len() != surfaces.len() {
            return Err(Error::invalid(format!(
                "tagger returned {} tags for {} tokens",
                tags.len(),
                surfaces.len()
            )));
        }
        let tokens = surfaces
            .into_iter()
            .zip(tags)
            .map(|(surface, pos)| {
                let lower = surface.to_lowercase();
                let is_punct = is_punctuation(&surface);
                Token {
                    stem: porter_stem(&lower),
                    is_stopword: self.stopwords.contains(&lower),
                    // punctuation is OTHER regardless of what the tagger said
                    pos: if is_punct { CoarsePos::Other } else { pos },
                    is_punct,
                    lower,
                    surface,
                }
            })
            .collect();
        Ok(TokenizedSentence {
            tokens,
            raw: text.to_string(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn tokenize_basic() {
        assert_eq!(tokenize("The cat sat."), vec!["The", "cat", "sat", "."]);
        assert_eq!(tokenize(""), Vec::<String>::new());
        assert_eq!(
            tokenize("don't stop, however"),
            vec!["don't", "stop", ",", "however"]
        );
    }

    #[test]
    fn tokenize_edge_punct() {
        assert_eq!(tokenize("\"hi!\""), vec!["\"", "hi", "!", "\""]);
        assert_eq!(tokenize("(a-b)"), vec!["(", "a-b", ")"]);
        assert_eq!(tokenize("..."), vec![".", ".", "."]);
    }

    #[test]
    fn preprocess_flags() {
        let pre = Preprocessor::shipped();
        let s = pre.preprocess("Cats run.").unwrap();
        let stems: Vec<&str> = s.tokens.iter().map(|t| t.stem.as_str()).collect();
        assert_eq!(stems, vec!["cat", "run", "."]);
        assert_eq!(s.tokens[0].pos, CoarsePos::Noun);
        assert_eq!(s.tokens[2].pos, CoarsePos::Other);
        assert!(s.tokens[2].is_punct);
    }

    #[test]
    fn preprocess_stopwords_case_insensitive() {
        let pre = Preprocessor::shipped();
        let s = pre.preprocess("The the THE").unwrap();
        assert_eq!(s.tokens.len(), 3);
        assert!(s.tokens.iter().all(|t| t.is_stopword));
    }

    #[test]
    fn preprocess_empty() {
        let pre = Preprocessor::shipped();
        assert!(pre.preprocess("").unwrap().tokens.is_empty());
    }

    #[test]
    fn open_class_counting() {
        let pre = Preprocessor::shipped();
        let s = pre.preprocess("The cat sat .").unwrap();
        assert_eq!(s.open_class_count(), 2);
        let s = pre.preprocess("the of and .").unwrap();
        assert_eq!(s.open_class_count(), 0);
    }

    proptest! {
        #[test]
        fn tokenize_no_empty_tokens(text in "\\PC{0,60}") {
            for tok in tokenize(&text) {
                prop_assert!(!tok.is_empty());
            }
        }

        #[test]
        fn preprocess_deterministic(text in "[a-zA-Z ,.']{0,40}") {
            let pre = Preprocessor::shipped();
            let a = pre.preprocess(&text).unwrap();
            let b = pre.preprocess(&text).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
