//! POS-filtered synonym lexicon, loaded from a flat TSV:
//! `word<TAB>POS<TAB>comma-separated-synonyms` with POS in
//! {NOUN, VERB, ADJ, ADV}.

use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use crate::error::{Error, Result};
use crate::textproc::CoarsePos;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SynonymLexicon {
    entries: HashMap<(String, CoarsePos), BTreeSet<String>>,
}

impl SynonymLexicon {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<SynonymLexicon> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text, &path.display().to_string())
    }

    pub fn from_text(text: &str, source: &str) -> Result<SynonymLexicon> {
        let mut entries: HashMap<(String, CoarsePos), BTreeSet<String>> = HashMap::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim_end();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 3 {
                return Err(Error::parse(
                    source,
                    idx + 1,
                    "expected 'word<TAB>POS<TAB>synonyms'",
                ));
            }
            let word = cols[0].trim().to_lowercase();
            let pos: CoarsePos = cols[1]
                .trim()
                .parse()
                .map_err(|e: Error| Error::parse(source, idx + 1, e.to_string()))?;
            if !pos.is_open_class() {
                return Err(Error::parse(
                    source,
                    idx + 1,
                    "POS must be one of NOUN, VERB, ADJ, ADV",
                ));
            }
            let set = entries.entry((word.clone(), pos)).or_default();
            for syn in cols[2].split(',') {
                let syn = syn.trim().to_lowercase();
                // a word is never its own synonym in the stored set
                if !syn.is_empty() && syn != word {
                    set.insert(syn);
                }
            }
        }
        Ok(SynonymLexicon { entries })
    }

    /// Synonyms of `word` under `pos`; empty when no entry exists.
    pub fn synonyms(&self, word: &str, pos: CoarsePos) -> impl Iterator<Item = &str> {
        self.entries
            .get(&(word.to_lowercase(), pos))
            .into_iter()
            .flatten()
            .map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_entries() {
        let lex = SynonymLexicon::from_text("happy\tADJ\tglad,content\n", "mem").unwrap();
        let syns: Vec<&str> = lex.synonyms("happy", CoarsePos::Adj).collect();
        assert_eq!(syns, vec!["content", "glad"]);
    }

    #[test]
    fn pos_filtering() {
        let lex = SynonymLexicon::from_text("happy\tADJ\tglad\n", "mem").unwrap();
        assert_eq!(lex.synonyms("happy", CoarsePos::Noun).count(), 0);
    }

    #[test]
    fn strips_self_reference() {
        let lex = SynonymLexicon::from_text("run\tVERB\trun,sprint\n", "mem").unwrap();
        let syns: Vec<&str> = lex.synonyms("run", CoarsePos::Verb).collect();
        assert_eq!(syns, vec!["sprint"]);
    }

    #[test]
    fn rejects_unknown_pos() {
        let err = SynonymLexicon::from_text("run\tXYZ\tsprint\n", "mem").unwrap_err();
        assert!(err.to_string().contains("mem:1"));
        assert!(SynonymLexicon::from_text("run\tOTHER\tsprint\n", "mem").is_err());
    }
}
