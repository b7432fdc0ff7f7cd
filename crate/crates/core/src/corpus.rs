//! Dataset ingestion, the three-valued label scheme, dataset statistics and
//! deterministic stratified cross-validation folds.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// The four quality aspects of a simplification pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Aspect {
    Grammaticality,
    Meaning,
    Simplicity,
    Overall,
}

impl Aspect {
    pub const ALL: [Aspect; 4] = [
        Aspect::Grammaticality,
        Aspect::Meaning,
        Aspect::Simplicity,
        Aspect::Overall,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Aspect::Grammaticality => "grammaticality",
            Aspect::Meaning => "meaning",
            Aspect::Simplicity => "simplicity",
            Aspect::Overall => "overall",
        }
    }
}

impl fmt::Display for Aspect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Aspect {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "grammaticality" => Ok(Aspect::Grammaticality),
            "meaning" => Ok(Aspect::Meaning),
            "simplicity" => Ok(Aspect::Simplicity),
            "overall" => Ok(Aspect::Overall),
            other => Err(Error::invalid(format!("unknown aspect '{other}'"))),
        }
    }
}

/// One of the three quality labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AspectLabel {
    Good,
    Ok,
    Bad,
}

impl AspectLabel {
    /// Fixed label order used for class indexing throughout the crate.
    pub const ALL: [AspectLabel; 3] = [AspectLabel::Good, AspectLabel::Ok, AspectLabel::Bad];

    pub fn as_str(self) -> &'static str {
        match self {
            AspectLabel::Good => "good",
            AspectLabel::Ok => "ok",
            AspectLabel::Bad => "bad",
        }
    }

    /// Class index under [`AspectLabel::ALL`] ordering.
    pub fn index(self) -> usize {
        match self {
            AspectLabel::Good => 0,
            AspectLabel::Ok => 1,
            AspectLabel::Bad => 2,
        }
    }
}

impl fmt::Display for AspectLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AspectLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "good" => Ok(AspectLabel::Good),
            "ok" => Ok(AspectLabel::Ok),
            "bad" => Ok(AspectLabel::Bad),
            other => Err(Error::invalid(format!("unparseable label '{other}'"))),
        }
    }
}

/// Numeric encoding used by the MAE/RMSE metrics: BAD=0, OK=50, GOOD=100.
pub fn label_to_score(label: AspectLabel) -> f64 {
    match label {
        AspectLabel::Good => 100.0,
        AspectLabel::Ok => 50.0,
        AspectLabel::Bad => 0.0,
    }
}

/// Nearest of {0, 50, 100}; exact midpoints round toward OK.
pub fn score_to_label(score: f64) -> Result<AspectLabel> {
    if !(0.0..=100.0).contains(&score) {
        return Err(Error::invalid(format!(
            "score {score} outside [0, 100]"
        )));
    }
    if score < 25.0 {
        Ok(AspectLabel::Bad)
    } else if score <= 75.0 {
        Ok(AspectLabel::Ok)
    } else {
        Ok(AspectLabel::Good)
    }
}

/// One (original, simplified) sentence pair with optional gold labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentencePair {
    pub id: String,
    pub original: String,
    pub simplified: String,
    pub labels: BTreeMap<Aspect, AspectLabel>,
}

impl SentencePair {
    pub fn label(&self, aspect: Aspect) -> Option<AspectLabel> {
        self.labels.get(&aspect).copied()
    }
}

/// An ordered collection of sentence pairs, in file order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    pub pairs: Vec<SentencePair>,
    pub source_path: String,
}

/// Supported on-disk dataset layouts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetFormat {
    QatsTsv,
}

const TSV_HEADER: &str = "id\toriginal\tsimplified\tgrammaticality\tmeaning\tsimplicity\toverall";

/// Loads a dataset from the canonical TSV layout.
pub fn load_dataset(path: impl AsRef<Path>, format: DatasetFormat) -> Result<Dataset> {
    let path = path.as_ref();
    let DatasetFormat::QatsTsv = format;
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_dataset_tsv(&text, &path.display().to_string())
}

/// Parses canonical TSV content; `source` is used in error messages.
pub fn parse_dataset_tsv(text: &str, source: &str) -> Result<Dataset> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == TSV_HEADER => {}
        Some((_, header)) => {
            return Err(Error::parse(
                source,
                1,
                format!("bad header '{header}', expected '{TSV_HEADER}'"),
            ))
        }
        None => return Err(Error::parse(source, 1, "empty file, header expected")),
    }

    let mut pairs = Vec::new();
    let mut seen = HashSet::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 7 {
            return Err(Error::parse(
                source,
                lineno,
                format!("expected 7 tab-separated columns, found {}", cols.len()),
            ));
        }
        let id = cols[0].trim().to_string();
        if id.is_empty() {
            return Err(Error::parse(source, lineno, "empty pair id"));
        }
        if !seen.insert(id.clone()) {
            return Err(Error::parse(source, lineno, format!("duplicate id '{id}'")));
        }
        let original = cols[1].trim().to_string();
        let simplified = cols[2].trim().to_string();
        if original.is_empty() || simplified.is_empty() {
            return Err(Error::parse(
                source,
                lineno,
                format!("pair '{id}' has an empty sentence"),
            ));
        }
        let mut labels = BTreeMap::new();
        for (aspect, cell) in Aspect::ALL.into_iter().zip(&cols[3..7]) {
            let cell = cell.trim();
            if cell.is_empty() {
                continue;
            }
            let label = cell
                .parse::<AspectLabel>()
                .map_err(|e| Error::parse(source, lineno, e.to_string()))?;
            labels.insert(aspect, label);
        }
        pairs.push(SentencePair {
            id,
            original,
            simplified,
            labels,
        });
    }
    Ok(Dataset {
        pairs,
        source_path: source.to_string(),
    })
}

/// Serializes a dataset back to the canonical TSV layout.
pub fn dataset_to_tsv(ds: &Dataset) -> String {
    let mut out = String::from(TSV_HEADER);
    out.push('\n');
    for pair in &ds.pairs {
        out.push_str(&pair.id);
        out.push('\t');
        out.push_str(&pair.original);
        out.push('\t');
        out.push_str(&pair.simplified);
        for aspect in Aspect::ALL {
            out.push('\t');
            if let Some(label) = pair.label(aspect) {
                out.push_str(label.as_str());
            }
        }
        out.push('\n');
    }
    out
}

pub fn save_dataset(ds: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, dataset_to_tsv(ds)).map_err(|e| Error::io(path, e))
}

/// Per-aspect label distribution as percentages. Aspects with no labeled
/// pairs map to an empty distribution.
pub fn dataset_stats(ds: &Dataset) -> BTreeMap<Aspect, BTreeMap<AspectLabel, f64>> {
    let mut out = BTreeMap::new();
    for aspect in Aspect::ALL {
        let mut counts: BTreeMap<AspectLabel, usize> = BTreeMap::new();
        let mut total = 0usize;
        for pair in &ds.pairs {
            if let Some(label) = pair.label(aspect) {
                *counts.entry(label).or_insert(0) += 1;
                total += 1;
            }
        }
        let dist = counts
            .into_iter()
            .map(|(label, c)| (label, 100.0 * c as f64 / total as f64))
            .collect();
        out.insert(aspect, dist);
    }
    out
}

/// Deterministic stratified k-fold split. Returns k lists of pair ids.
///
/// Folds are disjoint, cover the dataset, differ in size by at most one and
/// keep per-fold class counts within one of the proportional ideal.
pub fn stratified_kfold(
    ds: &Dataset,
    aspect: Aspect,
    k: usize,
    seed: u64,
) -> Result<Vec<Vec<String>>> {
    if k < 2 {
        return Err(Error::invalid(format!("k must be >= 2, got {k}")));
    }
    if k > ds.pairs.len() {
        return Err(Error::invalid(format!(
            "k = {k} exceeds dataset size {}",
            ds.pairs.len()
        )));
    }
    let mut by_class: BTreeMap<AspectLabel, Vec<&str>> = BTreeMap::new();
    for pair in &ds.pairs {
        match pair.label(aspect) {
            Some(label) => by_class.entry(label).or_default().push(&pair.id),
            None => {
                return Err(Error::invalid(format!(
                    "pair '{}' has no {aspect} label",
                    pair.id
                )))
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds: Vec<Vec<String>> = vec![Vec::new(); k];
    // Deal each shuffled class block onto a running fold cursor so that both
    // class counts and total fold sizes stay within one of each other.
    let mut cursor = 0usize;
    for label in AspectLabel::ALL {
        let Some(ids) = by_class.get_mut(&label) else {
            continue;
        };
        ids.shuffle(&mut rng);
        for id in ids.iter() {
            folds[cursor % k].push(id.to_string());
            cursor += 1;
        }
    }
    Ok(folds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toy_tsv(rows: &[(&str, &str, &str, [&str; 4])]) -> String {
        let mut s = String::from(TSV_HEADER);
        s.push('\n');
        for (id, o, m, labels) in rows {
            s.push_str(&format!(
                "{id}\t{o}\t{m}\t{}\t{}\t{}\t{}\n",
                labels[0], labels[1], labels[2], labels[3]
            ));
        }
        s
    }

    #[test]
    fn label_score_mapping() {
        assert_eq!(label_to_score(AspectLabel::Good), 100.0);
        assert_eq!(label_to_score(AspectLabel::Ok), 50.0);
        assert_eq!(label_to_score(AspectLabel::Bad), 0.0);
        assert_eq!(score_to_label(100.0).unwrap(), AspectLabel::Good);
        assert_eq!(score_to_label(60.0).unwrap(), AspectLabel::Ok);
        assert_eq!(score_to_label(75.0).unwrap(), AspectLabel::Ok);
        assert_eq!(score_to_label(25.0).unwrap(), AspectLabel::Ok);
        assert_eq!(score_to_label(24.9).unwrap(), AspectLabel::Bad);
        assert!(score_to_label(101.0).is_err());
        assert!(score_to_label(-0.5).is_err());
    }

    #[test]
    fn label_roundtrip() {
        for label in AspectLabel::ALL {
            assert_eq!(score_to_label(label_to_score(label)).unwrap(), label);
        }
        for score in [0.0, 50.0, 100.0] {
            assert_eq!(label_to_score(score_to_label(score).unwrap()), score);
        }
    }

    #[test]
    fn parse_header_only() {
        let ds = parse_dataset_tsv(TSV_HEADER, "mem").unwrap();
        assert!(ds.pairs.is_empty());
    }

    #[test]
    fn parse_rejects_bad_label() {
        let text = format!("{TSV_HEADER}\np1\tfoo\tbar\texcellent\t\t\t\n");
        let err = parse_dataset_tsv(&text, "mem").unwrap_err();
        assert!(err.to_string().contains("unparseable label 'excellent'"));
    }

    #[test]
    fn parse_rejects_duplicate_id() {
        let text = format!("{TSV_HEADER}\np1\ta\tb\t\t\t\t\np1\tc\td\t\t\t\t\n");
        let err = parse_dataset_tsv(&text, "mem").unwrap_err();
        assert!(err.to_string().contains("duplicate id 'p1'"));
    }

    #[test]
    fn parse_rejects_wrong_column_count() {
        let text = format!("{TSV_HEADER}\np1\tonly two\n");
        let err = parse_dataset_tsv(&text, "mem").unwrap_err();
        assert!(err.to_string().contains("mem:2"));
    }

    #[test]
    fn tsv_roundtrip() {
        let text = toy_tsv(&[
            ("p1", "A cat .", "A cat .", ["good", "ok", "bad", "ok"]),
            ("p2", "Hello there", "Hi", ["", "good", "", ""]),
        ]);
        let ds = parse_dataset_tsv(&text, "mem").unwrap();
        let ds2 = parse_dataset_tsv(&dataset_to_tsv(&ds), "mem").unwrap();
        assert_eq!(ds, ds2);
    }

    #[test]
    fn stats_excludes_unlabeled() {
        let text = toy_tsv(&[
            ("p1", "a b", "c d", ["good", "", "", ""]),
            ("p2", "a b", "c d", ["good", "", "", ""]),
            ("p3", "a b", "c d", ["bad", "", "", ""]),
            ("p4", "a b", "c d", ["", "", "", ""]),
        ]);
        let ds = parse_dataset_tsv(&text, "mem").unwrap();
        let stats = dataset_stats(&ds);
        let gram = &stats[&Aspect::Grammaticality];
        assert!((gram[&AspectLabel::Good] - 200.0 / 3.0).abs() < 1e-9);
        assert!((gram[&AspectLabel::Bad] - 100.0 / 3.0).abs() < 1e-9);
        assert!(stats[&Aspect::Meaning].is_empty());
    }

    #[test]
    fn kfold_sizes_505() {
        let rows: Vec<String> = (0..505)
            .map(|i| format!("p{i}\ta b\tc d\tgood\tgood\tgood\tgood"))
            .collect();
        let text = format!("{TSV_HEADER}\n{}\n", rows.join("\n"));
        let ds = parse_dataset_tsv(&text, "mem").unwrap();
        let folds = stratified_kfold(&ds, Aspect::Grammaticality, 10, 7).unwrap();
        let mut sizes: Vec<usize> = folds.iter().map(Vec::len).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![50, 50, 50, 50, 50, 51, 51, 51, 51, 51]);
    }

    #[test]
    fn kfold_single_class() {
        let rows: Vec<String> = (0..10)
            .map(|i| format!("p{i}\ta b\tc d\tgood\tgood\tgood\tgood"))
            .collect();
        let text = format!("{TSV_HEADER}\n{}\n", rows.join("\n"));
        let ds = parse_dataset_tsv(&text, "mem").unwrap();
        let folds = stratified_kfold(&ds, Aspect::Simplicity, 5, 1).unwrap();
        for fold in &folds {
            assert_eq!(fold.len(), 2);
        }
    }

    #[test]
    fn kfold_deterministic() {
        let rows: Vec<String> = (0..30)
            .map(|i| {
                let l = ["good", "ok", "bad"][i % 3];
                format!("p{i}\ta b\tc d\t{l}\t{l}\t{l}\t{l}")
            })
            .collect();
        let text = format!("{TSV_HEADER}\n{}\n", rows.join("\n"));
        let ds = parse_dataset_tsv(&text, "mem").unwrap();
        let a = stratified_kfold(&ds, Aspect::Overall, 4, 99).unwrap();
        let b = stratified_kfold(&ds, Aspect::Overall, 4, 99).unwrap();
        assert_eq!(a, b);
        let c = stratified_kfold(&ds, Aspect::Overall, 4, 100).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn kfold_rejects_missing_labels() {
        let text = toy_tsv(&[
            ("p1", "a", "b", ["good", "", "", ""]),
            ("p2", "a", "b", ["", "", "", ""]),
        ]);
        let ds = parse_dataset_tsv(&text, "mem").unwrap();
        assert!(stratified_kfold(&ds, Aspect::Grammaticality, 2, 0).is_err());
        assert!(stratified_kfold(&ds, Aspect::Grammaticality, 1, 0).is_err());
    }

    proptest! {
        #[test]
        fn kfold_partitions(n in 6usize..60, k in 2usize..6, seed in 0u64..1000) {
            prop_assume!(k <= n);
            let rows: Vec<String> = (0..n)
                .map(|i| {
                    let l = ["good", "ok", "bad"][i % 3];
                    format!("p{i}\ta b\tc d\t{l}\t{l}\t{l}\t{l}")
                })
                .collect();
            let text = format!("{TSV_HEADER}\n{}\n", rows.join("\n"));
            let ds = parse_dataset_tsv(&text, "mem").unwrap();
            let folds = stratified_kfold(&ds, Aspect::Meaning, k, seed).unwrap();
            let mut all: Vec<&String> = folds.iter().flatten().collect();
            prop_assert_eq!(all.len(), n);
            all.sort();
            all.dedup();
            prop_assert_eq!(all.len(), n);
            let sizes: Vec<usize> = folds.iter().map(Vec::len).collect();
            let max = *sizes.iter().max().unwrap();
            let min = *sizes.iter().min().unwrap();
            prop_assert!(max - min <= 1);
        }
    }
}
