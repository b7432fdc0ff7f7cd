//! Benchmarks for the hot paths: stemming, LM scoring, feature
//! extraction, and forest training.

use std::path::Path;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use simpqe_core::corpus::{load_dataset, Aspect, AspectLabel, DatasetFormat};
use simpqe_core::features::{build_idf_for_dataset, FeatureExtractor, Resources};
use simpqe_core::model::{train_forest, ForestParams};
use simpqe_core::resources::{
    CuePhraseList, EmbeddingTable, FrequencyTable, NGramModel, SynonymLexicon,
};
use simpqe_core::textproc::{porter_stem, tokenize, Preprocessor};

fn core_data() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data")
}

fn bench_porter(c: &mut Criterion) {
    let text = std::fs::read_to_string(core_data().join("porter_pairs.tsv")).unwrap();
    let words: Vec<String> = text
        .lines()
        .filter_map(|l| l.split_once('\t'))
        .map(|(w, _)| w.to_string())
        .collect();
    c.bench_function("porter_stem_vocabulary", |b| {
        b.iter(|| {
            let mut total = 0usize;
            for w in &words {
                total += porter_stem(w).len();
            }
            total
        })
    });
}

fn bench_ngram(c: &mut Criterion) {
    let text = std::fs::read_to_string(core_data().join("toy/lm_corpus.txt")).unwrap();
    let sentences: Vec<Vec<String>> = text
        .lines()
        .map(|l| tokenize(l).into_iter().map(|t| t.to_lowercase()).collect())
        .collect();
    let lm = NGramModel::train(sentences.clone(), 3).unwrap();
    c.bench_function("ngram_score_corpus", |b| {
        b.iter(|| {
            sentences
                .iter()
                .map(|s| lm.sentence_loglik(s))
                .sum::<f64>()
        })
    });
}

fn toy_resources(pre: &Preprocessor) -> Resources {
    let toy = core_data().join("toy");
    let read = |name: &str| std::fs::read_to_string(toy.join(name)).unwrap();
    let sentences: Vec<Vec<String>> = read("lm_corpus.txt")
        .lines()
        .map(|l| tokenize(l).into_iter().map(|t| t.to_lowercase()).collect())
        .collect();
    Resources {
        lm: NGramModel::train(sentences, 3).unwrap(),
        embeddings: EmbeddingTable::load(toy.join("embeddings.txt")).unwrap(),
        synonyms: SynonymLexicon::load(toy.join("synonyms.tsv")).unwrap(),
        regular_freq: FrequencyTable::build(read("regular_corpus.txt").lines(), "r", pre)
            .unwrap(),
        simple_freq: FrequencyTable::build(read("simple_corpus.txt").lines(), "s", pre).unwrap(),
        cues: CuePhraseList::shipped(),
    }
}

fn bench_extraction(c: &mut Criterion) {
    let pre = Preprocessor::shipped();
    let resources = toy_resources(&pre);
    let ds = load_dataset(core_data().join("toy/dataset_60.tsv"), DatasetFormat::QatsTsv)
        .unwrap();
    let idf = build_idf_for_dataset(&ds, &pre).unwrap();
    let extractor = FeatureExtractor::new(&resources, &pre, idf);
    c.bench_function("extract_60_pairs", |b| {
        b.iter(|| extractor.assemble_all(&ds.pairs).unwrap())
    });
}

fn bench_forest(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let x: Vec<Vec<f64>> = (0..200)
        .map(|i| vec![i as f64, rng.gen(), rng.gen()])
        .collect();
    let y: Vec<AspectLabel> = (0..200)
        .map(|i| if i < 100 { AspectLabel::Bad } else { AspectLabel::Good })
        .collect();
    let names = vec!["f0".to_string(), "f1".to_string(), "f2".to_string()];
    let params = ForestParams {
        n_trees: 50,
        ..ForestParams::default()
    };
    c.bench_function("train_forest_50_trees", |b| {
        b.iter_batched(
            || (),
            |_| train_forest(&x, &y, &names, Aspect::Simplicity, &params, 42).unwrap(),
            BatchSize::SmallInput,
        )
    });
}

criterion_group!(benches, bench_porter, bench_ngram, bench_extraction, bench_forest);
criterion_main!(benches);
