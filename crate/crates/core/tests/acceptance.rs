//! Acceptance suite: one test per release criterion, each printing a
//! PASS line on success (run with `--nocapture` to see them). A failed
//! assertion fails the test before the line is printed.

use std::collections::{HashMap, HashSet};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use simpqe_core::corpus::{
    dataset_stats, load_dataset, parse_dataset_tsv, stratified_kfold, Aspect, AspectLabel,
    Dataset, DatasetFormat, SentencePair,
};
use simpqe_core::evaluation::{accuracy, cross_validate, mae, render_report, rmse, CvConfig};
use simpqe_core::features::{
    build_idf_for_dataset, feat_avg_word_len_diff, feat_cue_diff, feat_embedding_similarity,
    feat_freq_diff, feat_length_diff, feat_synonym_cosine, feat_tfidf_cosine, sparse_cosine,
    Resources,
};
use simpqe_core::model::{
    predict_overall, train_forest, train_tree, ForestParams, RandomForest, ThresholdPolicy,
    TreeNode, TreeParams,
};
use simpqe_core::resources::{
    CuePhraseList, EmbeddingTable, FrequencyTable, NGramModel, SynonymLexicon,
};
use simpqe_core::textproc::{porter_stem, tokenize, Preprocessor};

fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data")
}

fn toy_resources(pre: &Preprocessor) -> Resources {
    let toy = data_dir().join("toy");
    let read = |name: &str| std::fs::read_to_string(toy.join(name)).unwrap();
    let lm_sentences: Vec<Vec<String>> = read("lm_corpus.txt")
        .lines()
        .map(|l| tokenize(l).into_iter().map(|t| t.to_lowercase()).collect())
        .collect();
    let regular = read("regular_corpus.txt");
    let simple = read("simple_corpus.txt");
    Resources {
        lm: NGramModel::train(lm_sentences, 3).unwrap(),
        embeddings: EmbeddingTable::load(toy.join("embeddings.txt")).unwrap(),
        synonyms: SynonymLexicon::load(toy.join("synonyms.tsv")).unwrap(),
        regular_freq: FrequencyTable::build(regular.lines(), "regular", pre).unwrap(),
        simple_freq: FrequencyTable::build(simple.lines(), "simple", pre).unwrap(),
        cues: CuePhraseList::shipped(),
    }
}

fn toy_dataset() -> Dataset {
    load_dataset(data_dir().join("toy/dataset_60.tsv"), DatasetFormat::QatsTsv).unwrap()
}

#[test]
fn criterion_01_training_stats() {
    let start = Instant::now();
    let ds = load_dataset(
        data_dir().join("qats_train_synthetic.tsv"),
        DatasetFormat::QatsTsv,
    )
    .unwrap();
    assert_eq!(ds.pairs.len(), 505);
    let stats = dataset_stats(&ds);
    let expected = [
        (Aspect::Grammaticality, [75.65, 14.26, 10.09]),
        (Aspect::Meaning, [58.22, 26.33, 15.45]),
        (Aspect::Simplicity, [52.68, 30.29, 17.03]),
        (Aspect::Overall, [26.33, 46.14, 27.53]),
    ];
    for (aspect, [good, ok, bad]) in expected {
        let got = &stats[&aspect];
        for (label, want) in [
            (AspectLabel::Good, good),
            (AspectLabel::Ok, ok),
            (AspectLabel::Bad, bad),
        ] {
            let have = got[&label];
            assert!(
                (have - want).abs() <= 0.01,
                "{aspect}/{label}: got {have:.2}, want {want:.2}"
            );
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    println!("ACCEPTANCE 1: PASS - training-set label distribution matches within 0.01 ({elapsed:?})");
}

#[test]
fn criterion_02_rule_engine() {
    use AspectLabel::{Bad, Good, Ok};
    let cases = [
        ((Good, Good), Good),
        ((Good, Ok), Ok),
        ((Good, Bad), Bad),
        ((Ok, Good), Ok),
        ((Ok, Ok), Ok),
        ((Ok, Bad), Bad),
        ((Bad, Good), Bad),
        ((Bad, Ok), Bad),
        ((Bad, Bad), Bad),
    ];
    for ((s, m), want) in cases {
        assert_eq!(predict_overall(s, m), want, "simplicity={s} meaning={m}");
    }
    println!("ACCEPTANCE 2: PASS - overall rule engine matches all 9 cases");
}

#[test]
fn criterion_03_sparse_cosine_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let keys: Vec<String> = (0..40).map(|i| format!("k{i}")).collect();
    for _ in 0..1000 {
        let mut draw = |max_terms: usize| -> std::collections::BTreeMap<String, f64> {
            let n = rng.gen_range(0..=max_terms);
            let mut v = std::collections::BTreeMap::new();
            for _ in 0..n {
                let key = keys[rng.gen_range(0..keys.len())].clone();
                v.insert(key, rng.gen_range(-5.0..5.0));
            }
            v
        };
        let a = draw(15);
        let b = draw(15);
        // brute force over the sorted key union, accumulated independently
        let mut union: Vec<&String> = a.keys().chain(b.keys()).collect();
        union.sort();
        union.dedup();
        let mut dot = 0.0;
        let mut na2 = 0.0;
        let mut nb2 = 0.0;
        for k in union {
            let x = a.get(k).copied().unwrap_or(0.0);
            let y = b.get(k).copied().unwrap_or(0.0);
            dot += x * y;
            na2 += x * x;
            nb2 += y * y;
        }
        let want = if na2 == 0.0 || nb2 == 0.0 {
            0.0
        } else {
            dot / (na2.sqrt() * nb2.sqrt())
        };
        let got = sparse_cosine(&a, &b);
        assert!((got - want).abs() < 1e-12, "got {got}, want {want}");
    }
    println!("ACCEPTANCE 3: PASS - sparse cosine matches brute force on 1000 random pairs");
}

#[test]
fn criterion_04_language_model() {
    // hand-derived backoff on the toy corpus "a b a b", order 2:
    // S(a|<s>) = 1, S(b|a) = 1, S(</s>|b) = 1/2, so loglik = log10(0.5)
    let lm = NGramModel::train(vec![vec!["a", "b", "a", "b"]], 2).unwrap();
    let tokens = vec!["a".to_string(), "b".to_string()];
    let got = lm.sentence_loglik(&tokens);
    let want = 0.5f64.log10();
    assert!((got - want).abs() < 1e-12, "got {got}, want {want}");

    // uniform unigram model: V = 10 words, each once; perplexity is 10
    let words: Vec<Vec<String>> = vec![(0..10).map(|i| format!("w{i}")).collect()];
    let uni = NGramModel::train(words, 1).unwrap();
    let sent: Vec<String> = vec!["w3".into(), "w7".into(), "w0".into()];
    let ppl = uni.perplexity(&sent).unwrap();
    assert!((ppl - 10.0).abs() < 1e-9, "perplexity {ppl}");

    // serialize / reload must give bit-identical scores
    let text = lm.to_text();
    let reloaded = NGramModel::from_text(&text, "mem").unwrap();
    for probe in [
        vec!["a".to_string(), "b".to_string()],
        vec!["b".to_string()],
        vec!["a".to_string(), "zzz".to_string(), "b".to_string()],
    ] {
        assert_eq!(lm.sentence_loglik(&probe), reloaded.sentence_loglik(&probe));
        assert_eq!(
            lm.perplexity(&probe).unwrap(),
            reloaded.perplexity(&probe).unwrap()
        );
    }
    println!("ACCEPTANCE 4: PASS - LM hand values, uniform perplexity, bit-exact reload");
}

#[test]
fn criterion_05_porter_reference() {
    let text = std::fs::read_to_string(data_dir().join("porter_pairs.tsv")).unwrap();
    let pairs: Vec<(&str, &str)> = text
        .lines()
        .map(|l| l.split_once('\t').unwrap())
        .collect();
    assert!(pairs.len() > 20_000, "reference file has {} pairs", pairs.len());
    let start = Instant::now();
    let mut mismatches = 0;
    for &(word, want) in &pairs {
        if porter_stem(word) != want {
            mismatches += 1;
            if mismatches <= 5 {
                eprintln!("porter mismatch: {word} -> {} (want {want})", porter_stem(word));
            }
        }
    }
    let elapsed = start.elapsed();
    assert_eq!(mismatches, 0, "{mismatches}/{} words disagree", pairs.len());
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    println!(
        "ACCEPTANCE 5: PASS - porter agrees on all {} reference words ({elapsed:?})",
        pairs.len()
    );
}

#[test]
fn criterion_06_random_forest() {
    let start = Instant::now();

    // (a) 200 samples; the label is a threshold function of feature 0,
    // features 1 and 2 are noise. 10-fold CV must reach 99% accuracy.
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut x = Vec::new();
    let mut y = Vec::new();
    for i in 0..200 {
        let signal = i as f64 / 2.0;
        x.push(vec![signal, rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)]);
        y.push(if signal < 50.0 { AspectLabel::Bad } else { AspectLabel::Good });
    }
    let names: Vec<String> = (0..3).map(|i| format!("f{i}")).collect();
    let params = ForestParams::default();
    let mut correct = 0;
    for fold in 0..10 {
        let test: Vec<usize> = (0..200).filter(|i| i % 10 == fold).collect();
        let train: Vec<usize> = (0..200).filter(|i| i % 10 != fold).collect();
        let tx: Vec<Vec<f64>> = train.iter().map(|&i| x[i].clone()).collect();
        let ty: Vec<AspectLabel> = train.iter().map(|&i| y[i]).collect();
        let forest =
            train_forest(&tx, &ty, &names, Aspect::Simplicity, &params, 42).unwrap();
        for &i in &test {
            let proba = forest.predict_proba(&x[i]).unwrap();
            if proba.argmax() == y[i] {
                correct += 1;
            }
        }
    }
    let acc = 100.0 * correct as f64 / 200.0;
    assert!(acc >= 99.0, "pooled CV accuracy {acc:.1}%");

    // (b) single-tree split on the 4-point example matches the Gini oracle
    let tp = TreeParams {
        max_depth: None,
        min_samples_split: 2,
        features_per_split: 1,
    };
    let bx = vec![vec![1.0], vec![2.0], vec![3.0], vec![4.0]];
    let by = vec![
        AspectLabel::Bad,
        AspectLabel::Bad,
        AspectLabel::Good,
        AspectLabel::Good,
    ];
    match train_tree(&bx, &by, &tp, 0).unwrap() {
        TreeNode::Internal {
            feature_index,
            threshold,
            ..
        } => {
            assert_eq!(feature_index, 0);
            assert_eq!(threshold, 2.5);
        }
        other => panic!("expected a split, got {other:?}"),
    }

    // (c) byte-identical model files regardless of thread count
    let texts: Vec<String> = [1usize, 4]
        .iter()
        .map(|&n| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .unwrap();
            pool.install(|| {
                train_forest(&x, &y, &names, Aspect::Simplicity, &params, 7)
                    .unwrap()
                    .to_text()
            })
        })
        .collect();
    assert_eq!(texts[0], texts[1], "model files differ across thread counts");
    assert_eq!(
        RandomForest::from_text(&texts[0], "mem").unwrap().to_text(),
        texts[0]
    );

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    println!(
        "ACCEPTANCE 6: PASS - forest CV {acc:.1}%, oracle split, thread-invariant files ({elapsed:?})"
    );
}

#[test]
fn criterion_07_metric_oracles() {
    use AspectLabel::{Bad, Good, Ok};
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let n = rng.gen_range(1..60);
        let labels = [Good, Ok, Bad];
        let gold: Vec<AspectLabel> = (0..n).map(|_| labels[rng.gen_range(0..3)]).collect();
        let pred: Vec<AspectLabel> = (0..n).map(|_| labels[rng.gen_range(0..3)]).collect();

        let score = |l: &AspectLabel| match l {
            Bad => 0.0f64,
            Ok => 50.0,
            Good => 100.0,
        };
        let hits = gold.iter().zip(&pred).filter(|(g, p)| g == p).count();
        let want_acc = 100.0 * hits as f64 / n as f64;
        let want_mae = gold
            .iter()
            .zip(&pred)
            .map(|(g, p)| (score(g) - score(p)).abs())
            .sum::<f64>()
            / n as f64;
        let want_rmse = (gold
            .iter()
            .zip(&pred)
            .map(|(g, p)| (score(g) - score(p)).powi(2))
            .sum::<f64>()
            / n as f64)
            .sqrt();

        let got_acc = accuracy(&gold, &pred).unwrap();
        let got_mae = mae(&gold, &pred).unwrap();
        let got_rmse = rmse(&gold, &pred).unwrap();
        assert!((got_acc - want_acc).abs() < 1e-9);
        assert!((got_mae - want_mae).abs() < 1e-9);
        assert!((got_rmse - want_rmse).abs() < 1e-9);
        assert!(got_rmse >= got_mae - 1e-9, "rmse {got_rmse} < mae {got_mae}");
    }

    // worked examples
    assert_eq!(mae(&[Good, Ok], &[Ok, Ok]).unwrap(), 25.0);
    let r = rmse(&[Good, Ok, Bad], &[Good, Good, Good]).unwrap();
    assert_eq!(r, (12500.0f64 / 3.0).sqrt());
    assert!((r - 64.549).abs() < 1e-3); // 64.549 is the truncated rendering
    println!("ACCEPTANCE 7: PASS - metrics match brute force on 1000 draws; worked examples exact");
}

#[test]
fn criterion_08_feature_symmetry() {
    let pre = Preprocessor::shipped();
    let mut rng = ChaCha8Rng::seed_from_u64(8);

    // synthetic vocabulary of noun-like words plus resources over it
    let vocab: Vec<String> = (0..30).map(|i| format!("word{i:02}")).collect();
    let mut emb_text = format!("{} 4\n", vocab.len());
    for w in &vocab {
        emb_text.push_str(w);
        for _ in 0..4 {
            emb_text.push_str(&format!(" {:.4}", rng.gen_range(-1.0..1.0)));
        }
        emb_text.push('\n');
    }
    let embeddings = EmbeddingTable::from_text(&emb_text, "mem").unwrap();
    let synonyms = SynonymLexicon::from_text(
        "word00\tNOUN\tword01 word02\nword03\tNOUN\tword04\n",
        "mem",
    )
    .unwrap();
    let freq_corpus: String = vocab.join(" ");
    let regular = FrequencyTable::build(std::iter::once(freq_corpus.as_str()), "r", &pre).unwrap();
    let simple =
        FrequencyTable::build(std::iter::once(vocab[..15].join(" ").as_str()), "s", &pre).unwrap();
    let cues = CuePhraseList::shipped();

    let sentence = |rng: &mut ChaCha8Rng| -> String {
        let n = rng.gen_range(1..10);
        (0..n)
            .map(|_| vocab[rng.gen_range(0..vocab.len())].clone())
            .collect::<Vec<_>>()
            .join(" ")
    };
    let mk = |o: String, s: String, id: &str| SentencePair {
        id: id.to_string(),
        original: o,
        simplified: s,
        labels: Default::default(),
    };

    let pairs: Vec<SentencePair> = (0..200)
        .map(|i| {
            let o = sentence(&mut rng);
            let s = sentence(&mut rng);
            mk(o, s, &format!("p{i}"))
        })
        .collect();
    let ds = Dataset {
        pairs: pairs.clone(),
        source_path: "mem".to_string(),
    };
    let idf = build_idf_for_dataset(&ds, &pre).unwrap();

    for p in &pairs {
        let q = mk(p.simplified.clone(), p.original.clone(), &p.id);
        // the four difference features negate exactly under the swap
        assert_eq!(
            feat_length_diff(p, &pre).unwrap(),
            -feat_length_diff(&q, &pre).unwrap()
        );
        assert_eq!(
            feat_cue_diff(p, &cues, &pre).unwrap(),
            -feat_cue_diff(&q, &cues, &pre).unwrap()
        );
        assert_eq!(
            feat_avg_word_len_diff(p, &pre).unwrap(),
            -feat_avg_word_len_diff(&q, &pre).unwrap()
        );
        for table in [&regular, &simple] {
            assert_eq!(
                feat_freq_diff(p, table, &pre).unwrap(),
                -feat_freq_diff(&q, table, &pre).unwrap()
            );
        }
        // the three similarity features are unchanged
        let tol = 1e-12;
        assert!(
            (feat_embedding_similarity(p, &embeddings, &pre).unwrap()
                - feat_embedding_similarity(&q, &embeddings, &pre).unwrap())
            .abs()
                < tol
        );
        assert!(
            (feat_synonym_cosine(p, &synonyms, &pre).unwrap()
                - feat_synonym_cosine(&q, &synonyms, &pre).unwrap())
            .abs()
                < tol
        );
        assert!(
            (feat_tfidf_cosine(p, &idf, &pre).unwrap()
                - feat_tfidf_cosine(&q, &idf, &pre).unwrap())
            .abs()
                < tol
        );
    }

    // identical-sentence pairs: unit cosines, zero differences
    for i in 0..20 {
        let s = sentence(&mut rng);
        let p = mk(s.clone(), s, &format!("same{i}"));
        assert!((feat_tfidf_cosine(&p, &idf, &pre).unwrap() - 1.0).abs() < 1e-12);
        assert!((feat_synonym_cosine(&p, &synonyms, &pre).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(feat_length_diff(&p, &pre).unwrap(), 0);
        assert_eq!(feat_cue_diff(&p, &cues, &pre).unwrap(), 0);
        assert_eq!(feat_avg_word_len_diff(&p, &pre).unwrap(), 0.0);
        assert_eq!(feat_freq_diff(&p, &regular, &pre).unwrap(), 0.0);
        assert_eq!(feat_freq_diff(&p, &simple, &pre).unwrap(), 0.0);
    }
    println!("ACCEPTANCE 8: PASS - swap symmetry on 200 pairs; identity pairs exact");
}

#[test]
fn criterion_09_cv_hygiene() {
    // instrumented run: held-out pairs never reach the IDF or training fold
    let pre = Preprocessor::shipped();
    let resources = toy_resources(&pre);
    let ds = toy_dataset();
    let cfg = CvConfig {
        k: 5,
        seed: 42,
        params: ForestParams {
            n_trees: 10,
            ..ForestParams::default()
        },
        policy: ThresholdPolicy::new(0.5).unwrap(),
    };
    let outcome = cross_validate(&ds, &resources, &pre, Aspect::Simplicity, &cfg).unwrap();
    let all_ids: HashSet<&str> = ds.pairs.iter().map(|p| p.id.as_str()).collect();
    let mut covered: HashSet<&str> = HashSet::new();
    for fold in &outcome.folds {
        let train: HashSet<&str> = fold.train_ids.iter().map(String::as_str).collect();
        let test: HashSet<&str> = fold.test_ids.iter().map(String::as_str).collect();
        assert!(train.is_disjoint(&test), "a held-out pair entered training");
        let idf: HashSet<&str> = fold.idf_pair_ids.iter().map(String::as_str).collect();
        assert_eq!(idf, train, "IDF documents differ from the training fold");
        for id in &test {
            assert!(covered.insert(id), "pair {id} tested twice");
        }
        assert_eq!(train.union(&test).count(), all_ids.len());
    }
    assert_eq!(covered, all_ids, "some pair was never held out");

    // fold properties on 100 random datasets
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for round in 0..100 {
        let n = rng.gen_range(12..80);
        let labels = ["good", "ok", "bad"];
        let mut text = String::from(
            "id\toriginal\tsimplified\tgrammaticality\tmeaning\tsimplicity\toverall\n",
        );
        for i in 0..n {
            let l = labels[rng.gen_range(0..3)];
            text.push_str(&format!("r{i}\taa bb\tcc\t{l}\t{l}\t{l}\t{l}\n"));
        }
        let ds = parse_dataset_tsv(&text, "mem").unwrap();
        let k = rng.gen_range(2..=6);
        let folds = stratified_kfold(&ds, Aspect::Overall, k, round).unwrap();
        assert_eq!(folds.len(), k);
        let sizes: Vec<usize> = folds.iter().map(Vec::len).collect();
        assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        let mut seen = HashSet::new();
        for fold in &folds {
            for id in fold {
                assert!(seen.insert(id.clone()), "duplicate id across folds");
            }
        }
        assert_eq!(seen.len(), n, "folds do not cover the dataset");
        // per-class counts within 1 across folds
        let label_of: HashMap<&str, AspectLabel> = ds
            .pairs
            .iter()
            .map(|p| (p.id.as_str(), p.label(Aspect::Overall).unwrap()))
            .collect();
        for class in AspectLabel::ALL {
            let counts: Vec<usize> = folds
                .iter()
                .map(|f| f.iter().filter(|id| label_of[id.as_str()] == class).count())
                .collect();
            assert!(
                counts.iter().max().unwrap() - counts.iter().min().unwrap() <= 1,
                "class {class} unbalanced: {counts:?}"
            );
        }
    }
    println!("ACCEPTANCE 9: PASS - CV hygiene proven; fold properties hold on 100 datasets");
}

#[test]
fn criterion_10_end_to_end_smoke() {
    let start = Instant::now();
    let pre = Preprocessor::shipped();
    let resources = toy_resources(&pre);
    let ds = toy_dataset();
    assert_eq!(ds.pairs.len(), 60);

    let run = || -> String {
        let mut reports = Vec::new();
        for tau in [0.5, 0.6, 0.7] {
            let cfg = CvConfig {
                k: 10,
                seed: 42,
                params: ForestParams {
                    n_trees: 30,
                    ..ForestParams::default()
                },
                policy: ThresholdPolicy::new(tau).unwrap(),
            };
            let outcome = cross_validate(&ds, &resources, &pre, Aspect::Overall, &cfg).unwrap();
            reports.push(outcome.pooled);
        }
        render_report(&reports)
    };

    let table = run();
    let lines: Vec<&str> = table.lines().collect();
    // header + three tau rows + scoring footer
    assert_eq!(lines.len(), 5, "unexpected report:\n{table}");
    assert!(lines[1].contains("overall-rf-0.5"));
    assert!(lines[2].contains("overall-rf-0.6"));
    assert!(lines[3].contains("overall-rf-0.7"));

    assert_eq!(run(), table, "cross-validation is not deterministic");
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "took {elapsed:?}");
    println!("ACCEPTANCE 10: PASS - end-to-end toy CV deterministic with 3 tau rows ({elapsed:?})");
}
