//! One function per subcommand. Data goes to stdout or `--out`;
//! diagnostics go to stderr.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

use simpqe_core::corpus::{
    dataset_stats, load_dataset, Aspect, AspectLabel, Dataset, DatasetFormat,
};
use simpqe_core::evaluation::{
    cross_validate, parse_predictions_tsv, predictions_to_tsv, render_report, report_to_tsv,
    CvConfig, EvaluationReport, PredictionRow,
};
use simpqe_core::features::{
    build_idf_for_dataset, features_to_tsv, FeatureExtractor, Idf,
};
use simpqe_core::model::{
    predict_label, predict_overall, train_forest, ForestParams, LabelDistribution, RandomForest,
    ThresholdPolicy,
};
use simpqe_core::resources::{FrequencyTable, NGramModel};
use simpqe_core::textproc::{tokenize, Preprocessor};

use crate::config::RunConfig;

fn write_output(out: Option<&Path>, data: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, data)
            .with_context(|| format!("cannot write {}", path.display())),
        None => {
            print!("{data}");
            Ok(())
        }
    }
}

fn load_qats(path: &Path) -> Result<Dataset> {
    Ok(load_dataset(path, DatasetFormat::QatsTsv)?)
}

fn idf_sidecar(model_path: &Path) -> PathBuf {
    let mut s = model_path.as_os_str().to_owned();
    s.push(".idf");
    PathBuf::from(s)
}

pub fn build_lm(corpus: &Path, order: usize, out: &Path) -> Result<()> {
    let text = std::fs::read_to_string(corpus)
        .with_context(|| format!("cannot read corpus {}", corpus.display()))?;
    let sentences: Vec<Vec<String>> = text
        .lines()
        .map(|l| tokenize(l).into_iter().map(|t| t.to_lowercase()).collect())
        .collect();
    let n_sentences = sentences.len();
    let lm = NGramModel::train(sentences, order)?;
    lm.save(out)?;
    eprintln!(
        "trained order-{order} model on {n_sentences} sentences: N={} |V|={}",
        lm.total_unigrams(),
        lm.vocab_size()
    );
    for (level, size) in lm.level_sizes().iter().enumerate() {
        eprintln!("  {}-grams: {size}", level + 1);
    }
    eprintln!("wrote {}", out.display());
    Ok(())
}

pub fn build_freq(corpus: &Path, name: &str, out: &Path) -> Result<()> {
    let text = std::fs::read_to_string(corpus)
        .with_context(|| format!("cannot read corpus {}", corpus.display()))?;
    let pre = Preprocessor::shipped();
    let table = FrequencyTable::build(text.lines(), name, &pre)?;
    if table.total() == 0 {
        eprintln!("warning: corpus {} produced an empty table", corpus.display());
    }
    table.save(out)?;
    eprintln!(
        "counted {} stem tokens ({} distinct) from {}",
        table.total(),
        table.distinct_stems(),
        corpus.display()
    );
    eprintln!("wrote {}", out.display());
    Ok(())
}

pub fn extract(cfg: &RunConfig, dataset: Option<&Path>, out: Option<&Path>) -> Result<()> {
    let pre = Preprocessor::shipped();
    let resources = cfg.load_resources(&pre)?;
    let ds = load_qats(&cfg.dataset_path(dataset)?)?;
    let idf = build_idf_for_dataset(&ds, &pre)?;
    let extractor = FeatureExtractor::new(&resources, &pre, idf);
    let features = extractor.assemble_all(&ds.pairs)?;
    eprintln!("extracted features for {} pairs", features.len());
    write_output(out, &features_to_tsv(&features))
}

pub fn train(
    cfg: &RunConfig,
    dataset: Option<&Path>,
    aspect: Aspect,
    out: &Path,
    params: &ForestParams,
    seed: u64,
) -> Result<()> {
    if aspect == Aspect::Overall {
        bail!(
            "the overall aspect has no classifier of its own: it is derived \
             by rule from the simplicity and meaning predictions. Train those \
             two models instead and give both to `predict --aspect overall`."
        );
    }
    let pre = Preprocessor::shipped();
    let resources = cfg.load_resources(&pre)?;
    let ds = load_qats(&cfg.dataset_path(dataset)?)?;
    let idf = build_idf_for_dataset(&ds, &pre)?;
    let extractor = FeatureExtractor::new(&resources, &pre, idf);
    let features = extractor.assemble_all(&ds.pairs)?;

    let mut x = Vec::new();
    let mut y = Vec::new();
    for (pair, feats) in ds.pairs.iter().zip(&features) {
        let Some(label) = pair.label(aspect) else {
            bail!("pair '{}' has no {aspect} label", pair.id);
        };
        x.push(feats.vector(aspect).raw());
        y.push(label);
    }
    let names = features[0].vector(aspect).names();
    let forest = train_forest(&x, &y, &names, aspect, params, seed)?;
    forest.save(out)?;
    // the IDF the model was trained with travels alongside it so predict
    // can reproduce the same tfidf_cosine values
    extractor.idf.save(idf_sidecar(out))?;
    eprintln!(
        "trained {} {aspect} trees on {} pairs; wrote {} (+ .idf)",
        forest.n_trees(),
        y.len(),
        out.display()
    );
    Ok(())
}

pub struct PredictArgs<'a> {
    pub dataset: Option<&'a Path>,
    pub aspect: Aspect,
    pub model: Option<&'a Path>,
    pub simplicity_model: Option<&'a Path>,
    pub meaning_model: Option<&'a Path>,
    pub tau: Option<f64>,
    pub out: Option<&'a Path>,
}

fn load_model(path: &Path, want: Aspect) -> Result<RandomForest> {
    let forest = RandomForest::load(path)?;
    if forest.aspect != want {
        bail!(
            "model {} was trained for {} but {want} is needed",
            path.display(),
            forest.aspect
        );
    }
    Ok(forest)
}

pub fn predict(cfg: &RunConfig, args: &PredictArgs) -> Result<()> {
    let policy = ThresholdPolicy::new(cfg.tau(args.tau))?;
    let pre = Preprocessor::shipped();
    let resources = cfg.load_resources(&pre)?;
    let ds = load_qats(&cfg.dataset_path(args.dataset)?)?;

    let rows = if args.aspect == Aspect::Overall {
        let (Some(sp), Some(mp)) = (args.simplicity_model, args.meaning_model) else {
            bail!(
                "predicting the overall aspect needs --simplicity-model and \
                 --meaning-model: the overall label is produced by the rule \
                 engine (good+good -> good, any bad -> bad, else ok) applied \
                 to those two models' predictions"
            );
        };
        let simp = load_model(sp, Aspect::Simplicity)?;
        let mean = load_model(mp, Aspect::Meaning)?;
        let idf = Idf::load(idf_sidecar(sp))?;
        let extractor = FeatureExtractor::new(&resources, &pre, idf);
        let features = extractor.assemble_all(&ds.pairs)?;
        ds.pairs
            .iter()
            .zip(&features)
            .map(|(pair, f)| {
                let s = simp.predict_proba(&f.vector(Aspect::Simplicity).raw())?;
                let m = mean.predict_proba(&f.vector(Aspect::Meaning).raw())?;
                let label =
                    predict_overall(predict_label(&s, policy), predict_label(&m, policy));
                let mut onehot = [0.0; 3];
                onehot[label.index()] = 1.0;
                Ok(PredictionRow {
                    pair_id: pair.id.clone(),
                    aspect: Aspect::Overall,
                    gold: pair.label(Aspect::Overall),
                    pred: label,
                    proba: LabelDistribution(onehot),
                })
            })
            .collect::<simpqe_core::Result<Vec<_>>>()?
    } else {
        let Some(mp) = args.model else {
            bail!("pass --model with the {} model file", args.aspect);
        };
        let forest = load_model(mp, args.aspect)?;
        let idf = Idf::load(idf_sidecar(mp))?;
        let extractor = FeatureExtractor::new(&resources, &pre, idf);
        let features = extractor.assemble_all(&ds.pairs)?;
        ds.pairs
            .iter()
            .zip(&features)
            .map(|(pair, f)| {
                let proba = forest.predict_proba(&f.vector(args.aspect).raw())?;
                Ok(PredictionRow {
                    pair_id: pair.id.clone(),
                    aspect: args.aspect,
                    gold: pair.label(args.aspect),
                    pred: predict_label(&proba, policy),
                    proba,
                })
            })
            .collect::<simpqe_core::Result<Vec<_>>>()?
    };

    eprintln!("predicted {} {} labels (tau {})", rows.len(), args.aspect, policy.tau());
    write_output(args.out, &predictions_to_tsv(&rows))
}

pub struct CvArgs<'a> {
    pub dataset: Option<&'a Path>,
    pub aspect: Aspect,
    pub k: Option<usize>,
    pub taus: Vec<f64>,
    pub seed: u64,
    pub params: ForestParams,
    pub tsv: bool,
    pub predictions: Option<&'a Path>,
    pub show_folds: bool,
}

pub fn cv(cfg: &RunConfig, args: &CvArgs) -> Result<()> {
    if args.taus.is_empty() {
        bail!("--taus needs at least one value");
    }
    if args.predictions.is_some() && args.taus.len() != 1 {
        bail!("--predictions needs a single --taus value; the dump format has no tau column");
    }
    let pre = Preprocessor::shipped();
    let resources = cfg.load_resources(&pre)?;
    let ds = load_qats(&cfg.dataset_path(args.dataset)?)?;
    let k = cfg.k(args.k);

    let mut reports = Vec::new();
    let mut fold_reports: Vec<EvaluationReport> = Vec::new();
    for &tau in &args.taus {
        let cv_cfg = CvConfig {
            k,
            seed: args.seed,
            params: args.params.clone(),
            policy: ThresholdPolicy::new(tau)?,
        };
        let outcome = cross_validate(&ds, &resources, &pre, args.aspect, &cv_cfg)?;
        eprintln!(
            "tau {tau}: {k}-fold CV over {} pairs, accuracy {:.2}%",
            outcome.pooled.n, outcome.pooled.accuracy_pct
        );
        if args.show_folds {
            fold_reports.extend(outcome.folds.iter().map(|f| {
                let mut r = f.report.clone();
                r.run_name = format!("{}-{}", outcome.pooled.run_name, r.run_name);
                r
            }));
        }
        if let Some(path) = args.predictions {
            std::fs::write(path, predictions_to_tsv(&outcome.predictions))
                .with_context(|| format!("cannot write {}", path.display()))?;
            eprintln!("wrote predictions to {}", path.display());
        }
        reports.push(outcome.pooled);
    }
    reports.extend(fold_reports);

    if args.tsv {
        print!("{}", report_to_tsv(&reports));
    } else {
        print!("{}", render_report(&reports));
    }
    Ok(())
}

pub fn evaluate(gold: &Path, pred: &Path, tsv: bool) -> Result<()> {
    let ds = load_qats(gold)?;
    let text = std::fs::read_to_string(pred)
        .with_context(|| format!("cannot read predictions {}", pred.display()))?;
    let rows = parse_predictions_tsv(&text, &pred.display().to_string())?;
    if rows.is_empty() {
        bail!("predictions file {} has no data rows", pred.display());
    }
    let by_id: BTreeMap<&str, _> = ds.pairs.iter().map(|p| (p.id.as_str(), p)).collect();

    let mut grouped: BTreeMap<Aspect, (Vec<AspectLabel>, Vec<AspectLabel>)> = BTreeMap::new();
    for row in &rows {
        let Some(pair) = by_id.get(row.pair_id.as_str()) else {
            bail!("predicted pair '{}' is not in {}", row.pair_id, gold.display());
        };
        let Some(gold_label) = pair.label(row.aspect) else {
            bail!("pair '{}' has no gold {} label", row.pair_id, row.aspect);
        };
        let entry = grouped.entry(row.aspect).or_default();
        entry.0.push(gold_label);
        entry.1.push(row.pred);
    }
    let reports: Vec<EvaluationReport> = grouped
        .iter()
        .map(|(aspect, (g, p))| {
            Ok(EvaluationReport::from_labels(
                *aspect,
                aspect.to_string(),
                g,
                p,
            )?)
        })
        .collect::<Result<_>>()?;
    if tsv {
        print!("{}", report_to_tsv(&reports));
    } else {
        print!("{}", render_report(&reports));
    }
    Ok(())
}

pub fn stats(dataset: &Path) -> Result<()> {
    let ds = load_qats(dataset)?;
    let stats = dataset_stats(&ds);
    println!("{} pairs from {}", ds.pairs.len(), dataset.display());
    println!("{:<16} {:>6} {:>6} {:>6}", "aspect", "good", "ok", "bad");
    for aspect in Aspect::ALL {
        let Some(dist) = stats.get(&aspect) else {
            continue;
        };
        println!(
            "{:<16} {:>6.2} {:>6.2} {:>6.2}",
            aspect.to_string(),
            dist[&AspectLabel::Good],
            dist[&AspectLabel::Ok],
            dist[&AspectLabel::Bad]
        );
    }
    Ok(())
}
