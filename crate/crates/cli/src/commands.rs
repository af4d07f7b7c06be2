use std::collections::HashMap;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use poslens::corpus::{
    load_conllu_with, load_erisk_xml, load_jsonl, load_tagged_corpus, read_conllu, write_jsonl,
    write_tagged_corpus, Corpus, Label, TaggedDocument,
};
use poslens::explain::shap_summary;
use poslens::features::{
    aggregate_rows, column_values, extract_post_features, per_user_means, read_feature_csv,
    write_feature_csv, FeatureRecord, FeatureRow, GroupSummary, FEATURE_NAMES,
};
use poslens::model::{evaluate, stratified_split, train_forest, Forest, ForestParams, Metrics};
use poslens::stats::{keyness, welch_t, word_counts, KeynessEntry};
use poslens::synth::{generate_corpus, generate_treebank, GroupProfile, SynthConfig, TenseMix};
use poslens::tagger::{
    annotate_sentence, holdout_split, tag_corpus, train_tagger, ModalLookahead, TaggedSentence,
    TaggerModel, Upos,
};
use serde::Serialize;

use crate::args::{
    AnalyzeArgs, CorpusArgs, ExplainArgs, GlobalArgs, InputFormat, RunConfig, SynthArgs,
    TrainEvalArgs, TrainTaggerArgs,
};
use crate::error::{CliError, CliResult};
use crate::manifest::OutputDir;

pub const TAGGED_FILE: &str = "tagged.conllu";
pub const FEATURES_FILE: &str = "features.csv";
pub const FOREST_FILE: &str = "forest.model";
pub const METRICS_FILE: &str = "metrics.json";
pub const ATTRIBUTIONS_FILE: &str = "attributions.csv";
pub const SHAP_SUMMARY_FILE: &str = "shap_summary.csv";
pub const SYNTH_CORPUS_FILE: &str = "corpus.jsonl";
pub const SYNTH_GOLD_FILE: &str = "corpus_gold.conllu";
pub const SYNTH_MANIFEST_FILE: &str = "planted_rates.json";
pub const TREEBANK_FILE: &str = "treebank.conllu";
pub const TAGGER_FILE: &str = "tagger.model";
pub const TAGGER_EVAL_FILE: &str = "tagger_eval.json";

/// Report tables written by `analyze`, in order.
pub const REPORT_FILES: [&str; 7] = [
    "content_pos.csv",
    "keyness.csv",
    "verb_tenses.csv",
    "functional_pos.csv",
    "personal_pronouns.csv",
    "indices.csv",
    "welch_tests.csv",
];

const CONTENT_POS: [&str; 5] = ["ADJ", "ADV", "NOUN", "PROPN", "VERB"];
const FUNCTIONAL_POS: [&str; 7] = ["ADP", "AUX", "CCONJ", "DET", "PART", "PRON", "SCONJ"];
const VERB_TENSES: [&str; 3] = ["tense_past", "tense_present", "tense_future"];
const PERSONAL_PRONOUNS: [&str; 5] = [
    "person_first",
    "person_second",
    "person_third",
    "first_singular",
    "first_plural",
];
const INDICES: [&str; 2] = ["pi", "formality"];

/// Run the configured command; returns the paths it wrote.
pub fn run(config: &RunConfig) -> CliResult<Vec<PathBuf>> {
    use crate::args::Command::*;
    match &config.command {
        Tag(a) => cmd_tag(config, a),
        Analyze(a) => cmd_analyze(config, a),
        TrainEval(a) => cmd_train_eval(config, a),
        Explain(a) => cmd_explain(config, a),
        Synth(a) => cmd_synth(config, a),
        TrainTagger(a) => cmd_train_tagger(config, a),
    }
}

fn lookahead(args: &CorpusArgs) -> ModalLookahead {
    if args.strict_md {
        ModalLookahead::Strict
    } else {
        ModalLookahead::SkipAdverbs
    }
}

fn load_raw(global: &GlobalArgs, args: &CorpusArgs) -> CliResult<Corpus> {
    let mut parts = Vec::new();
    for spec in &args.inputs {
        let part = match (global.format, spec.label) {
            (InputFormat::Jsonl, None) => load_jsonl(&spec.path)?,
            (InputFormat::Jsonl, Some(_)) => {
                return Err(CliError::Usage(format!(
                    "{spec}: JSONL records carry their own labels; pass the path without a LABEL= prefix"
                )))
            }
            (InputFormat::EriskXml, Some(label)) => load_erisk_xml(&spec.path, label)?,
            (InputFormat::EriskXml, None) => {
                return Err(CliError::Usage(format!(
                    "{spec}: eRisk XML input needs a label, e.g. target={}",
                    spec.path.display()
                )))
            }
            (InputFormat::Conllu, _) => unreachable!("CoNLL-U input is already tagged"),
        };
        parts.push(part);
    }
    Ok(Corpus::merge(parts)?)
}

fn check_user_labels(docs: &[TaggedDocument]) -> CliResult<()> {
    let mut seen: HashMap<&str, Label> = HashMap::new();
    for d in docs {
        if let Some(&l) = seen.get(d.user_id.as_str()) {
            if l != d.label {
                return Err(poslens::Error::ConflictingLabel(d.user_id.clone()).into());
            }
        } else {
            seen.insert(&d.user_id, d.label);
        }
    }
    Ok(())
}

/// Tagged posts from the configured inputs, tagging raw text when needed.
fn load_posts(
    global: &GlobalArgs,
    args: &CorpusArgs,
    out: &mut OutputDir,
) -> CliResult<Vec<TaggedDocument>> {
    for spec in &args.inputs {
        out.record_input(&spec.path)?;
    }
    let la = lookahead(args);
    if global.format == InputFormat::Conllu {
        let mut docs = Vec::new();
        for spec in &args.inputs {
            match spec.label {
                Some(label) => {
                    let user = spec
                        .path
                        .file_stem()
                        .map(|s| s.to_string_lossy().into_owned())
                        .unwrap_or_else(|| "user".into());
                    docs.extend(load_conllu_with(&spec.path, label, &user, la)?);
                }
                None => docs.extend(load_tagged_corpus(&spec.path, la)?.0),
            }
        }
        check_user_labels(&docs)?;
        return Ok(docs);
    }
    let Some(model_path) = &args.tagger else {
        return Err(CliError::MissingModel(
            "raw-text input needs a tagger model: train one with `poslens train-tagger --treebank <file.conllu>` \
             and pass it with --tagger, or supply pre-tagged input with --format conllu"
                .into(),
        ));
    };
    let corpus = load_raw(global, args)?;
    out.record_input(model_path)?;
    let model = TaggerModel::load(model_path)?;
    Ok(tag_corpus(&model, &corpus, la))
}

pub fn cmd_tag(config: &RunConfig, args: &CorpusArgs) -> CliResult<Vec<PathBuf>> {
    let mut out = OutputDir::create(&config.global.out_dir)?;
    let docs = load_posts(&config.global, args, &mut out)?;
    let mut buf = Vec::new();
    write_tagged_corpus(&docs, &mut buf).expect("writing to memory");
    out.write(TAGGED_FILE, &buf)?;
    out.finish(config)
}

fn num(v: f64) -> String {
    format!("{v}")
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), num)
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("writing to memory");
    for r in rows {
        w.write_record(&r).expect("writing to memory");
    }
    w.into_inner().expect("writing to memory")
}

fn feature_index(name: &str) -> usize {
    FEATURE_NAMES
        .iter()
        .position(|&n| n == name)
        .expect("known feature")
}

fn group_table(features: &[&str], target: &GroupSummary, control: &GroupSummary) -> Vec<u8> {
    let rows = features.iter().map(|&f| {
        let (t, c) = (
            &target.stats[feature_index(f)],
            &control.stats[feature_index(f)],
        );
        vec![
            f.to_string(),
            opt(t.mean),
            opt(t.std),
            t.count.to_string(),
            opt(c.mean),
            opt(c.std),
            c.count.to_string(),
        ]
    });
    csv_bytes(
        &[
            "feature",
            "mean_target",
            "std_target",
            "n_target",
            "mean_control",
            "std_control",
            "n_control",
        ],
        rows,
    )
}

fn welch_table(target: &[FeatureRow], control: &[FeatureRow]) -> Vec<u8> {
    let rows = FEATURE_NAMES.iter().enumerate().map(|(j, name)| {
        let (a, b) = (column_values(target, j), column_values(control, j));
        match welch_t(&a, &b) {
            Ok(r) => vec![
                name.to_string(),
                num(r.mean_a),
                num(r.mean_b),
                num(r.t),
                num(r.df),
                num(r.p_two_sided),
            ],
            Err(e) => {
                log::warn!("Welch test skipped for {name}: {e}");
                let mean =
                    |v: &[f64]| (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64);
                vec![
                    name.to_string(),
                    opt(mean(&a)),
                    opt(mean(&b)),
                    "NA".into(),
                    "NA".into(),
                    "NA".into(),
                ]
            }
        }
    });
    csv_bytes(
        &["feature", "mean_target", "mean_control", "t", "df", "p"],
        rows,
    )
}

fn keyness_rows(docs: &[TaggedDocument], upos: Upos, args: &AnalyzeArgs) -> Vec<Vec<String>> {
    let filter = [upos];
    let of = |label: Label| {
        word_counts(
            docs.iter().filter(|d| d.label == label),
            &filter,
            args.lemma,
        )
    };
    let ranking = match keyness(
        &of(Label::Target),
        &of(Label::Control),
        args.keyness_top_k,
        args.keyness_min_count,
    ) {
        Ok(r) => r,
        Err(e) => {
            log::warn!("keyness for {upos} skipped: {e}");
            return Vec::new();
        }
    };
    let row = |rank: usize, e: &KeynessEntry| {
        vec![
            e.word.clone(),
            e.count_target.to_string(),
            e.count_reference.to_string(),
            num(e.g2),
            e.overused_in.to_string(),
            (rank + 1).to_string(),
            upos.to_string(),
        ]
    };
    ranking
        .target
        .iter()
        .enumerate()
        .chain(ranking.reference.iter().enumerate())
        .map(|(i, e)| row(i, e))
        .collect()
}

pub fn cmd_analyze(config: &RunConfig, args: &AnalyzeArgs) -> CliResult<Vec<PathBuf>> {
    let mut out = OutputDir::create(&config.global.out_dir)?;
    let docs = load_posts(&config.global, &args.corpus, &mut out)?;

    let mut records = Vec::with_capacity(docs.len());
    for (i, doc) in docs.iter().enumerate() {
        match extract_post_features(&doc.flat_tokens(), args.denominator.into()) {
            Some(v) => records.push(FeatureRecord {
                user_id: doc.user_id.clone(),
                post_index: i,
                label: doc.label,
                values: v.to_row(),
            }),
            None => log::warn!("post {i} of user {} has no tokens; skipped", doc.user_id),
        }
    }
    if args.per_user {
        records = per_user_means(&records);
    }
    let rows = |label: Label| -> Vec<FeatureRow> {
        records
            .iter()
            .filter(|r| r.label == label)
            .map(|r| r.values)
            .collect()
    };
    let (target, control) = (rows(Label::Target), rows(Label::Control));
    if target.is_empty() || control.is_empty() {
        return Err(poslens::Error::InsufficientData(format!(
            "both groups required: {} target and {} control rows",
            target.len(),
            control.len()
        ))
        .into());
    }
    let (st, sc) = (
        aggregate_rows(&target, Label::Target),
        aggregate_rows(&control, Label::Control),
    );

    let mut keyness = keyness_rows(&docs, Upos::NOUN, args);
    keyness.extend(keyness_rows(&docs, Upos::VERB, args));
    let keyness_csv = csv_bytes(
        &[
            "word",
            "count_target",
            "count_reference",
            "g2",
            "overused_in",
            "rank",
            "pos",
        ],
        keyness,
    );
    let tables: [Vec<u8>; 7] = [
        group_table(&CONTENT_POS, &st, &sc),
        keyness_csv,
        group_table(&VERB_TENSES, &st, &sc),
        group_table(&FUNCTIONAL_POS, &st, &sc),
        group_table(&PERSONAL_PRONOUNS, &st, &sc),
        group_table(&INDICES, &st, &sc),
        welch_table(&target, &control),
    ];
    for (name, bytes) in REPORT_FILES.iter().zip(&tables) {
        out.write(name, bytes)?;
    }
    let mut features = Vec::new();
    write_feature_csv(&records, &mut features)?;
    out.write(FEATURES_FILE, &features)?;
    out.finish(config)
}

fn read_features(path: &Path) -> CliResult<Vec<FeatureRecord>> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    Ok(read_feature_csv(BufReader::new(file), path)?)
}

fn matrix(records: &[FeatureRecord]) -> (Vec<Vec<Option<f64>>>, Vec<Label>) {
    records.iter().map(|r| (r.values.to_vec(), r.label)).unzip()
}

#[derive(Serialize)]
struct EvalReport<'a> {
    threshold: f64,
    n_train: usize,
    n_test: usize,
    forest_max_depth: usize,
    metrics: &'a Metrics,
}

pub fn cmd_train_eval(config: &RunConfig, args: &TrainEvalArgs) -> CliResult<Vec<PathBuf>> {
    let mut out = OutputDir::create(&config.global.out_dir)?;
    out.record_input(&args.train)?;
    let train_records = read_features(&args.train)?;
    let (train, test) = match &args.test {
        Some(path) => {
            out.record_input(path)?;
            (train_records, read_features(path)?)
        }
        None => {
            let labels: Vec<Label> = train_records.iter().map(|r| r.label).collect();
            let (tr, te) = stratified_split(&labels, args.test_fraction, config.global.seed)?;
            (
                tr.iter().map(|&i| train_records[i].clone()).collect(),
                te.iter().map(|&i| train_records[i].clone()).collect(),
            )
        }
    };
    let params = ForestParams {
        n_trees: args.n_trees,
        max_depth: args.max_depth,
        class_weighting: args.class_weighting,
        features_per_split: args.features_per_split,
        min_samples_leaf: args.min_samples_leaf,
        missing: args.missing,
        seed: config.global.seed,
    };
    let (x, y) = matrix(&train);
    let forest = train_forest(&x, &y, &params)?
        .with_feature_names(FEATURE_NAMES.iter().map(|s| s.to_string()).collect())?;
    let (xt, yt) = matrix(&test);
    let metrics = evaluate(&forest, &xt, &yt, args.threshold)?;
    let report = EvalReport {
        threshold: args.threshold,
        n_train: train.len(),
        n_test: test.len(),
        forest_max_depth: forest.max_depth(),
        metrics: &metrics,
    };
    out.write(FOREST_FILE, forest.to_text().as_bytes())?;
    let mut json = serde_json::to_string_pretty(&report).expect("metrics serialize");
    json.push('\n');
    out.write(METRICS_FILE, json.as_bytes())?;
    out.finish(config)
}

pub fn cmd_explain(config: &RunConfig, args: &ExplainArgs) -> CliResult<Vec<PathBuf>> {
    let mut out = OutputDir::create(&config.global.out_dir)?;
    out.record_input(&args.model)?;
    out.record_input(&args.features)?;
    let forest = Forest::load(&args.model)?;
    if forest
        .feature_names()
        .iter()
        .map(String::as_str)
        .ne(FEATURE_NAMES)
    {
        return Err(poslens::Error::ModelFormat(format!(
            "{}: forest features do not match the feature matrix columns",
            args.model.display()
        ))
        .into());
    }
    let records = read_features(&args.features)?;
    let (x, _) = matrix(&records);
    let mut summary = shap_summary(&forest, &x, args.sample_size, config.global.seed)?;
    // export the posts' own indices rather than matrix row numbers
    for row in summary.rows.iter_mut() {
        *row = records[*row].post_index;
    }
    let mut buf = Vec::new();
    summary.write_attributions_csv(&mut buf, args.top_k)?;
    out.write(ATTRIBUTIONS_FILE, &buf)?;
    let mut buf = Vec::new();
    summary.write_summary_csv(&mut buf)?;
    out.write(SHAP_SUMMARY_FILE, &buf)?;
    out.finish(config)
}

fn tense_mix(v: &[f64]) -> CliResult<TenseMix> {
    match *v {
        [past, present, future] => Ok(TenseMix {
            past,
            present,
            future,
        }),
        _ => Err(CliError::Usage(format!(
            "tense mix needs three weights, got {}",
            v.len()
        ))),
    }
}

pub fn synth_config(seed: u64, a: &SynthArgs) -> CliResult<SynthConfig> {
    let c = SynthConfig {
        posts_per_group: a.posts_per_group,
        posts_per_user: a.posts_per_user,
        min_tokens: a.min_tokens,
        max_tokens: a.max_tokens,
        jitter: a.jitter,
        target: GroupProfile {
            first_singular_rate: a.target_first_singular,
            propn_rate: a.target_propn,
            tense_mix: tense_mix(&a.target_tense_mix)?,
            adjective_prob: a.target_adjective_prob,
            pp_prob: a.target_pp_prob,
        },
        control: GroupProfile {
            first_singular_rate: a.control_first_singular,
            propn_rate: a.control_propn,
            tense_mix: tense_mix(&a.control_tense_mix)?,
            adjective_prob: a.control_adjective_prob,
            pp_prob: a.control_pp_prob,
        },
        seed,
    };
    Ok(if a.no_separation {
        c.without_separation()
    } else {
        c
    })
}

pub fn cmd_synth(config: &RunConfig, args: &SynthArgs) -> CliResult<Vec<PathBuf>> {
    let mut out = OutputDir::create(&config.global.out_dir)?;
    let synth = generate_corpus(&synth_config(config.global.seed, args)?)?;

    let mut buf = Vec::new();
    write_jsonl(&synth.to_corpus()?, &mut buf).expect("writing to memory");
    out.write(SYNTH_CORPUS_FILE, &buf)?;
    let mut buf = Vec::new();
    write_tagged_corpus(&synth.to_tagged(ModalLookahead::default()), &mut buf)
        .expect("writing to memory");
    out.write(SYNTH_GOLD_FILE, &buf)?;
    let mut json = serde_json::to_string_pretty(&synth.manifest).expect("manifest serializes");
    json.push('\n');
    out.write(SYNTH_MANIFEST_FILE, json.as_bytes())?;

    if args.treebank_sentences > 0 {
        // a different stream from the corpus so the two never share sentences by construction
        let bank = generate_treebank(args.treebank_sentences, config.global.seed.wrapping_add(1));
        let doc = TaggedDocument {
            user_id: "treebank".into(),
            label: Label::Control,
            sentences: bank
                .iter()
                .map(|s| {
                    let (forms, tags): (Vec<String>, Vec<_>) = s.iter().cloned().unzip();
                    annotate_sentence(&forms, &tags, None, None, ModalLookahead::default())
                })
                .collect(),
        };
        let mut buf = Vec::new();
        write_tagged_corpus(&[doc], &mut buf).expect("writing to memory");
        out.write(TREEBANK_FILE, &buf)?;
    }
    out.finish(config)
}

#[derive(Serialize)]
struct TaggerReport {
    epochs: usize,
    seed: u64,
    train_sentences: usize,
    heldout_sentences: usize,
    heldout_tokens: usize,
    heldout_accuracy: f64,
}

/// Gold `(form, XPOS)` sentences from a CoNLL-U file.
pub fn read_treebank(path: &Path) -> CliResult<Vec<TaggedSentence>> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let docs = read_conllu(BufReader::new(file), path, ModalLookahead::default())?;
    Ok(docs
        .into_iter()
        .flat_map(|d| d.sentences)
        .map(|s| s.into_iter().map(|t| (t.form, t.ptb)).collect())
        .collect())
}

pub fn cmd_train_tagger(config: &RunConfig, args: &TrainTaggerArgs) -> CliResult<Vec<PathBuf>> {
    let mut out = OutputDir::create(&config.global.out_dir)?;
    out.record_input(&args.treebank)?;
    let sentences = read_treebank(&args.treebank)?;
    let (train, held_out) = holdout_split(sentences, args.holdout, config.global.seed)?;
    let model = train_tagger(&train, args.epochs, config.global.seed)?;
    let report = TaggerReport {
        epochs: args.epochs,
        seed: config.global.seed,
        train_sentences: train.len(),
        heldout_sentences: held_out.len(),
        heldout_tokens: held_out.iter().map(Vec::len).sum(),
        heldout_accuracy: model.accuracy(&held_out),
    };
    out.write(TAGGER_FILE, model.to_text().as_bytes())?;
    let mut json = serde_json::to_string_pretty(&report).expect("report serializes");
    json.push('\n');
    out.write(TAGGER_EVAL_FILE, json.as_bytes())?;
    out.finish(config)
}
