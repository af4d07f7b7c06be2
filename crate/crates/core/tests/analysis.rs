use std::io::BufReader;
use std::path::Path;

use poslens::corpus::{
    read_conllu, read_jsonl, write_jsonl, write_tagged_corpus, Label, TaggedDocument,
};
use poslens::features::{
    extract_post_features, pronominalisation_index, read_feature_csv, write_feature_csv,
    FeatureRecord, UposDenominator, FEATURE_NAMES,
};
use poslens::stats::{keyness, student_t_cdf, welch_t, word_counts};
use poslens::synth::{generate_corpus, generate_treebank, SynthConfig};
use poslens::tagger::{
    annotate_sentence, assign_tense, tag_corpus, train_tagger, ModalLookahead, Ptb, TaggedToken,
    Tense, Upos,
};
use proptest::prelude::*;
use statrs::distribution::{ContinuousCDF, StudentsT};

fn small_config(seed: u64) -> SynthConfig {
    SynthConfig {
        posts_per_group: 30,
        posts_per_user: 5,
        min_tokens: 60,
        max_tokens: 90,
        seed,
        ..SynthConfig::default()
    }
}

fn sample() -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-100.0..100.0f64, 2..60)
}

proptest! {
    #[test]
    fn welch_is_antisymmetric(a in sample(), b in sample()) {
        let (ab, ba) = (welch_t(&a, &b).unwrap(), welch_t(&b, &a).unwrap());
        prop_assert_eq!(ab.t, -ba.t);
        prop_assert_eq!(ab.p_two_sided, ba.p_two_sided);
        prop_assert!((0.0..=1.0).contains(&ab.p_two_sided));
    }

    #[test]
    fn welch_p_agrees_with_statrs(a in sample(), b in sample()) {
        let r = welch_t(&a, &b).unwrap();
        prop_assume!(r.t.is_finite());
        let dist = StudentsT::new(0.0, 1.0, r.df).unwrap();
        let p = 2.0 * dist.cdf(-r.t.abs());
        prop_assert!((r.p_two_sided - p).abs() < 1e-8, "{} vs {}", r.p_two_sided, p);
    }

    #[test]
    fn t_cdf_is_monotone(x in -50.0..50.0f64, dx in 0.0..5.0f64, df in 0.5..500.0f64) {
        prop_assert!(student_t_cdf(x, df).unwrap() <= student_t_cdf(x + dx, df).unwrap() + 1e-15);
    }

    #[test]
    fn features_survive_duplication(seed in 0u64..500, k in 2usize..5) {
        let docs = generate_corpus(&small_config(seed)).unwrap().to_tagged(ModalLookahead::default());
        let toks = docs[0].flat_tokens();
        let once = extract_post_features(&toks, UposDenominator::Content).unwrap().to_row();
        let many: Vec<TaggedToken> = (0..k).flat_map(|_| toks.iter().cloned()).collect();
        let again = extract_post_features(&many, UposDenominator::Content).unwrap().to_row();
        prop_assert_eq!(once, again);
    }
}

#[test]
fn identical_samples_give_t_zero_p_one() {
    let a = [1.0, 2.0, 4.0, 8.0];
    let r = welch_t(&a, &a).unwrap();
    assert_eq!(r.t, 0.0);
    assert_eq!(r.p_two_sided, 1.0);
    assert!(welch_t(&[1.0], &a).is_err());
}

#[test]
fn future_needs_a_modal() {
    use Ptb::*;
    let t = assign_tense(&[PRP, MD, RB, VB, CC, VB, VBD], ModalLookahead::SkipAdverbs);
    assert_eq!(t[3], Some(Tense::Future));
    assert_eq!(t[5], Some(Tense::Present));
    assert_eq!(t[6], Some(Tense::Past));
    let strict = assign_tense(&[PRP, MD, RB, VB], ModalLookahead::Strict);
    assert_eq!(strict[3], Some(Tense::Present));
}

#[test]
fn pronominalisation_index_counts_proper_nouns() {
    let forms: Vec<String> = ["i", "met", "anna", "and", "her", "dog"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let toks = annotate_sentence(
        &forms,
        &[Ptb::PRP, Ptb::VBD, Ptb::NNP, Ptb::CC, Ptb::PRP, Ptb::NN],
        None,
        None,
        ModalLookahead::default(),
    );
    assert_eq!(pronominalisation_index(&toks), Some(1.0));
    assert_eq!(pronominalisation_index(&toks[..2]), None);
}

#[test]
fn identical_groups_have_no_keyness() {
    let docs = generate_corpus(&small_config(2))
        .unwrap()
        .to_tagged(ModalLookahead::default());
    let mirrored: Vec<TaggedDocument> = docs
        .iter()
        .map(|d| TaggedDocument {
            label: Label::Control,
            ..d.clone()
        })
        .collect();
    let t = word_counts(docs.iter(), &[Upos::NOUN], false);
    let c = word_counts(mirrored.iter(), &[Upos::NOUN], false);
    let r = keyness(&t, &c, 20, 1).unwrap();
    assert!(r.target.iter().chain(&r.reference).all(|e| e.g2 == 0.0));
}

#[test]
fn planted_groups_differ_in_the_planted_direction() {
    let cfg = SynthConfig {
        posts_per_group: 200,
        seed: 6,
        ..SynthConfig::default()
    };
    let docs = generate_corpus(&cfg)
        .unwrap()
        .to_tagged(ModalLookahead::default());
    let column = |label: Label, name: &str| -> Vec<f64> {
        let j = FEATURE_NAMES.iter().position(|&n| n == name).unwrap();
        docs.iter()
            .filter(|d| d.label == label)
            .filter_map(|d| {
                extract_post_features(&d.flat_tokens(), UposDenominator::Content)
                    .unwrap()
                    .to_row()[j]
            })
            .collect()
    };
    for (name, target_higher) in [("PRON", true), ("PROPN", false), ("pi", true)] {
        let r = welch_t(&column(Label::Target, name), &column(Label::Control, name)).unwrap();
        assert_eq!(r.t > 0.0, target_higher, "{name}: t = {}", r.t);
        assert!(r.p_two_sided < 1e-3, "{name}: p = {}", r.p_two_sided);
    }
}

#[test]
fn corpus_formats_round_trip() {
    let synth = generate_corpus(&small_config(4)).unwrap();
    let corpus = synth.to_corpus().unwrap();
    let mut buf = Vec::new();
    write_jsonl(&corpus, &mut buf).unwrap();
    let back = read_jsonl(BufReader::new(&buf[..]), Path::new("mem.jsonl")).unwrap();
    assert_eq!(back.documents(), corpus.documents());

    let docs = synth.to_tagged(ModalLookahead::default());
    let mut buf = Vec::new();
    write_tagged_corpus(&docs, &mut buf).unwrap();
    let parsed = read_conllu(
        BufReader::new(&buf[..]),
        Path::new("mem.conllu"),
        ModalLookahead::default(),
    )
    .unwrap();
    assert_eq!(parsed.len(), docs.len());
    for (p, d) in parsed.iter().zip(&docs) {
        assert_eq!(p.user_id.as_deref(), Some(d.user_id.as_str()));
        assert_eq!(p.label, Some(d.label));
        assert_eq!(p.sentences, d.sentences);
    }
}

#[test]
fn feature_csv_round_trip_keeps_missing_values() {
    let docs = generate_corpus(&small_config(5))
        .unwrap()
        .to_tagged(ModalLookahead::default());
    let mut records: Vec<FeatureRecord> = docs
        .iter()
        .enumerate()
        .map(|(i, d)| FeatureRecord {
            user_id: d.user_id.clone(),
            post_index: i,
            label: d.label,
            values: extract_post_features(&d.flat_tokens(), UposDenominator::Content)
                .unwrap()
                .to_row(),
        })
        .collect();
    records[0].values[3] = None;
    let mut buf = Vec::new();
    write_feature_csv(&records, &mut buf).unwrap();
    let back = read_feature_csv(&buf[..], Path::new("mem.csv")).unwrap();
    assert_eq!(back, records);
}

#[test]
fn trained_tagger_tags_synthetic_posts_accurately() {
    let bank = generate_treebank(1500, 10);
    let model = train_tagger(&bank, 4, 0).unwrap();
    assert_eq!(
        model.to_text(),
        train_tagger(&bank, 4, 0).unwrap().to_text()
    );

    let synth = generate_corpus(&small_config(11)).unwrap();
    let gold = synth.to_tagged(ModalLookahead::default());
    let tagged = tag_corpus(
        &model,
        &synth.to_corpus().unwrap(),
        ModalLookahead::default(),
    );
    assert_eq!(tagged.len(), gold.len());
    let (mut right, mut total) = (0usize, 0usize);
    for (t, g) in tagged.iter().zip(&gold) {
        assert_eq!((&t.user_id, t.label), (&g.user_id, g.label));
        let (tt, gt) = (t.flat_tokens(), g.flat_tokens());
        assert_eq!(tt.len(), gt.len());
        right += tt.iter().zip(&gt).filter(|(a, b)| a.ptb == b.ptb).count();
        total += gt.len();
    }
    assert!(right as f64 / total as f64 > 0.95, "{right}/{total}");
}
