use poslens::corpus::Label;
use poslens::model::{
    evaluate, grow_tree, stratified_split, train_forest, ClassWeighting, FeaturesPerSplit, Forest,
    ForestParams, Metrics, MissingValues,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Two-feature data where Target is shifted by `shift` on feature 0 and
/// feature 1 is noise; `n_target` of `n` rows are Target.
fn shifted(
    n: usize,
    n_target: usize,
    shift: f64,
    seed: u64,
) -> (Vec<Vec<Option<f64>>>, Vec<Label>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let target = i < n_target;
            let base: f64 = (0..4).map(|_| rng.gen_range(-1.0..1.0)).sum();
            let x0 = base + if target { shift } else { 0.0 };
            let x1: f64 = rng.gen_range(-1.0..1.0);
            (
                vec![Some(x0), Some(x1)],
                if target {
                    Label::Target
                } else {
                    Label::Control
                },
            )
        })
        .unzip()
}

#[test]
fn same_seed_same_forest_text() {
    let (x, y) = shifted(300, 100, 1.0, 1);
    let p = ForestParams {
        n_trees: 15,
        seed: 7,
        ..ForestParams::default()
    };
    let a = train_forest(&x, &y, &p).unwrap().to_text();
    let b = train_forest(&x, &y, &p).unwrap().to_text();
    assert_eq!(a, b);
    let c = train_forest(&x, &y, &ForestParams { seed: 8, ..p })
        .unwrap()
        .to_text();
    assert_ne!(a, c);
}

#[test]
fn grown_tree_ignores_row_order() {
    let (x, y) = shifted(120, 40, 0.8, 3);
    let dense: Vec<Vec<f64>> = x
        .iter()
        .map(|r| r.iter().map(|v| v.unwrap()).collect())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let draws: Vec<usize> = (0..dense.len())
        .map(|_| rng.gen_range(0..dense.len()))
        .collect();

    // reverse the rows and remap the draws to the same underlying samples
    let n = dense.len();
    let rx: Vec<Vec<f64>> = dense.iter().rev().cloned().collect();
    let ry: Vec<Label> = y.iter().rev().copied().collect();
    let rdraws: Vec<usize> = draws.iter().map(|&i| n - 1 - i).collect();

    let p = ForestParams {
        features_per_split: FeaturesPerSplit::All,
        ..ForestParams::default()
    };
    let a = grow_tree(
        &dense,
        &y,
        [1.0, 1.0],
        &draws,
        &p,
        &mut ChaCha8Rng::seed_from_u64(9),
    );
    let b = grow_tree(
        &rx,
        &ry,
        [1.0, 1.0],
        &rdraws,
        &p,
        &mut ChaCha8Rng::seed_from_u64(9),
    );
    assert_eq!(a.nodes(), b.nodes());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn depth_never_exceeds_bound(max_depth in 1usize..8, seed in 0u64..1000, leaf in 1usize..5) {
        let (x, y) = shifted(150, 50, 0.5, seed);
        let p = ForestParams { n_trees: 4, max_depth, min_samples_leaf: leaf, seed, ..ForestParams::default() };
        let f = train_forest(&x, &y, &p).unwrap();
        prop_assert!(f.max_depth() <= max_depth);
        for t in f.trees() {
            prop_assert!(t.depth() <= max_depth);
        }
    }

    #[test]
    fn probabilities_stay_in_unit_interval(seed in 0u64..1000, v0 in -10.0..10.0f64, v1 in -10.0..10.0f64) {
        let (x, y) = shifted(80, 30, 1.0, seed);
        let f = train_forest(&x, &y, &ForestParams { n_trees: 5, seed, ..ForestParams::default() }).unwrap();
        let p = f.predict_proba(&[Some(v0), Some(v1)]).unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
    }
}

#[test]
fn balanced_weights_raise_minority_recall() {
    let (x, y) = shifted(1000, 100, 1.0, 11);
    let (xt, yt) = shifted(1000, 100, 1.0, 12);
    let recall = |class_weighting| {
        let p = ForestParams {
            n_trees: 30,
            max_depth: 4,
            class_weighting,
            seed: 1,
            ..ForestParams::default()
        };
        let f = train_forest(&x, &y, &p).unwrap();
        let m = evaluate(&f, &xt, &yt, 0.5).unwrap();
        // the rare class is the harder one, so the support-weighted average leads
        assert!(m.weighted_f1 > m.macro_f1);
        m.class(Label::Target).recall
    };
    let (balanced, uniform) = (
        recall(ClassWeighting::Balanced),
        recall(ClassWeighting::Uniform),
    );
    assert!(
        balanced > uniform,
        "balanced {balanced} vs uniform {uniform}"
    );
}

#[test]
fn more_separation_never_hurts_much() {
    let f1 = |shift: f64| {
        let (x, y) = shifted(400, 200, shift, 21);
        let (xt, yt) = shifted(400, 200, shift, 22);
        let f = train_forest(
            &x,
            &y,
            &ForestParams {
                n_trees: 20,
                seed: 4,
                ..ForestParams::default()
            },
        )
        .unwrap();
        evaluate(&f, &xt, &yt, 0.5).unwrap().macro_f1
    };
    let scores: Vec<f64> = [0.0, 1.0, 3.0, 8.0].iter().map(|&s| f1(s)).collect();
    assert!(scores[0] < 0.65, "{scores:?}");
    assert!(scores.windows(2).all(|w| w[1] >= w[0] - 0.02), "{scores:?}");
    assert!(scores[3] > 0.99, "{scores:?}");
}

#[test]
fn missing_value_modes() {
    let (mut x, y) = shifted(200, 80, 2.0, 5);
    for row in x.iter_mut().step_by(7) {
        row[1] = None;
    }
    let median = train_forest(
        &x,
        &y,
        &ForestParams {
            n_trees: 5,
            ..ForestParams::default()
        },
    )
    .unwrap();
    assert!(median.predict_proba(&[None, None]).is_ok());
    let dropped = train_forest(
        &x,
        &y,
        &ForestParams {
            n_trees: 5,
            missing: MissingValues::DropRows,
            ..ForestParams::default()
        },
    )
    .unwrap();
    assert_eq!(dropped.n_features(), 2);
}

#[test]
fn single_class_training_is_rejected() {
    let x = vec![vec![Some(1.0)], vec![Some(2.0)]];
    assert!(train_forest(
        &x,
        &[Label::Control, Label::Control],
        &ForestParams::default()
    )
    .is_err());
}

#[test]
fn persisted_forest_predicts_identically() {
    let (x, y) = shifted(150, 60, 1.5, 8);
    let f = train_forest(
        &x,
        &y,
        &ForestParams {
            n_trees: 6,
            ..ForestParams::default()
        },
    )
    .unwrap()
    .with_feature_names(vec!["a".into(), "b".into()])
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("forest.model");
    f.save(&path).unwrap();
    let g = Forest::load(&path).unwrap();
    assert_eq!(g.feature_names(), f.feature_names());
    for row in &x {
        assert_eq!(
            f.predict_proba(row).unwrap().to_bits(),
            g.predict_proba(row).unwrap().to_bits()
        );
    }
    assert_eq!(g.to_text(), f.to_text());
}

#[test]
fn stratified_split_keeps_class_shares() {
    let labels: Vec<Label> = (0..100)
        .map(|i| {
            if i < 30 {
                Label::Target
            } else {
                Label::Control
            }
        })
        .collect();
    let (train, test) = stratified_split(&labels, 0.2, 3).unwrap();
    assert_eq!(test.len(), 20);
    assert_eq!(
        test.iter().filter(|&&i| labels[i] == Label::Target).count(),
        6
    );
    assert_eq!(train.len() + test.len(), 100);
    assert_eq!(stratified_split(&labels, 0.2, 3).unwrap().1, test);
}

#[test]
fn metrics_hand_example() {
    use Label::{Control, Target};
    let m = Metrics::from_predictions(&[Control, Control, Control, Target], &[Control; 4]).unwrap();
    // Control F1 = 2·(3/4)·1/(3/4 + 1) = 6/7, Target F1 = 0
    assert!((m.macro_f1 - 3.0 / 7.0).abs() < 1e-12);
    assert!((m.weighted_f1 - 0.75 * 6.0 / 7.0).abs() < 1e-12);
    assert_eq!(m.accuracy, 0.75);
}
