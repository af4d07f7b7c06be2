use poslens::corpus::Label;
use poslens::explain::{
    brute_force_shap_values, coalition_value, expected_value, forest_shap, shap_summary, tree_shap,
    tree_shap_values,
};
use poslens::model::{train_forest, Forest, ForestParams, Node, Tree};
use proptest::prelude::*;

fn split(feature: usize, threshold: f64, left: usize, right: usize, cover: f64) -> Node {
    Node::Split {
        feature,
        threshold,
        left,
        right,
        cover,
    }
}

fn leaf(value: f64, cover: f64) -> Node {
    Node::Leaf { value, cover }
}

/// Root splits f0 at 0.5 (cover 10); both children split f1 at 0.5.
fn depth_two_tree() -> Tree {
    Tree::from_nodes(vec![
        split(0, 0.5, 1, 2, 10.0),
        split(1, 0.5, 3, 4, 6.0),
        split(1, 0.5, 5, 6, 4.0),
        leaf(0.0, 2.0),
        leaf(1.0, 4.0),
        leaf(0.2, 1.0),
        leaf(0.8, 3.0),
    ])
    .unwrap()
}

#[test]
fn hand_worked_depth_two_tree() {
    let tree = depth_two_tree();
    let x = [0.0, 1.0];
    // coalition values, computed by hand from the covers
    let v_none: f64 = 0.6 * (4.0 / 6.0) + 0.4 * (0.25 * 0.2 + 0.75 * 0.8);
    let v0 = 4.0 / 6.0;
    let v1 = 0.6 * 1.0 + 0.4 * 0.8;
    let v01 = 1.0;
    assert!((v_none - 0.66).abs() < 1e-12);
    assert!((coalition_value(&tree, &x, 0b00) - v_none).abs() < 1e-12);
    assert!((coalition_value(&tree, &x, 0b01) - v0).abs() < 1e-12);
    assert!((coalition_value(&tree, &x, 0b10) - v1).abs() < 1e-12);
    assert!((coalition_value(&tree, &x, 0b11) - v01).abs() < 1e-12);

    let phi0 = 1.0 / 3.0 - 0.29;
    let phi1 = 0.13 + 1.0 / 6.0;
    let a = tree_shap(&tree, &x).unwrap();
    assert!((a.phi[0] - phi0).abs() < 1e-12, "{:?}", a.phi);
    assert!((a.phi[1] - phi1).abs() < 1e-12, "{:?}", a.phi);
    assert!((a.base_value - 0.66).abs() < 1e-12);
    assert!((a.model_output - 1.0).abs() < 1e-12);
    assert!((expected_value(&tree) - 0.66).abs() < 1e-12);
}

#[test]
fn symmetric_features_get_equal_credit() {
    // output is 1 only when both features exceed 0.5; the two roles mirror each other
    let tree = Tree::from_nodes(vec![
        split(0, 0.5, 1, 2, 8.0),
        leaf(0.0, 4.0),
        split(1, 0.5, 3, 4, 4.0),
        leaf(0.0, 2.0),
        leaf(1.0, 2.0),
    ])
    .unwrap();
    let phi = tree_shap_values(&tree, &[1.0, 1.0]).unwrap();
    assert!((phi[0] - phi[1]).abs() < 1e-12, "{phi:?}");
}

#[test]
fn unused_feature_gets_zero() {
    let tree = depth_two_tree();
    let phi = tree_shap_values(&tree, &[0.0, 1.0, 42.0]).unwrap();
    assert_eq!(phi[2], 0.0);
}

#[test]
fn repeated_feature_on_a_path() {
    let tree = Tree::from_nodes(vec![
        split(0, 0.5, 1, 2, 10.0),
        split(0, 0.2, 3, 4, 7.0),
        leaf(0.9, 3.0),
        leaf(0.1, 2.0),
        split(1, 0.3, 5, 6, 5.0),
        leaf(0.4, 1.0),
        leaf(0.7, 4.0),
    ])
    .unwrap();
    for x in [[0.1, 0.0], [0.3, 0.9], [0.8, 0.1]] {
        let fast = tree_shap_values(&tree, &x).unwrap();
        let slow = brute_force_shap_values(&tree, &x).unwrap();
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).abs() < 1e-12, "{fast:?} vs {slow:?}");
        }
    }
}

fn arb_tree(n_features: usize) -> impl Strategy<Value = Tree> {
    // (feature, threshold, left share, leaf value, stop early) per slot of a complete depth-3 layout
    proptest::collection::vec(
        (
            0..n_features,
            0.0..1.0f64,
            0.05..0.95f64,
            0.0..1.0f64,
            any::<bool>(),
        ),
        15,
    )
    .prop_map(|slots| {
        fn build(
            slots: &[(usize, f64, f64, f64, bool)],
            slot: usize,
            cover: f64,
            depth: usize,
            nodes: &mut Vec<Node>,
        ) -> usize {
            let id = nodes.len();
            let (f, t, share, v, stop) = slots[slot];
            if depth == 3 || (stop && depth > 0) {
                nodes.push(leaf(v, cover));
                return id;
            }
            nodes.push(leaf(0.0, cover));
            let l = build(slots, 2 * slot + 1, cover * share, depth + 1, nodes);
            let r = build(slots, 2 * slot + 2, cover * (1.0 - share), depth + 1, nodes);
            nodes[id] = split(f, t, l, r, cover);
            id
        }
        let mut nodes = Vec::new();
        build(&slots, 0, 100.0, 0, &mut nodes);
        Tree::from_nodes(nodes).unwrap()
    })
}

proptest! {
    #[test]
    fn treeshap_equals_brute_force(tree in arb_tree(4), x in proptest::collection::vec(0.0..1.0f64, 4)) {
        let fast = tree_shap_values(&tree, &x).unwrap();
        let slow = brute_force_shap_values(&tree, &x).unwrap();
        for (a, b) in fast.iter().zip(&slow) {
            prop_assert!((a - b).abs() <= 1e-9);
        }
        let a = tree_shap(&tree, &x).unwrap();
        prop_assert!(a.local_accuracy_gap() <= 1e-9);
    }
}

fn toy_forest() -> (Forest, Vec<Vec<Option<f64>>>) {
    let x: Vec<Vec<Option<f64>>> = (0..60)
        .map(|i| {
            let a = (i % 10) as f64;
            let b = ((i * 7) % 13) as f64;
            vec![Some(a), Some(b), Some(1.0)]
        })
        .collect();
    let y: Vec<Label> = x
        .iter()
        .map(|r| {
            if r[0].unwrap() + 0.3 * r[1].unwrap() > 6.0 {
                Label::Target
            } else {
                Label::Control
            }
        })
        .collect();
    let params = ForestParams {
        n_trees: 10,
        seed: 2,
        ..ForestParams::default()
    };
    (train_forest(&x, &y, &params).unwrap(), x)
}

#[test]
fn forest_attribution_is_locally_accurate_with_missing_values() {
    let (forest, mut x) = toy_forest();
    x[0][1] = None;
    for row in &x {
        let a = forest_shap(&forest, row).unwrap();
        assert!(a.local_accuracy_gap() <= 1e-9);
        assert!((a.model_output - forest.predict_proba(row).unwrap()).abs() <= 1e-12);
    }
}

#[test]
fn summary_sampling_is_seeded_and_validated() {
    let (forest, x) = toy_forest();
    let a = shap_summary(&forest, &x, 20, 5).unwrap();
    let b = shap_summary(&forest, &x, 20, 5).unwrap();
    assert_eq!(a.rows, b.rows);
    assert_eq!(a.rows.len(), 20);
    let all = shap_summary(&forest, &x, x.len(), 9).unwrap();
    assert_eq!(all.rows, (0..x.len()).collect::<Vec<_>>());
    assert!(shap_summary(&forest, &x, x.len() + 1, 0).is_err());
    // the constant third column never splits, so it ranks last with zero weight
    let last = all.ranking.last().unwrap();
    assert_eq!(last.feature, 2);
    assert_eq!(last.mean_abs_phi, 0.0);

    let mut csv = Vec::new();
    all.write_summary_csv(&mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert_eq!(text.lines().next(), Some("feature,mean_abs_phi,rank"));
    assert_eq!(text.lines().count(), 4);
}
