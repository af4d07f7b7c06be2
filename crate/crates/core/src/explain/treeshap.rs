//! Exact path-dependent Shapley values for a single tree in polynomial time.
//!
//! Follows Lundberg et al.'s recursive algorithm: while walking the tree the
//! path of unique features seen so far is kept together with the weight of
//! every coalition size, so each leaf can credit its value to the features on
//! its path without enumerating subsets.

use crate::error::{Error, Result};
use crate::model::{Node, Tree};

#[derive(Clone, Copy, Debug)]
struct PathElement {
    feature: usize,
    /// Fraction of cover that follows this path when the feature is unknown.
    zero_fraction: f64,
    /// 1 if `x` follows this path when the feature is known, else 0.
    one_fraction: f64,
    weight: f64,
}

/// Rejects trees whose nodes lack a positive cover, or that split on
/// features `x` does not have.
pub(crate) fn check_tree(tree: &Tree, n_features: usize) -> Result<()> {
    for (i, node) in tree.nodes().iter().enumerate() {
        if node.cover().is_nan() || node.cover() <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "node {i} has no positive cover; path-dependent attribution needs covers on every node"
            )));
        }
    }
    if let Some(j) = tree.max_feature() {
        if j >= n_features {
            return Err(Error::InvalidInput(format!(
                "tree splits on feature {j} but only {n_features} values were given"
            )));
        }
    }
    Ok(())
}

/// Cover-weighted mean leaf value, the output when no feature is known.
pub fn expected_value(tree: &Tree) -> f64 {
    fn walk(nodes: &[Node], i: usize) -> f64 {
        match nodes[i] {
            Node::Leaf { value, .. } => value,
            Node::Split {
                left, right, cover, ..
            } => {
                (nodes[left].cover() * walk(nodes, left)
                    + nodes[right].cover() * walk(nodes, right))
                    / cover
            }
        }
    }
    walk(tree.nodes(), 0)
}

/// Shapley value of each feature for the tree output at `x`.
pub fn tree_shap_values(tree: &Tree, x: &[f64]) -> Result<Vec<f64>> {
    check_tree(tree, x.len())?;
    let mut phi = vec![0.0; x.len()];
    let mut path = Vec::with_capacity(tree.depth() + 2);
    recurse(tree.nodes(), x, &mut phi, 0, &mut path, 1.0, 1.0, None);
    Ok(phi)
}

#[allow(clippy::too_many_arguments)]
fn recurse(
    nodes: &[Node],
    x: &[f64],
    phi: &mut [f64],
    i: usize,
    path: &mut Vec<PathElement>,
    zero_fraction: f64,
    one_fraction: f64,
    feature: Option<usize>,
) {
    extend(
        path,
        zero_fraction,
        one_fraction,
        feature.unwrap_or(usize::MAX),
    );
    match nodes[i] {
        Node::Leaf { value, .. } => {
            for k in 1..path.len() {
                let w = unwound_sum(path, k);
                let e = path[k];
                phi[e.feature] += w * (e.one_fraction - e.zero_fraction) * value;
            }
        }
        Node::Split {
            feature: f,
            threshold,
            left,
            right,
            cover,
        } => {
            let (hot, cold) = if x[f] <= threshold {
                (left, right)
            } else {
                (right, left)
            };
            let mut incoming_zero = 1.0;
            let mut incoming_one = 1.0;
            let mut base = path.clone();
            if let Some(k) = (1..base.len()).find(|&k| base[k].feature == f) {
                incoming_zero = base[k].zero_fraction;
                incoming_one = base[k].one_fraction;
                unwind(&mut base, k);
            }
            let hot_zero = nodes[hot].cover() / cover;
            let cold_zero = nodes[cold].cover() / cover;

            let mut branch = base.clone();
            recurse(
                nodes,
                x,
                phi,
                hot,
                &mut branch,
                hot_zero * incoming_zero,
                incoming_one,
                Some(f),
            );
            let mut branch = base;
            recurse(
                nodes,
                x,
                phi,
                cold,
                &mut branch,
                cold_zero * incoming_zero,
                0.0,
                Some(f),
            );
        }
    }
}

fn extend(path: &mut Vec<PathElement>, zero_fraction: f64, one_fraction: f64, feature: usize) {
    let depth = path.len();
    path.push(PathElement {
        feature,
        zero_fraction,
        one_fraction,
        weight: if depth == 0 { 1.0 } else { 0.0 },
    });
    let d1 = (depth + 1) as f64;
    for i in (0..depth).rev() {
        path[i + 1].weight += one_fraction * path[i].weight * (i + 1) as f64 / d1;
        path[i].weight = zero_fraction * path[i].weight * (depth - i) as f64 / d1;
    }
}

/// Remove element `k` from the path, undoing its `extend`.
fn unwind(path: &mut Vec<PathElement>, k: usize) {
    let depth = path.len() - 1;
    let PathElement {
        zero_fraction,
        one_fraction,
        ..
    } = path[k];
    let d1 = (depth + 1) as f64;
    let mut next_one = path[depth].weight;
    for i in (0..depth).rev() {
        if one_fraction != 0.0 {
            let tmp = path[i].weight;
            path[i].weight = next_one * d1 / ((i + 1) as f64 * one_fraction);
            next_one = tmp - path[i].weight * zero_fraction * (depth - i) as f64 / d1;
        } else {
            path[i].weight = path[i].weight * d1 / (zero_fraction * (depth - i) as f64);
        }
    }
    for i in k..depth {
        path[i].feature = path[i + 1].feature;
        path[i].zero_fraction = path[i + 1].zero_fraction;
        path[i].one_fraction = path[i + 1].one_fraction;
    }
    path.pop();
}

/// Total weight the path would have with element `k` unwound.
fn unwound_sum(path: &[PathElement], k: usize) -> f64 {
    let depth = path.len() - 1;
    let PathElement {
        zero_fraction,
        one_fraction,
        ..
    } = path[k];
    let d1 = (depth + 1) as f64;
    let mut total = 0.0;
    if one_fraction != 0.0 {
        let mut next_one = path[depth].weight;
        for i in (0..depth).rev() {
            let tmp = next_one / ((i + 1) as f64 * one_fraction);
            total += tmp;
            next_one = path[i].weight - tmp * zero_fraction * (depth - i) as f64;
        }
    } else {
        for i in (0..depth).rev() {
            total += path[i].weight / (zero_fraction * (depth - i) as f64);
        }
    }
    total * d1
}
