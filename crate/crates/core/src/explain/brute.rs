//! Shapley values by enumerating every coalition. Exponential in the number
//! of features; used to check the polynomial algorithm.

use super::treeshap::check_tree;
use crate::error::{Error, Result};
use crate::model::{Node, Tree};

pub const MAX_BRUTE_FORCE_FEATURES: usize = 15;

/// Conditional expectation of the tree output when only the features in
/// `known` (a bitmask) take their values from `x`; unknown splits are
/// averaged by cover.
pub fn coalition_value(tree: &Tree, x: &[f64], known: u32) -> f64 {
    fn walk(nodes: &[Node], x: &[f64], known: u32, i: usize) -> f64 {
        match nodes[i] {
            Node::Leaf { value, .. } => value,
            Node::Split {
                feature,
                threshold,
                left,
                right,
                cover,
            } => {
                if known & (1 << feature) != 0 {
                    walk(
                        nodes,
                        x,
                        known,
                        if x[feature] <= threshold { left } else { right },
                    )
                } else {
                    let l = nodes[left].cover() / cover;
                    let r = nodes[right].cover() / cover;
                    l * walk(nodes, x, known, left) + r * walk(nodes, x, known, right)
                }
            }
        }
    }
    walk(tree.nodes(), x, known, 0)
}

/// φ_i = Σ_{S ⊆ N∖{i}} |S|! (d − |S| − 1)! / d! · [v(S ∪ {i}) − v(S)]
pub fn brute_force_shap_values(tree: &Tree, x: &[f64]) -> Result<Vec<f64>> {
    let d = x.len();
    if d > MAX_BRUTE_FORCE_FEATURES {
        return Err(Error::InvalidInput(format!(
            "brute-force Shapley values enumerate 2^d coalitions; d = {d} exceeds {MAX_BRUTE_FORCE_FEATURES}"
        )));
    }
    check_tree(tree, d)?;
    let values: Vec<f64> = (0..1u32 << d)
        .map(|s| coalition_value(tree, x, s))
        .collect();

    let mut fact = vec![1.0f64; d + 1];
    for k in 1..=d {
        fact[k] = fact[k - 1] * k as f64;
    }
    let mut phi = vec![0.0; d];
    for (i, p) in phi.iter_mut().enumerate() {
        let bit = 1u32 << i;
        for s in (0..1u32 << d).filter(|s| s & bit == 0) {
            let size = s.count_ones() as usize;
            let w = fact[size] * fact[d - size - 1] / fact[d];
            *p += w * (values[(s | bit) as usize] - values[s as usize]);
        }
    }
    Ok(phi)
}
