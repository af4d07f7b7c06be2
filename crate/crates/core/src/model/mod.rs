//! Class-weighted random forest over post feature vectors.

mod forest;
mod metrics;
mod persist;
mod tree;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use forest::{
    class_weights, grow_tree, median, train_forest, ClassWeighting, FeaturesPerSplit, Forest,
    ForestParams, MissingValues,
};
pub use metrics::{evaluate, ClassMetrics, Metrics};
pub use tree::{Node, Tree};

use crate::corpus::Label;
use crate::error::{Error, Result};

/// Seeded split that keeps the class proportions of `labels` in both parts.
///
/// Returns sorted `(train, test)` row indices; each class contributes
/// `round(n_c · test_fraction)` rows to the test part.
pub fn stratified_split(
    labels: &[Label],
    test_fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::InvalidInput(format!(
            "test fraction must lie strictly between 0 and 1, got {test_fraction}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for label in Label::BOTH {
        let mut rows: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == label).collect();
        rows.shuffle(&mut rng);
        let k = (rows.len() as f64 * test_fraction).round() as usize;
        test.extend_from_slice(&rows[..k]);
        train.extend_from_slice(&rows[k..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_is_stratified_and_seeded() {
        let labels: Vec<Label> = (0..50)
            .map(|i| {
                if i % 5 == 0 {
                    Label::Target
                } else {
                    Label::Control
                }
            })
            .collect();
        let (train, test) = stratified_split(&labels, 0.2, 4).unwrap();
        assert_eq!(test.len(), 10);
        assert_eq!(
            test.iter().filter(|&&i| labels[i] == Label::Target).count(),
            2
        );
        let mut all: Vec<usize> = train.iter().chain(&test).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..50).collect::<Vec<_>>());
        assert_eq!(stratified_split(&labels, 0.2, 4).unwrap(), (train, test));
        assert!(stratified_split(&labels, 1.0, 4).is_err());
    }
}
