use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{Node, Tree};
use crate::corpus::Label;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassWeighting {
    /// w_c = n / (2 · n_c)
    #[default]
    Balanced,
    Uniform,
}

/// How many candidate features are drawn at each node.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeaturesPerSplit {
    /// ⌊√d⌋, at least one.
    #[default]
    Sqrt,
    All,
    Fixed(usize),
}

impl FeaturesPerSplit {
    pub fn count(self, d: usize) -> usize {
        let k = match self {
            FeaturesPerSplit::Sqrt => (d as f64).sqrt().floor() as usize,
            FeaturesPerSplit::All => d,
            FeaturesPerSplit::Fixed(k) => k,
        };
        k.clamp(1, d.max(1))
    }
}

/// Treatment of undefined feature values during training.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MissingValues {
    /// Replace with the per-feature training median.
    #[default]
    Median,
    /// Drop training rows with any undefined value. Medians of the kept rows
    /// still fill gaps at inference time.
    DropRows,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: usize,
    pub class_weighting: ClassWeighting,
    pub features_per_split: FeaturesPerSplit,
    pub min_samples_leaf: usize,
    pub missing: MissingValues,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 50,
            max_depth: 15,
            class_weighting: ClassWeighting::Balanced,
            features_per_split: FeaturesPerSplit::Sqrt,
            min_samples_leaf: 1,
            missing: MissingValues::Median,
            seed: 0,
        }
    }
}

impl ForestParams {
    fn validate(&self) -> Result<()> {
        if self.n_trees == 0 || self.max_depth == 0 || self.min_samples_leaf == 0 {
            return Err(Error::InvalidInput(
                "n_trees, max_depth and min_samples_leaf must be positive".into(),
            ));
        }
        if self.features_per_split == FeaturesPerSplit::Fixed(0) {
            return Err(Error::InvalidInput(
                "features_per_split must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Per-class sample weights `[control, target]` for the given labels.
pub fn class_weights(y: &[Label], weighting: ClassWeighting) -> [f64; 2] {
    match weighting {
        ClassWeighting::Uniform => [1.0, 1.0],
        ClassWeighting::Balanced => {
            let n = y.len() as f64;
            let n_target = y.iter().filter(|&&l| l == Label::Target).count() as f64;
            let n_control = n - n_target;
            [n / (2.0 * n_control), n / (2.0 * n_target)]
        }
    }
}

fn class_index(label: Label) -> usize {
    match label {
        Label::Control => 0,
        Label::Target => 1,
    }
}

/// Median of the defined values, 0 when there are none.
pub fn median(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut v: Vec<f64> = values.into_iter().collect();
    if v.is_empty() {
        return 0.0;
    }
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    }
}

fn check_matrix(x: &[Vec<Option<f64>>]) -> Result<usize> {
    let d = x.first().map(Vec::len).unwrap_or(0);
    if d == 0 {
        return Err(Error::InvalidInput("feature matrix has no columns".into()));
    }
    for (i, row) in x.iter().enumerate() {
        if row.len() != d {
            return Err(Error::InvalidInput(format!(
                "row {i} has {} features, expected {d}",
                row.len()
            )));
        }
        if row.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "row {i} has a non-finite value"
            )));
        }
    }
    Ok(d)
}

fn impute(row: &[Option<f64>], medians: &[f64]) -> Vec<f64> {
    row.iter()
        .zip(medians)
        .map(|(v, m)| v.unwrap_or(*m))
        .collect()
}

/// A trained random forest whose output is the probability of Target.
#[derive(Clone, Debug, PartialEq)]
pub struct Forest {
    trees: Vec<Tree>,
    params: ForestParams,
    feature_names: Vec<String>,
    medians: Vec<f64>,
}

impl Forest {
    pub fn from_parts(
        trees: Vec<Tree>,
        params: ForestParams,
        feature_names: Vec<String>,
        medians: Vec<f64>,
    ) -> Result<Self> {
        if trees.is_empty() {
            return Err(Error::InvalidInput(
                "a forest needs at least one tree".into(),
            ));
        }
        if feature_names.len() != medians.len() {
            return Err(Error::InvalidInput(format!(
                "{} feature names but {} medians",
                feature_names.len(),
                medians.len()
            )));
        }
        if let Some(j) = trees.iter().filter_map(Tree::max_feature).max() {
            if j >= medians.len() {
                return Err(Error::InvalidInput(format!(
                    "a tree splits on feature {j} but the forest has {} features",
                    medians.len()
                )));
            }
        }
        Ok(Forest {
            trees,
            params,
            feature_names,
            medians,
        })
    }

    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }

    pub fn params(&self) -> &ForestParams {
        &self.params
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn medians(&self) -> &[f64] {
        &self.medians
    }

    pub fn n_features(&self) -> usize {
        self.medians.len()
    }

    /// Replace the default `f0, f1, …` names.
    pub fn with_feature_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.n_features() {
            return Err(Error::InvalidInput(format!(
                "{} names given for {} features",
                names.len(),
                self.n_features()
            )));
        }
        if let Some(bad) = names
            .iter()
            .find(|n| n.is_empty() || n.contains(char::is_whitespace))
        {
            return Err(Error::InvalidInput(format!(
                "feature name {bad:?} is empty or has whitespace"
            )));
        }
        self.feature_names = names;
        Ok(self)
    }

    /// Fill undefined entries with the training medians.
    pub fn impute(&self, x: &[Option<f64>]) -> Result<Vec<f64>> {
        if x.len() != self.n_features() {
            return Err(Error::InvalidInput(format!(
                "expected {} features, got {}",
                self.n_features(),
                x.len()
            )));
        }
        Ok(impute(x, &self.medians))
    }

    /// Mean Target probability over trees.
    pub fn predict_proba(&self, x: &[Option<f64>]) -> Result<f64> {
        Ok(self.predict_proba_dense(&self.impute(x)?))
    }

    /// As [`Forest::predict_proba`] for an already imputed vector.
    pub fn predict_proba_dense(&self, x: &[f64]) -> f64 {
        let sum: f64 = self.trees.iter().map(|t| t.predict(x)).sum();
        sum / self.trees.len() as f64
    }

    pub fn predict(&self, x: &[Option<f64>], threshold: f64) -> Result<Label> {
        Ok(if self.predict_proba(x)? >= threshold {
            Label::Target
        } else {
            Label::Control
        })
    }

    /// Longest root-to-leaf path over all trees.
    pub fn max_depth(&self) -> usize {
        self.trees.iter().map(Tree::depth).max().unwrap_or(0)
    }
}

/// Fit a forest. Undefined entries are handled per `params.missing`.
pub fn train_forest(x: &[Vec<Option<f64>>], y: &[Label], params: &ForestParams) -> Result<Forest> {
    params.validate()?;
    if x.is_empty() {
        return Err(Error::InsufficientData("training matrix is empty".into()));
    }
    if x.len() != y.len() {
        return Err(Error::InvalidInput(format!(
            "{} rows but {} labels",
            x.len(),
            y.len()
        )));
    }
    let d = check_matrix(x)?;

    let keep: Vec<usize> = match params.missing {
        MissingValues::Median => (0..x.len()).collect(),
        MissingValues::DropRows => (0..x.len())
            .filter(|&i| x[i].iter().all(Option::is_some))
            .collect(),
    };
    let y: Vec<Label> = keep.iter().map(|&i| y[i]).collect();
    if y.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "need at least 2 training rows, have {}",
            y.len()
        )));
    }
    if !Label::BOTH.iter().all(|l| y.contains(l)) {
        return Err(Error::InsufficientData(
            "training labels must contain both classes".into(),
        ));
    }

    let medians: Vec<f64> = (0..d)
        .map(|j| median(keep.iter().filter_map(|&i| x[i][j])))
        .collect();
    let dense: Vec<Vec<f64>> = keep.iter().map(|&i| impute(&x[i], &medians)).collect();
    let weights = class_weights(&y, params.class_weighting);
    let n = dense.len();

    let trees: Vec<Tree> = (0..params.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed.wrapping_add(t as u64));
            let draws: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
            grow_tree(&dense, &y, weights, &draws, params, &mut rng)
        })
        .collect();

    let names = (0..d).map(|j| format!("f{j}")).collect();
    Forest::from_parts(trees, params.clone(), names, medians)
}

/// Grow one tree on the rows listed in `draws` (repeats allowed).
///
/// The result depends only on the multiset of drawn rows and on `rng`, never
/// on the order of rows in `x`.
pub fn grow_tree(
    x: &[Vec<f64>],
    y: &[Label],
    weights: [f64; 2],
    draws: &[usize],
    params: &ForestParams,
    rng: &mut impl Rng,
) -> Tree {
    let mut mult = vec![0u64; x.len()];
    for &i in draws {
        mult[i] += 1;
    }
    let samples: Vec<(usize, u64)> = mult
        .iter()
        .enumerate()
        .filter(|(_, &m)| m > 0)
        .map(|(i, &m)| (i, m))
        .collect();
    let d = x.first().map(Vec::len).unwrap_or(0);
    let mut grower = Grower {
        x,
        y,
        weights,
        params,
        k: params.features_per_split.count(d),
        d,
        nodes: Vec::new(),
    };
    grower.grow(samples, 0, rng);
    Tree::from_nodes_unchecked(grower.nodes)
}

struct Grower<'a> {
    x: &'a [Vec<f64>],
    y: &'a [Label],
    weights: [f64; 2],
    params: &'a ForestParams,
    k: usize,
    d: usize,
    nodes: Vec<Node>,
}

struct SplitChoice {
    feature: usize,
    threshold: f64,
    gain: f64,
}

/// Gain below this is treated as no improvement.
const MIN_GAIN: f64 = 1e-12;

fn weighted_gini(counts: [u64; 2], w: [f64; 2]) -> (f64, f64) {
    let a = counts[0] as f64 * w[0];
    let b = counts[1] as f64 * w[1];
    let total = a + b;
    if total == 0.0 {
        return (0.0, 0.0);
    }
    (1.0 - (a * a + b * b) / (total * total), total)
}

impl Grower<'_> {
    fn class_counts(&self, samples: &[(usize, u64)]) -> [u64; 2] {
        let mut c = [0u64; 2];
        for &(i, m) in samples {
            c[class_index(self.y[i])] += m;
        }
        c
    }

    fn grow(&mut self, samples: Vec<(usize, u64)>, depth: usize, rng: &mut impl Rng) -> usize {
        let id = self.nodes.len();
        let counts = self.class_counts(&samples);
        let (gini, cover) = weighted_gini(counts, self.weights);
        let value = (counts[1] as f64 * self.weights[1]) / cover;
        self.nodes.push(Node::Leaf { value, cover });

        if depth >= self.params.max_depth || counts[0] == 0 || counts[1] == 0 {
            return id;
        }
        let mut features: Vec<usize> = index::sample(rng, self.d, self.k).into_vec();
        features.sort_unstable();

        let mut best: Option<SplitChoice> = None;
        for &f in &features {
            if let Some(c) = self.best_split(&samples, f, counts, gini, cover) {
                if best.as_ref().is_none_or(|b| c.gain > b.gain) {
                    best = Some(c);
                }
            }
        }
        let Some(best) = best else {
            return id;
        };

        let (left, right): (Vec<_>, Vec<_>) = samples
            .into_iter()
            .partition(|&(i, _)| self.x[i][best.feature] <= best.threshold);
        let l = self.grow(left, depth + 1, rng);
        let r = self.grow(right, depth + 1, rng);
        self.nodes[id] = Node::Split {
            feature: best.feature,
            threshold: best.threshold,
            left: l,
            right: r,
            cover,
        };
        id
    }

    /// Best midpoint threshold on feature `f`, lowest threshold winning ties.
    fn best_split(
        &self,
        samples: &[(usize, u64)],
        f: usize,
        total: [u64; 2],
        parent_gini: f64,
        cover: f64,
    ) -> Option<SplitChoice> {
        let mut sorted: Vec<(f64, usize, u64)> =
            samples.iter().map(|&(i, m)| (self.x[i][f], i, m)).collect();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));

        let min_leaf = self.params.min_samples_leaf as u64;
        let n_total = total[0] + total[1];
        let mut left = [0u64; 2];
        let mut best: Option<SplitChoice> = None;
        for w in 0..sorted.len() - 1 {
            let (v, i, m) = sorted[w];
            left[class_index(self.y[i])] += m;
            let next = sorted[w + 1].0;
            if next == v {
                continue;
            }
            let n_left = left[0] + left[1];
            if n_left < min_leaf || n_total - n_left < min_leaf {
                continue;
            }
            let right = [total[0] - left[0], total[1] - left[1]];
            let (gl, wl) = weighted_gini(left, self.weights);
            let (gr, wr) = weighted_gini(right, self.weights);
            let gain = parent_gini - (wl * gl + wr * gr) / cover;
            if gain > MIN_GAIN && best.as_ref().is_none_or(|b| gain > b.gain) {
                let mut threshold = v + (next - v) / 2.0;
                if threshold >= next {
                    threshold = v;
                }
                best = Some(SplitChoice {
                    feature: f,
                    threshold,
                    gain,
                });
            }
        }
        best
    }
}

impl fmt::Display for ClassWeighting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassWeighting::Balanced => "balanced",
            ClassWeighting::Uniform => "uniform",
        })
    }
}

impl FromStr for ClassWeighting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "balanced" => Ok(ClassWeighting::Balanced),
            "uniform" => Ok(ClassWeighting::Uniform),
            _ => Err(Error::InvalidInput(format!(
                "unknown class weighting {s:?}"
            ))),
        }
    }
}

impl fmt::Display for FeaturesPerSplit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeaturesPerSplit::Sqrt => f.write_str("sqrt"),
            FeaturesPerSplit::All => f.write_str("all"),
            FeaturesPerSplit::Fixed(k) => write!(f, "{k}"),
        }
    }
}

impl FromStr for FeaturesPerSplit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sqrt" => Ok(FeaturesPerSplit::Sqrt),
            "all" => Ok(FeaturesPerSplit::All),
            _ => match s.parse::<usize>() {
                Ok(k) if k > 0 => Ok(FeaturesPerSplit::Fixed(k)),
                _ => Err(Error::InvalidInput(format!(
                    "unknown features-per-split rule {s:?}"
                ))),
            },
        }
    }
}

impl fmt::Display for MissingValues {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MissingValues::Median => "median",
            MissingValues::DropRows => "drop-rows",
        })
    }
}

impl FromStr for MissingValues {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "median" => Ok(MissingValues::Median),
            "drop-rows" => Ok(MissingValues::DropRows),
            _ => Err(Error::InvalidInput(format!(
                "unknown missing-value mode {s:?}"
            ))),
        }
    }
}
