//! Shapley-value attribution of forest predictions.
//!
//! Values are path-dependent: a feature outside the coalition splits the
//! walk in proportion to node cover, so no background data is needed beyond
//! what the trees already store.

mod brute;
mod treeshap;

use std::io::Write;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use brute::{brute_force_shap_values, coalition_value, MAX_BRUTE_FORCE_FEATURES};
pub use treeshap::{expected_value, tree_shap_values};

use crate::error::{Error, Result};
use crate::model::{Forest, Tree};

/// Per-feature contributions with `base_value + Σ phi = model_output`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Attribution {
    pub phi: Vec<f64>,
    pub base_value: f64,
    pub model_output: f64,
}

impl Attribution {
    /// |base_value + Σ phi − model_output|
    pub fn local_accuracy_gap(&self) -> f64 {
        (self.base_value + self.phi.iter().sum::<f64>() - self.model_output).abs()
    }
}

pub fn tree_shap(tree: &Tree, x: &[f64]) -> Result<Attribution> {
    let phi = tree_shap_values(tree, x)?;
    Ok(Attribution {
        phi,
        base_value: expected_value(tree),
        model_output: tree.predict(x),
    })
}

pub fn brute_force_shapley(tree: &Tree, x: &[f64]) -> Result<Attribution> {
    let phi = brute_force_shap_values(tree, x)?;
    Ok(Attribution {
        phi,
        base_value: coalition_value(tree, x, 0),
        model_output: tree.predict(x),
    })
}

/// Mean of the per-tree attributions; undefined values are imputed first.
pub fn forest_shap(forest: &Forest, x: &[Option<f64>]) -> Result<Attribution> {
    let dense = forest.impute(x)?;
    let n = forest.trees().len() as f64;
    let mut phi = vec![0.0; dense.len()];
    let mut base_value = 0.0;
    for tree in forest.trees() {
        for (p, v) in phi.iter_mut().zip(tree_shap_values(tree, &dense)?) {
            *p += v;
        }
        base_value += expected_value(tree);
    }
    phi.iter_mut().for_each(|p| *p /= n);
    Ok(Attribution {
        phi,
        base_value: base_value / n,
        model_output: forest.predict_proba_dense(&dense),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureImportance {
    pub feature: usize,
    pub name: String,
    pub mean_abs_phi: f64,
    /// 1 for the most important feature.
    pub rank: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShapSummary {
    /// Sampled row indices, ascending.
    pub rows: Vec<usize>,
    /// Feature values of each sampled row, as given (undefined stays `None`).
    pub values: Vec<Vec<Option<f64>>>,
    pub attributions: Vec<Attribution>,
    /// Every feature, by descending mean |phi|, ties by feature index.
    pub ranking: Vec<FeatureImportance>,
}

/// Explain a seeded uniform sample of `sample_size` rows drawn without
/// replacement and rank features by mean |phi|.
pub fn shap_summary(
    forest: &Forest,
    x: &[Vec<Option<f64>>],
    sample_size: usize,
    seed: u64,
) -> Result<ShapSummary> {
    if sample_size == 0 {
        return Err(Error::InvalidInput("sample size must be positive".into()));
    }
    if sample_size > x.len() {
        return Err(Error::InvalidInput(format!(
            "sample size {sample_size} exceeds the {} available rows",
            x.len()
        )));
    }
    let rows: Vec<usize> = if sample_size == x.len() {
        (0..x.len()).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut r = index::sample(&mut rng, x.len(), sample_size).into_vec();
        r.sort_unstable();
        r
    };
    let attributions = rows
        .par_iter()
        .map(|&i| forest_shap(forest, &x[i]))
        .collect::<Result<Vec<_>>>()?;

    let d = forest.n_features();
    let mut ranking: Vec<FeatureImportance> = (0..d)
        .map(|j| FeatureImportance {
            feature: j,
            name: forest.feature_names()[j].clone(),
            mean_abs_phi: attributions.iter().map(|a| a.phi[j].abs()).sum::<f64>()
                / rows.len() as f64,
            rank: 0,
        })
        .collect();
    ranking.sort_by(|a, b| {
        b.mean_abs_phi
            .total_cmp(&a.mean_abs_phi)
            .then(a.feature.cmp(&b.feature))
    });
    for (r, f) in ranking.iter_mut().enumerate() {
        f.rank = r + 1;
    }
    Ok(ShapSummary {
        values: rows.iter().map(|&i| x[i].clone()).collect(),
        rows,
        attributions,
        ranking,
    })
}

impl ShapSummary {
    /// `post_index,feature,feature_value,phi` for the `top_k` highest-ranked
    /// features; undefined values are written as `NA`.
    pub fn write_attributions_csv<W: Write>(&self, out: W, top_k: usize) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let csv_err = |e: csv::Error| Error::InvalidInput(format!("writing attributions: {e}"));
        w.write_record(["post_index", "feature", "feature_value", "phi"])
            .map_err(csv_err)?;
        let shown: Vec<&FeatureImportance> = self.ranking.iter().take(top_k).collect();
        for ((row, values), attr) in self.rows.iter().zip(&self.values).zip(&self.attributions) {
            for f in &shown {
                let value = values[f.feature].map_or("NA".to_string(), |v| format!("{v:?}"));
                w.write_record([
                    row.to_string(),
                    f.name.clone(),
                    value,
                    format!("{:?}", attr.phi[f.feature]),
                ])
                .map_err(csv_err)?;
            }
        }
        w.flush()
            .map_err(|e| Error::InvalidInput(format!("writing attributions: {e}")))
    }

    /// `feature,mean_abs_phi,rank` for every feature.
    pub fn write_summary_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let csv_err = |e: csv::Error| Error::InvalidInput(format!("writing summary: {e}"));
        w.write_record(["feature", "mean_abs_phi", "rank"])
            .map_err(csv_err)?;
        for f in &self.ranking {
            w.write_record([
                f.name.clone(),
                format!("{:?}", f.mean_abs_phi),
                f.rank.to_string(),
            ])
            .map_err(csv_err)?;
        }
        w.flush()
            .map_err(|e| Error::InvalidInput(format!("writing summary: {e}")))
    }
}
