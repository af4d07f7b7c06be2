//! Log-likelihood (G²) keyness between a target and a reference corpus.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::corpus::{Label, TaggedDocument};
use crate::error::{Error, Result};
use crate::tagger::Upos;

pub type WordCounts = BTreeMap<String, u64>;

/// Words whose combined count falls below this are left out of the ranking.
pub const DEFAULT_MIN_TOTAL: u64 = 5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KeynessEntry {
    pub word: String,
    pub count_target: u64,
    pub count_reference: u64,
    pub total_target: u64,
    pub total_reference: u64,
    pub g2: f64,
    pub overused_in: Label,
}

/// Ranked keyness lists, one per direction of over-use.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct KeynessRanking {
    pub target: Vec<KeynessEntry>,
    pub reference: Vec<KeynessEntry>,
}

fn ll_term(observed: u64, expected: f64) -> f64 {
    if observed == 0 {
        0.0
    } else {
        let o = observed as f64;
        o * (o / expected).ln()
    }
}

/// Dunning's G² for one word: observed `o1` of `n1` in the target and `o2`
/// of `n2` in the reference.
pub fn g2(o1: u64, n1: u64, o2: u64, n2: u64) -> f64 {
    // equal proportions: observed equals expected exactly
    if o1 as u128 * n2 as u128 == o2 as u128 * n1 as u128 {
        return 0.0;
    }
    let total = (n1 + n2) as f64;
    let joint = (o1 + o2) as f64;
    let e1 = n1 as f64 * joint / total;
    let e2 = n2 as f64 * joint / total;
    (2.0 * (ll_term(o1, e1) + ll_term(o2, e2))).max(0.0)
}

/// Rank words by G² in each direction, keeping the `top_k` strongest.
///
/// Corpus totals are the sums of the two count maps. Ties in G² fall back to
/// alphabetical order.
pub fn keyness(
    target: &WordCounts,
    reference: &WordCounts,
    top_k: usize,
    min_total: u64,
) -> Result<KeynessRanking> {
    let n1: u64 = target.values().sum();
    let n2: u64 = reference.values().sum();
    if n1 == 0 || n2 == 0 {
        return Err(Error::InsufficientData(
            "keyness needs a positive word total in both corpora".into(),
        ));
    }

    let mut words: Vec<&String> = target.keys().chain(reference.keys()).collect();
    words.sort();
    words.dedup();

    let mut ranking = KeynessRanking::default();
    for word in words {
        let o1 = target.get(word).copied().unwrap_or(0);
        let o2 = reference.get(word).copied().unwrap_or(0);
        if o1 + o2 < min_total {
            continue;
        }
        let overused_in = if o1 as u128 * n2 as u128 > o2 as u128 * n1 as u128 {
            Label::Target
        } else {
            Label::Control
        };
        let entry = KeynessEntry {
            word: word.clone(),
            count_target: o1,
            count_reference: o2,
            total_target: n1,
            total_reference: n2,
            g2: g2(o1, n1, o2, n2),
            overused_in,
        };
        match overused_in {
            Label::Target => ranking.target.push(entry),
            Label::Control => ranking.reference.push(entry),
        }
    }
    for list in [&mut ranking.target, &mut ranking.reference] {
        list.sort_by(|a, b| b.g2.total_cmp(&a.g2).then_with(|| a.word.cmp(&b.word)));
        list.truncate(top_k);
    }
    Ok(ranking)
}

/// Count lowercased forms (or lemmas, when asked and present) of tokens
/// whose UPOS is in `filter`.
pub fn word_counts<'a>(
    docs: impl IntoIterator<Item = &'a TaggedDocument>,
    filter: &[Upos],
    use_lemma: bool,
) -> WordCounts {
    let mut counts = WordCounts::new();
    for doc in docs {
        for t in doc.tokens().filter(|t| filter.contains(&t.upos)) {
            let key = match (&t.lemma, use_lemma) {
                (Some(lemma), true) => lemma,
                _ => &t.form,
            };
            *counts.entry(key.to_lowercase()).or_default() += 1;
        }
    }
    counts
}
