//! Per-post part-of-speech feature vectors and group summaries.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::Label;
use crate::error::{Error, Result};
use crate::tagger::{Number, Person, TaggedToken, Tense, Upos};

pub const N_FEATURES: usize = 22;

/// UPOS categories tracked as frequency features, in column order.
pub const TRACKED_UPOS: [Upos; 12] = [
    Upos::ADJ,
    Upos::ADV,
    Upos::NOUN,
    Upos::PROPN,
    Upos::VERB,
    Upos::ADP,
    Upos::CCONJ,
    Upos::DET,
    Upos::PART,
    Upos::SCONJ,
    Upos::AUX,
    Upos::PRON,
];

pub const FEATURE_NAMES: [&str; N_FEATURES] = [
    "ADJ",
    "ADV",
    "NOUN",
    "PROPN",
    "VERB",
    "ADP",
    "CCONJ",
    "DET",
    "PART",
    "SCONJ",
    "AUX",
    "PRON",
    "tense_past",
    "tense_present",
    "tense_future",
    "person_first",
    "person_second",
    "person_third",
    "first_singular",
    "first_plural",
    "pi",
    "formality",
];

/// Column offsets of the feature families within a row.
pub mod column {
    pub const UPOS: std::ops::Range<usize> = 0..12;
    pub const TENSE: std::ops::Range<usize> = 12..15;
    pub const PERSON: std::ops::Range<usize> = 15..18;
    pub const FIRST_NUMBER: std::ops::Range<usize> = 18..20;
    pub const PI: usize = 20;
    pub const FORMALITY: usize = 21;
    pub const PRON: usize = 11;
    pub const PROPN: usize = 3;
}

pub type FeatureRow = [Option<f64>; N_FEATURES];

/// What the UPOS frequencies are normalised by.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum UposDenominator {
    /// All tokens except PUNCT, SYM, X and NUM.
    #[default]
    Content,
    /// Every token in the post.
    AllTags,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub upos_freq: Option<[f64; 12]>,
    pub tense_freq: Option<[f64; 3]>,
    pub person_freq: Option<[f64; 3]>,
    pub first_number_freq: Option<[f64; 2]>,
    pub pi: Option<f64>,
    pub formality: f64,
}

impl FeatureVector {
    pub fn to_row(&self) -> FeatureRow {
        let mut row = [None; N_FEATURES];
        let mut put = |range: std::ops::Range<usize>, vals: Option<&[f64]>| {
            for (k, i) in range.enumerate() {
                row[i] = vals.map(|v| v[k]);
            }
        };
        put(column::UPOS, self.upos_freq.as_ref().map(|v| &v[..]));
        put(column::TENSE, self.tense_freq.as_ref().map(|v| &v[..]));
        put(column::PERSON, self.person_freq.as_ref().map(|v| &v[..]));
        put(
            column::FIRST_NUMBER,
            self.first_number_freq.as_ref().map(|v| &v[..]),
        );
        row[column::PI] = self.pi;
        row[column::FORMALITY] = Some(self.formality);
        row
    }
}

fn ratio<const N: usize>(counts: [usize; N], denom: usize) -> Option<[f64; N]> {
    (denom > 0).then(|| counts.map(|c| c as f64 / denom as f64))
}

/// Compute the feature vector of one post; `None` for an empty post.
pub fn extract_post_features(
    tokens: &[TaggedToken],
    denominator: UposDenominator,
) -> Option<FeatureVector> {
    if tokens.is_empty() {
        return None;
    }

    let mut upos = [0usize; 12];
    let mut upos_denom = 0usize;
    let mut tense = [0usize; 3];
    let mut person = [0usize; 3];
    let mut first_number = [0usize; 2];

    for t in tokens {
        if let Some(i) = TRACKED_UPOS.iter().position(|&u| u == t.upos) {
            upos[i] += 1;
        }
        let counted = match denominator {
            UposDenominator::AllTags => true,
            UposDenominator::Content => {
                !matches!(t.upos, Upos::PUNCT | Upos::SYM | Upos::X | Upos::NUM)
            }
        };
        if counted {
            upos_denom += 1;
        }
        if let Some(tn) = t.tense {
            tense[match tn {
                Tense::Past => 0,
                Tense::Present => 1,
                Tense::Future => 2,
            }] += 1;
        }
        if let Some(p) = t.pron_person {
            person[match p {
                Person::First => 0,
                Person::Second => 1,
                Person::Third => 2,
            }] += 1;
            if p == Person::First {
                match t.pron_number {
                    Some(Number::Singular) => first_number[0] += 1,
                    Some(Number::Plural) => first_number[1] += 1,
                    None => {}
                }
            }
        }
    }

    Some(FeatureVector {
        upos_freq: ratio(upos, upos_denom),
        tense_freq: ratio(tense, tense.iter().sum()),
        person_freq: ratio(person, person.iter().sum()),
        first_number_freq: ratio(first_number, first_number.iter().sum()),
        pi: pronominalisation_index(tokens),
        formality: formality_score(tokens).expect("non-empty post"),
    })
}

/// Pronouns per noun (common or proper); undefined without nouns.
pub fn pronominalisation_index(tokens: &[TaggedToken]) -> Option<f64> {
    let pron = tokens.iter().filter(|t| t.upos == Upos::PRON).count();
    let nouns = tokens
        .iter()
        .filter(|t| matches!(t.upos, Upos::NOUN | Upos::PROPN))
        .count();
    (nouns > 0).then(|| pron as f64 / nouns as f64)
}

fn is_article(form: &str) -> bool {
    matches!(form.to_lowercase().as_str(), "a" | "an" | "the")
}

/// Formality score: half of (noun + adjective + preposition + article
/// percentages, minus pronoun, verb, adverb and interjection percentages,
/// plus 100). Percentages are over all tokens; nouns include proper nouns.
pub fn formality_score(tokens: &[TaggedToken]) -> Result<f64> {
    if tokens.is_empty() {
        return Err(Error::InvalidInput("formality of an empty post".into()));
    }
    let n = tokens.len() as f64;
    let pct = |pred: &dyn Fn(&TaggedToken) -> bool| -> f64 {
        100.0 * tokens.iter().filter(|t| pred(t)).count() as f64 / n
    };
    let is = |u: Upos| move |t: &TaggedToken| t.upos == u;

    let noun = pct(&|t| matches!(t.upos, Upos::NOUN | Upos::PROPN));
    let adj = pct(&is(Upos::ADJ));
    let prep = pct(&is(Upos::ADP));
    let art = pct(&|t| is_article(&t.form));
    let pron = pct(&is(Upos::PRON));
    let verb = pct(&is(Upos::VERB));
    let adv = pct(&is(Upos::ADV));
    let intj = pct(&is(Upos::INTJ));

    Ok((noun + adj + prep + art - pron - verb - adv - intj + 100.0) / 2.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureStat {
    pub mean: Option<f64>,
    /// Sample (n - 1) standard deviation; undefined below two observations.
    pub std: Option<f64>,
    pub count: usize,
}

impl FeatureStat {
    pub fn from_values(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return FeatureStat {
                mean: None,
                std: None,
                count: 0,
            };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let std = (n > 1).then(|| {
            let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
            (ss / (n - 1) as f64).sqrt()
        });
        FeatureStat {
            mean: Some(mean),
            std,
            count: n,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub label: Label,
    pub stats: Vec<FeatureStat>,
}

impl GroupSummary {
    pub fn stat(&self, feature: &str) -> Option<&FeatureStat> {
        FEATURE_NAMES
            .iter()
            .position(|&n| n == feature)
            .map(|i| &self.stats[i])
    }
}

/// Defined values of column `j` across rows.
pub fn column_values(rows: &[FeatureRow], j: usize) -> Vec<f64> {
    rows.iter().filter_map(|r| r[j]).collect()
}

/// Per-feature mean, std and count over defined values only.
pub fn aggregate_rows(rows: &[FeatureRow], label: Label) -> GroupSummary {
    GroupSummary {
        label,
        stats: (0..N_FEATURES)
            .map(|j| FeatureStat::from_values(&column_values(rows, j)))
            .collect(),
    }
}

pub fn aggregate(vectors: &[FeatureVector], label: Label) -> GroupSummary {
    let rows: Vec<FeatureRow> = vectors.iter().map(FeatureVector::to_row).collect();
    aggregate_rows(&rows, label)
}

/// One exported feature-matrix row.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureRecord {
    pub user_id: String,
    pub post_index: usize,
    pub label: Label,
    pub values: FeatureRow,
}

/// Collapse post rows into one row per user: the mean of each feature's
/// defined values. Users come out in order of first appearance.
pub fn per_user_means(records: &[FeatureRecord]) -> Vec<FeatureRecord> {
    let mut order: Vec<&str> = Vec::new();
    let mut groups: BTreeMap<&str, Vec<&FeatureRecord>> = BTreeMap::new();
    for r in records {
        let entry = groups.entry(&r.user_id).or_default();
        if entry.is_empty() {
            order.push(&r.user_id);
        }
        entry.push(r);
    }
    order
        .into_iter()
        .map(|user| {
            let rows = &groups[user];
            let mut values = [None; N_FEATURES];
            for (j, v) in values.iter_mut().enumerate() {
                let defined: Vec<f64> = rows.iter().filter_map(|r| r.values[j]).collect();
                *v = FeatureStat::from_values(&defined).mean;
            }
            FeatureRecord {
                user_id: user.to_string(),
                post_index: rows[0].post_index,
                label: rows[0].label,
                values,
            }
        })
        .collect()
}

const META_COLUMNS: [&str; 3] = ["user_id", "post_index", "label"];

pub fn write_feature_csv<W: Write>(records: &[FeatureRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::InvalidInput(format!("CSV write failed: {e}"));
    let header: Vec<&str> = META_COLUMNS
        .iter()
        .chain(FEATURE_NAMES.iter())
        .copied()
        .collect();
    w.write_record(&header).map_err(csv_err)?;
    for r in records {
        let mut row = vec![
            r.user_id.clone(),
            r.post_index.to_string(),
            r.label.to_string(),
        ];
        row.extend(r.values.iter().map(|v| match v {
            Some(x) => x.to_string(),
            None => "NA".to_string(),
        }));
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::InvalidInput(e.to_string()))?;
    Ok(())
}

pub fn read_feature_csv<R: Read>(input: R, path: &Path) -> Result<Vec<FeatureRecord>> {
    let mut rdr = csv::Reader::from_reader(input);
    let header = rdr
        .headers()
        .map_err(|e| Error::parse(path, 1, e.to_string()))?
        .clone();
    let expected: Vec<&str> = META_COLUMNS
        .iter()
        .chain(FEATURE_NAMES.iter())
        .copied()
        .collect();
    if header.iter().collect::<Vec<_>>() != expected {
        return Err(Error::parse(path, 1, "unexpected feature CSV header"));
    }
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| Error::parse(path, line, e.to_string()))?;
        let post_index = rec[1]
            .parse()
            .map_err(|_| Error::parse(path, line, "bad post_index"))?;
        let label = rec[2]
            .parse()
            .map_err(|e: Error| Error::parse(path, line, e.to_string()))?;
        let mut values = [None; N_FEATURES];
        for (j, v) in values.iter_mut().enumerate() {
            let cell = &rec[3 + j];
            *v = if cell == "NA" {
                None
            } else {
                Some(cell.parse().map_err(|_| {
                    Error::parse(
                        path,
                        line,
                        format!("bad value {cell:?} for {}", FEATURE_NAMES[j]),
                    )
                })?)
            };
        }
        out.push(FeatureRecord {
            user_id: rec[0].to_string(),
            post_index,
            label,
            values,
        });
    }
    Ok(out)
}
