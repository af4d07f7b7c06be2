//! Labeled two-group document collections and their on-disk formats.

mod conllu;
mod erisk;
mod jsonl;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use conllu::{
    load_conllu, load_conllu_with, load_tagged_corpus, read_conllu, write_tagged_corpus, ConlluDoc,
    TaggedDocument,
};
pub use erisk::load_erisk_xml;
pub use jsonl::{load_jsonl, read_jsonl, write_jsonl};

/// Which side of the comparison a document belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Target,
    Control,
}

impl Label {
    pub const BOTH: [Label; 2] = [Label::Target, Label::Control];

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Target => "target",
            Label::Control => "control",
        }
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "target" => Ok(Label::Target),
            "control" => Ok(Label::Control),
            _ => Err(Error::UnknownLabel(s.to_string())),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub user_id: String,
    pub label: Label,
    pub timestamp: Option<String>,
    pub title: Option<String>,
    pub body: String,
}

impl Document {
    /// Text that gets tagged: the title (if any) and body joined by one newline.
    pub fn text(&self) -> String {
        match self.title.as_deref() {
            Some(t) if !t.is_empty() => {
                if self.body.is_empty() {
                    t.to_string()
                } else {
                    format!("{t}\n{}", self.body)
                }
            }
            _ => self.body.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupCounts {
    pub documents: usize,
    pub users: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusCounts {
    pub target: GroupCounts,
    pub control: GroupCounts,
}

impl CorpusCounts {
    pub fn get(&self, label: Label) -> GroupCounts {
        match label {
            Label::Target => self.target,
            Label::Control => self.control,
        }
    }
}

/// Ordered, immutable document collection.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Corpus {
    documents: Vec<Document>,
    counts: CorpusCounts,
}

impl Corpus {
    /// Build a corpus, rejecting users that appear under both labels.
    pub fn new(documents: Vec<Document>) -> Result<Self> {
        let counts = tally(documents.iter().map(|d| (d.user_id.as_str(), d.label)))?;
        Ok(Corpus { documents, counts })
    }

    /// Concatenate corpora in the given order.
    pub fn merge(parts: impl IntoIterator<Item = Corpus>) -> Result<Self> {
        Corpus::new(parts.into_iter().flat_map(|c| c.documents).collect())
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn counts(&self) -> CorpusCounts {
        self.counts
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn into_documents(self) -> Vec<Document> {
        self.documents
    }
}

/// Per-label document and user tallies; errors if a user carries both labels.
pub(crate) fn tally<'a>(rows: impl Iterator<Item = (&'a str, Label)>) -> Result<CorpusCounts> {
    let mut users: HashMap<&str, Label> = HashMap::new();
    let mut counts = CorpusCounts::default();
    for (user, label) in rows {
        match users.get(user) {
            Some(&seen) if seen != label => return Err(Error::ConflictingLabel(user.to_string())),
            Some(_) => {}
            None => {
                users.insert(user, label);
                match label {
                    Label::Target => counts.target.users += 1,
                    Label::Control => counts.control.users += 1,
                }
            }
        }
        match label {
            Label::Target => counts.target.documents += 1,
            Label::Control => counts.control.documents += 1,
        }
    }
    Ok(counts)
}
