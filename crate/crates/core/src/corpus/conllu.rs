//! CoNLL-U reading and writing for pre-tagged text.
//!
//! Columns used: FORM (2), LEMMA (3), UPOS (4) and XPOS (5, a PTB tag).
//! Tense and pronoun features are always recomputed from XPOS; whatever the
//! FEATS column says on input is ignored. Documents are separated by
//! `# newdoc` comments; `# user_id = ...` and `# label = ...` comments carry
//! document metadata in files written by [`write_tagged_corpus`].

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use super::{tally, CorpusCounts, Label};
use crate::error::{Error, Result};
use crate::tagger::{
    annotate_sentence, ModalLookahead, Number, Person, Ptb, TaggedToken, Tense, Upos,
};

#[derive(Clone, Debug, PartialEq)]
pub struct TaggedDocument {
    pub user_id: String,
    pub label: Label,
    pub sentences: Vec<Vec<TaggedToken>>,
}

impl TaggedDocument {
    pub fn tokens(&self) -> impl Iterator<Item = &TaggedToken> {
        self.sentences.iter().flatten()
    }

    /// All tokens of the document in order.
    pub fn flat_tokens(&self) -> Vec<TaggedToken> {
        self.tokens().cloned().collect()
    }

    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(Vec::len).sum()
    }
}

#[derive(Default)]
struct RawDoc {
    user_id: Option<String>,
    label: Option<Label>,
    sentences: Vec<Vec<TaggedToken>>,
}

#[derive(Default)]
struct RawSentence {
    forms: Vec<String>,
    lemmas: Vec<Option<String>>,
    upos: Vec<Upos>,
    ptb: Vec<Ptb>,
}

impl RawSentence {
    fn flush(&mut self, lookahead: ModalLookahead) -> Option<Vec<TaggedToken>> {
        if self.forms.is_empty() {
            return None;
        }
        let s = std::mem::take(self);
        Some(annotate_sentence(
            &s.forms,
            &s.ptb,
            Some(&s.upos),
            Some(&s.lemmas),
            lookahead,
        ))
    }
}

fn parse<R: BufRead>(reader: R, path: &Path, lookahead: ModalLookahead) -> Result<Vec<RawDoc>> {
    let mut docs: Vec<RawDoc> = Vec::new();
    let mut open: Option<RawDoc> = None;
    let mut sentence = RawSentence::default();

    for (i, line) in reader.lines().enumerate() {
        let n = i + 1;
        let line = line.map_err(|e| Error::parse(path, n, e.to_string()))?;
        let line = line.trim_end_matches('\r');

        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if comment == "newdoc" || comment.starts_with("newdoc ") {
                if let Some(s) = sentence.flush(lookahead) {
                    open.get_or_insert_with(RawDoc::default).sentences.push(s);
                }
                if let Some(doc) = open.take() {
                    docs.push(doc);
                }
                open = Some(RawDoc::default());
            } else if let Some((key, value)) = comment.split_once('=') {
                let doc = open.get_or_insert_with(RawDoc::default);
                match key.trim() {
                    "user_id" => doc.user_id = Some(value.trim().to_string()),
                    "label" => {
                        let label = value
                            .trim()
                            .parse()
                            .map_err(|e: Error| Error::parse(path, n, e.to_string()))?;
                        doc.label = Some(label);
                    }
                    _ => {}
                }
            }
            continue;
        }

        if line.trim().is_empty() {
            if let Some(s) = sentence.flush(lookahead) {
                open.get_or_insert_with(RawDoc::default).sentences.push(s);
            }
            continue;
        }

        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            return Err(Error::parse(
                path,
                n,
                format!("expected 10 tab-separated columns, found {}", cols.len()),
            ));
        }
        // multiword ranges and empty nodes carry no tags of their own
        if cols[0].contains('-') || cols[0].contains('.') {
            continue;
        }
        let upos: Upos = cols[3]
            .parse()
            .map_err(|e: Error| Error::parse(path, n, e.to_string()))?;
        let ptb: Ptb = cols[4]
            .parse()
            .map_err(|e: Error| Error::parse(path, n, e.to_string()))?;
        sentence.forms.push(cols[1].to_string());
        sentence
            .lemmas
            .push((cols[2] != "_").then(|| cols[2].to_string()));
        sentence.upos.push(upos);
        sentence.ptb.push(ptb);
    }

    if let Some(s) = sentence.flush(lookahead) {
        open.get_or_insert_with(RawDoc::default).sentences.push(s);
    }
    if let Some(doc) = open.take() {
        docs.push(doc);
    }
    Ok(docs)
}

/// Read pre-tagged documents, assigning every document the given label and user.
pub fn load_conllu(path: &Path, label: Label, user_id: &str) -> Result<Vec<TaggedDocument>> {
    load_conllu_with(path, label, user_id, ModalLookahead::default())
}

pub fn load_conllu_with(
    path: &Path,
    label: Label,
    user_id: &str,
    lookahead: ModalLookahead,
) -> Result<Vec<TaggedDocument>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let docs = read_conllu(BufReader::new(file), path, lookahead)?;
    Ok(docs
        .into_iter()
        .map(|d| TaggedDocument {
            user_id: user_id.to_string(),
            label,
            sentences: d.sentences,
        })
        .collect())
}

/// Raw parse result: sentences plus whatever metadata comments were present.
#[derive(Clone, Debug)]
pub struct ConlluDoc {
    pub user_id: Option<String>,
    pub label: Option<Label>,
    pub sentences: Vec<Vec<TaggedToken>>,
}

pub fn read_conllu<R: BufRead>(
    reader: R,
    path: &Path,
    lookahead: ModalLookahead,
) -> Result<Vec<ConlluDoc>> {
    Ok(parse(reader, path, lookahead)?
        .into_iter()
        .map(|d| ConlluDoc {
            user_id: d.user_id,
            label: d.label,
            sentences: d.sentences,
        })
        .collect())
}

/// Read a tagged corpus whose documents all carry `user_id` and `label` comments.
pub fn load_tagged_corpus(
    path: &Path,
    lookahead: ModalLookahead,
) -> Result<(Vec<TaggedDocument>, CorpusCounts)> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let raw = read_conllu(BufReader::new(file), path, lookahead)?;
    let mut docs = Vec::with_capacity(raw.len());
    for (i, d) in raw.into_iter().enumerate() {
        let (Some(user_id), Some(label)) = (d.user_id, d.label) else {
            return Err(Error::InvalidInput(format!(
                "{}: document #{} lacks `# user_id` / `# label` comments",
                path.display(),
                i + 1
            )));
        };
        docs.push(TaggedDocument {
            user_id,
            label,
            sentences: d.sentences,
        });
    }
    let counts = tally(docs.iter().map(|d| (d.user_id.as_str(), d.label)))?;
    Ok((docs, counts))
}

fn feats(t: &TaggedToken) -> String {
    let mut parts = Vec::new();
    if let Some(p) = t.pron_number {
        parts.push(match p {
            Number::Singular => "Number=Sing",
            Number::Plural => "Number=Plur",
        });
    }
    if let Some(p) = t.pron_person {
        parts.push(match p {
            Person::First => "Person=1",
            Person::Second => "Person=2",
            Person::Third => "Person=3",
        });
    }
    if let Some(tense) = t.tense {
        parts.push(match tense {
            Tense::Past => "Tense=Past",
            Tense::Present => "Tense=Pres",
            Tense::Future => "Tense=Fut",
        });
    }
    if parts.is_empty() {
        "_".to_string()
    } else {
        parts.join("|")
    }
}

/// Write documents as CoNLL-U with metadata comments and computed FEATS.
pub fn write_tagged_corpus<W: Write>(docs: &[TaggedDocument], mut out: W) -> std::io::Result<()> {
    for (i, doc) in docs.iter().enumerate() {
        writeln!(out, "# newdoc id = d{i}")?;
        writeln!(out, "# user_id = {}", doc.user_id)?;
        writeln!(out, "# label = {}", doc.label)?;
        for sentence in &doc.sentences {
            for (k, t) in sentence.iter().enumerate() {
                writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{}\t{}\t_\t_\t_\t_",
                    k + 1,
                    t.form,
                    t.lemma.as_deref().unwrap_or("_"),
                    t.upos,
                    t.ptb,
                    feats(t)
                )?;
            }
            writeln!(out)?;
        }
    }
    Ok(())
}
