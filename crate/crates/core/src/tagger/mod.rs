//! Tokenization, PTB tagging, UPOS mapping and tense/pronoun morphology.

mod morph;
mod perceptron;
mod tags;
mod tokenize;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, TaggedDocument};
use crate::error::{Error, Result};

pub use morph::{assign_tense, pronoun_morph, ModalLookahead, Number, Person, Tense};
pub use perceptron::{train_tagger, TaggedSentence, TaggerModel};
pub use tags::{ptb_str_to_upos, ptb_to_upos, Ptb, Upos};
pub use tokenize::tokenize;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaggedToken {
    pub form: String,
    pub lemma: Option<String>,
    pub ptb: Ptb,
    pub upos: Upos,
    pub tense: Option<Tense>,
    pub pron_person: Option<Person>,
    pub pron_number: Option<Number>,
}

impl TaggedToken {
    pub fn is_personal_pronoun(&self) -> bool {
        self.pron_person.is_some()
    }
}

/// Build tagged tokens for one sentence from forms and PTB tags.
///
/// `upos` overrides the PTB-derived category when supplied (pre-tagged
/// input). Tense is kept only on VERB/AUX tokens and pronoun morphology only
/// on PRON tokens, whatever the fine tag says.
pub fn annotate_sentence(
    forms: &[String],
    ptbs: &[Ptb],
    upos: Option<&[Upos]>,
    lemmas: Option<&[Option<String>]>,
    lookahead: ModalLookahead,
) -> Vec<TaggedToken> {
    debug_assert_eq!(forms.len(), ptbs.len());
    let tenses = assign_tense(ptbs, lookahead);
    forms
        .iter()
        .zip(ptbs)
        .zip(tenses)
        .enumerate()
        .map(|(i, ((form, &ptb), tense))| {
            let upos = upos.map_or_else(|| ptb_to_upos(ptb), |u| u[i]);
            let tense = tense.filter(|_| matches!(upos, Upos::VERB | Upos::AUX));
            let morph = pronoun_morph(form, ptb).filter(|_| upos == Upos::PRON);
            TaggedToken {
                form: form.clone(),
                lemma: lemmas.and_then(|l| l[i].clone()),
                ptb,
                upos,
                tense,
                pron_person: morph.map(|m| m.0),
                pron_number: morph.and_then(|m| m.1),
            }
        })
        .collect()
}

fn is_sentence_break(token: &str) -> bool {
    matches!(token, "." | "!" | "?" | "..." | "?!" | "!?")
}

/// Split a token stream into sentences at sentence-final punctuation.
pub fn split_sentences<S: AsRef<str>>(tokens: &[S]) -> Vec<&[S]> {
    let mut out = Vec::new();
    let mut start = 0;
    for (i, t) in tokens.iter().enumerate() {
        if is_sentence_break(t.as_ref()) {
            // runs like "?" "!" stay with the sentence they close
            if tokens
                .get(i + 1)
                .is_some_and(|n| is_sentence_break(n.as_ref()))
            {
                continue;
            }
            out.push(&tokens[start..=i]);
            start = i + 1;
        }
    }
    if start < tokens.len() {
        out.push(&tokens[start..]);
    }
    out
}

/// Tag tokens sentence by sentence, keeping the sentence structure.
pub fn tag_sentences(
    model: &TaggerModel,
    tokens: &[String],
    lookahead: ModalLookahead,
) -> Vec<Vec<TaggedToken>> {
    split_sentences(tokens)
        .into_iter()
        .map(|sentence| {
            let ptbs = model.tag_sentence(sentence);
            annotate_sentence(sentence, &ptbs, None, None, lookahead)
        })
        .collect()
}

/// Tag a token list; one output token per input token.
pub fn tag(model: &TaggerModel, tokens: &[String]) -> Vec<TaggedToken> {
    tag_sentences(model, tokens, ModalLookahead::default())
        .into_iter()
        .flatten()
        .collect()
}

/// Tokenize and tag every document, in parallel, keeping corpus order.
pub fn tag_corpus(
    model: &TaggerModel,
    corpus: &Corpus,
    lookahead: ModalLookahead,
) -> Vec<TaggedDocument> {
    corpus
        .documents()
        .par_iter()
        .map(|doc| TaggedDocument {
            user_id: doc.user_id.clone(),
            label: doc.label,
            sentences: tag_sentences(model, &tokenize(&doc.text()), lookahead),
        })
        .collect()
}

/// Seeded shuffle of `sentences` into `(train, held_out)`, with
/// `round(n · fraction)` sentences held out.
pub fn holdout_split(
    mut sentences: Vec<TaggedSentence>,
    fraction: f64,
    seed: u64,
) -> Result<(Vec<TaggedSentence>, Vec<TaggedSentence>)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::InvalidInput(format!(
            "held-out fraction must lie strictly between 0 and 1, got {fraction}"
        )));
    }
    sentences.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let k = (sentences.len() as f64 * fraction).round() as usize;
    if k == 0 || k == sentences.len() {
        return Err(Error::InsufficientData(format!(
            "{} sentences cannot be split with held-out fraction {fraction}",
            sentences.len()
        )));
    }
    let held_out = sentences.split_off(sentences.len() - k);
    Ok((sentences, held_out))
}
