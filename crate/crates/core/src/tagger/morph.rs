//! Tense and personal-pronoun morphology derived from PTB tags.

use serde::{Deserialize, Serialize};

use super::tags::Ptb;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Tense {
    Past,
    Present,
    Future,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Person {
    First,
    Second,
    Third,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Number {
    Singular,
    Plural,
}

/// How a modal licenses the future reading of a following base-form verb.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModalLookahead {
    /// Adverbs between the modal and the verb are skipped ("will never go").
    #[default]
    SkipAdverbs,
    /// The modal must immediately precede the verb.
    Strict,
}

/// Assign a tense to every token of one sentence.
///
/// VBD/VBN are past, VBG/VBZ/VBP present. A VB is future when the nearest
/// preceding tag (after skipping adverbs, unless `lookahead` is strict) is MD,
/// and present otherwise.
pub fn assign_tense(tags: &[Ptb], lookahead: ModalLookahead) -> Vec<Option<Tense>> {
    tags.iter()
        .enumerate()
        .map(|(i, &tag)| match tag {
            Ptb::VBD | Ptb::VBN => Some(Tense::Past),
            Ptb::VBG | Ptb::VBZ | Ptb::VBP => Some(Tense::Present),
            Ptb::VB => {
                if preceded_by_modal(&tags[..i], lookahead) {
                    Some(Tense::Future)
                } else {
                    Some(Tense::Present)
                }
            }
            _ => None,
        })
        .collect()
}

fn preceded_by_modal(before: &[Ptb], lookahead: ModalLookahead) -> bool {
    let mut prev = before.iter().rev();
    let nearest = match lookahead {
        ModalLookahead::Strict => prev.next(),
        ModalLookahead::SkipAdverbs => prev.find(|t| !t.is_adverb()),
    };
    nearest == Some(&Ptb::MD)
}

/// Person and number of a personal pronoun.
///
/// Only PRP and PRP$ tokens in the lexicon qualify. Number is left out where
/// the form is ambiguous ("you", "your").
pub fn pronoun_morph(form: &str, ptb: Ptb) -> Option<(Person, Option<Number>)> {
    if !matches!(ptb, Ptb::PRP | Ptb::PRPS) {
        return None;
    }
    use Number::*;
    use Person::*;
    let lower = form.to_lowercase();
    let morph = match lower.as_str() {
        "i" | "me" | "my" | "mine" | "myself" => (First, Some(Singular)),
        "we" | "us" | "our" | "ours" | "ourselves" => (First, Some(Plural)),
        "you" | "your" | "yours" => (Second, None),
        "yourself" => (Second, Some(Singular)),
        "yourselves" => (Second, Some(Plural)),
        "he" | "him" | "his" | "himself" | "she" | "her" | "hers" | "herself" | "it" | "its"
        | "itself" => (Third, Some(Singular)),
        "they" | "them" | "their" | "theirs" | "themselves" => (Third, Some(Plural)),
        _ => return None,
    };
    Some(morph)
}

#[cfg(test)]
mod tests {
    use super::*;
    use Ptb::*;

    fn tenses(tags: &[Ptb]) -> Vec<Option<Tense>> {
        assign_tense(tags, ModalLookahead::SkipAdverbs)
    }

    #[test]
    fn modal_then_base_is_future() {
        assert_eq!(
            tenses(&[PRP, MD, VB]),
            vec![None, None, Some(Tense::Future)]
        );
    }

    #[test]
    fn past_forms() {
        assert_eq!(tenses(&[PRP, VBD]), vec![None, Some(Tense::Past)]);
        assert_eq!(tenses(&[VBN]), vec![Some(Tense::Past)]);
    }

    #[test]
    fn adverb_between_modal_and_verb() {
        assert_eq!(
            tenses(&[PRP, MD, RB, VB]),
            vec![None, None, None, Some(Tense::Future)]
        );
        assert_eq!(
            assign_tense(&[PRP, MD, RB, VB], ModalLookahead::Strict),
            vec![None, None, None, Some(Tense::Present)]
        );
    }

    #[test]
    fn bare_base_form_is_present() {
        assert_eq!(tenses(&[TO, VB]), vec![None, Some(Tense::Present)]);
        assert_eq!(
            tenses(&[VB, DT, NN]),
            vec![Some(Tense::Present), None, None]
        );
        // a modal further back does not reach across other words
        assert_eq!(tenses(&[MD, VB, CC, VB])[3], Some(Tense::Present));
    }

    #[test]
    fn pronoun_lexicon() {
        assert_eq!(
            pronoun_morph("I", PRP),
            Some((Person::First, Some(Number::Singular)))
        );
        assert_eq!(
            pronoun_morph("ourselves", PRP),
            Some((Person::First, Some(Number::Plural)))
        );
        assert_eq!(
            pronoun_morph("My", PRPS),
            Some((Person::First, Some(Number::Singular)))
        );
        assert_eq!(pronoun_morph("you", PRP), Some((Person::Second, None)));
        assert_eq!(
            pronoun_morph("themselves", PRP),
            Some((Person::Third, Some(Number::Plural)))
        );
        assert_eq!(pronoun_morph("cat", NN), None);
        assert_eq!(pronoun_morph("who", WP), None);
        assert_eq!(pronoun_morph("I", NN), None);
    }
}
