//! Penn Treebank and Universal Dependencies tag sets.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

macro_rules! tag_enum {
    ($(#[$meta:meta])* $name:ident, $err:ident { $($variant:ident => $text:literal $(| $alias:literal)*),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self {
                    $($name::$variant => $text),+
                }
            }
        }

        impl FromStr for $name {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self, Error> {
                match s {
                    $($text $(| $alias)* => Ok($name::$variant),)+
                    other => Err(Error::$err(other.to_string())),
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }
    };
}

tag_enum! {
    /// Penn Treebank part-of-speech tag, including the punctuation and
    /// web-text extensions found in the English UD treebanks.
    Ptb, UnknownPtbTag {
        CC => "CC",
        CD => "CD",
        DT => "DT",
        EX => "EX",
        FW => "FW",
        IN => "IN",
        JJ => "JJ",
        JJR => "JJR",
        JJS => "JJS",
        LS => "LS",
        MD => "MD",
        NN => "NN",
        NNS => "NNS",
        NNP => "NNP",
        NNPS => "NNPS",
        PDT => "PDT",
        POS => "POS",
        PRP => "PRP",
        PRPS => "PRP$",
        RB => "RB",
        RBR => "RBR",
        RBS => "RBS",
        RP => "RP",
        SYM => "SYM",
        TO => "TO",
        UH => "UH",
        VB => "VB",
        VBD => "VBD",
        VBG => "VBG",
        VBN => "VBN",
        VBP => "VBP",
        VBZ => "VBZ",
        WDT => "WDT",
        WP => "WP",
        WPS => "WP$",
        WRB => "WRB",
        Period => ".",
        Comma => ",",
        Colon => ":",
        OpenQuote => "``",
        CloseQuote => "''",
        Lrb => "-LRB-" | "(",
        Rrb => "-RRB-" | ")",
        Hyph => "HYPH",
        Nfp => "NFP",
        Dollar => "$",
        Hash => "#",
        Add => "ADD",
        Afx => "AFX",
        Gw => "GW",
        XX => "XX",
    }
}

tag_enum! {
    /// Universal Dependencies coarse part-of-speech tag.
    Upos, UnknownUpos {
        ADJ => "ADJ",
        ADV => "ADV",
        NOUN => "NOUN",
        PROPN => "PROPN",
        VERB => "VERB",
        ADP => "ADP",
        CCONJ => "CCONJ",
        DET => "DET",
        PART => "PART",
        SCONJ => "SCONJ",
        AUX => "AUX",
        PRON => "PRON",
        NUM => "NUM",
        INTJ => "INTJ",
        PUNCT => "PUNCT",
        SYM => "SYM",
        X => "X",
    }
}

impl Ptb {
    pub fn is_adverb(self) -> bool {
        matches!(self, Ptb::RB | Ptb::RBR | Ptb::RBS)
    }

    /// Sentence-final punctuation, used to split tagged posts into sentences.
    pub fn is_sentence_final(self) -> bool {
        self == Ptb::Period
    }

    pub fn to_upos(self) -> Upos {
        ptb_to_upos(self)
    }
}

/// Map a PTB tag onto its UPOS category.
///
/// `IN` always maps to `ADP`; telling subordinating conjunctions apart from
/// prepositions needs a parse, so `SCONJ` only appears in pre-tagged input.
pub fn ptb_to_upos(ptb: Ptb) -> Upos {
    use Ptb::*;
    match ptb {
        NN | NNS => Upos::NOUN,
        NNP | NNPS => Upos::PROPN,
        VB | VBD | VBG | VBN | VBP | VBZ => Upos::VERB,
        MD => Upos::AUX,
        JJ | JJR | JJS | Afx => Upos::ADJ,
        RB | RBR | RBS | WRB => Upos::ADV,
        IN => Upos::ADP,
        DT | PDT | WDT => Upos::DET,
        CC => Upos::CCONJ,
        PRP | PRPS | WP | WPS | EX => Upos::PRON,
        RP | TO | POS => Upos::PART,
        UH => Upos::INTJ,
        CD => Upos::NUM,
        Period | Comma | Colon | OpenQuote | CloseQuote | Lrb | Rrb | Hyph | Nfp => Upos::PUNCT,
        SYM | Dollar | Hash => Upos::SYM,
        FW | LS | XX | Add | Gw => Upos::X,
    }
}

/// String-level convenience over [`ptb_to_upos`]; fails on tags outside the set.
pub fn ptb_str_to_upos(tag: &str) -> Result<Upos, Error> {
    tag.parse::<Ptb>().map(ptb_to_upos)
}
