//! Tokenization, part-of-speech tagging and lexicon lookups.

mod lexicon;
mod tagger;
mod tokenize;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use lexicon::{
    load_confusion_lexicon, load_verb_lexicon, load_wordlist, ConfusionLexicon, ConfusionPair, VerbFormGroup,
    VerbLexicon, WordList,
};
pub use tagger::Tagger;
pub use tokenize::{detokenize, fold_case, is_contraction, is_punct, tokenize, tokenize_pretokenized, CONTRACTIONS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum PosTag {
    Noun,
    Verb,
    Adj,
    Adv,
    Pron,
    Det,
    Prep,
    Conj,
    Part,
    Punct,
    Num,
    Other,
}

impl PosTag {
    pub fn as_str(self) -> &'static str {
        match self {
            PosTag::Noun => "NOUN",
            PosTag::Verb => "VERB",
            PosTag::Adj => "ADJ",
            PosTag::Adv => "ADV",
            PosTag::Pron => "PRON",
            PosTag::Det => "DET",
            PosTag::Prep => "PREP",
            PosTag::Conj => "CONJ",
            PosTag::Part => "PART",
            PosTag::Punct => "PUNCT",
            PosTag::Num => "NUM",
            PosTag::Other => "OTHER",
        }
    }
}

impl fmt::Display for PosTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    pub lower: String,
    pub pos: PosTag,
    pub index: usize,
}

impl Token {
    pub fn new(surface: String, pos: PosTag, index: usize) -> Self {
        let lower = fold_case(&surface);
        Token {
            surface,
            lower,
            pos,
            index,
        }
    }
}

pub fn surfaces(tokens: &[Token]) -> Vec<String> {
    tokens.iter().map(|t| t.surface.clone()).collect()
}
