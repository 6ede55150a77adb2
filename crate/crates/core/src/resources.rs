//! Bundled default lexicons and the assembled lexicon set.

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::align::{AlignCosts, Aligner};
use crate::error::{Error, Result};
use crate::text::{
    load_confusion_lexicon, load_verb_lexicon, load_wordlist, ConfusionLexicon, Tagger, VerbLexicon, WordList,
};
use crate::typing::{Analyzer, EditTyper};

pub const BUNDLED_VERBS: &str = include_str!("../resources/verbs.txt");
pub const BUNDLED_CONFUSIONS: &str = include_str!("../resources/confusions.txt");
pub const BUNDLED_INSERTIONS: &str = include_str!("../resources/insertions.txt");
pub const BUNDLED_DELETIONS: &str = include_str!("../resources/deletions.txt");
pub const BUNDLED_DICTIONARY: &str = include_str!("../resources/dictionary.txt");

/// SHA-256 hex digests of the raw lexicon bytes, in load order.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct LexiconHashes {
    pub verbs: String,
    pub confusions: String,
    pub insertions: String,
    pub deletions: String,
    pub dictionary: String,
}

#[derive(Debug, Clone)]
pub struct Resources {
    pub verbs: VerbLexicon,
    pub confusions: ConfusionLexicon,
    pub insertions: WordList,
    pub deletions: WordList,
    pub dictionary: WordList,
    pub hashes: LexiconHashes,
}

/// Paths overriding the bundled lexicons; `None` keeps the default.
#[derive(Debug, Clone, Default)]
pub struct LexiconPaths {
    pub verbs: Option<std::path::PathBuf>,
    pub confusions: Option<std::path::PathBuf>,
    pub insertions: Option<std::path::PathBuf>,
    pub deletions: Option<std::path::PathBuf>,
    pub dictionary: Option<std::path::PathBuf>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn read_source(path: Option<&Path>, bundled: &'static str) -> Result<Vec<u8>> {
    match path {
        None => Ok(bundled.as_bytes().to_vec()),
        Some(p) => {
            let mut bytes = Vec::new();
            std::io::Read::read_to_end(&mut BufReader::new(File::open(p).map_err(|e| {
                Error::Config(format!("cannot open lexicon {}: {e}", p.display()))
            })?), &mut bytes)?;
            Ok(bytes)
        }
    }
}

impl Resources {
    pub fn bundled() -> Result<Self> {
        Self::load(&LexiconPaths::default())
    }

    pub fn load(paths: &LexiconPaths) -> Result<Self> {
        let verbs = read_source(paths.verbs.as_deref(), BUNDLED_VERBS)?;
        let confusions = read_source(paths.confusions.as_deref(), BUNDLED_CONFUSIONS)?;
        let insertions = read_source(paths.insertions.as_deref(), BUNDLED_INSERTIONS)?;
        let deletions = read_source(paths.deletions.as_deref(), BUNDLED_DELETIONS)?;
        let dictionary = read_source(paths.dictionary.as_deref(), BUNDLED_DICTIONARY)?;
        Ok(Resources {
            hashes: LexiconHashes {
                verbs: sha256_hex(&verbs),
                confusions: sha256_hex(&confusions),
                insertions: sha256_hex(&insertions),
                deletions: sha256_hex(&deletions),
                dictionary: sha256_hex(&dictionary),
            },
            verbs: load_verb_lexicon(&verbs[..])?,
            confusions: load_confusion_lexicon(&confusions[..])?,
            insertions: load_wordlist(&insertions[..])?,
            deletions: load_wordlist(&deletions[..])?,
            dictionary: load_wordlist(&dictionary[..])?,
        })
    }

    pub fn tagger(&self) -> Tagger {
        Tagger::new(self.verbs.clone())
    }

    pub fn analyzer(&self) -> Analyzer {
        self.analyzer_with(AlignCosts::default())
    }

    pub fn analyzer_with(&self, costs: AlignCosts) -> Analyzer {
        Analyzer::new(
            self.tagger(),
            Aligner::new(costs, self.verbs.clone()),
            EditTyper::new(self.verbs.clone(), self.dictionary.clone()),
        )
    }
}
