//! Flat `key = value` tool configuration.
//!
//! Grammar: one `key = value` pair per line; `#` starts a comment line;
//! blank lines are ignored; keys may appear once. Relative paths resolve
//! against the directory holding the file.
//!
//! Keys:
//!
//! | key | value |
//! |-----|-------|
//! | `lexicon.verbs`, `lexicon.confusions`, `lexicon.insertions`, `lexicon.deletions`, `lexicon.dictionary` | path |
//! | `align.verb_group`, `align.orthographic`, `align.orthographic_threshold` | number |
//! | `corrupt.mode` | `plausible` or `implausible` |
//! | `corrupt.per_token_error_prob` | number in [0, 1] |
//! | `corrupt.max_errors_per_sentence` | integer >= 1 |
//! | `corrupt.weight.verb`, `.replace`, `.insert`, `.delete` | number >= 0 |
//! | `train.epochs` | integer >= 1 |
//! | `train.learning_rate`, `train.l2` | number |
//! | `threads` | integer >= 1 |
//! | `seed` | unsigned 64-bit integer |

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::align::AlignCosts;
use crate::classifier::TrainConfig;
use crate::corrupt::CorruptionConfig;
use crate::error::{Error, Result};
use crate::resources::{LexiconPaths, Resources};

pub const CONFIG_ENV: &str = "GEC_DATAQ_CONFIG";

#[derive(Debug, Clone, Default)]
pub struct ToolConfig {
    pub lexicons: LexiconPaths,
    pub align: AlignCosts,
    pub corruption: CorruptionConfig,
    pub training: TrainConfig,
    pub threads: Option<usize>,
    pub seed: u64,
}

fn value<T: FromStr>(line: usize, key: &str, raw: &str) -> Result<T> {
    raw.parse()
        .map_err(|_| Error::Config(format!("line {line}: invalid value '{raw}' for {key}")))
}

impl ToolConfig {
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let mut cfg = ToolConfig::default();
        let mut seen = BTreeSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (key, val) = trimmed
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {line}: expected 'key = value'")))?;
            let (key, val) = (key.trim(), val.trim());
            if !seen.insert(key.to_string()) {
                return Err(Error::Config(format!("line {line}: duplicate key {key}")));
            }
            let path = || base_dir.join(val);
            match key {
                "lexicon.verbs" => cfg.lexicons.verbs = Some(path()),
                "lexicon.confusions" => cfg.lexicons.confusions = Some(path()),
                "lexicon.insertions" => cfg.lexicons.insertions = Some(path()),
                "lexicon.deletions" => cfg.lexicons.deletions = Some(path()),
                "lexicon.dictionary" => cfg.lexicons.dictionary = Some(path()),
                "align.verb_group" => cfg.align.verb_group = value(line, key, val)?,
                "align.orthographic" => cfg.align.orthographic = value(line, key, val)?,
                "align.orthographic_threshold" => cfg.align.orthographic_threshold = value(line, key, val)?,
                "corrupt.mode" => {
                    cfg.corruption.mode = val.parse().map_err(|e| Error::Config(format!("line {line}: {e}")))?
                }
                "corrupt.per_token_error_prob" => cfg.corruption.per_token_error_prob = value(line, key, val)?,
                "corrupt.max_errors_per_sentence" => cfg.corruption.max_errors_per_sentence = value(line, key, val)?,
                "corrupt.weight.verb" => cfg.corruption.rule_weights.verb = value(line, key, val)?,
                "corrupt.weight.replace" => cfg.corruption.rule_weights.replace = value(line, key, val)?,
                "corrupt.weight.insert" => cfg.corruption.rule_weights.insert = value(line, key, val)?,
                "corrupt.weight.delete" => cfg.corruption.rule_weights.delete = value(line, key, val)?,
                "train.epochs" => cfg.training.epochs = value(line, key, val)?,
                "train.learning_rate" => cfg.training.learning_rate = value(line, key, val)?,
                "train.l2" => cfg.training.l2 = value(line, key, val)?,
                "threads" => cfg.threads = Some(value(line, key, val)?),
                "seed" => cfg.seed = value(line, key, val)?,
                other => return Err(Error::Config(format!("line {line}: unknown key {other}"))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, &base)
    }

    /// Loads `explicit`, else the file named by `GEC_DATAQ_CONFIG`, else defaults.
    pub fn resolve(explicit: Option<&Path>) -> Result<Self> {
        if let Some(p) = explicit {
            return Self::load(p);
        }
        match std::env::var_os(CONFIG_ENV) {
            Some(p) if !p.is_empty() => Self::load(&PathBuf::from(p)),
            _ => Ok(Self::default()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.align.validate()?;
        self.corruption.validate()?;
        self.training.validate()?;
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        for p in [
            &self.lexicons.verbs,
            &self.lexicons.confusions,
            &self.lexicons.insertions,
            &self.lexicons.deletions,
            &self.lexicons.dictionary,
        ]
        .into_iter()
        .flatten()
        {
            if !p.is_file() {
                return Err(Error::Config(format!("lexicon file {} does not exist", p.display())));
            }
        }
        Ok(())
    }

    pub fn resources(&self) -> Result<Resources> {
        Resources::load(&self.lexicons)
    }
}
