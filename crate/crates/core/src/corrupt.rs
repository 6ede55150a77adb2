//! Rule-based corruption in plausible and implausible modes, and assembly of
//! the 1:1 classifier training corpus.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Dataset, Label, LabeledPair, Origin, SentencePair};
use crate::error::{Error, Result};
use crate::resources::Resources;
use crate::text::{detokenize, fold_case, surfaces, tokenize, ConfusionLexicon, VerbLexicon, WordList};

/// Attempts per training-corpus slot before the slot is dropped.
pub const MAX_ATTEMPTS: u64 = 10;

/// Per-sentence generator: ChaCha8 keyed by `seed`, on stream `index`.
pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Plausible,
    Implausible,
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "plausible" => Ok(Mode::Plausible),
            "implausible" => Ok(Mode::Implausible),
            other => Err(format!("unknown corruption mode '{other}'")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Plausible => "plausible",
            Mode::Implausible => "implausible",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum RuleKind {
    Verb,
    Replace,
    Insert,
    Delete,
}

impl RuleKind {
    pub const ALL: [RuleKind; 4] = [RuleKind::Verb, RuleKind::Replace, RuleKind::Insert, RuleKind::Delete];
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RuleWeights {
    pub verb: f64,
    pub replace: f64,
    pub insert: f64,
    pub delete: f64,
}

impl Default for RuleWeights {
    fn default() -> Self {
        RuleWeights {
            verb: 1.0,
            replace: 1.0,
            insert: 1.0,
            delete: 1.0,
        }
    }
}

impl RuleWeights {
    pub fn get(&self, kind: RuleKind) -> f64 {
        match kind {
            RuleKind::Verb => self.verb,
            RuleKind::Replace => self.replace,
            RuleKind::Insert => self.insert,
            RuleKind::Delete => self.delete,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorruptionConfig {
    pub mode: Mode,
    pub per_token_error_prob: f64,
    pub max_errors_per_sentence: usize,
    pub rule_weights: RuleWeights,
    pub seed: u64,
}

impl Default for CorruptionConfig {
    fn default() -> Self {
        CorruptionConfig {
            mode: Mode::Plausible,
            per_token_error_prob: 0.15,
            max_errors_per_sentence: 4,
            rule_weights: RuleWeights::default(),
            seed: 0,
        }
    }
}

impl CorruptionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.per_token_error_prob) {
            return Err(Error::Config(format!(
                "per_token_error_prob must be in [0, 1], got {}",
                self.per_token_error_prob
            )));
        }
        if self.max_errors_per_sentence == 0 {
            return Err(Error::Config("max_errors_per_sentence must be at least 1".into()));
        }
        let w = &self.rule_weights;
        let all = [w.verb, w.replace, w.insert, w.delete];
        if all.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::Config("rule weights must be finite and non-negative".into()));
        }
        if all.iter().all(|&x| x == 0.0) {
            return Err(Error::Config("rule weights are all zero".into()));
        }
        Ok(())
    }
}

/// The four corruption lexicons.
#[derive(Debug, Clone)]
pub struct CorruptionRuleSet {
    pub verbs: VerbLexicon,
    pub confusions: ConfusionLexicon,
    pub insertions: WordList,
    pub deletions: WordList,
}

impl CorruptionRuleSet {
    pub fn new(verbs: VerbLexicon, confusions: ConfusionLexicon, insertions: WordList, deletions: WordList) -> Result<Self> {
        let rules = CorruptionRuleSet {
            verbs,
            confusions,
            insertions,
            deletions,
        };
        for (name, empty) in [
            ("verbs", rules.verbs.is_empty()),
            ("confusions", rules.confusions.is_empty()),
            ("insertions", rules.insertions.is_empty()),
            ("deletions", rules.deletions.is_empty()),
        ] {
            if empty {
                return Err(Error::EmptyLexicon(name.into()));
            }
        }
        Ok(rules)
    }

    pub fn from_resources(res: &Resources) -> Result<Self> {
        Self::new(
            res.verbs.clone(),
            res.confusions.clone(),
            res.insertions.clone(),
            res.deletions.clone(),
        )
    }
}

/// Copies the capitalization pattern of `model` onto `word`.
fn match_case(model: &str, word: &str) -> String {
    let mut chars = model.chars();
    let first_upper = chars.next().is_some_and(char::is_uppercase);
    if !first_upper {
        return word.to_string();
    }
    let all_upper = model.chars().count() > 1 && model.chars().filter(|c| c.is_alphabetic()).all(char::is_uppercase);
    if all_upper {
        return word.to_uppercase();
    }
    let mut out = String::with_capacity(word.len());
    let mut it = word.chars();
    if let Some(c) = it.next() {
        out.extend(c.to_uppercase());
    }
    out.extend(it);
    out
}

/// VERB rule: another form of the same group (plausible) or a form of a
/// different random group (implausible). `None` when the rule does not apply.
pub fn verb_substitute<R: Rng + ?Sized>(word: &str, mode: Mode, verbs: &VerbLexicon, rng: &mut R) -> Option<String> {
    let own = verbs.group_of(word)?;
    let lower = fold_case(word);
    let pick = match mode {
        Mode::Plausible => {
            let others: Vec<&String> = verbs.group(own).forms.iter().filter(|f| **f != lower).collect();
            if others.is_empty() {
                return None;
            }
            others[rng.random_range(0..others.len())]
        }
        Mode::Implausible => {
            let n = verbs.len();
            if n < 2 {
                return None;
            }
            let mut g = rng.random_range(0..n - 1);
            if g >= own {
                g += 1;
            }
            let forms = &verbs.group(g).forms;
            &forms[rng.random_range(0..forms.len())]
        }
    };
    Some(match_case(word, pick))
}

/// REPLACE rule: one of the word's own confusions (plausible) or a confusion
/// of a different random entry that is not among the word's own (implausible).
pub fn replace_substitute<R: Rng + ?Sized>(
    word: &str,
    mode: Mode,
    confusions: &ConfusionLexicon,
    rng: &mut R,
) -> Option<String> {
    let lower = fold_case(word);
    let own = confusions.index_of(&lower)?;
    let pick = match mode {
        Mode::Plausible => {
            let c = &confusions.entry(own).confusions;
            c[rng.random_range(0..c.len())].clone()
        }
        Mode::Implausible => {
            let n = confusions.len();
            if n < 2 {
                return None;
            }
            let ok = |w: &String| *w != lower && !confusions.is_confusion_of(own, w);
            let mut g = rng.random_range(0..n - 1);
            if g >= own {
                g += 1;
            }
            let candidates: Vec<&String> = confusions.entry(g).confusions.iter().filter(|w| ok(w)).collect();
            if !candidates.is_empty() {
                candidates[rng.random_range(0..candidates.len())].clone()
            } else {
                // every confusion of the drawn entry collides; fall back to a full scan
                let all: Vec<&String> = confusions
                    .entries()
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != own)
                    .flat_map(|(_, e)| e.confusions.iter())
                    .filter(|w| ok(w))
                    .collect();
                if all.is_empty() {
                    return None;
                }
                all[rng.random_range(0..all.len())].clone()
            }
        }
    };
    Some(match_case(word, &pick))
}

/// INSERT rule: the list words are drawn from.
pub fn insertion_source(mode: Mode, rules: &CorruptionRuleSet) -> &WordList {
    match mode {
        Mode::Plausible => &rules.insertions,
        Mode::Implausible => &rules.deletions,
    }
}

/// DELETE rule: the list a token must belong to for deletion.
pub fn deletion_source(mode: Mode, rules: &CorruptionRuleSet) -> &WordList {
    match mode {
        Mode::Plausible => &rules.deletions,
        Mode::Implausible => &rules.insertions,
    }
}

pub fn insert_word<'a, R: Rng + ?Sized>(mode: Mode, rules: &'a CorruptionRuleSet, rng: &mut R) -> &'a str {
    let words = insertion_source(mode, rules).words();
    &words[rng.random_range(0..words.len())]
}

pub fn can_delete(word: &str, mode: Mode, rules: &CorruptionRuleSet) -> bool {
    deletion_source(mode, rules).contains_folded(word)
}

fn applicable(kind: RuleKind, word: &str, mode: Mode, rules: &CorruptionRuleSet) -> bool {
    match kind {
        RuleKind::Verb => rules.verbs.contains(word) && (mode == Mode::Plausible || rules.verbs.len() > 1),
        RuleKind::Replace => rules.confusions.index_of(&fold_case(word)).is_some(),
        RuleKind::Insert => true,
        RuleKind::Delete => can_delete(word, mode, rules),
    }
}

/// Result of corrupting one sentence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Outcome {
    Corrupted { pair: SentencePair, rules: Vec<RuleKind> },
    /// No site fired; the pair is the identity pair.
    Unchanged { pair: SentencePair },
}

impl Outcome {
    pub fn pair(&self) -> &SentencePair {
        match self {
            Outcome::Corrupted { pair, .. } | Outcome::Unchanged { pair } => pair,
        }
    }

    pub fn into_pair(self) -> SentencePair {
        match self {
            Outcome::Corrupted { pair, .. } | Outcome::Unchanged { pair } => pair,
        }
    }

    pub fn is_corrupted(&self) -> bool {
        matches!(self, Outcome::Corrupted { .. })
    }

    pub fn applied(&self) -> &[RuleKind] {
        match self {
            Outcome::Corrupted { rules, .. } => rules,
            Outcome::Unchanged { .. } => &[],
        }
    }
}

enum Action {
    Keep,
    Replace(String),
    InsertBefore(String),
    Delete,
}

/// Corrupts `sentence`; source is the corrupted text and target the original,
/// both as space-joined tokens.
pub fn corrupt<R: Rng + ?Sized>(
    sentence: &str,
    rules: &CorruptionRuleSet,
    config: &CorruptionConfig,
    rng: &mut R,
) -> Result<Outcome> {
    let tokens = surfaces(&tokenize(sentence));
    if tokens.is_empty() {
        return Err(Error::Empty("sentence has no tokens".into()));
    }
    let mode = config.mode;
    let weights = &config.rule_weights;
    let original = detokenize(&tokens);

    // site selection draws once per eligible token so later sites do not
    // depend on earlier rule choices
    let mut selected = Vec::new();
    for (i, tok) in tokens.iter().enumerate() {
        let eligible = RuleKind::ALL
            .iter()
            .any(|&k| weights.get(k) > 0.0 && applicable(k, tok, mode, rules));
        if eligible && rng.random::<f64>() < config.per_token_error_prob {
            selected.push(i);
        }
    }
    selected.truncate(config.max_errors_per_sentence);

    let mut actions: Vec<Action> = tokens.iter().map(|_| Action::Keep).collect();
    let mut applied = Vec::new();
    let mut remaining = tokens.len();
    for &i in &selected {
        let tok = &tokens[i];
        let mut options: Vec<(RuleKind, f64)> = RuleKind::ALL
            .iter()
            .filter(|&&k| weights.get(k) > 0.0 && applicable(k, tok, mode, rules))
            .map(|&k| (k, weights.get(k)))
            .collect();
        if remaining <= 1 {
            options.retain(|(k, _)| *k != RuleKind::Delete);
        }
        let total: f64 = options.iter().map(|(_, w)| w).sum();
        if options.is_empty() || total <= 0.0 {
            continue;
        }
        let mut r = rng.random::<f64>() * total;
        let mut kind = options[options.len() - 1].0;
        for &(k, w) in &options {
            if r < w {
                kind = k;
                break;
            }
            r -= w;
        }
        let action = match kind {
            RuleKind::Verb => verb_substitute(tok, mode, &rules.verbs, rng).map(Action::Replace),
            RuleKind::Replace => replace_substitute(tok, mode, &rules.confusions, rng).map(Action::Replace),
            RuleKind::Insert => {
                let w = insert_word(mode, rules, rng);
                let w = if i == 0 { match_case(tok, w) } else { w.to_string() };
                Some(Action::InsertBefore(w))
            }
            RuleKind::Delete => {
                remaining -= 1;
                Some(Action::Delete)
            }
        };
        if let Some(a) = action {
            actions[i] = a;
            applied.push(kind);
        }
    }

    let mut out: Vec<String> = Vec::with_capacity(tokens.len() + applied.len());
    for (i, (tok, action)) in tokens.iter().zip(actions).enumerate() {
        match action {
            Action::Keep => out.push(tok.clone()),
            Action::Replace(w) => out.push(w),
            Action::InsertBefore(w) => {
                out.push(w);
                out.push(if i == 0 { fold_first(tok) } else { tok.clone() });
            }
            Action::Delete => {}
        }
    }
    if out == tokens || applied.is_empty() {
        return Ok(Outcome::Unchanged {
            pair: SentencePair::new(original.clone(), original),
        });
    }
    Ok(Outcome::Corrupted {
        pair: SentencePair::new(detokenize(&out), original),
        rules: applied,
    })
}

/// Lowercases the first letter of a sentence-initial token pushed right by an insertion,
/// unless the token looks like a name or acronym.
fn fold_first(tok: &str) -> String {
    let mut it = tok.chars();
    match (it.next(), it.clone().next()) {
        (Some(c), Some(d)) if c.is_uppercase() && d.is_lowercase() && tok != "I" => {
            let mut s: String = c.to_lowercase().collect();
            s.extend(it);
            s
        }
        _ => tok.to_string(),
    }
}

/// Corrupts every sentence on its own substream; output order follows input.
pub fn corrupt_corpus(sentences: &[String], rules: &CorruptionRuleSet, config: &CorruptionConfig) -> Result<Vec<Outcome>> {
    config.validate()?;
    sentences
        .par_iter()
        .enumerate()
        .map(|(i, s)| corrupt(s, rules, config, &mut substream(config.seed, i as u64)))
        .collect()
}

/// Counts behind an assembled training corpus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildStats {
    pub requested: usize,
    pub reliable: usize,
    pub unreliable: usize,
    pub dropped_slots: usize,
    pub resampled_with_replacement: bool,
}

/// Pairs every positive with one implausibly corrupted clean sentence and
/// shuffles the result by `seed`.
pub fn build_classifier_corpus(
    positives: &Dataset,
    clean_sentences: &[String],
    rules: &CorruptionRuleSet,
    config: &CorruptionConfig,
    seed: u64,
) -> Result<(Vec<LabeledPair>, BuildStats)> {
    let config = CorruptionConfig {
        mode: Mode::Implausible,
        seed,
        ..config.clone()
    };
    config.validate()?;
    let n = positives.len();
    if n == 0 {
        return Err(Error::Ratio("no positive pairs given".into()));
    }
    if clean_sentences.is_empty() {
        return Err(Error::Ratio("no clean sentences given".into()));
    }
    let mut order_rng = substream(seed, u64::MAX);
    let resampled = clean_sentences.len() < n;
    let assigned: Vec<usize> = if resampled {
        (0..n).map(|_| order_rng.random_range(0..clean_sentences.len())).collect()
    } else {
        let mut idx: Vec<usize> = (0..clean_sentences.len()).collect();
        idx.shuffle(&mut order_rng);
        idx.truncate(n);
        idx
    };

    let negatives: Vec<Option<SentencePair>> = assigned
        .par_iter()
        .enumerate()
        .map(|(slot, &first)| -> Result<Option<SentencePair>> {
            let mut rng = substream(seed, slot as u64);
            let mut sentence = first;
            for attempt in 0..MAX_ATTEMPTS {
                if attempt > 0 {
                    sentence = rng.random_range(0..clean_sentences.len());
                }
                if let Outcome::Corrupted { pair, .. } = corrupt(&clean_sentences[sentence], rules, &config, &mut rng)? {
                    return Ok(Some(pair));
                }
            }
            Ok(None)
        })
        .collect::<Result<_>>()?;

    let mut out = Vec::with_capacity(2 * n);
    let mut dropped = 0;
    for (pos, neg) in positives.pairs.iter().zip(negatives) {
        match neg {
            Some(neg) => {
                out.push(LabeledPair {
                    pair: pos.clone(),
                    label: Label::Reliable,
                    origin: Origin::Human,
                });
                out.push(LabeledPair {
                    pair: neg,
                    label: Label::Unreliable,
                    origin: Origin::ImplausibleRule,
                });
            }
            None => dropped += 1,
        }
    }
    let kept = n - dropped;
    if kept == 0 {
        return Err(Error::Ratio(format!(
            "achieved 0 reliable and 0 unreliable pairs out of {n} requested"
        )));
    }
    out.shuffle(&mut order_rng);
    Ok((
        out,
        BuildStats {
            requested: n,
            reliable: kept,
            unreliable: kept,
            dropped_slots: dropped,
            resampled_with_replacement: resampled,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rules() -> CorruptionRuleSet {
        CorruptionRuleSet::from_resources(&Resources::bundled().unwrap()).unwrap()
    }

    fn config(mode: Mode, p: f64) -> CorruptionConfig {
        CorruptionConfig {
            mode,
            per_token_error_prob: p,
            ..CorruptionConfig::default()
        }
    }

    #[test]
    fn zero_probability_is_unchanged() {
        let r = rules();
        let out = corrupt("I like the big dog .", &r, &config(Mode::Plausible, 0.0), &mut substream(1, 0)).unwrap();
        assert!(!out.is_corrupted());
        assert_eq!(out.pair().source, out.pair().target);
    }

    #[test]
    fn empty_sentence_is_an_error() {
        let r = rules();
        assert!(corrupt("   ", &r, &config(Mode::Plausible, 0.5), &mut substream(1, 0)).is_err());
    }

    #[test]
    fn abandon_implausible_leaves_its_group() {
        let r = rules();
        let own = r.verbs.group_of("abandon").unwrap();
        for i in 0..200 {
            let w = verb_substitute("abandon", Mode::Implausible, &r.verbs, &mut substream(9, i)).unwrap();
            assert_ne!(r.verbs.group_of(&w), Some(own), "{w}");
            let w = verb_substitute("abandon", Mode::Plausible, &r.verbs, &mut substream(9, i)).unwrap();
            assert_eq!(r.verbs.group_of(&w), Some(own));
            assert_ne!(w, "abandon");
        }
    }

    #[test]
    fn equipment_plausible_is_equipmet() {
        let r = rules();
        let w = replace_substitute("equipment", Mode::Plausible, &r.confusions, &mut substream(3, 0)).unwrap();
        assert_eq!(w, "equipmet");
        let w = replace_substitute("Equipment", Mode::Implausible, &r.confusions, &mut substream(3, 0)).unwrap();
        assert_ne!(w.to_lowercase(), "equipmet");
        assert!(w.chars().next().unwrap().is_uppercase());
    }

    #[test]
    fn deterministic_per_seed() {
        let r = rules();
        let c = config(Mode::Implausible, 0.5);
        let s = "We have been working on the new equipment for a year .";
        let a = corrupt(s, &r, &c, &mut substream(5, 2)).unwrap();
        let b = corrupt(s, &r, &c, &mut substream(5, 2)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn cap_limits_sites() {
        let r = rules();
        let mut c = config(Mode::Plausible, 1.0);
        c.max_errors_per_sentence = 2;
        let out = corrupt("the cat is on the mat and it is happy", &r, &c, &mut substream(0, 0)).unwrap();
        assert!(out.applied().len() <= 2);
        assert!(out.is_corrupted());
    }

    #[test]
    fn config_validation() {
        let mut c = CorruptionConfig::default();
        assert!(c.validate().is_ok());
        c.rule_weights = RuleWeights {
            verb: 0.0,
            replace: 0.0,
            insert: 0.0,
            delete: 0.0,
        };
        assert!(c.validate().is_err());
        c = CorruptionConfig::default();
        c.max_errors_per_sentence = 0;
        assert!(c.validate().is_err());
        c = CorruptionConfig::default();
        c.per_token_error_prob = 1.5;
        assert!(c.validate().is_err());
    }

    #[test]
    fn training_corpus_is_balanced() {
        let r = rules();
        let positives = Dataset::from_pairs(
            (0..100).map(|i| SentencePair::new(format!("he go to school {i} ."), format!("he goes to school {i} ."))).collect(),
            "pos",
        );
        let clean: Vec<String> = (0..200).map(|i| format!("They have visited the old town {i} times .")).collect();
        let (out, stats) = build_classifier_corpus(&positives, &clean, &r, &CorruptionConfig::default(), 11).unwrap();
        assert_eq!(out.len(), 200);
        assert_eq!(out.iter().filter(|p| p.label == Label::Reliable).count(), 100);
        assert_eq!(stats.dropped_slots, 0);
        assert!(out.iter().all(|p| (p.label == Label::Unreliable) == (p.origin == Origin::ImplausibleRule)));
        let (again, _) = build_classifier_corpus(&positives, &clean, &r, &CorruptionConfig::default(), 11).unwrap();
        assert_eq!(out, again);
    }

    #[test]
    fn training_corpus_resamples_small_pools() {
        let r = rules();
        let positives = Dataset::from_pairs(vec![SentencePair::new("a b", "a c"); 5], "pos");
        let clean = vec!["the old man is walking to the shop".to_string()];
        let (out, stats) = build_classifier_corpus(&positives, &clean, &r, &CorruptionConfig::default(), 1).unwrap();
        assert!(stats.resampled_with_replacement);
        assert_eq!(out.len(), 2 * stats.reliable);
    }

    #[test]
    fn case_matching() {
        assert_eq!(match_case("Equipment", "therefofe"), "Therefofe");
        assert_eq!(match_case("USA", "abc"), "ABC");
        assert_eq!(match_case("go", "went"), "went");
    }
}
