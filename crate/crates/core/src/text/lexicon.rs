//! Loaders for the plain-text lexicons shared by the tagger, the typer and
//! the corruption engine.
//!
//! All files are UTF-8 with one entry per line; `#` starts a comment line.
//!
//! * verb lexicon: `lemma: form, form, ...`
//! * confusion lexicon: `word: confusion, confusion, ...`
//! * word list: one word per line

use std::collections::{HashMap, HashSet};
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::fold_case;

/// The inflections of one verb. `forms` always contains the lemma.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerbFormGroup {
    pub lemma: String,
    pub forms: Vec<String>,
}

impl VerbFormGroup {
    pub fn contains(&self, word: &str) -> bool {
        self.forms.iter().any(|f| f == word)
    }
}

/// A word and the counterparts learners commonly confuse it with.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionPair {
    pub word: String,
    pub confusions: Vec<String>,
}

/// Verb groups indexed by form.
#[derive(Debug, Clone, Default)]
pub struct VerbLexicon {
    groups: Vec<VerbFormGroup>,
    by_form: HashMap<String, usize>,
}

impl VerbLexicon {
    pub fn new(groups: Vec<VerbFormGroup>) -> Result<Self> {
        let mut by_form: HashMap<String, usize> = HashMap::new();
        for (i, g) in groups.iter().enumerate() {
            if g.forms.len() < 2 {
                return Err(lexicon_error("verbs", i + 1, format!("group '{}' needs at least two forms", g.lemma)));
            }
            if !g.contains(&g.lemma) {
                return Err(lexicon_error("verbs", i + 1, format!("lemma '{}' missing from its forms", g.lemma)));
            }
            for form in &g.forms {
                if let Some(&j) = by_form.get(form) {
                    if j != i {
                        return Err(lexicon_error(
                            "verbs",
                            i + 1,
                            format!("form '{form}' already belongs to group '{}'", groups[j].lemma),
                        ));
                    }
                }
                by_form.insert(form.clone(), i);
            }
        }
        Ok(VerbLexicon { groups, by_form })
    }

    pub fn groups(&self) -> &[VerbFormGroup] {
        &self.groups
    }

    /// Index of the group containing `form` (case-folded lookup).
    pub fn group_of(&self, form: &str) -> Option<usize> {
        self.by_form.get(form).or_else(|| self.by_form.get(&fold_case(form))).copied()
    }

    pub fn group(&self, index: usize) -> &VerbFormGroup {
        &self.groups[index]
    }

    pub fn same_group(&self, a: &str, b: &str) -> bool {
        matches!((self.group_of(a), self.group_of(b)), (Some(x), Some(y)) if x == y)
    }

    pub fn contains(&self, form: &str) -> bool {
        self.group_of(form).is_some()
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }
}

/// Confusion entries indexed both by headword and by membership.
#[derive(Debug, Clone, Default)]
pub struct ConfusionLexicon {
    entries: Vec<ConfusionPair>,
    by_word: HashMap<String, usize>,
    by_member: HashMap<String, Vec<usize>>,
}

impl ConfusionLexicon {
    pub fn new(entries: Vec<ConfusionPair>) -> Result<Self> {
        let mut by_word = HashMap::new();
        let mut by_member: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, e) in entries.iter().enumerate() {
            if e.confusions.is_empty() {
                return Err(lexicon_error("confusions", i + 1, format!("'{}' has no confusions", e.word)));
            }
            if e.confusions.contains(&e.word) {
                return Err(lexicon_error("confusions", i + 1, format!("'{}' listed in its own confusion set", e.word)));
            }
            if by_word.insert(e.word.clone(), i).is_some() {
                return Err(lexicon_error("confusions", i + 1, format!("duplicate entry '{}'", e.word)));
            }
            for c in &e.confusions {
                by_member.entry(c.clone()).or_default().push(i);
            }
        }
        Ok(ConfusionLexicon {
            entries,
            by_word,
            by_member,
        })
    }

    pub fn entries(&self) -> &[ConfusionPair] {
        &self.entries
    }

    pub fn entry(&self, index: usize) -> &ConfusionPair {
        &self.entries[index]
    }

    pub fn index_of(&self, word: &str) -> Option<usize> {
        self.by_word.get(word).or_else(|| self.by_word.get(&fold_case(word))).copied()
    }

    /// Entries whose confusion set contains `word`.
    pub fn entries_confusing(&self, word: &str) -> &[usize] {
        self.by_member.get(word).map(Vec::as_slice).unwrap_or(&[])
    }

    /// True when `candidate` is in the confusion set of entry `index`.
    pub fn is_confusion_of(&self, index: usize, candidate: &str) -> bool {
        self.entries_confusing(candidate).contains(&index)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Ordered word list with O(1) membership.
#[derive(Debug, Clone, Default)]
pub struct WordList {
    words: Vec<String>,
    set: HashSet<String>,
}

impl WordList {
    pub fn new(words: Vec<String>) -> Self {
        let mut seen = HashSet::new();
        let words: Vec<String> = words.into_iter().filter(|w| seen.insert(w.clone())).collect();
        WordList { set: seen, words }
    }

    pub fn contains(&self, word: &str) -> bool {
        self.set.contains(word)
    }

    /// Exact or case-folded membership.
    pub fn contains_folded(&self, word: &str) -> bool {
        self.set.contains(word) || self.set.contains(&fold_case(word))
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

fn lexicon_error(name: &str, line: usize, message: String) -> Error {
    Error::Lexicon {
        name: name.to_string(),
        line,
        message,
    }
}

fn read_text(mut stream: impl Read) -> Result<String> {
    let mut bytes = Vec::new();
    stream.read_to_end(&mut bytes)?;
    String::from_utf8(bytes).map_err(|e| Error::Utf8 {
        offset: e.utf8_error().valid_up_to(),
    })
}

/// Non-blank, non-comment lines with their 1-based line numbers.
fn entries(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_headed(name: &str, line_no: usize, line: &str) -> Result<(String, Vec<String>)> {
    let (head, rest) = line
        .split_once(':')
        .ok_or_else(|| lexicon_error(name, line_no, "expected 'word: item, item, ...'".into()))?;
    let head = head.trim();
    if head.is_empty() || head.contains(char::is_whitespace) {
        return Err(lexicon_error(name, line_no, format!("invalid headword '{head}'")));
    }
    let mut items: Vec<String> = Vec::new();
    for item in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if item.contains(char::is_whitespace) {
            return Err(lexicon_error(name, line_no, format!("entry '{item}' contains whitespace")));
        }
        if !items.iter().any(|x| x == item) {
            items.push(item.to_string());
        }
    }
    Ok((head.to_string(), items))
}

pub fn load_verb_lexicon(stream: impl Read) -> Result<VerbLexicon> {
    let text = read_text(stream)?;
    let mut groups = Vec::new();
    let mut lemma_lines: HashMap<String, usize> = HashMap::new();
    let mut form_owner: HashMap<String, String> = HashMap::new();
    for (line_no, line) in entries(&text) {
        let (lemma, items) = parse_headed("verbs", line_no, line)?;
        if let Some(prev) = lemma_lines.insert(lemma.clone(), line_no) {
            return Err(lexicon_error("verbs", line_no, format!("duplicate lemma '{lemma}' (first on line {prev})")));
        }
        let mut forms = vec![lemma.clone()];
        forms.extend(items.into_iter().filter(|f| *f != lemma));
        if forms.len() < 2 {
            return Err(lexicon_error("verbs", line_no, format!("'{lemma}' needs at least one inflected form")));
        }
        for f in &forms {
            if let Some(owner) = form_owner.insert(f.clone(), lemma.clone()) {
                return Err(lexicon_error("verbs", line_no, format!("form '{f}' already belongs to '{owner}'")));
            }
        }
        groups.push(VerbFormGroup { lemma, forms });
    }
    if groups.is_empty() {
        return Err(Error::EmptyLexicon("verbs".into()));
    }
    VerbLexicon::new(groups)
}

pub fn load_confusion_lexicon(stream: impl Read) -> Result<ConfusionLexicon> {
    let text = read_text(stream)?;
    let mut list = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (line_no, line) in entries(&text) {
        let (word, confusions) = parse_headed("confusions", line_no, line)?;
        if confusions.contains(&word) {
            return Err(lexicon_error("confusions", line_no, format!("'{word}' listed as its own confusion")));
        }
        if confusions.is_empty() {
            return Err(lexicon_error("confusions", line_no, format!("'{word}' has no confusions")));
        }
        if let Some(prev) = seen.insert(word.clone(), line_no) {
            return Err(lexicon_error("confusions", line_no, format!("duplicate entry '{word}' (first on line {prev})")));
        }
        list.push(ConfusionPair { word, confusions });
    }
    if list.is_empty() {
        return Err(Error::EmptyLexicon("confusions".into()));
    }
    ConfusionLexicon::new(list)
}

pub fn load_wordlist(stream: impl Read) -> Result<WordList> {
    let text = read_text(stream)?;
    let mut words = Vec::new();
    for (line_no, line) in entries(&text) {
        if line.contains(char::is_whitespace) {
            return Err(lexicon_error("wordlist", line_no, format!("'{line}' is not a single word")));
        }
        words.push(line.to_string());
    }
    if words.is_empty() {
        return Err(Error::EmptyLexicon("wordlist".into()));
    }
    Ok(WordList::new(words))
}
