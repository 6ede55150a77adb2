//! Edit typing and error-type distributions.
//!
//! [`EditTyper::classify_edit`] runs a fixed rule cascade that approximates
//! ERRANT's decisions using only the lexicon tagger; [`Analyzer`] chains
//! tokenization, tagging, alignment and typing over whole corpora.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Value};

use crate::align::{normalized_char_distance, Aligner, Edit, EditScript};
use crate::corpus::{Dataset, SentencePair};
use crate::text::{is_contraction, tokenize, PosTag, Tagger, Token, VerbLexicon, WordList};

/// Version of the rule cascade; bumped whenever a rule or its order changes.
pub const TYPER_VERSION: &str = "tr1";

/// Largest normalized character distance still typed as a spelling error.
pub const SPELL_MAX_DISTANCE: f64 = 0.5;

macro_rules! error_types {
    ($($variant:ident => $label:literal),+ $(,)?) => {
        /// The 23 error categories, without ERRANT's M:/R:/U: operation prefixes.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum ErrorType {
            $($variant),+
        }

        impl ErrorType {
            /// All labels, in canonical report order.
            pub const ALL: [ErrorType; 23] = [$(ErrorType::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self {
                    $(ErrorType::$variant => $label),+
                }
            }
        }

        impl FromStr for ErrorType {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $($label => Ok(ErrorType::$variant),)+
                    other => Err(format!("unknown error type '{other}'")),
                }
            }
        }
    };
}

error_types! {
    Other => "OTHER",
    Adv => "ADV",
    Prep => "PREP",
    Orth => "ORTH",
    Noun => "NOUN",
    Morph => "MORPH",
    Det => "DET",
    Pron => "PRON",
    VerbSva => "VERB:SVA",
    Part => "PART",
    Verb => "VERB",
    VerbTense => "VERB:TENSE",
    VerbForm => "VERB:FORM",
    Spell => "SPELL",
    Conj => "CONJ",
    Adj => "ADJ",
    Wo => "WO",
    Punct => "PUNCT",
    NounNum => "NOUN:NUM",
    AdjForm => "ADJ:FORM",
    Contr => "CONTR",
    NounPos => "NOUN:POS",
    NounInfl => "NOUN:INFL",
}

impl ErrorType {
    pub fn index(self) -> usize {
        self as usize
    }

    fn from_pos(pos: PosTag) -> Option<ErrorType> {
        Some(match pos {
            PosTag::Det => ErrorType::Det,
            PosTag::Prep => ErrorType::Prep,
            PosTag::Pron => ErrorType::Pron,
            PosTag::Conj => ErrorType::Conj,
            PosTag::Part => ErrorType::Part,
            PosTag::Adv => ErrorType::Adv,
            PosTag::Adj => ErrorType::Adj,
            PosTag::Noun => ErrorType::Noun,
            PosTag::Verb => ErrorType::Verb,
            _ => return None,
        })
    }
}

impl fmt::Display for ErrorType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for ErrorType {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for ErrorType {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypedEdit {
    #[serde(flatten)]
    pub edit: Edit,
    #[serde(rename = "type")]
    pub error_type: ErrorType,
}

/// Percentage mass over the 23 error types.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorDistribution {
    mass: [f64; 23],
    pub total_edits: u64,
}

impl ErrorDistribution {
    pub fn empty() -> Self {
        ErrorDistribution {
            mass: [0.0; 23],
            total_edits: 0,
        }
    }

    pub fn from_counts(counts: &[u64; 23]) -> Self {
        let total: u64 = counts.iter().sum();
        let mut mass = [0.0; 23];
        if total > 0 {
            for (m, &c) in mass.iter_mut().zip(counts) {
                *m = 100.0 * c as f64 / total as f64;
            }
        }
        ErrorDistribution {
            mass,
            total_edits: total,
        }
    }

    /// Builds a distribution from published percentages, stored as given.
    /// Types not listed get zero mass.
    pub fn from_percentages(values: &[(ErrorType, f64)], total_edits: u64) -> Self {
        let mut mass = [0.0; 23];
        for &(t, v) in values {
            mass[t.index()] = v;
        }
        ErrorDistribution { mass, total_edits }
    }

    pub fn get(&self, t: ErrorType) -> f64 {
        self.mass[t.index()]
    }

    pub fn mass(&self) -> &[f64; 23] {
        &self.mass
    }

    pub fn total_mass(&self) -> f64 {
        self.mass.iter().sum()
    }

    /// True when no mass is present.
    pub fn is_empty(&self) -> bool {
        self.mass.iter().all(|&m| m == 0.0)
    }

    /// Mass renormalized to probabilities summing to 1; all zero when empty.
    pub fn probabilities(&self) -> [f64; 23] {
        let total = self.total_mass();
        let mut p = [0.0; 23];
        if total > 0.0 {
            for (pi, &m) in p.iter_mut().zip(&self.mass) {
                *pi = m / total;
            }
        }
        p
    }

    pub fn iter(&self) -> impl Iterator<Item = (ErrorType, f64)> + '_ {
        ErrorType::ALL.iter().map(move |&t| (t, self.mass[t.index()]))
    }

    pub fn to_json(&self) -> Value {
        let mut map = serde_json::Map::new();
        for (t, m) in self.iter() {
            map.insert(t.as_str().to_string(), json!(m));
        }
        map.insert("total_edits".into(), json!(self.total_edits));
        Value::Object(map)
    }
}

impl Serialize for ErrorDistribution {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for ErrorDistribution {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = BTreeMap::<String, f64>::deserialize(d)?;
        let mut mass = [0.0; 23];
        let mut total_edits = 0;
        for (k, v) in raw {
            if k == "total_edits" {
                total_edits = v as u64;
            } else {
                let t: ErrorType = k.parse().map_err(D::Error::custom)?;
                mass[t.index()] = v;
            }
        }
        Ok(ErrorDistribution { mass, total_edits })
    }
}

/// Returns the OTHER share of a distribution, the diversity proxy used by prior work.
pub fn other_share(dist: &ErrorDistribution) -> f64 {
    dist.get(ErrorType::Other)
}

const MASS_NOUNS: &[&str] = &[
    "information", "advice", "equipment", "furniture", "knowledge", "homework", "luggage", "baggage", "feedback",
    "evidence", "research", "traffic", "vocabulary", "software", "machinery", "jewellery", "jewelry", "scenery",
    "progress", "behaviour", "behavior", "music", "money", "weather", "accommodation", "transport", "damage",
];

const IRREGULAR_NOUNS: &[(&str, &str)] = &[
    ("man", "men"), ("woman", "women"), ("child", "children"), ("person", "people"), ("foot", "feet"),
    ("tooth", "teeth"), ("mouse", "mice"), ("goose", "geese"), ("ox", "oxen"), ("life", "lives"),
    ("knife", "knives"), ("wife", "wives"), ("leaf", "leaves"), ("half", "halves"), ("wolf", "wolves"),
    ("shelf", "shelves"), ("thief", "thieves"), ("crisis", "crises"), ("analysis", "analyses"),
    ("phenomenon", "phenomena"), ("criterion", "criteria"), ("medium", "media"),
];

const IRREGULAR_ADJECTIVES: &[&[&str]] = &[
    &["good", "better", "best"],
    &["bad", "worse", "worst"],
    &["little", "less", "least"],
    &["far", "further", "furthest", "farther", "farthest"],
    &["many", "more", "most"],
    &["much", "more", "most"],
];

const AUX_LEFT: &[&str] = &[
    "be", "is", "am", "are", "was", "were", "been", "being", "have", "has", "had", "having", "do", "does", "did",
    "will", "would", "can", "could", "shall", "should", "may", "might", "must", "'ll", "'d", "'ve", "'re", "'m", "to",
];

/// Rule-cascade edit typer.
#[derive(Debug, Clone)]
pub struct EditTyper {
    verbs: VerbLexicon,
    dictionary: WordList,
}

impl EditTyper {
    pub fn new(verbs: VerbLexicon, dictionary: WordList) -> Self {
        EditTyper { verbs, dictionary }
    }

    pub fn dictionary(&self) -> &WordList {
        &self.dictionary
    }

    /// Alphabetic and absent from the dictionary.
    pub fn is_oov(&self, word: &str) -> bool {
        word.chars().all(char::is_alphabetic) && !word.is_empty() && !self.dictionary.contains_folded(word)
    }

    /// Types one edit given the tagged source and target sentences.
    pub fn classify_edit(&self, edit: &Edit, source: &[Token], target: &[Token]) -> ErrorType {
        let o = &source[edit.src_start..edit.src_end];
        let c = &target[edit.tgt_start..edit.tgt_end];
        let left = &source[..edit.src_start];
        self.classify_sides(o, c, left)
    }

    fn classify_sides(&self, o: &[Token], c: &[Token], left: &[Token]) -> ErrorType {
        // a case-identical final token in a multi-token edit carries no information
        if let (Some(lo), Some(lc)) = (o.last(), c.last()) {
            if lo.lower == lc.lower && (o.len() > 1 || c.len() > 1) {
                return self.classify_sides(&o[..o.len() - 1], &c[..c.len() - 1], left);
            }
        }
        if o.is_empty() && c.is_empty() {
            return ErrorType::Other;
        }
        let both = || o.iter().chain(c.iter());

        if both().all(|t| t.pos == PosTag::Punct) {
            return ErrorType::Punct;
        }
        if self.is_contraction_edit(o, c, left) {
            return ErrorType::Contr;
        }
        if !o.is_empty() && !c.is_empty() && orth_key(o) == orth_key(c) {
            return ErrorType::Orth;
        }
        if o.len() >= 2 && c.len() >= 2 && sorted_lower(o) == sorted_lower(c) {
            return ErrorType::Wo;
        }
        let single = o.len() == 1 && c.len() == 1;
        if single {
            if let Some(t) = self.verb_form_type(&o[0], &c[0], left) {
                return t;
            }
        }
        if is_possessive_edit(o, c, left) {
            return ErrorType::NounPos;
        }
        if single && (o[0].pos == PosTag::Noun || c[0].pos == PosTag::Noun) {
            if let Some(t) = noun_number_type(&o[0].lower, &c[0].lower) {
                return t;
            }
        }
        if single && self.is_spelling(&o[0], &c[0]) {
            return ErrorType::Spell;
        }
        if is_adjective_form(o, c) {
            return ErrorType::AdjForm;
        }
        if !both().any(|t| self.is_oov(&t.surface)) {
            if let Some(t) = same_pos_type(o, c) {
                return t;
            }
        }
        if single {
            let (a, b) = (&o[0], &c[0]);
            if a.lower != b.lower && common_prefix(&a.lower, &b.lower) >= 3 {
                return ErrorType::Morph;
            }
        }
        ErrorType::Other
    }

    fn is_spelling(&self, a: &Token, b: &Token) -> bool {
        let alpha = |t: &Token| !t.lower.is_empty() && t.lower.chars().all(char::is_alphabetic);
        alpha(a)
            && alpha(b)
            && self.is_oov(&a.surface) != self.is_oov(&b.surface)
            && normalized_char_distance(&a.lower, &b.lower) <= SPELL_MAX_DISTANCE
    }

    fn is_contraction_edit(&self, o: &[Token], c: &[Token], left: &[Token]) -> bool {
        let one_sided = match (o, c) {
            ([t], []) | ([], [t]) => Some(t),
            _ => None,
        };
        if let Some(t) = one_sided {
            if !is_contraction(&t.lower) {
                return false;
            }
            // 's after a noun is a possessive marker
            return !(t.lower == "'s" && left.last().is_some_and(|p| p.pos == PosTag::Noun));
        }
        if let ([a], [b]) = (o, c) {
            return expands_to(&a.lower, &b.lower) || expands_to(&b.lower, &a.lower);
        }
        false
    }

    fn verb_form_type(&self, o: &Token, c: &Token, left: &[Token]) -> Option<ErrorType> {
        if o.lower == c.lower {
            return None;
        }
        let g = self.verbs.group_of(&o.lower)?;
        if self.verbs.group_of(&c.lower) != Some(g) {
            return None;
        }
        let lemma = &self.verbs.group(g).lemma;
        if lemma == "be" {
            return Some(be_type(&o.lower, &c.lower));
        }
        let (so, sc) = (verb_slot(&o.lower, lemma), verb_slot(&c.lower, lemma));
        use VerbSlot::*;
        if so == Ing || sc == Ing || preceded_by_aux(left) {
            return Some(ErrorType::VerbForm);
        }
        let pair = |x, y| (so == x && sc == y) || (so == y && sc == x);
        if pair(Base, ThirdSg) {
            return Some(if has_subject(left) {
                ErrorType::VerbSva
            } else {
                ErrorType::VerbForm
            });
        }
        if pair(Base, Past) || pair(ThirdSg, Past) {
            return Some(ErrorType::VerbTense);
        }
        Some(ErrorType::VerbForm)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VerbSlot {
    Base,
    ThirdSg,
    Ing,
    Past,
}

fn verb_slot(form: &str, lemma: &str) -> VerbSlot {
    if form == lemma {
        VerbSlot::Base
    } else if form.ends_with("ing") {
        VerbSlot::Ing
    } else if form.ends_with('s') && !form.ends_with("ss") {
        VerbSlot::ThirdSg
    } else {
        VerbSlot::Past
    }
}

fn be_type(a: &str, b: &str) -> ErrorType {
    let present = |w: &str| matches!(w, "am" | "is" | "are");
    let past = |w: &str| matches!(w, "was" | "were");
    if (present(a) && present(b)) || (past(a) && past(b)) {
        ErrorType::VerbSva
    } else if (present(a) && past(b)) || (past(a) && present(b)) {
        ErrorType::VerbTense
    } else {
        ErrorType::VerbForm
    }
}

fn preceded_by_aux(left: &[Token]) -> bool {
    left.iter()
        .rev()
        .find(|t| !matches!(t.lower.as_str(), "not" | "n't" | "also" | "never" | "always" | "just" | "still"))
        .is_some_and(|t| AUX_LEFT.contains(&t.lower.as_str()))
}

/// Nearest nominal to the left, skipping modifiers, within three tokens.
fn has_subject(left: &[Token]) -> bool {
    for t in left.iter().rev().take(3) {
        match t.pos {
            PosTag::Noun | PosTag::Pron => return true,
            PosTag::Adv | PosTag::Adj => continue,
            _ => return false,
        }
    }
    false
}

fn expands_to(short: &str, long: &str) -> bool {
    matches!(
        (short, long),
        ("n't", "not")
            | ("'ll", "will")
            | ("'re", "are")
            | ("'ve", "have")
            | ("'m", "am")
            | ("'d", "would")
            | ("'d", "had")
            | ("'s", "is")
            | ("'s", "has")
            | ("ca", "can")
            | ("wo", "will")
            | ("sha", "shall")
    )
}

fn orth_key(tokens: &[Token]) -> String {
    tokens.iter().flat_map(|t| t.lower.chars()).filter(|&ch| ch != '-').collect()
}

fn sorted_lower(tokens: &[Token]) -> Vec<&str> {
    let mut v: Vec<&str> = tokens.iter().map(|t| t.lower.as_str()).collect();
    v.sort_unstable();
    v
}

fn is_possessive_edit(o: &[Token], c: &[Token], left: &[Token]) -> bool {
    let marker = |t: &Token| t.lower == "'s" || t.lower == "'" || t.lower.ends_with("'s") || t.lower.ends_with("s'");
    if !o.iter().chain(c).any(marker) {
        return false;
    }
    o.iter().chain(c).any(|t| t.pos == PosTag::Noun) || left.last().is_some_and(|t| t.pos == PosTag::Noun)
}

fn is_plural_of(plural: &str, singular: &str) -> bool {
    if let Some(stem) = plural.strip_suffix("ies") {
        if singular.strip_suffix('y') == Some(stem) {
            return true;
        }
    }
    if let Some(stem) = plural.strip_suffix("ves") {
        if singular.strip_suffix('f') == Some(stem) || singular.strip_suffix("fe") == Some(stem) {
            return true;
        }
    }
    plural.strip_suffix('s') == Some(singular) || plural.strip_suffix("es") == Some(singular)
}

fn noun_number_type(a: &str, b: &str) -> Option<ErrorType> {
    for &(sg, pl) in IRREGULAR_NOUNS {
        if (a == sg && b == pl) || (a == pl && b == sg) {
            return Some(ErrorType::NounNum);
        }
        let wrong = |w: &str| w == format!("{sg}s") || w == format!("{pl}s") || w == format!("{sg}es");
        if (wrong(a) && (b == sg || b == pl)) || (wrong(b) && (a == sg || a == pl)) {
            return Some(ErrorType::NounInfl);
        }
    }
    for &m in MASS_NOUNS {
        if (a == m && is_plural_of(b, m)) || (b == m && is_plural_of(a, m)) {
            return Some(ErrorType::NounInfl);
        }
    }
    if is_plural_of(a, b) || is_plural_of(b, a) {
        return Some(ErrorType::NounNum);
    }
    None
}

fn adjective_bases(w: &str) -> Vec<String> {
    let mut out = vec![w.to_string()];
    for suffix in ["est", "er"] {
        if let Some(stem) = w.strip_suffix(suffix) {
            if stem.len() < 2 {
                continue;
            }
            out.push(stem.to_string());
            out.push(format!("{stem}e"));
            if let Some(s) = stem.strip_suffix('i') {
                out.push(format!("{s}y"));
            }
            let b = stem.as_bytes();
            if b.len() >= 3 && b[b.len() - 1] == b[b.len() - 2] {
                out.push(stem[..stem.len() - 1].to_string());
            }
        }
    }
    out
}

fn is_degree_pair(a: &str, b: &str) -> bool {
    if a == b {
        return false;
    }
    if IRREGULAR_ADJECTIVES.iter().any(|set| set.contains(&a) && set.contains(&b)) {
        return true;
    }
    let suffixed = |w: &str| w.ends_with("er") || w.ends_with("est");
    if !suffixed(a) && !suffixed(b) {
        return false;
    }
    let ba = adjective_bases(a);
    let bb = adjective_bases(b);
    ba.iter().any(|x| x.len() >= 2 && bb.contains(x))
}

fn is_adjective_form(o: &[Token], c: &[Token]) -> bool {
    match (o, c) {
        ([a], [b]) => a.pos != PosTag::Verb && b.pos != PosTag::Verb && is_degree_pair(&a.lower, &b.lower),
        _ => {
            // "more big" <-> "bigger", "more big" <-> "most big"
            let degree_word = |t: &Token| t.lower == "more" || t.lower == "most";
            let head = |side: &[Token]| match side {
                [d, w] if degree_word(d) => Some(w.lower.clone()),
                [w] => Some(w.lower.clone()),
                _ => None,
            };
            if o.len() + c.len() < 3 || o.is_empty() || c.is_empty() {
                return false;
            }
            match (head(o), head(c)) {
                (Some(x), Some(y)) => x == y || is_degree_pair(&x, &y),
                _ => false,
            }
        }
    }
}

fn same_pos_type(o: &[Token], c: &[Token]) -> Option<ErrorType> {
    let mut tags = o.iter().chain(c).map(|t| t.pos);
    let first = tags.next()?;
    if tags.all(|p| p == first) {
        ErrorType::from_pos(first)
    } else {
        None
    }
}

fn common_prefix(a: &str, b: &str) -> usize {
    a.chars().zip(b.chars()).take_while(|(x, y)| x == y).count()
}

/// Tokens, alignment and edit types for one sentence pair.
#[derive(Debug, Clone)]
pub struct AnalyzedPair {
    pub source: Vec<Token>,
    pub target: Vec<Token>,
    pub script: EditScript,
    pub types: Vec<ErrorType>,
}

impl AnalyzedPair {
    pub fn typed_edits(&self) -> Vec<TypedEdit> {
        self.script
            .edits
            .iter()
            .zip(&self.types)
            .map(|(e, &t)| TypedEdit {
                edit: e.clone(),
                error_type: t,
            })
            .collect()
    }
}

/// The tokenize, tag, align and classify pipeline.
#[derive(Debug, Clone)]
pub struct Analyzer {
    tagger: Tagger,
    aligner: Aligner,
    typer: EditTyper,
}

impl Analyzer {
    pub fn new(tagger: Tagger, aligner: Aligner, typer: EditTyper) -> Self {
        Analyzer { tagger, aligner, typer }
    }

    pub fn tagger(&self) -> &Tagger {
        &self.tagger
    }

    pub fn aligner(&self) -> &Aligner {
        &self.aligner
    }

    pub fn typer(&self) -> &EditTyper {
        &self.typer
    }

    pub fn analyze_tokens(&self, mut source: Vec<Token>, mut target: Vec<Token>) -> AnalyzedPair {
        self.tagger.tag(&mut source);
        self.tagger.tag(&mut target);
        let src: Vec<&str> = source.iter().map(|t| t.surface.as_str()).collect();
        let tgt: Vec<&str> = target.iter().map(|t| t.surface.as_str()).collect();
        let script = self.aligner.align(&src, &tgt);
        let types = script
            .edits
            .iter()
            .map(|e| self.typer.classify_edit(e, &source, &target))
            .collect();
        AnalyzedPair {
            source,
            target,
            script,
            types,
        }
    }

    pub fn analyze(&self, pair: &SentencePair) -> AnalyzedPair {
        self.analyze_tokens(tokenize(&pair.source), tokenize(&pair.target))
    }

    pub fn typed_edits(&self, pair: &SentencePair) -> Vec<TypedEdit> {
        self.analyze(pair).typed_edits()
    }

    pub fn type_counts(&self, pairs: &[SentencePair]) -> [u64; 23] {
        pairs
            .par_iter()
            .map(|p| {
                let mut counts = [0u64; 23];
                for t in self.analyze(p).types {
                    counts[t.index()] += 1;
                }
                counts
            })
            .reduce(
                || [0u64; 23],
                |mut a, b| {
                    for (x, y) in a.iter_mut().zip(b) {
                        *x += y;
                    }
                    a
                },
            )
    }

    /// Error-type distribution of a dataset; pairs without edits contribute nothing.
    pub fn distribution_of(&self, dataset: &Dataset) -> ErrorDistribution {
        ErrorDistribution::from_counts(&self.type_counts(&dataset.pairs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resources::Resources;

    fn analyzer() -> Analyzer {
        Resources::bundled().unwrap().analyzer()
    }

    fn types(src: &str, tgt: &str) -> Vec<ErrorType> {
        analyzer().analyze(&SentencePair::new(src, tgt)).types
    }

    #[test]
    fn labels_roundtrip() {
        for t in ErrorType::ALL {
            assert_eq!(t.as_str().parse::<ErrorType>().unwrap(), t);
        }
        assert_eq!(ErrorType::ALL.len(), 23);
        assert!("R:SPELL".parse::<ErrorType>().is_err());
    }

    #[test]
    fn verb_form() {
        assert_eq!(
            types("the areas most relating to your company", "the areas most related to your company"),
            [ErrorType::VerbForm]
        );
    }

    #[test]
    fn punctuation() {
        assert_eq!(types("I went home ,", "I went home ."), [ErrorType::Punct]);
    }

    #[test]
    fn misspelling_with_oov_source() {
        assert_eq!(types("events in your louce", "events in your locale"), [ErrorType::Spell]);
        assert_eq!(types("new equipmet", "new equipment"), [ErrorType::Spell]);
    }

    #[test]
    fn verb_agreement_and_tense() {
        assert_eq!(types("He go to school", "He goes to school"), [ErrorType::VerbSva]);
        assert_eq!(types("Yesterday I walk home", "Yesterday I walked home"), [ErrorType::VerbTense]);
        assert_eq!(types("They was late", "They were late"), [ErrorType::VerbSva]);
        assert_eq!(types("She has went", "She has gone"), [ErrorType::VerbForm]);
    }

    #[test]
    fn nouns() {
        assert_eq!(types("two book", "two books"), [ErrorType::NounNum]);
        assert_eq!(types("some informations", "some information"), [ErrorType::NounInfl]);
        assert_eq!(types("the childs", "the children"), [ErrorType::NounInfl]);
        assert_eq!(types("my friend book", "my friend 's book"), [ErrorType::NounPos]);
    }

    #[test]
    fn function_words() {
        assert_eq!(types("I live at London", "I live in London"), [ErrorType::Prep]);
        assert_eq!(types("I saw a apple", "I saw an apple"), [ErrorType::Det]);
        assert_eq!(types("I saw cat", "I saw the cat"), [ErrorType::Det]);
    }

    #[test]
    fn orth_wo_contr_adj_form() {
        assert_eq!(types("I like london", "I like London"), [ErrorType::Orth]);
        assert_eq!(types("I like every one", "I like everyone"), [ErrorType::Orth]);
        assert_eq!(types("I always am late", "I am always late"), [ErrorType::Wo]);
        assert_eq!(types("I do not know", "I do n't know"), [ErrorType::Contr]);
        assert_eq!(types("it is more big", "it is bigger"), [ErrorType::AdjForm]);
        assert_eq!(types("the most big", "the biggest"), [ErrorType::AdjForm]);
    }

    #[test]
    fn implausible_replacement_is_other() {
        assert_eq!(types("new Therefofe", "new equipment"), [ErrorType::Other]);
    }

    #[test]
    fn distribution_sums_to_100() {
        let ds = Dataset::from_pairs(
            vec![
                SentencePair::new("I go home ,", "I go home ."),
                SentencePair::new("He go home .", "He goes home ."),
                SentencePair::new("a b", "a b"),
            ],
            "test",
        );
        let d = analyzer().distribution_of(&ds);
        assert_eq!(d.total_edits, 2);
        assert!((d.total_mass() - 100.0).abs() < 1e-9);
        assert_eq!(d.get(ErrorType::Punct), 50.0);
        assert_eq!(other_share(&d), 0.0);
        assert_eq!(analyzer().distribution_of(&Dataset::default()), ErrorDistribution::empty());
    }

    #[test]
    fn distribution_json_has_all_keys() {
        let d = ErrorDistribution::from_counts(&[1; 23]);
        let v = d.to_json();
        assert_eq!(v.as_object().unwrap().len(), 24);
        let back: ErrorDistribution = serde_json::from_value(v).unwrap();
        assert_eq!(back, d);
    }
}
