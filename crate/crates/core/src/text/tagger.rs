use std::collections::HashMap;

use super::lexicon::VerbLexicon;
use super::tokenize::is_punct;
use super::{PosTag, Token};

const DETERMINERS: &[&str] = &[
    "the", "a", "an", "this", "that", "these", "those", "my", "your", "his", "her", "its", "our", "their", "some",
    "any", "no", "every", "each", "all", "both", "either", "neither", "another", "much", "many", "few", "several",
    "such", "what", "which", "whose", "other", "enough", "less", "more", "most",
];

const PREPOSITIONS: &[&str] = &[
    "in", "on", "at", "of", "for", "with", "by", "from", "into", "onto", "about", "over", "under", "between",
    "through", "during", "before", "after", "above", "below", "across", "against", "along", "among", "around",
    "behind", "beside", "beyond", "despite", "except", "inside", "near", "off", "outside", "since", "toward",
    "towards", "upon", "within", "without", "via", "per", "like", "throughout", "until", "till", "unlike", "beneath",
    "amongst", "as",
];

const PRONOUNS: &[&str] = &[
    "i", "me", "you", "he", "him", "she", "it", "we", "us", "they", "them", "myself", "yourself", "himself",
    "herself", "itself", "ourselves", "yourselves", "themselves", "mine", "yours", "hers", "ours", "theirs", "who",
    "whom", "someone", "anyone", "everyone", "nobody", "somebody", "anybody", "everybody", "something",
    "anything", "everything", "nothing", "one", "none",
];

const CONJUNCTIONS: &[&str] = &[
    "and", "or", "but", "nor", "yet", "so", "because", "although", "though", "while", "if", "unless", "whereas",
    "whether", "than", "once", "whenever", "wherever", "however",
];

const PARTICLES: &[&str] = &["to", "not", "n't", "'s"];

const ADVERBS: &[&str] = &[
    "very", "too", "also", "just", "only", "even", "still", "already", "always", "never", "often", "sometimes",
    "usually", "here", "there", "now", "then", "again", "soon", "quite", "rather", "almost", "really", "perhaps",
    "maybe", "ever", "together", "away", "back", "well", "far", "today", "tomorrow", "yesterday", "where", "when",
    "why", "how", "later", "else", "instead", "indeed", "thus", "therefore", "hence", "up", "down", "out",
];

/// Modals and clitic auxiliaries; tagged VERB with the closed classes.
const AUXILIARIES: &[&str] = &[
    "will", "would", "can", "could", "shall", "should", "may", "might", "must", "ought", "'ll", "'re", "'ve", "'d",
    "'m", "ca", "wo", "sha",
];

const NUMBER_WORDS: &[&str] = &[
    "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten", "eleven", "twelve", "twenty", "thirty",
    "hundred", "thousand", "million", "billion",
];

/// Deterministic lexicon + suffix part-of-speech tagger.
///
/// Priority: punctuation, numerals, closed-class words, verb lexicon, suffix
/// rules, NOUN.
#[derive(Debug, Clone)]
pub struct Tagger {
    closed: HashMap<&'static str, PosTag>,
    verbs: VerbLexicon,
}

impl Tagger {
    pub fn new(verbs: VerbLexicon) -> Self {
        let mut closed = HashMap::new();
        // earlier lists win on overlap ("that" is a determiner, "there" an adverb)
        let lists: [(&[&str], PosTag); 7] = [
            (DETERMINERS, PosTag::Det),
            (PRONOUNS, PosTag::Pron),
            (PARTICLES, PosTag::Part),
            (PREPOSITIONS, PosTag::Prep),
            (CONJUNCTIONS, PosTag::Conj),
            (ADVERBS, PosTag::Adv),
            (AUXILIARIES, PosTag::Verb),
        ];
        for (words, tag) in lists {
            for w in words {
                closed.entry(*w).or_insert(tag);
            }
        }
        Tagger { closed, verbs }
    }

    pub fn verbs(&self) -> &VerbLexicon {
        &self.verbs
    }

    pub fn tag_word(&self, surface: &str, lower: &str) -> PosTag {
        if !surface.is_empty() && surface.chars().all(is_punct) {
            return PosTag::Punct;
        }
        if is_numeral(lower) {
            return PosTag::Num;
        }
        if let Some(&tag) = self.closed.get(lower) {
            return tag;
        }
        if self.verbs.contains(lower) {
            return PosTag::Verb;
        }
        suffix_tag(lower).unwrap_or(PosTag::Noun)
    }

    pub fn tag(&self, tokens: &mut [Token]) {
        for t in tokens.iter_mut() {
            t.pos = self.tag_word(&t.surface, &t.lower);
        }
    }

    /// Returns tagged copies of `tokens`.
    pub fn pos_tag(&self, tokens: &[Token]) -> Vec<Token> {
        let mut out = tokens.to_vec();
        self.tag(&mut out);
        out
    }
}

fn is_numeral(lower: &str) -> bool {
    if NUMBER_WORDS.contains(&lower) {
        return true;
    }
    lower.chars().any(|c| c.is_ascii_digit())
        && lower.chars().all(|c| c.is_ascii_digit() || matches!(c, '.' | ',' | '%' | '-' | '/' | ':'))
}

fn suffix_tag(lower: &str) -> Option<PosTag> {
    if lower.len() < 4 {
        return None;
    }
    if lower.ends_with("ly") {
        Some(PosTag::Adv)
    } else if lower.ends_with("ing") || lower.ends_with("ed") {
        Some(PosTag::Verb)
    } else if ["ous", "ful", "ive", "able", "ible", "less", "ical"].iter().any(|s| lower.ends_with(s)) {
        Some(PosTag::Adj)
    } else if ["tion", "sion", "ness", "ment", "ity"].iter().any(|s| lower.ends_with(s)) {
        Some(PosTag::Noun)
    } else {
        None
    }
}
