//! Deterministic sentence and corpus generators shared by the integration tests.
#![allow(dead_code)]

use gec_dataq_core::corpus::{Dataset, SentencePair};
use gec_dataq_core::corrupt::{corrupt, substream, CorruptionConfig, CorruptionRuleSet, Mode, Outcome};
use gec_dataq_core::resources::Resources;
use rand::seq::IndexedRandom;
use rand::Rng;

const SUBJECTS: &[&str] = &[
    "The teacher", "My friend", "Our company", "The government", "Their family", "She", "He", "We", "They",
    "The students", "People", "The manager", "Her brother", "The clients", "Everyone in the village",
];

/// (base, third person singular, past)
const VERBS: &[(&str, &str, &str)] = &[
    ("visit", "visits", "visited"),
    ("develop", "develops", "developed"),
    ("accept", "accepts", "accepted"),
    ("receive", "receives", "received"),
    ("write", "writes", "wrote"),
    ("study", "studies", "studied"),
    ("recommend", "recommends", "recommended"),
    ("discuss", "discusses", "discussed"),
    ("need", "needs", "needed"),
    ("find", "finds", "found"),
    ("buy", "buys", "bought"),
    ("see", "sees", "saw"),
    ("take", "takes", "took"),
    ("make", "makes", "made"),
    ("prefer", "prefers", "preferred"),
    ("plan", "plans", "planned"),
];

const OBJECTS: &[&str] = &[
    "the new equipment", "their advice", "the information", "a different opportunity", "the local restaurant",
    "the important question", "the whole village", "the business", "the calendar", "regional events",
    "the potential clients", "the weather report", "a comfortable room", "the grammar book", "a new language",
    "the government plan", "our future", "the school", "a long journey", "the family business",
];

const ADVERBIALS: &[&str] = &[
    "last weekend", "during the holiday", "in the village", "because of the weather", "with their family",
    "at the school", "for the company", "on Tuesday", "every minute", "after the meeting", "in the morning",
    "before the journey",
];

const CLAUSES: &[&str] = &[
    "", "", "",
    ", and it was really interesting",
    ", but they could not accept it",
    ", although the teacher was quite tired",
    ", because there were many problems",
    ", so we have to study the grammar again",
    ", which is especially important for the country",
];

pub fn sentence<R: Rng + ?Sized>(rng: &mut R) -> String {
    let (base, third, past) = *VERBS.choose(rng).unwrap();
    let subject = *SUBJECTS.choose(rng).unwrap();
    let verb = match rng.random_range(0..3) {
        0 => past.to_string(),
        1 if ["She", "He", "The teacher", "My friend", "The manager", "Her brother", "Our company"].contains(&subject) => {
            third.to_string()
        }
        1 => base.to_string(),
        _ => format!("will {base}"),
    };
    format!(
        "{subject} {verb} {} {}{} .",
        OBJECTS.choose(rng).unwrap(),
        ADVERBIALS.choose(rng).unwrap(),
        CLAUSES.choose(rng).unwrap()
    )
}

/// `n` clean sentences from one seed.
pub fn clean_sentences(n: usize, seed: u64) -> Vec<String> {
    let mut rng = substream(seed, 0);
    (0..n).map(|_| sentence(&mut rng)).collect()
}

pub fn resources() -> Resources {
    Resources::bundled().unwrap()
}

pub fn rules() -> CorruptionRuleSet {
    CorruptionRuleSet::from_resources(&resources()).unwrap()
}

/// Corrupts each sentence, retrying on fresh substreams until a rule fires.
pub fn corrupted_pairs(sentences: &[String], mode: Mode, seed: u64) -> Vec<SentencePair> {
    let rules = rules();
    let config = CorruptionConfig {
        mode,
        seed,
        ..CorruptionConfig::default()
    };
    sentences
        .iter()
        .enumerate()
        .map(|(i, s)| {
            for attempt in 0..64u64 {
                let mut rng = substream(seed, (i as u64) << 6 | attempt);
                if let Outcome::Corrupted { pair, .. } = corrupt(s, &rules, &config, &mut rng).unwrap() {
                    return pair;
                }
            }
            panic!("no corruption fired for '{s}'");
        })
        .collect()
}

/// A corpus of `n` plausibly corrupted pairs.
pub fn gec_corpus(n: usize, seed: u64) -> Dataset {
    Dataset::from_pairs(corrupted_pairs(&clean_sentences(n, seed), Mode::Plausible, seed), format!("synthetic-{seed}"))
}
