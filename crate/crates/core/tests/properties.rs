mod common;

use std::sync::OnceLock;

use gec_dataq_core::align::{apply, Aligner};
use gec_dataq_core::classifier::{
    example_gradient, example_loss, score_dataset, FeatureVector, Featurizer, LinearModel, DIM,
};
use gec_dataq_core::corpus::{
    apply_m2, parse_m2, parse_m2_with, parse_tsv, write_m2, write_tsv, Dataset, M2Annotation, M2Record, ParseMode,
    SentencePair,
};
use gec_dataq_core::corrupt::{corrupt, substream, CorruptionConfig, CorruptionRuleSet, Mode};
use gec_dataq_core::metrics::{f_beta, jsd, jsd_probabilities, shannon_entropy};
use gec_dataq_core::text::{surfaces, tokenize};
use gec_dataq_core::typing::{Analyzer, ErrorDistribution};
use proptest::prelude::*;

fn analyzer() -> &'static Analyzer {
    static A: OnceLock<Analyzer> = OnceLock::new();
    A.get_or_init(|| common::resources().analyzer())
}

fn aligner() -> &'static Aligner {
    analyzer().aligner()
}

fn rules() -> &'static CorruptionRuleSet {
    static R: OnceLock<CorruptionRuleSet> = OnceLock::new();
    R.get_or_init(common::rules)
}

fn word() -> impl Strategy<Value = String> {
    prop_oneof![
        prop::sample::select(vec!["the", "a", "cat", "cats", "Cat", "sat", "sits", "on", "mat", "go", "went", ",", "."])
            .prop_map(String::from),
        "[a-zA-Z]{1,8}",
    ]
}

fn tokens(max: usize) -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec(word(), 0..=max)
}

fn probabilities() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, 23).prop_filter_map("zero mass", |v| {
        let s: f64 = v.iter().sum();
        (s > 1e-9).then(|| v.iter().map(|x| x / s).collect())
    })
}

fn counts() -> impl Strategy<Value = [u64; 23]> {
    prop::array::uniform23(0u64..1000)
}

fn sentence_text() -> impl Strategy<Value = String> {
    "[A-Za-z,.'!? ]{0,60}"
}

prop_compose! {
    /// An M2 record with non-overlapping annotations from one or two annotators.
    fn m2_record()(src in prop::collection::vec("[a-z]{1,6}", 0..12))
        (cuts in prop::collection::vec(0..=src.len(), 0..6),
         corrections in prop::collection::vec(prop::collection::vec("[a-z]{1,5}", 0..3), 6),
         annotator in 0u32..2,
         src in Just(src)) -> M2Record {
        let mut cuts = cuts;
        cuts.sort_unstable();
        cuts.dedup();
        let annotations = cuts
            .chunks(2)
            .zip(&corrections)
            .filter(|(c, corr)| c.len() == 2 || !corr.is_empty())
            .map(|(c, corr)| {
                let (start, end) = (c[0], *c.get(1).unwrap_or(&c[0]));
                M2Annotation {
                    start: start as i64,
                    end: end as i64,
                    type_label: "R:OTHER".into(),
                    correction: corr.join(" "),
                    annotator_id: annotator,
                }
            })
            .collect();
        M2Record { source_tokens: src, annotations }
    }
}

fn random_model(seed: u64, dim: usize) -> LinearModel {
    use rand::Rng;
    let mut rng = substream(seed, 0);
    let mut m = LinearModel::zero(dim);
    for w in m.weights.iter_mut() {
        *w = rng.random_range(-1.0..1.0);
    }
    m.bias = rng.random_range(-0.5..0.5);
    m
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn tokenize_is_idempotent(s in sentence_text()) {
        let once = surfaces(&tokenize(&s));
        let twice = surfaces(&tokenize(&once.join(" ")));
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn alignment_round_trips(s in tokens(20), t in tokens(20)) {
        let script = aligner().align(&s, &t);
        prop_assert_eq!(apply(&script, &s).unwrap(), t);
    }

    #[test]
    fn alignment_edits_are_sorted_and_disjoint(s in tokens(20), t in tokens(20)) {
        let script = aligner().align(&s, &t);
        for e in &script.edits {
            prop_assert!(e.src_start <= e.src_end && e.tgt_start <= e.tgt_end);
            prop_assert!(e.src_width() + e.tgt_width() > 0);
        }
        for w in script.edits.windows(2) {
            prop_assert!(w[0].src_end <= w[1].src_start && w[0].tgt_end <= w[1].tgt_start);
            // maximal runs: two edits never touch on both sides
            prop_assert!(w[0].src_end < w[1].src_start || w[0].tgt_end < w[1].tgt_start);
        }
    }

    #[test]
    fn alignment_cost_is_symmetric(s in tokens(12), t in tokens(12)) {
        let a = aligner().align(&s, &t).cost;
        let b = aligner().align(&t, &s).cost;
        prop_assert!((a - b).abs() < 1e-9);
        prop_assert_eq!(a == 0.0, s == t);
    }

    #[test]
    fn m2_parser_never_panics(text in "(S [a-z ]{0,12}\n|A [-0-9 ]{0,6}\\|\\|\\|[A-Z:]{0,6}\\|\\|\\|[a-z ]{0,6}\\|\\|\\|REQUIRED\\|\\|\\|-NONE-\\|\\|\\|[0-9]\n|\n|[^\n]{0,10}\n){0,12}") {
        let _ = parse_m2(text.as_bytes());
        let lenient = parse_m2_with(text.as_bytes(), ParseMode::Lenient);
        prop_assert!(lenient.is_ok());
    }

    #[test]
    fn m2_write_parse_round_trip(records in prop::collection::vec(m2_record(), 1..5)) {
        let mut buf = Vec::new();
        write_m2(&records, &mut buf).unwrap();
        let back = parse_m2(buf.as_slice()).unwrap();
        prop_assert_eq!(back, records);
    }

    #[test]
    fn apply_m2_keeps_source_tokens(record in m2_record()) {
        let pair = apply_m2(&record, record.annotations.first().map_or(0, |a| a.annotator_id)).unwrap();
        prop_assert_eq!(&pair.source, &record.source_tokens.join(" "));
        let edits = record.annotations.len();
        if edits == 0 {
            prop_assert_eq!(&pair.target, &pair.source);
        }
    }

    #[test]
    fn tsv_round_trip(rows in prop::collection::vec(("[A-Za-z ,.]{1,30}", "[A-Za-z ,.]{1,30}"), 1..20)) {
        let rows: Vec<(String, String)> = rows
            .into_iter()
            .map(|(s, t)| (s.trim().to_string(), t.trim().to_string()))
            .filter(|(s, t)| !s.is_empty() && !t.is_empty())
            .collect();
        prop_assume!(!rows.is_empty());
        let ds = Dataset::from_pairs(rows.iter().map(|(s, t)| SentencePair::new(s.clone(), t.clone())).collect(), "p");
        let mut buf = Vec::new();
        write_tsv(&ds, &mut buf).unwrap();
        let back = parse_tsv(buf.as_slice()).unwrap();
        prop_assert_eq!(back.pairs, ds.pairs);
    }

    #[test]
    fn distribution_sums_to_100(c in counts()) {
        let d = ErrorDistribution::from_counts(&c);
        if c.iter().sum::<u64>() == 0 {
            prop_assert!(d.is_empty());
        } else {
            prop_assert!((d.total_mass() - 100.0).abs() <= 0.2);
        }
    }

    #[test]
    fn corruption_respects_cap(seed in any::<u64>(), cap in 1usize..5, p in 0.0f64..1.0) {
        let s = common::sentence(&mut substream(seed, 0));
        let config = CorruptionConfig {
            mode: if seed % 2 == 0 { Mode::Plausible } else { Mode::Implausible },
            per_token_error_prob: p,
            max_errors_per_sentence: cap,
            ..CorruptionConfig::default()
        };
        let out = corrupt(&s, rules(), &config, &mut substream(seed, 1)).unwrap();
        prop_assert!(out.applied().len() <= cap);
        prop_assert_eq!(out.is_corrupted(), !out.applied().is_empty());
        if !out.is_corrupted() {
            prop_assert_eq!(&out.pair().source, &out.pair().target);
        }
    }

    #[test]
    fn f_beta_is_monotone(tp in 0u64..500, fp in 0u64..500, fn_ in 0u64..500, beta in 0.1f64..4.0) {
        let base = f_beta(tp, fp, fn_, beta).f05;
        prop_assert!((0.0..=100.0).contains(&base));
        prop_assert!(f_beta(tp + 1, fp, fn_, beta).f05 >= base - 1e-9);
        prop_assert!(f_beta(tp, fp + 1, fn_, beta).f05 <= base + 1e-9);
        prop_assert!(f_beta(tp, fp, fn_ + 1, beta).f05 <= base + 1e-9);
    }

    #[test]
    fn jsd_is_a_bounded_symmetric_divergence(p in probabilities(), q in probabilities()) {
        let pq = jsd_probabilities(&p, &q);
        prop_assert!((0.0..=1.0).contains(&pq));
        prop_assert!((pq - jsd_probabilities(&q, &p)).abs() < 1e-12);
        prop_assert_eq!(jsd_probabilities(&p, &p), 0.0);
        if p != q {
            prop_assert!(pq > 0.0);
        }
    }

    #[test]
    fn jsd_of_distributions_is_exactly_symmetric(a in counts(), b in counts()) {
        prop_assume!(a.iter().sum::<u64>() > 0 && b.iter().sum::<u64>() > 0);
        let (da, db) = (ErrorDistribution::from_counts(&a), ErrorDistribution::from_counts(&b));
        prop_assert_eq!(jsd(&da, &db).unwrap(), jsd(&db, &da).unwrap());
    }

    #[test]
    fn entropy_is_maximal_at_uniform(c in counts()) {
        let h = shannon_entropy(&ErrorDistribution::from_counts(&c));
        let uniform = shannon_entropy(&ErrorDistribution::from_counts(&[7; 23]));
        prop_assert!((uniform - 23f64.log2()).abs() < 1e-12);
        prop_assert!(h <= uniform + 1e-12);
        prop_assert!(h >= 0.0);
    }

    #[test]
    fn raising_the_threshold_never_adds_reliable_predictions(
        seed in any::<u64>(),
        xs in prop::collection::vec(prop::collection::vec((0u32..64, 0.0f64..1.0), 0..10), 1..30),
        t1 in 0.01f64..0.99,
        t2 in 0.01f64..0.99,
    ) {
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        let m = random_model(seed, 64);
        let count = |t: f64| {
            let m = m.clone().with_threshold(t).unwrap();
            xs.iter()
                .filter(|e| m.predict_features(&FeatureVector { entries: (*e).clone() }).label
                    == gec_dataq_core::corpus::Label::Reliable)
                .count()
        };
        prop_assert!(count(hi) <= count(lo));
    }

    #[test]
    fn gradient_matches_finite_differences(
        seed in any::<u64>(),
        entries in prop::collection::btree_map(0u32..64, -1.0f64..1.0, 1..12),
        y in prop::bool::ANY,
        l2 in 1e-3f64..1e-1,
    ) {
        use rand::Rng;
        let mut rng = substream(seed, 0);
        let w: Vec<f64> = (0..64).map(|_| rng.random_range(-1.0..1.0)).collect();
        let b = rng.random_range(-1.0..1.0);
        let x = FeatureVector { entries: entries.into_iter().collect() };
        let y = if y { 1.0 } else { 0.0 };
        let (gw, gb) = example_gradient(&w, b, &x, y, l2);
        let h = 1e-5;
        for j in 0..64 {
            let (mut wp, mut wm) = (w.clone(), w.clone());
            wp[j] += h;
            wm[j] -= h;
            let num = (example_loss(&wp, b, &x, y, l2) - example_loss(&wm, b, &x, y, l2)) / (2.0 * h);
            prop_assert!((gw[j] - num).abs() <= 1e-5 * gw[j].abs().max(num.abs()).max(1e-4), "w{}: {} vs {}", j, gw[j], num);
        }
        let num = (example_loss(&w, b + h, &x, y, l2) - example_loss(&w, b - h, &x, y, l2)) / (2.0 * h);
        prop_assert!((gb - num).abs() <= 1e-5 * gb.abs().max(num.abs()).max(1e-4));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn reliability_counts_are_additive(seed in 0u64..1000, split in 0usize..40) {
        let featurizer = Featurizer::new(analyzer().clone());
        let model = random_model(seed, DIM);
        let ds = common::gec_corpus(40, seed);
        let (a, b) = ds.pairs.split_at(split);
        let score = |pairs: &[SentencePair]| {
            score_dataset(&model, &featurizer, &Dataset::from_pairs(pairs.to_vec(), "x")).map(|r| r.n_reliable)
        };
        let whole = score(&ds.pairs).unwrap();
        let parts = score(a).unwrap_or(0) + score(b).unwrap_or(0);
        prop_assert_eq!(whole, parts);
    }

    #[test]
    fn model_save_load_round_trip(seed in any::<u64>(), t in 0.01f64..0.99) {
        let model = random_model(seed, 256).with_threshold(t).unwrap();
        let mut buf = Vec::new();
        model.save(&mut buf).unwrap();
        let back = LinearModel::load(buf.as_slice()).unwrap();
        prop_assert_eq!(back.model_id(), model.model_id());
        prop_assert_eq!(&back, &model);
        let mut again = Vec::new();
        back.save(&mut again).unwrap();
        prop_assert_eq!(again, buf);
    }
}
