//! Linear reliability classifier over edit features.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine;
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::align::Column;
use crate::corpus::{Dataset, Label, LabeledPair, SentencePair};
use crate::corrupt::substream;
use crate::error::{Error, Result};
use crate::resources::sha256_hex;
use crate::typing::{AnalyzedPair, Analyzer, ErrorType};

pub const FEATURE_SCHEMA_VERSION: &str = "fs1";
/// Hashing dimension.
pub const DIM: usize = 1 << 18;
pub const WEIGHTS_ENCODING: &str = "base64-le-f32";

pub const N_DENSE: usize = 32;
pub const IDX_N_EDITS: usize = 23;
pub const IDX_EDITED_FRACTION: usize = 24;
pub const IDX_MEAN_WIDTH: usize = 25;
pub const IDX_MAX_WIDTH: usize = 26;
pub const IDX_OOV_INTRODUCED: usize = 27;
pub const IDX_NO_SHARED_BIGRAM: usize = 28;
pub const IDX_LEN_GROWTH: usize = 29;
pub const IDX_LEN_SHRINK: usize = 30;

/// Scaling caps frozen under "fs1".
pub const CAP_TYPE_COUNT: f64 = 8.0;
pub const CAP_EDITS: f64 = 16.0;
pub const CAP_WIDTH: f64 = 8.0;
pub const CAP_OOV: f64 = 8.0;
pub const CAP_BIGRAM: f64 = 8.0;
pub const CAP_CHAR_DELTA: f64 = 32.0;
pub const CAP_HASHED: f64 = 4.0;

/// Sparse features sorted by index, values in [0, 1].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FeatureVector {
    pub entries: Vec<(u32, f64)>,
}

impl FeatureVector {
    pub fn get(&self, index: usize) -> f64 {
        self.entries
            .binary_search_by_key(&(index as u32), |e| e.0)
            .map(|i| self.entries[i].1)
            .unwrap_or(0.0)
    }

    pub fn dot(&self, weights: &[f64]) -> f64 {
        self.entries.iter().map(|&(i, v)| weights[i as usize] * v).sum()
    }

    fn from_map(map: BTreeMap<u32, f64>) -> Self {
        FeatureVector {
            entries: map.into_iter().filter(|&(_, v)| v != 0.0).collect(),
        }
    }
}

/// Unscaled edit statistics behind a feature vector.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EditFeatures {
    pub type_counts: [u32; 23],
    pub n_edits: usize,
    pub edited_token_fraction: f64,
    pub mean_span_width: f64,
    pub max_span_width: usize,
    pub oov_introduced: usize,
    pub no_shared_bigram: usize,
    /// Characters in source minus characters in target.
    pub char_len_delta: i64,
}

pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Index of a hashed feature in `[N_DENSE, dim)`.
pub fn hashed_index(key: &str, dim: usize) -> usize {
    N_DENSE + (fnv1a(key.as_bytes()) % (dim - N_DENSE) as u64) as usize
}

fn bigrams(s: &str) -> Vec<(char, char)> {
    let chars: Vec<char> = s.chars().collect();
    chars.windows(2).map(|w| (w[0], w[1])).collect()
}

/// True when two non-empty strings share no character bigram. Sides too
/// short to have a bigram are compared by characters.
pub fn shares_no_bigram(a: &str, b: &str) -> bool {
    let (a, b) = (a.to_lowercase(), b.to_lowercase());
    if a.is_empty() || b.is_empty() {
        return false;
    }
    let (ba, bb) = (bigrams(&a), bigrams(&b));
    if ba.is_empty() || bb.is_empty() {
        return !a.chars().any(|c| b.contains(c));
    }
    !ba.iter().any(|x| bb.contains(x))
}

fn scaled(x: f64, cap: f64) -> f64 {
    (x / cap).clamp(0.0, 1.0)
}

#[derive(Debug, Clone)]
pub struct Featurizer {
    analyzer: Analyzer,
}

impl Featurizer {
    pub fn new(analyzer: Analyzer) -> Self {
        Featurizer { analyzer }
    }

    pub fn analyzer(&self) -> &Analyzer {
        &self.analyzer
    }

    /// True when the edit aligns some token against one it shares no
    /// character bigram with.
    pub fn has_unrelated_substitution(&self, src: &[String], tgt: &[String]) -> bool {
        if src.is_empty() || tgt.is_empty() {
            return false;
        }
        let (columns, _) = self.analyzer.aligner().align_columns(src, tgt);
        columns
            .iter()
            .any(|&(c, i, j)| c == Column::Sub && shares_no_bigram(&src[i - 1], &tgt[j - 1]))
    }

    pub fn edit_features(&self, a: &AnalyzedPair) -> EditFeatures {
        let mut f = EditFeatures::default();
        let typer = self.analyzer.typer();
        for (e, t) in a.script.edits.iter().zip(&a.types) {
            f.type_counts[t.index()] += 1;
            let width = e.src_width().max(e.tgt_width());
            f.max_span_width = f.max_span_width.max(width);
            f.mean_span_width += width as f64;
            f.oov_introduced += e.src_tokens.iter().filter(|w| typer.is_oov(w)).count();
            if self.has_unrelated_substitution(&e.src_tokens, &e.tgt_tokens) {
                f.no_shared_bigram += 1;
            }
        }
        f.n_edits = a.script.edits.len();
        if f.n_edits > 0 {
            f.mean_span_width /= f.n_edits as f64;
        }
        f.edited_token_fraction = crate::align::edit_count_stats(&a.script).edited_token_fraction;
        let chars = |toks: &[crate::text::Token]| toks.iter().map(|t| t.surface.chars().count() as i64).sum::<i64>();
        f.char_len_delta = chars(&a.source) - chars(&a.target);
        f
    }

    pub fn features_of(&self, a: &AnalyzedPair) -> FeatureVector {
        self.features_with_dim(a, DIM)
    }

    fn features_with_dim(&self, a: &AnalyzedPair, dim: usize) -> FeatureVector {
        let raw = self.edit_features(a);
        let mut map = BTreeMap::new();
        for (i, &c) in raw.type_counts.iter().enumerate() {
            map.insert(i as u32, scaled(c as f64, CAP_TYPE_COUNT));
        }
        map.insert(IDX_N_EDITS as u32, scaled(raw.n_edits as f64, CAP_EDITS));
        map.insert(IDX_EDITED_FRACTION as u32, raw.edited_token_fraction.clamp(0.0, 1.0));
        map.insert(IDX_MEAN_WIDTH as u32, scaled(raw.mean_span_width, CAP_WIDTH));
        map.insert(IDX_MAX_WIDTH as u32, scaled(raw.max_span_width as f64, CAP_WIDTH));
        map.insert(IDX_OOV_INTRODUCED as u32, scaled(raw.oov_introduced as f64, CAP_OOV));
        map.insert(IDX_NO_SHARED_BIGRAM as u32, scaled(raw.no_shared_bigram as f64, CAP_BIGRAM));
        map.insert(IDX_LEN_GROWTH as u32, scaled((-raw.char_len_delta) as f64, CAP_CHAR_DELTA));
        map.insert(IDX_LEN_SHRINK as u32, scaled(raw.char_len_delta as f64, CAP_CHAR_DELTA));

        let mut counts: BTreeMap<u32, u32> = BTreeMap::new();
        let mut bump = |key: String| *counts.entry(hashed_index(&key, dim) as u32).or_default() += 1;
        for (e, t) in a.script.edits.iter().zip(&a.types) {
            let label = t.as_str();
            if e.src_tokens.is_empty() {
                bump(format!("{label}\u{1f}s:"));
            }
            for w in &e.src_tokens {
                bump(format!("{label}\u{1f}s:{}", w.to_lowercase()));
            }
            if e.tgt_tokens.is_empty() {
                bump(format!("{label}\u{1f}t:"));
            }
            for w in &e.tgt_tokens {
                bump(format!("{label}\u{1f}t:{}", w.to_lowercase()));
            }
        }
        for (i, c) in counts {
            map.insert(i, scaled(c as f64, CAP_HASHED));
        }
        FeatureVector::from_map(map)
    }

    pub fn featurize(&self, pair: &SentencePair) -> FeatureVector {
        self.features_of(&self.analyzer.analyze(pair))
    }

    /// Features hashed into a smaller space, for tests on truncated models.
    pub fn featurize_dim(&self, pair: &SentencePair, dim: usize) -> FeatureVector {
        assert!(dim > N_DENSE, "dimension must exceed the dense block");
        self.features_with_dim(&self.analyzer.analyze(pair), dim)
    }
}

pub fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// log(1 + e^z) without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Regularized log-loss of one example; `y` is 1 for RELIABLE.
pub fn example_loss(weights: &[f64], bias: f64, x: &FeatureVector, y: f64, l2: f64) -> f64 {
    let z = x.dot(weights) + bias;
    let nll = y * softplus(-z) + (1.0 - y) * softplus(z);
    nll + 0.5 * l2 * weights.iter().map(|w| w * w).sum::<f64>()
}

/// Analytic gradient of [`example_loss`] with respect to weights and bias.
pub fn example_gradient(weights: &[f64], bias: f64, x: &FeatureVector, y: f64, l2: f64) -> (Vec<f64>, f64) {
    let r = logistic(x.dot(weights) + bias) - y;
    let mut g: Vec<f64> = weights.iter().map(|w| l2 * w).collect();
    for &(i, v) in &x.entries {
        g[i as usize] += r * v;
    }
    (g, r)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub l2: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 10,
            learning_rate: 0.2,
            l2: 1e-6,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::Config("epochs must be at least 1".into()));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::Config("learning_rate must be positive".into()));
        }
        if !(self.l2.is_finite() && self.l2 >= 0.0) {
            return Err(Error::Config("l2 must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingMeta {
    pub seed: u64,
    pub epochs: usize,
    pub examples_seen: u64,
    pub learning_rate: f64,
    pub l2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub weights: Vec<f32>,
    pub bias: f32,
    pub threshold: f64,
    pub feature_schema_version: String,
    pub training_meta: TrainingMeta,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prediction {
    pub probability: f64,
    pub label: Label,
}

impl LinearModel {
    /// All-zero weights and bias: every prediction is exactly 0.5.
    pub fn zero(dim: usize) -> Self {
        LinearModel {
            weights: vec![0.0; dim],
            bias: 0.0,
            threshold: 0.5,
            feature_schema_version: FEATURE_SCHEMA_VERSION.into(),
            training_meta: TrainingMeta {
                seed: 0,
                epochs: 0,
                examples_seen: 0,
                learning_rate: 0.0,
                l2: 0.0,
            },
        }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn with_threshold(mut self, threshold: f64) -> Result<Self> {
        if !(threshold > 0.0 && threshold < 1.0) {
            return Err(Error::Config(format!("threshold must be in (0, 1), got {threshold}")));
        }
        self.threshold = threshold;
        Ok(self)
    }

    fn check_schema(&self) -> Result<()> {
        if self.feature_schema_version != FEATURE_SCHEMA_VERSION {
            return Err(Error::SchemaMismatch {
                model: self.feature_schema_version.clone(),
                expected: FEATURE_SCHEMA_VERSION.into(),
            });
        }
        Ok(())
    }

    /// Probability of RELIABLE for precomputed features.
    pub fn probability(&self, x: &FeatureVector) -> f64 {
        let z: f64 = x
            .entries
            .iter()
            .filter(|e| (e.0 as usize) < self.weights.len())
            .map(|&(i, v)| self.weights[i as usize] as f64 * v)
            .sum::<f64>()
            + self.bias as f64;
        logistic(z)
    }

    pub fn predict_features(&self, x: &FeatureVector) -> Prediction {
        let probability = self.probability(x);
        let label = if probability >= self.threshold {
            Label::Reliable
        } else {
            Label::Unreliable
        };
        Prediction { probability, label }
    }

    pub fn to_json(&self) -> Value {
        let mut bytes = Vec::with_capacity(4 * self.weights.len());
        for w in &self.weights {
            bytes.extend_from_slice(&w.to_le_bytes());
        }
        json!({
            "feature_schema_version": self.feature_schema_version,
            "D": self.weights.len(),
            "threshold": self.threshold,
            "bias": self.bias,
            "training_meta": self.training_meta,
            "weights_encoding": WEIGHTS_ENCODING,
            "weights": B64.encode(bytes),
        })
    }

    /// Compact JSON with sorted keys; the bytes hashed into the model id.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        serde_json::to_vec(&self.to_json()).expect("model JSON is always serializable")
    }

    pub fn model_id(&self) -> String {
        sha256_hex(&self.canonical_bytes())
    }

    pub fn save(&self, mut out: impl Write) -> Result<()> {
        out.write_all(&self.canonical_bytes())?;
        out.write_all(b"\n")?;
        out.flush()?;
        Ok(())
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let field = |k: &str| v.get(k).ok_or_else(|| Error::Model(format!("missing field '{k}'")));
        let encoding = field("weights_encoding")?.as_str().unwrap_or_default();
        if encoding != WEIGHTS_ENCODING {
            return Err(Error::Model(format!("unsupported weights encoding '{encoding}'")));
        }
        let dim = field("D")?
            .as_u64()
            .ok_or_else(|| Error::Model("D must be an integer".into()))? as usize;
        let bytes = B64
            .decode(field("weights")?.as_str().unwrap_or_default())
            .map_err(|e| Error::Model(format!("weights are not valid base64: {e}")))?;
        if bytes.len() != 4 * dim {
            return Err(Error::Model(format!("expected {} weight bytes, found {}", 4 * dim, bytes.len())));
        }
        let weights: Vec<f32> = bytes
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::Model("non-finite weight".into()));
        }
        let bias = field("bias")?
            .as_f64()
            .ok_or_else(|| Error::Model("bias must be a number".into()))? as f32;
        let threshold = field("threshold")?
            .as_f64()
            .ok_or_else(|| Error::Model("threshold must be a number".into()))?;
        if !(threshold > 0.0 && threshold < 1.0) {
            return Err(Error::Model(format!("threshold {threshold} outside (0, 1)")));
        }
        Ok(LinearModel {
            weights,
            bias,
            threshold,
            feature_schema_version: field("feature_schema_version")?
                .as_str()
                .ok_or_else(|| Error::Model("feature_schema_version must be a string".into()))?
                .to_string(),
            training_meta: serde_json::from_value(field("training_meta")?.clone())?,
        })
    }

    pub fn load(mut stream: impl Read) -> Result<Self> {
        let mut buf = Vec::new();
        stream.read_to_end(&mut buf)?;
        let v: Value = serde_json::from_slice(&buf).map_err(|e| Error::Model(e.to_string()))?;
        Self::from_json(&v)
    }
}

fn target_of(label: Label) -> f64 {
    match label {
        Label::Reliable => 1.0,
        Label::Unreliable => 0.0,
    }
}

/// SGD on the regularized log-loss over precomputed features.
pub fn train_features(examples: &[(FeatureVector, Label)], dim: usize, config: &TrainConfig) -> Result<LinearModel> {
    config.validate()?;
    let n_pos = examples.iter().filter(|e| e.1 == Label::Reliable).count();
    if n_pos == 0 || n_pos == examples.len() {
        return Err(Error::Training("single-class corpus: both labels are required".into()));
    }
    // weights are scale * v so the L2 shrink is O(1) per step
    let mut v = vec![0.0f64; dim];
    let mut scale = 1.0f64;
    let mut bias = 0.0f64;
    let mut order: Vec<usize> = (0..examples.len()).collect();
    let mut rng = substream(config.seed, 0);
    let lr = config.learning_rate;
    let shrink = 1.0 - lr * config.l2;
    if shrink <= 0.0 {
        return Err(Error::Config("learning_rate * l2 must be below 1".into()));
    }
    let mut seen = 0u64;
    for epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        let mut total = 0.0;
        for &i in &order {
            let (x, label) = &examples[i];
            let y = target_of(*label);
            let z = scale * x.entries.iter().map(|&(j, val)| v[j as usize] * val).sum::<f64>() + bias;
            total += y * softplus(-z) + (1.0 - y) * softplus(z);
            let r = logistic(z) - y;
            scale *= shrink;
            for &(j, val) in &x.entries {
                v[j as usize] -= lr * r * val / scale;
            }
            bias -= lr * r;
            if scale < 1e-9 {
                for w in v.iter_mut() {
                    *w *= scale;
                }
                scale = 1.0;
            }
            seen += 1;
        }
        let mean = total / examples.len() as f64;
        if !mean.is_finite() || !bias.is_finite() {
            return Err(Error::Training(format!("non-finite loss at epoch {}", epoch + 1)));
        }
    }
    let weights: Vec<f32> = v.iter().map(|w| (w * scale) as f32).collect();
    if weights.iter().any(|w| !w.is_finite()) {
        return Err(Error::Training(format!("non-finite weights after epoch {}", config.epochs)));
    }
    Ok(LinearModel {
        weights,
        bias: bias as f32,
        threshold: 0.5,
        feature_schema_version: FEATURE_SCHEMA_VERSION.into(),
        training_meta: TrainingMeta {
            seed: config.seed,
            epochs: config.epochs,
            examples_seen: seen,
            learning_rate: config.learning_rate,
            l2: config.l2,
        },
    })
}

pub fn featurize_labeled(featurizer: &Featurizer, corpus: &[LabeledPair]) -> Vec<(FeatureVector, Label)> {
    corpus
        .par_iter()
        .map(|lp| (featurizer.featurize(&lp.pair), lp.label))
        .collect()
}

pub fn train(featurizer: &Featurizer, corpus: &[LabeledPair], config: &TrainConfig) -> Result<LinearModel> {
    train_features(&featurize_labeled(featurizer, corpus), DIM, config)
}

pub fn predict(model: &LinearModel, featurizer: &Featurizer, pair: &SentencePair) -> Result<Prediction> {
    model.check_schema()?;
    Ok(model.predict_features(&featurizer.featurize(pair)))
}

pub fn predict_all(model: &LinearModel, featurizer: &Featurizer, pairs: &[SentencePair]) -> Result<Vec<Prediction>> {
    model.check_schema()?;
    Ok(pairs
        .par_iter()
        .map(|p| model.predict_features(&featurizer.featurize(p)))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityReport {
    pub dataset_provenance: String,
    pub n_pairs: usize,
    pub n_reliable: usize,
    pub reliability_metric: f64,
    pub model_id: String,
}

impl crate::report::Report for ReliabilityReport {
    const KIND: &'static str = "reliability";
}

pub fn reliability_metric(n_reliable: usize, n_pairs: usize) -> f64 {
    100.0 * n_reliable as f64 / n_pairs as f64
}

pub fn score_dataset(model: &LinearModel, featurizer: &Featurizer, dataset: &Dataset) -> Result<ReliabilityReport> {
    if dataset.is_empty() {
        return Err(Error::Empty("dataset has no pairs".into()));
    }
    let preds = predict_all(model, featurizer, &dataset.pairs)?;
    let n_reliable = preds.iter().filter(|p| p.label == Label::Reliable).count();
    Ok(ReliabilityReport {
        dataset_provenance: dataset.provenance.clone(),
        n_pairs: dataset.len(),
        n_reliable,
        reliability_metric: reliability_metric(n_reliable, dataset.len()),
        model_id: model.model_id(),
    })
}

/// Order-stable split by predicted label: `(reliable, unreliable)`.
pub fn partition(model: &LinearModel, featurizer: &Featurizer, dataset: &Dataset) -> Result<(Dataset, Dataset)> {
    let preds = predict_all(model, featurizer, &dataset.pairs)?;
    let mut reliable = Vec::new();
    let mut unreliable = Vec::new();
    for (pair, p) in dataset.pairs.iter().zip(preds) {
        match p.label {
            Label::Reliable => reliable.push(pair.clone()),
            Label::Unreliable => unreliable.push(pair.clone()),
        }
    }
    Ok((
        Dataset::from_pairs(reliable, format!("{}/reliable", dataset.provenance)),
        Dataset::from_pairs(unreliable, format!("{}/unreliable", dataset.provenance)),
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Accuracy {
    pub n: usize,
    pub correct: usize,
    pub accuracy: f64,
}

pub fn evaluate(model: &LinearModel, featurizer: &Featurizer, corpus: &[LabeledPair]) -> Result<Accuracy> {
    if corpus.is_empty() {
        return Err(Error::Empty("evaluation corpus has no pairs".into()));
    }
    model.check_schema()?;
    let correct = corpus
        .par_iter()
        .filter(|lp| model.predict_features(&featurizer.featurize(&lp.pair)).label == lp.label)
        .count();
    Ok(Accuracy {
        n: corpus.len(),
        correct,
        accuracy: correct as f64 / corpus.len() as f64,
    })
}

/// Seeded shuffle, then the last `holdout` fraction becomes the test split.
pub fn train_test_split(corpus: &[LabeledPair], holdout: f64, seed: u64) -> Result<(Vec<LabeledPair>, Vec<LabeledPair>)> {
    if !(holdout > 0.0 && holdout < 1.0) {
        return Err(Error::Config(format!("holdout fraction must be in (0, 1), got {holdout}")));
    }
    let mut items = corpus.to_vec();
    items.shuffle(&mut substream(seed, 1));
    let n_test = ((items.len() as f64) * holdout).round() as usize;
    let test = items.split_off(items.len() - n_test);
    Ok((items, test))
}

/// Per-type weights of the dense block, for inspection.
pub fn dense_weights(model: &LinearModel) -> BTreeMap<String, f32> {
    let mut out = BTreeMap::new();
    for t in ErrorType::ALL {
        out.insert(t.as_str().to_string(), model.weights[t.index()]);
    }
    out
}
