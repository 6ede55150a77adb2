//! Python bindings for the core crate.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::PathBuf;

use gec_dataq_core::classifier::{self, Featurizer, LinearModel, TrainConfig};
use gec_dataq_core::config::ToolConfig;
use gec_dataq_core::corpus::{Dataset, Label, LabeledPair, Origin, SentencePair};
use gec_dataq_core::corrupt::{corrupt_corpus, CorruptionConfig, CorruptionRuleSet, Mode};
use gec_dataq_core::metrics;
use gec_dataq_core::text::{surfaces, tokenize as tokenize_text};
use gec_dataq_core::typing::{self, ErrorDistribution, ErrorType};
use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: gec_dataq_core::Error) -> PyErr {
    match e {
        gec_dataq_core::Error::Io(io) => PyOSError::new_err(io.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn dataset(pairs: Vec<(String, String)>) -> Dataset {
    Dataset::from_pairs(pairs.into_iter().map(|(s, t)| SentencePair::new(s, t)).collect(), "python")
}

fn dist_map(d: &ErrorDistribution) -> BTreeMap<String, f64> {
    d.iter().map(|(t, v)| (t.as_str().to_string(), v)).collect()
}

fn dist_from_map(m: BTreeMap<String, f64>) -> PyResult<ErrorDistribution> {
    let mut values = Vec::with_capacity(m.len());
    for (k, v) in m {
        let t: ErrorType = k.parse().map_err(|_| PyValueError::new_err(format!("unknown error type {k}")))?;
        values.push((t, v));
    }
    Ok(ErrorDistribution::from_percentages(&values, 0))
}

/// Splits a sentence into tokens.
#[pyfunction]
fn tokenize(sentence: &str) -> Vec<String> {
    surfaces(&tokenize_text(sentence))
}

/// Tokenizer, tagger, aligner and edit typer.
#[pyclass(frozen)]
struct Analyzer {
    inner: typing::Analyzer,
}

#[pymethods]
impl Analyzer {
    /// Bundled lexicons, or those named in a config file.
    #[new]
    #[pyo3(signature = (config=None))]
    fn new(config: Option<PathBuf>) -> PyResult<Self> {
        let cfg = match config {
            Some(p) => ToolConfig::load(&p).map_err(err)?,
            None => ToolConfig::default(),
        };
        let res = cfg.resources().map_err(err)?;
        Ok(Analyzer {
            inner: res.analyzer_with(cfg.align),
        })
    }

    /// Typed edits as dicts with span, token and type fields.
    fn edits<'py>(&self, py: Python<'py>, source: &str, target: &str) -> PyResult<Vec<Bound<'py, PyDict>>> {
        let mut out = Vec::new();
        for te in self.inner.typed_edits(&SentencePair::new(source, target)) {
            let d = PyDict::new(py);
            d.set_item("src_start", te.edit.src_start)?;
            d.set_item("src_end", te.edit.src_end)?;
            d.set_item("tgt_start", te.edit.tgt_start)?;
            d.set_item("tgt_end", te.edit.tgt_end)?;
            d.set_item("src_tokens", te.edit.src_tokens)?;
            d.set_item("tgt_tokens", te.edit.tgt_tokens)?;
            d.set_item("type", te.error_type.as_str())?;
            out.push(d);
        }
        Ok(out)
    }

    fn types(&self, source: &str, target: &str) -> Vec<&'static str> {
        self.inner
            .analyze(&SentencePair::new(source, target))
            .types
            .iter()
            .map(|t| t.as_str())
            .collect()
    }

    /// Percentage of edits per error type.
    fn distribution(&self, pairs: Vec<(String, String)>) -> BTreeMap<String, f64> {
        dist_map(&self.inner.distribution_of(&dataset(pairs)))
    }

    /// JSD and per-type percentage deltas between two corpora.
    fn dist_match<'py>(
        &self,
        py: Python<'py>,
        a: Vec<(String, String)>,
        b: Vec<(String, String)>,
    ) -> PyResult<Bound<'py, PyDict>> {
        let r = metrics::distribution_match(&self.inner, &dataset(a), &dataset(b)).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("jsd", r.jsd)?;
        d.set_item("per_type_delta", r.per_type_delta)?;
        Ok(d)
    }
}

/// Corrupts clean sentences; unchanged sentences come back as None.
#[pyfunction]
#[pyo3(signature = (sentences, mode="plausible", p=0.15, max_errors=4, seed=0))]
fn corrupt(
    sentences: Vec<String>,
    mode: &str,
    p: f64,
    max_errors: usize,
    seed: u64,
) -> PyResult<Vec<Option<(String, String)>>> {
    let mode: Mode = mode.parse().map_err(PyValueError::new_err)?;
    let res = ToolConfig::default().resources().map_err(err)?;
    let rules = CorruptionRuleSet::from_resources(&res).map_err(err)?;
    let config = CorruptionConfig {
        mode,
        per_token_error_prob: p,
        max_errors_per_sentence: max_errors,
        seed,
        ..CorruptionConfig::default()
    };
    let outcomes = corrupt_corpus(&sentences, &rules, &config).map_err(err)?;
    Ok(outcomes
        .into_iter()
        .map(|o| {
            o.is_corrupted().then(|| {
                let pair = o.into_pair();
                (pair.source, pair.target)
            })
        })
        .collect())
}

/// Logistic reliability classifier.
#[pyclass(frozen)]
struct Model {
    inner: LinearModel,
    featurizer: Featurizer,
}

fn featurizer() -> PyResult<Featurizer> {
    Ok(Featurizer::new(ToolConfig::default().resources().map_err(err)?.analyzer()))
}

#[pymethods]
impl Model {
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        let file = File::open(&path).map_err(|e| PyOSError::new_err(format!("{}: {e}", path.display())))?;
        Ok(Model {
            inner: LinearModel::load(BufReader::new(file)).map_err(err)?,
            featurizer: featurizer()?,
        })
    }

    /// Trains on `(source, target, label)` triples with label "reliable" or "unreliable".
    #[staticmethod]
    #[pyo3(signature = (examples, epochs=10, learning_rate=0.2, l2=1e-6, seed=0))]
    fn train(examples: Vec<(String, String, String)>, epochs: usize, learning_rate: f64, l2: f64, seed: u64) -> PyResult<Self> {
        let mut corpus = Vec::with_capacity(examples.len());
        for (s, t, l) in examples {
            let label: Label = l.parse().map_err(PyValueError::new_err)?;
            corpus.push(LabeledPair {
                pair: SentencePair::new(s, t),
                label,
                origin: Origin::Human,
            });
        }
        let config = TrainConfig {
            epochs,
            learning_rate,
            l2,
            seed,
        };
        let featurizer = featurizer()?;
        let inner = classifier::train(&featurizer, &corpus, &config).map_err(err)?;
        Ok(Model { inner, featurizer })
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        let file = File::create(&path).map_err(|e| PyOSError::new_err(format!("{}: {e}", path.display())))?;
        self.inner.save(BufWriter::new(file)).map_err(err)
    }

    #[getter]
    fn model_id(&self) -> String {
        self.inner.model_id()
    }

    #[getter]
    fn threshold(&self) -> f64 {
        self.inner.threshold
    }

    fn with_threshold(&self, threshold: f64) -> PyResult<Self> {
        Ok(Model {
            inner: self.inner.clone().with_threshold(threshold).map_err(err)?,
            featurizer: self.featurizer.clone(),
        })
    }

    /// `(probability of reliable, label)`.
    fn predict(&self, source: &str, target: &str) -> PyResult<(f64, String)> {
        let p = classifier::predict(&self.inner, &self.featurizer, &SentencePair::new(source, target)).map_err(err)?;
        Ok((p.probability, p.label.to_string()))
    }

    /// Reliability report fields for a corpus.
    fn score<'py>(&self, py: Python<'py>, pairs: Vec<(String, String)>) -> PyResult<Bound<'py, PyDict>> {
        let r = classifier::score_dataset(&self.inner, &self.featurizer, &dataset(pairs)).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("n_pairs", r.n_pairs)?;
        d.set_item("n_reliable", r.n_reliable)?;
        d.set_item("reliability_metric", r.reliability_metric)?;
        d.set_item("model_id", r.model_id)?;
        Ok(d)
    }

    /// `(reliable, unreliable)` lists of pairs, in input order.
    #[allow(clippy::type_complexity)]
    fn partition(&self, pairs: Vec<(String, String)>) -> PyResult<(Vec<(String, String)>, Vec<(String, String)>)> {
        let (r, u) = classifier::partition(&self.inner, &self.featurizer, &dataset(pairs)).map_err(err)?;
        let back = |d: Dataset| d.pairs.into_iter().map(|p| (p.source, p.target)).collect();
        Ok((back(r), back(u)))
    }
}

/// Base-2 Jensen-Shannon divergence of two type-to-mass mappings.
#[pyfunction]
fn jsd(p: BTreeMap<String, f64>, q: BTreeMap<String, f64>) -> PyResult<f64> {
    metrics::jsd(&dist_from_map(p)?, &dist_from_map(q)?).map_err(err)
}

/// Precision, recall and F-beta in percent.
#[pyfunction]
#[pyo3(signature = (tp, fp, fn_, beta=0.5))]
fn f_beta(tp: u64, fp: u64, fn_: u64, beta: f64) -> BTreeMap<&'static str, f64> {
    let r = metrics::f_beta(tp, fp, fn_, beta);
    BTreeMap::from([("precision", r.precision), ("recall", r.recall), ("f", r.f05)])
}

#[pymodule]
fn gec_dataq(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("ERROR_TYPES", ErrorType::ALL.iter().map(|t| t.as_str()).collect::<Vec<_>>())?;
    m.add("FEATURE_SCHEMA_VERSION", classifier::FEATURE_SCHEMA_VERSION)?;
    m.add_function(wrap_pyfunction!(tokenize, m)?)?;
    m.add_function(wrap_pyfunction!(corrupt, m)?)?;
    m.add_function(wrap_pyfunction!(jsd, m)?)?;
    m.add_function(wrap_pyfunction!(f_beta, m)?)?;
    m.add_class::<Analyzer>()?;
    m.add_class::<Model>()?;
    Ok(())
}
