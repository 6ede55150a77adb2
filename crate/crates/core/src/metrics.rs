//! Diversity, distribution match and edit-level F-scores.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::align::{Aligner, Edit};
use crate::classifier::{partition, Featurizer, LinearModel};
use crate::corpus::{Dataset, M2Record};
use crate::error::{Error, Result};
use crate::report::Report;
use crate::typing::{other_share, Analyzer, ErrorDistribution, ErrorType};

/// Entropy in bits of the normalized mass; 0 for an empty distribution.
pub fn shannon_entropy(dist: &ErrorDistribution) -> f64 {
    -dist
        .probabilities()
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.log2())
        .sum::<f64>()
}

fn kl_to_mixture(p: &[f64], m: &[f64]) -> f64 {
    p.iter()
        .zip(m)
        .filter(|(&pi, _)| pi > 0.0)
        .map(|(&pi, &mi)| pi * (pi / mi).log2())
        .sum()
}

/// Base-2 Jensen-Shannon divergence of two probability vectors.
pub fn jsd_probabilities(p: &[f64], q: &[f64]) -> f64 {
    let m: Vec<f64> = p.iter().zip(q).map(|(a, b)| 0.5 * (a + b)).collect();
    let v = 0.5 * kl_to_mixture(p, &m) + 0.5 * kl_to_mixture(q, &m);
    v.clamp(0.0, 1.0)
}

/// Base-2 JSD between two error distributions after renormalization.
pub fn jsd(p: &ErrorDistribution, q: &ErrorDistribution) -> Result<f64> {
    if p.is_empty() || q.is_empty() {
        return Err(Error::Empty("JSD needs two distributions with nonzero mass".into()));
    }
    let (a, b) = (p.probabilities(), q.probabilities());
    // symmetric by construction: sum both orders the same way
    Ok(0.5 * (jsd_probabilities(&a, &b) + jsd_probabilities(&b, &a)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiversityReport {
    pub original: ErrorDistribution,
    pub reliable_only: ErrorDistribution,
    pub entropy_original: f64,
    pub entropy_reliable: f64,
    pub other_share_original: f64,
    pub other_share_reliable: f64,
    /// `None` when the reliable subset has no edits.
    pub shift_jsd: Option<f64>,
}

impl Report for DiversityReport {
    const KIND: &'static str = "diversity";
}

/// Builds a diversity report from the two distributions.
pub fn diversity_from(original: ErrorDistribution, reliable_only: ErrorDistribution) -> Result<DiversityReport> {
    if original.is_empty() {
        return Err(Error::Empty("dataset has no edits".into()));
    }
    let shift_jsd = if reliable_only.is_empty() {
        None
    } else {
        Some(jsd(&original, &reliable_only)?)
    };
    Ok(DiversityReport {
        entropy_original: shannon_entropy(&original),
        entropy_reliable: shannon_entropy(&reliable_only),
        other_share_original: other_share(&original),
        other_share_reliable: other_share(&reliable_only),
        shift_jsd,
        original,
        reliable_only,
    })
}

pub fn diversity_report(featurizer: &Featurizer, model: &LinearModel, dataset: &Dataset) -> Result<DiversityReport> {
    if dataset.is_empty() {
        return Err(Error::Empty("dataset has no pairs".into()));
    }
    let analyzer = featurizer.analyzer();
    let (reliable, _) = partition(model, featurizer, dataset)?;
    diversity_from(analyzer.distribution_of(dataset), analyzer.distribution_of(&reliable))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionMatchReport {
    pub jsd: f64,
    /// a minus b, in percentage points, keyed by type label.
    pub per_type_delta: BTreeMap<String, f64>,
    pub dataset_a: String,
    pub dataset_b: String,
}

impl Report for DistributionMatchReport {
    const KIND: &'static str = "distribution_match";
}

impl DistributionMatchReport {
    pub fn delta(&self, t: ErrorType) -> f64 {
        self.per_type_delta[t.as_str()]
    }
}

pub fn match_distributions(
    a: &ErrorDistribution,
    b: &ErrorDistribution,
    label_a: &str,
    label_b: &str,
) -> Result<DistributionMatchReport> {
    let jsd = jsd(a, b)?;
    let per_type_delta = ErrorType::ALL
        .iter()
        .map(|&t| (t.as_str().to_string(), a.get(t) - b.get(t)))
        .collect();
    Ok(DistributionMatchReport {
        jsd,
        per_type_delta,
        dataset_a: label_a.to_string(),
        dataset_b: label_b.to_string(),
    })
}

pub fn distribution_match(analyzer: &Analyzer, a: &Dataset, b: &Dataset) -> Result<DistributionMatchReport> {
    let (da, db) = rayon::join(|| analyzer.distribution_of(a), || analyzer.distribution_of(b));
    for (d, name) in [(&da, &a.provenance), (&db, &b.provenance)] {
        if d.total_edits == 0 {
            return Err(Error::Empty(format!("dataset '{name}' has no edits")));
        }
    }
    match_distributions(&da, &db, &a.provenance, &b.provenance)
}

/// Counts plus precision, recall and F-beta, all in percent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScorerResult {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub precision: f64,
    pub recall: f64,
    pub f05: f64,
}

impl Report for ScorerResult {
    const KIND: &'static str = "scorer";
}

/// F-beta from precision and recall in any common unit; 0 when undefined.
pub fn fbeta_from_pr(precision: f64, recall: f64, beta: f64) -> f64 {
    let b2 = beta * beta;
    let denom = b2 * precision + recall;
    if denom == 0.0 {
        0.0
    } else {
        (1.0 + b2) * precision * recall / denom
    }
}

/// Scores counts with the given beta; the `f05` field carries F-beta.
pub fn f_beta(tp: u64, fp: u64, fn_: u64, beta: f64) -> ScorerResult {
    let ratio = |num: u64, den: u64| if den == 0 { 0.0 } else { 100.0 * num as f64 / den as f64 };
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fn_);
    ScorerResult {
        tp,
        fp,
        fn_,
        precision,
        recall,
        f05: fbeta_from_pr(precision, recall, beta),
    }
}

/// A span rewrite on source token positions.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Rewrite {
    start: usize,
    end: usize,
    tokens: Vec<String>,
}

fn rewrite_region(source: &[String], lo: usize, hi: usize, edits: &[&Rewrite]) -> Vec<String> {
    let mut out: Vec<String> = source[lo..hi].to_vec();
    for e in edits.iter().rev() {
        out.splice(e.start - lo..e.end - lo, e.tokens.iter().cloned());
    }
    out
}

/// (tp, fp, fn) for one sentence.
///
/// Edits whose spans touch are grouped; a group counts as fully correct when
/// hypothesis and gold rewrite its region identically, which credits one
/// merged hypothesis edit covering several adjacent gold edits and the
/// reverse. Otherwise edits in the group match only on exact span and
/// correction.
fn score_sentence(source: &[String], hyp: &[Rewrite], gold: &[Rewrite]) -> (u64, u64, u64) {
    #[derive(Clone, Copy)]
    enum Side {
        Hyp(usize),
        Gold(usize),
    }
    let mut items: Vec<(usize, usize, Side)> = hyp
        .iter()
        .enumerate()
        .map(|(i, e)| (e.start, e.end, Side::Hyp(i)))
        .chain(gold.iter().enumerate().map(|(i, e)| (e.start, e.end, Side::Gold(i))))
        .collect();
    items.sort_by_key(|&(s, e, _)| (s, e));

    let (mut tp, mut fp, mut fn_) = (0, 0, 0);
    let mut i = 0;
    while i < items.len() {
        let (lo, mut hi) = (items[i].0, items[i].1);
        let mut j = i + 1;
        while j < items.len() && items[j].0 <= hi {
            hi = hi.max(items[j].1);
            j += 1;
        }
        let mut h: Vec<&Rewrite> = Vec::new();
        let mut g: Vec<&Rewrite> = Vec::new();
        for &(_, _, side) in &items[i..j] {
            match side {
                Side::Hyp(k) => h.push(&hyp[k]),
                Side::Gold(k) => g.push(&gold[k]),
            }
        }
        if !h.is_empty() && !g.is_empty() && rewrite_region(source, lo, hi, &h) == rewrite_region(source, lo, hi, &g) {
            tp += g.len() as u64;
        } else {
            let matched = h.iter().filter(|x| g.contains(x)).count() as u64;
            tp += matched;
            fp += h.len() as u64 - matched;
            fn_ += g.len() as u64 - matched;
        }
        i = j;
    }
    (tp, fp, fn_)
}

fn hypothesis_rewrites(aligner: &Aligner, source: &[String], target: &[String]) -> Vec<Rewrite> {
    aligner
        .align(source, target)
        .edits
        .into_iter()
        .map(|e: Edit| Rewrite {
            start: e.src_start,
            end: e.src_end,
            tokens: e.tgt_tokens,
        })
        .collect()
}

/// Edit-level F0.5 of hypothesis corrections against one M2 annotator.
/// Both sides are compared on whitespace tokens.
pub fn edit_level_score(
    aligner: &Aligner,
    hypothesis: &Dataset,
    gold: &[M2Record],
    annotator_id: u32,
) -> Result<ScorerResult> {
    if hypothesis.len() != gold.len() {
        return Err(Error::Mismatch(format!(
            "{} hypothesis pairs but {} gold records",
            hypothesis.len(),
            gold.len()
        )));
    }
    let counts = hypothesis
        .pairs
        .par_iter()
        .zip(gold.par_iter())
        .enumerate()
        .map(|(idx, (pair, record))| -> Result<(u64, u64, u64)> {
            let source: Vec<String> = pair.source.split_whitespace().map(String::from).collect();
            if source != record.source_tokens {
                return Err(Error::Mismatch(format!(
                    "sentence {}: hypothesis source does not match the gold source",
                    idx + 1
                )));
            }
            let target: Vec<String> = pair.target.split_whitespace().map(String::from).collect();
            let hyp = hypothesis_rewrites(aligner, &source, &target);
            let gold: Vec<Rewrite> = record
                .edits_for(annotator_id)
                .into_iter()
                .map(|a| Rewrite {
                    start: a.start as usize,
                    end: a.end as usize,
                    tokens: a.correction.split_whitespace().map(String::from).collect(),
                })
                .collect();
            Ok(score_sentence(&source, &hyp, &gold))
        })
        .collect::<Result<Vec<_>>>()?;
    let (tp, fp, fn_) = counts
        .iter()
        .fold((0, 0, 0), |acc, c| (acc.0 + c.0, acc.1 + c.1, acc.2 + c.2));
    Ok(f_beta(tp, fp, fn_, 0.5))
}
