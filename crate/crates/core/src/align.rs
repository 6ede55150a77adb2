//! Token alignment and edit extraction.
//!
//! A weighted Levenshtein alignment whose substitution costs are discounted
//! for linguistically related tokens, followed by merging of adjacent
//! non-match columns into contiguous edits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::{fold_case, VerbLexicon};

const EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlignCosts {
    /// Substitution cost between forms of one verb group, or tokens differing only in case.
    pub verb_group: f64,
    /// Substitution cost between orthographically close tokens.
    pub orthographic: f64,
    /// Normalized character distance below which `orthographic` applies.
    pub orthographic_threshold: f64,
}

impl Default for AlignCosts {
    fn default() -> Self {
        AlignCosts {
            verb_group: 0.6,
            orthographic: 0.8,
            orthographic_threshold: 0.5,
        }
    }
}

impl AlignCosts {
    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x.is_finite() && (0.0..=1.0).contains(&x);
        if ok(self.verb_group) && ok(self.orthographic) && ok(self.orthographic_threshold) {
            Ok(())
        } else {
            Err(Error::Config(format!("alignment costs must lie in [0, 1]: {self:?}")))
        }
    }
}

/// A contiguous source-span to target-span rewrite. Spans are half-open.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edit {
    pub src_start: usize,
    pub src_end: usize,
    pub tgt_start: usize,
    pub tgt_end: usize,
    pub src_tokens: Vec<String>,
    pub tgt_tokens: Vec<String>,
}

impl Edit {
    pub fn is_insertion(&self) -> bool {
        self.src_start == self.src_end
    }

    pub fn is_deletion(&self) -> bool {
        self.tgt_start == self.tgt_end
    }

    pub fn src_width(&self) -> usize {
        self.src_end - self.src_start
    }

    pub fn tgt_width(&self) -> usize {
        self.tgt_end - self.tgt_start
    }

    /// The target side as a space-joined string (empty for deletions).
    pub fn correction(&self) -> String {
        self.tgt_tokens.join(" ")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EditScript {
    pub edits: Vec<Edit>,
    pub source_len: usize,
    pub target_len: usize,
    /// Total alignment cost.
    pub cost: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EditStats {
    pub n_edits: usize,
    pub edited_token_fraction: f64,
}

/// Levenshtein distance over Unicode scalar values.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    levenshtein_chars(&a, &b)
}

fn levenshtein_chars(a: &[char], b: &[char]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Levenshtein distance divided by the longer length; 0 for two empty strings.
pub fn normalized_char_distance(a: &str, b: &str) -> f64 {
    let longest = a.chars().count().max(b.chars().count());
    if longest == 0 {
        0.0
    } else {
        levenshtein(a, b) as f64 / longest as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
/// One step of an alignment path.
pub enum Column {
    Match,
    Sub,
    Del,
    Ins,
}

struct Folded {
    lower: String,
    chars: Vec<char>,
    group: Option<usize>,
}

impl Folded {
    fn new(token: &str, verbs: &VerbLexicon) -> Self {
        let lower = fold_case(token);
        Folded {
            chars: lower.chars().collect(),
            group: verbs.group_of(&lower),
            lower,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Aligner {
    costs: AlignCosts,
    verbs: VerbLexicon,
}

impl Aligner {
    pub fn new(costs: AlignCosts, verbs: VerbLexicon) -> Self {
        Aligner { costs, verbs }
    }

    pub fn costs(&self) -> &AlignCosts {
        &self.costs
    }

    /// Cost of aligning `a` against `b`; 0 for identical surfaces.
    pub fn substitution_cost(&self, a: &str, b: &str) -> f64 {
        if a == b {
            return 0.0;
        }
        self.folded_cost(&Folded::new(a, &self.verbs), &Folded::new(b, &self.verbs))
    }

    fn folded_cost(&self, a: &Folded, b: &Folded) -> f64 {
        if a.lower == b.lower || matches!((a.group, b.group), (Some(x), Some(y)) if x == y) {
            return self.costs.verb_group;
        }
        let longest = a.chars.len().max(b.chars.len());
        if longest == 0 {
            return self.costs.orthographic;
        }
        // the length gap is a lower bound on the edit distance
        let threshold = self.costs.orthographic_threshold;
        if a.chars.len().abs_diff(b.chars.len()) as f64 / longest as f64 >= threshold {
            return 1.0;
        }
        if (levenshtein_chars(&a.chars, &b.chars) as f64 / longest as f64) < threshold {
            self.costs.orthographic
        } else {
            1.0
        }
    }

    /// Minimum-cost alignment columns. Each column carries the source and
    /// target prefix lengths after it is consumed; the second value is the total cost.
    ///
    /// Insertions and deletions cost 1. Ties prefer a substitution, then a
    /// deletion, then an insertion.
    pub fn align_columns<S: AsRef<str>>(&self, source: &[S], target: &[S]) -> (Vec<(Column, usize, usize)>, f64) {
        let (n, m) = (source.len(), target.len());
        let width = m + 1;
        let mut cost = vec![0.0f64; (n + 1) * width];
        let mut back = vec![Column::Match; (n + 1) * width];
        for i in 1..=n {
            cost[i * width] = i as f64;
            back[i * width] = Column::Del;
        }
        for j in 1..=m {
            cost[j] = j as f64;
            back[j] = Column::Ins;
        }
        let fs: Vec<Folded> = source.iter().map(|t| Folded::new(t.as_ref(), &self.verbs)).collect();
        let ft: Vec<Folded> = target.iter().map(|t| Folded::new(t.as_ref(), &self.verbs)).collect();
        for i in 1..=n {
            let s = source[i - 1].as_ref();
            for j in 1..=m {
                let t = target[j - 1].as_ref();
                let sub = if s == t { 0.0 } else { self.folded_cost(&fs[i - 1], &ft[j - 1]) };
                let diag = cost[(i - 1) * width + j - 1] + sub;
                let del = cost[(i - 1) * width + j] + 1.0;
                let ins = cost[i * width + j - 1] + 1.0;
                let (best, col) = if diag <= del + EPS && diag <= ins + EPS {
                    (diag, if s == t { Column::Match } else { Column::Sub })
                } else if del <= ins + EPS {
                    (del, Column::Del)
                } else {
                    (ins, Column::Ins)
                };
                cost[i * width + j] = best;
                back[i * width + j] = col;
            }
        }

        let mut columns = Vec::with_capacity(n + m);
        let (mut i, mut j) = (n, m);
        while i > 0 || j > 0 {
            let col = back[i * width + j];
            columns.push((col, i, j));
            match col {
                Column::Match | Column::Sub => {
                    i -= 1;
                    j -= 1;
                }
                Column::Del => i -= 1,
                Column::Ins => j -= 1,
            }
        }
        columns.reverse();
        (columns, cost[n * width + m])
    }

    /// Minimum-cost alignment of `source` against `target`, with maximal
    /// runs of non-match columns merged into edits.
    pub fn align<S: AsRef<str>>(&self, source: &[S], target: &[S]) -> EditScript {
        let (n, m) = (source.len(), target.len());
        let (columns, total) = self.align_columns(source, target);

        let mut edits = Vec::new();
        let mut open: Option<(usize, usize)> = None;
        let mut pos = (0, 0);
        let close = |open: &mut Option<(usize, usize)>, end: (usize, usize), edits: &mut Vec<Edit>| {
            if let Some((ss, ts)) = open.take() {
                edits.push(Edit {
                    src_start: ss,
                    src_end: end.0,
                    tgt_start: ts,
                    tgt_end: end.1,
                    src_tokens: source[ss..end.0].iter().map(|s| s.as_ref().to_string()).collect(),
                    tgt_tokens: target[ts..end.1].iter().map(|s| s.as_ref().to_string()).collect(),
                });
            }
        };
        for (col, ci, cj) in columns {
            if col == Column::Match {
                close(&mut open, pos, &mut edits);
            } else if open.is_none() {
                open = Some(pos);
            }
            // column endpoints are (ci, cj) after consuming it
            pos = (ci, cj);
        }
        close(&mut open, pos, &mut edits);

        EditScript {
            edits,
            source_len: n,
            target_len: m,
            cost: total,
        }
    }
}

/// Applies `script` to `source`, right to left, returning the target tokens.
pub fn apply<S: AsRef<str>>(script: &EditScript, source: &[S]) -> Result<Vec<String>> {
    if script.source_len != source.len() {
        return Err(Error::Script(format!(
            "script expects {} source tokens, got {}",
            script.source_len,
            source.len()
        )));
    }
    let mut out: Vec<String> = source.iter().map(|s| s.as_ref().to_string()).collect();
    let mut limit = source.len();
    for edit in script.edits.iter().rev() {
        if edit.src_start > edit.src_end || edit.src_end > limit {
            return Err(Error::Script(format!(
                "edit span {}..{} out of order or out of range",
                edit.src_start, edit.src_end
            )));
        }
        if out[edit.src_start..edit.src_end] != edit.src_tokens[..] {
            return Err(Error::Script(format!(
                "edit span {}..{} does not match the source tokens",
                edit.src_start, edit.src_end
            )));
        }
        out.splice(edit.src_start..edit.src_end, edit.tgt_tokens.iter().cloned());
        limit = edit.src_start;
    }
    Ok(out)
}

pub fn edit_count_stats(script: &EditScript) -> EditStats {
    let covered: usize = script.edits.iter().map(Edit::src_width).sum();
    EditStats {
        n_edits: script.edits.len(),
        edited_token_fraction: covered as f64 / script.source_len.max(1) as f64,
    }
}
