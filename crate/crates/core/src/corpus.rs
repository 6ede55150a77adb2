//! Parallel corpora on disk: TSV for synthetic pairs, M2 for annotated ones.

use std::fmt;
use std::io::{BufRead, BufReader, Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An erroneous source sentence and its correction.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SentencePair {
    pub source: String,
    pub target: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
}

impl SentencePair {
    pub fn new(source: impl Into<String>, target: impl Into<String>) -> Self {
        SentencePair {
            source: source.into(),
            target: target.into(),
            id: None,
        }
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = Some(id.into());
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, field) in [("source", &self.source), ("target", &self.target)] {
            if field.trim_end().is_empty() {
                return Err(Error::Empty(format!("{name} sentence")));
            }
            if field.contains(['\t', '\n', '\r']) {
                return Err(Error::Empty(format!("{name} contains a tab or line break")));
            }
        }
        if let Some(id) = &self.id {
            if id.contains(['\t', '\n', '\r']) {
                return Err(Error::Empty("id contains a tab or line break".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dataset {
    pub pairs: Vec<SentencePair>,
    pub provenance: String,
}

impl Dataset {
    pub fn from_pairs(pairs: Vec<SentencePair>, provenance: impl Into<String>) -> Self {
        Dataset {
            pairs,
            provenance: provenance.into(),
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Strict mode fails on the first malformed record; lenient mode collects
/// the errors and keeps going.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum ParseMode {
    #[default]
    Strict,
    Lenient,
}

/// Parse output plus the records skipped in lenient mode.
#[derive(Debug)]
pub struct Parsed<T> {
    pub value: T,
    pub skipped: Vec<Error>,
}

/// Yields `(line_number, line)` while tracking byte offsets for UTF-8 errors.
fn for_each_line(stream: impl Read, mut f: impl FnMut(usize, std::result::Result<&str, Error>) -> Result<()>) -> Result<()> {
    let mut reader = BufReader::new(stream);
    let mut buf = Vec::new();
    let mut offset = 0usize;
    let mut line_no = 0usize;
    loop {
        buf.clear();
        let n = reader.read_until(b'\n', &mut buf)?;
        if n == 0 {
            return Ok(());
        }
        line_no += 1;
        let mut line = &buf[..];
        if line.ends_with(b"\n") {
            line = &line[..line.len() - 1];
        }
        if line.ends_with(b"\r") {
            line = &line[..line.len() - 1];
        }
        let decoded = std::str::from_utf8(line).map_err(|e| Error::Utf8 {
            offset: offset + e.valid_up_to(),
        });
        f(line_no, decoded)?;
        offset += n;
    }
}

fn parse_tsv_line(line_no: usize, line: &str) -> Result<SentencePair> {
    let cols: Vec<&str> = line.split('\t').collect();
    if cols.len() < 2 {
        return Err(Error::parse(line_no, "expected 2 columns"));
    }
    if cols.len() > 3 {
        return Err(Error::parse(line_no, format!("expected at most 3 columns, found {}", cols.len())));
    }
    let source = cols[0].trim_end();
    let target = cols[1].trim_end();
    if source.is_empty() || target.is_empty() {
        return Err(Error::parse(line_no, "empty source or target"));
    }
    let mut pair = SentencePair::new(source, target);
    if let Some(id) = cols.get(2).map(|s| s.trim()).filter(|s| !s.is_empty()) {
        pair.id = Some(id.to_string());
    }
    Ok(pair)
}

/// Reads `source TAB target [TAB id]` records in file order.
pub fn parse_tsv(stream: impl Read) -> Result<Dataset> {
    Ok(parse_tsv_with(stream, ParseMode::Strict)?.value)
}

pub fn parse_tsv_with(stream: impl Read, mode: ParseMode) -> Result<Parsed<Dataset>> {
    let mut pairs = Vec::new();
    let mut skipped = Vec::new();
    for_each_line(stream, |line_no, line| {
        let parsed = line.and_then(|l| {
            if l.trim().is_empty() {
                Ok(None)
            } else {
                parse_tsv_line(line_no, l).map(Some)
            }
        });
        match (parsed, mode) {
            (Ok(Some(p)), _) => pairs.push(p),
            (Ok(None), _) => {}
            (Err(e), ParseMode::Lenient) => skipped.push(e),
            (Err(e), ParseMode::Strict) => return Err(e),
        }
        Ok(())
    })?;
    Ok(Parsed {
        value: Dataset::from_pairs(pairs, ""),
        skipped,
    })
}

pub fn write_tsv(dataset: &Dataset, mut out: impl Write) -> Result<()> {
    for pair in &dataset.pairs {
        pair.validate()?;
        match &pair.id {
            Some(id) => writeln!(out, "{}\t{}\t{}", pair.source, pair.target, id)?,
            None => writeln!(out, "{}\t{}", pair.source, pair.target)?,
        }
    }
    out.flush()?;
    Ok(())
}

/// Plain sentences, one per line; blank lines skipped.
pub fn read_sentences(stream: impl Read) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for_each_line(stream, |_, line| {
        let line = line?.trim();
        if !line.is_empty() {
            out.push(line.to_string());
        }
        Ok(())
    })?;
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct M2Annotation {
    /// Token span; `(-1, -1)` marks a noop annotation.
    pub start: i64,
    pub end: i64,
    pub type_label: String,
    /// Space-separated correction tokens; empty for deletions.
    pub correction: String,
    pub annotator_id: u32,
}

impl M2Annotation {
    pub fn is_noop(&self) -> bool {
        self.start == -1 && self.end == -1
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct M2Record {
    pub source_tokens: Vec<String>,
    pub annotations: Vec<M2Annotation>,
}

impl M2Record {
    pub fn source_text(&self) -> String {
        self.source_tokens.join(" ")
    }

    /// Non-noop annotations of one annotator, in file order.
    pub fn edits_for(&self, annotator_id: u32) -> Vec<&M2Annotation> {
        self.annotations
            .iter()
            .filter(|a| a.annotator_id == annotator_id && !a.is_noop())
            .collect()
    }

    pub fn annotators(&self) -> Vec<u32> {
        let mut ids: Vec<u32> = self.annotations.iter().map(|a| a.annotator_id).collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }
}

fn parse_annotation(line_no: usize, body: &str, n_tokens: usize) -> Result<M2Annotation> {
    let fields: Vec<&str> = body.split("|||").collect();
    if fields.len() < 3 {
        return Err(Error::parse(line_no, "annotation needs at least span|||type|||correction"));
    }
    let mut span = fields[0].split_whitespace();
    let mut int = |what: &str| -> Result<i64> {
        let raw = span
            .next()
            .ok_or_else(|| Error::parse(line_no, format!("missing {what} index")))?;
        raw.parse::<i64>()
            .map_err(|_| Error::parse(line_no, format!("non-integer {what} index '{raw}'")))
    };
    let start = int("start")?;
    let end = int("end")?;
    let noop = start == -1 && end == -1;
    if !noop {
        if start < 0 || end < start {
            return Err(Error::parse(line_no, format!("invalid span {start} {end}")));
        }
        if end as usize > n_tokens {
            return Err(Error::parse(line_no, format!("span {start} {end} exceeds {n_tokens} tokens")));
        }
    }
    let correction = fields[2].trim();
    let correction = if correction == "-NONE-" { "" } else { correction };
    let annotator_id = if fields.len() >= 4 {
        let raw = fields[fields.len() - 1].trim();
        raw.parse::<i64>()
            .ok()
            .filter(|&v| (0..=u32::MAX as i64).contains(&v))
            .ok_or_else(|| Error::parse(line_no, format!("invalid annotator id '{raw}'")))? as u32
    } else {
        0
    };
    Ok(M2Annotation {
        start,
        end,
        type_label: fields[1].trim().to_string(),
        correction: correction.to_string(),
        annotator_id,
    })
}

/// Reads blank-line separated `S`/`A` blocks.
pub fn parse_m2(stream: impl Read) -> Result<Vec<M2Record>> {
    Ok(parse_m2_with(stream, ParseMode::Strict)?.value)
}

pub fn parse_m2_with(stream: impl Read, mode: ParseMode) -> Result<Parsed<Vec<M2Record>>> {
    let mut records: Vec<M2Record> = Vec::new();
    let mut current: Option<M2Record> = None;
    // in lenient mode a broken S-line poisons its block until the next blank line
    let mut skipping = false;
    let mut skipped = Vec::new();
    for_each_line(stream, |line_no, line| {
        let result = (|| -> Result<()> {
            let line = line?;
            if line.trim().is_empty() {
                records.extend(current.take());
                skipping = false;
                return Ok(());
            }
            if skipping {
                return Ok(());
            }
            if let Some(rest) = line.strip_prefix("S ").or_else(|| (line == "S").then_some("")) {
                records.extend(current.take());
                current = Some(M2Record {
                    source_tokens: rest.split_whitespace().map(String::from).collect(),
                    annotations: Vec::new(),
                });
                Ok(())
            } else if let Some(rest) = line.strip_prefix("A ") {
                let record = current
                    .as_mut()
                    .ok_or_else(|| Error::parse(line_no, "annotation before sentence"))?;
                let ann = parse_annotation(line_no, rest, record.source_tokens.len())?;
                record.annotations.push(ann);
                Ok(())
            } else {
                Err(Error::parse(line_no, "expected an 'S' or 'A' line"))
            }
        })();
        match (result, mode) {
            (Ok(()), _) => Ok(()),
            (Err(e), ParseMode::Strict) => Err(e),
            (Err(e), ParseMode::Lenient) => {
                skipped.push(e);
                Ok(())
            }
        }
    })?;
    records.extend(current.take());
    Ok(Parsed {
        value: records,
        skipped,
    })
}

pub fn write_m2(records: &[M2Record], mut out: impl Write) -> Result<()> {
    for r in records {
        writeln!(out, "S {}", r.source_tokens.join(" "))?;
        for a in &r.annotations {
            let correction = if a.correction.is_empty() || a.is_noop() {
                "-NONE-"
            } else {
                a.correction.as_str()
            };
            writeln!(
                out,
                "A {} {}|||{}|||{}|||REQUIRED|||-NONE-|||{}",
                a.start, a.end, a.type_label, correction, a.annotator_id
            )?;
        }
        writeln!(out)?;
    }
    out.flush()?;
    Ok(())
}

/// Applies one annotator's corrections, right to left by span.
pub fn apply_m2(record: &M2Record, annotator_id: u32) -> Result<SentencePair> {
    let mut edits = record.edits_for(annotator_id);
    let has_real = record.annotations.iter().any(|a| !a.is_noop());
    if edits.is_empty() && has_real && !record.annotators().contains(&annotator_id) {
        return Err(Error::M2(format!("annotator {annotator_id} not present in record")));
    }
    edits.sort_by_key(|a| (a.start, a.end));
    for w in edits.windows(2) {
        let (a, b) = (w[0], w[1]);
        let clash = b.start < a.end || (a.start == a.end && b.start == b.end && a.start == b.start);
        if clash {
            return Err(Error::M2(format!(
                "overlapping spans ({}, {}) and ({}, {})",
                a.start, a.end, b.start, b.end
            )));
        }
    }
    let mut tokens = record.source_tokens.clone();
    for a in edits.iter().rev() {
        let (s, e) = (a.start as usize, a.end as usize);
        if e > tokens.len() || s > e {
            return Err(Error::M2(format!("span ({s}, {e}) out of range")));
        }
        tokens.splice(s..e, a.correction.split_whitespace().map(String::from));
    }
    Ok(SentencePair::new(record.source_text(), tokens.join(" ")))
}

/// Converts M2 records to a dataset via one annotator, skipping empty sentences.
pub fn m2_to_dataset(records: &[M2Record], annotator_id: u32, provenance: &str) -> Result<Dataset> {
    let mut pairs = Vec::with_capacity(records.len());
    for r in records {
        if r.source_tokens.is_empty() {
            continue;
        }
        let pair = apply_m2(r, annotator_id)?;
        if pair.target.is_empty() {
            continue;
        }
        pairs.push(pair);
    }
    Ok(Dataset::from_pairs(pairs, provenance))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Reliable,
    Unreliable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    Human,
    PlausibleRule,
    ImplausibleRule,
}

macro_rules! str_enum {
    ($ty:ident { $($variant:ident => $s:literal),+ }) => {
        impl $ty {
            pub fn as_str(self) -> &'static str {
                match self { $($ty::$variant => $s),+ }
            }
        }
        impl FromStr for $ty {
            type Err = String;
            fn from_str(s: &str) -> std::result::Result<Self, String> {
                match s {
                    $($s => Ok($ty::$variant),)+
                    other => Err(format!("unknown {} '{}'", stringify!($ty), other)),
                }
            }
        }
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }
    };
}

str_enum!(Label { Reliable => "reliable", Unreliable => "unreliable" });
str_enum!(Origin { Human => "human", PlausibleRule => "plausible_rule", ImplausibleRule => "implausible_rule" });

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledPair {
    pub pair: SentencePair,
    pub label: Label,
    pub origin: Origin,
}

/// Labeled corpora use four columns: `source TAB target TAB label TAB origin`.
pub fn write_labeled_tsv(pairs: &[LabeledPair], mut out: impl Write) -> Result<()> {
    for lp in pairs {
        lp.pair.validate()?;
        writeln!(out, "{}\t{}\t{}\t{}", lp.pair.source, lp.pair.target, lp.label, lp.origin)?;
    }
    out.flush()?;
    Ok(())
}

pub fn parse_labeled_tsv(stream: impl Read) -> Result<Vec<LabeledPair>> {
    let mut out = Vec::new();
    for_each_line(stream, |line_no, line| {
        let line = line?;
        if line.trim().is_empty() {
            return Ok(());
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 4 {
            return Err(Error::parse(line_no, "expected 4 columns: source, target, label, origin"));
        }
        let label = cols[2].trim().parse().map_err(|e: String| Error::parse(line_no, e))?;
        let origin = cols[3].trim().parse().map_err(|e: String| Error::parse(line_no, e))?;
        let pair = SentencePair::new(cols[0].trim_end(), cols[1].trim_end());
        if pair.source.is_empty() || pair.target.is_empty() {
            return Err(Error::parse(line_no, "empty source or target"));
        }
        out.push(LabeledPair { pair, label, origin });
        Ok(())
    })?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tsv_identity_pair() {
        let ds = parse_tsv("a b\ta b\n".as_bytes()).unwrap();
        assert_eq!(ds.len(), 1);
        assert_eq!(ds.pairs[0].source, ds.pairs[0].target);
    }

    #[test]
    fn tsv_missing_column() {
        let err = parse_tsv("x\n".as_bytes()).unwrap_err();
        assert_eq!(err.to_string(), "line 1: expected 2 columns");
    }

    #[test]
    fn tsv_order_blank_lines_and_ids() {
        let ds = parse_tsv("a\tA\n\n  \nb\tB\tid-7\r\n".as_bytes()).unwrap();
        assert_eq!(ds.pairs[0].source, "a");
        assert_eq!(ds.pairs[1].target, "B");
        assert_eq!(ds.pairs[1].id.as_deref(), Some("id-7"));
        let err = parse_tsv("a\tb\nc\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn tsv_invalid_utf8_offset() {
        let bytes = b"ab\tcd\nx\xff\ty\n";
        assert!(matches!(parse_tsv(&bytes[..]), Err(Error::Utf8 { offset: 7 })));
    }

    #[test]
    fn tsv_lenient_collects() {
        let parsed = parse_tsv_with("a\tb\nbad\nc\td\n".as_bytes(), ParseMode::Lenient).unwrap();
        assert_eq!(parsed.value.len(), 2);
        assert_eq!(parsed.skipped.len(), 1);
    }

    #[test]
    fn tsv_write_rejects_tabs() {
        let ds = Dataset::from_pairs(vec![SentencePair::new("a\tb", "c")], "");
        assert!(write_tsv(&ds, Vec::new()).is_err());
    }

    #[test]
    fn m2_single_annotation() {
        let recs = parse_m2("S a b c\nA 1 2|||SPELL|||x|||REQUIRED|||-NONE-|||0\n\n".as_bytes()).unwrap();
        assert_eq!(recs.len(), 1);
        let a = &recs[0].annotations[0];
        assert_eq!((a.start, a.end, a.type_label.as_str(), a.correction.as_str(), a.annotator_id), (1, 2, "SPELL", "x", 0));
    }

    #[test]
    fn m2_no_edit_block() {
        let recs = parse_m2("S a b\n\n".as_bytes()).unwrap();
        assert_eq!(recs.len(), 1);
        assert!(recs[0].annotations.is_empty());
    }

    #[test]
    fn m2_errors() {
        let err = parse_m2("A 0 1|||X|||y|||...|||0\n".as_bytes()).unwrap_err();
        assert!(err.to_string().contains("annotation before sentence"), "{err}");
        let err = parse_m2("S a b\nA x 1|||X|||y|||0\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        assert!(parse_m2("S a b\nA 2 1|||X|||y|||0\n".as_bytes()).is_err());
        assert!(parse_m2("S a b\nA 1 5|||X|||y|||0\n".as_bytes()).is_err());
        assert!(parse_m2("S a b\nA 0 1|||X|||y|||-3\n".as_bytes()).is_err());
        let noop = parse_m2("S a b\nA -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||0\n".as_bytes()).unwrap();
        assert!(noop[0].annotations[0].is_noop());
    }

    #[test]
    fn m2_lenient_skips_bad_blocks() {
        let text = "A 0 1|||X|||y|||0\n\nS a b\nA 0 1|||X|||c|||0\n\n";
        let parsed = parse_m2_with(text.as_bytes(), ParseMode::Lenient).unwrap();
        assert_eq!(parsed.value.len(), 1);
        assert_eq!(parsed.skipped.len(), 1);
    }

    fn record(tokens: &str, anns: &[(i64, i64, &str, u32)]) -> M2Record {
        M2Record {
            source_tokens: tokens.split_whitespace().map(String::from).collect(),
            annotations: anns
                .iter()
                .map(|&(start, end, c, annotator_id)| M2Annotation {
                    start,
                    end,
                    type_label: "X".into(),
                    correction: c.into(),
                    annotator_id,
                })
                .collect(),
        }
    }

    #[test]
    fn apply_substitution_and_noop() {
        let p = apply_m2(&record("I goes", &[(1, 2, "go", 0)]), 0).unwrap();
        assert_eq!((p.source.as_str(), p.target.as_str()), ("I goes", "I go"));
        let p = apply_m2(&record("a b", &[(-1, -1, "", 0)]), 0).unwrap();
        assert_eq!(p.source, p.target);
        let p = apply_m2(&record("a b", &[]), 3).unwrap();
        assert_eq!(p.target, "a b");
    }

    #[test]
    fn apply_selects_annotator() {
        let r = record("a b c", &[(0, 1, "x", 0), (0, 1, "y", 1), (2, 3, "", 1)]);
        assert_eq!(apply_m2(&r, 0).unwrap().target, "x b c");
        assert_eq!(apply_m2(&r, 1).unwrap().target, "y b");
        assert!(apply_m2(&r, 2).is_err());
    }

    #[test]
    fn apply_rejects_overlap() {
        let err = apply_m2(&record("a b c", &[(0, 2, "x", 0), (1, 3, "y", 0)]), 0).unwrap_err();
        assert!(err.to_string().contains("(0, 2) and (1, 3)"), "{err}");
        assert!(apply_m2(&record("a b", &[(1, 1, "x", 0), (1, 1, "y", 0)]), 0).is_err());
        // adjacent spans and an insertion at a boundary are fine
        assert!(apply_m2(&record("a b c", &[(0, 1, "x", 0), (1, 1, "y", 0), (1, 2, "z", 0)]), 0).is_ok());
    }

    #[test]
    fn labeled_roundtrip() {
        let pairs = vec![LabeledPair {
            pair: SentencePair::new("a b", "a c"),
            label: Label::Unreliable,
            origin: Origin::ImplausibleRule,
        }];
        let mut buf = Vec::new();
        write_labeled_tsv(&pairs, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "a b\ta c\tunreliable\timplausible_rule\n");
        assert_eq!(parse_labeled_tsv(&buf[..]).unwrap(), pairs);
        assert!(parse_labeled_tsv("a\tb\tmaybe\thuman\n".as_bytes()).is_err());
    }
}
