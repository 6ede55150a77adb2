//! The `gec-dataq` command line.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::align::Aligner;
use crate::classifier::{
    evaluate, featurize_labeled, partition, score_dataset, train_features, train_test_split, Featurizer, LinearModel,
    DIM, FEATURE_SCHEMA_VERSION,
};
use crate::config::ToolConfig;
use crate::corpus::{
    m2_to_dataset, parse_labeled_tsv, parse_m2_with, parse_tsv_with, read_sentences, write_labeled_tsv, write_m2,
    write_tsv, Dataset, M2Annotation, M2Record, ParseMode,
};
use crate::corrupt::{build_classifier_corpus, corrupt_corpus, CorruptionRuleSet, Mode, Outcome};
use crate::error::{Error, Result};
use crate::metrics::{distribution_match, diversity_report, edit_level_score};
use crate::report::{created_utc, write_report, Report};
use crate::resources::{sha256_hex, Resources};
use crate::typing::Analyzer;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

pub const LONG_VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), " (feature schema fs1, typer rules tr1)");

#[derive(Debug, Parser)]
#[command(name = "gec-dataq", version = LONG_VERSION, about = "Quality metrics for synthetic GEC corpora")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalOpts {
    /// Config file; defaults to $GEC_DATAQ_CONFIG when set.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for every random choice.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Primary output path instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Skip malformed records instead of failing.
    #[arg(long, global = true)]
    lenient: bool,
    /// Annotator used when reading M2 input.
    #[arg(long, global = true, default_value_t = 0)]
    annotator: u32,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum EditFormat {
    M2,
    Jsonl,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Plausible,
    Implausible,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Align pairs and write typed edits.
    ExtractEdits {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = EditFormat::M2)]
        format: EditFormat,
    },
    /// Error-type distribution of a corpus.
    TypeDist {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Corrupt clean sentences into a TSV corpus.
    Corrupt {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        max_errors: Option<usize>,
        /// Keep sentences no rule fired on, as identity pairs.
        #[arg(long)]
        keep_unchanged: bool,
    },
    /// Assemble the 1:1 reliable/unreliable training corpus.
    BuildTrainSet {
        #[arg(long)]
        positives: PathBuf,
        #[arg(long)]
        clean: PathBuf,
    },
    /// Train the reliability classifier.
    Train {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        model_out: PathBuf,
        /// Fraction of the corpus held out for accuracy.
        #[arg(long)]
        holdout: Option<f64>,
        #[arg(long)]
        epochs: Option<usize>,
        #[arg(long)]
        learning_rate: Option<f64>,
        #[arg(long)]
        l2: Option<f64>,
    },
    /// Fraction of a corpus the classifier judges reliable.
    ScoreReliability {
        #[arg(long)]
        model: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Split a corpus by predicted label.
    Partition {
        #[arg(long)]
        model: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        reliable_out: PathBuf,
        #[arg(long)]
        unreliable_out: PathBuf,
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Error-type distribution before and after reliability filtering.
    Diversity {
        #[arg(long)]
        model: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Compare the error-type distributions of two corpora.
    DistMatch {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Edit-level F0.5 of system output against M2 gold.
    ScoreGec {
        #[arg(long)]
        hyp: PathBuf,
        #[arg(long)]
        gold: PathBuf,
    },
}

/// Parses `argv` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_DATA
        }
    }
}

struct Ctx {
    config: ToolConfig,
    resources: Resources,
    global: GlobalOpts,
    created: String,
}

impl Ctx {
    fn analyzer(&self) -> Analyzer {
        self.resources.analyzer_with(self.config.align)
    }

    fn featurizer(&self) -> Featurizer {
        Featurizer::new(self.analyzer())
    }

    fn mode(&self) -> ParseMode {
        if self.global.lenient {
            ParseMode::Lenient
        } else {
            ParseMode::Strict
        }
    }

    fn output(&self) -> Result<Box<dyn Write>> {
        open_output(self.global.out.as_deref())
    }

    fn report<R: Report>(&self, report: &R) -> Result<()> {
        write_report(report, &self.created, self.output()?)
    }

    /// Reads a TSV corpus, or an M2 file when the name ends in `.m2`.
    fn dataset(&self, path: &Path) -> Result<Dataset> {
        let provenance = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let file = open_input(path)?;
        let mut ds = if path.extension().is_some_and(|e| e == "m2") {
            let parsed = parse_m2_with(file, self.mode())?;
            report_skipped(path, &parsed.skipped);
            m2_to_dataset(&parsed.value, self.global.annotator, &provenance)?
        } else {
            let parsed = parse_tsv_with(file, self.mode())?;
            report_skipped(path, &parsed.skipped);
            parsed.value
        };
        ds.provenance = provenance;
        Ok(ds)
    }

    fn model(&self, path: &Path, threshold: Option<f64>) -> Result<LinearModel> {
        let model = LinearModel::load(open_input(path)?)?;
        match threshold {
            Some(t) => model.with_threshold(t),
            None => Ok(model),
        }
    }

    fn seed(&self) -> u64 {
        self.global.seed.unwrap_or(self.config.seed)
    }
}

fn report_skipped(path: &Path, skipped: &[Error]) {
    for e in skipped {
        eprintln!("warning: {}: skipped record: {e}", path.display());
    }
}

fn open_input(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::Config(format!("cannot open {}: {e}", path.display())))
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Error::Config(format!("cannot create {}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    })
}

fn write_json(value: &serde_json::Value, mut out: impl Write) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn execute(cli: Cli) -> Result<()> {
    let config = ToolConfig::resolve(cli.global.config.as_deref())?;
    let threads = cli.global.threads.or(config.threads);
    if threads == Some(0) {
        return Err(Error::Config("--threads must be at least 1".into()));
    }
    let resources = config.resources()?;
    let ctx = Ctx {
        config,
        resources,
        global: cli.global,
        created: created_utc()?,
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| dispatch(&ctx, cli.command))
}

fn dispatch(ctx: &Ctx, command: Command) -> Result<()> {
    match command {
        Command::ExtractEdits { input, format } => extract_edits(ctx, &input, format),
        Command::TypeDist { input } => {
            let ds = ctx.dataset(&input)?;
            ctx.report(&ctx.analyzer().distribution_of(&ds))
        }
        Command::Corrupt {
            input,
            mode,
            p,
            max_errors,
            keep_unchanged,
        } => corrupt_cmd(ctx, &input, mode, p, max_errors, keep_unchanged),
        Command::BuildTrainSet { positives, clean } => build_train_set(ctx, &positives, &clean),
        Command::Train {
            input,
            model_out,
            holdout,
            epochs,
            learning_rate,
            l2,
        } => {
            let mut tc = ctx.config.training.clone();
            tc.seed = ctx.seed();
            tc.epochs = epochs.unwrap_or(tc.epochs);
            tc.learning_rate = learning_rate.unwrap_or(tc.learning_rate);
            tc.l2 = l2.unwrap_or(tc.l2);
            train_cmd(ctx, &input, &model_out, holdout, tc)
        }
        Command::ScoreReliability { model, input, threshold } => {
            let model = ctx.model(&model, threshold)?;
            let ds = ctx.dataset(&input)?;
            ctx.report(&score_dataset(&model, &ctx.featurizer(), &ds)?)
        }
        Command::Partition {
            model,
            input,
            reliable_out,
            unreliable_out,
            threshold,
        } => {
            let model = ctx.model(&model, threshold)?;
            let ds = ctx.dataset(&input)?;
            let (rel, unrel) = partition(&model, &ctx.featurizer(), &ds)?;
            write_tsv(&rel, BufWriter::new(File::create(&reliable_out)?))?;
            write_tsv(&unrel, BufWriter::new(File::create(&unreliable_out)?))?;
            write_json(
                &json!({
                    "model_id": model.model_id(),
                    "n_pairs": ds.len(),
                    "n_reliable": rel.len(),
                    "n_unreliable": unrel.len(),
                    "threshold": model.threshold,
                }),
                ctx.output()?,
            )
        }
        Command::Diversity { model, input, threshold } => {
            let model = ctx.model(&model, threshold)?;
            let ds = ctx.dataset(&input)?;
            ctx.report(&diversity_report(&ctx.featurizer(), &model, &ds)?)
        }
        Command::DistMatch { a, b } => {
            let (da, db) = (ctx.dataset(&a)?, ctx.dataset(&b)?);
            ctx.report(&distribution_match(&ctx.analyzer(), &da, &db)?)
        }
        Command::ScoreGec { hyp, gold } => {
            let hyp = ctx.dataset(&hyp)?;
            let parsed = parse_m2_with(open_input(&gold)?, ctx.mode())?;
            report_skipped(&gold, &parsed.skipped);
            let aligner: Aligner = ctx.analyzer().aligner().clone();
            ctx.report(&edit_level_score(&aligner, &hyp, &parsed.value, ctx.global.annotator)?)
        }
    }
}

fn extract_edits(ctx: &Ctx, input: &Path, format: EditFormat) -> Result<()> {
    use rayon::prelude::*;
    let ds = ctx.dataset(input)?;
    let analyzer = ctx.analyzer();
    let analyzed: Vec<_> = ds.pairs.par_iter().map(|p| analyzer.analyze(p)).collect();
    let mut out = ctx.output()?;
    match format {
        EditFormat::M2 => {
            let records: Vec<M2Record> = analyzed
                .iter()
                .map(|a| {
                    let mut annotations: Vec<M2Annotation> = a
                        .typed_edits()
                        .into_iter()
                        .map(|te| M2Annotation {
                            start: te.edit.src_start as i64,
                            end: te.edit.src_end as i64,
                            type_label: te.error_type.as_str().to_string(),
                            correction: te.edit.correction(),
                            annotator_id: 0,
                        })
                        .collect();
                    if annotations.is_empty() {
                        annotations.push(M2Annotation {
                            start: -1,
                            end: -1,
                            type_label: "noop".into(),
                            correction: String::new(),
                            annotator_id: 0,
                        });
                    }
                    M2Record {
                        source_tokens: a.source.iter().map(|t| t.surface.clone()).collect(),
                        annotations,
                    }
                })
                .collect();
            write_m2(&records, &mut out)
        }
        EditFormat::Jsonl => {
            for (i, (pair, a)) in ds.pairs.iter().zip(&analyzed).enumerate() {
                let line = json!({
                    "index": i,
                    "id": pair.id,
                    "source_tokens": a.source.iter().map(|t| &t.surface).collect::<Vec<_>>(),
                    "target_tokens": a.target.iter().map(|t| &t.surface).collect::<Vec<_>>(),
                    "edits": a.typed_edits(),
                });
                serde_json::to_writer(&mut out, &line)?;
                writeln!(out)?;
            }
            out.flush()?;
            Ok(())
        }
    }
}

fn corrupt_cmd(
    ctx: &Ctx,
    input: &Path,
    mode: Option<ModeArg>,
    p: Option<f64>,
    max_errors: Option<usize>,
    keep_unchanged: bool,
) -> Result<()> {
    let mut config = ctx.config.corruption.clone();
    if let Some(m) = mode {
        config.mode = match m {
            ModeArg::Plausible => Mode::Plausible,
            ModeArg::Implausible => Mode::Implausible,
        };
    }
    config.per_token_error_prob = p.unwrap_or(config.per_token_error_prob);
    config.max_errors_per_sentence = max_errors.unwrap_or(config.max_errors_per_sentence);
    config.seed = ctx.seed();
    let rules = CorruptionRuleSet::from_resources(&ctx.resources)?;
    let bytes = std::fs::read(input)?;
    let sentences = read_sentences(&bytes[..])?;
    let outcomes = corrupt_corpus(&sentences, &rules, &config)?;
    let n_corrupted = outcomes.iter().filter(|o| o.is_corrupted()).count();
    let pairs = outcomes
        .into_iter()
        .filter(|o| keep_unchanged || o.is_corrupted())
        .map(Outcome::into_pair)
        .collect();
    let ds = Dataset::from_pairs(pairs, "corrupted");
    write_tsv(&ds, ctx.output()?)?;
    eprintln!("corrupted {n_corrupted} of {} sentences", sentences.len());
    if let Some(out) = &ctx.global.out {
        let sidecar = json!({
            "tool_version": env!("CARGO_PKG_VERSION"),
            "command": "corrupt",
            "config": config,
            "seed": config.seed,
            "lexicon_hashes": ctx.resources.hashes,
            "input_sha256": sha256_hex(&bytes),
            "n_input": sentences.len(),
            "n_corrupted": n_corrupted,
            "n_written": ds.len(),
        });
        write_json(&sidecar, open_output(Some(&sidecar_path(out)))?)?;
    }
    Ok(())
}

fn build_train_set(ctx: &Ctx, positives: &Path, clean: &Path) -> Result<()> {
    let pos = ctx.dataset(positives)?;
    let clean_bytes = std::fs::read(clean)?;
    let sentences = read_sentences(&clean_bytes[..])?;
    let rules = CorruptionRuleSet::from_resources(&ctx.resources)?;
    let seed = ctx.seed();
    let (corpus, stats) = build_classifier_corpus(&pos, &sentences, &rules, &ctx.config.corruption, seed)?;
    write_labeled_tsv(&corpus, ctx.output()?)?;
    eprintln!(
        "wrote {} reliable and {} unreliable pairs ({} slots dropped)",
        stats.reliable, stats.unreliable, stats.dropped_slots
    );
    if let Some(out) = &ctx.global.out {
        let sidecar = json!({
            "tool_version": env!("CARGO_PKG_VERSION"),
            "command": "build-train-set",
            "config": ctx.config.corruption,
            "seed": seed,
            "lexicon_hashes": ctx.resources.hashes,
            "stats": stats,
        });
        write_json(&sidecar, open_output(Some(&sidecar_path(out)))?)?;
    }
    Ok(())
}

fn train_cmd(
    ctx: &Ctx,
    input: &Path,
    model_out: &Path,
    holdout: Option<f64>,
    tc: crate::classifier::TrainConfig,
) -> Result<()> {
    let corpus = parse_labeled_tsv(open_input(input)?)?;
    let (train_set, test_set) = match holdout {
        Some(h) => train_test_split(&corpus, h, tc.seed)?,
        None => (corpus, Vec::new()),
    };
    let featurizer = ctx.featurizer();
    let examples = featurize_labeled(&featurizer, &train_set);
    let model = train_features(&examples, DIM, &tc)?;
    model.save(BufWriter::new(File::create(model_out)?))?;
    let train_acc = evaluate(&model, &featurizer, &train_set)?;
    let heldout = if test_set.is_empty() {
        serde_json::Value::Null
    } else {
        serde_json::to_value(evaluate(&model, &featurizer, &test_set)?)?
    };
    let summary = json!({
        "model_id": model.model_id(),
        "feature_schema_version": FEATURE_SCHEMA_VERSION,
        "training_meta": model.training_meta,
        "n_train": train_set.len(),
        "n_heldout": test_set.len(),
        "train_accuracy": train_acc,
        "heldout_accuracy": heldout,
    });
    write_json(&summary, ctx.output()?)
}

/// Version line printed by `--version`.
pub fn version_line() -> String {
    format!("gec-dataq {LONG_VERSION}")
}
