mod common;

use std::path::Path;
use std::process::{Command, Output};

use gec_dataq_core::classifier::LinearModel;
use gec_dataq_core::corpus::{parse_labeled_tsv, parse_m2, parse_tsv, write_tsv, Label};
use serde_json::Value;

fn gec_dataq(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gec-dataq"))
        .current_dir(dir)
        .env("SOURCE_DATE_EPOCH", "86400")
        .env_remove("GEC_DATAQ_CONFIG")
        .args(args)
        .output()
        .unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = gec_dataq(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn json(bytes: &[u8]) -> Value {
    serde_json::from_slice(bytes).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let v = ok(d, &["--version"]);
    assert!(String::from_utf8_lossy(&v.stdout).contains("feature schema fs1, typer rules tr1"));
    assert!(ok(d, &["--help"]).stdout.starts_with(b"Quality metrics"));
    assert_eq!(gec_dataq(d, &[]).status.code(), Some(1));
    assert_eq!(gec_dataq(d, &["type-dist"]).status.code(), Some(1));
    assert_eq!(gec_dataq(d, &["--threads", "x", "type-dist", "--in", "a.tsv"]).status.code(), Some(1));
    assert_eq!(gec_dataq(d, &["type-dist", "--in", "missing.tsv"]).status.code(), Some(2));
    write(d, "bad.tsv", "He go home .\tHe goes home .\nonly one column\n");
    let strict = gec_dataq(d, &["type-dist", "--in", "bad.tsv"]);
    assert_eq!(strict.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&strict.stderr).contains('2'));
    let lenient = ok(d, &["--lenient", "type-dist", "--in", "bad.tsv"]);
    assert!(String::from_utf8_lossy(&lenient.stderr).contains("skipped"));
    assert_eq!(json(&lenient.stdout)["payload"]["total_edits"], 1);
    write(d, "bad.conf", "no_such_key = 1\n");
    assert_eq!(gec_dataq(d, &["--config", "bad.conf", "type-dist", "--in", "bad.tsv"]).status.code(), Some(2));
}

#[test]
fn extract_edits_and_type_dist() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(d, "g.tsv", "He go home .\tHe goes home .\nI like it .\tI like it .\n");
    let m2 = ok(d, &["extract-edits", "--in", "g.tsv"]).stdout;
    let text = String::from_utf8(m2.clone()).unwrap();
    assert!(text.contains("S He go home .\nA 1 2|||VERB:SVA|||goes|||REQUIRED|||-NONE-|||0\n"));
    assert!(text.contains("A -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||0"));
    let records = parse_m2(m2.as_slice()).unwrap();
    assert_eq!(records.len(), 2);

    let jsonl = ok(d, &["extract-edits", "--in", "g.tsv", "--format", "jsonl"]).stdout;
    let first: Value = serde_json::from_str(String::from_utf8(jsonl).unwrap().lines().next().unwrap()).unwrap();
    assert_eq!(first["edits"][0]["type"], "VERB:SVA");

    let report = json(&ok(d, &["type-dist", "--in", "g.tsv"]).stdout);
    assert_eq!(report["schema_version"], "1");
    assert_eq!(report["kind"], "error_distribution");
    assert_eq!(report["created_utc"], "1970-01-02T00:00:00Z");
    assert_eq!(report["payload"]["VERB:SVA"], 100.0);
    assert_eq!(report["payload"]["total_edits"], 1);

    ok(d, &["--out", "gold.m2", "extract-edits", "--in", "g.tsv"]);
    write(d, "hyp.tsv", "He go home .\tHe went home .\nI like it .\tI like it .\n");
    let score = json(&ok(d, &["score-gec", "--hyp", "hyp.tsv", "--gold", "gold.m2"]).stdout);
    assert_eq!(score["kind"], "scorer");
    assert_eq!((score["payload"]["tp"].as_u64(), score["payload"]["fp"].as_u64(), score["payload"]["fn"].as_u64()), (Some(0), Some(1), Some(1)));
    // gold M2 input is read by extension
    let from_m2 = json(&ok(d, &["type-dist", "--in", "gold.m2"]).stdout);
    assert_eq!(from_m2["payload"], report["payload"]);
}

#[test]
fn corrupt_writes_sidecar_and_honours_config() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(d, "clean.txt", &(common::clean_sentences(50, 1).join("\n") + "\n"));
    write(d, "c.conf", "# test\ncorrupt.mode = implausible\ncorrupt.per_token_error_prob = 0.4\nseed = 5\n");
    ok(d, &["--config", "c.conf", "--out", "x.tsv", "corrupt", "--in", "clean.txt"]);
    let side = json(&std::fs::read(d.join("x.tsv.json")).unwrap());
    assert_eq!(side["command"], "corrupt");
    assert_eq!(side["config"]["mode"], "implausible");
    assert_eq!(side["config"]["per_token_error_prob"], 0.4);
    assert_eq!(side["seed"], 5);
    assert_eq!(side["n_input"], 50);
    for key in ["tool_version", "input_sha256", "lexicon_hashes", "n_corrupted", "n_written"] {
        assert!(side.get(key).is_some(), "{key}");
    }
    let ds = parse_tsv(std::fs::File::open(d.join("x.tsv")).unwrap()).unwrap();
    assert_eq!(ds.len() as u64, side["n_written"].as_u64().unwrap());
    assert!(ds.pairs.iter().all(|p| p.source != p.target));

    // flags override the file; the environment variable supplies it when --config is absent
    let out = Command::new(env!("CARGO_BIN_EXE_gec-dataq"))
        .current_dir(d)
        .env("GEC_DATAQ_CONFIG", d.join("c.conf"))
        .args(["--out", "y.tsv", "corrupt", "--in", "clean.txt", "--mode", "plausible"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let side = json(&std::fs::read(d.join("y.tsv.json")).unwrap());
    assert_eq!(side["config"]["mode"], "plausible");
    assert_eq!(side["seed"], 5);
}

#[test]
fn train_score_partition_diversity() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let corpus = common::gec_corpus(300, 2);
    write_tsv(&corpus, std::fs::File::create(d.join("pos.tsv")).unwrap()).unwrap();
    write(d, "clean.txt", &(common::clean_sentences(400, 3).join("\n") + "\n"));
    ok(d, &["--seed", "4", "--out", "lab.tsv", "build-train-set", "--positives", "pos.tsv", "--clean", "clean.txt"]);
    let labeled = parse_labeled_tsv(std::fs::File::open(d.join("lab.tsv")).unwrap()).unwrap();
    let n_rel = labeled.iter().filter(|l| l.label == Label::Reliable).count();
    assert_eq!(n_rel * 2, labeled.len());
    assert!(d.join("lab.tsv.json").exists());

    let summary = json(&ok(d, &["--seed", "4", "train", "--in", "lab.tsv", "--model-out", "m.json", "--holdout", "0.2"]).stdout);
    let model = LinearModel::load(std::fs::File::open(d.join("m.json")).unwrap()).unwrap();
    assert_eq!(summary["model_id"], model.model_id());
    assert_eq!(summary["n_heldout"], summary["heldout_accuracy"]["n"]);
    assert!(summary["heldout_accuracy"]["accuracy"].as_f64().is_some());

    let score = json(&ok(d, &["score-reliability", "--model", "m.json", "--in", "pos.tsv"]).stdout);
    assert_eq!(score["kind"], "reliability");
    assert_eq!(score["payload"]["model_id"], model.model_id());
    assert_eq!(score["payload"]["n_pairs"], 300);
    let n_reliable = score["payload"]["n_reliable"].as_u64().unwrap();
    let metric = score["payload"]["reliability_metric"].as_f64().unwrap();
    assert!((metric - 100.0 * n_reliable as f64 / 300.0).abs() < 1e-9);

    ok(d, &["partition", "--model", "m.json", "--in", "pos.tsv", "--reliable-out", "r.tsv", "--unreliable-out", "u.tsv"]);
    let r = parse_tsv(std::fs::File::open(d.join("r.tsv")).unwrap()).unwrap();
    let u = parse_tsv(std::fs::File::open(d.join("u.tsv")).unwrap()).unwrap();
    assert_eq!(r.len() as u64, n_reliable);
    assert_eq!(r.len() + u.len(), 300);

    let div = json(&ok(d, &["diversity", "--model", "m.json", "--in", "pos.tsv"]).stdout);
    assert_eq!(div["kind"], "diversity");
    assert!(div["payload"]["entropy_original"].as_f64().unwrap() > 0.0);

    let dm = json(&ok(d, &["dist-match", "--a", "pos.tsv", "--b", "r.tsv"]).stdout);
    assert_eq!(dm["kind"], "distribution_match");
    let j = dm["payload"]["jsd"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&j));

    // a model from another feature schema is refused with a data error
    let mut v: Value = serde_json::from_slice(&std::fs::read(d.join("m.json")).unwrap()).unwrap();
    v["feature_schema_version"] = "fs0".into();
    std::fs::write(d.join("old.json"), serde_json::to_vec(&v).unwrap()).unwrap();
    assert_eq!(gec_dataq(d, &["score-reliability", "--model", "old.json", "--in", "pos.tsv"]).status.code(), Some(2));
}
