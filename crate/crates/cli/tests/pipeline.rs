//! End-to-end pipeline runs against the `posbias` binary: exit codes,
//! artifact presence, determinism, and manifest reproducibility.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn posbias(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_posbias"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) {
    let out = posbias(args);
    assert!(
        out.status.success(),
        "posbias {:?} failed:\n{}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

#[test]
fn full_pipeline_produces_all_artifacts() {
    // The 200-passage fixture pipeline has a 60-second budget end to end.
    let started = std::time::Instant::now();
    let tmp = TempDir::new().unwrap();
    let root = tmp.path();
    let ingest = root.join("ingest");
    ok(&[
        "ingest",
        "--synthetic",
        "--passages",
        "200",
        "--passage-len",
        "40",
        "--vocab",
        "60",
        "--answer-len",
        "1",
        "--answer-pos",
        "0.0",
        "--distractors",
        "3",
        "--seed",
        "11",
        "--out",
        &path_str(&ingest),
    ]);
    for name in ["collection.tsv", "queries.tsv", "qrels.txt", "answers.tsv", "stats.json", "manifest.json"] {
        assert!(ingest.join(name).exists(), "missing {name}");
    }

    let collection = ingest.join("collection.tsv");
    let queries = ingest.join("queries.tsv");
    let qrels = ingest.join("qrels.txt");
    let answers = ingest.join("answers.tsv");

    // Audit: answers planted at token 1 put all mass in bin 0.
    let audit_dir = root.join("audit");
    ok(&[
        "audit",
        "--collection",
        &path_str(&collection),
        "--qrels",
        &path_str(&qrels),
        "--answers",
        &path_str(&answers),
        "--bins",
        "10",
        "--out",
        &path_str(&audit_dir),
    ]);
    let hist = fs::read_to_string(audit_dir.join("histogram.csv")).unwrap();
    let first_bin = hist.lines().nth(1).unwrap();
    assert!(
        first_bin.ends_with(",1.000000"),
        "all mass should sit in bin 0: {first_bin}"
    );

    // Debias, then re-audit: mass spreads out.
    let debiased = root.join("debiased.tsv");
    let rotmap = root.join("rotations.tsv");
    ok(&[
        "debias",
        "--collection",
        &path_str(&collection),
        "--seed",
        "99",
        "--out",
        &path_str(&debiased),
        "--rotation-map",
        &path_str(&rotmap),
    ]);
    let audit_deb = root.join("audit-debiased");
    ok(&[
        "audit",
        "--collection",
        &path_str(&debiased),
        "--qrels",
        &path_str(&qrels),
        "--answers",
        &path_str(&answers),
        "--bins",
        "10",
        "--out",
        &path_str(&audit_deb),
    ]);
    let deb_summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(audit_deb.join("summary.json")).unwrap()).unwrap();
    let orig_summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(audit_dir.join("summary.json")).unwrap()).unwrap();
    assert!(
        deb_summary["tv_from_uniform"].as_f64().unwrap()
            < orig_summary["tv_from_uniform"].as_f64().unwrap(),
        "debiasing should move the histogram toward uniform"
    );

    // Qrels are untouched by debiasing (byte-identical re-export).
    let reingest = root.join("reingest");
    ok(&[
        "ingest",
        "--msmarco-collection",
        &path_str(&debiased),
        "--qrels",
        &path_str(&qrels),
        "--out",
        &path_str(&reingest),
    ]);
    assert_eq!(
        fs::read(&qrels).unwrap(),
        fs::read(reingest.join("qrels.txt")).unwrap()
    );

    // Retrieve candidates.
    let run_bm25 = root.join("bm25.run");
    ok(&[
        "retrieve",
        "--collection",
        &path_str(&collection),
        "--queries",
        &path_str(&queries),
        "--k",
        "10",
        "--out",
        &path_str(&run_bm25),
    ]);
    assert!(fs::read_to_string(&run_bm25).unwrap().lines().count() >= 200);

    // Encode and probe.
    let dump = root.join("dump.tsv");
    ok(&[
        "encode",
        "--collection",
        &path_str(&collection),
        "--random-embeddings",
        "16",
        "--embedding-seed",
        "3",
        "--encoder-config",
        &path_str(&write_encoder_config(root)),
        "--init-seed",
        "8",
        "--alpha",
        "0.0",
        "--out",
        &path_str(&dump),
        "--threads",
        "2",
    ]);
    let probe_dir = root.join("probe");
    ok(&[
        "probe",
        "--dump",
        &path_str(&dump),
        "--max-delta",
        "10",
        "--seed",
        "4",
        "--out",
        &path_str(&probe_dir),
    ]);
    let mats: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(probe_dir.join("mats.json")).unwrap()).unwrap();
    assert!(mats["mats"].is_number());

    // Rerank the BM25 candidates.
    let run_tk = root.join("tk.run");
    ok(&[
        "rerank",
        "--collection",
        &path_str(&collection),
        "--queries",
        &path_str(&queries),
        "--run",
        &path_str(&run_bm25),
        "--depth",
        "10",
        "--random-embeddings",
        "16",
        "--embedding-seed",
        "3",
        "--encoder-config",
        &path_str(&write_encoder_config(root)),
        "--init-seed",
        "8",
        "--out",
        &path_str(&run_tk),
        "--threads",
        "2",
    ]);

    // Evaluate both runs.
    let eval_dir = root.join("eval");
    ok(&[
        "eval",
        "--run",
        &path_str(&run_bm25),
        "--run-b",
        &path_str(&run_tk),
        "--qrels",
        &path_str(&qrels),
        "--k",
        "10",
        "--out",
        &path_str(&eval_dir),
    ]);
    for name in ["per_query.csv", "per_query_b.csv", "aggregate.csv", "aggregate_b.csv", "compare.csv"] {
        assert!(eval_dir.join(name).exists(), "missing {name}");
    }

    // Report collects everything.
    let report_dir = root.join("report");
    ok(&[
        "report",
        "--audit-dir",
        &path_str(&audit_dir),
        "--probe-dir",
        &path_str(&probe_dir),
        "--eval-dir",
        &path_str(&eval_dir),
        "--out",
        &path_str(&report_dir),
    ]);
    for name in [
        "answer_position_histogram.csv",
        "answer_matches.csv",
        "ats_curve.csv",
        "mats_summary.json",
        "metric_table.csv",
        "metric_deltas.csv",
        "summary.txt",
        "manifest.json",
    ] {
        assert!(report_dir.join(name).exists(), "missing {name}");
    }

    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 60.0,
        "pipeline took {elapsed:?}, budget 60 s"
    );
}

fn write_encoder_config(root: &Path) -> std::path::PathBuf {
    let path = root.join("encoder.json");
    fs::write(
        &path,
        r#"{"layers": 1, "heads": 2, "head_dim": 4, "ff_dim": 16}"#,
    )
    .unwrap();
    path
}

#[test]
fn debias_is_byte_identical_per_seed() {
    let tmp = TempDir::new().unwrap();
    let root = tmp.path();
    let ingest = root.join("ingest");
    ok(&[
        "ingest", "--synthetic", "--passages", "30", "--passage-len", "20", "--seed", "5",
        "--out", &path_str(&ingest),
    ]);
    let collection = ingest.join("collection.tsv");

    // The identical invocation twice: outputs and manifests must be
    // byte-identical.
    let out = root.join("deb.tsv");
    let map = root.join("rot.tsv");
    let mut outputs = Vec::new();
    for _ in 0..2 {
        ok(&[
            "debias",
            "--collection",
            &path_str(&collection),
            "--seed",
            "777",
            "--out",
            &path_str(&out),
            "--rotation-map",
            &path_str(&map),
        ]);
        outputs.push((
            fs::read(&out).unwrap(),
            fs::read(&map).unwrap(),
            fs::read(root.join("deb.tsv.manifest.json")).unwrap(),
        ));
    }
    assert_eq!(outputs[0].0, outputs[1].0, "collections differ");
    assert_eq!(outputs[0].1, outputs[1].1, "rotation maps differ");
    assert_eq!(outputs[0].2, outputs[1].2, "manifests differ");

    let other = root.join("deb-other.tsv");
    ok(&[
        "debias",
        "--collection",
        &path_str(&collection),
        "--seed",
        "778",
        "--out",
        &path_str(&other),
        "--rotation-map",
        &path_str(&root.join("rot-other.tsv")),
    ]);
    assert_ne!(
        outputs[0].0,
        fs::read(&other).unwrap(),
        "different seeds should rotate differently"
    );
}

#[test]
fn rerunning_from_manifest_reproduces_outputs() {
    let tmp = TempDir::new().unwrap();
    let root = tmp.path();
    let ingest = root.join("ingest");
    ok(&[
        "ingest", "--synthetic", "--passages", "25", "--passage-len", "18", "--seed", "21",
        "--out", &path_str(&ingest),
    ]);
    let out = root.join("debiased.tsv");
    ok(&[
        "debias",
        "--collection",
        &path_str(&ingest.join("collection.tsv")),
        "--seed",
        "31",
        "--out",
        &path_str(&out),
        "--rotation-map",
        &path_str(&root.join("rot.tsv")),
    ]);
    let first = fs::read(&out).unwrap();

    // Re-run with the parameters recorded in the manifest.
    let manifest = posbias_cli::manifest::read_manifest(&root.join("debiased.tsv.manifest.json")).unwrap();
    assert_eq!(manifest.subcommand, "debias");
    assert_eq!(manifest.tool, "posbias");
    assert_eq!(manifest.seed, Some(31));
    let args: posbias_cli::cli::debias::DebiasArgs =
        serde_json::from_value(manifest.params.clone()).unwrap();
    fs::remove_file(&out).unwrap();
    posbias_cli::cli::debias::run(&args).unwrap();
    assert_eq!(first, fs::read(&out).unwrap(), "manifest re-run diverged");
}

#[test]
fn exit_codes_follow_the_contract() {
    let tmp = TempDir::new().unwrap();
    let root = tmp.path();

    // Usage error: unknown subcommand.
    let out = posbias(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(64));
    // Usage error: unknown flag.
    let out = posbias(&["debias", "--bogus"]);
    assert_eq!(out.status.code(), Some(64));
    // Help and version succeed.
    assert_eq!(posbias(&["--help"]).status.code(), Some(0));
    assert_eq!(posbias(&["--version"]).status.code(), Some(0));

    // I/O error: missing input file.
    let out = posbias(&[
        "debias",
        "--collection",
        &path_str(&root.join("nope.tsv")),
        "--seed",
        "1",
        "--out",
        &path_str(&root.join("x.tsv")),
        "--rotation-map",
        &path_str(&root.join("r.tsv")),
    ]);
    assert_eq!(out.status.code(), Some(2));

    // Parse error: malformed collection.
    let bad = root.join("bad.tsv");
    fs::write(&bad, "only-one-column\n").unwrap();
    let out = posbias(&[
        "debias",
        "--collection",
        &path_str(&bad),
        "--seed",
        "1",
        "--out",
        &path_str(&root.join("x.tsv")),
        "--rotation-map",
        &path_str(&root.join("r.tsv")),
    ]);
    assert_eq!(out.status.code(), Some(2));

    // Validation error: qrels referencing unknown passages.
    let ingest = root.join("ingest");
    ok(&[
        "ingest", "--synthetic", "--passages", "5", "--passage-len", "10", "--seed", "1",
        "--out", &path_str(&ingest),
    ]);
    let dangling = root.join("dangling.txt");
    fs::write(&dangling, "q0 0 ghost 1\n").unwrap();
    let out = posbias(&[
        "audit",
        "--collection",
        &path_str(&ingest.join("collection.tsv")),
        "--qrels",
        &path_str(&dangling),
        "--answers",
        &path_str(&ingest.join("answers.tsv")),
        "--out",
        &path_str(&root.join("audit")),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("ghost"), "offender not listed: {stderr}");
}

#[test]
fn closed_gate_rerank_ignores_rotation_at_file_level() {
    // With --alpha 1.0 the scorer sees bag-of-words vectors, so re-ranking
    // against the debiased collection writes a byte-identical run file.
    let tmp = TempDir::new().unwrap();
    let root = tmp.path();
    let ingest = root.join("ingest");
    ok(&[
        "ingest", "--synthetic", "--passages", "40", "--passage-len", "25", "--distractors", "4",
        "--seed", "13", "--out", &path_str(&ingest),
    ]);
    let collection = ingest.join("collection.tsv");
    let queries = ingest.join("queries.tsv");
    let run_bm25 = root.join("bm25.run");
    ok(&[
        "retrieve",
        "--collection",
        &path_str(&collection),
        "--queries",
        &path_str(&queries),
        "--k",
        "5",
        "--out",
        &path_str(&run_bm25),
    ]);
    let debiased = root.join("debiased.tsv");
    ok(&[
        "debias",
        "--collection",
        &path_str(&collection),
        "--seed",
        "3",
        "--out",
        &path_str(&debiased),
        "--rotation-map",
        &path_str(&root.join("rot.tsv")),
    ]);

    let config = write_encoder_config(root);
    let mut runs = Vec::new();
    for (source, name) in [(&collection, "orig.run"), (&debiased, "deb.run")] {
        let out = root.join(name);
        ok(&[
            "rerank",
            "--collection",
            &path_str(source),
            "--queries",
            &path_str(&queries),
            "--run",
            &path_str(&run_bm25),
            "--depth",
            "5",
            "--random-embeddings",
            "16",
            "--encoder-config",
            &path_str(&config),
            "--init-seed",
            "9",
            "--alpha",
            "1.0",
            "--out",
            &path_str(&out),
        ]);
        runs.push(fs::read(&out).unwrap());
    }
    assert_eq!(runs[0], runs[1], "closed-gate runs must match byte-for-byte");
}

#[test]
fn threads_do_not_change_encode_output() {
    let tmp = TempDir::new().unwrap();
    let root = tmp.path();
    let ingest = root.join("ingest");
    ok(&[
        "ingest", "--synthetic", "--passages", "20", "--passage-len", "15", "--seed", "2",
        "--out", &path_str(&ingest),
    ]);
    let mut dumps = Vec::new();
    for threads in ["1", "4"] {
        let dump = root.join(format!("dump{threads}.tsv"));
        ok(&[
            "encode",
            "--collection",
            &path_str(&ingest.join("collection.tsv")),
            "--random-embeddings",
            "8",
            "--encoder-config",
            &path_str(&write_encoder_config(root)),
            "--alpha",
            "0.5",
            "--out",
            &path_str(&dump),
            "--threads",
            threads,
        ]);
        dumps.push(fs::read(&dump).unwrap());
    }
    assert_eq!(dumps[0], dumps[1], "thread count changed the dump");
}
