//! End-to-end tests of the installed command surface.

use std::path::Path;
use std::process::{Command, Output};

fn plotminer(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_plotminer"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

#[test]
fn usage_error_exits_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = plotminer(&[], dir.path());
    assert_eq!(out.status.code(), Some(2));

    // classify requires at least one image argument.
    let out = plotminer(&["classify", "--model", "m.svm"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).to_lowercase().contains("usage"));
}

#[test]
fn gen_overlap_and_disambiguate_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let out = plotminer(
        &[
            "gen", "overlap", "--count", "1", "--shapes", "diamond=2",
            "--shapes", "triangle=1", "--min-overlap", "1", "--out-dir", "imgs",
            "--seed", "5",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("imgs/overlap_0000.pgm").exists());
    assert!(dir.path().join("imgs/overlap_0000.truth.json").exists());

    let out = plotminer(
        &["disambiguate", "imgs/overlap_0000.pgm", "--seed", "9", "--tol", "2"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("overall recall"), "sidecar scoring ran: {text}");
    assert!(text.contains("\"shape\""), "placement records printed: {text}");
}

#[test]
fn corpus_train_classify_extract_pipeline() {
    let dir = tempfile::tempdir().unwrap();

    // Small corpus, then train with 3-fold CV.
    let out = plotminer(
        &[
            "gen", "corpus", "--plots", "30", "--negatives", "30",
            "--out", "corpus.jsonl", "--seed", "11",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let out = plotminer(
        &[
            "train", "--data", "corpus.jsonl", "--out-model", "model.svm",
            "--folds", "3", "--seed", "7", "--holdout", "0.25",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("cross-validation accuracy"));
    assert!(text.contains("confusion matrix"));
    assert!(text.contains("test confusion matrix"));
    assert!(dir.path().join("model.svm").exists());

    // Generate a plot (with caption sidecar) and classify it.
    let out = plotminer(
        &[
            "gen", "plot", "--count", "2", "--series", "diamond=8",
            "--out-dir", "plots", "--seed", "3",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let out = plotminer(
        &[
            "classify", "--model", "model.svm",
            "plots/plot_0000.pgm", "plots/plot_0001.pgm",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 2);
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v.get("file").is_some());
        assert!(v.get("is_plot").is_some());
        assert!(v.get("score").is_some());
    }

    // Extract data points from the first plot.
    let out = plotminer(
        &[
            "extract", "--model", "model.svm", "plots/plot_0000.pgm",
            "--out", "result.json",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let json = std::fs::read_to_string(dir.path().join("result.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["source"], "plots/plot_0000.pgm");
    assert_eq!(v["is_plot"], true);
    assert!(!v["data_points"].as_array().unwrap().is_empty());
}

#[test]
fn classify_reports_per_file_errors_with_exit_1() {
    let dir = tempfile::tempdir().unwrap();

    let out = plotminer(
        &[
            "gen", "corpus", "--plots", "16", "--negatives", "16",
            "--out", "corpus.jsonl", "--seed", "21",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let out = plotminer(
        &["train", "--data", "corpus.jsonl", "--out-model", "model.svm"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let out = plotminer(
        &["gen", "plot", "--count", "1", "--out-dir", "plots", "--seed", "4"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));

    // One good file, one missing file: processing continues, exit code 1.
    let out = plotminer(
        &["classify", "--model", "model.svm", "plots/plot_0000.pgm", "missing.pgm"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout(&out).lines().count(), 1, "the good file still classified");
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.pgm"));
}

#[test]
fn eval_prints_recall_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = plotminer(
        &[
            "eval", "--images", "2", "--shapes", "diamond=1", "--shapes",
            "triangle=1", "--min-overlap", "1", "--iters", "4000",
            "--seed", "13", "--out", "table.json",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("Shape"));
    assert!(text.contains("% Recall"));
    assert!(text.contains("diamond"));
    let json = std::fs::read_to_string(dir.path().join("table.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["images"], 2);

    // Determinism: a repeat run prints the same table.
    let again = plotminer(
        &[
            "eval", "--images", "2", "--shapes", "diamond=1", "--shapes",
            "triangle=1", "--min-overlap", "1", "--iters", "4000",
            "--seed", "13",
        ],
        dir.path(),
    );
    assert_eq!(stdout(&again), text);
}

#[test]
fn extract_result_json_roundtrips_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let out = plotminer(
        &[
            "gen", "corpus", "--plots", "16", "--negatives", "16",
            "--out", "corpus.jsonl", "--seed", "31",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let out = plotminer(
        &["train", "--data", "corpus.jsonl", "--out-model", "model.svm"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let out = plotminer(
        &[
            "gen", "plot", "--count", "1", "--series", "triangle=6",
            "--out-dir", "plots", "--seed", "8",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let out = plotminer(
        &["extract", "--model", "model.svm", "plots/plot_0000.pgm"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let first = stdout(&out);

    // Parse and re-serialize with the library's canonical writer.
    let parsed: plotminer::extract::ExtractionResult =
        serde_json::from_str(first.trim_end()).unwrap();
    let second = plotminer::jsonfmt::to_string(&parsed).unwrap();
    assert_eq!(first.trim_end(), second);
}

#[test]
fn invert_flag_and_segmentation_dump() {
    let dir = tempfile::tempdir().unwrap();
    let out = plotminer(
        &[
            "gen", "corpus", "--plots", "16", "--negatives", "16",
            "--out", "corpus.jsonl", "--seed", "41",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let out = plotminer(
        &["train", "--data", "corpus.jsonl", "--out-model", "model.svm"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let out = plotminer(
        &["gen", "plot", "--count", "1", "--out-dir", "plots", "--seed", "2"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));

    // Invert the plot to light-on-dark, then extract with --invert.
    let gray = plotminer::raster::load_image(dir.path().join("plots/plot_0000.pgm")).unwrap();
    gray.inverted()
        .save_pgm(dir.path().join("plots/negated.pgm"))
        .unwrap();
    std::fs::copy(
        dir.path().join("plots/plot_0000.caption.txt"),
        dir.path().join("plots/negated.caption.txt"),
    )
    .unwrap();
    let out = plotminer(
        &[
            "extract", "--model", "model.svm", "--invert",
            "--dump-segmentation", "seg.json", "plots/negated.pgm",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["is_plot"], true, "inverted input classifies once re-inverted");

    let seg: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("seg.json")).unwrap())
            .unwrap();
    assert!(seg["regions"].is_object());
    assert!(!seg["components"].as_array().unwrap().is_empty());
}

#[test]
fn templates_dir_and_env_fallback() {
    let dir = tempfile::tempdir().unwrap();
    let tpl_dir = dir.path().join("tpl");
    std::fs::create_dir_all(&tpl_dir).unwrap();
    let diamond = plotminer::plotseg::shape_template(plotminer::plotseg::BuiltinShape::Diamond, 9);
    diamond.mask.to_gray().save_pgm(tpl_dir.join("diamond.pgm")).unwrap();

    let out = plotminer(
        &[
            "gen", "overlap", "--count", "1", "--shapes", "diamond=2",
            "--min-overlap", "1", "--templates", "tpl", "--out-dir", "imgs",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    // Same thing via the environment fallback.
    let out = Command::new(env!("CARGO_BIN_EXE_plotminer"))
        .args([
            "gen", "overlap", "--count", "1", "--shapes", "diamond=2",
            "--min-overlap", "1", "--out-dir", "imgs_env",
        ])
        .env("PLOTMINER_TEMPLATES", &tpl_dir)
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("imgs_env/overlap_0000.pgm").exists());
}
