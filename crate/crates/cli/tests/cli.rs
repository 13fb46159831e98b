//! End-to-end tests against the built binary: exit codes, artifacts, and the
//! run report contract.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_absa-augment"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/fixtures")
        .join(name)
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

#[test]
fn no_arguments_is_usage_error() {
    let output = binary().output().unwrap();
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn help_exits_zero() {
    let output = binary().arg("--help").output().unwrap();
    assert_eq!(output.status.code(), Some(0));
    assert!(stdout(&output).contains("stats"));
}

#[test]
fn unknown_flag_is_usage_error() {
    let output = binary()
        .args(["stats", "--input", "x.xml", "--frobnicate"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn stats_prints_counts() {
    let output = binary()
        .args(["stats", "--input"])
        .arg(fixture("restaurants_20.xml"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&output)).unwrap();
    assert_eq!(parsed["total"], 20);
    assert_eq!(parsed["polarity_counts"]["positive"], 11);
}

#[test]
fn missing_input_is_resource_error() {
    let output = binary()
        .args(["stats", "--input", "/nonexistent.xml"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn eda_writes_artifact_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("aug.xml");
    let report_path = dir.path().join("report.json");
    let output = binary()
        .args(["eda", "--seed", "11", "--input"])
        .arg(fixture("restaurants_20.xml"))
        .arg("--output")
        .arg(&out)
        .arg("--wordnet")
        .arg(fixture("wndb"))
        .arg("--report")
        .arg(&report_path)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(report["input_count"], 20);
    assert_eq!(report["emitted_total"], 100);
    assert!(out.is_file());
}

#[test]
fn identical_invocations_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let output = binary()
            .args(["eda-adj", "--seed", "3", "--input"])
            .arg(fixture("restaurants_20.xml"))
            .arg("--output")
            .arg(&out)
            .arg("--wordnet")
            .arg(fixture("wndb"))
            .output()
            .unwrap();
        assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
        std::fs::read(&out).unwrap()
    };
    assert_eq!(run("a.xml"), run("b.xml"));
}

#[test]
fn wordnet_env_var_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("aug.xml");
    let output = binary()
        .env("ABSA_WORDNET_DIR", fixture("wndb"))
        .args(["eda", "--input"])
        .arg(fixture("restaurants_20.xml"))
        .arg("--output")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
}

#[test]
fn backtranslate_stub_runs_with_cache() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bt.xml");
    let cache = dir.path().join("cache.jsonl");
    let run = || {
        binary()
            .args(["backtranslate", "--stub", "marker", "--lang", "ja", "--input"])
            .arg(fixture("restaurants_20.xml"))
            .arg("--output")
            .arg(&out)
            .arg("--cache")
            .arg(&cache)
            .output()
            .unwrap()
    };
    let first = run();
    assert_eq!(first.status.code(), Some(0), "{}", stderr(&first));
    let bytes_cold = std::fs::read(&out).unwrap();
    assert!(cache.is_file());
    let second = run();
    assert_eq!(second.status.code(), Some(0));
    assert_eq!(bytes_cold, std::fs::read(&out).unwrap());
}

#[test]
fn unsupported_dictionary_language_is_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let output = binary()
        .args(["backtranslate", "--stub", "dictionary", "--lang", "fr", "--input"])
        .arg(fixture("restaurants_20.xml"))
        .arg("--output")
        .arg(dir.path().join("bt.xml"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1), "{}", stderr(&output));
}

#[test]
fn mixup_writes_binary_and_tsv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("mix.bin");
    let tsv = dir.path().join("mix.tsv");
    let output = binary()
        .args(["mixup", "--dims", "4", "--alpha", "0.2", "--input"])
        .arg(fixture("restaurants_20.xml"))
        .arg("--embeddings")
        .arg(fixture("embeddings_4d.txt"))
        .arg("--output")
        .arg(&out)
        .arg("--lambda-tsv")
        .arg(&tsv)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    let bytes = std::fs::read(&out).unwrap();
    assert_eq!(&bytes[..8], b"ABSAMIXB");
    let tsv_text = std::fs::read_to_string(&tsv).unwrap();
    assert_eq!(tsv_text.lines().count(), 1 + 20);
}

#[test]
fn eda_rejects_mixup_bin_format() {
    let dir = tempfile::tempdir().unwrap();
    let output = binary()
        .args(["eda", "--format", "mixup-bin", "--input"])
        .arg(fixture("restaurants_20.xml"))
        .arg("--output")
        .arg(dir.path().join("x.bin"))
        .arg("--wordnet")
        .arg(fixture("wndb"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn selfcheck_passes_with_fixture_resources() {
    let output = binary()
        .args(["selfcheck", "--stub", "identity", "--wordnet"])
        .arg(fixture("wndb"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{}", stdout(&output));
    assert!(stdout(&output).contains("wordnet"));
}

#[test]
fn selfcheck_missing_wordnet_fails_with_diagnostic() {
    let output = binary()
        .env_remove("ABSA_WORDNET_DIR")
        .args(["selfcheck", "--stub", "identity", "--wordnet", "/nonexistent/wndb"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(stdout(&output).contains("FAIL wordnet"));
}

#[test]
fn ratio_three_to_one_triples_originals() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("aug.xml");
    let report_path = dir.path().join("report.json");
    let output = binary()
        .args(["eda", "--ratio", "3:1", "--input"])
        .arg(fixture("restaurants_20.xml"))
        .arg("--output")
        .arg(&out)
        .arg("--wordnet")
        .arg(fixture("wndb"))
        .arg("--report")
        .arg(&report_path)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(report["originals_emitted"], 60);
    assert_eq!(report["augmented_emitted"], 80);
}
