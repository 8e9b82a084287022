//! End-to-end CLI tests: exit-code contract, zip inputs, JSON shape,
//! heuristics config, and the provenance emit/check flow.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_srceq")
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("srceq runs")
}

fn path_str(p: &Path) -> String {
    p.to_str().unwrap().to_string()
}

#[test]
fn equiv_equal_directories_exit_zero() {
    let a = fixture("listings/01_meta_version_field/a");
    let out = run(&["equiv", &path_str(&a), &path_str(&a)]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn equiv_differing_directories_exit_one() {
    let a = fixture("listings/01_meta_version_field/a");
    let b = fixture("listings/01_meta_version_field/b");
    let out = run(&["equiv", &path_str(&a), &path_str(&b)]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("equivalent: false"));
}

#[test]
fn missing_input_exits_two_with_stderr_message() {
    let a = fixture("listings/01_meta_version_field/a");
    let out = run(&["equiv", &path_str(&a), "/nonexistent/archive.zip"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn usage_error_exits_two() {
    let out = run(&["equiv", "only-one-arg"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn classify_reports_labels_and_summary() {
    let a = fixture("listings/05_generated_date_attr/a");
    let b = fixture("listings/05_generated_date_attr/b");
    let out = run(&["classify", &path_str(&a), &path_str(&b), "--format", "json"]);
    assert_eq!(out.status.code(), Some(1));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let summary = json["cause_summary"].as_object().unwrap();
    assert!(summary.contains_key("codegen/@generated"));
}

#[test]
fn classify_equivalent_archives_has_empty_summary() {
    let a = fixture("listings/01_meta_version_field/a");
    let out = run(&["classify", &path_str(&a), &path_str(&a), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(json["cause_summary"].as_object().unwrap().is_empty());
}

#[test]
fn classify_accepts_zip_archives() {
    let dir = tempfile::tempdir().unwrap();
    let zip_a = dir.path().join("a.jar");
    let zip_b = dir.path().join("b.jar");
    for (zip_path, body) in [
        (
            &zip_a,
            "package p; class V { static final String ID = \"1-x\"; }",
        ),
        (
            &zip_b,
            "package p; class V { static final String ID = \"1-y\"; }",
        ),
    ] {
        let file = std::fs::File::create(zip_path).unwrap();
        let mut writer = zip::ZipWriter::new(file);
        writer
            .start_file("p/V.java", zip::write::SimpleFileOptions::default())
            .unwrap();
        writer.write_all(body.as_bytes()).unwrap();
        writer.finish().unwrap();
    }
    let out = run(&[
        "classify",
        &path_str(&zip_a),
        &path_str(&zip_b),
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(json["cause_summary"]["codegen/meta"].as_u64().unwrap() == 1);
}

#[test]
fn labels_flag_names_the_inputs() {
    let a = fixture("listings/01_meta_version_field/a");
    let b = fixture("listings/01_meta_version_field/b");
    let out = run(&[
        "equiv",
        &path_str(&a),
        &path_str(&b),
        "--labels",
        "a=upstream,b=rebuild",
        "--format",
        "json",
    ]);
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["inputs"][0]["label"], "upstream");
    assert_eq!(json["inputs"][1]["label"], "rebuild");
}

#[test]
fn heuristics_config_flag_changes_detection() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("heuristics.conf");
    // Remove ID from the lexicon: the version-field fixture stops being
    // recognized as metadata.
    std::fs::write(&config, "meta_lexicon = NOTHINGMATCHES\n").unwrap();
    let a = fixture("listings/01_meta_version_field/a");
    let b = fixture("listings/01_meta_version_field/b");
    let out = run(&[
        "classify",
        &path_str(&a),
        &path_str(&b),
        "--config",
        &path_str(&config),
        "--format",
        "json",
    ]);
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let summary = json["cause_summary"].as_object().unwrap();
    assert!(!summary.contains_key("codegen/meta"));
}

#[test]
fn malformed_heuristics_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.conf");
    std::fs::write(&config, "not a key value line\n").unwrap();
    let a = fixture("listings/01_meta_version_field/a");
    let out = run(&[
        "classify",
        &path_str(&a),
        &path_str(&a),
        "--config",
        &path_str(&config),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn classify_with_missing_repo_exits_two() {
    let a = fixture("listings/01_meta_version_field/a");
    let b = fixture("listings/01_meta_version_field/b");
    let out = run(&[
        "classify",
        &path_str(&a),
        &path_str(&b),
        "--repo",
        "/nonexistent/checkout",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn trace_exits_zero_and_reports_missing() {
    let dist = fixture("trace/zookeeper/dist_b");
    let repo = fixture("trace/zookeeper/repo");
    let out = run(&[
        "trace",
        &path_str(&dist),
        "--repo",
        &path_str(&repo),
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["trace"]["missing_count"], 1);
    assert_eq!(
        json["trace"]["per_class"]["org.apache.zookeeper.version.Info"],
        "RepoTemplate"
    );
}

#[test]
fn self_trace_has_nothing_missing() {
    let dist = fixture("trace/zookeeper/dist_a");
    let out = run(&[
        "trace",
        &path_str(&dist),
        "--repo",
        &path_str(&dist),
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["trace"]["missing_count"], 0);
}

#[test]
fn classify_with_repo_adds_trace_to_report() {
    let a = fixture("trace/zookeeper/dist_a");
    let b = fixture("trace/zookeeper/dist_b");
    let repo = fixture("trace/zookeeper/repo");
    let out = run(&[
        "classify",
        &path_str(&a),
        &path_str(&b),
        "--repo",
        &path_str(&repo),
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(json["trace"]["missing_count"].is_number());
}

#[test]
fn provenance_emit_then_check_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("provenance.json");
    let archive = fixture("listings/06_generated_vs_comment/b");

    let out = run(&[
        "provenance",
        "emit",
        &path_str(&archive),
        "--out",
        &path_str(&manifest),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(manifest.exists());

    let out = run(&[
        "provenance",
        "check",
        &path_str(&archive),
        "--manifest",
        &path_str(&manifest),
    ]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn provenance_check_fails_after_token_edit() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("src/p");
    std::fs::create_dir_all(&src).unwrap();
    std::fs::write(src.join("A.java"), "package p; class A { int x = 1; }").unwrap();
    let manifest = dir.path().join("m.json");

    let archive = dir.path().join("src");
    let out = run(&[
        "provenance",
        "emit",
        &path_str(&archive),
        "--out",
        &path_str(&manifest),
    ]);
    assert_eq!(out.status.code(), Some(0));

    // Reformat only: check stays green.
    std::fs::write(
        src.join("A.java"),
        "package p;\nclass A {\n    int x = 1; // note\n}\n",
    )
    .unwrap();
    let out = run(&[
        "provenance",
        "check",
        &path_str(&archive),
        "--manifest",
        &path_str(&manifest),
    ]);
    assert_eq!(out.status.code(), Some(0));

    // Token edit: check fails with exit 1.
    std::fs::write(src.join("A.java"), "package p; class A { int x = 2; }").unwrap();
    let out = run(&[
        "provenance",
        "check",
        &path_str(&archive),
        "--manifest",
        &path_str(&manifest),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn malformed_manifest_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("broken.json");
    std::fs::write(&manifest, "{ not json").unwrap();
    let archive = fixture("listings/01_meta_version_field/a");
    let out = run(&[
        "provenance",
        "check",
        &path_str(&archive),
        "--manifest",
        &path_str(&manifest),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn provenance_emit_uses_hints() {
    let dir = tempfile::tempdir().unwrap();
    let hints = dir.path().join("hints.conf");
    std::fs::write(
        &hints,
        "**/STParser.java = gen:external-tool/antlr@3.5.3?config=ab12cd\n",
    )
    .unwrap();
    let manifest = dir.path().join("m.json");
    let archive = fixture("listings/09_antlr_reorder/a");
    let out = run(&[
        "provenance",
        "emit",
        &path_str(&archive),
        "--out",
        &path_str(&manifest),
        "--hints",
        &path_str(&hints),
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let generators = json["provenance"]["generators"].as_array().unwrap();
    assert!(generators.iter().any(|g| g
        .as_str()
        .unwrap()
        .contains("gen:external-tool/antlr@3.5.3")));

    let manifest_json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&manifest).unwrap()).unwrap();
    let record = &manifest_json["records"][0];
    assert_eq!(record["status"], "generated");
}

#[test]
fn stamp_flag_adds_timestamp() {
    let a = fixture("listings/01_meta_version_field/a");
    let out = run(&[
        "equiv",
        &path_str(&a),
        &path_str(&a),
        "--format",
        "json",
        "--stamp",
    ]);
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(json["timestamp"].is_string());
}

#[test]
fn json_report_matches_documented_schema() {
    // Structural check against the shape documented in
    // docs/report.schema.json: required keys and value types.
    let a = fixture("trace/zookeeper/dist_a");
    let b = fixture("trace/zookeeper/dist_b");
    let repo = fixture("trace/zookeeper/repo");
    let out = run(&[
        "classify",
        &path_str(&a),
        &path_str(&b),
        "--repo",
        &path_str(&repo),
        "--format",
        "json",
    ]);
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();

    assert!(json["tool_version"].is_string());
    assert!(json["command"].is_string());
    assert!(json["inputs"].is_array());
    for input in json["inputs"].as_array().unwrap() {
        assert!(input["origin"].is_string());
        assert!(input["label"].is_string());
    }
    let verdict = &json["archive_verdict"];
    assert!(verdict["equivalent"].is_boolean());
    assert!(verdict["counts"].is_object());
    for pair in verdict["pairs"].as_array().unwrap() {
        assert!(pair["path"].is_string());
        assert!(pair["status"].is_string());
        assert!(pair["hunk_count"].is_number());
    }
    for cause in json["cause_verdicts"].as_array().unwrap() {
        assert!(cause["path"].is_string());
        for label in cause["labels"].as_array().unwrap() {
            assert!(label["label"].is_string());
            let c = label["confidence"].as_f64().unwrap();
            assert!((0.0..=1.0).contains(&c));
            for e in label["evidence"].as_array().unwrap() {
                assert!(e["snippet"].is_string());
                assert!(e["line"].is_number());
                assert!(e["col"].is_number());
            }
        }
    }
    assert!(json["cause_summary"].is_object());
    assert!(json["trace"]["per_class"].is_object());
    assert!(json["warnings"].is_array());
}
