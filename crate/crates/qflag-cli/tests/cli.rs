//! End-to-end tests of the command-line surface: every verb, the wire
//! formats, the exit code convention, and pipeline determinism/resume.

use std::path::Path;
use std::process::Command;

fn qflag() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qflag"))
}

fn write(dir: &Path, name: &str, content: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path
}

const P4: &str = r#"{"adjacency": [[0,5],[0,0]], "dim_vector": [1,1]}"#;
const P5: &str = r#"{"adjacency": [[0,6],[0,0]], "dim_vector": [1,1]}"#;
const GR42: &str = r#"{"adjacency": [[0,4],[0,0]], "dim_vector": [1,2]}"#;
const O2: &str = r#"{"summands": [[[2]]]}"#;

#[test]
fn validate_reports_derived_data() {
    let dir = tempfile::tempdir().unwrap();
    let quiver = write(dir.path(), "p4.json", P4);
    let out = qflag()
        .args(["validate", "--quiver", quiver.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["data"]["dimension"], 4);
    assert_eq!(v["data"]["anticanonical"][0], 5);
    assert_eq!(v["fano"], true);
}

#[test]
fn validate_rejects_cycle_with_exit_code_one() {
    let dir = tempfile::tempdir().unwrap();
    let quiver = write(
        dir.path(),
        "cycle.json",
        r#"{"adjacency": [[0,1],[1,0]], "dim_vector": [1,1]}"#,
    );
    let out = qflag()
        .args(["validate", "--quiver", quiver.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("cycle"), "stderr: {stderr}");
}

#[test]
fn usage_errors_exit_two() {
    let out = qflag().args(["validate"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn stdin_input_works() {
    use std::io::Write as _;
    let mut child = qflag()
        .args(["validate", "--quiver", "-"])
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.as_mut().unwrap().write_all(P4.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
}

#[test]
fn normal_form_of_chain_is_published_layout() {
    let dir = tempfile::tempdir().unwrap();
    let quiver = write(
        dir.path(),
        "chain.json",
        r#"{"adjacency": [[0,4,0],[0,0,4],[0,0,0]], "dim_vector": [1,1,1]}"#,
    );
    let out = qflag()
        .args(["normal-form", "--quiver", quiver.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(
        v["adjacency"],
        serde_json::json!([[0, 0, 4], [0, 0, 0], [0, 4, 0]])
    );
}

#[test]
fn nef_cone_of_grassmannian() {
    let dir = tempfile::tempdir().unwrap();
    let quiver = write(dir.path(), "gr.json", GR42);
    let out = qflag()
        .args(["nef", "--quiver", quiver.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["inequalities"], serde_json::json!([[2]]));
    assert_eq!(v["rays"], serde_json::json!([[1]]));
}

#[test]
fn invariants_and_period_of_quadric() {
    let dir = tempfile::tempdir().unwrap();
    let quiver = write(dir.path(), "p5.json", P5);
    let bundle = write(dir.path(), "o2.json", O2);
    let out = qflag()
        .args([
            "invariants",
            "--quiver",
            quiver.to_str().unwrap(),
            "--bundle",
            bundle.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["degree"], 512);
    assert_eq!(v["euler"], 6);
    assert_eq!(v["chi_o"], 1);
    assert_eq!(v["dimension"], 4);

    let out = qflag()
        .args([
            "period",
            "--quiver",
            quiver.to_str().unwrap(),
            "--bundle",
            bundle.to_str().unwrap(),
            "--order",
            "7",
            "--cross-check",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(
        v["alpha"],
        serde_json::json!(["1", "0", "0", "0", "48", "0", "0", "0"])
    );
}

#[test]
fn classify_search_export_query_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let db = dir.path().join("db.jsonl");
    let out = qflag()
        .args(["classify", "--max-dim", "2", "--out", db.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success());
    let lines = std::fs::read_to_string(&db).unwrap();
    assert_eq!(lines.lines().count(), 6); // 1 + 2 + 3 varieties

    // Pipeline over dimension 4 at a small order.
    let run = dir.path().join("run");
    let out = qflag()
        .args([
            "pipeline",
            "--max-dim",
            "4",
            "--order",
            "8",
            "--out",
            run.to_str().unwrap(),
        ])
        .env("QFLAG_WORKERS", "2")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let zero_loci = run.join("zero_loci_screened.jsonl");
    let buckets = run.join("buckets.jsonl");
    assert!(zero_loci.exists() && buckets.exists());

    // Rerun skips all stages and leaves the data untouched.
    let before = std::fs::read(&buckets).unwrap();
    let out = qflag()
        .args([
            "pipeline",
            "--max-dim",
            "4",
            "--order",
            "8",
            "--out",
            run.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert_eq!(stderr.matches("up to date, skipping").count(), 3, "{stderr}");
    assert_eq!(std::fs::read(&buckets).unwrap(), before);

    // Export CSV, reimport, compare.
    let csv = dir.path().join("table.csv");
    let out = qflag()
        .args([
            "export",
            "--buckets",
            buckets.to_str().unwrap(),
            "--format",
            "csv",
            "--out",
            csv.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let rows = qflag::store::import_csv(&csv).unwrap();
    let stored: Vec<qflag::search::Bucket> = qflag::store::read_jsonl(&buckets).unwrap();
    assert_eq!(rows.len(), stored.len());
    for (row, bucket) in rows.iter().zip(&stored) {
        assert_eq!(row.bucket, bucket.id);
        assert_eq!(row.degree, bucket.degree);
        assert_eq!(row.euler, bucket.euler);
        let mut alpha = bucket.alpha.to_strings();
        alpha.truncate(8);
        assert_eq!(row.alpha, alpha);
    }

    // The anchor rows are present: projective 4-space and the quadric.
    let anchors: Vec<&qflag::store::TableRow> = rows
        .iter()
        .filter(|r| {
            r.alpha == ["1", "0", "0", "0", "0", "120", "0", "0"]
                || r.alpha == ["1", "0", "0", "0", "48", "0", "0", "0"]
        })
        .collect();
    assert_eq!(anchors.len(), 2);

    // Query by degree and by period prefix.
    let classification = run.join("classification.jsonl");
    let out = qflag()
        .args([
            "query",
            "--db",
            zero_loci.to_str().unwrap(),
            "--index",
            classification.to_str().unwrap(),
            "--degree-min",
            "625",
            "--degree-max",
            "625",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let hits = String::from_utf8_lossy(&out.stdout).lines().count();
    assert_eq!(hits, 2); // two presentations of projective 4-space

    let out = qflag()
        .args([
            "query",
            "--db",
            zero_loci.to_str().unwrap(),
            "--index",
            classification.to_str().unwrap(),
            "--alpha-prefix",
            "1,0,0,0,48",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let body = String::from_utf8_lossy(&out.stdout);
    assert_eq!(body.lines().count(), 1);
    assert!(body.contains("\"degree\":512"));

    // Contradictory ranges are empty, not an error.
    let out = qflag()
        .args([
            "query",
            "--db",
            zero_loci.to_str().unwrap(),
            "--index",
            classification.to_str().unwrap(),
            "--degree-min",
            "700",
            "--degree-max",
            "600",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(out.stdout.is_empty());

    // Malformed filters are domain errors.
    let out = qflag()
        .args([
            "query",
            "--db",
            zero_loci.to_str().unwrap(),
            "--index",
            classification.to_str().unwrap(),
            "--alpha-prefix",
            "1,?",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn search_command_on_one_record() {
    let dir = tempfile::tempdir().unwrap();
    let db = dir.path().join("db.jsonl");
    assert!(qflag()
        .args(["classify", "--max-dim", "4", "--out", db.to_str().unwrap()])
        .output()
        .unwrap()
        .status
        .success());
    // Find the projective 4-space record id.
    let records: Vec<qflag::search::ClassificationRecord> =
        qflag::store::read_jsonl(&db).unwrap();
    let p4 = records
        .iter()
        .find(|r| r.dimension == 4 && r.adjacency == vec![vec![0, 5], vec![0, 0]])
        .unwrap();
    let out_path = dir.path().join("zl.jsonl");
    let out = qflag()
        .args([
            "search",
            "--quiver-id",
            &p4.id.to_string(),
            "--db",
            db.to_str().unwrap(),
            "--out",
            out_path.to_str().unwrap(),
            "--order",
            "8",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let results: Vec<qflag::search::ZeroLocusRecord> =
        qflag::store::read_jsonl(&out_path).unwrap();
    assert_eq!(results.len(), 1);
    assert_eq!(results[0].degree, 625);
    assert_eq!(results[0].alpha.to_strings()[5], "120");
}
