use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use verso::harness::CORPUS;
use verso::query::prepare;

fn verso(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_verso"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn data(path: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(path)
}

fn example_store(dir: &Path) -> PathBuf {
    let store = dir.join("example.vrs");
    let manifest = data("example/manifest.tsv");
    let o = verso(&["load", "--manifest", manifest.to_str().unwrap(), "--out", store.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    store
}

#[test]
fn load_prints_the_example_summary() {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("s.vrs");
    let manifest = data("example/manifest.tsv");
    let o = verso(&["load", "--manifest", manifest.to_str().unwrap(), "--out", store.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "2 versions, 2 graphs, 6 flat rows, 5 condensed entries");
    let o = verso(&["stats", "--store", store.to_str().unwrap()]);
    assert!(stdout(&o).starts_with("2 versions, 2 graphs, 6 flat rows, 5 condensed entries"));
}

#[test]
fn empty_manifest_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("m.tsv");
    std::fs::write(&manifest, "# nothing here\n").unwrap();
    let out = dir.path().join("s.vrs");
    let o = verso(&["load", "--manifest", manifest.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("manifest has no versions"), "{}", stderr(&o));
}

#[test]
fn version_query_under_both_engines() {
    let dir = tempfile::tempdir().unwrap();
    let store = example_store(dir.path());
    let query = data("queries/version.rq");
    let o = verso(&[
        "query", "--store", store.to_str().unwrap(), "--query", query.to_str().unwrap(),
        "--engine", "both", "--expand",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let mut rows: Vec<String> = stdout(&o).lines().skip(1).map(str::to_owned).collect();
    rows.sort();
    // Version v:1 holds both graphs, so ng:IGN contributes 11.
    assert_eq!(rows, vec!["10.5", "11", "9.1"]);
    assert_eq!(stderr(&o).trim(), "EQUIVALENT");
    let flat = verso(&[
        "query", "--store", store.to_str().unwrap(), "--query", query.to_str().unwrap(), "--engine", "flat",
    ]);
    let mut flat_rows: Vec<String> = stdout(&flat).lines().skip(1).map(str::to_owned).collect();
    flat_rows.sort();
    assert_eq!(flat_rows, rows);
}

#[test]
fn every_corpus_file_is_equivalent() {
    let dir = tempfile::tempdir().unwrap();
    let store = example_store(dir.path());
    let mut verdicts = 0;
    for q in &CORPUS {
        let path = data(&format!("queries/{}.rq", q.name));
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(prepare(&text).unwrap(), prepare(q.text).unwrap(), "{} drifted from the corpus", q.name);
        let o = verso(&[
            "query", "--store", store.to_str().unwrap(), "--query", path.to_str().unwrap(),
            "--engine", "both", "--format", "json",
        ]);
        assert!(o.status.success(), "{}: {}", q.name, stderr(&o));
        if stderr(&o).trim() == "EQUIVALENT" {
            verdicts += 1;
        }
    }
    assert_eq!(verdicts, 17);
}

#[test]
fn missing_store_is_an_io_error() {
    let query = data("queries/version.rq");
    let o = verso(&["query", "--store", "/nonexistent/store.vrs", "--query", query.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("/nonexistent/store.vrs"));
}

#[test]
fn syntax_errors_report_positions() {
    let dir = tempfile::tempdir().unwrap();
    let store = example_store(dir.path());
    let query = dir.path().join("bad.rq");
    std::fs::write(&query, "SELECT ?s WHERE {\n  ?s ?p }").unwrap();
    let o = verso(&["query", "--store", store.to_str().unwrap(), "--query", query.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("2:9"), "{}", stderr(&o));
}

#[test]
fn explain_prints_both_plans() {
    let query = data("queries/concat-by-height.rq");
    let o = verso(&["query", "--store", "unused", "--query", query.to_str().unwrap(), "--explain"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("flat plan:") && out.contains("condensed plan:"));
    assert!(out.contains("(transform ?height"), "{out}");
}

#[test]
fn fuzz_passes_and_catches_a_broken_merge() {
    let o = verso(&["fuzz", "--seed", "42", "--iters", "200"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("0 failures"));
    let o = verso(&["fuzz", "--seed", "42", "--iters", "0"]);
    assert!(o.status.success());
    let o = verso(&["fuzz", "--seed", "42", "--iters", "500", "--mutation", "merge-unions-versions"]);
    assert!(!o.status.success());
    assert!(stdout(&o).contains("counterexample"), "{}", stdout(&o));
}

#[test]
fn bench_storage_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let o = verso(&[
        "bench", "--versions", "5", "--steps", "0,5,10", "--runs", "1", "--warmup", "0",
        "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].starts_with("versions,steps,flat_rows,condensed_entries"));
    for line in &lines[1..] {
        let cells: Vec<u64> = line.split(',').take(4).map(|c| c.parse().unwrap()).collect();
        assert!(cells[3] <= cells[2], "{line}");
    }
}
