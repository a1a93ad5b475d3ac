use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn kaylab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kaylab")).args(args).current_dir(dir).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

fn chain(n: usize) -> String {
    let pairs: Vec<String> = (0..n).flat_map(|a| (a + 1..n).map(move |b| format!("[{a},{b}]"))).collect();
    format!(r#"{{"signature":[{{"name":"<","arity":2,"kind":"order"}}],"size":{n},"relations":{{"<":[{}]}}}}"#, pairs.join(","))
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn kay_of_the_one_edge_triangle() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "tri.struct", r#"{"signature":[{"name":"R","arity":2,"kind":"hyperedge"}],"size":3,"relations":{"R":[[1,0]]}}"#);
    let o = kaylab(&["kay", "--k", "2", "--in", "tri.struct", "--out", "out"], tmp.path());
    assert_eq!(o.status.code(), Some(0));
    let s = json(&tmp.path().join("out/kay.struct"));
    assert_eq!(s["relations"]["S"], serde_json::json!([[0, 1, 2]]));
    let m = json(&tmp.path().join("out/manifest.json"));
    assert_eq!(m["command_line"][0], "kay");
    assert_eq!(m["inputs"]["tri.struct"].as_str().unwrap().len(), 64);
}

#[test]
fn wrong_k_is_an_input_error() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "tri.struct", r#"{"signature":[{"name":"R","arity":2,"kind":"hyperedge"}],"size":3,"relations":{"R":[[0,1]]}}"#);
    assert_eq!(kaylab(&["kay", "--k", "3", "--in", "tri.struct"], tmp.path()).status.code(), Some(3));
    assert_eq!(kaylab(&["kay", "--in", "missing.struct"], tmp.path()).status.code(), Some(3));
}

#[test]
fn five_chain_refutes_r33_with_a_checkable_certificate() {
    let tmp = tempfile::tempdir().unwrap();
    for n in [2, 3, 5, 6] {
        write(tmp.path(), &format!("c{n}.struct"), &chain(n));
    }
    let o = kaylab(&["arrow", "--C", "c5.struct", "--B", "c3.struct", "--A", "c2.struct", "--out", "r5"], tmp.path());
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    let bad = json(&tmp.path().join("r5/bad_colouring.json"));
    assert_eq!(bad[0].as_array().unwrap().len(), 10);
    let v = kaylab(&["verify-cert", "--cert", "r5/cert.json"], tmp.path());
    assert_eq!(v.status.code(), Some(0), "{}", stdout(&v));

    let o = kaylab(&["arrow", "--C", "c6.struct", "--B", "c3.struct", "--A", "c2.struct", "--out", "r6"], tmp.path());
    assert_eq!(o.status.code(), Some(0));
    let v = kaylab(&["verify-cert", "--cert", "r6/cert.json"], tmp.path());
    assert_eq!(v.status.code(), Some(0), "{}", stdout(&v));
}

#[test]
fn tampered_certificate_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    for n in [2, 3, 5] {
        write(tmp.path(), &format!("c{n}.struct"), &chain(n));
    }
    kaylab(&["arrow", "--C", "c5.struct", "--B", "c3.struct", "--A", "c2.struct", "--out", "r"], tmp.path());
    let path = tmp.path().join("r/cert.json");
    let mut doc = json(&path);
    for c in doc["certificate"]["bad_colouring"][0].as_array_mut().unwrap() {
        *c = Value::from(0);
    }
    std::fs::write(&path, serde_json::to_string(&doc).unwrap()).unwrap();
    assert_eq!(kaylab(&["verify-cert", "--cert", "r/cert.json"], tmp.path()).status.code(), Some(1));
}

#[test]
fn tiny_budget_exits_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    for n in [2, 3, 6] {
        write(tmp.path(), &format!("c{n}.struct"), &chain(n));
    }
    let args = ["arrow", "--C", "c6.struct", "--B", "c3.struct", "--A", "c2.struct"];
    let o = kaylab(&[&args[..], &["--budget", "5"]].concat(), tmp.path());
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_kaylab"))
        .args(args)
        .env("KAYLAB_BUDGET_DEFAULT", "5")
        .current_dir(tmp.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn joint_arrow_takes_repeated_patterns() {
    let tmp = tempfile::tempdir().unwrap();
    for n in [1, 2, 3, 6] {
        write(tmp.path(), &format!("c{n}.struct"), &chain(n));
    }
    let o = kaylab(&["joint-arrow", "--C", "c6.struct", "--B", "c3.struct", "--A", "c1.struct:1", "--A", "c2.struct:1", "--out", "j"], tmp.path());
    assert!(matches!(o.status.code(), Some(0 | 1)), "{}", stdout(&o));
    let doc = json(&tmp.path().join("j/cert.json"));
    assert_eq!(doc["patterns"].as_array().unwrap().len(), 2);
    assert_eq!(kaylab(&["verify-cert", "--cert", "j/cert.json"], tmp.path()).status.code(), Some(0));
}

#[test]
fn size_three_ordered_kay_graph_has_two_expansions() {
    let tmp = tempfile::tempdir().unwrap();
    write(
        tmp.path(),
        "k3.struct",
        r#"{"signature":[{"name":"S","arity":4,"kind":"hyperedge"},{"name":"<","arity":2,"kind":"order"}],"size":3,"relations":{"S":[],"<":[[0,1],[0,2],[1,2]]}}"#,
    );
    let o = kaylab(&["expansions", "--base", "k3.struct", "--k", "3", "--format", "machine"], tmp.path());
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["data"]["count"], 2);
}

#[test]
fn enumerate_writes_a_pool_directory() {
    let tmp = tempfile::tempdir().unwrap();
    let o = kaylab(&["enumerate", "--family", "tournaments", "--n", "4", "--out", "pool"], tmp.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&tmp.path().join("pool/pool.json"))["counts"], serde_json::json!([1, 1, 1, 2, 4]));
    let files = std::fs::read_dir(tmp.path().join("pool/pool")).unwrap().count();
    assert_eq!(files, 9);
}

#[test]
fn orderability_verdicts() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(kaylab(&["orderability", "--family", "linear-orders", "--n", "4"], tmp.path()).status.code(), Some(0));
    assert_eq!(kaylab(&["orderability", "--family", "tournaments", "--n", "3"], tmp.path()).status.code(), Some(1));
    assert_eq!(kaylab(&["extract-order", "--family", "linear-orders", "--n", "4"], tmp.path()).status.code(), Some(0));
}

#[test]
fn cameron_structure_on_four_leaves_is_rigid() {
    let tmp = tempfile::tempdir().unwrap();
    write(
        tmp.path(),
        "t4.struct",
        r#"{"signature":[{"name":"R","arity":2,"kind":"plain"}],"size":4,"relations":{"R":[[0,1],[1,2],[2,0],[0,3],[1,3],[2,3]]}}"#,
    );
    let o = kaylab(&["cameron", "--tournament-file", "t4.struct", "--tree", "((0,1),(2,3))", "--out", "cam"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(kaylab(&["rigidity", "--file", "cam/cameron.struct"], tmp.path()).status.code(), Some(0));
    assert_eq!(kaylab(&["rigidity", "--file", "t4.struct"], tmp.path()).status.code(), Some(1));
    assert_eq!(kaylab(&["cameron", "--tournament-file", "t4.struct", "--tree", "((0,1),(2,2))"], tmp.path()).status.code(), Some(3));
}

#[test]
fn parity_and_reconstruction_commands() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "s.struct", r#"{"signature":[{"name":"S","arity":3,"kind":"hyperedge"}],"size":4,"relations":{"S":[[0,1,2]]}}"#);
    let o = kaylab(&["check-parity", "--in", "s.struct", "--preimage"], tmp.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("[0, 1, 2, 3]"));
    write(tmp.path(), "t.struct", r#"{"signature":[{"name":"S","arity":3,"kind":"hyperedge"}],"size":4,"relations":{"S":[[0,1,2],[0,1,3]]}}"#);
    assert_eq!(kaylab(&["check-parity", "--in", "t.struct", "--preimage"], tmp.path()).status.code(), Some(0));
    let o = kaylab(&["reconstruct", "--in", "t.struct", "--star", "2", "--out", "r"], tmp.path());
    assert_eq!(o.status.code(), Some(0));
    let k = kaylab(&["kay", "--in", "r/reconstructed.struct", "--out", "k"], tmp.path());
    assert_eq!(k.status.code(), Some(0));
    assert_eq!(json(&tmp.path().join("k/kay.struct"))["relations"]["S"], serde_json::json!([[0, 1, 2], [0, 1, 3]]));
    assert_eq!(kaylab(&["star-extend", "--in", "r/reconstructed.struct"], tmp.path()).status.code(), Some(0));
    let c = kaylab(&["complement", "--in", "r/reconstructed.struct"], tmp.path());
    assert!(stdout(&c).contains("complement of S"));
}

#[test]
fn amalgam_of_two_edges_over_a_vertex() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "v.struct", r#"{"signature":[{"name":"R","arity":2,"kind":"hyperedge"}],"size":1,"relations":{"R":[]}}"#);
    write(tmp.path(), "e.struct", r#"{"signature":[{"name":"R","arity":2,"kind":"hyperedge"}],"size":2,"relations":{"R":[[0,1]]}}"#);
    let o = kaylab(&["amalgam", "--base", "v.struct", "--left", "e.struct", "--right", "e.struct", "--out", "am"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let d = json(&tmp.path().join("am/amalgam.struct"));
    assert_eq!(d["size"], 3);
    assert_eq!(d["relations"]["R"].as_array().unwrap().len(), 2);
}

#[test]
fn non_ramsey_small_run_emits_a_checkable_sample() {
    let tmp = tempfile::tempdir().unwrap();
    let o = kaylab(&["non-ramsey", "--k", "3", "--max-n", "6", "--out", "nr"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(kaylab(&["verify-cert", "--cert", "nr/sample/cert.json"], tmp.path()).status.code(), Some(0));
}

#[test]
fn deterministic_tier_one_replays() {
    let tmp = tempfile::tempdir().unwrap();
    let a = kaylab(&["verify-suite", "--tier", "1", "--deterministic", "--out", "d1"], tmp.path());
    let b = kaylab(&["verify-suite", "--tier", "1", "--deterministic", "--out", "d2", "--replay", "d1"], tmp.path());
    assert!(stdout(&b).contains("[PASS] criterion 12"), "{}", stdout(&b));
    assert_eq!(a.status.code(), Some(1), "criterion 4 fails as pinned");
    let m = json(&tmp.path().join("d2/manifest.json"));
    assert!(m["wall_clock_secs"].is_null());
    assert_eq!(m["verdicts"]["criterion_04"], "fail");
    assert_eq!(std::fs::read(tmp.path().join("d1/manifest.json")).unwrap(), std::fs::read(tmp.path().join("d2/manifest.json")).unwrap());
}
