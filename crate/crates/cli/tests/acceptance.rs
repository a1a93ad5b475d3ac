//! Acceptance battery: criteria 1 to 11 in process, criterion 12 through
//! two deterministic runs of the binary. Prints one line per criterion.
//!
//! Criterion 4 pins a complement law that is false for every k; its FAIL is
//! expected, and the run checks that the opposite law holds on every
//! instance instead.

use std::path::Path;
use std::process::{Command, ExitCode};

use kaylab::suite::{run_criterion, SuiteOptions, CRITERIA};

/// Criteria whose pinned statement is known to be unattainable.
const EXPECTED_FAILURES: [u8; 1] = [4];

fn files(root: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).expect("readable") {
            let path = entry.expect("entry").path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(root).expect("under root").to_string_lossy().into_owned();
                out.push((rel, std::fs::read(&path).expect("readable")));
            }
        }
    }
    out.sort();
    out
}

fn suite_run(dir: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_kaylab"))
        .args(["verify-suite", "--deterministic", "--tier", "2", "--out"])
        .arg(dir)
        .output()
        .expect("binary runs")
}

fn main() -> ExitCode {
    let opts = SuiteOptions::default();
    let mut unexpected = Vec::new();
    for c in &CRITERIA {
        let r = run_criterion(c, &opts).expect("criterion runs");
        println!("{} [{:.1}s, limit {}s]", r.line(), r.elapsed.as_secs_f64(), r.limit_secs);
        let expected = !EXPECTED_FAILURES.contains(&r.id);
        if r.passed != expected {
            unexpected.push(format!("criterion {} {}", r.id, if r.passed { "passed unexpectedly" } else { "failed" }));
        }
        if !r.within_limit() {
            unexpected.push(format!("criterion {} exceeded {}s", r.id, r.limit_secs));
        }
        if r.id == 4 && r.metrics["opposite_violations"] != 0 {
            unexpected.push("criterion 4: the opposite law has violations".into());
        }
    }

    let tmp = tempfile::tempdir().expect("temp dir");
    let (d1, d2) = (tmp.path().join("run1"), tmp.path().join("run2"));
    let (o1, o2) = (suite_run(&d1), suite_run(&d2));
    let (f1, f2) = (files(&d1), files(&d2));
    let same_files = !f1.is_empty() && f1 == f2;
    let same_output = o1.stdout == o2.stdout && o1.status.code() == o2.status.code();
    let differing = f1.iter().zip(&f2).filter(|(a, b)| a != b).count() + f1.len().abs_diff(f2.len());
    let passed = same_files && same_output;
    println!(
        "[{}] criterion 12 (replay determinism): {} files per run, {differing} differing, stdout {}",
        if passed { "PASS" } else { "FAIL" },
        f1.len(),
        if same_output { "identical" } else { "differs" }
    );
    if !passed {
        unexpected.push("criterion 12 failed".into());
    }

    if unexpected.is_empty() {
        println!("acceptance: all criteria as expected; criterion 4 fails as pinned (see the complement law note)");
        ExitCode::SUCCESS
    } else {
        for u in &unexpected {
            println!("acceptance: {u}");
        }
        ExitCode::FAILURE
    }
}
