//! Experiment manifests, written next to every run's artifacts.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::commands::Report;

#[derive(Clone, Debug, Default, Serialize)]
pub struct Manifest {
    /// Arguments after the program name, without `--out` and `--replay`.
    pub command_line: Vec<String>,
    /// Input path to SHA-256 of its contents.
    pub inputs: BTreeMap<String, String>,
    pub node_budget: u64,
    pub enumeration_budget: u64,
    pub workers: usize,
    pub deterministic: bool,
    pub seed: u64,
    pub verdicts: BTreeMap<String, String>,
    pub certificates: Vec<String>,
    /// Omitted under `--deterministic`.
    pub wall_clock_secs: Option<f64>,
}

impl Manifest {
    /// Adds the verdicts and certificate paths of a finished command.
    pub fn record(&mut self, report: &Report) {
        self.verdicts.extend(report.verdicts.iter().cloned());
        self.certificates = report
            .artifacts
            .iter()
            .filter(|a| a.name.ends_with("cert.json"))
            .map(|a| a.name.clone())
            .collect();
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serialisable");
        s.push('\n');
        s
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Drops the run-specific directory flags so replays record the same line.
pub fn normalized_args(args: impl IntoIterator<Item = String>) -> Vec<String> {
    let mut out = Vec::new();
    let mut skip = false;
    for a in args {
        if skip {
            skip = false;
            continue;
        }
        if a == "--out" || a == "--replay" {
            skip = true;
        } else if !(a.starts_with("--out=") || a.starts_with("--replay=")) {
            out.push(a);
        }
    }
    out
}

/// Relative paths of all files under `root`, sorted.
pub fn list_files(root: &Path) -> std::io::Result<Vec<String>> {
    fn walk(root: &Path, dir: &Path, out: &mut Vec<String>) -> std::io::Result<()> {
        for entry in std::fs::read_dir(dir)? {
            let path = entry?.path();
            if path.is_dir() {
                walk(root, &path, out)?;
            } else {
                let rel = path.strip_prefix(root).expect("under root");
                out.push(rel.to_string_lossy().replace('\\', "/"));
            }
        }
        Ok(())
    }
    let mut out = Vec::new();
    walk(root, root, &mut out)?;
    out.sort();
    Ok(out)
}
