//! Subcommand implementations. Each returns a [`Report`]; writing and
//! printing happen in `main`.

use std::fmt;
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};

use kaylab::cameron::{cameron_structure, BinaryTree};
use kaylab::cert::{check_document, CertificateDocument, PatternRef};
use kaylab::class::{
    enumerate_class, family_amalgam, free_amalgam, kay_labelled, order_amalgam, tournament_amalgam, AmalgamationInstance,
};
use kaylab::embed::{automorphisms, first_embedding, Embedding};
use kaylab::expansion::{check_member, count_expansions, non_ramsey_witness};
use kaylab::io;
use kaylab::kay::{
    complement_expansion, hypergraph_parts, kay, kay_class_membership, reconstruct, satisfies_parity, star_extension,
    ExpandedStructure, ParityCheck, KAY_SYMBOL,
};
use kaylab::order::{build_atlas, orderability_search, two_erp_order_extraction, ExtractOptions, ExtractionOutcome, Orderability};
use kaylab::ramsey::{joint_oscillation, ArrowCertificate, Mode, Pattern, SearchOptions, Verdict};
use kaylab::suite::{run_suite, Artifact, SuiteOptions};
use kaylab::verify::{check_expansion_colouring, CertCheck};
use kaylab::{Signature, Structure};
use serde_json::{json, Value};

use crate::manifest::{list_files, sha256_hex, Manifest};
use crate::{Command, Global};

#[derive(Debug)]
pub enum CliError {
    Core(kaylab::Error),
    Input(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Input(s) => f.write_str(s),
        }
    }
}

impl From<kaylab::Error> for CliError {
    fn from(e: kaylab::Error) -> Self {
        CliError::Core(e)
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Success,
    Fails,
    Budget,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Success => 0,
            Status::Fails => 1,
            Status::Budget => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Status::Success => "success",
            Status::Fails => "fails",
            Status::Budget => "budget_exhausted",
        }
    }

    fn of_verdict(v: Verdict) -> Status {
        match v {
            Verdict::Holds | Verdict::Vacuous => Status::Success,
            Verdict::Fails => Status::Fails,
            Verdict::BudgetExhausted => Status::Budget,
        }
    }
}

pub struct Report {
    pub status: Status,
    /// Human-readable summary.
    pub lines: Vec<String>,
    /// Printed after the summary in text mode when no `--out` is given.
    pub document: Option<String>,
    pub data: Value,
    pub verdicts: Vec<(String, String)>,
    pub artifacts: Vec<Artifact>,
}

impl Report {
    fn new(status: Status, verdict: &str) -> Self {
        Report {
            status,
            lines: Vec::new(),
            document: None,
            data: Value::Null,
            verdicts: vec![("result".into(), verdict.into())],
            artifacts: Vec::new(),
        }
    }

    fn line(mut self, l: impl Into<String>) -> Self {
        self.lines.push(l.into());
        self
    }

    fn structure(mut self, name: &str, s: &Structure) -> Self {
        let text = io::to_string(s);
        self.document = Some(text.clone());
        self.artifacts.push(Artifact { name: name.into(), contents: text });
        self
    }
}

fn read_input(path: &Path, manifest: &mut Manifest) -> Result<Structure> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    manifest.inputs.insert(path.display().to_string(), sha256_hex(&bytes));
    let text = String::from_utf8(bytes).map_err(|_| CliError::Input(format!("{}: not UTF-8", path.display())))?;
    Ok(io::from_str(&text)?)
}

fn parse_list(text: &str) -> Result<Vec<usize>> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|t| t.trim().parse().map_err(|_| CliError::Input(format!("bad index {t:?} in {text:?}"))))
        .collect()
}

fn check_arity(s: &Structure, k: Option<usize>, expected: impl Fn(usize) -> usize) -> Result<()> {
    let (edges, _) = hypergraph_parts(s, 2)?;
    match k {
        Some(k) if edges.arity() != expected(k) => Err(CliError::Input(format!(
            "--k {k} needs hyperedges of arity {}, found {}",
            expected(k),
            edges.arity()
        ))),
        _ => Ok(()),
    }
}

fn search_options(global: &Global) -> SearchOptions {
    // The global rayon pool already has the requested width.
    SearchOptions { budget: global.budget, workers: 0 }
}

pub fn run(command: &Command, global: &Global, manifest: &mut Manifest) -> Result<Report> {
    match command {
        Command::Kay { input, k } => {
            let h = read_input(input, manifest)?;
            check_arity(&h, *k, |k| k)?;
            let s = kay(&h)?;
            Ok(Report::new(Status::Success, "computed")
                .line(format!("Kay-graph: {} vertices, {} hyperedges", s.size(), s.relation_len(0)))
                .structure("kay.struct", &s))
        }
        Command::CheckParity { input, k, preimage } => {
            let s = read_input(input, manifest)?;
            check_arity(&s, *k, |k| k + 1)?;
            let mut report = match satisfies_parity(&s)? {
                ParityCheck::Holds => Report::new(Status::Success, "holds").line("parity condition holds"),
                ParityCheck::Violated(set) => {
                    let mut r = Report::new(Status::Fails, "fails").line(format!("parity condition fails on {set:?}"));
                    r.data = json!({ "violation": set });
                    r
                }
            };
            if *preimage {
                let m = kay_class_membership(&s, global.enum_budget)?;
                if let Some(h) = &m.preimage {
                    report = report.structure("preimage.struct", &Structure::from_edge_set("R", h, s.is_ordered()));
                }
                report = report.line(format!("exhaustive preimage search agrees: member = {}", m.member));
            }
            Ok(report)
        }
        Command::Reconstruct { input, star } => {
            let s = read_input(input, manifest)?;
            let h = reconstruct(&s, *star)?;
            Ok(Report::new(Status::Success, "computed")
                .line(format!("reconstructed with star {star}: {} edges", h.relation_len(0)))
                .structure("reconstructed.struct", &h))
        }
        Command::StarExtend { input } => {
            let d = ExpandedStructure::from_structure(&read_input(input, manifest)?)?;
            let e = star_extension(&d)?;
            Ok(Report::new(Status::Success, "computed")
                .line(format!("star vertex {} added; S(x, star) = R(x) checked on every k-set", d.size()))
                .structure("star_extension.struct", &e.to_structure()))
        }
        Command::Complement { input } => {
            let a = ExpandedStructure::from_structure(&read_input(input, manifest)?)?;
            let c = complement_expansion(&a)?;
            let law = if c.kay() == a.kay() { "S' = S" } else { "S' is the complement of S" };
            Ok(Report::new(Status::Success, "computed")
                .line(format!("k = {}: {law}", a.k()))
                .structure("complement.struct", &c.to_structure()))
        }
        Command::Enumerate { family, k, n } => {
            let pool = enumerate_class(*family, *k, *n, global.enum_budget)?;
            let counts = pool.counts();
            let mut report = Report::new(Status::Success, "enumerated")
                .line(format!("{family}, k = {k}, sizes 0..={n}: {counts:?} members ({} total)", pool.len()));
            for m in 0..=*n {
                for (i, s) in pool.of_size(m).iter().enumerate() {
                    report.artifacts.push(Artifact { name: format!("pool/n{m}_{i:05}.struct"), contents: io::to_string(s) });
                }
            }
            report.data = json!({ "family": family, "k": k, "n": n, "counts": counts });
            report.artifacts.push(Artifact { name: "pool.json".into(), contents: pretty(&report.data) });
            Ok(report)
        }
        Command::Amalgam { base, left, right, left_map, right_map, family } => {
            let a = read_input(base, manifest)?;
            let b = read_input(left, manifest)?;
            let c = read_input(right, manifest)?;
            let embedding = |map: &Option<String>, into: &Structure, side: &str| -> Result<Embedding> {
                match map {
                    Some(m) => Ok(Embedding(parse_list(m)?)),
                    None => first_embedding(&a, into)?.ok_or_else(|| CliError::Input(format!("the base does not embed in the {side} structure"))),
                }
            };
            let e = embedding(left_map, &b, "left")?;
            let f = embedding(right_map, &c, "right")?;
            let inst = AmalgamationInstance::new(a, b, c, e, f)?;
            let am = match family {
                Some(fam) => family_amalgam(*fam, &inst)
                    .ok_or_else(|| CliError::Input(format!("no amalgam construction for {fam}")))??,
                None if *inst.b.signature() == Signature::tournament() => tournament_amalgam(&inst)?,
                None if inst.b.is_ordered() => order_amalgam(&inst)?,
                None => free_amalgam(&inst)?,
            };
            kaylab::class::check_amalgam(&inst, &am.d, &am.g, &am.h)?;
            let mut report = Report::new(Status::Success, "amalgamated")
                .line(format!("amalgam on {} vertices; g = {:?}, h = {:?}", am.d.size(), am.g.map(), am.h.map()))
                .structure("amalgam.struct", &am.d);
            report.data = json!({ "g": am.g.map(), "h": am.h.map() });
            report.artifacts.push(Artifact { name: "maps.json".into(), contents: pretty(&report.data) });
            Ok(report)
        }
        Command::Arrow { c, b, a, colors, degree, mode } => {
            let pattern = Pattern { a: read_input(a, manifest)?, colours: *colors, degree: *degree };
            arrow(global, manifest, c, b, vec![pattern], *mode)
        }
        Command::JointArrow { c, b, a, colors, mode } => {
            let mut patterns = Vec::new();
            for spec in a {
                let (path, degree) = spec
                    .rsplit_once(':')
                    .ok_or_else(|| CliError::Input(format!("expected FILE:DEGREE, got {spec:?}")))?;
                let degree = degree.parse().map_err(|_| CliError::Input(format!("bad degree in {spec:?}")))?;
                patterns.push(Pattern { a: read_input(Path::new(path), manifest)?, colours: *colors, degree });
            }
            arrow(global, manifest, c, b, patterns, *mode)
        }
        Command::Expansions { base, k } => {
            let s = read_input(base, manifest)?;
            let count = count_expansions(&s, *k, global.enum_budget)?;
            let mut report = Report::new(Status::Success, &count.count.to_string()).line(format!("{} expansions (k = {k})", count.count));
            if let Some(ws) = &count.witnesses {
                for (i, r) in ws.iter().enumerate() {
                    report.artifacts.push(Artifact {
                        name: format!("expansions/R_{i:03}.struct"),
                        contents: io::to_string(&Structure::from_edge_set("R", r, s.is_ordered())),
                    });
                }
            }
            report.data = json!({ "k": k, "count": count.count });
            Ok(report)
        }
        Command::NonRamsey { k, max_n } => non_ramsey(global, *k, *max_n),
        Command::Orderability { family, n, k } => {
            let pool = enumerate_class(*family, *k, *n, global.enum_budget)?;
            let atlas = build_atlas(&pool)?;
            let scope = format!("{family} up to size {n}");
            let (status, verdict, line, data) = match orderability_search(&pool, &atlas)? {
                Orderability::Orderable(def) => {
                    let ids: Vec<usize> = def.chosen.iter().filter_map(|c| atlas.id(c)).collect();
                    (Status::Success, "orderable", format!("{scope}: orderable by 2-types {ids:?}"), json!({ "chosen": def.chosen, "type_ids": ids }))
                }
                Orderability::SelfConverse { ty, member, pair } => (
                    Status::Fails,
                    "self_converse",
                    format!("{scope}: 2-type {ty} is its own converse on {pair:?}; no definition over these types orders all members"),
                    json!({ "type": ty, "pair": pair, "member": io::to_string(&member) }),
                ),
                Orderability::Exhausted { candidates, failures, truncated } => (
                    Status::Fails,
                    "exhausted",
                    format!("{scope}: all {candidates} selections leave a 3-cycle on some member"),
                    json!({
                        "candidates": candidates,
                        "truncated": truncated,
                        "failures": failures.iter().map(|f| json!({ "chosen": f.chosen, "cycle": f.cycle, "member": io::to_string(&f.member) })).collect::<Vec<_>>(),
                    }),
                ),
            };
            let mut report = Report::new(status, verdict).line(format!("{} members, {} realized 2-types", pool.len(), atlas.types.len())).line(line);
            report.data = data;
            report.artifacts.push(Artifact { name: "orderability.json".into(), contents: pretty(&report.data) });
            Ok(report)
        }
        Command::Rigidity { file } => {
            let s = read_input(file, manifest)?;
            let auts = automorphisms(&s);
            let rigid = auts.len() == 1;
            let mut report = Report::new(if rigid { Status::Success } else { Status::Fails }, if rigid { "rigid" } else { "not_rigid" })
                .line(format!("|Aut| = {}", auts.len()));
            if let Some(g) = auts.iter().find(|g| g.iter().enumerate().any(|(i, &v)| i != v)) {
                report = report.line(format!("non-identity automorphism {g:?}"));
            }
            report.data = json!({ "order": auts.len(), "automorphisms": auts.iter().take(64).collect::<Vec<_>>() });
            Ok(report)
        }
        Command::Cameron { tournament_file, tree, assignment } => {
            let t = read_input(tournament_file, manifest)?;
            let tree = BinaryTree::parse(tree)?;
            let assignment = match assignment {
                Some(a) => parse_list(a)?,
                None => (0..t.size()).collect(),
            };
            let s = cameron_structure(&t, &tree, &assignment)?;
            Ok(Report::new(Status::Success, "computed")
                .line(format!("{} C-triples; |Aut| = {}", s.relation_len(1), automorphisms(&s).len()))
                .structure("cameron.struct", &s))
        }
        Command::ExtractOrder { family, n, k, order_budget, joint } => {
            let pool = enumerate_class(*family, *k, *n, global.enum_budget)?;
            let opts = ExtractOptions { order_budget: *order_budget, verify_joint: *joint, search: search_options(global) };
            let ex = two_erp_order_extraction(&pool, opts)?;
            let (status, verdict, line) = match &ex.outcome {
                ExtractionOutcome::Ordered(def) => (Status::Success, "ordered", format!("extracted definition with {} 2-types; linear on every member", def.chosen.len())),
                ExtractionOutcome::SelfConverse { ty } => (Status::Fails, "self_converse", format!("2-type {ty} is self-converse")),
                ExtractionOutcome::NoConstantCopy { b } => (Status::Fails, "no_constant_copy", format!("no candidate has a copy of {} with constant directions", io::to_string(b).trim_end())),
                ExtractionOutcome::Inconsistent { ty, .. } => (Status::Fails, "inconsistent", format!("2-type {ty} received both directions")),
                ExtractionOutcome::Budget { .. } => (Status::Budget, "budget_exhausted", "order budget exhausted".to_string()),
                ExtractionOutcome::NotLinear { reason, .. } => (Status::Fails, "not_linear", format!("merged definition is not linear: {reason}")),
            };
            let mut report = Report::new(status, verdict).line(format!("{family} up to size {n}: {line}"));
            match ex.jep {
                Some(false) => report = report.line("warning: the pool fails JEP"),
                None => report = report.line("note: JEP was not checked (pool too large)"),
                Some(true) => {}
            }
            report.data = json!({
                "outcome": verdict,
                "jep": ex.jep,
                "steps": ex.steps.iter().map(|s| json!({
                    "B": io::to_string(&s.b),
                    "C": io::to_string(&s.c),
                    "rank": s.rank,
                    "copy": s.copy,
                    "increasing": s.increasing,
                    "joint": s.joint,
                })).collect::<Vec<_>>(),
            });
            report.artifacts.push(Artifact { name: "extraction.json".into(), contents: pretty(&report.data) });
            Ok(report)
        }
        Command::VerifySuite { tier, replay } => verify_suite(global, manifest, *tier, replay.as_deref()),
        Command::VerifyCert { cert } => {
            let text = std::fs::read_to_string(cert).map_err(|e| CliError::Input(format!("{}: {e}", cert.display())))?;
            manifest.inputs.insert(cert.display().to_string(), sha256_hex(text.as_bytes()));
            let doc = CertificateDocument::from_json(&text)?;
            let dir = cert.parent().unwrap_or(Path::new("."));
            for r in doc.references() {
                let p = dir.join(r);
                let bytes = std::fs::read(&p).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?;
                manifest.inputs.insert(p.display().to_string(), sha256_hex(&bytes));
            }
            Ok(match check_document(&doc, dir)? {
                CertCheck::Confirmed => Report::new(Status::Success, "confirmed").line("certificate confirmed"),
                CertCheck::Rejected(why) => Report::new(Status::Fails, "rejected").line(format!("certificate rejected: {why}")),
                CertCheck::Unchecked(why) => Report::new(Status::Budget, "unchecked").line(format!("certificate not checked: {why}")),
            })
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serialisable");
    s.push('\n');
    s
}

fn arrow(global: &Global, manifest: &mut Manifest, c: &Path, b: &Path, patterns: Vec<Pattern>, mode: Mode) -> Result<Report> {
    let cs = read_input(c, manifest)?;
    let bs = read_input(b, manifest)?;
    let cert = joint_oscillation(&cs, &bs, &patterns, mode, search_options(global))?;
    let mut report = Report::new(Status::of_verdict(cert.verdict), cert.verdict.name())
        .line(format!("verdict: {} ({} nodes, {} blocks)", cert.verdict.name(), cert.nodes, cert.blocks.len()));
    if let Some(note) = &cert.note {
        report = report.line(format!("note: {note}"));
    }
    if let Some(col) = &cert.bad_colouring {
        report = report.line("bad colouring (point: colour):");
        for (g, colours) in col.iter().enumerate() {
            for (p, colour) in cert.points[g].iter().zip(colours) {
                report = report.line(format!("  pattern {g} {p:?}: {colour}"));
            }
        }
        report.artifacts.push(Artifact { name: "bad_colouring.json".into(), contents: pretty(&colouring_json(&cert)) });
    }
    if let Some(copy) = &cert.good_copy {
        report = report.line(format!("good copy at the last refuted branch: {copy:?}"));
    }
    report.artifacts.push(Artifact { name: "C.struct".into(), contents: io::to_string(&cs) });
    report.artifacts.push(Artifact { name: "B.struct".into(), contents: io::to_string(&bs) });
    let mut refs = Vec::new();
    for (i, p) in patterns.iter().enumerate() {
        let name = format!("A{i}.struct");
        report.artifacts.push(Artifact { name: name.clone(), contents: io::to_string(&p.a) });
        refs.push(PatternRef { a: name, colours: p.colours, degree: p.degree });
    }
    report.data = serde_json::to_value(&cert).expect("serialisable");
    let doc = CertificateDocument::Arrow { c: "C.struct".into(), b: "B.struct".into(), patterns: refs, mode, certificate: cert };
    report.artifacts.push(Artifact { name: "cert.json".into(), contents: doc.to_json() });
    Ok(report)
}

fn colouring_json(cert: &ArrowCertificate) -> Value {
    let col = cert.bad_colouring.as_ref().expect("fails verdict");
    Value::Array(
        col.iter()
            .zip(&cert.points)
            .map(|(colours, points)| {
                Value::Array(points.iter().zip(colours).map(|(p, c)| json!({ "point": p, "colour": c })).collect())
            })
            .collect(),
    )
}

fn non_ramsey(global: &Global, k: usize, max_n: usize) -> Result<Report> {
    let rejected = AtomicU64::new(0);
    let sample = AtomicU64::new(u64::MAX);
    let report = non_ramsey_witness(k, max_n, global.enum_budget, |m, code, s, check| {
        let masks: Vec<u64> = s.iter().collect();
        let col: Vec<u64> = check.colouring.iter().collect();
        if !matches!(check_expansion_colouring(k, m, &masks, &col), Ok(Ok(()))) {
            rejected.fetch_add(1, Ordering::Relaxed);
        }
        if m == max_n && check.copies > 0 {
            sample.fetch_min(code, Ordering::Relaxed);
        }
    })?;
    let rejected = rejected.into_inner();
    let members: u64 = report.sizes.iter().map(|t| t.members).sum();
    let copies: u64 = report.sizes.iter().map(|t| t.copies).sum();
    let ok = report.holds() && rejected == 0;
    let mut out = Report::new(if ok { Status::Success } else { Status::Fails }, if ok { "no_monochromatic_copy" } else { "failed" })
        .line(format!(
            "k = {k}, n <= {max_n}: {members} ordered Kay-graphs, {copies} copies of B*, {} monochromatic, {rejected} colourings rejected by the validator",
            report.failures.len()
        ));
    if report.exploratory {
        out = out.line("note: k = 2 is exploratory");
    }
    let sample = sample.into_inner();
    if sample != u64::MAX {
        let s = kay_labelled(max_n, k, sample);
        let check = check_member(k, &s)?;
        out.artifacts.push(Artifact { name: "sample/C.struct".into(), contents: io::to_string(&Structure::from_edge_set(KAY_SYMBOL, &s, true)) });
        out.artifacts.push(Artifact { name: "sample/colouring.struct".into(), contents: io::to_string(&Structure::from_edge_set("R", &check.colouring, true)) });
        let doc = CertificateDocument::ExpansionColouring { k, c: "C.struct".into(), colouring: "colouring.struct".into() };
        out.artifacts.push(Artifact { name: "sample/cert.json".into(), contents: doc.to_json() });
    }
    out.data = serde_json::to_value(&report).expect("serialisable");
    out.artifacts.push(Artifact { name: "report.json".into(), contents: pretty(&out.data) });
    Ok(out)
}

fn verify_suite(global: &Global, manifest: &mut Manifest, tier: u8, replay: Option<&Path>) -> Result<Report> {
    let opts = SuiteOptions { tier, seed: global.seed, search: search_options(global), budget: global.enum_budget };
    let deterministic = global.deterministic;
    let results = run_suite(&opts, |r| {
        if deterministic {
            println!("{}", r.line());
        } else {
            println!("{} [{:.2}s of {}s]", r.line(), r.elapsed.as_secs_f64(), r.limit_secs);
        }
    })?;
    let mut report = Report::new(Status::Success, "");
    report.verdicts.clear();
    let mut all_pass = results.iter().all(|r| r.passed);
    report.verdicts.push(("suite".into(), if all_pass { "pass" } else { "fail" }.into()));
    let mut summary = Vec::new();
    for r in &results {
        report.verdicts.push((format!("criterion_{:02}", r.id), if r.passed { "pass" } else { "fail" }.into()));
        report.artifacts.extend(r.artifacts.iter().cloned());
        let mut entry = serde_json::to_value(r).expect("serialisable");
        if !deterministic {
            entry["elapsed_secs"] = json!(r.elapsed.as_secs_f64());
        }
        summary.push(entry);
    }
    report.data = Value::Array(summary);
    report.artifacts.push(Artifact { name: "suite.json".into(), contents: pretty(&report.data) });
    let line = match replay {
        Some(dir) => {
            let mut expected = manifest.clone();
            expected.record(&report);
            let diffs = replay_differences(dir, &report, &expected.to_json())?;
            let passed = diffs.is_empty();
            all_pass &= passed;
            let detail = if passed {
                format!("{} artifacts and the manifest match {}", report.artifacts.len(), dir.display())
            } else {
                format!("{} differences from {}: {}", diffs.len(), dir.display(), diffs.iter().take(5).cloned().collect::<Vec<_>>().join(", "))
            };
            format!("[{}] criterion 12 (replay determinism): {detail}", if passed { "PASS" } else { "FAIL" })
        }
        None => "[SKIP] criterion 12 (replay determinism): rerun with --replay DIR to compare".to_string(),
    };
    println!("{line}");
    report.status = if all_pass { Status::Success } else { Status::Fails };
    Ok(report)
}

/// Files that differ between this run's artifacts and manifest and an
/// earlier output directory.
fn replay_differences(dir: &Path, report: &Report, manifest: &str) -> Result<Vec<String>> {
    let earlier = list_files(dir).map_err(|e| CliError::Input(format!("{}: {e}", dir.display())))?;
    let mut names: Vec<&str> = report.artifacts.iter().map(|a| a.name.as_str()).collect();
    names.sort_unstable();
    let mut diffs = Vec::new();
    match std::fs::read_to_string(dir.join("manifest.json")) {
        Ok(old) if old == manifest => {}
        _ => diffs.push("manifest.json".into()),
    }
    for name in earlier.iter().filter(|n| *n != "manifest.json") {
        if names.binary_search(&name.as_str()).is_err() {
            diffs.push(format!("{name} (only in the earlier run)"));
        }
    }
    for a in &report.artifacts {
        match std::fs::read_to_string(dir.join(&a.name)) {
            Ok(old) if old == a.contents => {}
            Ok(_) => diffs.push(a.name.clone()),
            Err(_) => diffs.push(format!("{} (missing from the earlier run)", a.name)),
        }
    }
    Ok(diffs)
}
