//! `kaylab`: command-line front end.
//!
//! Exit codes: 0 holds or success, 1 fails with a certificate, 2 budget
//! exhausted, 3 input error.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kaylab::class::{Family, DEFAULT_ENUMERATION_BUDGET};
use kaylab::ramsey::{Mode, DEFAULT_NODE_BUDGET};
use kaylab::suite::DEFAULT_SEED;

use crate::commands::{Report, Status};
use crate::manifest::{normalized_args, Manifest};

#[derive(Parser, Debug)]
#[command(name = "kaylab", version, about = "Kay-graphs, amalgamation classes, Ramsey arrows and definable orders")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Search node budget.
    #[arg(long, global = true, env = "KAYLAB_BUDGET_DEFAULT", default_value_t = DEFAULT_NODE_BUDGET)]
    pub budget: u64,
    /// Step budget for exhaustive enumerations.
    #[arg(long, global = true, default_value_t = DEFAULT_ENUMERATION_BUDGET)]
    pub enum_budget: u64,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,
    /// Omit wall-clock data so reruns are byte-identical.
    #[arg(long, global = true)]
    pub deterministic: bool,
    /// Seed for random pools.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Directory for artifacts and the manifest.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Machine,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Kay-graph of a k-hypergraph.
    Kay {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Checks the parity condition on a (k+1)-hypergraph.
    CheckParity {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        k: Option<usize>,
        /// Also search exhaustively for a preimage.
        #[arg(long)]
        preimage: bool,
    },
    /// A k-hypergraph whose Kay-graph is the input.
    Reconstruct {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = kaylab::kay::DEFAULT_STAR)]
        star: usize,
    },
    /// Adds a vertex joined to every (k-1)-set.
    StarExtend {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Complements R and recomputes S.
    Complement {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Enumerates a family up to isomorphism.
    Enumerate {
        #[arg(long)]
        family: Family,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long)]
        n: usize,
    },
    /// Amalgamates B and C over A.
    Amalgam {
        #[arg(long)]
        base: PathBuf,
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        /// Embedding of the base into the left structure, e.g. `0,2`.
        #[arg(long)]
        left_map: Option<String>,
        #[arg(long)]
        right_map: Option<String>,
        /// Use this family's construction.
        #[arg(long)]
        family: Option<Family>,
    },
    /// Decides C -> (B)^A with the given palette and degree.
    Arrow {
        #[arg(long = "C")]
        c: PathBuf,
        #[arg(long = "B")]
        b: PathBuf,
        #[arg(long = "A")]
        a: PathBuf,
        #[arg(long, default_value_t = 2)]
        colors: usize,
        #[arg(long, default_value_t = 1)]
        degree: usize,
        #[arg(long, default_value_t = Mode::Copies)]
        mode: Mode,
    },
    /// One B-copy good for every pattern at once.
    JointArrow {
        #[arg(long = "C")]
        c: PathBuf,
        #[arg(long = "B")]
        b: PathBuf,
        /// `FILE:DEGREE`, repeatable.
        #[arg(long = "A", required = true)]
        a: Vec<String>,
        #[arg(long, default_value_t = 2)]
        colors: usize,
        #[arg(long, default_value_t = Mode::Copies)]
        mode: Mode,
    },
    /// Counts k-hypergraphs with the given Kay-graph.
    Expansions {
        #[arg(long)]
        base: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Checks the expansion colouring on every ordered Kay-graph.
    NonRamsey {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        max_n: usize,
    },
    /// Searches for a quantifier-free definable linear order.
    Orderability {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
    },
    /// Automorphism group of a structure.
    Rigidity {
        #[arg(long)]
        file: PathBuf,
    },
    /// A tournament with the C-relation of a binary tree.
    Cameron {
        #[arg(long)]
        tournament_file: PathBuf,
        /// Nested-parentheses leaf list, e.g. `((0,1),(2,3))`.
        #[arg(long)]
        tree: String,
        /// Vertex of each leaf, e.g. `2,0,1,3`; identity by default.
        #[arg(long)]
        assignment: Option<String>,
    },
    /// Extracts an order from 2-colour arrows.
    ExtractOrder {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Order expansions tried per candidate.
        #[arg(long, default_value_t = 1 << 16)]
        order_budget: u64,
        /// Also run the joint search on each pair used.
        #[arg(long)]
        joint: bool,
    },
    /// Runs the acceptance battery.
    VerifySuite {
        /// 1 runs the fast criteria, 2 runs all of them.
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=2))]
        tier: u8,
        /// Earlier output directory to compare against byte for byte.
        #[arg(long)]
        replay: Option<PathBuf>,
    },
    /// Re-checks a certificate document.
    VerifyCert {
        #[arg(long)]
        cert: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    if cli.global.workers > 0 {
        // Fails only if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.global.workers).build_global();
    }
    let mut manifest = Manifest {
        command_line: normalized_args(std::env::args().skip(1)),
        node_budget: cli.global.budget,
        enumeration_budget: cli.global.enum_budget,
        workers: cli.global.workers,
        deterministic: cli.global.deterministic,
        seed: cli.global.seed,
        ..Manifest::default()
    };
    let report = match commands::run(&cli.command, &cli.global, &mut manifest) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_for_error(&e));
        }
    };
    if !cli.global.deterministic {
        manifest.wall_clock_secs = Some(start.elapsed().as_secs_f64());
    }
    match emit(&cli.global, &report, &mut manifest) {
        Ok(()) => ExitCode::from(report.status.code()),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}

fn exit_for_error(e: &commands::CliError) -> u8 {
    match e {
        commands::CliError::Core(kaylab::Error::Budget { .. }) => Status::Budget.code(),
        _ => 3,
    }
}

/// Writes artifacts and the manifest, then prints the report.
fn emit(global: &Global, report: &Report, manifest: &mut Manifest) -> std::io::Result<()> {
    manifest.record(report);
    if let Some(dir) = &global.out {
        for a in &report.artifacts {
            let path = dir.join(&a.name);
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent)?;
            }
            std::fs::write(path, &a.contents)?;
        }
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("manifest.json"), manifest.to_json())?;
    }
    match global.format {
        Format::Text => {
            for line in &report.lines {
                println!("{line}");
            }
            if global.out.is_none() {
                if let Some(doc) = &report.document {
                    print!("{doc}");
                }
            }
        }
        Format::Machine => {
            let value = serde_json::json!({
                "status": report.status.name(),
                "exit_code": report.status.code(),
                "verdicts": manifest.verdicts,
                "data": report.data,
                "artifacts": report.artifacts.iter().map(|a| a.name.as_str()).collect::<Vec<_>>(),
            });
            println!("{}", serde_json::to_string_pretty(&value).expect("serialisable"));
        }
    }
    Ok(())
}
