use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "frcode", version, about = "Analyze fractional repetition codes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug, Args)]
pub struct Options {
    /// Reconstruction degrees to report: `6` or `2..5` (inclusive).
    #[arg(long, global = true, value_parser = parse_k_range)]
    pub k: Option<KRange>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,

    /// Skip malformed database records instead of failing.
    #[arg(long, global = true)]
    pub lenient: bool,

    /// Maximum partial subsets visited per M_k evaluation.
    #[arg(long, global = true, env = "FRCODE_BUDGET", default_value_t = frcode::hierarchy::DEFAULT_BUDGET)]
    pub budget: u64,

    /// Worker threads for the subset search.
    #[arg(long, global = true, default_value_t = 1)]
    pub workers: usize,

    /// Record label to pick from a multi-record database file.
    #[arg(long, global = true)]
    pub record: Option<String>,

    /// Include the exact M_k column in bound reports.
    #[arg(long, global = true, overrides_with = "no_exact")]
    pub exact: bool,

    #[arg(long, global = true, overrides_with = "exact")]
    pub no_exact: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Structured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KRange {
    pub lo: usize,
    pub hi: usize,
}

fn parse_k_range(s: &str) -> Result<KRange, String> {
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("bad k `{s}`"));
    let range = match s.split_once("..") {
        Some((a, b)) => KRange {
            lo: parse(a)?,
            hi: parse(b)?,
        },
        None => {
            let k = parse(s)?;
            KRange { lo: k, hi: k }
        }
    };
    if range.lo == 0 || range.lo > range.hi {
        return Err(format!("k range `{s}` must satisfy 1 <= lo <= hi"));
    }
    Ok(range)
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parameters, simplicity, hierarchy and bounds.
    Analyze { input: String },
    /// Print the transpose code.
    Dual { input: String },
    /// M_k / N_k table and Pareto points.
    Hierarchy { input: String },
    /// Bound report from a code or from literal parameters.
    Bounds {
        input: Option<String>,
        /// Literal parameters `n,alpha,v,rho`.
        #[arg(long, conflicts_with = "input")]
        params: Option<String>,
    },
    /// Check that the hierarchy computed through the transpose matches.
    VerifyDuality { input: String },
    /// Emit a code from a named family.
    Construct {
        #[command(subcommand)]
        family: Family,
    },
    /// Run a storage scenario script.
    Simulate { script: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum Family {
    /// Vertices of K_t against its edges.
    Complete { t: usize },
    /// Edge incidence of a regular graph read from an edge-list file.
    Graph { path: PathBuf },
    /// A built-in fixture.
    Fixture { name: String },
}
