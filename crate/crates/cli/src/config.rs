use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gumball::exactnum::Rat;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// Exact verification of the mean-one gumball machine bound.
#[derive(Clone, Debug, Parser)]
#[command(name = "gumball", version)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,

    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Worker threads; 0 uses every available core.
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,

    /// Width bound for certified enclosures.
    #[arg(long, global = true, default_value = "1e-30", value_parser = parse_rat)]
    pub tol: Rat,
}

fn parse_rat(s: &str) -> Result<Rat, String> {
    s.parse::<Rat>().map_err(|e| e.to_string())
}

fn parse_point(s: &str) -> Result<(u64, u64), String> {
    let (n, m) = s
        .split_once(',')
        .ok_or_else(|| format!("expected N,M, got {s:?}"))?;
    let parse = |t: &str| t.trim().parse::<u64>().map_err(|e| format!("{t:?}: {e}"));
    Ok((parse(n)?, parse(m)?))
}

#[derive(Clone, Debug, Subcommand)]
pub enum Command {
    /// Minimize over identically distributed two-point machines.
    VerifyIid {
        #[arg(long, default_value_t = 2)]
        n_min: u64,
        #[arg(long, default_value_t = 99)]
        n_max: u64,
    },
    /// Exhaustive minimization over every extreme-point configuration.
    VerifyGeneral(GeneralArgs),
    /// Exact check that f(n, m) < f(n, m + 1).
    ScanLemma4 {
        #[arg(long, default_value_t = 100)]
        n_lo: u64,
        /// Exclusive.
        #[arg(long, default_value_t = 3200)]
        n_hi: u64,
        /// Checks cutoffs 1 <= m < m_max.
        #[arg(long, default_value_t = 11)]
        m_max: u64,
        #[arg(long, default_value_t = 1)]
        stride: u64,
    },
    /// Exact check of f(n, m) >= 3/8 at chosen points.
    CheckLemma3 {
        /// A point `N,M`; repeatable.
        #[arg(long = "point", value_parser = parse_point)]
        points: Vec<(u64, u64)>,
    },
    /// Certify the transcendental inequality covering large n.
    CertifyLemma4Final {
        #[arg(long, default_value_t = 3200)]
        n: u64,
        /// Checks every 1 <= m <= m_max.
        #[arg(long, default_value_t = 11)]
        m_max: u64,
        /// Also search for the smallest certifying n up to this bound.
        #[arg(long)]
        find_n_up_to: Option<u64>,
    },
    /// Check the premises that carry the inequality from n1 to n2.
    ProbeLemma4Monotone {
        #[arg(long)]
        n1: u64,
        #[arg(long)]
        n2: u64,
        #[arg(long)]
        m: u64,
    },
    /// Exact tail inequality closing the identically distributed case.
    TailCheck {
        #[arg(long, default_value_t = 100)]
        n_min: u64,
        #[arg(long, default_value_t = 5000)]
        n_max: u64,
        /// Search bound for the smallest n where the inequality holds.
        #[arg(long, default_value_t = 100)]
        sweep_limit: u64,
    },
    /// Check that m is a median of Bin(n, m/n).
    MedianCheck {
        #[arg(long, default_value_t = 200)]
        n_max: u64,
    },
    /// Run the randomized and exhaustive property suites.
    Selftest {
        #[arg(long, default_value_t = 2009)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        cdf_cases: u64,
        #[arg(long, default_value_t = 500)]
        transport_cases: u64,
    },
}

#[derive(Clone, Debug, Args)]
pub struct GeneralArgs {
    /// A single n; alternatively give a range with --n-min/--n-max.
    #[arg(long, conflicts_with_all = ["n_min", "n_max"])]
    pub n: Option<u32>,
    #[arg(long)]
    pub n_min: Option<u32>,
    #[arg(long)]
    pub n_max: Option<u32>,
    /// Disable lower-bound and dominance pruning.
    #[arg(long)]
    pub no_prune: bool,
    /// Write progress here after every batch.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Continue from the checkpoint file.
    #[arg(long, requires = "checkpoint")]
    pub resume: bool,
    /// Stop after this many work units.
    #[arg(long)]
    pub max_units: Option<usize>,
    /// Work units explored between checkpoints.
    #[arg(long, default_value_t = 16)]
    pub batch_size: usize,
}

impl GeneralArgs {
    pub fn range(&self) -> Result<Vec<u32>, String> {
        match (self.n, self.n_min, self.n_max) {
            (Some(n), _, _) => Ok(vec![n]),
            (None, lo, Some(hi)) => Ok((lo.unwrap_or(2)..=hi).collect()),
            (None, _, None) => Err("verify-general needs --n or --n-max".to_string()),
        }
    }
}
