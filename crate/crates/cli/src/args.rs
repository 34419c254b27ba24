use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sepkit_core::arith::{parse_rational, DEFAULT_ORACLE_BUDGET};
use sepkit_core::{DrivingSequence, Example, Rational, RationalInterval};

#[derive(Parser, Debug)]
#[command(name = "sepkit", version, about = "Construct parameterized self-similar systems and check their separation properties")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the nested-interval construction of the parameter.
    Construct {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 60)]
        depth: usize,
        #[arg(long, default_value_t = 10)]
        digits: usize,
        /// Emit the full per-level JSON report.
        #[arg(long)]
        json: bool,
    },
    /// Census of neighbourhood types per level.
    Types {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum, default_value_t = OpenSetKind::Convex)]
        open_set: OpenSetKind,
        /// Seed interval `lo:hi` of the constructed open set.
        #[arg(long, value_parser = parse_interval)]
        seed: Option<RationalInterval>,
        #[arg(long, default_value_t = 10)]
        levels: usize,
        /// Truncation depth of the constructed open set (default: levels + 2).
        #[arg(long)]
        truncation: Option<usize>,
    },
    /// Smallest nonzero normalized displacement.
    Wsp {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 10)]
        max_level: usize,
        /// Report a violation when the minimum falls below this value.
        #[arg(long, value_parser = parse_rational_arg)]
        bound: Option<Rational>,
    },
    /// Finite-depth checks of individual properties.
    Verify {
        #[command(subcommand)]
        check: Check,
    },
    /// Write `exampleE-levelN.svg` diagrams for levels 1 to N.
    Render {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        levels: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = sepkit_core::render::DEFAULT_SCALE)]
        scale: u32,
        #[arg(long, default_value_t = sepkit_core::render::DEFAULT_DECIMALS)]
        decimals: usize,
    },
    /// Similarity dimension `ln n / ln m`.
    Dimension {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 6)]
        digits: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum Check {
    /// Invariance and disjointness of a truncated non-convex open set.
    Osc {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_parser = parse_interval)]
        seed: Option<RationalInterval>,
        #[arg(long, default_value_t = 8)]
        truncation: usize,
    },
    /// Symbolic search for distinct words with identical maps.
    Overlaps {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 4)]
        max_level: usize,
    },
    /// Pairwise distinctness of the construction's normalized gaps.
    Distinctness {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 12)]
        levels: usize,
    },
    /// Separation of distinct cylinder endpoints by `c / m^k`.
    Endpoints {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 8)]
        max_level: usize,
        #[arg(long, value_parser = parse_rational_arg)]
        c: Rational,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum OpenSetKind {
    Convex,
    Constructed,
}

#[derive(Args, Debug, Clone)]
pub struct Source {
    /// Built-in example (1 or 2).
    #[arg(long, conflicts_with = "template", required_unless_present = "template")]
    pub example: Option<Example>,
    /// Construction template as JSON.
    #[arg(long)]
    pub template: Option<PathBuf>,
    /// thue-morse, fibonacci, bits:0110..., periodic:01 or file:PATH.
    #[arg(long, default_value = "thue-morse")]
    pub sequence: DrivingSequence,
    /// Evaluate at this exact rational parameter instead of the constructed limit.
    #[arg(long, value_parser = parse_rational_arg)]
    pub param: Option<Rational>,
    /// Refinement levels the sign oracle may use.
    #[arg(long, env = "SEPKIT_ORACLE_BUDGET", default_value_t = DEFAULT_ORACLE_BUDGET, value_parser = clap::value_parser!(usize))]
    pub oracle_budget: usize,
}

fn parse_rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn parse_interval(s: &str) -> Result<RationalInterval, String> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| format!("expected lo:hi, got {s:?}"))?;
    RationalInterval::new(parse_rational_arg(lo)?, parse_rational_arg(hi)?).map_err(|e| e.to_string())
}
