use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "hmmeb", version, about = "Entropy-rate bounds for binary hidden Markov processes")]
pub struct Cli {
    /// TOML file with default values for any flag (flags take precedence).
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print every applicable bound for one chain and crossover probability.
    Bound(BoundArgs),
    /// Sweep one parameter and write a CSV table.
    Sweep(SweepArgs),
    /// Monte Carlo estimate of the entropy rate.
    Estimate(EstimateArgs),
    /// Run an invariant suite and print a JSON report.
    Verify(VerifyArgs),
    /// Asymptotic deficit constants.
    Expand(ExpandArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Symmetric,
    Rll,
    General,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ChainArgs {
    /// Symmetric chain with flip probability --q.
    #[arg(long, conflicts_with_all = ["rll", "q01", "q10"])]
    pub symmetric: bool,

    /// (1,inf)-RLL chain with q01 = --q and q10 = 1.
    #[arg(long, conflicts_with_all = ["q01", "q10"])]
    pub rll: bool,

    #[arg(long, allow_negative_numbers = true)]
    pub q: Option<f64>,

    /// 0 -> 1 transition probability of a general chain.
    #[arg(long, allow_negative_numbers = true)]
    pub q01: Option<f64>,

    /// 1 -> 0 transition probability of a general chain.
    #[arg(long, allow_negative_numbers = true)]
    pub q10: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SamplingArgs {
    /// Post-burn-in symbols per estimator chain.
    #[arg(long)]
    pub samples: Option<u64>,

    #[arg(long)]
    pub burnin: Option<u64>,

    /// Independent estimator chains.
    #[arg(long)]
    pub chains: Option<usize>,

    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[command(flatten)]
    pub chain: ChainArgs,

    /// BSC crossover probability.
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,

    /// Also report the exact conditional-entropy sandwich at this length.
    #[arg(long)]
    pub n: Option<usize>,

    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub chain: ChainArgs,

    /// Value of alpha when it is not the swept parameter.
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,

    /// Parameter to sweep: alpha, q, q01 or q10.
    #[arg(long, value_name = "PARAM")]
    pub sweep: Option<String>,

    #[arg(long, allow_negative_numbers = true)]
    pub start: Option<f64>,

    #[arg(long, allow_negative_numbers = true)]
    pub stop: Option<f64>,

    #[arg(long, allow_negative_numbers = true)]
    pub step: Option<f64>,

    /// Comma-separated columns from alpha,q,q01,q10,mgl,new_bound,
    /// nonsym_bound,rll_bound,single_letter_ub,estimate,ci.
    #[arg(long)]
    pub columns: Option<String>,

    #[command(flatten)]
    pub sampling: SamplingArgs,

    /// CSV destination; the effective configuration goes to `<out>.json`.
    /// Without it the table is written to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub chain: ChainArgs,

    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,

    #[command(flatten)]
    pub sampling: SamplingArgs,

    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// One of prop1, prop2, dominance, asymptotics, oracles.
    pub suite: String,

    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct ExpandArgs {
    /// Transition probability for the very-noisy and RLL constants.
    #[arg(long, allow_negative_numbers = true)]
    pub q: Option<f64>,

    /// Crossover probability for the fast-transitions constant.
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,

    #[arg(long, value_enum)]
    pub format: Option<Format>,
}
