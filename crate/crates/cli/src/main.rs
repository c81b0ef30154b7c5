//! `kreweras`: enumeration oracles, closed forms and verification sweeps for
//! Kreweras walks and the reflected Kreweras chain.
//!
//! Exit status is 0 when every check passes, 1 when a check fails and 2 on
//! invalid input.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kreweras::stationary::ChainParams;

#[derive(Parser, Debug)]
#[command(name = "kreweras", version, about = "Kreweras walks: exact series, oracles and chain checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Write the output to this file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Walk counts from the brute-force oracle, up to length `--order`.
    Count {
        #[arg(long, env = "KREWERAS_ORDER", default_value_t = 24)]
        order: usize,
        /// Largest abscissa in the x-axis table.
        #[arg(long, default_value_t = 12)]
        max_i: usize,
    },
    /// Closed-form counting series against the oracle, to `t^order`.
    VerifyCount {
        #[arg(long, env = "KREWERAS_ORDER", default_value_t = 24)]
        order: usize,
        #[arg(long, default_value_t = 12)]
        max_i: usize,
    },
    /// Stationary distribution from the closed forms.
    Stationary {
        #[command(flatten)]
        chain: ChainArgs,
        #[command(flatten)]
        real: RealArgs,
        /// Number of axis probabilities `p_{i,0}` to print.
        #[arg(long, default_value_t = 20)]
        max_i: usize,
        /// Largest `i` used by the tail fit.
        #[arg(long, default_value_t = 80)]
        tail: usize,
    },
    /// Closed forms against power iteration and the algebraic identities.
    VerifyStationary {
        #[command(flatten)]
        chain: ChainArgs,
        #[command(flatten)]
        real: RealArgs,
        /// Side of the power-iteration grid.
        #[arg(long, default_value_t = 200)]
        grid: usize,
        /// Tolerance for closed form versus power iteration.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = 20)]
        max_i: usize,
    },
    /// Exact time-dependent law from the origin, to `t^order`.
    Law {
        #[command(flatten)]
        chain: ChainArgs,
        #[arg(long, env = "KREWERAS_ORDER", default_value_t = 18)]
        order: usize,
    },
    /// Law closed forms against the exact recurrence, plus the long-run trend.
    VerifyLaw {
        #[command(flatten)]
        chain: ChainArgs,
        #[arg(long, env = "KREWERAS_ORDER", default_value_t = 18)]
        order: usize,
        /// Last `n` of the `p_{0,0}(3n)` trend.
        #[arg(long, default_value_t = 60)]
        horizon: usize,
    },
    /// Tail fits of `p_{i,0}`; all three regimes unless a chain is given.
    Asymptotics {
        #[arg(long)]
        p: Option<String>,
        #[arg(long)]
        q: Option<String>,
        #[arg(long)]
        r: Option<String>,
        #[command(flatten)]
        real: RealArgs,
        #[arg(long, default_value_t = 80)]
        max_i: usize,
    },
    /// Runs every verification group and emits one summary.
    Report {
        #[arg(long, env = "KREWERAS_ORDER", default_value_t = 24)]
        order: usize,
        #[arg(long, default_value_t = 18)]
        law_order: usize,
        #[command(flatten)]
        real: RealArgs,
        #[arg(long, default_value_t = 200)]
        grid: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
}

/// Transition probabilities as exact rationals `a/b`.
#[derive(Args, Debug, Clone)]
struct ChainArgs {
    #[arg(long, default_value = "1/3")]
    p: String,
    #[arg(long, default_value = "1/2")]
    q: String,
    #[arg(long, default_value = "1/6")]
    r: String,
}

impl ChainArgs {
    fn params(&self) -> kreweras::Result<ChainParams> {
        ChainParams::parse(&self.p, &self.q, &self.r)
    }
}

#[derive(Args, Debug, Clone, Copy)]
struct RealArgs {
    /// Working precision in bits.
    #[arg(long, default_value_t = 256)]
    prec: usize,
}

fn run(cli: &Cli) -> kreweras::Result<output::Outcome> {
    use commands::*;
    match &cli.command {
        Command::Count { order, max_i } => count(*order, *max_i),
        Command::VerifyCount { order, max_i } => verify_count(*order, *max_i),
        Command::Stationary { chain, real, max_i, tail } => {
            stationary(&chain.params()?, real.prec, *max_i, *tail)
        }
        Command::VerifyStationary { chain, real, grid, tol, max_i } => {
            verify_stationary(&chain.params()?, real.prec, *grid, *tol, *max_i)
        }
        Command::Law { chain, order } => law(&chain.params()?, *order),
        Command::VerifyLaw { chain, order, horizon } => verify_law(&chain.params()?, *order, *horizon),
        Command::Asymptotics { p, q, r, real, max_i } => {
            let chains = match (p, q, r) {
                (None, None, None) => default_regimes(),
                (Some(p), Some(q), Some(r)) => vec![ChainParams::parse(p, q, r)?],
                _ => {
                    return Err(kreweras::Error::InvalidParams(
                        "give all of --p, --q, --r or none of them".into(),
                    ))
                }
            };
            asymptotics(&chains, real.prec, *max_i)
        }
        Command::Report { order, law_order, real, grid, tol } => {
            report(*order, *law_order, real.prec, *grid, *tol)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let rendered = outcome.render(cli.format);
    let written = match &cli.output {
        Some(path) => std::fs::write(path, &rendered),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(rendered.as_bytes())
        }
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(2);
    }
    if outcome.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
