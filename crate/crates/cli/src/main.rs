//! `asymset`: parameter inspection, file-based encode/decode, Monte-Carlo
//! experiments, the random-linear baseline, and bound verification.
//!
//! Exit codes: 0 success, 1 a verification check computed but failed,
//! 2 usage/format error, 3 decode failure.

mod commands;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use asymset_core::Rational;

#[derive(Parser)]
#[command(name = "asymset", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Derive and print the multi-level scheme parameters.
    Params {
        #[arg(long)]
        n: u64,
        /// Huffman budget m* in bits.
        #[arg(long)]
        mstar: u32,
        /// Error budget as a rational NUM/DEN.
        #[arg(long, value_parser = parse_rational)]
        delta: Rational,
        #[arg(long)]
        json: bool,
    },
    /// Encode a set into a message file. Takes no prior: encoding is
    /// oblivious by construction.
    Encode {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        mstar: u32,
        #[arg(long, value_parser = parse_rational)]
        delta: Rational,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated item indices; empty string for the empty set.
        #[arg(long, default_value = "")]
        set: String,
        /// Output path for the message file.
        #[arg(long)]
        out: String,
    },
    /// Decode a message file under a prior known only to this side.
    Decode {
        /// Prior source: a file path or a generator such as `uniform:1024`,
        /// `zipf:1024:1.0`, `dyadic:16`.
        #[arg(long)]
        prior: String,
        /// Input message file.
        #[arg(long = "in")]
        input: String,
        #[arg(long)]
        json: bool,
    },
    /// Seeded Monte-Carlo round-trip experiment; prints a JSON report.
    Experiment(ExperimentArgs),
    /// Empirical checks of the random-linear baseline against its bounds.
    Baseline {
        #[arg(long)]
        n: u64,
        /// Code length in bits.
        #[arg(long)]
        m: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Set-list file: one comma-separated set per line, priority order.
        #[arg(long)]
        list: String,
        /// `each`: per-set failure rate; `forall`: whole-list failure rate.
        #[arg(long, value_parser = ["each", "forall"])]
        mode: String,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long)]
        json: bool,
    },
    /// Desk-scale verification of the impossibility and appendix claims.
    #[command(subcommand, name = "verify-bounds")]
    VerifyBounds(VerifyBounds),
}

#[derive(Args)]
pub(crate) struct ExperimentArgs {
    /// Prior source: file path or generator string.
    #[arg(long)]
    pub(crate) prior: String,
    /// Optional universe-size cross-check against the prior.
    #[arg(long)]
    pub(crate) n: Option<u64>,
    #[arg(long)]
    pub(crate) mstar: u32,
    #[arg(long, value_parser = parse_rational)]
    pub(crate) delta: Rational,
    /// Items drawn per trial.
    #[arg(long, default_value_t = 4)]
    pub(crate) k: usize,
    #[arg(long)]
    pub(crate) trials: u64,
    /// Base seed; trial i uses base + i.
    #[arg(long, default_value_t = 0)]
    pub(crate) seed: u64,
    /// Also write the JSON report to this path.
    #[arg(long)]
    pub(crate) out: Option<String>,
}

#[derive(Subcommand)]
pub(crate) enum VerifyBounds {
    /// Product bound on the mass of Huffman-qualifying lists: must be <= e.
    ListMass {
        #[arg(long)]
        prior: String,
        #[arg(long)]
        json: bool,
    },
    /// Approximate cover size versus the entropy bound H(sigma)/delta.
    CoverSize {
        /// Distribution over outcome ids (same format as a prior source).
        #[arg(long)]
        prior: String,
        #[arg(long, value_parser = parse_rational)]
        delta: Rational,
        #[arg(long)]
        json: bool,
    },
    /// Pigeonhole collision finder over all k-subsets of [1, n].
    Collision {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: usize,
        /// Encoder output bits.
        #[arg(long)]
        m: u32,
        /// Built-in deterministic encoder: `sum-mod` or `linear`.
        #[arg(long, value_parser = ["sum-mod", "linear"], default_value = "sum-mod")]
        encoder: String,
        /// Seed for the `linear` encoder.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Empirical Huffman-weight tail under an entropy-derived budget.
    HuffmanTail {
        #[arg(long)]
        prior: String,
        #[arg(long)]
        k: usize,
        /// Tail probability delta_h as a rational NUM/DEN.
        #[arg(long, value_parser = parse_rational)]
        delta: Rational,
        /// Free parameter of the budget formula.
        #[arg(long, default_value_t = 1.0)]
        epsilon: f64,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    let (num, den) = s
        .split_once('/')
        .ok_or_else(|| format!("expected NUM/DEN, got {s:?}"))?;
    let num: u32 = num
        .trim()
        .parse()
        .map_err(|_| format!("bad numerator {num:?}"))?;
    let den: u32 = den
        .trim()
        .parse()
        .map_err(|_| format!("bad denominator {den:?}"))?;
    Rational::new(num, den).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Params {
            n,
            mstar,
            delta,
            json,
        } => commands::params(n, mstar, delta, json),
        Command::Encode {
            n,
            mstar,
            delta,
            seed,
            set,
            out,
        } => commands::encode(n, mstar, delta, seed, &set, &out),
        Command::Decode { prior, input, json } => commands::decode(&prior, &input, json),
        Command::Experiment(args) => commands::experiment(&args),
        Command::Baseline {
            n,
            m,
            seed,
            list,
            mode,
            trials,
            json,
        } => commands::baseline(n, m, seed, &list, &mode, trials, json),
        Command::VerifyBounds(check) => commands::verify_bounds(&check),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}
