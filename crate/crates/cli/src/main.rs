//! `fflab`: command-line front end to the finite-field laboratory.
//!
//! Exit codes: 0 on success, 2 on invalid input, 3 when a request exceeds the
//! loop budget (override with `--force`).

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fflab::{Error, Surface};

/// Loop count above which a request is refused unless `--force` is given.
pub const LOOP_BUDGET: f64 = 5e9;

#[derive(Parser, Debug)]
#[command(name = "fflab", version, about = "Finite-field laboratory for Y^2 = X^n + X f(U) + g(U)")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Surface file (JSON with n, f, g); defaults to n = 3, f = 0, g = S1^6 + S2^6.
    #[arg(long, global = true)]
    pub surface: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Run even when the loop budget is exceeded.
    #[arg(long, global = true)]
    pub force: bool,
    /// Worker threads (0: one per core). Reports do not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// Parameters of a `τ`-family.
#[derive(Args, Debug, Clone)]
pub struct TauArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..=2))]
    pub r: u32,
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    pub lambda: i64,
    #[arg(long, value_parser = parse_pair, default_value = "1,0", allow_hyphen_values = true)]
    pub h: (i64, i64),
    #[arg(long, value_parser = parse_pair, default_value = "0,1", allow_hyphen_values = true)]
    pub mu: (i64, i64),
    #[arg(long, value_parser = parse_sector, default_value = "0,0")]
    pub sector: (u8, u8),
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Classify the primes up to --p.
    GoodPrimes {
        #[arg(long)]
        p: u64,
        /// Also require p = 2 mod n.
        #[arg(long)]
        congruence: bool,
    },
    /// N(S;B) and the omega weights.
    Count {
        #[arg(long = "B")]
        b: u64,
    },
    /// U(r,c,B) and C(r) for an odd squarefree modulus.
    Charsum {
        #[arg(long)]
        r: u64,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        c: i64,
        #[arg(long = "B")]
        b: u64,
    },
    /// W_p at seeded parameters.
    WpScan {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// The van der Corput chain for one context.
    VdcAudit {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        pp: u64,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        qq: u64,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        c: i64,
        #[arg(long = "B")]
        b: u64,
        /// Use H = floor(4B/r1) instead of floor(B/r1).
        #[arg(long)]
        four_b: bool,
    },
    /// N(tau), N1, N2 and singular-locus sizes for every tau.
    TauProfile {
        #[command(flatten)]
        tau: TauArgs,
        /// Skip the singular-locus columns.
        #[arg(long)]
        no_sing: bool,
    },
    /// Second moment and twisted sums of N(tau).
    Moments {
        #[command(flatten)]
        tau: TauArgs,
        /// Use the five-variable count.
        #[arg(long)]
        five: bool,
    },
    /// Every term of the square-sieve bound at height B.
    SieveAudit {
        #[arg(long = "B")]
        b: u64,
    },
    /// Points of sing(V_tau) or of one auxiliary system.
    SingLocus {
        #[command(flatten)]
        tau: TauArgs,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        t: i64,
        /// sing, K1, K2, L or V.
        #[arg(long, default_value = "sing")]
        system: String,
    },
    /// Roots of f and g mod p and the determinants of pairs of roots.
    PolfCheck {
        #[arg(long)]
        p: u64,
    },
}

fn parse_pair(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected INT,INT, got {s:?}"))?;
    let parse = |t: &str| t.trim().parse::<i64>().map_err(|e| format!("{t:?}: {e}"));
    Ok((parse(a)?, parse(b)?))
}

fn parse_sector(s: &str) -> Result<(u8, u8), String> {
    let (a, b) = parse_pair(s)?;
    if !(0..=1).contains(&a) || !(0..=1).contains(&b) {
        return Err(format!("sector indices must be 0 or 1, got {s:?}"));
    }
    Ok((a as u8, b as u8))
}

pub fn load_surface(common: &Common) -> Result<Surface, Error> {
    match &common.surface {
        None => Ok(Surface::sample()),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
            Surface::from_json(&text)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.common.threads > 0 {
        // a second initialisation only happens in tests; ignoring it is harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.common.threads).build_global();
    }
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fflab: {e}");
            ExitCode::from(match e {
                Error::Budget(_) => 3,
                Error::InvalidInput(_) | Error::Parse(_) => 2,
            })
        }
    }
}
