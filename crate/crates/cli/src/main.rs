//! `asw-slopes`: exponential sums, L-functions, characteristic series and
//! slope verification for Artin-Schreier-Witt towers.

mod commands;
mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use asw_core::{Error, ErrorKind};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use commands::{CacheAction, Method, Output};
use config::{Defaults, RunConfig, TowerArgs, STANDARD};

#[derive(Parser, Debug)]
#[command(name = "asw-slopes", version, about = "Newton slopes of Artin-Schreier-Witt towers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Expsum,
    Dwork,
    Both,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CacheArg {
    List,
    Purge,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// T-adic exponential sum S*(k, T) mod (p^N, T^D).
    Expsum {
        #[command(flatten)]
        tower: TowerArgs,
        /// Extension degree k.
        #[arg(long)]
        k: usize,
    },
    /// L(χ, s) for the character of conductor p^m with χ(1) = ζ.
    Lfun {
        #[command(flatten)]
        tower: TowerArgs,
        #[arg(long)]
        m: u32,
        /// Extra power sums checked to vanish past the degree.
        #[arg(long, default_value_t = 1)]
        margin: usize,
    },
    /// C*(T, s) mod (p^N, T^D, s^{K+1}) and its T-adic polygon.
    Charfn {
        #[command(flatten)]
        tower: TowerArgs,
        #[arg(long, value_enum, default_value_t = MethodArg::Expsum)]
        method: MethodArg,
    },
    /// q-adic slopes of L(χ, s) at conductor p^m with the periodicity prediction.
    Slopes {
        #[command(flatten)]
        tower: TowerArgs,
        #[arg(long)]
        m: u32,
        #[arg(long, default_value_t = 1)]
        margin: usize,
    },
    /// Zeta function of C_m checked against point counts for k <= k-max.
    Zeta {
        #[command(flatten)]
        tower: TowerArgs,
        #[arg(long)]
        m: u32,
        #[arg(long = "k-max")]
        k_max: usize,
    },
    /// Slope periodicity for m0 <= m <= m-max; exits 1 on any mismatch.
    Verify {
        #[command(flatten)]
        tower: TowerArgs,
        #[arg(long = "m-max")]
        m_max: u32,
        #[arg(long, default_value_t = 1)]
        margin: usize,
    },
    /// Slope factorization of C*(T, s) and the weight-slope law.
    Eigencurve {
        #[command(flatten)]
        tower: TowerArgs,
        /// Number of degree-d components to split off.
        #[arg(long, default_value_t = 4)]
        components: usize,
        /// Conductor exponents m at which the law is checked.
        #[arg(long, value_delimiter = ',', default_value = "2,3")]
        conductors: Vec<u32>,
        #[arg(long, default_value_t = 1)]
        margin: usize,
    },
    /// Inspect or clear the histogram cache.
    Cache {
        #[arg(value_enum)]
        action: CacheArg,
        #[arg(long, env = "ASW_CACHE_DIR")]
        cache_dir: Option<PathBuf>,
    },
}

const EIGENCURVE: Defaults = Defaults { n: 8, t_order: 60, k: 20 };

fn configure(args: &TowerArgs, defaults: Defaults) -> asw_core::Result<RunConfig> {
    let (cfg, warnings) = RunConfig::new(args, defaults)?;
    for w in warnings {
        eprintln!("{}", json!({ "warning": w }));
    }
    Ok(cfg)
}

fn run(cli: Cli) -> asw_core::Result<Output> {
    match cli.command {
        Command::Expsum { tower, k } => commands::cmd_expsum(&configure(&tower, STANDARD)?, k),
        Command::Lfun { tower, m, margin } => commands::cmd_lfun(&configure(&tower, STANDARD)?, m, margin),
        Command::Charfn { tower, method } => {
            let method = match method {
                MethodArg::Expsum => Method::Expsum,
                MethodArg::Dwork => Method::Dwork,
                MethodArg::Both => Method::Both,
            };
            commands::cmd_charfn(&configure(&tower, STANDARD)?, method)
        }
        Command::Slopes { tower, m, margin } => commands::cmd_slopes(&configure(&tower, STANDARD)?, m, margin),
        Command::Zeta { tower, m, k_max } => commands::cmd_zeta(&configure(&tower, STANDARD)?, m, k_max),
        Command::Verify { tower, m_max, margin } => commands::cmd_verify(&configure(&tower, STANDARD)?, m_max, margin),
        Command::Eigencurve { tower, components, conductors, margin } => {
            commands::cmd_eigencurve(&configure(&tower, EIGENCURVE)?, components, &conductors, margin)
        }
        Command::Cache { action, cache_dir } => {
            let action = match action {
                CacheArg::List => CacheAction::List,
                CacheArg::Purge => CacheAction::Purge,
            };
            commands::cmd_cache(cache_dir, action)
        }
    }
}

fn exit_code(kind: ErrorKind) -> u8 {
    match kind {
        ErrorKind::Integrity => 1,
        ErrorKind::Precision => 2,
        ErrorKind::Config => 3,
    }
}

fn report(kind: ErrorKind, message: &str) -> ExitCode {
    let code = exit_code(kind);
    let name = match kind {
        ErrorKind::Integrity => "verification",
        ErrorKind::Precision => "precision",
        ErrorKind::Config => "config",
    };
    eprintln!("{}", json!({ "error": { "kind": name, "message": message, "exit_code": code } }));
    ExitCode::from(code)
}

fn report_error(e: &Error) -> ExitCode {
    report(e.kind(), &e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return report(ErrorKind::Config, e.to_string().trim_end()),
    };
    match run(cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if let Err(e) = stdout.write_all(out.body.as_bytes()).and_then(|_| stdout.flush()) {
                return report_error(&Error::Io(e.to_string()));
            }
            match out.failure {
                Some(msg) => report_error(&Error::Verification(msg)),
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => report_error(&e),
    }
}
