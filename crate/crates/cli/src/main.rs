use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use densgraph_cli::commands;
use densgraph_cli::config::Config;
use densgraph_cli::{thread_pool, CliError, CliResult};

#[derive(Parser)]
#[command(name = "densgraph", version, about = "Stationary graphs in Euclidean space with density")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct ConfigArgs {
    /// Run configuration file.
    #[arg(long, short)]
    config: PathBuf,
    /// Override a config key, as `section.key=value`. Repeatable.
    #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for a stationary graph and write its mesh, field and report.
    Solve {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Output directory, overriding `output.directory`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lowest eigenvalue of the Jacobi operator and the stability verdict.
    Stability {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Identity battery on built-in fixtures.
    Identities {
        /// Comma separated fixture names; defaults to the standard battery.
        #[arg(long)]
        fixtures: Option<String>,
        /// Write the JSON array here as well as to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Calibration divergence check and volume-matched competitor trials.
    Calibrate {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Stability over a range of one parameter.
    Sweep {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// alpha, p, lambda or nodes.
        #[arg(long)]
        parameter: Option<String>,
        /// `start:stop:count` or a comma separated list.
        #[arg(long, allow_hyphen_values = true)]
        range: Option<String>,
        /// Write the CSV here as well as to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List built-in fixtures.
    Fixtures,
}

fn load(args: &ConfigArgs) -> CliResult<(Config, PathBuf)> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", args.config.display())))?;
    let mut cfg = Config::parse(&text)?;
    for o in &args.overrides {
        cfg.set(o)?;
    }
    let dir = args.config.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok((cfg, dir))
}

fn run(cli: Cli) -> CliResult<i32> {
    let pool = thread_pool()?;
    match cli.command {
        Command::Solve { cfg, out } => {
            let (c, dir) = load(&cfg)?;
            println!("{}", commands::cmd_solve(&c, out.as_deref(), &dir)?);
            Ok(0)
        }
        Command::Stability { cfg, out } => {
            let (c, dir) = load(&cfg)?;
            let (json, code) = commands::cmd_stability(&c, out.as_deref(), &dir)?;
            println!("{json}");
            Ok(code)
        }
        Command::Identities { fixtures, out } => {
            println!("{}", commands::cmd_identities(fixtures.as_deref(), out.as_deref())?);
            Ok(0)
        }
        Command::Calibrate { cfg, out, trials, seed } => {
            let (mut c, dir) = load(&cfg)?;
            if let Some(t) = trials {
                c.set(&format!("calibration.trials={t}"))?;
            }
            if let Some(s) = seed {
                c.set(&format!("calibration.seed={s}"))?;
            }
            print!("{}", commands::cmd_calibrate(&c, out.as_deref(), &dir)?);
            Ok(0)
        }
        Command::Sweep { cfg, parameter, range, out } => {
            let (c, dir) = load(&cfg)?;
            print!("{}", commands::cmd_sweep(&c, parameter.as_deref(), range.as_deref(), out.as_deref(), &dir, &pool)?);
            Ok(0)
        }
        Command::Fixtures => {
            print!("{}", commands::cmd_fixtures());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("densgraph: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
