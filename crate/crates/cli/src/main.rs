use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod config;
mod simulate;
mod verify;

use verify::Suite;

#[derive(Parser)]
#[command(name = "cz-mech", version, about = "Simulate and verify Cosserat-type mechanical systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write its trajectory as CSV.
    Simulate {
        kind: Kind,
        #[arg(long)]
        config: PathBuf,
        /// CSV destination; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides `integrator.h`.
        #[arg(long)]
        h: Option<f64>,
        /// Overrides `integrator.steps`.
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Run randomized property suites.
    Verify {
        suite: Suite,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Rigid,
    Nbody,
    Masspoint,
    Bodypoint,
    Multiphase,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Config(String),
    Numerical(String),
    Verification,
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Verification => 1,
            CliError::Usage(_) | CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

/// Tolerance multiplier from `CZ_MECH_EPS`, default 1.
fn eps_scale() -> Result<f64, CliError> {
    match std::env::var("CZ_MECH_EPS") {
        Err(std::env::VarError::NotPresent) => Ok(1.0),
        Err(e) => Err(CliError::Usage(format!("CZ_MECH_EPS: {e}"))),
        Ok(s) => match s.trim().parse::<f64>() {
            Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
            _ => Err(CliError::Usage(format!("CZ_MECH_EPS must be a positive number, found `{s}`"))),
        },
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate { kind, config, out, h, steps } => {
            if let Some(h) = h {
                if !(h > 0.0 && h.is_finite()) {
                    return Err(CliError::Usage(format!("--h must be positive, found {h}")));
                }
            }
            let text = std::fs::read_to_string(&config)
                .map_err(|e| CliError::Config(format!("{}: {e}", config.display())))?;
            let outcome = simulate::run(kind, &text, &simulate::Overrides { h, steps })?;
            match out {
                Some(path) => {
                    std::fs::write(&path, &outcome.csv)
                        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
                    print!("{}", outcome.summary_text());
                }
                None => {
                    print!("{}", outcome.csv);
                    eprint!("{}", outcome.summary_text());
                }
            }
            Ok(())
        }
        Command::Verify { suite, trials, seed } => {
            let scale = eps_scale()?;
            let suites: Vec<Suite> = if suite == Suite::All { Suite::MEMBERS.to_vec() } else { vec![suite] };
            let reports: Vec<verify::SuiteReport> = std::thread::scope(|s| {
                let handles: Vec<_> =
                    suites.iter().map(|&st| s.spawn(move || verify::run_suite(st, trials, seed, scale))).collect();
                handles.into_iter().map(|h| h.join().expect("suite thread panicked")).collect()
            });
            let mut stdout = std::io::stdout().lock();
            for r in &reports {
                let _ = stdout.write_all(r.render().as_bytes());
            }
            if reports.iter().all(verify::SuiteReport::passed) {
                Ok(())
            } else {
                Err(CliError::Verification)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Usage(m) => eprintln!("usage error: {m}"),
                CliError::Config(m) => eprintln!("config error: {m}"),
                CliError::Numerical(m) => eprintln!("numerical failure: {m}"),
                CliError::Verification => eprintln!("verification failed"),
            }
            ExitCode::from(e.code())
        }
    }
}
