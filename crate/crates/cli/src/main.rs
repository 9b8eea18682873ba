//! `szilard`: parameter sweeps, cycle reports and the validation suite for
//! the harmonic quantum Szilard engine.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use szilard_core::thermo::ForcePrefactor;
use szilard_core::validation::ValidationOptions;

use config::{Format, RunConfig, Settings, UsageError};

#[derive(Parser)]
#[command(name = "szilard", version, about = "Harmonic quantum Szilard engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand)]
enum Command {
    /// Even-level quantization condition with its roots, zeros and poles.
    Spectrum,
    /// Level branches, free energy and force as the wall moves left.
    Expansion,
    /// Work and entropy ledger for one engine cycle.
    Cycle,
    /// Pointer measurement on the thermal state behind the barrier.
    Demon,
    /// Runs the acceptance checks and prints a pass/fail table.
    Validate {
        /// Force prefactor the force check should expect. `main-text` is a
        /// negative control and makes that check fail.
        #[arg(long, value_enum, default_value = "appendix")]
        inject_prefactor: PrefactorArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PrefactorArg {
    MainText,
    Appendix,
}

#[derive(Args)]
struct Flags {
    /// Flat `key = value` file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// θ = ħω / k_B T.
    #[arg(long, global = true)]
    theta: Option<f64>,
    /// Dimensionless central barrier strength.
    #[arg(long, global = true)]
    g: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    x0_min: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    x0_max: Option<f64>,
    /// Grid points for sweeps.
    #[arg(long, global = true)]
    points: Option<usize>,
    /// Levels written per row (expansion) or minimum level count.
    #[arg(long, global = true)]
    levels: Option<usize>,
    /// Upper end of the energy sweep for `spectrum`.
    #[arg(long, global = true)]
    e_max: Option<f64>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Skip the expensive cross-checks.
    #[arg(long, global = true)]
    quick: bool,
    /// Leave the generation time out of the output.
    #[arg(long, global = true)]
    no_timestamp: bool,
}

impl Flags {
    fn settings(&self) -> Settings {
        Settings {
            theta: self.theta,
            g: self.g,
            x0_min: self.x0_min,
            x0_max: self.x0_max,
            points: self.points,
            levels: self.levels,
            e_max: self.e_max,
            format: self.format,
            out: self.out.clone(),
            jobs: self.jobs,
            quick: self.quick.then_some(true),
            no_timestamp: self.no_timestamp.then_some(true),
            ..Default::default()
        }
    }
}

enum Outcome {
    Ok,
    ValidationFailed,
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    let file = match &cli.flags.config {
        Some(p) => Settings::load(p)?,
        None => Settings::default(),
    };
    let cfg = RunConfig::resolve(file.overlay(cli.flags.settings()))?;
    if let Some(j) = cfg.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| anyhow::anyhow!("cannot start {j} workers: {e}"))?;
    }
    match cli.command {
        Command::Spectrum => output::emit(&commands::spectrum(&cfg)?, &cfg)?,
        Command::Expansion => output::emit(&commands::expansion(&cfg)?, &cfg)?,
        Command::Demon => output::emit(&commands::demon(&cfg)?, &cfg)?,
        Command::Cycle => {
            let report = commands::cycle(&cfg)?;
            if cfg.out.is_some() {
                output::emit(&report.table, &cfg)?;
                print!("{}", commands::cycle_text(&report.ledger));
            } else if cfg.format == Format::Json {
                output::emit(&report.table, &cfg)?;
            } else {
                print!("{}", commands::cycle_text(&report.ledger));
            }
        }
        Command::Validate { inject_prefactor } => {
            let opts = ValidationOptions {
                quick: cfg.quick,
                expected_prefactor: match inject_prefactor {
                    PrefactorArg::MainText => ForcePrefactor::MainText,
                    PrefactorArg::Appendix => ForcePrefactor::Appendix,
                },
            };
            let outcomes = commands::validate(&opts);
            for o in &outcomes {
                println!("{o}");
            }
            let failed = outcomes.iter().filter(|o| !o.passed).count();
            println!(
                "{} of {} checks passed{}",
                outcomes.len() - failed,
                outcomes.len(),
                if cfg.quick { " (quick)" } else { "" }
            );
            if cfg.out.is_some() {
                output::emit(&commands::validation_table(&outcomes), &cfg)?;
            }
            if failed > 0 {
                return Ok(Outcome::ValidationFailed);
            }
        }
    }
    Ok(Outcome::Ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::ValidationFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            let usage = e.downcast_ref::<UsageError>().is_some()
                || matches!(
                    e.downcast_ref::<szilard_core::Error>(),
                    Some(szilard_core::Error::Domain(_))
                );
            ExitCode::from(if usage { 2 } else { 1 })
        }
    }
}
