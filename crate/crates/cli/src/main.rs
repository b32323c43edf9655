use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use ghz_cli::{run_scenario, Overrides, RunConfig, RunError, Scenario};
use ghz_core::SimConfig;

/// Four-photon GHZ and entanglement-swapping simulator.
#[derive(Debug, Parser)]
#[command(name = "ghz-sim", version)]
struct Cli {
    /// JSON configuration; calibrated defaults when absent.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    #[arg(long, value_enum, required_unless_present = "print_default_config")]
    scenario: Option<Scenario>,

    #[arg(long)]
    seed: Option<u64>,

    /// Integration time in seconds (per point for delay-scan).
    #[arg(long, value_name = "SECONDS", allow_negative_numbers = true)]
    time: Option<f64>,

    /// PBS delay in femtoseconds.
    #[arg(long, value_name = "FS", allow_negative_numbers = true)]
    delay: Option<f64>,

    /// Output directory.
    #[arg(long, value_name = "DIR", default_value = "out")]
    out: PathBuf,

    /// Print the default configuration as JSON and exit.
    #[arg(long)]
    print_default_config: bool,
}

fn run(cli: Cli) -> Result<(), RunError> {
    if cli.print_default_config {
        let _ = writeln!(std::io::stdout(), "{}", SimConfig::default().to_json_pretty());
        return Ok(());
    }
    let mut sim = match &cli.config {
        Some(path) => SimConfig::load(path)?,
        None => SimConfig::default(),
    };
    Overrides { seed: cli.seed, time: cli.time, delay: cli.delay }.apply(&mut sim)?;
    let scenario = cli.scenario.expect("clap requires a scenario");
    let files = run_scenario(&RunConfig { scenario, sim, out_dir: cli.out })?;
    let mut out = std::io::stdout().lock();
    for f in files {
        let _ = writeln!(out, "{}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ghz-sim: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
