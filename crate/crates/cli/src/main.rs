use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use qframes::frames::FrameRestriction;
use qframes_harness::{report_write, run, Command, Format, RunConfig};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Restriction {
    Full,
    Zrot,
}

#[derive(Debug, Parser)]
#[command(name = "harness", version, about = "Reproduces the qframes protocol and invariance numbers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Master seed; every network and stream derives from it.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte Carlo trials per sampled quantity.
    #[arg(long, global = true, default_value_t = 100_000)]
    trials: u64,
    #[arg(long, global = true, default_value_t = 3)]
    parties: usize,
    #[arg(long, global = true, value_enum, default_value = "full")]
    restriction: Restriction,
    /// Random instances per sweep.
    #[arg(long, global = true, default_value_t = 100)]
    cycles: usize,
    /// Data hiding: unlock with refbits instead of forwarding.
    #[arg(long, global = true)]
    refbits: bool,
    /// Commitment: let Alice cheat.
    #[arg(long, global = true)]
    cheat: bool,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    #[arg(long, global = true)]
    no_timestamp: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Some(seed) = cli.seed else {
        eprintln!("error: --seed is required");
        return ExitCode::from(2);
    };
    let cfg = RunConfig {
        seed,
        parties: cli.parties,
        restriction: match cli.restriction {
            Restriction::Full => FrameRestriction::Full,
            Restriction::Zrot => FrameRestriction::ZRotationOnly,
        },
        trials: cli.trials,
        cycles: cli.cycles,
        refbits: cli.refbits,
        cheat: cli.cheat,
        ..RunConfig::new(cli.command, seed)
    };
    let report = match run(&cfg) {
        Ok(r) if cli.no_timestamp => r,
        Ok(r) => r.stamped(),
        Err(e @ qframes::Error::Input(_)) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    if let Err(e) = report_write(&report, cli.format, cli.out.as_deref()) {
        eprintln!("error: {e}");
        return ExitCode::FAILURE;
    }
    for q in report.failures() {
        eprintln!("FAIL {}: {}", q.name, q.exact);
    }
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
