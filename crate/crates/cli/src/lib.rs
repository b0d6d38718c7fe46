//! Command-line harness for `qframes`: builds networks from a seed, runs
//! the observable, gauge, POVM, resource and protocol suites, and writes a
//! report of every checked number with its pass/fail verdict.

use clap::{Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

pub mod report;
pub mod suites;

pub use report::{report_write, Quantity, Report, Rule, RunConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Frame-change and gauge covariance of the three observable classes.
    Observables,
    /// Wilson-loop invariance and the first-order gauge response.
    Wilson,
    /// Gauge-invariant POVMs, relabeling coefficients and J=1 generators.
    Povm,
    /// Ebit conversion and GHZ equivalence classes.
    Resources,
    /// Data hiding; `--refbits` switches to the refbit unlock.
    Datahiding,
    /// Refbit-assisted superdense coding at every resource level.
    Superdense,
    /// Bit commitment; `--cheat` adds Alice's cheat.
    Commit,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Runs one subcommand.
pub fn run(cfg: &RunConfig) -> qframes::Result<Report> {
    cfg.validate()?;
    match cfg.command {
        Command::Observables => suites::observables(cfg),
        Command::Wilson => suites::wilson(cfg),
        Command::Povm => suites::povm(cfg),
        Command::Resources => suites::resources(cfg),
        Command::Datahiding => suites::datahiding(cfg),
        Command::Superdense => suites::superdense(cfg),
        Command::Commit => suites::commit(cfg),
    }
}
