//! Experiment runner for fragqsp: config parsing, the six subcommands, and
//! their CSV/JSON renderings.

pub mod config;
pub mod error;
pub mod run;

pub use config::{ExperimentConfig, GridMode, NamedSequence};
pub use error::CliError;
pub use run::Output;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Fragment,
    Response,
    Transition,
    Compare,
    Stroboscopic,
    Ensemble,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Fragment => "fragment",
            Command::Response => "response",
            Command::Transition => "transition",
            Command::Compare => "compare",
            Command::Stroboscopic => "stroboscopic",
            Command::Ensemble => "ensemble",
        }
    }

    pub fn run(self, config: &ExperimentConfig) -> Result<Output, CliError> {
        match self {
            Command::Fragment => run::run_fragment(config),
            Command::Response => run::run_response(config),
            Command::Transition => run::run_transition(config),
            Command::Compare => run::run_compare(config),
            Command::Stroboscopic => run::run_stroboscopic(config),
            Command::Ensemble => run::run_ensemble(config),
        }
    }
}
