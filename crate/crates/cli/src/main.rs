use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fragqsp_cli::{CliError, Command, ExperimentConfig};

#[derive(Parser)]
#[command(name = "fragqsp", version, about = "QSP in a fragmented pair-hopping chain")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Fragment census: dimension, charges and region classification per seed.
    Fragment(Common),
    /// QSP response |P|^2, |Q|^2 (1 - a^2) over a grid or the sector momenta.
    Response(Common),
    /// Per-sector Néel transition probabilities and their running product.
    Transition(Common),
    /// Exact dynamics against the free-fermion description (JSON).
    Compare(Common),
    /// Stroboscopic sigma^z profile after each drive cycle.
    Stroboscopic(Common),
    /// Final, time-averaged, diagonal-ensemble and Krylov sigma^z per site.
    Ensemble(Common),
}

#[derive(Args)]
struct Common {
    /// Flat key = value config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a config value; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn execute(command: Command, args: &Common) -> Result<(), CliError> {
    let text = match &args.config {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| CliError::config(None, format!("cannot read {}: {e}", path.display())))?,
        None => String::new(),
    };
    let config = ExperimentConfig::from_text(&text, &args.set)?;
    let output = command.run(&config)?;
    match args.out.as_ref().or(config.out.as_ref()) {
        Some(path) => std::fs::write(path, &output.text)?,
        None => print!("{}", output.text),
    }
    match output.failure {
        Some(msg) => Err(CliError::Verification(msg)),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match &cli.command {
        Sub::Fragment(a) => (Command::Fragment, a),
        Sub::Response(a) => (Command::Response, a),
        Sub::Transition(a) => (Command::Transition, a),
        Sub::Compare(a) => (Command::Compare, a),
        Sub::Stroboscopic(a) => (Command::Stroboscopic, a),
        Sub::Ensemble(a) => (Command::Ensemble, a),
    };
    match execute(command, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fragqsp {}: {e}", command.name());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
