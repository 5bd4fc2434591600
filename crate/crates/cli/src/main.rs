use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dotsim::{parse_config, run, Command};

#[derive(Parser)]
#[command(name = "dotsim", version, about = "AC-driven double quantum dot simulator")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(clap::Args)]
struct Common {
    /// Scenario file of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides `out`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write SVG charts.
    #[arg(long)]
    svg: bool,
    /// `key=value` overrides applied after the config file.
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Sub {
    /// Integrate one scenario and report localization.
    Simulate(Common),
    /// Run both formulations and report their divergence.
    Compare(Common),
    /// Time both formulations.
    Bench(Common),
    /// Localization degree over a one- or two-parameter grid.
    Sweep(Common),
    /// Truth table of a QCA netlist driven by a control cell.
    Qca(Common),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Sub::Simulate(a) => (Command::Simulate, a),
        Sub::Compare(a) => (Command::Compare, a),
        Sub::Bench(a) => (Command::Bench, a),
        Sub::Sweep(a) => (Command::Sweep, a),
        Sub::Qca(a) => (Command::Qca, a),
    };
    let result = parse_config(command, args.config.as_deref(), &args.overrides, args.out.as_deref(), args.svg)
        .map_err(dotsim::CliError::from)
        .and_then(|cfg| run(&cfg));
    match result {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("dotsim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
