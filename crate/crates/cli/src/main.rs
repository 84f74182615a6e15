use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use seccons::{cmd_check_passivity, cmd_list_scenarios, cmd_run, RunArgs};

#[derive(Parser)]
#[command(
    name = "seccons",
    version,
    about = "Event-triggered secure consensus under actuator attacks"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Simulate a scenario and write trajectory, events and metrics
    Run {
        /// scenario file, or a built-in name (see list-scenarios)
        scenario: String,
        #[arg(long, default_value = "results")]
        out: PathBuf,
        /// override a field, e.g. --set trigger.eps=1e-7 (repeatable)
        #[arg(long = "set", value_name = "KEY=VALUE")]
        sets: Vec<String>,
        /// run once per value, e.g. --sweep controller.k=1,2,4,8
        #[arg(long, value_name = "PARAM=V1,V2,...")]
        sweep: Option<String>,
        /// redraw a built-in's random parameters
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Positive-real check of every agent
    CheckPassivity {
        scenario: String,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        sets: Vec<String>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print built-in scenarios, plus scenario files in --dir
    ListScenarios {
        #[arg(long)]
        dir: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mut out, mut err) = (std::io::stdout(), std::io::stderr());
    let code = match cli.cmd {
        Cmd::Run {
            scenario,
            out: dir,
            sets,
            sweep,
            seed,
        } => cmd_run(
            &RunArgs {
                scenario,
                out: dir,
                sets,
                sweep,
                seed,
            },
            &mut out,
            &mut err,
        ),
        Cmd::CheckPassivity {
            scenario,
            sets,
            seed,
        } => cmd_check_passivity(&scenario, seed, &sets, &mut out, &mut err),
        Cmd::ListScenarios { dir } => cmd_list_scenarios(dir.as_deref(), &mut out, &mut err),
    };
    ExitCode::from(code as u8)
}
