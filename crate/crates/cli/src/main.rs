use std::collections::BTreeMap;
use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;

mod commands;
mod inputs;
mod render;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl From<switchlab_core::Error> for CliError {
    fn from(e: switchlab_core::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Invariant(_) => 3,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ReportEnvelope {
    pub command: String,
    pub parameters: BTreeMap<String, Value>,
    pub results: Value,
    pub seed: Option<u64>,
    pub elapsed_ms: u64,
}

/// What a command hands back before timing is attached.
pub struct Report {
    pub parameters: BTreeMap<String, Value>,
    pub results: Value,
    pub seed: Option<u64>,
    /// Rows for `--csv`, header first.
    pub csv: Option<Vec<Vec<String>>>,
}

#[derive(Debug, Parser)]
#[command(name = "switchlab", version, about = "Quantum-controlled gate order analyses")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalOpts {
    /// Render a human-readable listing instead of JSON.
    #[arg(long, global = true)]
    pretty: bool,
    /// Emit histograms as CSV instead of JSON.
    #[arg(long, global = true, conflicts_with = "pretty")]
    csv: bool,
    /// Worker threads (default: available cores).
    #[arg(long, global = true, env = "SWITCHLAB_THREADS")]
    threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Shortest common supersequence of a permutation set.
    Scs(commands::ScsArgs),
    /// Enumerate gate quadruples satisfying the Hadamard promise.
    Enumerate(commands::EnumerateArgs),
    /// Run the switch algorithm on one gate set.
    Run(commands::RunArgs),
    /// Compare the fixed-order circuit with the switch.
    Circuit(commands::CircuitArgs),
    /// Evaluate a witness on a process matrix.
    Witness(commands::WitnessArgs),
    /// Run the side-information attacks on the fixture tables.
    Attack(commands::AttackArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Scs(_) => "scs",
            Command::Enumerate(_) => "enumerate",
            Command::Run(_) => "run",
            Command::Circuit(_) => "circuit",
            Command::Witness(_) => "witness",
            Command::Attack(_) => "attack",
        }
    }

    fn execute(&self) -> Result<Report, CliError> {
        match self {
            Command::Scs(a) => commands::scs(a),
            Command::Enumerate(a) => commands::enumerate(a),
            Command::Run(a) => commands::run(a),
            Command::Circuit(a) => commands::circuit(a),
            Command::Witness(a) => commands::witness(a),
            Command::Attack(a) => commands::attack(a),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.global.threads {
        if t == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        // results never depend on the pool size, so a failure here is harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }

    let start = Instant::now();
    let report = match cli.command.execute() {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    let envelope = ReportEnvelope {
        command: cli.command.name().to_string(),
        parameters: report.parameters,
        results: report.results,
        seed: report.seed,
        elapsed_ms: start.elapsed().as_millis() as u64,
    };

    let text = if cli.global.csv {
        match &report.csv {
            Some(rows) => rows.iter().map(|r| r.join(",") + "\n").collect(),
            None => {
                eprintln!("error: {} has no tabular output for --csv", envelope.command);
                return ExitCode::from(2);
            }
        }
    } else if cli.global.pretty {
        render::pretty(&envelope)
    } else {
        serde_json::to_string(&envelope).expect("report serializes") + "\n"
    };
    // a closed pipe (e.g. `| head`) is not an error of ours
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
    ExitCode::SUCCESS
}
