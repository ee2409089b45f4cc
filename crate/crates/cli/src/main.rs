use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Parser, Subcommand};

use bergman_lab::bergman::TestFunction;
use bergman_lab::experiment::{emit, load_config, run, Scenarios, WEIGHT_NAMES};

#[derive(Parser)]
#[command(
    name = "bergman-lab",
    version,
    about = "Weighted Bergman projection experiments on rectangular grids"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config and write reports.
    Run {
        config: PathBuf,
        /// Directory receiving every output with a relative path.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Enable exactly the named scenarios, overriding the config
        /// flags. Repeatable.
        #[arg(long = "scenario", value_name = "NAME")]
        scenarios: Vec<String>,
    },
    /// Parse and validate a config, printing the resolved form.
    Validate { config: PathBuf },
    /// List the model weights a config may name.
    ListWeights,
    /// List the named test functions.
    ListTestFunctions,
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Run { config, out_dir, scenarios } => {
            cmd_run(&config, out_dir.as_deref(), &scenarios)
        }
        Command::Validate { config } => cmd_validate(&config),
        Command::ListWeights => {
            for name in WEIGHT_NAMES {
                println!("{name}");
            }
            Ok(())
        }
        Command::ListTestFunctions => {
            for name in TestFunction::names() {
                println!("{name}");
            }
            Ok(())
        }
    }
}

fn cmd_run(path: &Path, out_dir: Option<&Path>, scenario_names: &[String]) -> anyhow::Result<()> {
    let mut config =
        load_config(path).with_context(|| format!("loading {}", path.display()))?;
    if !scenario_names.is_empty() {
        let mut chosen = Scenarios::none();
        for name in scenario_names {
            chosen.enable(name)?;
        }
        config.scenarios = chosen;
    }
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir)
            .with_context(|| format!("creating {}", dir.display()))?;
    }

    let report = run(&config)?;
    for (name, verdict) in &report.verdicts {
        let status = if verdict.pass { "PASS" } else { "FAIL" };
        println!("{name}: {status} ({})", verdict.detail);
    }
    let written = emit(&report, out_dir)?;
    for p in &written {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn cmd_validate(path: &Path) -> anyhow::Result<()> {
    let config = load_config(path).with_context(|| format!("loading {}", path.display()))?;
    println!("{}", serde_json::to_string_pretty(&config)?);
    Ok(())
}
