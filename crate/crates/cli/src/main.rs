//! `g2thermo`: thermodynamics from integrated pair correlations.
//!
//! Exit status: 0 on success, 1 on a compute failure or a failed
//! invariant under `check`, 2 on an unusable config or command line.

// `!(x > y)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod run;
mod table;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use g2thermo::maxwell::ReconstructionKind;

use config::{Command, Format, RunConfig, SchemaError};

#[derive(Parser, Debug)]
#[command(name = "g2thermo", version, about = "Thermodynamics of 1D quantum models from integrated pair correlations")]
struct Cli {
    /// What to compute. Without --config the built-in setup is used.
    #[arg(value_enum)]
    command: Command,
    /// JSON run configuration (schema/run_config.v1.json).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format; defaults to the config's, then to the --out extension, then csv.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Worker threads for sweeps.
    #[arg(long)]
    threads: Option<usize>,
    /// Seed for noise injection and randomized checks.
    #[arg(long)]
    seed: Option<u64>,
    /// Reconstructed quantity (reconstruct only).
    #[arg(long)]
    kind: Option<ReconstructionKind>,
    /// Print the effective configuration as JSON and exit.
    #[arg(long)]
    print_config: bool,
}

fn effective_config(cli: &Cli) -> Result<RunConfig, SchemaError> {
    if cli.kind.is_some() && cli.command != Command::Reconstruct {
        return Err(SchemaError("--kind only applies to reconstruct".into()));
    }
    let mut config = match &cli.config {
        Some(path) => {
            let c = config::load(path)?;
            if c.command != cli.command {
                return Err(SchemaError(format!(
                    "{} is a `{}` config, not `{}`",
                    path.display(),
                    c.command.as_str(),
                    cli.command.as_str()
                )));
            }
            c
        }
        None => RunConfig::default_for(cli.command, cli.kind),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let (Some(kind), Some(r)) = (cli.kind, config.reconstruct.as_mut()) {
        r.kind = kind;
    }
    config.validate().map_err(SchemaError)?;
    Ok(config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match effective_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if cli.print_config {
        println!("{}", serde_json::to_string_pretty(&config).expect("configs serialize"));
        return ExitCode::SUCCESS;
    }
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start {n} threads: {e}");
            return ExitCode::from(2);
        }
    }

    let out = cli.out.clone().or_else(|| config.output.as_ref().and_then(|o| o.path.clone()));
    let format = cli
        .format
        .or_else(|| config.output.as_ref().and_then(|o| o.format))
        .or_else(|| match out.as_ref().and_then(|p| p.extension()) {
            Some(ext) if ext == "json" => Some(Format::Json),
            _ => None,
        })
        .unwrap_or_default();

    let outcome = match run::execute(&config) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    for r in &outcome.reports {
        eprintln!("{} {}::{} {}", if r.passed { "PASS" } else { "FAIL" }, r.module, r.name, r.detail);
    }
    let text = outcome.table.render(format);
    let written = match &out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| format!("cannot write to stdout: {e}")),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    if outcome.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
