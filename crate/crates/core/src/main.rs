use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use polariton::config::{RawConfig, Scenario};
use polariton::scenario;

#[derive(Parser)]
#[command(name = "polariton", version, about = "Dark-state strong coupling in a dissipative cavity-QED system")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario described by a config file, with optional overrides.
    Run {
        /// Config file (`key = value` lines); may be omitted when
        /// `--scenario` and `--preset` are given.
        config: Option<PathBuf>,
        #[arg(long)]
        preset: Option<String>,
        #[arg(long)]
        scenario: Option<String>,
        /// Output CSV; stdout when absent from both here and the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Integrator relative tolerance (absolute tolerance is 1% of it).
        #[arg(long)]
        tol: Option<f64>,
        /// Fock cutoffs as `N1,N2`.
        #[arg(long)]
        cutoffs: Option<String>,
        /// Also write a gnuplot script next to the CSV.
        #[arg(long)]
        gnuplot: bool,
        /// Any other config key, as `key=value`; repeatable.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// List scenario names.
    Scenarios,
}

fn build_config(
    config: Option<PathBuf>,
    overrides: Vec<(String, String)>,
) -> polariton::Result<polariton::config::ScenarioConfig> {
    let mut raw = match config {
        Some(path) => RawConfig::parse(&fs::read_to_string(&path)?)?,
        None => RawConfig::default(),
    };
    for (k, v) in overrides {
        raw.set(&k, &v)?;
    }
    raw.resolve()
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::Scenarios => {
            for s in Scenario::ALL {
                println!("{s}");
            }
            ExitCode::SUCCESS
        }
        Command::Run { config, preset, scenario: name, out, tol, cutoffs, gnuplot, set } => {
            let mut overrides = Vec::new();
            for kv in set {
                match kv.split_once('=') {
                    Some((k, v)) => overrides.push((k.trim().to_string(), v.trim().to_string())),
                    None => {
                        eprintln!("error: --set expects KEY=VALUE, got '{kv}'");
                        return ExitCode::from(2);
                    }
                }
            }
            let named = [
                ("preset", preset),
                ("scenario", name),
                ("tol", tol.map(|t| t.to_string())),
                ("cutoffs", cutoffs),
                ("output", out.map(|p| p.display().to_string())),
                ("gnuplot", gnuplot.then(|| "true".to_string())),
            ];
            overrides.extend(named.into_iter().filter_map(|(k, v)| v.map(|v| (k.to_string(), v))));
            let cfg = match build_config(config, overrides) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            let out = cfg.output.as_ref().map(PathBuf::from);
            match scenario::execute(&cfg, out.as_deref()) {
                Ok(r) => {
                    if let Some(path) = &out {
                        eprintln!("wrote {} rows to {}", r.len(), path.display());
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: scenario {} failed: {e}", cfg.scenario);
                    ExitCode::FAILURE
                }
            }
        }
    }
}
