use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use swigner_cli::artifacts::{write_error, write_report};
use swigner_cli::config::parse_set;
use swigner_cli::{find, Config, RunError, REGISTRY};

#[derive(Parser)]
#[command(name = "swigner", about = "Smoothed Wigner transform experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one experiment.
    Run {
        name: String,
        /// key = value file overriding the defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Single override, repeatable.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Single-threaded, bitwise reproducible.
        #[arg(long)]
        reference: bool,
    },
    /// List experiments with their defaults.
    List,
}

fn resolve(name: &str, file: Option<&PathBuf>, set: &[String]) -> Result<(&'static swigner_cli::Experiment, Config), RunError> {
    let e = find(name)?;
    let mut cfg = e.default_config()?;
    if let Some(path) = file {
        let text = std::fs::read_to_string(path)?;
        cfg.merge(&Config::parse(&text)?)?;
    }
    for s in set {
        let (k, v) = parse_set(s)?;
        cfg.apply_set(&k, &v)?;
    }
    Ok((e, cfg))
}

fn run(name: &str, config: Option<&PathBuf>, set: &[String], out: &PathBuf, seed: u64, reference: bool) -> Result<bool, RunError> {
    let (e, cfg) = resolve(name, config, set)?;
    if reference {
        rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build_global()
            .map_err(|err| RunError::Config(format!("reference mode: {err}")))?;
    }
    let report = (e.run)(&cfg, seed)?;
    write_report(out, e.name, &cfg, seed, reference, &report)?;
    for v in &report.verdicts {
        println!("{} {}: {}", if v.passed { "PASS" } else { "FAIL" }, v.criterion, v.detail);
    }
    for n in &report.notes {
        println!("  {n}");
    }
    Ok(report.passed())
}

fn main() -> ExitCode {
    match Cli::parse().cmd {
        Cmd::List => {
            for e in &REGISTRY {
                println!("{:<22} {}", e.name, e.description);
                println!("{:<22} anchor: {}; criteria {}", "", e.anchor, e.criteria.join(", "));
                for line in e.defaults.lines().filter(|l| !l.trim().is_empty()) {
                    println!("{:<24}{line}", "");
                }
            }
            ExitCode::SUCCESS
        }
        Cmd::Run { name, config, set, out, seed, reference } => match run(&name, config.as_ref(), &set, &out, seed, reference) {
            Ok(true) => ExitCode::SUCCESS,
            Ok(false) => ExitCode::from(1),
            Err(e) => {
                eprintln!("error: {e}");
                let _ = write_error(&out, &e);
                ExitCode::from(e.exit_code() as u8)
            }
        },
    }
}
