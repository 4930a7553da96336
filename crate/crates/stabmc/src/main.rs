//! Thin command-line front end over the experiment runner.
//!
//! Verbs: `run`, `validate`, `export`, `presets`. Exit codes: 0 success,
//! 1 validation failure, 2 runtime failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use stabmc::experiment::{
    self, run_experiment, validate_config, ExperimentConfig, ExperimentError,
};

const USAGE: &str = "\
stabmc — Monte Carlo experiments on stabilizing statistics of Poisson processes

USAGE:
    stabmc run <config.toml | preset:NAME> [--out DIR] [--parallelism N] [--seed S]
    stabmc validate <config.toml>
    stabmc export <bundle-dir> --curves ID[,ID...] [--out FILE]
    stabmc presets list
    stabmc presets show <NAME>

Curve ids for export: gap_i_j (covariance-gap entry) or dk.
";

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match dispatch(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                ExperimentError::Validation(_) | ExperimentError::Parse(_) => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn dispatch(args: &[String]) -> Result<(), ExperimentError> {
    match args.first().map(String::as_str) {
        Some("run") => cmd_run(&args[1..]),
        Some("validate") => cmd_validate(&args[1..]),
        Some("export") => cmd_export(&args[1..]),
        Some("presets") => cmd_presets(&args[1..]),
        _ => {
            print!("{USAGE}");
            if args.is_empty() {
                Ok(())
            } else {
                Err(ExperimentError::Validation(vec![format!(
                    "unknown command `{}`",
                    args[0]
                )]))
            }
        }
    }
}

fn flag_value<'a>(args: &'a [String], name: &str) -> Result<Option<&'a str>, ExperimentError> {
    for (i, a) in args.iter().enumerate() {
        if a == name {
            return match args.get(i + 1) {
                Some(v) => Ok(Some(v)),
                None => Err(ExperimentError::Validation(vec![format!(
                    "flag {name} needs a value"
                )])),
            };
        }
    }
    Ok(None)
}

fn load_config(source: &str) -> Result<ExperimentConfig, ExperimentError> {
    if let Some(name) = source.strip_prefix("preset:") {
        return experiment::preset(name).ok_or_else(|| {
            ExperimentError::Validation(vec![format!("unknown preset `{name}`")])
        });
    }
    ExperimentConfig::load(Path::new(source))
}

fn cmd_run(args: &[String]) -> Result<(), ExperimentError> {
    let source = args
        .first()
        .ok_or_else(|| ExperimentError::Validation(vec!["run needs a config path".into()]))?;
    let mut config = load_config(source)?;
    if let Some(dir) = flag_value(args, "--out")? {
        config.output_dir = dir.to_string();
    }
    if let Some(n) = flag_value(args, "--parallelism")? {
        config.parallelism = n
            .parse()
            .map_err(|_| ExperimentError::Validation(vec![format!("bad parallelism `{n}`")]))?;
    }
    if let Some(s) = flag_value(args, "--seed")? {
        config.master_seed = s
            .parse()
            .map_err(|_| ExperimentError::Validation(vec![format!("bad seed `{s}`")]))?;
    }
    let summary = run_experiment(&config)?;
    println!("bundle: {}", summary.dir.display());
    for name in &summary.manifest.artifacts {
        println!("  {name}");
    }
    for row in &summary.rate_rows {
        println!(
            "rate {}: exponent {:.4} (target {:.4}) -> {}",
            row.curve,
            row.exponent,
            row.target,
            if row.pass { "pass" } else { "FAIL" }
        );
    }
    Ok(())
}

fn cmd_validate(args: &[String]) -> Result<(), ExperimentError> {
    let path = args
        .first()
        .ok_or_else(|| ExperimentError::Validation(vec!["validate needs a config path".into()]))?;
    validate_config(Path::new(path))?;
    println!("ok");
    Ok(())
}

fn cmd_export(args: &[String]) -> Result<(), ExperimentError> {
    let bundle = args
        .first()
        .ok_or_else(|| ExperimentError::Validation(vec!["export needs a bundle dir".into()]))?;
    let curves: Vec<String> = flag_value(args, "--curves")?
        .ok_or_else(|| ExperimentError::Validation(vec!["export needs --curves".into()]))?
        .split(',')
        .map(str::to_string)
        .collect();
    let csv = experiment::export_plotdata(&PathBuf::from(bundle), &curves)?;
    match flag_value(args, "--out")? {
        Some(path) => std::fs::write(path, csv)?,
        None => print!("{csv}"),
    }
    Ok(())
}

fn cmd_presets(args: &[String]) -> Result<(), ExperimentError> {
    match args.first().map(String::as_str) {
        Some("list") | None => {
            for (name, desc) in experiment::presets() {
                println!("{name:18} {desc}");
            }
            Ok(())
        }
        Some("show") => {
            let name = args.get(1).ok_or_else(|| {
                ExperimentError::Validation(vec!["presets show needs a name".into()])
            })?;
            let config = experiment::preset(name).ok_or_else(|| {
                ExperimentError::Validation(vec![format!("unknown preset `{name}`")])
            })?;
            print!("{}", config.to_toml()?);
            Ok(())
        }
        Some(other) => Err(ExperimentError::Validation(vec![format!(
            "unknown presets subcommand `{other}`"
        )])),
    }
}
