//! Batch CLI: `qfe <formula|cor14|rate|verify> --config <path>
//! [--out <path>] [--csv <path>] [--grid N] [--cutoff N]`.
//!
//! Exit codes: 0 success, 2 validation error, 3 numeric failure,
//! 4 resource limit.

use qfe::cli::{run_scenario, Scenario, ScenarioKind};
use qfe::QfeError;
use std::path::PathBuf;
use std::process::ExitCode;

struct Args {
    command: ScenarioKind,
    config: PathBuf,
    out: Option<PathBuf>,
    csv: Option<PathBuf>,
    grid: Option<usize>,
    cutoff: Option<usize>,
}

const USAGE: &str = "usage: qfe <formula|cor14|rate|verify> --config <path> \
[--out <path>] [--csv <path>] [--grid N] [--cutoff N]";

fn parse_args() -> Result<Args, String> {
    let mut argv = std::env::args().skip(1);
    let command = argv.next().ok_or(USAGE.to_string())?;
    let command = ScenarioKind::parse(&command)
        .ok_or_else(|| format!("unknown command `{command}`\n{USAGE}"))?;
    let mut config = None;
    let mut out = None;
    let mut csv = None;
    let mut grid = None;
    let mut cutoff = None;
    while let Some(flag) = argv.next() {
        let mut value = || {
            argv.next()
                .ok_or_else(|| format!("flag {flag} needs a value"))
        };
        match flag.as_str() {
            "--config" => config = Some(PathBuf::from(value()?)),
            "--out" => out = Some(PathBuf::from(value()?)),
            "--csv" => csv = Some(PathBuf::from(value()?)),
            "--grid" => grid = Some(value()?.parse().map_err(|e| format!("--grid: {e}"))?),
            "--cutoff" => cutoff = Some(value()?.parse().map_err(|e| format!("--cutoff: {e}"))?),
            other => return Err(format!("unknown flag `{other}`\n{USAGE}")),
        }
    }
    Ok(Args {
        command,
        config: config.ok_or_else(|| format!("--config is required\n{USAGE}"))?,
        out,
        csv,
        grid,
        cutoff,
    })
}

fn run(args: &Args) -> Result<bool, QfeError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| QfeError::InvalidArgument(format!("config {}: {e}", args.config.display())))?;
    let mut scenario = Scenario::from_json(&text)?;
    if scenario.kind != args.command {
        return Err(QfeError::InvalidArgument(format!(
            "kind: config declares `{}` but the command is `{}`",
            scenario.kind.as_str(),
            args.command.as_str()
        )));
    }
    if args.grid.is_some() {
        scenario.options.grid = args.grid;
    }
    if args.cutoff.is_some() {
        scenario.options.cutoff = args.cutoff;
    }
    let report = run_scenario(&scenario)?;
    let json = serde_json::to_string_pretty(&report)
        .map_err(|e| QfeError::Numeric(format!("report serialization: {e}")))?;
    match &args.out {
        Some(path) => std::fs::write(path, &json)
            .map_err(|e| QfeError::InvalidArgument(format!("writing {}: {e}", path.display())))?,
        None => println!("{json}"),
    }
    if let Some(path) = &args.csv {
        std::fs::write(path, report.to_csv())
            .map_err(|e| QfeError::InvalidArgument(format!("writing {}: {e}", path.display())))?;
    }
    Ok(report.all_checks_pass())
}

fn main() -> ExitCode {
    let args = match parse_args() {
        Ok(args) => args,
        Err(message) => {
            eprintln!("{message}");
            return ExitCode::from(2);
        }
    };
    match run(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verification checks failed");
            ExitCode::from(3)
        }
        Err(err) => {
            eprintln!("{err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
