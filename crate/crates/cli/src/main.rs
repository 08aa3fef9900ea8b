//! `aswlab`: formula tables and verification pipelines for generic Newton
//! slopes over the rectangle `[0,d1]×[0,d2]`.

mod commands;
mod config;

use std::io::Write;
use std::process::ExitCode;

use aswlab::Exec;
use clap::Parser;
use serde_json::{json, Value};

use commands::{config_failure, Failure};
use config::{Command, Flags, JobConfig};

#[derive(Parser, Debug)]
#[command(
    name = "aswlab",
    version,
    about = "Generic Newton slopes of two-variable Artin-Schreier-Witt towers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

/// `path<TAB>value` lines for every scalar in the report.
fn tsv(v: &Value, path: &str, out: &mut String) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                tsv(
                    x,
                    &if path.is_empty() {
                        k.clone()
                    } else {
                        format!("{path}.{k}")
                    },
                    out,
                );
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                tsv(x, &format!("{path}[{i}]"), out);
            }
        }
        Value::String(s) => out.push_str(&format!("{path}\t{s}\n")),
        other => out.push_str(&format!("{path}\t{other}\n")),
    }
}

fn run(cli: Cli) -> Result<i32, Failure> {
    let cfg = JobConfig::resolve(cli.command, cli.flags).map_err(|e| config_failure(e.0))?;
    let outcome = commands::run(&cfg, Exec::default())?;
    let report = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "command": cfg.command.name(),
        "config": cfg.to_json(),
        "precision": commands::precision(&cfg),
        "result": outcome.result,
    });
    let text = serde_json::to_string_pretty(&report).expect("reports serialize");
    if let Some(path) = &cfg.out {
        std::fs::write(path, format!("{text}\n")).map_err(|e| config_failure(format!("{}: {e}", path.display())))?;
    }
    let mut stdout = std::io::stdout().lock();
    let written = if cfg.json {
        writeln!(stdout, "{text}")
    } else {
        let mut s = String::new();
        tsv(&report, "", &mut s);
        write!(stdout, "{s}")
    };
    // a closed pipe is not an error for a batch tool
    let _ = written;
    Ok(if outcome.pass { 0 } else { 1 })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(f) => {
            eprintln!("aswlab: {}", f.message);
            ExitCode::from(f.code as u8)
        }
    }
}
