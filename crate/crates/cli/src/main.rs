//! `verify <suite> [flags]` runs a verification suite and writes a JSON
//! report; `verify describe <suite>` lists what a suite covers.
//!
//! Exit codes: 0 when every check passes, 1 when any check fails, 2 on a
//! usage, configuration or output error.

mod config;
mod output;

use std::process::ExitCode;

use clap::Parser;
use dwork_core::suites::{self, Suite};

#[derive(Debug, Parser)]
#[command(name = "verify", version, about = "Machine checks of Dwork-type congruences")]
struct Cli {
    /// Suite to run (ghost, dwork-tuple, mellit, hyperg, thirds, fifths,
    /// unit-root, kz, conjecture, all) or `describe`.
    command: String,
    /// Suite name for `describe`.
    target: Option<String>,
    #[command(flatten)]
    flags: config::Flags,
}

fn usage_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn describe(name: Option<&str>) -> ExitCode {
    let Some(name) = name else {
        return usage_error("describe needs a suite name");
    };
    let suite = match name.parse::<Suite>() {
        Ok(s) => s,
        Err(e) => return usage_error(e),
    };
    for member in suite.members() {
        println!("{member}");
        for (anchor, statement) in member.inventory() {
            println!("  {anchor}: {statement}");
        }
    }
    ExitCode::SUCCESS
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
    if cli.command == "describe" {
        return describe(cli.target.as_deref());
    }
    if let Some(extra) = &cli.target {
        return usage_error(format!("unexpected argument '{extra}'"));
    }
    let suite = match cli.command.parse::<Suite>() {
        Ok(s) => s,
        Err(e) => return usage_error(e),
    };
    let resolved = match config::resolve(cli.flags) {
        Ok(r) => r,
        Err(e) => return usage_error(e),
    };

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = resolved.jobs {
        pool = pool.num_threads(n);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => return usage_error(e),
    };
    let checks = pool.install(|| suites::run(suite, &resolved.params));

    let report = output::Report::new(suite.name(), &resolved.params, &checks);
    let json = report.to_json();
    match &resolved.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &json) {
                return usage_error(format!("cannot write {}: {e}", path.display()));
            }
        }
        None => print!("{json}"),
    }
    for c in checks.iter().filter(|c| !c.report.pass) {
        eprintln!("FAIL {}: {}", c.id, c.report.description);
    }
    let s = &report.summary;
    eprintln!("{}: {} checks, {} passed, {} failed", suite, s.total, s.passed, s.failed);
    if s.failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
