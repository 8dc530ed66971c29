mod args;
mod commands;
mod render;

use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::error::ErrorKind;
use clap::Parser;
use cppforge::{Error, ExhaustiveCap};
use serde_json::{json, Value};

use args::{Cli, Format};

const EXIT_OTHER: u8 = 1;
const EXIT_PRECONDITION: u8 = 2;
const EXIT_COUNTEREXAMPLE: u8 = 3;
const EXIT_PARSE: u8 = 4;

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Parse { .. } => EXIT_PARSE,
        Error::PreconditionViolated(_)
        | Error::HypothesisFails { .. }
        | Error::NotPrime(_)
        | Error::NotIrreducible(_)
        | Error::BadModulus(_)
        | Error::FieldTooLarge { .. }
        | Error::OutOfRange { .. }
        | Error::OrderCapExceeded { .. }
        | Error::SearchCapExceeded { .. }
        | Error::MapEscapesKernel { .. } => EXIT_PRECONDITION,
        _ => EXIT_OTHER,
    }
}

fn stamp(records: &mut [Value]) {
    let now = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    for r in records {
        if let Value::Object(map) = r {
            map.insert("timestamp".into(), json!(now));
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_PARSE),
            };
        }
    };
    let out = &cli.output;
    let mut report = match commands::execute(&cli.command, ExhaustiveCap(out.cap)) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    if !out.reproducible && !report.json_lines && out.format != Format::Csv {
        stamp(&mut report.records);
    }
    let text = match render::render(&report, out.format) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_OTHER);
        }
    };
    let written = match &out.out {
        Some(path) => std::fs::write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: cannot write report: {e}");
        return ExitCode::from(EXIT_OTHER);
    }
    if report.counterexample {
        eprintln!("counterexample found");
        return ExitCode::from(EXIT_COUNTEREXAMPLE);
    }
    ExitCode::SUCCESS
}
