// SPDX-License-Identifier: Apache-2.0

//! Experiment driver for random Stieltjes continued fractions.
//!
//! ```text
//! stieltjes-lab <experiment> --config <path> [--seed S]... [--out DIR]
//! stieltjes-lab summarize <dir>
//! ```
//!
//! Experiments: dos | idos | lyapunov | pade-error | measure |
//! invariant | baseline. Exit status: 0 = all embedded checks pass,
//! 1 = usage error, 2 = numerical check failure.

// `!(x > 0.0)` rejects NaN along with out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::manual_is_multiple_of)]

mod config;
mod experiments;

use config::{parse_config, Experiment};
use experiments::{run, summarize, write_report, RunError};
use std::path::PathBuf;
use std::process::ExitCode;

const USAGE: &str = "usage:
  stieltjes-lab <experiment> --config <path> [--seed S]... [--out DIR]
  stieltjes-lab summarize <dir>

experiments: dos | idos | lyapunov | pade-error | measure | invariant | baseline";

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    eprintln!("{USAGE}");
    ExitCode::from(1)
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let Some(command) = args.first() else {
        return usage_error("missing command");
    };

    if command == "summarize" {
        let Some(dir) = args.get(1) else {
            return usage_error("summarize needs a run directory");
        };
        if args.len() > 2 {
            return usage_error("summarize takes exactly one argument");
        }
        return match summarize(&PathBuf::from(dir)) {
            Ok(true) => ExitCode::SUCCESS,
            Ok(false) => ExitCode::from(2),
            Err(RunError::Usage(m)) => usage_error(&m),
            Err(RunError::Io(e)) => usage_error(&format!("i/o error: {e}")),
            Err(RunError::Numeric(m)) => {
                eprintln!("error: {m}");
                ExitCode::from(2)
            }
        };
    }

    let Some(experiment) = Experiment::parse(command) else {
        return usage_error(&format!("unknown experiment `{command}`"));
    };

    let mut config_path: Option<String> = None;
    let mut out_override: Option<String> = None;
    let mut seed_override: Vec<u64> = Vec::new();
    let mut it = args.iter().skip(1);
    while let Some(flag) = it.next() {
        match flag.as_str() {
            "--config" => {
                let Some(v) = it.next() else {
                    return usage_error("--config needs a path");
                };
                config_path = Some(v.clone());
            }
            "--seed" => {
                let Some(v) = it.next() else {
                    return usage_error("--seed needs an integer");
                };
                match v.parse::<u64>() {
                    Ok(s) => seed_override.push(s),
                    Err(_) => return usage_error(&format!("--seed: not an integer: `{v}`")),
                }
            }
            "--out" => {
                let Some(v) = it.next() else {
                    return usage_error("--out needs a directory");
                };
                out_override = Some(v.clone());
            }
            other => return usage_error(&format!("unknown flag `{other}`")),
        }
    }
    let Some(config_path) = config_path else {
        return usage_error("--config is required");
    };
    let text = match std::fs::read_to_string(&config_path) {
        Ok(t) => t,
        Err(e) => return usage_error(&format!("cannot read config `{config_path}`: {e}")),
    };
    let mut cfg = match parse_config(&text, experiment) {
        Ok(c) => c,
        Err(e) => return usage_error(&e.to_string()),
    };
    if !seed_override.is_empty() {
        cfg.seeds = seed_override;
    }
    if let Some(out) = out_override {
        cfg.out = out;
    }

    match run(&cfg) {
        Ok(report) => {
            let dir = PathBuf::from(&cfg.out);
            if let Err(e) = write_report(&dir, &cfg, &report) {
                return match e {
                    RunError::Io(e) => usage_error(&format!("cannot write outputs: {e}")),
                    RunError::Usage(m) | RunError::Numeric(m) => usage_error(&m),
                };
            }
            for c in &report.checks {
                println!(
                    "check {}: observed {:e} vs bound {:e} — {}",
                    c.name,
                    c.observed,
                    c.bound,
                    if c.pass { "PASS" } else { "FAIL" }
                );
            }
            println!("outputs written to {}", dir.display());
            if report.all_pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(RunError::Usage(m)) => usage_error(&m),
        Err(RunError::Io(e)) => usage_error(&format!("i/o error: {e}")),
        Err(RunError::Numeric(m)) => {
            eprintln!("numerical check failure: {m}");
            ExitCode::from(2)
        }
    }
}
