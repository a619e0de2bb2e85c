// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::io::{self, Read};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mna_core::codec::{dissect_text, parse_hex, to_hex};
use mna_core::composer::validate_stack;
use mna_core::format::{build_stack, parse_scenario, parse_stack_description, set_scenario_option};
use mna_core::simulator::run_scenario;
use mna_core::actions::Color;

/// MPLS Network Action stack tools and simulator.
#[derive(Debug, Parser)]
#[command(name = "mna", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Encode a stack description and print it as hex.
    Build {
        /// Description file, `-` for standard input.
        file: PathBuf,
    },
    /// Annotate a hex label stack, one line per LSE.
    Dissect {
        /// Hex bytes; read from standard input when absent.
        hex: Option<String>,
        /// Stop after this many LSEs.
        #[arg(long)]
        rld: Option<usize>,
    },
    /// Check that every stream's stack is readable along its path.
    Validate {
        scenario: PathBuf,
        /// Check this stack description instead of the composed stacks.
        #[arg(long, requires = "path")]
        stack: Option<PathBuf>,
        /// Path the `--stack` is checked against.
        #[arg(long, requires = "stack")]
        path: Option<String>,
    },
    /// Run a scenario and write the JSON report.
    Simulate {
        scenario: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override a `[scenario]` setting, e.g. `--set nrp_enforce=off`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        settings: Vec<String>,
    },
}

enum Failure {
    Input(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Internal(_) => 1,
        }
    }
}

fn input(e: impl std::fmt::Display) -> Failure {
    Failure::Input(e.to_string())
}

fn read_source(path: &Path) -> Result<String, Failure> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| input(format!("stdin: {e}")))?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn located(path: &Path, e: impl std::fmt::Display) -> Failure {
    input(format!("{}: {e}", path.display()))
}

fn build(file: &Path) -> Result<(), Failure> {
    let text = read_source(file)?;
    let bytes = build_stack(&text).map_err(|e| located(file, e))?;
    println!("{}", to_hex(&bytes));
    Ok(())
}

fn dissect(hex: Option<String>, rld: Option<usize>) -> Result<(), Failure> {
    let text = match hex {
        Some(h) => h,
        None => read_source(Path::new("-"))?,
    };
    let bytes = parse_hex(&text).map_err(|e| input(format!("bad hex input: {e}")))?;
    if !bytes.len().is_multiple_of(4) {
        return Err(input(format!(
            "input is {} bytes, not a whole number of 4-byte LSEs",
            bytes.len()
        )));
    }
    print!("{}", dissect_text(&bytes, rld));
    Ok(())
}

fn validate(file: &Path, stack: Option<PathBuf>, path: Option<String>) -> Result<(), Failure> {
    let sc = parse_scenario(&read_source(file)?).map_err(|e| located(file, e))?;
    let caps = sc.caps();
    let mut checks = Vec::new();
    if let (Some(stack_file), Some(name)) = (stack, path) {
        let def = sc
            .path(&name)
            .ok_or_else(|| input(format!("{}: unknown path `{name}`", file.display())))?;
        let desc = parse_stack_description(&read_source(&stack_file)?)
            .map_err(|e| located(&stack_file, e))?;
        checks.push((stack_file.display().to_string(), desc.stack, def.path.clone()));
    } else {
        for s in &sc.streams {
            let def = sc
                .path(&s.path)
                .ok_or_else(|| input(format!("{}: line {}: unknown path `{}`", file.display(), s.line, s.path)))?;
            for color in [Color::A, Color::B] {
                let reqs = sc.stream_requests(s, color).map_err(|e| located(file, e))?;
                let stack = mna_core::composer::compose_stack(&def.path, &reqs, &caps)
                    .map_err(|e| located(file, format!("stream {}: {e}", s.name)))?;
                checks.push((format!("stream {} (color {color})", s.name), stack, def.path.clone()));
            }
        }
    }
    let mut bad = 0;
    for (what, stack, path) in checks {
        let report = validate_stack(&stack, &path, &caps).map_err(|e| located(file, e))?;
        if report.is_valid() {
            println!("{what}: ok ({} LSEs)", stack.lse_count());
        } else {
            bad += 1;
            println!("{what}: {} issue(s)", report.issues.len());
            for i in &report.issues {
                println!("  {i}");
            }
        }
    }
    if bad > 0 {
        return Err(input(format!("{bad} stack(s) failed validation")));
    }
    Ok(())
}

fn simulate(file: &Path, seed: Option<u64>, out: Option<PathBuf>, settings: &[String]) -> Result<(), Failure> {
    let mut sc = parse_scenario(&read_source(file)?).map_err(|e| located(file, e))?;
    for s in settings {
        set_scenario_option(&mut sc, s).map_err(|e| input(format!("--set {s}: {e}")))?;
    }
    if let Some(seed) = seed {
        sc.seed = seed;
    }
    let report = run_scenario(&sc).map_err(|e| located(file, e))?;
    if let Some(out) = out {
        fs::write(&out, report.to_json() + "\n")
            .map_err(|e| Failure::Internal(format!("{}: {e}", out.display())))?;
    }
    print!("{}", report.summary());
    if report.immutable_violations > 0 {
        return Err(Failure::Internal(format!(
            "{} packets had their immutable prefix modified",
            report.immutable_violations
        )));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Build { file } => build(&file),
        Command::Dissect { hex, rld } => dissect(hex, rld),
        Command::Validate { scenario, stack, path } => validate(&scenario, stack, path),
        Command::Simulate {
            scenario,
            seed,
            out,
            settings,
        } => simulate(&scenario, seed, out, &settings),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (Failure::Input(m) | Failure::Internal(m)) = &f;
            eprintln!("mna: {m}");
            ExitCode::from(f.code())
        }
    }
}
