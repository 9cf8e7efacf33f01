#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod cli;
mod run;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use mhessian::report::OUT_DIR_ENV;

use crate::cli::{Cli, Command, Verify};

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Hessian { .. } => "hessian",
        Command::Energy { .. } => "energy",
        Command::Lqnorm { .. } => "lqnorm",
        Command::Verify { which } => match which {
            Verify::Poincare { .. } => "verify-poincare",
            Verify::Sobolev { .. } => "verify-sobolev",
            Verify::Hoelder { .. } => "verify-hoelder",
            Verify::Capacity { .. } => "verify-capacity",
            Verify::Sublevel { .. } => "verify-sublevel",
            Verify::Quasinorm { .. } => "verify-quasinorm",
        },
        Command::Examples { .. } => "examples",
        Command::Integrability { .. } => "integrability",
        Command::Suite => "suite",
    }
}

fn json_target(cli: &Cli) -> Option<PathBuf> {
    cli.out.clone().or_else(|| {
        std::env::var_os(OUT_DIR_ENV)
            .filter(|d| !d.is_empty())
            .map(|d| PathBuf::from(d).join(format!("{}.json", command_name(&cli.command))))
    })
}

fn real_main(cli: Cli) -> Result<i32, Box<dyn std::error::Error>> {
    let out = json_target(&cli);
    let mut doc = run::execute(&cli.command, cli.seed)?;
    doc.config.output.json = out.as_ref().map(|p| p.display().to_string());
    doc.config.output.csv = cli.csv.as_ref().map(|p| p.display().to_string());
    let json = doc.to_json_pretty()?;
    match &out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(path, json + "\n")?;
        }
        None => {
            let mut stdout = io::stdout().lock();
            writeln!(stdout, "{json}")?;
        }
    }
    if let Some(path) = &cli.csv {
        doc.write_csv(BufWriter::new(File::create(path)?))?;
    }
    let s = &doc.summary;
    eprintln!(
        "{}: {} holds, {} violated, {} sharpness witnesses",
        command_name(&cli.command),
        s.holds,
        s.violated,
        s.sharpness_witness
    );
    Ok(doc.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match real_main(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
