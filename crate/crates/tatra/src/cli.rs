//! Command-line interface. Exit codes: 0 success, 1 failed assertion,
//! 2 bad parameters, 3 I/O or file format.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use tatra_core::SeparabilityOptions;

use crate::batch;
use crate::commands::{self, CommandError, InstanceSpec, DEFAULT_MAX_DEGREE};
use crate::formats::{self, FormatError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "tatra", version, about = "Build and check Tatra association schemes X(q, n)")]
pub struct Cli {
    /// Refuse instances whose degree n(q+1) exceeds this bound
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_DEGREE)]
    pub max_degree: usize,
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the output here instead of standard output (for `build`: the
    /// directory receiving the matrix and label files, default `.`)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the color matrix and the label map of X(q, n)
    Build { q: u64, n: u32 },
    /// Check the structure constants, schurity and the generator action
    Verify {
        q: u64,
        n: u32,
        /// Replace the color matrix by the one in this file before checking
        #[arg(long)]
        matrix: Option<PathBuf>,
    },
    /// Export the intersection numbers as JSON
    Tensor { q: u64, n: u32 },
    /// Orders of Aut and Iso, algebraic automorphisms and the induced ratio
    Groups { q: u64, n: u32 },
    /// Separability bounds with witnesses
    Report {
        q: u64,
        n: u32,
        /// Check every base point (default: all up to degree 100, else 8 evenly spaced)
        #[arg(long)]
        all_alpha: bool,
    },
    /// Run `report` on every "q n" line of a file
    Batch {
        file: PathBuf,
        /// Check every base point of every instance
        #[arg(long)]
        all_alpha: bool,
    },
}

/// Result of one invocation: text for standard output and the exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: u8,
}

fn render<T: Serialize>(value: &T, format: Format, text: impl FnOnce(&T) -> String) -> Result<String, CommandError> {
    Ok(match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(value).map_err(FormatError::from)?;
            s.push('\n');
            s
        }
        Format::Text => text(value),
    })
}

fn options(all_alpha: bool) -> SeparabilityOptions {
    SeparabilityOptions {
        all_alpha,
        ..SeparabilityOptions::default()
    }
}

fn dispatch(cli: &Cli) -> Result<(String, u8), CommandError> {
    let spec = |q, n| InstanceSpec { q, n };
    let f = cli.format;
    match &cli.command {
        Command::Build { q, n } => {
            let x = spec(*q, *n).build(cli.max_degree)?;
            let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
            let summary = commands::build(&x, &dir)?;
            Ok((render(&summary, f, commands::build_text)?, 0))
        }
        Command::Verify { q, n, matrix } => {
            let mut x = spec(*q, *n).build(cli.max_degree)?;
            if let Some(path) = matrix {
                commands::inject_matrix(&mut x, path)?;
            }
            let r = commands::verify(&x)?;
            Ok((render(&r, f, commands::verify_text)?, 0))
        }
        Command::Tensor { q, n } => {
            let x = spec(*q, *n).build(cli.max_degree)?;
            let t = commands::tensor(&x)?;
            let out = match f {
                Format::Json => {
                    let mut s = serde_json::to_string(&t).map_err(FormatError::from)?;
                    s.push('\n');
                    s
                }
                Format::Text => commands::tensor_text(&t),
            };
            Ok((out, 0))
        }
        Command::Groups { q, n } => {
            let x = spec(*q, *n).build(cli.max_degree)?;
            let g = commands::groups(&x)?;
            Ok((render(&g, f, commands::groups_text)?, 0))
        }
        Command::Report { q, n, all_alpha } => {
            let x = spec(*q, *n).build(cli.max_degree)?;
            let r = commands::report(&x, &options(*all_alpha))?;
            Ok((render(&r, f, commands::report_text)?, 0))
        }
        Command::Batch { file, all_alpha } => {
            let text = formats::read_text(file)?;
            let specs = batch::parse_batch(&text)?;
            let entries = batch::run_batch(&specs, &options(*all_alpha), cli.max_degree);
            let code = batch::batch_exit_code(&entries);
            Ok((render(&entries, f, |e| batch::batch_text(e))?, code))
        }
    }
}

pub fn run(cli: &Cli) -> Outcome {
    let result = dispatch(cli).and_then(|(stdout, code)| match (&cli.out, &cli.command) {
        (Some(path), cmd) if !matches!(cmd, Command::Build { .. }) => {
            formats::write_text(path, &stdout)?;
            Ok((String::new(), code))
        }
        _ => Ok((stdout, code)),
    });
    match result {
        Ok((stdout, code)) => Outcome {
            stdout,
            stderr: String::new(),
            code,
        },
        Err(e) => Outcome {
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
            code: e.exit_code(),
        },
    }
}
