//! Command-line front end for the `limitgeom` library.

mod commands;
mod config;

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use commands::{CliError, CliResult};
use config::{positive_tol, Format, Grid};

const EXIT_INVALID: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "limitgeom", version, about = "Conjugacy limits, wonderful cells, Heisenberg tori and regeneration")]
struct Cli {
    /// Write the artifact to FILE instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Output format; each subcommand accepts a subset.
    #[arg(long, global = true)]
    format: Option<Format>,
    /// Tolerance for pass/fail flags.
    #[arg(long, global = true, value_parser = positive_tol)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Limit of the orthogonal Lie algebra of a form along a monomial path.
    Limit {
        /// Diagonal of the quadratic form, e.g. "1,1,-1".
        #[arg(long, allow_hyphen_values = true)]
        form: Option<String>,
        /// Conjugating path, e.g. "t^2,t,1".
        #[arg(long, allow_hyphen_values = true)]
        conj: Option<String>,
        /// Path of diagonal forms, used instead of --form/--conj.
        #[arg(long, allow_hyphen_values = true)]
        path: Option<String>,
    },
    /// Degeneration poset of the limit groups of O(p,q).
    Poset { p: usize, q: usize },
    /// Cell structure of the closure of the diagonal orthogonal groups.
    Cells {
        n: usize,
        /// Emit the degeneration order as DOT.
        #[arg(long)]
        poset: bool,
    },
    /// Heisenberg-plane representations and developing maps.
    Heis {
        #[command(subcommand)]
        command: HeisCommand,
    },
    /// Side pairings of a parallelogram along a path of conjugated models.
    Regen {
        /// JSON input {kind, D_path, vertices, t_grid}; stdin if omitted.
        input: Option<PathBuf>,
        /// Log-spaced t grid "a:b:n", replacing t_grid.
        #[arg(long)]
        grid: Option<Grid>,
        /// Also write the JSON summary to FILE.
        #[arg(long, value_name = "FILE")]
        summary: Option<PathBuf>,
    },
    /// Sweep of the algebras R[λ]/(λ² = δ) over δ.
    Algebra {
        /// Matrix size for the unitary Lie algebra u(n,1).
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Linear δ grid "a:b:n".
        #[arg(long, default_value = "-1:1:3", allow_hyphen_values = true)]
        grid: Grid,
    },
}

#[derive(Subcommand)]
enum HeisCommand {
    /// Classify a representation given as JSON {x, y, z}.
    Classify { input: Option<PathBuf> },
    /// Developed points f(u, v) over a square grid.
    Dev {
        input: Option<PathBuf>,
        /// Grid of u and v values, as "a:b:n" or "a b n".
        #[arg(long, num_args = 1..=3, allow_hyphen_values = true, default_value = "0:1:5")]
        grid: Vec<String>,
        /// Also write an SVG of the developed unit square to FILE.
        #[arg(long, value_name = "FILE")]
        svg: Option<PathBuf>,
    },
}

fn read_input(path: Option<&Path>) -> CliResult<String> {
    let mut s = String::new();
    match path {
        Some(p) if p != Path::new("-") => {
            s = fs::read_to_string(p).map_err(|e| CliError::input(format!("cannot read {}: {e}", p.display())))?
        }
        _ => {
            io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| CliError::input(format!("cannot read stdin: {e}")))?;
        }
    }
    Ok(s)
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))
}

fn grid_arg(parts: &[String]) -> CliResult<Grid> {
    let joined = parts.join(":");
    joined.parse().map_err(CliError::input)
}

fn run(cli: Cli) -> CliResult<String> {
    let format = cli.format;
    match cli.command {
        Command::Limit { form, conj, path } => {
            commands::limit(form.as_deref(), conj.as_deref(), path.as_deref())
        }
        Command::Poset { p, q } => commands::poset(p, q, format.unwrap_or(Format::Dot)),
        Command::Cells { n, poset } => {
            let f = if poset { Format::Dot } else { format.unwrap_or(Format::Json) };
            commands::cells(n, f)
        }
        Command::Heis { command } => match command {
            HeisCommand::Classify { input } => commands::heis_classify(&read_input(input.as_deref())?),
            HeisCommand::Dev { input, grid, svg } => {
                let format = format.unwrap_or(Format::Csv);
                let want_svg = svg.is_some() || format == Format::Svg;
                let out = commands::heis_dev(&read_input(input.as_deref())?, grid_arg(&grid)?, want_svg)?;
                if let (Some(path), Some(doc)) = (svg, &out.svg) {
                    write_file(&path, doc)?;
                }
                match format {
                    Format::Csv => Ok(out.csv),
                    Format::Svg => Ok(out.svg.unwrap_or_default()),
                    f => Err(CliError::input(format!("developing maps cannot be written as {f}"))),
                }
            }
        },
        Command::Regen { input, grid, summary } => {
            let out = commands::regen(&read_input(input.as_deref())?, grid, cli.tol.unwrap_or(1e-4))?;
            let summary_text = serde_json::to_string_pretty(&out.summary).map_err(CliError::from)? + "\n";
            if let Some(path) = summary {
                write_file(&path, &summary_text)?;
            }
            match format.unwrap_or(Format::Csv) {
                Format::Csv => Ok(out.csv),
                Format::Json => {
                    let full = serde_json::json!({ "summary": out.summary, "trace": out.trace });
                    Ok(serde_json::to_string_pretty(&full).map_err(CliError::from)? + "\n")
                }
                f => Err(CliError::input(format!("regeneration traces cannot be written as {f}"))),
            }
        }
        Command::Algebra { n, grid } => commands::algebra(n, grid, format.unwrap_or(Format::Json)),
    }
}

fn report(e: &CliError) {
    let text = serde_json::to_string(e).unwrap_or_else(|_| format!("{{\"error\":\"{}\"}}", e.error));
    let _ = writeln!(io::stderr(), "{text}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = e.print();
                    return ExitCode::SUCCESS;
                }
                ErrorKind::InvalidSubcommand | ErrorKind::MissingSubcommand
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => EXIT_USAGE,
                _ => EXIT_INVALID,
            };
            let kind = if code == EXIT_USAGE { "UnknownSubcommand" } else { "InvalidInput" };
            report(&CliError {
                error: kind.into(),
                message: e.kind().to_string(),
            });
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let out = cli.out.clone();
    match run(cli) {
        Ok(text) => {
            let written = match out {
                Some(path) => write_file(&path, &text),
                None => io::stdout()
                    .write_all(text.as_bytes())
                    .map_err(|e| CliError::input(format!("cannot write stdout: {e}"))),
            };
            match written {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    report(&e);
                    ExitCode::from(EXIT_INVALID)
                }
            }
        }
        Err(e) => {
            report(&e);
            ExitCode::from(EXIT_INVALID)
        }
    }
}
