//! `unitary-schur`: convert between Blaschke zeros, Schur parameters and
//! unitary colligation matrices, and verify the results.

mod commands;

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use unitary_schur::{json as docs, tol, Error, Orientation, C64};

use commands::{Diagnostic, Outcome, Route, Settings};

#[derive(Parser, Debug)]
#[command(name = "unitary-schur", version, about)]
struct Cli {
    /// Tolerance for agreement diagnostics (construction tolerances are fixed).
    #[arg(long, global = true, default_value_t = tol::ROUND)]
    tolerance: f64,
    /// Number of random disc samples used by verification checks.
    #[arg(long, global = true, default_value_t = 20)]
    samples: usize,
    /// Seed for randomized verification samples.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Read the input document from this file instead of stdin.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Write the result to this file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a unitary colligation from Schur parameters or a Blaschke product.
    Realize {
        #[arg(long, value_enum)]
        route: Option<RouteArg>,
    },
    /// Run the Schur algorithm on a colligation matrix.
    Schur {
        /// Normalize the B row by a fresh gauge before every step.
        #[arg(long)]
        renormalize_each_step: bool,
    },
    /// Reduce a square matrix to special Hessenberg form by a state gauge.
    Hessenberg {
        #[arg(long, value_enum, default_value_t = OrientationArg::Lower)]
        orientation: OrientationArg,
    },
    /// Close the second channel of a partitioned colligation through another.
    Couple,
    /// Evaluate a colligation or rational function at a point.
    Eval {
        /// Point as `re` or `re,im`.
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
    /// Check unitarity, minimality, inner sampling and spectral identities.
    Verify,
    /// Convert between a rational inner function and its Schur parameters.
    Params,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum RouteArg {
    Model,
    ClosedForm,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum OrientationArg {
    Lower,
    Upper,
}

#[derive(Serialize)]
struct CommandResult<'a> {
    status: &'a str,
    payload: &'a Value,
    diagnostics: &'a [Diagnostic],
}

const EXIT_VALIDATION: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

fn parse_point(text: &str) -> Result<C64, Error> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let number = |s: &str| {
        s.parse::<f64>()
            .map_err(|_| Error::InvalidInput(format!("cannot parse '{s}' as a number")))
    };
    match parts.as_slice() {
        [re] => Ok(C64::new(number(re)?, 0.0)),
        [re, im] => Ok(C64::new(number(re)?, number(im)?)),
        _ => Err(Error::InvalidInput(format!(
            "expected 're' or 're,im', got '{text}'"
        ))),
    }
}

fn read_input(path: Option<&PathBuf>) -> Result<Value, Error> {
    let text = match path {
        Some(p) => fs::read_to_string(p)
            .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", p.display())))?,
        None => {
            let mut s = String::new();
            io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| Error::InvalidInput(format!("cannot read stdin: {e}")))?;
            s
        }
    };
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| Error::InvalidInput(format!("input is not valid JSON: {e}")))?;
    Ok(commands::unwrap_envelope(value))
}

fn run(cli: &Cli) -> Outcome {
    let settings = Settings {
        tolerance: cli.tolerance,
        samples: cli.samples,
        seed: cli.seed,
    };
    let result = read_input(cli.input.as_ref()).and_then(|input| match &cli.command {
        Command::Realize { route } => {
            let route = route.map(|r| match r {
                RouteArg::Model => Route::Model,
                RouteArg::ClosedForm => Route::ClosedForm,
            });
            commands::realize(&input, route, &settings)
        }
        Command::Schur {
            renormalize_each_step,
        } => commands::schur(&input, *renormalize_each_step),
        Command::Hessenberg { orientation } => {
            let orientation = match orientation {
                OrientationArg::Lower => Orientation::Lower,
                OrientationArg::Upper => Orientation::Upper,
            };
            commands::hessenberg(&input, orientation)
        }
        Command::Couple => commands::couple(&input, &settings),
        Command::Eval { z } => commands::eval(&input, parse_point(z)?),
        Command::Verify => commands::verify(&input, &settings),
        Command::Params => commands::params(&input, &settings),
    });
    result.unwrap_or_else(|e| Outcome {
        payload: Value::Null,
        diagnostics: Vec::new(),
        error: Some(e),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = run(&cli);

    let all_passed = outcome.diagnostics.iter().all(Diagnostic::passed);
    let (status, code) = match &outcome.error {
        Some(e) if e.is_validation() => ("error", EXIT_VALIDATION),
        Some(_) => ("error", EXIT_NUMERICAL),
        None if !all_passed => ("error", EXIT_NUMERICAL),
        None => ("ok", 0),
    };
    let payload = match (&outcome.error, &outcome.payload) {
        (Some(e), Value::Null) => json!({ "error": e.to_string() }),
        (Some(e), partial) => json!({ "error": e.to_string(), "partial": partial }),
        (None, payload) => payload.clone(),
    };

    let mut stderr = io::stderr().lock();
    for d in &outcome.diagnostics {
        if let Ok(line) = docs::to_string(d) {
            let _ = writeln!(stderr, "{line}");
        }
    }

    let result = CommandResult {
        status,
        payload: &payload,
        diagnostics: &outcome.diagnostics,
    };
    let text = match docs::to_string(&result) {
        Ok(t) => t + "\n",
        Err(e) => {
            let _ = writeln!(stderr, "{e}");
            return ExitCode::from(EXIT_NUMERICAL);
        }
    };
    let written = match &cli.output {
        Some(path) => fs::write(path, text.as_bytes()),
        None => io::stdout().lock().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "cannot write output: {e}");
        return ExitCode::from(EXIT_VALIDATION);
    }
    ExitCode::from(code)
}
