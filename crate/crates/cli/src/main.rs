//! `bounds`: evaluate the finiteness bounds and run the geometry property
//! suites from the command line.
//!
//! Exit codes: 0 success, 1 property failure, 2 invalid input, 3 capacity
//! exceeded.

mod args;
mod output;
mod run;

use std::io::Write;
use std::process::ExitCode;

use bounds_core::constants::ConstantsError;
use bounds_core::geometry::GeometryError;
use bounds_core::parshin::ParshinError;
use bounds_core::MagnitudeError;
use clap::Parser;
use serde_json::json;

use args::{Cli, Command};

#[derive(Debug)]
pub enum Failure {
    Property(String),
    Invalid(String),
    Capacity(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Property(_) => 1,
            Failure::Invalid(_) => 2,
            Failure::Capacity(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Property(m) | Failure::Invalid(m) | Failure::Capacity(m) => m,
        }
    }
}

impl From<MagnitudeError> for Failure {
    fn from(e: MagnitudeError) -> Self {
        match e {
            MagnitudeError::OrderViolation | MagnitudeError::InvalidTower(_) => Failure::Invalid(e.to_string()),
            MagnitudeError::CapacityExceeded(_)
            | MagnitudeError::IndeterminateOrder
            | MagnitudeError::DepthExceedsValue(_)
            | MagnitudeError::Imprecise => Failure::Capacity(e.to_string()),
        }
    }
}

impl From<ConstantsError> for Failure {
    fn from(e: ConstantsError) -> Self {
        match e {
            ConstantsError::InvalidParams(m) => Failure::Invalid(m),
            ConstantsError::Magnitude(m) => m.into(),
        }
    }
}

impl From<ParshinError> for Failure {
    fn from(e: ParshinError) -> Self {
        match e {
            ParshinError::Constants(c) => c.into(),
            ParshinError::Magnitude(m) => m.into(),
            other => Failure::Invalid(other.to_string()),
        }
    }
}

impl From<GeometryError> for Failure {
    fn from(e: GeometryError) -> Self {
        match e {
            GeometryError::InvalidArgument(_)
            | GeometryError::InvalidBetas(_)
            | GeometryError::Parse(_)
            | GeometryError::ShapeMismatch(_) => Failure::Invalid(e.to_string()),
            other => Failure::Property(other.to_string()),
        }
    }
}

fn execute(cli: &Cli) -> Result<(String, i32), Failure> {
    let common = &cli.common;
    let ctx = common.context()?;
    let (name, args, report) = match &cli.command {
        Command::Shafarevich(a) => ("shafarevich", json!(a), run::bounds(&ctx, "shafarevich", a)?),
        Command::Mordell(a) => ("mordell", json!(a), run::bounds(&ctx, "mordell", a)?),
        Command::GeomVerify(a) => ("geom-verify", json!(a), run::geom_verify(common.seed, a)?),
    };
    let config = json!({
        "command": name,
        "args": args,
        "seed": common.seed,
        "exact_threshold_bits": common.exact_threshold_bits,
        "precision_digits": common.precision_digits,
        "max_tower_height": common.max_tower_height,
        "format": common.format,
        "trace": common.trace,
    });
    let text = output::render(&report, &config, common.format, common.trace)?;
    Ok((text, report.exit_code()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok((text, code)) => {
            let mut stdout = std::io::stdout().lock();
            // a closed pipe is not an error of the computation
            let _ = writeln!(stdout, "{}", text.trim_end());
            ExitCode::from(code as u8)
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
