use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qnichols::error::Error;
use qnichols::report::{self, Outcome, ValidationSection};
use qnichols::rootdata::{RootDatum, SubRootDatum};
use qnichols::selftest::{self, SelftestOptions, DEFAULT_SEED};
use qnichols::uq::EngineConfig;

const EXIT_MATH: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_CAP: u8 = 3;

#[derive(Parser)]
#[command(name = "qnichols", version, about = "Exact braided Hopf algebras of sub-root data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Check the six embedding conditions of a sub-root datum.
    ///
    /// With two files, the first is an ambient datum that must agree with the
    /// one the sub-root datum names.
    Validate {
        #[arg(value_name = "[DATUM] SUBDATUM", num_args = 1..=2, required = true)]
        files: Vec<PathBuf>,
    },
    /// Compute B up to a degree bound and report its structure.
    Compute {
        #[arg(value_name = "SUBDATUM")]
        subdatum: PathBuf,
        #[arg(long, default_value_t = 3)]
        max_degree: usize,
        #[arg(long, default_value_t = EngineConfig::default().orbit_cap as u64,
              value_parser = clap::value_parser!(u64).range(1..))]
        orbit_cap: u64,
    },
    /// Run the embedded property suites.
    Selftest {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = SelftestOptions::default().max_degree)]
        max_degree: usize,
        #[arg(long, hide = true)]
        corrupt_serre: bool,
    },
}

fn located(path: &Path, e: Error) -> Error {
    match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        Error::Input(m) => Error::Input(format!("{}: {m}", path.display())),
        e => e,
    }
}

fn load_sub(path: &Path) -> Result<SubRootDatum, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
    SubRootDatum::from_json(&text, path.parent()).map_err(|e| located(path, e))
}

fn load_datum(path: &Path) -> Result<RootDatum, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
    RootDatum::from_json(&text).map_err(|e| located(path, e))
}

fn emit(out: &Option<PathBuf>, body: &str) -> Result<(), Error> {
    match out {
        Some(p) => std::fs::write(p, body)
            .map_err(|e| Error::Input(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn validation_text(v: &ValidationSection) -> String {
    let mut s = String::new();
    for c in &v.conditions {
        s.push_str(&format!(
            "({}) {} {}",
            c.id,
            if c.passed { "ok  " } else { "FAIL" },
            c.description
        ));
        if let Some(w) = &c.witness {
            s.push_str(&format!(": {w}"));
        }
        s.push('\n');
    }
    s.push_str(if v.passed { "valid\n" } else { "invalid\n" });
    s
}

fn run(cli: &Cli) -> Result<u8, Error> {
    match &cli.command {
        Command::Validate { files } => {
            let s = load_sub(files.last().expect("at least one file"))?;
            if let [d, _] = files.as_slice() {
                let d = load_datum(d)?;
                if d != s.ambient {
                    return Err(Error::Input(
                        "the ambient datum differs from the one named by the sub-root datum".into(),
                    ));
                }
            }
            let v: ValidationSection = (&s.validate()).into();
            let body = match cli.format {
                Format::Text => validation_text(&v),
                Format::Json => serde_json::to_string_pretty(&v).expect("serializable") + "\n",
            };
            emit(&cli.out, &body)?;
            Ok(if v.passed { 0 } else { EXIT_MATH })
        }
        Command::Compute {
            subdatum,
            max_degree,
            orbit_cap,
        } => {
            let s = load_sub(subdatum)?;
            let cfg = EngineConfig {
                orbit_cap: *orbit_cap as usize,
                ..EngineConfig::default()
            };
            let (r, outcome) = report::compute(&s, *max_degree, cfg)?;
            let body = match cli.format {
                Format::Text => r.to_text(),
                Format::Json => r.to_json() + "\n",
            };
            emit(&cli.out, &body)?;
            Ok(match outcome {
                Outcome::Pass => 0,
                Outcome::MathFailure => EXIT_MATH,
                Outcome::Partial => EXIT_CAP,
            })
        }
        Command::Selftest {
            seed,
            max_degree,
            corrupt_serre,
        } => {
            let results = selftest::run(SelftestOptions {
                seed: *seed,
                max_degree: *max_degree,
                corrupt_serre: *corrupt_serre,
            })?;
            let ok = results.iter().all(|r| r.passed);
            let body = match cli.format {
                Format::Text => {
                    let mut s: String = results.iter().map(|r| format!("{r}\n")).collect();
                    s.push_str(if ok { "selftest passed\n" } else { "selftest FAILED\n" });
                    s
                }
                Format::Json => serde_json::to_string_pretty(&results).expect("serializable") + "\n",
            };
            emit(&cli.out, &body)?;
            Ok(if ok { 0 } else { EXIT_MATH })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Parse(_) | Error::Input(_) => EXIT_INPUT,
                Error::HeightBound { .. } | Error::DegreeBound { .. } | Error::CapExceeded { .. } => {
                    EXIT_CAP
                }
                _ => EXIT_MATH,
            })
        }
    }
}
