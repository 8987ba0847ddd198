//! `zerowell`: command-line front end for the document pipeline.
//!
//! Every subcommand reads and writes the JSON documents defined in the
//! core crate; `-` means stdin/stdout. Exit codes: 0 success, 1 domain
//! failure (inadmissible state, no eigenstate, mismatched wells...),
//! 2 usage error, 3 I/O error. A failing grade is a *successful* grading
//! run: the verdict lives in the report, so `grade` exits 0 either way.

use std::io::{Read, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use zerowell::document::{parse, render, Document, DocumentError};
use zerowell::jeopardy::{expectations, forward_construct, invert, JeopardyError};
use zerowell::model::ModelError;
use zerowell::plot::{plot_document, PlotError, PlotFormat, PlotOptions};
use zerowell::probgen::{generate, grade, GradeOptions, ProbGenError};
use zerowell::spectrum::{find_eigenvalues, ScanParams, SpectrumError};
use zerowell::{DeltaPotential, PiecewiseLinearState, WellConfig};

#[derive(Parser)]
#[command(
    name = "zerowell",
    version,
    about = "Zero-energy eigenstates of a square well dressed with delta spikes",
    long_about = "Invert piecewise-linear states into delta potentials, shoot \
potentials back into states, compute expectation values and spectra, and \
generate/grade worksheet problems. All I/O is JSON documents; use '-' for \
stdin/stdout."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a worksheet problem (deterministic in --seed)
    Generate {
        /// RNG seed; equal seeds give byte-identical problems
        #[arg(long)]
        seed: u64,
        /// Number of genuine interior kinks (1..=8)
        #[arg(long)]
        kinks: u32,
        /// Denominator of the position/amplitude grid (>= kinks+1)
        #[arg(long = "denom-bound")]
        denom_bound: i64,
        /// Output path, '-' for stdout
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Recover the delta potential from a state (or problem) document
    Invert {
        /// State document; a problem document inverts its state
        #[arg(long)]
        state: String,
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Shoot a potential into its zero-energy state, if it has one
    Forward {
        /// Potential document; a problem document uses its solution
        #[arg(long)]
        potential: String,
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Expectation values <T>, <V>, <T+V> of a normalized state
    Expect {
        /// State document; a problem document uses its state
        #[arg(long)]
        state: String,
        /// Potential document; a problem document uses its solution
        #[arg(long)]
        potential: String,
        /// Normalize the state first instead of requiring unit norm
        #[arg(long)]
        normalize: bool,
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Scan the energy axis for eigenvalues of a potential
    Spectrum {
        /// Potential document; a problem document uses its solution
        #[arg(long)]
        potential: String,
        /// Scan window lower edge [default: -10 gamma/L^2]
        #[arg(long, allow_negative_numbers = true)]
        emin: Option<f64>,
        /// Scan window upper edge [default: +40 gamma/L^2]
        #[arg(long, allow_negative_numbers = true)]
        emax: Option<f64>,
        /// Grid points for the scan [default: 2000]
        #[arg(long)]
        grid: Option<u32>,
        /// Bisection convergence tolerance [default: 1e-10]
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Grade a proposed potential against a problem's exact solution
    Grade {
        /// Problem document
        #[arg(long)]
        problem: String,
        /// Proposed potential document
        #[arg(long)]
        answer: String,
        /// Allowed relative error per coefficient [default: 1e-6]
        #[arg(long = "rel-tol")]
        rel_tol: Option<f64>,
        /// Position slack when matching spikes [default: 0 = exact]
        #[arg(long = "pos-tol")]
        pos_tol: Option<f64>,
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Render a document as CSV or SVG
    Plot {
        /// Document to draw: state, problem, potential, or spectrum
        #[arg(long = "in")]
        input: String,
        #[arg(long, value_enum)]
        format: FormatArg,
        #[arg(long, default_value = "-")]
        out: String,
        /// Eigenvalue to draw from a spectrum document [default: 0]
        #[arg(long)]
        index: Option<usize>,
        /// Potential document to overlay as spike markers
        #[arg(long)]
        potential: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Svg,
}

/// CLI failure with its exit code: 1 domain, 2 usage, 3 I/O.
enum CliError {
    Domain(String),
    Usage(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Domain(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Domain(m) | CliError::Usage(m) | CliError::Io(m) => m,
        }
    }
}

impl From<DocumentError> for CliError {
    fn from(err: DocumentError) -> CliError {
        CliError::Domain(err.to_string())
    }
}

impl From<ModelError> for CliError {
    fn from(err: ModelError) -> CliError {
        CliError::Domain(err.to_string())
    }
}

impl From<JeopardyError> for CliError {
    fn from(err: JeopardyError) -> CliError {
        CliError::Domain(err.to_string())
    }
}

impl From<ProbGenError> for CliError {
    fn from(err: ProbGenError) -> CliError {
        match err {
            // bad knob values are usage errors, not physics
            ProbGenError::KinksOutOfRange(_)
            | ProbGenError::DenomBoundTooSmall(_)
            | ProbGenError::DenomBoundTooTight { .. }
            | ProbGenError::BadTolerance => CliError::Usage(err.to_string()),
            _ => CliError::Domain(err.to_string()),
        }
    }
}

impl From<SpectrumError> for CliError {
    fn from(err: SpectrumError) -> CliError {
        match err {
            SpectrumError::BadRange
            | SpectrumError::GridTooSmall
            | SpectrumError::BadTolerance
            | SpectrumError::TooFewSamples => CliError::Usage(err.to_string()),
            SpectrumError::NotAnEigenvalue { .. } => CliError::Domain(err.to_string()),
        }
    }
}

impl From<PlotError> for CliError {
    fn from(err: PlotError) -> CliError {
        match err {
            PlotError::OverlayNotApplicable => CliError::Usage(err.to_string()),
            _ => CliError::Domain(err.to_string()),
        }
    }
}

fn read_input(path: &str) -> Result<String, CliError> {
    if path == "-" {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| CliError::Io(format!("reading stdin: {e}")))?;
        Ok(text)
    } else {
        std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("reading {path}: {e}")))
    }
}

fn write_output(path: &str, content: &str) -> Result<(), CliError> {
    if path == "-" {
        let mut stdout = std::io::stdout().lock();
        stdout
            .write_all(content.as_bytes())
            .and_then(|_| stdout.flush())
            .map_err(|e| CliError::Io(format!("writing stdout: {e}")))
    } else {
        std::fs::write(path, content).map_err(|e| CliError::Io(format!("writing {path}: {e}")))
    }
}

/// At most one input may be stdin; reading it twice is impossible.
fn check_single_stdin(paths: &[&str]) -> Result<(), CliError> {
    if paths.iter().filter(|p| **p == "-").count() > 1 {
        return Err(CliError::Usage(
            "only one input may come from stdin ('-')".into(),
        ));
    }
    Ok(())
}

fn load(path: &str) -> Result<Document, CliError> {
    Ok(parse(&read_input(path)?)?)
}

/// A state, from a state document or a problem's embedded state.
fn take_state(doc: Document, flag: &str) -> Result<PiecewiseLinearState, CliError> {
    match doc {
        Document::State(s) => Ok(s),
        Document::Problem(p) => Ok(p.state().clone()),
        other => Err(CliError::Domain(format!(
            "--{flag} expects a state or problem document, got {}",
            other.kind()
        ))),
    }
}

/// A potential, from a potential document or a problem's solution.
fn take_potential(doc: Document, flag: &str) -> Result<DeltaPotential, CliError> {
    match doc {
        Document::Potential(v) => Ok(v),
        Document::Problem(p) => Ok(p.solution().clone()),
        other => Err(CliError::Domain(format!(
            "--{flag} expects a potential or problem document, got {}",
            other.kind()
        ))),
    }
}

fn emit(doc: &Document, out: &str) -> Result<(), CliError> {
    let mut text = render(doc)?;
    text.push('\n');
    write_output(out, &text)
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Generate {
            seed,
            kinks,
            denom_bound,
            out,
        } => {
            let problem = generate(seed, kinks, denom_bound, &WellConfig::default())?;
            emit(&Document::Problem(problem), &out)
        }
        Command::Invert { state, out } => {
            let state = take_state(load(&state)?, "state")?;
            let potential = invert(&state)?;
            emit(&Document::Potential(potential), &out)
        }
        Command::Forward { potential, out } => {
            let potential = take_potential(load(&potential)?, "potential")?;
            match forward_construct(&potential)? {
                Some(state) => emit(&Document::State(state), &out),
                None => Err(CliError::Domain(
                    "this potential admits no zero-energy eigenstate \
                     (the shot misses the far wall)"
                        .into(),
                )),
            }
        }
        Command::Expect {
            state,
            potential,
            normalize,
            out,
        } => {
            check_single_stdin(&[&state, &potential])?;
            let mut state = take_state(load(&state)?, "state")?;
            let potential = take_potential(load(&potential)?, "potential")?;
            if normalize {
                state = state.normalize()?.0;
            }
            let report = expectations(&state, &potential)?;
            emit(&Document::Energy(report), &out)
        }
        Command::Spectrum {
            potential,
            emin,
            emax,
            grid,
            tol,
            out,
        } => {
            let potential = take_potential(load(&potential)?, "potential")?;
            let defaults = ScanParams::default_for(potential.config());
            let params = ScanParams {
                e_min: emin.unwrap_or(defaults.e_min),
                e_max: emax.unwrap_or(defaults.e_max),
                grid_n: grid.unwrap_or(defaults.grid_n),
                tol: tol.unwrap_or(defaults.tol),
            };
            let result = find_eigenvalues(&potential, &params)?;
            emit(&Document::Spectrum(result), &out)
        }
        Command::Grade {
            problem,
            answer,
            rel_tol,
            pos_tol,
            out,
        } => {
            check_single_stdin(&[&problem, &answer])?;
            let problem = match load(&problem)? {
                Document::Problem(p) => p,
                other => {
                    return Err(CliError::Domain(format!(
                        "--problem expects a problem document, got {}",
                        other.kind()
                    )))
                }
            };
            let answer = match load(&answer)? {
                Document::Potential(v) => v,
                other => {
                    return Err(CliError::Domain(format!(
                        "--answer expects a potential document, got {}",
                        other.kind()
                    )))
                }
            };
            let defaults = GradeOptions::default();
            let options = GradeOptions {
                rel_tol: rel_tol.unwrap_or(defaults.rel_tol),
                pos_tol: pos_tol.unwrap_or(defaults.pos_tol),
            };
            // wrong answers still exit 0: the verdict is in the report
            let report = grade(&problem, &answer, &options)?;
            emit(&Document::Grade(report), &out)
        }
        Command::Plot {
            input,
            format,
            out,
            index,
            potential,
        } => {
            let overlay_path = potential.as_deref().unwrap_or("");
            check_single_stdin(&[&input, overlay_path])?;
            let doc = load(&input)?;
            let overlay = match potential {
                None => None,
                Some(path) => Some(match load(&path)? {
                    Document::Potential(v) => v,
                    other => {
                        return Err(CliError::Domain(format!(
                            "--potential expects a potential document, got {}",
                            other.kind()
                        )))
                    }
                }),
            };
            let options = PlotOptions {
                eigenvalue_index: index.unwrap_or(0),
                overlay,
            };
            let fmt = match format {
                FormatArg::Csv => PlotFormat::Csv,
                FormatArg::Svg => PlotFormat::Svg,
            };
            let mut rendered = plot_document(&doc, fmt, &options)?;
            if !rendered.ends_with('\n') {
                rendered.push('\n');
            }
            write_output(&out, &rendered)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // clap renders its own message; --help/--version exit 0,
            // anything else is a usage error
            let code = if err.exit_code() == 0 { 0 } else { 2 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("zerowell: {}", err.message());
            ExitCode::from(err.code())
        }
    }
}
