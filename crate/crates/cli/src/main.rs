//! `subrec`: correctability checks, explicit recoveries and unitarily correctable
//! subsystems from the command line.

mod report;

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use subrec_core::algebra::noiseless_subsystems;
use subrec_core::correctability::check_correctable;
use subrec_core::demo::{demo_build, DemoName, DemoSpec};
use subrec_core::io::{channel_to_json, parse_channel, parse_subsystem, subsystem_to_json};
use subrec_core::recovery::construct_recovery;
use subrec_core::ucc::find_ucc;
use subrec_core::{Error, KrausChannel, SubsystemDecomposition, DEFAULT_TOL};

use report::Report;

const EXIT_OK: u8 = 0;
const EXIT_ERROR: u8 = 1;
const EXIT_NEGATIVE: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "subrec", version, about = "Correctable subsystems and their unitary recoveries")]
struct Cli {
    #[command(flatten)]
    opts: Options,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Options {
    /// Channel JSON; read from standard input when absent or `-`.
    #[arg(long, global = true, value_name = "FILE")]
    channel: Option<PathBuf>,
    /// Subsystem JSON.
    #[arg(long, global = true, value_name = "FILE")]
    subsystem: Option<PathBuf>,
    /// Numerical tolerance [default: 1e-9, or $SUBREC_TOLERANCE].
    #[arg(long, global = true, value_name = "T")]
    tolerance: Option<f64>,
    /// Seed for randomized steps.
    #[arg(long, global = true, default_value_t = 0, value_name = "S")]
    seed: u64,
    /// Also write the JSON report (the channel, for `demo`) to this file.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Accept channels that are not trace preserving.
    #[arg(long, global = true)]
    no_tp_check: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Test whether the subsystem is correctable for the channel.
    Check,
    /// Build the unitary recovery for a correctable subsystem.
    Recover,
    /// Noiseless subsystems of a unital channel.
    Ns {
        /// Analyse `E† ∘ E` instead of `E`.
        #[arg(long)]
        compose_dual: bool,
    },
    /// Unitarily correctable subsystems of a unital channel.
    Ucc,
    /// Print a built-in example channel as JSON.
    Demo(DemoArgs),
}

#[derive(Args, Debug)]
struct DemoArgs {
    #[arg(value_parser = clap::builder::PossibleValuesParser::new(DemoName::ALL.map(DemoName::as_str)))]
    name: String,
    /// Mixing probability.
    #[arg(long)]
    p: Option<f64>,
    /// Eigenphases of the binary-unitary demo.
    #[arg(long, num_args = 4, value_names = ["T1", "T2", "T3", "T4"], allow_negative_numbers = true)]
    theta: Option<Vec<f64>>,
    /// Planted demos: dimension of the noisy factor.
    #[arg(long)]
    d_a: Option<usize>,
    /// Planted demos: dimension of the protected factor.
    #[arg(long)]
    d_b: Option<usize>,
    /// Planted demos: Hilbert space dimension.
    #[arg(long)]
    dim: Option<usize>,
    /// Planted demos: number of Kraus operators.
    #[arg(long)]
    kraus: Option<usize>,
    /// Write the demo's candidate subsystem here.
    #[arg(long, value_name = "FILE")]
    subsystem_out: Option<PathBuf>,
}

/// Anything that stops a command: `(exit code, message)`.
struct Failure(u8, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::BadParams(_) => EXIT_USAGE,
            _ => EXIT_ERROR,
        };
        Failure(code, e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure(EXIT_USAGE, msg.into())
}

fn io_failure(path: &Path, e: io::Error) -> Failure {
    Failure(EXIT_ERROR, format!("{}: {e}", path.display()))
}

fn tolerance(flag: Option<f64>) -> Result<f64, Failure> {
    let tol = match flag {
        Some(t) => t,
        None => match std::env::var("SUBREC_TOLERANCE") {
            Ok(s) => s
                .trim()
                .parse()
                .map_err(|_| usage(format!("SUBREC_TOLERANCE is not a number: '{s}'")))?,
            Err(_) => DEFAULT_TOL,
        },
    };
    if !(tol.is_finite() && tol > 0.0) {
        return Err(usage(format!("tolerance must be positive, got {tol}")));
    }
    Ok(tol)
}

fn read_input(path: Option<&Path>) -> Result<String, Failure> {
    match path {
        Some(p) if p != Path::new("-") => fs::read_to_string(p).map_err(|e| io_failure(p, e)),
        _ => {
            let mut s = String::new();
            io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| Failure(EXIT_ERROR, format!("standard input: {e}")))?;
            Ok(s)
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| io_failure(path, e))
}

struct Inputs<'a> {
    opts: &'a Options,
    tol: f64,
}

impl Inputs<'_> {
    fn channel(&self) -> Result<KrausChannel, Failure> {
        let text = read_input(self.opts.channel.as_deref())?;
        let check = (!self.opts.no_tp_check).then_some(self.tol);
        Ok(parse_channel(&text, check)?)
    }

    fn subsystem(&self) -> Result<SubsystemDecomposition, Failure> {
        let path = self
            .opts
            .subsystem
            .as_deref()
            .ok_or_else(|| usage("this command needs --subsystem FILE"))?;
        Ok(parse_subsystem(&read_input(Some(path))?, self.tol)?)
    }
}

fn run_check(inp: &Inputs) -> Result<Report, Failure> {
    let ch = inp.channel()?;
    let dec = inp.subsystem()?;
    let cert = check_correctable(&ch, &dec, inp.tol)?;
    Ok(report::check(&cert, &dec))
}

fn run_recover(inp: &Inputs) -> Result<Report, Failure> {
    let ch = inp.channel()?;
    let dec = inp.subsystem()?;
    let cert = check_correctable(&ch, &dec, inp.tol)?;
    if !cert.passed {
        return Ok(report::check(&cert, &dec).with_command("recover"));
    }
    let rec = construct_recovery(&ch, &dec, &cert, inp.tol)?;
    Ok(report::recover(&rec, &dec))
}

fn run_ns(inp: &Inputs, compose_dual: bool) -> Result<Report, Failure> {
    let mut ch = inp.channel()?;
    if compose_dual {
        ch = ch.dual().compose(&ch)?;
    }
    let ns = noiseless_subsystems(&ch, inp.opts.seed, inp.tol)?;
    Ok(report::noiseless(&ns, compose_dual))
}

fn run_ucc(inp: &Inputs) -> Result<Report, Failure> {
    let ch = inp.channel()?;
    let found = find_ucc(&ch, inp.opts.seed, inp.tol)?;
    Ok(report::ucc(&found))
}

fn run_demo(opts: &Options, args: &DemoArgs) -> Result<u8, Failure> {
    let name: DemoName = args.name.parse()?;
    let mut spec = DemoSpec::new(name);
    spec.seed = opts.seed;
    if let Some(p) = args.p {
        spec.p = p;
    }
    if let Some(t) = &args.theta {
        spec.thetas = [t[0], t[1], t[2], t[3]];
    }
    spec.d_a = args.d_a.unwrap_or(spec.d_a);
    spec.d_b = args.d_b.unwrap_or(spec.d_b);
    spec.dim = args.dim.unwrap_or(spec.dim);
    spec.kraus = args.kraus.unwrap_or(spec.kraus);
    let demo = demo_build(&spec)?;

    let channel = channel_to_json(&demo.channel);
    match &opts.out {
        Some(path) => write_file(path, &channel)?,
        None => println!("{channel}"),
    }
    if let Some(path) = &args.subsystem_out {
        let code = demo
            .code
            .as_ref()
            .ok_or_else(|| usage(format!("demo '{name}' has no candidate subsystem")))?;
        write_file(path, &subsystem_to_json(code))?;
    }
    Ok(EXIT_OK)
}

fn dispatch(cli: &Cli) -> Result<u8, Failure> {
    let opts = &cli.opts;
    let tol = tolerance(opts.tolerance)?;
    let inp = Inputs { opts, tol };
    let report = match &cli.command {
        Command::Demo(args) => return run_demo(opts, args),
        Command::Check => run_check(&inp)?,
        Command::Recover => run_recover(&inp)?,
        Command::Ns { compose_dual } => run_ns(&inp, *compose_dual)?,
        Command::Ucc => run_ucc(&inp)?,
    };
    let json = report.to_json(tol);
    if let Some(path) = &opts.out {
        write_file(path, &json)?;
    }
    let rendered = match opts.format {
        Format::Json => json,
        Format::Text => report.text,
    };
    let mut stdout = io::stdout().lock();
    writeln!(stdout, "{}", rendered.trim_end())
        .map_err(|e| Failure(EXIT_ERROR, format!("standard output: {e}")))?;
    Ok(if report.success { EXIT_OK } else { EXIT_NEGATIVE })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, msg)) => {
            eprintln!("subrec: {msg}");
            ExitCode::from(code)
        }
    }
}
