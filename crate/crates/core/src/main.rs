use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use ifm_cavity::cli::{self, Command, Format, Invocation, RunConfig};

#[derive(Parser)]
#[command(
    name = "ifm-cavity",
    version,
    about = "Cavity-enhanced interaction-free detection of semitransparent objects"
)]
struct Args {
    /// Run configuration (TOML, or JSON such as a manifest's config echo).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, env = cli::OUT_DIR_ENV)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    /// Master seed for the Monte-Carlo simulator.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for sweeps and simulations (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand, Clone, Copy)]
enum Sub {
    /// Reflection/transmission/absorption with and without the object.
    Coeffs,
    /// Security, SNR and merit products versus coupling efficiency.
    SweepXi,
    /// Global and constrained maxima of the merit product.
    Optimize,
    /// Optimal coupling efficiency and maximum merit over (kappa_3, delta_P).
    ParamMap,
    /// Total security as a function of target SNR.
    SecurityCurve,
    /// Poisson photon-counting simulation against the analytic SNR and security.
    Montecarlo,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<Sub> for Command {
    fn from(s: Sub) -> Self {
        match s {
            Sub::Coeffs => Command::Coeffs,
            Sub::SweepXi => Command::SweepXi,
            Sub::Optimize => Command::Optimize,
            Sub::ParamMap => Command::ParamMap,
            Sub::SecurityCurve => Command::SecurityCurve,
            Sub::Montecarlo => Command::MonteCarlo,
        }
    }
}

fn run(args: Args) -> Result<u8, cli::CliError> {
    if let Some(n) = args.threads {
        if n == 0 {
            return Err(cli::CliError::Config("--threads must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| cli::CliError::Config(e.to_string()))?;
    }
    let config = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let format = args.format.map(|f| match f {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    });
    let inv = Invocation::resolve(args.command.into(), config, args.out, format, args.seed)?;
    let outcome = cli::execute(&inv)?;
    print!("{}", outcome.summary);
    for f in &outcome.files {
        println!("wrote {}", f.display());
    }
    println!("wrote {}", outcome.manifest.display());
    Ok(outcome.exit_code)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
