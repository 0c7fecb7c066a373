use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use halfline_cli::commands::{self, Overrides};
use halfline_cli::config::ProblemConfig;
use halfline_cli::{CliError, EXIT_PARSE};

#[derive(Parser)]
#[command(name = "halfline", version, about = "Half-line matrix Schrodinger scattering")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Problem configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Relative tolerance of the ODE integrator.
    #[arg(long, global = true)]
    tol_integrator: Option<f64>,
    /// Upper end of the bound-state search on the imaginary axis.
    #[arg(long, global = true)]
    kappa_max: Option<f64>,
    /// Upper end of the phase trace (levinson) or dyadic table (asymptotics).
    #[arg(long, global = true)]
    k_max: Option<f64>,
    /// Treat multiplicity disagreements and failed identities as errors (default).
    #[arg(long, global = true, overrides_with = "no_strict")]
    strict: bool,
    /// Report disagreements in the output instead of failing.
    #[arg(long, global = true, overrides_with = "strict")]
    no_strict: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Check the boundary pair and potential.
    Validate,
    /// Reduce the boundary pair to theta form.
    Canonicalize,
    /// Tabulate S(k) on the configured grid (CSV).
    Scattering,
    /// Locate bound states with multiplicities (JSON).
    Boundstates,
    /// Verify Levinson's theorem (JSON).
    Levinson,
    /// Tabulate high-energy residuals at dyadic k (CSV).
    Asymptotics,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("halfline: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: &Cli) -> Result<i32, CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Parse("missing required flag --config".into()))?;
    let cfg = ProblemConfig::load(path)?;
    let ov = Overrides {
        tol_integrator: cli.tol_integrator,
        kappa_max: cli.kappa_max,
        k_max: cli.k_max,
        strict: !cli.no_strict,
    };
    let out = match cli.command {
        Command::Validate => commands::validate(&cfg),
        Command::Canonicalize => commands::canonicalize(&cfg, &ov)?,
        Command::Scattering => commands::scattering(&cfg, &ov)?,
        Command::Boundstates => commands::boundstates(&cfg, &ov)?,
        Command::Levinson => commands::levinson(&cfg, &ov)?,
        Command::Asymptotics => commands::asymptotics(&cfg, &ov)?,
    };
    match &cli.out {
        Some(p) => std::fs::write(p, &out.text)?,
        None => print!("{}", out.text),
    }
    Ok(out.exit_code)
}
