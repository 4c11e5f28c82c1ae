use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser};

use multiquad::BackendTag;
use multiquad_cli::{run, Format, Integrand, Outcome, RunConfig, Subcommand, EXIT_INPUT};

#[derive(Parser)]
#[command(name = "multiquad", version, about = "Multiple Gaussian quadrature from moment data")]
enum Cli {
    /// Build the rule for one n and write nodes, weights and its certificate.
    Rule(Common),
    /// Run the invariant suites and print a pass/fail table.
    Verify(Common),
    /// Compare the shared-node rule with r separate Gauss rules.
    Compare {
        #[command(flatten)]
        common: Common,
        /// x^k, exp or runge (1/(1+x^2)).
        #[arg(short = 'f', long, default_value = "exp")]
        integrand: String,
    },
    /// Dump the first n moments of every measure.
    Moments(Common),
}

#[derive(Args)]
struct Common {
    /// Measure-system JSON file.
    #[arg(short, long)]
    input: PathBuf,
    #[arg(short, default_value_t = 2)]
    n: usize,
    /// rational or float64; defaults to the backend named in the input.
    #[arg(long)]
    backend: Option<String>,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, default_value = "json")]
    format: String,
    #[arg(long)]
    tol_eig: Option<f64>,
    #[arg(long)]
    tol_w: Option<f64>,
    /// Comma-separated sample points, e.g. "0,1/2,-1/2".
    #[arg(long)]
    seed_ladder: Option<String>,
    #[arg(short, long, action = clap::ArgAction::Count)]
    verbose: u8,
}

fn config(cli: Cli) -> Result<RunConfig, multiquad::Error> {
    let (sub, common, integrand) = match cli {
        Cli::Rule(c) => (Subcommand::Rule, c, None),
        Cli::Verify(c) => (Subcommand::Verify, c, None),
        Cli::Compare { common, integrand } => (Subcommand::Compare, common, Some(integrand)),
        Cli::Moments(c) => (Subcommand::Moments, c, None),
    };
    let mut cfg = RunConfig::new(common.input, sub, common.n);
    cfg.backend = common.backend.as_deref().map(BackendTag::parse).transpose()?;
    cfg.format = common.format.parse::<Format>()?;
    cfg.output = common.output;
    cfg.tol_eig = common.tol_eig;
    cfg.tol_w = common.tol_w;
    cfg.seed_ladder = common.seed_ladder;
    if let Some(f) = integrand {
        cfg.integrand = f.parse::<Integrand>()?;
    }
    cfg.verbosity = common.verbose;
    Ok(cfg)
}

fn init_logging(verbosity: u8) {
    let default = match verbosity {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let env = env_logger::Env::new().filter_or("MULTIQUAD_LOG", default);
    let _ = env_logger::Builder::from_env(env).try_init();
}

fn finish(outcome: &Outcome, output: Option<&PathBuf>) -> ExitCode {
    let failed_before_output = outcome.body.starts_with("error: ");
    match output {
        Some(path) if !failed_before_output => {
            if let Err(e) = std::fs::write(path, &outcome.body) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(EXIT_INPUT as u8);
            }
        }
        _ if failed_before_output => eprint!("{}", outcome.body),
        _ => print!("{}", outcome.body),
    }
    ExitCode::from(outcome.code as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let cfg = match config(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INPUT as u8);
        }
    };
    init_logging(cfg.verbosity);
    log::info!("{:?} on {} with n = {}", cfg.subcommand, cfg.input.display(), cfg.n);
    let outcome = run(&cfg);
    finish(&outcome, cfg.output.as_ref())
}
