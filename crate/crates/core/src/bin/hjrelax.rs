use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hj_relax::cli::{parse_spec, run_command, CliError, Command, Options};
use hj_relax::relaxation::EnvelopePolicy;

/// Exact relaxation of Hamilton-Jacobi boundary conditions.
#[derive(Parser)]
#[command(version, about)]
struct Args {
    #[command(subcommand)]
    command: Cmd,
    /// Problem specification (JSON).
    #[arg(long, global = true)]
    spec: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Number of corpus cases.
    #[arg(long, global = true, default_value_t = 200)]
    cases: u64,
    /// Corpus seed; overrides the spec's seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Fail on a non-semi-coercive boundary function instead of replacing it by max(F0, H_-).
    #[arg(long, global = true)]
    strict_semicoercive: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Relaxed boundary function, to function.csv.
    Relax,
    /// Plateau operator built from limiter points, to function.csv.
    Guerand,
    /// Godunov operator, to function.csv; witnesses at the spec probes to godunov.csv.
    GodunovApply,
    /// Characteristic points of the relaxed function, to charpoints.csv.
    Charpoints,
    /// Limiter points with their plateaus, to limiters.csv.
    Limiters,
    /// Components of the germ, to germ.csv.
    Germ,
    /// Relaxed Neumann condition, to function.csv.
    Neumann,
    /// Relaxed Dirichlet condition, to function.csv.
    Dirichlet,
    /// BLN condition against the Godunov flux and the germ, to bln.csv.
    Bln,
    /// Finite-difference solution, to solution.csv.
    Solve,
    /// Weak against strong boundary runs over solver.ladder, to refine.csv.
    Refine,
    /// Identity suite on a seeded random corpus, to report.json.
    VerifyCorpus,
    /// H, F0 and the relaxed function, to plot.svg.
    Plot,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Relax => Command::Relax,
            Cmd::Guerand => Command::Guerand,
            Cmd::GodunovApply => Command::GodunovApply,
            Cmd::Charpoints => Command::Charpoints,
            Cmd::Limiters => Command::Limiters,
            Cmd::Germ => Command::Germ,
            Cmd::Neumann => Command::Neumann,
            Cmd::Dirichlet => Command::Dirichlet,
            Cmd::Bln => Command::Bln,
            Cmd::Solve => Command::Solve,
            Cmd::Refine => Command::Refine,
            Cmd::VerifyCorpus => Command::VerifyCorpus,
            Cmd::Plot => Command::Plot,
        }
    }
}

fn run(args: &Args) -> Result<String, CliError> {
    let spec = match &args.spec {
        Some(path) => Some(parse_spec(&std::fs::read_to_string(path)?)?),
        None => None,
    };
    let opts = Options {
        out: args.out.clone(),
        cases: args.cases,
        seed: args.seed,
        policy: if args.strict_semicoercive {
            EnvelopePolicy::Strict
        } else {
            EnvelopePolicy::Upgrade
        },
    };
    let outcome = run_command(spec.as_ref(), args.command.into(), &opts)?;
    let files: Vec<String> = outcome
        .files
        .iter()
        .map(|p| p.display().to_string())
        .collect();
    Ok(format!("{}\nwrote {}", outcome.summary, files.join(", ")))
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(msg) => {
            println!("{msg}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("hjrelax: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
