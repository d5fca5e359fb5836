//! `cantorlab`: experiments on regular Cantor sets from the command line.

mod commands;
mod ctx;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::ctx::{read_file, CliError, Ctx};

#[derive(Parser, Debug)]
#[command(name = "cantorlab", version, about = "Regular Cantor sets, sums, intersections and spectra")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// JSON file with parameters; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write the JSON record here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Write CSV data here.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Work budget (intervals, pairs, cells, words); overrides CANTORLAB_BUDGET.
    #[arg(long, global = true)]
    pub budget: Option<u64>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Box or Hausdorff (Moran) dimension of a set.
    Dim(commands::DimArgs),
    /// Newhouse thickness.
    Thickness(commands::ThicknessArgs),
    /// Cover of K1 + λ K2.
    Sum(commands::SumArgs),
    /// Cover of K1 − λ K2.
    Diff(commands::SumArgs),
    /// C(4) + C(4) against [√2 − 1, 4(√2 − 1)].
    Hall(commands::HallArgs),
    /// Covered lengths of K1 − λ K2 over random λ.
    Marstrand(commands::MarstrandArgs),
    /// Does K1 meet K2 + t? Cover test, gap lemma, scans.
    Intersect(commands::IntersectArgs),
    /// Search or verify a recurrent compact set of relative positions.
    Recur(commands::RecurArgs),
    /// Intersection dimension under random perturbations.
    Dstable(commands::DstableArgs),
    /// One-sided density of K1 − K2 at t0.
    Density(commands::DensityArgs),
    /// k(α) of periodic sequences, or a sample of the spectrum.
    Spectrum(commands::SpectrumArgs),
    /// Sequences whose k lands near targets >= 6.
    Halfline(commands::HalflineArgs),
    /// Dimension of the affine horseshoe.
    Horseshoe(commands::HorseshoeArgs),
    /// Eigenvalues and periodic points of the cat map.
    Catmap(commands::CatmapArgs),
    /// Lyapunov exponents of the standard family.
    Stdmap(commands::StdmapArgs),
    /// Built-in sets.
    List,
    /// Run an experiment described by a JSON file with a "command" key.
    Run {
        path: PathBuf,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Dim(_) => "dim",
            Command::Thickness(_) => "thickness",
            Command::Sum(_) => "sum",
            Command::Diff(_) => "diff",
            Command::Hall(_) => "hall",
            Command::Marstrand(_) => "marstrand",
            Command::Intersect(_) => "intersect",
            Command::Recur(_) => "recur",
            Command::Dstable(_) => "dstable",
            Command::Density(_) => "density",
            Command::Spectrum(_) => "spectrum",
            Command::Halfline(_) => "halfline",
            Command::Horseshoe(_) => "horseshoe",
            Command::Catmap(_) => "catmap",
            Command::Stdmap(_) => "stdmap",
            Command::List => "list",
            Command::Run { .. } => "run",
        }
    }
}

/// Turns `run FILE` into the equivalent subcommand invocation.
fn expand_run(cli: Cli) -> Result<Cli, CliError> {
    let Command::Run { path } = &cli.command else {
        return Ok(cli);
    };
    let body = read_file(path)?;
    let v: serde_json::Value =
        serde_json::from_str(&body).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let cmd = v
        .get("command")
        .and_then(|c| c.as_str())
        .ok_or_else(|| CliError::Config(format!("{} has no \"command\" key", path.display())))?;
    if cmd == "run" {
        return Err(CliError::Config("a run file cannot run another run file".into()));
    }
    let mut argv = vec!["cantorlab".to_string(), cmd.to_string(), "--config".into()];
    argv.push(path.display().to_string());
    let mut inner = Cli::try_parse_from(&argv).map_err(|e| CliError::Config(e.to_string()))?;
    let g = cli.global;
    inner.global.out = g.out;
    inner.global.csv = g.csv;
    inner.global.jobs = g.jobs;
    inner.global.budget = g.budget;
    Ok(inner)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cli = expand_run(cli)?;
    if let Some(j) = cli.global.jobs {
        if j == 0 {
            return Err(CliError::Config("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    let mut ctx = Ctx::new(cli.global.config.as_deref(), cli.global.budget)?;
    let name = cli.command.name();
    let out = commands::dispatch(cli.command, &mut ctx)?;
    if let (Some(path), Some(csv)) = (&cli.global.csv, &out.csv) {
        ctx::write_file(path, csv)?;
    }
    let record = ctx.record(name, out.json);
    let text = serde_json::to_string_pretty(&record).expect("record serializes") + "\n";
    match &cli.global.out {
        Some(p) => ctx::write_file(p, &text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
