//! `ipgm`: run inexact proximal gradient experiments from the command line.
//!
//! Exit codes: 0 success, 1 validation or I/O error, 2 certification
//! refuted, 3 a grid cell diverged.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use inexact_pgm::harness::{self, ExperimentConfig, ExperimentReport};
use inexact_pgm::rates::{log_spaced, CurveKind, CurveParams};
use inexact_pgm::{Error, Result};

#[derive(Parser)]
#[command(name = "ipgm", version, about = "Inexact proximal gradient experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the grid described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the grid keeping the worst of several oracle draws per step.
    WorstCase {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `worst_case_directions` from the config.
        #[arg(long)]
        directions: Option<usize>,
    },
    /// Empirically certify every oracle of the grid.
    Certify {
        #[arg(long)]
        config: PathBuf,
    },
    /// Export a theoretical rate curve as `k,bound` CSV.
    Rates(Box<RatesArgs>),
    /// Preset LogSum grid: q in {0, 0.5, 1}, noise in {0.1, 1, 3}, 5 seeds.
    ReproduceFig1 {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct RatesArgs {
    #[arg(long)]
    kind: CurveKind,
    #[arg(long = "L")]
    l: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    delta0_gap: Option<f64>,
    #[arg(long = "R")]
    radius: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    zeta: Option<f64>,
    #[arg(long)]
    holder_constant: Option<f64>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    horizon: Option<f64>,
    /// Explicit horizons, comma separated; overrides the log-spaced range.
    #[arg(long, value_delimiter = ',')]
    ks: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    k_min: f64,
    #[arg(long, default_value_t = 1e4)]
    k_max: f64,
    #[arg(long, default_value_t = 50)]
    points: usize,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RatesArgs {
    fn params(&self) -> CurveParams {
        CurveParams {
            l: self.l,
            rho: self.rho,
            q: self.q,
            delta: self.delta,
            delta0_gap: self.delta0_gap,
            radius: self.radius,
            beta: self.beta,
            zeta: self.zeta,
            holder_constant: self.holder_constant,
            nu: self.nu,
            horizon: self.horizon,
        }
    }
}

enum Outcome {
    Ok,
    Refuted,
    Diverged,
}

fn grid_outcome(report: &ExperimentReport) -> Outcome {
    for c in report.cells.iter().filter(|c| c.status != harness::CellStatus::Ok) {
        eprintln!(
            "cell {}: {}",
            c.cell.file_stem(),
            c.message.as_deref().unwrap_or(c.status.name())
        );
    }
    eprintln!("wrote {}", report.output_dir.display());
    if report.any_diverged() {
        Outcome::Diverged
    } else {
        Outcome::Ok
    }
}

fn execute(command: Command) -> Result<Outcome> {
    match command {
        Command::Run { config } => {
            let config = ExperimentConfig::load(&config)?;
            Ok(grid_outcome(&harness::run_experiment(&config)?))
        }
        Command::WorstCase { config, directions } => {
            let mut config = ExperimentConfig::load(&config)?;
            if let Some(m) = directions {
                config.worst_case_directions = m;
            }
            Ok(grid_outcome(&harness::run_worst_case(&config)?))
        }
        Command::Certify { config } => {
            let config = ExperimentConfig::load(&config)?;
            let summary = harness::certify_command(&config)?;
            for row in &summary.rows {
                let r = &row.report;
                println!(
                    "q={} noise={} delta={:e} max_violation={:e} certified={}",
                    row.degree, row.noise_bound, row.delta_claimed, r.max_violation, r.certified
                );
                if let Some(w) = &r.worst {
                    eprintln!("violating pair: x={:?} y={:?} violation={:e}", w.x, w.y, w.violation);
                }
            }
            Ok(if summary.all_certified {
                Outcome::Ok
            } else {
                Outcome::Refuted
            })
        }
        Command::Rates(args) => {
            let ks = if args.ks.is_empty() {
                if !(args.k_min > 0.0 && args.k_max >= args.k_min) || args.points == 0 {
                    return Err(Error::Config("need 0 < k_min <= k_max and points > 0".into()));
                }
                log_spaced(args.k_min, args.k_max, args.points)
            } else {
                args.ks.clone()
            };
            let curve = harness::rates_command(args.kind, &args.params(), &ks)?;
            match &args.out {
                Some(path) => std::fs::write(path, curve.to_csv())?,
                None => print!("{}", curve.to_csv()),
            }
            Ok(Outcome::Ok)
        }
        Command::ReproduceFig1 { out, seed } => Ok(grid_outcome(&harness::reproduce_fig1(out, seed)?)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Refuted) => ExitCode::from(2),
        Ok(Outcome::Diverged) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
