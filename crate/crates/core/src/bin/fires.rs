use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use fires::harness::{
    parse_seeds, run_baseline_star_ris, run_bench, run_bound, run_optimize, run_sweep,
    ExperimentConfig, ModeChoice, RunOutcome, SurfaceChoice,
};
use fires::Error;

#[derive(Parser)]
#[command(name = "fires", version, about = "FIRES coverage bounds and position optimization")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON experiment configuration; defaults to the reference scenario.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Seeds, e.g. `3`, `1,2,5` or `1-10`.
    #[arg(long, global = true)]
    seed: Option<String>,

    /// Output file (CSV for `sweep`, JSON otherwise).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    mode: Option<ModeArg>,

    #[arg(long, global = true, value_enum)]
    surface: Option<SurfaceArg>,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form far-field radii at the configured parameters.
    Bound,
    /// Optimize element positions.
    Optimize,
    /// Run the configured parameter sweep and write CSV.
    Sweep,
    /// Fixed centre positions, no position optimization.
    Baseline,
    /// Time swarm runs over element counts and swarm sizes.
    Bench {
        /// Element counts to benchmark.
        #[arg(long, value_delimiter = ',', default_value = "36,64")]
        elements: Vec<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Oma,
    Noma,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum SurfaceArg {
    Fires,
    Star,
}

enum Outcome {
    Done,
    Infeasible,
}

fn load(cli: &Cli) -> Result<ExperimentConfig, Error> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = &cli.seed {
        cfg.seeds = parse_seeds(s)?;
    }
    if let Some(o) = &cli.out {
        cfg.out = Some(o.clone());
    }
    if let Some(m) = cli.mode {
        cfg.mode = match m {
            ModeArg::Oma => ModeChoice::Oma,
            ModeArg::Noma => ModeChoice::Noma,
            ModeArg::Both => ModeChoice::Both,
        };
    }
    if let Some(s) = cli.surface {
        cfg.surface = match s {
            SurfaceArg::Fires => SurfaceChoice::Fires,
            SurfaceArg::Star => SurfaceChoice::Star,
        };
    }
    Ok(cfg)
}

fn write_json<T: serde::Serialize>(cfg: &ExperimentConfig, value: &T) -> Result<(), Error> {
    if let Some(path) = &cfg.out {
        std::fs::write(path, serde_json::to_string_pretty(value)?)?;
    }
    Ok(())
}

fn print_runs(runs: &[RunOutcome]) {
    println!("mode  surface seed  D_r(m)      D_t(m)      D_tot(m)    feasible  iters  It_99");
    for r in runs {
        println!(
            "{:<5} {:<7} {:<5} {:>10.3}  {:>10.3}  {:>10.3}  {:>8.2}  {:>5}  {:>5}",
            r.mode,
            r.surface,
            r.seed,
            r.evaluation.d_r,
            r.evaluation.d_t,
            r.evaluation.d_tot,
            r.evaluation.feasible_rate,
            r.iterations,
            r.it_99
        );
    }
}

fn runs_outcome(runs: &[RunOutcome]) -> Outcome {
    if runs.iter().any(RunOutcome::feasible) {
        Outcome::Done
    } else {
        Outcome::Infeasible
    }
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    let cfg = load(cli)?;
    match &cli.command {
        Command::Bound => {
            let report = run_bound(&cfg)?;
            print!("{report}");
            Ok(if report.all_infeasible() { Outcome::Infeasible } else { Outcome::Done })
        }
        Command::Optimize => {
            let runs = run_optimize(&cfg)?;
            print_runs(&runs);
            write_json(&cfg, &runs)?;
            Ok(runs_outcome(&runs))
        }
        Command::Baseline => {
            let runs = run_baseline_star_ris(&cfg)?;
            print_runs(&runs);
            write_json(&cfg, &runs)?;
            Ok(runs_outcome(&runs))
        }
        Command::Sweep => {
            let out = run_sweep(&cfg)?;
            if cfg.out.is_none() {
                print!("{}", out.csv);
            }
            Ok(if out.all_infeasible() { Outcome::Infeasible } else { Outcome::Done })
        }
        Command::Bench { elements } => {
            let report = run_bench(&cfg, elements)?;
            println!("{report}");
            write_json(&cfg, &report)?;
            Ok(Outcome::Done)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::Infeasible) => {
            eprintln!("no feasible configuration found");
            ExitCode::from(3)
        }
        Err(e @ Error::Config { .. }) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
