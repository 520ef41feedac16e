use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pure_explore::harness::bounds::{theoretical_bound_bpi, theoretical_bound_rf, BPI_BOUND_NOTE};
use pure_explore::harness::experiment::{reaudit, run_experiment, ExperimentConfig, RunReport};
use pure_explore::Error;

const EXIT_VIOLATION: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_CAP: u8 = 3;

#[derive(Parser)]
#[command(
    name = "pure-explore",
    version,
    about = "Reward-free exploration and best-policy identification experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run(RunArgs),
    /// Run a config over a grid of epsilons and print the scaling table.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// Comma-separated epsilons, overriding the config's list.
        #[arg(long, value_delimiter = ',')]
        epsilons: Option<Vec<f64>>,
    },
    /// Recompute the PAC verdicts of a saved run directory.
    Audit {
        #[arg(long = "out", value_name = "DIR")]
        dir: PathBuf,
    },
    /// Print the worst-case stopping-time bounds.
    Bound(BoundArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, value_name = "N")]
    seeds: Option<usize>,
    #[arg(long, value_name = "X")]
    bonus_scale: Option<f64>,
    #[arg(long, value_name = "N")]
    cap: Option<u64>,
}

#[derive(Args)]
struct BoundArgs {
    /// Take S, A, H, the epsilons and delta from a config file.
    #[arg(long, value_name = "PATH", conflicts_with_all = ["states", "actions", "horizon"])]
    config: Option<PathBuf>,
    #[arg(long, required_unless_present = "config")]
    states: Option<usize>,
    #[arg(long, required_unless_present = "config")]
    actions: Option<usize>,
    #[arg(long, required_unless_present = "config")]
    horizon: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    epsilon: f64,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
}

fn load_config(args: &RunArgs) -> Result<ExperimentConfig, Error> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if let Some(out) = &args.out {
        cfg.output_dir = Some(out.clone());
    }
    if let Some(n) = args.seeds {
        cfg.num_seeds = n;
    }
    if let Some(x) = args.bonus_scale {
        cfg.bonus_scale = x;
    }
    if let Some(n) = args.cap {
        cfg.episode_cap = n;
    }
    Ok(cfg)
}

fn print_report(report: &RunReport) {
    println!("algorithm {}", report.config.algorithm.name());
    println!(
        "{:>12} {:>6} {:>14} {:>14} {:>9} {:>14}",
        "epsilon", "runs", "median_tau", "mean_tau", "fail_rate", "bound"
    );
    for s in &report.summaries {
        let bound = s
            .theory_bound
            .map(|b| format!("{b:.4e}"))
            .unwrap_or_else(|| "-".into());
        println!(
            "{:>12} {:>6} {:>14} {:>14.1} {:>9.3} {:>14}",
            s.epsilon, s.runs, s.median_tau, s.mean_tau, s.failure_rate, bound
        );
    }
    for note in &report.notes {
        println!("note: {note}");
    }
}

fn finish(report: &RunReport) -> ExitCode {
    let violations = report.guarantee_violations();
    for v in &violations {
        eprintln!("VIOLATION: {v}");
    }
    if report.any_cap_reached() {
        eprintln!("episode cap reached in at least one run");
        return ExitCode::from(EXIT_CAP);
    }
    if !violations.is_empty() {
        return ExitCode::from(EXIT_VIOLATION);
    }
    ExitCode::SUCCESS
}

fn config_error(e: Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(EXIT_CONFIG)
}

fn run(args: &RunArgs, epsilons: Option<Vec<f64>>, sweep: bool) -> ExitCode {
    let mut cfg = match load_config(args) {
        Ok(cfg) => cfg,
        Err(e) => return config_error(e),
    };
    if let Some(eps) = epsilons {
        cfg.epsilons = eps;
    }
    let report = match run_experiment(&cfg) {
        Ok(r) => r,
        Err(e) => return config_error(e),
    };
    print_report(&report);
    if sweep {
        let mut eps: Vec<f64> = cfg.epsilons.clone();
        eps.sort_by(f64::total_cmp);
        eps.dedup();
        for pair in eps.windows(2) {
            let (small, large) = (report.summary_for(pair[0]), report.summary_for(pair[1]));
            if let (Some(small), Some(large)) = (small, large) {
                println!(
                    "median tau({}) / median tau({}) = {:.3}",
                    pair[0],
                    pair[1],
                    small.median_tau / large.median_tau
                );
            }
        }
    }
    finish(&report)
}

fn bound(args: &BoundArgs) -> ExitCode {
    let (dims, epsilons, delta) = match &args.config {
        Some(path) => {
            let cfg = match ExperimentConfig::load(path) {
                Ok(c) => c,
                Err(e) => return config_error(e),
            };
            let mdp = match cfg.env.build() {
                Ok(m) => m,
                Err(e) => return config_error(e),
            };
            (
                (mdp.num_states(), mdp.num_actions(), mdp.horizon()),
                cfg.epsilons,
                cfg.delta,
            )
        }
        None => (
            (
                args.states.unwrap_or(0),
                args.actions.unwrap_or(0),
                args.horizon.unwrap_or(0),
            ),
            vec![args.epsilon],
            args.delta,
        ),
    };
    let (s, a, h) = dims;
    if s == 0
        || a == 0
        || h == 0
        || !(delta > 0.0 && delta < 1.0)
        || epsilons.iter().any(|&e| e.is_nan() || e <= 0.0)
    {
        return config_error(Error::InvalidConfig(
            "need positive S, A, H, epsilon and delta in (0,1)".into(),
        ));
    }
    println!("S={s} A={a} H={h} delta={delta}");
    for eps in epsilons {
        println!(
            "epsilon={eps} reward_free={:.10e} best_policy={:.10e}",
            theoretical_bound_rf(s, a, h, eps, delta),
            theoretical_bound_bpi(s, a, h, eps, delta)
        );
    }
    println!("note: {BPI_BOUND_NOTE}");
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => run(&args, None, false),
        Command::Sweep {
            run: args,
            epsilons,
        } => run(&args, epsilons, true),
        Command::Audit { dir } => match reaudit(&dir) {
            Ok(r) => {
                println!(
                    "runs checked: {}  PAC failures: {}",
                    r.runs_checked, r.failures
                );
                for stem in &r.mismatches {
                    eprintln!("stored verdicts differ for {stem}");
                }
                if r.mismatches.is_empty() {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(EXIT_VIOLATION)
                }
            }
            Err(e) => config_error(e),
        },
        Command::Bound(args) => bound(&args),
    }
}
