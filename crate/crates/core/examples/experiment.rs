// A seeded multi-run experiment over two epsilons, written to disk as CSV
// and JSON and then re-audited from the saved artifacts.
//
// ```bash
// cargo run --release --example experiment -- /tmp/chain-sweep
// ```

use std::path::PathBuf;

use pure_explore::harness::experiment::{
    median_tau_ratio, reaudit, run_experiment, Algorithm, ExperimentConfig,
};
use pure_explore::EnvSpec;

pub fn run_example_in(dir: PathBuf) -> pure_explore::Result<()> {
    let env = EnvSpec::DoubleChain {
        length: 3,
        horizon: 4,
        slip: 0.1,
    };
    let mut cfg = ExperimentConfig::new(env, Algorithm::RfExpress, vec![2.0, 4.0], 0.1);
    cfg.num_seeds = 3;
    cfg.bonus_scale = 0.02;
    cfg.output_dir = Some(dir.clone());
    let report = run_experiment(&cfg)?;
    for s in &report.summaries {
        println!(
            "eps={} median tau {} failures {}/{}",
            s.epsilon, s.median_tau, s.failures, s.runs
        );
    }
    if let Some(ratio) = median_tau_ratio(&report, 2.0, 4.0) {
        println!("median tau ratio for halving epsilon: {ratio:.2}");
    }
    let audit = reaudit(&dir)?;
    println!(
        "re-audited {} runs from {}, mismatches: {}",
        audit.runs_checked,
        dir.display(),
        audit.mismatches.len()
    );
    Ok(())
}

pub fn run_example() -> pure_explore::Result<()> {
    let dir = std::env::temp_dir().join(format!("pure-explore-example-{}", std::process::id()));
    let result = run_example_in(dir.clone());
    let _ = std::fs::remove_dir_all(&dir);
    result
}

#[allow(dead_code)]
fn main() -> pure_explore::Result<()> {
    match std::env::args().nth(1) {
        Some(dir) => run_example_in(dir.into()),
        None => run_example(),
    }
}
