// Monte-Carlo check of the concentration events behind the stopping rules,
// plus the thresholds they are built from.
//
// ```bash
// cargo run --release --example concentration
// ```

use pure_explore::harness::falsifier::falsify_events;
use pure_explore::{make_double_chain, Thresholds};

pub fn run_example() -> pure_explore::Result<()> {
    let mdp = make_double_chain(3, 4, 0.2)?;
    let delta = 0.1;
    let th = Thresholds::for_mdp(&mdp, delta)?;
    for n in [1u64, 10, 100, 1000] {
        println!(
            "n={n:<5} beta={:>8.3} beta*={:>7.3} beta/n={:.4}",
            th.beta(n),
            th.beta_star(n),
            th.beta_ratio(n)
        );
    }

    let freq = falsify_events(&mdp, delta, 100, 200, 0)?;
    println!(
        "E held in {}/{} runs (violation rate <= {:.3} at 99%), E_cnt in {}/{} (<= {:.3})",
        freq.e_held,
        freq.runs,
        freq.e_violation_upper(),
        freq.cnt_held,
        freq.runs,
        freq.cnt_violation_upper()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> pure_explore::Result<()> {
    run_example()
}
