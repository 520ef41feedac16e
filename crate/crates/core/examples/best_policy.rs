// Best-policy identification on a small gridworld: explore with the known
// reward until the certified gap bound drops below epsilon, then compare
// the returned policy with the exact optimum.
//
// ```bash
// cargo run --release --example best_policy
// ```

use pure_explore::harness::audit::bpi_gap;
use pure_explore::{backward_induction, make_gridworld, run_bpi_ucbvi, BpiConfig};

pub fn run_example() -> pure_explore::Result<()> {
    let mdp = make_gridworld(2, 2, 4, 0.1)?;
    let cfg = BpiConfig::new(0.5, 0.1, 3).with_bonus_scale(0.05);
    let out = run_bpi_ucbvi(&mdp, &cfg)?;
    println!(
        "stopped={} after {} episodes, gap bound {:.4}",
        out.stopped, out.tau, out.final_stat
    );

    let optimal = backward_induction(&mdp, mdp.reward()).value_at_start(&mdp);
    println!(
        "V* = {optimal:.4}, true gap of the returned policy = {:.3e}",
        bpi_gap(&mdp, &out.pihat)
    );
    let names = ["N", "E", "S", "W"];
    for h in 0..mdp.horizon() {
        let row: Vec<&str> = (0..mdp.num_states())
            .map(|s| names[out.pihat.action(h, s)])
            .collect();
        println!("stage {h}: {}", row.join(" "));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> pure_explore::Result<()> {
    run_example()
}
