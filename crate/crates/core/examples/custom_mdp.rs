// Bring your own MDP: load a JSON description, solve it exactly and run
// best-policy identification on it.
//
// The format stores `p[h][s][a][s']` and `r[h][s][a]` with 0-based stages.
//
// ```bash
// cargo run --release --example custom_mdp
// ```

use pure_explore::harness::audit::bpi_gap;
use pure_explore::{backward_induction, run_bpi_ucbvi, BpiConfig, TabularMdp};

const TWO_DOORS: &str = r#"{
  "S": 2, "A": 2, "H": 2, "s1": 0,
  "p": [
    [[[0.9, 0.1], [0.2, 0.8]], [[0.5, 0.5], [0.0, 1.0]]],
    [[[1.0, 0.0], [0.0, 1.0]], [[1.0, 0.0], [0.0, 1.0]]]
  ],
  "r": [
    [[0.1, 0.0], [0.0, 0.5]],
    [[0.0, 0.3], [1.0, 0.2]]
  ]
}"#;

pub fn run_example() -> pure_explore::Result<()> {
    let mdp = TabularMdp::from_json_str(TWO_DOORS)?;
    let opt = backward_induction(&mdp, mdp.reward());
    println!("V*(s1) = {:.4}", opt.value_at_start(&mdp));
    for h in 0..mdp.horizon() {
        println!(
            "stage {h} optimal actions: {:?}",
            (0..2).map(|s| opt.policy.action(h, s)).collect::<Vec<_>>()
        );
    }
    let out = run_bpi_ucbvi(&mdp, &BpiConfig::new(0.25, 0.1, 0))?;
    println!(
        "BPI stopped={} after {} episodes; true gap of the returned policy {:.3e}",
        out.stopped,
        out.tau,
        bpi_gap(&mdp, &out.pihat)
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> pure_explore::Result<()> {
    run_example()
}
