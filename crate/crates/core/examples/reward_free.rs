// Reward-free exploration on a slippery two-armed chain, followed by
// planning for several reward functions that were never seen during
// exploration.
//
// ```bash
// cargo run --release --example reward_free
// ```

use pure_explore::harness::audit::{audit_reward_family, pac_audit_rfe, RANDOM_AUDIT_REWARDS};
use pure_explore::{make_double_chain, run_rf_express, RfConfig};

pub fn run_example() -> pure_explore::Result<()> {
    let mdp = make_double_chain(3, 4, 0.1)?;
    // a small bonus scale keeps this fast; the run is flagged uncertified
    let cfg = RfConfig::new(2.0, 0.1, 7).with_bonus_scale(0.02);
    let out = run_rf_express(&mdp, &cfg)?;
    println!(
        "stopped={} after {} episodes, statistic {:.4} (uncertified: {})",
        out.stopped, out.tau, out.final_stat, out.uncertified
    );

    let family = audit_reward_family(&mdp, &out.model, 7, RANDOM_AUDIT_REWARDS);
    for verdict in pac_audit_rfe(&out.phat, &mdp, &family, cfg.epsilon)? {
        println!(
            "{:<24} gap {:>10.3e}  {}",
            verdict.label,
            verdict.gap,
            if verdict.pass { "ok" } else { "FAIL" }
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> pure_explore::Result<()> {
    run_example()
}
