// Reward-free sampling rules side by side: the 1/n bonus, the square-root
// bonus, uniformly random actions and round-robin generative sampling. All
// four stop on an error bound computed from their own counts.
//
// ```bash
// cargo run --release --example baselines
// ```

use pure_explore::{make_double_chain, run_reward_free, RewardFreeRule, RfConfig};

pub fn run_example() -> pure_explore::Result<()> {
    let mdp = make_double_chain(3, 4, 0.1)?;
    let rules = [
        ("1/n bonus", RewardFreeRule::RfExpress),
        ("sqrt bonus", RewardFreeRule::SqrtBonus),
        ("uniform", RewardFreeRule::Uniform),
        ("generative", RewardFreeRule::Generative),
    ];
    let mut taus = Vec::new();
    for (name, rule) in rules {
        let mut cfg = RfConfig::new(2.0, 0.1, 11).with_cap(2_000_000);
        if rule != RewardFreeRule::SqrtBonus {
            cfg = cfg.with_bonus_scale(0.02);
        }
        let out = run_reward_free(&mdp, &cfg, rule)?;
        println!(
            "{name:<12} tau {:>9}  stopped {}  coverage {:.2}",
            out.tau,
            out.stopped,
            out.model.coverage()
        );
        taus.push(out.tau);
    }
    if taus[2] < taus[0] {
        println!("WARN: uniform exploration stopped before the 1/n bonus rule");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> pure_explore::Result<()> {
    run_example()
}
