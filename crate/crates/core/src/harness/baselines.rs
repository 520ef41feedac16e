//! Reward-free baselines sharing the stopping machinery of RF-Express.

use crate::error::Result;
use crate::mdp::TabularMdp;
use crate::rf_express::{run_reward_free, RewardFreeRule, RfConfig, RfOutput};

/// Uniformly random actions; stops on the RF-Express statistic of its counts.
pub fn uniform_baseline(mdp: &TabularMdp, cfg: &RfConfig) -> Result<RfOutput> {
    run_reward_free(mdp, cfg, RewardFreeRule::Uniform)
}

/// Round-robin `(h, s, a)` sampling from the true kernel, `H` transitions per
/// round; `tau` counts rounds, i.e. transitions divided by `H`.
pub fn generative_baseline(mdp: &TabularMdp, cfg: &RfConfig) -> Result<RfOutput> {
    run_reward_free(mdp, cfg, RewardFreeRule::Generative)
}

/// Greedy in the square-root error bound. The bound carries no tunable
/// scale, so `cfg.bonus_scale` is ignored and the run is never flagged as
/// uncertified.
pub fn sqrt_bonus_baseline(mdp: &TabularMdp, cfg: &RfConfig) -> Result<RfOutput> {
    let cfg = RfConfig {
        bonus_scale: 1.0,
        ..cfg.clone()
    };
    run_reward_free(mdp, &cfg, RewardFreeRule::SqrtBonus)
}
