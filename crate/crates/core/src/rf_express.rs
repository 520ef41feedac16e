//! Reward-free exploration with `1/n` bonuses.
//!
//! Each episode the error-bound table
//!
//! ```text
//! W_h(s,a) = min(H, 15 H^2 beta(n)/n + (1 + 1/H) p_hat(.|s,a) . max_a' W_{h+1}(., a'))
//! ```
//!
//! is rebuilt from the counts, the next episode is played greedily in `W`,
//! and exploration stops once `3e sqrt(m) + m <= epsilon/2` with
//! `m = max_a W_1(s_1, a)`. The output is the empirical kernel at that time.
//!
//! The same driver also runs the reward-free baselines (square-root bonus,
//! uniform actions, generative round-robin); see [`RewardFreeRule`].

use std::f64::consts::E;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::concentration::Thresholds;
use crate::empirical::EmpiricalModel;
use crate::error::{Error, Result};
use crate::mdp::{
    sample_episode, sample_episode_with, sample_index, Policy, StageTable, TabularMdp,
    TransitionKernel,
};

/// Default hard limit on the number of episodes.
pub const DEFAULT_EPISODE_CAP: u64 = 5_000_000;
/// Diagnostics are recorded every episode up to this `t`...
pub const DENSE_DIAGNOSTICS_UNTIL: u64 = 10_000;
/// ...and every this many episodes afterwards.
pub const DEFAULT_DIAGNOSTICS_EVERY: u64 = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct RfConfig {
    pub epsilon: f64,
    pub delta: f64,
    pub episode_cap: u64,
    /// Multiplies every bonus; anything other than 1 voids the guarantees.
    pub bonus_scale: f64,
    pub seed: u64,
    pub diagnostics_every: u64,
}

impl RfConfig {
    pub fn new(epsilon: f64, delta: f64, seed: u64) -> Self {
        RfConfig {
            epsilon,
            delta,
            episode_cap: DEFAULT_EPISODE_CAP,
            bonus_scale: 1.0,
            seed,
            diagnostics_every: DEFAULT_DIAGNOSTICS_EVERY,
        }
    }

    pub fn with_cap(mut self, cap: u64) -> Self {
        self.episode_cap = cap;
        self
    }

    pub fn with_bonus_scale(mut self, scale: f64) -> Self {
        self.bonus_scale = scale;
        self
    }

    pub fn validate(&self) -> Result<()> {
        validate_common(
            self.epsilon,
            self.delta,
            self.bonus_scale,
            self.diagnostics_every,
        )
    }

    pub fn uncertified(&self) -> bool {
        self.bonus_scale != 1.0
    }
}

pub(crate) fn validate_common(
    epsilon: f64,
    delta: f64,
    bonus_scale: f64,
    every: u64,
) -> Result<()> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "delta must lie in (0, 1), got {delta}"
        )));
    }
    if !(bonus_scale > 0.0 && bonus_scale.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "bonus_scale must be positive, got {bonus_scale}"
        )));
    }
    if every == 0 {
        return Err(Error::InvalidConfig(
            "diagnostics interval must be positive".into(),
        ));
    }
    Ok(())
}

/// One diagnostics row: `t,stop_stat,max_w1,coverage`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RfDiagnostic {
    pub t: u64,
    pub stop_stat: f64,
    pub max_w1: f64,
    pub coverage: f64,
}

#[derive(Debug, Clone)]
pub struct RfOutput {
    /// Episodes played before stopping (or the cap when `stopped` is false).
    pub tau: u64,
    pub stopped: bool,
    pub uncertified: bool,
    pub final_stat: f64,
    pub phat: TransitionKernel,
    pub model: EmpiricalModel,
    pub diagnostics: Vec<RfDiagnostic>,
}

/// Sampling and stopping rules for the reward-free driver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RewardFreeRule {
    /// Greedy in `W`, stop on `3e sqrt(m) + m`.
    RfExpress,
    /// Greedy in the square-root error bound `E`, stop on `max_a E_1`.
    SqrtBonus,
    /// Uniformly random actions, stop on the `W` statistic.
    Uniform,
    /// Round-robin over `(h, s, a)` with direct access to the kernel, one
    /// check per `H` transitions, stop on the `W` statistic.
    Generative,
}

fn ratio_table(model: &EmpiricalModel, th: &Thresholds) -> Vec<f64> {
    let mut ratios = Vec::with_capacity(model.horizon() * model.num_states() * model.num_actions());
    for h in 0..model.horizon() {
        for s in 0..model.num_states() {
            for a in 0..model.num_actions() {
                ratios.push(th.beta_ratio(model.count(h, s, a)));
            }
        }
    }
    ratios
}

/// Backward recursion shared by `W` and the square-root baseline:
/// `T_h = min(H, bonus(ratio) + growth * p_hat . max_a' T_{h+1})`, with
/// `T_h = H` on unvisited pairs.
fn error_recursion(
    model: &EmpiricalModel,
    ratios: &[f64],
    growth: f64,
    bonus: impl Fn(f64) -> f64,
    out: &mut StageTable,
) {
    let (hh, ss, aa) = (model.horizon(), model.num_states(), model.num_actions());
    let cap = hh as f64;
    let mut next_max = vec![0.0; ss];
    let mut stage_max = vec![0.0; ss];
    for h in (0..hh).rev() {
        for (s, slot) in stage_max.iter_mut().enumerate() {
            let mut best = f64::NEG_INFINITY;
            for a in 0..aa {
                let n = model.count(h, s, a);
                let value = if n == 0 {
                    cap
                } else {
                    let weighted: f64 = model
                        .next_counts(h, s, a)
                        .iter()
                        .zip(&next_max)
                        .map(|(&c, &w)| c as f64 * w)
                        .sum();
                    let continuation = weighted / n as f64;
                    let pair = (h * ss + s) * aa + a;
                    (bonus(ratios[pair]) + growth * continuation).min(cap)
                };
                out.set(h, s, a, value);
                best = best.max(value);
            }
            *slot = best;
        }
        std::mem::swap(&mut next_max, &mut stage_max);
    }
}

fn w_into(model: &EmpiricalModel, ratios: &[f64], bonus_scale: f64, out: &mut StageTable) {
    let horizon = model.horizon() as f64;
    let factor = bonus_scale * 15.0 * horizon * horizon;
    error_recursion(model, ratios, 1.0 + 1.0 / horizon, |r| factor * r, out);
}

fn sqrt_e_into(model: &EmpiricalModel, ratios: &[f64], out: &mut StageTable) {
    let horizon = model.horizon() as f64;
    error_recursion(model, ratios, 1.0, |r| horizon * (2.0 * r).sqrt(), out);
}

/// The `W` table at the current counts.
pub fn compute_w(model: &EmpiricalModel, th: &Thresholds, bonus_scale: f64) -> StageTable {
    let mut w = StageTable::zeros(model.horizon(), model.num_states(), model.num_actions());
    w_into(model, &ratio_table(model, th), bonus_scale, &mut w);
    w
}

/// Square-root-bonus error bound
/// `E_h = min(H, H sqrt(2 beta(n)/n) + p_hat . max_a' E_{h+1})`.
pub fn compute_e_sqrt_baseline(model: &EmpiricalModel, th: &Thresholds) -> StageTable {
    let mut e = StageTable::zeros(model.horizon(), model.num_states(), model.num_actions());
    sqrt_e_into(model, &ratio_table(model, th), &mut e);
    e
}

pub fn rf_greedy_policy(w: &StageTable) -> Policy {
    w.greedy_policy()
}

/// `3e sqrt(m) + m` with `m = max_a W_1(s_1, a)`.
pub fn rf_stopping_statistic(w: &StageTable, s1: usize) -> f64 {
    let m = w.max_over_actions(0, s1).max(0.0);
    3.0 * E * m.sqrt() + m
}

/// Step-by-step reward-free exploration. `refresh` rebuilds the error table,
/// greedy policy and stopping statistic from the current counts; `explore`
/// plays one episode (or `H` generative transitions) and updates the counts.
pub struct RewardFreeExplorer<'a> {
    mdp: &'a TabularMdp,
    th: Thresholds,
    rule: RewardFreeRule,
    bonus_scale: f64,
    model: EmpiricalModel,
    ratios: Vec<f64>,
    table: StageTable,
    policy: Policy,
    statistic: f64,
    rng: ChaCha8Rng,
    cursor: usize,
    explored: u64,
}

impl<'a> RewardFreeExplorer<'a> {
    pub fn new(
        mdp: &'a TabularMdp,
        delta: f64,
        bonus_scale: f64,
        rule: RewardFreeRule,
        seed: u64,
    ) -> Result<Self> {
        let th = Thresholds::for_mdp(mdp, delta)?;
        let (hh, ss, aa) = (mdp.horizon(), mdp.num_states(), mdp.num_actions());
        let model = EmpiricalModel::new(hh, ss, aa);
        let mut explorer = RewardFreeExplorer {
            mdp,
            th,
            rule,
            bonus_scale,
            ratios: ratio_table(&model, &th),
            model,
            table: StageTable::zeros(hh, ss, aa),
            policy: Policy::constant(hh, ss, aa, 0),
            statistic: f64::INFINITY,
            rng: ChaCha8Rng::seed_from_u64(seed),
            cursor: 0,
            explored: 0,
        };
        explorer.refresh();
        Ok(explorer)
    }

    /// Rebuilds the error table and greedy policy; returns the stopping
    /// statistic.
    pub fn refresh(&mut self) -> f64 {
        match self.rule {
            RewardFreeRule::SqrtBonus => {
                sqrt_e_into(&self.model, &self.ratios, &mut self.table);
                self.statistic = self.table.max_over_actions(0, self.mdp.initial_state());
            }
            _ => {
                w_into(&self.model, &self.ratios, self.bonus_scale, &mut self.table);
                self.statistic = rf_stopping_statistic(&self.table, self.mdp.initial_state());
            }
        }
        self.policy = self.table.greedy_policy();
        self.statistic
    }

    fn touch(&mut self, h: usize, s: usize, a: usize) {
        let pair = (h * self.mdp.num_states() + s) * self.mdp.num_actions() + a;
        self.ratios[pair] = self.th.beta_ratio(self.model.count(h, s, a));
    }

    /// Plays one exploration round with the current policy. Call `refresh`
    /// before reading the table again.
    pub fn explore(&mut self) -> Result<()> {
        match self.rule {
            RewardFreeRule::RfExpress | RewardFreeRule::SqrtBonus => {
                let traj = sample_episode(self.mdp, &self.policy, &mut self.rng);
                self.model.update(&traj)?;
                for step in &traj.steps {
                    self.touch(step.stage, step.state, step.action);
                }
            }
            RewardFreeRule::Uniform => {
                let actions = self.mdp.num_actions();
                let traj = sample_episode_with(
                    self.mdp,
                    |_, _, rng| rng.random_range(0..actions),
                    &mut self.rng,
                );
                self.model.update(&traj)?;
                for step in &traj.steps {
                    self.touch(step.stage, step.state, step.action);
                }
            }
            RewardFreeRule::Generative => {
                let (ss, aa) = (self.mdp.num_states(), self.mdp.num_actions());
                let triples = self.mdp.horizon() * ss * aa;
                for _ in 0..self.mdp.horizon() {
                    let (h, rest) = (self.cursor / (ss * aa), self.cursor % (ss * aa));
                    let (s, a) = (rest / aa, rest % aa);
                    let next = sample_index(self.mdp.kernel().row(h, s, a), &mut self.rng);
                    self.model.record_transition(h, s, a, next)?;
                    self.touch(h, s, a);
                    self.cursor = (self.cursor + 1) % triples;
                }
            }
        }
        self.explored += 1;
        Ok(())
    }

    /// Exploration rounds played so far (episodes, or episode-equivalents of
    /// `H` transitions for the generative rule).
    pub fn rounds(&self) -> u64 {
        self.explored
    }

    pub fn model(&self) -> &EmpiricalModel {
        &self.model
    }

    /// `W` (or `E` for the square-root rule) as of the last refresh.
    pub fn table(&self) -> &StageTable {
        &self.table
    }

    /// Greedy policy in the table as of the last refresh.
    pub fn policy(&self) -> &Policy {
        &self.policy
    }

    pub fn statistic(&self) -> f64 {
        self.statistic
    }

    pub fn max_w1(&self) -> f64 {
        self.table.max_over_actions(0, self.mdp.initial_state())
    }

    pub fn thresholds(&self) -> &Thresholds {
        &self.th
    }

    fn diagnostic(&self) -> RfDiagnostic {
        RfDiagnostic {
            t: self.explored,
            stop_stat: self.statistic,
            max_w1: self.max_w1(),
            coverage: self.model.coverage(),
        }
    }
}

pub(crate) fn record_due(t: u64, every: u64) -> bool {
    t <= DENSE_DIAGNOSTICS_UNTIL || t.is_multiple_of(every)
}

/// Runs any reward-free rule to its stopping time or the episode cap.
pub fn run_reward_free(mdp: &TabularMdp, cfg: &RfConfig, rule: RewardFreeRule) -> Result<RfOutput> {
    cfg.validate()?;
    let mut explorer = RewardFreeExplorer::new(mdp, cfg.delta, cfg.bonus_scale, rule, cfg.seed)?;
    let threshold = cfg.epsilon / 2.0;
    let mut diagnostics = Vec::new();
    let stopped = loop {
        let t = explorer.rounds();
        let stop = explorer.statistic() <= threshold;
        if stop || t >= cfg.episode_cap || record_due(t, cfg.diagnostics_every) {
            diagnostics.push(explorer.diagnostic());
        }
        if stop {
            break true;
        }
        if t >= cfg.episode_cap {
            break false;
        }
        explorer.explore()?;
        explorer.refresh();
    };
    Ok(RfOutput {
        tau: explorer.rounds(),
        stopped,
        uncertified: cfg.uncertified(),
        final_stat: explorer.statistic(),
        phat: explorer.model.empirical_kernel(),
        model: explorer.model,
        diagnostics,
    })
}

pub fn run_rf_express(mdp: &TabularMdp, cfg: &RfConfig) -> Result<RfOutput> {
    run_reward_free(mdp, cfg, RewardFreeRule::RfExpress)
}
