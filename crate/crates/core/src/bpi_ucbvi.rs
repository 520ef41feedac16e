//! Best-policy identification with variance-aware optimism.
//!
//! Each episode runs a joint backward pass for the upper and lower
//! confidence values
//!
//! ```text
//! bonus   = 3 sqrt(Var_phat(uV_{h+1}) b*(n)/n) + 14 H^2 b(n)/n + (1/H) phat (uV_{h+1} - lV_{h+1})
//! uQ_h    = min(H, r + bonus + phat uV_{h+1})
//! lQ_h    = max(0, r - bonus + phat lV_{h+1})
//! ```
//!
//! (both bounds use the variance of the *upper* value), plays greedily in
//! `uQ`, and bounds the gap of that greedy policy with
//!
//! ```text
//! G_h = min(H, 6 sqrt(Var_phat(uV_{h+1}) b*(n)/n) + 36 H^2 b(n)/n + (1 + 3/H) phat pi_{h+1} G_{h+1}).
//! ```
//!
//! It stops at the first `t` with `G_1(s_1, pi_1(s_1)) <= epsilon` and
//! returns that greedy policy.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::concentration::Thresholds;
use crate::empirical::EmpiricalModel;
use crate::error::Result;
use crate::mdp::{sample_episode, Policy, StageTable, StageValues, TabularMdp};
use crate::rf_express::{
    record_due, validate_common, DEFAULT_DIAGNOSTICS_EVERY, DEFAULT_EPISODE_CAP,
};

#[derive(Debug, Clone, PartialEq)]
pub struct BpiConfig {
    pub epsilon: f64,
    pub delta: f64,
    pub episode_cap: u64,
    pub bonus_scale: f64,
    pub seed: u64,
    pub diagnostics_every: u64,
}

impl BpiConfig {
    pub fn new(epsilon: f64, delta: f64, seed: u64) -> Self {
        BpiConfig {
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

    /// Whether epsilon lies in the range `(0, 1/S^2]` covered by the
    /// sample-complexity bound.
    pub fn epsilon_in_bound_range(&self, states: usize) -> bool {
        self.epsilon <= 1.0 / (states * states) as f64
    }
}

/// Upper/lower confidence values on `Q*` and `V*`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfidenceValues {
    pub uq: StageTable,
    pub lq: StageTable,
    pub uv: StageValues,
    pub lv: StageValues,
}

impl ConfidenceValues {
    fn new(horizon: usize, states: usize, actions: usize) -> Self {
        ConfidenceValues {
            uq: StageTable::zeros(horizon, states, actions),
            lq: StageTable::zeros(horizon, states, actions),
            uv: StageValues::zeros(horizon, states),
            lv: StageValues::zeros(horizon, states),
        }
    }
}

/// Cached `beta(n)/n` and `beta_star(n)/n` per pair.
struct Ratios {
    beta: Vec<f64>,
    beta_star: Vec<f64>,
}

impl Ratios {
    fn from_model(model: &EmpiricalModel, th: &Thresholds) -> Self {
        let len = model.horizon() * model.num_states() * model.num_actions();
        let mut ratios = Ratios {
            beta: Vec::with_capacity(len),
            beta_star: Vec::with_capacity(len),
        };
        for h in 0..model.horizon() {
            for s in 0..model.num_states() {
                for a in 0..model.num_actions() {
                    let n = model.count(h, s, a);
                    ratios.beta.push(th.beta_ratio(n));
                    ratios.beta_star.push(th.beta_star_ratio(n));
                }
            }
        }
        ratios
    }
}

/// Empirical mean and variance of `v` under `n3 / n`.
#[inline]
fn empirical_moments(next_counts: &[u64], n: f64, v: &[f64]) -> (f64, f64) {
    let mean = next_counts
        .iter()
        .zip(v)
        .map(|(&c, &x)| c as f64 * x)
        .sum::<f64>()
        / n;
    let var = next_counts
        .iter()
        .zip(v)
        .map(|(&c, &x)| c as f64 * (x - mean) * (x - mean))
        .sum::<f64>()
        / n;
    (mean, var.max(0.0))
}

fn confidence_into(
    model: &EmpiricalModel,
    reward: &StageTable,
    ratios: &Ratios,
    bonus_scale: f64,
    cv: &mut ConfidenceValues,
) {
    let (hh, ss, aa) = (model.horizon(), model.num_states(), model.num_actions());
    let horizon = hh as f64;
    let quadratic = 14.0 * horizon * horizon;
    for h in (0..hh).rev() {
        for s in 0..ss {
            for a in 0..aa {
                let n = model.count(h, s, a);
                let (upper, lower) = if n == 0 {
                    (horizon, 0.0)
                } else {
                    let counts = model.next_counts(h, s, a);
                    let nf = n as f64;
                    let (u_mean, u_var) = empirical_moments(counts, nf, cv.uv.stage(h + 1));
                    let l_mean = counts
                        .iter()
                        .zip(cv.lv.stage(h + 1))
                        .map(|(&c, &x)| c as f64 * x)
                        .sum::<f64>()
                        / nf;
                    let pair = (h * ss + s) * aa + a;
                    let bonus = bonus_scale
                        * (3.0 * (u_var * ratios.beta_star[pair]).sqrt()
                            + quadratic * ratios.beta[pair]
                            + (u_mean - l_mean) / horizon);
                    let r = reward.get(h, s, a);
                    (
                        (r + bonus + u_mean).min(horizon),
                        (r - bonus + l_mean).max(0.0),
                    )
                };
                cv.uq.set(h, s, a, upper);
                cv.lq.set(h, s, a, lower);
            }
            cv.uv.set(h, s, cv.uq.max_over_actions(h, s));
            cv.lv.set(h, s, cv.lq.max_over_actions(h, s));
        }
    }
}

fn g_into(
    model: &EmpiricalModel,
    cv: &ConfidenceValues,
    pi_next: &Policy,
    ratios: &Ratios,
    bonus_scale: f64,
    g: &mut StageTable,
) {
    let (hh, ss, aa) = (model.horizon(), model.num_states(), model.num_actions());
    let horizon = hh as f64;
    let quadratic = 36.0 * horizon * horizon;
    let growth = 1.0 + 3.0 / horizon;
    let mut next_on_policy = vec![0.0; ss];
    for h in (0..hh).rev() {
        if h + 1 < hh {
            for (s, slot) in next_on_policy.iter_mut().enumerate() {
                *slot = g.get(h + 1, s, pi_next.action(h + 1, s));
            }
        }
        for s in 0..ss {
            for a in 0..aa {
                let n = model.count(h, s, a);
                let value = if n == 0 {
                    horizon
                } else {
                    let counts = model.next_counts(h, s, a);
                    let nf = n as f64;
                    let (_, u_var) = empirical_moments(counts, nf, cv.uv.stage(h + 1));
                    let continuation = counts
                        .iter()
                        .zip(&next_on_policy)
                        .map(|(&c, &x)| c as f64 * x)
                        .sum::<f64>()
                        / nf;
                    let pair = (h * ss + s) * aa + a;
                    let bonus = bonus_scale
                        * (6.0 * (u_var * ratios.beta_star[pair]).sqrt()
                            + quadratic * ratios.beta[pair]);
                    (bonus + growth * continuation).min(horizon)
                };
                g.set(h, s, a, value);
            }
        }
    }
}

/// Upper and lower confidence values at the current counts.
pub fn compute_confidence_values(
    model: &EmpiricalModel,
    reward: &StageTable,
    th: &Thresholds,
    bonus_scale: f64,
) -> ConfidenceValues {
    let (hh, ss, aa) = (model.horizon(), model.num_states(), model.num_actions());
    assert!(
        reward.horizon() == hh && reward.num_states() == ss && reward.num_actions() == aa,
        "reward table shape does not match the model"
    );
    let mut cv = ConfidenceValues::new(hh, ss, aa);
    confidence_into(
        model,
        reward,
        &Ratios::from_model(model, th),
        bonus_scale,
        &mut cv,
    );
    cv
}

pub fn bpi_greedy_policy(cv: &ConfidenceValues) -> Policy {
    cv.uq.greedy_policy()
}

/// Gap bound `G` for the greedy policy `pi_next`.
pub fn compute_g(
    model: &EmpiricalModel,
    cv: &ConfidenceValues,
    pi_next: &Policy,
    th: &Thresholds,
    bonus_scale: f64,
) -> StageTable {
    let mut g = StageTable::zeros(model.horizon(), model.num_states(), model.num_actions());
    g_into(
        model,
        cv,
        pi_next,
        &Ratios::from_model(model, th),
        bonus_scale,
        &mut g,
    );
    g
}

/// One diagnostics row: `t,g1_at_pi,uv1,lv1,coverage`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BpiDiagnostic {
    pub t: u64,
    pub g1_at_pi: f64,
    pub uv1: f64,
    pub lv1: f64,
    pub coverage: f64,
}

#[derive(Debug, Clone)]
pub struct BpiOutput {
    pub tau: u64,
    pub stopped: bool,
    pub uncertified: bool,
    /// False when epsilon exceeds `1/S^2`.
    pub epsilon_in_bound_range: bool,
    pub final_stat: f64,
    pub pihat: Policy,
    pub model: EmpiricalModel,
    pub diagnostics: Vec<BpiDiagnostic>,
}

/// Step-by-step driver: `refresh` computes confidence values, the greedy
/// policy and `G` (in that order); `explore` plays one greedy episode.
pub struct BpiExplorer<'a> {
    mdp: &'a TabularMdp,
    th: Thresholds,
    bonus_scale: f64,
    model: EmpiricalModel,
    ratios: Ratios,
    cv: ConfidenceValues,
    policy: Policy,
    g: StageTable,
    statistic: f64,
    rng: ChaCha8Rng,
}

impl<'a> BpiExplorer<'a> {
    pub fn new(mdp: &'a TabularMdp, delta: f64, bonus_scale: f64, seed: u64) -> Result<Self> {
        let th = Thresholds::for_mdp(mdp, delta)?;
        let (hh, ss, aa) = (mdp.horizon(), mdp.num_states(), mdp.num_actions());
        let model = EmpiricalModel::new(hh, ss, aa);
        let mut explorer = BpiExplorer {
            mdp,
            th,
            bonus_scale,
            ratios: Ratios::from_model(&model, &th),
            model,
            cv: ConfidenceValues::new(hh, ss, aa),
            policy: Policy::constant(hh, ss, aa, 0),
            g: StageTable::zeros(hh, ss, aa),
            statistic: f64::INFINITY,
            rng: ChaCha8Rng::seed_from_u64(seed),
        };
        explorer.refresh();
        Ok(explorer)
    }

    /// Returns `pi_1 G_1(s_1)` for the refreshed greedy policy.
    pub fn refresh(&mut self) -> f64 {
        confidence_into(
            &self.model,
            self.mdp.reward(),
            &self.ratios,
            self.bonus_scale,
            &mut self.cv,
        );
        self.policy = self.cv.uq.greedy_policy();
        g_into(
            &self.model,
            &self.cv,
            &self.policy,
            &self.ratios,
            self.bonus_scale,
            &mut self.g,
        );
        let s1 = self.mdp.initial_state();
        self.statistic = self.g.get(0, s1, self.policy.action(0, s1));
        self.statistic
    }

    pub fn explore(&mut self) -> Result<()> {
        let traj = sample_episode(self.mdp, &self.policy, &mut self.rng);
        self.model.update(&traj)?;
        let (ss, aa) = (self.mdp.num_states(), self.mdp.num_actions());
        for step in &traj.steps {
            let pair = (step.stage * ss + step.state) * aa + step.action;
            let n = self.model.count(step.stage, step.state, step.action);
            self.ratios.beta[pair] = self.th.beta_ratio(n);
            self.ratios.beta_star[pair] = self.th.beta_star_ratio(n);
        }
        Ok(())
    }

    pub fn episodes(&self) -> u64 {
        self.model.episodes()
    }

    pub fn model(&self) -> &EmpiricalModel {
        &self.model
    }

    pub fn confidence(&self) -> &ConfidenceValues {
        &self.cv
    }

    pub fn policy(&self) -> &Policy {
        &self.policy
    }

    pub fn gap_bound(&self) -> &StageTable {
        &self.g
    }

    pub fn statistic(&self) -> f64 {
        self.statistic
    }

    pub fn thresholds(&self) -> &Thresholds {
        &self.th
    }

    fn diagnostic(&self) -> BpiDiagnostic {
        let s1 = self.mdp.initial_state();
        BpiDiagnostic {
            t: self.model.episodes(),
            g1_at_pi: self.statistic,
            uv1: self.cv.uv.get(0, s1),
            lv1: self.cv.lv.get(0, s1),
            coverage: self.model.coverage(),
        }
    }
}

pub fn run_bpi_ucbvi(mdp: &TabularMdp, cfg: &BpiConfig) -> Result<BpiOutput> {
    cfg.validate()?;
    let mut explorer = BpiExplorer::new(mdp, cfg.delta, cfg.bonus_scale, cfg.seed)?;
    let mut diagnostics = Vec::new();
    let stopped = loop {
        let t = explorer.episodes();
        let stop = explorer.statistic() <= cfg.epsilon;
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
    Ok(BpiOutput {
        tau: explorer.episodes(),
        stopped,
        uncertified: cfg.uncertified(),
        epsilon_in_bound_range: cfg.epsilon_in_bound_range(mdp.num_states()),
        final_stat: explorer.statistic(),
        pihat: explorer.policy,
        model: explorer.model,
        diagnostics,
    })
}
