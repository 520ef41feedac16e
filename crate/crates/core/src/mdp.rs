//! Episodic tabular MDPs with stage-dependent transitions, and the exact
//! dynamic-programming routines used both by the exploration algorithms and
//! as ground truth when auditing them.
//!
//! Stages are 0-based internally: stage `h` runs over `0..H`, and every
//! [`StageTable`] / [`StageValues`] carries one extra terminal slice at
//! index `H` that stays identically zero.

use std::fs;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on row sums after construction.
pub const ROW_SUM_TOL: f64 = 1e-12;
/// Largest row-sum deviation that is silently renormalized.
pub const RENORMALIZE_TOL: f64 = 1e-9;

/// Dense `(H+1) x S x A` table of reals (Q-values, W, G, occupancies, rewards).
#[derive(Debug, Clone, PartialEq)]
pub struct StageTable {
    horizon: usize,
    states: usize,
    actions: usize,
    values: Vec<f64>,
}

impl StageTable {
    pub fn zeros(horizon: usize, states: usize, actions: usize) -> Self {
        Self::filled(horizon, states, actions, 0.0)
    }

    /// Every non-terminal entry set to `value`; the terminal slice is zero.
    pub fn filled(horizon: usize, states: usize, actions: usize, value: f64) -> Self {
        let mut table = StageTable {
            horizon,
            states,
            actions,
            values: vec![0.0; (horizon + 1) * states * actions],
        };
        table.values[..horizon * states * actions].fill(value);
        table
    }

    pub fn from_fn(
        horizon: usize,
        states: usize,
        actions: usize,
        mut f: impl FnMut(usize, usize, usize) -> f64,
    ) -> Self {
        let mut table = Self::zeros(horizon, states, actions);
        for h in 0..horizon {
            for s in 0..states {
                for a in 0..actions {
                    table.set(h, s, a, f(h, s, a));
                }
            }
        }
        table
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn num_states(&self) -> usize {
        self.states
    }

    pub fn num_actions(&self) -> usize {
        self.actions
    }

    #[inline]
    fn index(&self, h: usize, s: usize, a: usize) -> usize {
        debug_assert!(h <= self.horizon && s < self.states && a < self.actions);
        (h * self.states + s) * self.actions + a
    }

    #[inline]
    pub fn get(&self, h: usize, s: usize, a: usize) -> f64 {
        self.values[self.index(h, s, a)]
    }

    #[inline]
    pub fn set(&mut self, h: usize, s: usize, a: usize, value: f64) {
        let i = self.index(h, s, a);
        self.values[i] = value;
    }

    /// The action slice at `(h, s)`.
    #[inline]
    pub fn row(&self, h: usize, s: usize) -> &[f64] {
        let start = self.index(h, s, 0);
        &self.values[start..start + self.actions]
    }

    #[inline]
    pub fn row_mut(&mut self, h: usize, s: usize) -> &mut [f64] {
        let start = self.index(h, s, 0);
        &mut self.values[start..start + self.actions]
    }

    /// The `S x A` slice of stage `h`.
    pub fn stage(&self, h: usize) -> &[f64] {
        let width = self.states * self.actions;
        &self.values[h * width..(h + 1) * width]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_over_actions(&self, h: usize, s: usize) -> f64 {
        self.row(h, s)
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Greedy action at `(h, s)`, lowest index on ties.
    pub fn argmax(&self, h: usize, s: usize) -> usize {
        argmax_lowest(self.row(h, s))
    }

    /// Greedy policy over stages `0..H`, lowest-index tie-break.
    pub fn greedy_policy(&self) -> Policy {
        let mut table = Vec::with_capacity(self.horizon * self.states);
        for h in 0..self.horizon {
            for s in 0..self.states {
                table.push(self.argmax(h, s));
            }
        }
        Policy {
            horizon: self.horizon,
            states: self.states,
            actions: self.actions,
            table,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn same_shape(&self, other: &StageTable) -> bool {
        self.horizon == other.horizon
            && self.states == other.states
            && self.actions == other.actions
    }

    /// Entrywise sum of a stage slice.
    pub fn stage_sum(&self, h: usize) -> f64 {
        self.stage(h).iter().sum()
    }

    /// Adds `other` entrywise.
    pub fn accumulate(&mut self, other: &StageTable) {
        assert!(self.same_shape(other), "stage table shape mismatch");
        for (x, y) in self.values.iter_mut().zip(&other.values) {
            *x += y;
        }
    }
}

/// Index of the maximum, lowest index on ties.
#[inline]
pub fn argmax_lowest(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Per-stage state values, `(H+1) x S`, terminal slice zero.
#[derive(Debug, Clone, PartialEq)]
pub struct StageValues {
    horizon: usize,
    states: usize,
    values: Vec<f64>,
}

impl StageValues {
    pub fn zeros(horizon: usize, states: usize) -> Self {
        StageValues {
            horizon,
            states,
            values: vec![0.0; (horizon + 1) * states],
        }
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn num_states(&self) -> usize {
        self.states
    }

    #[inline]
    pub fn get(&self, h: usize, s: usize) -> f64 {
        self.values[h * self.states + s]
    }

    #[inline]
    pub fn set(&mut self, h: usize, s: usize, value: f64) {
        self.values[h * self.states + s] = value;
    }

    /// State vector at stage `h` (`h == H` is the zero terminal vector).
    #[inline]
    pub fn stage(&self, h: usize) -> &[f64] {
        &self.values[h * self.states..(h + 1) * self.states]
    }
}

/// Stage-indexed transition kernel `p[h][s][a][s']`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionKernel {
    horizon: usize,
    states: usize,
    actions: usize,
    probs: Vec<f64>,
}

impl TransitionKernel {
    /// Validates every row; rows off by at most [`RENORMALIZE_TOL`] are
    /// renormalized, larger deviations are rejected.
    pub fn new(horizon: usize, states: usize, actions: usize, mut probs: Vec<f64>) -> Result<Self> {
        if horizon == 0 || states == 0 || actions == 0 {
            return Err(Error::InvalidMdp(format!(
                "dimensions must be positive (H={horizon}, S={states}, A={actions})"
            )));
        }
        let expected = horizon * states * actions * states;
        if probs.len() != expected {
            return Err(Error::DimensionMismatch(format!(
                "kernel has {} entries, expected {expected}",
                probs.len()
            )));
        }
        for (row_index, row) in probs.chunks_mut(states).enumerate() {
            let (h, rest) = (
                row_index / (states * actions),
                row_index % (states * actions),
            );
            let (s, a) = (rest / actions, rest % actions);
            if let Some(bad) = row.iter().find(|p| !p.is_finite() || **p < 0.0) {
                return Err(Error::InvalidMdp(format!(
                    "p[{h}][{s}][{a}] has invalid entry {bad}"
                )));
            }
            let sum: f64 = row.iter().sum();
            let deviation = (sum - 1.0).abs();
            if deviation > RENORMALIZE_TOL {
                return Err(Error::InvalidMdp(format!("p[{h}][{s}][{a}] sums to {sum}")));
            }
            if deviation > ROW_SUM_TOL {
                row.iter_mut().for_each(|p| *p /= sum);
            }
        }
        Ok(TransitionKernel {
            horizon,
            states,
            actions,
            probs,
        })
    }

    /// Builds a kernel from a row generator without validation; used by
    /// constructors whose rows are correct by construction.
    pub(crate) fn from_rows_unchecked(
        horizon: usize,
        states: usize,
        actions: usize,
        mut row: impl FnMut(usize, usize, usize, &mut [f64]),
    ) -> Self {
        let mut probs = vec![0.0; horizon * states * actions * states];
        for (i, chunk) in probs.chunks_mut(states).enumerate() {
            let (h, rest) = (i / (states * actions), i % (states * actions));
            row(h, rest / actions, rest % actions, chunk);
        }
        TransitionKernel {
            horizon,
            states,
            actions,
            probs,
        }
    }

    pub fn uniform(horizon: usize, states: usize, actions: usize) -> Self {
        let p = 1.0 / states as f64;
        Self::from_rows_unchecked(horizon, states, actions, |_, _, _, row| row.fill(p))
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn num_states(&self) -> usize {
        self.states
    }

    pub fn num_actions(&self) -> usize {
        self.actions
    }

    #[inline]
    pub fn row(&self, h: usize, s: usize, a: usize) -> &[f64] {
        let start = ((h * self.states + s) * self.actions + a) * self.states;
        &self.probs[start..start + self.states]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &TransitionKernel) -> f64 {
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }
}

/// Deterministic stage-dependent policy `action[h][s]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Policy {
    horizon: usize,
    states: usize,
    actions: usize,
    table: Vec<usize>,
}

impl Policy {
    pub fn new(horizon: usize, states: usize, actions: usize, table: Vec<usize>) -> Result<Self> {
        if table.len() != horizon * states {
            return Err(Error::InvalidPolicy(format!(
                "table has {} entries, expected {}",
                table.len(),
                horizon * states
            )));
        }
        if let Some(bad) = table.iter().find(|&&a| a >= actions) {
            return Err(Error::InvalidPolicy(format!(
                "action {bad} out of range for A={actions}"
            )));
        }
        Ok(Policy {
            horizon,
            states,
            actions,
            table,
        })
    }

    pub fn constant(horizon: usize, states: usize, actions: usize, action: usize) -> Self {
        assert!(action < actions);
        Policy {
            horizon,
            states,
            actions,
            table: vec![action; horizon * states],
        }
    }

    pub fn random<R: Rng + ?Sized>(
        horizon: usize,
        states: usize,
        actions: usize,
        rng: &mut R,
    ) -> Self {
        let table = (0..horizon * states)
            .map(|_| rng.random_range(0..actions))
            .collect();
        Policy {
            horizon,
            states,
            actions,
            table,
        }
    }

    #[inline]
    pub fn action(&self, h: usize, s: usize) -> usize {
        self.table[h * self.states + s]
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn num_states(&self) -> usize {
        self.states
    }

    pub fn num_actions(&self) -> usize {
        self.actions
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub(crate) fn validate(&self) -> Result<()> {
        Policy::new(self.horizon, self.states, self.actions, self.table.clone()).map(|_| ())
    }
}

/// One step `(h, s_h, a_h, s_{h+1})` of an episode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Transition {
    pub stage: usize,
    pub state: usize,
    pub action: usize,
    pub next_state: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Trajectory {
    pub steps: Vec<Transition>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// A finite-horizon MDP with deterministic rewards in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TabularMdp {
    kernel: TransitionKernel,
    reward: StageTable,
    initial_state: usize,
}

impl TabularMdp {
    pub fn new(kernel: TransitionKernel, reward: StageTable, initial_state: usize) -> Result<Self> {
        let (h, s, a) = (kernel.horizon(), kernel.num_states(), kernel.num_actions());
        if reward.horizon() != h || reward.num_states() != s || reward.num_actions() != a {
            return Err(Error::DimensionMismatch(format!(
                "reward is {}x{}x{}, kernel is {h}x{s}x{a}",
                reward.horizon(),
                reward.num_states(),
                reward.num_actions()
            )));
        }
        if let Some(bad) = reward
            .stage_values_nonterminal()
            .find(|r| !(0.0..=1.0).contains(r))
        {
            return Err(Error::InvalidMdp(format!("reward {bad} outside [0, 1]")));
        }
        if initial_state >= s {
            return Err(Error::InvalidMdp(format!(
                "initial state {initial_state} out of range for S={s}"
            )));
        }
        Ok(TabularMdp {
            kernel,
            reward,
            initial_state,
        })
    }

    /// Same rewards and initial state over a different kernel.
    pub fn with_kernel(&self, kernel: TransitionKernel) -> Result<Self> {
        TabularMdp::new(kernel, self.reward.clone(), self.initial_state)
    }

    pub fn kernel(&self) -> &TransitionKernel {
        &self.kernel
    }

    pub fn reward(&self) -> &StageTable {
        &self.reward
    }

    pub fn initial_state(&self) -> usize {
        self.initial_state
    }

    pub fn num_states(&self) -> usize {
        self.kernel.num_states()
    }

    pub fn num_actions(&self) -> usize {
        self.kernel.num_actions()
    }

    pub fn horizon(&self) -> usize {
        self.kernel.horizon()
    }

    pub fn load_json(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: MdpFile = serde_json::from_str(text)?;
        file.into_mdp()
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string(&MdpFile::from_mdp(self))?)
    }

    pub fn save_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json_string()?).map_err(|e| Error::io(path, e))
    }

    fn check_reward_shape(&self, reward: &StageTable) {
        assert!(
            reward.horizon() == self.horizon()
                && reward.num_states() == self.num_states()
                && reward.num_actions() == self.num_actions(),
            "reward table shape does not match the MDP"
        );
    }

    fn check_policy_shape(&self, pi: &Policy) {
        assert!(
            pi.horizon() == self.horizon()
                && pi.num_states() == self.num_states()
                && pi.num_actions() == self.num_actions(),
            "policy shape does not match the MDP"
        );
    }
}

impl StageTable {
    fn stage_values_nonterminal(&self) -> impl Iterator<Item = f64> + '_ {
        self.values[..self.horizon * self.states * self.actions]
            .iter()
            .copied()
    }
}

/// On-disk JSON layout: `p` is `[H][S][A][S]`, `r` is `[H][S][A]`.
#[derive(Debug, Serialize, Deserialize)]
struct MdpFile {
    #[serde(rename = "S")]
    states: usize,
    #[serde(rename = "A")]
    actions: usize,
    #[serde(rename = "H")]
    horizon: usize,
    s1: usize,
    p: Vec<Vec<Vec<Vec<f64>>>>,
    r: Vec<Vec<Vec<f64>>>,
}

impl MdpFile {
    fn into_mdp(self) -> Result<TabularMdp> {
        let (hh, ss, aa) = (self.horizon, self.states, self.actions);
        let shape_err = |what: &str| {
            Error::DimensionMismatch(format!("{what} does not match H={hh}, S={ss}, A={aa}"))
        };
        if self.p.len() != hh || self.r.len() != hh {
            return Err(shape_err("stage count"));
        }
        let mut probs = Vec::with_capacity(hh * ss * aa * ss);
        let mut reward = StageTable::zeros(hh, ss, aa);
        for h in 0..hh {
            if self.p[h].len() != ss || self.r[h].len() != ss {
                return Err(shape_err("state count"));
            }
            for s in 0..ss {
                if self.p[h][s].len() != aa || self.r[h][s].len() != aa {
                    return Err(shape_err("action count"));
                }
                for a in 0..aa {
                    if self.p[h][s][a].len() != ss {
                        return Err(shape_err("kernel row length"));
                    }
                    probs.extend_from_slice(&self.p[h][s][a]);
                    reward.set(h, s, a, self.r[h][s][a]);
                }
            }
        }
        let kernel = TransitionKernel::new(hh, ss, aa, probs)?;
        TabularMdp::new(kernel, reward, self.s1)
    }

    fn from_mdp(mdp: &TabularMdp) -> Self {
        let (hh, ss, aa) = (mdp.horizon(), mdp.num_states(), mdp.num_actions());
        let p = (0..hh)
            .map(|h| {
                (0..ss)
                    .map(|s| (0..aa).map(|a| mdp.kernel.row(h, s, a).to_vec()).collect())
                    .collect()
            })
            .collect();
        let r = (0..hh)
            .map(|h| (0..ss).map(|s| mdp.reward.row(h, s).to_vec()).collect())
            .collect();
        MdpFile {
            states: ss,
            actions: aa,
            horizon: hh,
            s1: mdp.initial_state,
            p,
            r,
        }
    }
}

#[inline]
pub fn dot(row: &[f64], values: &[f64]) -> f64 {
    row.iter().zip(values).map(|(p, v)| p * v).sum()
}

/// `Var_p(v) = sum_s' p(s') (v(s') - p.v)^2`.
pub fn next_value_variance(prob_row: &[f64], v_next: &[f64]) -> f64 {
    let mean = dot(prob_row, v_next);
    prob_row
        .iter()
        .zip(v_next)
        .map(|(p, v)| p * (v - mean) * (v - mean))
        .sum::<f64>()
        .max(0.0)
}

/// Optimal Q-values, values and greedy policy of a finite-horizon MDP.
#[derive(Debug, Clone)]
pub struct OptimalSolution {
    pub q: StageTable,
    pub v: StageValues,
    pub policy: Policy,
}

impl OptimalSolution {
    pub fn value_at_start(&self, mdp: &TabularMdp) -> f64 {
        self.v.get(0, mdp.initial_state())
    }
}

/// Bellman backup from the terminal stage: `Q*_h = r_h + p_h V*_{h+1}`,
/// `V*_h = max_a Q*_h`. Panics if `reward` does not match the MDP shape.
pub fn backward_induction(mdp: &TabularMdp, reward: &StageTable) -> OptimalSolution {
    mdp.check_reward_shape(reward);
    let (hh, ss, aa) = (mdp.horizon(), mdp.num_states(), mdp.num_actions());
    let mut q = StageTable::zeros(hh, ss, aa);
    let mut v = StageValues::zeros(hh, ss);
    for h in (0..hh).rev() {
        for s in 0..ss {
            for a in 0..aa {
                let value = reward.get(h, s, a) + dot(mdp.kernel.row(h, s, a), v.stage(h + 1));
                q.set(h, s, a, value);
            }
            v.set(h, s, q.max_over_actions(h, s));
        }
    }
    let policy = q.greedy_policy();
    OptimalSolution { q, v, policy }
}

/// `V^pi_h(s) = r_h(s, pi_h(s)) + p_h(.|s, pi_h(s)) V^pi_{h+1}`.
pub fn policy_evaluation(mdp: &TabularMdp, reward: &StageTable, pi: &Policy) -> StageValues {
    mdp.check_reward_shape(reward);
    mdp.check_policy_shape(pi);
    let (hh, ss) = (mdp.horizon(), mdp.num_states());
    let mut v = StageValues::zeros(hh, ss);
    for h in (0..hh).rev() {
        for s in 0..ss {
            let a = pi.action(h, s);
            let value = reward.get(h, s, a) + dot(mdp.kernel.row(h, s, a), v.stage(h + 1));
            v.set(h, s, value);
        }
    }
    v
}

/// `p^pi_h(s, a)`: probability of visiting `(s, a)` at stage `h` under `pi`.
pub fn occupancy_measures(mdp: &TabularMdp, pi: &Policy) -> StageTable {
    mdp.check_policy_shape(pi);
    let (hh, ss, aa) = (mdp.horizon(), mdp.num_states(), mdp.num_actions());
    let mut occ = StageTable::zeros(hh, ss, aa);
    let mut state_mass = vec![0.0; ss];
    state_mass[mdp.initial_state()] = 1.0;
    let mut next_mass = vec![0.0; ss];
    for h in 0..hh {
        next_mass.fill(0.0);
        for (s, &mass) in state_mass.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            let a = pi.action(h, s);
            occ.set(h, s, a, mass);
            for (next, p) in next_mass.iter_mut().zip(mdp.kernel.row(h, s, a)) {
                *next += mass * p;
            }
        }
        std::mem::swap(&mut state_mass, &mut next_mass);
    }
    occ
}

/// Sum over stages of occupancy-weighted next-value variances; equals the
/// variance of the return of `pi` from the initial state.
pub fn return_variance(mdp: &TabularMdp, reward: &StageTable, pi: &Policy) -> f64 {
    let v = policy_evaluation(mdp, reward, pi);
    let occ = occupancy_measures(mdp, pi);
    let mut total = 0.0;
    for h in 0..mdp.horizon() {
        for s in 0..mdp.num_states() {
            for a in 0..mdp.num_actions() {
                let mass = occ.get(h, s, a);
                if mass > 0.0 {
                    total += mass * next_value_variance(mdp.kernel.row(h, s, a), v.stage(h + 1));
                }
            }
        }
    }
    total
}

/// Inverse-CDF draw from a probability row, accumulating left to right.
/// Rounding residue goes to the last state with positive probability.
#[inline]
pub fn sample_index<R: Rng + ?Sized>(row: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut cumulative = 0.0;
    let mut last_positive = 0;
    for (i, &p) in row.iter().enumerate() {
        if p > 0.0 {
            cumulative += p;
            last_positive = i;
            if u < cumulative {
                return i;
            }
        }
    }
    last_positive
}

/// One episode from the initial state following `pi`.
pub fn sample_episode<R: Rng + ?Sized>(mdp: &TabularMdp, pi: &Policy, rng: &mut R) -> Trajectory {
    mdp.check_policy_shape(pi);
    sample_episode_with(mdp, |h, s, _| pi.action(h, s), rng)
}

/// One episode where `choose(h, s, rng)` picks each action.
pub fn sample_episode_with<R, F>(mdp: &TabularMdp, mut choose: F, rng: &mut R) -> Trajectory
where
    R: Rng + ?Sized,
    F: FnMut(usize, usize, &mut R) -> usize,
{
    let mut steps = Vec::with_capacity(mdp.horizon());
    let mut state = mdp.initial_state();
    for h in 0..mdp.horizon() {
        let action = choose(h, state, rng);
        let next_state = sample_index(mdp.kernel.row(h, state, action), rng);
        steps.push(Transition {
            stage: h,
            state,
            action,
            next_state,
        });
        state = next_state;
    }
    Trajectory { steps }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn single_chain(horizon: usize) -> TabularMdp {
        let kernel = TransitionKernel::new(horizon, 1, 1, vec![1.0; horizon]).unwrap();
        TabularMdp::new(kernel, StageTable::filled(horizon, 1, 1, 1.0), 0).unwrap()
    }

    /// S=2 deterministic cycle 0 -> 1 -> 0, one action.
    fn cycle(horizon: usize, reward: StageTable) -> TabularMdp {
        let kernel = TransitionKernel::from_rows_unchecked(horizon, 2, 1, |_, s, _, row| {
            row[1 - s] = 1.0;
        });
        TabularMdp::new(kernel, reward, 0).unwrap()
    }

    #[test]
    fn single_chain_value_is_horizon() {
        let mdp = single_chain(3);
        let sol = backward_induction(&mdp, mdp.reward());
        assert_eq!(sol.value_at_start(&mdp), 3.0);
    }

    #[test]
    fn zero_reward_gives_zero_value_and_first_action() {
        let mdp = crate::envs::make_random_mdp(3, 3, 4, 9).unwrap();
        let zero = StageTable::zeros(4, 3, 3);
        let sol = backward_induction(&mdp, &zero);
        assert_eq!(sol.value_at_start(&mdp), 0.0);
        assert!(sol.policy.table().iter().all(|&a| a == 0));
    }

    #[test]
    fn deterministic_cycle_value_is_reach_indicator() {
        let mut reward = StageTable::zeros(2, 2, 1);
        reward.set(1, 1, 0, 1.0);
        let mdp = cycle(2, reward.clone());
        let pi = Policy::constant(2, 2, 1, 0);
        let v = policy_evaluation(&mdp, &reward, &pi);
        assert_eq!(v.get(0, 0), 1.0);
    }

    #[test]
    fn optimal_policy_attains_optimum() {
        let mdp = crate::envs::make_random_mdp(4, 3, 4, 7).unwrap();
        let sol = backward_induction(&mdp, mdp.reward());
        let v = policy_evaluation(&mdp, mdp.reward(), &sol.policy);
        for h in 0..=4 {
            for s in 0..4 {
                assert!((v.get(h, s) - sol.v.get(h, s)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn occupancy_of_deterministic_mdp_is_indicator() {
        let mdp = cycle(3, StageTable::zeros(3, 2, 1));
        let occ = occupancy_measures(&mdp, &Policy::constant(3, 2, 1, 0));
        assert_eq!(occ.get(0, 0, 0), 1.0);
        assert_eq!(occ.get(1, 1, 0), 1.0);
        assert_eq!(occ.get(2, 0, 0), 1.0);
        assert_eq!(occ.values().iter().sum::<f64>(), 3.0);
    }

    #[test]
    fn occupancy_first_stage_is_initial_pair() {
        let mdp = crate::envs::make_random_mdp(4, 2, 3, 1).unwrap();
        let pi = Policy::random(3, 4, 2, &mut ChaCha8Rng::seed_from_u64(0));
        let occ = occupancy_measures(&mdp, &pi);
        let s1 = mdp.initial_state();
        assert_eq!(occ.get(0, s1, pi.action(0, s1)), 1.0);
        for h in 0..3 {
            assert!((occ.stage_sum(h) - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn deterministic_kernel_trajectory_ignores_seed() {
        let mdp = cycle(4, StageTable::zeros(4, 2, 1));
        let pi = Policy::constant(4, 2, 1, 0);
        let a = sample_episode(&mdp, &pi, &mut ChaCha8Rng::seed_from_u64(1));
        let b = sample_episode(&mdp, &pi, &mut ChaCha8Rng::seed_from_u64(99));
        assert_eq!(a, b);
        assert_eq!(a.len(), 4);
    }

    #[test]
    fn same_seed_same_trajectory() {
        let mdp = crate::envs::make_random_mdp(5, 2, 6, 3).unwrap();
        let pi = Policy::random(6, 5, 2, &mut ChaCha8Rng::seed_from_u64(4));
        let a = sample_episode(&mdp, &pi, &mut ChaCha8Rng::seed_from_u64(12));
        let b = sample_episode(&mdp, &pi, &mut ChaCha8Rng::seed_from_u64(12));
        assert_eq!(a, b);
    }

    #[test]
    fn sampling_frequencies_follow_row() {
        let row = [0.25, 0.75];
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 100_000;
        let ones = (0..n).filter(|_| sample_index(&row, &mut rng) == 1).count();
        assert!((ones as f64 / n as f64 - 0.75).abs() < 0.01);
    }

    #[test]
    fn sampling_never_returns_zero_probability_state() {
        let row = [0.5, 0.5, 0.0];
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        assert!((0..10_000).all(|_| sample_index(&row, &mut rng) < 2));
    }

    #[test]
    fn variance_examples() {
        assert_eq!(next_value_variance(&[0.3, 0.7], &[2.0, 2.0]), 0.0);
        assert_eq!(next_value_variance(&[0.5, 0.5], &[0.0, 1.0]), 0.25);
        // mean = 0.2 + 0.6 + 2.0 = 2.8; E[v^2] = 0.2 + 1.2 + 8.0 = 9.4
        let expected = 9.4 - 2.8 * 2.8;
        let got = next_value_variance(&[0.2, 0.3, 0.5], &[1.0, 2.0, 4.0]);
        assert!((got - expected).abs() < 1e-14, "{got} vs {expected}");
    }

    #[test]
    fn kernel_validation() {
        let k = TransitionKernel::new(1, 2, 1, vec![0.5, 0.5 + 5e-10, 1.0, 0.0]).unwrap();
        assert!((k.row(0, 0, 0).iter().sum::<f64>() - 1.0).abs() <= ROW_SUM_TOL);
        assert!(TransitionKernel::new(1, 2, 1, vec![0.5, 0.6, 1.0, 0.0]).is_err());
        assert!(TransitionKernel::new(1, 2, 1, vec![-0.5, 1.5, 1.0, 0.0]).is_err());
        assert!(matches!(
            TransitionKernel::new(1, 2, 1, vec![1.0]),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn mdp_validation() {
        let kernel = TransitionKernel::uniform(2, 2, 2);
        assert!(TabularMdp::new(kernel.clone(), StageTable::filled(2, 2, 2, 1.5), 0).is_err());
        assert!(TabularMdp::new(kernel.clone(), StageTable::zeros(2, 2, 2), 2).is_err());
        assert!(TabularMdp::new(kernel, StageTable::zeros(3, 2, 2), 0).is_err());
        assert!(Policy::new(1, 2, 2, vec![0, 2]).is_err());
    }

    #[test]
    fn json_round_trip_and_rejection() {
        let mdp = crate::envs::make_random_mdp(3, 2, 2, 8).unwrap();
        let text = mdp.to_json_string().unwrap();
        assert_eq!(TabularMdp::from_json_str(&text).unwrap(), mdp);
        let bad =
            r#"{"S":2,"A":1,"H":1,"s1":0,"p":[[[[0.5,0.4]],[[1.0,0.0]]]],"r":[[[0.0],[0.0]]]}"#;
        assert!(matches!(
            TabularMdp::from_json_str(bad),
            Err(Error::InvalidMdp(_))
        ));
        let short =
            r#"{"S":2,"A":1,"H":2,"s1":0,"p":[[[[0.5,0.5]],[[1.0,0.0]]]],"r":[[[0.0],[0.0]]]}"#;
        assert!(matches!(
            TabularMdp::from_json_str(short),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    #[should_panic(expected = "reward table shape")]
    fn backward_induction_rejects_mismatched_reward() {
        let mdp = single_chain(2);
        backward_induction(&mdp, &StageTable::zeros(3, 1, 1));
    }
}
