//! Visit counts and the empirical transition kernel built from them.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mdp::{StageTable, Trajectory, TransitionKernel};

/// Sufficient statistics of the exploration data: `n_h(s,a)`,
/// `n_h(s,a,s')` and the episode count `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmpiricalModel {
    horizon: usize,
    states: usize,
    actions: usize,
    visits: Vec<u64>,
    transitions: Vec<u64>,
    episodes: u64,
    /// Transitions recorded outside full episodes (generative access).
    loose_transitions: u64,
    visited_pairs: usize,
}

impl EmpiricalModel {
    pub fn new(horizon: usize, states: usize, actions: usize) -> Self {
        EmpiricalModel {
            horizon,
            states,
            actions,
            visits: vec![0; horizon * states * actions],
            transitions: vec![0; horizon * states * actions * states],
            episodes: 0,
            loose_transitions: 0,
            visited_pairs: 0,
        }
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

    /// Number of completed episodes `t`.
    pub fn episodes(&self) -> u64 {
        self.episodes
    }

    #[inline]
    fn pair(&self, h: usize, s: usize, a: usize) -> usize {
        (h * self.states + s) * self.actions + a
    }

    #[inline]
    pub fn count(&self, h: usize, s: usize, a: usize) -> u64 {
        self.visits[self.pair(h, s, a)]
    }

    /// Next-state counts `n_h(s, a, .)`.
    #[inline]
    pub fn next_counts(&self, h: usize, s: usize, a: usize) -> &[u64] {
        let start = self.pair(h, s, a) * self.states;
        &self.transitions[start..start + self.states]
    }

    /// Fraction of `(h, s, a)` triples visited at least once.
    pub fn coverage(&self) -> f64 {
        self.visited_pairs as f64 / self.visits.len() as f64
    }

    fn check_step(&self, h: usize, s: usize, a: usize, next: usize) -> Result<()> {
        if h >= self.horizon || s >= self.states || a >= self.actions || next >= self.states {
            return Err(Error::DimensionMismatch(format!(
                "transition ({h}, {s}, {a}, {next}) outside H={}, S={}, A={}",
                self.horizon, self.states, self.actions
            )));
        }
        Ok(())
    }

    #[inline]
    fn bump(&mut self, h: usize, s: usize, a: usize, next: usize) {
        let pair = self.pair(h, s, a);
        if self.visits[pair] == 0 {
            self.visited_pairs += 1;
        }
        self.visits[pair] += 1;
        self.transitions[pair * self.states + next] += 1;
    }

    /// Adds one full episode. The trajectory is validated before any count
    /// changes.
    pub fn update(&mut self, traj: &Trajectory) -> Result<()> {
        if traj.len() != self.horizon {
            return Err(Error::DimensionMismatch(format!(
                "trajectory has {} steps, horizon is {}",
                traj.len(),
                self.horizon
            )));
        }
        for (h, step) in traj.steps.iter().enumerate() {
            if step.stage != h {
                return Err(Error::DimensionMismatch(format!(
                    "step {h} is labelled stage {}",
                    step.stage
                )));
            }
            self.check_step(h, step.state, step.action, step.next_state)?;
        }
        for step in &traj.steps {
            self.bump(step.stage, step.state, step.action, step.next_state);
        }
        self.episodes += 1;
        Ok(())
    }

    /// Records a single transition obtained from a generative model. Does not
    /// advance the episode count.
    pub fn record_transition(&mut self, h: usize, s: usize, a: usize, next: usize) -> Result<()> {
        self.check_step(h, s, a, next)?;
        self.bump(h, s, a, next);
        self.loose_transitions += 1;
        Ok(())
    }

    /// Count conservation: `sum_s' n3 = n` at every pair, and (for purely
    /// episodic data) `sum_{s,a} n_h = t` at every stage.
    pub fn check_invariants(&self) -> Result<()> {
        for pair in 0..self.visits.len() {
            let row: u64 = self.transitions[pair * self.states..(pair + 1) * self.states]
                .iter()
                .sum();
            if row != self.visits[pair] {
                return Err(Error::InvalidMdp(format!(
                    "pair {pair}: transition counts sum to {row}, visits are {}",
                    self.visits[pair]
                )));
            }
        }
        let width = self.states * self.actions;
        let total: u64 = self.visits.iter().sum();
        if total != self.episodes * self.horizon as u64 + self.loose_transitions {
            return Err(Error::InvalidMdp(format!(
                "total visits {total} inconsistent with counters"
            )));
        }
        if self.loose_transitions == 0 {
            for h in 0..self.horizon {
                let stage: u64 = self.visits[h * width..(h + 1) * width].iter().sum();
                if stage != self.episodes {
                    return Err(Error::InvalidMdp(format!(
                        "stage {h} has {stage} visits after {} episodes",
                        self.episodes
                    )));
                }
            }
        }
        Ok(())
    }

    /// `p_hat = n3 / n` where visited, uniform `1/S` otherwise.
    pub fn empirical_kernel(&self) -> TransitionKernel {
        let uniform = 1.0 / self.states as f64;
        TransitionKernel::from_rows_unchecked(
            self.horizon,
            self.states,
            self.actions,
            |h, s, a, row| {
                let n = self.count(h, s, a);
                if n == 0 {
                    row.fill(uniform);
                } else {
                    let n = n as f64;
                    for (p, &c) in row.iter_mut().zip(self.next_counts(h, s, a)) {
                        *p = c as f64 / n;
                    }
                }
            },
        )
    }

    /// `n_h(s,a)` as a stage table, handy for comparisons against occupancies.
    pub fn visit_table(&self) -> StageTable {
        StageTable::from_fn(self.horizon, self.states, self.actions, |h, s, a| {
            self.count(h, s, a) as f64
        })
    }

    /// Least-visited `(h, s, a)`, lowest index on ties.
    pub fn least_visited(&self) -> (usize, usize, usize) {
        let mut best = 0;
        for (i, &n) in self.visits.iter().enumerate() {
            if n < self.visits[best] {
                best = i;
            }
        }
        let h = best / (self.states * self.actions);
        let rest = best % (self.states * self.actions);
        (h, rest / self.actions, rest % self.actions)
    }

    pub fn to_dump(&self) -> CountsDump {
        let (hh, ss, aa) = (self.horizon, self.states, self.actions);
        CountsDump {
            t: self.episodes,
            n: (0..hh)
                .map(|h| {
                    (0..ss)
                        .map(|s| (0..aa).map(|a| self.count(h, s, a)).collect())
                        .collect()
                })
                .collect(),
            n3: (0..hh)
                .map(|h| {
                    (0..ss)
                        .map(|s| {
                            (0..aa)
                                .map(|a| self.next_counts(h, s, a).to_vec())
                                .collect()
                        })
                        .collect()
                })
                .collect(),
        }
    }

    /// Rebuilds a model from a dump. Episodic bookkeeping is inferred from the
    /// per-stage totals.
    pub fn from_dump(dump: &CountsDump) -> Result<Self> {
        let hh = dump.n.len();
        let ss = dump.n.first().map_or(0, Vec::len);
        let aa = dump.n.first().and_then(|x| x.first()).map_or(0, Vec::len);
        if hh == 0 || ss == 0 || aa == 0 || dump.n3.len() != hh {
            return Err(Error::DimensionMismatch(
                "empty or ragged counts dump".into(),
            ));
        }
        let mut model = EmpiricalModel::new(hh, ss, aa);
        for h in 0..hh {
            if dump.n[h].len() != ss || dump.n3[h].len() != ss {
                return Err(Error::DimensionMismatch("ragged counts dump".into()));
            }
            for s in 0..ss {
                if dump.n[h][s].len() != aa || dump.n3[h][s].len() != aa {
                    return Err(Error::DimensionMismatch("ragged counts dump".into()));
                }
                for a in 0..aa {
                    let row = &dump.n3[h][s][a];
                    if row.len() != ss {
                        return Err(Error::DimensionMismatch("ragged counts dump".into()));
                    }
                    let pair = model.pair(h, s, a);
                    model.visits[pair] = dump.n[h][s][a];
                    if dump.n[h][s][a] > 0 {
                        model.visited_pairs += 1;
                    }
                    model.transitions[pair * ss..(pair + 1) * ss].copy_from_slice(row);
                }
            }
        }
        model.episodes = dump.t;
        let total: u64 = model.visits.iter().sum();
        model.loose_transitions = total.saturating_sub(dump.t * hh as u64);
        model.check_invariants()?;
        Ok(model)
    }

    pub fn save_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string(&self.to_dump())?;
        fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn load_json(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_dump(&serde_json::from_str(&text)?)
    }
}

/// JSON layout of a counts dump: `n` is `[H][S][A]`, `n3` is `[H][S][A][S]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountsDump {
    pub t: u64,
    pub n: Vec<Vec<Vec<u64>>>,
    pub n3: Vec<Vec<Vec<Vec<u64>>>>,
}
