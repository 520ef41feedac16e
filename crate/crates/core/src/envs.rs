//! Benchmark MDPs: a two-armed chain, a slippery gridworld and random
//! non-stationary MDPs for property tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mdp::{StageTable, TabularMdp, TransitionKernel};

/// Environment description as it appears in experiment configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnvSpec {
    DoubleChain {
        length: usize,
        horizon: usize,
        #[serde(default)]
        slip: f64,
    },
    Gridworld {
        width: usize,
        height: usize,
        horizon: usize,
        #[serde(default)]
        slip: f64,
    },
    Random {
        states: usize,
        actions: usize,
        horizon: usize,
        seed: u64,
    },
}

impl EnvSpec {
    pub fn build(&self) -> Result<TabularMdp> {
        match *self {
            EnvSpec::DoubleChain {
                length,
                horizon,
                slip,
            } => make_double_chain(length, horizon, slip),
            EnvSpec::Gridworld {
                width,
                height,
                horizon,
                slip,
            } => make_gridworld(width, height, horizon, slip),
            EnvSpec::Random {
                states,
                actions,
                horizon,
                seed,
            } => make_random_mdp(states, actions, horizon, seed),
        }
    }

    pub fn horizon(&self) -> usize {
        match *self {
            EnvSpec::DoubleChain { horizon, .. }
            | EnvSpec::Gridworld { horizon, .. }
            | EnvSpec::Random { horizon, .. } => horizon,
        }
    }
}

fn check_slip(slip: f64, upper: f64) -> Result<()> {
    if !(0.0..upper).contains(&slip) {
        return Err(Error::InvalidConfig(format!(
            "slip must lie in [0, {upper}), got {slip}"
        )));
    }
    Ok(())
}

fn check_horizon(horizon: usize) -> Result<()> {
    if horizon == 0 {
        return Err(Error::InvalidConfig("horizon must be positive".into()));
    }
    Ok(())
}

/// Start state plus two chains of `L - 1` states each; `S = 2L - 1`.
///
/// State 0 is the start, states `1..L` form chain A (action 0 advances) and
/// states `L..2L-1` form chain B (action 1 advances). The other action steps
/// back towards the start, the end of a chain absorbs forward moves, and with
/// probability `slip` any move is replaced by a backward step. Reward 1 is
/// collected at the far end of chain B at every stage.
pub fn make_double_chain(length: usize, horizon: usize, slip: f64) -> Result<TabularMdp> {
    if length < 2 {
        return Err(Error::InvalidConfig(format!(
            "chain length must be at least 2, got {length}"
        )));
    }
    check_horizon(horizon)?;
    check_slip(slip, 0.5)?;
    let states = 2 * length - 1;
    let last = length - 1;
    // (chain, position) with position 0 the start state
    let locate = |s: usize| -> (usize, usize) {
        match s {
            0 => (0, 0),
            s if s <= last => (0, s),
            s => (1, s - last),
        }
    };
    let index = |chain: usize, pos: usize| -> usize {
        match pos {
            0 => 0,
            p => 1 + chain * last + (p - 1),
        }
    };
    let kernel = TransitionKernel::from_rows_unchecked(horizon, states, 2, |_, s, a, row| {
        let (chain, pos) = locate(s);
        let backward = index(chain, pos.saturating_sub(1));
        let intended = if pos == 0 {
            index(a, 1)
        } else if a == chain {
            index(chain, (pos + 1).min(last))
        } else {
            backward
        };
        row[intended] += 1.0 - slip;
        row[backward] += slip;
    });
    let goal = index(1, last);
    let reward = StageTable::from_fn(
        horizon,
        states,
        2,
        |_, s, _| if s == goal { 1.0 } else { 0.0 },
    );
    TabularMdp::new(kernel, reward, 0)
}

/// `width x height` grid, actions N/E/S/W, moves into walls stay put, with
/// probability `slip` a uniformly random other direction is taken. Start at
/// the origin, reward 1 in the opposite corner.
pub fn make_gridworld(
    width: usize,
    height: usize,
    horizon: usize,
    slip: f64,
) -> Result<TabularMdp> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidConfig(
            "grid dimensions must be positive".into(),
        ));
    }
    check_horizon(horizon)?;
    check_slip(slip, 1.0)?;
    let states = width * height;
    let step = |s: usize, dir: usize| -> usize {
        let (x, y) = (s % width, s / width);
        let (x, y) = match dir {
            0 => (x, (y + 1).min(height - 1)),
            1 => ((x + 1).min(width - 1), y),
            2 => (x, y.saturating_sub(1)),
            _ => (x.saturating_sub(1), y),
        };
        y * width + x
    };
    let kernel = TransitionKernel::from_rows_unchecked(horizon, states, 4, |_, s, a, row| {
        row[step(s, a)] += 1.0 - slip;
        for other in (0..4).filter(|&d| d != a) {
            row[step(s, other)] += slip / 3.0;
        }
    });
    let goal = states - 1;
    let reward = StageTable::from_fn(
        horizon,
        states,
        4,
        |_, s, _| if s == goal { 1.0 } else { 0.0 },
    );
    TabularMdp::new(kernel, reward, 0)
}

/// Rows drawn from a flat Dirichlet (normalised exponentials), independently
/// per stage; rewards uniform in `[0, 1]`; start state 0.
pub fn make_random_mdp(
    states: usize,
    actions: usize,
    horizon: usize,
    seed: u64,
) -> Result<TabularMdp> {
    if states < 2 || actions == 0 {
        return Err(Error::InvalidConfig(format!(
            "random MDP needs S >= 2 and A >= 1 (got {states}, {actions})"
        )));
    }
    check_horizon(horizon)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut probs = Vec::with_capacity(horizon * states * actions * states);
    for _ in 0..horizon * states * actions {
        let draws: Vec<f64> = (0..states).map(|_| rng.sample::<f64, _>(Exp1)).collect();
        let total: f64 = draws.iter().sum();
        probs.extend(draws.iter().map(|x| x / total));
    }
    let kernel = TransitionKernel::new(horizon, states, actions, probs)?;
    let reward = StageTable::from_fn(horizon, states, actions, |_, _, _| rng.random::<f64>());
    TabularMdp::new(kernel, reward, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::backward_induction;

    fn row_sums_ok(mdp: &TabularMdp) -> bool {
        (0..mdp.horizon()).all(|h| {
            (0..mdp.num_states()).all(|s| {
                (0..mdp.num_actions())
                    .all(|a| (mdp.kernel().row(h, s, a).iter().sum::<f64>() - 1.0).abs() < 1e-12)
            })
        })
    }

    #[test]
    fn short_double_chain_value() {
        for horizon in 1..6 {
            let mdp = make_double_chain(2, horizon, 0.0).unwrap();
            assert_eq!(mdp.num_states(), 3);
            let v = backward_induction(&mdp, mdp.reward()).value_at_start(&mdp);
            assert_eq!(v, (horizon - 1) as f64);
        }
    }

    #[test]
    fn deterministic_chain_rows_are_one_hot() {
        let mdp = make_double_chain(4, 3, 0.0).unwrap();
        for p in mdp.kernel().probs() {
            assert!(*p == 0.0 || *p == 1.0);
        }
    }

    #[test]
    fn slippery_chain_rows_sum_to_one() {
        let mdp = make_double_chain(5, 4, 0.1).unwrap();
        assert_eq!(mdp.num_states(), 9);
        assert!(row_sums_ok(&mdp));
        assert!(make_double_chain(1, 4, 0.0).is_err());
        assert!(make_double_chain(3, 4, 0.5).is_err());
    }

    #[test]
    fn single_cell_grid_self_loops() {
        let mdp = make_gridworld(1, 1, 3, 0.2).unwrap();
        assert_eq!(mdp.num_states(), 1);
        assert!(mdp.kernel().probs().iter().all(|&p| p == 1.0));
    }

    #[test]
    fn small_grid_value() {
        for horizon in 1..7 {
            let mdp = make_gridworld(2, 2, horizon, 0.0).unwrap();
            let v = backward_induction(&mdp, mdp.reward()).value_at_start(&mdp);
            // two moves to reach the corner, then collect until the end
            assert_eq!(v, horizon.saturating_sub(2) as f64);
        }
        assert!(row_sums_ok(&make_gridworld(3, 4, 2, 0.3).unwrap()));
    }

    #[test]
    fn random_mdp_is_seeded_and_non_stationary() {
        let a = make_random_mdp(3, 2, 3, 5).unwrap();
        assert_eq!(a, make_random_mdp(3, 2, 3, 5).unwrap());
        assert_ne!(a, make_random_mdp(3, 2, 3, 6).unwrap());
        assert!(row_sums_ok(&a));
        let stage = |h: usize| a.kernel().probs()[h * 18..(h + 1) * 18].to_vec();
        let diff = stage(0)
            .iter()
            .zip(stage(1))
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        assert!(diff > 0.0);
    }

    #[test]
    fn env_spec_round_trips_through_json() {
        let spec = EnvSpec::DoubleChain {
            length: 3,
            horizon: 4,
            slip: 0.0,
        };
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(
            text,
            r#"{"kind":"double_chain","length":3,"horizon":4,"slip":0.0}"#
        );
        assert_eq!(serde_json::from_str::<EnvSpec>(&text).unwrap(), spec);
        let mdp = spec.build().unwrap();
        assert!(TabularMdp::from_json_str(&mdp.to_json_string().unwrap()).is_ok());
    }
}
