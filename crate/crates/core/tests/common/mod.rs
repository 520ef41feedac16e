//! Brute-force oracles shared by the integration tests. Everything here
//! enumerates trajectories or policies explicitly and never calls the
//! library's dynamic-programming routines.

#![allow(dead_code)]

use pure_explore::mdp::{Policy, StageTable, TabularMdp, TransitionKernel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Every deterministic policy, in lexicographic order of its action table.
pub fn all_policies(horizon: usize, states: usize, actions: usize) -> Vec<Policy> {
    let cells = horizon * states;
    let total = actions.pow(cells as u32);
    (0..total)
        .map(|mut code| {
            let table = (0..cells)
                .map(|_| {
                    let a = code % actions;
                    code /= actions;
                    a
                })
                .collect();
            Policy::new(horizon, states, actions, table).unwrap()
        })
        .collect()
}

/// Leaf of the trajectory tree: probability, return, and the visited
/// `(stage, state, action)` triples.
pub struct Path {
    pub prob: f64,
    pub ret: f64,
    pub visits: Vec<(usize, usize, usize)>,
}

/// All trajectories of `pi` from `(h0, s0)` to the end of the episode,
/// optionally forcing the first action.
pub fn enumerate_paths(
    mdp: &TabularMdp,
    reward: &StageTable,
    pi: &Policy,
    h0: usize,
    s0: usize,
    first_action: Option<usize>,
) -> Vec<Path> {
    let mut out = Vec::new();
    let mut stack = vec![(h0, s0, 1.0, 0.0, Vec::new())];
    while let Some((h, s, prob, ret, visits)) = stack.pop() {
        if h == mdp.horizon() {
            out.push(Path { prob, ret, visits });
            continue;
        }
        let a = match first_action {
            Some(a) if h == h0 => a,
            _ => pi.action(h, s),
        };
        let ret = ret + reward.get(h, s, a);
        for (next, &p) in mdp.kernel().row(h, s, a).iter().enumerate() {
            if p > 0.0 {
                let mut v = visits.clone();
                v.push((h, s, a));
                stack.push((h + 1, next, prob * p, ret, v));
            }
        }
    }
    out
}

pub fn brute_value(mdp: &TabularMdp, reward: &StageTable, pi: &Policy, h: usize, s: usize) -> f64 {
    enumerate_paths(mdp, reward, pi, h, s, None)
        .iter()
        .map(|p| p.prob * p.ret)
        .sum()
}

pub fn brute_q(
    mdp: &TabularMdp,
    reward: &StageTable,
    pi: &Policy,
    h: usize,
    s: usize,
    a: usize,
) -> f64 {
    enumerate_paths(mdp, reward, pi, h, s, Some(a))
        .iter()
        .map(|p| p.prob * p.ret)
        .sum()
}

/// Mean and second central moment of the return from the initial state.
pub fn brute_return_moments(mdp: &TabularMdp, reward: &StageTable, pi: &Policy) -> (f64, f64) {
    let paths = enumerate_paths(mdp, reward, pi, 0, mdp.initial_state(), None);
    let mean: f64 = paths.iter().map(|p| p.prob * p.ret).sum();
    let var = paths.iter().map(|p| p.prob * (p.ret - mean).powi(2)).sum();
    (mean, var)
}

pub fn brute_occupancy(mdp: &TabularMdp, pi: &Policy) -> StageTable {
    let zero = StageTable::zeros(mdp.horizon(), mdp.num_states(), mdp.num_actions());
    let mut occ = zero.clone();
    for path in enumerate_paths(mdp, &zero, pi, 0, mdp.initial_state(), None) {
        for &(h, s, a) in &path.visits {
            occ.set(h, s, a, occ.get(h, s, a) + path.prob);
        }
    }
    occ
}

/// `max_pi V^pi_h(s)` over all deterministic policies.
pub fn brute_optimal_value(
    mdp: &TabularMdp,
    reward: &StageTable,
    policies: &[Policy],
    h: usize,
    s: usize,
) -> f64 {
    policies
        .iter()
        .map(|pi| brute_value(mdp, reward, pi, h, s))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Random MDP for any `S >= 1`: normalised uniform rows, uniform rewards.
pub fn any_random_mdp(states: usize, actions: usize, horizon: usize, seed: u64) -> TabularMdp {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut probs = Vec::new();
    for _ in 0..horizon * states * actions {
        let row: Vec<f64> = (0..states).map(|_| rng.random::<f64>() + 1e-3).collect();
        let total: f64 = row.iter().sum();
        probs.extend(row.iter().map(|x| x / total));
    }
    let kernel = TransitionKernel::new(horizon, states, actions, probs).unwrap();
    let reward = StageTable::from_fn(horizon, states, actions, |_, _, _| rng.random::<f64>());
    let s1 = rng.random_range(0..states);
    TabularMdp::new(kernel, reward, s1).unwrap()
}

/// The small instance family: every `S <= 3`, `A <= 2`, `H <= 3`, each with
/// `seeds` random draws.
pub fn small_family(seeds: u64) -> Vec<TabularMdp> {
    let mut out = Vec::new();
    for states in 1..=3 {
        for actions in 1..=2 {
            for horizon in 1..=3 {
                for seed in 0..seeds {
                    let mix = seed * 1000 + (states * 100 + actions * 10 + horizon) as u64;
                    out.push(any_random_mdp(states, actions, horizon, mix));
                }
            }
        }
    }
    out
}
