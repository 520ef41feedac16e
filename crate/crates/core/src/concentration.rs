//! Confidence thresholds, the categorical KL divergence, the Bernstein
//! transfer bound, and checks of the favourable concentration events on a
//! concrete run.
//!
//! The thresholds are
//!
//! ```text
//! beta(n)     = log(3SAH/delta) + S log(8e(n+1))
//! beta_star(n)= log(3SAH/delta) +   log(8e(n+1))
//! beta_cnt    = log(3SAH/delta)
//! ```
//!
//! and satisfy `1 <= beta_cnt <= beta_star(n) <= beta(n)` whenever
//! `delta <= 3SAH/e`.

use std::f64::consts::E;

use crate::empirical::EmpiricalModel;
use crate::error::{Error, Result};
use crate::mdp::{dot, next_value_variance, StageTable, StageValues, TabularMdp};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    states: usize,
    actions: usize,
    horizon: usize,
    delta: f64,
    log_term: f64,
}

impl Thresholds {
    pub fn new(states: usize, actions: usize, horizon: usize, delta: f64) -> Result<Self> {
        if states == 0 || actions == 0 || horizon == 0 {
            return Err(Error::InvalidConfig(format!(
                "S, A, H must be positive (got {states}, {actions}, {horizon})"
            )));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "delta must lie in (0, 1), got {delta}"
            )));
        }
        let log_term = (3.0 * (states * actions * horizon) as f64 / delta).ln();
        Ok(Thresholds {
            states,
            actions,
            horizon,
            delta,
            log_term,
        })
    }

    pub fn for_mdp(mdp: &TabularMdp, delta: f64) -> Result<Self> {
        Self::new(mdp.num_states(), mdp.num_actions(), mdp.horizon(), delta)
    }

    pub fn delta(&self) -> f64 {
        self.delta
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

    /// `beta(n)` for a real argument (pseudo-counts are not integers).
    pub fn beta_at(&self, n: f64) -> f64 {
        self.log_term + self.states as f64 * (8.0 * E * (n + 1.0)).ln()
    }

    pub fn beta_star_at(&self, n: f64) -> f64 {
        self.log_term + (8.0 * E * (n + 1.0)).ln()
    }

    pub fn beta(&self, n: u64) -> f64 {
        self.beta_at(n as f64)
    }

    pub fn beta_star(&self, n: u64) -> f64 {
        self.beta_star_at(n as f64)
    }

    pub fn beta_cnt(&self) -> f64 {
        self.log_term
    }

    /// `beta(n)/n`, `+inf` at `n = 0`.
    #[inline]
    pub fn beta_ratio(&self, n: u64) -> f64 {
        if n == 0 {
            f64::INFINITY
        } else {
            self.beta(n) / n as f64
        }
    }

    /// `beta_star(n)/n`, `+inf` at `n = 0`.
    #[inline]
    pub fn beta_star_ratio(&self, n: u64) -> f64 {
        if n == 0 {
            f64::INFINITY
        } else {
            self.beta_star(n) / n as f64
        }
    }
}

/// `KL(p, q) = sum_{k: p_k > 0} p_k log(p_k / q_k)`; `+inf` when `q` misses
/// part of the support of `p`.
pub fn kl_categorical(p: &[f64], q: &[f64]) -> f64 {
    assert_eq!(p.len(), q.len(), "KL arguments differ in length");
    let mut kl = 0.0;
    for (&pk, &qk) in p.iter().zip(q) {
        if pk > 0.0 {
            if qk <= 0.0 {
                return f64::INFINITY;
            }
            kl += pk * (pk / qk).ln();
        }
    }
    kl.max(0.0)
}

/// Bound on `|p f - q f|` when `KL(p, q) <= alpha` and `f` has range `b`:
/// `sqrt(2 Var_q(f) alpha) + 2 b alpha / 3`.
pub fn bernstein_transfer(var_q: f64, alpha: f64, b: f64) -> f64 {
    (2.0 * var_q * alpha).sqrt() + 2.0 / 3.0 * b * alpha
}

/// Event E at the current counts: `KL(p_hat, p) <= beta(n)/n` at every
/// visited `(h, s, a)`.
pub fn event_e_holds(model: &EmpiricalModel, mdp: &TabularMdp, th: &Thresholds) -> bool {
    check_dims(model, mdp);
    let ss = mdp.num_states();
    let mut phat = vec![0.0; ss];
    for h in 0..mdp.horizon() {
        for s in 0..ss {
            for a in 0..mdp.num_actions() {
                let n = model.count(h, s, a);
                if n == 0 {
                    continue;
                }
                for (p, &c) in phat.iter_mut().zip(model.next_counts(h, s, a)) {
                    *p = c as f64 / n as f64;
                }
                if kl_categorical(&phat, mdp.kernel().row(h, s, a)) > th.beta_ratio(n) {
                    return false;
                }
            }
        }
    }
    true
}

/// Event E^cnt at the current counts: `n >= pseudo/2 - beta_cnt` everywhere.
pub fn event_cnt_holds(
    model: &EmpiricalModel,
    pseudo_counts: &StageTable,
    th: &Thresholds,
) -> bool {
    for h in 0..model.horizon() {
        for s in 0..model.num_states() {
            for a in 0..model.num_actions() {
                let n = model.count(h, s, a) as f64;
                if n < 0.5 * pseudo_counts.get(h, s, a) - th.beta_cnt() {
                    return false;
                }
            }
        }
    }
    true
}

/// Event E* at the current counts, for the optimal values `vstar` of the
/// true MDP: `|(p_hat - p) V*_{h+1}| <= min(H, sqrt(2 Var_p(V*) b*/n) + 3H b*/n)`.
pub fn event_star_holds(
    model: &EmpiricalModel,
    mdp: &TabularMdp,
    vstar: &StageValues,
    th: &Thresholds,
) -> bool {
    check_dims(model, mdp);
    let ss = mdp.num_states();
    let horizon = mdp.horizon() as f64;
    let mut phat = vec![0.0; ss];
    for h in 0..mdp.horizon() {
        let v_next = vstar.stage(h + 1);
        for s in 0..ss {
            for a in 0..mdp.num_actions() {
                let n = model.count(h, s, a);
                if n == 0 {
                    continue;
                }
                for (p, &c) in phat.iter_mut().zip(model.next_counts(h, s, a)) {
                    *p = c as f64 / n as f64;
                }
                let row = mdp.kernel().row(h, s, a);
                let deviation = (dot(&phat, v_next) - dot(row, v_next)).abs();
                let ratio = th.beta_star_ratio(n);
                let bound = ((2.0 * next_value_variance(row, v_next) * ratio).sqrt()
                    + 3.0 * horizon * ratio)
                    .min(horizon);
                if deviation > bound {
                    return false;
                }
            }
        }
    }
    true
}

fn check_dims(model: &EmpiricalModel, mdp: &TabularMdp) {
    assert!(
        model.horizon() == mdp.horizon()
            && model.num_states() == mdp.num_states()
            && model.num_actions() == mdp.num_actions(),
        "model dimensions do not match the MDP"
    );
}

/// Wilson score interval for a binomial proportion at normal quantile `z`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = z * z;
    let centre = (phat + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n);
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Two-sided 99% normal quantile.
pub const Z_99: f64 = 2.575_829_303_548_901;
