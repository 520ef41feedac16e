//! PAC audits against exact dynamic-programming oracles on the true MDP.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::empirical::EmpiricalModel;
use crate::error::Result;
use crate::mdp::{
    backward_induction, occupancy_measures, policy_evaluation, Policy, StageTable, TabularMdp,
    TransitionKernel,
};

/// Slack for floating-point round-off when comparing a gap to epsilon.
pub const AUDIT_TOL: f64 = 1e-10;

/// Number of seeded uniform-random rewards in the audit family.
pub const RANDOM_AUDIT_REWARDS: usize = 10;

#[derive(Debug, Clone)]
pub struct RewardCase {
    pub label: String,
    pub reward: StageTable,
}

/// Canonical reward, `count` seeded uniform tables, and an indicator on the
/// least-visited `(h, s, a)` of `model`.
pub fn audit_reward_family(
    mdp: &TabularMdp,
    model: &EmpiricalModel,
    seed: u64,
    count: usize,
) -> Vec<RewardCase> {
    let (hh, ss, aa) = (mdp.horizon(), mdp.num_states(), mdp.num_actions());
    let mut family = Vec::with_capacity(count + 2);
    family.push(RewardCase {
        label: "canonical".into(),
        reward: mdp.reward().clone(),
    });
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_a0d1_7000_0000);
    for k in 0..count {
        family.push(RewardCase {
            label: format!("random_{k}"),
            reward: StageTable::from_fn(hh, ss, aa, |_, _, _| rng.random::<f64>()),
        });
    }
    let (h, s, a) = model.least_visited();
    let mut spike = StageTable::zeros(hh, ss, aa);
    spike.set(h, s, a, 1.0);
    family.push(RewardCase {
        label: format!("least_visited_{h}_{s}_{a}"),
        reward: spike,
    });
    family
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditVerdict {
    pub label: String,
    pub gap: f64,
    pub pass: bool,
}

/// For each reward: plan greedily in `(phat, r)`, evaluate that policy in the
/// true MDP and compare its suboptimality gap with `epsilon`.
pub fn pac_audit_rfe(
    phat: &TransitionKernel,
    mdp: &TabularMdp,
    rewards: &[RewardCase],
    epsilon: f64,
) -> Result<Vec<AuditVerdict>> {
    let planning = mdp.with_kernel(phat.clone())?;
    let s1 = mdp.initial_state();
    Ok(rewards
        .iter()
        .map(|case| {
            let planned = backward_induction(&planning, &case.reward).policy;
            let gap = policy_gap(mdp, &case.reward, &planned, s1);
            AuditVerdict {
                label: case.label.clone(),
                gap,
                pass: gap <= epsilon + AUDIT_TOL,
            }
        })
        .collect())
}

fn policy_gap(mdp: &TabularMdp, reward: &StageTable, pi: &Policy, s1: usize) -> f64 {
    let optimal = backward_induction(mdp, reward).v.get(0, s1);
    optimal - policy_evaluation(mdp, reward, pi).get(0, s1)
}

/// `V*_1(s_1) - V^pi_1(s_1)` under the MDP's own reward.
pub fn bpi_gap(mdp: &TabularMdp, pi: &Policy) -> f64 {
    policy_gap(mdp, mdp.reward(), pi, mdp.initial_state())
}

pub fn pac_audit_bpi(mdp: &TabularMdp, pihat: &Policy, epsilon: f64) -> AuditVerdict {
    let gap = bpi_gap(mdp, pihat);
    AuditVerdict {
        label: "canonical".into(),
        gap,
        pass: gap <= epsilon + AUDIT_TOL,
    }
}

/// Running sum of occupancy measures of the executed policies.
#[derive(Debug, Clone)]
pub struct PseudoCounts {
    table: StageTable,
}

impl PseudoCounts {
    pub fn new(mdp: &TabularMdp) -> Self {
        PseudoCounts {
            table: StageTable::zeros(mdp.horizon(), mdp.num_states(), mdp.num_actions()),
        }
    }

    pub fn add_policy(&mut self, mdp: &TabularMdp, pi: &Policy) {
        self.table.accumulate(&occupancy_measures(mdp, pi));
    }

    pub fn table(&self) -> &StageTable {
        &self.table
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envs::make_random_mdp;

    #[test]
    fn exact_kernel_passes_with_zero_gaps() {
        let mdp = make_random_mdp(3, 2, 3, 2).unwrap();
        let model = EmpiricalModel::new(3, 3, 2);
        let family = audit_reward_family(&mdp, &model, 1, RANDOM_AUDIT_REWARDS);
        assert_eq!(family.len(), RANDOM_AUDIT_REWARDS + 2);
        let verdicts = pac_audit_rfe(mdp.kernel(), &mdp, &family, 1e-9).unwrap();
        assert!(verdicts.iter().all(|v| v.pass && v.gap.abs() < 1e-12));
    }

    #[test]
    fn zero_reward_has_zero_gap() {
        let mdp = make_random_mdp(3, 2, 3, 2).unwrap();
        let cases = vec![RewardCase {
            label: "zero".into(),
            reward: StageTable::zeros(3, 3, 2),
        }];
        let uniform = TransitionKernel::uniform(3, 3, 2);
        let verdicts = pac_audit_rfe(&uniform, &mdp, &cases, 0.0).unwrap();
        assert_eq!(verdicts[0].gap, 0.0);
        assert!(verdicts[0].pass);
    }

    #[test]
    fn family_is_seeded() {
        let mdp = make_random_mdp(3, 2, 3, 2).unwrap();
        let model = EmpiricalModel::new(3, 3, 2);
        let a = audit_reward_family(&mdp, &model, 4, 3);
        let b = audit_reward_family(&mdp, &model, 4, 3);
        assert!(a.iter().zip(&b).all(|(x, y)| x.reward == y.reward));
        assert_eq!(a.last().unwrap().label, "least_visited_0_0_0");
    }

    #[test]
    fn optimal_policy_has_zero_bpi_gap() {
        let mdp = make_random_mdp(4, 3, 3, 6).unwrap();
        let pi = backward_induction(&mdp, mdp.reward()).policy;
        assert!(bpi_gap(&mdp, &pi).abs() < 1e-12);
        assert!(pac_audit_bpi(&mdp, &pi, 0.0).pass);
    }
}
