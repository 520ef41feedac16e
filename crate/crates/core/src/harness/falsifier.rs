//! Monte-Carlo check of the concentration events along RF-Express runs.

use rayon::prelude::*;

use crate::concentration::{event_cnt_holds, event_e_holds, wilson_interval, Thresholds, Z_99};
use crate::empirical::EmpiricalModel;
use crate::error::Result;
use crate::harness::audit::PseudoCounts;
use crate::mdp::TabularMdp;
use crate::rf_express::{RewardFreeExplorer, RewardFreeRule};

/// Outcome of one exploration run, each flag covering every episode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunEvents {
    pub e_held: bool,
    pub cnt_held: bool,
    /// Pairs (summed over checks) where the count/pseudo-count comparison
    /// failed while E^cnt held.
    pub pseudo_count_violations: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventFrequencies {
    pub runs: u64,
    pub e_held: u64,
    pub cnt_held: u64,
    pub pseudo_count_violations: u64,
}

impl EventFrequencies {
    pub fn e_rate(&self) -> f64 {
        self.e_held as f64 / self.runs as f64
    }

    pub fn cnt_rate(&self) -> f64 {
        self.cnt_held as f64 / self.runs as f64
    }

    /// 99% Wilson upper edge of the violation frequency of E.
    pub fn e_violation_upper(&self) -> f64 {
        wilson_interval(self.runs - self.e_held, self.runs, Z_99).1
    }

    pub fn cnt_violation_upper(&self) -> f64 {
        wilson_interval(self.runs - self.cnt_held, self.runs, Z_99).1
    }
}

/// `min(beta(n)/n, 1) <= 4 beta(pseudo)/max(pseudo, 1)` at every pair;
/// returns the number of pairs where it fails.
pub fn count_pseudo_count_violations(
    model: &EmpiricalModel,
    pseudo: &PseudoCounts,
    th: &Thresholds,
) -> u64 {
    let table = pseudo.table();
    let mut violations = 0;
    for h in 0..model.horizon() {
        for s in 0..model.num_states() {
            for a in 0..model.num_actions() {
                let lhs = th.beta_ratio(model.count(h, s, a)).min(1.0);
                let nbar = table.get(h, s, a);
                let rhs = 4.0 * th.beta_at(nbar) / nbar.max(1.0);
                if lhs > rhs {
                    violations += 1;
                }
            }
        }
    }
    violations
}

/// One RF-Express run (full bonuses) checking E and E^cnt before every
/// episode and after the last one.
pub fn track_events(mdp: &TabularMdp, delta: f64, episodes: u64, seed: u64) -> Result<RunEvents> {
    let mut explorer = RewardFreeExplorer::new(mdp, delta, 1.0, RewardFreeRule::RfExpress, seed)?;
    let th = *explorer.thresholds();
    let mut pseudo = PseudoCounts::new(mdp);
    let mut events = RunEvents {
        e_held: true,
        cnt_held: true,
        pseudo_count_violations: 0,
    };
    for t in 0..=episodes {
        let model = explorer.model();
        events.e_held &= event_e_holds(model, mdp, &th);
        let cnt = event_cnt_holds(model, pseudo.table(), &th);
        events.cnt_held &= cnt;
        if cnt {
            events.pseudo_count_violations += count_pseudo_count_violations(model, &pseudo, &th);
        }
        if t == episodes {
            break;
        }
        pseudo.add_policy(mdp, explorer.policy());
        explorer.explore()?;
        explorer.refresh();
    }
    Ok(events)
}

/// `runs` independent runs with seeds `base_seed..base_seed + runs`.
pub fn falsify_events(
    mdp: &TabularMdp,
    delta: f64,
    runs: u64,
    episodes: u64,
    base_seed: u64,
) -> Result<EventFrequencies> {
    let results: Vec<RunEvents> = (0..runs)
        .into_par_iter()
        .map(|i| track_events(mdp, delta, episodes, base_seed + i))
        .collect::<Result<_>>()?;
    Ok(EventFrequencies {
        runs,
        e_held: results.iter().filter(|r| r.e_held).count() as u64,
        cnt_held: results.iter().filter(|r| r.cnt_held).count() as u64,
        pseudo_count_violations: results.iter().map(|r| r.pseudo_count_violations).sum(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envs::make_double_chain;

    #[test]
    fn deterministic_chain_counts_equal_pseudo_counts() {
        let mdp = make_double_chain(3, 4, 0.0).unwrap();
        let mut explorer =
            RewardFreeExplorer::new(&mdp, 0.1, 1.0, RewardFreeRule::RfExpress, 0).unwrap();
        let mut pseudo = PseudoCounts::new(&mdp);
        for _ in 0..50 {
            pseudo.add_policy(&mdp, explorer.policy());
            explorer.explore().unwrap();
            explorer.refresh();
        }
        assert_eq!(&explorer.model().visit_table(), pseudo.table());
        let th = *explorer.thresholds();
        assert!(event_cnt_holds(explorer.model(), pseudo.table(), &th));
    }

    #[test]
    fn short_runs_keep_events() {
        let mdp = make_double_chain(3, 4, 0.1).unwrap();
        let freq = falsify_events(&mdp, 0.1, 8, 100, 0).unwrap();
        assert_eq!(freq.runs, 8);
        assert!(freq.e_rate() >= 0.9 && freq.cnt_rate() >= 0.9);
        assert_eq!(freq.pseudo_count_violations, 0);
    }
}
