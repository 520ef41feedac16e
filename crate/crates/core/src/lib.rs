//! Pure exploration in episodic tabular MDPs.
//!
//! Two sample-collection algorithms with certified stopping rules:
//!
//! * [`rf_express`]: reward-free exploration. After stopping, the empirical
//!   transition model yields an `epsilon`-optimal policy for *every* reward
//!   function with probability at least `1 - delta`.
//! * [`bpi_ucbvi`]: best-policy identification for a known reward, returning
//!   a single `epsilon`-optimal policy.
//!
//! [`envs`] builds benchmark MDPs, [`harness`] runs seeded experiments and
//! audits their outputs against exact dynamic programming.

pub mod bpi_ucbvi;
pub mod concentration;
pub mod empirical;
pub mod envs;
pub mod error;
pub mod harness;
pub mod mdp;
pub mod rf_express;

pub use bpi_ucbvi::{run_bpi_ucbvi, BpiConfig, BpiOutput};
pub use concentration::Thresholds;
pub use empirical::EmpiricalModel;
pub use envs::{make_double_chain, make_gridworld, make_random_mdp, EnvSpec};
pub use error::{Error, Result};
pub use mdp::{
    backward_induction, policy_evaluation, Policy, StageTable, StageValues, TabularMdp,
    TransitionKernel,
};
pub use rf_express::{run_reward_free, run_rf_express, RewardFreeRule, RfConfig, RfOutput};
