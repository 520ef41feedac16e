//! Seeded multi-run experiments: configuration, execution, PAC audits and
//! CSV/JSON reporting.
//!
//! Output layout under the configured directory:
//!
//! ```text
//! config.json                  the experiment configuration
//! runs.csv                     one row per (epsilon, seed)
//! summary.json                 aggregates, verdicts and timings ("schema": 1)
//! diagnostics/e{i}_s{seed}.csv per-episode diagnostics
//! artifacts/e{i}_s{seed}.counts.json  final visit counts
//! artifacts/e{i}_s{seed}.policy.json  returned policy (best-policy runs)
//! ```
//!
//! Everything except the timing fields of `summary.json` is a deterministic
//! function of the configuration.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bpi_ucbvi::{run_bpi_ucbvi, BpiConfig, BpiDiagnostic};
use crate::empirical::EmpiricalModel;
use crate::envs::EnvSpec;
use crate::error::{Error, Result};
use crate::harness::audit::{
    audit_reward_family, pac_audit_bpi, pac_audit_rfe, AuditVerdict, RANDOM_AUDIT_REWARDS,
};
use crate::harness::bounds::{theoretical_bound_bpi, theoretical_bound_rf, BPI_BOUND_NOTE};
use crate::mdp::{Policy, TabularMdp};
use crate::rf_express::{
    run_reward_free, RewardFreeRule, RfConfig, RfDiagnostic, DEFAULT_DIAGNOSTICS_EVERY,
    DEFAULT_EPISODE_CAP,
};

pub const SCHEMA_VERSION: u32 = 1;
pub const RF_CSV_HEADER: &str = "t,stop_stat,max_w1,coverage";
pub const BPI_CSV_HEADER: &str = "t,g1_at_pi,uv1,lv1,coverage";
pub const RUNS_CSV_HEADER: &str =
    "epsilon,seed,tau,stopped,uncertified,final_stat,theory_bound,within_bound,pac_pass,max_gap";
/// Environment variable capping the worker pool.
pub const THREADS_ENV: &str = "PURE_EXPLORE_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    RfExpress,
    RfSqrtBaseline,
    BpiUcbvi,
    UniformBaseline,
    GenerativeBaseline,
}

impl Algorithm {
    fn reward_free_rule(self) -> Option<RewardFreeRule> {
        match self {
            Algorithm::RfExpress => Some(RewardFreeRule::RfExpress),
            Algorithm::RfSqrtBaseline => Some(RewardFreeRule::SqrtBonus),
            Algorithm::UniformBaseline => Some(RewardFreeRule::Uniform),
            Algorithm::GenerativeBaseline => Some(RewardFreeRule::Generative),
            Algorithm::BpiUcbvi => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::RfExpress => "rf_express",
            Algorithm::RfSqrtBaseline => "rf_sqrt_baseline",
            Algorithm::BpiUcbvi => "bpi_ucbvi",
            Algorithm::UniformBaseline => "uniform_baseline",
            Algorithm::GenerativeBaseline => "generative_baseline",
        }
    }
}

fn default_seeds() -> usize {
    1
}

fn default_cap() -> u64 {
    DEFAULT_EPISODE_CAP
}

fn default_scale() -> f64 {
    1.0
}

fn default_every() -> u64 {
    DEFAULT_DIAGNOSTICS_EVERY
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub env: EnvSpec,
    pub algorithm: Algorithm,
    pub epsilons: Vec<f64>,
    pub delta: f64,
    #[serde(default = "default_seeds")]
    pub num_seeds: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default = "default_cap")]
    pub episode_cap: u64,
    #[serde(default = "default_scale")]
    pub bonus_scale: f64,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default = "default_every")]
    pub diagnostics_every: u64,
}

impl ExperimentConfig {
    pub fn new(env: EnvSpec, algorithm: Algorithm, epsilons: Vec<f64>, delta: f64) -> Self {
        ExperimentConfig {
            env,
            algorithm,
            epsilons,
            delta,
            num_seeds: default_seeds(),
            base_seed: 0,
            episode_cap: default_cap(),
            bonus_scale: default_scale(),
            output_dir: None,
            diagnostics_every: default_every(),
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
        Ok(cfg)
    }

    /// Checks the configuration and builds the environment.
    pub fn validate(&self) -> Result<TabularMdp> {
        let mdp = self.env.build()?;
        let horizon = mdp.horizon() as f64;
        if self.epsilons.is_empty() {
            return Err(Error::InvalidConfig("epsilon list is empty".into()));
        }
        for &eps in &self.epsilons {
            if !(eps > 0.0 && eps <= horizon) {
                return Err(Error::InvalidConfig(format!(
                    "epsilon {eps} outside (0, H={horizon}]"
                )));
            }
        }
        if self.num_seeds == 0 {
            return Err(Error::InvalidConfig("num_seeds must be at least 1".into()));
        }
        if self.episode_cap == 0 {
            return Err(Error::InvalidConfig("episode_cap must be positive".into()));
        }
        crate::rf_express::validate_common(
            self.epsilons[0],
            self.delta,
            self.bonus_scale,
            self.diagnostics_every,
        )?;
        Ok(mdp)
    }

    pub fn seeds(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.num_seeds as u64).map(move |i| self.base_seed + i)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Diagnostics {
    RewardFree(Vec<RfDiagnostic>),
    BestPolicy(Vec<BpiDiagnostic>),
}

impl Diagnostics {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        match self {
            Diagnostics::RewardFree(rows) => {
                out.push_str(RF_CSV_HEADER);
                out.push('\n');
                for r in rows {
                    let _ = writeln!(
                        out,
                        "{},{},{},{}",
                        r.t,
                        fmt_f64(r.stop_stat),
                        fmt_f64(r.max_w1),
                        fmt_f64(r.coverage)
                    );
                }
            }
            Diagnostics::BestPolicy(rows) => {
                out.push_str(BPI_CSV_HEADER);
                out.push('\n');
                for r in rows {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{}",
                        r.t,
                        fmt_f64(r.g1_at_pi),
                        fmt_f64(r.uv1),
                        fmt_f64(r.lv1),
                        fmt_f64(r.coverage)
                    );
                }
            }
        }
        out
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone)]
pub struct RunRecord {
    pub epsilon_index: usize,
    pub epsilon: f64,
    pub seed: u64,
    pub tau: u64,
    pub stopped: bool,
    pub uncertified: bool,
    pub final_stat: f64,
    /// Worst-case stopping time; only for the two certified algorithms.
    pub theory_bound: Option<f64>,
    pub verdicts: Vec<AuditVerdict>,
    pub wall_ms: f64,
    pub diagnostics: Diagnostics,
    pub model: EmpiricalModel,
    pub policy: Option<Policy>,
}

impl RunRecord {
    pub fn pac_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn max_gap(&self) -> f64 {
        self.verdicts
            .iter()
            .map(|v| v.gap)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `Some(tau <= bound)` when a bound applies.
    pub fn within_bound(&self) -> Option<bool> {
        self.theory_bound.map(|b| self.tau as f64 <= b)
    }

    fn file_stem(&self) -> String {
        format!("e{}_s{}", self.epsilon_index, self.seed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsilonSummary {
    pub epsilon: f64,
    pub runs: usize,
    pub stopped_runs: usize,
    pub median_tau: f64,
    pub mean_tau: f64,
    pub failures: usize,
    pub failure_rate: f64,
    pub theory_bound: Option<f64>,
    pub all_within_bound: Option<bool>,
    pub max_gap: f64,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub config: ExperimentConfig,
    pub records: Vec<RunRecord>,
    pub summaries: Vec<EpsilonSummary>,
    pub notes: Vec<String>,
}

impl RunReport {
    pub fn any_cap_reached(&self) -> bool {
        self.records.iter().any(|r| !r.stopped)
    }

    pub fn summary_for(&self, epsilon: f64) -> Option<&EpsilonSummary> {
        self.summaries.iter().find(|s| s.epsilon == epsilon)
    }

    /// Violations of facts that the theory guarantees for certified runs:
    /// PAC failure rate at most delta and stopping times below the bound.
    pub fn guarantee_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.config.bonus_scale != 1.0 || !self.certified_algorithm() {
            return out;
        }
        for s in &self.summaries {
            if s.failure_rate > self.config.delta {
                out.push(format!(
                    "epsilon={}: PAC failure rate {} exceeds delta={}",
                    s.epsilon, s.failure_rate, self.config.delta
                ));
            }
            if s.all_within_bound == Some(false) {
                out.push(format!(
                    "epsilon={}: a stopping time exceeds the theoretical bound",
                    s.epsilon
                ));
            }
        }
        out
    }

    fn certified_algorithm(&self) -> bool {
        matches!(
            self.config.algorithm,
            Algorithm::RfExpress | Algorithm::BpiUcbvi
        )
    }

    pub fn runs_csv(&self) -> String {
        let mut out = String::from(RUNS_CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                fmt_f64(r.epsilon),
                r.seed,
                r.tau,
                r.stopped,
                r.uncertified,
                fmt_f64(r.final_stat),
                r.theory_bound.map(fmt_f64).unwrap_or_default(),
                r.within_bound().map(|b| b.to_string()).unwrap_or_default(),
                r.pac_pass(),
                fmt_f64(r.max_gap()),
            );
        }
        out
    }

    pub fn summary_json(&self) -> serde_json::Value {
        let runs: Vec<_> = self
            .records
            .iter()
            .map(|r| {
                serde_json::json!({
                    "epsilon": r.epsilon,
                    "epsilon_index": r.epsilon_index,
                    "seed": r.seed,
                    "tau": r.tau,
                    "stopped": r.stopped,
                    "uncertified": r.uncertified,
                    "final_stat": r.final_stat,
                    "theory_bound": r.theory_bound,
                    "pac_pass": r.pac_pass(),
                    "verdicts": r.verdicts,
                    "wall_ms": r.wall_ms,
                })
            })
            .collect();
        serde_json::json!({
            "schema": SCHEMA_VERSION,
            "algorithm": self.config.algorithm.name(),
            "env": self.config.env,
            "delta": self.config.delta,
            "bonus_scale": self.config.bonus_scale,
            "num_seeds": self.config.num_seeds,
            "summaries": self.summaries,
            "notes": self.notes,
            "runs": runs,
        })
    }

    /// Writes the full output layout into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        let diag_dir = dir.join("diagnostics");
        let art_dir = dir.join("artifacts");
        for d in [dir, &diag_dir, &art_dir] {
            fs::create_dir_all(d).map_err(|e| Error::io(d, e))?;
        }
        write_file(
            &dir.join("config.json"),
            &serde_json::to_string_pretty(&self.config)?,
        )?;
        write_file(&dir.join("runs.csv"), &self.runs_csv())?;
        write_file(
            &dir.join("summary.json"),
            &serde_json::to_string_pretty(&self.summary_json())?,
        )?;
        for r in &self.records {
            let stem = r.file_stem();
            write_file(
                &diag_dir.join(format!("{stem}.csv")),
                &r.diagnostics.to_csv(),
            )?;
            r.model
                .save_json(art_dir.join(format!("{stem}.counts.json")))?;
            if let Some(pi) = &r.policy {
                write_file(
                    &art_dir.join(format!("{stem}.policy.json")),
                    &serde_json::to_string(pi)?,
                )?;
            }
        }
        Ok(())
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

fn run_single(
    cfg: &ExperimentConfig,
    mdp: &TabularMdp,
    epsilon_index: usize,
    seed: u64,
) -> Result<RunRecord> {
    let epsilon = cfg.epsilons[epsilon_index];
    let (ss, aa, hh) = (mdp.num_states(), mdp.num_actions(), mdp.horizon());
    let start = Instant::now();
    let record = match cfg.algorithm.reward_free_rule() {
        Some(rule) => {
            let rf_cfg = RfConfig {
                epsilon,
                delta: cfg.delta,
                episode_cap: cfg.episode_cap,
                bonus_scale: if rule == RewardFreeRule::SqrtBonus {
                    1.0
                } else {
                    cfg.bonus_scale
                },
                seed,
                diagnostics_every: cfg.diagnostics_every,
            };
            let out = run_reward_free(mdp, &rf_cfg, rule)?;
            let family = audit_reward_family(mdp, &out.model, seed, RANDOM_AUDIT_REWARDS);
            let verdicts = pac_audit_rfe(&out.phat, mdp, &family, epsilon)?;
            RunRecord {
                epsilon_index,
                epsilon,
                seed,
                tau: out.tau,
                stopped: out.stopped,
                uncertified: out.uncertified,
                final_stat: out.final_stat,
                theory_bound: (rule == RewardFreeRule::RfExpress)
                    .then(|| theoretical_bound_rf(ss, aa, hh, epsilon, cfg.delta)),
                verdicts,
                wall_ms: 0.0,
                diagnostics: Diagnostics::RewardFree(out.diagnostics),
                model: out.model,
                policy: None,
            }
        }
        None => {
            let bpi_cfg = BpiConfig {
                epsilon,
                delta: cfg.delta,
                episode_cap: cfg.episode_cap,
                bonus_scale: cfg.bonus_scale,
                seed,
                diagnostics_every: cfg.diagnostics_every,
            };
            let out = run_bpi_ucbvi(mdp, &bpi_cfg)?;
            RunRecord {
                epsilon_index,
                epsilon,
                seed,
                tau: out.tau,
                stopped: out.stopped,
                uncertified: out.uncertified,
                final_stat: out.final_stat,
                theory_bound: Some(theoretical_bound_bpi(ss, aa, hh, epsilon, cfg.delta)),
                verdicts: vec![pac_audit_bpi(mdp, &out.pihat, epsilon)],
                wall_ms: 0.0,
                diagnostics: Diagnostics::BestPolicy(out.diagnostics),
                model: out.model,
                policy: Some(out.pihat),
            }
        }
    };
    Ok(RunRecord {
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
        ..record
    })
}

fn thread_count() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()?
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
}

fn summarize(cfg: &ExperimentConfig, records: &[RunRecord]) -> Vec<EpsilonSummary> {
    cfg.epsilons
        .iter()
        .enumerate()
        .map(|(i, &epsilon)| {
            let runs: Vec<&RunRecord> = records.iter().filter(|r| r.epsilon_index == i).collect();
            let mut taus: Vec<f64> = runs.iter().map(|r| r.tau as f64).collect();
            let mean_tau = taus.iter().sum::<f64>() / taus.len() as f64;
            let failures = runs.iter().filter(|r| !r.pac_pass()).count();
            let bounds: Vec<bool> = runs.iter().filter_map(|r| r.within_bound()).collect();
            EpsilonSummary {
                epsilon,
                runs: runs.len(),
                stopped_runs: runs.iter().filter(|r| r.stopped).count(),
                median_tau: median(&mut taus),
                mean_tau,
                failures,
                failure_rate: failures as f64 / runs.len() as f64,
                theory_bound: runs.first().and_then(|r| r.theory_bound),
                all_within_bound: (!bounds.is_empty()).then(|| bounds.iter().all(|&b| b)),
                max_gap: runs
                    .iter()
                    .map(|r| r.max_gap())
                    .fold(f64::NEG_INFINITY, f64::max),
            }
        })
        .collect()
}

/// Runs every `(epsilon, seed)` pair, audits each output and, when
/// `output_dir` is set, writes the report there.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunReport> {
    let mdp = cfg.validate()?;
    if let Some(dir) = &cfg.output_dir {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let jobs: Vec<(usize, u64)> = (0..cfg.epsilons.len())
        .flat_map(|i| cfg.seeds().map(move |seed| (i, seed)))
        .collect();
    let run_all = || -> Result<Vec<RunRecord>> {
        jobs.par_iter()
            .map(|&(i, seed)| run_single(cfg, &mdp, i, seed))
            .collect()
    };
    let mut records = match thread_count() {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?
            .install(run_all)?,
        None => run_all()?,
    };
    records.sort_by_key(|r| (r.epsilon_index, r.seed));

    let mut notes = Vec::new();
    if cfg.algorithm == Algorithm::BpiUcbvi {
        notes.push(BPI_BOUND_NOTE.to_string());
        let limit = 1.0 / (mdp.num_states() * mdp.num_states()) as f64;
        if cfg.epsilons.iter().any(|&e| e > limit) {
            notes.push(format!(
                "some epsilon exceeds 1/S^2 = {limit}; the bound's constants do not cover it"
            ));
        }
    }
    if cfg.bonus_scale != 1.0 && cfg.algorithm != Algorithm::RfSqrtBaseline {
        notes.push(format!(
            "bonus_scale = {}: runs are uncertified",
            cfg.bonus_scale
        ));
    }
    let report = RunReport {
        summaries: summarize(cfg, &records),
        config: cfg.clone(),
        records,
        notes,
    };
    if let Some(dir) = &cfg.output_dir {
        report.write(dir)?;
    }
    Ok(report)
}

/// `median tau(eps_small) / median tau(eps_large)`.
pub fn median_tau_ratio(report: &RunReport, eps_small: f64, eps_large: f64) -> Option<f64> {
    let small = report.summary_for(eps_small)?.median_tau;
    let large = report.summary_for(eps_large)?.median_tau;
    Some(small / large)
}

/// Outcome of re-auditing a saved run directory.
#[derive(Debug, Clone, PartialEq)]
pub struct ReauditReport {
    pub runs_checked: usize,
    pub failures: usize,
    /// Runs whose recomputed verdicts differ from the stored ones.
    pub mismatches: Vec<String>,
}

#[derive(Deserialize)]
struct StoredRun {
    epsilon: f64,
    epsilon_index: usize,
    seed: u64,
    verdicts: Vec<AuditVerdict>,
}

#[derive(Deserialize)]
struct StoredSummary {
    schema: u32,
    runs: Vec<StoredRun>,
}

/// Recomputes every PAC verdict from the saved counts/policies in `dir` and
/// compares with `summary.json`.
pub fn reaudit(dir: &Path) -> Result<ReauditReport> {
    let cfg = ExperimentConfig::load(dir.join("config.json"))?;
    let mdp = cfg.validate()?;
    let path = dir.join("summary.json");
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let summary: StoredSummary = serde_json::from_str(&text)?;
    if summary.schema != SCHEMA_VERSION {
        return Err(Error::InvalidConfig(format!(
            "unsupported summary schema {}",
            summary.schema
        )));
    }
    let mut report = ReauditReport {
        runs_checked: 0,
        failures: 0,
        mismatches: Vec::new(),
    };
    for run in &summary.runs {
        let stem = format!("e{}_s{}", run.epsilon_index, run.seed);
        let verdicts = if cfg.algorithm == Algorithm::BpiUcbvi {
            let p = dir.join("artifacts").join(format!("{stem}.policy.json"));
            let text = fs::read_to_string(&p).map_err(|e| Error::io(&p, e))?;
            let pi: Policy = serde_json::from_str(&text)?;
            pi.validate()?;
            vec![pac_audit_bpi(&mdp, &pi, run.epsilon)]
        } else {
            let model = EmpiricalModel::load_json(
                dir.join("artifacts").join(format!("{stem}.counts.json")),
            )?;
            let family = audit_reward_family(&mdp, &model, run.seed, RANDOM_AUDIT_REWARDS);
            pac_audit_rfe(&model.empirical_kernel(), &mdp, &family, run.epsilon)?
        };
        report.runs_checked += 1;
        if verdicts.iter().any(|v| !v.pass) {
            report.failures += 1;
        }
        if verdicts != run.verdicts {
            report.mismatches.push(stem);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain_cfg(algorithm: Algorithm, epsilons: Vec<f64>) -> ExperimentConfig {
        ExperimentConfig::new(
            EnvSpec::DoubleChain {
                length: 2,
                horizon: 2,
                slip: 0.0,
            },
            algorithm,
            epsilons,
            0.1,
        )
    }

    #[test]
    fn cap_reached_is_reported() {
        let mut cfg = chain_cfg(Algorithm::RfExpress, vec![0.1]);
        cfg.episode_cap = 10;
        let report = run_experiment(&cfg).unwrap();
        assert_eq!(report.records[0].tau, 10);
        assert!(report.any_cap_reached());
    }

    #[test]
    fn validation_errors() {
        let mut cfg = chain_cfg(Algorithm::RfExpress, vec![]);
        assert!(matches!(cfg.validate(), Err(Error::InvalidConfig(_))));
        cfg.epsilons = vec![3.0];
        assert!(cfg.validate().is_err());
        cfg.epsilons = vec![1.0];
        cfg.num_seeds = 0;
        assert!(cfg.validate().is_err());
        cfg.num_seeds = 1;
        cfg.delta = 1.5;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn config_json_defaults() {
        let text = r#"{"env":{"kind":"double_chain","length":3,"horizon":4},
            "algorithm":"bpi_ucbvi","epsilons":[0.5],"delta":0.1}"#;
        let cfg: ExperimentConfig = serde_json::from_str(text).unwrap();
        assert_eq!(cfg.num_seeds, 1);
        assert_eq!(cfg.episode_cap, DEFAULT_EPISODE_CAP);
        assert_eq!(cfg.bonus_scale, 1.0);
        assert!(serde_json::from_str::<ExperimentConfig>(
            &text.replace("0.1}", "0.1, \"bogus\": 1}")
        )
        .is_err());
    }

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn csv_formatting() {
        assert_eq!(fmt_f64(0.5), "5.0000000000000000e-1");
        let x = 0.1 + 0.2;
        assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        let d = Diagnostics::RewardFree(vec![RfDiagnostic {
            t: 3,
            stop_stat: 1.0,
            max_w1: 2.0,
            coverage: 0.25,
        }]);
        assert_eq!(
            d.to_csv(),
            "t,stop_stat,max_w1,coverage\n3,1.0000000000000000e0,2.0000000000000000e0,2.5000000000000000e-1\n"
        );
    }

    #[test]
    fn writes_and_reaudits() {
        let dir = tempfile::tempdir().unwrap();
        for algorithm in [Algorithm::RfExpress, Algorithm::BpiUcbvi] {
            let mut cfg = chain_cfg(algorithm, vec![1.0, 2.0]);
            cfg.bonus_scale = 0.01;
            cfg.num_seeds = 2;
            let out = dir.path().join(algorithm.name());
            cfg.output_dir = Some(out.clone());
            let report = run_experiment(&cfg).unwrap();
            assert_eq!(report.records.len(), 4);
            assert!(out.join("diagnostics/e1_s1.csv").exists());
            let re = reaudit(&out).unwrap();
            assert_eq!(re.runs_checked, 4);
            assert!(re.mismatches.is_empty(), "{:?}", re.mismatches);
        }
    }
}
