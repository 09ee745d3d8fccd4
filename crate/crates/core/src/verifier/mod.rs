//! Numerical checks of the difference value-distribution estimates over a
//! corpus, with finite surrogates for limits and exceptional sets.
//!
//! Every check is a pure function of its inputs and a per-task random
//! stream derived from `(seed, check_id, function_id)`, so reports are
//! reproducible and independent of scheduling.

mod infinite;
mod lemmas;
mod report;
mod second_main;
mod support;
mod vanishing;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::{Corpus, CorpusMember};
use crate::error::{invalid, NevError, Result};
use crate::nevanlinna::{RadiusGrid, DEFAULT_TOL};

pub use infinite::{
    check_characteristic_infinite, check_infinite_counting, check_infinite_proximity, check_log_order_counting,
};
pub use lemmas::check_lemmas;
pub use report::{summarize, CheckReport, Sample, Verdict, VerdictCounts, REPORT_SCHEMA};
pub use second_main::{check_reformulated_lld, check_smt_infinite, check_smt_vanishing};
pub use vanishing::{check_characteristic_shift, check_first_main, check_shifted_counting, check_vanishing_proximity};

/// Tolerated share of the grid's log measure on which a bound may fail.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExceptionalSetPolicy {
    pub max_log_measure_fraction: f64,
}

impl Default for ExceptionalSetPolicy {
    fn default() -> Self {
        ExceptionalSetPolicy {
            max_log_measure_fraction: 0.2,
        }
    }
}

/// Check ids in execution and report order.
pub const CHECK_IDS: [&str; 12] = [
    "check_first_main",
    "check_vanishing_proximity",
    "check_shifted_counting",
    "check_characteristic_shift",
    "check_infinite_proximity",
    "check_infinite_counting",
    "check_log_order_counting",
    "check_characteristic_infinite",
    "check_smt_vanishing",
    "check_smt_infinite",
    "check_reformulated_lld",
    "check_lemmas",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub tol: f64,
    pub grid: RadiusGrid,
    pub policy: ExceptionalSetPolicy,
    /// Empty means every check.
    pub check_filter: Vec<String>,
    pub output_path: Option<String>,
    /// Random samples per scalar lemma.
    pub lemma_samples: usize,
    /// Random circle points for the logarithmic-derivative lemma, per member.
    pub lemma_circle_points: usize,
    /// Fixed radii for the vanishing-step checks.
    pub vanishing_radii: Vec<f64>,
    /// Fixed radii for the vanishing-step second main inequalities.
    pub smt_radii: Vec<f64>,
    /// Window exponents for the infinite-step checks.
    pub betas: Vec<f64>,
    pub eps: f64,
    /// Random steps per radius in the shift checks.
    pub shift_samples: usize,
    /// Number of step halvings in the vanishing-step sequences.
    pub halvings: u32,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            tol: DEFAULT_TOL,
            grid: RadiusGrid::default(),
            policy: ExceptionalSetPolicy::default(),
            check_filter: Vec::new(),
            output_path: None,
            lemma_samples: 100_000,
            lemma_circle_points: 1000,
            vanishing_radii: vec![2.0, 5.0, 10.0],
            smt_radii: vec![4.0, 6.0],
            betas: vec![0.3, 0.5],
            eps: 0.1,
            shift_samples: 20,
            halvings: 12,
            threads: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return invalid(format!("tol must be positive, got {}", self.tol));
        }
        let frac = self.policy.max_log_measure_fraction;
        if !(0.0..1.0).contains(&frac) {
            return invalid(format!("max_log_measure_fraction must lie in [0, 1), got {frac}"));
        }
        self.grid.validate()?;
        if self.grid.r0 <= 1.0 {
            return invalid("grid must start beyond r = 1");
        }
        if let Some(r) = self.vanishing_radii.iter().chain(&self.smt_radii).find(|r| !(**r > 1.0 && r.is_finite())) {
            return invalid(format!("check radii must exceed 1, got {r}"));
        }
        if let Some(b) = self.betas.iter().find(|b| !(**b > 0.0 && **b < 1.0)) {
            return invalid(format!("betas must lie in (0, 1), got {b}"));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return invalid(format!("eps must lie in (0, 1), got {}", self.eps));
        }
        if self.threads == Some(0) {
            return invalid("threads must be positive");
        }
        self.selected_checks().map(|_| ())
    }

    /// Filter resolved against [`CHECK_IDS`], in canonical order.
    pub fn selected_checks(&self) -> Result<Vec<&'static str>> {
        if let Some(bad) = self.check_filter.iter().find(|id| !CHECK_IDS.contains(&id.as_str())) {
            return invalid(format!("unknown check id '{bad}'; valid ids: {}", CHECK_IDS.join(", ")));
        }
        Ok(CHECK_IDS
            .iter()
            .copied()
            .filter(|id| self.check_filter.is_empty() || self.check_filter.iter().any(|f| f == id))
            .collect())
    }
}

/// Deterministic random stream for one `(check, function)` task.
pub fn task_rng(seed: u64, check_id: &str, function_id: &str) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(check_id.as_bytes());
    h.update([0u8]);
    h.update(function_id.as_bytes());
    ChaCha8Rng::from_seed(h.finalize().into())
}

fn run_member_check(check_id: &str, member: &CorpusMember, config: &RunConfig) -> CheckReport {
    let id = member.id();
    let f = &member.model;
    let mut rng = task_rng(config.seed, check_id, id);
    let c = config;
    match check_id {
        "check_first_main" => check_first_main(id, f, &c.grid, c.tol),
        "check_vanishing_proximity" => check_vanishing_proximity(id, f, &c.vanishing_radii, c.halvings, &c.grid, c.tol),
        "check_shifted_counting" => check_shifted_counting(id, f, &c.vanishing_radii, c.shift_samples, &mut rng),
        "check_characteristic_shift" => {
            check_characteristic_shift(id, f, &c.vanishing_radii, c.shift_samples, c.tol, &mut rng)
        }
        "check_infinite_proximity" => check_infinite_proximity(id, f, &c.grid, &c.betas, c.eps, &c.policy, c.tol, &mut rng),
        "check_infinite_counting" => check_infinite_counting(id, f, &c.grid, &c.betas, c.eps, &c.policy, c.tol, &mut rng),
        "check_log_order_counting" => check_log_order_counting(id, f, &c.grid, &c.policy, c.tol, &mut rng),
        "check_characteristic_infinite" => {
            check_characteristic_infinite(id, f, &c.grid, &c.betas, c.eps, &c.policy, c.tol, &mut rng)
        }
        "check_smt_vanishing" => check_smt_vanishing(id, f, &c.smt_radii, c.halvings, c.tol, &mut rng),
        "check_smt_infinite" => check_smt_infinite(id, f, &c.grid, &c.betas, &c.policy, c.tol, &mut rng),
        "check_reformulated_lld" => check_reformulated_lld(id, f, &c.grid, c.eps, &c.policy, c.tol),
        other => unreachable!("not a per-member check: {other}"),
    }
}

enum Task<'a> {
    Member(&'static str, &'a CorpusMember),
    Lemmas,
}

/// Runs the selected checks over every corpus member. Reports come back in
/// canonical check order, then corpus order. An empty corpus yields no
/// reports.
pub fn run_all(corpus: &Corpus, config: &RunConfig) -> Result<Vec<CheckReport>> {
    config.validate()?;
    if corpus.is_empty() {
        return Ok(Vec::new());
    }
    let mut tasks = Vec::new();
    for id in config.selected_checks()? {
        if id == "check_lemmas" {
            tasks.push(Task::Lemmas);
        } else {
            tasks.extend(corpus.members().iter().map(|m| Task::Member(id, m)));
        }
    }
    let work = || -> Vec<CheckReport> {
        tasks
            .par_iter()
            .map(|t| match t {
                Task::Member(id, m) => vec![run_member_check(id, m, config)],
                Task::Lemmas => check_lemmas(corpus, config),
            })
            .collect::<Vec<_>>()
            .into_iter()
            .flatten()
            .collect()
    };
    match config.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| NevError::InvalidInput(format!("cannot build thread pool: {e}")))?;
            Ok(pool.install(work))
        }
        None => Ok(work()),
    }
}
