//! Schedulers behind a common entry point.
//!
//! The four randomized/greedy baselines and the daily matching scheduler are
//! online: [`run_scheduler`] drives them day by day and they only ever see a
//! [`DayView`]. The knapsack scheduler is offline and receives the whole
//! instance.

mod offline;
mod online;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result, TasError};
use crate::knapsack::DEFAULT_RESOLUTION;
use crate::model::{validate, Instance, Schedule};

pub use offline::run_tas_offline;
pub use online::{
    feasible_profit, run_online, step_online_greedy, step_random, step_random_egoistic, step_random_egoistic_filter,
    step_tas_online, ActiveJob, AvailableWorker, Commitment, DayView, OnlinePolicy,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    TasOnline,
    Random,
    RandomEgoistic,
    RandomEgoisticFilter,
    OnlineGreedy,
    TasOffline,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::Random,
        Algorithm::RandomEgoistic,
        Algorithm::RandomEgoisticFilter,
        Algorithm::OnlineGreedy,
        Algorithm::TasOnline,
        Algorithm::TasOffline,
    ];

    pub const ONLINE: [Algorithm; 5] = [
        Algorithm::Random,
        Algorithm::RandomEgoistic,
        Algorithm::RandomEgoisticFilter,
        Algorithm::OnlineGreedy,
        Algorithm::TasOnline,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::TasOnline => "tas_online",
            Algorithm::Random => "random",
            Algorithm::RandomEgoistic => "random_egoistic",
            Algorithm::RandomEgoisticFilter => "random_egoistic_filter",
            Algorithm::OnlineGreedy => "online_greedy",
            Algorithm::TasOffline => "tas_offline",
        }
    }

    pub fn is_online(self) -> bool {
        self != Algorithm::TasOffline
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = TasError;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL.into_iter().find(|a| a.name() == s).ok_or_else(|| invalid(format!("unknown algorithm '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SchedulerConfig {
    pub algorithm: Algorithm,
    pub seed: u64,
    /// Expertise screening fraction of the filtered egoistic baseline.
    pub factor: f64,
    /// Offline window length after the release; `None` means `t - 1`.
    pub lookahead: Option<usize>,
    /// Minimum free slots a worker needs in the offline window.
    pub minavail: usize,
    /// Cost grid step of the offline knapsack.
    pub resolution: f64,
}

impl Default for SchedulerConfig {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::TasOnline,
            seed: 0,
            factor: 0.3,
            lookahead: None,
            minavail: 1,
            resolution: DEFAULT_RESOLUTION,
        }
    }
}

impl SchedulerConfig {
    pub fn new(algorithm: Algorithm) -> Self {
        Self { algorithm, ..Self::default() }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.factor > 0.0 && self.factor < 1.0) {
            return Err(invalid(format!("factor must lie in (0, 1), got {}", self.factor)));
        }
        if self.minavail == 0 {
            return Err(invalid("minavail must be at least 1"));
        }
        if !(self.resolution.is_finite() && self.resolution > 0.0) {
            return Err(invalid("resolution must be positive"));
        }
        Ok(())
    }
}

/// Runs the configured scheduler and checks the result for feasibility.
pub fn run_scheduler(instance: &Instance, config: &SchedulerConfig) -> Result<Schedule> {
    config.validate()?;
    let schedule = match config.algorithm {
        Algorithm::TasOffline => run_tas_offline(instance, config)?,
        online => {
            let mut policy = online::policy_for(online, config)?;
            run_online(instance, policy.as_mut())?
        }
    };
    let violations = validate(instance, &schedule)?;
    if let Some(v) = violations.first() {
        return Err(TasError::Internal(format!("{} produced an infeasible schedule: {v}", config.algorithm)));
    }
    Ok(schedule)
}
