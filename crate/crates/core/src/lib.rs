//! Task assignment and sequencing (TAS) for expert crowdsourcing.
//!
//! Jobs with a quality threshold, a budget and a release slot are served by
//! workers with per-domain expertise and wages who are only available on some
//! slots. A schedule decides which worker contributes to which job and on
//! which slot; the objective counts jobs whose summed expertise reaches the
//! threshold.
//!
//! * [`model`]: instances, schedules, the feasibility validator and metrics.
//! * [`matching`]: exact maximum-weight bipartite matching.
//! * [`knapsack`]: min-cost covering knapsack and the per-job upper bound.
//! * [`algorithms`]: the daily matching scheduler, four online baselines and
//!   the clairvoyant knapsack scheduler.
//! * [`simgen`]: synthetic instances, the 3-dimensional matching reduction
//!   and exhaustive oracles.
//! * [`experiment`]: benchmark and sweep runners writing CSV results.

pub mod algorithms;
pub mod error;
pub mod experiment;
pub mod knapsack;
pub mod matching;
pub mod model;
pub mod simgen;

pub use error::{Result, TasError};
pub use model::{DomainId, Instance, Job, Schedule, Worker};
