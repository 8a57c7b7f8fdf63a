//! The task assignment and sequencing data model.
//!
//! An [`Instance`] holds a timeline of `t` slots, `num_domains` knowledge
//! domains, a pool of workers and a list of jobs. A [`Schedule`] stores, for
//! every job, one optional worker per slot. Worker and job ids are their
//! positions in the instance vectors.

mod metrics;
mod validate;

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result, TasError};

pub use metrics::{flow_time, metrics, MetricsReport};
pub use validate::{validate, Constraint, Violation};

pub type WorkerId = usize;
pub type JobId = usize;

/// Absolute tolerance for every threshold comparison on summed reals.
pub const EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DomainId(pub usize);

impl DomainId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Worker {
    pub expertise: Vec<f64>,
    pub wage: Vec<f64>,
    #[serde(with = "bitmap")]
    pub availability: Vec<bool>,
}

impl Worker {
    pub fn expertise_in(&self, domain: DomainId) -> f64 {
        self.expertise[domain.0]
    }

    pub fn wage_in(&self, domain: DomainId) -> f64 {
        self.wage[domain.0]
    }

    pub fn is_available(&self, slot: usize) -> bool {
        self.availability[slot]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Job {
    pub domain: DomainId,
    #[serde(rename = "quality")]
    pub quality_threshold: f64,
    #[serde(rename = "cost")]
    pub cost_threshold: f64,
    pub release: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawInstance")]
pub struct Instance {
    pub t: usize,
    pub num_domains: usize,
    pub workers: Vec<Worker>,
    pub jobs: Vec<Job>,
}

#[derive(Deserialize)]
struct RawInstance {
    t: usize,
    num_domains: usize,
    workers: Vec<Worker>,
    jobs: Vec<Job>,
}

impl TryFrom<RawInstance> for Instance {
    type Error = TasError;

    fn try_from(raw: RawInstance) -> Result<Self> {
        Instance::new(raw.t, raw.num_domains, raw.workers, raw.jobs)
    }
}

impl Instance {
    /// Builds an instance, checking every structural invariant.
    ///
    /// Expertise is only required to be finite and non-negative (not capped
    /// at 1) so that integer-valued hand examples can be expressed.
    pub fn new(t: usize, num_domains: usize, workers: Vec<Worker>, jobs: Vec<Job>) -> Result<Self> {
        if t == 0 {
            return Err(invalid("timeline length t must be at least 1"));
        }
        if num_domains == 0 {
            return Err(invalid("at least one knowledge domain is required"));
        }
        for (i, w) in workers.iter().enumerate() {
            if w.expertise.len() != num_domains || w.wage.len() != num_domains {
                return Err(invalid(format!("worker {i}: expertise/wage vectors must have length {num_domains}")));
            }
            if w.availability.len() != t {
                return Err(invalid(format!("worker {i}: availability must have length {t}")));
            }
            for k in 0..num_domains {
                let (e, c) = (w.expertise[k], w.wage[k]);
                if !e.is_finite() || e < 0.0 || !c.is_finite() || c < 0.0 {
                    return Err(invalid(format!(
                        "worker {i}, domain {k}: expertise and wage must be finite and non-negative"
                    )));
                }
                if e > 0.0 && c <= 0.0 {
                    return Err(invalid(format!(
                        "worker {i}, domain {k}: positive expertise requires a positive wage"
                    )));
                }
            }
        }
        for (j, job) in jobs.iter().enumerate() {
            if job.domain.0 >= num_domains {
                return Err(invalid(format!("job {j}: domain {} out of range", job.domain.0)));
            }
            if !(job.quality_threshold.is_finite() && job.quality_threshold > 0.0) {
                return Err(invalid(format!("job {j}: quality threshold must be positive")));
            }
            if !(job.cost_threshold.is_finite() && job.cost_threshold > 0.0) {
                return Err(invalid(format!("job {j}: cost threshold must be positive")));
            }
            if job.release >= t {
                return Err(invalid(format!("job {j}: release {} outside [0, {t})", job.release)));
            }
        }
        Ok(Self { t, num_domains, workers, jobs })
    }

    pub fn num_workers(&self) -> usize {
        self.workers.len()
    }

    pub fn num_jobs(&self) -> usize {
        self.jobs.len()
    }

    pub fn job(&self, job: JobId) -> Result<&Job> {
        self.jobs.get(job).ok_or_else(|| invalid(format!("unknown job id {job}")))
    }

    /// Expertise of `worker` in the domain of `job`.
    pub fn expertise(&self, worker: WorkerId, job: JobId) -> f64 {
        self.workers[worker].expertise_in(self.jobs[job].domain)
    }

    /// Wage of `worker` in the domain of `job`.
    pub fn wage(&self, worker: WorkerId, job: JobId) -> f64 {
        self.workers[worker].wage_in(self.jobs[job].domain)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }
}

/// Per job, one optional worker per timeslot.
///
/// A slot holds at most one worker, so "one worker per job per slot" holds by
/// construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub assignments: Vec<Vec<Option<WorkerId>>>,
}

impl Schedule {
    /// The all-empty schedule, which is always feasible.
    pub fn empty(num_jobs: usize, t: usize) -> Self {
        Self { assignments: vec![vec![None; t]; num_jobs] }
    }

    pub fn for_instance(instance: &Instance) -> Self {
        Self::empty(instance.num_jobs(), instance.t)
    }

    pub fn slots(&self, job: JobId) -> &[Option<WorkerId>] {
        &self.assignments[job]
    }

    pub fn assign(&mut self, job: JobId, slot: usize, worker: WorkerId) {
        self.assignments[job][slot] = Some(worker);
    }

    /// Workers assigned to `job`, in slot order.
    pub fn workers_of(&self, job: JobId) -> impl Iterator<Item = WorkerId> + '_ {
        self.assignments[job].iter().flatten().copied()
    }

    pub fn assignment_count(&self, job: JobId) -> usize {
        self.workers_of(job).count()
    }

    /// Checks that the schedule has the shape of `instance` and only
    /// references known workers.
    pub fn check_shape(&self, instance: &Instance) -> Result<()> {
        if self.assignments.len() != instance.num_jobs() {
            return Err(invalid(format!(
                "schedule has {} job vectors, instance has {} jobs",
                self.assignments.len(),
                instance.num_jobs()
            )));
        }
        for (j, row) in self.assignments.iter().enumerate() {
            if row.len() != instance.t {
                return Err(invalid(format!("job {j}: vector length {} does not match t = {}", row.len(), instance.t)));
            }
            if let Some(w) = row.iter().flatten().find(|&&w| w >= instance.num_workers()) {
                return Err(invalid(format!("job {j}: unknown worker id {w}")));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }
}

/// q_j: summed expertise of the workers assigned to `job`.
pub fn job_quality(instance: &Instance, schedule: &Schedule, job: JobId) -> Result<f64> {
    let domain = instance.job(job)?.domain;
    let slots =
        schedule.assignments.get(job).ok_or_else(|| invalid(format!("schedule has no vector for job {job}")))?;
    Ok(slots.iter().flatten().map(|&w| instance.workers[w].expertise_in(domain)).sum())
}

/// c_j: summed wage of the workers assigned to `job`.
pub fn job_cost(instance: &Instance, schedule: &Schedule, job: JobId) -> Result<f64> {
    let domain = instance.job(job)?.domain;
    let slots =
        schedule.assignments.get(job).ok_or_else(|| invalid(format!("schedule has no vector for job {job}")))?;
    Ok(slots.iter().flatten().map(|&w| instance.workers[w].wage_in(domain)).sum())
}

pub(crate) fn reaches(quality: f64, threshold: f64) -> bool {
    quality >= threshold - EPS
}

/// Number of jobs whose quality reaches their threshold.
pub fn objective(instance: &Instance, schedule: &Schedule) -> Result<usize> {
    schedule.check_shape(instance)?;
    let mut completed = 0;
    for (j, job) in instance.jobs.iter().enumerate() {
        if reaches(job_quality(instance, schedule, j)?, job.quality_threshold) {
            completed += 1;
        }
    }
    Ok(completed)
}

/// Serializes availability as a vector of 0/1 integers.
mod bitmap {
    use serde::de::Error;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(bits: &[bool], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(bits.iter().map(|&b| u8::from(b)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<bool>, D::Error> {
        Vec::<u8>::deserialize(d)?
            .into_iter()
            .map(|v| match v {
                0 => Ok(false),
                1 => Ok(true),
                other => Err(D::Error::custom(format!("availability entries must be 0 or 1, got {other}"))),
            })
            .collect()
    }
}

#[cfg(test)]
pub(crate) mod fixture {
    use super::*;

    /// Two same-domain jobs (Q, C) = (5, 5) and (4, 4), workers (e, w) =
    /// (2, 3), (3, 2), (2, 1) over three slots. Worker 0 is free on slot 2,
    /// worker 1 on slot 1, worker 2 on slots 0 and 2.
    pub fn instance() -> Instance {
        let worker = |e: f64, w: f64, avail: [bool; 3]| Worker {
            expertise: vec![e],
            wage: vec![w],
            availability: avail.to_vec(),
        };
        let job = |q: f64, c: f64| Job { domain: DomainId(0), quality_threshold: q, cost_threshold: c, release: 0 };
        Instance::new(
            3,
            1,
            vec![
                worker(2.0, 3.0, [false, false, true]),
                worker(3.0, 2.0, [false, true, false]),
                worker(2.0, 1.0, [true, false, true]),
            ],
            vec![job(5.0, 5.0), job(4.0, 4.0)],
        )
        .unwrap()
    }

    pub fn schedule(rows: &[[Option<WorkerId>; 3]]) -> Schedule {
        Schedule { assignments: rows.iter().map(|r| r.to_vec()).collect() }
    }

    /// U_0 = (-, i1, i2), U_1 = (i2, -, i0): completes both jobs.
    pub fn closing_schedule() -> Schedule {
        schedule(&[[None, Some(1), Some(2)], [Some(2), None, Some(0)]])
    }
}
