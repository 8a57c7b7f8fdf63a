use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{job_cost, Instance, JobId, Schedule, WorkerId, EPS};
use crate::error::Result;

/// The six feasibility constraints of a schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Constraint {
    /// (a) a worker serves at most one job per slot.
    WorkerOverlap,
    /// (b) a job has at most one worker per slot. Holds by representation.
    JobOverlap,
    /// (c) a worker serves a given job at most once.
    RepeatedWorker,
    /// (d) workers are only scheduled on slots where they are available.
    Unavailable,
    /// (e) jobs are not worked on before their release.
    BeforeRelease,
    /// (f) job cost stays within budget.
    OverBudget,
}

impl Constraint {
    pub fn letter(self) -> char {
        match self {
            Constraint::WorkerOverlap => 'a',
            Constraint::JobOverlap => 'b',
            Constraint::RepeatedWorker => 'c',
            Constraint::Unavailable => 'd',
            Constraint::BeforeRelease => 'e',
            Constraint::OverBudget => 'f',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub constraint: Constraint,
    pub jobs: Vec<JobId>,
    pub worker: Option<WorkerId>,
    pub slot: Option<usize>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) {}", self.constraint.letter(), self.message)
    }
}

/// Lists every breached constraint of `schedule`; empty iff feasible.
///
/// One violation is reported per (constraint, witness) pair, so a worker
/// double booked on three jobs in one slot yields a single (a) violation
/// naming all three jobs.
pub fn validate(instance: &Instance, schedule: &Schedule) -> Result<Vec<Violation>> {
    schedule.check_shape(instance)?;
    let mut out = Vec::new();

    for d in 0..instance.t {
        let mut by_worker: HashMap<WorkerId, Vec<JobId>> = HashMap::new();
        for (j, row) in schedule.assignments.iter().enumerate() {
            if let Some(w) = row[d] {
                by_worker.entry(w).or_default().push(j);
            }
        }
        let mut clashes: Vec<_> = by_worker.into_iter().filter(|(_, js)| js.len() > 1).collect();
        clashes.sort();
        for (w, jobs) in clashes {
            out.push(Violation {
                constraint: Constraint::WorkerOverlap,
                message: format!("worker {w} assigned to jobs {jobs:?} in slot {d}"),
                jobs,
                worker: Some(w),
                slot: Some(d),
            });
        }
    }

    for (j, job) in instance.jobs.iter().enumerate() {
        let row = &schedule.assignments[j];

        let mut seen: HashMap<WorkerId, usize> = HashMap::new();
        for (d, w) in row.iter().enumerate() {
            let Some(w) = *w else { continue };
            if let Some(&first) = seen.get(&w) {
                out.push(Violation {
                    constraint: Constraint::RepeatedWorker,
                    jobs: vec![j],
                    worker: Some(w),
                    slot: Some(d),
                    message: format!("worker {w} assigned to job {j} in slots {first} and {d}"),
                });
            } else {
                seen.insert(w, d);
            }
            if !instance.workers[w].is_available(d) {
                out.push(Violation {
                    constraint: Constraint::Unavailable,
                    jobs: vec![j],
                    worker: Some(w),
                    slot: Some(d),
                    message: format!("worker {w} is not available in slot {d}"),
                });
            }
            if d < job.release {
                out.push(Violation {
                    constraint: Constraint::BeforeRelease,
                    jobs: vec![j],
                    worker: Some(w),
                    slot: Some(d),
                    message: format!("job {j} worked on in slot {d} before its release {}", job.release),
                });
            }
        }

        let cost = job_cost(instance, schedule, j)?;
        if cost > job.cost_threshold + EPS {
            out.push(Violation {
                constraint: Constraint::OverBudget,
                jobs: vec![j],
                worker: None,
                slot: None,
                message: format!("job {j} costs {cost} above its budget {}", job.cost_threshold),
            });
        }
    }
    Ok(out)
}
