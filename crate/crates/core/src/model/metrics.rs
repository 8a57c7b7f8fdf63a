use serde::{Deserialize, Serialize};

use super::{job_cost, job_quality, reaches, Instance, JobId, Schedule};
use crate::error::Result;

/// Objective plus the auxiliary comparison metrics. Every average is taken
/// over all jobs of the instance, completed or not.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub completed: usize,
    pub upper_bound: Option<usize>,
    pub pct_of_bound: Option<f64>,
    pub avg_workers: f64,
    pub avg_flow_time: f64,
    pub budget_pct: f64,
    pub quality_pct: f64,
    /// Jobs completed using only slots `0..=d`.
    pub per_day_completed: Vec<usize>,
    /// Mean of `100 * q_j / Q_j` over jobs released by day `d`, using only
    /// slots `0..=d`.
    pub per_day_avg_quality_pct: Vec<f64>,
}

/// Inclusive span from release to the last assigned slot; 0 when unassigned.
pub fn flow_time(instance: &Instance, schedule: &Schedule, job: JobId) -> Result<usize> {
    let release = instance.job(job)?.release;
    Ok(schedule.assignments[job].iter().rposition(Option::is_some).map_or(0, |last| last + 1 - release.min(last + 1)))
}

pub fn metrics(instance: &Instance, schedule: &Schedule, upper_bound: Option<usize>) -> Result<MetricsReport> {
    schedule.check_shape(instance)?;
    let n = instance.num_jobs();
    let t = instance.t;

    let mut completed = 0;
    let (mut workers, mut flow, mut budget, mut quality) = (0.0, 0.0, 0.0, 0.0);
    for (j, job) in instance.jobs.iter().enumerate() {
        let q = job_quality(instance, schedule, j)?;
        let c = job_cost(instance, schedule, j)?;
        if reaches(q, job.quality_threshold) {
            completed += 1;
        }
        workers += schedule.assignment_count(j) as f64;
        flow += flow_time(instance, schedule, j)? as f64;
        budget += 100.0 * c / job.cost_threshold;
        quality += 100.0 * q / job.quality_threshold;
    }
    let mean = |total: f64| if n == 0 { 0.0 } else { total / n as f64 };

    // Running quality per job over the slot prefix.
    let mut running = vec![0.0; n];
    let mut per_day_completed = Vec::with_capacity(t);
    let mut per_day_avg_quality_pct = Vec::with_capacity(t);
    for d in 0..t {
        let (mut done, mut released, mut pct) = (0, 0, 0.0);
        for (j, job) in instance.jobs.iter().enumerate() {
            if let Some(w) = schedule.assignments[j][d] {
                running[j] += instance.workers[w].expertise_in(job.domain);
            }
            if reaches(running[j], job.quality_threshold) {
                done += 1;
            }
            if job.release <= d {
                released += 1;
                pct += 100.0 * running[j] / job.quality_threshold;
            }
        }
        per_day_completed.push(done);
        per_day_avg_quality_pct.push(if released == 0 { 0.0 } else { pct / released as f64 });
    }

    let pct_of_bound = upper_bound.filter(|&b| b > 0).map(|b| 100.0 * completed as f64 / b as f64);
    Ok(MetricsReport {
        completed,
        upper_bound,
        pct_of_bound,
        avg_workers: mean(workers),
        avg_flow_time: mean(flow),
        budget_pct: mean(budget),
        quality_pct: mean(quality),
        per_day_completed,
        per_day_avg_quality_pct,
    })
}
