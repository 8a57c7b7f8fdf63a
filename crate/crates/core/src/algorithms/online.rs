use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Algorithm, SchedulerConfig};
use crate::error::{invalid, Result, TasError};
use crate::matching::{max_weight_matching, Edge, WeightedBipartiteGraph};
use crate::model::{reaches, DomainId, Instance, JobId, Schedule, WorkerId, EPS};

/// A released, not yet completed job as seen on one day.
#[derive(Debug, Clone, PartialEq)]
pub struct ActiveJob {
    pub id: JobId,
    pub domain: DomainId,
    pub quality_threshold: f64,
    pub cost_threshold: f64,
    /// Quality accumulated on earlier days.
    pub quality: f64,
    /// Cost accumulated on earlier days.
    pub cost: f64,
    /// Workers already on this job, ascending.
    pub assigned: Vec<WorkerId>,
}

impl ActiveJob {
    pub fn has_worker(&self, worker: WorkerId) -> bool {
        self.assigned.binary_search(&worker).is_ok()
    }

    pub fn remaining_budget(&self) -> f64 {
        self.cost_threshold - self.cost
    }
}

/// A worker available on the viewed day. Expertise and wages are static
/// data; availability on other days is not exposed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AvailableWorker<'a> {
    pub id: WorkerId,
    pub expertise: &'a [f64],
    pub wage: &'a [f64],
}

/// Everything an online scheduler may know on day `day`: the active jobs
/// (released by `day`, not completed) and the workers available on `day`,
/// both sorted by id.
#[derive(Debug, Clone)]
pub struct DayView<'a> {
    pub day: usize,
    pub jobs: Vec<ActiveJob>,
    pub workers: Vec<AvailableWorker<'a>>,
}

impl<'a> DayView<'a> {
    fn build(instance: &'a Instance, schedule: &Schedule, quality: &[f64], cost: &[f64], day: usize) -> Self {
        let jobs = instance
            .jobs
            .iter()
            .enumerate()
            .filter(|(j, job)| job.release <= day && !reaches(quality[*j], job.quality_threshold))
            .map(|(j, job)| {
                let mut assigned: Vec<WorkerId> = schedule.workers_of(j).collect();
                assigned.sort_unstable();
                ActiveJob {
                    id: j,
                    domain: job.domain,
                    quality_threshold: job.quality_threshold,
                    cost_threshold: job.cost_threshold,
                    quality: quality[j],
                    cost: cost[j],
                    assigned,
                }
            })
            .collect();
        let workers = instance
            .workers
            .iter()
            .enumerate()
            .filter(|(_, w)| w.availability[day])
            .map(|(i, w)| AvailableWorker { id: i, expertise: &w.expertise, wage: &w.wage })
            .collect();
        Self { day, jobs, workers }
    }

    fn job_index(&self, id: JobId) -> Option<usize> {
        self.jobs.binary_search_by_key(&id, |j| j.id).ok()
    }

    fn worker_index(&self, id: WorkerId) -> Option<usize> {
        self.workers.binary_search_by_key(&id, |w| w.id).ok()
    }
}

/// Expertise per wage unit if `worker` may join `job` today: not already
/// on the job, positive expertise in its domain, and a wage that fits the
/// remaining budget.
pub fn feasible_profit(job: &ActiveJob, worker: &AvailableWorker) -> Option<f64> {
    let e = worker.expertise[job.domain.index()];
    let w = worker.wage[job.domain.index()];
    if job.has_worker(worker.id) || e <= 0.0 || w > job.remaining_budget() + EPS {
        return None;
    }
    Some(e / w)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Commitment {
    pub job: JobId,
    pub worker: WorkerId,
}

/// A scheduler that decides one day at a time.
pub trait OnlinePolicy {
    fn step(&mut self, view: &DayView<'_>) -> Result<Vec<Commitment>>;
}

/// Drives `policy` over the timeline. The policy only receives day views;
/// every commitment is checked before it is written into the schedule.
pub fn run_online(instance: &Instance, policy: &mut dyn OnlinePolicy) -> Result<Schedule> {
    let mut schedule = Schedule::for_instance(instance);
    let mut quality = vec![0.0; instance.num_jobs()];
    let mut cost = vec![0.0; instance.num_jobs()];

    for day in 0..instance.t {
        let view = DayView::build(instance, &schedule, &quality, &cost, day);
        let commitments = policy.step(&view)?;

        let mut job_used = vec![false; view.jobs.len()];
        let mut worker_used = vec![false; view.workers.len()];
        for c in commitments {
            let (Some(ji), Some(wi)) = (view.job_index(c.job), view.worker_index(c.worker)) else {
                return Err(TasError::Internal(format!(
                    "day {day}: commitment {c:?} names an inactive job or unavailable worker"
                )));
            };
            if job_used[ji] || worker_used[wi] {
                return Err(TasError::Internal(format!("day {day}: commitment {c:?} reuses a job or worker")));
            }
            if feasible_profit(&view.jobs[ji], &view.workers[wi]).is_none() {
                return Err(TasError::Internal(format!("day {day}: commitment {c:?} is not a feasible pair")));
            }
            job_used[ji] = true;
            worker_used[wi] = true;
            schedule.assign(c.job, day, c.worker);
            quality[c.job] += instance.expertise(c.worker, c.job);
            cost[c.job] += instance.wage(c.worker, c.job);
        }
    }
    Ok(schedule)
}

/// Daily maximum-profit matching between active jobs and available workers.
pub fn step_tas_online(view: &DayView<'_>) -> Vec<Commitment> {
    let mut edges = Vec::new();
    for (ji, job) in view.jobs.iter().enumerate() {
        for (wi, worker) in view.workers.iter().enumerate() {
            if let Some(profit) = feasible_profit(job, worker) {
                edges.push(Edge { left: ji, right: wi, weight: profit });
            }
        }
    }
    let graph = WeightedBipartiteGraph::new(view.jobs.len(), view.workers.len(), edges)
        .expect("feasible pairs form a well-formed graph");
    max_weight_matching(&graph)
        .pairs
        .into_iter()
        .map(|(ji, wi)| Commitment { job: view.jobs[ji].id, worker: view.workers[wi].id })
        .collect()
}

/// Visits the available workers in random order; each picks among the jobs
/// that are still feasible for it today.
fn visit_workers<R, F>(view: &DayView<'_>, rng: &mut R, screen: Option<f64>, mut pick: F) -> Vec<Commitment>
where
    R: Rng + ?Sized,
    F: FnMut(&AvailableWorker<'_>, &[usize], &[f64], &mut R) -> Option<usize>,
{
    let mut order: Vec<usize> = (0..view.workers.len()).collect();
    order.shuffle(rng);

    let mut open = vec![true; view.jobs.len()];
    let mut quality: Vec<f64> = view.jobs.iter().map(|j| j.quality).collect();
    let mut out = Vec::new();
    for wi in order {
        let worker = &view.workers[wi];
        let feasible: Vec<usize> = (0..view.jobs.len())
            .filter(|&ji| open[ji] && feasible_profit(&view.jobs[ji], worker).is_some())
            .filter(|&ji| {
                let job = &view.jobs[ji];
                screen.is_none_or(|f| worker.expertise[job.domain.index()] >= job.quality_threshold * f - EPS)
            })
            .collect();
        let Some(ji) = pick(worker, &feasible, &quality, rng) else { continue };
        let job = &view.jobs[ji];
        // One worker per job per day; completed jobs leave the active set.
        open[ji] = false;
        quality[ji] += worker.expertise[job.domain.index()];
        out.push(Commitment { job: job.id, worker: worker.id });
    }
    out
}

fn uniform<R: Rng + ?Sized>(candidates: &[usize], rng: &mut R) -> Option<usize> {
    (!candidates.is_empty()).then(|| candidates[rng.random_range(0..candidates.len())])
}

/// Domains ordered by decreasing wage of `worker`, ties by index.
fn domains_by_wage(worker: &AvailableWorker<'_>) -> Vec<usize> {
    let mut order: Vec<usize> = (0..worker.wage.len()).collect();
    order.sort_by(|&a, &b| worker.wage[b].total_cmp(&worker.wage[a]).then(a.cmp(&b)));
    order
}

fn egoistic_pick<R: Rng + ?Sized>(
    view: &DayView<'_>,
    worker: &AvailableWorker<'_>,
    feasible: &[usize],
    rng: &mut R,
) -> Option<usize> {
    for k in domains_by_wage(worker) {
        let in_domain: Vec<usize> = feasible.iter().copied().filter(|&ji| view.jobs[ji].domain.index() == k).collect();
        if !in_domain.is_empty() {
            return uniform(&in_domain, rng);
        }
    }
    None
}

/// Each worker takes a uniformly random feasible job.
pub fn step_random<R: Rng + ?Sized>(view: &DayView<'_>, rng: &mut R) -> Vec<Commitment> {
    visit_workers(view, rng, None, |_, feasible, _, rng| uniform(feasible, rng))
}

/// Each worker scans its domains from best to worst paid and takes a random
/// feasible job in the first domain that has one.
pub fn step_random_egoistic<R: Rng + ?Sized>(view: &DayView<'_>, rng: &mut R) -> Vec<Commitment> {
    visit_workers(view, rng, None, |w, feasible, _, rng| egoistic_pick(view, w, feasible, rng))
}

/// As [`step_random_egoistic`], but a worker is only offered jobs where its
/// expertise is at least `factor` times the job's quality threshold.
pub fn step_random_egoistic_filter<R: Rng + ?Sized>(
    view: &DayView<'_>,
    rng: &mut R,
    factor: f64,
) -> Result<Vec<Commitment>> {
    if !(factor > 0.0 && factor < 1.0) {
        return Err(invalid(format!("factor must lie in (0, 1), got {factor}")));
    }
    Ok(visit_workers(view, rng, Some(factor), |w, feasible, _, rng| egoistic_pick(view, w, feasible, rng)))
}

/// Each worker (random visiting order) takes the feasible job maximizing
/// its expertise minus the job's accumulated quality; ties go to the lowest
/// job id.
pub fn step_online_greedy<R: Rng + ?Sized>(view: &DayView<'_>, rng: &mut R) -> Vec<Commitment> {
    visit_workers(view, rng, None, |w, feasible, quality, _| {
        let mut best: Option<(usize, f64)> = None;
        for &ji in feasible {
            let margin = w.expertise[view.jobs[ji].domain.index()] - quality[ji];
            if best.is_none_or(|(_, m)| margin > m + EPS) {
                best = Some((ji, margin));
            }
        }
        best.map(|(ji, _)| ji)
    })
}

struct TasOnline;

impl OnlinePolicy for TasOnline {
    fn step(&mut self, view: &DayView<'_>) -> Result<Vec<Commitment>> {
        Ok(step_tas_online(view))
    }
}

struct Randomized {
    algorithm: Algorithm,
    factor: f64,
    rng: ChaCha8Rng,
}

impl OnlinePolicy for Randomized {
    fn step(&mut self, view: &DayView<'_>) -> Result<Vec<Commitment>> {
        let rng = &mut self.rng;
        Ok(match self.algorithm {
            Algorithm::Random => step_random(view, rng),
            Algorithm::RandomEgoistic => step_random_egoistic(view, rng),
            Algorithm::RandomEgoisticFilter => step_random_egoistic_filter(view, rng, self.factor)?,
            Algorithm::OnlineGreedy => step_online_greedy(view, rng),
            other => unreachable!("{other} is not a randomized policy"),
        })
    }
}

pub(super) fn policy_for(algorithm: Algorithm, config: &SchedulerConfig) -> Result<Box<dyn OnlinePolicy>> {
    Ok(match algorithm {
        Algorithm::TasOnline => Box::new(TasOnline),
        Algorithm::TasOffline => return Err(invalid("tas_offline is not an online policy")),
        other => Box::new(Randomized {
            algorithm: other,
            factor: config.factor,
            rng: ChaCha8Rng::seed_from_u64(config.seed),
        }),
    })
}
