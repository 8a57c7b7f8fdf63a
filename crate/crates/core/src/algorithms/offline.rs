use super::SchedulerConfig;
use crate::error::Result;
use crate::knapsack::{min_cost_cover, PackItem};
use crate::model::{Instance, Schedule};

/// Clairvoyant job-by-job scheduler.
///
/// Jobs are taken by release (ties by id). For each job the workers with
/// positive expertise and at least `minavail` free slots in
/// `[r_j, r_j + lookahead]` form the knapsack items; the cheapest packing
/// that reaches the threshold is placed worker by worker, highest expertise
/// first, each on its earliest slot at or after the release where both the
/// worker and the job are still free. Placed slots are consumed. A selected
/// worker without such a slot is dropped.
pub fn run_tas_offline(instance: &Instance, config: &SchedulerConfig) -> Result<Schedule> {
    config.validate()?;
    let t = instance.t;
    let lookahead = config.lookahead.unwrap_or(t - 1);

    let mut free: Vec<Vec<bool>> = instance.workers.iter().map(|w| w.availability.clone()).collect();
    let mut schedule = Schedule::for_instance(instance);

    let mut order: Vec<usize> = (0..instance.num_jobs()).collect();
    order.sort_by_key(|&j| (instance.jobs[j].release, j));

    for j in order {
        let job = &instance.jobs[j];
        let window = job.release..=(job.release.saturating_add(lookahead)).min(t - 1);

        let items: Vec<PackItem> = instance
            .workers
            .iter()
            .enumerate()
            .filter(|(i, w)| {
                w.expertise_in(job.domain) > 0.0
                    && free[*i][window.clone()].iter().filter(|&&f| f).count() >= config.minavail
            })
            .map(|(i, w)| PackItem { worker: i, value: w.expertise_in(job.domain), cost: w.wage_in(job.domain) })
            .collect();

        let Some(packing) = min_cost_cover(&items, job.quality_threshold, job.cost_threshold, config.resolution)?
        else {
            continue;
        };

        let mut selected = packing.workers;
        selected.sort_by(|&a, &b| {
            let (ea, eb) = (instance.expertise(a, j), instance.expertise(b, j));
            eb.total_cmp(&ea).then(a.cmp(&b))
        });
        for i in selected {
            let slot = (job.release..t).find(|&d| free[i][d] && schedule.assignments[j][d].is_none());
            if let Some(d) = slot {
                schedule.assign(j, d, i);
                free[i][d] = false;
            }
        }
    }
    Ok(schedule)
}
