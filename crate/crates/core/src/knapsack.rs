//! Covering knapsack on a fixed-point cost grid.
//!
//! For scheduling, item costs are rounded up to multiples of `resolution` and
//! the budget is rounded down, so any packing reported feasible on the grid
//! also respects the real-valued budget. The upper bound rounds the other way
//! so that it never misses a job that is packable in real arithmetic.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result, TasError};
use crate::model::{Instance, WorkerId, EPS};

pub const DEFAULT_RESOLUTION: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PackItem {
    pub worker: WorkerId,
    /// Expertise contributed to the job.
    pub value: f64,
    /// Wage charged against the budget.
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Packing {
    /// Selected workers, ascending.
    pub workers: Vec<WorkerId>,
    pub total_value: f64,
    pub total_cost: f64,
}

impl Packing {
    fn from_items(mut chosen: Vec<&PackItem>) -> Self {
        chosen.sort_by_key(|i| i.worker);
        Self {
            workers: chosen.iter().map(|i| i.worker).collect(),
            total_value: chosen.iter().map(|i| i.value).sum(),
            total_cost: chosen.iter().map(|i| i.cost).sum(),
        }
    }
}

/// Size of the DP table used by one [`min_cost_cover`] call.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoverStats {
    pub rows: usize,
    pub budget_units: usize,
    pub cells: usize,
}

fn check_items(items: &[PackItem]) -> Result<()> {
    for it in items {
        if !(it.cost.is_finite() && it.cost > 0.0) {
            return Err(invalid(format!("item {}: cost must be positive", it.worker)));
        }
        if !(it.value.is_finite() && it.value >= 0.0) {
            return Err(invalid(format!("item {}: value must be finite and non-negative", it.worker)));
        }
    }
    Ok(())
}

/// How real costs are mapped onto the integer grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Rounding {
    /// Costs up, budget down: grid feasibility implies real feasibility.
    #[default]
    Conservative,
    /// Costs down, budget up: real feasibility implies grid feasibility.
    Optimistic,
}

impl Rounding {
    fn cost_units(self, cost: f64, resolution: f64) -> usize {
        match self {
            Rounding::Conservative => ((cost / resolution - EPS).ceil() as usize).max(1),
            Rounding::Optimistic => (cost / resolution + EPS).floor() as usize,
        }
    }

    fn budget_units(self, budget: f64, resolution: f64) -> usize {
        match self {
            Rounding::Conservative => (budget / resolution + EPS).floor() as usize,
            Rounding::Optimistic => (budget / resolution - EPS).ceil() as usize,
        }
    }
}

/// Cheapest subset whose value reaches `quality_threshold` within `budget`.
///
/// Among minimal-cost covers the one with the largest value wins, then the
/// lexicographically smallest worker set.
pub fn min_cost_cover(
    items: &[PackItem],
    quality_threshold: f64,
    budget: f64,
    resolution: f64,
) -> Result<Option<Packing>> {
    min_cost_cover_with_stats(items, quality_threshold, budget, resolution, Rounding::Conservative).map(|(p, _)| p)
}

/// [`min_cost_cover`] with an explicit grid rounding, also reporting the DP
/// table size.
pub fn min_cost_cover_with_stats(
    items: &[PackItem],
    quality_threshold: f64,
    budget: f64,
    resolution: f64,
    rounding: Rounding,
) -> Result<(Option<Packing>, CoverStats)> {
    if !(resolution.is_finite() && resolution > 0.0) {
        return Err(invalid("resolution must be positive"));
    }
    if !(budget.is_finite() && budget > 0.0) {
        return Err(invalid("budget must be positive"));
    }
    check_items(items)?;

    let mut sorted: Vec<&PackItem> = items.iter().collect();
    sorted.sort_by_key(|i| i.worker);
    let n = sorted.len();
    let cap = rounding.budget_units(budget, resolution);
    let width = cap + 1;
    let stats = CoverStats { rows: n + 1, budget_units: cap, cells: (n + 1) * width };

    if quality_threshold <= EPS {
        return Ok((Some(Packing::from_items(Vec::new())), stats));
    }

    let units: Vec<usize> = sorted.iter().map(|i| rounding.cost_units(i.cost, resolution)).collect();

    // best[i][b]: largest value from items i.. with at most b cost units.
    let mut best = vec![0.0f64; stats.cells];
    for i in (0..n).rev() {
        let (head, tail) = best.split_at_mut((i + 1) * width);
        let row = &mut head[i * width..];
        let next = &tail[..width];
        let (c, v) = (units[i], sorted[i].value);
        for b in 0..width {
            let skip = next[b];
            row[b] = if c <= b { skip.max(next[b - c] + v) } else { skip };
        }
    }

    let Some(b_min) = (0..width).find(|&b| best[b] >= quality_threshold - EPS) else {
        return Ok((None, stats));
    };

    // Forward reconstruction preferring the smallest worker ids.
    let target = best[b_min];
    let mut need = target;
    let mut rem = b_min;
    let mut chosen = Vec::new();
    for i in 0..n {
        let next = &best[(i + 1) * width..(i + 2) * width];
        let c = units[i];
        if c <= rem && sorted[i].value + next[rem - c] >= need - EPS {
            chosen.push(sorted[i]);
            need -= sorted[i].value;
            rem -= c;
        }
    }
    Ok((Some(Packing::from_items(chosen)), stats))
}

/// Exhaustive subset scan over at most 15 items on exact real costs.
pub fn brute_force_cover(items: &[PackItem], quality_threshold: f64, budget: f64) -> Result<Option<Packing>> {
    const LIMIT: usize = 15;
    if items.len() > LIMIT {
        return Err(TasError::Unsupported(format!(
            "brute force cover supports at most {LIMIT} items, got {}",
            items.len()
        )));
    }
    check_items(items)?;
    let mut sorted: Vec<&PackItem> = items.iter().collect();
    sorted.sort_by_key(|i| i.worker);

    let mut best: Option<(f64, f64, Vec<WorkerId>)> = None;
    for mask in 0u32..(1 << sorted.len()) {
        let chosen: Vec<&PackItem> = (0..sorted.len()).filter(|&k| mask >> k & 1 == 1).map(|k| sorted[k]).collect();
        let value: f64 = chosen.iter().map(|i| i.value).sum();
        let cost: f64 = chosen.iter().map(|i| i.cost).sum();
        if value < quality_threshold - EPS || cost > budget + EPS {
            continue;
        }
        let ids: Vec<WorkerId> = chosen.iter().map(|i| i.worker).collect();
        let better = match &best {
            None => true,
            Some((bc, bv, bids)) => {
                if (cost - bc).abs() > EPS {
                    cost < *bc
                } else if (value - bv).abs() > EPS {
                    value > *bv
                } else {
                    ids < *bids
                }
            }
        };
        if better {
            best = Some((cost, value, ids));
        }
    }
    Ok(best.map(|(_, _, ids)| {
        Packing::from_items(ids.iter().map(|id| *sorted.iter().find(|i| i.worker == *id).unwrap()).collect())
    }))
}

/// Knapsack items for `job` ignoring all other jobs: every worker with
/// positive expertise in the job's domain and some availability at or after
/// the release.
pub fn bound_items(instance: &Instance, job: usize) -> Vec<PackItem> {
    let j = &instance.jobs[job];
    instance
        .workers
        .iter()
        .enumerate()
        .filter(|(_, w)| w.expertise_in(j.domain) > 0.0 && w.availability[j.release..].iter().any(|&a| a))
        .map(|(id, w)| PackItem { worker: id, value: w.expertise_in(j.domain), cost: w.wage_in(j.domain) })
        .collect()
}

/// Number of jobs that are individually packable; no feasible schedule can
/// complete more.
pub fn upper_bound(instance: &Instance, resolution: f64) -> Result<usize> {
    if !(resolution.is_finite() && resolution > 0.0) {
        return Err(invalid("resolution must be positive"));
    }
    let packable: Result<Vec<bool>> = (0..instance.num_jobs())
        .into_par_iter()
        .map(|j| {
            let job = &instance.jobs[j];
            let items = bound_items(instance, j);
            let (packing, _) = min_cost_cover_with_stats(
                &items,
                job.quality_threshold,
                job.cost_threshold,
                resolution,
                Rounding::Optimistic,
            )?;
            Ok(packing.is_some())
        })
        .collect();
    Ok(packable?.into_iter().filter(|&ok| ok).count())
}
