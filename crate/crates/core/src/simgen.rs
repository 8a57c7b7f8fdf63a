//! Instance generators and exact oracles.
//!
//! [`generate`] builds the synthetic benchmark family, [`reduce_3dm`] maps a
//! 3-dimensional matching instance onto a scheduling instance, and
//! [`exhaustive_tas`] / [`brute_force_3dm`] solve small cases exactly.
//! [`scale_instance`] derives the scalability variants.

use std::collections::BTreeSet;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result, TasError};
use crate::model::{DomainId, Instance, Job, Schedule, Worker, WorkerId, EPS};

const MAX_RESAMPLES: usize = 10_000;

/// Parameters of the synthetic instance family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenParams {
    pub t: usize,
    pub num_domains: usize,
    pub num_workers: usize,
    pub num_jobs: usize,
    /// Mean number of available workers per day.
    pub lambda_workers: f64,
    /// Mean number of job releases per day.
    pub mu_jobs: f64,
    pub expertise_mean: f64,
    /// Standard deviation before truncation to (0, 1].
    pub expertise_spread: f64,
    pub wage_mean: f64,
    pub wage_spread: f64,
    pub quality_alpha: f64,
    pub quality_beta: f64,
    /// Job budget as a multiple of its quality threshold.
    pub cost_slope: f64,
    pub seed: u64,
}

impl Default for GenParams {
    fn default() -> Self {
        Self {
            t: 30,
            num_domains: 10,
            num_workers: 1000,
            num_jobs: 600,
            lambda_workers: 200.0,
            mu_jobs: 20.0,
            expertise_mean: 0.5,
            expertise_spread: 0.15,
            wage_mean: 0.5,
            wage_spread: 0.2,
            quality_alpha: 5.0,
            quality_beta: 1.0,
            cost_slope: 3.0,
            seed: 0,
        }
    }
}

impl GenParams {
    /// One tenth of the default family: 10 days, 5 domains, 100 workers, 60 jobs.
    pub fn desk_scale() -> Self {
        Self {
            t: 10,
            num_domains: 5,
            num_workers: 100,
            num_jobs: 60,
            lambda_workers: 20.0,
            mu_jobs: 6.0,
            ..Self::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.t == 0 || self.num_domains == 0 {
            return Err(invalid("t and num_domains must be at least 1"));
        }
        let rates = [("lambda_workers", self.lambda_workers), ("mu_jobs", self.mu_jobs)];
        for (name, v) in rates {
            if !(v.is_finite() && v >= 0.0) {
                return Err(invalid(format!("{name} must be finite and non-negative, got {v}")));
            }
        }
        let positive = [
            ("expertise_mean", self.expertise_mean),
            ("expertise_spread", self.expertise_spread),
            ("wage_mean", self.wage_mean),
            ("wage_spread", self.wage_spread),
            ("quality_alpha", self.quality_alpha),
            ("quality_beta", self.quality_beta),
            ("cost_slope", self.cost_slope),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(format!("{name} must be finite and positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// Samples an instance of the synthetic family. Pure in `params`.
///
/// Expertise and wages are normal draws resampled until they land in (0, 1].
/// Each day a Poisson(`lambda_workers`) sized set of distinct workers is
/// available. Jobs arrive Poisson(`mu_jobs`) per day in id order; whatever is
/// left when the horizon ends is released on the last day.
pub fn generate(params: &GenParams) -> Result<Instance> {
    params.validate()?;
    let expected = params.mu_jobs * params.t as f64;
    if params.num_jobs as f64 > 2.0 * expected {
        return Err(TasError::GenerationOverflow(format!(
            "num_jobs = {} exceeds twice the expected arrivals mu_jobs * t = {expected}",
            params.num_jobs
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let expertise = Normal::new(params.expertise_mean, params.expertise_spread).map_err(|e| invalid(e.to_string()))?;
    let wage = Normal::new(params.wage_mean, params.wage_spread).map_err(|e| invalid(e.to_string()))?;
    let quality = Beta::new(params.quality_alpha, params.quality_beta).map_err(|e| invalid(e.to_string()))?;

    let (t, k, n) = (params.t, params.num_domains, params.num_workers);
    let mut workers = Vec::with_capacity(n);
    for _ in 0..n {
        let e = (0..k).map(|_| unit_interval(&mut rng, &expertise, "expertise")).collect::<Result<_>>()?;
        let w = (0..k).map(|_| unit_interval(&mut rng, &wage, "wage")).collect::<Result<_>>()?;
        workers.push(Worker { expertise: e, wage: w, availability: vec![false; t] });
    }
    for d in 0..t {
        let count = poisson(&mut rng, params.lambda_workers)?.min(n);
        for i in index::sample(&mut rng, n, count) {
            workers[i].availability[d] = true;
        }
    }

    let mut releases = Vec::with_capacity(params.num_jobs);
    for d in 0..t {
        let left = params.num_jobs - releases.len();
        let count = if d + 1 == t { left } else { poisson(&mut rng, params.mu_jobs)?.min(left) };
        releases.extend(std::iter::repeat_n(d, count));
    }
    let mut jobs = Vec::with_capacity(params.num_jobs);
    for release in releases {
        let domain = DomainId(rng.random_range(0..k));
        let q = positive_draw(&mut rng, &quality, "quality")?;
        jobs.push(Job { domain, quality_threshold: q, cost_threshold: params.cost_slope * q, release });
    }
    Instance::new(t, k, workers, jobs)
}

fn unit_interval(rng: &mut ChaCha8Rng, dist: &Normal<f64>, what: &str) -> Result<f64> {
    for _ in 0..MAX_RESAMPLES {
        let x = dist.sample(rng);
        if x > 0.0 && x <= 1.0 {
            return Ok(x);
        }
    }
    Err(TasError::GenerationOverflow(format!("{what} distribution rarely falls in (0, 1]")))
}

fn positive_draw(rng: &mut ChaCha8Rng, dist: &Beta<f64>, what: &str) -> Result<f64> {
    for _ in 0..MAX_RESAMPLES {
        let x = dist.sample(rng);
        if x > 0.0 {
            return Ok(x);
        }
    }
    Err(TasError::GenerationOverflow(format!("{what} distribution keeps returning 0")))
}

fn poisson(rng: &mut ChaCha8Rng, lambda: f64) -> Result<usize> {
    if lambda == 0.0 {
        return Ok(0);
    }
    let dist = Poisson::new(lambda).map_err(|e| invalid(format!("Poisson rate {lambda}: {e}")))?;
    Ok(dist.sample(rng) as usize)
}

/// A 3-dimensional matching instance over `X = Y = Z = {0, .., u-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawThreeDm")]
pub struct ThreeDmInstance {
    pub u: usize,
    pub triples: Vec<[usize; 3]>,
}

#[derive(Deserialize)]
struct RawThreeDm {
    u: usize,
    triples: Vec<[usize; 3]>,
}

impl TryFrom<RawThreeDm> for ThreeDmInstance {
    type Error = TasError;

    fn try_from(raw: RawThreeDm) -> Result<Self> {
        ThreeDmInstance::new(raw.u, raw.triples)
    }
}

impl ThreeDmInstance {
    pub fn new(u: usize, triples: Vec<[usize; 3]>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for tr in &triples {
            if tr.iter().any(|&c| c >= u) {
                return Err(invalid(format!("triple {tr:?} has a coordinate outside [0, {u})")));
            }
            if !seen.insert(*tr) {
                return Err(invalid(format!("duplicate triple {tr:?}")));
            }
        }
        Ok(Self { u, triples })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    /// Uniform random instance with `num_triples` distinct triples (capped at `u^3`).
    pub fn random(rng: &mut impl Rng, u: usize, num_triples: usize) -> Self {
        let total = u * u * u;
        let picks = index::sample(rng, total, num_triples.min(total));
        let triples = picks.into_iter().map(|c| [c / (u * u), (c / u) % u, c % u]).collect();
        Self { u, triples }
    }
}

/// Encodes a 3-DM instance as scheduling: one job and one domain per triple,
/// Q = C = 3, and the three coordinate workers each available in one slot.
/// A perfect matching exists iff `u` jobs can be completed.
pub fn reduce_3dm(three_dm: &ThreeDmInstance) -> Instance {
    let u = three_dm.u;
    let k = three_dm.triples.len().max(1);
    let workers = (0..3 * u)
        .map(|i| {
            let mut availability = vec![false; 3];
            availability[i / u] = true;
            Worker { expertise: vec![0.0; k], wage: vec![0.0; k], availability }
        })
        .collect::<Vec<_>>();
    let mut instance = Instance { t: 3, num_domains: k, workers, jobs: Vec::new() };
    for (domain, &[x, y, z]) in three_dm.triples.iter().enumerate() {
        for i in [x, u + y, 2 * u + z] {
            instance.workers[i].expertise[domain] = 1.0;
            instance.workers[i].wage[domain] = 1.0;
        }
        instance.jobs.push(Job { domain: DomainId(domain), quality_threshold: 3.0, cost_threshold: 3.0, release: 0 });
    }
    instance
}

/// Decides by exhaustive search whether the triples contain a perfect matching.
pub fn brute_force_3dm(three_dm: &ThreeDmInstance) -> Result<bool> {
    if three_dm.u > 5 {
        return Err(TasError::Unsupported(format!("brute_force_3dm supports u <= 5, got {}", three_dm.u)));
    }
    fn cover(x: usize, tdm: &ThreeDmInstance, used_y: &mut [bool], used_z: &mut [bool]) -> bool {
        if x == tdm.u {
            return true;
        }
        for &[tx, y, z] in &tdm.triples {
            if tx == x && !used_y[y] && !used_z[z] {
                used_y[y] = true;
                used_z[z] = true;
                let found = cover(x + 1, tdm, used_y, used_z);
                used_y[y] = false;
                used_z[z] = false;
                if found {
                    return true;
                }
            }
        }
        false
    }
    let u = three_dm.u;
    Ok(cover(0, three_dm, &mut vec![false; u], &mut vec![false; u]))
}

pub const EXHAUSTIVE_MAX_WORKERS: usize = 12;
pub const EXHAUSTIVE_MAX_CELLS: usize = 24;

/// Exact optimum by depth-first search, with a witness schedule.
///
/// Each job is either left empty or completed with an inclusion-minimal
/// covering worker set placed on distinct free slots; partial work never
/// raises the objective, so nothing else needs exploring.
pub fn exhaustive_tas(instance: &Instance) -> Result<(usize, Schedule)> {
    let cells = instance.t * instance.num_jobs();
    if instance.num_workers() > EXHAUSTIVE_MAX_WORKERS || cells > EXHAUSTIVE_MAX_CELLS {
        return Err(TasError::Unsupported(format!(
            "exhaustive_tas supports at most {EXHAUSTIVE_MAX_WORKERS} workers and {EXHAUSTIVE_MAX_CELLS} \
             job-slot cells, got {} and {cells}",
            instance.num_workers()
        )));
    }
    let covers = (0..instance.num_jobs()).map(|j| minimal_covers(instance, j)).collect();
    let mut search = Search {
        instance,
        covers,
        busy: vec![vec![false; instance.t]; instance.num_workers()],
        current: Schedule::for_instance(instance),
        best: 0,
        witness: Schedule::for_instance(instance),
    };
    search.jobs(0, 0);
    Ok((search.best, search.witness))
}

fn minimal_covers(instance: &Instance, job: usize) -> Vec<Vec<WorkerId>> {
    let j = &instance.jobs[job];
    let slots = instance.t - j.release;
    let candidates: Vec<WorkerId> = (0..instance.num_workers())
        .filter(|&i| {
            instance.expertise(i, job) > 0.0 && (j.release..instance.t).any(|d| instance.workers[i].is_available(d))
        })
        .collect();
    let mut covers = Vec::new();
    for mask in 1u32..(1 << candidates.len()) {
        if mask.count_ones() as usize > slots {
            continue;
        }
        let set: Vec<WorkerId> = (0..candidates.len()).filter(|b| mask >> b & 1 == 1).map(|b| candidates[b]).collect();
        let q: f64 = set.iter().map(|&i| instance.expertise(i, job)).sum();
        let c: f64 = set.iter().map(|&i| instance.wage(i, job)).sum();
        let minimal = set.iter().all(|&i| q - instance.expertise(i, job) < j.quality_threshold - EPS);
        if q >= j.quality_threshold - EPS && c <= j.cost_threshold + EPS && minimal {
            covers.push(set);
        }
    }
    covers
}

struct Search<'a> {
    instance: &'a Instance,
    covers: Vec<Vec<Vec<WorkerId>>>,
    busy: Vec<Vec<bool>>,
    current: Schedule,
    best: usize,
    witness: Schedule,
}

impl Search<'_> {
    fn jobs(&mut self, job: usize, completed: usize) {
        let n = self.instance.num_jobs();
        if completed + (n - job) <= self.best {
            return;
        }
        if job == n {
            self.best = completed;
            self.witness = self.current.clone();
            return;
        }
        for c in 0..self.covers[job].len() {
            let cover = self.covers[job][c].clone();
            self.place(job, &cover, completed);
            if self.best == n {
                return;
            }
        }
        self.jobs(job + 1, completed);
    }

    fn place(&mut self, job: usize, rest: &[WorkerId], completed: usize) {
        let Some((&i, rest)) = rest.split_first() else {
            self.jobs(job + 1, completed + 1);
            return;
        };
        for d in self.instance.jobs[job].release..self.instance.t {
            if self.instance.workers[i].is_available(d)
                && !self.busy[i][d]
                && self.current.assignments[job][d].is_none()
            {
                self.busy[i][d] = true;
                self.current.assignments[job][d] = Some(i);
                self.place(job, rest, completed);
                self.busy[i][d] = false;
                self.current.assignments[job][d] = None;
                if self.best == self.instance.num_jobs() {
                    return;
                }
            }
        }
    }
}

/// Scales every expertise by `expertise_multiplier` and keeps a uniform
/// sample of `ceil(worker_fraction * |U|)` workers (original order, ids
/// renumbered). Scaled expertise is capped at 1, except that values already
/// above 1 are never reduced.
pub fn scale_instance(
    instance: &Instance,
    expertise_multiplier: f64,
    worker_fraction: f64,
    seed: u64,
) -> Result<Instance> {
    if !(expertise_multiplier.is_finite() && expertise_multiplier > 0.0) {
        return Err(invalid(format!("expertise multiplier must be positive, got {expertise_multiplier}")));
    }
    if !(worker_fraction > 0.0 && worker_fraction <= 1.0) {
        return Err(invalid(format!("worker fraction must lie in (0, 1], got {worker_fraction}")));
    }
    let n = instance.num_workers();
    let keep = ((worker_fraction * n as f64) - 1e-9).ceil().max(0.0) as usize;
    let mut chosen: Vec<usize> = if keep >= n {
        (0..n).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        index::sample(&mut rng, n, keep).into_vec()
    };
    chosen.sort_unstable();

    let workers = chosen
        .into_iter()
        .map(|i| {
            let mut w = instance.workers[i].clone();
            if expertise_multiplier != 1.0 {
                for e in &mut w.expertise {
                    *e = (*e * expertise_multiplier).min(e.max(1.0));
                }
            }
            w
        })
        .collect();
    Instance::new(instance.t, instance.num_domains, workers, instance.jobs.clone())
}
