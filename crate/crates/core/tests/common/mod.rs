#![allow(dead_code)]

use rand::Rng;
use tas_core::model::{DomainId, Instance, Job, Worker};

/// Size limits of a random instance.
#[derive(Clone, Copy)]
pub struct Shape {
    pub max_t: usize,
    pub max_domains: usize,
    pub max_workers: usize,
    pub max_jobs: usize,
}

pub const FUZZ: Shape = Shape { max_t: 10, max_domains: 3, max_workers: 30, max_jobs: 15 };
pub const TINY: Shape = Shape { max_t: 4, max_domains: 2, max_workers: 5, max_jobs: 3 };

/// Unstructured instance: some zero expertise, patchy availability,
/// thresholds that range from trivial to unreachable.
pub fn random_instance(rng: &mut impl Rng, shape: Shape) -> Instance {
    let t = rng.random_range(1..=shape.max_t);
    let k = rng.random_range(1..=shape.max_domains);
    let n = rng.random_range(0..=shape.max_workers);
    let m = rng.random_range(0..=shape.max_jobs);
    let density = rng.random_range(0.2..0.9);
    let workers = (0..n)
        .map(|_| {
            let expertise: Vec<f64> =
                (0..k).map(|_| if rng.random_bool(0.2) { 0.0 } else { rng.random_range(0.05..1.0) }).collect();
            let wage = (0..k).map(|_| rng.random_range(0.05..1.0)).collect();
            let availability = (0..t).map(|_| rng.random_bool(density)).collect();
            Worker { expertise, wage, availability }
        })
        .collect();
    let jobs = (0..m)
        .map(|_| Job {
            domain: DomainId(rng.random_range(0..k)),
            quality_threshold: rng.random_range(0.1..2.0),
            cost_threshold: rng.random_range(0.1..3.0),
            release: rng.random_range(0..t),
        })
        .collect();
    Instance::new(t, k, workers, jobs).expect("generator respects the instance invariants")
}

/// Randomizes everything not yet revealed on day `d`: availability after
/// `d`, attributes of workers never available up to `d`, jobs released after
/// `d`, plus extra late jobs.
pub fn mutate_future(rng: &mut impl Rng, inst: &Instance, d: usize) -> Instance {
    let mut m = inst.clone();
    let t = m.t;
    for w in &mut m.workers {
        for slot in d + 1..t {
            w.availability[slot] = rng.random_bool(0.5);
        }
        if !w.availability[..=d].iter().any(|&a| a) {
            for e in &mut w.expertise {
                *e = rng.random_range(0.0..1.0);
            }
            for wage in &mut w.wage {
                *wage = rng.random_range(0.05..1.0);
            }
        }
    }
    if d + 1 < t {
        for j in &mut m.jobs {
            if j.release > d {
                j.quality_threshold = rng.random_range(0.1..2.0);
                j.cost_threshold = rng.random_range(0.1..3.0);
                j.release = rng.random_range(d + 1..t);
            }
        }
        for _ in 0..rng.random_range(0..4) {
            let mut extra = m.jobs.first().cloned().unwrap_or(Job {
                domain: DomainId(0),
                quality_threshold: 1.0,
                cost_threshold: 1.0,
                release: 0,
            });
            extra.release = rng.random_range(d + 1..t);
            m.jobs.push(extra);
        }
    }
    Instance::new(m.t, m.num_domains, m.workers, m.jobs).unwrap()
}
