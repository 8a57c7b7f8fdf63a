//! Cross-module properties of the schedulers on random instances.

mod common;

use common::{mutate_future, random_instance, FUZZ, TINY};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tas_core::algorithms::{run_scheduler, Algorithm, SchedulerConfig};
use tas_core::knapsack::{upper_bound, DEFAULT_RESOLUTION};
use tas_core::model::{objective, validate};
use tas_core::simgen::exhaustive_tas;

#[test]
fn schedules_are_feasible_and_below_the_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    for _ in 0..150 {
        let inst = random_instance(&mut rng, FUZZ);
        let bound = upper_bound(&inst, DEFAULT_RESOLUTION).unwrap();
        for seed in 0..3 {
            for a in Algorithm::ALL {
                let s = run_scheduler(&inst, &SchedulerConfig::new(a).with_seed(seed)).unwrap();
                assert!(validate(&inst, &s).unwrap().is_empty());
                let got = objective(&inst, &s).unwrap();
                assert!(got <= bound, "{a}: {got} > bound {bound}");
            }
        }
    }
}

#[test]
fn exhaustive_optimum_dominates_every_scheduler() {
    let mut rng = ChaCha8Rng::seed_from_u64(200);
    for _ in 0..300 {
        let inst = random_instance(&mut rng, TINY);
        let (best, witness) = exhaustive_tas(&inst).unwrap();
        assert!(validate(&inst, &witness).unwrap().is_empty());
        assert_eq!(objective(&inst, &witness).unwrap(), best);
        assert!(best <= upper_bound(&inst, DEFAULT_RESOLUTION).unwrap());
        for a in Algorithm::ALL {
            for seed in 0..2 {
                let s = run_scheduler(&inst, &SchedulerConfig::new(a).with_seed(seed)).unwrap();
                assert!(objective(&inst, &s).unwrap() <= best, "{a} beats the optimum on {inst:?}");
            }
        }
    }
}

#[test]
fn runs_are_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(300);
    for _ in 0..20 {
        let inst = random_instance(&mut rng, FUZZ);
        for a in Algorithm::ALL {
            let c = SchedulerConfig::new(a).with_seed(rng.random());
            assert_eq!(run_scheduler(&inst, &c).unwrap(), run_scheduler(&inst, &c).unwrap());
        }
    }
}

#[test]
fn online_decisions_ignore_the_future() {
    let mut rng = ChaCha8Rng::seed_from_u64(400);
    for _ in 0..60 {
        let inst = random_instance(&mut rng, FUZZ);
        for a in Algorithm::ONLINE {
            let c = SchedulerConfig::new(a).with_seed(7);
            let base = run_scheduler(&inst, &c).unwrap();
            for d in 0..inst.t {
                let other = mutate_future(&mut rng, &inst, d);
                let s = run_scheduler(&other, &c).unwrap();
                for j in 0..inst.num_jobs() {
                    assert_eq!(base.assignments[j][..=d], s.assignments[j][..=d], "{a}, day {d}, job {j}");
                }
            }
        }
    }
}
