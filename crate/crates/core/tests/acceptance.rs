//! Acceptance suite: one check per criterion, each printing a PASS/FAIL line.
//! Runs without the libtest harness so every line is always shown; the
//! process exits non-zero if any criterion fails.

mod common;

use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use common::{mutate_future, random_instance, FUZZ};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};
use tas_core::algorithms::{run_scheduler, Algorithm, SchedulerConfig};
use tas_core::experiment::{
    run_benchmark, run_sweep, summarize, write_benchmark, BenchmarkOutput, BenchmarkSpec, InstanceSource, SummaryRow,
    SweepAxis, SweepPoint, SweepSpec,
};
use tas_core::knapsack::{brute_force_cover, min_cost_cover, upper_bound, PackItem, DEFAULT_RESOLUTION};
use tas_core::matching::{brute_force_matching, max_weight_matching, WeightedBipartiteGraph};
use tas_core::model::{objective, validate, Constraint, DomainId, Instance, Job, Schedule, Worker};
use tas_core::simgen::{brute_force_3dm, exhaustive_tas, reduce_3dm, GenParams, ThreeDmInstance};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

/// Collects sub-check results of one criterion.
#[derive(Default)]
struct Checks {
    notes: Vec<String>,
    failed: bool,
}

impl Checks {
    fn check(&mut self, ok: bool, note: impl Into<String>) {
        let note = note.into();
        if ok {
            self.notes.push(note);
        } else {
            self.failed = true;
            self.notes.push(format!("FAILED {note}"));
        }
    }

    fn within(&mut self, start: Instant, limit: Duration) {
        let took = start.elapsed();
        self.check(took < limit, format!("{:.2}s < {}s", took.as_secs_f64(), limit.as_secs()));
    }

    fn finish(self) -> Outcome {
        let text = self.notes.join("; ");
        if self.failed {
            Err(text)
        } else {
            Ok(text)
        }
    }
}

fn fixture() -> Instance {
    let w = |e: f64, wage: f64, avail: [bool; 3]| Worker {
        expertise: vec![e],
        wage: vec![wage],
        availability: avail.to_vec(),
    };
    let job = |q: f64, c: f64| Job { domain: DomainId(0), quality_threshold: q, cost_threshold: c, release: 0 };
    Instance::new(
        3,
        1,
        vec![w(2.0, 3.0, [false, false, true]), w(3.0, 2.0, [false, true, false]), w(2.0, 1.0, [true, false, true])],
        vec![job(5.0, 5.0), job(4.0, 4.0)],
    )
    .unwrap()
}

fn schedule(rows: [[Option<usize>; 3]; 2]) -> Schedule {
    Schedule { assignments: rows.iter().map(|r| r.to_vec()).collect() }
}

fn completed(inst: &Instance, config: SchedulerConfig) -> usize {
    objective(inst, &run_scheduler(inst, &config).unwrap()).unwrap()
}

fn fixture_reproduction() -> Outcome {
    let start = Instant::now();
    let inst = fixture();
    let mut c = Checks::default();

    let closing = schedule([[None, Some(1), Some(2)], [Some(2), None, Some(0)]]);
    c.check(validate(&inst, &closing).unwrap().is_empty(), "closing schedule feasible");
    // i2 on both jobs at slot 0, and i0 on both jobs at slot 2.
    for (name, bad) in [
        ("i2 twice at slot 0", schedule([[Some(2), Some(1), None], [Some(2), None, Some(0)]])),
        ("i0 twice at slot 2", schedule([[None, Some(1), Some(0)], [Some(2), None, Some(0)]])),
    ] {
        let v = validate(&inst, &bad).unwrap();
        c.check(v.iter().any(|v| v.constraint == Constraint::WorkerOverlap), format!("rejects {name}"));
    }

    let bound = upper_bound(&inst, DEFAULT_RESOLUTION).unwrap();
    c.check(bound == 2, format!("bound {bound} (want 2)"));
    let (oracle, _) = exhaustive_tas(&inst).unwrap();
    c.check(oracle == 2, format!("oracle {oracle} (want 2)"));
    let offline = SchedulerConfig { lookahead: Some(2), minavail: 1, ..SchedulerConfig::new(Algorithm::TasOffline) };
    let off = completed(&inst, offline);
    c.check(off == 2, format!("tas_offline {off} (want 2)"));
    let on = completed(&inst, SchedulerConfig::new(Algorithm::TasOnline));
    c.check(on == 1, format!("tas_online {on} (want 1)"));
    c.within(start, Duration::from_secs(1));
    c.finish()
}

fn reduction_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut agree, total) = (0, 250);
    for _ in 0..total {
        let u = rng.random_range(1..=3);
        let w = rng.random_range(0..=6);
        let tdm = ThreeDmInstance::random(&mut rng, u, w);
        let perfect = brute_force_3dm(&tdm).unwrap();
        let (best, _) = exhaustive_tas(&reduce_3dm(&tdm)).unwrap();
        agree += usize::from(perfect == (best == u));
    }
    let mut c = Checks::default();
    c.check(agree == total, format!("{agree}/{total} agree"));
    c.within(start, Duration::from_secs(30));
    c.finish()
}

fn random_graph(rng: &mut ChaCha8Rng, integer: bool) -> WeightedBipartiteGraph {
    let (l, r) = (rng.random_range(0..=7), rng.random_range(0..=7));
    let density = rng.random_range(0.2..1.0);
    let mut triples = Vec::new();
    for a in 0..l {
        for b in 0..r {
            if rng.random_bool(density) {
                let w = if integer { rng.random_range(1..=5) as f64 } else { rng.random_range(0.01..3.0) };
                triples.push((a, b, w));
            }
        }
    }
    WeightedBipartiteGraph::from_triples(l, r, &triples).unwrap()
}

fn kernel_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut c = Checks::default();

    let (mut exact, mut close) = (0, 0);
    for _ in 0..1000 {
        let g = random_graph(&mut rng, true);
        exact += usize::from(max_weight_matching(&g).total_weight == brute_force_matching(&g).unwrap().total_weight);
        let g = random_graph(&mut rng, false);
        let diff = (max_weight_matching(&g).total_weight - brute_force_matching(&g).unwrap().total_weight).abs();
        close += usize::from(diff <= 1e-9);
    }
    c.check(exact == 1000, format!("matching integer {exact}/1000"));
    c.check(close == 1000, format!("matching real {close}/1000"));

    let mut agree = 0;
    for _ in 0..1000 {
        let n = rng.random_range(0..=12);
        let items: Vec<PackItem> = (0..n)
            .map(|worker| PackItem {
                worker,
                value: rng.random_range(0..=8) as f64 * 0.125,
                cost: rng.random_range(1..=12) as f64 * 0.25,
            })
            .collect();
        let q = rng.random_range(0..=24) as f64 * 0.125;
        let budget = rng.random_range(1..=40) as f64 * 0.25;
        let fast = min_cost_cover(&items, q, budget, 0.25).unwrap();
        let slow = brute_force_cover(&items, q, budget).unwrap();
        let same = match (&fast, &slow) {
            (None, None) => true,
            (Some(a), Some(b)) => a.total_cost == b.total_cost,
            _ => false,
        };
        agree += usize::from(same);
    }
    c.check(agree == 1000, format!("cover {agree}/1000"));
    c.finish()
}

fn feasibility_fuzz() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut clean, mut runs) = (0, 0);
    for _ in 0..120 {
        let inst = random_instance(&mut rng, FUZZ);
        for seed in 0..3 {
            for a in Algorithm::ALL {
                // run_scheduler refuses infeasible output; re-validate anyway.
                let ok = run_scheduler(&inst, &SchedulerConfig::new(a).with_seed(seed))
                    .is_ok_and(|s| validate(&inst, &s).unwrap().is_empty());
                clean += usize::from(ok);
                runs += 1;
            }
        }
    }
    let mut c = Checks::default();
    c.check(clean == runs, format!("{clean}/{runs} runs violation-free"));
    c.finish()
}

fn online_replay() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut same, mut total) = (0, 0);
    for _ in 0..60 {
        let inst = random_instance(&mut rng, FUZZ);
        for a in Algorithm::ONLINE {
            let config = SchedulerConfig::new(a).with_seed(rng.random());
            let base = run_scheduler(&inst, &config).unwrap();
            for d in 0..inst.t {
                let other = run_scheduler(&mutate_future(&mut rng, &inst, d), &config).unwrap();
                let identical = (0..inst.num_jobs()).all(|j| base.assignments[j][..=d] == other.assignments[j][..=d]);
                same += usize::from(identical);
                total += 1;
            }
        }
    }
    let mut c = Checks::default();
    c.check(same == total, format!("{same}/{total} replays identical"));
    c.finish()
}

const DESK_SEEDS: std::ops::Range<u64> = 0..20;

fn desk_spec(algorithms: &[Algorithm]) -> BenchmarkSpec {
    BenchmarkSpec::new(InstanceSource::Generate(GenParams::desk_scale()), algorithms, DESK_SEEDS)
}

/// The desk-scale benchmark shared by several criteria, with its runtime.
fn desk_benchmark() -> &'static (BenchmarkOutput, Duration) {
    static CELL: OnceLock<(BenchmarkOutput, Duration)> = OnceLock::new();
    CELL.get_or_init(|| {
        let start = Instant::now();
        let out = run_benchmark(&desk_spec(&Algorithm::ALL)).unwrap();
        (out, start.elapsed())
    })
}

fn mean_of(summary: &[SummaryRow], a: Algorithm, f: fn(&SummaryRow) -> f64) -> f64 {
    summary.iter().find(|s| s.algorithm == a).map(f).unwrap_or(f64::NAN)
}

fn table1_ordering() -> Outcome {
    use Algorithm::*;
    let (out, took) = desk_benchmark();
    let mut c = Checks::default();
    c.check(out.failures.is_empty(), format!("{} failed cells", out.failures.len()));
    let summary = summarize(&out.rows);
    let m = |a| mean_of(&summary, a, |s| s.completed.mean);
    c.notes.push(
        [Random, RandomEgoistic, RandomEgoisticFilter, OnlineGreedy, TasOnline, TasOffline]
            .map(|a| format!("{a}={:.2}", m(a)))
            .join(" "),
    );

    c.check(m(TasOffline) >= m(TasOnline), "mean tas_offline >= tas_online");

    let per_seed = |a: Algorithm, seed: u64| {
        out.rows.iter().find(|r| r.algorithm == a && r.seed == seed).map(|r| r.completed).unwrap_or(0)
    };
    let wins = DESK_SEEDS
        .filter(|&s| {
            [Random, RandomEgoistic, RandomEgoisticFilter, OnlineGreedy]
                .iter()
                .all(|&a| per_seed(TasOnline, s) > per_seed(a, s))
        })
        .count();
    let n = DESK_SEEDS.count();
    c.check(wins * 10 >= n * 9, format!("tas_online strictly best online in {wins}/{n} seeds (need 90%)"));

    c.check(m(TasOnline) > m(RandomEgoisticFilter), "mean tas_online > random_egoistic_filter");
    c.check(m(TasOnline) > m(RandomEgoistic), "mean tas_online > random_egoistic");
    c.check(m(RandomEgoisticFilter) > m(OnlineGreedy), "mean random_egoistic_filter > online_greedy");
    c.check(m(RandomEgoistic) > m(OnlineGreedy), "mean random_egoistic > online_greedy");
    c.check(m(OnlineGreedy) > m(Random), "mean online_greedy > random");
    c.check(*took < Duration::from_secs(300), format!("{:.2}s < 300s", took.as_secs_f64()));
    c.finish()
}

fn table3_quality() -> Outcome {
    let (out, _) = desk_benchmark();
    let summary = summarize(&out.rows);
    let q = |a| mean_of(&summary, a, |s| s.quality_pct.mean);
    let mut c = Checks::default();
    let tas = q(Algorithm::TasOnline);
    c.notes.push(format!("tas_online={tas:.2}%"));
    for a in Algorithm::ONLINE.into_iter().filter(|&a| a != Algorithm::TasOnline) {
        c.check(tas > q(a), format!("> {a}={:.2}%", q(a)));
    }
    c.finish()
}

struct Sweeps {
    fraction: Vec<SweepPoint>,
    multiplier: Vec<SweepPoint>,
    took: Duration,
}

fn sweeps() -> &'static Sweeps {
    static CELL: OnceLock<Sweeps> = OnceLock::new();
    CELL.get_or_init(|| {
        let start = Instant::now();
        let base = desk_spec(&[Algorithm::TasOnline]);
        let run = |axis, grid: &[f64]| run_sweep(&SweepSpec { axis, grid: grid.to_vec(), base: base.clone() }).unwrap();
        let fraction = run(SweepAxis::WorkerFraction, &[0.2, 0.4, 0.6, 0.8, 1.0]);
        let multiplier = run(SweepAxis::ExpertiseMultiplier, &[0.8, 1.0, 1.2, 1.6, 2.0]);
        Sweeps { fraction, multiplier, took: start.elapsed() }
    })
}

fn upper_bound_dominance() -> Outcome {
    let mut outputs: Vec<&BenchmarkOutput> = vec![&desk_benchmark().0];
    let s = sweeps();
    outputs.extend(s.fraction.iter().chain(&s.multiplier).map(|p| &p.output));

    // Tighter budgets and a denser job stream, where the bound actually bites.
    let mut extra = Vec::new();
    for (slope, mu) in [(0.6, 6.0), (1.0, 10.0), (0.3, 12.0)] {
        let params =
            GenParams { cost_slope: slope, mu_jobs: mu, num_jobs: (mu * 10.0) as usize, ..GenParams::desk_scale() };
        extra.push(
            run_benchmark(&BenchmarkSpec::new(InstanceSource::Generate(params), &Algorithm::ALL, 0..10)).unwrap(),
        );
    }
    outputs.extend(extra.iter());

    let rows: Vec<_> = outputs.iter().flat_map(|o| &o.rows).collect();
    let worst = rows.iter().filter_map(|r| r.pct_of_bound).fold(0.0, f64::max);
    let bad = rows.iter().filter(|r| r.pct_of_bound.is_some_and(|p| p > 100.0)).count();
    let mut c = Checks::default();
    c.check(bad == 0, format!("{bad} of {} rows above 100% (max {worst:.2}%)", rows.len()));
    c.finish()
}

fn grid_means(points: &[SweepPoint], f: fn(&SummaryRow) -> f64) -> Vec<(f64, f64)> {
    points.iter().map(|p| (p.value, mean_of(&summarize(&p.output.rows), Algorithm::TasOnline, f))).collect()
}

fn scalability_trends() -> Outcome {
    let s = sweeps();
    let mut c = Checks::default();

    let completed = grid_means(&s.fraction, |r| r.completed.mean);
    let at = |x: f64| completed.iter().find(|(v, _)| *v == x).map(|p| p.1).unwrap();
    let (low, full) = (at(0.4), at(1.0));
    c.notes.push(format!(
        "completed by fraction [{}]",
        completed.iter().map(|(v, m)| format!("{v}:{m:.2}")).collect::<Vec<_>>().join(" ")
    ));
    c.check((low - full).abs() <= 0.15 * full, format!("0.4 within 15% of 1.0 ({low:.2} vs {full:.2})"));

    let workers = grid_means(&s.multiplier, |r| r.avg_workers.mean);
    let rises = workers.windows(2).filter(|w| w[1].1 > w[0].1).count();
    c.notes.push(format!(
        "avg_workers by multiplier [{}]",
        workers.iter().map(|(v, m)| format!("{v}:{m:.3}")).collect::<Vec<_>>().join(" ")
    ));
    c.check(rises <= 1, format!("{rises} increases (at most 1 allowed)"));
    let failures: usize = s.fraction.iter().chain(&s.multiplier).map(|p| p.output.failures.len()).sum();
    c.check(failures == 0, format!("{failures} failed cells"));
    c.check(s.took < Duration::from_secs(900), format!("{:.2}s < 900s", s.took.as_secs_f64()));
    c.finish()
}

/// Hash of every result file, with the wall-time column cut from results.csv.
fn result_files_hash(dir: &Path) -> String {
    let mut h = Sha256::new();
    for name in ["results.csv", "daily.csv", "summary.csv", "failures.csv"] {
        let text = fs::read_to_string(dir.join(name)).unwrap();
        let text = if name == "results.csv" {
            text.lines().map(|l| l.rsplit_once(',').map_or(l, |p| p.0)).collect::<Vec<_>>().join("\n")
        } else {
            text
        };
        h.update(name.as_bytes());
        h.update(text.as_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let spec = desk_spec(&Algorithm::ALL);
    let mut hashes = Vec::new();
    let mut digests = Vec::new();
    for run in ["a", "b"] {
        let out = run_benchmark(&spec).unwrap();
        let path = dir.path().join(run);
        digests.push(write_benchmark(&path, &out).unwrap());
        hashes.push(result_files_hash(&path));
    }
    let mut c = Checks::default();
    c.check(hashes[0] == hashes[1], format!("file hash {}", &hashes[0][..16]));
    c.check(digests[0] == digests[1], format!("digest {}", &digests[0][..16]));
    c.finish()
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("fixture reproduction", fixture_reproduction),
        ("reduction equivalence", reduction_equivalence),
        ("kernel oracle equivalence", kernel_equivalence),
        ("feasibility fuzz", feasibility_fuzz),
        ("online-property replay", online_replay),
        ("completed-jobs ordering at desk scale", table1_ordering),
        ("quality ordering at desk scale", table3_quality),
        ("upper-bound dominance", upper_bound_dominance),
        ("scalability trends", scalability_trends),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name} [{secs:.2}s]: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name} [{secs:.2}s]: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
