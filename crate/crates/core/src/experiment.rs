//! Batch benchmarks and scalability sweeps.
//!
//! A benchmark runs every configured scheduler on one instance per seed and
//! reports one [`ResultRow`] per (algorithm, seed) cell. Cells run in
//! parallel on the current rayon pool; results are merged by key, so output
//! does not depend on scheduling. Failing cells are collected next to the
//! results instead of aborting the run.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::algorithms::{run_scheduler, Algorithm, SchedulerConfig};
use crate::error::{invalid, Result};
use crate::knapsack::{upper_bound, DEFAULT_RESOLUTION};
use crate::model::{metrics, Instance};
use crate::simgen::{generate, scale_instance, GenParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceSource {
    /// A fresh synthetic instance per seed (the seed overrides `params.seed`).
    Generate(GenParams),
    /// The same instance file for every seed.
    File(PathBuf),
}

impl InstanceSource {
    fn instance(&self, seed: u64) -> Result<Instance> {
        match self {
            InstanceSource::Generate(params) => generate(&params.clone().with_seed(seed)),
            InstanceSource::File(path) => Instance::load(path),
        }
    }
}

fn default_resolution() -> f64 {
    DEFAULT_RESOLUTION
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkSpec {
    pub instance: InstanceSource,
    pub algorithms: Vec<SchedulerConfig>,
    pub seeds: Vec<u64>,
    /// Cost grid of the upper bound.
    #[serde(default = "default_resolution")]
    pub resolution: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
}

impl BenchmarkSpec {
    pub fn new(instance: InstanceSource, algorithms: &[Algorithm], seeds: impl IntoIterator<Item = u64>) -> Self {
        Self {
            instance,
            algorithms: algorithms.iter().map(|&a| SchedulerConfig::new(a)).collect(),
            seeds: seeds.into_iter().collect(),
            resolution: DEFAULT_RESOLUTION,
            out_dir: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.algorithms.is_empty() || self.seeds.is_empty() {
            return Err(invalid("a benchmark needs at least one algorithm and one seed"));
        }
        let mut names = BTreeSet::new();
        for c in &self.algorithms {
            c.validate()?;
            if !names.insert(c.algorithm) {
                return Err(invalid(format!("algorithm {} listed twice", c.algorithm)));
            }
        }
        if self.seeds.iter().collect::<BTreeSet<_>>().len() != self.seeds.len() {
            return Err(invalid("seeds must be distinct"));
        }
        if !(self.resolution.is_finite() && self.resolution > 0.0) {
            return Err(invalid("resolution must be positive"));
        }
        if let InstanceSource::Generate(p) = &self.instance {
            p.validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub completed: usize,
    /// `100 * completed / bound`; `None` when the bound is 0.
    pub pct_of_bound: Option<f64>,
    pub avg_workers: f64,
    pub avg_flow_time: f64,
    pub budget_pct: f64,
    pub quality_pct: f64,
    pub wall_time_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DailyRow {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub day: usize,
    pub completed: usize,
    pub quality_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellFailure {
    /// `None` when the instance itself could not be produced.
    pub algorithm: Option<Algorithm>,
    pub seed: u64,
    pub error: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BenchmarkOutput {
    /// Ordered by algorithm (as listed in the spec), then seed.
    pub rows: Vec<ResultRow>,
    pub daily: Vec<DailyRow>,
    pub failures: Vec<CellFailure>,
}

struct Cell {
    row: ResultRow,
    daily: Vec<DailyRow>,
}

fn run_cell(instance: &Instance, bound: usize, config: &SchedulerConfig, seed: u64) -> Result<Cell> {
    let config = config.clone().with_seed(seed);
    let start = Instant::now();
    let schedule = run_scheduler(instance, &config)?;
    let wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    let m = metrics(instance, &schedule, Some(bound))?;
    let algorithm = config.algorithm;
    let daily = m
        .per_day_completed
        .iter()
        .zip(&m.per_day_avg_quality_pct)
        .enumerate()
        .map(|(day, (&completed, &quality_pct))| DailyRow { algorithm, seed, day, completed, quality_pct })
        .collect();
    let row = ResultRow {
        algorithm,
        seed,
        completed: m.completed,
        pct_of_bound: m.pct_of_bound,
        avg_workers: m.avg_workers,
        avg_flow_time: m.avg_flow_time,
        budget_pct: m.budget_pct,
        quality_pct: m.quality_pct,
        wall_time_ms,
    };
    Ok(Cell { row, daily })
}

/// Runs all algorithms on the instances of the given seeds. `instances` is
/// called once per seed.
fn run_grid<F>(spec: &BenchmarkSpec, instances: F) -> BenchmarkOutput
where
    F: Fn(u64) -> Result<Instance> + Sync,
{
    let per_seed: Vec<(u64, Result<(Instance, usize)>)> = spec
        .seeds
        .par_iter()
        .map(|&seed| {
            let prepared = instances(seed).and_then(|inst| {
                let bound = upper_bound(&inst, spec.resolution)?;
                Ok((inst, bound))
            });
            (seed, prepared)
        })
        .collect();

    let mut out = BenchmarkOutput::default();
    let mut tasks = Vec::new();
    for (seed, prepared) in &per_seed {
        match prepared {
            Ok((inst, bound)) => {
                for (a, config) in spec.algorithms.iter().enumerate() {
                    tasks.push((a, *seed, inst, *bound, config));
                }
            }
            Err(e) => out.failures.push(CellFailure { algorithm: None, seed: *seed, error: e.to_string() }),
        }
    }
    let mut results: Vec<(usize, u64, Algorithm, Result<Cell>)> = tasks
        .into_par_iter()
        .map(|(a, seed, inst, bound, config)| (a, seed, config.algorithm, run_cell(inst, bound, config, seed)))
        .collect();
    let seed_pos = |s: u64| spec.seeds.iter().position(|&x| x == s);
    results.sort_by_key(|&(a, seed, _, _)| (a, seed_pos(seed)));

    for (_, seed, algorithm, res) in results {
        match res {
            Ok(cell) => {
                out.rows.push(cell.row);
                out.daily.extend(cell.daily);
            }
            Err(e) => out.failures.push(CellFailure { algorithm: Some(algorithm), seed, error: e.to_string() }),
        }
    }
    out
}

/// Runs every (algorithm, seed) cell of the spec.
pub fn run_benchmark(spec: &BenchmarkSpec) -> Result<BenchmarkOutput> {
    spec.validate()?;
    Ok(run_grid(spec, |seed| spec.instance.instance(seed)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    ExpertiseMultiplier,
    WorkerFraction,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::ExpertiseMultiplier => "expertise_multiplier",
            SweepAxis::WorkerFraction => "worker_fraction",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub grid: Vec<f64>,
    pub base: BenchmarkSpec,
}

impl SweepSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if self.grid.is_empty() {
            return Err(invalid("sweep grid is empty"));
        }
        if !self.grid.windows(2).all(|w| w[0] < w[1]) {
            return Err(invalid("sweep grid must be strictly ascending"));
        }
        match self.axis {
            SweepAxis::ExpertiseMultiplier => {
                if !self.grid.contains(&1.0) {
                    return Err(invalid("expertise multiplier grid must contain the baseline 1.0"));
                }
                if self.grid[0] <= 0.0 {
                    return Err(invalid("expertise multipliers must be positive"));
                }
            }
            SweepAxis::WorkerFraction => {
                if self.grid[0] <= 0.0 || self.grid[self.grid.len() - 1] > 1.0 {
                    return Err(invalid("worker fractions must lie in (0, 1]"));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub output: BenchmarkOutput,
}

/// Runs the base benchmark on scaled instances at every grid value. The
/// seed of a cell also drives the worker subsample.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepPoint>> {
    spec.validate()?;
    Ok(spec
        .grid
        .par_iter()
        .map(|&value| {
            let (mult, frac) = match spec.axis {
                SweepAxis::ExpertiseMultiplier => (value, 1.0),
                SweepAxis::WorkerFraction => (1.0, value),
            };
            let output =
                run_grid(&spec.base, |seed| scale_instance(&spec.base.instance.instance(seed)?, mult, frac, seed));
            SweepPoint { value, output }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanSd {
    pub mean: f64,
    /// Sample standard deviation; 0 for a single value.
    pub sd: f64,
}

impl MeanSd {
    pub fn of(xs: &[f64]) -> Option<Self> {
        if xs.is_empty() {
            return None;
        }
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let sd =
            if xs.len() < 2 { 0.0 } else { (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt() };
        Some(Self { mean, sd })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub algorithm: Algorithm,
    pub runs: usize,
    pub completed: MeanSd,
    /// Over the runs with a positive bound.
    pub pct_of_bound: Option<MeanSd>,
    pub avg_workers: MeanSd,
    pub avg_flow_time: MeanSd,
    pub budget_pct: MeanSd,
    pub quality_pct: MeanSd,
}

/// Mean and sample deviation over seeds, one row per algorithm in first
/// appearance order.
pub fn summarize(rows: &[ResultRow]) -> Vec<SummaryRow> {
    let mut order: Vec<Algorithm> = Vec::new();
    for r in rows {
        if !order.contains(&r.algorithm) {
            order.push(r.algorithm);
        }
    }
    order
        .into_iter()
        .map(|algorithm| {
            let group: Vec<&ResultRow> = rows.iter().filter(|r| r.algorithm == algorithm).collect();
            let stat = |f: fn(&ResultRow) -> f64| MeanSd::of(&group.iter().map(|r| f(r)).collect::<Vec<_>>()).unwrap();
            let pcts: Vec<f64> = group.iter().filter_map(|r| r.pct_of_bound).collect();
            SummaryRow {
                algorithm,
                runs: group.len(),
                completed: stat(|r| r.completed as f64),
                pct_of_bound: MeanSd::of(&pcts),
                avg_workers: stat(|r| r.avg_workers),
                avg_flow_time: stat(|r| r.avg_flow_time),
                budget_pct: stat(|r| r.budget_pct),
                quality_pct: stat(|r| r.quality_pct),
            }
        })
        .collect()
}

const RESULT_HEADER: [&str; 9] = [
    "algorithm",
    "seed",
    "completed",
    "pct_of_bound",
    "avg_workers",
    "avg_flow_time",
    "budget_pct",
    "quality_pct",
    "wall_time_ms",
];

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn result_fields(r: &ResultRow, wall_time: bool) -> Vec<String> {
    let mut f = vec![
        r.algorithm.to_string(),
        r.seed.to_string(),
        r.completed.to_string(),
        opt(r.pct_of_bound),
        r.avg_workers.to_string(),
        r.avg_flow_time.to_string(),
        r.budget_pct.to_string(),
        r.quality_pct.to_string(),
    ];
    if wall_time {
        f.push(r.wall_time_ms.to_string());
    }
    f
}

fn to_csv(header: &[&str], records: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in records {
        w.write_record(&r)?;
    }
    let bytes = w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Per-cell results, one row per (algorithm, seed).
pub fn results_csv(rows: &[ResultRow]) -> Result<String> {
    to_csv(&RESULT_HEADER, rows.iter().map(|r| result_fields(r, true)))
}

/// Long-format per-day series.
pub fn daily_csv(daily: &[DailyRow]) -> Result<String> {
    let header = ["algorithm", "seed", "day", "completed", "quality_pct"];
    to_csv(
        &header,
        daily.iter().map(|d| {
            vec![
                d.algorithm.to_string(),
                d.seed.to_string(),
                d.day.to_string(),
                d.completed.to_string(),
                d.quality_pct.to_string(),
            ]
        }),
    )
}

const SUMMARY_METRICS: [&str; 6] =
    ["completed", "pct_of_bound", "avg_workers", "avg_flow_time", "budget_pct", "quality_pct"];

fn summary_header(prefix: &[&str]) -> Vec<String> {
    let mut h: Vec<String> = prefix.iter().map(|s| s.to_string()).collect();
    h.extend(["algorithm".to_string(), "runs".to_string()]);
    for m in SUMMARY_METRICS {
        h.push(format!("{m}_mean"));
        h.push(format!("{m}_sd"));
    }
    h
}

fn summary_fields(s: &SummaryRow) -> Vec<String> {
    let mut f = vec![s.algorithm.to_string(), s.runs.to_string()];
    let stats = [
        Some(s.completed),
        s.pct_of_bound,
        Some(s.avg_workers),
        Some(s.avg_flow_time),
        Some(s.budget_pct),
        Some(s.quality_pct),
    ];
    for st in stats {
        f.push(opt(st.map(|m| m.mean)));
        f.push(opt(st.map(|m| m.sd)));
    }
    f
}

pub fn summary_csv(summary: &[SummaryRow]) -> Result<String> {
    let header = summary_header(&[]);
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    to_csv(&header, summary.iter().map(summary_fields))
}

pub fn failures_csv(failures: &[CellFailure]) -> Result<String> {
    to_csv(
        &["algorithm", "seed", "error"],
        failures
            .iter()
            .map(|f| vec![f.algorithm.map(|a| a.to_string()).unwrap_or_default(), f.seed.to_string(), f.error.clone()]),
    )
}

/// Sweep cells, tagged with the axis value.
pub fn sweep_csv(axis: SweepAxis, points: &[SweepPoint]) -> Result<String> {
    let mut header = vec!["axis", "value"];
    header.extend(RESULT_HEADER);
    to_csv(
        &header,
        points.iter().flat_map(|p| {
            p.output.rows.iter().map(move |r| {
                let mut f = vec![axis.name().to_string(), p.value.to_string()];
                f.extend(result_fields(r, true));
                f
            })
        }),
    )
}

pub fn sweep_summary_csv(axis: SweepAxis, points: &[SweepPoint]) -> Result<String> {
    let header = summary_header(&["axis", "value"]);
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    to_csv(
        &header,
        points.iter().flat_map(|p| {
            summarize(&p.output.rows).into_iter().map(move |s| {
                let mut f = vec![axis.name().to_string(), p.value.to_string()];
                f.extend(summary_fields(&s));
                f
            })
        }),
    )
}

fn sha256_hex(parts: &[&str]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update(p.as_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn stable_results(rows: &[ResultRow]) -> Result<String> {
    to_csv(&RESULT_HEADER[..8], rows.iter().map(|r| result_fields(r, false)))
}

/// SHA-256 over everything a benchmark reports except wall times.
pub fn benchmark_digest(output: &BenchmarkOutput) -> Result<String> {
    Ok(sha256_hex(&[&stable_results(&output.rows)?, &daily_csv(&output.daily)?, &failures_csv(&output.failures)?]))
}

pub fn sweep_digest(points: &[SweepPoint]) -> Result<String> {
    let mut parts = Vec::new();
    for p in points {
        parts.push(p.value.to_string());
        parts.push(stable_results(&p.output.rows)?);
        parts.push(failures_csv(&p.output.failures)?);
    }
    let refs: Vec<&str> = parts.iter().map(String::as_str).collect();
    Ok(sha256_hex(&refs))
}

/// Writes `results.csv`, `daily.csv`, `summary.csv`, `failures.csv` and
/// `digest.sha256` into `dir`, creating it if needed. Returns the digest.
pub fn write_benchmark(dir: &Path, output: &BenchmarkOutput) -> Result<String> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("results.csv"), results_csv(&output.rows)?)?;
    fs::write(dir.join("daily.csv"), daily_csv(&output.daily)?)?;
    fs::write(dir.join("summary.csv"), summary_csv(&summarize(&output.rows))?)?;
    fs::write(dir.join("failures.csv"), failures_csv(&output.failures)?)?;
    let digest = benchmark_digest(output)?;
    fs::write(dir.join("digest.sha256"), format!("{digest}\n"))?;
    Ok(digest)
}

/// Writes `sweep.csv`, `sweep_summary.csv`, `failures.csv` and
/// `digest.sha256` into `dir`. Returns the digest.
pub fn write_sweep(dir: &Path, axis: SweepAxis, points: &[SweepPoint]) -> Result<String> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("sweep.csv"), sweep_csv(axis, points)?)?;
    fs::write(dir.join("sweep_summary.csv"), sweep_summary_csv(axis, points)?)?;
    let failures: Vec<CellFailure> = points.iter().flat_map(|p| p.output.failures.iter().cloned()).collect();
    fs::write(dir.join("failures.csv"), failures_csv(&failures)?)?;
    let digest = sweep_digest(points)?;
    fs::write(dir.join("digest.sha256"), format!("{digest}\n"))?;
    Ok(digest)
}
