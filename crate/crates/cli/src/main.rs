//! `tas`: generate instances, run schedulers and oracles, and drive benchmarks.
//!
//! Exit codes: 0 success, 1 `validate` found violations, 2 usage or
//! configuration error, 3 internal contract violation.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tas_core::algorithms::{run_scheduler, Algorithm, SchedulerConfig};
use tas_core::experiment::{
    run_benchmark, run_sweep, summarize, write_benchmark, write_sweep, BenchmarkSpec, InstanceSource, SweepSpec,
};
use tas_core::knapsack::{upper_bound, DEFAULT_RESOLUTION};
use tas_core::model::{metrics, validate, Schedule};
use tas_core::simgen::{exhaustive_tas, generate, reduce_3dm, GenParams, ThreeDmInstance};
use tas_core::{Instance, TasError};

#[derive(Parser)]
#[command(name = "tas", version, about = "Task assignment and sequencing benchmark harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic instance.
    Gen(GenArgs),
    /// Run one scheduler (or the exhaustive oracle) on an instance.
    Run(RunArgs),
    /// Run a benchmark configuration and write CSV results.
    Bench(BatchArgs),
    /// Run a scalability sweep configuration and write CSV results.
    Sweep(BatchArgs),
    /// Print the per-job knapsack upper bound of an instance.
    Bound {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
        resolution: f64,
    },
    /// Build the scheduling instance encoding a 3-dimensional matching.
    Reduce3dm {
        #[arg(long)]
        u: usize,
        /// File holding a JSON array of [x, y, z] triples.
        #[arg(long)]
        triples: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a schedule against an instance; prints "feasible" or the violations.
    Validate {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        schedule: PathBuf,
    },
    /// Print the exact optimum of a small instance.
    Oracle {
        #[arg(long)]
        instance: PathBuf,
        /// Also write an optimal schedule here.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
}

#[derive(Args)]
struct GenArgs {
    /// GenParams JSON; explicit flags override its fields.
    #[arg(long)]
    params: Option<PathBuf>,
    /// Start from the one-tenth scale family instead of the full one.
    #[arg(long, conflicts_with = "params")]
    desk: bool,
    #[arg(long, env = "TAS_SEED")]
    seed: Option<u64>,
    #[arg(long)]
    t: Option<usize>,
    #[arg(long)]
    num_domains: Option<usize>,
    #[arg(long)]
    num_workers: Option<usize>,
    #[arg(long)]
    num_jobs: Option<usize>,
    #[arg(long)]
    lambda_workers: Option<f64>,
    #[arg(long)]
    mu_jobs: Option<f64>,
    #[arg(long)]
    cost_slope: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Scheduler name, or "oracle" for the exhaustive solver.
    #[arg(long)]
    algo: Option<String>,
    /// SchedulerConfig JSON; explicit flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, env = "TAS_SEED")]
    seed: Option<u64>,
    #[arg(long)]
    factor: Option<f64>,
    #[arg(long)]
    lookahead: Option<usize>,
    #[arg(long)]
    minavail: Option<usize>,
    #[arg(long)]
    resolution: Option<f64>,
    /// Schedule output.
    #[arg(long)]
    out: PathBuf,
    /// Metrics output; defaults to the schedule path with a `.metrics.json` suffix.
    #[arg(long)]
    metrics: Option<PathBuf>,
}

#[derive(Args)]
struct BatchArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the configuration's `out_dir`.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
}

enum Failure {
    Usage(String),
    Internal(String),
    Infeasible,
}

impl From<TasError> for Failure {
    fn from(e: TasError) -> Self {
        match e {
            TasError::Internal(_) => Failure::Internal(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

type CliResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(args) => gen(args),
        Command::Run(args) => run(args),
        Command::Bench(args) => bench(args),
        Command::Sweep(args) => sweep(args),
        Command::Bound { instance, resolution } => bound(&instance, resolution),
        Command::Reduce3dm { u, triples, out } => reduce(u, &triples, &out),
        Command::Validate { instance, schedule } => check(&instance, &schedule),
        Command::Oracle { instance, witness } => oracle(&instance, witness.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Infeasible) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

macro_rules! read_json {
    ($path:expr) => {{
        let path: &Path = $path;
        fs::read_to_string(path)
            .map_err(|e| e.to_string())
            .and_then(|text| serde_json::from_str(&text).map_err(|e| e.to_string()))
            .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
    }};
}

fn write(path: &Path, text: &str) -> CliResult {
    fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_instance(path: &Path) -> Result<Instance, Failure> {
    Instance::load(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn gen(a: GenArgs) -> CliResult {
    let mut p = match &a.params {
        Some(path) => read_json!(path)?,
        None if a.desk => GenParams::desk_scale(),
        None => GenParams::default(),
    };
    if let Some(v) = a.seed {
        p.seed = v;
    }
    macro_rules! override_fields {
        ($($f:ident),*) => { $(if let Some(v) = a.$f { p.$f = v; })* };
    }
    override_fields!(t, num_domains, num_workers, num_jobs, lambda_workers, mu_jobs, cost_slope);
    let inst = generate(&p)?;
    inst.save(&a.out)?;
    println!("{} jobs, {} workers, {} days", inst.num_jobs(), inst.num_workers(), inst.t);
    Ok(())
}

fn run(a: RunArgs) -> CliResult {
    let instance = load_instance(&a.instance)?;
    let mut config: SchedulerConfig = match &a.config {
        Some(path) => read_json!(path)?,
        None => SchedulerConfig::default(),
    };
    let oracle = a.algo.as_deref() == Some("oracle");
    match a.algo.as_deref() {
        Some("oracle") => {}
        Some(name) => config.algorithm = name.parse::<Algorithm>()?,
        None if a.config.is_some() => {}
        None => return Err(Failure::Usage("--algo is required without --config".into())),
    }
    if let Some(v) = a.seed {
        config.seed = v;
    }
    if let Some(v) = a.factor {
        config.factor = v;
    }
    if a.lookahead.is_some() {
        config.lookahead = a.lookahead;
    }
    if let Some(v) = a.minavail {
        config.minavail = v;
    }
    if let Some(v) = a.resolution {
        config.resolution = v;
    }
    config.validate()?;

    let schedule = if oracle { exhaustive_tas(&instance)?.1 } else { run_scheduler(&instance, &config)? };
    let bound = upper_bound(&instance, config.resolution)?;
    let report = metrics(&instance, &schedule, Some(bound))?;

    schedule.save(&a.out)?;
    let metrics_path = a.metrics.unwrap_or_else(|| {
        let mut name = a.out.clone().into_os_string();
        name.push(".metrics.json");
        PathBuf::from(name)
    });
    let text = serde_json::to_string_pretty(&report).map_err(TasError::from)?;
    write(&metrics_path, &text)?;
    let name = if oracle { "oracle".to_string() } else { config.algorithm.to_string() };
    println!("{name}: completed={} bound={bound}", report.completed);
    Ok(())
}

fn thread_pool(jobs: Option<usize>) -> Result<rayon::ThreadPool, Failure> {
    if jobs == Some(0) {
        return Err(Failure::Usage("--jobs must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new().num_threads(jobs.unwrap_or(0)).build().map_err(|e| Failure::Internal(e.to_string()))
}

/// Relative instance paths in a configuration are taken relative to the
/// configuration file.
fn resolve(spec: &mut BenchmarkSpec, config: &Path) {
    if let InstanceSource::File(path) = &mut spec.instance {
        if path.is_relative() {
            if let Some(dir) = config.parent() {
                *path = dir.join(&*path);
            }
        }
    }
}

fn out_dir(flag: Option<PathBuf>, spec: &BenchmarkSpec) -> Result<PathBuf, Failure> {
    flag.or_else(|| spec.out_dir.clone())
        .ok_or_else(|| Failure::Usage("no output directory: pass --out-dir or set out_dir".into()))
}

fn report_failures<'a>(failures: impl IntoIterator<Item = &'a tas_core::experiment::CellFailure>) -> usize {
    let mut n = 0;
    for f in failures {
        let algo = f.algorithm.map_or("<instance>".to_string(), |a| a.to_string());
        eprintln!("cell {algo} seed {} failed: {}", f.seed, f.error);
        n += 1;
    }
    n
}

fn bench(a: BatchArgs) -> CliResult {
    let mut spec: BenchmarkSpec = read_json!(&a.config)?;
    resolve(&mut spec, &a.config);
    let dir = out_dir(a.out_dir, &spec)?;
    let output = thread_pool(a.jobs)?.install(|| run_benchmark(&spec))?;
    let failed = report_failures(&output.failures);
    let digest = write_benchmark(&dir, &output)?;
    for s in summarize(&output.rows) {
        println!(
            "{:<24} completed {:>9.2} ± {:<7.2} quality {:>7.2}%",
            s.algorithm.to_string(),
            s.completed.mean,
            s.completed.sd,
            s.quality_pct.mean
        );
    }
    println!("digest {digest}");
    if output.rows.is_empty() && failed > 0 {
        return Err(Failure::Usage("every benchmark cell failed".into()));
    }
    Ok(())
}

fn sweep(a: BatchArgs) -> CliResult {
    let mut spec: SweepSpec = read_json!(&a.config)?;
    resolve(&mut spec.base, &a.config);
    let dir = out_dir(a.out_dir, &spec.base)?;
    let points = thread_pool(a.jobs)?.install(|| run_sweep(&spec))?;
    let failed = report_failures(points.iter().flat_map(|p| &p.output.failures));
    let digest = write_sweep(&dir, spec.axis, &points)?;
    for p in &points {
        for s in summarize(&p.output.rows) {
            println!(
                "{}={:<6} {:<24} completed {:>9.2} workers {:>6.2}",
                spec.axis.name(),
                p.value,
                s.algorithm.to_string(),
                s.completed.mean,
                s.avg_workers.mean
            );
        }
    }
    println!("digest {digest}");
    if points.iter().all(|p| p.output.rows.is_empty()) && failed > 0 {
        return Err(Failure::Usage("every sweep cell failed".into()));
    }
    Ok(())
}

fn bound(instance: &Path, resolution: f64) -> CliResult {
    let inst = load_instance(instance)?;
    println!("{}", upper_bound(&inst, resolution)?);
    Ok(())
}

fn reduce(u: usize, triples: &Path, out: &Path) -> CliResult {
    let list: Vec<[usize; 3]> = read_json!(triples)?;
    let tdm = ThreeDmInstance::new(u, list)?;
    reduce_3dm(&tdm).save(out)?;
    Ok(())
}

fn check(instance: &Path, schedule: &Path) -> CliResult {
    let inst = load_instance(instance)?;
    let sched = Schedule::load(schedule).map_err(|e| Failure::Usage(format!("{}: {e}", schedule.display())))?;
    let violations = validate(&inst, &sched)?;
    if violations.is_empty() {
        println!("feasible");
        return Ok(());
    }
    println!("infeasible");
    for v in &violations {
        println!("  {v}");
    }
    Err(Failure::Infeasible)
}

fn oracle(instance: &Path, witness: Option<&Path>) -> CliResult {
    let inst = load_instance(instance)?;
    let (best, schedule) = exhaustive_tas(&inst)?;
    if let Some(path) = witness {
        schedule.save(path)?;
    }
    println!("{best}");
    Ok(())
}
