//! Method x grid sweeps and their CSV / gnuplot outputs.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use lindblad_rand_core::formulas::{
    approx_channel, derive_seed, error_bound_with, gate_count, mixture_batches, step_count_with, Implementation,
    MethodId,
};
use lindblad_rand_core::lindblad::exact_channel;
use lindblad_rand_core::linalg::trace_norm;
use lindblad_rand_core::norms::{diamond_norm_report, generator_stats_with, GeneratorStats};
use lindblad_rand_core::{CMatrix, Channel, Error as CoreError, Generator, State, Tolerances};
use rayon::prelude::*;

use crate::config::{ExperimentSpec, Grid, STAT_BATCHES};
use crate::InputError;

pub const CSV_HEADER: [&str; 9] =
    ["method", "n", "epsilon_bound", "epsilon_empirical", "trace_dist", "gates_cs", "gates_qf", "status", "wall_time_ms"];

pub const THREADS_ENV: &str = "LINDBLAD_RAND_THREADS";

#[derive(Debug, Clone, PartialEq)]
pub enum Status {
    Ok,
    BoundViolated,
    NotCptp,
    Failed(String),
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Ok => f.write_str("ok"),
            Status::BoundViolated => f.write_str("bound_violated"),
            Status::NotCptp => f.write_str("not_cptp"),
            Status::Failed(msg) => write!(f, "error: {msg}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub method: MethodId,
    pub n: usize,
    pub epsilon_bound: f64,
    pub epsilon_empirical: Option<f64>,
    /// Standard error over batch means; sampled records only.
    pub epsilon_stderr: Option<f64>,
    pub trace_dist: Option<f64>,
    pub gates_cs: Option<u64>,
    pub gates_qf: Option<u64>,
    pub cptp: Option<bool>,
    pub status: Status,
    pub wall_time_ms: u64,
}

#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub records: Vec<SweepRecord>,
    pub stats: GeneratorStats,
    pub csv: PathBuf,
    pub stderr_csv: Option<PathBuf>,
    pub dat: PathBuf,
    pub script: PathBuf,
}

/// Worker cap from `LINDBLAD_RAND_THREADS`, falling back to rayon's default.
pub fn worker_count() -> Result<usize, InputError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(rayon::current_num_threads()),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(InputError(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))),
        },
    }
}

/// Runs `f` on a pool capped by [`worker_count`].
pub fn with_worker_pool<R: Send>(f: impl FnOnce() -> R + Send) -> Result<R> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(worker_count()?).build()?;
    Ok(pool.install(f))
}

/// Initial state of the spec: basis state `initial_state`, default `|d-1>`.
pub fn initial_state(spec: &ExperimentSpec, dim: usize) -> Result<State, InputError> {
    let i = spec.initial_state.unwrap_or(dim - 1);
    State::basis(dim, i).map_err(|e| InputError(format!("experiment {}: initial_state: {e}", spec.name)))
}

struct Shared<'a> {
    spec: &'a ExperimentSpec,
    gen: &'a Generator,
    exact: &'a Channel,
    rho0: &'a State,
    exact_out: CMatrix,
    stats: GeneratorStats,
}

fn record_seed(seed: u64, method: MethodId, index: usize) -> u64 {
    let m = MethodId::ALL.iter().position(|&x| x == method).unwrap_or(0) as u64;
    derive_seed(derive_seed(seed, m), index as u64)
}

fn evaluate(ctx: &Shared, method: MethodId, n: usize, seed: u64) -> Result<SweepRecord, CoreError> {
    let m = ctx.gen.m_total();
    let epsilon_bound = error_bound_with(method, &ctx.stats, ctx.spec.t, n, ctx.spec.bounds);
    let gates_cs = gate_count(method, m, n, Implementation::ClassicalSampling)?;
    let gates_qf = match gate_count(method, m, n, Implementation::QuantumForking) {
        Ok(g) => Some(g),
        Err(CoreError::Unsupported(_)) => None,
        Err(e) => return Err(e),
    };
    let (approx, stderr) = if ctx.spec.sampled && method.is_randomized() {
        let (mean, batches) = mixture_batches(method, ctx.gen, ctx.spec.t, n, ctx.spec.trajectories, seed, STAT_BATCHES)?;
        let errs = batches
            .iter()
            .map(|b| diamond_norm_report(&ctx.exact.sub(b)?).map(|r| r.value))
            .collect::<Result<Vec<_>, _>>()?;
        let k = errs.len() as f64;
        let mean_err = errs.iter().sum::<f64>() / k;
        let var = errs.iter().map(|e| (e - mean_err).powi(2)).sum::<f64>() / (k - 1.0);
        (mean, Some((var / k).sqrt()))
    } else {
        (approx_channel(method, ctx.gen, ctx.spec.t, n)?, None)
    };
    let empirical = diamond_norm_report(&ctx.exact.sub(&approx)?)?.value;
    let out = approx.apply_operator(ctx.rho0.matrix())?;
    let trace_dist = 0.5 * trace_norm(&(&ctx.exact_out - out))?;
    let cptp = approx.is_cptp(Tolerances::DEFAULT.cptp).cptp;
    let allowance = Tolerances::DEFAULT.inequality_slack + 3.0 * stderr.unwrap_or(0.0);
    let status = if !cptp {
        Status::NotCptp
    } else if empirical > epsilon_bound + allowance {
        Status::BoundViolated
    } else {
        Status::Ok
    };
    Ok(SweepRecord {
        method,
        n,
        epsilon_bound,
        epsilon_empirical: Some(empirical),
        epsilon_stderr: stderr,
        trace_dist: Some(trace_dist),
        gates_cs: Some(gates_cs),
        gates_qf,
        cptp: Some(cptp),
        status,
        wall_time_ms: 0,
    })
}

fn failed(method: MethodId, n: usize, epsilon_bound: f64, msg: String) -> SweepRecord {
    SweepRecord {
        method,
        n,
        epsilon_bound,
        epsilon_empirical: None,
        epsilon_stderr: None,
        trace_dist: None,
        gates_cs: None,
        gates_qf: None,
        cptp: None,
        status: Status::Failed(msg),
        wall_time_ms: 0,
    }
}

/// Computes all records of a spec without touching the filesystem.
/// Records come back in method-major grid order.
pub fn sweep_records(spec: &ExperimentSpec, gen: &Generator) -> Result<(Vec<SweepRecord>, GeneratorStats)> {
    let stats = generator_stats_with(gen, spec.gamma).context("computing generator statistics")?;
    let exact = exact_channel(gen, spec.t)?;
    let rho0 = initial_state(spec, gen.dim())?;
    let exact_out = exact.apply_operator(rho0.matrix())?;
    let ctx = Shared { spec, gen, exact: &exact, rho0: &rho0, exact_out, stats };

    let mut tasks = Vec::new();
    for &method in &spec.methods {
        for index in 0..spec.grid.len() {
            tasks.push((method, index));
        }
    }
    let records = tasks
        .par_iter()
        .map(|&(method, index)| {
            let start = Instant::now();
            let n = match &spec.grid {
                Grid::Steps(v) => Ok(v[index]),
                Grid::Epsilon(v) => step_count_with(method, &stats, spec.t, v[index], spec.bounds).map(|s| s.n_steps),
            };
            let mut rec = match n {
                Err(e) => failed(method, 0, f64::NAN, e.to_string()),
                Ok(n) => evaluate(&ctx, method, n, record_seed(spec.seed, method, index)).unwrap_or_else(|e| {
                    failed(method, n, error_bound_with(method, &stats, spec.t, n, spec.bounds), e.to_string())
                }),
            };
            rec.wall_time_ms = start.elapsed().as_millis() as u64;
            rec
        })
        .collect();
    Ok((records, stats))
}

fn num(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.10e}")).unwrap_or_default()
}

fn int(x: Option<u64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn write_csv<W: Write>(out: W, records: &[SweepRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record([
            r.method.name().to_string(),
            r.n.to_string(),
            num(Some(r.epsilon_bound)),
            num(r.epsilon_empirical),
            num(r.trace_dist),
            int(r.gates_cs),
            int(r.gates_qf),
            r.status.to_string(),
            r.wall_time_ms.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_stderr_csv<W: Write>(out: W, records: &[SweepRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["method", "n", "epsilon_empirical", "epsilon_stderr", "batches"])?;
    for r in records.iter().filter(|r| r.epsilon_stderr.is_some()) {
        w.write_record([
            r.method.name().to_string(),
            r.n.to_string(),
            num(r.epsilon_empirical),
            num(r.epsilon_stderr),
            STAT_BATCHES.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One gnuplot data block per method: `n epsilon_empirical epsilon_bound`.
pub fn write_dat<W: Write>(mut out: W, methods: &[MethodId], records: &[SweepRecord]) -> Result<()> {
    for (i, m) in methods.iter().enumerate() {
        if i > 0 {
            writeln!(out, "\n")?;
        }
        writeln!(out, "# {m}")?;
        writeln!(out, "# n epsilon_empirical epsilon_bound")?;
        for r in records.iter().filter(|r| r.method == *m) {
            if let Some(e) = r.epsilon_empirical {
                writeln!(out, "{} {e:.10e} {:.10e}", r.n, r.epsilon_bound)?;
            }
        }
    }
    Ok(())
}

fn script(name: &str, methods: &[MethodId]) -> String {
    let mut s = format!(
        "set logscale xy\nset xlabel \"N\"\nset ylabel \"diamond-norm error\"\nset key outside\nset title \"{name}\"\nplot \\\n"
    );
    let lines: Vec<String> = methods
        .iter()
        .enumerate()
        .map(|(i, m)| {
            format!(
                "  '{name}.dat' index {i} using 1:2 with linespoints lc {c} title \"{m}\", \\\n  '{name}.dat' index {i} using 1:3 with lines dt 2 lc {c} title \"{m} bound\"",
                c = i + 1
            )
        })
        .collect();
    s.push_str(&lines.join(", \\\n"));
    s.push('\n');
    s
}

fn create(path: &Path) -> Result<fs::File> {
    fs::File::create(path).with_context(|| format!("creating {}", path.display()))
}

/// Runs the sweep on the worker pool and writes `<name>.csv`, `<name>.dat`,
/// `<name>.gp` and, in sampled mode, `<name>_stderr.csv` under `spec.outputs`.
pub fn run_sweep(spec: &ExperimentSpec) -> Result<SweepOutput> {
    let gen = spec.load_model()?;
    let (records, stats) = with_worker_pool(|| sweep_records(spec, &gen))??;
    fs::create_dir_all(&spec.outputs).with_context(|| format!("creating {}", spec.outputs.display()))?;
    let path = |suffix: &str| spec.outputs.join(format!("{}{suffix}", spec.name));
    let csv = path(".csv");
    write_csv(create(&csv)?, &records)?;
    let stderr_csv = if spec.sampled {
        let p = path("_stderr.csv");
        write_stderr_csv(create(&p)?, &records)?;
        Some(p)
    } else {
        None
    };
    let dat = path(".dat");
    write_dat(create(&dat)?, &spec.methods, &records)?;
    let script_path = path(".gp");
    fs::write(&script_path, script(&spec.name, &spec.methods))?;
    Ok(SweepOutput { records, stats, csv, stderr_csv, dat, script: script_path })
}
