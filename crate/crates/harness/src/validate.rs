//! Self-contained property suite behind `lindblad-rand validate`.

use std::fmt::Write as _;
use std::io::Write;

use anyhow::{bail, Result};
use lindblad_rand_core::forking::{cswap_channel, fork_qdrift_run, fork_s1_run, ForkLayout};
use lindblad_rand_core::formulas::{
    approx_channel, gate_count, gateset_channel, mixture_estimate, qdrift_exact, qdrift_omega, qdrift_probs,
    restricted_sum_closed_form, restricted_sum_enumerated, s1_ran_exact, s2_with_coefficient, sample_gateset_n,
    step_count, ChannelStep, Direction, Implementation, MethodId,
};
use lindblad_rand_core::lindblad::{constituent_channel, exact_channel, full_liouvillian};
use lindblad_rand_core::linalg::trace_distance;
use lindblad_rand_core::norms::{diamond_norm_report, generator_stats, lemma1_check, GeneratorStats};
use lindblad_rand_core::{c, CMatrix, CVector, Channel, Generator, State, Tolerances};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::fit::log_log_slope;
use crate::models;
use crate::table1::{table1_report, Gates, Table1Input, COMPLEXITY_QDRIFT_CS, COMPLEXITY_S1_DET, INFEASIBLE};

pub const SUITES: [&str; 9] =
    ["norms", "lindblad", "formulas", "forking", "lemma1", "restricted", "sampling", "gatecount", "mutation"];
pub const DEFAULT_SEED: u64 = 42;

/// Grid shared by the bound and slope checks.
pub const N_GRID: [usize; 5] = [4, 8, 16, 32, 64];
/// Allowed distance of a fitted slope from the theoretical order.
pub const SLOPE_TOLERANCE: f64 = 0.15;
pub const FORK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidateOptions {
    pub seed: u64,
    /// Half-step coefficient of the second-order formula in the slope check.
    /// Anything but `0.5` is a deliberately broken formula.
    pub s2_coefficient: f64,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        Self { seed: DEFAULT_SEED, s2_coefficient: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub threshold: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn render_text(&self) -> String {
        let nw = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(5).max(5);
        let mut s = String::new();
        let _ = writeln!(s, "{:<10}  {:<nw$}  {:>12}  {:>12}  result", "suite", "check", "value", "threshold");
        for ch in &self.checks {
            let _ = write!(
                s,
                "{:<10}  {:<nw$}  {:>12.4e}  {:>12.4e}  {}",
                ch.suite,
                ch.name,
                ch.value,
                ch.threshold,
                if ch.passed { "pass" } else { "FAIL" }
            );
            if !ch.detail.is_empty() {
                let _ = write!(s, "  ({})", ch.detail);
            }
            s.push('\n');
        }
        let failed = self.failures().count();
        let _ = writeln!(s, "{} checks, {} failed", self.checks.len(), failed);
        s
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["suite", "check", "passed", "value", "threshold", "detail"])?;
        for ch in &self.checks {
            w.write_record([
                ch.suite.to_string(),
                ch.name.clone(),
                ch.passed.to_string(),
                format!("{:.10e}", ch.value),
                format!("{:.10e}", ch.threshold),
                ch.detail.clone(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

struct Suite {
    name: &'static str,
    checks: Vec<Check>,
}

impl Suite {
    fn new(name: &'static str) -> Self {
        Self { name, checks: Vec::new() }
    }

    fn push(&mut self, name: impl Into<String>, passed: bool, value: f64, threshold: f64, detail: String) {
        self.checks.push(Check { suite: self.name, name: name.into(), passed, value, threshold, detail });
    }

    /// `value <= limit`.
    fn at_most(&mut self, name: impl Into<String>, value: f64, limit: f64) {
        self.push(name, value <= limit, value, limit, String::new());
    }

    /// `|value - target| <= tol`; the reported value is `value`.
    fn near(&mut self, name: impl Into<String>, value: f64, target: f64, tol: f64) {
        self.push(name, (value - target).abs() <= tol, value, tol, format!("target {target}"));
    }

    fn holds(&mut self, name: impl Into<String>, ok: bool, detail: String) {
        self.push(name, ok, ok as u8 as f64, 1.0, detail);
    }

    /// Records a failing check instead of propagating `r`'s error.
    fn attempt<T, E: std::fmt::Display>(&mut self, name: &str, r: Result<T, E>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.push(name, false, f64::NAN, f64::NAN, format!("error: {e}"));
                None
            }
        }
    }
}

pub fn validate_all(opts: &ValidateOptions) -> Result<Report> {
    let mut report = Report::default();
    for s in SUITES {
        report.checks.extend(validate_suite(s, opts)?.checks);
    }
    Ok(report)
}

pub fn validate_suite(name: &str, opts: &ValidateOptions) -> Result<Report> {
    let suite = match name {
        "norms" => norms_suite(),
        "lindblad" => lindblad_suite(),
        "formulas" => formulas_suite(opts),
        "forking" => forking_suite(opts),
        "lemma1" => lemma1_suite(opts),
        "restricted" => restricted_suite(),
        "sampling" => sampling_suite(opts),
        "gatecount" => gatecount_suite(),
        "mutation" => mutation_suite(),
        other => bail!("unknown suite {other:?} (known: {})", SUITES.join(", ")),
    };
    Ok(Report { checks: suite.checks })
}

/// The models every bound is checked on.
fn bound_models() -> Result<Vec<(&'static str, Generator)>> {
    Ok(vec![
        ("amp_damp", models::amp_damp(1.0)?),
        ("qubit3", models::qubit3(1.0, 0.5)?),
        ("random(2,3,7)", models::random(2, 3, 7)?),
    ])
}

fn library() -> Result<Vec<(&'static str, Generator)>> {
    let mut v = bound_models()?;
    v.push(("two_qubit_xy", models::two_qubit_xy(1.0, 0.5)?));
    v.push(("random(3,4,11)", models::random(3, 4, 11)?));
    Ok(v)
}

fn unitary_pair(theta: f64) -> Result<Channel> {
    let v = CMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(theta.cos(), theta.sin())]);
    Ok(Channel::identity(2).sub(&Channel::conjugation(&v)?)?)
}

fn norms_suite() -> Suite {
    let mut s = Suite::new("norms");
    let mut max_gap: f64 = 0.0;
    let mut solve = |s: &mut Suite, name: &str, ch: &Channel| -> Option<f64> {
        let r = s.attempt(name, diamond_norm_report(ch))?;
        max_gap = max_gap.max(r.gap);
        Some(r.value)
    };
    for d in [2, 3, 4] {
        let name = format!("identity d={d} has norm 1");
        if let Some(v) = solve(&mut s, &name, &Channel::identity(d)) {
            s.near(name, v, 1.0, 1e-6);
        }
    }
    match library() {
        Ok(lib) => {
            for (label, g) in &lib {
                let name = format!("exact channel {label} has norm 1");
                if let Some(ch) = s.attempt(&name, exact_channel(g, 1.0)) {
                    if let Some(v) = solve(&mut s, &name, &ch) {
                        s.near(name, v, 1.0, 1e-6);
                    }
                }
                let name = format!("||L|| <= M Lambda on {label}");
                if let Some(st) = s.attempt(&name, generator_stats(g)) {
                    if let Some(v) = solve(&mut s, &name, &full_liouvillian(g)) {
                        s.at_most(name, v, st.m_total as f64 * st.lambda + 1e-6);
                    }
                }
            }
        }
        Err(e) => s.holds("library models", false, e.to_string()),
    }
    if let Some(v) = solve(&mut s, "zero map", &Channel::zero(2)) {
        s.near("zero map has norm 0", v, 0.0, 1e-12);
    }
    for theta in [std::f64::consts::FRAC_PI_2, 0.3, 2.0] {
        let name = format!("unitary pair theta={theta:.4}");
        if let Some(diff) = s.attempt(&name, unitary_pair(theta)) {
            if let Some(v) = solve(&mut s, &name, &diff) {
                s.near(name, v, 2.0 * (theta / 2.0).sin(), 1e-6);
            }
        }
    }
    // subadditivity and homogeneity on differences of channels
    let pairs: Result<Vec<(Channel, Channel)>> = (0..3u64)
        .map(|i| {
            let a = exact_channel(&models::random(2, 2, 100 + i)?, 0.5)?;
            let b = exact_channel(&models::random(2, 3, 200 + i)?, 0.8)?;
            let cc = exact_channel(&models::random(2, 2, 300 + i)?, 0.3)?;
            Ok((a.sub(&b)?, b.sub(&cc)?))
        })
        .collect();
    if let Some(pairs) = s.attempt("random differences", pairs) {
        for (i, (x, y)) in pairs.iter().enumerate() {
            let sum = x.add(y).expect("same dimension");
            let (Some(nx), Some(ny), Some(ns)) =
                (solve(&mut s, "subadditivity", x), solve(&mut s, "subadditivity", y), solve(&mut s, "subadditivity", &sum))
            else {
                continue;
            };
            s.at_most(format!("subadditivity pair {i}"), ns - nx - ny, 1e-6);
            if let Some(n3) = solve(&mut s, "homogeneity", &x.scale(-2.5)) {
                s.near(format!("homogeneity pair {i}"), n3, 2.5 * nx, 1e-6);
            }
        }
    }
    s.at_most("largest duality gap", max_gap, Tolerances::DEFAULT.duality_gap);
    s
}

fn lindblad_suite() -> Suite {
    let mut s = Suite::new("lindblad");
    let tol = Tolerances::DEFAULT.cptp;
    let lib = match library() {
        Ok(l) => l,
        Err(e) => {
            s.holds("library models", false, e.to_string());
            return s;
        }
    };
    for (label, g) in &lib {
        for t in [0.1, 1.0] {
            let name = format!("exact channel {label} t={t} is CPTP");
            if let Some(ch) = s.attempt(&name, exact_channel(g, t)) {
                let r = ch.is_cptp(tol);
                s.push(name, r.cptp, r.min_choi_eigenvalue, -tol, String::new());
            }
        }
        let name = format!("semigroup property {label}");
        let parts = exact_channel(g, 0.3).and_then(|a| Ok((a, exact_channel(g, 0.7)?, exact_channel(g, 1.0)?)));
        if let Some((a, b, whole)) = s.attempt(&name, parts) {
            let composed = a.then(&b).expect("same dimension");
            s.at_most(name, composed.max_abs_diff(&whole), 1e-10);
        }
        let name = format!("T(0) is the identity on {label}");
        if let Some(id) = s.attempt(&name, exact_channel(g, 0.0)) {
            s.at_most(name, id.max_abs_diff(&Channel::identity(g.dim())), 1e-12);
        }
        let name = format!("generator {label} annihilates the trace");
        let l = full_liouvillian(g);
        let d = g.dim();
        let mut max_dev: f64 = 0.0;
        for col in 0..d * d {
            let mut tr = c(0., 0.);
            for i in 0..d {
                tr += l.matrix()[(i + d * i, col)];
            }
            max_dev = max_dev.max(tr.norm());
        }
        s.at_most(name, max_dev, 1e-12);
        for k in 1..=g.m_total() {
            let name = format!("term {k} of {label}: exp is CPTP");
            let ch = constituent_channel(g, k, 0.5, true);
            if let Some(ch) = s.attempt(&name, ch) {
                let r = ch.is_cptp(tol);
                s.push(name, r.cptp, r.min_choi_eigenvalue, -tol, String::new());
            }
        }
    }
    s
}

fn approx_for_check(method: MethodId, g: &Generator, t: f64, n: usize, s2_coefficient: f64) -> Result<Channel> {
    Ok(match method {
        MethodId::S2Det => {
            let id: Vec<usize> = (1..=g.m_total()).collect();
            s2_with_coefficient(g, t / n as f64, &id, s2_coefficient)?.pow(n)
        }
        _ => approx_channel(method, g, t, n)?,
    })
}

struct Point {
    method: MethodId,
    n: usize,
    empirical: f64,
    bound: f64,
    cptp: bool,
}

fn sweep_points(g: &Generator, stats: &GeneratorStats, s2_coefficient: f64) -> Result<Vec<Point>> {
    let exact = exact_channel(g, 1.0)?;
    let tasks: Vec<(MethodId, usize)> = MethodId::ALL.iter().flat_map(|&m| N_GRID.iter().map(move |&n| (m, n))).collect();
    tasks
        .par_iter()
        .map(|&(method, n)| {
            let approx = approx_for_check(method, g, 1.0, n, s2_coefficient)?;
            let empirical = diamond_norm_report(&exact.sub(&approx)?)?.value;
            let bound = lindblad_rand_core::formulas::error_bound(method, stats, 1.0, n);
            Ok(Point { method, n, empirical, bound, cptp: approx.is_cptp(Tolerances::DEFAULT.cptp).cptp })
        })
        .collect()
}

fn slope_of(points: &[Point], method: MethodId) -> Result<f64> {
    let pts: Vec<(f64, f64)> = points.iter().filter(|p| p.method == method).map(|p| (p.n as f64, p.empirical)).collect();
    log_log_slope(&pts)
}

fn target_slope(method: MethodId) -> f64 {
    -(method.order() as f64)
}

fn formulas_suite(opts: &ValidateOptions) -> Suite {
    let mut s = Suite::new("formulas");
    let models = match bound_models() {
        Ok(m) => m,
        Err(e) => {
            s.holds("models", false, e.to_string());
            return s;
        }
    };
    for (label, g) in &models {
        let name = format!("sweep on {label}");
        let Some(stats) = s.attempt(&name, generator_stats(g)) else { continue };
        let Some(points) = s.attempt(&name, sweep_points(g, &stats, opts.s2_coefficient)) else { continue };
        for m in MethodId::ALL {
            let pts: Vec<&Point> = points.iter().filter(|p| p.method == m).collect();
            let worst = pts.iter().map(|p| p.empirical / p.bound).fold(0.0, f64::max);
            let violations = pts.iter().filter(|p| p.empirical > p.bound + Tolerances::DEFAULT.inequality_slack).count();
            s.push(
                format!("{m} bound on {label}"),
                violations == 0,
                worst,
                1.0,
                format!("max empirical/bound over N in {N_GRID:?}"),
            );
        }
        let not_cptp = points.iter().filter(|p| !p.cptp).count();
        s.at_most(format!("non-CPTP approximations on {label}"), not_cptp as f64, 0.0);
        // commuting models converge at rounding level, so slopes only mean something on the random one
        if label.starts_with("random") {
            for m in MethodId::ALL {
                let name = format!("{m} slope on {label}");
                if let Some(slope) = s.attempt(&name, slope_of(&points, m)) {
                    s.near(name, slope, target_slope(m), SLOPE_TOLERANCE);
                }
            }
        }
    }
    let st = |lambda, omega, gamma, m| GeneratorStats { lambda, omega, gamma_total: gamma, m_total: m };
    for (method, stats, eps, expect) in [
        (MethodId::S1Det, st(1.0, 0.0, 0.0, 2), 0.1, 40),
        (MethodId::S1Ran, st(1.0, 0.0, 0.0, 4), 0.01, 47),
        (MethodId::Qdrift, st(0.0, 1.0, 2.0, 1), 0.1, 40),
    ] {
        let name = format!("step_count {method} eps={eps} gives {expect}");
        if let Some(sb) = s.attempt(&name, step_count(method, &stats, 1.0, eps)) {
            s.push(name, sb.n_steps == expect, sb.n_steps as f64, expect as f64, String::new());
        }
    }
    s
}

fn random_pure(d: usize, rng: &mut ChaCha8Rng) -> Result<State> {
    let v = CVector::from_fn(d, |_, _| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    Ok(State::pure(&(&v / c(v.norm(), 0.)))?)
}

fn forking_suite(opts: &ValidateOptions) -> Suite {
    let mut s = Suite::new("forking");
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let gens = [
        ("amp_damp", models::amp_damp(1.0)),
        ("qubit3", models::qubit3(1.0, 0.5)),
        ("random(2,3,7)", models::random(2, 3, 7)),
        ("random(2,2,seed)", models::random(2, 2, opts.seed)),
    ];
    let t = 1.0;
    for (label, g) in gens {
        let Some(g) = s.attempt(label, g) else { continue };
        let Some(stats) = s.attempt(label, generator_stats(&g)) else { continue };
        let rho0 = State::basis(2, 1).expect("valid basis state");
        let phi = match random_pure(2, &mut rng) {
            Ok(p) => p,
            Err(e) => {
                s.holds(label, false, e.to_string());
                continue;
            }
        };
        let exact_out = match exact_channel(&g, t).and_then(|e| e.apply(&rho0)) {
            Ok(o) => o,
            Err(e) => {
                s.holds(label, false, e.to_string());
                continue;
            }
        };
        let m = g.m_total() as f64;
        for n in [1usize, 4, 8] {
            let name = format!("forked S1 equals mixture on {label} N={n}");
            let run = fork_s1_run(&g, t, n, &rho0, &phi).and_then(|f| {
                let mix = s1_ran_exact(&g, t / n as f64)?.pow(n).apply(&rho0)?;
                Ok((trace_distance(&f, &mix)?, trace_distance(&f, &exact_out)?))
            });
            if let Some((eq, err)) = s.attempt(&name, run) {
                s.at_most(name, eq, FORK_TOLERANCE);
                s.at_most(format!("forked S1 bound on {label} N={n}"), err, (m * t * stats.lambda).powi(3) / (6.0 * (n * n) as f64));
            }
            let name = format!("forked QDRIFT equals mixture on {label} N={n}");
            let run = fork_qdrift_run(&g, t, n, &rho0, &phi).and_then(|f| {
                let mix = qdrift_exact(&g, qdrift_omega(&g, t, n)?)?.pow(n).apply(&rho0)?;
                Ok((trace_distance(&f, &mix)?, trace_distance(&f, &exact_out)?))
            });
            if let Some((eq, err)) = s.attempt(&name, run) {
                s.at_most(name, eq, FORK_TOLERANCE);
                s.at_most(
                    format!("forked QDRIFT bound on {label} N={n}"),
                    err,
                    (t * stats.gamma_total * stats.omega).powi(2) / (2.0 * n as f64),
                );
            }
        }
    }
    let name = "controlled swap is an involution";
    let twice = ForkLayout::qdrift(2, 3).and_then(|l| {
        let cs = cswap_channel::<f64>(&l, 1, 1, 2)?;
        Ok(cs.then(&cs)?.max_abs_diff(&Channel::identity(l.total_dim())))
    });
    if let Some(dev) = s.attempt(name, twice) {
        s.at_most(name, dev, 1e-14);
    }
    s
}

/// Seeded pair of qubit channels; odd pairs are close, even pairs unrelated.
fn channel_pair(seed: u64, i: u64) -> Result<(Channel, Channel)> {
    let mut rng = ChaCha8Rng::seed_from_u64(lindblad_rand_core::formulas::derive_seed(seed, i));
    let g = models::random(2, rng.random_range(1..=3), rng.random())?;
    let t = rng.random_range(0.1..1.5);
    let a = exact_channel(&g, t)?;
    let b = if i % 2 == 1 {
        approx_channel(MethodId::S1Det, &g, t, 1)?
    } else {
        exact_channel(&models::random(2, rng.random_range(1..=3), rng.random())?, rng.random_range(0.1..1.5))?
    };
    Ok((a, b))
}

fn lemma1_suite(opts: &ValidateOptions) -> Suite {
    let mut s = Suite::new("lemma1");
    type Row = (u64, usize, Result<(f64, f64, bool)>);
    let results: Vec<Row> = (0..20u64)
        .into_par_iter()
        .flat_map_iter(|i| {
            let pair = channel_pair(opts.seed, i);
            [2usize, 4, 8].into_iter().map(move |n| {
                let r = match &pair {
                    Ok((a, b)) => lemma1_check(a, b, n).map(|r| (r.lhs, n as f64 * r.one_step, r.holds)).map_err(Into::into),
                    Err(e) => Err(anyhow::anyhow!("{e}")),
                };
                (i, n, r)
            })
        })
        .collect();
    for (i, n, r) in results {
        let name = format!("pair {i} N={n}");
        if let Some((lhs, rhs, holds)) = s.attempt(&name, r) {
            s.push(name, holds, lhs, rhs + Tolerances::DEFAULT.inequality_slack, String::new());
        }
    }
    s
}

fn restricted_suite() -> Suite {
    let mut s = Suite::new("restricted");
    for (m, p, x) in [(2usize, 3u32, 1.0), (3, 4, 0.5), (4, 2, 0.3)] {
        let e = restricted_sum_enumerated(m, p, x);
        let closed = restricted_sum_closed_form(m, p, x);
        s.near(format!("M={m} p={p} x={x} enumeration"), e, closed, 1e-12);
    }
    s.near("M=3 p=4 x=0.5 value", restricted_sum_enumerated(3, 4, 0.5), 0.2109375, 1e-12);
    s
}

fn sampling_suite(opts: &ValidateOptions) -> Suite {
    let mut s = Suite::new("sampling");
    let Some(amp) = s.attempt("amp_damp", models::amp_damp(1.0)) else { return s };
    let name = "QDRIFT r=4096 N=16 mixture near exact QDRIFT channel";
    let dist = mixture_estimate(MethodId::Qdrift, &amp, 1.0, 16, 4096, opts.seed).and_then(|est| {
        let target = qdrift_exact(&amp, qdrift_omega(&amp, 1.0, 16)?)?.pow(16);
        Ok(diamond_norm_report(&est.sub(&target)?)?.value)
    });
    if let Some(d) = s.attempt(name, dist) {
        s.at_most(name, d, 0.05);
    }
    let draws = 10_000;
    let name = "S1_RAN coin frequency";
    if let Some(gs) = s.attempt(name, sample_gateset_n(MethodId::S1Ran, &amp, 1.0, draws, opts.seed)) {
        let rev = gs.steps.iter().filter(|st| matches!(st, ChannelStep::S1Block(Direction::Reversed))).count();
        let f = rev as f64 / draws as f64;
        s.push(name, (0.48..=0.52).contains(&f), f, 0.52, "accepted range [0.48, 0.52]".into());
    }
    if let Ok(q3) = models::qubit3(1.0, 0.5) {
        let name = "QDRIFT term frequencies";
        let run = sample_gateset_n(MethodId::Qdrift, &q3, 1.0, draws, opts.seed).and_then(|gs| {
            let probs = qdrift_probs(&q3)?;
            let mut worst: f64 = 0.0;
            for (k, p) in probs.iter().enumerate() {
                let hits = gs.steps.iter().filter(|st| matches!(st, ChannelStep::TermExp { k: kk, .. } if *kk == k + 1)).count();
                worst = worst.max((hits as f64 / draws as f64 - p).abs());
            }
            Ok(worst)
        });
        if let Some(w) = s.attempt(name, run) {
            s.at_most(name, w, 0.02);
        }
    }
    if let Ok(g) = models::random(2, 3, 7) {
        for method in [MethodId::S1Ran, MethodId::S2Ran, MethodId::Qdrift] {
            let name = format!("{method} gate-set channels are CPTP");
            let bad = (0..16u64)
                .map(|i| {
                    let gs = sample_gateset_n(method, &g, 1.0, 8, opts.seed + i)?;
                    Ok(gateset_channel(&gs, &g)?.is_cptp(Tolerances::DEFAULT.cptp).cptp)
                })
                .collect::<Result<Vec<bool>>>()
                .map(|v| v.iter().filter(|ok| !**ok).count());
            if let Some(bad) = s.attempt(&name, bad) {
                s.at_most(name, bad as f64, 0.0);
            }
        }
        let name = "gate sets reproduce for a fixed seed";
        let same = sample_gateset_n(MethodId::S2Ran, &g, 1.0, 8, opts.seed)
            .and_then(|a| Ok(a == sample_gateset_n(MethodId::S2Ran, &g, 1.0, 8, opts.seed)?));
        if let Some(same) = s.attempt(name, same) {
            s.holds(name, same, String::new());
        }
    }
    s
}

fn gatecount_suite() -> Suite {
    let mut s = Suite::new("gatecount");
    let qf = Implementation::QuantumForking;
    let cs = Implementation::ClassicalSampling;
    let mut mismatches = Vec::new();
    for m in 1..=8usize {
        for n in [1usize, 7, 40, 1000] {
            let (mm, nn) = (m as u64, n as u64);
            let cases = [
                (MethodId::S1Ran, qf, (2 * mm + 2) * nn),
                (MethodId::Qdrift, qf, (3 * mm - 2) * nn),
                (MethodId::S1Det, cs, mm * nn),
                (MethodId::S2Det, cs, 2 * mm * nn),
                (MethodId::S1Ran, cs, mm * nn),
                (MethodId::S2Ran, cs, 2 * mm * nn),
                (MethodId::Qdrift, cs, nn),
            ];
            for (method, imp, expect) in cases {
                if gate_count(method, m, n, imp).ok() != Some(expect) {
                    mismatches.push(format!("{method}/{imp} M={m} N={n}"));
                }
            }
        }
    }
    s.push("closed-form gate counts", mismatches.is_empty(), mismatches.len() as f64, 0.0, mismatches.join("; "));
    s.holds("S2_RAN has no forking count", gate_count(MethodId::S2Ran, 3, 4, qf).is_err(), String::new());
    let input = Table1Input { m: 2, t: 1.0, lambda: 1.0, gamma: 2.0, omega: 1.0, eps: 0.1 };
    let name = "comparison table";
    if let Some(rows) = s.attempt(name, table1_report(&input, Default::default())) {
        let s1 = &rows[0];
        s.holds(
            "S1_DET row at M=2 eps=0.1",
            s1.n == 40 && s1.gates == Gates::Count(80) && s1.complexity == COMPLEXITY_S1_DET,
            format!("N={} gates={:?}", s1.n, s1.gates),
        );
        let qd = rows.iter().find(|r| r.label == "QDRIFT (CS)");
        s.holds(
            "QDRIFT CS row has gates = N",
            qd.is_some_and(|r| r.gates == Gates::Count(r.n as u64) && r.complexity == COMPLEXITY_QDRIFT_CS),
            String::new(),
        );
        let s2qf = rows.iter().find(|r| r.method == MethodId::S2Ran && r.implementation == qf);
        s.holds("S2_RAN QF cell", s2qf.is_some_and(|r| r.gates == Gates::Infeasible), INFEASIBLE.into());
    }
    s
}

/// The second-order slope check must reject a formula whose half steps use `tau/3`.
fn mutation_suite() -> Suite {
    let mut s = Suite::new("mutation");
    let name = "S2 slope check rejects tau/3 half steps";
    let slope = models::random(2, 3, 7).and_then(|g| {
        let stats = generator_stats(&g)?;
        slope_of(&sweep_points(&g, &stats, 1.0 / 3.0)?, MethodId::S2Det)
    });
    if let Some(slope) = s.attempt(name, slope) {
        let caught = (slope - target_slope(MethodId::S2Det)).abs() > SLOPE_TOLERANCE;
        s.push(name, caught, slope, SLOPE_TOLERANCE, "slope of the broken formula".into());
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_an_error() {
        assert!(validate_suite("nope", &ValidateOptions::default()).is_err());
    }

    #[test]
    fn cheap_suites_pass() {
        for name in ["restricted", "gatecount"] {
            let r = validate_suite(name, &ValidateOptions::default()).unwrap();
            assert!(r.all_passed(), "{}", r.render_text());
        }
    }

    #[test]
    fn csv_report_has_one_row_per_check() {
        let r = validate_suite("restricted", &ValidateOptions::default()).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), r.checks.len() + 1);
        assert!(text.starts_with("suite,check,passed,value,threshold,detail\n"));
    }
}
