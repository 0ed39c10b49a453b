//! Single runs: one sampled gate set per method applied to the initial state.

use std::fmt::Write as _;

use anyhow::Result;
use lindblad_rand_core::formulas::{
    apply_gateset, approx_channel, derive_seed, gate_count, sample_gateset_n, step_count_with, Implementation,
    MethodId,
};
use lindblad_rand_core::lindblad::exact_channel;
use lindblad_rand_core::linalg::trace_distance;
use lindblad_rand_core::norms::generator_stats_with;
use lindblad_rand_core::{Error as CoreError, State};

use crate::config::{ExperimentSpec, Grid};
use crate::sweep::initial_state;

#[derive(Debug, Clone)]
pub struct RunResult {
    pub method: MethodId,
    pub n: usize,
    pub final_state: State,
    /// Distance to the exact evolution.
    pub trace_dist_exact: f64,
    /// Distance to the exact-mixture channel's output; absent when the
    /// mixture is too large to form.
    pub trace_dist_mixture: Option<f64>,
    pub gates_cs: u64,
}

/// Runs every method of the spec once at `n`, or at the first grid point.
pub fn simulate(spec: &ExperimentSpec, n_override: Option<usize>) -> Result<Vec<RunResult>> {
    let gen = spec.load_model()?;
    let rho0 = initial_state(spec, gen.dim())?;
    let exact_out = exact_channel(&gen, spec.t)?.apply(&rho0)?;
    let stats = match spec.grid {
        Grid::Epsilon(_) if n_override.is_none() => Some(generator_stats_with(&gen, spec.gamma)?),
        _ => None,
    };
    let mut out = Vec::new();
    for (i, &method) in spec.methods.iter().enumerate() {
        let n = match (n_override, &spec.grid, &stats) {
            (Some(n), _, _) => n,
            (None, Grid::Steps(v), _) => v[0],
            (None, Grid::Epsilon(v), Some(st)) => step_count_with(method, st, spec.t, v[0], spec.bounds)?.n_steps,
            (None, Grid::Epsilon(_), None) => unreachable!(),
        };
        let final_state = if method.is_randomized() {
            let gs = sample_gateset_n(method, &gen, spec.t, n, derive_seed(spec.seed, i as u64))?;
            apply_gateset(&gs, &gen, &rho0)?
        } else {
            approx_channel(method, &gen, spec.t, n)?.apply(&rho0)?
        };
        let trace_dist_mixture = match approx_channel(method, &gen, spec.t, n) {
            Ok(ch) => Some(trace_distance(&final_state, &ch.apply(&rho0)?)?),
            Err(CoreError::MixtureCap { .. }) => None,
            Err(e) => return Err(e.into()),
        };
        out.push(RunResult {
            method,
            n,
            trace_dist_exact: trace_distance(&final_state, &exact_out)?,
            trace_dist_mixture,
            final_state,
            gates_cs: gate_count(method, gen.m_total(), n, Implementation::ClassicalSampling)?,
        });
    }
    Ok(out)
}

pub fn render(spec: &ExperimentSpec, runs: &[RunResult]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "experiment {} (t = {}, seed = {})", spec.name, spec.t, spec.seed);
    for r in runs {
        let mix = r.trace_dist_mixture.map(|d| format!("{d:.6e}")).unwrap_or_else(|| "-".into());
        let _ = writeln!(
            s,
            "{} N={} gates={} trace_dist(exact)={:.6e} trace_dist(mixture)={mix}",
            r.method, r.n, r.gates_cs, r.trace_dist_exact
        );
        let m = r.final_state.matrix();
        for i in 0..m.nrows() {
            let row: Vec<String> = (0..m.ncols()).map(|j| format!("{:+.6}{:+.6}i", m[(i, j)].re, m[(i, j)].im)).collect();
            let _ = writeln!(s, "  [{}]", row.join("  "));
        }
    }
    s
}
