//! Convergence-order fits.

use anyhow::{bail, Result};
use lindblad_rand_core::formulas::MethodId;

use crate::sweep::SweepRecord;

/// Least-squares slope of `log y` against `log x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 3 {
        bail!("need at least 3 points for a slope fit, got {}", points.len());
    }
    if points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite())) {
        bail!("slope fit needs positive finite data");
    }
    let k = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        bail!("slope fit needs at least two distinct N");
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(sxy / sxx)
}

/// Slope of `log epsilon_empirical` against `log N` for every method present,
/// in [`MethodId::ALL`] order. Records without an empirical error are skipped.
pub fn fit_order(records: &[SweepRecord]) -> Result<Vec<(MethodId, f64)>> {
    let mut out = Vec::new();
    for m in MethodId::ALL {
        let recs: Vec<&SweepRecord> = records.iter().filter(|r| r.method == m).collect();
        if recs.is_empty() {
            continue;
        }
        let points: Vec<(f64, f64)> =
            recs.iter().filter_map(|r| r.epsilon_empirical.map(|e| (r.n as f64, e))).filter(|p| p.1 > 0.0).collect();
        match log_log_slope(&points) {
            Ok(s) => out.push((m, s)),
            Err(e) => bail!("{m}: {e}"),
        }
    }
    if out.is_empty() {
        bail!("no records to fit");
    }
    Ok(out)
}
