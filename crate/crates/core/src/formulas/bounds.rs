use super::MethodId;
use crate::error::{Error, Result};
use crate::norms::GeneratorStats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BoundOptions {
    /// Use `(2 Lambda t)^3 M^2 / N^2` for S2_RAN instead of `(Lambda t)^3 M^2 / N^2`.
    pub conservative: bool,
    /// Keep the `exp(M t Lambda / N)` factor (`exp(t Gamma Omega / N)` for
    /// QDRIFT) that the large-`N` form drops.
    pub exp_factor: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepBound {
    pub n_steps: usize,
    /// `error_bound` evaluated at `n_steps`.
    pub epsilon_bound: f64,
    pub stats: GeneratorStats,
    pub t: f64,
}

/// `(c, p)` such that the simplified bound reads `c / N^p`.
fn law(method: MethodId, s: &GeneratorStats, t: f64, opts: BoundOptions) -> (f64, i32) {
    let m = s.m_total as f64;
    match method {
        MethodId::S1Det => ((t * s.lambda * m).powi(2), 1),
        MethodId::S2Det | MethodId::S1Ran => ((m * t * s.lambda).powi(3) / 3.0, 2),
        MethodId::S2Ran => {
            let lt = if opts.conservative { 2.0 * s.lambda * t } else { s.lambda * t };
            (lt.powi(3) * m * m, 2)
        }
        MethodId::Qdrift => ((t * s.gamma_total * s.omega).powi(2), 1),
    }
}

fn exp_rate(method: MethodId, s: &GeneratorStats, t: f64) -> f64 {
    match method {
        MethodId::Qdrift => t * s.gamma_total * s.omega,
        _ => s.m_total as f64 * t * s.lambda,
    }
}

pub fn error_bound(method: MethodId, stats: &GeneratorStats, t: f64, n: usize) -> f64 {
    error_bound_with(method, stats, t, n, BoundOptions::default())
}

pub fn error_bound_with(method: MethodId, stats: &GeneratorStats, t: f64, n: usize, opts: BoundOptions) -> f64 {
    if n == 0 {
        return f64::INFINITY;
    }
    let nf = n as f64;
    let (c, p) = law(method, stats, t, opts);
    let base = c / nf.powi(p);
    if opts.exp_factor {
        base * (exp_rate(method, stats, t) / nf).exp()
    } else {
        base
    }
}

/// Ceiling that forgives floating-point noise just above an integer.
fn guarded_ceil(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * r.abs().max(1.0) {
        r
    } else {
        x.ceil()
    }
}

pub fn step_count(method: MethodId, stats: &GeneratorStats, t: f64, epsilon: f64) -> Result<StepBound> {
    step_count_with(method, stats, t, epsilon, BoundOptions::default())
}

/// Smallest `N` meeting the simplified bound for accuracy `epsilon`.
pub fn step_count_with(
    method: MethodId,
    stats: &GeneratorStats,
    t: f64,
    epsilon: f64,
    opts: BoundOptions,
) -> Result<StepBound> {
    if epsilon.is_nan() || epsilon <= 0.0 || !epsilon.is_finite() {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    if t.is_nan() || t <= 0.0 || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("t must be positive, got {t}")));
    }
    let (c, p) = law(method, stats, t, opts);
    if !c.is_finite() {
        return Err(Error::InvalidArgument("generator statistics are not finite".into()));
    }
    let raw = (c / epsilon).powf(1.0 / p as f64);
    let n = guarded_ceil(raw).max(1.0);
    if n > usize::MAX as f64 {
        return Err(Error::InvalidArgument(format!("step count {raw:e} overflows")));
    }
    let n_steps = n as usize;
    Ok(StepBound { n_steps, epsilon_bound: error_bound_with(method, stats, t, n_steps, opts), stats: *stats, t })
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// `sum over j_1 + .. + j_M = p` of `x^p / (j_1! .. j_M!)`, by enumeration.
pub fn restricted_sum_enumerated(m: usize, p: u32, x: f64) -> f64 {
    fn go(slots: usize, left: u32, denom: f64, acc: &mut f64, xp: f64) {
        if slots == 1 {
            *acc += xp / (denom * factorial(left));
            return;
        }
        for j in 0..=left {
            go(slots - 1, left - j, denom * factorial(j), acc, xp);
        }
    }
    if m == 0 {
        return if p == 0 { 1.0 } else { 0.0 };
    }
    let mut acc = 0.0;
    go(m, p, 1.0, &mut acc, x.powi(p as i32));
    acc
}

/// `M^p x^p / p!`.
pub fn restricted_sum_closed_form(m: usize, p: u32, x: f64) -> f64 {
    (m as f64 * x).powi(p as i32) / factorial(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stats(lambda: f64, omega: f64, gamma: f64, m: usize) -> GeneratorStats {
        GeneratorStats { lambda, omega, gamma_total: gamma, m_total: m }
    }

    #[test]
    fn worked_step_counts() {
        assert_eq!(step_count(MethodId::S1Det, &stats(1., 1., 2., 2), 1.0, 0.1).unwrap().n_steps, 40);
        assert_eq!(step_count(MethodId::S1Ran, &stats(1., 1., 4., 4), 1.0, 0.01).unwrap().n_steps, 47);
        assert_eq!(step_count(MethodId::Qdrift, &stats(1., 1., 2., 2), 1.0, 0.1).unwrap().n_steps, 40);
        assert!(step_count(MethodId::S1Det, &stats(1., 1., 2., 2), 1.0, 0.0).is_err());
        assert_eq!(step_count(MethodId::S1Det, &stats(0., 0., 1., 1), 1.0, 0.1).unwrap().n_steps, 1);
    }

    #[test]
    fn worked_error_bounds() {
        let s = stats(1., 1., 2., 2);
        assert!((error_bound(MethodId::S2Det, &s, 1.0, 10) - 8.0 / 300.0).abs() < 1e-15);
        assert!((error_bound(MethodId::Qdrift, &s, 1.0, 40) - 0.1).abs() < 1e-15);
        assert_eq!(error_bound(MethodId::S1Det, &s, 1.0, 20), 2.0 * error_bound(MethodId::S1Det, &s, 1.0, 40));
        let cons = BoundOptions { conservative: true, ..Default::default() };
        assert_eq!(error_bound_with(MethodId::S2Ran, &s, 1.0, 4, cons), 8.0 * error_bound(MethodId::S2Ran, &s, 1.0, 4));
        let ex = BoundOptions { exp_factor: true, ..Default::default() };
        assert!((error_bound_with(MethodId::S1Det, &s, 1.0, 4, ex) - 1.0 * 0.5f64.exp()).abs() < 1e-14);
    }

    #[test]
    fn step_count_meets_its_bound() {
        let s = stats(0.7, 1.3, 2.5, 3);
        for m in MethodId::ALL {
            for eps in [0.3, 0.05, 1e-3] {
                let sb = step_count(m, &s, 1.5, eps).unwrap();
                assert!(sb.epsilon_bound <= eps * (1.0 + 1e-12), "{m} {eps}");
                if sb.n_steps > 1 {
                    assert!(error_bound(m, &s, 1.5, sb.n_steps - 1) > eps, "{m} {eps} not minimal");
                }
            }
        }
    }

    #[test]
    fn restricted_sums() {
        for (m, p, x) in [(2, 3, 1.0), (3, 4, 0.5), (4, 2, 0.3)] {
            let e = restricted_sum_enumerated(m, p, x);
            assert!((e - restricted_sum_closed_form(m, p, x)).abs() < 1e-12);
        }
        assert!((restricted_sum_enumerated(3, 4, 0.5) - 0.2109375).abs() < 1e-15);
    }
}
