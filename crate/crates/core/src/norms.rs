//! Diamond norm and the generator statistics `Lambda`, `Omega`, `Gamma`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lindblad::{term_superop, GkslGenerator, Superoperator};
use crate::linalg::max_abs;
use crate::scalar::{ComplexMatrix, Real};
use crate::sdp::{BlockSdp, Entry, SdpOptions};
use crate::Tolerances;

/// Diamond norm together with the solver certificate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiamondNorm {
    pub value: f64,
    /// `|primal - dual|` of the accepted solve, in the units of `value`.
    pub gap: f64,
    pub iterations: usize,
}

fn hermitian_basis(n: usize, traceless: bool) -> Vec<Vec<(usize, usize, Complex64)>> {
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let mut basis = Vec::with_capacity(n * n);
    if traceless {
        for p in 0..n.saturating_sub(1) {
            basis.push(vec![(p, p, one), (p + 1, p + 1, -one)]);
        }
    } else {
        for p in 0..n {
            basis.push(vec![(p, p, one)]);
        }
    }
    for p in 0..n {
        for q in p + 1..n {
            basis.push(vec![(p, q, one), (q, p, one)]);
            basis.push(vec![(p, q, -i), (q, p, i)]);
        }
    }
    basis
}

/// Builds the SDP whose optimum is `max <J, W>` over `-rho (x) I <= W <= rho (x) I`,
/// `rho` a density matrix on the input factor. Both slack blocks have side `d^2`.
fn diamond_sdp(choi: &ComplexMatrix<f64>, d: usize) -> BlockSdp {
    let n = d * d;
    let cblock = ComplexMatrix::<f64>::identity(n, n) * Complex64::new(1.0 / d as f64, 0.0);
    let mut a = Vec::new();
    let mut b = Vec::new();
    for e in hermitian_basis(d, true) {
        let mut entries = Vec::with_capacity(4 * d);
        for &(r, c, v) in &e {
            for o in 0..d {
                for block in 0..2 {
                    entries.push(Entry { block, row: r * d + o, col: c * d + o, value: -v });
                }
            }
        }
        a.push(entries);
        b.push(0.0);
    }
    for f in hermitian_basis(n, false) {
        let mut entries = Vec::with_capacity(2 * f.len());
        let mut bf = 0.0;
        for &(r, c, v) in &f {
            entries.push(Entry { block: 0, row: r, col: c, value: v });
            entries.push(Entry { block: 1, row: r, col: c, value: -v });
            bf += (v * choi[(c, r)]).re;
        }
        a.push(entries);
        b.push(bf);
    }
    BlockSdp { block_sizes: vec![n, n], c: vec![cblock.clone(), cblock], a, b }
}

/// Diamond norm with solver diagnostics, using the default tolerances.
pub fn diamond_norm_report<T: Real>(s: &Superoperator<T>) -> Result<DiamondNorm> {
    diamond_norm_with(s, &Tolerances::DEFAULT)
}

pub fn diamond_norm_with<T: Real>(s: &Superoperator<T>, tol: &Tolerances) -> Result<DiamondNorm> {
    let d = s.dim();
    let choi = s.choi();
    let j: ComplexMatrix<f64> = choi.matrix().map(|z| Complex64::new(z.re.as_f64(), z.im.as_f64()));
    let scale = max_abs(&j);
    if scale == 0.0 {
        return Ok(DiamondNorm { value: 0.0, gap: 0.0, iterations: 0 });
    }
    let dev = max_abs(&(&j - j.adjoint()));
    let allowed = tol.hermiticity_preserving * scale.max(1.0) + 1e3 * T::eps().as_f64() * scale;
    if dev > allowed {
        return Err(Error::NotHermiticityPreserving { deviation: dev });
    }
    let jn = (&j + j.adjoint()) * Complex64::new(0.5 / scale, 0.0);
    let opts = SdpOptions {
        max_iterations: tol.sdp_max_iterations,
        gap_tolerance: 0.01 * tol.duality_gap / scale.max(1.0),
        feasibility_tolerance: 1e-10,
        acceptable_gap: tol.duality_gap / scale.max(1.0),
        ..SdpOptions::default()
    };
    let sol = diamond_sdp(&jn, d).solve(&opts).map_err(|e| match e {
        Error::SdpNotConverged { iterations, gap, infeasibility } => {
            Error::SdpNotConverged { iterations, gap: gap * scale, infeasibility }
        }
        other => other,
    })?;
    let gap = sol.gap * scale;
    if gap > tol.duality_gap {
        return Err(Error::SdpNotConverged { iterations: sol.iterations, gap, infeasibility: sol.primal_infeasibility });
    }
    Ok(DiamondNorm { value: (sol.value() * scale).max(0.0), gap, iterations: sol.iterations })
}

/// `||s||_diamond` for a Hermiticity-preserving map.
pub fn diamond_norm<T: Real>(s: &Superoperator<T>) -> Result<T> {
    diamond_norm_report(s).map(|r| T::of(r.value))
}

/// `||a - b||_diamond`.
pub fn diamond_distance<T: Real>(a: &Superoperator<T>, b: &Superoperator<T>) -> Result<T> {
    diamond_norm(&a.sub(b)?)
}

/// Which rates enter `Gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GammaConvention {
    /// `Gamma = 1 + sum_{k>=2} gamma_k`.
    #[default]
    IncludeHamiltonian,
    /// `Gamma = sum_{k>=2} gamma_k`.
    DissipatorsOnly,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorStats {
    /// `max_k ||gamma_k L_k||_diamond`
    pub lambda: f64,
    /// `max_k ||L_k||_diamond`
    pub omega: f64,
    /// Sum of rates.
    pub gamma_total: f64,
    pub m_total: usize,
}

pub fn generator_stats<T: Real>(gen: &GkslGenerator<T>) -> Result<GeneratorStats> {
    generator_stats_with(gen, GammaConvention::default())
}

pub fn generator_stats_with<T: Real>(gen: &GkslGenerator<T>, gamma: GammaConvention) -> Result<GeneratorStats> {
    let m = gen.m_total();
    let norms: Vec<(f64, f64)> = (1..=m)
        .into_par_iter()
        .map(|k| -> Result<(f64, f64)> {
            let bare = diamond_norm_report(&term_superop(gen, k, false)?)?.value;
            let rate = gen.rate(k)?.as_f64();
            // the norm is absolutely homogeneous, so the rated term needs no second solve
            Ok((rate * bare, bare))
        })
        .collect::<Result<_>>()?;
    let rates = gen.rates();
    let skip = match gamma {
        GammaConvention::IncludeHamiltonian => 0,
        GammaConvention::DissipatorsOnly => 1,
    };
    Ok(GeneratorStats {
        lambda: norms.iter().map(|n| n.0).fold(0.0, f64::max),
        omega: norms.iter().map(|n| n.1).fold(0.0, f64::max),
        gamma_total: rates.iter().skip(skip).map(|r| r.as_f64()).sum(),
        m_total: m,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma1Report {
    /// `||T^N - V^N||_diamond`
    pub lhs: f64,
    /// `||T - V||_diamond`
    pub one_step: f64,
    pub holds: bool,
}

/// Checks `||T^N - V^N|| <= N ||T - V||` for two channels.
pub fn lemma1_check<T: Real>(t_chan: &Superoperator<T>, v_chan: &Superoperator<T>, n: usize) -> Result<Lemma1Report> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be positive".into()));
    }
    for (name, ch) in [("T", t_chan), ("V", v_chan)] {
        if !ch.is_cptp(Tolerances::DEFAULT.cptp).cptp {
            return Err(Error::InvalidArgument(format!("{name} is not CPTP")));
        }
    }
    let lhs = diamond_distance(&t_chan.pow(n), &v_chan.pow(n))?.as_f64();
    let one_step = diamond_distance(t_chan, v_chan)?.as_f64();
    Ok(Lemma1Report { lhs, one_step, holds: lhs <= n as f64 * one_step + Tolerances::DEFAULT.inequality_slack })
}
