//! Small primal-dual interior-point solver for block-diagonal complex
//! Hermitian semidefinite programs.
//!
//! Dual form solved:
//!
//! ```text
//! maximize   b . y
//! subject to Z = C - sum_i y_i A_i  >= 0
//! ```
//!
//! with primal `min <C, X>  s.t. <A_i, X> = b_i, X >= 0`, where
//! `<A, B> = Re tr(A B)`. The iteration keeps `Z` exactly dual feasible,
//! starts from `y = 0` (so `C` must be positive definite), and uses the
//! HKM search direction with a Mehrotra predictor-corrector step.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

type Mat = DMatrix<Complex64>;

/// One nonzero `(row, col, value)` of a constraint matrix inside `block`.
/// Hermitian matrices list both `(r, c)` and `(c, r)` entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Entry {
    pub block: usize,
    pub row: usize,
    pub col: usize,
    pub value: Complex64,
}

#[derive(Debug, Clone)]
pub struct BlockSdp {
    pub block_sizes: Vec<usize>,
    pub c: Vec<Mat>,
    pub a: Vec<Vec<Entry>>,
    pub b: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SdpOptions {
    pub max_iterations: usize,
    /// Target for `|primal - dual|`.
    pub gap_tolerance: f64,
    /// Target for `||b - A(X)|| / (1 + ||b||)`.
    pub feasibility_tolerance: f64,
    /// Gap still accepted when the iteration breaks down or stalls
    /// before reaching `gap_tolerance`.
    pub acceptable_gap: f64,
    /// Infeasibility accepted together with `acceptable_gap`.
    pub acceptable_infeasibility: f64,
    /// Iterations spent past the first acceptable point before giving up on the strict targets.
    pub stall_iterations: usize,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self { max_iterations: 500, gap_tolerance: 1e-9, feasibility_tolerance: 1e-10,
            acceptable_gap: 1e-7,
            acceptable_infeasibility: 1e-8,
            stall_iterations: 40,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub gap: f64,
    pub primal_infeasibility: f64,
    pub iterations: usize,
    pub y: Vec<f64>,
}

impl SdpSolution {
    /// Midpoint of the primal and dual objectives.
    pub fn value(&self) -> f64 {
        0.5 * (self.primal_objective + self.dual_objective)
    }
}

fn inner(a: &[Mat], b: &[Mat]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.iter().zip(y.iter()).map(|(p, q)| (p.conj() * q).re).sum::<f64>()).sum()
}

fn hermitize(m: &Mat) -> Mat {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

fn inverse_hpd(m: &Mat) -> Option<Mat> {
    Cholesky::new(m.clone()).map(|ch| ch.inverse())
}

/// Largest `alpha` with `m + alpha * dm >= 0` (infinite if unbounded).
fn max_step(m: &Mat, dm: &Mat) -> Option<f64> {
    let ch = Cholesky::new(m.clone())?;
    let l = ch.l();
    let linv = l.clone().try_inverse()?;
    let s = hermitize(&(&linv * dm * linv.adjoint()));
    let eig = SymmetricEigen::new(s).eigenvalues;
    let lmin = eig.iter().cloned().fold(f64::INFINITY, f64::min);
    Some(if lmin >= 0.0 { f64::INFINITY } else { -1.0 / lmin })
}

impl BlockSdp {
    fn check(&self) -> Result<()> {
        if self.c.len() != self.block_sizes.len() || self.a.len() != self.b.len() {
            return Err(Error::Dimension("SDP data has inconsistent lengths".into()));
        }
        for (c, &n) in self.c.iter().zip(&self.block_sizes) {
            if c.nrows() != n || c.ncols() != n {
                return Err(Error::Dimension("SDP cost block has wrong size".into()));
            }
        }
        for a in &self.a {
            for e in a {
                if e.block >= self.block_sizes.len() || e.row >= self.block_sizes[e.block] || e.col >= self.block_sizes[e.block] {
                    return Err(Error::Dimension("SDP constraint entry out of range".into()));
                }
            }
        }
        Ok(())
    }

    /// `<A_i, Y>` for every constraint.
    fn apply_a(&self, y: &[Mat]) -> Vec<f64> {
        self.a.iter().map(|ai| ai.iter().map(|e| (e.value * y[e.block][(e.col, e.row)]).re).sum()).collect()
    }

    /// `sum_i w_i A_i`.
    fn adjoint_a(&self, w: &[f64]) -> Vec<Mat> {
        let mut out: Vec<Mat> = self.block_sizes.iter().map(|&n| Mat::zeros(n, n)).collect();
        for (ai, &wi) in self.a.iter().zip(w) {
            if wi == 0.0 {
                continue;
            }
            for e in ai {
                out[e.block][(e.row, e.col)] += e.value * wi;
            }
        }
        out
    }

    fn slack(&self, y: &[f64]) -> Vec<Mat> {
        let ay = self.adjoint_a(y);
        self.c.iter().zip(ay).map(|(c, a)| hermitize(&(c - a))).collect()
    }

    /// Schur complement `M_ij = Re tr(A_i X A_j G)`.
    fn schur(&self, x: &[Mat], g: &[Mat]) -> DMatrix<f64> {
        let m = self.a.len();
        let mut s = DMatrix::<f64>::zeros(m, m);
        for i in 0..m {
            for j in i..m {
                let mut acc = 0.0;
                for ei in &self.a[i] {
                    for ej in &self.a[j] {
                        if ei.block != ej.block {
                            continue;
                        }
                        let b = ei.block;
                        acc += (ei.value * x[b][(ei.col, ej.row)] * ej.value * g[b][(ej.col, ei.row)]).re;
                    }
                }
                s[(i, j)] = acc;
                s[(j, i)] = acc;
            }
        }
        s
    }

    pub fn solve(&self, opts: &SdpOptions) -> Result<SdpSolution> {
        self.check()?;
        for c in &self.c {
            if Cholesky::new(c.clone()).is_none() {
                return Err(Error::Numerical("SDP cost matrix must be positive definite".into()));
            }
        }
        let m = self.a.len();
        let n_total: usize = self.block_sizes.iter().sum();
        let b = DVector::from_column_slice(&self.b);
        let b_norm = b.norm();
        let xi = 1.0 + b.amax();
        let mut x: Vec<Mat> = self.block_sizes.iter().map(|&n| Mat::identity(n, n) * Complex64::new(xi, 0.0)).collect();
        let mut y = vec![0.0; m];
        let mut z = self.slack(&y);

        let mut last = (f64::INFINITY, f64::INFINITY);
        let mut fallback: Option<(usize, SdpSolution)> = None;
        for iter in 0..opts.max_iterations {
            let ax = self.apply_a(&x);
            let rp: Vec<f64> = self.b.iter().zip(&ax).map(|(b, a)| b - a).collect();
            let pinf = rp.iter().map(|r| r * r).sum::<f64>().sqrt() / (1.0 + b_norm);
            let pobj = inner(&self.c, &x);
            let dobj = b.dot(&DVector::from_column_slice(&y));
            let gap = pobj - dobj;
            last = (gap, pinf);
            let solution = |y: Vec<f64>| SdpSolution {
                primal_objective: pobj,
                dual_objective: dobj,
                gap: gap.abs(),
                primal_infeasibility: pinf,
                iterations: iter,
                y,
            };
            if pinf <= opts.feasibility_tolerance && gap.abs() <= opts.gap_tolerance {
                return Ok(solution(y));
            }
            if pinf <= opts.acceptable_infeasibility && gap.abs() <= opts.acceptable_gap {
                let since = fallback.as_ref().map_or(iter, |f| f.0);
                if iter - since >= opts.stall_iterations {
                    return Ok(solution(y));
                }
                fallback = Some((since, solution(y.clone())));
            }
            if let Err(e) = self.step(&mut x, &mut y, &mut z, n_total, &b) {
                return fallback.map(|f| f.1).ok_or(e);
            }
        }
        if let Some((_, sol)) = fallback {
            return Ok(sol);
        }
        Err(Error::SdpNotConverged { iterations: opts.max_iterations, gap: last.0.abs(), infeasibility: last.1 })
    }

    fn step(&self, x: &mut [Mat], y: &mut [f64], z: &mut Vec<Mat>, n_total: usize, b: &DVector<f64>) -> Result<()> {
        {

            let g: Vec<Mat> = z
                .iter()
                .map(|zb| inverse_hpd(zb).map(|g| hermitize(&g)))
                .collect::<Option<_>>()
                .ok_or_else(|| Error::Numerical("dual slack lost definiteness".into()))?;
            let mu = inner(x, z) / n_total as f64;
            let schur = self.schur(x, &g);
            let chol = Cholesky::new(schur.clone());
            let lu = if chol.is_none() { Some(schur.clone().lu()) } else { None };
            let solve = |rhs: DVector<f64>| -> Result<DVector<f64>> {
                match (&chol, &lu) {
                    (Some(ch), _) => Ok(ch.solve(&rhs)),
                    (None, Some(lu)) => lu.solve(&rhs).ok_or_else(|| Error::Numerical("singular Schur complement".into())),
                    _ => unreachable!(),
                }
            };
            let ag = DVector::from_vec(self.apply_a(&g));

            // Returns (dx, dy, dz) for centering sigma and optional corrector product.
            let direction = |sigma: f64, corr: Option<&[Mat]>| -> Result<(Vec<Mat>, Vec<f64>, Vec<Mat>)> {
                let mut rhs = b - &ag * (sigma * mu);
                if let Some(cp) = corr {
                    rhs += DVector::from_vec(self.apply_a(cp));
                }
                let dy = solve(rhs)?;
                let dy: Vec<f64> = dy.iter().cloned().collect();
                let dz: Vec<Mat> = self.adjoint_a(&dy).into_iter().map(|a| -a).collect();
                let dx: Vec<Mat> = (0..x.len())
                    .map(|k| {
                        let mut d = &g[k] * Complex64::new(sigma * mu, 0.0) - &x[k] - &x[k] * &dz[k] * &g[k];
                        if let Some(cp) = corr {
                            d -= &cp[k];
                        }
                        hermitize(&d)
                    })
                    .collect();
                Ok((dx, dy, dz))
            };
            let steps = |dx: &[Mat], dz: &[Mat]| -> Result<(f64, f64)> {
                let mut ap = f64::INFINITY;
                let mut ad = f64::INFINITY;
                for k in 0..x.len() {
                    ap = ap.min(max_step(&x[k], &dx[k]).ok_or_else(|| Error::Numerical("primal iterate lost definiteness".into()))?);
                    ad = ad.min(max_step(&z[k], &dz[k]).ok_or_else(|| Error::Numerical("dual iterate lost definiteness".into()))?);
                }
                Ok((ap, ad))
            };

            let (dxp, _, dzp) = direction(0.0, None)?;
            let (ap, ad) = steps(&dxp, &dzp)?;
            let ap1 = ap.min(1.0);
            let ad1 = ad.min(1.0);
            let x_aff: Vec<Mat> = x.iter().zip(&dxp).map(|(a, d)| a + d * Complex64::new(ap1, 0.0)).collect();
            let z_aff: Vec<Mat> = z.iter().zip(&dzp).map(|(a, d)| a + d * Complex64::new(ad1, 0.0)).collect();
            let mu_aff = inner(&x_aff, &z_aff) / n_total as f64;
            let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);
            let corr: Vec<Mat> = (0..x.len()).map(|k| &dxp[k] * &dzp[k] * &g[k]).collect();

            let (dx, dy, dz) = direction(sigma, Some(&corr))?;
            let (ap, ad) = steps(&dx, &dz)?;
            let tau = 0.98;
            let ap = (tau * ap).min(1.0);
            let ad = (tau * ad).min(1.0);
            for k in 0..x.len() {
                x[k] = hermitize(&(&x[k] + &dx[k] * Complex64::new(ap, 0.0)));
            }
            for (yi, d) in y.iter_mut().zip(&dy) {
                *yi += ad * d;
            }
            *z = self.slack(y);
        }
        Ok(())
    }
}
