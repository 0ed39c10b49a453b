use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{
    devectorize, ensure_square, hermiticity_deviation, identity, kron, max_abs_diff, min_hermitian_eigenvalue,
    partial_trace, vectorize, DensityMatrix, VectorizedOperator,
};
use crate::scalar::{ComplexMatrix, Real};

/// Linear map on `d x d` operators, stored as the `d^2 x d^2` matrix acting
/// on column-stacked operators: `vec(S(X)) = matrix * vec(X)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator<T: Real> {
    dim: usize,
    matrix: ComplexMatrix<T>,
}

impl<T: Real> Superoperator<T> {
    pub fn new(dim: usize, matrix: ComplexMatrix<T>) -> Result<Self> {
        let side = ensure_square(&matrix)?;
        if side != dim * dim {
            return Err(Error::Dimension(format!("superoperator of dim {dim} needs side {}, got {side}", dim * dim)));
        }
        Ok(Self { dim, matrix })
    }

    /// Builds from a matrix whose side is a perfect square.
    pub fn from_matrix(matrix: ComplexMatrix<T>) -> Result<Self> {
        let side = ensure_square(&matrix)?;
        let dim = (side as f64).sqrt().round() as usize;
        Self::new(dim, matrix)
    }

    pub fn identity(dim: usize) -> Self {
        Self { dim, matrix: identity(dim * dim) }
    }

    pub fn zero(dim: usize) -> Self {
        Self { dim, matrix: ComplexMatrix::zeros(dim * dim, dim * dim) }
    }

    /// `X -> U X U^dagger`.
    pub fn conjugation(u: &ComplexMatrix<T>) -> Result<Self> {
        let d = ensure_square(u)?;
        Ok(Self { dim: d, matrix: kron(&u.map(|z| z.conj()), u) })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.matrix
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::Dimension(format!("superoperator dims {} and {}", self.dim, other.dim)));
        }
        Ok(())
    }

    /// Sequential composition: `self` acts first, then `next`.
    pub fn then(&self, next: &Self) -> Result<Self> {
        self.check_dim(next)?;
        Ok(Self { dim: self.dim, matrix: &next.matrix * &self.matrix })
    }

    /// `self` applied `n` times (identity for `n = 0`).
    pub fn pow(&self, n: usize) -> Self {
        let mut result = identity::<T>(self.dim * self.dim);
        let mut base = self.matrix.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Self { dim: self.dim, matrix: result }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self { dim: self.dim, matrix: &self.matrix + &other.matrix })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self { dim: self.dim, matrix: &self.matrix - &other.matrix })
    }

    pub fn scale(&self, factor: T) -> Self {
        let f = Complex::new(factor, T::zero());
        Self { dim: self.dim, matrix: self.matrix.map(|z| z * f) }
    }

    /// Convex (or general linear) combination `sum_i w_i S_i`.
    pub fn weighted_sum(dim: usize, parts: &[(T, &Self)]) -> Result<Self> {
        let mut acc = ComplexMatrix::<T>::zeros(dim * dim, dim * dim);
        for (w, s) in parts {
            if s.dim != dim {
                return Err(Error::Dimension(format!("weighted_sum: dim {} vs {dim}", s.dim)));
            }
            let f = Complex::new(*w, T::zero());
            acc += s.matrix.map(|z| z * f);
        }
        Ok(Self { dim, matrix: acc })
    }

    /// Applies the map to an arbitrary `d x d` operator.
    pub fn apply_operator(&self, x: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        let v = vectorize(x)?;
        if v.dim() != self.dim {
            return Err(Error::Dimension(format!("operator dim {} vs superoperator dim {}", v.dim(), self.dim)));
        }
        let out = VectorizedOperator::new(self.dim, &self.matrix * v.vector())?;
        Ok(devectorize(&out))
    }

    /// Applies the map to a state, validating the output as a state.
    pub fn apply(&self, rho: &DensityMatrix<T>) -> Result<DensityMatrix<T>> {
        DensityMatrix::new(self.apply_operator(rho.matrix())?)
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        max_abs_diff(&self.matrix, &other.matrix)
    }

    /// Choi matrix `J = sum_ij |i><j| (x) S(|i><j|)`, input factor first.
    pub fn choi(&self) -> ChoiMatrix<T> {
        let d = self.dim;
        let mut j = ComplexMatrix::<T>::zeros(d * d, d * d);
        for jj in 0..d {
            for ii in 0..d {
                let col = ii + d * jj;
                for b in 0..d {
                    for a in 0..d {
                        j[(ii * d + a, jj * d + b)] = self.matrix[(a + d * b, col)];
                    }
                }
            }
        }
        ChoiMatrix { dim: d, matrix: j }
    }

    /// Inverse of [`Superoperator::choi`].
    pub fn from_choi(choi: &ChoiMatrix<T>) -> Self {
        let d = choi.dim;
        let mut m = ComplexMatrix::<T>::zeros(d * d, d * d);
        for jj in 0..d {
            for ii in 0..d {
                for b in 0..d {
                    for a in 0..d {
                        m[(a + d * b, ii + d * jj)] = choi.matrix[(ii * d + a, jj * d + b)];
                    }
                }
            }
        }
        Self { dim: d, matrix: m }
    }

    /// Complete positivity and trace preservation, via the Choi matrix.
    pub fn is_cptp(&self, tol: f64) -> CptpReport {
        let choi = self.choi();
        let tol_t = T::tol(tol);
        let min_eig = min_hermitian_eigenvalue(choi.matrix());
        let herm = hermiticity_deviation(choi.matrix());
        let reduced = partial_trace(choi.matrix(), &[self.dim, self.dim], &[0]).expect("choi layout");
        let tp_dev = max_abs_diff(&reduced, &identity(self.dim));
        CptpReport {
            cptp: min_eig >= -tol_t && tp_dev <= tol_t && herm <= tol_t,
            min_choi_eigenvalue: min_eig.as_f64(),
            trace_preservation_deviation: tp_dev.as_f64(),
            hermiticity_deviation: herm.as_f64(),
        }
    }
}

/// Outcome of a CPTP check with the quantities that decided it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CptpReport {
    pub cptp: bool,
    pub min_choi_eigenvalue: f64,
    pub trace_preservation_deviation: f64,
    pub hermiticity_deviation: f64,
}

/// Choi matrix on `input (x) output`, side `d^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix<T: Real> {
    dim: usize,
    matrix: ComplexMatrix<T>,
}

impl<T: Real> ChoiMatrix<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }
}

/// Free-function form of [`Superoperator::choi`].
pub fn choi<T: Real>(s: &Superoperator<T>) -> ChoiMatrix<T> {
    s.choi()
}

/// Free-function form of [`Superoperator::is_cptp`].
pub fn is_cptp<T: Real>(s: &Superoperator<T>, tol: f64) -> CptpReport {
    s.is_cptp(tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{from_row_major, trace};
    use crate::scalar::c;

    #[test]
    fn identity_choi_is_unnormalized_bell_projector() {
        let j = Superoperator::<f64>::identity(2).choi();
        for r in 0..4 {
            for s in 0..4 {
                let expect = if (r == 0 || r == 3) && (s == 0 || s == 3) { 1.0 } else { 0.0 };
                assert_eq!(j.matrix()[(r, s)], c(expect, 0.));
            }
        }
        assert!((trace(j.matrix()).re - 2.0).abs() < 1e-15);
    }

    #[test]
    fn sigma_x_conjugation_choi_rank_one() {
        let sx = from_row_major::<f64>(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]).unwrap();
        let s = Superoperator::conjugation(&sx).unwrap();
        let ev = crate::linalg::hermitian_eigenvalues(s.choi().matrix());
        assert!((ev[3] - 2.0).abs() < 1e-14);
        for e in &ev[..3] {
            assert!(e.abs() < 1e-14);
        }
        assert!(s.is_cptp(1e-9).cptp);
    }

    #[test]
    fn transpose_map_is_not_completely_positive() {
        // vec(X^T) is the swap permutation on C^2 (x) C^2
        let mut m = ComplexMatrix::<f64>::zeros(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                m[(j + 2 * i, i + 2 * j)] = c(1., 0.);
            }
        }
        let s = Superoperator::new(2, m).unwrap();
        let ev = crate::linalg::hermitian_eigenvalues(s.choi().matrix());
        assert!((ev[0] + 1.0).abs() < 1e-14);
        let report = s.is_cptp(1e-9);
        assert!(!report.cptp);
        assert!(report.trace_preservation_deviation < 1e-14);
    }

    #[test]
    fn choi_round_trip_and_pow() {
        let m = ComplexMatrix::<f64>::from_fn(4, 4, |i, j| c((i * 4 + j) as f64 * 0.1, (i as f64 - j as f64) * 0.05));
        let s = Superoperator::new(2, m).unwrap();
        assert_eq!(Superoperator::from_choi(&s.choi()), s);
        let p3 = s.pow(3);
        let direct = s.then(&s).unwrap().then(&s).unwrap();
        assert!(p3.max_abs_diff(&direct) < 1e-12);
        assert_eq!(s.pow(0), Superoperator::identity(2));
    }
}
