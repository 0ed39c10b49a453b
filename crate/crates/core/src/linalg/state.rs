use num_complex::Complex;

use super::{ensure_finite, ensure_square, hermiticity_deviation, identity, min_hermitian_eigenvalue, trace};
use crate::error::{Error, Result};
use crate::scalar::{modulus, ComplexMatrix, ComplexVector, Real};
use crate::tolerances::Tolerances;

/// A `d x d` density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T: Real> {
    dim: usize,
    matrix: ComplexMatrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    /// Validates `matrix` against the default state tolerance.
    pub fn new(matrix: ComplexMatrix<T>) -> Result<Self> {
        Self::with_tolerance(matrix, Tolerances::DEFAULT.state)
    }

    pub fn with_tolerance(matrix: ComplexMatrix<T>, tol: f64) -> Result<Self> {
        let dim = ensure_square(&matrix)?;
        ensure_finite(&matrix)?;
        let tol_t = T::tol(tol);
        let herm = hermiticity_deviation(&matrix);
        if herm > tol_t {
            return Err(Error::InvalidState(format!("not Hermitian: max|rho - rho^dag| = {herm:e}")));
        }
        let tr = trace(&matrix);
        if modulus(tr - Complex::new(T::one(), T::zero())) > tol_t {
            return Err(Error::InvalidState(format!("trace {} + {}i differs from 1", tr.re, tr.im)));
        }
        let min_ev = min_hermitian_eigenvalue(&matrix);
        if min_ev < -tol_t {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_ev:e}")));
        }
        Ok(Self { dim, matrix })
    }

    /// `|psi><psi|` for a (not necessarily normalized) nonzero ket.
    pub fn pure(ket: &ComplexVector<T>) -> Result<Self> {
        let norm2 = ket.iter().fold(T::zero(), |acc, z| acc + z.re * z.re + z.im * z.im);
        if norm2 <= T::zero() {
            return Err(Error::InvalidState("zero ket".into()));
        }
        let m = ket * ket.adjoint();
        let inv = Complex::new(T::one() / norm2, T::zero());
        Self::new(m.map(|z| z * inv))
    }

    /// Computational basis projector `|i><i|`.
    pub fn basis(dim: usize, i: usize) -> Result<Self> {
        if i >= dim {
            return Err(Error::InvalidState(format!("basis index {i} out of range for dim {dim}")));
        }
        let mut m = ComplexMatrix::<T>::zeros(dim, dim);
        m[(i, i)] = Complex::new(T::one(), T::zero());
        Ok(Self { dim, matrix: m })
    }

    /// `I / d`.
    pub fn maximally_mixed(dim: usize) -> Self {
        let f = Complex::new(T::one() / T::of(dim as f64), T::zero());
        Self { dim, matrix: identity::<T>(dim).map(|z| z * f) }
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
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::from_row_major;
    use crate::scalar::c;

    #[test]
    fn validation() {
        let ok = from_row_major::<f64>(2, 2, &[c(0.5, 0.), c(0., 0.2), c(0., -0.2), c(0.5, 0.)]).unwrap();
        assert!(DensityMatrix::new(ok).is_ok());
        let not_herm = from_row_major::<f64>(2, 2, &[c(0.5, 0.), c(0.1, 0.), c(0., 0.), c(0.5, 0.)]).unwrap();
        assert!(matches!(DensityMatrix::new(not_herm), Err(Error::InvalidState(_))));
        let bad_trace = from_row_major::<f64>(2, 2, &[c(0.6, 0.), c(0., 0.), c(0., 0.), c(0.5, 0.)]).unwrap();
        assert!(DensityMatrix::new(bad_trace).is_err());
        let negative = from_row_major::<f64>(2, 2, &[c(1.2, 0.), c(0., 0.), c(0., 0.), c(-0.2, 0.)]).unwrap();
        assert!(DensityMatrix::new(negative).is_err());
    }

    #[test]
    fn pure_state_normalizes() {
        let ket = ComplexVector::<f64>::from_vec(vec![c(1., 0.), c(0., 1.)]);
        let rho = DensityMatrix::pure(&ket).unwrap();
        assert!((rho.matrix()[(0, 1)] - c(0., -0.5)).norm() < 1e-15);
    }
}
