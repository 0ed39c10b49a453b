//! Dense complex linear algebra: Kronecker products, partial traces,
//! column-stacking vectorization, matrix exponentials and Schatten norms.

mod expm;
mod state;

pub use expm::mat_exp;
pub use state::DensityMatrix;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{modulus, ComplexMatrix, ComplexVector, Real};

/// An operator on `C^d` flattened to a length `d^2` vector by stacking its
/// columns top to bottom.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorizedOperator<T: Real> {
    dim: usize,
    vector: ComplexVector<T>,
}

impl<T: Real> VectorizedOperator<T> {
    pub fn new(dim: usize, vector: ComplexVector<T>) -> Result<Self> {
        if vector.len() != dim * dim {
            return Err(Error::Dimension(format!(
                "vectorized operator of dim {dim} needs {} entries, got {}",
                dim * dim,
                vector.len()
            )));
        }
        Ok(Self { dim, vector })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vector(&self) -> &ComplexVector<T> {
        &self.vector
    }

    pub fn into_vector(self) -> ComplexVector<T> {
        self.vector
    }
}

/// Builds a matrix from row-major entries, rejecting NaN and infinities.
pub fn from_row_major<T: Real>(rows: usize, cols: usize, entries: &[Complex<T>]) -> Result<ComplexMatrix<T>> {
    if rows == 0 || cols == 0 {
        return Err(Error::Dimension("matrix dimensions must be positive".into()));
    }
    if entries.len() != rows * cols {
        return Err(Error::Dimension(format!(
            "{rows}x{cols} matrix needs {} entries, got {}",
            rows * cols,
            entries.len()
        )));
    }
    let m = DMatrix::from_row_slice(rows, cols, entries);
    ensure_finite(&m)?;
    Ok(m)
}

pub fn ensure_finite<T: Real>(m: &ComplexMatrix<T>) -> Result<()> {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let z = m[(i, j)];
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
    }
    Ok(())
}

pub fn ensure_square<T: Real>(m: &ComplexMatrix<T>) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    Ok(m.nrows())
}

pub fn identity<T: Real>(n: usize) -> ComplexMatrix<T> {
    DMatrix::identity(n, n)
}

pub fn dagger<T: Real>(m: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    m.adjoint()
}

pub fn conj<T: Real>(m: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    m.map(|z| z.conj())
}

pub fn trace<T: Real>(m: &ComplexMatrix<T>) -> Complex<T> {
    m.diagonal().iter().fold(Complex::new(T::zero(), T::zero()), |acc, &z| acc + z)
}

/// Largest entrywise modulus; zero for an empty matrix.
pub fn max_abs<T: Real>(m: &ComplexMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, &z| {
        let a = modulus(z);
        if a > acc {
            a
        } else {
            acc
        }
    })
}

/// `max |a - b|` over entries.
pub fn max_abs_diff<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> T {
    assert_eq!(a.shape(), b.shape(), "max_abs_diff: shape mismatch");
    max_abs(&(a - b))
}

/// `max |m - m^dagger|`.
pub fn hermiticity_deviation<T: Real>(m: &ComplexMatrix<T>) -> T {
    max_abs(&(m - m.adjoint()))
}

/// Induced 1-norm: largest column sum of moduli.
pub fn one_norm<T: Real>(m: &ComplexMatrix<T>) -> T {
    let mut best = T::zero();
    for col in m.column_iter() {
        let s = col.iter().fold(T::zero(), |acc, &z| acc + modulus(z));
        if s > best {
            best = s;
        }
    }
    best
}

/// Kronecker product: block `(i, j)` of the result equals `a[i,j] * b`.
pub fn kron<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    a.kronecker(b)
}

/// Kronecker product of a list of factors, leftmost factor most significant.
pub fn kron_all<T: Real>(factors: &[&ComplexMatrix<T>]) -> ComplexMatrix<T> {
    let mut it = factors.iter();
    let first = match it.next() {
        Some(f) => (*f).clone(),
        None => return identity(1),
    };
    it.fold(first, |acc, f| kron(&acc, f))
}

/// Mixed-radix layout of a multipartite register; factor 0 is the most
/// significant digit, matching [`kron`] ordering.
#[derive(Debug, Clone)]
struct Layout {
    dims: Vec<usize>,
    strides: Vec<usize>,
    total: usize,
}

impl Layout {
    fn new(dims: &[usize]) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::Dimension(format!("invalid register layout {dims:?}")));
        }
        let mut strides = vec![1; dims.len()];
        for k in (0..dims.len() - 1).rev() {
            strides[k] = strides[k + 1] * dims[k + 1];
        }
        Ok(Self { dims: dims.to_vec(), strides, total: dims.iter().product() })
    }

    #[inline]
    fn digit(&self, index: usize, k: usize) -> usize {
        (index / self.strides[k]) % self.dims[k]
    }
}

/// Traces out every factor not listed in `keep`.
///
/// `dims` gives the factor dimensions (first factor = leftmost in the
/// Kronecker product). Kept factors appear in the result in their original
/// order.
pub fn partial_trace<T: Real>(m: &ComplexMatrix<T>, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix<T>> {
    let n = ensure_square(m)?;
    let layout = Layout::new(dims)?;
    if layout.total != n {
        return Err(Error::Dimension(format!(
            "register layout {dims:?} has total dimension {} but matrix side is {n}",
            layout.total
        )));
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.len() != keep.len() || kept.iter().any(|&k| k >= dims.len()) {
        return Err(Error::Dimension(format!("keep set {keep:?} is not a set of indices into {dims:?}")));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !kept.contains(k)).collect();
    let out_dim: usize = kept.iter().map(|&k| dims[k]).product();

    let reduced_index = |idx: usize, set: &[usize]| -> usize {
        set.iter().fold(0, |acc, &k| acc * dims[k] + layout.digit(idx, k))
    };
    let traced_of: Vec<usize> = (0..n).map(|i| reduced_index(i, &traced)).collect();
    let kept_of: Vec<usize> = (0..n).map(|i| reduced_index(i, &kept)).collect();

    let mut out = DMatrix::zeros(out_dim, out_dim);
    for j in 0..n {
        for i in 0..n {
            if traced_of[i] == traced_of[j] {
                out[(kept_of[i], kept_of[j])] += m[(i, j)];
            }
        }
    }
    Ok(out)
}

/// Applies a superoperator matrix (acting on column-stacked `d x d`
/// operators) to factor `reg` of a multipartite operator, identity
/// elsewhere.
pub fn apply_local_superop<T: Real>(
    m: &ComplexMatrix<T>,
    dims: &[usize],
    reg: usize,
    superop: &ComplexMatrix<T>,
) -> Result<ComplexMatrix<T>> {
    let n = ensure_square(m)?;
    let layout = Layout::new(dims)?;
    if layout.total != n || reg >= dims.len() {
        return Err(Error::Dimension(format!("register {reg} of layout {dims:?} vs matrix side {n}")));
    }
    let d = dims[reg];
    if superop.nrows() != d * d || superop.ncols() != d * d {
        return Err(Error::Dimension(format!(
            "superoperator side {} does not match register dimension {d}",
            superop.nrows()
        )));
    }
    let stride = layout.strides[reg];
    let mut out = DMatrix::zeros(n, n);
    for j in 0..n {
        let b = layout.digit(j, reg);
        let j_base = j - b * stride;
        for i in 0..n {
            let a = layout.digit(i, reg);
            let i_base = i - a * stride;
            let row = a + d * b;
            let mut acc = Complex::new(T::zero(), T::zero());
            for e in 0..d {
                for cc in 0..d {
                    let s = superop[(row, cc + d * e)];
                    if s.re != T::zero() || s.im != T::zero() {
                        acc += s * m[(i_base + cc * stride, j_base + e * stride)];
                    }
                }
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}

/// Column-stacking vectorization.
pub fn vectorize<T: Real>(a: &ComplexMatrix<T>) -> Result<VectorizedOperator<T>> {
    let d = ensure_square(a)?;
    Ok(VectorizedOperator { dim: d, vector: DVector::from_column_slice(a.as_slice()) })
}

/// Inverse of [`vectorize`].
pub fn devectorize<T: Real>(v: &VectorizedOperator<T>) -> ComplexMatrix<T> {
    DMatrix::from_column_slice(v.dim, v.dim, v.vector.as_slice())
}

/// Eigenvalues of the Hermitian part of `a`, ascending.
pub fn hermitian_eigenvalues<T: Real>(a: &ComplexMatrix<T>) -> Vec<T> {
    let h = hermitian_part(a);
    let mut ev: Vec<T> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    ev
}

pub fn min_hermitian_eigenvalue<T: Real>(a: &ComplexMatrix<T>) -> T {
    hermitian_eigenvalues(a).first().copied().unwrap_or_else(T::zero)
}

pub fn hermitian_part<T: Real>(a: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    (a + a.adjoint()).map(|z| z * T::of(0.5))
}

/// Singular values of `a`, descending.
pub fn singular_values<T: Real>(a: &ComplexMatrix<T>) -> Vec<T> {
    let mut sv: Vec<T> = a.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
    sv
}

/// Trace norm `tr sqrt(A A^dagger)`, the sum of singular values.
pub fn trace_norm<T: Real>(a: &ComplexMatrix<T>) -> Result<T> {
    ensure_square(a)?;
    Ok(singular_values(a).into_iter().fold(T::zero(), |acc, s| acc + s))
}

/// Trace norm of a Hermitian matrix through its eigenvalues.
pub fn trace_norm_hermitian<T: Real>(a: &ComplexMatrix<T>) -> Result<T> {
    ensure_square(a)?;
    Ok(hermitian_eigenvalues(a).into_iter().fold(T::zero(), |acc, e| acc + e.abs()))
}

/// Operator norm (largest singular value).
pub fn spectral_norm<T: Real>(a: &ComplexMatrix<T>) -> T {
    singular_values(a).first().copied().unwrap_or_else(T::zero)
}

/// `1/2 ||p - q||_1`.
pub fn trace_distance<T: Real>(p: &DensityMatrix<T>, q: &DensityMatrix<T>) -> Result<T> {
    if p.dim() != q.dim() {
        return Err(Error::Dimension(format!("trace distance between dims {} and {}", p.dim(), q.dim())));
    }
    let diff = p.matrix() - q.matrix();
    Ok(trace_norm_hermitian(&diff)? * T::of(0.5))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    type M = ComplexMatrix<f64>;

    fn diag(v: &[f64]) -> M {
        M::from_diagonal(&DVector::from_iterator(v.len(), v.iter().map(|&x| c(x, 0.0))))
    }

    fn sx() -> M {
        from_row_major(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]).unwrap()
    }

    fn sz() -> M {
        diag(&[1., -1.])
    }

    #[test]
    fn kron_identity_and_diagonal() {
        assert_eq!(kron(&identity::<f64>(2), &identity(2)), identity(4));
        assert_eq!(kron(&diag(&[1., 2.]), &diag(&[3., 4.])), diag(&[3., 4., 6., 8.]));
    }

    #[test]
    fn kron_sigma_x_sigma_z_blocks() {
        let k = kron(&sx(), &sz());
        let z = sz();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(k[(i, j)], c(0., 0.));
                assert_eq!(k[(i + 2, j + 2)], c(0., 0.));
                assert_eq!(k[(i, j + 2)], z[(i, j)]);
                assert_eq!(k[(i + 2, j)], z[(i, j)]);
            }
        }
    }

    #[test]
    fn partial_trace_cases() {
        let ra = from_row_major(2, 2, &[c(0.7, 0.), c(0.1, 0.2), c(0.1, -0.2), c(0.3, 0.)]).unwrap();
        let rb = diag(&[0.25, 0.75]);
        let pt = partial_trace(&kron(&ra, &rb), &[2, 2], &[0]).unwrap();
        assert!(max_abs_diff(&pt, &ra) < 1e-15);

        let mixed = identity::<f64>(4).map(|z| z * 0.25);
        let pt = partial_trace(&mixed, &[2, 2], &[1]).unwrap();
        assert!(max_abs_diff(&pt, &identity(2).map(|z| z * 0.5)) < 1e-15);

        // |Phi+><Phi+| = 1/2 (|00>+|11>)(<00|+<11|)
        let mut bell = M::zeros(4, 4);
        for &i in &[0usize, 3] {
            for &j in &[0usize, 3] {
                bell[(i, j)] = c(0.5, 0.);
            }
        }
        let pt = partial_trace(&bell, &[2, 2], &[0]).unwrap();
        assert!(max_abs_diff(&pt, &identity(2).map(|z| z * 0.5)) < 1e-15);
    }

    #[test]
    fn partial_trace_rejects_bad_layout() {
        let m = identity::<f64>(4);
        assert!(matches!(partial_trace(&m, &[2, 3], &[0]), Err(Error::Dimension(_))));
        assert!(matches!(partial_trace(&m, &[2, 2], &[2]), Err(Error::Dimension(_))));
    }

    #[test]
    fn vectorize_conventions() {
        let v = vectorize(&identity::<f64>(2)).unwrap();
        let expect = [c(1., 0.), c(0., 0.), c(0., 0.), c(1., 0.)];
        assert_eq!(v.vector().as_slice(), &expect);
        let a = from_row_major::<f64>(2, 2, &[c(1., 0.), c(2., 0.), c(3., 0.), c(4., 0.)]).unwrap();
        let v = vectorize(&a).unwrap();
        assert_eq!(v.vector().as_slice(), &[c(1., 0.), c(3., 0.), c(2., 0.), c(4., 0.)]);
        assert_eq!(devectorize(&v), a);
    }

    #[test]
    fn trace_norm_cases() {
        assert!((trace_norm(&identity::<f64>(3)).unwrap() - 3.0).abs() < 1e-14);
        assert!((trace_norm(&diag(&[1., -1.])).unwrap() - 2.0).abs() < 1e-14);
        assert!((trace_norm_hermitian(&diag(&[1., -1.])).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn trace_distance_cases() {
        let zero = DensityMatrix::<f64>::basis(2, 0).unwrap();
        let one = DensityMatrix::<f64>::basis(2, 1).unwrap();
        let mixed = DensityMatrix::<f64>::maximally_mixed(2);
        assert!(trace_distance(&zero, &zero).unwrap().abs() < 1e-15);
        assert!((trace_distance(&zero, &one).unwrap() - 1.0).abs() < 1e-14);
        assert!((trace_distance(&mixed, &zero).unwrap() - 0.5).abs() < 1e-14);
        let three = DensityMatrix::<f64>::maximally_mixed(3);
        assert!(matches!(trace_distance(&zero, &three), Err(Error::Dimension(_))));
    }

    #[test]
    fn apply_local_matches_kron_lift() {
        // superop of X -> sx X sx on factor 1 of a 2x2 register
        let s = kron(&conj(&sx()), &sx());
        let ra = diag(&[0.6, 0.4]);
        let rb = from_row_major(2, 2, &[c(0.9, 0.), c(0.0, 0.3), c(0.0, -0.3), c(0.1, 0.)]).unwrap();
        let out = apply_local_superop(&kron(&ra, &rb), &[2, 2], 1, &s).unwrap();
        let expect = kron(&ra, &(sx() * &rb * sx()));
        assert!(max_abs_diff(&out, &expect) < 1e-15);
    }

    #[test]
    fn generic_over_f32() {
        let a: ComplexMatrix<f32> = from_row_major(2, 2, &[c(1., 0.), c(2., 0.), c(3., 0.), c(4., 0.)]).unwrap();
        let k = kron(&a, &identity(2));
        assert_eq!(k.shape(), (4, 4));
        let v = vectorize(&a).unwrap();
        assert_eq!(devectorize(&v), a);
    }

    #[test]
    fn rejects_non_finite() {
        let r = from_row_major::<f64>(1, 2, &[c(1., 0.), c(f64::NAN, 0.)]);
        assert!(matches!(r, Err(Error::NonFinite { row: 0, col: 1 })));
    }
}
