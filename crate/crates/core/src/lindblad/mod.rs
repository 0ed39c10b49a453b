//! GKSL generators and their superoperator matrices.
//!
//! Term indices are 1-based: `k = 1` is always the Hamiltonian part
//! `-i[H, .]` with rate 1, and `k >= 2` are the dissipators.

mod file;
mod superop;

pub use file::{parse_generator, read_generator};
pub use superop::{choi, is_cptp, ChoiMatrix, CptpReport, Superoperator};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{dagger, ensure_finite, ensure_square, hermiticity_deviation, identity, kron, mat_exp};
use crate::scalar::{ComplexMatrix, Real};

/// A dissipative term `gamma * (L rho L^dagger - 1/2 {L^dagger L, rho})`.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpTerm<T: Real> {
    pub jump_op: ComplexMatrix<T>,
    pub rate: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GkslGenerator<T: Real> {
    dim: usize,
    hamiltonian: ComplexMatrix<T>,
    terms: Vec<JumpTerm<T>>,
}

impl<T: Real> GkslGenerator<T> {
    /// Validates the Hamiltonian (Hermitian within `1e-10`) and the rates.
    pub fn new(hamiltonian: ComplexMatrix<T>, terms: Vec<JumpTerm<T>>) -> Result<Self> {
        let dim = ensure_square(&hamiltonian)?;
        if dim == 0 {
            return Err(Error::InvalidGenerator("dimension must be positive".into()));
        }
        ensure_finite(&hamiltonian)?;
        let dev = hermiticity_deviation(&hamiltonian);
        if dev > T::tol(crate::Tolerances::DEFAULT.hamiltonian) {
            return Err(Error::InvalidGenerator(format!("Hamiltonian is not Hermitian (deviation {})", dev)));
        }
        for (i, term) in terms.iter().enumerate() {
            let k = i + 2;
            if ensure_square(&term.jump_op)? != dim {
                return Err(Error::Dimension(format!(
                    "jump operator {k} is {}x{}, expected {dim}x{dim}",
                    term.jump_op.nrows(),
                    term.jump_op.ncols()
                )));
            }
            ensure_finite(&term.jump_op)?;
            if !term.rate.is_finite() || term.rate < T::zero() {
                return Err(Error::InvalidGenerator(format!("rate of term {k} is {}, must be >= 0", term.rate)));
            }
        }
        Ok(Self { dim, hamiltonian, terms })
    }

    /// Convenience constructor from `(jump_op, rate)` pairs.
    pub fn from_parts(hamiltonian: ComplexMatrix<T>, terms: Vec<(ComplexMatrix<T>, T)>) -> Result<Self> {
        Self::new(
            hamiltonian,
            terms.into_iter().map(|(jump_op, rate)| JumpTerm { jump_op, rate }).collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn hamiltonian(&self) -> &ComplexMatrix<T> {
        &self.hamiltonian
    }

    pub fn terms(&self) -> &[JumpTerm<T>] {
        &self.terms
    }

    /// Total term count `M`, Hamiltonian included.
    pub fn m_total(&self) -> usize {
        1 + self.terms.len()
    }

    /// Rate of term `k`; `gamma_1 = 1`.
    pub fn rate(&self, k: usize) -> Result<T> {
        self.check_index(k)?;
        Ok(if k == 1 { T::one() } else { self.terms[k - 2].rate })
    }

    /// All rates `gamma_1..gamma_M`.
    pub fn rates(&self) -> Vec<T> {
        std::iter::once(T::one()).chain(self.terms.iter().map(|t| t.rate)).collect()
    }

    fn check_index(&self, k: usize) -> Result<()> {
        if k == 0 || k > self.m_total() {
            return Err(Error::TermIndex { k, m: self.m_total() });
        }
        Ok(())
    }

    /// Same generator with the dissipative terms rescaled by `factor`.
    pub fn with_scaled_rates(&self, factor: T) -> Result<Self> {
        let terms = self
            .terms
            .iter()
            .map(|t| JumpTerm { jump_op: t.jump_op.clone(), rate: t.rate * factor })
            .collect();
        Self::new(self.hamiltonian.clone(), terms)
    }
}

/// Matrix of `-i[H, .]` for `k = 1`, or of the `k`-th dissipator otherwise.
pub fn term_superop<T: Real>(gen: &GkslGenerator<T>, k: usize, with_rate: bool) -> Result<Superoperator<T>> {
    gen.check_index(k)?;
    let d = gen.dim;
    let id = identity::<T>(d);
    let matrix = if k == 1 {
        let h = &gen.hamiltonian;
        let comm = kron(&id, h) - kron(&h.transpose(), &id);
        let minus_i = Complex::new(T::zero(), -T::one());
        comm.map(|z| z * minus_i)
    } else {
        let term = &gen.terms[k - 2];
        let l = &term.jump_op;
        let ldl = dagger(l) * l;
        let half = Complex::new(T::of(0.5), T::zero());
        let mut m = kron(&l.map(|z| z.conj()), l) - (kron(&id, &ldl) + kron(&ldl.transpose(), &id)).map(|z| z * half);
        if with_rate {
            let r = Complex::new(term.rate, T::zero());
            m = m.map(|z| z * r);
        }
        m
    };
    Superoperator::new(d, matrix)
}

/// `sum_k term_superop(gen, k, true)`.
pub fn full_liouvillian<T: Real>(gen: &GkslGenerator<T>) -> Superoperator<T> {
    let mut acc = Superoperator::zero(gen.dim);
    for k in 1..=gen.m_total() {
        let term = term_superop(gen, k, true).expect("index in range");
        acc = acc.add(&term).expect("same dim");
    }
    acc
}

fn check_time<T: Real>(t: T, what: &str) -> Result<()> {
    if !t.is_finite() || t < T::zero() {
        return Err(Error::InvalidArgument(format!("{what} must be finite and >= 0, got {t}")));
    }
    Ok(())
}

fn scaled_exp<T: Real>(s: &Superoperator<T>, t: T) -> Result<Superoperator<T>> {
    let f = Complex::new(t, T::zero());
    Superoperator::new(s.dim(), mat_exp(&s.matrix().map(|z| z * f))?)
}

/// `exp(t L)`: the reference evolution every approximation is measured against.
pub fn exact_channel<T: Real>(gen: &GkslGenerator<T>, t: T) -> Result<Superoperator<T>> {
    check_time(t, "t")?;
    scaled_exp(&full_liouvillian(gen), t)
}

/// `exp(dt L_k)`, with or without the rate folded in.
pub fn constituent_channel<T: Real>(
    gen: &GkslGenerator<T>,
    k: usize,
    dt: T,
    with_rate: bool,
) -> Result<Superoperator<T>> {
    check_time(dt, "dt")?;
    scaled_exp(&term_superop(gen, k, with_rate)?, dt)
}
