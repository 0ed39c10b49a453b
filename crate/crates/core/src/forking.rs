//! Density-matrix simulation of quantum-forking circuits: a control register
//! prepared in a classical mixture steers controlled-SWAPs so that a single
//! run realises a convex mixture of channels.
//!
//! Registers are ordered `[control, system, ancilla_1, ..]`, control most
//! significant. Measuring and discarding a register is a partial trace.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::formulas::{qdrift_omega, qdrift_probs, s1_dir, Direction};
use crate::linalg::{apply_local_superop, kron_all, partial_trace, DensityMatrix};
use crate::lindblad::{constituent_channel, GkslGenerator, Superoperator};
use crate::scalar::{ComplexMatrix, Real};
use crate::Tolerances;

/// Largest total register dimension the simulator accepts.
pub const FORK_DIM_CAP: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForkLayout {
    pub control_dim: usize,
    pub system_dim: usize,
    pub ancilla_count: usize,
}

impl ForkLayout {
    pub fn new(control_dim: usize, system_dim: usize, ancilla_count: usize) -> Result<Self> {
        if control_dim == 0 || system_dim == 0 {
            return Err(Error::InvalidArgument("register dimensions must be positive".into()));
        }
        let layout = Self { control_dim, system_dim, ancilla_count };
        let total = layout.checked_total();
        match total {
            Some(t) if t <= FORK_DIM_CAP => Ok(layout),
            _ => Err(Error::Unsupported(format!(
                "forking layout {control_dim} x {system_dim}^{} exceeds the dimension cap {FORK_DIM_CAP}; \
                 use the classical-sampling gate sets instead",
                1 + ancilla_count
            ))),
        }
    }

    /// Layout for the first-order randomised formula: a qubit control and one ancilla.
    pub fn s1(system_dim: usize) -> Result<Self> {
        Self::new(2, system_dim, 1)
    }

    /// Layout for QDRIFT: an `M`-level control and `M - 1` ancillas.
    pub fn qdrift(system_dim: usize, m_total: usize) -> Result<Self> {
        Self::new(m_total, system_dim, m_total.saturating_sub(1))
    }

    fn checked_total(&self) -> Option<usize> {
        let mut t = self.control_dim;
        for _ in 0..=self.ancilla_count {
            t = t.checked_mul(self.system_dim)?;
        }
        Some(t)
    }

    pub fn total_dim(&self) -> usize {
        self.checked_total().expect("checked at construction")
    }

    /// Register dimensions `[control, system, ancillas..]`.
    pub fn dims(&self) -> Vec<usize> {
        let mut dims = vec![self.control_dim, self.system_dim];
        dims.extend(std::iter::repeat_n(self.system_dim, self.ancilla_count));
        dims
    }

    fn digits(&self, mut index: usize) -> Vec<usize> {
        let dims = self.dims();
        let mut out = vec![0; dims.len()];
        for r in (0..dims.len()).rev() {
            out[r] = index % dims[r];
            index /= dims[r];
        }
        out
    }

    fn index(&self, digits: &[usize]) -> usize {
        self.dims().iter().zip(digits).fold(0, |acc, (d, x)| acc * d + x)
    }
}

/// Index permutation of the controlled-SWAP: `perm[i]` is the image of basis state `i`.
fn cswap_permutation(layout: &ForkLayout, control_value: usize, a: usize, b: usize) -> Result<Vec<usize>> {
    let dims = layout.dims();
    if a == 0 || b == 0 || a >= dims.len() || b >= dims.len() {
        return Err(Error::InvalidArgument(format!("swap targets {a}, {b} must be data registers 1..{}", dims.len() - 1)));
    }
    if dims[a] != dims[b] {
        return Err(Error::Dimension(format!("swap targets have dims {} and {}", dims[a], dims[b])));
    }
    if control_value >= layout.control_dim {
        return Err(Error::InvalidArgument(format!("control value {control_value} >= {}", layout.control_dim)));
    }
    Ok((0..layout.total_dim())
        .map(|i| {
            let mut dg = layout.digits(i);
            if dg[0] == control_value {
                dg.swap(a, b);
            }
            layout.index(&dg)
        })
        .collect())
}

/// Controlled-SWAP unitary: swaps registers `a` and `b` iff the control is `|control_value>`.
pub fn cswap_unitary<T: Real>(layout: &ForkLayout, control_value: usize, a: usize, b: usize) -> Result<ComplexMatrix<T>> {
    let perm = cswap_permutation(layout, control_value, a, b)?;
    let n = perm.len();
    let mut u = ComplexMatrix::<T>::zeros(n, n);
    for (i, &j) in perm.iter().enumerate() {
        u[(j, i)] = Complex::new(T::one(), T::zero());
    }
    Ok(u)
}

/// Superoperator of conjugation by [`cswap_unitary`].
pub fn cswap_channel<T: Real>(layout: &ForkLayout, control_value: usize, a: usize, b: usize) -> Result<Superoperator<T>> {
    Superoperator::conjugation(&cswap_unitary::<T>(layout, control_value, a, b)?)
}

/// `U rho U^dagger` for the permutation unitary, without forming `U`.
fn conjugate_by_permutation<T: Real>(rho: &ComplexMatrix<T>, perm: &[usize]) -> ComplexMatrix<T> {
    let n = perm.len();
    let mut out = ComplexMatrix::<T>::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            out[(perm[i], perm[j])] = rho[(i, j)];
        }
    }
    out
}

fn check_states<T: Real>(gen: &GkslGenerator<T>, rho_sys: &DensityMatrix<T>, rho_phi: &DensityMatrix<T>) -> Result<()> {
    if rho_sys.dim() != gen.dim() || rho_phi.dim() != gen.dim() {
        return Err(Error::Dimension(format!(
            "system state dim {}, ancilla state dim {}, generator dim {}",
            rho_sys.dim(),
            rho_phi.dim(),
            gen.dim()
        )));
    }
    Ok(())
}

fn finish<T: Real>(m: ComplexMatrix<T>, layout: &ForkLayout) -> Result<DensityMatrix<T>> {
    let reduced = partial_trace(&m, &layout.dims(), &[1])?;
    DensityMatrix::with_tolerance(reduced, Tolerances::DEFAULT.cptp)
}

fn diagonal<T: Real>(p: &[T]) -> ComplexMatrix<T> {
    ComplexMatrix::from_diagonal(&nalgebra::DVector::from_iterator(p.len(), p.iter().map(|&x| Complex::new(x, T::zero()))))
}

struct S1Fork<T: Real> {
    layout: ForkLayout,
    perm: Vec<usize>,
    forward: Superoperator<T>,
    reversed: Superoperator<T>,
}

impl<T: Real> S1Fork<T> {
    fn new(gen: &GkslGenerator<T>, dt: T) -> Result<Self> {
        let layout = ForkLayout::s1(gen.dim())?;
        Ok(Self {
            perm: cswap_permutation(&layout, 1, 1, 2)?,
            forward: s1_dir(gen, dt, Direction::Forward)?,
            reversed: s1_dir(gen, dt, Direction::Reversed)?,
            layout,
        })
    }

    fn run(&self, rho_sys: &DensityMatrix<T>, rho_phi: &DensityMatrix<T>) -> Result<DensityMatrix<T>> {
        let dims = self.layout.dims();
        let half = T::of(0.5);
        let prep = diagonal(&[half, half]);
        let mut m = kron_all(&[&prep, rho_sys.matrix(), rho_phi.matrix()]);
        m = conjugate_by_permutation(&m, &self.perm);
        m = apply_local_superop(&m, &dims, 1, self.forward.matrix())?;
        m = apply_local_superop(&m, &dims, 2, self.reversed.matrix())?;
        m = conjugate_by_permutation(&m, &self.perm);
        finish(m, &self.layout)
    }
}

/// One block of the forked first-order randomised formula.
pub fn fork_s1_step<T: Real>(
    gen: &GkslGenerator<T>,
    dt: T,
    rho_sys: &DensityMatrix<T>,
    rho_phi: &DensityMatrix<T>,
) -> Result<DensityMatrix<T>> {
    check_states(gen, rho_sys, rho_phi)?;
    S1Fork::new(gen, dt)?.run(rho_sys, rho_phi)
}

/// `n` forked blocks with `dt = t/n`, control and ancilla re-prepared each block.
pub fn fork_s1_run<T: Real>(
    gen: &GkslGenerator<T>,
    t: T,
    n: usize,
    rho0: &DensityMatrix<T>,
    rho_phi: &DensityMatrix<T>,
) -> Result<DensityMatrix<T>> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be positive".into()));
    }
    check_states(gen, rho0, rho_phi)?;
    let fork = S1Fork::new(gen, t / T::of(n as f64))?;
    let mut rho = rho0.clone();
    for _ in 0..n {
        rho = fork.run(&rho, rho_phi)?;
    }
    Ok(rho)
}

struct QdriftFork<T: Real> {
    layout: ForkLayout,
    prep: ComplexMatrix<T>,
    perms: Vec<Vec<usize>>,
    exps: Vec<Superoperator<T>>,
}

impl<T: Real> QdriftFork<T> {
    fn new(gen: &GkslGenerator<T>, omega: T) -> Result<Self> {
        let m = gen.m_total();
        let layout = ForkLayout::qdrift(gen.dim(), m)?;
        let perms = (2..=m).map(|k| cswap_permutation(&layout, k - 1, 1, k)).collect::<Result<_>>()?;
        let exps = (1..=m).map(|k| constituent_channel(gen, k, omega, false)).collect::<Result<_>>()?;
        Ok(Self { prep: diagonal(&qdrift_probs(gen)?), layout, perms, exps })
    }

    fn run(&self, rho_sys: &DensityMatrix<T>, rho_phi: &DensityMatrix<T>) -> Result<DensityMatrix<T>> {
        let dims = self.layout.dims();
        let mut factors = vec![&self.prep, rho_sys.matrix()];
        factors.extend(std::iter::repeat_n(rho_phi.matrix(), self.layout.ancilla_count));
        let mut m = kron_all(&factors);
        for p in &self.perms {
            m = conjugate_by_permutation(&m, p);
        }
        for (slot, e) in self.exps.iter().enumerate() {
            m = apply_local_superop(&m, &dims, slot + 1, e.matrix())?;
        }
        for p in self.perms.iter().rev() {
            m = conjugate_by_permutation(&m, p);
        }
        finish(m, &self.layout)
    }
}

/// One forked QDRIFT block with step `omega`.
pub fn fork_qdrift_step<T: Real>(
    gen: &GkslGenerator<T>,
    omega: T,
    rho_sys: &DensityMatrix<T>,
    rho_phi: &DensityMatrix<T>,
) -> Result<DensityMatrix<T>> {
    check_states(gen, rho_sys, rho_phi)?;
    QdriftFork::new(gen, omega)?.run(rho_sys, rho_phi)
}

/// `n` forked QDRIFT blocks with `omega = t Gamma / n`.
pub fn fork_qdrift_run<T: Real>(
    gen: &GkslGenerator<T>,
    t: T,
    n: usize,
    rho0: &DensityMatrix<T>,
    rho_phi: &DensityMatrix<T>,
) -> Result<DensityMatrix<T>> {
    check_states(gen, rho0, rho_phi)?;
    let fork = QdriftFork::new(gen, qdrift_omega(gen, t, n)?)?;
    let mut rho = rho0.clone();
    for _ in 0..n {
        rho = fork.run(&rho, rho_phi)?;
    }
    Ok(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulas::{qdrift_exact, s1_ran_exact};
    use crate::linalg::{dagger, trace_distance};
    use crate::scalar::c;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, d: usize) -> ComplexMatrix<f64> {
        ComplexMatrix::from_fn(d, d, |_, _| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
    }

    fn random_generator(seed: u64, m: usize) -> GkslGenerator<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_matrix(&mut rng, 2);
        let h = (&a + dagger(&a)).map(|z| z * c(0.5, 0.));
        let terms = (1..m).map(|_| (random_matrix(&mut rng, 2), 0.5 + rng.random::<f64>())).collect();
        GkslGenerator::from_parts(h, terms).unwrap()
    }

    fn random_state(seed: u64) -> DensityMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_matrix(&mut rng, 2);
        let p = &a * dagger(&a);
        let tr = p.trace();
        DensityMatrix::new(p / tr).unwrap()
    }

    #[test]
    fn cswap_actions() {
        let layout = ForkLayout::s1(2).unwrap();
        let rho = random_state(1);
        let sigma = random_state(2);
        let ch = cswap_channel::<f64>(&layout, 1, 1, 2).unwrap();
        for (ctrl, swapped) in [(0, false), (1, true)] {
            let prep = DensityMatrix::<f64>::basis(2, ctrl).unwrap();
            let input = kron_all(&[prep.matrix(), rho.matrix(), sigma.matrix()]);
            let out = ch.apply_operator(&input).unwrap();
            let expect = if swapped {
                kron_all(&[prep.matrix(), sigma.matrix(), rho.matrix()])
            } else {
                input.clone()
            };
            assert!(crate::linalg::max_abs_diff(&out, &expect) < 1e-15);
        }
        assert!(ch.then(&ch).unwrap().max_abs_diff(&Superoperator::identity(8)) < 1e-13);
        assert!(cswap_channel::<f64>(&layout, 2, 1, 2).is_err());
        let u = cswap_unitary::<f64>(&layout, 1, 1, 2).unwrap();
        let p = cswap_permutation(&layout, 1, 1, 2).unwrap();
        let m = random_matrix(&mut ChaCha8Rng::seed_from_u64(3), 8);
        assert!(crate::linalg::max_abs_diff(&conjugate_by_permutation(&m, &p), &(&u * &m * dagger(&u))) < 1e-15);
    }

    #[test]
    fn layout_cap() {
        assert_eq!(ForkLayout::qdrift(2, 3).unwrap().total_dim(), 24);
        assert_eq!(ForkLayout::qdrift(2, 3).unwrap().dims(), vec![3, 2, 2, 2]);
        assert!(matches!(ForkLayout::qdrift(2, 5), Err(Error::Unsupported(_))));
        assert!(matches!(ForkLayout::qdrift(4, 3), Err(Error::Unsupported(_))));
    }

    #[test]
    fn s1_fork_matches_mixture() {
        let rho = random_state(4);
        for m in 1..=3 {
            let gen = random_generator(10 + m as u64, m);
            for dt in [0.05, 0.2] {
                let direct = s1_ran_exact(&gen, dt).unwrap().apply(&rho).unwrap();
                let phis = [DensityMatrix::maximally_mixed(2), DensityMatrix::basis(2, 0).unwrap(), random_state(5)];
                for phi in &phis {
                    let fork = fork_s1_step(&gen, dt, &rho, phi).unwrap();
                    assert!(trace_distance(&fork, &direct).unwrap() <= 1e-11);
                }
            }
        }
    }

    #[test]
    fn qdrift_fork_matches_mixture() {
        let rho = random_state(6);
        for m in 1..=3 {
            let gen = random_generator(20 + m as u64, m);
            for omega in [0.05, 0.2] {
                let direct = qdrift_exact(&gen, omega).unwrap().apply(&rho).unwrap();
                for phi in [DensityMatrix::maximally_mixed(2), DensityMatrix::basis(2, 0).unwrap(), random_state(7)] {
                    let fork = fork_qdrift_step(&gen, omega, &rho, &phi).unwrap();
                    assert!(trace_distance(&fork, &direct).unwrap() <= 1e-11);
                }
            }
        }
    }

    #[test]
    fn two_term_qdrift_fork_entrywise() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let a = random_matrix(&mut rng, 2);
        let gen = GkslGenerator::from_parts((&a + dagger(&a)) * c(0.5, 0.), vec![(random_matrix(&mut rng, 2), 1.0)]).unwrap();
        let rho = random_state(9);
        let omega = 0.3;
        let e1 = constituent_channel(&gen, 1, omega, false).unwrap().apply_operator(rho.matrix()).unwrap();
        let e2 = constituent_channel(&gen, 2, omega, false).unwrap().apply_operator(rho.matrix()).unwrap();
        let expect = (e1 + e2) * c(0.5, 0.);
        let fork = fork_qdrift_step(&gen, omega, &rho, &DensityMatrix::maximally_mixed(2)).unwrap();
        assert!(crate::linalg::max_abs_diff(fork.matrix(), &expect) < 1e-11);
    }

    #[test]
    fn runs_iterate_blocks() {
        let gen = random_generator(30, 3);
        let rho = random_state(10);
        let phi = DensityMatrix::maximally_mixed(2);
        for n in [1, 4, 8] {
            let fork = fork_s1_run(&gen, 1.0, n, &rho, &phi).unwrap();
            let direct = s1_ran_exact(&gen, 1.0 / n as f64).unwrap().pow(n).apply(&rho).unwrap();
            assert!(trace_distance(&fork, &direct).unwrap() <= 1e-10);
            let fork = fork_qdrift_run(&gen, 1.0, n, &rho, &phi).unwrap();
            let omega = qdrift_omega(&gen, 1.0, n).unwrap();
            let direct = qdrift_exact(&gen, omega).unwrap().pow(n).apply(&rho).unwrap();
            assert!(trace_distance(&fork, &direct).unwrap() <= 1e-10);
        }
        let one = fork_s1_run(&gen, 0.2, 1, &rho, &phi).unwrap();
        assert_eq!(one, fork_s1_step(&gen, 0.2, &rho, &phi).unwrap());
    }
}
