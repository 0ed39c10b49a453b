use super::{Direction, MethodId};
use crate::error::{Error, Result};
use crate::lindblad::{constituent_channel, GkslGenerator, Superoperator};
use crate::scalar::Real;

/// Largest `M` for which [`s2_ran_exact`] enumerates all `M!` orderings.
pub const EXACT_MIXTURE_CAP: usize = 6;

pub(crate) fn check_dt<T: Real>(dt: T) -> Result<()> {
    if !dt.is_finite() || dt <= T::zero() {
        return Err(Error::InvalidArgument(format!("time step must be positive, got {dt}")));
    }
    Ok(())
}

/// `exp(dt * L_k)` for every term, index `k - 1`.
pub(crate) fn constituents<T: Real>(gen: &GkslGenerator<T>, dt: T, with_rate: bool) -> Result<Vec<Superoperator<T>>> {
    (1..=gen.m_total()).map(|k| constituent_channel(gen, k, dt, with_rate)).collect()
}

/// Composes `exps[order[0]]` first, then `exps[order[1]]`, and so on (0-based).
pub(crate) fn sweep<T: Real>(exps: &[Superoperator<T>], order: impl IntoIterator<Item = usize>) -> Superoperator<T> {
    let mut acc: Option<Superoperator<T>> = None;
    for i in order {
        acc = Some(match acc {
            None => exps[i].clone(),
            Some(a) => a.then(&exps[i]).expect("constituents share a dimension"),
        });
    }
    acc.unwrap_or_else(|| Superoperator::identity(exps[0].dim()))
}

pub(crate) fn s1_from<T: Real>(exps: &[Superoperator<T>], dir: Direction) -> Superoperator<T> {
    let m = exps.len();
    match dir {
        Direction::Forward => sweep(exps, 0..m),
        Direction::Reversed => sweep(exps, (0..m).rev()),
    }
}

/// Forward sweep over `sigma` followed by the reversed sweep, both from `half_exps`.
pub(crate) fn s2_from<T: Real>(half_exps: &[Superoperator<T>], sigma: &[usize]) -> Superoperator<T> {
    let fwd = sigma.iter().map(|&s| s - 1);
    let rev = sigma.iter().rev().map(|&s| s - 1);
    sweep(half_exps, fwd.chain(rev))
}

pub(crate) fn check_permutation(sigma: &[usize], m: usize) -> Result<()> {
    let mut seen = vec![false; m];
    if sigma.len() != m {
        return Err(Error::InvalidArgument(format!("permutation has length {}, expected {m}", sigma.len())));
    }
    for &s in sigma {
        if s == 0 || s > m || seen[s - 1] {
            return Err(Error::InvalidArgument(format!("{sigma:?} is not a permutation of 1..={m}")));
        }
        seen[s - 1] = true;
    }
    Ok(())
}

/// First-order formula in the given direction.
pub fn s1_dir<T: Real>(gen: &GkslGenerator<T>, dt: T, direction: Direction) -> Result<Superoperator<T>> {
    check_dt(dt)?;
    Ok(s1_from(&constituents(gen, dt, true)?, direction))
}

/// `1/2 (S1_forward + S1_reversed)`.
pub fn s1_ran_exact<T: Real>(gen: &GkslGenerator<T>, dt: T) -> Result<Superoperator<T>> {
    check_dt(dt)?;
    let exps = constituents(gen, dt, true)?;
    let f = s1_from(&exps, Direction::Forward);
    let r = s1_from(&exps, Direction::Reversed);
    Superoperator::weighted_sum(gen.dim(), &[(T::of(0.5), &f), (T::of(0.5), &r)])
}

/// Symmetric second-order block whose two sweeps each use step `coefficient * dt`.
/// `coefficient = 1/2` is the genuine formula.
pub fn s2_with_coefficient<T: Real>(
    gen: &GkslGenerator<T>,
    dt: T,
    sigma: &[usize],
    coefficient: T,
) -> Result<Superoperator<T>> {
    check_dt(dt)?;
    check_permutation(sigma, gen.m_total())?;
    Ok(s2_from(&constituents(gen, dt * coefficient, true)?, sigma))
}

pub fn s2_sigma<T: Real>(gen: &GkslGenerator<T>, dt: T, sigma: &[usize]) -> Result<Superoperator<T>> {
    s2_with_coefficient(gen, dt, sigma, T::of(0.5))
}

pub fn s2_det<T: Real>(gen: &GkslGenerator<T>, dt: T) -> Result<Superoperator<T>> {
    let id: Vec<usize> = (1..=gen.m_total()).collect();
    s2_sigma(gen, dt, &id)
}

/// Rearranges `p` into the next permutation in lexicographic order.
fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Uniform average of `s2_sigma` over all `M!` orderings.
pub fn s2_ran_exact<T: Real>(gen: &GkslGenerator<T>, dt: T) -> Result<Superoperator<T>> {
    check_dt(dt)?;
    let m = gen.m_total();
    if m > EXACT_MIXTURE_CAP {
        return Err(Error::MixtureCap { m, cap: EXACT_MIXTURE_CAP });
    }
    let half = constituents(gen, dt * T::of(0.5), true)?;
    let mut sigma: Vec<usize> = (1..=m).collect();
    let mut acc = Superoperator::zero(gen.dim());
    let mut count = 0usize;
    loop {
        acc = acc.add(&s2_from(&half, &sigma))?;
        count += 1;
        if !next_permutation(&mut sigma) {
            break;
        }
    }
    Ok(acc.scale(T::one() / T::of(count as f64)))
}

/// One step of `method` for total time `t` split into `n` steps
/// (`tau = t/n`, or `omega = t Gamma / n` for QDRIFT).
pub fn approx_step<T: Real>(method: MethodId, gen: &GkslGenerator<T>, t: T, n: usize) -> Result<Superoperator<T>> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be positive".into()));
    }
    let tau = t / T::of(n as f64);
    match method {
        MethodId::S1Det => s1_dir(gen, tau, Direction::Forward),
        MethodId::S2Det => s2_det(gen, tau),
        MethodId::S1Ran => s1_ran_exact(gen, tau),
        MethodId::S2Ran => s2_ran_exact(gen, tau),
        MethodId::Qdrift => super::qdrift_exact(gen, super::qdrift_omega(gen, t, n)?),
    }
}

/// `approx_step(method, gen, t, n)^n`.
pub fn approx_channel<T: Real>(method: MethodId, gen: &GkslGenerator<T>, t: T, n: usize) -> Result<Superoperator<T>> {
    Ok(approx_step(method, gen, t, n)?.pow(n))
}
