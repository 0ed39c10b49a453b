use super::product::check_dt;
use crate::error::{Error, Result};
use crate::lindblad::{constituent_channel, GkslGenerator, Superoperator};
use crate::scalar::Real;

fn gamma_total<T: Real>(gen: &GkslGenerator<T>) -> T {
    gen.rates().into_iter().fold(T::zero(), |a, r| a + r)
}

/// `p_k = gamma_k / Gamma`, with `gamma_1 = 1` included.
pub fn qdrift_probs<T: Real>(gen: &GkslGenerator<T>) -> Result<Vec<T>> {
    let gamma = gamma_total(gen);
    if gamma <= T::zero() {
        return Err(Error::InvalidGenerator("total rate is zero, nothing to simulate".into()));
    }
    Ok(gen.rates().into_iter().map(|r| r / gamma).collect())
}

/// `omega = t Gamma / n`.
pub fn qdrift_omega<T: Real>(gen: &GkslGenerator<T>, t: T, n: usize) -> Result<T> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be positive".into()));
    }
    Ok(t * gamma_total(gen) / T::of(n as f64))
}

/// `sum_k p_k exp(omega L_k)` with rate-free terms.
pub fn qdrift_exact<T: Real>(gen: &GkslGenerator<T>, omega: T) -> Result<Superoperator<T>> {
    check_dt(omega)?;
    let probs = qdrift_probs(gen)?;
    let exps: Vec<Superoperator<T>> =
        (1..=gen.m_total()).map(|k| constituent_channel(gen, k, omega, false)).collect::<Result<_>>()?;
    let parts: Vec<(T, &Superoperator<T>)> = probs.iter().cloned().zip(exps.iter()).collect();
    Superoperator::weighted_sum(gen.dim(), &parts)
}
