use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::product::{check_permutation, constituents, s1_from, s2_from};
use super::{qdrift_omega, qdrift_probs, step_count, ChannelStep, Direction, MethodId};
use crate::error::{Error, Result};
use crate::linalg::DensityMatrix;
use crate::lindblad::{GkslGenerator, Superoperator};
use crate::norms::generator_stats;
use crate::scalar::Real;

/// Sampled sequence of channel steps; the first step acts first.
#[derive(Debug, Clone, PartialEq)]
pub struct GateSet {
    pub method: MethodId,
    pub seed: u64,
    /// `tau = t/N` for product formulas, `omega = t Gamma / N` for QDRIFT.
    pub dt: f64,
    pub n_steps: usize,
    pub steps: Vec<ChannelStep>,
}

/// Generator for draw `index` of a run seeded with `seed`.
fn step_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Independent seed for trajectory `index` (splitmix64 finalizer).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl GateSet {
    /// Draws `n` steps. `probs` is only read for QDRIFT.
    pub fn sample(method: MethodId, m_total: usize, probs: &[f64], dt: f64, n: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("N must be positive".into()));
        }
        let weights = match method {
            MethodId::Qdrift => {
                if probs.len() != m_total {
                    return Err(Error::Dimension(format!("{} probabilities for {m_total} terms", probs.len())));
                }
                Some(WeightedIndex::new(probs).map_err(|e| Error::InvalidArgument(format!("bad QDRIFT weights: {e}")))?)
            }
            MethodId::S1Ran | MethodId::S2Ran => None,
            MethodId::S1Det | MethodId::S2Det => {
                return Err(Error::Unsupported(format!("{method} is deterministic and has no sampled gate set")))
            }
        };
        let steps = (0..n)
            .map(|l| {
                let mut rng = step_rng(seed, l);
                match method {
                    MethodId::S1Ran => {
                        ChannelStep::S1Block(if rng.random_bool(0.5) { Direction::Reversed } else { Direction::Forward })
                    }
                    MethodId::S2Ran => {
                        let mut perm: Vec<usize> = (1..=m_total).collect();
                        perm.shuffle(&mut rng);
                        ChannelStep::S2Block(perm)
                    }
                    _ => ChannelStep::TermExp {
                        k: weights.as_ref().expect("qdrift weights").sample(&mut rng) + 1,
                        with_rate: false,
                    },
                }
            })
            .collect();
        Ok(Self { method, seed, dt, n_steps: n, steps })
    }
}

/// Gate set with a given step count `n` for total time `t`.
pub fn sample_gateset_n<T: Real>(method: MethodId, gen: &GkslGenerator<T>, t: T, n: usize, seed: u64) -> Result<GateSet> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be positive".into()));
    }
    let dt = match method {
        MethodId::Qdrift => qdrift_omega(gen, t, n)?,
        _ => t / T::of(n as f64),
    };
    let probs: Vec<f64> = match method {
        MethodId::Qdrift => qdrift_probs(gen)?.into_iter().map(|p| p.as_f64()).collect(),
        _ => Vec::new(),
    };
    GateSet::sample(method, gen.m_total(), &probs, dt.as_f64(), n, seed)
}

/// Gate set whose length comes from the step-count bound for accuracy `epsilon`.
pub fn sample_gateset<T: Real>(method: MethodId, gen: &GkslGenerator<T>, t: T, epsilon: f64, seed: u64) -> Result<GateSet> {
    let stats = generator_stats(gen)?;
    let bound = step_count(method, &stats, t.as_f64(), epsilon)?;
    sample_gateset_n(method, gen, t, bound.n_steps, seed)
}

/// Step channels shared by every gate set with the same method and `dt`.
struct StepChannels<T: Real> {
    dim: usize,
    m_total: usize,
    s1: Option<[Superoperator<T>; 2]>,
    half: Vec<Superoperator<T>>,
    bare: Vec<Superoperator<T>>,
}

impl<T: Real> StepChannels<T> {
    fn new(method: MethodId, gen: &GkslGenerator<T>, dt: T) -> Result<Self> {
        let mut out = Self { dim: gen.dim(), m_total: gen.m_total(), s1: None, half: Vec::new(), bare: Vec::new() };
        match method {
            MethodId::S1Ran | MethodId::S1Det => {
                let exps = constituents(gen, dt, true)?;
                out.s1 = Some([s1_from(&exps, Direction::Forward), s1_from(&exps, Direction::Reversed)]);
            }
            MethodId::S2Ran | MethodId::S2Det => out.half = constituents(gen, dt * T::of(0.5), true)?,
            MethodId::Qdrift => out.bare = constituents(gen, dt, false)?,
        }
        Ok(out)
    }

    fn step(&self, step: &ChannelStep) -> Result<Superoperator<T>> {
        match step {
            ChannelStep::S1Block(dir) => {
                let s1 = self.s1.as_ref().ok_or_else(|| Error::InvalidArgument("S1 block in a non-S1 gate set".into()))?;
                Ok(match dir {
                    Direction::Forward => s1[0].clone(),
                    Direction::Reversed => s1[1].clone(),
                })
            }
            ChannelStep::S2Block(sigma) => {
                if self.half.is_empty() {
                    return Err(Error::InvalidArgument("S2 block in a non-S2 gate set".into()));
                }
                check_permutation(sigma, self.m_total)?;
                Ok(s2_from(&self.half, sigma))
            }
            ChannelStep::TermExp { k, with_rate } => {
                if *with_rate || self.bare.is_empty() {
                    return Err(Error::InvalidArgument("term exponential in a non-QDRIFT gate set".into()));
                }
                if *k == 0 || *k > self.m_total {
                    return Err(Error::TermIndex { k: *k, m: self.m_total });
                }
                Ok(self.bare[k - 1].clone())
            }
        }
    }

    fn compose(&self, steps: &[ChannelStep]) -> Result<Superoperator<T>> {
        let mut acc = Superoperator::identity(self.dim);
        for s in steps {
            acc = acc.then(&self.step(s)?)?;
        }
        Ok(acc)
    }
}

/// Composition of the gate set's steps, first step acting first.
pub fn gateset_channel<T: Real>(gs: &GateSet, gen: &GkslGenerator<T>) -> Result<Superoperator<T>> {
    if gs.steps.is_empty() {
        return Ok(Superoperator::identity(gen.dim()));
    }
    StepChannels::new(gs.method, gen, T::of(gs.dt))?.compose(&gs.steps)
}

pub fn apply_gateset<T: Real>(gs: &GateSet, gen: &GkslGenerator<T>, rho0: &DensityMatrix<T>) -> Result<DensityMatrix<T>> {
    if rho0.dim() != gen.dim() {
        return Err(Error::Dimension(format!("state dim {} vs generator dim {}", rho0.dim(), gen.dim())));
    }
    gateset_channel(gs, gen)?.apply(rho0)
}

const CHUNK: usize = 32;

/// Per-batch means of `r_samples` gate-set channels split into `batches`
/// contiguous groups, plus the overall mean. Trajectory `i` uses
/// `derive_seed(seed, i)`; sums run in index order, so the result does not
/// depend on thread scheduling.
pub fn mixture_batches<T: Real>(
    method: MethodId,
    gen: &GkslGenerator<T>,
    t: T,
    n: usize,
    r_samples: usize,
    seed: u64,
    batches: usize,
) -> Result<(Superoperator<T>, Vec<Superoperator<T>>)> {
    if r_samples == 0 || batches == 0 || batches > r_samples {
        return Err(Error::InvalidArgument(format!("need 1 <= batches ({batches}) <= r_samples ({r_samples})")));
    }
    let first = sample_gateset_n(method, gen, t, n, derive_seed(seed, 0))?;
    let channels = StepChannels::new(method, gen, T::of(first.dt))?;
    let probs: Vec<f64> = match method {
        MethodId::Qdrift => qdrift_probs(gen)?.into_iter().map(|p| p.as_f64()).collect(),
        _ => Vec::new(),
    };
    let sum_range = |lo: usize, hi: usize| -> Result<Superoperator<T>> {
        let starts: Vec<usize> = (lo..hi).step_by(CHUNK).collect();
        let partial: Vec<Superoperator<T>> = starts
            .par_iter()
            .map(|&s| {
                let mut acc = Superoperator::zero(gen.dim());
                for i in s..(s + CHUNK).min(hi) {
                    let gs = GateSet::sample(method, gen.m_total(), &probs, first.dt, n, derive_seed(seed, i as u64))?;
                    acc = acc.add(&channels.compose(&gs.steps)?)?;
                }
                Ok(acc)
            })
            .collect::<Result<_>>()?;
        let mut total = Superoperator::zero(gen.dim());
        for p in &partial {
            total = total.add(p)?;
        }
        Ok(total)
    };
    let mut batch_means = Vec::with_capacity(batches);
    let mut total = Superoperator::zero(gen.dim());
    for b in 0..batches {
        let lo = b * r_samples / batches;
        let hi = (b + 1) * r_samples / batches;
        let sum = sum_range(lo, hi)?;
        total = total.add(&sum)?;
        batch_means.push(sum.scale(T::one() / T::of((hi - lo) as f64)));
    }
    Ok((total.scale(T::one() / T::of(r_samples as f64)), batch_means))
}

/// Monte Carlo average of `r_samples` gate-set channels.
pub fn mixture_estimate<T: Real>(
    method: MethodId,
    gen: &GkslGenerator<T>,
    t: T,
    n: usize,
    r_samples: usize,
    seed: u64,
) -> Result<Superoperator<T>> {
    mixture_batches(method, gen, t, n, r_samples, seed, 1).map(|(mean, _)| mean)
}
