//! Product formulas, QDRIFT, sampled gate sets, step-count bounds and gate counts.

mod bounds;
mod gate_count;
mod gateset;
mod product;
mod qdrift;

pub use bounds::{
    error_bound, error_bound_with, restricted_sum_closed_form, restricted_sum_enumerated, step_count,
    step_count_with, BoundOptions, StepBound,
};
pub use gate_count::{gate_count, Implementation};
pub use gateset::{
    apply_gateset, derive_seed, gateset_channel, mixture_batches, mixture_estimate, sample_gateset,
    sample_gateset_n, GateSet,
};
pub use product::{
    approx_step, approx_channel, s1_dir, s1_ran_exact, s2_det, s2_ran_exact, s2_sigma, s2_with_coefficient,
    EXACT_MIXTURE_CAP,
};
pub use qdrift::{qdrift_exact, qdrift_omega, qdrift_probs};

use std::fmt;
use std::str::FromStr;

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MethodId {
    S1Det,
    S2Det,
    S1Ran,
    S2Ran,
    Qdrift,
}

impl MethodId {
    pub const ALL: [MethodId; 5] = [MethodId::S1Det, MethodId::S2Det, MethodId::S1Ran, MethodId::S2Ran, MethodId::Qdrift];

    pub fn name(self) -> &'static str {
        match self {
            MethodId::S1Det => "S1_DET",
            MethodId::S2Det => "S2_DET",
            MethodId::S1Ran => "S1_RAN",
            MethodId::S2Ran => "S2_RAN",
            MethodId::Qdrift => "QDRIFT",
        }
    }

    pub fn is_randomized(self) -> bool {
        matches!(self, MethodId::S1Ran | MethodId::S2Ran | MethodId::Qdrift)
    }

    /// Error exponent in `N` of the method's bound.
    pub fn order(self) -> u32 {
        match self {
            MethodId::S1Det | MethodId::Qdrift => 1,
            _ => 2,
        }
    }
}

impl fmt::Display for MethodId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MethodId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let norm = s.trim().to_ascii_uppercase().replace('-', "_");
        MethodId::ALL
            .into_iter()
            .find(|m| m.name() == norm)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown method {s:?} (expected one of S1_DET, S2_DET, S1_RAN, S2_RAN, QDRIFT)")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    /// Term 1 acts first.
    Forward,
    /// Term `M` acts first.
    Reversed,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ChannelStep {
    S1Block(Direction),
    /// Second-order block over a permutation of `1..=M`.
    S2Block(Vec<usize>),
    TermExp { k: usize, with_rate: bool },
}
