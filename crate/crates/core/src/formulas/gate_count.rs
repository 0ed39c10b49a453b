use std::fmt;
use std::str::FromStr;

use super::MethodId;
use crate::error::{Error, Result};

/// How the random choices of a randomised method are realised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Implementation {
    /// Classical sampling of a gate set.
    ClassicalSampling,
    /// Quantum forking with controlled-SWAP channels.
    QuantumForking,
}

impl Implementation {
    pub fn name(self) -> &'static str {
        match self {
            Implementation::ClassicalSampling => "CS",
            Implementation::QuantumForking => "QF",
        }
    }
}

impl fmt::Display for Implementation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Implementation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cs" => Ok(Implementation::ClassicalSampling),
            "qf" => Ok(Implementation::QuantumForking),
            _ => Err(Error::InvalidArgument(format!("unknown implementation {s:?} (expected cs or qf)"))),
        }
    }
}

/// Number of simple channels needed for `n` steps on an `m`-term generator.
pub fn gate_count(method: MethodId, m: usize, n: usize, implementation: Implementation) -> Result<u64> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidArgument("M and N must be positive".into()));
    }
    let (m, n) = (m as u64, n as u64);
    let count = match (method, implementation) {
        (MethodId::S1Det, Implementation::ClassicalSampling) => n.checked_mul(m),
        (MethodId::S2Det, Implementation::ClassicalSampling) => n.checked_mul(m).and_then(|x| x.checked_mul(2)),
        (MethodId::S1Ran, Implementation::ClassicalSampling) => n.checked_mul(m),
        (MethodId::S2Ran, Implementation::ClassicalSampling) => n.checked_mul(m).and_then(|x| x.checked_mul(2)),
        (MethodId::Qdrift, Implementation::ClassicalSampling) => Some(n),
        (MethodId::S1Ran, Implementation::QuantumForking) => (2 * m + 2).checked_mul(n),
        (MethodId::Qdrift, Implementation::QuantumForking) => (3 * m - 2).checked_mul(n),
        (MethodId::S2Ran, Implementation::QuantumForking) => {
            return Err(Error::Unsupported(
                "S2_RAN has no quantum-forking implementation: it needs 2(M!) controlled-SWAP channels per step".into(),
            ))
        }
        (MethodId::S1Det | MethodId::S2Det, Implementation::QuantumForking) => {
            return Err(Error::Unsupported(format!("{method} is deterministic; quantum forking does not apply")))
        }
    };
    count.ok_or_else(|| Error::InvalidArgument("gate count overflows u64".into()))
}
