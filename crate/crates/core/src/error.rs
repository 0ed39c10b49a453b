use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid generator: {0}")]
    InvalidGenerator(String),

    #[error("term index {k} out of range 1..={m}")]
    TermIndex { k: usize, m: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("map is not Hermiticity-preserving (deviation {deviation:e})")]
    NotHermiticityPreserving { deviation: f64 },

    #[error("SDP solver did not converge after {iterations} iterations (duality gap {gap:e}, infeasibility {infeasibility:e})")]
    SdpNotConverged {
        iterations: usize,
        gap: f64,
        infeasibility: f64,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("exact mixture over {m}! permutations exceeds the cap M <= {cap}; use mixture_estimate instead")]
    MixtureCap { m: usize, cap: usize },

    #[error("{0}")]
    Unsupported(String),

    #[error("{0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
