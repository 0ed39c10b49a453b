//! Randomised product formulas and the QDRIFT channel for Markovian open
//! quantum systems, measured against the exact GKSL evolution in the
//! diamond norm.
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix `f64`, which is what the diamond-norm solver works in
//! internally regardless of the input type.
//!
//! ```
//! use lindblad_rand_core::prelude::*;
//!
//! let mut sm = CMatrix::zeros(2, 2);
//! sm[(0, 1)] = c(1.0, 0.0);
//! let gen = Generator::from_parts(CMatrix::zeros(2, 2), vec![(sm, 1.0)]).unwrap();
//! let exact = exact_channel(&gen, 1.0).unwrap();
//! assert!(exact.is_cptp(1e-9).cptp);
//! ```

pub mod error;
pub mod forking;
pub mod formulas;
pub mod linalg;
pub mod lindblad;
pub mod norms;
pub mod scalar;
pub mod sdp;
pub mod tolerances;

pub use error::{Error, Result};
pub use scalar::{c, ComplexMatrix, ComplexVector, Real};
pub use tolerances::Tolerances;

pub type CMatrix = ComplexMatrix<f64>;
pub type CVector = ComplexVector<f64>;
pub type State = linalg::DensityMatrix<f64>;
pub type Generator = lindblad::GkslGenerator<f64>;
pub type Channel = lindblad::Superoperator<f64>;
pub type Choi = lindblad::ChoiMatrix<f64>;

pub mod prelude {
    pub use crate::forking::{fork_qdrift_run, fork_qdrift_step, fork_s1_run, fork_s1_step, ForkLayout};
    pub use crate::formulas::{
        approx_channel, error_bound, gate_count, gateset_channel, mixture_estimate, qdrift_exact, qdrift_probs,
        s1_dir, s1_ran_exact, s2_det, s2_ran_exact, s2_sigma, sample_gateset, step_count, Direction, GateSet,
        Implementation, MethodId,
    };
    pub use crate::linalg::{trace_distance, DensityMatrix};
    pub use crate::lindblad::{exact_channel, full_liouvillian, term_superop, GkslGenerator, Superoperator};
    pub use crate::norms::{diamond_distance, diamond_norm, generator_stats, GeneratorStats};
    pub use crate::{c, CMatrix, Channel, Generator, Real, State};
}
