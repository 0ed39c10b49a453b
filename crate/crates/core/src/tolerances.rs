//! Numerical tolerances, collected in one record so tests and the CLI can
//! pin them.

/// Every tolerance and iteration cap used by the library.
///
/// Values are stated for `f64`; routines generic over the scalar widen them
/// via [`crate::Real::tol`] for lower precision types.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Hermiticity, unit trace and positivity checks on density matrices.
    pub state: f64,
    /// Hermiticity of generator Hamiltonians.
    pub hamiltonian: f64,
    /// Default tolerance of the CPTP check.
    pub cptp: f64,
    /// Hermiticity-preservation check on a Choi matrix before an SDP solve.
    pub hermiticity_preserving: f64,
    /// Absolute accuracy target for diamond norms.
    pub diamond_accuracy: f64,
    /// Largest duality gap accepted from the SDP solver.
    pub duality_gap: f64,
    /// Iteration cap of the interior-point loop.
    pub sdp_max_iterations: usize,
    /// Slack added on the right of Lemma-1 style inequalities.
    pub inequality_slack: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        state: 1e-10,
        hamiltonian: 1e-10,
        cptp: 1e-9,
        hermiticity_preserving: 1e-8,
        diamond_accuracy: 1e-6,
        duality_gap: 1e-7,
        sdp_max_iterations: 500,
        inequality_slack: 1e-6,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
