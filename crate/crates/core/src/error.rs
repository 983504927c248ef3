use thiserror::Error;

/// Errors shared by every module in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {context} expected {expected}, got {actual}")]
    DimensionMismatch {
        context: String,
        expected: usize,
        actual: usize,
    },

    #[error("subsystem {subsystem} has dimension {subsystem_dim}, operator acts on dimension {op_dim}")]
    SubsystemMismatch {
        subsystem: usize,
        subsystem_dim: usize,
        op_dim: usize,
    },

    #[error("state is not normalized: squared norm {norm_sqr} (tolerance {tol})")]
    NotNormalized { norm_sqr: f64, tol: f64 },

    #[error("operator is not unitary: max |U^dag U - I| = {deviation:e}")]
    NotUnitary { deviation: f64 },

    #[error("invalid density matrix: {reason}")]
    InvalidDensity { reason: String },

    #[error("invalid subsystem selection: {reason}")]
    InvalidSubsystems { reason: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("step probability {delta_p} exceeds 0.1; decrease dt or the rate")]
    StepTooCoarse { delta_p: f64 },

    #[error("jump amplitude requires step index k >= 1")]
    ZeroStepIndex,

    #[error("branch count {needed} exceeds cap {cap}; raise the cap or use the aggregated path")]
    BranchCapExceeded { needed: usize, cap: usize },

    #[error("bookkeeping drift: |norm^2 + dropped - 1| = {drift:e} exceeds {limit:e}")]
    NormDrift { drift: f64, limit: f64 },

    #[error(
        "incomplete-decay weight {p_incomplete:e} exceeds threshold {threshold:e}; \
         increase the step count so both decays have occurred"
    )]
    TruncationThreshold { p_incomplete: f64, threshold: f64 },

    #[error(
        "evolution span {span} is shorter than max(1/gamma_a, 1/gamma_b) = {required}; \
         asymptotic quantities need a longer run"
    )]
    InsufficientSpan { span: f64, required: f64 },

    #[error("joint amplitude grid is not normalized: total weight {norm}")]
    UnnormalizedGrid { norm: f64 },

    #[error(
        "rates differ (gamma_a = {gamma_a}, gamma_b = {gamma_b}); exact decoupling needs equal \
         rates — use the unequal-rate diagnostic instead"
    )]
    UnequalRates { gamma_a: f64, gamma_b: f64 },

    #[error("dominant eigenvalue is degenerate (gap {gap:e}); the machine did not decouple")]
    DegenerateDominantEigenvalue { gap: f64 },

    #[error("time ordering violated: t_early = {t_early} must be strictly before t_late = {t_late}")]
    TimeOrdering { t_early: f64, t_late: f64 },

    #[error("eigensolver failed to converge after {sweeps} sweeps (off-diagonal {off:e})")]
    EigenNoConvergence { sweeps: usize, off: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
