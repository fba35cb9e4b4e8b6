use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite value in input: {0}")]
    NonFinite(&'static str),

    #[error("negative weight {value} at index {index}")]
    NegativeWeight { index: usize, value: f64 },

    #[error("weights sum to {sum}, expected 1")]
    BadNormalization { sum: f64 },

    #[error("empty distribution")]
    Empty,

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("finite-difference stencil around {phi} leaves the family domain")]
    DomainEdge { phi: f64 },

    #[error("outcome {index} has vanishing probability but non-zero derivative {derivative}")]
    DegenerateSupport { index: usize, derivative: f64 },

    #[error("empty sample")]
    EmptySample,

    #[error("support violation: reference distribution vanishes where the other has mass")]
    SupportViolation,

    #[error("exponent {exponent} exceeds the overflow guard")]
    Overflow { exponent: f64 },

    #[error("target {target} outside the attainable range ({lo}, {hi})")]
    Unattainable { target: f64, lo: f64, hi: f64 },

    #[error("no convergence after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("matrix is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not unitary (deviation {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("pressures must satisfy 0 < p_final <= p_initial (got {p_initial}, {p_final})")]
    BadPressureOrder { p_initial: f64, p_final: f64 },

    #[error("stage {stage} out of range (run has {stages} stages)")]
    StageOutOfRange { stage: usize, stages: usize },

    #[error("phase {phi} outside the identifiable branch [0, π]")]
    OutOfBranch { phi: f64 },

    #[error("at least {required} ensembles required, got {got}")]
    TooFewEnsembles { required: usize, got: usize },

    #[error("encoder pitch {delta} outside the perturbative regime (≤ {max})")]
    OutOfRegime { delta: f64, max: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
