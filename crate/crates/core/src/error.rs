use thiserror::Error;

/// Errors raised by the operator, observable and model constructors.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("factor dimensions {dims:?} do not multiply to {dim}")]
    InvalidDims { dims: Vec<usize>, dim: usize },

    #[error("operator carries no tensor factor metadata")]
    MissingDims,

    #[error("factor index {index} out of range for {factors} factors")]
    FactorOutOfRange { index: usize, factors: usize },

    #[error("operator is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("operator is not positive (minimum eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("spectrum leaves [0, 1] (eigenvalues in [{min:.3e}, {max:.3e}])")]
    NotAnEffect { min: f64, max: f64 },

    #[error("trace is {trace:.6e}, expected 1")]
    NotNormalized { trace: f64 },

    #[error("effects sum to identity only within {residual:.3e}")]
    Incomplete { residual: f64 },

    #[error("operation elements exceed the identity (largest eigenvalue {max_eigenvalue:.6e})")]
    TraceIncreasing { max_eigenvalue: f64 },

    #[error("operator is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },

    #[error("operator is not an orthogonal projection (residual {residual:.3e})")]
    NotProjection { residual: f64 },

    #[error("observable is not projection valued")]
    NotProjectionValued,

    #[error("outcome lists and effect lists differ in length ({outcomes} vs {effects})")]
    LengthMismatch { outcomes: usize, effects: usize },

    #[error("duplicate outcome label {0}")]
    DuplicateLabel(String),

    #[error("unknown outcome label {0}")]
    UnknownLabel(String),

    #[error("outcome labels are not tuples of a common arity")]
    NonTupleLabels,

    #[error("axis {axis} out of range for labels of arity {arity}")]
    AxisOutOfRange { axis: usize, arity: usize },

    #[error("too many outcomes ({0}) for exhaustive subset enumeration")]
    TooManyOutcomes(usize),

    #[error("operation supported only in dimension {supported}, got {found}")]
    UnsupportedDimension { supported: usize, found: usize },

    #[error("observable must be two-valued, has {0} outcomes")]
    NotTwoValued(usize),

    #[error("Bloch vector norm {0:.6} exceeds 1")]
    BlochNormTooLarge(f64),

    #[error("effects are not coexistent (criterion value {0:.6} > 2)")]
    NotCoexistent(f64),

    #[error("malformed interval [{lo}, {hi}]")]
    MalformedInterval { lo: f64, hi: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("malformed circuit: {0}")]
    MalformedCircuit(String),

    #[error("truncation leakage {leakage:.3e} exceeds bound {bound:.1e}; increase the dimension")]
    TruncationLeakage { leakage: f64, bound: f64 },

    #[error("pointer supports overlap: {0}")]
    OverlappingSupports(String),

    #[error("amplitude profile norm squared is {0:.6e}, expected 1")]
    NotNormalizedProfile(f64),

    #[error("linear solve failed in matrix exponential")]
    SingularPade,
}

pub type Result<T> = std::result::Result<T, Error>;
