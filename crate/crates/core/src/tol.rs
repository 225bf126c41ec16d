//! Library-wide numerical tolerances.
//!
//! All are absolute. Entrywise maxima are used for operator comparisons.

/// Entrywise `|A - A†|` bound for Hermiticity.
pub const HERMITIAN: f64 = 1e-10;
/// Smallest admissible eigenvalue of a positive operator.
pub const POSITIVITY: f64 = 1e-10;
/// Entrywise bound on `Σ E - I`.
pub const COMPLETENESS: f64 = 1e-9;
/// Trace of a state must equal one within this bound.
pub const TRACE: f64 = 1e-10;
/// Entrywise bound on `U U† - I`.
pub const UNITARY: f64 = 1e-10;
/// Eigenvalues within this distance of 1 (or 0) count as exact.
pub const UNIT_EIGENVALUE: f64 = 1e-8;
/// Idempotency bound for projections handed to the meet.
pub const PROJECTION: f64 = 1e-8;
/// Repeatability and first-kind comparisons of outcome probabilities.
pub const REPEATABILITY: f64 = 1e-8;
/// Euclidean norm deviation allowed for unit vectors.
pub const UNIT_VECTOR: f64 = 1e-12;
/// Boundary slack in the spin coexistence inequality.
pub const BLOCH_BOUNDARY: f64 = 1e-12;
/// Probability mass a truncated coherent state may lose.
pub const COHERENT_LEAKAGE: f64 = 1e-8;
/// Operators whose largest entry is below this are treated as zero.
pub const ZERO_OPERATOR: f64 = 1e-9;
