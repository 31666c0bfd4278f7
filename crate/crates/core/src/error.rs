//! Error type shared across the crate.

use crate::linalg::{CMatrix, C64};
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("zero vector cannot be classified")]
    ZeroVector,

    #[error("point {0} lies on the unit circle")]
    UnimodularPoint(C64),

    #[error("relation is not unitary: {0}")]
    NotUnitary(String),

    #[error("defect-span not stabilized: {0}")]
    InsufficientSamples(String),

    #[error("I - {0} T is singular")]
    SingularResolvent(C64),

    #[error("colligation identities violated: {0}")]
    InvalidColligation(String),

    #[error("point {lambda} excluded from the admissible set: {reason}")]
    ExcludedPoint { lambda: C64, reason: String },

    #[error("Weyl family at {lambda} is not an operator (residual {residual:.3e})")]
    MultivaluedWeyl {
        lambda: C64,
        residual: f64,
        /// Boundary images of a defect basis, stacked as (u1; u2) columns.
        generators: CMatrix,
    },

    #[error("transform parameter {0} lies on the unit circle")]
    UnimodularAlpha(C64),

    #[error("1/{0} is an eigenvalue of the isometry")]
    EigenvalueCollision(C64),

    #[error("product {0} * conj({1}) too close to 1")]
    UnimodularProduct(C64, C64),

    #[error("sample points must lie all inside or all outside the unit circle: {0}")]
    MixedRegion(String),

    #[error("degenerate boundary parameter: {0}")]
    DegenerateParameter(String),

    #[error("pencil not boundedly invertible: {0}")]
    SingularPencil(String),

    #[error("base boundary pair is not an ordinary triple: {0}")]
    NotOrdinary(String),

    #[error("regularity condition failed at {0}: I - Theta* eps not invertible")]
    Regularity(C64),

    #[error("Hankel rank did not stabilize: {0}")]
    RankNotStabilized(String),

    #[error("Stein equation not uniquely solvable: {0}")]
    SteinSingular(String),

    #[error("function is not in a generalized Schur class: {0}")]
    NotSchurClass(String),

    #[error("parameter isometry is not simple: {0}")]
    NotSimple(String),

    #[error("expansion center {center} does not match conj(alpha) = {expected}")]
    CenterMismatch { center: C64, expected: C64 },

    #[error("invalid input: {0}")]
    Input(String),
}
