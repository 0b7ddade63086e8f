use thiserror::Error;

use crate::forms::SpaceTag;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("tag mismatch: {0:?} vs {1:?}")]
    TagMismatch(SpaceTag, SpaceTag),
    #[error("expected {expected} coordinates, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("zero vector")]
    ZeroVector,
    #[error("point is off the model quadric (q = {q}, target {target})")]
    OffQuadric { q: f64, target: f64 },
    #[error("vector is not tangent (<p, xi> = {0})")]
    NotTangent(f64),
    #[error("tangent vector must be unit or null (q = {0})")]
    NotNormalized(f64),
    #[error("points are not related by a geodesic ({0})")]
    Unrelated(String),
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("polygon validation failed: {0}")]
    InvalidPolygon(String),
    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
