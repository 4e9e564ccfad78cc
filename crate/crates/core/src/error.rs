use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlbError {
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("label mismatch: {0}")]
    LabelMismatch(String),
    #[error("absolute-continuity violation: P has mass {p_mass} at a point where Q is zero")]
    AbsoluteContinuity { p_mass: f64 },
    #[error(
        "spectrum has {points} points, exceeding the cap of {cap}; use a coarser merge tolerance"
    )]
    TooManyPoints { points: usize, cap: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error(
        "quadrature did not converge: achieved relative change {achieved:e}, target {target:e}"
    )]
    Quadrature { achieved: f64, target: f64 },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, FlbError>;
