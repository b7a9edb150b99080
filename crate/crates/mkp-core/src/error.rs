use crate::calculus::Axis;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A grid axis has too few points for the requested stencil.
    #[error("axis {axis:?} has {len} points, but the operation needs at least {required}")]
    AxisTooShort {
        axis: Axis,
        len: usize,
        required: usize,
    },

    /// Two fields or potentials that must share a grid do not.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// Invalid user-supplied parameters (lambdas, alphas, grid bounds, ...).
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// A potential is used with an operation belonging to the other branch.
    #[error("branch mismatch: {0}")]
    BranchMismatch(String),

    /// The eigenfunction matrix (or a block of it) is numerically singular.
    #[error("degenerate seed at (x={x}, y={y}, t={t}): {reason}")]
    DegenerateSeed { x: f64, y: f64, t: f64, reason: String },

    /// A closed-form or pipeline denominator vanishes at an evaluation point.
    #[error("singular denominator at (x={x}, y={y}, t={t}): {reason}")]
    SingularPoint { x: f64, y: f64, t: f64, reason: String },

    /// A pointwise operation needing x-derivatives was asked for a point in
    /// the boundary margin.
    #[error("point ({ix}, {iy}, {it}) lies in the x-boundary margin of width {margin}")]
    BoundaryPoint { ix: usize, iy: usize, it: usize, margin: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
