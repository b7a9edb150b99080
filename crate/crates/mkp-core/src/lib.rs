//! Solitary-wave solutions of the modified Kadomtsev–Petviashvili (mKP)
//! equation
//!
//! ```text
//! q_t = (1/4) (q_xxx - 6 q^2 q_x - 6 q_x ∂x⁻¹ q_y + 3 ∂x⁻¹ q_yy)
//! ```
//!
//! built from two integrable decompositions (a Chen–Lee–Liu-type and a
//! Kaup–Newell-type coupled system, each with a second-order "y" flow and a
//! third-order "t" flow) and four binary Darboux transformations acting on
//! their `(N+1)×(N+1)` Lax representations.
//!
//! The crate is organised along the pipeline:
//!
//! * [`calculus`] — grids, finite-difference derivatives, the nonlocal
//!   antiderivative `∂x⁻¹`, and residuals of the mKP equation and of the four
//!   coupled systems;
//! * [`lax`] — assembly of the four Lax triples `(U, V, W)` and the
//!   zero-curvature residuals `U_y - V_x + [U,V]`, `U_t - W_x + [U,W]`;
//! * [`darboux`] — vacuum eigenfunctions, the pointwise `S`-matrices
//!   (similarity form for representations 1/3, block-split form for 2/4),
//!   the Darboux gauge data `δ`/`Δ`, seed-potential transforms, and the
//!   end-to-end pipeline producing `q` on a grid;
//! * [`families`] — the four closed-form solitary-wave families, their
//!   stability-region classification and denominator-singularity scans.
//!
//! Everything numeric is generic over the scalar type through [`Real`];
//! `f64` aliases for the common types are exported at the crate root.

pub mod calculus;
pub mod darboux;
mod error;
pub mod families;
pub mod lax;
pub mod linalg;
mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

/// Double-precision grid (the type used by the CLI and the test suites).
pub type Grid3 = calculus::Grid3<f64>;
/// Double-precision scalar field over a [`Grid3`].
pub type ScalarField3 = calculus::ScalarField3<f64>;
/// Double-precision vector potential (component pairs of a coupled system).
pub type VectorPotential = calculus::VectorPotential<f64>;
/// Double-precision small dense matrix.
pub type Mat = linalg::Mat<f64>;
/// Double-precision matrix-valued field.
pub type MatrixField = lax::MatrixField<f64>;
/// Double-precision solitary-wave parameter set.
pub type FamilyParams = families::FamilyParams<f64>;
/// Double-precision closed-form coefficient bundle.
pub type GammaXi = families::GammaXi<f64>;
/// Double-precision Darboux seed.
pub type SeedSpec = darboux::SeedSpec<f64>;
/// Double-precision pointwise S-matrices.
pub type SMatrices = darboux::SMatrices<f64>;
