//! Numerical core for checking log-concavity inequalities of rotationally
//! invariant measures `dμ = e^{-w(|x|)} dx` on ℝⁿ.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure
//! function of its inputs: radial weights and their curvature operators,
//! origin-symmetric convex bodies, polar-coordinate quadrature, test
//! functions, inequality checks and the Galerkin / finite-difference
//! machinery behind the spectral checks.
//!
//! With the `parallel` feature, quadrature sweeps over sphere nodes run on
//! rayon. Partial sums are always reduced in node order, so results are
//! bit-identical with and without the feature.
#![cfg_attr(not(any(test, feature = "std")), no_std)]
// `!(x > 0.0)` deliberately rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod bodies;
pub mod checks;
mod error;
pub mod linalg;
pub mod num;
pub mod quadrature;
pub mod report;
pub mod rng;
pub mod spectral;
pub mod testfns;
pub mod weights;

pub use bodies::{Polygon, SymmetricBody};
pub use error::{Error, Result};
pub use linalg::Matrix;
pub use quadrature::{Estimate, LogConcaveFactor, QuadratureSpec, RestrictedMeasure};
pub use report::{CheckReport, Status};
pub use testfns::{Parity, TestFunction};
pub use weights::{CurvatureOperator, RadialWeight};

/// Largest ambient dimension supported by the stack scratch buffers.
pub const MAX_DIM: usize = 16;
