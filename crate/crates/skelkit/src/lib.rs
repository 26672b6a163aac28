//! Randomized matrix skeletonization: sketching-based column/row skeleton
//! selection and the interpolative / CUR decompositions built from it.
//!
//! The pipeline has three stages, each living in its own module:
//!
//! 1. [`embed`] draws an oblivious random embedding (Gaussian, subsampled
//!    trigonometric transform, or sparse sign) and compresses the input into
//!    a small sketch.
//! 2. [`pivot`] runs a greedy pivoted factorization (partially pivoted LU or
//!    column-pivoted QR) on the sketch; the pivot indices are the skeletons.
//! 3. [`factors`] assembles column/row/two-sided interpolative decompositions
//!    or a CUR decomposition from the selected skeletons and measures the
//!    approximation error against the truncated SVD.
//!
//! [`skeleton`] wires the stages together (including a one-pass streaming
//! variant and an a-posteriori error certificate), [`matsource`] provides
//! uniform access to dense, sparse, synthetic, and black-box matrices, and
//! [`cli`] drives the benchmark commands exposed by the `skelkit` binary.

pub mod cli;
pub mod embed;
pub mod error;
pub mod factors;
mod linalg;
pub mod matsource;
pub mod pivot;
pub mod rangefinder;
pub mod skeleton;

pub use error::{Error, Result};
pub use matsource::{MatrixSource, SnnSpec};

pub use nalgebra::{DMatrix, DVector};
