//! Dynamics of monic polynomial maps on matrix space.
//!
//! The crate classifies points of the complex plane and of matrix space as
//! dynamically stable or chaotic under iteration of a monic polynomial. The
//! matrix-side criterion is spectral: a matrix is stable exactly when its
//! whole spectrum is, and the crate can cross-check that criterion against
//! direct orbit iteration. Around the classifier sit the supporting kernels:
//! complex eigenvalues, matrix Cauchy integrals and spectral projectors,
//! closed-form Jordan-block iteration, the power-map differential, exact
//! big-integer word-map iteration, and an escape-time renderer.

pub mod cmatrix;
pub mod error;
pub mod funcalc;
pub mod matrix_dyn;
pub mod poly;
pub mod render;
pub mod scalar_dyn;
pub mod verify;
pub mod wordmap;

mod eigen;

pub use cmatrix::{CMatrix, Cluster, Spectrum};
pub use error::DynError;
pub use matrix_dyn::{
    ClassifyParams, FatouReason, JcDecomposition, MatrixClass, MatrixOrbit, MatrixVerdict,
    OrbitBehavior,
};
pub use poly::{MonicPoly, PolyError, ScalarOrbit};
pub use render::{ClassGrid, GridSpec, Palette, RenderMode, SliceFamily, VerdictCode};
pub use scalar_dyn::{PerturbedVerdict, ScalarClass, ScalarVerdict};
pub use wordmap::{ExactMatrix, ExactScalar, GroupWord, NcPolynomial, SystemKind, WordSystem};
