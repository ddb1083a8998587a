//! Invariant Codazzi tensors: the linear system, the compatibility condition
//! on eigenspace decompositions, and the parallel/essential classification.

pub mod classify;
pub mod compat;
pub mod solve;

pub use classify::{classify, CodazziClassification};
pub use compat::{
    check_compatibility, construct_codazzi, eigen_alpha, eigen_alpha_residual, intermediate_residuals,
    skew_representation_check, Compatibility, FrameBrackets, SkewRepresentation, Violation,
};
pub use solve::{codazzi_residual, codazzi_rows, codazzi_solution_space};
