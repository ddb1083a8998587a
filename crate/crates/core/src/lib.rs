//! Invariant connections, curvature and Codazzi tensors on reductive
//! homogeneous spaces `G/H`, computed from structure constants.
//!
//! A space is a [`SpaceSpec`]: structure constants of `g = h + m` over a
//! basis listing `h` first, and the Gram matrix of an inner product on `m`.
//!
//! ```
//! use rgw_core::{examples, levi_civita_product, validate_space};
//!
//! let su2 = examples::su2(&[1.0, 1.0, 1.0]);
//! assert!(validate_space(&su2, 1e-9).unwrap().is_valid());
//! let alpha = levi_civita_product(&su2).unwrap();
//! assert_eq!(alpha.basis_product(0, 1), vec![0.0, 0.0, 0.5]);
//! ```

pub mod algebra;
pub mod codazzi;
pub mod connections;
pub mod curvature;
pub mod error;
pub mod examples;
pub mod scalar;
pub mod spectral;
pub mod tensor;

pub use algebra::*;
pub use codazzi::*;
pub use connections::{
    canonical_product, check_equivariance, covariant_differential, curvature, koszul_product, levi_civita_product, torsion,
};
pub use curvature::*;
pub use error::{Error, Result};
pub use scalar::{Rational, Scalar, DEFAULT_TOL};
pub use spectral::{decomposition_from_blocks, spectral_decompose, SpectralDecomp, CLUSTER_TOL};
pub use tensor::{Bilinear, CovTensor, CurvTensor, Matrix, ProductTable};
