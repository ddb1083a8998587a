//! Guide snippets, compiled as doc-tests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/spaces.md")]
pub mod spaces {}

#[doc = include_str!("../../../book/src/connections.md")]
pub mod connections {}

#[doc = include_str!("../../../book/src/curvature.md")]
pub mod curvature {}

#[doc = include_str!("../../../book/src/codazzi.md")]
pub mod codazzi {}

#[doc = include_str!("../../../book/src/structure.md")]
pub mod structure {}

#[doc = include_str!("../../../book/src/workbench.md")]
pub mod workbench {}

#[doc = include_str!("../../../book/src/numerics.md")]
pub mod numerics {}
