//! The reductive decomposition `g = h + m` and the algebra `(m, [.,.]_m)`.

pub mod forms;
pub mod killing;
pub mod malgebra;
pub mod solvable;
pub mod space;

pub use forms::{invariant_symmetric_forms, orthonormalize_forms, SymForm};
pub use killing::{killing_split, KillingSplit};
pub use malgebra::{is_abelian, is_ideal, is_nilpotent, is_subalgebra, killing_form, project_algebra, MAlgebra, Nilpotency};
pub use solvable::{is_split_solvable, verify_chain, SplitSolvable};
pub use space::{validate_space, Invariant, InvariantCheck, SpaceSpec, ValidationReport};
