//! Exact linear algebra over the integers, the rationals and prime fields.
//!
//! Everything else in the crate goes through this module: Smith and
//! Hermite normal forms, deterministic solving with infeasibility
//! certificates, kernels, images, subquotients and sections of surjections.

pub mod hermite;
pub mod matrix;
pub mod ring;
pub mod smith;
pub mod solve;
pub mod subquotient;

pub use hermite::{column_hermite_form, HermiteForm};
pub use matrix::{vector, ExactMatrix};
pub use ring::{scalar_json, Ring, Scalar};
pub use smith::{invariant_factors, inverse, rank, smith_normal_form, SmithForm};
pub use solve::{image_basis, kernel_basis, solve, Infeasibility, LinearSolver};
pub use subquotient::{quotient_presentation, section_of_surjection, Subquotient};
