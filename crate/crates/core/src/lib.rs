//! Exact homological algebra for finite dg-algebras: cohomology with chosen
//! splittings, the secondary multiplication as a Hochschild 3-cocycle,
//! Massey triple products, mapping-cone extensions of cohomology modules
//! and their splittings, and the exterior-algebra model of tori.

pub mod dga;
pub mod error;
pub mod exactlin;
pub mod gysin;
pub mod hochschild;
pub mod massey;
pub mod sections;
pub mod simplicial;
pub mod torus;

pub use dga::{cochain_algebra, DgAlgebra, DgModule};
pub use error::{Error, Result};
pub use exactlin::{ExactMatrix, Ring, Scalar, Subquotient};
pub use hochschild::{HochschildCochain, TwistedBimodule};
pub use sections::{build_sections, compute_cohomology, CohomologyRing, CohomologySections};
pub use simplicial::SimplicialComplex;
