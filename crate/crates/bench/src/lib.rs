//! Shared inputs for the criterion benches.

use std::sync::Arc;

use hochgysin_core::simplicial::build_torus;
use hochgysin_core::{cochain_algebra, CohomologySections, DgAlgebra, Ring};

pub fn torus_algebra(n: usize) -> Arc<DgAlgebra> {
    Arc::new(cochain_algebra(
        &build_torus(n).expect("torus builds"),
        Ring::Integers,
    ))
}

pub fn torus_sections(n: usize, seed: Option<u64>) -> CohomologySections {
    CohomologySections::build(torus_algebra(n), seed).expect("tori are torsion-free")
}
