//! Massey triple products `⟨x, y, z⟩` read off from `Θ`, with their
//! indeterminacy `xH + Hz`.

use crate::dga::DgAlgebra;
use crate::error::{Error, Result};
use crate::exactlin::{vector, ExactMatrix, Scalar, Subquotient};
use crate::hochschild::{HochschildCochain, TwistedBimodule};
pub use crate::sections::ClassRef;
use crate::sections::{CohomologyRing, CohomologySections};

const FIXTURE: &str = include_str!("../fixtures/massey_fixture.dga.json");

/// A small algebra over ℤ with `C^1 = ⟨a, b, c, u, v⟩`, `C^2 = ⟨P, Q, R⟩`,
/// `du = P`, `dv = Q` and products `ab = P`, `bc = Q`, `av = R`. Its triple
/// `⟨[a], [b], [c]⟩` is `-[R]` with zero indeterminacy.
pub fn massey_fixture() -> DgAlgebra {
    DgAlgebra::from_json(FIXTURE).expect("bundled fixture is valid")
}

#[derive(Clone, Debug)]
pub struct MasseyResult {
    pub degree: usize,
    pub representative: Vec<Scalar>,
    pub indeterminacy: Subquotient,
}

impl MasseyResult {
    /// Whether `v ∈ H^degree` lies in the coset.
    pub fn contains(&self, v: &[Scalar]) -> Result<bool> {
        let diff = vector::sub(self.indeterminacy.ring(), v, &self.representative);
        self.indeterminacy.contains(&diff)
    }

    pub fn contains_zero(&self) -> Result<bool> {
        self.indeterminacy.contains(&vector::scale(
            self.indeterminacy.ring(),
            &self.representative,
            &self.indeterminacy.ring().from_i64(-1),
        ))
    }
}

fn check_class(h: &CohomologyRing, x: ClassRef) -> Result<()> {
    if x.degree > h.top_degree() || x.coords.len() != h.rank(x.degree as isize) {
        return Err(Error::DimensionMismatch(format!(
            "class of degree {} with {} coordinates; H^{} has rank {}",
            x.degree,
            x.coords.len(),
            x.degree,
            h.rank(x.degree as isize)
        )));
    }
    Ok(())
}

/// `x H^{|y|+|z|-1} + H^{|x|+|y|-1} z` inside `H^{|x|+|y|+|z|-1}`.
pub fn indeterminacy(
    h: &CohomologyRing,
    x: ClassRef,
    y: ClassRef,
    z: ClassRef,
) -> Result<Subquotient> {
    let ring = h.ring();
    let n = x.degree + y.degree + z.degree;
    let rows = if n == 0 { 0 } else { h.rank(n as isize - 1) };
    let mut parts = vec![ExactMatrix::zeros(ring, rows, 0)];
    if n > 0 && n - 1 <= h.top_degree() {
        if y.degree + z.degree > 0 {
            parts.push(h.left_multiplication(x.degree, x.coords, y.degree + z.degree - 1));
        }
        if x.degree + y.degree > 0 {
            parts.push(h.right_multiplication(x.degree + y.degree - 1, z.degree, z.coords));
        }
    }
    let refs: Vec<&ExactMatrix> = parts.iter().collect();
    Subquotient::submodule(&ExactMatrix::hstack(&refs)?)
}

fn require_massey_triple(h: &CohomologyRing, x: ClassRef, y: ClassRef, z: ClassRef) -> Result<()> {
    for c in [x, y, z] {
        check_class(h, c)?;
    }
    let xy = h.multiply(x.degree, x.coords, y.degree, y.coords);
    if !vector::is_zero(&xy) {
        return Err(Error::NotAMasseyTriple(format!(
            "xy = {} is nonzero",
            vector::to_json(&xy)
        )));
    }
    let yz = h.multiply(y.degree, y.coords, z.degree, z.coords);
    if !vector::is_zero(&yz) {
        return Err(Error::NotAMasseyTriple(format!(
            "yz = {} is nonzero",
            vector::to_json(&yz)
        )));
    }
    Ok(())
}

/// `⟨x, y, z⟩ = π((-1)^{|x|} s(x)q(y,z) - q(x,y)s(z))` modulo `xH + Hz`.
pub fn massey_triple(
    co: &CohomologySections,
    x: ClassRef,
    y: ClassRef,
    z: ClassRef,
) -> Result<MasseyResult> {
    let h = co.cohomology_ring();
    require_massey_triple(h, x, y, z)?;
    let a = co.algebra();
    let ring = a.ring();
    let n = x.degree + y.degree + z.degree;
    let ind = indeterminacy(h, x, y, z)?;
    if n == 0 || n - 1 > co.top_degree() {
        return Ok(MasseyResult {
            degree: n.saturating_sub(1),
            representative: Vec::new(),
            indeterminacy: ind,
        });
    }
    let mut w = vector::zeros(a.rank(n as isize - 1));
    if y.degree + z.degree > 0 {
        let t = a.multiply(
            x.degree,
            &co.section(x.degree, x.coords)?,
            y.degree + z.degree - 1,
            &co.q_pair(y.degree, y.coords, z.degree, z.coords),
        );
        let sgn = ring.from_i64(if x.degree.is_multiple_of(2) { 1 } else { -1 });
        vector::axpy(ring, &mut w, &sgn, &t);
    }
    if x.degree + y.degree > 0 {
        let t = a.multiply(
            x.degree + y.degree - 1,
            &co.q_pair(x.degree, x.coords, y.degree, y.coords),
            z.degree,
            &co.section(z.degree, z.coords)?,
        );
        w = vector::sub(ring, &w, &t);
    }
    Ok(MasseyResult {
        degree: n - 1,
        representative: co.pi(n - 1, &w)?,
        indeterminacy: ind,
    })
}

/// Whether two section packages on the same algebra give the same coset.
/// The second representative is carried into the first basis through `π_1 ∘ s_2`.
pub fn coset_stable(
    co1: &CohomologySections,
    co2: &CohomologySections,
    x: ClassRef,
    y: ClassRef,
    z: ClassRef,
) -> Result<bool> {
    let m1 = massey_triple(co1, x, y, z)?;
    let m2 = massey_triple(co2, x, y, z)?;
    if m2.representative.is_empty() {
        return Ok(m1.representative.is_empty());
    }
    let moved = co1.pi(m2.degree, &co2.section(m2.degree, &m2.representative)?)?;
    m1.contains(&moved)
}

/// `α(x, y, z)` for an arity-3 cochain: the image of `[α]` in
/// `H/(xH + Hz)` once reduced modulo the indeterminacy.
pub fn specialize(
    alpha: &HochschildCochain,
    h: &CohomologyRing,
    x: ClassRef,
    y: ClassRef,
    z: ClassRef,
) -> Result<Vec<Scalar>> {
    if alpha.arity() != 3 {
        return Err(Error::ShapeMismatch(format!(
            "specialization needs arity 3, got {}",
            alpha.arity()
        )));
    }
    for c in [x, y, z] {
        check_class(h, c)?;
    }
    Ok(alpha.evaluate(
        h,
        &[x.degree, y.degree, z.degree],
        &[x.coords, y.coords, z.coords],
    ))
}

/// Whether `θ(x, y, z)` lies in the Massey coset.
pub fn agrees_with_theta(
    theta: &HochschildCochain,
    co: &CohomologySections,
    x: ClassRef,
    y: ClassRef,
    z: ClassRef,
) -> Result<bool> {
    let m = massey_triple(co, x, y, z)?;
    let v = specialize(theta, co.cohomology_ring(), x, y, z)?;
    if m.representative.is_empty() {
        return Ok(v.is_empty());
    }
    m.contains(&v)
}

/// `δa(x, y, z)` for a Massey triple: lies in `xH + Hz` for every arity-2 `a`.
pub fn coboundary_specializes_into_indeterminacy(
    a: &HochschildCochain,
    h: &CohomologyRing,
    x: ClassRef,
    y: ClassRef,
    z: ClassRef,
) -> Result<bool> {
    require_massey_triple(h, x, y, z)?;
    let da = crate::hochschild::coboundary(a, &TwistedBimodule::new(h));
    let v = specialize(&da, h, x, y, z)?;
    indeterminacy(h, x, y, z)?.contains(&v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dga::cochain_algebra;
    use crate::exactlin::Ring;
    use crate::hochschild::{theta, trivialize};
    use crate::simplicial::{build_sphere, build_torus};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn fixture_classes(
        co: &CohomologySections,
    ) -> (Vec<Scalar>, Vec<Scalar>, Vec<Scalar>, Vec<Scalar>) {
        let z = Ring::Integers;
        let e = |i| vector::unit(z, 5, i);
        let a = co.pi(1, &e(0)).unwrap();
        let b = co.pi(1, &e(1)).unwrap();
        let c = co.pi(1, &e(2)).unwrap();
        let r = co.pi(2, &vector::unit(z, 3, 2)).unwrap();
        (a, b, c, r)
    }

    #[test]
    fn fixture_triple_is_minus_r() {
        let alg = Arc::new(massey_fixture());
        let co = CohomologySections::build(alg, None).unwrap();
        assert_eq!(co.h_ranks(), &[1, 3, 1]);
        let (a, b, c, r) = fixture_classes(&co);
        let m = massey_triple(
            &co,
            ClassRef::new(1, &a),
            ClassRef::new(1, &b),
            ClassRef::new(1, &c),
        )
        .unwrap();
        assert_eq!(m.indeterminacy.generators().cols(), 0);
        assert_eq!(
            m.representative,
            vector::scale(Ring::Integers, &r, &Ring::Integers.from_i64(-1))
        );
        assert!(!m.contains_zero().unwrap());
    }

    #[test]
    fn fixture_cosets_are_stable_and_match_theta() {
        let alg = Arc::new(massey_fixture());
        let co0 = CohomologySections::build(alg.clone(), None).unwrap();
        let (a, b, c, _) = fixture_classes(&co0);
        let (x, y, z) = (
            ClassRef::new(1, &a),
            ClassRef::new(1, &b),
            ClassRef::new(1, &c),
        );
        for seed in 0..6 {
            let co = CohomologySections::build(alg.clone(), Some(seed)).unwrap();
            assert!(coset_stable(&co0, &co, x, y, z).unwrap());
            let th = theta(&co).unwrap();
            assert!(agrees_with_theta(&th, &co, x, y, z).unwrap());
        }
        let th = theta(&co0).unwrap();
        let m = TwistedBimodule::new(co0.cohomology_ring());
        assert!(!trivialize(&th, &m).unwrap().is_trivial());
    }

    #[test]
    fn non_triples_are_rejected() {
        let alg = Arc::new(cochain_algebra(&build_torus(2).unwrap(), Ring::Integers));
        let co = CohomologySections::build(alg, None).unwrap();
        let e0 = vector::unit(Ring::Integers, 2, 0);
        let e1 = vector::unit(Ring::Integers, 2, 1);
        let err = massey_triple(
            &co,
            ClassRef::new(1, &e0),
            ClassRef::new(1, &e1),
            ClassRef::new(1, &e0),
        );
        assert!(matches!(err, Err(Error::NotAMasseyTriple(_))));
        let m = massey_triple(
            &co,
            ClassRef::new(1, &e0),
            ClassRef::new(1, &e0),
            ClassRef::new(1, &e0),
        )
        .unwrap();
        assert!(m.contains_zero().unwrap());
    }

    #[test]
    fn sphere_triple_vanishes_by_degree() {
        let alg = Arc::new(cochain_algebra(&build_sphere(2), Ring::Integers));
        let co = CohomologySections::build(alg, None).unwrap();
        let f = vector::unit(Ring::Integers, 1, 0);
        let x = ClassRef::new(2, &f);
        let m = massey_triple(&co, x, x, x).unwrap();
        assert!(m.representative.is_empty());
    }

    #[test]
    fn coboundaries_specialize_into_indeterminacy() {
        let alg = Arc::new(massey_fixture());
        let co = CohomologySections::build(alg, None).unwrap();
        let (a, b, c, _) = fixture_classes(&co);
        let h = co.cohomology_ring();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let f = HochschildCochain::random(h, 2, -1, false, &mut rng, 4);
            let ok = coboundary_specializes_into_indeterminacy(
                &f,
                h,
                ClassRef::new(1, &a),
                ClassRef::new(1, &b),
                ClassRef::new(1, &c),
            )
            .unwrap();
            assert!(ok);
        }
    }
}
