use std::sync::Arc;

use hochgysin_core::dga::{load_dga, save_dga};
use hochgysin_core::exactlin::vector;
use hochgysin_core::gysin::{
    check_theorem_th, cone_cohomology, cone_cohomology_oracle, gysin_extension, mapping_cone,
    split_extension,
};
use hochgysin_core::hochschild::{theta, trivialize, verify_cocycle};
use hochgysin_core::massey::ClassRef;
use hochgysin_core::simplicial::{build_sphere, build_torus};
use hochgysin_core::torus::{exterior_algebra, Transport};
use hochgysin_core::{
    cochain_algebra, CohomologySections, DgAlgebra, HochschildCochain, Ring, SimplicialComplex,
    TwistedBimodule,
};
use proptest::prelude::*;

fn torus2() -> Arc<DgAlgebra> {
    Arc::new(cochain_algebra(&build_torus(2).unwrap(), Ring::Integers))
}

#[test]
fn artifacts_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let k = build_torus(2).unwrap();
    let scx = dir.path().join("t2.scx.json");
    k.save(&scx).unwrap();
    assert_eq!(SimplicialComplex::load(&scx).unwrap(), k);

    let a = cochain_algebra(&k, Ring::Integers);
    let dga = dir.path().join("t2.dga.json");
    save_dga(&a, &dga).unwrap();
    let a = Arc::new(load_dga(&dga).unwrap());

    let co = CohomologySections::build(a.clone(), Some(11)).unwrap();
    let again = CohomologySections::from_json(a, &co.to_json()).unwrap();
    let th = theta(&co).unwrap();
    assert_eq!(theta(&again).unwrap(), th);
    let back = HochschildCochain::from_json(&th.to_json(), co.cohomology_ring()).unwrap();
    assert_eq!(back, th);
}

#[test]
fn exterior_theta_vanishes_and_transports() {
    for n in 1..=3 {
        let l = Arc::new(exterior_algebra(n, Ring::Integers).unwrap());
        assert!(l.validate().passed());
        let co = CohomologySections::build(l, Some(n as u64)).unwrap();
        assert!(co.check_invariants().iter().all(|(_, ok)| *ok));
        let th = theta(&co).unwrap();
        assert!(trivialize(&th, &TwistedBimodule::new(co.cohomology_ring()))
            .unwrap()
            .is_trivial());
    }
    let co = CohomologySections::build(torus2(), Some(2)).unwrap();
    let t = Transport::new(co.cohomology_ring()).unwrap();
    let th = theta(&co).unwrap();
    let pulled = t.pull_back(&th).unwrap();
    assert!(verify_cocycle(&pulled, &TwistedBimodule::new(&t.exterior)));
}

#[test]
fn sphere_cones_match_the_oracle() {
    for m in 1..=3 {
        let a = Arc::new(cochain_algebra(&build_sphere(m), Ring::Integers));
        let co = CohomologySections::build(a, None).unwrap();
        for k in 0..=3 {
            let c = vector::from_i64(Ring::Integers, &[k]);
            let cone = mapping_cone(&co, ClassRef::new(m, &c)).unwrap();
            let hc = cone_cohomology(&cone).unwrap();
            let shapes: Vec<_> = (cone.min_degree()..=cone.max_degree())
                .map(|n| hc.shape(n))
                .collect();
            assert_eq!(shapes, cone_cohomology_oracle(&cone), "m = {m}, k = {k}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn random_torus_classes_satisfy_the_theorem_and_split(
        deg in 1usize..=2,
        a in -3i64..=3,
        b in -3i64..=3,
        seed in 0u64..1000,
    ) {
        let co = CohomologySections::build(torus2(), Some(seed)).unwrap();
        let coords = if deg == 1 { vec![a, b] } else { vec![a] };
        let c = vector::from_i64(Ring::Integers, &coords);
        let ext = gysin_extension(&co, ClassRef::new(deg, &c)).unwrap();
        prop_assert!(ext.check_exactness().unwrap().iter().all(|(_, ok)| *ok));
        let th = theta(&co).unwrap();
        prop_assert!(check_theorem_th(&ext, &th).unwrap().holds);
        let split = split_extension(&ext, None).unwrap();
        let s = split.splitting();
        prop_assert!(s.is_some_and(|s| s.h_linear && s.projection_identity));
    }

    #[test]
    fn cone_cohomology_agrees_with_oracle_on_random_degree_one_classes(a in -4i64..=4, b in -4i64..=4) {
        let co = CohomologySections::build(torus2(), None).unwrap();
        let c = vector::from_i64(Ring::Integers, &[a, b]);
        let cone = mapping_cone(&co, ClassRef::new(1, &c)).unwrap();
        let hc = cone_cohomology(&cone).unwrap();
        let shapes: Vec<_> = (cone.min_degree()..=cone.max_degree()).map(|n| hc.shape(n)).collect();
        prop_assert_eq!(shapes, cone_cohomology_oracle(&cone));
    }
}
