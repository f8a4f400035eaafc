mod common;

use std::sync::Arc;

use persheaf::complex::{barycentric, simplex, sphere, torus, SimplicialComplex};
use persheaf::exactla::alternating_sum;
use persheaf::sheaf::{
    canonical_injective_resolution, ext_groups, hom_dim, subdivide_sheaf, CellularSheaf,
};
use proptest::prelude::*;

fn complexes() -> Vec<Arc<SimplicialComplex>> {
    vec![Arc::new(simplex(2)), Arc::new(sphere(2)), Arc::new(simplex(3)), Arc::new(torus(2))]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn cochain_euler_characteristic(seed in any::<u64>(), which in 0usize..4) {
        let k = &complexes()[which];
        let a = common::random_sheaf(k, &mut common::rng(seed));
        let h = a.cochain_cohomology().unwrap();
        prop_assert_eq!(alternating_sum(&h), a.euler_characteristic());
        let c = a.cochain_complex().unwrap();
        prop_assert_eq!(c.euler_characteristic(), a.euler_characteristic());
    }

    #[test]
    fn subdivision_preserves_cohomology(seed in any::<u64>(), which in 0usize..2) {
        let k = &complexes()[which];
        let a = common::random_sheaf(k, &mut common::rng(seed));
        let sd = barycentric(k);
        let b = subdivide_sheaf(&a, &sd);
        prop_assert_eq!(b.cochain_cohomology().unwrap(), a.cochain_cohomology().unwrap());
    }

    #[test]
    fn cosheaf_transpose_round_trip(seed in any::<u64>(), which in 0usize..4) {
        let k = &complexes()[which];
        let a = common::random_sheaf(k, &mut common::rng(seed));
        prop_assert_eq!(a.dual_cosheaf().dual_sheaf(), a.clone());
        // linear duality exchanges cochain cohomology and cosheaf homology
        let h = a.cochain_cohomology().unwrap();
        let g = a.dual_cosheaf().homology().unwrap();
        for (r, d) in h {
            prop_assert_eq!(g.get(&r).copied().unwrap_or(0), d);
        }
    }

    #[test]
    fn resolution_is_exact(seed in any::<u64>()) {
        let k = &complexes()[0];
        let a = common::random_sheaf(k, &mut common::rng(seed));
        let res = canonical_injective_resolution(&a).unwrap();
        prop_assert!(res.is_exact());
        prop_assert_eq!(res.global_sections().unwrap().homology(), a.cochain_cohomology().unwrap());
    }

    #[test]
    fn ext_zero_is_hom(seed in any::<u64>()) {
        let k = &complexes()[0];
        let mut rng = common::rng(seed);
        let a = common::random_sheaf(k, &mut rng);
        let b = common::random_sheaf(k, &mut rng);
        let ext = ext_groups(&a, &b).unwrap();
        prop_assert_eq!(ext.get(&0).copied().unwrap_or(0), hom_dim(&a, &b).unwrap());
    }
}

#[test]
fn ext_against_constant_sheaf_is_cohomology() {
    let k = Arc::new(torus(2));
    let q = CellularSheaf::constant(k.clone());
    let mut rng = common::rng(11);
    for _ in 0..3 {
        let b = common::random_sheaf(&k, &mut rng);
        let ext: Vec<_> = ext_groups(&q, &b).unwrap().into_iter().filter(|e| e.1 > 0).collect();
        let h: Vec<_> = b.cochain_cohomology().unwrap().into_iter().filter(|e| e.1 > 0).collect();
        assert_eq!(ext, h);
    }
}

#[test]
fn shriek_sheaves_have_compact_cohomology() {
    let k = Arc::new(simplex(3));
    for s in 0..k.len() {
        let a = CellularSheaf::elementary_shriek(k.clone(), s).unwrap();
        let h: Vec<_> = a.cochain_cohomology().unwrap().into_iter().filter(|e| e.1 > 0).collect();
        assert_eq!(h, vec![(k.simplex_dim(s) as i32, 1)]);
    }
}
