mod common;

use std::collections::BTreeMap;
use std::sync::Arc;

use persheaf::complex::{barycentric, simplex, sphere, torus};
use persheaf::exactla::SparseMatrix;
use persheaf::perverse::{
    from_cosheaf_top, from_sheaf_p0, ic_ext, BBDGPerversity, CellularPerverseSheaf, DeltaFunction,
    SupportCalculator,
};
use proptest::prelude::*;

fn nonzero(h: BTreeMap<i32, usize>) -> BTreeMap<i32, usize> {
    h.into_iter().filter(|e| e.1 > 0).collect()
}

fn random_perverse(seed: u64, top: bool) -> CellularPerverseSheaf {
    let k = Arc::new(if seed % 2 == 0 { simplex(2) } else { sphere(2) });
    let mut rng = common::rng(seed);
    if top {
        from_cosheaf_top(&common::random_cosheaf(&k, &mut rng)).unwrap()
    } else {
        from_sheaf_p0(&common::random_sheaf(&k, &mut rng)).unwrap()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn verdier_dual_is_an_involution(seed in any::<u64>(), top in any::<bool>()) {
        let s = random_perverse(seed, top);
        let d = s.verdier_dual().unwrap();
        prop_assert!(d.is_valid());
        prop_assert_eq!(d.verdier_dual().unwrap(), s);
    }

    #[test]
    fn verdier_dual_negates_degrees(seed in any::<u64>(), top in any::<bool>()) {
        let s = random_perverse(seed, top);
        let h = nonzero(s.cohomology().unwrap());
        let g = nonzero(s.verdier_dual().unwrap().cohomology().unwrap());
        let mirrored: BTreeMap<i32, usize> = h.into_iter().map(|(r, d)| (-r, d)).collect();
        prop_assert_eq!(g, mirrored);
    }

    #[test]
    fn kernel_image_cokernel_dimensions(seed in any::<u64>()) {
        let s = random_perverse(seed, false);
        let t = s.direct_sum(&random_perverse(seed.wrapping_add(2), false)).unwrap();
        let f = common::random_morphism(&s, &t, &mut common::rng(seed));
        let (ker, im, coker) = (f.kernel().unwrap(), f.image().unwrap(), f.cokernel().unwrap());
        for x in [&ker, &im, &coker] {
            prop_assert!(x.is_valid());
        }
        for sigma in 0..s.dims().len() {
            prop_assert_eq!(ker.stalk_dim(sigma) + im.stalk_dim(sigma), s.stalk_dim(sigma));
            prop_assert_eq!(im.stalk_dim(sigma) + coker.stalk_dim(sigma), t.stalk_dim(sigma));
        }
    }

    #[test]
    fn p0_conversion_round_trips(seed in any::<u64>()) {
        let k = Arc::new(torus(2));
        let a = common::random_sheaf(&k, &mut common::rng(seed));
        prop_assert_eq!(from_sheaf_p0(&a).unwrap().to_sheaf_p0().unwrap(), a);
    }
}

fn perversities(n: usize) -> Vec<BBDGPerversity> {
    let mut ps = vec![BBDGPerversity::zero(n), BBDGPerversity::top(n), BBDGPerversity::middle(n)];
    if n == 3 {
        ps.push(BBDGPerversity::new(vec![0, 0, 0, -1]).unwrap());
    }
    ps
}

#[test]
fn perverse_cells_partition_the_subdivision() {
    for k in [simplex(3), sphere(2)] {
        let k = Arc::new(k);
        let sd = barycentric(&k);
        for p in perversities(k.dim()) {
            let d = DeltaFunction::new(k.clone(), p).unwrap();
            let mut owner = vec![None; sd.subdivided().len()];
            for sigma in 0..k.len() {
                let cell = d.perverse_cell(&sd, sigma).unwrap();
                for &f in &cell.cells {
                    assert!(owner[f].is_none(), "flag in two perverse cells");
                    owner[f] = Some(sigma);
                }
                for &f in &cell.boundary {
                    assert!(d.delta(d.interior_owner(&sd, f)) < d.delta(sigma));
                }
            }
            for (f, o) in owner.iter().enumerate() {
                assert_eq!(*o, Some(d.interior_owner(&sd, f)));
            }
        }
    }
}

#[test]
fn ic_ext_is_supported_on_comparable_pairs() {
    let k = Arc::new(simplex(3));
    for p in perversities(3) {
        let d = DeltaFunction::new(k.clone(), p).unwrap();
        for s in 0..k.len() {
            for t in 0..k.len() {
                let (deg, dim) = ic_ext(&d, s, t);
                if d.succeq(s, t) {
                    assert_eq!((deg, dim), (d.delta(s) - d.delta(t), 1));
                } else {
                    assert_eq!(dim, 0);
                }
            }
        }
    }
}

#[test]
fn support_calculator_on_boundary_of_tetrahedron() {
    let k = Arc::new(sphere(2));
    let d = Arc::new(DeltaFunction::new(k.clone(), BBDGPerversity::middle(2)).unwrap());
    let calc = SupportCalculator::new(d.clone());
    for t in 0..k.len() {
        for s in 0..k.len() {
            let h = calc.ic_support(t, s).unwrap();
            let want: BTreeMap<i32, usize> =
                if s == t { [(-d.delta(s) as i32, 1)].into() } else { BTreeMap::new() };
            assert_eq!(h, want);
        }
    }
}

#[test]
fn malformed_attaching_maps_are_rejected() {
    let k = Arc::new(simplex(1));
    let d = Arc::new(DeltaFunction::new(k.clone(), BBDGPerversity::zero(1)).unwrap());
    let (v, e) = (k.id_of(&[0]).unwrap(), k.id_of(&[0, 1]).unwrap());
    let mut attach = BTreeMap::new();
    attach.insert((v, e), SparseMatrix::zeros(2, 2));
    assert!(CellularPerverseSheaf::new(d.clone(), vec![1, 1, 1], attach.clone()).is_err());
    attach.clear();
    // p ≡ 0 attaches a vertex to its edge, never the other way
    attach.insert((e, v), SparseMatrix::identity(1));
    assert!(CellularPerverseSheaf::new(d.clone(), vec![1, 1, 1], attach.clone()).is_err());
    attach.clear();
    attach.insert((v, e), SparseMatrix::identity(1));
    assert!(CellularPerverseSheaf::new(d, vec![1, 1, 1], attach).is_ok());
}
