mod common;

use std::sync::Arc;

use persheaf::complex::{simplex, sphere};
use persheaf::pathalg::{module_bridge, quadratic_duality_check, Quiver};
use persheaf::perverse::{from_sheaf_p0, BBDGPerversity, DeltaFunction};

fn quiver(k: persheaf::complex::SimplicialComplex, p: BBDGPerversity) -> Quiver {
    Quiver::new(Arc::new(DeltaFunction::new(k, p).unwrap()))
}

#[test]
fn low_degrees_of_all_three_algebras_agree() {
    for p in [BBDGPerversity::zero(3), BBDGPerversity::top(3), BBDGPerversity::middle(3)] {
        let q = quiver(simplex(3), p);
        for r in 0..=1 {
            assert_eq!(q.dim_a(r), q.dim_f(r));
            assert_eq!(q.dim_b(r), q.dim_f(r));
        }
        assert_eq!(q.dim_f(0), 15);
        assert_eq!(q.dim_f(1), q.edges().len());
    }
}

#[test]
fn ext_algebra_multiplication_on_boundary() {
    for p in [BBDGPerversity::zero(2), BBDGPerversity::top(2), BBDGPerversity::middle(2)] {
        let q = quiver(sphere(2), p);
        assert!(quadratic_duality_check(&q).holds());
        assert!(q.a_multiplication_check());
    }
}

#[test]
fn perverse_sheaves_are_b_modules() {
    let k = Arc::new(sphere(2));
    let mut rng = common::rng(5);
    for _ in 0..5 {
        let s = from_sheaf_p0(&common::random_sheaf(&k, &mut rng)).unwrap();
        let q = Quiver::new(s.delta_function().clone());
        let m = module_bridge(&s);
        assert!(m.relations_vanish(&q));
        assert_eq!(m.to_perverse().unwrap(), s);
    }
}
