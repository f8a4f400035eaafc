mod common;

use persheaf::exactla::{rat, GradedComplex, LaurentPolynomial, SparseMatrix};
use proptest::prelude::*;

fn matrix(seed: u64, rows: usize, cols: usize) -> SparseMatrix {
    common::random_matrix(&mut common::rng(seed), rows, cols, 0.4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_equals_rank_of_transpose(seed in any::<u64>(), r in 0usize..7, c in 0usize..7) {
        let m = matrix(seed, r, c);
        prop_assert_eq!(m.rank(), m.transpose().rank());
    }

    #[test]
    fn kernel_is_annihilated(seed in any::<u64>(), r in 0usize..7, c in 1usize..7) {
        let m = matrix(seed, r, c);
        let basis = m.kernel_basis();
        prop_assert_eq!(basis.len() + m.rank(), c);
        for v in &basis {
            prop_assert!(m.apply(v).iter().all(|x| *x == rat(0)));
        }
        let k = SparseMatrix::from_columns(c, &basis);
        prop_assert_eq!(k.rank(), basis.len());
    }

    #[test]
    fn solve_reproduces_products(seed in any::<u64>(), r in 1usize..6, c in 1usize..6) {
        let m = matrix(seed, r, c);
        let x = matrix(seed ^ 0x5555, c, 2);
        let b = m.mul(&x);
        let y = m.solve(&b).expect("consistent by construction");
        prop_assert_eq!(m.mul(&y), b);
    }

    #[test]
    fn product_rank_is_bounded(seed in any::<u64>(), n in 1usize..6) {
        let a = matrix(seed, n, n);
        let b = matrix(seed.wrapping_add(1), n, n);
        prop_assert!(a.mul(&b).rank() <= a.rank().min(b.rank()));
    }

    #[test]
    fn laurent_ring_axioms(a in prop::collection::vec(-3i64..=3, 0..5), b in prop::collection::vec(-3i64..=3, 0..5), s in -3i32..3) {
        let p = LaurentPolynomial::from_coeffs(&a).shift(s);
        let q = LaurentPolynomial::from_coeffs(&b);
        prop_assert_eq!(&p * &q, &q * &p);
        prop_assert_eq!((&p * &q).at_one(), p.at_one() * q.at_one());
        prop_assert_eq!((&p * &q).invert_variable(), &p.invert_variable() * &q.invert_variable());
        prop_assert!((&p - &p).is_zero());
    }
}

#[test]
fn exact_rank_of_hilbert_matrix() {
    let n = 6;
    let rows: Vec<Vec<_>> = (0..n)
        .map(|i| (0..n).map(|j| persheaf::exactla::ratio(1, (i + j + 1) as i64)).collect())
        .collect();
    let h = SparseMatrix::from_dense(n, n, &rows);
    assert_eq!(h.rank(), n);
    let inv = h.inverse().unwrap();
    assert_eq!(h.mul(&inv), SparseMatrix::identity(n));
}

#[test]
fn graded_complex_rejects_nonzero_square() {
    let d = SparseMatrix::from_i64(&[&[1]]);
    assert!(GradedComplex::new(0, vec![1, 1, 1], vec![d.clone(), d]).is_err());
}
