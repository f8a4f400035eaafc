//! Exact rational linear algebra, graded cochain complexes and Laurent polynomials.

mod graded;
mod laurent;
mod sparse;

pub use graded::{alternating_sum, GradedComplex};
pub use laurent::LaurentPolynomial;
pub use sparse::SparseMatrix;

use num_bigint::BigInt;
use num_rational::BigRational;

/// Arbitrary-precision rational number, always in lowest terms.
pub type Rational = BigRational;

/// Shorthand for an integral rational.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `num / den` as a rational. Panics on a zero denominator.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rank(m: &SparseMatrix) -> usize {
    m.rank()
}

pub fn kernel_basis(m: &SparseMatrix) -> Vec<Vec<Rational>> {
    m.kernel_basis()
}
