//! Graded pieces of the path algebra and its two quadratic quotients.
use std::sync::Arc;

use persheaf::complex::simplex;
use persheaf::pathalg::{quadratic_duality_check, Quiver};
use persheaf::perverse::{BBDGPerversity, DeltaFunction};

fn main() -> persheaf::Result<()> {
    let p = BBDGPerversity::new(vec![0, 0, 0, -1])?;
    let q = Quiver::new(Arc::new(DeltaFunction::new(simplex(3), p)?));
    println!("r\tF\tA\tB\tpairs");
    for row in q.dimension_table() {
        println!("{}\t{}\t{}\t{}\t{}", row.r, row.f, row.a, row.b, row.ext_pairs);
    }
    println!("D = E^perp: {}", quadratic_duality_check(&q).holds());
    Ok(())
}
