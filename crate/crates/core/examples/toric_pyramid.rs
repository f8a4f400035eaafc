//! Intersection cohomology of the toric variety of a square pyramid.
use persheaf::toric::{hl_check, ih_poly, local_table, polytopes, FaceLattice};

fn main() -> persheaf::Result<()> {
    let p = FaceLattice::from_facets(&polytopes::pyramid(&polytopes::polygon(4)))?;
    let h = ih_poly(&p);
    println!("f-vector {:?}", p.f_vector());
    println!("h(t) = {h}");
    for (face, l) in local_table(&p) {
        if !l.is_zero() && l.max_degree() != Some(0) {
            println!("local polynomial at {face:?}: {l}");
        }
    }
    println!("palindromic and unimodal: {}", hl_check(&h, p.dim()));
    Ok(())
}
