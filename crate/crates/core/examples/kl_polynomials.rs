//! Nontrivial Kazhdan–Lusztig polynomials of S4, checked against the linear-solve oracle.
use persheaf::hecke::{kl_oracle, Coxeter, HeckeAlgebra, SymmetricGroup};

fn main() -> persheaf::Result<()> {
    let g = SymmetricGroup::new(4)?;
    let alg = HeckeAlgebra::new(g);
    let table = alg.kl_table();
    for w in g.elements() {
        for (y, p) in table.column(&w) {
            if p.max_degree() != Some(0) {
                println!("P[{y}, {w}] = {}", p.display_in("q"));
            }
        }
        assert_eq!(&kl_oracle(&alg, &w)?, table.column(&w));
    }
    Ok(())
}
