//! Intersection homology of the suspension of the 3-torus for the three GM perversities.
use std::collections::BTreeMap;

use persheaf::complex::{suspension, torus};
use persheaf::strat::{ih_betti, ih_duality_check, GMPerversity, StratifiedComplex};

fn main() -> persheaf::Result<()> {
    let t3 = torus(3);
    let apex = t3.vertex_count();
    let k = suspension(&t3);
    println!("f-vector of ΣT³: {:?}", k.f_vector());
    let mut levels = BTreeMap::new();
    levels.insert(4, vec![vec![apex], vec![apex + 1]]);
    let s = StratifiedComplex::new(k, &levels)?;
    for values in [vec![0, 0, 0], vec![0, 1, 1], vec![0, 1, 2]] {
        let p = GMPerversity::new(values)?;
        println!("p = {p}: IH = {:?}", ih_betti(&s, &p)?);
    }
    let p = GMPerversity::new(vec![0, 1, 1])?;
    println!("duality with {}: {}", p.complement(), ih_duality_check(&s, &p, &p.complement())?);
    Ok(())
}
