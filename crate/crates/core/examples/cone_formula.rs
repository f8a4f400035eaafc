//! Intersection homology of a cone compared with the isolated-singularity formula.
use std::collections::BTreeMap;

use persheaf::complex::{cone, torus};
use persheaf::strat::{ih_betti, isolated_singularity_oracle, GMPerversity, StratifiedComplex};

fn main() -> persheaf::Result<()> {
    let link = torus(2);
    let apex = link.vertex_count();
    let levels = BTreeMap::from([(3, vec![vec![apex]])]);
    let s = StratifiedComplex::new(cone(&link), &levels)?.with_boundary(true);
    for p in [GMPerversity::zero(3), GMPerversity::top(3)] {
        println!("{p}: IH = {:?}, oracle = {:?}", ih_betti(&s, &p)?, isolated_singularity_oracle(&s, &p)?);
    }
    Ok(())
}
