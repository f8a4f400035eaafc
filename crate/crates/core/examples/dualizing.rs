//! The dualizing complex recovers simplicial homology.
use persheaf::complex::{sphere, torus};
use persheaf::sheaf::dualizing_complex;

fn main() -> persheaf::Result<()> {
    for (name, k) in [("boundary of tetrahedron", sphere(2)), ("torus", torus(2))] {
        let betti = k.betti();
        let h = dualizing_complex(k)?.global_section_cohomology()?;
        println!("{name}: H^*(D) = {h:?}, betti = {betti:?}");
    }
    Ok(())
}
