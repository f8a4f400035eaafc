//! A constant sheaf as a perverse sheaf for p ≡ 0, and its Verdier dual.
use persheaf::complex::sphere;
use persheaf::perverse::from_sheaf_p0;
use persheaf::sheaf::CellularSheaf;

fn main() -> persheaf::Result<()> {
    let s = from_sheaf_p0(&CellularSheaf::constant(sphere(2)))?;
    let d = s.verdier_dual()?;
    println!("perversity {} -> {}", s.delta_function().perversity(), d.delta_function().perversity());
    println!("H^*(S)  = {:?}", s.cohomology()?);
    println!("H^*(DS) = {:?}", d.cohomology()?);
    println!("DDS = S: {}", d.verdier_dual()? == s);
    Ok(())
}
