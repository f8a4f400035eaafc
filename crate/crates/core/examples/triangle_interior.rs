//! A sheaf that is ℚ on the open triangle and zero on its boundary.
use std::sync::Arc;

use persheaf::complex::simplex;
use persheaf::sheaf::CellularSheaf;

fn main() -> persheaf::Result<()> {
    let k = Arc::new(simplex(2));
    let top = k.id_of(&[0, 1, 2]).expect("the 2-simplex");
    let a = CellularSheaf::elementary_shriek(k, top)?;
    for (r, d) in a.cochain_cohomology()? {
        println!("H^{r} = {d}");
    }
    Ok(())
}
