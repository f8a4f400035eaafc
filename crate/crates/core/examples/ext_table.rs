//! Ext groups between elementary sheaves on an edge.
use std::sync::Arc;

use persheaf::complex::simplex;
use persheaf::sheaf::{ext_groups, CellularSheaf};

fn main() -> persheaf::Result<()> {
    let k = Arc::new(simplex(1));
    let kinds: [(&str, fn(Arc<_>, usize) -> persheaf::Result<CellularSheaf>); 2] =
        [("*", CellularSheaf::elementary_star), ("!", CellularSheaf::elementary_shriek)];
    for (ka, fa) in kinds {
        for (kb, fb) in kinds {
            for s in 0..k.len() {
                for t in 0..k.len() {
                    let ext = ext_groups(&fa(k.clone(), s)?, &fb(k.clone(), t)?)?;
                    let nonzero: Vec<_> = ext.into_iter().filter(|e| e.1 > 0).collect();
                    println!("Ext(Q_{}{ka}, Q_{}{kb}) = {nonzero:?}", k.simplex(s), k.simplex(t));
                }
            }
        }
    }
    Ok(())
}
