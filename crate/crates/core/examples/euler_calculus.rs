//! Euler integrals, pushforward and duality of constructible functions.
use std::sync::Arc;

use persheaf::complex::{circle, torus, SimplicialMap};
use persheaf::euler::{dual, euler_integral, pushforward, ConstructibleFunction};

fn main() -> persheaf::Result<()> {
    let k = Arc::new(torus(2));
    let f = ConstructibleFunction::indicator_closed(k.clone(), k.len() - 1);
    println!("∫ f = {}", euler_integral(&f));
    let df = dual(&f);
    let support: Vec<String> = (0..k.len())
        .filter(|&s| df.value(s) != 0)
        .map(|s| format!("{} ↦ {}", k.simplex(s), df.value(s)))
        .collect();
    println!("D f = {}", support.join(", "));
    let pi = SimplicialMap::new(torus(2), circle(3)?, (0..9).map(|v| v / 3).collect())?;
    let g = pushforward(&f, &pi)?;
    println!("π_* f = {:?}", g.values());
    println!("D π_* f = π_* D f: {}", dual(&g) == pushforward(&dual(&f), &pi)?);
    Ok(())
}
