//! IC objects on Δ³ have support cohomology only on their own perverse cell.
use std::sync::Arc;

use persheaf::complex::simplex;
use persheaf::perverse::{BBDGPerversity, DeltaFunction, SupportCalculator};

fn main() -> persheaf::Result<()> {
    let k = Arc::new(simplex(3));
    let d = Arc::new(DeltaFunction::new(k.clone(), BBDGPerversity::middle(3))?);
    let calc = SupportCalculator::new(d.clone());
    for t in 0..k.len() {
        let mut hits = Vec::new();
        for s in 0..k.len() {
            let h = calc.ic_support(t, s)?;
            if !h.is_empty() {
                hits.push(format!("{} {h:?}", k.simplex(s)));
            }
        }
        println!("IC_{} (δ = {}): {}", k.simplex(t), d.delta(t), hits.join(", "));
    }
    Ok(())
}
