//! Constructible functions: integer values on open cells.

use std::sync::Arc;

use crate::complex::{SimplicialComplex, SimplicialMap};
use crate::error::{Error, Result};
use crate::perverse::{realize_ic, DeltaFunction};
use crate::sheaf::CellularSheaf;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructibleFunction {
    base: Arc<SimplicialComplex>,
    values: Vec<i64>,
}

fn sign(d: usize) -> i64 {
    if d % 2 == 0 {
        1
    } else {
        -1
    }
}

impl ConstructibleFunction {
    pub fn new(base: impl Into<Arc<SimplicialComplex>>, values: Vec<i64>) -> Result<Self> {
        let base = base.into();
        if values.len() != base.len() {
            return Err(Error::InvalidArgument(format!(
                "{} values for {} simplices",
                values.len(),
                base.len()
            )));
        }
        Ok(ConstructibleFunction { base, values })
    }

    pub fn constant(base: impl Into<Arc<SimplicialComplex>>, c: i64) -> Self {
        let base = base.into();
        let values = vec![c; base.len()];
        ConstructibleFunction { base, values }
    }

    /// Indicator of the open cell σ°.
    pub fn indicator(base: impl Into<Arc<SimplicialComplex>>, sigma: usize) -> Self {
        let mut f = Self::constant(base, 0);
        f.values[sigma] = 1;
        f
    }

    /// Indicator of the closed simplex.
    pub fn indicator_closed(base: impl Into<Arc<SimplicialComplex>>, sigma: usize) -> Self {
        let mut f = Self::constant(base, 0);
        for t in f.base.faces(sigma) {
            f.values[t] = 1;
        }
        f
    }

    pub fn base(&self) -> &SimplicialComplex {
        &self.base
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn value(&self, sigma: usize) -> i64 {
        self.values[sigma]
    }

    pub fn add(&self, other: &Self) -> Self {
        assert!(self.base == other.base, "functions on different complexes");
        ConstructibleFunction {
            base: self.base.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, c: i64) -> Self {
        ConstructibleFunction {
            base: self.base.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }
}

/// `∫ f dχ = Σ_σ (−1)^{dim σ} f(σ)`.
pub fn euler_integral(f: &ConstructibleFunction) -> i64 {
    f.values
        .iter()
        .enumerate()
        .map(|(s, v)| sign(f.base.simplex_dim(s)) * v)
        .sum()
}

/// `π_*(f)(τ) = Σ_{π(σ) = τ} (−1)^{dim σ − dim τ} f(σ)`.
pub fn pushforward(f: &ConstructibleFunction, pi: &SimplicialMap) -> Result<ConstructibleFunction> {
    if pi.source() != f.base() {
        return Err(Error::InvalidArgument("map does not start at the base of f".into()));
    }
    let target = pi.target();
    let mut values = vec![0; target.len()];
    for (s, v) in f.values.iter().enumerate() {
        let t = pi.image(s);
        values[t] += sign(f.base.simplex_dim(s) + target.simplex_dim(t)) * v;
    }
    ConstructibleFunction::new(target.clone(), values)
}

/// `D(f)(σ) = Σ_{τ ≥ σ} (−1)^{dim τ} f(τ)`.
pub fn dual(f: &ConstructibleFunction) -> ConstructibleFunction {
    let k = &*f.base;
    let values = (0..k.len())
        .map(|s| {
            k.star(s)
                .into_iter()
                .map(|t| sign(k.simplex_dim(t)) * f.values[t])
                .sum()
        })
        .collect();
    ConstructibleFunction {
        base: f.base.clone(),
        values,
    }
}

/// Stalk dimensions of a sheaf, i.e. its stalk Euler characteristic.
pub fn stalk_euler(a: &CellularSheaf) -> ConstructibleFunction {
    ConstructibleFunction {
        base: a.base_arc().clone(),
        values: a.dims().iter().map(|&d| d as i64).collect(),
    }
}

/// Stalk Euler characteristic of `IC_τ`, realized as `ℚ_{τ*}[−p]` or `ℚ_{τ!}[−p]`.
pub fn stalk_euler_ic(delta: &DeltaFunction, tau: usize) -> Result<ConstructibleFunction> {
    let x = realize_ic(delta, tau)?;
    let p = delta.perversity().p(delta.base().simplex_dim(tau));
    Ok(stalk_euler(&x).scale(sign(p.unsigned_abs() as usize)))
}
