#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use persheaf::complex::SimplicialComplex;
use persheaf::euler::ConstructibleFunction;
use persheaf::exactla::{rat, Rational, SparseMatrix};
use persheaf::perverse::{CellularPerverseSheaf, PerverseMorphism};
use persheaf::sheaf::{CellularCosheaf, CellularSheaf};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize, density: f64) -> SparseMatrix {
    let mut m = SparseMatrix::zeros(rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            if rng.gen_bool(density) {
                m.set(r, c, rat(rng.gen_range(-3..=3)));
            }
        }
    }
    m
}

fn annihilator(w: &SparseMatrix, ambient: usize) -> SparseMatrix {
    // rows span {y : yᵀ W = 0}
    let basis = if w.cols() == 0 {
        (0..ambient)
            .map(|i| (0..ambient).map(|j| rat((i == j) as i64)).collect())
            .collect()
    } else {
        w.transpose().kernel_basis()
    };
    SparseMatrix::from_columns(ambient, &basis).transpose()
}

/// A random sheaf `A(σ) = V / W_σ` where `W_σ` grows along faces, so every
/// restriction is a quotient map and functoriality holds by construction.
pub fn random_sheaf(k: &Arc<SimplicialComplex>, rng: &mut impl Rng) -> CellularSheaf {
    let m = rng.gen_range(1..=3);
    let gens: Vec<SparseMatrix> = (0..k.len())
        .map(|_| {
            let c = if rng.gen_bool(0.4) { 1 } else { 0 };
            random_matrix(rng, m, c, 0.7)
        })
        .collect();
    let quotients: Vec<SparseMatrix> = (0..k.len())
        .map(|s| {
            let mut w = SparseMatrix::zeros(m, 0);
            for f in k.faces(s) {
                w = w.hstack(&gens[f]);
            }
            annihilator(&w, m)
        })
        .collect();
    let dims: Vec<usize> = quotients.iter().map(|q| q.rows()).collect();
    let mut maps = BTreeMap::new();
    for t in 0..k.len() {
        for &(s, _) in k.facets(t) {
            let qs = &quotients[s];
            let section = qs
                .solve(&SparseMatrix::identity(qs.rows()))
                .expect("quotient maps are surjective");
            maps.insert((s, t), quotients[t].mul(&section));
        }
    }
    let a = CellularSheaf::new(k.clone(), dims, maps).expect("quotient sheaf is functorial");
    if rng.gen_bool(0.5) {
        let s = rng.gen_range(0..k.len());
        let extra = if rng.gen_bool(0.5) {
            CellularSheaf::elementary_star(k.clone(), s)
        } else {
            CellularSheaf::elementary_shriek(k.clone(), s)
        }
        .unwrap();
        a.direct_sum(&extra).unwrap()
    } else {
        a
    }
}

pub fn random_cosheaf(k: &Arc<SimplicialComplex>, rng: &mut impl Rng) -> CellularCosheaf {
    random_sheaf(k, rng).dual_cosheaf()
}

pub fn random_function(k: &Arc<SimplicialComplex>, rng: &mut impl Rng) -> ConstructibleFunction {
    let values = (0..k.len()).map(|_| rng.gen_range(-4..=4)).collect();
    ConstructibleFunction::new(k.clone(), values).unwrap()
}

/// A random element of the space of morphisms `S → T`, found by solving the
/// commutation constraints.
pub fn random_morphism(
    s: &CellularPerverseSheaf,
    t: &CellularPerverseSheaf,
    rng: &mut impl Rng,
) -> PerverseMorphism {
    let n = s.dims().len();
    let mut offset = vec![0; n + 1];
    for i in 0..n {
        offset[i + 1] = offset[i] + s.dims()[i] * t.dims()[i];
    }
    let unknowns = offset[n];
    // entry (r, c) of f_σ is unknown offset[σ] + r·dim S(σ) + c
    let var = |sigma: usize, r: usize, c: usize| offset[sigma] + r * s.dims()[sigma] + c;
    let mut rows: Vec<BTreeMap<usize, Rational>> = Vec::new();
    for &(a, b) in s.delta_function().relations() {
        let ta = t.attach(a, b);
        let sa = s.attach(a, b);
        // (T_ab f_a − f_b S_ab)[i][j] = 0
        for i in 0..t.dims()[b] {
            for j in 0..s.dims()[a] {
                let mut row: BTreeMap<usize, Rational> = BTreeMap::new();
                for l in 0..t.dims()[a] {
                    let x = ta.get(i, l);
                    if x != rat(0) {
                        *row.entry(var(a, l, j)).or_insert_with(|| rat(0)) += x;
                    }
                }
                for l in 0..s.dims()[b] {
                    let x = sa.get(l, j);
                    if x != rat(0) {
                        *row.entry(var(b, i, l)).or_insert_with(|| rat(0)) -= x;
                    }
                }
                row.retain(|_, v| *v != rat(0));
                if !row.is_empty() {
                    rows.push(row);
                }
            }
        }
    }
    let mut system = SparseMatrix::zeros(rows.len(), unknowns);
    for (r, row) in rows.iter().enumerate() {
        for (&c, v) in row {
            system.set(r, c, v.clone());
        }
    }
    let basis = system.kernel_basis();
    let mut x = vec![rat(0); unknowns];
    for b in &basis {
        let c = rat(rng.gen_range(-2..=2));
        for (xi, bi) in x.iter_mut().zip(b) {
            *xi += &c * bi;
        }
    }
    let maps = (0..n)
        .map(|sigma| {
            let mut m = SparseMatrix::zeros(t.dims()[sigma], s.dims()[sigma]);
            for r in 0..t.dims()[sigma] {
                for c in 0..s.dims()[sigma] {
                    m.set(r, c, x[var(sigma, r, c)].clone());
                }
            }
            m
        })
        .collect();
    PerverseMorphism::new(s.clone(), t.clone(), maps).expect("solution of the commutation system")
}
