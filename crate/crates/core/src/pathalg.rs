//! The path algebra `F` of the quiver of elementary relations and its
//! quadratic quotients `B = F/J` (cellular perverse sheaves are `B`-modules)
//! and `A = F/I` (the Ext algebra of the IC objects).
//!
//! A path is stored as the list of simplices it visits, in travel order, so
//! `[σ, θ, τ]` is the composite written `[s_{θτ}]·[s_{σθ}]`.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactla::{rat, Rational, SparseMatrix};
use crate::perverse::{CellularPerverseSheaf, DeltaFunction};

pub type Path = Vec<usize>;

/// Basis of `F_r`: all directed paths of length `r`.
#[derive(Clone, Debug)]
pub struct PathSpace {
    grade: usize,
    paths: Vec<Path>,
    index: HashMap<Path, usize>,
}

impl PathSpace {
    fn new(grade: usize, paths: Vec<Path>) -> Self {
        let index = paths.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        PathSpace { grade, paths, index }
    }

    pub fn grade(&self) -> usize {
        self.grade
    }

    pub fn dim(&self) -> usize {
        self.paths.len()
    }

    pub fn paths(&self) -> &[Path] {
        &self.paths
    }

    pub fn index_of(&self, path: &[usize]) -> Option<usize> {
        self.index.get(path).copied()
    }
}

/// The quiver whose vertices are simplices and whose arrows are elementary relations.
#[derive(Clone, Debug)]
pub struct Quiver {
    delta: Arc<DeltaFunction>,
    spaces: Vec<PathSpace>,
}

pub fn build_quiver(delta: Arc<DeltaFunction>) -> Quiver {
    Quiver::new(delta)
}

impl Quiver {
    pub fn new(delta: Arc<DeltaFunction>) -> Self {
        let n = delta.base().len();
        let mut spaces = vec![PathSpace::new(0, (0..n).map(|s| vec![s]).collect())];
        loop {
            let last = spaces.last().expect("grade 0 exists");
            let mut next = Vec::new();
            for p in &last.paths {
                let end = *p.last().expect("nonempty path");
                for &e in delta.out_edges(end) {
                    let mut q = p.clone();
                    q.push(delta.relations()[e].1);
                    next.push(q);
                }
            }
            if next.is_empty() {
                break;
            }
            next.sort();
            let grade = spaces.len();
            spaces.push(PathSpace::new(grade, next));
        }
        Quiver { delta, spaces }
    }

    pub fn delta_function(&self) -> &Arc<DeltaFunction> {
        &self.delta
    }

    pub fn vertex_count(&self) -> usize {
        self.delta.base().len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        self.delta.relations()
    }

    /// Longest path length.
    pub fn max_length(&self) -> usize {
        self.spaces.len() - 1
    }

    pub fn paths(&self, r: usize) -> Option<&PathSpace> {
        self.spaces.get(r)
    }

    pub fn dim_f(&self, r: usize) -> usize {
        self.spaces.get(r).map_or(0, |s| s.dim())
    }

    /// Length-two paths `σ → θ → τ` grouped by endpoints.
    pub fn length_two(&self) -> BTreeMap<(usize, usize), Vec<usize>> {
        let mut out: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        if let Some(f2) = self.spaces.get(2) {
            for (i, p) in f2.paths.iter().enumerate() {
                out.entry((p[0], p[2])).or_default().push(i);
            }
        }
        out
    }

    /// Spanning set of the degree-`r` piece of the two-sided ideal generated by
    /// the columns of `gens` (vectors in `F_2`), as columns in `F_r`.
    pub fn ideal_piece(&self, gens: &SparseMatrix, r: usize) -> SparseMatrix {
        let dim_r = self.dim_f(r);
        if r < 2 || dim_r == 0 || gens.cols() == 0 {
            return SparseMatrix::zeros(dim_r, 0);
        }
        let f2 = &self.spaces[2];
        let fr = &self.spaces[r];
        let n = self.vertex_count();
        let gens_t = gens.transpose();
        let mut spanning: Vec<BTreeMap<usize, Rational>> = Vec::new();
        for g in 0..gens.cols() {
            let support: Vec<(usize, &Rational)> =
                gens_t.row(g).iter().map(|(&i, v)| (i, v)).collect();
            for a_len in 0..=r - 2 {
                let b_len = r - 2 - a_len;
                // prefixes by end vertex, suffixes by start vertex
                let mut by_end: Vec<Vec<&Path>> = vec![Vec::new(); n];
                for p in &self.spaces[a_len].paths {
                    by_end[*p.last().unwrap()].push(p);
                }
                let mut by_start: Vec<Vec<&Path>> = vec![Vec::new(); n];
                if let Some(sp) = self.spaces.get(b_len) {
                    for p in &sp.paths {
                        by_start[p[0]].push(p);
                    }
                }
                let mut starts: Vec<usize> = support.iter().map(|&(i, _)| f2.paths[i][0]).collect();
                starts.sort_unstable();
                starts.dedup();
                for &s in &starts {
                    for a in &by_end[s] {
                        let mut ends: Vec<usize> =
                            support.iter().map(|&(i, _)| f2.paths[i][2]).collect();
                        ends.sort_unstable();
                        ends.dedup();
                        for &t in &ends {
                            for b in &by_start[t] {
                                let mut col = BTreeMap::new();
                                for &(i, v) in &support {
                                    let p = &f2.paths[i];
                                    if p[0] != s || p[2] != t {
                                        continue;
                                    }
                                    let mut full: Path = (*a).clone();
                                    full.extend_from_slice(&p[1..]);
                                    full.extend_from_slice(&b[1..]);
                                    let j = fr.index_of(&full).expect("concatenation is a path");
                                    col.insert(j, v.clone());
                                }
                                if !col.is_empty() {
                                    spanning.push(col);
                                }
                            }
                        }
                    }
                }
            }
        }
        let cols: Vec<Vec<Rational>> = spanning
            .into_iter()
            .map(|c| {
                let mut v = vec![rat(0); dim_r];
                for (j, x) in c {
                    v[j] = x;
                }
                v
            })
            .collect();
        SparseMatrix::from_columns(dim_r, &cols)
    }

    /// `dim F_r − dim (gens)_r`.
    pub fn quotient_dims(&self, gens: &SparseMatrix, r: usize) -> usize {
        self.dim_f(r) - self.ideal_piece(gens, r).rank()
    }

    pub fn relation_spaces(&self) -> RelationSpaces {
        let dim2 = self.dim_f(2);
        let pairs: Vec<PairRelations> = self
            .length_two()
            .into_iter()
            .map(|((sigma, tau), v)| {
                let mut e = SparseMatrix::zeros(dim2, 1);
                for &i in &v {
                    e.set(i, 0, rat(1));
                }
                let mut d = SparseMatrix::zeros(dim2, v.len().saturating_sub(1));
                for (c, &i) in v.iter().skip(1).enumerate() {
                    d.set(i, c, rat(1));
                    d.set(v[0], c, rat(-1));
                }
                PairRelations { sigma, tau, v, e, d }
            })
            .collect();
        RelationSpaces { dim2, pairs }
    }

    /// `dim B_r` for `B = F/(E)`.
    pub fn dim_b(&self, r: usize) -> usize {
        self.quotient_dims(&self.relation_spaces().e_generators(), r)
    }

    /// `dim A_r` for `A = F/(D)`.
    pub fn dim_a(&self, r: usize) -> usize {
        self.quotient_dims(&self.relation_spaces().d_generators(), r)
    }

    /// `#{(σ, τ) : σ ⪰ τ, δ(σ) − δ(τ) = r}`.
    pub fn ext_pair_count(&self, r: usize) -> usize {
        let n = self.vertex_count();
        let d = &self.delta;
        (0..n)
            .flat_map(|s| (0..n).map(move |t| (s, t)))
            .filter(|&(s, t)| d.delta(s) - d.delta(t) == r as i64 && d.succeq(s, t))
            .count()
    }

    /// Graded dimensions of `F`, `A`, `B` and the pair count, per degree.
    pub fn dimension_table(&self) -> Vec<GradedDims> {
        let rel = self.relation_spaces();
        let e = rel.e_generators();
        let d = rel.d_generators();
        (0..=self.max_length())
            .into_par_iter()
            .map(|r| GradedDims {
                r,
                f: self.dim_f(r),
                a: self.quotient_dims(&d, r),
                b: self.quotient_dims(&e, r),
                ext_pairs: self.ext_pair_count(r),
            })
            .collect()
    }

    /// Checks `t_{τβ}·t_{στ} = t_{σβ}` in `A` for every composable pair.
    ///
    /// Any path from σ to τ represents `t_{στ}`; the product of two
    /// representatives must be congruent to the representative of `t_{σβ}`
    /// modulo `I`, and that representative must be nonzero in `A`.
    pub fn a_multiplication_check(&self) -> bool {
        let d_gens = self.relation_spaces().d_generators();
        let ideals: Vec<SparseMatrix> = (0..=self.max_length())
            .map(|r| self.ideal_piece(&d_gens, r))
            .collect();
        let mut rep: HashMap<(usize, usize), Path> = HashMap::new();
        for sp in &self.spaces {
            for p in &sp.paths {
                rep.entry((p[0], *p.last().unwrap())).or_insert_with(|| p.clone());
            }
        }
        let unit = |r: usize, p: &Path| {
            let mut v = SparseMatrix::zeros(self.dim_f(r), 1);
            v.set(self.spaces[r].index_of(p).unwrap(), 0, rat(1));
            v
        };
        for (&(s, t), p) in &rep {
            let r = p.len() - 1;
            if ideals[r].spans(&unit(r, p)) {
                return false;
            }
            for (&(a, b), q) in &rep {
                if a != t {
                    continue;
                }
                let mut full = p.clone();
                full.extend_from_slice(&q[1..]);
                let rr = full.len() - 1;
                let target = &rep[&(s, b)];
                let diff = unit(rr, &full).sub(&unit(rr, target));
                if !ideals[rr].spans(&diff) {
                    return false;
                }
            }
        }
        true
    }
}

/// One row of [`Quiver::dimension_table`].
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct GradedDims {
    pub r: usize,
    pub f: usize,
    pub a: usize,
    pub b: usize,
    pub ext_pairs: usize,
}

/// `V_{στ}` with its subspaces `E_{στ}` and `D_{στ}`, as columns in `F_2`.
#[derive(Clone, Debug)]
pub struct PairRelations {
    pub sigma: usize,
    pub tau: usize,
    /// Indices in `F_2` of the paths `σ → θ → τ`.
    pub v: Vec<usize>,
    pub e: SparseMatrix,
    pub d: SparseMatrix,
}

#[derive(Clone, Debug)]
pub struct RelationSpaces {
    dim2: usize,
    pub pairs: Vec<PairRelations>,
}

impl RelationSpaces {
    pub fn e_generators(&self) -> SparseMatrix {
        self.pairs
            .iter()
            .fold(SparseMatrix::zeros(self.dim2, 0), |acc, p| acc.hstack(&p.e))
    }

    pub fn d_generators(&self) -> SparseMatrix {
        self.pairs
            .iter()
            .fold(SparseMatrix::zeros(self.dim2, 0), |acc, p| acc.hstack(&p.d))
    }
}

/// Result of checking `D_{στ} = E_{στ}^⊥` inside each `V_{στ}`.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct DualityReport {
    pub pairs_checked: usize,
    /// `(σ, τ)` pairs where the check failed.
    pub failures: Vec<(usize, usize)>,
}

impl DualityReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn quadratic_duality_check(q: &Quiver) -> DualityReport {
    let rel = q.relation_spaces();
    let failures = rel
        .pairs
        .par_iter()
        .filter(|p| {
            let k = p.v.len();
            let orthogonal = p.e.transpose().mul(&p.d).is_zero();
            let inside = p
                .e
                .hstack(&p.d)
                .entries()
                .all(|(i, _, _)| p.v.contains(&i));
            let complementary = p.e.rank() + p.d.rank() == k && p.e.hstack(&p.d).rank() == k;
            !(orthogonal && inside && complementary)
        })
        .map(|p| (p.sigma, p.tau))
        .collect();
    DualityReport {
        pairs_checked: rel.pairs.len(),
        failures,
    }
}

/// A right module over `B`: `[σ]` projects to `M_σ`, an arrow acts by its matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct PathModule {
    delta: Arc<DeltaFunction>,
    dims: Vec<usize>,
    arrows: BTreeMap<(usize, usize), SparseMatrix>,
}

pub fn module_bridge(s: &CellularPerverseSheaf) -> PathModule {
    PathModule {
        delta: s.delta_function().clone(),
        dims: s.dims().to_vec(),
        arrows: s.attach_maps().clone(),
    }
}

impl PathModule {
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Total dimension of the module.
    pub fn dim(&self) -> usize {
        self.dims.iter().sum()
    }

    /// Action of a path: the composite of its arrows, `M_start → M_end`.
    pub fn act(&self, path: &[usize]) -> Result<SparseMatrix> {
        let first = *path
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty path".into()))?;
        let mut m = SparseMatrix::identity(self.dims[first]);
        for w in path.windows(2) {
            if self.delta.relation_id(w[0], w[1]).is_none() {
                return Err(Error::InvalidArgument(format!("{} -> {} is not an arrow", w[0], w[1])));
            }
            let a = self
                .arrows
                .get(&(w[0], w[1]))
                .cloned()
                .unwrap_or_else(|| SparseMatrix::zeros(self.dims[w[1]], self.dims[w[0]]));
            m = a.mul(&m);
        }
        Ok(m)
    }

    /// Whether every `u_{στ}` acts by zero.
    pub fn relations_vanish(&self, q: &Quiver) -> bool {
        let f2 = match q.paths(2) {
            Some(f) => f,
            None => return true,
        };
        q.relation_spaces().pairs.iter().all(|p| {
            let mut sum = SparseMatrix::zeros(self.dims[p.tau], self.dims[p.sigma]);
            for &i in &p.v {
                sum = sum.add(&self.act(&f2.paths()[i]).expect("path of the quiver"));
            }
            sum.is_zero()
        })
    }

    pub fn to_perverse(&self) -> Result<CellularPerverseSheaf> {
        CellularPerverseSheaf::new(self.delta.clone(), self.dims.clone(), self.arrows.clone())
    }
}
