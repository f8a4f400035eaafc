//! Cellular perverse sheaves for BBDG perversities.
//!
//! A perversity determines the perverse dimension δ of every simplex. A
//! cellular perverse sheaf is a vector space per simplex plus attaching maps
//! along elementary relations `σ ⪰ τ` (comparable, `δ(σ) = δ(τ) + 1`) such
//! that `⋯ → ⊕_{δ=r} S_σ → ⊕_{δ=r−1} S_σ → ⋯` is a complex. The term with
//! `δ = r` sits in cohomological degree `−r`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::complex::{barycentric, BarycentricSubdivision, SimplicialComplex};
use crate::error::{Error, Result};
use crate::exactla::{rat, GradedComplex, SparseMatrix};
use crate::sheaf::{subdivide_sheaf, CellularCosheaf, CellularSheaf};

/// A BBDG perversity `p(0), …, p(n)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BBDGPerversity {
    values: Vec<i64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CellType {
    Star,
    Shriek,
    /// Dimension 0 is of both types.
    Both,
}

impl fmt::Display for CellType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CellType::Star => "*",
            CellType::Shriek => "!",
            CellType::Both => "*!",
        })
    }
}

impl BBDGPerversity {
    pub fn new(values: Vec<i64>) -> Result<Self> {
        if values.first() != Some(&0) {
            return Err(Error::InvalidParameter("perversity needs p(0) = 0".into()));
        }
        for (d, w) in values.windows(2).enumerate() {
            if !(w[1] <= w[0] && w[1] >= w[0] - 1) {
                return Err(Error::InvalidParameter(format!(
                    "p({}) = {} must lie between p({d}) − 1 and p({d})",
                    d + 1,
                    w[1]
                )));
            }
        }
        Ok(BBDGPerversity { values })
    }

    /// `p ≡ 0`; every positive dimension has type `!`.
    pub fn zero(n: usize) -> Self {
        BBDGPerversity { values: vec![0; n + 1] }
    }

    /// `p(d) = −d`; every positive dimension has type `*`.
    pub fn top(n: usize) -> Self {
        BBDGPerversity {
            values: (0..=n as i64).map(|d| -d).collect(),
        }
    }

    /// `p(d) = −⌊d/2⌋`, alternating types.
    pub fn middle(n: usize) -> Self {
        BBDGPerversity {
            values: (0..=n as i64).map(|d| -(d / 2)).collect(),
        }
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    /// Largest dimension covered.
    pub fn max_dim(&self) -> usize {
        self.values.len() - 1
    }

    pub fn p(&self, d: usize) -> i64 {
        self.values[d]
    }

    pub fn cell_type(&self, d: usize) -> CellType {
        if d == 0 {
            CellType::Both
        } else if self.values[d] == self.values[d - 1] {
            CellType::Shriek
        } else {
            CellType::Star
        }
    }

    /// Perverse dimension of a `d`-simplex.
    pub fn delta(&self, d: usize) -> i64 {
        match self.cell_type(d) {
            CellType::Shriek => -self.values[d] - d as i64,
            _ => -self.values[d],
        }
    }

    /// The dual perversity `d ↦ −d − p(d)`.
    pub fn dual(&self) -> BBDGPerversity {
        BBDGPerversity {
            values: self
                .values
                .iter()
                .enumerate()
                .map(|(d, &p)| -(d as i64) - p)
                .collect(),
        }
    }
}

impl fmt::Display for BBDGPerversity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.values.iter().map(|v| v.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// δ on the simplices of a complex, with the elementary relations it induces.
#[derive(Clone, Debug)]
pub struct DeltaFunction {
    base: Arc<SimplicialComplex>,
    perversity: BBDGPerversity,
    delta: Vec<i64>,
    relations: Vec<(usize, usize)>,
    relation_index: HashMap<(usize, usize), usize>,
    out_edges: Vec<Vec<usize>>,
    in_edges: Vec<Vec<usize>>,
    /// `reach[σ]` holds every τ with `σ ⪰ τ`, including σ.
    reach: Vec<BTreeSet<usize>>,
}

impl PartialEq for DeltaFunction {
    fn eq(&self, other: &Self) -> bool {
        self.base == other.base && self.perversity == other.perversity
    }
}

impl DeltaFunction {
    pub fn new(base: impl Into<Arc<SimplicialComplex>>, perversity: BBDGPerversity) -> Result<Self> {
        let base = base.into();
        if perversity.max_dim() < base.dim() {
            return Err(Error::InvalidParameter(format!(
                "perversity {perversity} does not cover dimension {}",
                base.dim()
            )));
        }
        let delta: Vec<i64> = (0..base.len())
            .map(|id| perversity.delta(base.simplex_dim(id)))
            .collect();
        let mut relations = Vec::new();
        for s in 0..base.len() {
            for t in 0..base.len() {
                if s != t
                    && delta[s] == delta[t] + 1
                    && (base.is_face(s, t) || base.is_face(t, s))
                {
                    relations.push((s, t));
                }
            }
        }
        let relation_index = relations.iter().enumerate().map(|(i, &r)| (r, i)).collect();
        let mut out_edges = vec![Vec::new(); base.len()];
        let mut in_edges = vec![Vec::new(); base.len()];
        for (i, &(s, t)) in relations.iter().enumerate() {
            out_edges[s].push(i);
            in_edges[t].push(i);
        }
        // δ strictly drops along edges, so process by increasing δ
        let mut order: Vec<usize> = (0..base.len()).collect();
        order.sort_by_key(|&s| delta[s]);
        let mut reach: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); base.len()];
        for &s in &order {
            let mut set = BTreeSet::from([s]);
            for &e in &out_edges[s] {
                set.extend(reach[relations[e].1].iter().copied());
            }
            reach[s] = set;
        }
        Ok(DeltaFunction {
            base,
            perversity,
            delta,
            relations,
            relation_index,
            out_edges,
            in_edges,
            reach,
        })
    }

    pub fn base(&self) -> &SimplicialComplex {
        &self.base
    }

    pub fn base_arc(&self) -> &Arc<SimplicialComplex> {
        &self.base
    }

    pub fn perversity(&self) -> &BBDGPerversity {
        &self.perversity
    }

    pub fn delta(&self, id: usize) -> i64 {
        self.delta[id]
    }

    pub fn cell_type(&self, id: usize) -> CellType {
        self.perversity.cell_type(self.base.simplex_dim(id))
    }

    /// `(min δ, max δ)` over all simplices.
    pub fn delta_range(&self) -> (i64, i64) {
        let lo = self.delta.iter().copied().min().unwrap_or(0);
        let hi = self.delta.iter().copied().max().unwrap_or(0);
        (lo, hi)
    }

    /// Elementary relations `(σ, τ)` with `δ(σ) = δ(τ) + 1`.
    pub fn relations(&self) -> &[(usize, usize)] {
        &self.relations
    }

    pub fn relation_id(&self, sigma: usize, tau: usize) -> Option<usize> {
        self.relation_index.get(&(sigma, tau)).copied()
    }

    /// Ids of relations leaving σ.
    pub fn out_edges(&self, sigma: usize) -> &[usize] {
        &self.out_edges[sigma]
    }

    /// Ids of relations arriving at τ.
    pub fn in_edges(&self, tau: usize) -> &[usize] {
        &self.in_edges[tau]
    }

    /// `σ ⪰ τ`: reachable by a chain of elementary relations (reflexive).
    pub fn succeq(&self, sigma: usize, tau: usize) -> bool {
        self.reach[sigma].contains(&tau)
    }

    /// Intermediate θ with `σ ⪰ θ ⪰ τ` elementary, for a δ-gap-2 pair.
    pub fn intermediates(&self, sigma: usize, tau: usize) -> Vec<usize> {
        self.out_edges[sigma]
            .iter()
            .map(|&e| self.relations[e].1)
            .filter(|&th| self.relation_index.contains_key(&(th, tau)))
            .collect()
    }

    /// All pairs `(σ, τ)` with `δ(σ) = δ(τ) + 2` joined by at least one length-two path.
    pub fn gap_two_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = BTreeSet::new();
        for &(s, th) in &self.relations {
            for &e in &self.out_edges[th] {
                out.insert((s, self.relations[e].1));
            }
        }
        out.into_iter().collect()
    }

    fn check_subdivision(&self, sd: &BarycentricSubdivision) -> Result<()> {
        if sd.base() != &*self.base {
            return Err(Error::InvalidArgument("subdivision of a different complex".into()));
        }
        Ok(())
    }

    /// The perverse cell `^δσ`: its interior flags and its boundary (the perverse link).
    pub fn perverse_cell(&self, sd: &BarycentricSubdivision, sigma: usize) -> Result<PerverseCell> {
        self.check_subdivision(sd)?;
        if sigma >= self.base.len() {
            return Err(Error::InvalidArgument(format!("no simplex with id {sigma}")));
        }
        let ds = self.delta[sigma];
        let k = &*self.base;
        let mut cells = Vec::new();
        let mut boundary = Vec::new();
        for f in 0..sd.subdivided().len() {
            let carrier = sd.carrier(f);
            if carrier.contains(&sigma) {
                if carrier.iter().all(|&t| self.delta[t] <= ds) {
                    cells.push(f);
                }
            } else if carrier.iter().all(|&t| self.delta[t] < ds)
                && carrier.iter().all(|&t| k.is_face(t, sigma) || k.is_face(sigma, t))
            {
                boundary.push(f);
            }
        }
        Ok(PerverseCell {
            sigma,
            cells,
            boundary,
        })
    }

    /// Flags all of whose entries have `δ ≤ r`.
    pub fn perverse_skeleton(&self, sd: &BarycentricSubdivision, r: i64) -> Result<Vec<usize>> {
        self.check_subdivision(sd)?;
        Ok((0..sd.subdivided().len())
            .filter(|&f| sd.carrier(f).iter().all(|&t| self.delta[t] <= r))
            .collect())
    }

    /// Carrier entry of largest δ; its perverse cell has the flag in its interior.
    pub fn interior_owner(&self, sd: &BarycentricSubdivision, flag: usize) -> usize {
        *sd.carrier(flag)
            .iter()
            .max_by_key(|&&t| self.delta[t])
            .expect("nonempty flag")
    }
}

/// A perverse cell in the barycentric subdivision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PerverseCell {
    pub sigma: usize,
    /// Flags through the barycenter of σ with all δ at most δ(σ).
    pub cells: Vec<usize>,
    /// The perverse link.
    pub boundary: Vec<usize>,
}

/// A failing chain-complex condition on a δ-gap-2 pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationFailure {
    pub sigma: usize,
    pub tau: usize,
}

/// A cellular perverse sheaf. Absent attaching maps are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct CellularPerverseSheaf {
    delta: Arc<DeltaFunction>,
    dims: Vec<usize>,
    attach: BTreeMap<(usize, usize), SparseMatrix>,
}

impl CellularPerverseSheaf {
    /// Checks shapes and that every key is an elementary relation. Does not check `d∘d = 0`.
    pub fn new(
        delta: Arc<DeltaFunction>,
        dims: Vec<usize>,
        attach: BTreeMap<(usize, usize), SparseMatrix>,
    ) -> Result<Self> {
        let k = delta.base();
        if dims.len() != k.len() {
            return Err(Error::MalformedInput(format!(
                "{} stalk dimensions for {} simplices",
                dims.len(),
                k.len()
            )));
        }
        for (&(s, t), m) in &attach {
            if delta.relation_id(s, t).is_none() {
                return Err(Error::MalformedInput(format!(
                    "no elementary relation {} ⪰ {}",
                    k.simplex(s),
                    k.simplex(t)
                )));
            }
            if m.shape() != (dims[t], dims[s]) {
                return Err(Error::MalformedInput(format!(
                    "attaching map {} -> {} has shape {:?}, expected {:?}",
                    k.simplex(s),
                    k.simplex(t),
                    m.shape(),
                    (dims[t], dims[s])
                )));
            }
        }
        let attach = attach.into_iter().filter(|(_, m)| !m.is_zero()).collect();
        Ok(CellularPerverseSheaf { delta, dims, attach })
    }

    pub fn zero(delta: Arc<DeltaFunction>) -> Self {
        let n = delta.base().len();
        CellularPerverseSheaf {
            delta,
            dims: vec![0; n],
            attach: BTreeMap::new(),
        }
    }

    /// The simple object `IC_σ`: `ℚ` at σ, zero elsewhere.
    pub fn ic_object(delta: Arc<DeltaFunction>, sigma: usize) -> Result<Self> {
        if sigma >= delta.base().len() {
            return Err(Error::InvalidArgument(format!("no simplex with id {sigma}")));
        }
        let mut s = Self::zero(delta);
        s.dims[sigma] = 1;
        Ok(s)
    }

    pub fn delta_function(&self) -> &Arc<DeltaFunction> {
        &self.delta
    }

    pub fn base(&self) -> &SimplicialComplex {
        self.delta.base()
    }

    pub fn stalk_dim(&self, sigma: usize) -> usize {
        self.dims[sigma]
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn attach_maps(&self) -> &BTreeMap<(usize, usize), SparseMatrix> {
        &self.attach
    }

    pub fn attach(&self, sigma: usize, tau: usize) -> SparseMatrix {
        self.attach
            .get(&(sigma, tau))
            .cloned()
            .unwrap_or_else(|| SparseMatrix::zeros(self.dims[tau], self.dims[sigma]))
    }

    /// Pairs where `Σ_θ s_{θτ} s_{σθ} ≠ 0`.
    pub fn validate(&self) -> Vec<RelationFailure> {
        self.delta
            .gap_two_pairs()
            .into_par_iter()
            .filter_map(|(s, t)| {
                let mut sum = SparseMatrix::zeros(self.dims[t], self.dims[s]);
                for th in self.delta.intermediates(s, t) {
                    sum = sum.add(&self.attach(th, t).mul(&self.attach(s, th)));
                }
                if sum.is_zero() {
                    None
                } else {
                    Some(RelationFailure { sigma: s, tau: t })
                }
            })
            .collect()
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    fn require_valid(&self) -> Result<()> {
        let bad = self.validate();
        if let Some(f) = bad.first() {
            let k = self.base();
            return Err(Error::MalformedInput(format!(
                "{} relation(s) fail, first at {} ⪰⪰ {}",
                bad.len(),
                k.simplex(f.sigma),
                k.simplex(f.tau)
            )));
        }
        Ok(())
    }

    /// The complex `⊕_{δ=r} S_σ` in degree `−r`.
    pub fn complex(&self) -> Result<GradedComplex> {
        let k = self.base();
        if k.is_empty() {
            return Ok(GradedComplex::zero());
        }
        let (dlo, dhi) = self.delta.delta_range();
        // term index j holds δ = dhi − j, degree −dhi + j
        let mut offset = vec![0; k.len()];
        let mut dims = vec![0; (dhi - dlo + 1) as usize];
        for s in 0..k.len() {
            let j = (dhi - self.delta.delta(s)) as usize;
            offset[s] = dims[j];
            dims[j] += self.dims[s];
        }
        let mut diffs: Vec<SparseMatrix> = (0..dims.len().saturating_sub(1))
            .map(|j| SparseMatrix::zeros(dims[j + 1], dims[j]))
            .collect();
        for (&(s, t), m) in &self.attach {
            let j = (dhi - self.delta.delta(s)) as usize;
            diffs[j].add_block(offset[t], offset[s], m);
        }
        GradedComplex::new(-dhi as i32, dims, diffs)
    }

    /// Cohomology dimensions by degree.
    pub fn cohomology(&self) -> Result<BTreeMap<i32, usize>> {
        self.require_valid()?;
        Ok(self.complex()?.homology())
    }

    /// Dual stalks and transposed maps for the dual perversity; δ changes sign.
    pub fn verdier_dual(&self) -> Result<CellularPerverseSheaf> {
        let dual = Arc::new(DeltaFunction::new(
            self.delta.base_arc().clone(),
            self.delta.perversity().dual(),
        )?);
        let attach = self
            .attach
            .iter()
            .map(|(&(s, t), m)| ((t, s), m.transpose()))
            .collect();
        CellularPerverseSheaf::new(dual, self.dims.clone(), attach)
    }

    /// Data of the simplicial sheaf recovered from a `p ≡ 0` object by removing incidence signs.
    pub fn to_sheaf_p0(&self) -> Result<CellularSheaf> {
        let k = self.delta.base_arc().clone();
        if *self.delta.perversity() != BBDGPerversity::zero(self.delta.perversity().max_dim()) {
            return Err(Error::InvalidArgument("object does not have perversity 0".into()));
        }
        let maps = self
            .attach
            .iter()
            .map(|(&(s, t), m)| ((s, t), m.scale(&rat(k.incidence_ids(t, s) as i64))))
            .collect();
        CellularSheaf::new(k, self.dims.clone(), maps)
    }

    pub fn direct_sum(&self, other: &CellularPerverseSheaf) -> Result<CellularPerverseSheaf> {
        if *self.delta != *other.delta {
            return Err(Error::InvalidArgument("objects have different perversities".into()));
        }
        let dims: Vec<usize> = self.dims.iter().zip(&other.dims).map(|(a, b)| a + b).collect();
        let keys: BTreeSet<_> = self.attach.keys().chain(other.attach.keys()).copied().collect();
        let mut attach = BTreeMap::new();
        for (s, t) in keys {
            let mut m = SparseMatrix::zeros(dims[t], dims[s]);
            m.add_block(0, 0, &self.attach(s, t));
            m.add_block(self.dims[t], self.dims[s], &other.attach(s, t));
            attach.insert((s, t), m);
        }
        CellularPerverseSheaf::new(self.delta.clone(), dims, attach)
    }
}

/// δ of a simplex.
pub fn delta(perversity: &BBDGPerversity, k: &SimplicialComplex, sigma: usize) -> i64 {
    perversity.delta(k.simplex_dim(sigma))
}

/// `p ≡ 0` object with attaching maps `[τ:σ]·A_{στ}`.
pub fn from_sheaf_p0(a: &CellularSheaf) -> Result<CellularPerverseSheaf> {
    a.check_functoriality()?;
    let k = a.base_arc().clone();
    let delta = Arc::new(DeltaFunction::new(k.clone(), BBDGPerversity::zero(k.dim()))?);
    let attach = a
        .maps()
        .iter()
        .map(|(&(s, t), m)| ((s, t), m.scale(&rat(k.incidence_ids(t, s) as i64))))
        .collect();
    CellularPerverseSheaf::new(delta, a.dims().to_vec(), attach)
}

/// Top-perversity object with attaching maps `[σ:τ]·R_{σ→τ}` for faces `τ < σ`.
pub fn from_cosheaf_top(r: &CellularCosheaf) -> Result<CellularPerverseSheaf> {
    let k = r.base_arc().clone();
    let delta = Arc::new(DeltaFunction::new(k.clone(), BBDGPerversity::top(k.dim()))?);
    let attach = r
        .maps()
        .iter()
        .map(|(&(face, big), m)| ((big, face), m.scale(&rat(k.incidence_ids(big, face) as i64))))
        .collect();
    CellularPerverseSheaf::new(delta, r.dims().to_vec(), attach)
}

/// `Ext^*(IC_σ, IC_τ)` as `(degree, dimension)`: dimension 1 in degree `δ(σ) − δ(τ)` iff `σ ⪰ τ`.
pub fn ic_ext(delta: &DeltaFunction, sigma: usize, tau: usize) -> (i64, usize) {
    let degree = delta.delta(sigma) - delta.delta(tau);
    (degree, usize::from(delta.succeq(sigma, tau)))
}

/// A morphism of cellular perverse sheaves, one matrix per simplex.
#[derive(Clone, Debug)]
pub struct PerverseMorphism {
    source: CellularPerverseSheaf,
    target: CellularPerverseSheaf,
    maps: Vec<SparseMatrix>,
}

impl PerverseMorphism {
    pub fn new(
        source: CellularPerverseSheaf,
        target: CellularPerverseSheaf,
        maps: Vec<SparseMatrix>,
    ) -> Result<Self> {
        if *source.delta != *target.delta {
            return Err(Error::MalformedMorphism("different perversities".into()));
        }
        let k = source.base();
        if maps.len() != k.len() {
            return Err(Error::MalformedMorphism("one map per simplex required".into()));
        }
        for (s, m) in maps.iter().enumerate() {
            if m.shape() != (target.dims[s], source.dims[s]) {
                return Err(Error::MalformedMorphism(format!(
                    "map at {} has the wrong shape",
                    k.simplex(s)
                )));
            }
        }
        for &(s, t) in source.delta.relations() {
            let lhs = target.attach(s, t).mul(&maps[s]);
            let rhs = maps[t].mul(&source.attach(s, t));
            if lhs != rhs {
                return Err(Error::MalformedMorphism(format!(
                    "does not commute with attaching map {} -> {}",
                    k.simplex(s),
                    k.simplex(t)
                )));
            }
        }
        Ok(PerverseMorphism { source, target, maps })
    }

    pub fn identity(s: &CellularPerverseSheaf) -> Self {
        let maps = s.dims.iter().map(|&d| SparseMatrix::identity(d)).collect();
        PerverseMorphism {
            source: s.clone(),
            target: s.clone(),
            maps,
        }
    }

    pub fn zero(source: &CellularPerverseSheaf, target: &CellularPerverseSheaf) -> Result<Self> {
        let maps = source
            .dims
            .iter()
            .zip(&target.dims)
            .map(|(&a, &b)| SparseMatrix::zeros(b, a))
            .collect();
        Self::new(source.clone(), target.clone(), maps)
    }

    pub fn source(&self) -> &CellularPerverseSheaf {
        &self.source
    }

    pub fn target(&self) -> &CellularPerverseSheaf {
        &self.target
    }

    pub fn map(&self, sigma: usize) -> &SparseMatrix {
        &self.maps[sigma]
    }

    /// Pointwise kernel with induced attaching maps.
    pub fn kernel(&self) -> Result<CellularPerverseSheaf> {
        let bases: Vec<SparseMatrix> = self.maps.iter().map(|m| m.kernel_matrix()).collect();
        self.sub_object(&self.source, bases)
    }

    /// Pointwise image, as a subobject of the target.
    pub fn image(&self) -> Result<CellularPerverseSheaf> {
        let bases: Vec<SparseMatrix> = self.maps.iter().map(|m| m.column_space()).collect();
        self.sub_object(&self.target, bases)
    }

    fn sub_object(
        &self,
        ambient: &CellularPerverseSheaf,
        bases: Vec<SparseMatrix>,
    ) -> Result<CellularPerverseSheaf> {
        let dims: Vec<usize> = bases.iter().map(|b| b.cols()).collect();
        let mut attach = BTreeMap::new();
        for &(s, t) in ambient.delta.relations() {
            let moved = ambient.attach(s, t).mul(&bases[s]);
            let m = bases[t].solve(&moved).ok_or_else(|| Error::InvariantViolation {
                name: "subobject closed under attaching maps".into(),
            })?;
            attach.insert((s, t), m);
        }
        CellularPerverseSheaf::new(ambient.delta.clone(), dims, attach)
    }

    /// Pointwise cokernel with induced attaching maps.
    pub fn cokernel(&self) -> Result<CellularPerverseSheaf> {
        // per simplex: a section (columns completing the image) and the quotient projection
        let mut sections = Vec::new();
        let mut projections = Vec::new();
        for (s, m) in self.maps.iter().enumerate() {
            let n = self.target.dims[s];
            let image = m.column_space();
            let r = image.cols();
            let full = image.hstack(&SparseMatrix::identity(n));
            let chosen = full.independent_columns();
            let basis = full.select_columns(&chosen);
            let inverse = basis.inverse().ok_or_else(|| Error::InvariantViolation {
                name: "completed basis is invertible".into(),
            })?;
            let complement: Vec<usize> = (r..n).collect();
            sections.push(basis.select_columns(&complement));
            projections.push(inverse.select_rows(&complement));
        }
        let dims: Vec<usize> = sections.iter().map(|s| s.cols()).collect();
        let mut attach = BTreeMap::new();
        for &(s, t) in self.target.delta.relations() {
            let m = projections[t].mul(&self.target.attach(s, t)).mul(&sections[s]);
            attach.insert((s, t), m);
        }
        CellularPerverseSheaf::new(self.target.delta.clone(), dims, attach)
    }
}

/// Cohomology with supports in open perverse cells, for direct sums of IC objects.
///
/// `IC_τ` is realized as `ℚ_{τ*}[−p]` (type `*`) or `ℚ_{τ!}[−p]` (type `!`),
/// `p = p(dim τ)`. Supports in `^δσ°` are computed as the relative
/// cohomology of `(U, U ∖ ^δσ°)` with `U` the complement of the perverse link,
/// using cochains on chains of subdivided simplices.
pub struct SupportCalculator {
    delta: Arc<DeltaFunction>,
    sd1: BarycentricSubdivision,
    sd2: BarycentricSubdivision,
    realized: HashMap<usize, CellularSheaf>,
}

impl SupportCalculator {
    pub fn new(delta: Arc<DeltaFunction>) -> Self {
        let sd1 = barycentric(delta.base());
        let sd2 = barycentric(sd1.subdivided());
        let k = delta.base_arc().clone();
        let realized: HashMap<usize, CellularSheaf> = (0..k.len())
            .into_par_iter()
            .map(|tau| {
                let x = realize_ic(&delta, tau).expect("simplex exists");
                let x1 = subdivide_sheaf(&x, &sd1);
                (tau, subdivide_sheaf(&x1, &sd2))
            })
            .collect();
        SupportCalculator {
            delta,
            sd1,
            sd2,
            realized,
        }
    }

    pub fn delta_function(&self) -> &Arc<DeltaFunction> {
        &self.delta
    }

    /// `H^r_{^δσ°}(K; IC_τ)` by degree.
    pub fn ic_support(&self, tau: usize, sigma: usize) -> Result<BTreeMap<i32, usize>> {
        let k = self.delta.base();
        if tau >= k.len() || sigma >= k.len() {
            return Err(Error::InvalidArgument("simplex id out of range".into()));
        }
        let cell = self.delta.perverse_cell(&self.sd1, sigma)?;
        let kp = self.sd1.subdivided();
        let mut in_u = vec![true; kp.len()];
        for &b in &cell.boundary {
            in_u[b] = false;
        }
        let mut in_z = vec![false; kp.len()];
        for &c in &cell.cells {
            in_z[c] = true;
        }
        let kpp = self.sd2.subdivided();
        let keep: Vec<bool> = (0..kpp.len())
            .map(|f| {
                let chain = self.sd2.carrier(f);
                chain.iter().all(|&x| in_u[x]) && chain.iter().any(|&x| in_z[x])
            })
            .collect();
        let x = &self.realized[&tau];
        let c = restricted_cochains(x, &keep)?;
        let shift = -self.delta.perversity().p(k.simplex_dim(tau)) as i32;
        // (A[s])^i = A^{i+s}; IC_τ = X[shift]
        Ok(c.homology()
            .into_iter()
            .map(|(r, h)| (r - shift, h))
            .filter(|&(_, h)| h > 0)
            .collect())
    }

    /// The cellular data recovered by `T = ⊕_σ H^{−δ(σ)}_{^δσ°}` from `IC_τ`.
    pub fn functor_t(&self, tau: usize) -> Result<Vec<usize>> {
        let k = self.delta.base();
        (0..k.len())
            .into_par_iter()
            .map(|sigma| {
                let h = self.ic_support(tau, sigma)?;
                Ok(h.get(&(-self.delta.delta(sigma) as i32)).copied().unwrap_or(0))
            })
            .collect()
    }
}

/// The sheaf `ℚ_{τ*}` or `ℚ_{τ!}` underlying `IC_τ` (before the shift by `−p(dim τ)`).
pub fn realize_ic(delta: &DeltaFunction, tau: usize) -> Result<CellularSheaf> {
    let k = delta.base_arc().clone();
    match delta.cell_type(tau) {
        CellType::Shriek => CellularSheaf::elementary_shriek(k, tau),
        _ => CellularSheaf::elementary_star(k, tau),
    }
}

/// Cochains of `x` on the simplices flagged by `keep`, which must be locally closed.
fn restricted_cochains(x: &CellularSheaf, keep: &[bool]) -> Result<GradedComplex> {
    let k = x.base();
    if k.is_empty() {
        return Ok(GradedComplex::zero());
    }
    let mut offset = vec![0; k.len()];
    let mut dims = Vec::new();
    for d in 0..=k.dim() {
        let mut acc = 0;
        for id in k.ids_of_dim(d) {
            if keep[id] {
                offset[id] = acc;
                acc += x.stalk_dim(id);
            }
        }
        dims.push(acc);
    }
    let mut diffs = Vec::new();
    for d in 0..k.dim() {
        let mut m = SparseMatrix::zeros(dims[d + 1], dims[d]);
        for t in k.ids_of_dim(d + 1) {
            if !keep[t] || x.stalk_dim(t) == 0 {
                continue;
            }
            for &(s, sign) in k.facets(t) {
                if keep[s] {
                    if let Some(r) = x.maps().get(&(s, t)) {
                        m.add_block(offset[t], offset[s], &r.scale(&rat(sign as i64)));
                    }
                }
            }
        }
        diffs.push(m);
    }
    GradedComplex::new(0, dims, diffs)
}

/// `H^r_{^δσ°}(K; S)` for `S` a direct sum of IC objects (all attaching maps zero).
pub fn local_support_cohomology(s: &CellularPerverseSheaf, sigma: usize) -> Result<BTreeMap<i32, usize>> {
    if !s.attach.is_empty() {
        return Err(Error::Unsupported(
            "only direct sums of IC objects are realized as sheaf complexes".into(),
        ));
    }
    let calc = SupportCalculator::new(s.delta.clone());
    let mut out = BTreeMap::new();
    for (tau, &d) in s.dims.iter().enumerate() {
        if d == 0 {
            continue;
        }
        for (r, h) in calc.ic_support(tau, sigma)? {
            *out.entry(r).or_insert(0) += h * d;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{simplex, sphere};

    fn df(k: SimplicialComplex, p: BBDGPerversity) -> Arc<DeltaFunction> {
        Arc::new(DeltaFunction::new(k, p).unwrap())
    }

    #[test]
    fn delta_values() {
        let z = BBDGPerversity::zero(3);
        assert_eq!((0..=3).map(|d| z.delta(d)).collect::<Vec<_>>(), vec![0, -1, -2, -3]);
        let t = BBDGPerversity::top(3);
        assert_eq!((0..=3).map(|d| t.delta(d)).collect::<Vec<_>>(), vec![0, 1, 2, 3]);
        let m = BBDGPerversity::middle(4);
        let ds: BTreeSet<i64> = (0..=4).map(|d| m.delta(d)).collect();
        assert_eq!(ds.len(), 5);
        assert_eq!(*ds.iter().next().unwrap() + 4, *ds.iter().next_back().unwrap());
        assert!(BBDGPerversity::new(vec![0, -2]).is_err());
        assert_eq!(t.dual(), z);
    }

    #[test]
    fn relations_for_edge() {
        let d0 = df(simplex(1), BBDGPerversity::zero(1));
        assert_eq!(d0.relations().len(), 2);
        // vertices point to the edge
        assert!(d0.relations().iter().all(|&(s, _)| s < 2));
        let dt = df(simplex(1), BBDGPerversity::top(1));
        assert!(dt.relations().iter().all(|&(s, _)| s == 2));
    }

    #[test]
    fn cells_for_endpoint_perversities() {
        let k = simplex(2);
        let sd = barycentric(&k);
        let d0 = df(k.clone(), BBDGPerversity::zero(2));
        for s in 0..k.len() {
            let cell = d0.perverse_cell(&sd, s).unwrap();
            let dual: BTreeSet<usize> = sd.dual_cell(s).unwrap().into_iter().collect();
            let closed: BTreeSet<usize> = cell.cells.iter().chain(&cell.boundary).copied().collect();
            assert_eq!(closed, dual);
        }
        let dt = df(k.clone(), BBDGPerversity::top(2));
        for s in 0..k.len() {
            let cell = dt.perverse_cell(&sd, s).unwrap();
            let closed: BTreeSet<usize> = cell.cells.iter().chain(&cell.boundary).copied().collect();
            let expected: BTreeSet<usize> = (0..sd.subdivided().len())
                .filter(|&f| sd.carrier(f).iter().all(|&t| k.is_face(t, s)))
                .collect();
            assert_eq!(closed, expected);
        }
    }

    #[test]
    fn conversions() {
        let a = CellularSheaf::constant(sphere(2));
        let p = from_sheaf_p0(&a).unwrap();
        assert!(p.is_valid());
        assert_eq!(p.cohomology().unwrap(), a.cochain_cohomology().unwrap());
        assert_eq!(p.to_sheaf_p0().unwrap(), a);
        let c = CellularCosheaf::constant(sphere(2));
        let q = from_cosheaf_top(&c).unwrap();
        let h = q.cohomology().unwrap();
        assert_eq!((h[&0], h[&-1], h[&-2]), (1, 0, 1));
    }

    #[test]
    fn unsigned_conversion_fails() {
        let k = Arc::new(simplex(2));
        let d = df((*k).clone(), BBDGPerversity::zero(2));
        let a = CellularSheaf::constant(k);
        let p = CellularPerverseSheaf::new(d, a.dims().to_vec(), a.maps().clone()).unwrap();
        assert!(!p.is_valid());
    }

    #[test]
    fn duality_reverses_degrees() {
        let a = CellularSheaf::constant(sphere(2));
        let p = from_sheaf_p0(&a).unwrap();
        let dual = p.verdier_dual().unwrap();
        assert!(dual.is_valid());
        let h = p.cohomology().unwrap();
        let hd = dual.cohomology().unwrap();
        for (r, v) in h {
            assert_eq!(hd.get(&-r).copied().unwrap_or(0), v);
        }
        assert_eq!(dual.verdier_dual().unwrap(), p);
    }

    #[test]
    fn ic_support_on_triangle() {
        let d = df(simplex(2), BBDGPerversity::middle(2));
        let calc = SupportCalculator::new(d.clone());
        for tau in 0..7 {
            for sigma in 0..7 {
                let h = calc.ic_support(tau, sigma).unwrap();
                if sigma == tau {
                    let expected: BTreeMap<i32, usize> = [(-d.delta(sigma) as i32, 1)].into();
                    assert_eq!(h, expected, "tau {tau} sigma {sigma}");
                } else {
                    assert!(h.is_empty(), "tau {tau} sigma {sigma}: {h:?}");
                }
            }
        }
    }

    #[test]
    fn kernel_and_cokernel() {
        let a = from_sheaf_p0(&CellularSheaf::constant(simplex(1))).unwrap();
        let id = PerverseMorphism::identity(&a);
        assert!(id.kernel().unwrap().dims().iter().all(|&d| d == 0));
        let z = PerverseMorphism::zero(&CellularPerverseSheaf::zero(a.delta_function().clone()), &a).unwrap();
        assert_eq!(z.cokernel().unwrap(), a);
    }
}
