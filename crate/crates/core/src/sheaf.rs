//! Cellular sheaves and cosheaves on simplicial complexes.
//!
//! A sheaf assigns a vector space `S(σ)` to each open cell and a restriction
//! map `S(σ) → S(τ)` to each codimension-one incidence `σ < τ`. Cochains use
//! the differential `(δF)(τ) = Σ [τ:σ] S_{στ} F(σ)`.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_traits::One;
use rayon::prelude::*;

use crate::complex::{BarycentricSubdivision, SimplicialComplex};
use crate::error::{Error, Result};
use crate::exactla::{rat, GradedComplex, Rational, SparseMatrix};

/// A cellular sheaf. Absent restriction maps are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellularSheaf {
    base: Arc<SimplicialComplex>,
    dims: Vec<usize>,
    maps: BTreeMap<(usize, usize), SparseMatrix>,
}

fn check_pair(base: &SimplicialComplex, sigma: usize, tau: usize) -> Result<()> {
    if sigma >= base.len() || tau >= base.len() || base.incidence_ids(tau, sigma) == 0 {
        return Err(Error::MalformedSheaf(format!(
            "map on ({sigma}, {tau}) is not a codimension-one incidence"
        )));
    }
    Ok(())
}

impl CellularSheaf {
    /// Builds a sheaf and checks shapes and functoriality.
    pub fn new(
        base: impl Into<Arc<SimplicialComplex>>,
        dims: Vec<usize>,
        maps: BTreeMap<(usize, usize), SparseMatrix>,
    ) -> Result<Self> {
        let s = Self::new_unchecked(base, dims, maps)?;
        s.check_functoriality()?;
        Ok(s)
    }

    /// Checks shapes only.
    pub fn new_unchecked(
        base: impl Into<Arc<SimplicialComplex>>,
        dims: Vec<usize>,
        maps: BTreeMap<(usize, usize), SparseMatrix>,
    ) -> Result<Self> {
        let base = base.into();
        if dims.len() != base.len() {
            return Err(Error::MalformedSheaf(format!(
                "{} stalk dimensions for {} simplices",
                dims.len(),
                base.len()
            )));
        }
        for (&(s, t), m) in &maps {
            check_pair(&base, s, t)?;
            if m.shape() != (dims[t], dims[s]) {
                return Err(Error::MalformedSheaf(format!(
                    "restriction {} -> {} has shape {:?}, expected {:?}",
                    base.simplex(s),
                    base.simplex(t),
                    m.shape(),
                    (dims[t], dims[s])
                )));
            }
        }
        let maps = maps.into_iter().filter(|(_, m)| !m.is_zero()).collect();
        Ok(CellularSheaf { base, dims, maps })
    }

    /// Checks that both paths around every codimension-two square agree.
    pub fn check_functoriality(&self) -> Result<()> {
        let k = &*self.base;
        let bad = (0..k.len()).into_par_iter().find_map_first(|s| {
            for &(t1, _) in k.cofacets(s) {
                for &(w, _) in k.cofacets(t1) {
                    // the other intermediate simplex
                    for &(t2, _) in k.facets(w) {
                        if t2 <= t1 || k.incidence_ids(t2, s) == 0 {
                            continue;
                        }
                        let a = self.restriction(t1, w).mul(&self.restriction(s, t1));
                        let b = self.restriction(t2, w).mul(&self.restriction(s, t2));
                        if a != b {
                            return Some((s, w));
                        }
                    }
                }
            }
            None
        });
        match bad {
            Some((s, w)) => Err(Error::MalformedSheaf(format!(
                "restrictions from {} to {} do not commute",
                k.simplex(s),
                k.simplex(w)
            ))),
            None => Ok(()),
        }
    }

    pub fn zero(base: impl Into<Arc<SimplicialComplex>>) -> Self {
        let base = base.into();
        let n = base.len();
        CellularSheaf {
            base,
            dims: vec![0; n],
            maps: BTreeMap::new(),
        }
    }

    /// The constant sheaf `ℚ`.
    pub fn constant(base: impl Into<Arc<SimplicialComplex>>) -> Self {
        let base = base.into();
        let mut maps = BTreeMap::new();
        for t in 0..base.len() {
            for &(s, _) in base.facets(t) {
                maps.insert((s, t), SparseMatrix::identity(1));
            }
        }
        let n = base.len();
        CellularSheaf {
            base,
            dims: vec![1; n],
            maps,
        }
    }

    /// `ℚ_{σ*}`: `ℚ` on every face of σ with identity restrictions, zero elsewhere.
    pub fn elementary_star(base: impl Into<Arc<SimplicialComplex>>, sigma: usize) -> Result<Self> {
        let base = base.into();
        if sigma >= base.len() {
            return Err(Error::InvalidArgument(format!("no simplex with id {sigma}")));
        }
        let faces = base.faces(sigma);
        let mut dims = vec![0; base.len()];
        let mut maps = BTreeMap::new();
        for &t in &faces {
            dims[t] = 1;
            for &(s, _) in base.facets(t) {
                maps.insert((s, t), SparseMatrix::identity(1));
            }
        }
        Ok(CellularSheaf { base, dims, maps })
    }

    /// `ℚ_{σ!}`: `ℚ` on σ only.
    pub fn elementary_shriek(base: impl Into<Arc<SimplicialComplex>>, sigma: usize) -> Result<Self> {
        let base = base.into();
        if sigma >= base.len() {
            return Err(Error::InvalidArgument(format!("no simplex with id {sigma}")));
        }
        let mut dims = vec![0; base.len()];
        dims[sigma] = 1;
        Ok(CellularSheaf {
            base,
            dims,
            maps: BTreeMap::new(),
        })
    }

    pub fn base(&self) -> &SimplicialComplex {
        &self.base
    }

    pub fn base_arc(&self) -> &Arc<SimplicialComplex> {
        &self.base
    }

    pub fn stalk_dim(&self, sigma: usize) -> usize {
        self.dims[sigma]
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Nonzero codimension-one restriction maps keyed by `(σ, τ)`.
    pub fn maps(&self) -> &BTreeMap<(usize, usize), SparseMatrix> {
        &self.maps
    }

    /// Codimension-one restriction `S(σ) → S(τ)`.
    pub fn restriction(&self, sigma: usize, tau: usize) -> SparseMatrix {
        self.maps
            .get(&(sigma, tau))
            .cloned()
            .unwrap_or_else(|| SparseMatrix::zeros(self.dims[tau], self.dims[sigma]))
    }

    /// Restriction along any `σ ≤ τ`, composed through codimension-one steps.
    pub fn restriction_between(&self, sigma: usize, tau: usize) -> SparseMatrix {
        RestrictionCache::new(self).get(sigma, tau)
    }

    pub fn direct_sum(&self, other: &CellularSheaf) -> Result<CellularSheaf> {
        if self.base != other.base {
            return Err(Error::InvalidArgument("sheaves live on different complexes".into()));
        }
        let dims: Vec<usize> = self.dims.iter().zip(&other.dims).map(|(a, b)| a + b).collect();
        let mut maps = BTreeMap::new();
        let keys: std::collections::BTreeSet<_> =
            self.maps.keys().chain(other.maps.keys()).copied().collect();
        for (s, t) in keys {
            let mut m = SparseMatrix::zeros(dims[t], dims[s]);
            m.add_block(0, 0, &self.restriction(s, t));
            m.add_block(self.dims[t], self.dims[s], &other.restriction(s, t));
            maps.insert((s, t), m);
        }
        Ok(CellularSheaf {
            base: self.base.clone(),
            dims,
            maps,
        })
    }

    /// Offsets of each simplex's stalk inside `⊕_{dim σ = r} S(σ)`, and the total per dimension.
    fn cochain_offsets(&self) -> (Vec<usize>, Vec<usize>) {
        let k = &*self.base;
        let mut offset = vec![0; k.len()];
        let mut totals = Vec::new();
        if k.is_empty() {
            return (offset, totals);
        }
        for d in 0..=k.dim() {
            let mut acc = 0;
            for id in k.ids_of_dim(d) {
                offset[id] = acc;
                acc += self.dims[id];
            }
            totals.push(acc);
        }
        (offset, totals)
    }

    /// The cochain complex `C^r = ⊕_{dim σ = r} S(σ)`.
    pub fn cochain_complex(&self) -> Result<GradedComplex> {
        let k = &*self.base;
        let (offset, totals) = self.cochain_offsets();
        if totals.is_empty() {
            return Ok(GradedComplex::zero());
        }
        let mut diffs = Vec::new();
        for r in 0..k.dim() {
            let mut d = SparseMatrix::zeros(totals[r + 1], totals[r]);
            for t in k.ids_of_dim(r + 1) {
                for &(s, sign) in k.facets(t) {
                    if let Some(m) = self.maps.get(&(s, t)) {
                        d.add_block(offset[t], offset[s], &m.scale(&rat(sign as i64)));
                    }
                }
            }
            diffs.push(d);
        }
        GradedComplex::new(0, totals, diffs)
    }

    /// Dimensions of `H^r(K; S)`.
    pub fn cochain_cohomology(&self) -> Result<BTreeMap<i32, usize>> {
        self.check_functoriality()?;
        Ok(self.cochain_complex()?.homology())
    }

    /// `Σ (−1)^{dim σ} dim S(σ)`.
    pub fn euler_characteristic(&self) -> i64 {
        (0..self.base.len())
            .map(|s| {
                let d = self.dims[s] as i64;
                if self.base.simplex_dim(s) % 2 == 0 {
                    d
                } else {
                    -d
                }
            })
            .sum()
    }

    /// Cosheaf with transposed maps on dual stalks.
    pub fn dual_cosheaf(&self) -> CellularCosheaf {
        CellularCosheaf {
            base: self.base.clone(),
            dims: self.dims.clone(),
            maps: self
                .maps
                .iter()
                .map(|(&k, m)| (k, m.transpose()))
                .collect(),
        }
    }

    /// Basis (as columns) of the global sections inside `⊕_ρ S(ρ)`.
    pub fn global_sections(&self) -> SparseMatrix {
        let k = &*self.base;
        let mut offset = vec![0; k.len()];
        let mut total = 0;
        for (i, o) in offset.iter_mut().enumerate() {
            *o = total;
            total += self.dims[i];
        }
        let pairs: Vec<(usize, usize)> = (0..k.len())
            .flat_map(|t| k.facets(t).iter().map(move |&(s, _)| (s, t)))
            .collect();
        let mut row = 0;
        let rows: usize = pairs.iter().map(|&(_, t)| self.dims[t]).sum();
        let mut phi = SparseMatrix::zeros(rows, total);
        for (s, t) in pairs {
            if let Some(m) = self.maps.get(&(s, t)) {
                phi.add_block(row, offset[s], m);
            }
            for i in 0..self.dims[t] {
                phi.add_to(row + i, offset[t] + i, &-Rational::one());
            }
            row += self.dims[t];
        }
        phi.kernel_matrix()
    }
}

/// Memoized restriction maps between arbitrary comparable simplices.
pub(crate) struct RestrictionCache<'a> {
    sheaf: &'a CellularSheaf,
    memo: HashMap<(usize, usize), SparseMatrix>,
}

impl<'a> RestrictionCache<'a> {
    pub(crate) fn new(sheaf: &'a CellularSheaf) -> Self {
        RestrictionCache {
            sheaf,
            memo: HashMap::new(),
        }
    }

    pub(crate) fn get(&mut self, sigma: usize, tau: usize) -> SparseMatrix {
        if sigma == tau {
            return SparseMatrix::identity(self.sheaf.dims[sigma]);
        }
        if let Some(m) = self.memo.get(&(sigma, tau)) {
            return m.clone();
        }
        let k = &*self.sheaf.base;
        assert!(k.is_face(sigma, tau), "restriction needs a face relation");
        // step up through a codimension-one coface of σ that is still a face of τ
        let &(next, _) = k
            .cofacets(sigma)
            .iter()
            .find(|&&(c, _)| k.is_face(c, tau))
            .expect("proper face has a coface below tau");
        let rest = self.get(next, tau);
        let m = rest.mul(&self.sheaf.restriction(sigma, next));
        self.memo.insert((sigma, tau), m.clone());
        m
    }
}

/// A cellular cosheaf: corestriction maps `R(τ) → R(σ)` for `σ < τ` of codimension one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellularCosheaf {
    base: Arc<SimplicialComplex>,
    dims: Vec<usize>,
    maps: BTreeMap<(usize, usize), SparseMatrix>,
}

impl CellularCosheaf {
    /// `maps[(σ, τ)]` has shape `dims[σ] × dims[τ]`.
    pub fn new(
        base: impl Into<Arc<SimplicialComplex>>,
        dims: Vec<usize>,
        maps: BTreeMap<(usize, usize), SparseMatrix>,
    ) -> Result<Self> {
        // a cosheaf is functorial iff its transpose is
        let transposed = maps.iter().map(|(&k, m)| (k, m.transpose())).collect();
        let sheaf = CellularSheaf::new(base, dims, transposed)?;
        Ok(sheaf.dual_cosheaf())
    }

    pub fn constant(base: impl Into<Arc<SimplicialComplex>>) -> Self {
        CellularSheaf::constant(base).dual_cosheaf()
    }

    pub fn base(&self) -> &SimplicialComplex {
        &self.base
    }

    pub fn base_arc(&self) -> &Arc<SimplicialComplex> {
        &self.base
    }

    pub fn stalk_dim(&self, sigma: usize) -> usize {
        self.dims[sigma]
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn maps(&self) -> &BTreeMap<(usize, usize), SparseMatrix> {
        &self.maps
    }

    /// Corestriction `R(τ) → R(σ)`.
    pub fn corestriction(&self, sigma: usize, tau: usize) -> SparseMatrix {
        self.maps
            .get(&(sigma, tau))
            .cloned()
            .unwrap_or_else(|| SparseMatrix::zeros(self.dims[sigma], self.dims[tau]))
    }

    /// Sheaf with transposed maps on dual stalks.
    pub fn dual_sheaf(&self) -> CellularSheaf {
        CellularSheaf {
            base: self.base.clone(),
            dims: self.dims.clone(),
            maps: self.maps.iter().map(|(&k, m)| (k, m.transpose())).collect(),
        }
    }

    /// Chain complex `C_r = ⊕_{dim σ = r} R(σ)` placed in cohomological degree `−r`.
    pub fn chain_complex(&self) -> Result<GradedComplex> {
        let k = &*self.base;
        if k.is_empty() {
            return Ok(GradedComplex::zero());
        }
        let n = k.dim();
        let sheaf = self.dual_sheaf();
        let (offset, totals) = sheaf.cochain_offsets();
        let dims: Vec<usize> = (0..=n).rev().map(|r| totals[r]).collect();
        let mut diffs = Vec::new();
        for r in (1..=n).rev() {
            let mut d = SparseMatrix::zeros(totals[r - 1], totals[r]);
            for t in k.ids_of_dim(r) {
                for &(s, sign) in k.facets(t) {
                    if let Some(m) = self.maps.get(&(s, t)) {
                        d.add_block(offset[s], offset[t], &m.scale(&rat(sign as i64)));
                    }
                }
            }
            diffs.push(d);
        }
        GradedComplex::new(-(n as i32), dims, diffs)
    }

    /// Dimensions of `H_r(K; R)`, keyed by `r ≥ 0`.
    pub fn homology(&self) -> Result<BTreeMap<i32, usize>> {
        let h = self.chain_complex()?.homology();
        Ok(h.into_iter().map(|(r, v)| (-r, v)).collect())
    }
}

/// Mirror of [`CellularSheaf::cochain_cohomology`] for cosheaves.
pub fn cosheaf_homology(r: &CellularCosheaf) -> Result<BTreeMap<i32, usize>> {
    r.homology()
}

/// A bounded complex of sheaves on one base.
///
/// `diffs[k][ρ]` is the stalk map at ρ from term `k` to term `k + 1`.
#[derive(Clone, Debug)]
pub struct SheafComplex {
    lo: i32,
    terms: Vec<CellularSheaf>,
    diffs: Vec<Vec<SparseMatrix>>,
}

impl SheafComplex {
    /// Validates that differentials are sheaf maps and square to zero.
    pub fn new(lo: i32, terms: Vec<CellularSheaf>, diffs: Vec<Vec<SparseMatrix>>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::MalformedInput("sheaf complex without terms".into()));
        }
        if diffs.len() + 1 != terms.len() {
            return Err(Error::MalformedInput("wrong number of differentials".into()));
        }
        let base = terms[0].base_arc().clone();
        if terms.iter().any(|t| *t.base_arc() != base) {
            return Err(Error::MalformedInput("terms on different complexes".into()));
        }
        let c = SheafComplex { lo, terms, diffs };
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<()> {
        let k = self.base();
        for (i, d) in self.diffs.iter().enumerate() {
            let (a, b) = (&self.terms[i], &self.terms[i + 1]);
            if d.len() != k.len() {
                return Err(Error::MalformedInput("differential needs one map per simplex".into()));
            }
            for rho in 0..k.len() {
                if d[rho].shape() != (b.stalk_dim(rho), a.stalk_dim(rho)) {
                    return Err(Error::MalformedInput(format!(
                        "differential {} at {} has the wrong shape",
                        self.lo + i as i32,
                        k.simplex(rho)
                    )));
                }
                for &(tau, _) in k.cofacets(rho) {
                    let lhs = b.restriction(rho, tau).mul(&d[rho]);
                    let rhs = d[tau].mul(&a.restriction(rho, tau));
                    if lhs != rhs {
                        return Err(Error::MalformedMorphism(format!(
                            "differential {} does not commute with restriction {} -> {}",
                            self.lo + i as i32,
                            k.simplex(rho),
                            k.simplex(tau)
                        )));
                    }
                }
                if i + 1 < self.diffs.len() && !self.diffs[i + 1][rho].mul(&d[rho]).is_zero() {
                    return Err(Error::NotAComplex {
                        degree: self.lo + i as i32,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn base(&self) -> &SimplicialComplex {
        self.terms[0].base()
    }

    pub fn lo(&self) -> i32 {
        self.lo
    }

    pub fn hi(&self) -> i32 {
        self.lo + self.terms.len() as i32 - 1
    }

    pub fn term(&self, r: i32) -> Option<&CellularSheaf> {
        if r < self.lo || r > self.hi() {
            None
        } else {
            Some(&self.terms[(r - self.lo) as usize])
        }
    }

    /// Stalk map of the differential leaving degree `r` at simplex ρ.
    pub fn differential(&self, r: i32, rho: usize) -> Option<&SparseMatrix> {
        if r < self.lo || r >= self.hi() {
            None
        } else {
            Some(&self.diffs[(r - self.lo) as usize][rho])
        }
    }

    /// The complex of stalks at ρ.
    pub fn stalk_complex(&self, rho: usize) -> Result<GradedComplex> {
        GradedComplex::new(
            self.lo,
            self.terms.iter().map(|t| t.stalk_dim(rho)).collect(),
            self.diffs.iter().map(|d| d[rho].clone()).collect(),
        )
    }

    /// Cohomology of the complex of global sections.
    ///
    /// This is hypercohomology when every term is injective, as for resolutions
    /// and the dualizing complex.
    pub fn global_section_cohomology(&self) -> Result<BTreeMap<i32, usize>> {
        let k = self.base();
        let sections: Vec<SparseMatrix> = self.terms.par_iter().map(|t| t.global_sections()).collect();
        let images: Vec<usize> = self
            .diffs
            .par_iter()
            .enumerate()
            .map(|(i, d)| {
                let a = &self.terms[i];
                let b = &self.terms[i + 1];
                let mut block = SparseMatrix::zeros(
                    b.dims().iter().sum(),
                    a.dims().iter().sum(),
                );
                let (mut ro, mut co) = (0, 0);
                for (rho, m) in d.iter().enumerate().take(k.len()) {
                    block.add_block(ro, co, m);
                    ro += b.stalk_dim(rho);
                    co += a.stalk_dim(rho);
                }
                block.mul(&sections[i]).rank()
            })
            .collect();
        let mut out = BTreeMap::new();
        for (i, g) in sections.iter().enumerate() {
            let out_rank = images.get(i).copied().unwrap_or(0);
            let in_rank = if i == 0 { 0 } else { images[i - 1] };
            out.insert(self.lo + i as i32, g.cols() - out_rank - in_rank);
        }
        Ok(out)
    }
}

/// The canonical injective resolution `A → I⁰ → I¹ → ⋯`.
///
/// `I^k` is indexed by strict flags `F` of `k+1` simplices, with summand
/// `A(max F) ⊗ ℚ_{min F *}`. The differential from `F` to `G = F ∪ {x}` is
/// `(−1)^j` times the restriction `A(max F) → A(max G)`, where `j` is the
/// position of `x` in `G`, listed in increasing order.
#[derive(Clone, Debug)]
pub struct InjectiveResolution {
    sheaf: CellularSheaf,
    subdivision: BarycentricSubdivision,
    complex: SheafComplex,
    augmentation: Vec<SparseMatrix>,
}

impl InjectiveResolution {
    pub fn complex(&self) -> &SheafComplex {
        &self.complex
    }

    pub fn subdivision(&self) -> &BarycentricSubdivision {
        &self.subdivision
    }

    /// Stalk map `A(ρ) → I⁰(ρ)`.
    pub fn augmentation(&self, rho: usize) -> &SparseMatrix {
        &self.augmentation[rho]
    }

    /// Whether `0 → A(ρ) → I⁰(ρ) → I¹(ρ) → ⋯` is exact at every ρ.
    pub fn is_exact(&self) -> bool {
        let k = self.sheaf.base();
        (0..k.len()).into_par_iter().all(|rho| {
            let mut dims = vec![self.sheaf.stalk_dim(rho)];
            let mut diffs = vec![self.augmentation[rho].clone()];
            for r in self.complex.lo()..=self.complex.hi() {
                dims.push(self.complex.term(r).expect("in range").stalk_dim(rho));
                if let Some(d) = self.complex.differential(r, rho) {
                    diffs.push(d.clone());
                }
            }
            match GradedComplex::new(-1, dims, diffs) {
                Ok(c) => c.homology().values().all(|&h| h == 0),
                Err(_) => false,
            }
        })
    }

    /// `Γ(K; I•)`, which equals the simplicial cochains of the subdivided sheaf.
    pub fn global_sections(&self) -> Result<GradedComplex> {
        subdivide_sheaf(&self.sheaf, &self.subdivision).cochain_complex()
    }

    /// Dimensions of `Γ(K; I^k)`.
    pub fn global_section_dims(&self) -> Vec<usize> {
        let sd = self.subdivision.subdivided();
        (0..=sd.dim())
            .map(|k| sd.ids_of_dim(k).map(|f| self.sheaf.stalk_dim(self.subdivision.open_cell(f))).sum())
            .collect()
    }
}

pub fn canonical_injective_resolution(a: &CellularSheaf) -> Result<InjectiveResolution> {
    a.check_functoriality()?;
    let k = a.base_arc().clone();
    let sd = crate::complex::barycentric(&k);
    let flags = sd.subdivided();
    let mut cache = RestrictionCache::new(a);
    let top = if k.is_empty() { 0 } else { k.dim() };

    // stalk of I^j at ρ: flags of dimension j whose minimum lies above ρ
    let mut members: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); k.len()]; top + 1];
    let mut offset_of: Vec<Vec<HashMap<usize, usize>>> = vec![vec![HashMap::new(); k.len()]; top + 1];
    let mut stalk_dims: Vec<Vec<usize>> = vec![vec![0; k.len()]; top + 1];
    for j in 0..=top {
        for f in flags.ids_of_dim(j) {
            let carrier = sd.carrier(f);
            let (lo, hi) = (carrier[0], *carrier.last().expect("nonempty"));
            for rho in k.faces(lo) {
                offset_of[j][rho].insert(f, stalk_dims[j][rho]);
                stalk_dims[j][rho] += a.stalk_dim(hi);
                members[j][rho].push(f);
            }
        }
    }

    let mut terms = Vec::new();
    for j in 0..=top {
        let mut maps = BTreeMap::new();
        for tau in 0..k.len() {
            for &(rho, _) in k.facets(tau) {
                let mut m = SparseMatrix::zeros(stalk_dims[j][tau], stalk_dims[j][rho]);
                for &f in &members[j][tau] {
                    let d = a.stalk_dim(sd.open_cell(f));
                    let (r0, c0) = (offset_of[j][tau][&f], offset_of[j][rho][&f]);
                    for i in 0..d {
                        m.set(r0 + i, c0 + i, Rational::one());
                    }
                }
                maps.insert((rho, tau), m);
            }
        }
        terms.push(CellularSheaf::new_unchecked(k.clone(), stalk_dims[j].clone(), maps)?);
    }

    let mut diffs = Vec::new();
    for j in 0..top {
        let mut per = Vec::with_capacity(k.len());
        for rho in 0..k.len() {
            let mut m = SparseMatrix::zeros(stalk_dims[j + 1][rho], stalk_dims[j][rho]);
            for &g in &members[j + 1][rho] {
                let g_top = sd.open_cell(g);
                for &(f, sign) in flags.facets(g) {
                    let f_top = sd.open_cell(f);
                    let block = cache.get(f_top, g_top).scale(&rat(sign as i64));
                    m.add_block(offset_of[j + 1][rho][&g], offset_of[j][rho][&f], &block);
                }
            }
            per.push(m);
        }
        diffs.push(per);
    }

    let mut augmentation = Vec::with_capacity(k.len());
    for rho in 0..k.len() {
        let mut m = SparseMatrix::zeros(stalk_dims[0][rho], a.stalk_dim(rho));
        for &f in &members[0][rho] {
            let sigma = sd.open_cell(f);
            m.add_block(offset_of[0][rho][&f], 0, &cache.get(rho, sigma));
        }
        augmentation.push(m);
    }

    let complex = SheafComplex::new(0, terms, diffs)?;
    Ok(InjectiveResolution {
        sheaf: a.clone(),
        subdivision: sd,
        complex,
        augmentation,
    })
}

/// `dim Hom(A, B)`, computed directly as compatible families of stalk maps.
pub fn hom_dim(a: &CellularSheaf, b: &CellularSheaf) -> Result<usize> {
    if a.base_arc() != b.base_arc() {
        return Err(Error::InvalidArgument("sheaves live on different complexes".into()));
    }
    let k = a.base();
    let mut offset = vec![0; k.len()];
    let mut total = 0;
    for (rho, o) in offset.iter_mut().enumerate() {
        *o = total;
        total += a.stalk_dim(rho) * b.stalk_dim(rho);
    }
    let mut blocks = Vec::new();
    let mut rows = 0;
    for tau in 0..k.len() {
        for &(rho, _) in k.facets(tau) {
            // f ↦ B_{ρτ} f_ρ − f_τ A_{ρτ}, landing in Hom(A(ρ), B(τ))
            let left = SparseMatrix::sandwich_operator(
                &b.restriction(rho, tau),
                &SparseMatrix::identity(a.stalk_dim(rho)),
            );
            let right = SparseMatrix::sandwich_operator(
                &SparseMatrix::identity(b.stalk_dim(tau)),
                &a.restriction(rho, tau),
            );
            blocks.push((rows, rho, tau, left, right));
            rows += b.stalk_dim(tau) * a.stalk_dim(rho);
        }
    }
    let mut phi = SparseMatrix::zeros(rows, total);
    for (r0, rho, tau, left, right) in blocks {
        phi.add_block(r0, offset[rho], &left);
        phi.add_block(r0, offset[tau], &right.neg());
    }
    Ok(total - phi.rank())
}

/// `Ext^i(A, B)`, from `Hom(A, I•(B))` with `I•` the canonical resolution of `B`.
///
/// Uses `Hom(A, V ⊗ ℚ_{τ*}) = Hom(A(τ), V)`, so degree `k` is
/// `⊕_F Hom(A(min F), B(max F))` over flags with `k+1` elements.
pub fn ext_groups(a: &CellularSheaf, b: &CellularSheaf) -> Result<BTreeMap<i32, usize>> {
    Ok(ext_complex(a, b)?.homology())
}

/// The cochain complex computing [`ext_groups`].
pub fn ext_complex(a: &CellularSheaf, b: &CellularSheaf) -> Result<GradedComplex> {
    if a.base_arc() != b.base_arc() {
        return Err(Error::InvalidArgument("sheaves live on different complexes".into()));
    }
    a.check_functoriality()?;
    b.check_functoriality()?;
    let k = a.base();
    if k.is_empty() {
        return Ok(GradedComplex::zero());
    }
    let sd = crate::complex::barycentric(k);
    let flags = sd.subdivided();
    let top = k.dim();
    let mut ca = RestrictionCache::new(a);
    let mut cb = RestrictionCache::new(b);

    let ends = |f: usize| {
        let c = sd.carrier(f);
        (c[0], *c.last().expect("nonempty"))
    };
    let mut offset = vec![0; flags.len()];
    let mut dims = Vec::new();
    for j in 0..=top {
        let mut acc = 0;
        for f in flags.ids_of_dim(j) {
            offset[f] = acc;
            let (lo, hi) = ends(f);
            acc += a.stalk_dim(lo) * b.stalk_dim(hi);
        }
        dims.push(acc);
    }
    let mut diffs = Vec::new();
    for j in 0..top {
        let mut d = SparseMatrix::zeros(dims[j + 1], dims[j]);
        for g in flags.ids_of_dim(j + 1) {
            let (g_lo, g_hi) = ends(g);
            for &(f, sign) in flags.facets(g) {
                let (f_lo, f_hi) = ends(f);
                let p = cb.get(f_hi, g_hi);
                let q = ca.get(g_lo, f_lo);
                let op = SparseMatrix::sandwich_operator(&p, &q).scale(&rat(sign as i64));
                d.add_block(offset[g], offset[f], &op);
            }
        }
        diffs.push(d);
    }
    GradedComplex::new(0, dims, diffs)
}

/// The dualizing complex `𝔻^{−j} = ⊕_{dim σ = j} ℚ_{σ*}` with differential `⊕ [τ:σ] ∂_{τσ}`.
pub fn dualizing_complex(k: impl Into<Arc<SimplicialComplex>>) -> Result<SheafComplex> {
    let k: Arc<SimplicialComplex> = k.into();
    if k.is_empty() {
        return Err(Error::InvalidArgument("empty complex".into()));
    }
    let n = k.dim();
    // summand ℚ_{σ*} contributes to the stalk at every face ρ of σ
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); k.len()];
    for sigma in 0..k.len() {
        for rho in k.faces(sigma) {
            members[rho].push(sigma);
        }
    }
    let pos = |rho: usize, sigma: usize, members: &Vec<Vec<usize>>| -> usize {
        let d = k.simplex_dim(sigma);
        members[rho]
            .iter()
            .filter(|&&s| k.simplex_dim(s) == d)
            .position(|&s| s == sigma)
            .expect("member")
    };
    let dim_at = |rho: usize, j: usize, members: &Vec<Vec<usize>>| {
        members[rho].iter().filter(|&&s| k.simplex_dim(s) == j).count()
    };

    let mut terms = Vec::new();
    for j in (0..=n).rev() {
        let dims: Vec<usize> = (0..k.len()).map(|rho| dim_at(rho, j, &members)).collect();
        let mut maps = BTreeMap::new();
        for tau in 0..k.len() {
            for &(rho, _) in k.facets(tau) {
                let mut m = SparseMatrix::zeros(dims[tau], dims[rho]);
                for &sigma in &members[tau] {
                    if k.simplex_dim(sigma) == j {
                        m.set(pos(tau, sigma, &members), pos(rho, sigma, &members), Rational::one());
                    }
                }
                maps.insert((rho, tau), m);
            }
        }
        terms.push(CellularSheaf::new_unchecked(k.clone(), dims, maps)?);
    }

    let mut diffs = Vec::new();
    for j in (1..=n).rev() {
        let mut per = Vec::new();
        for rho in 0..k.len() {
            let mut m = SparseMatrix::zeros(dim_at(rho, j - 1, &members), dim_at(rho, j, &members));
            for &tau in &members[rho] {
                if k.simplex_dim(tau) != j {
                    continue;
                }
                for &(sigma, sign) in k.facets(tau) {
                    if k.is_face(rho, sigma) {
                        m.set(
                            pos(rho, sigma, &members),
                            pos(rho, tau, &members),
                            rat(sign as i64),
                        );
                    }
                }
            }
            per.push(m);
        }
        diffs.push(per);
    }
    SheafComplex::new(-(n as i32), terms, diffs)
}

/// Pulls a sheaf back to the barycentric subdivision.
///
/// The stalk on a flag is the stalk of its top simplex. Extending a flag at
/// the top restricts along `A`; extending it below the top is the identity.
pub fn subdivide_sheaf(a: &CellularSheaf, sd: &BarycentricSubdivision) -> CellularSheaf {
    assert!(sd.base() == a.base(), "subdivision of a different complex");
    let flags = sd.subdivided();
    let mut cache = RestrictionCache::new(a);
    let dims: Vec<usize> = (0..flags.len()).map(|f| a.stalk_dim(sd.open_cell(f))).collect();
    let mut maps = BTreeMap::new();
    for g in 0..flags.len() {
        let g_top = sd.open_cell(g);
        for &(f, _) in flags.facets(g) {
            let f_top = sd.open_cell(f);
            let m = cache.get(f_top, g_top);
            if !m.is_zero() {
                maps.insert((f, g), m);
            }
        }
    }
    CellularSheaf {
        base: Arc::new(flags.clone()),
        dims,
        maps,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{simplex, sphere, torus};

    fn h(v: &[(i32, usize)]) -> BTreeMap<i32, usize> {
        v.iter().copied().collect()
    }

    #[test]
    fn interior_of_triangle() {
        let k = simplex(2);
        let top = k.id_of(&[0, 1, 2]).unwrap();
        let s = CellularSheaf::elementary_shriek(k, top).unwrap();
        assert_eq!(s.cochain_cohomology().unwrap(), h(&[(0, 0), (1, 0), (2, 1)]));
    }

    #[test]
    fn constant_sheaves() {
        assert_eq!(
            CellularSheaf::constant(sphere(2)).cochain_cohomology().unwrap(),
            h(&[(0, 1), (1, 0), (2, 1)])
        );
        let c = CellularSheaf::constant(simplex(3)).cochain_cohomology().unwrap();
        assert_eq!(c, h(&[(0, 1), (1, 0), (2, 0), (3, 0)]));
    }

    #[test]
    fn cosheaf_homology_examples() {
        let t = CellularCosheaf::constant(torus(2));
        assert_eq!(t.homology().unwrap(), h(&[(0, 1), (1, 2), (2, 1)]));
        let s = CellularCosheaf::constant(sphere(2));
        assert_eq!(cosheaf_homology(&s).unwrap(), h(&[(0, 1), (1, 0), (2, 1)]));
    }

    #[test]
    fn rejects_noncommuting_maps() {
        let k = Arc::new(simplex(2));
        let mut maps = CellularSheaf::constant(k.clone()).maps().clone();
        let e = k.id_of(&[0, 1]).unwrap();
        let t = k.id_of(&[0, 1, 2]).unwrap();
        maps.insert((e, t), SparseMatrix::from_i64(&[&[2]]));
        let err = CellularSheaf::new(k, vec![1; 7], maps).unwrap_err();
        assert!(matches!(err, Error::MalformedSheaf(_)));
    }

    #[test]
    fn resolution_of_point() {
        let k = simplex(0);
        let res = canonical_injective_resolution(&CellularSheaf::constant(k)).unwrap();
        assert_eq!(res.complex().lo(), 0);
        assert_eq!(res.complex().hi(), 0);
        assert!(res.is_exact());
    }

    #[test]
    fn resolution_exact_on_triangle() {
        let a = CellularSheaf::constant(simplex(2));
        let res = canonical_injective_resolution(&a).unwrap();
        assert!(res.is_exact());
        assert_eq!(res.global_section_dims(), vec![7, 12, 6]);
        assert_eq!(
            res.global_sections().unwrap().homology(),
            a.cochain_cohomology().unwrap()
        );
    }

    #[test]
    fn ext_of_elementary_sheaves_on_edge() {
        let k = Arc::new(simplex(1));
        let v = k.id_of(&[0]).unwrap();
        let e = k.id_of(&[0, 1]).unwrap();
        let ext = ext_groups(
            &CellularSheaf::elementary_shriek(k.clone(), v).unwrap(),
            &CellularSheaf::elementary_shriek(k.clone(), e).unwrap(),
        )
        .unwrap();
        assert_eq!(ext, h(&[(0, 0), (1, 1)]));
        let hom = hom_dim(
            &CellularSheaf::elementary_star(k.clone(), e).unwrap(),
            &CellularSheaf::elementary_star(k.clone(), v).unwrap(),
        )
        .unwrap();
        assert_eq!(hom, 1);
    }

    #[test]
    fn dualizing_complex_gives_homology() {
        let d = dualizing_complex(sphere(2)).unwrap();
        let hc = d.global_section_cohomology().unwrap();
        assert_eq!(hc, h(&[(-2, 1), (-1, 0), (0, 1)]));
    }

    #[test]
    fn subdivision_preserves_cohomology() {
        let k = simplex(2);
        let e = k.id_of(&[1, 2]).unwrap();
        let a = CellularSheaf::elementary_shriek(k.clone(), e).unwrap();
        let sd = crate::complex::barycentric(&k);
        let sub = subdivide_sheaf(&a, &sd);
        assert!(sub.check_functoriality().is_ok());
        assert_eq!(sub.cochain_cohomology().unwrap()[&1], 1);
    }
}
