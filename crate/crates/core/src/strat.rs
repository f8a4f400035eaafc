//! Stratified pseudomanifolds, GM perversities and intersection homology.
//!
//! Chain (homological) indexing throughout: `IH_i` for `0 ≤ i ≤ n`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::complex::{barycentric, SimplicialComplex};
use crate::error::{Error, Result};
use crate::exactla::SparseMatrix;

/// A GM perversity `(p_2, p_3, …, p_n)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GMPerversity {
    values: Vec<usize>,
}

impl GMPerversity {
    /// `values[k]` is `p_{k+2}`.
    pub fn new(values: Vec<usize>) -> Result<Self> {
        if let Some(&first) = values.first() {
            if first != 0 {
                return Err(Error::InvalidParameter(format!("p_2 must be 0, got {first}")));
            }
        }
        for (k, w) in values.windows(2).enumerate() {
            if w[1] != w[0] && w[1] != w[0] + 1 {
                return Err(Error::InvalidParameter(format!(
                    "p_{} = {} must equal p_{} or p_{} + 1",
                    k + 3,
                    w[1],
                    k + 2,
                    k + 2
                )));
            }
        }
        Ok(GMPerversity { values })
    }

    /// The zero perversity for dimension `n`.
    pub fn zero(n: usize) -> Self {
        GMPerversity {
            values: vec![0; n.saturating_sub(1)],
        }
    }

    /// The top perversity `t_c = c − 2`.
    pub fn top(n: usize) -> Self {
        GMPerversity {
            values: (2..=n).map(|c| c - 2).collect(),
        }
    }

    /// Lower middle perversity `⌊(c−2)/2⌋`.
    pub fn lower_middle(n: usize) -> Self {
        GMPerversity {
            values: (2..=n).map(|c| (c - 2) / 2).collect(),
        }
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    /// Largest codimension covered.
    pub fn max_codim(&self) -> usize {
        self.values.len() + 1
    }

    /// `p_c`; codimensions beyond the stored range continue the last value.
    pub fn p(&self, c: usize) -> usize {
        if c < 2 || self.values.is_empty() {
            return 0;
        }
        let k = (c - 2).min(self.values.len() - 1);
        self.values[k]
    }

    /// `t − p`.
    pub fn complement(&self) -> GMPerversity {
        GMPerversity {
            values: self.values.iter().enumerate().map(|(k, &v)| k - v).collect(),
        }
    }

    /// Componentwise `self ≤ other`.
    pub fn le(&self, other: &GMPerversity) -> bool {
        self.values.len() == other.values.len()
            && self.values.iter().zip(&other.values).all(|(a, b)| a <= b)
    }
}

impl fmt::Display for GMPerversity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.values.iter().map(|v| v.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// A single failed stratification check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub message: String,
    pub remedy: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DiagnosticKind {
    NotPure,
    TwoCoface,
    NotFull,
    SingularDimension,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}: {}", self.kind, self.message)?;
        if let Some(r) = &self.remedy {
            write!(f, " (remedy: {r})")?;
        }
        Ok(())
    }
}

/// A pure `n`-dimensional complex with a closed filtration `X_{n−2} ⊇ X_{n−3} ⊇ ⋯ ⊇ X_0`.
#[derive(Clone, Debug)]
pub struct StratifiedComplex {
    complex: Arc<SimplicialComplex>,
    n: usize,
    /// `members[c]` is the id set of `X_{n−c}` for `2 ≤ c ≤ n`.
    members: BTreeMap<usize, BTreeSet<usize>>,
    vertex_codim: Vec<usize>,
    allow_boundary: bool,
}

impl StratifiedComplex {
    /// `levels[c]` lists maximal simplices of the codimension-`c` level.
    /// `X_{n−c}` is the closure of all levels of codimension `≥ c`.
    pub fn new(
        complex: impl Into<Arc<SimplicialComplex>>,
        levels: &BTreeMap<usize, Vec<Vec<usize>>>,
    ) -> Result<Self> {
        let complex = complex.into();
        let n = complex.dim();
        let mut given: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (&c, simplices) in levels {
            if c < 2 || c > n {
                return Err(Error::MalformedInput(format!(
                    "codimension {c} outside 2..={n}"
                )));
            }
            for s in simplices {
                let id = complex.id_of(s).ok_or_else(|| {
                    Error::MalformedInput(format!("filtration simplex {s:?} is not in the complex"))
                })?;
                given.entry(c).or_default().push(id);
            }
        }
        let mut members = BTreeMap::new();
        for c in 2..=n {
            let mut set = BTreeSet::new();
            for (_, ids) in given.range(c..) {
                for &id in ids {
                    set.extend(complex.faces(id));
                }
            }
            members.insert(c, set);
        }
        let mut vertex_codim = vec![0; complex.vertex_count()];
        for (&c, set) in &members {
            for &id in set {
                if complex.simplex_dim(id) == 0 {
                    let v = complex.simplex(id).vertices()[0];
                    vertex_codim[v] = vertex_codim[v].max(c);
                }
            }
        }
        Ok(StratifiedComplex {
            complex,
            n,
            members,
            vertex_codim,
            allow_boundary: false,
        })
    }

    /// A complex with no singular strata.
    pub fn manifold(complex: impl Into<Arc<SimplicialComplex>>) -> Self {
        Self::new(complex, &BTreeMap::new()).expect("empty filtration")
    }

    /// Permit `(n−1)`-simplices with a single coface (a manifold boundary).
    pub fn with_boundary(mut self, allow: bool) -> Self {
        self.allow_boundary = allow;
        self
    }

    pub fn allows_boundary(&self) -> bool {
        self.allow_boundary
    }

    pub fn complex(&self) -> &SimplicialComplex {
        &self.complex
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Ids of `X_{n−c}`.
    pub fn stratum_closure(&self, c: usize) -> Option<&BTreeSet<usize>> {
        self.members.get(&c)
    }

    pub fn vertex_codim(&self, v: usize) -> usize {
        self.vertex_codim[v]
    }

    /// Codimension of the smallest filtration member containing the simplex; 0 if none.
    pub fn codim(&self, id: usize) -> usize {
        self.members
            .iter()
            .rev()
            .find(|(_, set)| set.contains(&id))
            .map_or(0, |(&c, _)| c)
    }

    /// Levels as maximal simplices, in the input format.
    pub fn levels(&self) -> BTreeMap<usize, Vec<Vec<usize>>> {
        let mut out = BTreeMap::new();
        for (&c, set) in &self.members {
            // simplices of exact codimension c that are maximal in X_{n−c}
            let maximal: Vec<Vec<usize>> = set
                .iter()
                .copied()
                .filter(|&id| {
                    self.codim(id) == c
                        && !set
                            .iter()
                            .any(|&o| o != id && self.complex.is_face(id, o))
                })
                .map(|id| self.complex.simplex(id).vertices().to_vec())
                .collect();
            if !maximal.is_empty() {
                out.insert(c, maximal);
            }
        }
        out
    }

    pub fn validate(&self) -> Vec<Diagnostic> {
        let k = &*self.complex;
        let n = self.n;
        let mut out = Vec::new();
        if k.is_empty() {
            out.push(Diagnostic {
                kind: DiagnosticKind::NotPure,
                message: "empty complex".into(),
                remedy: None,
            });
            return out;
        }
        for id in 0..k.len() {
            if k.simplex_dim(id) < n && k.cofacets(id).is_empty() {
                out.push(Diagnostic {
                    kind: DiagnosticKind::NotPure,
                    message: format!("maximal simplex {} has dimension below {n}", k.simplex(id)),
                    remedy: None,
                });
            }
        }
        if n >= 1 {
            for id in k.ids_of_dim(n - 1) {
                let cof = k.cofacets(id).len();
                let ok = cof == 2 || (self.allow_boundary && cof == 1);
                if !ok {
                    out.push(Diagnostic {
                        kind: DiagnosticKind::TwoCoface,
                        message: format!("{} is a face of {cof} top simplices, expected 2", k.simplex(id)),
                        remedy: None,
                    });
                }
            }
        }
        for (&c, set) in &self.members {
            if let Some(&bad) = set.iter().find(|&&id| k.simplex_dim(id) + c > n) {
                out.push(Diagnostic {
                    kind: DiagnosticKind::SingularDimension,
                    message: format!(
                        "X_{} contains {} of dimension {}",
                        n - c,
                        k.simplex(bad),
                        k.simplex_dim(bad)
                    ),
                    remedy: None,
                });
            }
            for id in 0..k.len() {
                if set.contains(&id) {
                    continue;
                }
                if k.simplex(id).vertices().iter().all(|&v| self.vertex_codim[v] >= c) {
                    out.push(Diagnostic {
                        kind: DiagnosticKind::NotFull,
                        message: format!(
                            "X_{} is not full: {} has all vertices in it but is missing",
                            n - c,
                            k.simplex(id)
                        ),
                        remedy: Some("apply barycentric subdivision".into()),
                    });
                }
            }
        }
        out
    }

    fn require_valid(&self) -> Result<()> {
        let diags = self.validate();
        if diags.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidStratification(diags))
        }
    }

    /// Barycentric subdivision; the barycenter of σ lies in `X_{n−c}` iff σ does.
    pub fn subdivide(&self) -> StratifiedComplex {
        let sd = barycentric(&self.complex);
        let flags = sd.subdivided();
        let mut members = BTreeMap::new();
        for (&c, set) in &self.members {
            let sub: BTreeSet<usize> = (0..flags.len())
                .filter(|&f| sd.carrier(f).iter().all(|s| set.contains(s)))
                .collect();
            members.insert(c, sub);
        }
        let vertex_codim = (0..self.complex.len()).map(|s| self.codim(s)).collect();
        StratifiedComplex {
            complex: Arc::new(flags.clone()),
            n: self.n,
            members,
            vertex_codim,
            allow_boundary: self.allow_boundary,
        }
    }

    fn is_allowable(&self, id: usize, p: &GMPerversity) -> bool {
        let verts = self.complex.simplex(id).vertices();
        let i = verts.len() as i64 - 1;
        for c in 2..=self.n {
            let count = verts.iter().filter(|&&v| self.vertex_codim[v] >= c).count() as i64;
            if count > 0 && count - 1 > i - c as i64 + p.p(c) as i64 {
                return false;
            }
        }
        true
    }

    fn check_perversity(&self, p: &GMPerversity) -> Result<()> {
        if self.n >= 2 && p.max_codim() != self.n {
            return Err(Error::InvalidParameter(format!(
                "perversity {p} covers codimensions up to {}, complex has dimension {}",
                p.max_codim(),
                self.n
            )));
        }
        Ok(())
    }
}

/// Ids of the allowable `i`-simplices.
pub fn allowable_simplices(s: &StratifiedComplex, p: &GMPerversity, i: usize) -> Vec<usize> {
    s.complex
        .ids_of_dim(i)
        .filter(|&id| s.is_allowable(id, p))
        .collect()
}

/// Local position of each `i`-simplex among allowable ones, if allowable.
fn allowable_mask(s: &StratifiedComplex, p: &GMPerversity, i: usize) -> Vec<bool> {
    s.complex.ids_of_dim(i).map(|id| s.is_allowable(id, p)).collect()
}

/// Intersection Betti numbers `IH_0 … IH_n`.
///
/// With `A_i` the allowable `i`-simplices and `P` the projection onto
/// non-allowable `(i−1)`-simplices,
/// `IH_i = |A_i| − rk ∂A_i − rk ∂A_{i+1} + rk P∂A_{i+1}`.
pub fn ih_betti(s: &StratifiedComplex, p: &GMPerversity) -> Result<Vec<usize>> {
    s.require_valid()?;
    s.check_perversity(p)?;
    let n = s.n;
    let k = &*s.complex;
    let masks: Vec<Vec<bool>> = (0..=n).map(|i| allowable_mask(s, p, i)).collect();
    // (rank ∂A_i, rank P∂A_i) for i = 1..=n
    let ranks: Vec<(usize, usize)> = (0..=n)
        .into_par_iter()
        .map(|i| {
            if i == 0 {
                return (0, 0);
            }
            let cols: Vec<usize> = (0..masks[i].len()).filter(|&c| masks[i][c]).collect();
            let b = k.boundary_matrix(i).select_columns(&cols);
            let bad_rows: Vec<usize> = (0..masks[i - 1].len()).filter(|&r| !masks[i - 1][r]).collect();
            let pb = b.select_rows(&bad_rows);
            (b.rank(), pb.rank())
        })
        .collect();
    Ok((0..=n)
        .map(|i| {
            let a = masks[i].iter().filter(|&&m| m).count();
            let (r_in, _) = ranks[i];
            let (r_out, pr_out) = if i < n { ranks[i + 1] } else { (0, 0) };
            a + pr_out - r_in - r_out
        })
        .collect())
}

/// Intersection chains as explicit subspaces of the simplicial chains.
#[derive(Clone, Debug)]
pub struct AllowableComplex {
    /// Columns span `IC_i` inside `C_i`.
    pub ic_basis: Vec<SparseMatrix>,
    pub allowable: Vec<Vec<usize>>,
    boundaries: Vec<SparseMatrix>,
}

impl AllowableComplex {
    pub fn build(s: &StratifiedComplex, p: &GMPerversity) -> Result<Self> {
        s.require_valid()?;
        s.check_perversity(p)?;
        let n = s.n;
        let k = &*s.complex;
        let masks: Vec<Vec<bool>> = (0..=n).map(|i| allowable_mask(s, p, i)).collect();
        let boundaries: Vec<SparseMatrix> = (0..=n).map(|i| k.boundary_matrix(i)).collect();
        let ic_basis: Vec<SparseMatrix> = (0..=n)
            .into_par_iter()
            .map(|i| {
                let cols: Vec<usize> = (0..masks[i].len()).filter(|&c| masks[i][c]).collect();
                let inclusion = SparseMatrix::identity(masks[i].len()).select_columns(&cols);
                if i == 0 {
                    return inclusion;
                }
                let bad_rows: Vec<usize> =
                    (0..masks[i - 1].len()).filter(|&r| !masks[i - 1][r]).collect();
                let pb = boundaries[i].mul(&inclusion).select_rows(&bad_rows);
                inclusion.mul(&pb.kernel_matrix())
            })
            .collect();
        let allowable = (0..=n)
            .map(|i| {
                s.complex
                    .ids_of_dim(i)
                    .filter(|&id| masks[i][id - s.complex.ids_of_dim(i).start])
                    .collect()
            })
            .collect();
        Ok(AllowableComplex {
            ic_basis,
            allowable,
            boundaries,
        })
    }

    /// Checks `∂(IC_i) ⊆ IC_{i−1}`.
    pub fn boundary_closed(&self) -> bool {
        (1..self.ic_basis.len()).all(|i| {
            let image = self.boundaries[i].mul(&self.ic_basis[i]);
            self.ic_basis[i - 1].spans(&image)
        })
    }

    pub fn homology(&self) -> Vec<usize> {
        let n = self.ic_basis.len() - 1;
        let ranks: Vec<usize> = (0..=n)
            .into_par_iter()
            .map(|i| if i == 0 { 0 } else { self.boundaries[i].mul(&self.ic_basis[i]).rank() })
            .collect();
        (0..=n)
            .map(|i| {
                let out = if i < n { ranks[i + 1] } else { 0 };
                self.ic_basis[i].cols() - ranks[i] - out
            })
            .collect()
    }

    /// Whether every `IC_i` of `self` lies inside the corresponding space of `other`.
    pub fn contained_in(&self, other: &AllowableComplex) -> bool {
        self.ic_basis
            .iter()
            .zip(&other.ic_basis)
            .all(|(a, b)| b.spans(a))
    }
}

/// Local intersection homology near a point of a codimension-`c` stratum,
/// predicted from the Betti numbers of its link.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConePrediction {
    /// Compactly supported `IH_i` of `ℝ^{n−c} × open cone(L)`, for `0 ≤ i ≤ n`.
    pub compact: Vec<usize>,
    /// Stalk (local) `IH_i`, for `0 ≤ i ≤ n`.
    pub stalk: Vec<usize>,
}

/// Cone formula. With `L` the link (dimension `c − 1`):
/// compact `IH_i = IH_{i−n+c}(L)` when `i − n + c < c − 1 − p_c`, else 0;
/// stalk `IH_i = IH_{i−n+c−1}(L)` when `i ≥ n − p_c`, else 0.
pub fn cone_formula(link_betti: &[usize], n: usize, c: usize, p: &GMPerversity) -> ConePrediction {
    let pc = p.p(c) as i64;
    let link = |j: i64| -> usize {
        if j < 0 {
            0
        } else {
            link_betti.get(j as usize).copied().unwrap_or(0)
        }
    };
    let (n, c) = (n as i64, c as i64);
    let compact = (0..=n)
        .map(|i| {
            let j = i - n + c;
            if j >= 0 && j < c - 1 - pc {
                link(j)
            } else {
                0
            }
        })
        .collect();
    let stalk = (0..=n)
        .map(|i| if i >= n - pc { link(i - n + c - 1) } else { 0 })
        .collect();
    ConePrediction { compact, stalk }
}

/// Independent evaluation for complexes whose singular set is a set of
/// isolated vertices of codimension `n`.
///
/// With `A` the subcomplex avoiding the singular vertices and `m = n − 1 − p_n`:
/// `IH_i = H_i(A)` for `i < m`, the image of `H_i(A) → H_i(X)` for `i = m`,
/// and `H_i(X)` for `i > m`.
pub fn isolated_singularity_oracle(s: &StratifiedComplex, p: &GMPerversity) -> Result<Vec<usize>> {
    s.require_valid()?;
    s.check_perversity(p)?;
    let k = &*s.complex;
    let n = s.n;
    let singular: Vec<usize> = (0..k.vertex_count()).filter(|&v| s.vertex_codim[v] > 0).collect();
    let isolated = (0..k.len())
        .filter(|&id| s.codim(id) > 0)
        .all(|id| k.simplex_dim(id) == 0 && s.codim(id) == n);
    if !isolated {
        return Err(Error::Unsupported(
            "oracle needs a singular set of isolated codimension-n vertices".into(),
        ));
    }
    let regular: Vec<usize> = (0..k.len())
        .filter(|&id| !k.simplex(id).vertices().iter().any(|v| singular.contains(v)))
        .collect();
    let a = k.subcomplex(&regular)?;
    let hx = k.betti();
    let ha = a.betti();
    let m = n as i64 - 1 - p.p(n) as i64;
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let ii = i as i64;
        let v = if ii < m {
            ha.get(i).copied().unwrap_or(0)
        } else if ii > m {
            hx[i]
        } else {
            image_rank(k, &regular, i)
        };
        out.push(v);
    }
    Ok(out)
}

/// Rank of `H_i(A) → H_i(X)` for the subcomplex with ids `sub`.
fn image_rank(k: &SimplicialComplex, sub: &[usize], i: usize) -> usize {
    let range = k.ids_of_dim(i);
    let cols: Vec<usize> = sub
        .iter()
        .filter(|id| range.contains(id))
        .map(|&id| id - range.start)
        .collect();
    let inclusion = SparseMatrix::identity(range.len()).select_columns(&cols);
    let cycles = if i == 0 {
        inclusion
    } else {
        inclusion.mul(&k.boundary_matrix(i).mul(&inclusion).kernel_matrix())
    };
    let boundaries = k.boundary_matrix(i + 1);
    boundaries.hstack(&cycles).rank() - boundaries.rank()
}

/// Dimension-level Poincaré duality: `IH_i^p = IH_{n−i}^q` for all `i`.
pub fn ih_duality_check(s: &StratifiedComplex, p: &GMPerversity, q: &GMPerversity) -> Result<bool> {
    if p.values.len() != q.values.len()
        || p.values.iter().zip(&q.values).enumerate().any(|(k, (a, b))| a + b != k)
    {
        return Err(Error::InvalidParameter(format!(
            "perversities {p} and {q} are not complementary"
        )));
    }
    let a = ih_betti(s, p)?;
    let b = ih_betti(s, q)?;
    let n = s.n;
    Ok((0..=n).all(|i| a[i] == b[n - i]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{cone, simplex, sphere, suspension, torus};

    #[test]
    fn perversity_rules() {
        assert!(GMPerversity::new(vec![0, 1, 1]).is_ok());
        assert!(GMPerversity::new(vec![1]).is_err());
        assert!(GMPerversity::new(vec![0, 2]).is_err());
        let p = GMPerversity::new(vec![0, 1, 1]).unwrap();
        assert_eq!(p.complement().values(), &[0, 0, 1]);
        assert_eq!(GMPerversity::top(4).values(), &[0, 1, 2]);
    }

    #[test]
    fn validation() {
        assert!(StratifiedComplex::manifold(sphere(2)).validate().is_empty());
        let d = StratifiedComplex::manifold(simplex(2)).validate();
        assert!(d.iter().any(|x| x.kind == DiagnosticKind::TwoCoface));
        let k = sphere(2);
        let mut levels = BTreeMap::new();
        levels.insert(2, vec![vec![0], vec![1]]);
        let s = StratifiedComplex::new(k, &levels).unwrap();
        let d = s.validate();
        assert!(d.iter().any(|x| x.kind == DiagnosticKind::NotFull
            && x.remedy.as_deref() == Some("apply barycentric subdivision")));
        assert!(s.subdivide().validate().is_empty());
    }

    #[test]
    fn manifold_ih_is_homology() {
        let s = StratifiedComplex::manifold(sphere(2));
        assert_eq!(ih_betti(&s, &GMPerversity::zero(2)).unwrap(), vec![1, 0, 1]);
    }

    #[test]
    fn suspended_circle_pinches() {
        // ΣS¹ is a 2-sphere; its cone points are not really singular.
        let k = suspension(&sphere(1));
        let mut levels = BTreeMap::new();
        levels.insert(2, vec![vec![3], vec![4]]);
        let s = StratifiedComplex::new(k, &levels).unwrap();
        assert_eq!(ih_betti(&s, &GMPerversity::zero(2)).unwrap(), vec![1, 0, 1]);
    }

    #[test]
    fn cone_over_torus() {
        let link = torus(2);
        let k = cone(&link);
        let apex = link.vertex_count();
        let mut levels = BTreeMap::new();
        levels.insert(3, vec![vec![apex]]);
        let s = StratifiedComplex::new(k, &levels).unwrap().with_boundary(true);
        for p in [GMPerversity::zero(3), GMPerversity::top(3)] {
            let direct = ih_betti(&s, &p).unwrap();
            let predicted = cone_formula(&link.betti(), 3, 3, &p).compact;
            assert_eq!(direct, predicted, "perversity {p}");
        }
        assert_eq!(ih_betti(&s, &GMPerversity::zero(3)).unwrap(), vec![1, 2, 0, 0]);
    }

    #[test]
    fn allowable_complex_agrees() {
        let link = torus(2);
        let k = suspension(&link);
        let n0 = link.vertex_count();
        let mut levels = BTreeMap::new();
        levels.insert(3, vec![vec![n0], vec![n0 + 1]]);
        let s = StratifiedComplex::new(k, &levels).unwrap();
        for p in [GMPerversity::zero(3), GMPerversity::top(3)] {
            let ac = AllowableComplex::build(&s, &p).unwrap();
            assert!(ac.boundary_closed());
            assert_eq!(ac.homology(), ih_betti(&s, &p).unwrap());
            assert_eq!(isolated_singularity_oracle(&s, &p).unwrap(), ac.homology());
        }
    }
}
