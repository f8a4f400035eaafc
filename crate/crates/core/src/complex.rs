//! Finite abstract simplicial complexes, standard constructions and barycentric subdivision.
//!
//! Simplices are identified by an index into a list sorted by dimension and then
//! lexicographically. Every simplex is oriented by its ascending vertex order.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactla::{rat, SparseMatrix};

/// A nonempty, strictly increasing list of vertex ids.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Simplex(Vec<usize>);

impl Simplex {
    /// Sorts the vertices; rejects empty input and repeated vertices.
    pub fn new(mut vertices: Vec<usize>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::MalformedInput("empty simplex".into()));
        }
        vertices.sort_unstable();
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::MalformedInput(format!(
                "repeated vertex in simplex {vertices:?}"
            )));
        }
        Ok(Simplex(vertices))
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn is_face_of(&self, other: &Simplex) -> bool {
        is_subset(&self.0, &other.0)
    }

    /// Comma separated vertex list, e.g. `"0,1,2"`.
    pub fn key(&self) -> String {
        self.0
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn parse_key(key: &str) -> Result<Self> {
        let verts: std::result::Result<Vec<usize>, _> =
            key.split(',').map(|s| s.trim().parse::<usize>()).collect();
        let verts = verts.map_err(|_| Error::MalformedInput(format!("bad simplex key {key:?}")))?;
        Simplex::new(verts)
    }
}

impl Ord for Simplex {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Simplex {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.key())
    }
}

fn is_subset(a: &[usize], b: &[usize]) -> bool {
    let mut j = 0;
    for &x in a {
        while j < b.len() && b[j] < x {
            j += 1;
        }
        if j == b.len() || b[j] != x {
            return false;
        }
        j += 1;
    }
    true
}

/// Incidence number `[τ:σ]`: `(−1)^i` if σ is τ with its `i`-th vertex removed, else 0.
pub fn incidence(tau: &Simplex, sigma: &Simplex) -> i32 {
    if tau.0.len() != sigma.0.len() + 1 || !sigma.is_face_of(tau) {
        return 0;
    }
    let i = tau
        .0
        .iter()
        .zip(sigma.0.iter().map(Some).chain(std::iter::once(None)))
        .position(|(t, s)| s != Some(t))
        .expect("codimension-one face omits a vertex");
    if i % 2 == 0 {
        1
    } else {
        -1
    }
}

/// A finite simplicial complex with precomputed incidences.
#[derive(Clone, Debug)]
pub struct SimplicialComplex {
    vertex_count: usize,
    simplices: Vec<Simplex>,
    index: HashMap<Simplex, usize>,
    dim_start: Vec<usize>,
    facets: Vec<Vec<(usize, i32)>>,
    cofacets: Vec<Vec<(usize, i32)>>,
}

impl PartialEq for SimplicialComplex {
    fn eq(&self, other: &Self) -> bool {
        self.vertex_count == other.vertex_count && self.simplices == other.simplices
    }
}

impl Eq for SimplicialComplex {}

impl SimplicialComplex {
    /// The face closure of the given simplices.
    pub fn from_maximal(vertex_count: usize, maximal: &[Vec<usize>]) -> Result<Self> {
        let mut all: BTreeSet<Simplex> = BTreeSet::new();
        for m in maximal {
            let s = Simplex::new(m.clone())?;
            if let Some(&v) = s.0.iter().find(|&&v| v >= vertex_count) {
                return Err(Error::MalformedInput(format!(
                    "vertex {v} out of range (vertex count {vertex_count})"
                )));
            }
            if s.0.len() > 24 {
                return Err(Error::Unsupported(format!("simplex of dimension {}", s.dim())));
            }
            if all.contains(&s) {
                continue;
            }
            let n = s.0.len();
            for mask in 1u32..(1u32 << n) {
                let face: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| s.0[i]).collect();
                all.insert(Simplex(face));
            }
        }
        Ok(Self::from_closed(vertex_count, all.into_iter().collect()))
    }

    /// Builds from a sorted, face-closed simplex list.
    fn from_closed(vertex_count: usize, simplices: Vec<Simplex>) -> Self {
        let index: HashMap<Simplex, usize> = simplices
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        let top = simplices.last().map_or(0, |s| s.0.len());
        // dim_start[d] is the first id of dimension >= d
        let dim_start: Vec<usize> = (0..=top)
            .map(|d| simplices.partition_point(|s| s.0.len() <= d))
            .collect();
        let mut facets = vec![Vec::new(); simplices.len()];
        let mut cofacets = vec![Vec::new(); simplices.len()];
        for (t, s) in simplices.iter().enumerate() {
            if s.0.len() < 2 {
                continue;
            }
            for i in 0..s.0.len() {
                let mut f = s.0.clone();
                f.remove(i);
                let fi = index[&Simplex(f)];
                let sign = if i % 2 == 0 { 1 } else { -1 };
                facets[t].push((fi, sign));
                cofacets[fi].push((t, sign));
            }
        }
        for c in &mut cofacets {
            c.sort_unstable();
        }
        for f in &mut facets {
            f.sort_unstable();
        }
        SimplicialComplex {
            vertex_count,
            simplices,
            index,
            dim_start,
            facets,
            cofacets,
        }
    }

    /// The subcomplex formed by the given simplices; they must be face-closed.
    pub fn subcomplex(&self, ids: &[usize]) -> Result<Self> {
        let mut set: Vec<Simplex> = ids.iter().map(|&i| self.simplices[i].clone()).collect();
        set.sort();
        set.dedup();
        let present: BTreeSet<&Simplex> = set.iter().collect();
        for s in &set {
            for &(f, _) in &self.facets[self.index[s]] {
                if !present.contains(&self.simplices[f]) {
                    return Err(Error::InvalidArgument(format!(
                        "simplex set is not closed: {} lacks face {}",
                        s, self.simplices[f]
                    )));
                }
            }
        }
        Ok(Self::from_closed(self.vertex_count, set))
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    /// Top dimension; 0 for the empty complex.
    pub fn dim(&self) -> usize {
        self.simplices.last().map_or(0, |s| s.dim())
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn simplex(&self, id: usize) -> &Simplex {
        &self.simplices[id]
    }

    pub fn simplex_dim(&self, id: usize) -> usize {
        self.simplices[id].dim()
    }

    pub fn id(&self, s: &Simplex) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn id_of(&self, vertices: &[usize]) -> Option<usize> {
        let s = Simplex::new(vertices.to_vec()).ok()?;
        self.id(&s)
    }

    pub fn require_id(&self, s: &Simplex) -> Result<usize> {
        self.id(s)
            .ok_or_else(|| Error::InvalidArgument(format!("simplex {s} is not in the complex")))
    }

    /// Ids of all simplices of dimension `d`.
    pub fn ids_of_dim(&self, d: usize) -> std::ops::Range<usize> {
        let n = self.simplices.len();
        if d + 1 >= self.dim_start.len() {
            return n..n;
        }
        self.dim_start[d]..self.dim_start[d + 1]
    }

    pub fn count_of_dim(&self, d: usize) -> usize {
        self.ids_of_dim(d).len()
    }

    /// Position of a simplex among those of its dimension.
    pub fn local_index(&self, id: usize) -> usize {
        id - self.ids_of_dim(self.simplex_dim(id)).start
    }

    /// f-vector `(f_0, f_1, …)`.
    pub fn f_vector(&self) -> Vec<usize> {
        if self.is_empty() {
            return Vec::new();
        }
        (0..=self.dim()).map(|d| self.count_of_dim(d)).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.f_vector()
            .iter()
            .enumerate()
            .map(|(d, &n)| if d % 2 == 0 { n as i64 } else { -(n as i64) })
            .sum()
    }

    /// Codimension-one faces with incidence numbers `[τ:σ]`.
    pub fn facets(&self, id: usize) -> &[(usize, i32)] {
        &self.facets[id]
    }

    /// Codimension-one cofaces with incidence numbers `[τ:σ]`.
    pub fn cofacets(&self, id: usize) -> &[(usize, i32)] {
        &self.cofacets[id]
    }

    pub fn incidence_ids(&self, tau: usize, sigma: usize) -> i32 {
        self.facets[tau]
            .iter()
            .find(|(f, _)| *f == sigma)
            .map_or(0, |&(_, s)| s)
    }

    /// Whether simplex `a` is a face of simplex `b` (including `a = b`).
    pub fn is_face(&self, a: usize, b: usize) -> bool {
        a == b || (self.simplex_dim(a) < self.simplex_dim(b) && self.simplices[a].is_face_of(&self.simplices[b]))
    }

    /// All faces of `id`, including itself, sorted.
    pub fn faces(&self, id: usize) -> Vec<usize> {
        let s = &self.simplices[id].0;
        let n = s.len();
        let mut out: Vec<usize> = (1u32..(1u32 << n))
            .map(|mask| {
                let f: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| s[i]).collect();
                self.index[&Simplex(f)]
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Open star: all simplices having `id` as a face, sorted.
    pub fn star(&self, id: usize) -> Vec<usize> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![id];
        while let Some(x) = stack.pop() {
            if seen.insert(x) {
                stack.extend(self.cofacets[x].iter().map(|c| c.0));
            }
        }
        seen.into_iter().collect()
    }

    /// Face closure of the open star.
    pub fn closed_star(&self, id: usize) -> Vec<usize> {
        let mut set = BTreeSet::new();
        for t in self.star(id) {
            set.extend(self.faces(t));
        }
        set.into_iter().collect()
    }

    /// Simplices of the closed star that do not meet `id`.
    pub fn link(&self, id: usize) -> Vec<usize> {
        let verts = &self.simplices[id].0;
        self.closed_star(id)
            .into_iter()
            .filter(|&t| !self.simplices[t].0.iter().any(|v| verts.contains(v)))
            .collect()
    }

    /// Maximal simplices, as vertex lists.
    pub fn maximal_simplices(&self) -> Vec<Vec<usize>> {
        (0..self.len())
            .filter(|&i| self.cofacets[i].is_empty())
            .map(|i| self.simplices[i].0.clone())
            .collect()
    }

    /// Matrix of `∂: C_r → C_{r−1}`; rows index (r−1)-simplices, columns r-simplices.
    pub fn boundary_matrix(&self, r: usize) -> SparseMatrix {
        let cols = self.ids_of_dim(r);
        if r == 0 {
            return SparseMatrix::zeros(0, cols.len());
        }
        let rows = self.ids_of_dim(r - 1);
        let mut m = SparseMatrix::zeros(rows.len(), cols.len());
        for t in cols.clone() {
            for &(f, s) in &self.facets[t] {
                m.set(f - rows.start, t - cols.start, rat(s as i64));
            }
        }
        m
    }

    /// Rational Betti numbers `b_0 … b_dim`.
    pub fn betti(&self) -> Vec<usize> {
        if self.is_empty() {
            return Vec::new();
        }
        let n = self.dim();
        let ranks: Vec<usize> = (0..=n + 1)
            .into_par_iter()
            .map(|r| if r == 0 || r > n { 0 } else { self.boundary_matrix(r).rank() })
            .collect();
        (0..=n)
            .map(|r| self.count_of_dim(r) - ranks[r] - ranks[r + 1])
            .collect()
    }
}

/// The standard `n`-simplex on vertices `0..=n`.
pub fn simplex(n: usize) -> SimplicialComplex {
    SimplicialComplex::from_maximal(n + 1, &[(0..=n).collect()]).expect("valid simplex")
}

/// The boundary of the `(n+1)`-simplex, an `n`-sphere.
pub fn sphere(n: usize) -> SimplicialComplex {
    let all: Vec<usize> = (0..n + 2).collect();
    let maximal: Vec<Vec<usize>> = (0..n + 2)
        .map(|skip| all.iter().copied().filter(|&v| v != skip).collect())
        .collect();
    SimplicialComplex::from_maximal(n + 2, &maximal).expect("valid sphere")
}

/// A cycle of `m ≥ 3` edges.
pub fn circle(m: usize) -> Result<SimplicialComplex> {
    if m < 3 {
        return Err(Error::InvalidParameter(format!(
            "circle needs at least 3 vertices, got {m}"
        )));
    }
    let maximal: Vec<Vec<usize>> = (0..m).map(|i| vec![i, (i + 1) % m]).collect();
    SimplicialComplex::from_maximal(m, &maximal)
}

/// Join; vertices of `l` are shifted by `k.vertex_count()`.
pub fn join(k: &SimplicialComplex, l: &SimplicialComplex) -> SimplicialComplex {
    let shift = k.vertex_count();
    let mut maximal = Vec::new();
    for a in k.maximal_simplices() {
        for b in l.maximal_simplices() {
            let mut s = a.clone();
            s.extend(b.iter().map(|v| v + shift));
            maximal.push(s);
        }
    }
    SimplicialComplex::from_maximal(shift + l.vertex_count(), &maximal).expect("valid join")
}

/// Cone with apex `k.vertex_count()`.
pub fn cone(k: &SimplicialComplex) -> SimplicialComplex {
    join(k, &simplex(0))
}

/// Suspension with cone points `n` and `n+1`, where `n = k.vertex_count()`.
pub fn suspension(k: &SimplicialComplex) -> SimplicialComplex {
    let two_points = SimplicialComplex::from_maximal(2, &[vec![0], vec![1]]).expect("valid S0");
    join(k, &two_points)
}

/// Staircase triangulation of `|K| × |L|`; vertex `(a, b)` becomes `a·|V_L| + b`.
pub fn product(k: &SimplicialComplex, l: &SimplicialComplex) -> SimplicialComplex {
    let nl = l.vertex_count();
    let mut maximal = Vec::new();
    for a in k.maximal_simplices() {
        for b in l.maximal_simplices() {
            staircases(&a, &b, nl, &mut maximal);
        }
    }
    SimplicialComplex::from_maximal(k.vertex_count() * nl, &maximal).expect("valid product")
}

/// All monotone lattice paths through `a × b`.
fn staircases(a: &[usize], b: &[usize], nl: usize, out: &mut Vec<Vec<usize>>) {
    fn walk(
        a: &[usize],
        b: &[usize],
        i: usize,
        j: usize,
        nl: usize,
        path: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        path.push(a[i] * nl + b[j]);
        if i + 1 == a.len() && j + 1 == b.len() {
            out.push(path.clone());
        }
        if i + 1 < a.len() {
            walk(a, b, i + 1, j, nl, path, out);
        }
        if j + 1 < b.len() {
            walk(a, b, i, j + 1, nl, path, out);
        }
        path.pop();
    }
    walk(a, b, 0, 0, nl, &mut Vec::new(), out);
}

/// Product of `n` copies of `circle(3)`; `torus(0)` is a point.
pub fn torus(n: usize) -> SimplicialComplex {
    let c = circle(3).expect("3 >= 3");
    (0..n).fold(simplex(0), |acc, _| product(&acc, &c))
}

/// A simplicial map, given by its vertex assignment.
#[derive(Clone, Debug)]
pub struct SimplicialMap {
    source: SimplicialComplex,
    target: SimplicialComplex,
    vertex_map: Vec<usize>,
    image: Vec<usize>,
}

impl SimplicialMap {
    pub fn new(
        source: SimplicialComplex,
        target: SimplicialComplex,
        vertex_map: Vec<usize>,
    ) -> Result<Self> {
        if vertex_map.len() != source.vertex_count() {
            return Err(Error::InvalidArgument(format!(
                "vertex map has {} entries, source has {} vertices",
                vertex_map.len(),
                source.vertex_count()
            )));
        }
        let mut image = Vec::with_capacity(source.len());
        for s in source.simplices() {
            let mut img: Vec<usize> = s.vertices().iter().map(|&v| vertex_map[v]).collect();
            img.sort_unstable();
            img.dedup();
            let id = target.id_of(&img).ok_or_else(|| {
                Error::InvalidArgument(format!("image of {s} is not a simplex of the target"))
            })?;
            image.push(id);
        }
        Ok(SimplicialMap {
            source,
            target,
            vertex_map,
            image,
        })
    }

    pub fn identity(k: &SimplicialComplex) -> Self {
        Self::new(k.clone(), k.clone(), (0..k.vertex_count()).collect()).expect("identity")
    }

    /// The map collapsing `k` to a single vertex.
    pub fn to_point(k: &SimplicialComplex) -> Self {
        Self::new(k.clone(), simplex(0), vec![0; k.vertex_count()]).expect("constant map")
    }

    pub fn source(&self) -> &SimplicialComplex {
        &self.source
    }

    pub fn target(&self) -> &SimplicialComplex {
        &self.target
    }

    pub fn vertex_map(&self) -> &[usize] {
        &self.vertex_map
    }

    /// Target id of the image of source simplex `id`.
    pub fn image(&self, id: usize) -> usize {
        self.image[id]
    }

    pub fn compose(&self, after: &SimplicialMap) -> Result<SimplicialMap> {
        if after.source != self.target {
            return Err(Error::InvalidArgument("maps are not composable".into()));
        }
        let vm = self.vertex_map.iter().map(|&v| after.vertex_map[v]).collect();
        SimplicialMap::new(self.source.clone(), after.target.clone(), vm)
    }
}

/// First barycentric subdivision. Vertex `i` of the subdivision is the barycenter of base simplex `i`.
#[derive(Clone, Debug)]
pub struct BarycentricSubdivision {
    base: SimplicialComplex,
    subdivided: SimplicialComplex,
}

impl BarycentricSubdivision {
    pub fn base(&self) -> &SimplicialComplex {
        &self.base
    }

    pub fn subdivided(&self) -> &SimplicialComplex {
        &self.subdivided
    }

    /// The strict flag of base simplex ids carried by subdivided simplex `id`, ascending.
    pub fn carrier(&self, id: usize) -> &[usize] {
        self.subdivided.simplex(id).vertices()
    }

    /// Top element of the carrier; its interior contains the subdivided simplex's interior.
    pub fn open_cell(&self, id: usize) -> usize {
        *self.carrier(id).last().expect("nonempty flag")
    }

    /// Closed dual block `D(σ)`: subdivided simplices whose flag lies above σ.
    pub fn dual_cell(&self, sigma: usize) -> Result<Vec<usize>> {
        if sigma >= self.base.len() {
            return Err(Error::InvalidArgument(format!("no simplex with id {sigma}")));
        }
        Ok((0..self.subdivided.len())
            .filter(|&t| self.base.is_face(sigma, self.carrier(t)[0]))
            .collect())
    }
}

pub fn barycentric(k: &SimplicialComplex) -> BarycentricSubdivision {
    let mut maximal = Vec::new();
    let mut chain = Vec::new();
    fn extend(k: &SimplicialComplex, chain: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let top = *chain.last().expect("nonempty");
        let cof = k.cofacets(top);
        if cof.is_empty() {
            out.push(chain.clone());
            return;
        }
        for &(c, _) in cof {
            chain.push(c);
            extend(k, chain, out);
            chain.pop();
        }
    }
    for v in k.ids_of_dim(0) {
        chain.push(v);
        extend(k, &mut chain, &mut maximal);
        chain.pop();
    }
    let subdivided = SimplicialComplex::from_maximal(k.len(), &maximal).expect("flags are simplices");
    BarycentricSubdivision {
        base: k.clone(),
        subdivided,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[usize]) -> Simplex {
        Simplex::new(v.to_vec()).unwrap()
    }

    #[test]
    fn from_maximal_counts() {
        assert_eq!(simplex(2).len(), 7);
        let c = SimplicialComplex::from_maximal(3, &[vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap();
        assert_eq!(c.len(), 6);
        assert_eq!(sphere(2).len(), 14);
        assert!(SimplicialComplex::from_maximal(3, &[vec![0, 0]]).is_err());
        assert!(SimplicialComplex::from_maximal(2, &[vec![0, 2]]).is_err());
    }

    #[test]
    fn incidence_signs() {
        assert_eq!(incidence(&s(&[0, 1]), &s(&[1])), 1);
        assert_eq!(incidence(&s(&[0, 1]), &s(&[0])), -1);
        assert_eq!(incidence(&s(&[0, 1, 2]), &s(&[0])), 0);
        assert_eq!(incidence(&s(&[0, 1, 2]), &s(&[0, 2])), -1);
    }

    #[test]
    fn boundary_squares_to_zero() {
        let k = simplex(3);
        for r in 2..=3 {
            assert!(k.boundary_matrix(r - 1).mul(&k.boundary_matrix(r)).is_zero());
        }
        let c = circle(3).unwrap();
        assert_eq!(c.boundary_matrix(1).rank(), 2);
        assert_eq!(sphere(2).betti(), vec![1, 0, 1]);
    }

    #[test]
    fn builders() {
        assert_eq!(suspension(&circle(3).unwrap()).betti(), vec![1, 0, 1]);
        let t2 = torus(2);
        assert_eq!(t2.f_vector(), vec![9, 27, 18]);
        assert_eq!(t2.euler_characteristic(), 0);
        assert_eq!(t2.betti(), vec![1, 2, 1]);
        let sq = product(&simplex(1), &simplex(1));
        assert_eq!(sq.f_vector(), vec![4, 5, 2]);
        assert!(circle(2).is_err());
        assert_eq!(cone(&sphere(1)).betti(), vec![1, 0, 0]);
    }

    #[test]
    fn subdivision_counts() {
        assert_eq!(barycentric(&simplex(1)).subdivided().f_vector(), vec![3, 2]);
        assert_eq!(barycentric(&simplex(2)).subdivided().f_vector(), vec![7, 12, 6]);
        let sd = barycentric(&sphere(2));
        assert_eq!(sd.subdivided().euler_characteristic(), 2);
    }

    #[test]
    fn dual_cells() {
        let k = simplex(1);
        let sd = barycentric(&k);
        let top = k.id_of(&[0, 1]).unwrap();
        assert_eq!(sd.dual_cell(top).unwrap(), vec![top]);
        let v0 = k.id_of(&[0]).unwrap();
        let d = sd.dual_cell(v0).unwrap();
        // the vertex 0̂, the barycenter of 01, and the edge joining them
        assert_eq!(d.len(), 3);
        assert!(sd.dual_cell(99).is_err());
    }

    #[test]
    fn stars_and_links() {
        let k = sphere(2);
        let v = k.id_of(&[0]).unwrap();
        let link = k.subcomplex(&k.link(v)).unwrap();
        assert_eq!(link.f_vector(), vec![3, 3]);
        let top = k.id_of(&[0, 1, 2]).unwrap();
        assert_eq!(k.star(top), vec![top]);
        let e = k.id_of(&[0, 1]).unwrap();
        assert_eq!(k.link(e).len(), 2);
    }
}
