//! Intersection cohomology Poincaré polynomials of toric varieties, computed
//! from the face lattice of the moment polytope.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::exactla::LaurentPolynomial;

/// Nonempty faces of a polytope, each given by its vertex set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceLattice {
    n: usize,
    vertex_count: usize,
    facets: Vec<Vec<usize>>,
    faces: Vec<Vec<usize>>,
    dims: Vec<usize>,
    /// `above[f]`: faces strictly containing `f`.
    above: Vec<Vec<usize>>,
}

fn is_subset(a: &[usize], b: &[usize]) -> bool {
    a.len() <= b.len() && a.iter().all(|x| b.binary_search(x).is_ok())
}

fn intersect(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().copied().filter(|x| b.binary_search(x).is_ok()).collect()
}

fn s() -> LaurentPolynomial {
    // t² − 1
    LaurentPolynomial::from_terms([(0, -1), (2, 1)])
}

/// `τ_{≤d}`: drops monomials of degree above `d`.
pub fn truncate(p: &LaurentPolynomial, d: i32) -> LaurentPolynomial {
    p.truncate(d)
}

impl FaceLattice {
    /// Faces are the nonempty intersections of facets, plus the polytope itself.
    pub fn from_facets(facets: &[Vec<usize>]) -> Result<Self> {
        if facets.is_empty() {
            return Err(Error::MalformedPolytope("no facets".into()));
        }
        let mut facet_sets: Vec<Vec<usize>> = Vec::new();
        for f in facets {
            let mut f = f.clone();
            f.sort_unstable();
            f.dedup();
            if f.is_empty() {
                return Err(Error::MalformedPolytope("empty facet".into()));
            }
            facet_sets.push(f);
        }
        let all: BTreeSet<usize> = facet_sets.iter().flatten().copied().collect();
        let vertex_count = all.iter().next_back().map_or(0, |v| v + 1);
        if all.len() != vertex_count {
            return Err(Error::MalformedPolytope("vertex ids are not 0..n".into()));
        }
        let mut found: BTreeSet<Vec<usize>> = facet_sets.iter().cloned().collect();
        let mut frontier: Vec<Vec<usize>> = found.iter().cloned().collect();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for a in &frontier {
                for b in &facet_sets {
                    let c = intersect(a, b);
                    if !c.is_empty() && found.insert(c.clone()) {
                        next.push(c);
                    }
                }
            }
            frontier = next;
        }
        found.insert((0..vertex_count).collect());
        let mut faces: Vec<Vec<usize>> = found.into_iter().collect();
        faces.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        let m = faces.len();
        let mut below: Vec<Vec<usize>> = vec![Vec::new(); m];
        let mut above: Vec<Vec<usize>> = vec![Vec::new(); m];
        for i in 0..m {
            for j in i + 1..m {
                if faces[i].len() < faces[j].len() && is_subset(&faces[i], &faces[j]) {
                    below[j].push(i);
                    above[i].push(j);
                }
            }
        }
        let mut dims = vec![0usize; m];
        for j in 0..m {
            if below[j].is_empty() {
                if faces[j].len() != 1 {
                    return Err(Error::MalformedPolytope(format!(
                        "minimal face {:?} is not a vertex",
                        faces[j]
                    )));
                }
            } else {
                dims[j] = below[j].iter().map(|&i| dims[i] + 1).max().unwrap_or(0);
            }
        }
        // graded: every cover raises dimension by exactly one
        for j in 0..m {
            for &i in &below[j] {
                let covered = !below[j].iter().any(|&k| below[k].contains(&i));
                if covered && dims[j] != dims[i] + 1 {
                    return Err(Error::MalformedPolytope(format!(
                        "face lattice is not graded at {:?} < {:?}",
                        faces[i], faces[j]
                    )));
                }
            }
        }
        let vertex_faces = faces.iter().filter(|f| f.len() == 1).count();
        if vertex_faces != vertex_count {
            return Err(Error::MalformedPolytope(
                "some vertex is not an intersection of facets".into(),
            ));
        }
        let n = dims[m - 1];
        for f in &facet_sets {
            let id = faces.iter().position(|g| g == f).expect("facet is a face");
            if dims[id] + 1 != n {
                return Err(Error::MalformedPolytope(format!(
                    "facet {f:?} has dimension {} in a {n}-polytope",
                    dims[id]
                )));
            }
        }
        Ok(FaceLattice {
            n,
            vertex_count,
            facets: facet_sets,
            faces,
            dims,
            above,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn facets(&self) -> &[Vec<usize>] {
        &self.facets
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    pub fn face_dim(&self, f: usize) -> usize {
        self.dims[f]
    }

    pub fn top(&self) -> usize {
        self.faces.len() - 1
    }

    /// `(f_0, …, f_n)`, the polytope counted in `f_n`.
    pub fn f_vector(&self) -> Vec<usize> {
        let mut f = vec![0; self.n + 1];
        for &d in &self.dims {
            f[d] += 1;
        }
        f
    }

    /// Vertices lying in other than `n` facets.
    pub fn non_simple_vertices(&self) -> Vec<usize> {
        (0..self.vertex_count)
            .filter(|v| self.facets.iter().filter(|f| f.binary_search(v).is_ok()).count() != self.n)
            .collect()
    }

    pub fn is_simple(&self) -> bool {
        self.non_simple_vertices().is_empty()
    }

    /// `h(L_F)` for every face, where `L_F` is the link of `F`; `h(L_P) = 1`.
    pub fn link_polynomials(&self) -> Vec<LaurentPolynomial> {
        let m = self.faces.len();
        let mut h = vec![LaurentPolynomial::zero(); m];
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by_key(|&f| std::cmp::Reverse(self.dims[f]));
        let one_minus = -s();
        for f in order {
            if f == self.top() {
                h[f] = LaurentPolynomial::one();
                continue;
            }
            let mut acc = LaurentPolynomial::zero();
            for &g in &self.above[f] {
                let rel = (self.dims[g] - self.dims[f] - 1) as u32;
                let inner = truncate(&(&one_minus * &h[g]), (self.n - self.dims[g]) as i32);
                acc += &(&s().pow(rel) * &inner);
            }
            h[f] = acc;
        }
        h
    }

    /// Local IH polynomial at a point of the open face: `τ_{≤ n − dim F}((1 − t²) h(L_F))`.
    pub fn local_polynomials(&self) -> Vec<LaurentPolynomial> {
        let one_minus = -s();
        self.link_polynomials()
            .iter()
            .enumerate()
            .map(|(f, h)| truncate(&(&one_minus * h), (self.n - self.dims[f]) as i32))
            .collect()
    }
}

/// `h(Y, t) = Σ_F (t² − 1)^{dim F} · τ_{≤ n − dim F}((1 − t²) h(L_F))`.
pub fn ih_poly(p: &FaceLattice) -> LaurentPolynomial {
    let local = p.local_polynomials();
    let mut h = LaurentPolynomial::zero();
    for (f, l) in local.iter().enumerate() {
        h += &(&s().pow(p.dims[f] as u32) * l);
    }
    h
}

/// `f(t² − 1) = Σ_j f_j (t² − 1)^j`, valid for simple polytopes.
pub fn simple_formula(p: &FaceLattice) -> Result<LaurentPolynomial> {
    let witnesses = p.non_simple_vertices();
    if !witnesses.is_empty() {
        return Err(Error::NotSimple { witnesses });
    }
    let mut h = LaurentPolynomial::zero();
    for (j, &fj) in p.f_vector().iter().enumerate() {
        h += &s().pow(j as u32).scale(fj as i64);
    }
    Ok(h)
}

/// Palindromic in `t^{2i}` for `i = 0..n`, nondecreasing up to the middle, no odd terms.
pub fn hl_check(h: &LaurentPolynomial, n: usize) -> bool {
    if h.terms().any(|(e, _)| e < 0 || e % 2 != 0 || e > 2 * n as i32) {
        return false;
    }
    let c: Vec<i64> = (0..=n).map(|i| h.coeff(2 * i as i32)).collect();
    let palindromic = (0..=n).all(|i| c[i] == c[n - i]);
    let monotone = (1..=n / 2).all(|i| c[i - 1] <= c[i]);
    palindromic && monotone
}

/// Standard polytopes, given by the vertex sets of their facets.
pub mod polytopes {

    pub fn simplex(n: usize) -> Vec<Vec<usize>> {
        (0..=n)
            .map(|skip| (0..=n).filter(|&v| v != skip).collect())
            .collect()
    }

    pub fn polygon(m: usize) -> Vec<Vec<usize>> {
        (0..m).map(|i| vec![i, (i + 1) % m]).collect()
    }

    /// Vertices are bit patterns `0..2^n`.
    pub fn cube(n: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        for i in 0..n {
            for b in 0..2 {
                out.push((0..1usize << n).filter(|v| (v >> i) & 1 == b).collect());
            }
        }
        out
    }

    /// Vertices `2i` and `2i + 1` are `±e_i`.
    pub fn cross_polytope(n: usize) -> Vec<Vec<usize>> {
        (0..1usize << n)
            .map(|signs| (0..n).map(|i| 2 * i + ((signs >> i) & 1)).collect())
            .collect()
    }

    /// Pyramid with apex `vertex_count`: the base is one facet.
    pub fn pyramid(base: &[Vec<usize>]) -> Vec<Vec<usize>> {
        let apex = base.iter().flatten().max().map_or(0, |v| v + 1);
        let mut out = vec![(0..apex).collect::<Vec<_>>()];
        for f in base {
            let mut g = f.clone();
            g.push(apex);
            out.push(g);
        }
        out
    }

    /// Prism over a polytope: base copies `v` and `v + m`.
    pub fn prism(base: &[Vec<usize>]) -> Vec<Vec<usize>> {
        let m = base.iter().flatten().max().map_or(0, |v| v + 1);
        let mut out = vec![(0..m).collect::<Vec<_>>(), (m..2 * m).collect()];
        for f in base {
            let mut g = f.clone();
            g.extend(f.iter().map(|v| v + m));
            out.push(g);
        }
        out
    }
}

/// Named polytopes understood by the command line.
pub fn named_polytope(name: &str) -> Result<Vec<Vec<usize>>> {
    use polytopes::*;
    let (kind, arg) = match name.split_once(':') {
        Some((k, a)) => (
            k,
            Some(a.parse::<usize>().map_err(|_| {
                Error::InvalidArgument(format!("bad size in polytope name '{name}'"))
            })?),
        ),
        None => (name, None),
    };
    let size = |default: usize| arg.unwrap_or(default);
    Ok(match kind {
        "simplex" => simplex(size(3)),
        "cube" => cube(size(3)),
        "square" => polygon(4),
        "polygon" => polygon(size(5)),
        "cross" | "octahedron" => cross_polytope(size(3)),
        "pyramid" | "square-pyramid" => pyramid(&polygon(size(4))),
        "prism" => prism(&polygon(size(3))),
        _ => {
            return Err(Error::InvalidArgument(format!("unknown polytope '{name}'")));
        }
    })
}

/// Face-by-face breakdown for reporting.
pub fn local_table(p: &FaceLattice) -> BTreeMap<Vec<usize>, LaurentPolynomial> {
    p.faces.iter().cloned().zip(p.local_polynomials()).collect()
}

#[cfg(test)]
mod tests {
    use super::polytopes::*;
    use super::*;

    fn lp(c: &[i64]) -> LaurentPolynomial {
        LaurentPolynomial::from_terms(c.iter().enumerate().map(|(i, &c)| (2 * i as i32, c)))
    }

    #[test]
    fn f_vectors() {
        assert_eq!(FaceLattice::from_facets(&simplex(3)).unwrap().f_vector(), vec![4, 6, 4, 1]);
        assert_eq!(
            FaceLattice::from_facets(&pyramid(&polygon(4))).unwrap().f_vector(),
            vec![5, 8, 5, 1]
        );
        assert_eq!(FaceLattice::from_facets(&cube(3)).unwrap().f_vector(), vec![8, 12, 6, 1]);
    }

    #[test]
    fn simplices_and_cubes() {
        for n in 1..=5 {
            let p = FaceLattice::from_facets(&simplex(n)).unwrap();
            assert_eq!(ih_poly(&p), lp(&vec![1; n + 1]));
        }
        let c = FaceLattice::from_facets(&cube(3)).unwrap();
        assert_eq!(ih_poly(&c), lp(&[1, 3, 3, 1]));
        assert_eq!(simple_formula(&c).unwrap(), lp(&[1, 3, 3, 1]));
        let sq = FaceLattice::from_facets(&polygon(4)).unwrap();
        assert_eq!(simple_formula(&sq).unwrap(), lp(&[1, 2, 1]));
    }

    #[test]
    fn square_pyramid() {
        let p = FaceLattice::from_facets(&pyramid(&polygon(4))).unwrap();
        assert_eq!(ih_poly(&p), lp(&[1, 2, 2, 1]));
        let apex = p.faces().iter().position(|f| f == &vec![4]).unwrap();
        assert_eq!(p.local_polynomials()[apex], lp(&[1, 1]));
        match simple_formula(&p) {
            Err(Error::NotSimple { witnesses }) => assert_eq!(witnesses, vec![4]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn truncation_and_hl() {
        assert_eq!(truncate(&lp(&[1, 1, -1, -1]), 3), lp(&[1, 1]));
        assert_eq!(truncate(&lp(&[1, 0, -1]), 2), lp(&[1]));
        assert!(hl_check(&lp(&[1, 2, 2, 1]), 3));
        assert!(!hl_check(&lp(&[1, 0, 1]), 2));
    }

    #[test]
    fn rejects_non_lattices() {
        assert!(FaceLattice::from_facets(&[vec![0, 1], vec![1, 2, 3]]).is_err());
    }
}
