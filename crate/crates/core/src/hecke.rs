//! Iwahori–Hecke algebras in the basis `φ_w`, the bar involution, and the
//! Kazhdan–Lusztig basis `c_w = v^{−ℓ(w)} Σ_y P_{yw}(v²) φ_y` with `v² = q`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::hash::Hash;

use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactla::{rat, LaurentPolynomial, SparseMatrix};

/// A finite Coxeter group with simple reflections `0..rank()`.
pub trait Coxeter: Sync {
    type Element: Clone + Ord + Hash + fmt::Debug + Send + Sync;

    fn rank(&self) -> usize;
    fn identity(&self) -> Self::Element;
    fn length(&self, w: &Self::Element) -> usize;
    /// `s·w`.
    fn left_mul(&self, s: usize, w: &Self::Element) -> Self::Element;
    /// `w·s`.
    fn right_mul(&self, w: &Self::Element, s: usize) -> Self::Element;
    fn elements(&self) -> Vec<Self::Element>;
    fn bruhat_leq(&self, y: &Self::Element, w: &Self::Element) -> bool;

    fn inverse(&self, w: &Self::Element) -> Self::Element {
        let word = self.reduced_word(w);
        word.iter().fold(self.identity(), |acc, &s| self.left_mul(s, &acc))
    }

    /// Whether `ℓ(s·w) < ℓ(w)`.
    fn is_left_descent(&self, s: usize, w: &Self::Element) -> bool {
        self.length(&self.left_mul(s, w)) < self.length(w)
    }

    /// `w = s_{i_1} ⋯ s_{i_k}` with `k = ℓ(w)`.
    fn reduced_word(&self, w: &Self::Element) -> Vec<usize> {
        let mut word = Vec::new();
        let mut x = w.clone();
        while self.length(&x) > 0 {
            let s = (0..self.rank())
                .find(|&s| self.is_left_descent(s, &x))
                .expect("nonidentity element has a descent");
            word.push(s);
            x = self.left_mul(s, &x);
        }
        word
    }
}

/// A permutation in one-line notation, stored 0-based.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Perm(pub Vec<usize>);

impl Perm {
    /// Parses 1-based one-line notation such as `2,1,4,3`.
    pub fn parse(text: &str) -> Result<Self> {
        let vals: Vec<usize> = text
            .split(',')
            .map(|t| t.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::InvalidArgument(format!("bad permutation '{text}'")))?;
        Self::from_one_line(&vals)
    }

    pub fn from_one_line(vals: &[usize]) -> Result<Self> {
        let n = vals.len();
        let mut seen = vec![false; n];
        for &v in vals {
            if v == 0 || v > n || seen[v - 1] {
                return Err(Error::InvalidArgument(format!("{vals:?} is not a permutation")));
            }
            seen[v - 1] = true;
        }
        Ok(Perm(vals.iter().map(|v| v - 1).collect()))
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn inversions(&self) -> usize {
        let w = &self.0;
        (0..w.len())
            .map(|i| (i + 1..w.len()).filter(|&j| w[i] > w[j]).count())
            .sum()
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| (v + 1).to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

/// `S_n` with `s_i` the transposition of `i + 1` and `i + 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SymmetricGroup {
    pub n: usize,
}

impl SymmetricGroup {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("n must be positive".into()));
        }
        Ok(SymmetricGroup { n })
    }

    pub fn check(&self, w: &Perm) -> Result<()> {
        if w.n() != self.n {
            return Err(Error::InvalidArgument(format!("{w} is not in S_{}", self.n)));
        }
        Ok(())
    }

    /// Group product `x·y` (apply `y` first).
    pub fn compose(&self, x: &Perm, y: &Perm) -> Perm {
        Perm(y.0.iter().map(|&j| x.0[j]).collect())
    }
}

impl Coxeter for SymmetricGroup {
    type Element = Perm;

    fn rank(&self) -> usize {
        self.n - 1
    }

    fn identity(&self) -> Perm {
        Perm((0..self.n).collect())
    }

    fn length(&self, w: &Perm) -> usize {
        w.inversions()
    }

    fn left_mul(&self, s: usize, w: &Perm) -> Perm {
        Perm(
            w.0.iter()
                .map(|&v| match v {
                    v if v == s => s + 1,
                    v if v == s + 1 => s,
                    v => v,
                })
                .collect(),
        )
    }

    fn right_mul(&self, w: &Perm, s: usize) -> Perm {
        let mut x = w.clone();
        x.0.swap(s, s + 1);
        x
    }

    fn elements(&self) -> Vec<Perm> {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (0..self.n).collect();
        permutations(&mut cur, 0, &mut out);
        out.sort_by(|a, b| a.inversions().cmp(&b.inversions()).then_with(|| a.cmp(b)));
        out
    }

    /// Sorted prefixes of `y` are dominated entrywise by those of `w`.
    fn bruhat_leq(&self, y: &Perm, w: &Perm) -> bool {
        let mut a = Vec::with_capacity(self.n);
        let mut b = Vec::with_capacity(self.n);
        for k in 0..self.n {
            a.push(y.0[k]);
            b.push(w.0[k]);
            a.sort_unstable();
            b.sort_unstable();
            if a.iter().zip(&b).any(|(x, z)| x > z) {
                return false;
            }
        }
        true
    }
}

fn permutations(cur: &mut Vec<usize>, k: usize, out: &mut Vec<Perm>) {
    if k == cur.len() {
        out.push(Perm(cur.clone()));
        return;
    }
    for i in k..cur.len() {
        cur.swap(k, i);
        permutations(cur, k + 1, out);
        cur.swap(k, i);
    }
}

/// `Σ_w c_w φ_w` with coefficients in `v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeckeElement<E: Ord> {
    terms: BTreeMap<E, LaurentPolynomial>,
}

impl<E: Ord + Clone> Default for HeckeElement<E> {
    fn default() -> Self {
        HeckeElement {
            terms: BTreeMap::new(),
        }
    }
}

impl<E: Ord + Clone> HeckeElement<E> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(w: E) -> Self {
        Self::term(w, LaurentPolynomial::one())
    }

    pub fn term(w: E, c: LaurentPolynomial) -> Self {
        let mut h = Self::zero();
        h.add_term(w, &c);
        h
    }

    pub fn add_term(&mut self, w: E, c: &LaurentPolynomial) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(w.clone()).or_default();
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&w);
        }
    }

    pub fn coeff(&self, w: &E) -> LaurentPolynomial {
        self.terms.get(w).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> &BTreeMap<E, LaurentPolynomial> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&LaurentPolynomial::monomial(-1, 0)))
    }

    pub fn scale(&self, c: &LaurentPolynomial) -> Self {
        let mut out = Self::zero();
        for (w, d) in &self.terms {
            out.add_term(w.clone(), &(d * c));
        }
        out
    }
}

fn q() -> LaurentPolynomial {
    LaurentPolynomial::monomial(1, 2)
}

/// The Hecke algebra of a finite Coxeter group.
pub struct HeckeAlgebra<G: Coxeter> {
    group: G,
}

impl<G: Coxeter> HeckeAlgebra<G> {
    pub fn new(group: G) -> Self {
        HeckeAlgebra { group }
    }

    pub fn group(&self) -> &G {
        &self.group
    }

    pub fn phi(&self, w: G::Element) -> HeckeElement<G::Element> {
        HeckeElement::basis(w)
    }

    /// `φ_s · a`.
    pub fn left_generator(&self, s: usize, a: &HeckeElement<G::Element>) -> HeckeElement<G::Element> {
        let mut out = HeckeElement::zero();
        let qm1 = &q() - &LaurentPolynomial::one();
        for (w, c) in a.terms() {
            let sw = self.group.left_mul(s, w);
            if self.group.length(&sw) > self.group.length(w) {
                out.add_term(sw, c);
            } else {
                out.add_term(w.clone(), &(&qm1 * c));
                out.add_term(sw, &(&q() * c));
            }
        }
        out
    }

    /// `φ_s^{−1} · a` with `φ_s^{−1} = q^{−1}φ_s + (q^{−1} − 1)φ_1`.
    fn left_generator_inverse(
        &self,
        s: usize,
        a: &HeckeElement<G::Element>,
    ) -> HeckeElement<G::Element> {
        let qinv = LaurentPolynomial::monomial(1, -2);
        let shifted = self.left_generator(s, a).scale(&qinv);
        shifted.add(&a.scale(&(&qinv - &LaurentPolynomial::one())))
    }

    pub fn multiply(
        &self,
        a: &HeckeElement<G::Element>,
        b: &HeckeElement<G::Element>,
    ) -> HeckeElement<G::Element> {
        let mut out = HeckeElement::zero();
        for (w, c) in a.terms() {
            let word = self.group.reduced_word(w);
            let mut acc = b.scale(c);
            for &s in word.iter().rev() {
                acc = self.left_generator(s, &acc);
            }
            out = out.add(&acc);
        }
        out
    }

    /// `ι(φ_w) = (φ_{w^{−1}})^{−1} = φ_{s_1}^{−1} ⋯ φ_{s_k}^{−1}` for `w = s_1 ⋯ s_k`.
    pub fn bar_basis(&self, w: &G::Element) -> HeckeElement<G::Element> {
        let word = self.group.reduced_word(w);
        let mut acc = HeckeElement::basis(self.group.identity());
        for &s in word.iter().rev() {
            acc = self.left_generator_inverse(s, &acc);
        }
        acc
    }

    pub fn bar(&self, a: &HeckeElement<G::Element>) -> HeckeElement<G::Element> {
        let mut out = HeckeElement::zero();
        for (w, c) in a.terms() {
            out = out.add(&self.bar_basis(w).scale(&c.invert_variable()));
        }
        out
    }

    /// KL data for every group element, computed level by level in length.
    pub fn kl_table(&self) -> KLTable<G::Element> {
        let elements = self.group.elements();
        let mut levels: BTreeMap<usize, Vec<G::Element>> = BTreeMap::new();
        for w in &elements {
            levels.entry(self.group.length(w)).or_default().push(w.clone());
        }
        let mut c: HashMap<G::Element, HeckeElement<G::Element>> = HashMap::new();
        let mut p: HashMap<G::Element, BTreeMap<G::Element, LaurentPolynomial>> = HashMap::new();
        for (&len, ws) in &levels {
            let computed: Vec<(G::Element, HeckeElement<G::Element>)> = ws
                .par_iter()
                .map(|w| (w.clone(), self.kl_step(w, len, &c, &p)))
                .collect();
            for (w, cw) in computed {
                p.insert(w.clone(), extract_p(&cw, len));
                c.insert(w, cw);
            }
        }
        KLTable { elements, c, p }
    }

    fn kl_step(
        &self,
        w: &G::Element,
        len: usize,
        c: &HashMap<G::Element, HeckeElement<G::Element>>,
        p: &HashMap<G::Element, BTreeMap<G::Element, LaurentPolynomial>>,
    ) -> HeckeElement<G::Element> {
        if len == 0 {
            return HeckeElement::basis(w.clone());
        }
        let s = (0..self.group.rank())
            .find(|&s| self.group.is_left_descent(s, w))
            .expect("descent exists");
        let sw = self.group.left_mul(s, w);
        let e = self.group.identity();
        // c_s = v^{−1}(φ_1 + φ_s)
        let cs = HeckeElement::basis(e)
            .add(&HeckeElement::basis(self.group.left_mul(s, &self.group.identity())))
            .scale(&LaurentPolynomial::monomial(1, -1));
        let mut out = self.multiply(&cs, &c[&sw]);
        let lsw = self.group.length(&sw);
        for (z, pz) in &p[&sw] {
            let lz = self.group.length(z);
            if z == &sw || !self.group.is_left_descent(s, z) {
                continue;
            }
            let gap = lsw - lz;
            if gap % 2 == 0 {
                continue;
            }
            let mu = pz.coeff(((gap - 1) / 2) as i32);
            if mu != 0 {
                out = out.sub(&c[z].scale(&LaurentPolynomial::monomial(mu, 0)));
            }
        }
        out
    }
}

/// `P_{yw}` as a polynomial in `q` read off `c_w`.
fn extract_p<E: Ord + Clone>(cw: &HeckeElement<E>, len: usize) -> BTreeMap<E, LaurentPolynomial> {
    cw.terms()
        .iter()
        .map(|(y, coeff)| {
            let shifted = coeff.shift(len as i32);
            let p = LaurentPolynomial::from_terms(shifted.terms().map(|(e, c)| {
                debug_assert!(e % 2 == 0, "odd power of v in P");
                (e / 2, c)
            }));
            (y.clone(), p)
        })
        .collect()
}

/// All `c_w` and `P_{yw}` of a finite Coxeter group.
#[derive(Clone, Debug)]
pub struct KLTable<E: Ord + Hash> {
    elements: Vec<E>,
    c: HashMap<E, HeckeElement<E>>,
    p: HashMap<E, BTreeMap<E, LaurentPolynomial>>,
}

impl<E: Ord + Hash + Clone> KLTable<E> {
    pub fn elements(&self) -> &[E] {
        &self.elements
    }

    pub fn c(&self, w: &E) -> &HeckeElement<E> {
        &self.c[w]
    }

    /// `P_{yw}` in `q`; zero unless `y ≤ w`.
    pub fn p(&self, y: &E, w: &E) -> LaurentPolynomial {
        self.p[w].get(y).cloned().unwrap_or_default()
    }

    /// Nonzero `P_{yw}` for fixed `w`.
    pub fn column(&self, w: &E) -> &BTreeMap<E, LaurentPolynomial> {
        &self.p[w]
    }
}

/// KL polynomials of `S_n`.
pub fn kl_table_sn(n: usize) -> Result<KLTable<Perm>> {
    Ok(HeckeAlgebra::new(SymmetricGroup::new(n)?).kl_table())
}

/// Independent computation of `P_{·w}` as the unique solution of a linear system.
///
/// Unknowns are the coefficients of `P_{yw}` for every `y ≠ w` within the
/// degree bound `deg ≤ (ℓ(w) − ℓ(y) − 1)/2`; the equations say the element
/// `v^{−ℓ(w)} Σ_y P_{yw}(v²) φ_y` with `P_{ww} = 1` is bar invariant.
/// Bruhat order is not used. Fails if the solution is missing or not unique.
pub fn kl_oracle<G: Coxeter>(
    alg: &HeckeAlgebra<G>,
    w: &G::Element,
) -> Result<BTreeMap<G::Element, LaurentPolynomial>> {
    let g = alg.group();
    let lw = g.length(w) as i64;
    let mut unknowns: Vec<(G::Element, i64)> = Vec::new();
    for y in g.elements() {
        let ly = g.length(&y) as i64;
        if &y == w || ly >= lw {
            continue;
        }
        for k in 0..=(lw - ly - 1) / 2 {
            unknowns.push((y.clone(), k));
        }
    }
    // coordinate (x, v-exponent) of ι(m) − m for the monomial m = v^{2k−ℓ(w)} φ_y
    let residual = |y: &G::Element, k: i64| {
        let m = HeckeElement::term(y.clone(), LaurentPolynomial::monomial(1, (2 * k - lw) as i32));
        alg.bar(&m).sub(&m)
    };
    let columns: Vec<HeckeElement<G::Element>> =
        unknowns.par_iter().map(|(y, k)| residual(y, *k)).collect();
    let rhs = residual(w, 0);
    let mut coords: BTreeMap<(G::Element, i32), usize> = BTreeMap::new();
    for h in columns.iter().chain(std::iter::once(&rhs)) {
        for (x, c) in h.terms() {
            for (e, _) in c.terms() {
                let next = coords.len();
                coords.entry((x.clone(), e)).or_insert(next);
            }
        }
    }
    let mut m = SparseMatrix::zeros(coords.len(), unknowns.len());
    for (j, h) in columns.iter().enumerate() {
        for (x, c) in h.terms() {
            for (e, v) in c.terms() {
                m.set(coords[&(x.clone(), e)], j, rat(v));
            }
        }
    }
    let mut b = SparseMatrix::zeros(coords.len(), 1);
    for (x, c) in rhs.terms() {
        for (e, v) in c.terms() {
            b.set(coords[&(x.clone(), e)], 0, rat(-v));
        }
    }
    if m.rank() != unknowns.len() {
        return Err(Error::InvariantViolation {
            name: "bar-invariant element is unique".into(),
        });
    }
    let sol = m.solve(&b).ok_or_else(|| Error::InvariantViolation {
        name: "bar-invariant element exists".into(),
    })?;
    let mut out: BTreeMap<G::Element, LaurentPolynomial> = BTreeMap::new();
    out.insert(w.clone(), LaurentPolynomial::one());
    for (j, (y, k)) in unknowns.iter().enumerate() {
        let v = sol.get(j, 0);
        if v.is_zero() {
            continue;
        }
        if !v.is_integer() {
            return Err(Error::InvariantViolation {
                name: "KL coefficients are integers".into(),
            });
        }
        let c = v.to_integer().try_into().map_err(|_| Error::InvariantViolation {
            name: "KL coefficient fits in i64".into(),
        })?;
        out.entry(y.clone()).or_default().add_term(*k as i32, c);
    }
    out.retain(|_, p| !p.is_zero());
    Ok(out)
}
