use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Signed, Zero};

use super::Rational;

/// Sparse matrix over the rationals, stored row-wise. Stored entries are never zero.
#[derive(Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BTreeMap<usize, Rational>>,
}

impl fmt::Debug for SparseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SparseMatrix {}x{} [", self.rows, self.cols)?;
        for (r, row) in self.data.iter().enumerate() {
            if row.is_empty() {
                continue;
            }
            write!(f, "  {r}:")?;
            for (c, v) in row {
                write!(f, " ({c}: {v})")?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix {
            rows,
            cols,
            data: vec![BTreeMap::new(); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i].insert(i, Rational::one());
        }
        m
    }

    pub fn from_dense(rows: usize, cols: usize, values: &[Vec<Rational>]) -> Self {
        assert_eq!(values.len(), rows, "row count mismatch");
        let mut m = Self::zeros(rows, cols);
        for (r, row) in values.iter().enumerate() {
            assert_eq!(row.len(), cols, "column count mismatch in row {r}");
            for (c, v) in row.iter().enumerate() {
                m.set(r, c, v.clone());
            }
        }
        m
    }

    /// Convenience constructor for small integer matrices.
    pub fn from_i64(values: &[&[i64]]) -> Self {
        let rows = values.len();
        let cols = values.first().map_or(0, |r| r.len());
        let mut m = Self::zeros(rows, cols);
        for (r, row) in values.iter().enumerate() {
            assert_eq!(row.len(), cols);
            for (c, &v) in row.iter().enumerate() {
                m.set(r, c, Rational::from_integer(v.into()));
            }
        }
        m
    }

    /// Builds a column vector.
    pub fn column(values: &[Rational]) -> Self {
        let mut m = Self::zeros(values.len(), 1);
        for (r, v) in values.iter().enumerate() {
            m.set(r, 0, v.clone());
        }
        m
    }

    /// Matrix whose columns are the given vectors (all of length `rows`).
    pub fn from_columns(rows: usize, columns: &[Vec<Rational>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (c, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (r, v) in col.iter().enumerate() {
                m.set(r, c, v.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(|r| r.len()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| r.is_empty())
    }

    pub fn get(&self, r: usize, c: usize) -> Rational {
        assert!(r < self.rows && c < self.cols, "index out of bounds");
        self.data[r].get(&c).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        assert!(
            r < self.rows && c < self.cols,
            "index ({r},{c}) out of bounds for {}x{}",
            self.rows,
            self.cols
        );
        if v.is_zero() {
            self.data[r].remove(&c);
        } else {
            self.data[r].insert(c, v);
        }
    }

    pub fn add_to(&mut self, r: usize, c: usize, v: &Rational) {
        if v.is_zero() {
            return;
        }
        let row = &mut self.data[r];
        let next = match row.get(&c) {
            Some(old) => old + v,
            None => v.clone(),
        };
        if next.is_zero() {
            row.remove(&c);
        } else {
            row.insert(c, next);
        }
    }

    pub fn row(&self, r: usize) -> &BTreeMap<usize, Rational> {
        &self.data[r]
    }

    /// Iterates over stored `(row, col, value)` triples in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Rational)> + '_ {
        self.data
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |(c, v)| (r, *c, v)))
    }

    pub fn to_dense(&self) -> Vec<Vec<Rational>> {
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.get(r, c)).collect())
            .collect()
    }

    pub fn column_vector(&self, c: usize) -> Vec<Rational> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for (r, c, v) in self.entries() {
            t.data[c].insert(r, v.clone());
        }
        t
    }

    pub fn mul(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(
            self.cols, other.rows,
            "shape mismatch in product: {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = Self::zeros(self.rows, other.cols);
        for (r, row) in self.data.iter().enumerate() {
            let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
            for (k, a) in row {
                for (c, b) in &other.data[*k] {
                    let prod = a * b;
                    match acc.get_mut(c) {
                        Some(x) => *x += prod,
                        None => {
                            acc.insert(*c, prod);
                        }
                    }
                }
            }
            acc.retain(|_, v| !v.is_zero());
            out.data[r] = acc;
        }
        out
    }

    pub fn add(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.shape(), other.shape(), "shape mismatch in sum");
        let mut out = self.clone();
        for (r, c, v) in other.entries() {
            out.add_to(r, c, v);
        }
        out
    }

    pub fn sub(&self, other: &SparseMatrix) -> SparseMatrix {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, s: &Rational) -> SparseMatrix {
        if s.is_zero() {
            return Self::zeros(self.rows, self.cols);
        }
        let mut out = self.clone();
        for row in &mut out.data {
            for v in row.values_mut() {
                *v = &*v * s;
            }
        }
        out
    }

    pub fn neg(&self) -> SparseMatrix {
        self.scale(&-Rational::one())
    }

    pub fn select_columns(&self, cols: &[usize]) -> SparseMatrix {
        let pos: BTreeMap<usize, usize> = cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        assert_eq!(pos.len(), cols.len(), "duplicate column selection");
        let mut out = Self::zeros(self.rows, cols.len());
        for (r, row) in self.data.iter().enumerate() {
            for (c, v) in row {
                if let Some(&nc) = pos.get(c) {
                    out.data[r].insert(nc, v.clone());
                }
            }
        }
        out
    }

    pub fn select_rows(&self, rows: &[usize]) -> SparseMatrix {
        let mut out = Self::zeros(rows.len(), self.cols);
        for (i, &r) in rows.iter().enumerate() {
            out.data[i] = self.data[r].clone();
        }
        out
    }

    pub fn hstack(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.rows, other.rows, "row mismatch in hstack");
        let mut out = Self::zeros(self.rows, self.cols + other.cols);
        for (r, c, v) in self.entries() {
            out.data[r].insert(c, v.clone());
        }
        for (r, c, v) in other.entries() {
            out.data[r].insert(self.cols + c, v.clone());
        }
        out
    }

    pub fn vstack(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.cols, other.cols, "column mismatch in vstack");
        let mut out = self.clone();
        out.rows += other.rows;
        out.data.extend(other.data.iter().cloned());
        out
    }

    /// Adds `block` into this matrix with its top-left corner at `(r0, c0)`.
    pub fn add_block(&mut self, r0: usize, c0: usize, block: &SparseMatrix) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols);
        for (r, c, v) in block.entries() {
            self.add_to(r0 + r, c0 + c, v);
        }
    }

    /// Matrix of `X ↦ left · X · right` acting on `X` flattened row-major.
    ///
    /// `X` has shape `left.cols × right.rows`; the image has shape
    /// `left.rows × right.cols`.
    pub fn sandwich_operator(left: &SparseMatrix, right: &SparseMatrix) -> SparseMatrix {
        let (a, b) = (left.cols, right.rows);
        let (a2, b2) = (left.rows, right.cols);
        let mut out = Self::zeros(a2 * b2, a * b);
        for (i2, i, l) in left.entries() {
            for (j, j2, r) in right.entries() {
                out.add_to(i2 * b2 + j2, i * b + j, &(l * r));
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        Echelon::compute(self, false, self.cols).pivots.len()
    }

    /// Basis of the right null space, one vector per non-pivot column.
    pub fn kernel_basis(&self) -> Vec<Vec<Rational>> {
        let ech = Echelon::compute(self, true, self.cols);
        ech.kernel_basis(self.cols)
    }

    /// Kernel basis packed as the columns of a matrix.
    pub fn kernel_matrix(&self) -> SparseMatrix {
        let ech = Echelon::compute(self, true, self.cols);
        let basis = ech.kernel_basis(self.cols);
        SparseMatrix::from_columns(self.cols, &basis)
    }

    /// Indices of a maximal set of linearly independent columns.
    pub fn independent_columns(&self) -> Vec<usize> {
        let ech = Echelon::compute(self, false, self.cols);
        let mut cols: Vec<usize> = ech.pivots.iter().map(|p| p.1).collect();
        cols.sort_unstable();
        cols
    }

    /// Basis of the column space, as columns of a matrix.
    pub fn column_space(&self) -> SparseMatrix {
        self.select_columns(&self.independent_columns())
    }

    /// Some solution `X` of `self · X = rhs`, or `None` if inconsistent.
    pub fn solve(&self, rhs: &SparseMatrix) -> Option<SparseMatrix> {
        assert_eq!(self.rows, rhs.rows, "row mismatch in solve");
        let aug = self.hstack(rhs);
        let ech = Echelon::compute(&aug, true, self.cols);
        let pivot_rows: BTreeSet<usize> = ech.pivots.iter().map(|p| p.0).collect();
        for (r, row) in ech.rows.iter().enumerate() {
            if !pivot_rows.contains(&r) && row.keys().any(|&c| c >= self.cols) {
                return None;
            }
        }
        let mut x = SparseMatrix::zeros(self.cols, rhs.cols);
        for &(r, pc) in &ech.pivots {
            let row = &ech.rows[r];
            let pv = &row[&pc];
            for (c, v) in row.range(self.cols..) {
                x.set(pc, c - self.cols, v / pv);
            }
        }
        Some(x)
    }

    /// Inverse of a square matrix, if it exists.
    pub fn inverse(&self) -> Option<SparseMatrix> {
        if self.rows != self.cols || self.rank() != self.rows {
            return None;
        }
        self.solve(&SparseMatrix::identity(self.rows))
    }

    /// Whether every column of `other` lies in the column space of `self`.
    pub fn spans(&self, other: &SparseMatrix) -> bool {
        self.solve(other).is_some()
    }

    pub fn apply(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols);
        self.data
            .iter()
            .map(|row| {
                row.iter()
                    .fold(Rational::zero(), |acc, (c, a)| acc + a * &v[*c])
            })
            .collect()
    }
}

/// Row reduction state with Markowitz-style pivot selection.
struct Echelon {
    rows: Vec<BTreeMap<usize, Rational>>,
    /// `(row, col)` of each pivot, in elimination order.
    pivots: Vec<(usize, usize)>,
}

impl Echelon {
    /// Reduces `m`. Pivots are only chosen among columns `< pivot_limit`.
    /// With `jordan`, pivot columns are cleared from every other row.
    fn compute(m: &SparseMatrix, jordan: bool, pivot_limit: usize) -> Echelon {
        let mut rows = m.data.clone();
        let ncols = m.cols;
        let mut col_rows: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); ncols];
        for (r, row) in rows.iter().enumerate() {
            for &c in row.keys() {
                col_rows[c].insert(r);
            }
        }
        let mut active: BTreeSet<usize> = rows
            .iter()
            .enumerate()
            .filter(|(_, row)| row.range(..pivot_limit).next().is_some())
            .map(|(r, _)| r)
            .collect();
        let mut pivots = Vec::new();

        while !active.is_empty() {
            // Sparsest active row, then its sparsest eligible column.
            let mut best: Option<(usize, usize, usize, usize)> = None;
            for &r in &active {
                let row_len = rows[r].range(..pivot_limit).count();
                if row_len == 0 {
                    continue;
                }
                if let Some((bl, _, _, _)) = best {
                    if row_len > bl {
                        continue;
                    }
                }
                for (&c, v) in rows[r].range(..pivot_limit) {
                    let unit = if v.is_integer() && v.abs().is_one() { 0 } else { 1 };
                    let cost = (col_rows[c].len() - 1) * (row_len - 1) * 2 + unit;
                    let better = match best {
                        None => true,
                        Some((bl, bc, _, _)) => row_len < bl || (row_len == bl && cost < bc),
                    };
                    if better {
                        best = Some((row_len, cost, r, c));
                    }
                }
            }
            let Some((_, _, pr, pc)) = best else { break };
            active.remove(&pr);
            pivots.push((pr, pc));

            let pivot_row = rows[pr].clone();
            let pivot_val = pivot_row[&pc].clone();
            let targets: Vec<usize> = col_rows[pc]
                .iter()
                .copied()
                .filter(|&r| r != pr && (jordan || active.contains(&r)))
                .collect();
            for r in targets {
                let factor = &rows[r][&pc] / &pivot_val;
                for (c, pv) in &pivot_row {
                    let delta = &factor * pv;
                    let entry = rows[r].get(c).cloned();
                    let next = match entry {
                        Some(old) => old - delta,
                        None => -delta,
                    };
                    if next.is_zero() {
                        rows[r].remove(c);
                        col_rows[*c].remove(&r);
                    } else {
                        rows[r].insert(*c, next);
                        col_rows[*c].insert(r);
                    }
                }
                if active.contains(&r) && rows[r].range(..pivot_limit).next().is_none() {
                    active.remove(&r);
                }
            }
        }
        Echelon { rows, pivots }
    }

    fn kernel_basis(&self, ncols: usize) -> Vec<Vec<Rational>> {
        let pivot_cols: BTreeSet<usize> = self.pivots.iter().map(|p| p.1).collect();
        let mut basis = Vec::new();
        for f in (0..ncols).filter(|c| !pivot_cols.contains(c)) {
            let mut v = vec![Rational::zero(); ncols];
            v[f] = Rational::one();
            for &(r, pc) in &self.pivots {
                if let Some(a) = self.rows[r].get(&f) {
                    v[pc] = -(a / &self.rows[r][&pc]);
                }
            }
            basis.push(v);
        }
        basis
    }
}
