use std::collections::BTreeMap;

use rayon::prelude::*;

use super::SparseMatrix;
use crate::error::{Error, Result};

/// A bounded cochain complex of finite-dimensional rational vector spaces.
///
/// Degrees run over `lo..=hi`. The differential `d(r)` has shape `dim(r+1) x dim(r)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedComplex {
    lo: i32,
    dims: Vec<usize>,
    diffs: Vec<SparseMatrix>,
}

impl GradedComplex {
    /// Builds a complex from `dims[k]` in degree `lo + k` and `diffs[k] = d(lo + k)`.
    ///
    /// Shapes are checked; `d∘d = 0` is checked too.
    pub fn new(lo: i32, dims: Vec<usize>, diffs: Vec<SparseMatrix>) -> Result<Self> {
        let c = Self::new_unchecked(lo, dims, diffs)?;
        c.check_square_zero()?;
        Ok(c)
    }

    /// As [`GradedComplex::new`] but skips the `d∘d = 0` check.
    pub fn new_unchecked(lo: i32, dims: Vec<usize>, diffs: Vec<SparseMatrix>) -> Result<Self> {
        if !dims.is_empty() && diffs.len() + 1 != dims.len() {
            return Err(Error::MalformedInput(format!(
                "{} degrees need {} differentials, got {}",
                dims.len(),
                dims.len() - 1,
                diffs.len()
            )));
        }
        for (k, d) in diffs.iter().enumerate() {
            if d.shape() != (dims[k + 1], dims[k]) {
                return Err(Error::MalformedInput(format!(
                    "differential in degree {} has shape {:?}, expected {:?}",
                    lo + k as i32,
                    d.shape(),
                    (dims[k + 1], dims[k])
                )));
            }
        }
        Ok(GradedComplex { lo, dims, diffs })
    }

    /// Builds a complex from a map degree → dim and degree → differential.
    /// Missing degrees in the interval get dimension 0.
    pub fn from_maps(
        dims: &BTreeMap<i32, usize>,
        diffs: &BTreeMap<i32, SparseMatrix>,
    ) -> Result<Self> {
        let (Some(&lo), Some(&hi)) = (dims.keys().next(), dims.keys().next_back()) else {
            return Ok(Self::zero());
        };
        let dv: Vec<usize> = (lo..=hi).map(|r| dims.get(&r).copied().unwrap_or(0)).collect();
        let mut dm = Vec::new();
        for r in lo..hi {
            let k = (r - lo) as usize;
            let d = diffs
                .get(&r)
                .cloned()
                .unwrap_or_else(|| SparseMatrix::zeros(dv[k + 1], dv[k]));
            dm.push(d);
        }
        Self::new(lo, dv, dm)
    }

    pub fn zero() -> Self {
        GradedComplex {
            lo: 0,
            dims: Vec::new(),
            diffs: Vec::new(),
        }
    }

    pub fn lo(&self) -> i32 {
        self.lo
    }

    pub fn hi(&self) -> i32 {
        self.lo + self.dims.len() as i32 - 1
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i32> {
        self.lo..=self.hi()
    }

    pub fn dim(&self, r: i32) -> usize {
        if r < self.lo || r > self.hi() {
            0
        } else {
            self.dims[(r - self.lo) as usize]
        }
    }

    /// `d(r)`, or `None` outside the stored range.
    pub fn differential(&self, r: i32) -> Option<&SparseMatrix> {
        if r < self.lo || r >= self.hi() {
            None
        } else {
            Some(&self.diffs[(r - self.lo) as usize])
        }
    }

    fn check_square_zero(&self) -> Result<()> {
        let bad = (1..self.diffs.len())
            .into_par_iter()
            .find_first(|&k| !self.diffs[k].mul(&self.diffs[k - 1]).is_zero());
        match bad {
            Some(k) => Err(Error::NotAComplex {
                degree: self.lo + k as i32 - 1,
            }),
            None => Ok(()),
        }
    }

    /// Dimension of cohomology in every degree of the support.
    pub fn homology(&self) -> BTreeMap<i32, usize> {
        let ranks: Vec<usize> = self.diffs.par_iter().map(|d| d.rank()).collect();
        let mut out = BTreeMap::new();
        for (k, &dim) in self.dims.iter().enumerate() {
            let out_rank = ranks.get(k).copied().unwrap_or(0);
            let in_rank = if k == 0 { 0 } else { ranks[k - 1] };
            out.insert(self.lo + k as i32, dim - out_rank - in_rank);
        }
        out
    }

    /// Σ (−1)^r dim C^r.
    pub fn euler_characteristic(&self) -> i64 {
        self.degrees()
            .map(|r| if r.rem_euclid(2) == 0 { 1 } else { -1 } * self.dim(r) as i64)
            .sum()
    }
}

/// Σ (−1)^r h(r) of a cohomology table.
pub fn alternating_sum(h: &BTreeMap<i32, usize>) -> i64 {
    h.iter()
        .map(|(&r, &v)| if r.rem_euclid(2) == 0 { v as i64 } else { -(v as i64) })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_term() {
        let c = GradedComplex::new(0, vec![1], vec![]).unwrap();
        assert_eq!(c.homology()[&0], 1);
    }

    #[test]
    fn isomorphism_is_acyclic() {
        let c = GradedComplex::new(0, vec![1, 1], vec![SparseMatrix::from_i64(&[&[1]])]).unwrap();
        assert!(c.homology().values().all(|&h| h == 0));
    }

    #[test]
    fn rejects_nonzero_square() {
        let d = SparseMatrix::from_i64(&[&[1]]);
        let err = GradedComplex::new(0, vec![1, 1, 1], vec![d.clone(), d]).unwrap_err();
        assert_eq!(err, Error::NotAComplex { degree: 0 });
    }

    #[test]
    fn circle_cochains() {
        // ∂Δ² with vertices 0,1,2 and edges 01,02,12; coboundary is the transposed boundary.
        let boundary =
            SparseMatrix::from_i64(&[&[-1, -1, 0], &[1, 0, -1], &[0, 1, 1]]);
        let c = GradedComplex::new(0, vec![3, 3], vec![boundary.transpose()]).unwrap();
        let h = c.homology();
        assert_eq!((h[&0], h[&1]), (1, 1));
    }
}
