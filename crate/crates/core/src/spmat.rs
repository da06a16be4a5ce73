//! Rectangular sparse matrices over an [`Element`] domain and the
//! generalized multiply `C(i,j) = ⊕_k f(A(i,k), B(k,j))`.
//!
//! Storage is compressed-row with columns sorted inside each row, so entry
//! order is row-major and deterministic. [`SparseMatrix::iter`] is the
//! coordinate view. Entries equal to the domain's sentinel are never
//! stored; every constructor and operation drops them.

use std::ops::Range;

use rayon::prelude::*;
use thiserror::Error;

use crate::algebra::{Algebra, Element, Weight};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpmatError {
    #[error("dimension mismatch: {op} of {lhs:?} and {rhs:?}")]
    DimensionMismatch {
        op: &'static str,
        lhs: (usize, usize),
        rhs: (usize, usize),
    },
    #[error("entry ({row}, {col}) out of bounds for a {n_rows}x{n_cols} matrix")]
    OutOfBounds {
        row: usize,
        col: usize,
        n_rows: usize,
        n_cols: usize,
    },
    #[error("duplicate entry at ({row}, {col})")]
    DuplicateEntry { row: usize, col: usize },
}

/// Number of elementwise products performed by a multiply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct FlopCount(pub u64);

#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix<T> {
    n_rows: usize,
    n_cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<T>,
}

impl<T: Element> SparseMatrix<T> {
    pub fn empty(n_rows: usize, n_cols: usize) -> Self {
        SparseMatrix {
            n_rows,
            n_cols,
            row_ptr: vec![0; n_rows + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Builds a matrix from coordinate triplets in any order. Duplicate
    /// coordinates are rejected; sentinel values are dropped.
    pub fn from_triplets(
        n_rows: usize,
        n_cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, T)>,
    ) -> Result<Self, SpmatError> {
        let mut entries: Vec<(usize, usize, T)> = triplets.into_iter().collect();
        for &(row, col, _) in &entries {
            if row >= n_rows || col >= n_cols {
                return Err(SpmatError::OutOfBounds { row, col, n_rows, n_cols });
            }
        }
        entries.sort_by_key(|&(r, c, _)| (r, c));
        if let Some(w) = entries.windows(2).find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
            return Err(SpmatError::DuplicateEntry { row: w[0].0, col: w[0].1 });
        }
        entries.retain(|(_, _, v)| !v.is_sentinel());
        Ok(Self::from_sorted_unique(n_rows, n_cols, entries))
    }

    /// Like [`from_triplets`](Self::from_triplets) but duplicate coordinates
    /// are merged with `combine`, in input order.
    pub fn from_triplets_combine(
        n_rows: usize,
        n_cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, T)>,
        combine: fn(T, T) -> T,
    ) -> Result<Self, SpmatError> {
        let mut entries: Vec<(usize, usize, T)> = triplets.into_iter().collect();
        for &(row, col, _) in &entries {
            if row >= n_rows || col >= n_cols {
                return Err(SpmatError::OutOfBounds { row, col, n_rows, n_cols });
            }
        }
        // stable: equal coordinates keep input order
        entries.sort_by_key(|&(r, c, _)| (r, c));
        let mut merged: Vec<(usize, usize, T)> = Vec::with_capacity(entries.len());
        for (r, c, v) in entries {
            match merged.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 = combine(last.2, v),
                _ => merged.push((r, c, v)),
            }
        }
        merged.retain(|(_, _, v)| !v.is_sentinel());
        Ok(Self::from_sorted_unique(n_rows, n_cols, merged))
    }

    fn from_sorted_unique(n_rows: usize, n_cols: usize, entries: Vec<(usize, usize, T)>) -> Self {
        let mut row_ptr = vec![0usize; n_rows + 1];
        let mut col_idx = Vec::with_capacity(entries.len());
        let mut values = Vec::with_capacity(entries.len());
        for (r, c, v) in entries {
            row_ptr[r + 1] += 1;
            col_idx.push(c);
            values.push(v);
        }
        for i in 0..n_rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        SparseMatrix { n_rows, n_cols, row_ptr, col_idx, values }
    }

    fn from_rows(n_rows: usize, n_cols: usize, rows: Vec<(Vec<usize>, Vec<T>)>) -> Self {
        let nnz = rows.iter().map(|(c, _)| c.len()).sum();
        let mut row_ptr = Vec::with_capacity(n_rows + 1);
        let mut col_idx = Vec::with_capacity(nnz);
        let mut values = Vec::with_capacity(nnz);
        row_ptr.push(0);
        for (cols, vals) in rows {
            col_idx.extend(cols);
            values.extend(vals);
            row_ptr.push(col_idx.len());
        }
        SparseMatrix { n_rows, n_cols, row_ptr, col_idx, values }
    }

    #[inline]
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    #[inline]
    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.n_rows, self.n_cols)
    }

    #[inline]
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Column indices and values stored in row `i`.
    #[inline]
    pub fn row(&self, i: usize) -> (&[usize], &[T]) {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[span.clone()], &self.values[span])
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&T> {
        if i >= self.n_rows {
            return None;
        }
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).ok().map(|k| &vals[k])
    }

    /// Coordinate view in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &T)> + '_ {
        (0..self.n_rows).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, v)| (i, j, v))
        })
    }

    pub fn triplets(&self) -> Vec<(usize, usize, T)> {
        self.iter().map(|(i, j, &v)| (i, j, v)).collect()
    }

    /// Applies `f` to every stored value; results equal to the sentinel of
    /// the target domain are dropped.
    pub fn map<U: Element>(&self, mut f: impl FnMut(usize, usize, &T) -> U) -> SparseMatrix<U> {
        let rows = (0..self.n_rows)
            .map(|i| {
                let (cols, vals) = self.row(i);
                let mut out_c = Vec::with_capacity(cols.len());
                let mut out_v = Vec::with_capacity(cols.len());
                for (&j, v) in cols.iter().zip(vals) {
                    let u = f(i, j, v);
                    if !u.is_sentinel() {
                        out_c.push(j);
                        out_v.push(u);
                    }
                }
                (out_c, out_v)
            })
            .collect();
        SparseMatrix::from_rows(self.n_rows, self.n_cols, rows)
    }

    /// Keeps exactly the entries for which `keep` holds.
    pub fn sparsify(&self, mut keep: impl FnMut(usize, usize, &T) -> bool) -> Self {
        let rows = (0..self.n_rows)
            .map(|i| {
                let (cols, vals) = self.row(i);
                let mut out_c = Vec::new();
                let mut out_v = Vec::new();
                for (&j, v) in cols.iter().zip(vals) {
                    if keep(i, j, v) {
                        out_c.push(j);
                        out_v.push(*v);
                    }
                }
                (out_c, out_v)
            })
            .collect();
        SparseMatrix::from_rows(self.n_rows, self.n_cols, rows)
    }

    pub fn transpose(&self) -> Self {
        let mut counts = vec![0usize; self.n_cols + 1];
        for &j in &self.col_idx {
            counts[j + 1] += 1;
        }
        for j in 0..self.n_cols {
            counts[j + 1] += counts[j];
        }
        let row_ptr = counts.clone();
        let mut next = counts;
        let mut col_idx = vec![0usize; self.nnz()];
        let mut values: Vec<Option<T>> = vec![None; self.nnz()];
        // visiting rows in order leaves each output row sorted
        for (i, j, v) in self.iter() {
            let slot = next[j];
            next[j] += 1;
            col_idx[slot] = i;
            values[slot] = Some(*v);
        }
        SparseMatrix {
            n_rows: self.n_cols,
            n_cols: self.n_rows,
            row_ptr,
            col_idx,
            values: values.into_iter().map(|v| v.expect("every slot filled")).collect(),
        }
    }

    /// Union of supports; `op` applied where both are stored.
    pub fn elementwise_combine(&self, other: &Self, op: fn(T, T) -> T) -> Result<Self, SpmatError> {
        self.check_same_shape(other, "elementwise_combine")?;
        let rows = (0..self.n_rows)
            .map(|i| {
                let (ca, va) = self.row(i);
                let (cb, vb) = other.row(i);
                let mut out_c = Vec::with_capacity(ca.len() + cb.len());
                let mut out_v = Vec::with_capacity(ca.len() + cb.len());
                let (mut x, mut y) = (0, 0);
                while x < ca.len() || y < cb.len() {
                    let (j, v) = if y >= cb.len() || (x < ca.len() && ca[x] < cb[y]) {
                        x += 1;
                        (ca[x - 1], va[x - 1])
                    } else if x >= ca.len() || cb[y] < ca[x] {
                        y += 1;
                        (cb[y - 1], vb[y - 1])
                    } else {
                        x += 1;
                        y += 1;
                        (ca[x - 1], op(va[x - 1], vb[y - 1]))
                    };
                    if !v.is_sentinel() {
                        out_c.push(j);
                        out_v.push(v);
                    }
                }
                (out_c, out_v)
            })
            .collect();
        Ok(SparseMatrix::from_rows(self.n_rows, self.n_cols, rows))
    }

    /// Combines `other` into `self` restricted to the support of `self`:
    /// entries of `other` at coordinates not stored in `self` are ignored.
    pub fn combine_on_support(&self, other: &Self, op: fn(T, T) -> T) -> Result<Self, SpmatError> {
        self.check_same_shape(other, "combine_on_support")?;
        let rows = (0..self.n_rows)
            .map(|i| {
                let (ca, va) = self.row(i);
                let (cb, vb) = other.row(i);
                let mut out_c = Vec::with_capacity(ca.len());
                let mut out_v = Vec::with_capacity(ca.len());
                let mut y = 0;
                for (&j, &a) in ca.iter().zip(va) {
                    while y < cb.len() && cb[y] < j {
                        y += 1;
                    }
                    let v = if y < cb.len() && cb[y] == j { op(a, vb[y]) } else { a };
                    if !v.is_sentinel() {
                        out_c.push(j);
                        out_v.push(v);
                    }
                }
                (out_c, out_v)
            })
            .collect();
        Ok(SparseMatrix::from_rows(self.n_rows, self.n_cols, rows))
    }

    /// Reorders rows and columns: entry `(i, j)` of the result is entry
    /// `(row_order[i], col_order[j])` of `self`. Both orders must be
    /// permutations.
    pub fn permuted(&self, row_order: &[usize], col_order: &[usize]) -> Self {
        assert_eq!(row_order.len(), self.n_rows, "row order length");
        assert_eq!(col_order.len(), self.n_cols, "column order length");
        let mut col_inverse = vec![usize::MAX; self.n_cols];
        for (new, &old) in col_order.iter().enumerate() {
            col_inverse[old] = new;
        }
        let rows = row_order
            .iter()
            .map(|&old| {
                let (cols, vals) = self.row(old);
                let mut pairs: Vec<(usize, T)> =
                    cols.iter().zip(vals).map(|(&j, &v)| (col_inverse[j], v)).collect();
                pairs.sort_by_key(|&(j, _)| j);
                pairs.into_iter().unzip()
            })
            .collect();
        SparseMatrix::from_rows(self.n_rows, self.n_cols, rows)
    }

    /// The sub-block `rows x cols`, re-indexed from zero.
    pub fn block(&self, rows: Range<usize>, cols: Range<usize>) -> Self {
        let out_rows = rows
            .clone()
            .map(|i| {
                let (c, v) = self.row(i);
                let lo = c.partition_point(|&j| j < cols.start);
                let hi = c.partition_point(|&j| j < cols.end);
                (c[lo..hi].iter().map(|&j| j - cols.start).collect(), v[lo..hi].to_vec())
            })
            .collect();
        SparseMatrix::from_rows(rows.len(), cols.len(), out_rows)
    }

    /// Number of stored entries inside the sub-block `rows x cols`.
    pub fn block_nnz(&self, rows: Range<usize>, cols: Range<usize>) -> usize {
        rows.map(|i| {
            let (c, _) = self.row(i);
            c.partition_point(|&j| j < cols.end) - c.partition_point(|&j| j < cols.start)
        })
        .sum()
    }

    /// Places `self` at offset `(row0, col0)` inside a larger empty matrix.
    pub fn embed(&self, n_rows: usize, n_cols: usize, row0: usize, col0: usize) -> Self {
        assert!(row0 + self.n_rows <= n_rows && col0 + self.n_cols <= n_cols, "block does not fit");
        let rows = (0..n_rows)
            .map(|i| {
                if i < row0 || i >= row0 + self.n_rows {
                    (Vec::new(), Vec::new())
                } else {
                    let (c, v) = self.row(i - row0);
                    (c.iter().map(|&j| j + col0).collect(), v.to_vec())
                }
            })
            .collect();
        SparseMatrix::from_rows(n_rows, n_cols, rows)
    }

    /// True when no stored entry is a sentinel and the compressed-row
    /// structure is well formed.
    pub fn check_invariants(&self) -> bool {
        self.row_ptr.len() == self.n_rows + 1
            && self.row_ptr[0] == 0
            && self.row_ptr[self.n_rows] == self.values.len()
            && self.col_idx.len() == self.values.len()
            && (0..self.n_rows).all(|i| {
                let (c, _) = self.row(i);
                c.windows(2).all(|w| w[0] < w[1]) && c.iter().all(|&j| j < self.n_cols)
            })
            && self.values.iter().all(|v| !v.is_sentinel())
    }

    fn check_same_shape(&self, other: &Self, op: &'static str) -> Result<(), SpmatError> {
        if self.shape() != other.shape() {
            return Err(SpmatError::DimensionMismatch { op, lhs: self.shape(), rhs: other.shape() });
        }
        Ok(())
    }
}

/// Sparse accumulator reused across the rows handled by one worker.
struct Accumulator<T> {
    slots: Vec<Option<T>>,
    touched: Vec<usize>,
}

/// Generalized multiply `C(i,j) = ⊕_k f(A(i,k), B(k,j))` over all `k` where
/// both operands are stored. Each output entry is reduced in ascending `k`
/// order, so the result does not depend on the thread schedule.
pub fn mm_general<T: Element>(
    a: &SparseMatrix<T>,
    b: &SparseMatrix<Weight>,
    algebra: Algebra<T>,
) -> Result<(SparseMatrix<T>, FlopCount), SpmatError> {
    if a.n_cols != b.n_rows {
        return Err(SpmatError::DimensionMismatch { op: "mm_general", lhs: a.shape(), rhs: b.shape() });
    }
    let n_cols = b.n_cols;
    let rows: Vec<(Vec<usize>, Vec<T>, u64)> = (0..a.n_rows)
        .into_par_iter()
        .with_min_len(64)
        .map_init(
            || Accumulator { slots: Vec::new(), touched: Vec::new() },
            |acc, i| {
                if acc.slots.len() < n_cols {
                    acc.slots.resize(n_cols, None);
                }
                let mut flops = 0u64;
                let (a_cols, a_vals) = a.row(i);
                for (&k, &x) in a_cols.iter().zip(a_vals) {
                    let (b_cols, b_vals) = b.row(k);
                    flops += b_cols.len() as u64;
                    for (&j, &w) in b_cols.iter().zip(b_vals) {
                        let prod = (algebra.action)(x, w);
                        match &mut acc.slots[j] {
                            Some(cur) => *cur = (algebra.combine)(*cur, prod),
                            slot @ None => {
                                *slot = Some(prod);
                                acc.touched.push(j);
                            }
                        }
                    }
                }
                acc.touched.sort_unstable();
                let mut out_c = Vec::with_capacity(acc.touched.len());
                let mut out_v = Vec::with_capacity(acc.touched.len());
                for &j in &acc.touched {
                    let v = acc.slots[j].take().expect("touched slot holds a value");
                    if !v.is_sentinel() {
                        out_c.push(j);
                        out_v.push(v);
                    }
                }
                acc.touched.clear();
                (out_c, out_v, flops)
            },
        )
        .collect();
    let flops = rows.iter().map(|r| r.2).sum();
    let rows = rows.into_iter().map(|(c, v, _)| (c, v)).collect();
    Ok((SparseMatrix::from_rows(a.n_rows, n_cols, rows), FlopCount(flops)))
}

#[cfg(test)]
#[allow(clippy::needless_range_loop)]
mod tests {
    use super::*;
    use crate::algebra::{multpath_combine, Multpath};
    use proptest::prelude::*;

    fn mp(w: f64, m: f64) -> Multpath {
        Multpath::new(w, m)
    }

    fn w(v: f64) -> Weight {
        Weight::raw(v)
    }

    /// Symmetric path 0-1-2 with unit weights.
    fn path3() -> SparseMatrix<Weight> {
        SparseMatrix::from_triplets(
            3,
            3,
            [(0, 1, w(1.0)), (1, 0, w(1.0)), (1, 2, w(1.0)), (2, 1, w(1.0))],
        )
        .unwrap()
    }

    #[test]
    fn multiply_path_row() {
        let a = SparseMatrix::from_triplets(1, 3, [(0, 1, mp(1.0, 1.0))]).unwrap();
        let (c, flops) = mm_general(&a, &path3(), Algebra::bellman_ford()).unwrap();
        assert_eq!(c.triplets(), vec![(0, 0, mp(2.0, 1.0)), (0, 2, mp(2.0, 1.0))]);
        assert_eq!(flops, FlopCount(2));
    }

    #[test]
    fn multiply_empty_operand() {
        let a = SparseMatrix::<Multpath>::empty(2, 3);
        let (c, flops) = mm_general(&a, &path3(), Algebra::bellman_ford()).unwrap();
        assert!(c.is_empty());
        assert_eq!(flops, FlopCount(0));
    }

    #[test]
    fn multiply_equal_weight_products_merge() {
        let a = SparseMatrix::from_triplets(1, 2, [(0, 0, mp(0.0, 1.0)), (0, 1, mp(0.0, 1.0))]).unwrap();
        let b = SparseMatrix::from_triplets(2, 1, [(0, 0, w(2.0)), (1, 0, w(2.0))]).unwrap();
        let (c, flops) = mm_general(&a, &b, Algebra::bellman_ford()).unwrap();
        assert_eq!(c.triplets(), vec![(0, 0, mp(2.0, 2.0))]);
        assert_eq!(flops, FlopCount(2));
    }

    #[test]
    fn multiply_dimension_mismatch() {
        let a = SparseMatrix::<Multpath>::empty(1, 2);
        assert!(matches!(
            mm_general(&a, &path3(), Algebra::bellman_ford()),
            Err(SpmatError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn tropical_bfs_on_path() {
        // distance vector from vertex 0, iterated x <- min(x, x (min.+) A)
        let mut x = SparseMatrix::from_triplets(1, 3, [(0, 0, w(0.0))]).unwrap();
        for _ in 0..3 {
            let (y, _) = mm_general(&x, &path3(), Algebra::tropical()).unwrap();
            x = x.elementwise_combine(&y, Algebra::tropical().combine).unwrap();
        }
        let d: Vec<f64> = (0..3).map(|j| x.get(0, j).unwrap().value()).collect();
        assert_eq!(d, vec![0.0, 1.0, 2.0]);
    }

    #[test]
    fn infinite_products_are_not_stored() {
        let a = SparseMatrix::from_triplets(1, 1, [(0, 0, w(1.0))]).unwrap();
        let b = SparseMatrix::from_triplets(1, 1, [(0, 0, w(1.0))]).unwrap();
        let inf_action = Algebra::<Weight> { action: |_, _| Weight::INFINITY, combine: |x, _| x };
        let (c, flops) = mm_general(&a, &b, inf_action).unwrap();
        assert!(c.is_empty());
        assert_eq!(flops, FlopCount(1));
    }

    #[test]
    fn elementwise_examples() {
        let x = SparseMatrix::from_triplets(2, 2, [(0, 0, mp(2.0, 3.0))]).unwrap();
        let y = SparseMatrix::from_triplets(2, 2, [(0, 0, mp(2.0, 4.0))]).unwrap();
        let e = SparseMatrix::<Multpath>::empty(2, 2);
        assert_eq!(x.elementwise_combine(&y, multpath_combine).unwrap().triplets(), vec![(0, 0, mp(2.0, 7.0))]);
        assert_eq!(x.elementwise_combine(&e, multpath_combine).unwrap(), x);
        let p = SparseMatrix::from_triplets(2, 2, [(0, 0, mp(5.0, 1.0))]).unwrap();
        let q = SparseMatrix::from_triplets(2, 2, [(1, 1, mp(1.0, 1.0))]).unwrap();
        assert_eq!(p.elementwise_combine(&q, multpath_combine).unwrap().nnz(), 2);
        assert!(matches!(
            x.elementwise_combine(&SparseMatrix::empty(3, 2), multpath_combine),
            Err(SpmatError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn combine_on_support_ignores_foreign_entries() {
        let x = SparseMatrix::from_triplets(1, 3, [(0, 1, mp(2.0, 1.0))]).unwrap();
        let y = SparseMatrix::from_triplets(1, 3, [(0, 0, mp(1.0, 1.0)), (0, 1, mp(2.0, 2.0))]).unwrap();
        assert_eq!(x.combine_on_support(&y, multpath_combine).unwrap().triplets(), vec![(0, 1, mp(2.0, 3.0))]);
    }

    #[test]
    fn transpose_examples() {
        let a = SparseMatrix::from_triplets(3, 3, [(0, 1, w(1.0))]).unwrap();
        assert_eq!(a.transpose().triplets(), vec![(1, 0, w(1.0))]);
        assert_eq!(path3().transpose(), path3());
    }

    #[test]
    fn sparsify_examples() {
        let a = path3();
        assert!(a.sparsify(|_, _, _| false).is_empty());
        assert_eq!(a.sparsify(|_, _, _| true), a);
        // frontier filter: drop m = 0 or w > T.w
        let t = SparseMatrix::from_triplets(1, 2, [(0, 0, mp(2.0, 1.0)), (0, 1, mp(3.0, 1.0))]).unwrap();
        let g = SparseMatrix::from_triplets(1, 2, [(0, 0, mp(4.0, 1.0)), (0, 1, mp(3.0, 2.0))]).unwrap();
        let f = g.sparsify(|i, j, x| !(x.m == 0.0 || x.w > t.get(i, j).unwrap().w));
        assert_eq!(f.triplets(), vec![(0, 1, mp(3.0, 2.0))]);
    }

    #[test]
    fn triplet_validation() {
        assert!(matches!(
            SparseMatrix::from_triplets(2, 2, [(2, 0, w(1.0))]),
            Err(SpmatError::OutOfBounds { .. })
        ));
        assert!(matches!(
            SparseMatrix::from_triplets(2, 2, [(0, 0, w(1.0)), (0, 0, w(2.0))]),
            Err(SpmatError::DuplicateEntry { .. })
        ));
        let a = SparseMatrix::from_triplets(2, 2, [(0, 0, Weight::INFINITY), (1, 1, w(1.0))]).unwrap();
        assert_eq!(a.nnz(), 1);
        assert!(a.check_invariants());
    }

    #[test]
    fn block_and_embed() {
        let a = SparseMatrix::from_triplets(4, 4, [(0, 0, w(1.0)), (1, 2, w(2.0)), (3, 3, w(3.0))]).unwrap();
        let b = a.block(1..4, 2..4);
        assert_eq!(b.triplets(), vec![(0, 0, w(2.0)), (2, 1, w(3.0))]);
        assert_eq!(a.block_nnz(1..4, 2..4), 2);
        assert_eq!(b.embed(4, 4, 1, 2).triplets(), vec![(1, 2, w(2.0)), (3, 3, w(3.0))]);
    }

    fn arb_matrix(max_dim: usize) -> impl Strategy<Value = (usize, usize, Vec<(usize, usize, u8)>)> {
        (1..=max_dim, 1..=max_dim).prop_flat_map(|(r, c)| {
            let cells = proptest::collection::vec((0..r, 0..c, 1u8..5), 0..(r * c).min(40));
            (Just(r), Just(c), cells)
        })
    }

    fn dedup(cells: Vec<(usize, usize, u8)>) -> Vec<(usize, usize, u8)> {
        let mut seen = std::collections::BTreeMap::new();
        for (i, j, v) in cells {
            seen.entry((i, j)).or_insert(v);
        }
        seen.into_iter().map(|((i, j), v)| (i, j, v)).collect()
    }

    proptest! {
        #[test]
        fn flops_and_product_match_dense_triple_loop(
            (r, k, a_cells) in arb_matrix(16),
            c in 1usize..=16,
            b_seed in proptest::collection::vec((0usize..16, 0usize..16, 1u8..5), 0..60),
        ) {
            let a_cells = dedup(a_cells);
            let b_cells = dedup(b_seed.into_iter().filter(|&(i, j, _)| i < k && j < c).collect());
            let a = SparseMatrix::from_triplets(
                r, k, a_cells.iter().map(|&(i, j, v)| (i, j, mp(f64::from(v), 1.0)))).unwrap();
            let b = SparseMatrix::from_triplets(
                k, c, b_cells.iter().map(|&(i, j, v)| (i, j, w(f64::from(v))))).unwrap();
            let (prod, flops) = mm_general(&a, &b, Algebra::bellman_ford()).unwrap();

            let mut dense_a = vec![vec![None; k]; r];
            for &(i, j, v) in &a_cells { dense_a[i][j] = Some(f64::from(v)); }
            let mut dense_b = vec![vec![None; c]; k];
            for &(i, j, v) in &b_cells { dense_b[i][j] = Some(f64::from(v)); }
            let mut count = 0u64;
            for i in 0..r {
                for j in 0..c {
                    let mut best: Option<(f64, f64)> = None;
                    for kk in 0..k {
                        if let (Some(x), Some(y)) = (dense_a[i][kk], dense_b[kk][j]) {
                            count += 1;
                            let cand = x + y;
                            best = match best {
                                None => Some((cand, 1.0)),
                                Some((bw, _)) if cand < bw => Some((cand, 1.0)),
                                Some((bw, bm)) if cand == bw => Some((bw, bm + 1.0)),
                                keep => keep,
                            };
                        }
                    }
                    let got = prod.get(i, j).map(|x| (x.w.value(), x.m));
                    prop_assert_eq!(got, best);
                }
            }
            prop_assert_eq!(flops, FlopCount(count));
            prop_assert!(prod.check_invariants());
        }

        #[test]
        fn transpose_is_an_involution((r, c, cells) in arb_matrix(12)) {
            let a = SparseMatrix::from_triplets(
                r, c, dedup(cells).into_iter().map(|(i, j, v)| (i, j, w(f64::from(v))))).unwrap();
            prop_assert_eq!(a.transpose().transpose(), a.clone());
            prop_assert!(a.transpose().check_invariants());
        }
    }
}
