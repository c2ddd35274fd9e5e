//! Dense bit-packed matrices over the two-element field.
//!
//! The sparse position-set form (`rows`, `cols`, `entries`) is the interchange
//! format; computations run on packed rows of `u64` words.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

/// A matrix over F2, stored as a set of nonzero positions plus packed rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct F2Matrix {
    rows: usize,
    cols: usize,
    /// rows * words_per_row packed bits, row-major.
    bits: Vec<u64>,
}

/// Serialized form: `rows`, `cols`, `entries: [[r,c]...]`.
#[derive(Serialize, Deserialize)]
pub struct F2MatrixRepr {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<(usize, usize)>,
}

impl F2Matrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        let w = cols.div_ceil(64);
        F2Matrix { rows, cols, bits: vec![0; rows * w] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = F2Matrix::zero(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_entries(rows: usize, cols: usize, entries: &[(usize, usize)]) -> Self {
        let mut m = F2Matrix::zero(rows, cols);
        for &(r, c) in entries {
            assert!(r < rows && c < cols, "entry ({r},{c}) out of bounds");
            m.set(r, c, true);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    fn words_per_row(&self) -> usize {
        self.cols.div_ceil(64)
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        let w = self.words_per_row();
        (self.bits[r * w + c / 64] >> (c % 64)) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        let w = self.words_per_row();
        let word = &mut self.bits[r * w + c / 64];
        if v {
            *word |= 1 << (c % 64);
        } else {
            *word &= !(1 << (c % 64));
        }
    }

    pub fn flip(&mut self, r: usize, c: usize) {
        let w = self.words_per_row();
        self.bits[r * w + c / 64] ^= 1 << (c % 64);
    }

    pub fn is_zero(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn entries(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) {
                    out.push((r, c));
                }
            }
        }
        out
    }

    pub fn to_repr(&self) -> F2MatrixRepr {
        F2MatrixRepr { rows: self.rows, cols: self.cols, entries: self.entries() }
    }

    pub fn from_repr(repr: &F2MatrixRepr) -> Self {
        let set: BTreeSet<(usize, usize)> = repr.entries.iter().copied().collect();
        let entries: Vec<_> = set.into_iter().collect();
        F2Matrix::from_entries(repr.rows, repr.cols, &entries)
    }

    fn row_xor(&mut self, dst: usize, src: usize) {
        let w = self.words_per_row();
        let (lo, hi) = if dst < src { (dst, src) } else { (src, dst) };
        let (a, b) = self.bits.split_at_mut(hi * w);
        let lo_row = &a[lo * w..lo * w + w];
        let hi_row = &mut b[..w];
        if dst > src {
            for i in 0..w {
                hi_row[i] ^= lo_row[i];
            }
        } else {
            for i in 0..w {
                a[lo * w + i] ^= hi_row[i];
            }
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let w = self.words_per_row();
        for i in 0..w {
            self.bits.swap(a * w + i, b * w + i);
        }
    }

    /// Row-reduce in place; returns (rank, pivot column per reduced row).
    pub fn row_reduce(&mut self) -> (usize, Vec<usize>) {
        let mut rank = 0;
        let mut pivots = Vec::new();
        for col in 0..self.cols {
            let mut pivot = None;
            for r in rank..self.rows {
                if self.get(r, col) {
                    pivot = Some(r);
                    break;
                }
            }
            let Some(p) = pivot else { continue };
            self.swap_rows(rank, p);
            for r in 0..self.rows {
                if r != rank && self.get(r, col) {
                    self.row_xor(r, rank);
                }
            }
            pivots.push(col);
            rank += 1;
            if rank == self.rows {
                break;
            }
        }
        (rank, pivots)
    }

    /// Rank by Gaussian elimination over F2.
    pub fn rank(&self) -> usize {
        self.clone().row_reduce().0
    }

    /// Matrix product (self * rhs).
    pub fn mul(&self, rhs: &F2Matrix) -> F2Matrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in mul");
        let mut out = F2Matrix::zero(self.rows, rhs.cols);
        let w_out = out.words_per_row();
        let w_rhs = rhs.words_per_row();
        for r in 0..self.rows {
            for k in 0..self.cols {
                if self.get(r, k) {
                    for i in 0..w_rhs {
                        out.bits[r * w_out + i] ^= rhs.bits[k * w_rhs + i];
                    }
                }
            }
        }
        out
    }

    /// Sum of two matrices of equal shape.
    pub fn add(&self, rhs: &F2Matrix) -> F2Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        for (a, b) in out.bits.iter_mut().zip(rhs.bits.iter()) {
            *a ^= b;
        }
        out
    }

    pub fn transpose(&self) -> F2Matrix {
        let mut out = F2Matrix::zero(self.cols, self.rows);
        for (r, c) in self.entries() {
            out.set(c, r, true);
        }
        out
    }

    /// Basis of the right kernel, as rows of the returned matrix.
    pub fn kernel_basis(&self) -> F2Matrix {
        let mut m = self.clone();
        let (rank, pivots) = m.row_reduce();
        let pivot_set: BTreeSet<usize> = pivots.iter().copied().collect();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivot_set.contains(c)).collect();
        let mut out = F2Matrix::zero(free.len(), self.cols);
        for (i, &fc) in free.iter().enumerate() {
            out.set(i, fc, true);
            for (row, &pc) in pivots.iter().enumerate().take(rank) {
                if m.get(row, fc) {
                    out.set(i, pc, true);
                }
            }
        }
        out
    }

    /// Solve self * x = b for a column vector b (given as bit rows of length
    /// self.rows). Returns one solution as a vector of length self.cols.
    pub fn solve(&self, b: &[bool]) -> Option<Vec<bool>> {
        assert_eq!(b.len(), self.rows);
        // Augment and reduce.
        let mut aug = F2Matrix::zero(self.rows, self.cols + 1);
        for (r, c) in self.entries() {
            aug.set(r, c, true);
        }
        for (r, &v) in b.iter().enumerate() {
            aug.set(r, self.cols, v);
        }
        let (_, pivots) = aug.row_reduce();
        if pivots.contains(&self.cols) {
            return None; // inconsistent
        }
        let mut x = vec![false; self.cols];
        for (row, &pc) in pivots.iter().enumerate() {
            x[pc] = aug.get(row, self.cols);
        }
        Some(x)
    }

    /// Apply the matrix to a vector (length = cols), producing length = rows.
    pub fn apply(&self, v: &[bool]) -> Vec<bool> {
        assert_eq!(v.len(), self.cols);
        let mut out = vec![false; self.rows];
        for (r, o) in out.iter_mut().enumerate() {
            let mut acc = false;
            for (c, &vc) in v.iter().enumerate() {
                if vc && self.get(r, c) {
                    acc = !acc;
                }
            }
            *o = acc;
        }
        out
    }

    /// Stack rows of `other` below `self` (same column count).
    pub fn vstack(&self, other: &F2Matrix) -> F2Matrix {
        assert_eq!(self.cols, other.cols);
        let mut out = F2Matrix::zero(self.rows + other.rows, self.cols);
        for (r, c) in self.entries() {
            out.set(r, c, true);
        }
        for (r, c) in other.entries() {
            out.set(self.rows + r, c, true);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rank_zero_matrix() {
        assert_eq!(F2Matrix::zero(4, 7).rank(), 0);
    }

    #[test]
    fn rank_identity() {
        assert_eq!(F2Matrix::identity(9).rank(), 9);
    }

    #[test]
    fn rank_all_ones_3x3() {
        let m = F2Matrix::from_entries(
            3,
            3,
            &[(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2), (2, 0), (2, 1), (2, 2)],
        );
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn kernel_of_identity_is_trivial() {
        let k = F2Matrix::identity(5).kernel_basis();
        assert_eq!(k.rows(), 0);
    }

    #[test]
    fn solve_simple() {
        // x0 + x1 = 1, x1 = 1 -> x0 = 0.
        let m = F2Matrix::from_entries(2, 2, &[(0, 0), (0, 1), (1, 1)]);
        let x = m.solve(&[true, true]).unwrap();
        assert_eq!(x, vec![false, true]);
        assert_eq!(m.apply(&x), vec![true, true]);
    }

    proptest! {
        #[test]
        fn kernel_vectors_are_killed(entries in proptest::collection::vec((0usize..8, 0usize..10), 0..40)) {
            let m = F2Matrix::from_entries(8, 10, &entries);
            let k = m.kernel_basis();
            for i in 0..k.rows() {
                let v: Vec<bool> = (0..10).map(|c| k.get(i, c)).collect();
                prop_assert!(m.apply(&v).iter().all(|&b| !b));
            }
            prop_assert_eq!(m.rank() + k.rows(), 10);
        }

        #[test]
        fn transpose_preserves_rank(entries in proptest::collection::vec((0usize..7, 0usize..7), 0..30)) {
            let m = F2Matrix::from_entries(7, 7, &entries);
            prop_assert_eq!(m.rank(), m.transpose().rank());
        }
    }
}
