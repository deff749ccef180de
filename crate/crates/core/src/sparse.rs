//! Compressed-row sparse matrices and a direct sparse LU wrapper.

use crate::error::{Error, Result};
use faer::sparse::linalg::solvers::Lu;
use faer::sparse::{SparseColMat, Triplet};
use faer::prelude::Solve;
use faer::Mat;

/// Compressed sparse row matrix. Column indices are sorted and unique within a row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Build from `(row, col, value)` triplets; duplicates are summed in input order.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut counts = vec![0usize; nrows + 1];
        for &(r, c, _) in triplets {
            assert!(r < nrows && c < ncols, "triplet ({r}, {c}) out of bounds");
            counts[r + 1] += 1;
        }
        for i in 0..nrows {
            counts[i + 1] += counts[i];
        }
        let mut cursor = counts.clone();
        let mut cols = vec![0usize; triplets.len()];
        let mut vals = vec![0.0; triplets.len()];
        for &(r, c, v) in triplets {
            cols[cursor[r]] = c;
            vals[cursor[r]] = v;
            cursor[r] += 1;
        }
        let mut row_offsets = Vec::with_capacity(nrows + 1);
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        row_offsets.push(0);
        let mut scratch: Vec<(usize, f64)> = Vec::new();
        for r in 0..nrows {
            scratch.clear();
            scratch.extend((counts[r]..counts[r + 1]).map(|k| (cols[k], vals[k])));
            // stable sort keeps the summation order deterministic
            scratch.sort_by_key(|&(c, _)| c);
            for &(c, v) in &scratch {
                match col_indices.last() {
                    Some(&last) if last == c && col_indices.len() > row_offsets[r] => {
                        *values.last_mut().unwrap() += v;
                    }
                    _ => {
                        col_indices.push(c);
                        values.push(v);
                    }
                }
            }
            row_offsets.push(col_indices.len());
        }
        Self {
            nrows,
            ncols,
            row_offsets,
            col_indices,
            values,
        }
    }

    pub fn identity(n: usize) -> Self {
        let t: Vec<_> = (0..n).map(|i| (i, i, 1.0)).collect();
        Self::from_triplets(n, n, &t)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Iterate `(col, value)` over the stored entries of `row`.
    pub fn row(&self, row: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_offsets[row]..self.row_offsets[row + 1];
        self.col_indices[range.clone()]
            .iter()
            .copied()
            .zip(self.values[range].iter().copied())
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        let range = self.row_offsets[row]..self.row_offsets[row + 1];
        match self.col_indices[range.clone()].binary_search(&col) {
            Ok(k) => self.values[range.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols);
        (0..self.nrows)
            .map(|r| self.row(r).map(|(c, v)| v * x[c]).sum())
            .collect()
    }

    /// `x^T A y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        assert_eq!(x.len(), self.nrows);
        (0..self.nrows)
            .map(|r| x[r] * self.row(r).map(|(c, v)| v * y[c]).sum::<f64>())
            .sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn transpose(&self) -> Self {
        let t: Vec<_> = (0..self.nrows)
            .flat_map(|r| self.row(r).map(move |(c, v)| (c, r, v)))
            .collect();
        Self::from_triplets(self.ncols, self.nrows, &t)
    }

    /// `max |A - A^T|` over entries.
    pub fn asymmetry(&self) -> f64 {
        let t = self.transpose();
        let mut m: f64 = 0.0;
        for r in 0..self.nrows {
            for (c, v) in self.row(r) {
                m = m.max((v - t.get(r, c)).abs());
            }
            for (c, v) in t.row(r) {
                m = m.max((v - self.get(r, c)).abs());
            }
        }
        m
    }

    /// Submatrix on the given row and column index lists.
    pub fn restrict(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut col_map = vec![usize::MAX; self.ncols];
        for (k, &c) in cols.iter().enumerate() {
            col_map[c] = k;
        }
        let t: Vec<_> = rows
            .iter()
            .enumerate()
            .flat_map(|(i, &r)| {
                let col_map = &col_map;
                self.row(r)
                    .filter(move |&(c, _)| col_map[c] != usize::MAX)
                    .map(move |(c, v)| (i, col_map[c], v))
            })
            .collect();
        Self::from_triplets(rows.len(), cols.len(), &t)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.ncols]; self.nrows];
        for (r, row) in d.iter_mut().enumerate() {
            for (c, v) in self.row(r) {
                row[c] = v;
            }
        }
        d
    }
}

/// Direct sparse LU factorization (fill-reducing ordering + partial pivoting).
pub struct SparseLu {
    n: usize,
    lu: Lu<usize, f64>,
}

impl std::fmt::Debug for SparseLu {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SparseLu").field("n", &self.n).finish()
    }
}

impl SparseLu {
    pub fn factorize(a: &CsrMatrix) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::SolverFailure(format!(
                "cannot factorize a {}x{} matrix",
                a.nrows(),
                a.ncols()
            )));
        }
        let triplets: Vec<Triplet<usize, usize, f64>> = (0..a.nrows())
            .flat_map(|r| a.row(r).map(move |(c, v)| Triplet::new(r, c, v)))
            .collect();
        Self::from_triplets(a.nrows(), &triplets)
    }

    pub(crate) fn from_triplets(n: usize, triplets: &[Triplet<usize, usize, f64>]) -> Result<Self> {
        if n == 0 {
            return Err(Error::SolverFailure("empty system".into()));
        }
        let mat = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, triplets)
            .map_err(|e| Error::SolverFailure(format!("sparse assembly failed: {e:?}")))?;
        let lu = mat
            .sp_lu()
            .map_err(|e| Error::SolverFailure(format!("LU factorization failed: {e:?}")))?;
        let this = Self { n, lu };
        // numerically singular pivots show up as non-finite solutions
        let probe = this.solve(&vec![1.0; n]);
        if probe.iter().any(|v| !v.is_finite()) {
            return Err(Error::SolverFailure("matrix is numerically singular".into()));
        }
        Ok(this)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        assert_eq!(rhs.len(), self.n);
        let mut b = Mat::<f64>::from_fn(self.n, 1, |i, _| rhs[i]);
        self.lu.solve_in_place(b.as_mut());
        (0..self.n).map(|i| b[(i, 0)]).collect()
    }

    /// Solve and reject non-finite output.
    pub fn try_solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let x = self.solve(rhs);
        if x.iter().all(|v| v.is_finite()) {
            Ok(x)
        } else {
            Err(Error::SolverFailure("non-finite solution".into()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_sparse(n: usize, rng: &mut ChaCha8Rng) -> CsrMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 4.0 + rng.gen::<f64>()));
            for _ in 0..3 {
                let j = rng.gen_range(0..n);
                t.push((i, j, rng.gen::<f64>() - 0.5));
            }
        }
        CsrMatrix::from_triplets(n, n, &t)
    }

    #[test]
    fn triplets_are_summed_and_sorted() {
        let a = CsrMatrix::from_triplets(2, 3, &[(0, 2, 1.0), (0, 0, 2.0), (0, 2, 3.0), (1, 1, 5.0)]);
        assert_eq!(a.nnz(), 3);
        assert_eq!(a.col_indices(), &[0, 2, 1]);
        assert_eq!(a.get(0, 2), 4.0);
        assert_eq!(a.get(1, 0), 0.0);
        assert_eq!(a.mul_vec(&[1.0, 1.0, 1.0]), vec![6.0, 5.0]);
    }

    #[test]
    fn lu_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random_sparse(200, &mut rng);
        let x: Vec<f64> = (0..200).map(|_| rng.gen::<f64>() - 0.5).collect();
        let b = a.mul_vec(&x);
        let lu = SparseLu::factorize(&a).unwrap();
        let y = lu.solve(&b);
        let err = x.iter().zip(&y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let scale = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        assert!(err <= 1e-10 * scale);
    }

    #[test]
    fn identity_solve_returns_rhs() {
        let lu = SparseLu::factorize(&CsrMatrix::identity(5)).unwrap();
        let b = vec![1.0, -2.0, 3.5, 0.0, 7.0];
        assert_eq!(lu.solve(&b), b);
    }

    #[test]
    fn singular_is_rejected() {
        let a = CsrMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 1.0)]);
        assert!(matches!(SparseLu::factorize(&a), Err(Error::SolverFailure(_))));
    }

    #[test]
    fn restrict_and_transpose() {
        let a = CsrMatrix::from_triplets(3, 3, &[(0, 1, 2.0), (1, 0, 2.0), (2, 2, 1.0), (2, 0, 9.0)]);
        let r = a.restrict(&[0, 2], &[0, 2]);
        assert_eq!(r.to_dense(), vec![vec![0.0, 0.0], vec![9.0, 1.0]]);
        assert_eq!(a.transpose().get(0, 2), 9.0);
        assert_eq!(a.asymmetry(), 9.0);
    }
}
