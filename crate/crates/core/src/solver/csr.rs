use rayon::prelude::*;

const PAR_ROWS: usize = 4096;

/// Compressed sparse row matrix with sorted column indices per row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Zero matrix with the given (unsorted, possibly repeated) row patterns.
    pub fn from_pattern(ncols: usize, rows: Vec<Vec<usize>>) -> Self {
        let nrows = rows.len();
        let mut row_ptr = Vec::with_capacity(nrows + 1);
        row_ptr.push(0);
        let mut col_idx = Vec::new();
        for mut cols in rows {
            cols.sort_unstable();
            cols.dedup();
            assert!(cols.last().map_or(true, |&c| c < ncols), "column out of range");
            col_idx.extend(cols);
            row_ptr.push(col_idx.len());
        }
        let values = vec![0.0; col_idx.len()];
        Self {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        }
    }

    /// Sums duplicate triplets in input order.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut rows = vec![Vec::new(); nrows];
        for &(r, c, _) in triplets {
            rows[r].push(c);
        }
        let mut m = Self::from_pattern(ncols, rows);
        for &(r, c, v) in triplets {
            m.add(r, c, v);
        }
        m
    }

    pub fn identity(n: usize) -> Self {
        let triplets: Vec<_> = (0..n).map(|i| (i, i, 1.0)).collect();
        Self::from_triplets(n, n, &triplets)
    }

    pub fn from_dense(n: usize, m: usize, dense: &[f64]) -> Self {
        let triplets: Vec<_> = (0..n * m)
            .filter(|&i| dense[i] != 0.0)
            .map(|i| (i / m, i % m, dense[i]))
            .collect();
        Self::from_triplets(n, m, &triplets)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let (s, e) = (self.row_ptr[r], self.row_ptr[r + 1]);
        (&self.col_idx[s..e], &self.values[s..e])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn same_pattern(&self, other: &Self) -> bool {
        self.row_ptr == other.row_ptr && self.col_idx == other.col_idx
    }

    fn slot(&self, r: usize, c: usize) -> Option<usize> {
        let (s, e) = (self.row_ptr[r], self.row_ptr[r + 1]);
        self.col_idx[s..e].binary_search(&c).ok().map(|p| s + p)
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.slot(r, c).map_or(0.0, |p| self.values[p])
    }

    /// Adds `v` at `(r, c)`; the entry must be part of the pattern.
    #[inline]
    pub fn add(&mut self, r: usize, c: usize, v: f64) {
        let p = self
            .slot(r, c)
            .unwrap_or_else(|| panic!("entry ({r}, {c}) outside the sparsity pattern"));
        self.values[p] += v;
    }

    /// Adds the dense block `local` (row-major, `rows.len() x cols.len()`).
    pub fn add_block(&mut self, rows: &[usize], cols: &[usize], local: &[f64]) {
        for (i, &r) in rows.iter().enumerate() {
            let (s, e) = (self.row_ptr[r], self.row_ptr[r + 1]);
            let row_cols = &self.col_idx[s..e];
            for (j, &c) in cols.iter().enumerate() {
                let v = local[i * cols.len() + j];
                if v != 0.0 {
                    let p = row_cols
                        .binary_search(&c)
                        .unwrap_or_else(|_| panic!("entry ({r}, {c}) outside the sparsity pattern"));
                    self.values[s + p] += v;
                }
            }
        }
    }

    /// `self += scale * other`; patterns must agree.
    pub fn add_scaled(&mut self, scale: f64, other: &Self) {
        assert!(self.same_pattern(other), "pattern mismatch");
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += scale * b;
        }
    }

    pub fn scale(&mut self, s: f64) {
        for v in &mut self.values {
            *v *= s;
        }
    }

    pub fn zeros_like(&self) -> Self {
        Self {
            values: vec![0.0; self.values.len()],
            ..self.clone()
        }
    }

    fn row_dot(&self, r: usize, x: &[f64]) -> f64 {
        let (s, e) = (self.row_ptr[r], self.row_ptr[r + 1]);
        self.col_idx[s..e]
            .iter()
            .zip(&self.values[s..e])
            .map(|(&c, &v)| v * x[c])
            .sum()
    }

    /// `y = A x`. Rows are independent, so the parallel path is bitwise
    /// identical to the serial one.
    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.nrows);
        if self.nrows >= PAR_ROWS {
            y.par_iter_mut().enumerate().for_each(|(r, yr)| *yr = self.row_dot(r, x));
        } else {
            for (r, yr) in y.iter_mut().enumerate() {
                *yr = self.row_dot(r, x);
            }
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.nrows];
        self.matvec_into(x, &mut y);
        y
    }

    /// `v^T A w`.
    pub fn bilinear(&self, v: &[f64], w: &[f64]) -> f64 {
        (0..self.nrows).map(|r| v[r] * self.row_dot(r, w)).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.nrows.min(self.ncols)).map(|i| self.get(i, i)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut rows = vec![Vec::new(); self.ncols];
        for r in 0..self.nrows {
            for &c in self.row(r).0 {
                rows[c].push(r);
            }
        }
        let mut t = Self::from_pattern(self.nrows, rows);
        for r in 0..self.nrows {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                t.add(c, r, v);
            }
        }
        t
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `||A - A^T||_F / ||A||_F`.
    pub fn symmetry_defect(&self) -> f64 {
        if self.nrows != self.ncols {
            return f64::INFINITY;
        }
        let mut diff = 0.0;
        for r in 0..self.nrows {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                diff += (v - self.get(c, r)).powi(2);
            }
        }
        let norm = self.frobenius_norm();
        if norm == 0.0 {
            0.0
        } else {
            diff.sqrt() / norm
        }
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.nrows * self.ncols];
        for r in 0..self.nrows {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                d[r * self.ncols + c] = v;
            }
        }
        d
    }
}
