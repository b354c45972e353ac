use std::sync::Arc;

use faer::Mat;

use super::BasisDescriptor;
use crate::error::{Error, Result};

/// Real sparse matrix in compressed-row form with sorted column indices.
///
/// Entries are merged and ordered at construction, so two matrices built
/// from the same triplets are bit-identical.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds from `(row, col, value)` triplets. Duplicates are summed and
    /// exact zeros dropped.
    pub fn from_triplets(rows: usize, cols: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_by_key(|a| (a.0, a.1));
        let mut row_ptr = vec![0usize; rows + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        let mut row_of = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            assert!(r < rows && c < cols, "triplet ({r}, {c}) out of bounds");
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_of.push(r);
                last = Some((r, c));
            }
        }
        // Drop entries that cancelled exactly.
        let mut keep_cols = Vec::with_capacity(col_idx.len());
        let mut keep_vals = Vec::with_capacity(values.len());
        for ((c, v), r) in col_idx.into_iter().zip(values).zip(row_of) {
            if v != 0.0 {
                keep_cols.push(c);
                keep_vals.push(v);
                row_ptr[r + 1] += 1;
            }
        }
        for i in 0..rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self {
            rows,
            cols,
            row_ptr,
            col_idx: keep_cols,
            values: keep_vals,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_triplets(n, n, (0..n).map(|i| (i, i, 1.0)).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Entries of row `i` as `(col, value)` pairs.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.rows).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col_idx[span.clone()].binary_search(&j) {
            Ok(k) => self.values[span.start + k],
            Err(_) => 0.0,
        }
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.cols);
        assert_eq!(y.len(), self.rows);
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            *yi = acc;
        }
    }

    /// `x^T A x`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (i, xi) in x.iter().enumerate() {
            let mut row = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                row += self.values[k] * x[self.col_idx[k]];
            }
            acc += xi * row;
        }
        acc
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(
            self.cols,
            self.rows,
            self.triplets().map(|(i, j, v)| (j, i, v)).collect(),
        )
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::from_triplets(
            self.rows,
            self.cols,
            self.triplets().map(|(i, j, v)| (i, j, factor * v)).collect(),
        )
    }

    /// `sum_k coef_k * A_k`; all terms must share a shape.
    pub fn linear_combination(terms: &[(f64, &SparseMatrix)]) -> Self {
        let (rows, cols) = terms
            .first()
            .map(|(_, m)| (m.rows, m.cols))
            .unwrap_or((0, 0));
        let mut triplets = Vec::new();
        for (coef, m) in terms {
            assert_eq!((m.rows, m.cols), (rows, cols), "shape mismatch");
            triplets.extend(m.triplets().map(|(i, j, v)| (i, j, coef * v)));
        }
        Self::from_triplets(rows, cols, triplets)
    }

    pub fn product(&self, other: &SparseMatrix) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut triplets = Vec::new();
        for i in 0..self.rows {
            for (k, a) in self.row(i) {
                for (j, b) in other.row(k) {
                    triplets.push((i, j, a * b));
                }
            }
        }
        Self::from_triplets(self.rows, other.cols, triplets)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `max |A_ij - A_ji|`.
    pub fn max_asymmetry(&self) -> f64 {
        if self.rows != self.cols {
            return f64::INFINITY;
        }
        self.triplets()
            .map(|(i, j, v)| (v - self.get(j, i)).abs())
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> Mat<f64> {
        let mut m = Mat::zeros(self.rows, self.cols);
        for (i, j, v) in self.triplets() {
            m.write(i, j, v);
        }
        m
    }

    pub fn is_diagonal(&self) -> bool {
        self.triplets().all(|(i, j, _)| i == j)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).collect()
    }
}

/// Hermitian (real symmetric) operator on a many-body basis.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    basis: Arc<BasisDescriptor>,
    matrix: SparseMatrix,
    label: String,
}

/// Hermiticity tolerance for constructed operators.
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;

impl OperatorMatrix {
    /// Wraps a sparse matrix, checking shape and Hermiticity.
    pub fn new(
        basis: Arc<BasisDescriptor>,
        matrix: SparseMatrix,
        label: impl Into<String>,
    ) -> Result<Self> {
        let d = basis.dimension();
        if matrix.rows() != d || matrix.cols() != d {
            return Err(Error::InvalidArgument(format!(
                "matrix is {}x{} but the basis has dimension {d}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let max_deviation = matrix.max_asymmetry();
        if max_deviation >= HERMITIAN_TOLERANCE {
            return Err(Error::NonHermitian { max_deviation });
        }
        Ok(Self {
            basis,
            matrix,
            label: label.into(),
        })
    }

    pub fn basis(&self) -> &Arc<BasisDescriptor> {
        &self.basis
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dimension(&self) -> usize {
        self.matrix.rows()
    }

    pub fn same_basis(&self, other: &OperatorMatrix) -> bool {
        Arc::ptr_eq(&self.basis, &other.basis) || *self.basis == *other.basis
    }

    /// `sum_k coef_k * O_k` over operators sharing one basis.
    pub fn combine(terms: &[(f64, &OperatorMatrix)], label: impl Into<String>) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty operator combination".into()))?
            .1;
        if terms.iter().any(|(_, op)| !op.same_basis(first)) {
            return Err(Error::BasisMismatch);
        }
        let mats: Vec<(f64, &SparseMatrix)> = terms.iter().map(|(c, op)| (*c, &op.matrix)).collect();
        Self::new(
            first.basis.clone(),
            SparseMatrix::linear_combination(&mats),
            label,
        )
    }

    pub fn max_hermitian_deviation(&self) -> f64 {
        self.matrix.max_asymmetry()
    }

    /// `<v|O|v>` for a real vector.
    pub fn expectation(&self, v: &[f64]) -> f64 {
        self.matrix.quadratic_form(v)
    }
}
