use crate::error::{Error, Result};

/// Compressed sparse row matrix of `f64`.
///
/// Column indices are strictly increasing within each row and every stored
/// value is finite. Explicit zeros are allowed and kept, so structural
/// symmetry of assembled stiffness matrices survives cancellation.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds a matrix from raw CSR arrays, checking every invariant.
    pub fn new(
        nrows: usize,
        ncols: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if row_offsets.len() != nrows + 1 {
            return Err(Error::InvalidMatrix(format!(
                "row_offsets has {} entries, expected {}",
                row_offsets.len(),
                nrows + 1
            )));
        }
        if row_offsets[0] != 0 {
            return Err(Error::InvalidMatrix("row_offsets must start at 0".into()));
        }
        if col_indices.len() != values.len() || row_offsets[nrows] != values.len() {
            return Err(Error::InvalidMatrix(format!(
                "inconsistent storage: offsets end at {}, {} column indices, {} values",
                row_offsets[nrows],
                col_indices.len(),
                values.len()
            )));
        }
        for i in 0..nrows {
            let (lo, hi) = (row_offsets[i], row_offsets[i + 1]);
            if lo > hi {
                return Err(Error::InvalidMatrix(format!("row_offsets decrease at row {i}")));
            }
            let cols = &col_indices[lo..hi];
            for (pos, &j) in cols.iter().enumerate() {
                if j >= ncols {
                    return Err(Error::InvalidMatrix(format!(
                        "column index {j} out of range in row {i} (ncols = {ncols})"
                    )));
                }
                if pos > 0 && cols[pos - 1] >= j {
                    return Err(Error::InvalidMatrix(format!(
                        "column indices not strictly increasing in row {i}"
                    )));
                }
            }
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidMatrix(format!("non-finite value {v}")));
        }
        Ok(SparseMatrix {
            nrows,
            ncols,
            row_offsets,
            col_indices,
            values,
        })
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        SparseMatrix {
            nrows,
            ncols,
            row_offsets: vec![0; nrows + 1],
            col_indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n])
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        SparseMatrix {
            nrows: n,
            ncols: n,
            row_offsets: (0..=n).collect(),
            col_indices: (0..n).collect(),
            values: diag.to_vec(),
        }
    }

    /// Assembles from (row, col, value) triplets. Duplicates are summed in
    /// input order; entries that sum to zero stay stored.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        for &(i, j, v) in triplets {
            if i >= nrows || j >= ncols {
                return Err(Error::InvalidMatrix(format!(
                    "triplet ({i}, {j}) outside a {nrows}x{ncols} matrix"
                )));
            }
            if !v.is_finite() {
                return Err(Error::InvalidMatrix(format!("non-finite value {v} at ({i}, {j})")));
            }
        }
        // Stable counting sort by row, then a stable sort by column inside
        // each row, so duplicate summation order is the input order.
        let mut counts = vec![0usize; nrows + 1];
        for &(i, _, _) in triplets {
            counts[i + 1] += 1;
        }
        for i in 0..nrows {
            counts[i + 1] += counts[i];
        }
        let mut next = counts.clone();
        let mut order = vec![0usize; triplets.len()];
        for (t, &(i, _, _)) in triplets.iter().enumerate() {
            order[next[i]] = t;
            next[i] += 1;
        }

        let mut row_offsets = Vec::with_capacity(nrows + 1);
        let mut col_indices = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        row_offsets.push(0);
        for i in 0..nrows {
            let row = &mut order[counts[i]..counts[i + 1]];
            row.sort_by_key(|&t| triplets[t].1);
            let mut last: Option<usize> = None;
            for &t in row.iter() {
                let (_, j, v) = triplets[t];
                if last == Some(j) {
                    *values.last_mut().expect("entry exists") += v;
                } else {
                    col_indices.push(j);
                    values.push(v);
                    last = Some(j);
                }
            }
            row_offsets.push(col_indices.len());
        }
        Ok(SparseMatrix {
            nrows,
            ncols,
            row_offsets,
            col_indices,
            values,
        })
    }

    /// Dense row-major input; exact zeros are not stored.
    pub fn from_dense(rows: &[Vec<f64>]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut triplets = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != ncols {
                return Err(Error::dims(format!(
                    "row {i} has {} entries, expected {ncols}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                if v != 0.0 {
                    triplets.push((i, j, v));
                }
            }
        }
        Self::from_triplets(nrows, ncols, &triplets)
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

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (lo, hi) = (self.row_offsets[i], self.row_offsets[i + 1]);
        (&self.col_indices[lo..hi], &self.values[lo..hi])
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        if i >= self.nrows {
            return None;
        }
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).ok().map(|pos| vals[pos])
    }

    /// Stored entries in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, &v)| (i, j, v))
        })
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.ncols]; self.nrows];
        for (i, j, v) in self.triplets() {
            out[i][j] = v;
        }
        out
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut counts = vec![0usize; self.ncols + 1];
        for &j in &self.col_indices {
            counts[j + 1] += 1;
        }
        for j in 0..self.ncols {
            counts[j + 1] += counts[j];
        }
        let mut next = counts.clone();
        let mut col_indices = vec![0usize; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        for (i, j, v) in self.triplets() {
            let pos = next[j];
            col_indices[pos] = i;
            values[pos] = v;
            next[j] += 1;
        }
        SparseMatrix {
            nrows: self.ncols,
            ncols: self.nrows,
            row_offsets: counts,
            col_indices,
            values,
        }
    }

    pub fn scaled(&self, c: f64) -> SparseMatrix {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= c);
        out
    }

    /// Main diagonal (zeros where nothing is stored).
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.nrows.min(self.ncols))
            .map(|i| self.get(i, i).unwrap_or(0.0))
            .collect()
    }

    /// Whether the sparsity pattern equals that of the transpose.
    pub fn is_structurally_symmetric(&self) -> bool {
        if self.nrows != self.ncols {
            return false;
        }
        let t = self.transpose();
        t.row_offsets == self.row_offsets && t.col_indices == self.col_indices
    }

    /// `max |a_ij - a_ji|` over stored entries, `None` for non-square or
    /// structurally asymmetric matrices.
    pub fn max_asymmetry(&self) -> Option<f64> {
        if !self.is_structurally_symmetric() {
            return None;
        }
        let t = self.transpose();
        Some(
            self.values
                .iter()
                .zip(&t.values)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max),
        )
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Keeps rows and columns whose index maps to `Some(new_index)`. The
    /// maps must be injective.
    pub fn restrict(
        &self,
        row_map: &[Option<usize>],
        nrows: usize,
        col_map: &[Option<usize>],
        ncols: usize,
    ) -> Result<SparseMatrix> {
        if row_map.len() != self.nrows || col_map.len() != self.ncols {
            return Err(Error::dims("restriction maps do not match matrix shape"));
        }
        let mut source = vec![None; nrows];
        for (i, m) in row_map.iter().enumerate() {
            if let Some(r) = *m {
                if r >= nrows || source[r].is_some() {
                    return Err(Error::InvalidArgument(format!(
                        "row map sends {i} to {r}, out of range or taken"
                    )));
                }
                source[r] = Some(i);
            }
        }
        if col_map.iter().flatten().any(|&c| c >= ncols) {
            return Err(Error::InvalidArgument("column map out of range".into()));
        }
        let mut row_offsets = Vec::with_capacity(nrows + 1);
        row_offsets.push(0);
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        let mut row: Vec<(usize, f64)> = Vec::new();
        for src in source {
            if let Some(i) = src {
                let (cols, vals) = self.row(i);
                row.clear();
                row.extend(cols.iter().zip(vals).filter_map(|(&j, &v)| Some((col_map[j]?, v))));
                row.sort_by_key(|e| e.0);
                if row.windows(2).any(|w| w[0].0 == w[1].0) {
                    return Err(Error::InvalidArgument("column map is not injective".into()));
                }
                col_indices.extend(row.iter().map(|e| e.0));
                values.extend(row.iter().map(|e| e.1));
            }
            row_offsets.push(values.len());
        }
        Self::new(nrows, ncols, row_offsets, col_indices, values)
    }

    /// `y = A x`. Rows are evaluated in order, each as a left-to-right sum,
    /// so results are bitwise reproducible.
    pub fn spmv_into(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        if x.len() != self.ncols || y.len() != self.nrows {
            return Err(Error::dims(format!(
                "spmv: {}x{} matrix, x of length {}, y of length {}",
                self.nrows,
                self.ncols,
                x.len(),
                y.len()
            )));
        }
        for (i, yi) in y.iter_mut().enumerate() {
            let (lo, hi) = (self.row_offsets[i], self.row_offsets[i + 1]);
            let mut acc = 0.0;
            for k in lo..hi {
                acc += self.values[k] * x[self.col_indices[k]];
            }
            *yi = acc;
        }
        Ok(())
    }

    pub fn spmv(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut y = vec![0.0; self.nrows];
        self.spmv_into(x, &mut y)?;
        Ok(y)
    }

    /// `y = Aᵀ x`, scattering rows in order.
    pub fn spmv_transpose_into(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        if x.len() != self.nrows || y.len() != self.ncols {
            return Err(Error::dims(format!(
                "spmv_transpose: {}x{} matrix, x of length {}, y of length {}",
                self.nrows,
                self.ncols,
                x.len(),
                y.len()
            )));
        }
        y.iter_mut().for_each(|v| *v = 0.0);
        for (i, &xi) in x.iter().enumerate() {
            let (lo, hi) = (self.row_offsets[i], self.row_offsets[i + 1]);
            for k in lo..hi {
                y[self.col_indices[k]] += self.values[k] * xi;
            }
        }
        Ok(())
    }

    pub fn spmv_transpose(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut y = vec![0.0; self.ncols];
        self.spmv_transpose_into(x, &mut y)?;
        Ok(y)
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// `y += a x`
pub fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}
