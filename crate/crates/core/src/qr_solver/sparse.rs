/// Compressed sparse row matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn new(ncols: usize) -> Self {
        CsrMatrix { ncols, indptr: vec![0], indices: Vec::new(), values: Vec::new() }
    }

    /// Appends a row; entries must have distinct column indices.
    pub fn push_row(&mut self, entries: &[(usize, f64)]) {
        for &(c, v) in entries {
            debug_assert!(c < self.ncols);
            self.indices.push(c);
            self.values.push(v);
        }
        self.indptr.push(self.indices.len());
    }

    pub fn nrows(&self) -> usize {
        self.indptr.len() - 1
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.indptr[r]..self.indptr[r + 1];
        self.indices[range.clone()].iter().copied().zip(self.values[range].iter().copied())
    }

    /// `y = diag(w) A x`
    pub fn weighted_mul(&self, w: &[f64], x: &[f64], y: &mut [f64]) {
        for (r, out) in y.iter_mut().enumerate() {
            *out = w[r] * self.row(r).map(|(c, v)| v * x[c]).sum::<f64>();
        }
    }

    /// `x = Aᵀ diag(w) y`
    pub fn weighted_tmul(&self, w: &[f64], y: &[f64], x: &mut [f64]) {
        x.iter_mut().for_each(|v| *v = 0.0);
        for r in 0..self.nrows() {
            let s = w[r] * y[r];
            for (c, v) in self.row(r) {
                x[c] += v * s;
            }
        }
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.nrows() * self.ncols];
        for r in 0..self.nrows() {
            for (c, v) in self.row(r) {
                d[r * self.ncols + c] += v;
            }
        }
        d
    }

    /// Largest `max col - min col` over rows: the half-bandwidth of `AᵀA`.
    pub fn normal_bandwidth(&self) -> usize {
        (0..self.nrows())
            .filter_map(|r| {
                let cols = &self.indices[self.indptr[r]..self.indptr[r + 1]];
                let lo = cols.iter().min()?;
                let hi = cols.iter().max()?;
                Some(hi - lo)
            })
            .max()
            .unwrap_or(0)
    }

    /// Entries as `(row, col, value)` triplets in row order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows()).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }
}
