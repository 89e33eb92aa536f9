//! Cholesky factorization of symmetric positive definite banded matrices.

use super::sparse::CsrMatrix;

/// Lower band of an SPD matrix, row-major: row `i` stores columns
/// `i - bw ..= i` (entries left of column 0 are padding).
#[derive(Debug, Clone)]
pub struct BandedSpd {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

impl BandedSpd {
    /// `Aᵀ diag(w²) A`.
    pub fn normal_matrix(a: &CsrMatrix, w: &[f64]) -> Self {
        let n = a.ncols();
        let bw = a.normal_bandwidth();
        let mut m = BandedSpd { n, bw, data: vec![0.0; n * (bw + 1)] };
        let mut row: Vec<(usize, f64)> = Vec::new();
        for r in 0..a.nrows() {
            row.clear();
            row.extend(a.row(r));
            let w2 = w[r] * w[r];
            for &(ci, vi) in &row {
                for &(cj, vj) in &row {
                    if cj <= ci {
                        *m.at_mut(ci, cj) += w2 * vi * vj;
                    }
                }
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    #[inline]
    fn offset(&self, i: usize, j: usize) -> usize {
        debug_assert!(j <= i && i - j <= self.bw);
        i * (self.bw + 1) + (j + self.bw - i)
    }

    #[inline]
    fn at_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        let o = self.offset(i, j);
        &mut self.data[o]
    }

    /// In-place `L Lᵀ` factorization. Returns the failing row on a
    /// non-positive pivot.
    pub fn factorize(mut self) -> Result<BandedCholesky, usize> {
        let (n, bw) = (self.n, self.bw);
        let stride = bw + 1;
        for i in 0..n {
            let lo_i = i.saturating_sub(bw);
            for j in lo_i..=i {
                let lo = lo_i.max(j.saturating_sub(bw));
                let ri = i * stride + bw - i;
                let rj = j * stride + bw - j;
                // columns lo..j of rows i and j
                let dot: f64 = self.data[ri + lo..ri + j]
                    .iter()
                    .zip(&self.data[rj + lo..rj + j])
                    .map(|(a, b)| a * b)
                    .sum();
                let s = self.data[ri + j] - dot;
                if i == j {
                    if !(s > 0.0) || !s.is_finite() {
                        return Err(i);
                    }
                    self.data[ri + j] = s.sqrt();
                } else {
                    self.data[ri + j] = s / self.data[rj + j];
                }
            }
        }
        Ok(BandedCholesky { factor: self })
    }

    /// `y = M x` using the symmetric band.
    pub fn mul(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..self.n {
            for j in i.saturating_sub(self.bw)..=i {
                let v = self.data[self.offset(i, j)];
                y[i] += v * x[j];
                if j != i {
                    y[j] += v * x[i];
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct BandedCholesky {
    factor: BandedSpd,
}

impl BandedCholesky {
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let f = &self.factor;
        let (n, bw) = (f.n, f.bw);
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            let s: f64 = (lo..i).map(|j| f.data[f.offset(i, j)] * b[j]).sum();
            b[i] = (b[i] - s) / f.data[f.offset(i, i)];
        }
        for i in (0..n).rev() {
            b[i] /= f.data[f.offset(i, i)];
            let bi = b[i];
            for j in i.saturating_sub(bw)..i {
                b[j] -= f.data[f.offset(i, j)] * bi;
            }
        }
    }
}
