//! Cholesky factorization of symmetric banded matrices.
//!
//! Fill-in of a banded factorization stays inside the band, so storing only
//! `bandwidth + 1` entries per row is exact. A dense matrix is the special
//! case `bandwidth = n - 1`.

use crate::error::{Error, Result};

/// Lower-triangular factor `L` with `A = L Lᵀ`, stored by rows over the band.
#[derive(Debug, Clone)]
pub struct BandCholesky {
    n: usize,
    bandwidth: usize,
    // Row i holds L[i, i - bandwidth ..= i]; slots left of column 0 stay zero.
    data: Vec<f64>,
}

impl BandCholesky {
    /// Factors the symmetric matrix whose lower-band entries are given by
    /// `entry(i, j)` for `j <= i`, `i - j <= bandwidth`.
    pub fn factor(
        n: usize,
        bandwidth: usize,
        entry: impl Fn(usize, usize) -> f64,
    ) -> Result<Self> {
        let bandwidth = bandwidth.min(n.saturating_sub(1));
        let width = bandwidth + 1;
        let mut data = vec![0.0; n * width];
        for i in 0..n {
            let lo = i.saturating_sub(bandwidth);
            for j in lo..=i {
                let mut s = entry(i, j);
                // L[i,k] L[j,k] for k in lo..j; both rows cover k >= lo.
                let ri = i * width + bandwidth - i;
                let rj = j * width + bandwidth - j;
                for k in lo.max(j.saturating_sub(bandwidth))..j {
                    s -= data[ri + k] * data[rj + k];
                }
                if i == j {
                    if !(s > 0.0) || !s.is_finite() {
                        return Err(Error::NotPositiveDefinite { pivot: i, value: s });
                    }
                    data[ri + i] = s.sqrt();
                } else {
                    data[ri + j] = s / data[rj + j];
                }
            }
        }
        Ok(Self {
            n,
            bandwidth,
            data,
        })
    }

    /// Dense symmetric matrix given row-major.
    pub fn factor_dense(n: usize, matrix: &[f64]) -> Result<Self> {
        assert_eq!(matrix.len(), n * n);
        Self::factor(n, n.saturating_sub(1), |i, j| matrix[i * n + j])
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Entry `L[i, j]`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j > i || i - j > self.bandwidth {
            0.0
        } else {
            self.data[i * (self.bandwidth + 1) + self.bandwidth - i + j]
        }
    }

    /// Computes `L z`.
    pub fn lower_mul(&self, z: &[f64]) -> Vec<f64> {
        assert_eq!(z.len(), self.n);
        let width = self.bandwidth + 1;
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.bandwidth);
                let row = &self.data[i * width + self.bandwidth - i..];
                (lo..=i).map(|k| row[k] * z[k]).sum()
            })
            .collect()
    }
}

/// Symmetric positive-definite `T x T` matrix defining `⟨a, b⟩_M = aᵀ M b`.
#[derive(Debug, Clone)]
pub struct MetricMatrix {
    dim: usize,
    values: Vec<f64>,
}

impl MetricMatrix {
    /// Validates symmetry and positive definiteness (by factorization).
    pub fn new(dim: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "metric matrix needs {} entries, got {}",
                dim * dim,
                values.len()
            )));
        }
        for i in 0..dim {
            for j in 0..i {
                let (a, b) = (values[i * dim + j], values[j * dim + i]);
                if (a - b).abs() > 1e-12 * (1.0 + a.abs().max(b.abs())) {
                    return Err(Error::InvalidArgument(format!(
                        "metric matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        BandCholesky::factor_dense(dim, &values)?;
        Ok(Self { dim, values })
    }

    pub fn identity(dim: usize) -> Self {
        let mut values = vec![0.0; dim * dim];
        for i in 0..dim {
            values[i * dim + i] = 1.0;
        }
        Self { dim, values }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.dim + j]
    }

    /// Writes `M x` into `out`.
    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.values[i * self.dim..(i + 1) * self.dim];
            *o = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }
}
