//! Panel data: `T` observations (rows) for each of `n` regions (columns).

use crate::error::{Error, Result};

/// A `T x n` real matrix with one length-`T` vector per region.
///
/// Stored region-major so that each region's vector is contiguous.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelMatrix {
    times: usize,
    regions: usize,
    values: Vec<f64>,
}

impl PanelMatrix {
    /// Builds from time-major rows: `rows[t][i]` is region `i` at time `t`.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let times = rows.len();
        if times == 0 {
            return Err(Error::DimensionMismatch("panel has no time rows".into()));
        }
        let regions = rows[0].len();
        if regions == 0 {
            return Err(Error::DimensionMismatch("panel has no regions".into()));
        }
        let mut values = vec![0.0; times * regions];
        for (t, row) in rows.iter().enumerate() {
            if row.len() != regions {
                return Err(Error::DimensionMismatch(format!(
                    "time row {t} has {} values, expected {regions}",
                    row.len()
                )));
            }
            for (i, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFinite { time: t, region: i });
                }
                values[i * times + t] = v;
            }
        }
        Ok(Self {
            times,
            regions,
            values,
        })
    }

    /// Builds from region vectors: `regions[i][t]`.
    pub fn from_regions(regions: &[Vec<f64>]) -> Result<Self> {
        let n = regions.len();
        if n == 0 {
            return Err(Error::DimensionMismatch("panel has no regions".into()));
        }
        let times = regions[0].len();
        if times == 0 {
            return Err(Error::DimensionMismatch("panel has no time rows".into()));
        }
        let mut values = Vec::with_capacity(n * times);
        for (i, y) in regions.iter().enumerate() {
            if y.len() != times {
                return Err(Error::DimensionMismatch(format!(
                    "region {i} has {} values, expected {times}",
                    y.len()
                )));
            }
            if let Some(t) = y.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite { time: t, region: i });
            }
            values.extend_from_slice(y);
        }
        Ok(Self {
            times,
            regions: n,
            values,
        })
    }

    /// Number of time rows `T`.
    pub fn times(&self) -> usize {
        self.times
    }

    /// Number of regions `n`.
    pub fn regions(&self) -> usize {
        self.regions
    }

    /// The length-`T` vector of region `i`.
    pub fn region(&self, i: usize) -> &[f64] {
        &self.values[i * self.times..(i + 1) * self.times]
    }

    pub fn get(&self, time: usize, region: usize) -> f64 {
        self.values[region * self.times + time]
    }

    /// Mean over regions at each time: the vector `ȳ`.
    ///
    /// A column whose entries are all equal returns that value exactly, so
    /// constant data centers to exact zeros.
    pub fn time_means(&self) -> Vec<f64> {
        (0..self.times)
            .map(|t| {
                let first = self.get(t, 0);
                let mut sum = 0.0;
                let mut constant = true;
                for i in 0..self.regions {
                    let v = self.get(t, i);
                    constant &= v == first;
                    sum += v;
                }
                if constant {
                    first
                } else {
                    sum / self.regions as f64
                }
            })
            .collect()
    }

    /// Applies `f` to every entry; `f(t, value)` receives the time index.
    pub fn map(&self, mut f: impl FnMut(usize, f64) -> f64) -> Result<Self> {
        let rows: Vec<Vec<f64>> = (0..self.times)
            .map(|t| (0..self.regions).map(|i| f(t, self.get(t, i))).collect())
            .collect();
        Self::from_rows(&rows)
    }

    /// Time-major copy of the data.
    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.times)
            .map(|t| (0..self.regions).map(|i| self.get(t, i)).collect())
            .collect()
    }
}
