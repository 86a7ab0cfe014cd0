//! Pairwise similarity functions `λ(y_i, y_j)` for the gamma index.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::MetricMatrix;
use crate::panel::PanelMatrix;

/// Order of the Geary norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GearyNorm {
    L1,
    L2,
}

/// The similarity used to build a local gamma index.
#[derive(Debug, Clone)]
pub enum SimilarityKernel {
    /// `⟨y_i - ȳ, y_j - ȳ⟩_M`; `None` means `M = I`.
    Moran(Option<MetricMatrix>),
    /// `‖y_i - y_j‖_p^p`.
    Geary(GearyNorm),
    /// `⟨β_i, β_j⟩` with `β_{i,t} = ±1` for above/below the median at time `t`.
    Binary,
}

/// The four statistics by name, without kernel parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Statistic {
    Moran,
    GearyL2,
    GearyL1,
    Binary,
}

impl Statistic {
    pub const ALL: [Statistic; 4] = [
        Statistic::Moran,
        Statistic::GearyL2,
        Statistic::GearyL1,
        Statistic::Binary,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Statistic::Moran => "moran",
            Statistic::GearyL2 => "geary-l2",
            Statistic::GearyL1 => "geary-l1",
            Statistic::Binary => "binary",
        }
    }

    /// Kernel with default parameters (identity metric for Moran).
    pub fn kernel(self) -> SimilarityKernel {
        match self {
            Statistic::Moran => SimilarityKernel::Moran(None),
            Statistic::GearyL2 => SimilarityKernel::Geary(GearyNorm::L2),
            Statistic::GearyL1 => SimilarityKernel::Geary(GearyNorm::L1),
            Statistic::Binary => SimilarityKernel::Binary,
        }
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Statistic::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "unknown statistic '{s}' (expected moran, geary-l2, geary-l1 or binary)"
                ))
            })
    }
}

impl SimilarityKernel {
    pub fn statistic(&self) -> Statistic {
        match self {
            SimilarityKernel::Moran(_) => Statistic::Moran,
            SimilarityKernel::Geary(GearyNorm::L2) => Statistic::GearyL2,
            SimilarityKernel::Geary(GearyNorm::L1) => Statistic::GearyL1,
            SimilarityKernel::Binary => Statistic::Binary,
        }
    }
}

/// Median with the midpoint rule for an even count.
pub(crate) fn median(values: &mut [f64]) -> f64 {
    let n = values.len();
    values.sort_unstable_by(f64::total_cmp);
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Per-region sign vectors `β_i` (entries ±1), region-major.
pub(crate) fn sign_vectors(data: &PanelMatrix) -> Vec<f64> {
    let (times, n) = (data.times(), data.regions());
    let mut beta = vec![0.0; n * times];
    let mut column = vec![0.0; n];
    for t in 0..times {
        for (i, c) in column.iter_mut().enumerate() {
            *c = data.get(t, i);
        }
        let m = median(&mut column);
        for i in 0..n {
            beta[i * times + t] = if data.get(t, i) >= m { 1.0 } else { -1.0 };
        }
    }
    beta
}

/// A kernel bound to a data set, with per-region transforms precomputed.
///
/// Region vectors are stored region-major in `left` and `right` so that
/// `λ_{ij}` is a function of `left_i` and `right_j` alone.
#[derive(Debug, Clone)]
pub struct PreparedKernel {
    statistic: Statistic,
    times: usize,
    regions: usize,
    /// Moran: `M z_i`; Geary: centered `z_i`; Binary: `β_i`.
    left: Vec<f64>,
    /// Moran: `z_i`; otherwise identical to `left`.
    right: Option<Vec<f64>>,
}

impl PreparedKernel {
    pub fn new(kernel: &SimilarityKernel, data: &PanelMatrix) -> Result<Self> {
        let (times, n) = (data.times(), data.regions());
        let centered = || {
            let mean = data.time_means();
            let mut z = Vec::with_capacity(n * times);
            for i in 0..n {
                z.extend(data.region(i).iter().zip(&mean).map(|(y, m)| y - m));
            }
            z
        };
        let (left, right) = match kernel {
            SimilarityKernel::Moran(metric) => {
                let z = centered();
                match metric {
                    None => (z, None),
                    Some(m) => {
                        if m.dim() != times {
                            return Err(Error::DimensionMismatch(format!(
                                "metric matrix is {0}x{0} but the panel has {times} time rows",
                                m.dim()
                            )));
                        }
                        let mut u = vec![0.0; n * times];
                        for i in 0..n {
                            m.apply(
                                &z[i * times..(i + 1) * times],
                                &mut u[i * times..(i + 1) * times],
                            );
                        }
                        (u, Some(z))
                    }
                }
            }
            // differences are translation invariant; centering limits cancellation
            SimilarityKernel::Geary(_) => (centered(), None),
            SimilarityKernel::Binary => (sign_vectors(data), None),
        };
        Ok(Self {
            statistic: kernel.statistic(),
            times,
            regions: n,
            left,
            right,
        })
    }

    pub fn statistic(&self) -> Statistic {
        self.statistic
    }

    pub fn times(&self) -> usize {
        self.times
    }

    pub fn regions(&self) -> usize {
        self.regions
    }

    pub(crate) fn left(&self, i: usize) -> &[f64] {
        &self.left[i * self.times..(i + 1) * self.times]
    }

    pub(crate) fn right(&self, i: usize) -> &[f64] {
        let v = self.right.as_deref().unwrap_or(&self.left);
        &v[i * self.times..(i + 1) * self.times]
    }

    /// `λ(y_i, y_j)` without the `i != j` check.
    #[inline]
    pub(crate) fn pair_unchecked(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (self.left(i), self.right(j));
        match self.statistic {
            Statistic::Moran | Statistic::Binary => a.iter().zip(b).map(|(x, y)| x * y).sum(),
            Statistic::GearyL2 => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum(),
            Statistic::GearyL1 => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
        }
    }

    /// `λ(y_i, y_j)` for `i != j`.
    pub fn pair(&self, i: usize, j: usize) -> Result<f64> {
        if i == j {
            return Err(Error::InvalidArgument(format!(
                "similarity is defined off the diagonal only (i = j = {i})"
            )));
        }
        for v in [i, j] {
            if v >= self.regions {
                return Err(Error::VertexOutOfRange {
                    vertex: v,
                    n: self.regions,
                });
            }
        }
        Ok(self.pair_unchecked(i, j))
    }

    /// Off-diagonal row `λ(y_i, y_j)`, `j != i`, in increasing `j`.
    pub fn row(&self, i: usize, out: &mut Vec<f64>) {
        out.clear();
        out.extend(
            (0..self.regions)
                .filter(|&j| j != i)
                .map(|j| self.pair_unchecked(i, j)),
        );
    }
}

/// `λ(y_i, y_j)` for a single pair of distinct regions.
pub fn similarity(
    kernel: &SimilarityKernel,
    data: &PanelMatrix,
    i: usize,
    j: usize,
) -> Result<f64> {
    PreparedKernel::new(kernel, data)?.pair(i, j)
}
