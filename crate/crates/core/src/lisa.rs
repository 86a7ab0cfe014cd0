//! Local and global gamma indices.
//!
//! For vertex `i` the local index is `γ_i = Σ_j w_{ij} λ(y_i, y_j)`. The
//! permutation bounds also need the off-diagonal row summaries
//! `λ̄₋ᵢ = (n-1)⁻¹ Σ_{j≠i} λ_{ij}` and `s_i² = (n-1)⁻¹ Σ_{j≠i} (λ_{ij} - λ̄₋ᵢ)²`.
//!
//! Moran, Geary ℓ² and binary association are bilinear in the (transformed)
//! region vectors, so their row sums and sums of squares reduce to `T x T`
//! moment matrices and cost `O(n T²)` overall. Geary ℓ¹ has no such form and
//! sweeps each row explicitly.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::WeightGraph;
use crate::kernel::{PreparedKernel, SimilarityKernel, Statistic};
use crate::panel::PanelMatrix;

/// Rows whose variance is this small relative to the squared mean are
/// recomputed by an explicit two-pass sweep.
const CANCELLATION_GUARD: f64 = 1e-4;

/// Per-vertex local statistics and row summaries.
#[derive(Debug, Clone, PartialEq)]
pub struct LisaVector {
    /// `γ_i`.
    pub gamma: Vec<f64>,
    /// `m_i λ̄₋ᵢ`, the permutation mean of `γ_i`.
    pub center: Vec<f64>,
    /// `λ̄₋ᵢ`.
    pub rowmean: Vec<f64>,
    /// `s_i²`.
    pub rowvar: Vec<f64>,
}

impl LisaVector {
    pub fn len(&self) -> usize {
        self.gamma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gamma.is_empty()
    }
}

/// Global statistic `γ = Σ γ_i` and its permutation center `Σ m_i λ̄₋ᵢ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GisaValue {
    pub gamma: f64,
    pub center: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn quad_form(m: &[f64], x: &[f64], y: &[f64]) -> f64 {
    let t = x.len();
    (0..t).map(|r| x[r] * dot(&m[r * t..(r + 1) * t], y)).sum()
}

/// Column sums, weighted column sums and the second-moment matrix of a
/// region-major set of vectors.
struct Moments {
    sum: Vec<f64>,
    weighted_sum: Vec<f64>,
    second: Vec<f64>,
    norm_sum: f64,
    norm_sq_sum: f64,
}

impl Moments {
    fn of(k: &PreparedKernel, vector: impl Fn(usize) -> Vec<f64>) -> Self {
        let t = k.times();
        let mut m = Moments {
            sum: vec![0.0; t],
            weighted_sum: vec![0.0; t],
            second: vec![0.0; t * t],
            norm_sum: 0.0,
            norm_sq_sum: 0.0,
        };
        for j in 0..k.regions() {
            let z = vector(j);
            let a = dot(&z, &z);
            m.norm_sum += a;
            m.norm_sq_sum += a * a;
            for r in 0..t {
                m.sum[r] += z[r];
                m.weighted_sum[r] += a * z[r];
                for c in 0..t {
                    m.second[r * t + c] += z[r] * z[c];
                }
            }
        }
        m
    }
}

/// Two-pass mean and variance (denominator `len`) of row `i`.
fn sweep_row(k: &PreparedKernel, i: usize) -> (f64, f64) {
    let n = k.regions();
    let d = (n - 1) as f64;
    let mean = (0..n)
        .filter(|&j| j != i)
        .map(|j| k.pair_unchecked(i, j))
        .sum::<f64>()
        / d;
    let var = (0..n)
        .filter(|&j| j != i)
        .map(|j| {
            let e = k.pair_unchecked(i, j) - mean;
            e * e
        })
        .sum::<f64>()
        / d;
    (mean, var)
}

/// Local gamma indices of `kernel` on `data` over the weight graph `g`.
pub fn lisa(kernel: &SimilarityKernel, data: &PanelMatrix, g: &WeightGraph) -> Result<LisaVector> {
    let prepared = PreparedKernel::new(kernel, data)?;
    lisa_prepared(&prepared, g)
}

pub fn lisa_prepared(k: &PreparedKernel, g: &WeightGraph) -> Result<LisaVector> {
    let n = k.regions();
    if g.vertex_count() != n {
        return Err(Error::DimensionMismatch(format!(
            "graph has {} vertices but the panel has {n} regions",
            g.vertex_count()
        )));
    }
    let t = k.times();
    let stat = k.statistic();
    let moments = match stat {
        Statistic::GearyL1 => None,
        _ => Some(Moments::of(k, |j| k.right(j).to_vec())),
    };

    let per_vertex = |i: usize| -> (f64, f64, f64) {
        let nbrs = g.neighbors(i);
        let mut neighbor_sum = vec![0.0; t];
        for &j in nbrs {
            for (acc, v) in neighbor_sum.iter_mut().zip(k.right(j)) {
                *acc += v;
            }
        }
        if n < 2 {
            return (0.0, 0.0, 0.0);
        }
        let d = (n - 1) as f64;
        let (gamma, row_sum, row_sq) = match (stat, &moments) {
            (Statistic::Moran, Some(m)) => {
                // λ_ij = u_i · z_j
                let (u, z) = (k.left(i), k.right(i));
                let diag = dot(u, z);
                (
                    dot(u, &neighbor_sum),
                    dot(u, &m.sum) - diag,
                    quad_form(&m.second, u, u) - diag * diag,
                )
            }
            (Statistic::Binary, Some(m)) => {
                // λ_ij = β_i · β_j with λ_ii = T
                let b = k.left(i);
                let diag = t as f64;
                (
                    dot(b, &neighbor_sum),
                    dot(b, &m.sum) - diag,
                    quad_form(&m.second, b, b) - diag * diag,
                )
            }
            (Statistic::GearyL2, Some(m)) => {
                // λ_ij = a_i + a_j - 2 z_i · z_j with a = ‖z‖², λ_ii = 0
                let z = k.left(i);
                let a = dot(z, z);
                let neighbor_norms: f64 = nbrs
                    .iter()
                    .map(|&j| {
                        let zj = k.left(j);
                        dot(zj, zj)
                    })
                    .sum();
                let nf = n as f64;
                let zs = dot(z, &m.sum);
                (
                    nbrs.len() as f64 * a + neighbor_norms - 2.0 * dot(z, &neighbor_sum),
                    nf * a + m.norm_sum - 2.0 * zs,
                    nf * a * a + 2.0 * a * m.norm_sum + m.norm_sq_sum - 4.0 * a * zs
                        - 4.0 * dot(z, &m.weighted_sum)
                        + 4.0 * quad_form(&m.second, z, z),
                )
            }
            _ => {
                let gamma: f64 = nbrs.iter().map(|&j| k.pair_unchecked(i, j)).sum();
                let (mean, var) = sweep_row(k, i);
                return (gamma, mean, var);
            }
        };
        let mean = row_sum / d;
        let mut var = ((d * row_sq - row_sum * row_sum) / (d * d)).max(0.0);
        if stat != Statistic::Binary && var <= CANCELLATION_GUARD * mean * mean {
            let (_, v) = sweep_row(k, i);
            var = v;
        }
        (gamma, mean, var)
    };

    let rows: Vec<(f64, f64, f64)> = (0..n).into_par_iter().map(per_vertex).collect();
    let mut out = LisaVector {
        gamma: Vec::with_capacity(n),
        center: Vec::with_capacity(n),
        rowmean: Vec::with_capacity(n),
        rowvar: Vec::with_capacity(n),
    };
    for (i, (gamma, mean, var)) in rows.into_iter().enumerate() {
        out.gamma.push(gamma);
        out.center.push(g.degree(i) as f64 * mean);
        out.rowmean.push(mean);
        out.rowvar.push(var);
    }
    Ok(out)
}

/// Sums the local statistics into the global indicator.
pub fn gisa(lv: &LisaVector) -> GisaValue {
    GisaValue {
        gamma: lv.gamma.iter().sum(),
        center: lv.center.iter().sum(),
    }
}
