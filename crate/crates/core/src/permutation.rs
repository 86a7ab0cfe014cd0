//! Monte Carlo and exhaustive conditional-permutation p-values.
//!
//! With `π(i) = i` fixed, the neighbors of `i` are mapped to a uniformly
//! random ordered selection of `m_i` distinct regions among the other
//! `n - 1`. Since `γ_i(π)` only depends on which row entries are selected,
//! each permutation is drawn as a partial Fisher–Yates shuffle of the row.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::WeightGraph;
use crate::kernel::{PreparedKernel, SimilarityKernel};
use crate::panel::PanelMatrix;

/// Relative slack under which two deviations count as tied.
const TIE_RTOL: f64 = 1e-9;

/// Largest `n` accepted by the exhaustive enumeration (`(n-1)!` orderings).
pub const MAX_EXHAUSTIVE_N: usize = 10;

/// Replicates per independently seeded block in the global estimator.
const GLOBAL_BLOCK: usize = 1024;

/// RNG for stream `stream` of `seed`; streams never overlap.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Observed quantities for one vertex: its off-diagonal row, the positions
/// of its neighbors within that row, and the tie-tolerant threshold.
struct VertexRow {
    row: Vec<f64>,
    neighbor_pos: Vec<usize>,
    center: f64,
    threshold: f64,
}

impl VertexRow {
    fn new(k: &PreparedKernel, g: &WeightGraph, i: usize) -> Self {
        let mut row = Vec::with_capacity(k.regions());
        k.row(i, &mut row);
        // row skips j = i, so j > i shifts down by one
        let neighbor_pos: Vec<usize> = g
            .neighbors(i)
            .iter()
            .map(|&j| if j > i { j - 1 } else { j })
            .collect();
        let m = neighbor_pos.len();
        let mean = if row.is_empty() {
            0.0
        } else {
            row.iter().sum::<f64>() / row.len() as f64
        };
        let center = m as f64 * mean;
        let observed: f64 = neighbor_pos.iter().map(|&p| row[p]).sum();
        let t = (observed - center).abs();
        let scale = m as f64 * row.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        Self {
            row,
            neighbor_pos,
            center,
            threshold: t - TIE_RTOL * scale,
        }
    }

    fn degree(&self) -> usize {
        self.neighbor_pos.len()
    }

    fn exceeds(&self, permuted: f64) -> bool {
        (permuted - self.center).abs() >= self.threshold
    }
}

fn check_dims(data: &PanelMatrix, g: &WeightGraph) -> Result<()> {
    if data.regions() != g.vertex_count() {
        return Err(Error::DimensionMismatch(format!(
            "graph has {} vertices but the panel has {} regions",
            g.vertex_count(),
            data.regions()
        )));
    }
    Ok(())
}

/// Sum of `m` entries of `row` at uniformly random distinct positions.
/// `slots` must hold a permutation of `0..row.len()`; it stays one.
fn draw_sum(row: &[f64], m: usize, slots: &mut [usize], rng: &mut impl Rng) -> f64 {
    let len = slots.len();
    let mut sum = 0.0;
    for k in 0..m {
        let r = rng.random_range(k..len);
        slots.swap(k, r);
        sum += row[slots[k]];
    }
    sum
}

/// Add-one Monte Carlo p-values `(1 + #{|γ_i(π) - m_i λ̄₋ᵢ| ≥ t_i}) / (B + 1)`.
///
/// Vertex `i` uses RNG stream `i` of `seed`, so the result does not depend
/// on thread scheduling.
pub fn mc_local_pvalues(
    kernel: &SimilarityKernel,
    data: &PanelMatrix,
    g: &WeightGraph,
    permutations: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    check_dims(data, g)?;
    if permutations == 0 {
        return Err(Error::InvalidArgument("permutation count must be at least 1".into()));
    }
    let k = PreparedKernel::new(kernel, data)?;
    let n = data.regions();
    Ok((0..n)
        .into_par_iter()
        .map(|i| {
            let v = VertexRow::new(&k, g, i);
            let mut rng = stream_rng(seed, i as u64);
            let mut slots: Vec<usize> = (0..v.row.len()).collect();
            let hits = (0..permutations)
                .filter(|_| v.exceeds(draw_sum(&v.row, v.degree(), &mut slots, &mut rng)))
                .count();
            (1 + hits) as f64 / (permutations + 1) as f64
        })
        .collect())
}

/// Exact conditional permutation p-values by enumerating all `(n-1)!`
/// permutations that fix the focal vertex.
pub fn exact_local_pvalues(
    kernel: &SimilarityKernel,
    data: &PanelMatrix,
    g: &WeightGraph,
) -> Result<Vec<f64>> {
    check_dims(data, g)?;
    let n = data.regions();
    if n > MAX_EXHAUSTIVE_N {
        return Err(Error::InvalidArgument(format!(
            "exhaustive enumeration supports n <= {MAX_EXHAUSTIVE_N}, got {n}"
        )));
    }
    let k = PreparedKernel::new(kernel, data)?;
    Ok((0..n)
        .map(|i| {
            let v = VertexRow::new(&k, g, i);
            let mut perm: Vec<usize> = (0..v.row.len()).collect();
            let mut hits = 0u64;
            let mut total = 0u64;
            for_each_permutation(&mut perm, &mut |p| {
                let s: f64 = v.neighbor_pos.iter().map(|&q| v.row[p[q]]).sum();
                total += 1;
                if v.exceeds(s) {
                    hits += 1;
                }
            });
            hits as f64 / total as f64
        })
        .collect())
}

/// Heap's algorithm; visits every ordering of `items` once.
fn for_each_permutation(items: &mut [usize], visit: &mut impl FnMut(&[usize])) {
    let len = items.len();
    let mut counters = vec![0usize; len];
    visit(items);
    let mut k = 1;
    while k < len {
        if counters[k] < k {
            if k % 2 == 0 {
                items.swap(0, k);
            } else {
                items.swap(counters[k], k);
            }
            visit(items);
            counters[k] += 1;
            k = 1;
        } else {
            counters[k] = 0;
            k += 1;
        }
    }
}

/// Add-one Monte Carlo p-value of the global index: each replicate draws an
/// independent conditional permutation per vertex and sums `γ_i(π_i)`.
pub fn mc_global_pvalue(
    kernel: &SimilarityKernel,
    data: &PanelMatrix,
    g: &WeightGraph,
    permutations: usize,
    seed: u64,
) -> Result<f64> {
    check_dims(data, g)?;
    if permutations == 0 {
        return Err(Error::InvalidArgument("permutation count must be at least 1".into()));
    }
    let k = PreparedKernel::new(kernel, data)?;
    let n = data.regions();
    let rows: Vec<VertexRow> = (0..n).into_par_iter().map(|i| VertexRow::new(&k, g, i)).collect();
    let center: f64 = rows.iter().map(|v| v.center).sum();
    let observed: f64 = rows
        .iter()
        .map(|v| v.neighbor_pos.iter().map(|&p| v.row[p]).sum::<f64>())
        .sum();
    let t = (observed - center).abs();
    let scale: f64 = rows
        .iter()
        .map(|v| v.degree() as f64 * v.row.iter().fold(0.0f64, |a, x| a.max(x.abs())))
        .sum();
    let threshold = t - TIE_RTOL * scale;

    let blocks = permutations.div_ceil(GLOBAL_BLOCK);
    let hits: usize = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream_rng(seed, b as u64);
            let mut slots: Vec<usize> = (0..n.saturating_sub(1)).collect();
            let reps = GLOBAL_BLOCK.min(permutations - b * GLOBAL_BLOCK);
            (0..reps)
                .filter(|_| {
                    let s: f64 = rows
                        .iter()
                        .map(|v| draw_sum(&v.row, v.degree(), &mut slots, &mut rng))
                        .sum();
                    (s - center).abs() >= threshold
                })
                .count()
        })
        .sum();
    Ok((1 + hits) as f64 / (permutations + 1) as f64)
}
