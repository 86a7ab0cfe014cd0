//! Benjamini–Hochberg adjustment, globally and over graph neighborhoods.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::WeightGraph;

/// Default FDR levels reported in significance tables.
pub const DEFAULT_LEVELS: [f64; 2] = [0.05, 0.01];

/// Multiple-testing adjustment applied to raw local p-values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FdrMode {
    /// Benjamini–Hochberg over all vertices.
    Global,
    /// Benjamini–Hochberg within each closed neighborhood.
    Spatial,
    /// Raw p-values.
    None,
}

impl FdrMode {
    pub fn name(self) -> &'static str {
        match self {
            FdrMode::Global => "global",
            FdrMode::Spatial => "spatial",
            FdrMode::None => "none",
        }
    }

    pub fn adjust(self, p: &[f64], g: &WeightGraph) -> Result<Vec<f64>> {
        match self {
            FdrMode::Global => bh_adjust(p),
            FdrMode::Spatial => spatial_bh_adjust(p, g),
            FdrMode::None => {
                validate(p)?;
                Ok(p.to_vec())
            }
        }
    }
}

impl fmt::Display for FdrMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FdrMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "global" => Ok(FdrMode::Global),
            "spatial" => Ok(FdrMode::Spatial),
            "none" => Ok(FdrMode::None),
            _ => Err(Error::InvalidArgument(format!(
                "unknown FDR mode '{s}' (expected global, spatial or none)"
            ))),
        }
    }
}

fn validate(p: &[f64]) -> Result<()> {
    match p.iter().position(|v| !(0.0..=1.0).contains(v)) {
        Some(i) => Err(Error::Domain(format!(
            "p-value {} at index {i} is not in [0, 1]",
            p[i]
        ))),
        None => Ok(()),
    }
}

/// Step-up adjustment without validation.
fn step_up(p: &[f64]) -> Vec<f64> {
    let n = p.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| p[a].total_cmp(&p[b]));
    let mut adjusted = vec![0.0; n];
    let mut running = 1.0f64;
    for (rank, &idx) in order.iter().enumerate().rev() {
        let q = (p[idx] * n as f64 / (rank + 1) as f64).max(p[idx]);
        running = running.min(q);
        adjusted[idx] = running;
    }
    adjusted
}

/// Benjamini–Hochberg adjusted p-values, `q_(k) = min_{j≥k} n p_(j) / j`,
/// capped at 1 and returned in input order.
pub fn bh_adjust(p: &[f64]) -> Result<Vec<f64>> {
    validate(p)?;
    Ok(step_up(p))
}

/// For each vertex, Benjamini–Hochberg over the p-values of its closed
/// neighborhood `N(i) ∪ {i}`, reporting the vertex's own adjusted value.
pub fn spatial_bh_adjust(p: &[f64], g: &WeightGraph) -> Result<Vec<f64>> {
    if p.len() != g.vertex_count() {
        return Err(Error::DimensionMismatch(format!(
            "{} p-values for a graph with {} vertices",
            p.len(),
            g.vertex_count()
        )));
    }
    validate(p)?;
    Ok((0..p.len())
        .into_par_iter()
        .map(|i| {
            let nbrs = g.neighbors(i);
            if nbrs.is_empty() {
                return p[i];
            }
            let mut local = Vec::with_capacity(nbrs.len() + 1);
            local.push(p[i]);
            local.extend(nbrs.iter().map(|&j| p[j]));
            step_up(&local)[0]
        })
        .collect())
}

/// One row of a significance table.
#[derive(Debug, Clone, PartialEq)]
pub struct SignificanceRow {
    pub region: usize,
    pub p_raw: f64,
    pub p_adj: f64,
    /// Levels from the configured set with `p_adj <= level`.
    pub significant_at: Vec<f64>,
    pub sign: i8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignificanceTable {
    pub levels: Vec<f64>,
    pub rows: Vec<SignificanceRow>,
}

impl SignificanceTable {
    pub fn new(p_raw: &[f64], p_adj: &[f64], sign: &[i8], levels: &[f64]) -> Result<Self> {
        if p_raw.len() != p_adj.len() || p_raw.len() != sign.len() {
            return Err(Error::DimensionMismatch(
                "p_raw, p_adj and sign must have equal length".into(),
            ));
        }
        let rows = (0..p_raw.len())
            .map(|i| SignificanceRow {
                region: i,
                p_raw: p_raw[i],
                p_adj: p_adj[i],
                significant_at: levels.iter().copied().filter(|&a| p_adj[i] <= a).collect(),
                sign: sign[i],
            })
            .collect();
        Ok(Self {
            levels: levels.to_vec(),
            rows,
        })
    }

    /// Whether each region is significant at `level`.
    pub fn flags(&self, level: f64) -> Vec<bool> {
        self.rows.iter().map(|r| r.p_adj <= level).collect()
    }
}
