//! Power of the local and global tests on Gaussian lattice data.
//!
//! Each replicate draws `T` independent mean-zero Gaussian vectors over the
//! grid with covariance `I + cA` (`A` the rook adjacency), then applies every
//! requested statistic to the same sample.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{GridSpec, WeightGraph};
use crate::kernel::Statistic;
use crate::linalg::BandCholesky;
use crate::lisa::lisa_prepared;
use crate::kernel::PreparedKernel;
use crate::panel::PanelMatrix;
use crate::permutation::stream_rng;
use crate::pvalue::{global_pvalue, local_pvalues};

/// Gaussian field on a grid with covariance `I + cA`, factored once.
#[derive(Debug, Clone)]
pub struct GaussianField {
    graph: WeightGraph,
    c: f64,
    factor: BandCholesky,
}

impl GaussianField {
    pub fn new(grid: GridSpec, c: f64) -> Result<Self> {
        Self::on_graph(WeightGraph::grid(grid), c)
    }

    pub fn on_graph(graph: WeightGraph, c: f64) -> Result<Self> {
        if !c.is_finite() {
            return Err(Error::InvalidArgument(format!("c must be finite, got {c}")));
        }
        let n = graph.vertex_count();
        let factor = BandCholesky::factor(n, graph.bandwidth(), |i, j| {
            if i == j {
                1.0
            } else if graph.contains(i, j) {
                c
            } else {
                0.0
            }
        })
        .map_err(|e| match e {
            Error::NotPositiveDefinite { .. } => Error::CovarianceNotPositiveDefinite { c },
            other => other,
        })?;
        Ok(Self { graph, c, factor })
    }

    pub fn graph(&self) -> &WeightGraph {
        &self.graph
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// `times` independent draws as the rows of a panel.
    pub fn sample(&self, times: usize, rng: &mut impl Rng) -> Result<PanelMatrix> {
        let n = self.graph.vertex_count();
        let mut rows = Vec::with_capacity(times);
        let mut z = vec![0.0; n];
        for _ in 0..times {
            for v in z.iter_mut() {
                *v = rng.sample(StandardNormal);
            }
            rows.push(self.factor.lower_mul(&z));
        }
        PanelMatrix::from_rows(&rows)
    }
}

/// One panel of Gaussian grid data, seeded deterministically.
pub fn sample_grid_gaussian(grid: GridSpec, times: usize, c: f64, seed: u64) -> Result<PanelMatrix> {
    GaussianField::new(grid, c)?.sample(times, &mut stream_rng(seed, 0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PowerMode {
    /// Mean fraction of vertices with raw local p below alpha.
    Lisa,
    /// Fraction of replicates with global p below alpha.
    Gisa,
}

impl PowerMode {
    pub fn name(self) -> &'static str {
        match self {
            PowerMode::Lisa => "lisa",
            PowerMode::Gisa => "gisa",
        }
    }
}

impl fmt::Display for PowerMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PowerMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lisa" => Ok(PowerMode::Lisa),
            "gisa" => Ok(PowerMode::Gisa),
            _ => Err(Error::InvalidArgument(format!(
                "unknown mode '{s}' (expected lisa or gisa)"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub grid: GridSpec,
    pub times: usize,
    pub c_values: Vec<f64>,
    pub replicates: usize,
    pub alpha: f64,
    pub seed: u64,
    pub statistics: Vec<Statistic>,
}

impl SimConfig {
    /// 50x60 grid, `T = 5`, 200 replicates, `c ∈ {-0.25, -0.2, ..., 0.25}`.
    pub fn full_scale(seed: u64) -> Self {
        Self {
            grid: GridSpec::new(50, 60).expect("nonzero grid"),
            times: 5,
            c_values: (-5..=5).map(|k| k as f64 * 0.05).collect(),
            replicates: 200,
            alpha: 0.05,
            seed,
            statistics: Statistic::ALL.to_vec(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::InvalidArgument("replicates must be at least 1".into()));
        }
        if self.times == 0 {
            return Err(Error::InvalidArgument("T must be at least 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidArgument(format!("alpha must be in (0, 1), got {}", self.alpha)));
        }
        if self.statistics.is_empty() || self.c_values.is_empty() {
            return Err(Error::InvalidArgument("need at least one statistic and one c value".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerPoint {
    pub mode: PowerMode,
    pub statistic: Statistic,
    pub c: f64,
    pub power: f64,
    /// Monte Carlo standard error of `power` over replicates.
    pub se: f64,
    pub replicates: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerCurve {
    pub points: Vec<PowerPoint>,
}

impl PowerCurve {
    pub fn get(&self, statistic: Statistic, c: f64) -> Option<&PowerPoint> {
        self.points
            .iter()
            .find(|p| p.statistic == statistic && p.c == c)
    }

    /// `mode,kernel,c,power,se,replicates`
    pub fn write_csv(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "mode,kernel,c,power,se,replicates")?;
        for p in &self.points {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                p.mode, p.statistic, p.c, p.power, p.se, p.replicates
            )?;
        }
        Ok(())
    }
}

/// Per-replicate rejection outcome for each statistic (fraction of vertices
/// in LISA mode, 0/1 in GISA mode).
fn replicate_outcome(
    field: &GaussianField,
    cfg: &SimConfig,
    mode: PowerMode,
    replicate: usize,
) -> Result<Vec<f64>> {
    let mut rng = stream_rng(cfg.seed, replicate as u64);
    let data = field.sample(cfg.times, &mut rng)?;
    let g = field.graph();
    cfg.statistics
        .iter()
        .map(|s| {
            let k = PreparedKernel::new(&s.kernel(), &data)?;
            let lv = lisa_prepared(&k, g)?;
            Ok(match mode {
                PowerMode::Lisa => {
                    let r = local_pvalues(&lv, g)?;
                    let hits = r.p_raw.iter().filter(|&&p| p < cfg.alpha).count();
                    hits as f64 / r.p_raw.len() as f64
                }
                PowerMode::Gisa => {
                    if global_pvalue(&lv, g)?.p < cfg.alpha {
                        1.0
                    } else {
                        0.0
                    }
                }
            })
        })
        .collect()
}

/// Rejection rates for every `(statistic, c)` pair.
///
/// Replicate `r` draws from RNG stream `r` of the seed for every `c`, so the
/// curves share common random numbers across `c` and across statistics.
pub fn power_curve(cfg: &SimConfig, mode: PowerMode) -> Result<PowerCurve> {
    cfg.validate()?;
    let mut points = Vec::new();
    for &c in &cfg.c_values {
        let field = GaussianField::new(cfg.grid, c)?;
        let outcomes: Vec<Vec<f64>> = (0..cfg.replicates)
            .into_par_iter()
            .map(|r| replicate_outcome(&field, cfg, mode, r))
            .collect::<Result<_>>()?;
        let reps = cfg.replicates as f64;
        for (k, &statistic) in cfg.statistics.iter().enumerate() {
            let mean = outcomes.iter().map(|o| o[k]).sum::<f64>() / reps;
            let se = if cfg.replicates > 1 {
                let var = outcomes.iter().map(|o| (o[k] - mean).powi(2)).sum::<f64>() / (reps - 1.0);
                (var / reps).sqrt()
            } else {
                0.0
            };
            points.push(PowerPoint {
                mode,
                statistic,
                c,
                power: mean,
                se,
                replicates: cfg.replicates,
            });
        }
    }
    Ok(PowerCurve { points })
}
