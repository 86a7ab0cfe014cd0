#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use spgamma::{PanelMatrix, Statistic, WeightGraph};
use spgamma_oracle as oracle;

pub struct Instance {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    pub rows: Vec<Vec<f64>>,
    pub graph: WeightGraph,
    pub data: PanelMatrix,
    pub adj: oracle::Dense,
}

impl Instance {
    pub fn new(n: usize, edges: Vec<(usize, usize)>, rows: Vec<Vec<f64>>) -> Self {
        let graph = WeightGraph::from_edge_list(n, &edges).unwrap();
        let data = PanelMatrix::from_rows(&rows).unwrap();
        let adj = oracle::dense_from_edges(n, &edges);
        Self { n, edges, rows, graph, data, adj }
    }

    pub fn random(rng: &mut impl Rng, n_range: std::ops::RangeInclusive<usize>, t_max: usize) -> Self {
        let n = rng.random_range(n_range);
        let t = rng.random_range(1..=t_max);
        let density = rng.random_range(0.02..0.7);
        let edges = oracle::random_edges(n, density, rng);
        let rows = oracle::random_rows(t, n, rng);
        Self::new(n, edges, rows)
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn oracle_kernel(s: Statistic) -> oracle::Kernel {
    oracle::Kernel::by_name(s.name())
}

pub fn rel_close(a: f64, b: f64, scale: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * scale.max(b.abs()).max(f64::MIN_POSITIVE)
}
