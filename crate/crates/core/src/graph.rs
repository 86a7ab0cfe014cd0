//! Sparse binary weight matrices over region graphs.
//!
//! A [`WeightGraph`] stores a symmetric, diagonal-free 0/1 matrix in
//! compressed sparse row form. Every stored entry is a 1; the degree of a
//! vertex is the length of its neighbor list.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Symmetric binary weight matrix in CSR layout with sorted neighbor lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightGraph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
}

/// Rectangular lattice dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    rows: usize,
    cols: usize,
}

impl GridSpec {
    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument(format!(
                "grid dimensions must be positive, got {rows}x{cols}"
            )));
        }
        Ok(Self { rows, cols })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn vertex_count(&self) -> usize {
        self.rows * self.cols
    }

    /// Vertex id of lattice cell `(row, col)`.
    pub fn index(&self, row: usize, col: usize) -> usize {
        row * self.cols + col
    }
}

impl WeightGraph {
    /// Graph with `n` vertices and no edges.
    pub fn empty(n: usize) -> Self {
        Self {
            offsets: vec![0; n + 1],
            targets: Vec::new(),
        }
    }

    /// Every distinct pair of vertices adjacent.
    pub fn complete(n: usize) -> Self {
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::with_capacity(n * n.saturating_sub(1));
        offsets.push(0);
        for i in 0..n {
            targets.extend((0..n).filter(|&j| j != i));
            offsets.push(targets.len());
        }
        Self { offsets, targets }
    }

    /// Builds an undirected graph from an edge list. Either orientation of an
    /// edge is accepted and duplicates collapse to a single entry.
    pub fn from_edge_list(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(src, dst) in edges {
            for v in [src, dst] {
                if v >= n {
                    return Err(Error::VertexOutOfRange { vertex: v, n });
                }
            }
            if src == dst {
                return Err(Error::SelfLoop(src));
            }
            adjacency[src].push(dst);
            adjacency[dst].push(src);
        }
        Ok(Self::from_adjacency(adjacency))
    }

    /// Assumes the lists describe a symmetric relation without self-loops.
    fn from_adjacency(mut adjacency: Vec<Vec<usize>>) -> Self {
        let mut offsets = Vec::with_capacity(adjacency.len() + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
            targets.extend_from_slice(list);
            offsets.push(targets.len());
        }
        Self { offsets, targets }
    }

    /// Rook-adjacency lattice; cell `(r, c)` is vertex `r * cols + c`.
    pub fn grid(spec: GridSpec) -> Self {
        let (rows, cols) = (spec.rows, spec.cols);
        let mut adjacency = vec![Vec::with_capacity(4); rows * cols];
        for r in 0..rows {
            for c in 0..cols {
                let v = spec.index(r, c);
                if r > 0 {
                    adjacency[v].push(spec.index(r - 1, c));
                }
                if c > 0 {
                    adjacency[v].push(spec.index(r, c - 1));
                }
                if c + 1 < cols {
                    adjacency[v].push(spec.index(r, c + 1));
                }
                if r + 1 < rows {
                    adjacency[v].push(spec.index(r + 1, c));
                }
            }
        }
        Self::from_adjacency(adjacency)
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    /// Row sum `m_i` of the weight matrix.
    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.vertex_count()).map(|i| self.degree(i)).collect()
    }

    /// Sorted neighbor ids of vertex `i`.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }

    /// Weight `w_{i,j}` as a boolean.
    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.neighbors(i).binary_search(&j).is_ok()
    }

    /// Undirected edges as `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.vertex_count()).flat_map(move |i| {
            self.neighbors(i)
                .iter()
                .copied()
                .filter(move |&j| j > i)
                .map(move |j| (i, j))
        })
    }

    /// Largest `|i - j|` over stored entries.
    pub fn bandwidth(&self) -> usize {
        self.edges().map(|(i, j)| j - i).max().unwrap_or(0)
    }

    /// The k-lagged weight matrix: `w_{i,j} = 1` exactly when the graph
    /// distance between `i` and `j` equals `k`.
    ///
    /// Computed by breadth-first frontier expansion from each vertex, which
    /// agrees with the binarized matrix recursion
    /// `W_k = W_1^k ∘ Π_{l<k} (1 - W_l)`. The diagonal relation `W_0 = I`
    /// cannot be stored in a weight graph, so `k = 0` yields no edges.
    pub fn lag(&self, k: usize) -> WeightGraph {
        let n = self.vertex_count();
        if k == 0 {
            return WeightGraph::empty(n);
        }
        if k == 1 {
            return self.clone();
        }
        let adjacency: Vec<Vec<usize>> = (0..n)
            .into_par_iter()
            .map_init(
                || (vec![usize::MAX; n], Vec::new(), Vec::new()),
                |(seen, frontier, next), source| {
                    // `seen` holds the last source that visited each vertex,
                    // so the buffer is reused without clearing.
                    seen[source] = source;
                    frontier.clear();
                    frontier.push(source);
                    for _ in 0..k {
                        next.clear();
                        for &v in frontier.iter() {
                            for &u in self.neighbors(v) {
                                if seen[u] != source {
                                    seen[u] = source;
                                    next.push(u);
                                }
                            }
                        }
                        std::mem::swap(frontier, next);
                        if frontier.is_empty() {
                            break;
                        }
                    }
                    frontier.clone()
                },
            )
            .collect();
        Self::from_adjacency(adjacency)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> WeightGraph {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        WeightGraph::from_edge_list(n, &edges).unwrap()
    }

    #[test]
    fn path_graph_degrees() {
        let g = WeightGraph::from_edge_list(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(g.degrees(), vec![1, 2, 1]);
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn symmetric_pair_is_deduplicated() {
        let g = WeightGraph::from_edge_list(2, &[(0, 1), (1, 0)]).unwrap();
        assert_eq!(g.degrees(), vec![1, 1]);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn self_loop_rejected() {
        let err = WeightGraph::from_edge_list(1, &[(0, 0)]).unwrap_err();
        assert!(matches!(err, Error::SelfLoop(0)));
    }

    #[test]
    fn out_of_range_rejected() {
        let err = WeightGraph::from_edge_list(3, &[(0, 3)]).unwrap_err();
        assert!(matches!(err, Error::VertexOutOfRange { vertex: 3, n: 3 }));
    }

    #[test]
    fn grid_counts() {
        let g = WeightGraph::grid(GridSpec::new(2, 2).unwrap());
        assert_eq!(g.vertex_count(), 4);
        assert_eq!(g.edge_count(), 4);
        assert_eq!(g.degrees(), vec![2, 2, 2, 2]);

        let g = WeightGraph::grid(GridSpec::new(50, 60).unwrap());
        assert_eq!(g.vertex_count(), 3000);
        assert_eq!(g.edge_count(), 5890);

        let g = WeightGraph::grid(GridSpec::new(1, 1).unwrap());
        assert_eq!(g.vertex_count(), 1);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn grid_degree_histogram() {
        let (rows, cols) = (7, 9);
        let g = WeightGraph::grid(GridSpec::new(rows, cols).unwrap());
        let mut hist = [0usize; 5];
        for d in g.degrees() {
            hist[d] += 1;
        }
        assert_eq!(hist[2], 4);
        assert_eq!(hist[3], 2 * (rows - 2) + 2 * (cols - 2));
        assert_eq!(hist[4], (rows - 2) * (cols - 2));
    }

    #[test]
    fn zero_sized_grid_rejected() {
        assert!(GridSpec::new(0, 3).is_err());
    }

    #[test]
    fn lag_two_on_path() {
        let lag = path(4).lag(2);
        assert_eq!(lag.edges().collect::<Vec<_>>(), vec![(0, 2), (1, 3)]);
    }

    #[test]
    fn lag_one_is_identity_map() {
        let g = path(6);
        assert_eq!(g.lag(1), g);
    }

    #[test]
    fn lag_beyond_diameter_is_empty() {
        let lag = path(3).lag(5);
        assert_eq!(lag.edge_count(), 0);
        assert_eq!(lag.vertex_count(), 3);
    }

    #[test]
    fn lag_zero_has_no_edges() {
        assert_eq!(path(4).lag(0).edge_count(), 0);
    }

    #[test]
    fn bandwidth_of_grid_is_column_count() {
        let g = WeightGraph::grid(GridSpec::new(4, 7).unwrap());
        assert_eq!(g.bandwidth(), 7);
    }
}
