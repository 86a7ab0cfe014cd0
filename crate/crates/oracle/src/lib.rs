//! Slow, direct reference implementations for testing `spgamma`.
//!
//! Everything here works on plain vectors: `rows[t][i]` is the value of
//! region `i` at time `t` and graphs are dense boolean matrices.

use rand::Rng;
use rand_distr::StandardNormal;

pub type Dense = Vec<Vec<bool>>;

#[derive(Debug, Clone, PartialEq)]
pub enum Kernel {
    /// Optional `T x T` metric, identity when `None`.
    Moran(Option<Vec<Vec<f64>>>),
    GearyL2,
    GearyL1,
    Binary,
}

impl Kernel {
    pub fn by_name(name: &str) -> Kernel {
        match name {
            "moran" => Kernel::Moran(None),
            "geary-l2" => Kernel::GearyL2,
            "geary-l1" => Kernel::GearyL1,
            "binary" => Kernel::Binary,
            other => panic!("unknown kernel {other}"),
        }
    }
}

pub const KERNEL_NAMES: [&str; 4] = ["moran", "geary-l2", "geary-l1", "binary"];

fn column(rows: &[Vec<f64>], i: usize) -> Vec<f64> {
    rows.iter().map(|r| r[i]).collect()
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Dense `n x n` similarity matrix (diagonal left at zero).
pub fn similarity_matrix(kernel: &Kernel, rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let t = rows.len();
    let n = rows[0].len();
    let mut lam = vec![vec![0.0; n]; n];
    match kernel {
        Kernel::Moran(metric) => {
            let means: Vec<f64> = rows.iter().map(|r| r.iter().sum::<f64>() / n as f64).collect();
            let dev: Vec<Vec<f64>> = (0..n)
                .map(|i| (0..t).map(|k| rows[k][i] - means[k]).collect())
                .collect();
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    let mut s = 0.0;
                    for k in 0..t {
                        for l in 0..t {
                            let m = match metric {
                                Some(mm) => mm[k][l],
                                None => f64::from(u8::from(k == l)),
                            };
                            s += dev[i][k] * m * dev[j][l];
                        }
                    }
                    lam[i][j] = s;
                }
            }
        }
        Kernel::GearyL2 | Kernel::GearyL1 => {
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    let (a, b) = (column(rows, i), column(rows, j));
                    lam[i][j] = a
                        .iter()
                        .zip(&b)
                        .map(|(x, y)| match kernel {
                            Kernel::GearyL2 => (x - y) * (x - y),
                            _ => (x - y).abs(),
                        })
                        .sum();
                }
            }
        }
        Kernel::Binary => {
            let med: Vec<f64> = rows.iter().map(|r| median(r.clone())).collect();
            let beta = |i: usize, k: usize| if rows[k][i] >= med[k] { 1.0 } else { -1.0 };
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        lam[i][j] = (0..t).map(|k| beta(i, k) * beta(j, k)).sum();
                    }
                }
            }
        }
    }
    lam
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lisa {
    pub gamma: Vec<f64>,
    pub center: Vec<f64>,
    pub rowmean: Vec<f64>,
    pub rowvar: Vec<f64>,
}

/// Double-sum local indices and two-pass row summaries.
pub fn lisa(kernel: &Kernel, rows: &[Vec<f64>], adj: &Dense) -> Lisa {
    let n = adj.len();
    let lam = similarity_matrix(kernel, rows);
    let mut out = Lisa {
        gamma: vec![0.0; n],
        center: vec![0.0; n],
        rowmean: vec![0.0; n],
        rowvar: vec![0.0; n],
    };
    if n < 2 {
        return out;
    }
    for i in 0..n {
        let off: Vec<f64> = (0..n).filter(|&j| j != i).map(|j| lam[i][j]).collect();
        let mean = off.iter().sum::<f64>() / (n - 1) as f64;
        let var = off.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let m = adj[i].iter().filter(|&&w| w).count() as f64;
        out.gamma[i] = (0..n).filter(|&j| adj[i][j]).map(|j| lam[i][j]).sum();
        out.rowmean[i] = mean;
        out.rowvar[i] = var;
        out.center[i] = m * mean;
    }
    out
}

pub fn dense_from_edges(n: usize, edges: &[(usize, usize)]) -> Dense {
    let mut adj = vec![vec![false; n]; n];
    for &(a, b) in edges {
        adj[a][b] = true;
        adj[b][a] = true;
    }
    adj
}

pub fn edges_of(adj: &Dense) -> Vec<(usize, usize)> {
    let n = adj.len();
    let mut e = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if adj[i][j] {
                e.push((i, j));
            }
        }
    }
    e
}

/// All-pairs hop distances by Floyd–Warshall; `None` when unreachable.
pub fn distances(adj: &Dense) -> Vec<Vec<Option<usize>>> {
    let n = adj.len();
    let mut d = vec![vec![None; n]; n];
    for i in 0..n {
        d[i][i] = Some(0);
        for j in 0..n {
            if adj[i][j] {
                d[i][j] = Some(1);
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(a), Some(b)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|c| a + b < c) {
                        d[i][j] = Some(a + b);
                    }
                }
            }
        }
    }
    d
}

/// `W_k = [W^k > 0] ∘ Π_{l<k} (1 - W_l)` with `W_0 = I`, by matrix products.
pub fn lag_by_recursion(adj: &Dense, k: usize) -> Dense {
    let n = adj.len();
    let identity: Dense = (0..n).map(|i| (0..n).map(|j| i == j).collect()).collect();
    let mut lags = vec![identity.clone()];
    let mut walk = identity;
    for _ in 1..=k {
        let mut next = vec![vec![false; n]; n];
        for i in 0..n {
            for j in 0..n {
                next[i][j] = (0..n).any(|l| walk[i][l] && adj[l][j]);
            }
        }
        walk = next;
        let lag: Dense = (0..n)
            .map(|i| (0..n).map(|j| walk[i][j] && lags.iter().all(|w| !w[i][j])).collect())
            .collect();
        lags.push(lag);
    }
    lags.pop().unwrap()
}

fn subsets(n: usize, m: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(start: usize, n: usize, m: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == m {
            f(cur);
            return;
        }
        for s in start..n {
            if n - s < m - cur.len() {
                break;
            }
            cur.push(s);
            rec(s + 1, n, m, cur, f);
            cur.pop();
        }
    }
    rec(0, n, m, &mut Vec::new(), f);
}

/// Exact conditional permutation p-value at every vertex.
///
/// Under a uniform relabeling of the other `n - 1` regions the neighbor slots
/// receive a uniform `m_i`-subset of them, so the tail probability is a count
/// over subsets. Deviations within `1e-9` of the row scale count as ties.
pub fn exact_pvalues(kernel: &Kernel, rows: &[Vec<f64>], adj: &Dense) -> Vec<f64> {
    let n = adj.len();
    let lam = similarity_matrix(kernel, rows);
    let fit = lisa(kernel, rows, adj);
    (0..n)
        .map(|i| {
            let others: Vec<f64> = (0..n).filter(|&j| j != i).map(|j| lam[i][j]).collect();
            let m = adj[i].iter().filter(|&&w| w).count();
            let t = (fit.gamma[i] - fit.center[i]).abs();
            let scale = others.iter().map(|v| v.abs()).fold(0.0, f64::max) * m.max(1) as f64;
            let (mut hit, mut total) = (0u64, 0u64);
            subsets(others.len(), m, &mut |s| {
                let sum: f64 = s.iter().map(|&k| others[k]).sum();
                total += 1;
                if (sum - fit.center[i]).abs() >= t - 1e-9 * scale {
                    hit += 1;
                }
            });
            hit as f64 / total as f64
        })
        .collect()
}

/// Benjamini–Hochberg by its defining formula,
/// `q_i = min_{j: p_j >= p_i} min(1, n p_j / #{k: p_k <= p_j})`.
pub fn bh(p: &[f64]) -> Vec<f64> {
    let n = p.len() as f64;
    p.iter()
        .map(|&pi| {
            p.iter()
                .filter(|&&pj| pj >= pi)
                .map(|&pj| {
                    let rank = p.iter().filter(|&&pk| pk <= pj).count() as f64;
                    (n * pj / rank).min(1.0)
                })
                .fold(1.0, f64::min)
        })
        .collect()
}

pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

/// Erdős–Rényi edge list.
pub fn random_edges(n: usize, p: f64, rng: &mut impl Rng) -> Vec<(usize, usize)> {
    let mut e = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < p {
                e.push((i, j));
            }
        }
    }
    e
}

/// `T x n` data mixing Gaussian, heavy-tailed, shifted and rounded values.
pub fn random_rows(t: usize, n: usize, rng: &mut impl Rng) -> Vec<Vec<f64>> {
    let style = rng.random_range(0..4);
    let shift: f64 = rng.random_range(-50.0..50.0);
    (0..t)
        .map(|_| {
            (0..n)
                .map(|_| {
                    let z: f64 = rng.sample(StandardNormal);
                    match style {
                        0 => z,
                        1 => shift + 3.0 * z,
                        2 => z / rng.random_range(0.05f64..1.0),
                        _ => (2.0 * z).round(),
                    }
                })
                .collect()
        })
        .collect()
}
