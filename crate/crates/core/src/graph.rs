//! Weighted mutual k-nearest-neighbor graph.
//!
//! Distances are stored densely (`N x N`), which bounds practical use to a few
//! tens of thousands of samples.

use std::io::Write;

use rayon::prelude::*;

use crate::dataset::LabeledDataset;
use crate::error::{CodError, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Metric {
    #[default]
    Euclidean,
}

/// Dense symmetric pairwise distance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    d: Vec<f64>,
}

impl DistanceMatrix {
    /// Wraps a row-major `n x n` matrix after checking it is a valid
    /// distance table (zero diagonal, symmetric, finite, non-negative).
    pub fn from_dense(n: usize, d: Vec<f64>) -> Result<Self> {
        if d.len() != n * n {
            return Err(CodError::SizeMismatch(format!(
                "{} entries for a {n}x{n} distance matrix",
                d.len()
            )));
        }
        for i in 0..n {
            if d[i * n + i] != 0.0 {
                return Err(CodError::param(format!("d[{i}][{i}] is not zero")));
            }
            for j in 0..i {
                let x = d[i * n + j];
                if !x.is_finite() || x < 0.0 || x != d[j * n + i] {
                    return Err(CodError::param(format!(
                        "d[{i}][{j}] is not a finite symmetric distance"
                    )));
                }
            }
        }
        Ok(Self { n, d })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.d[i * self.n..(i + 1) * self.n]
    }
}

pub fn pairwise_distances(ds: &LabeledDataset, metric: Metric) -> DistanceMatrix {
    let n = ds.n_samples();
    let mut d = vec![0.0; n * n];
    match metric {
        Metric::Euclidean => {
            d.par_chunks_mut(n.max(1)).enumerate().for_each(|(i, out)| {
                let a = ds.row(i);
                for (j, slot) in out.iter_mut().enumerate() {
                    if j != i {
                        *slot = euclidean(a, ds.row(j));
                    }
                }
            });
        }
    }
    DistanceMatrix { n, d }
}

#[inline]
fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// The `k` nearest other nodes of every node, closest first. Ties are broken
/// by the lower node index.
pub fn knn_sets(dm: &DistanceMatrix, k: usize) -> Result<Vec<Vec<usize>>> {
    let n = dm.len();
    if k == 0 || k >= n {
        return Err(CodError::param(format!(
            "k = {k} outside 1..={} for {n} samples",
            n.saturating_sub(1)
        )));
    }
    Ok((0..n)
        .into_par_iter()
        .map(|i| {
            let row = dm.row(i);
            let by_distance =
                |a: &usize, b: &usize| row[*a].total_cmp(&row[*b]).then_with(|| a.cmp(b));
            let mut others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
            if k < others.len() {
                others.select_nth_unstable_by(k - 1, by_distance);
                others.truncate(k);
            }
            others.sort_unstable_by(by_distance);
            others
        })
        .collect())
}

/// Undirected weighted graph with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    k: usize,
    adjacency: Vec<Vec<(usize, f64)>>,
}

impl WeightedGraph {
    /// Builds a graph from an undirected edge list; duplicate edges keep the
    /// last weight.
    pub fn from_edges(n_nodes: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); n_nodes];
        for &(i, j, w) in edges {
            if i >= n_nodes || j >= n_nodes {
                return Err(CodError::param(format!(
                    "edge ({i}, {j}) outside {n_nodes} nodes"
                )));
            }
            if i == j {
                return Err(CodError::param(format!("self-loop on node {i}")));
            }
            if !(w > 0.0 && w <= 1.0) {
                return Err(CodError::param(format!("edge weight {w} outside (0, 1]")));
            }
            adjacency[i].push((j, w));
            adjacency[j].push((i, w));
        }
        for list in &mut adjacency {
            list.sort_by_key(|&(j, _)| j);
            list.reverse();
            list.dedup_by_key(|&mut (j, _)| j);
            list.reverse();
        }
        let k = adjacency.iter().map(Vec::len).max().unwrap_or(0);
        Ok(Self { k, adjacency })
    }

    pub fn n_nodes(&self) -> usize {
        self.adjacency.len()
    }

    /// Neighbor count used to build the graph (max degree for graphs built
    /// from an edge list).
    pub fn k(&self) -> usize {
        self.k
    }

    /// Neighbors of `i` with edge weights, sorted by neighbor index.
    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.adjacency[i]
    }

    pub fn neighbor_ids(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency[i].iter().map(|&(j, _)| j)
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[i]
            .binary_search_by_key(&j, |&(n, _)| n)
            .is_ok()
    }

    pub fn weight(&self, i: usize, j: usize) -> Option<f64> {
        self.adjacency[i]
            .binary_search_by_key(&j, |&(n, _)| n)
            .ok()
            .map(|p| self.adjacency[i][p].1)
    }

    /// Edges `(i, j, weight)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(i, list)| {
            list.iter()
                .filter(move |&&(j, _)| j > i)
                .map(move |&(j, w)| (i, j, w))
        })
    }

    pub fn n_edges(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Writes one `i j weight` line per edge, weights with 12 significant digits.
    pub fn write_edge_list<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for (i, j, weight) in self.edges() {
            writeln!(w, "{i} {j} {}", format_significant(weight, 12))?;
        }
        Ok(())
    }
}

fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return format!("{:.*}", digits - 1, 0.0);
    }
    let magnitude = x.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Mutual kNN graph: `(i, j)` is an edge iff each is among the other's `k`
/// nearest neighbors, with weight `1 / (d(i, j) + 1)`.
pub fn mutual_knn_graph(ds: &LabeledDataset, k: usize) -> Result<(DistanceMatrix, WeightedGraph)> {
    let dm = pairwise_distances(ds, Metric::Euclidean);
    let g = mutual_knn_graph_from_distances(&dm, k)?;
    Ok((dm, g))
}

pub fn mutual_knn_graph_from_distances(dm: &DistanceMatrix, k: usize) -> Result<WeightedGraph> {
    let knn = knn_sets(dm, k)?;
    let sorted: Vec<Vec<usize>> = knn
        .iter()
        .map(|list| {
            let mut s = list.clone();
            s.sort_unstable();
            s
        })
        .collect();
    let adjacency = sorted
        .par_iter()
        .enumerate()
        .map(|(i, list)| {
            list.iter()
                .filter(|&&j| sorted[j].binary_search(&i).is_ok())
                .map(|&j| (j, 1.0 / (dm.get(i, j) + 1.0)))
                .collect()
        })
        .collect();
    Ok(WeightedGraph { k, adjacency })
}
