//! Overlapping communities: clique percolation for the initial set, then a
//! one-shot extension that admits isolated nodes whose distance-weighted
//! connection to a community is strong enough relative to the community's
//! internal connectivity.

use std::io::Write;

use rayon::prelude::*;

use crate::error::{CodError, Result};
use crate::graph::{DistanceMatrix, WeightedGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommunityOrigin {
    Initial,
    Extended,
}

impl std::fmt::Display for CommunityOrigin {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CommunityOrigin::Initial => "initial",
            CommunityOrigin::Extended => "extended",
        })
    }
}

/// Overlapping node communities over a graph of `n_nodes` nodes.
///
/// Each community keeps its initial (percolation) members separately from
/// the nodes added by extension; belongingness and internal connectivity are
/// always evaluated on the initial members.
#[derive(Debug, Clone, PartialEq)]
pub struct CommunitySet {
    n_nodes: usize,
    q: usize,
    initial: Vec<Vec<usize>>,
    members: Vec<Vec<usize>>,
    origin: Vec<CommunityOrigin>,
    member_index: Vec<Vec<usize>>,
    covered: Vec<bool>,
}

impl CommunitySet {
    /// Wraps a set of initial communities (each sorted and deduplicated here).
    pub fn from_initial(n_nodes: usize, q: usize, communities: Vec<Vec<usize>>) -> Result<Self> {
        let mut initial = Vec::with_capacity(communities.len());
        for mut c in communities {
            c.sort_unstable();
            c.dedup();
            if c.len() < q.max(2) {
                return Err(CodError::param(format!(
                    "community of {} nodes is smaller than q = {q}",
                    c.len()
                )));
            }
            if let Some(&v) = c.iter().find(|&&v| v >= n_nodes) {
                return Err(CodError::param(format!("node {v} outside {n_nodes} nodes")));
            }
            initial.push(c);
        }
        let origin = vec![CommunityOrigin::Initial; initial.len()];
        Ok(Self::assemble(n_nodes, q, initial.clone(), initial, origin))
    }

    fn assemble(
        n_nodes: usize,
        q: usize,
        initial: Vec<Vec<usize>>,
        members: Vec<Vec<usize>>,
        origin: Vec<CommunityOrigin>,
    ) -> Self {
        let mut member_index = vec![Vec::new(); n_nodes];
        for (c, nodes) in members.iter().enumerate() {
            for &v in nodes {
                member_index[v].push(c);
            }
        }
        let mut covered = vec![false; n_nodes];
        for &v in initial.iter().flatten() {
            covered[v] = true;
        }
        Self {
            n_nodes,
            q,
            initial,
            members,
            origin,
            member_index,
            covered,
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    /// Clique size used for percolation.
    pub fn q(&self) -> usize {
        self.q
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Current members of every community (sorted node ids).
    pub fn communities(&self) -> &[Vec<usize>] {
        &self.members
    }

    pub fn members(&self, c: usize) -> &[usize] {
        &self.members[c]
    }

    pub fn initial_members(&self, c: usize) -> &[usize] {
        &self.initial[c]
    }

    pub fn origin(&self, c: usize) -> CommunityOrigin {
        self.origin[c]
    }

    /// Ids of the communities containing `v`, ascending.
    pub fn memberships(&self, v: usize) -> &[usize] {
        &self.member_index[v]
    }

    /// Whether `v` belongs to some initial community.
    pub fn is_covered(&self, v: usize) -> bool {
        self.covered[v]
    }

    /// Nodes in no community at all.
    pub fn isolated_nodes(&self) -> Vec<usize> {
        (0..self.n_nodes)
            .filter(|&v| self.member_index[v].is_empty())
            .collect()
    }

    /// Nodes that joined some community through extension.
    pub fn added_nodes(&self) -> Vec<usize> {
        (0..self.n_nodes)
            .filter(|&v| !self.covered[v] && !self.member_index[v].is_empty())
            .collect()
    }

    /// One `id origin node,node,...` line per community.
    pub fn write_dump<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for (c, nodes) in self.members.iter().enumerate() {
            let list: Vec<String> = nodes.iter().map(usize::to_string).collect();
            writeln!(w, "{c} {} {}", self.origin[c], list.join(","))?;
        }
        Ok(())
    }
}

/// Maximal cliques with at least `min_size` nodes, each sorted, in
/// lexicographic order.
///
/// Bron-Kerbosch with Tomita pivoting, seeded along a degeneracy ordering.
pub fn maximal_cliques(g: &WeightedGraph, min_size: usize) -> Vec<Vec<usize>> {
    let n = g.n_nodes();
    let adj: Vec<Vec<usize>> = (0..n).map(|v| g.neighbor_ids(v).collect()).collect();
    let order = degeneracy_order(&adj);
    let mut position = vec![0; n];
    for (p, &v) in order.iter().enumerate() {
        position[v] = p;
    }
    let mut out = Vec::new();
    for &v in &order {
        if adj[v].len() + 1 < min_size {
            continue;
        }
        let (mut later, mut earlier) = (Vec::new(), Vec::new());
        for &u in &adj[v] {
            if position[u] > position[v] {
                later.push(u);
            } else {
                earlier.push(u);
            }
        }
        let mut clique = vec![v];
        expand(&adj, &mut clique, later, earlier, min_size, &mut out);
    }
    for c in &mut out {
        c.sort_unstable();
    }
    out.sort_unstable();
    out
}

fn expand(
    adj: &[Vec<usize>],
    clique: &mut Vec<usize>,
    mut candidates: Vec<usize>,
    mut excluded: Vec<usize>,
    min_size: usize,
    out: &mut Vec<Vec<usize>>,
) {
    if candidates.is_empty() {
        if excluded.is_empty() && clique.len() >= min_size {
            out.push(clique.clone());
        }
        return;
    }
    if clique.len() + candidates.len() < min_size {
        return;
    }
    let pivot = candidates
        .iter()
        .chain(&excluded)
        .copied()
        .max_by_key(|&u| (intersection_len(&candidates, &adj[u]), std::cmp::Reverse(u)))
        .expect("candidates is non-empty");
    let branch: Vec<usize> = candidates
        .iter()
        .copied()
        .filter(|v| adj[pivot].binary_search(v).is_err())
        .collect();
    for v in branch {
        clique.push(v);
        expand(
            adj,
            clique,
            intersect(&candidates, &adj[v]),
            intersect(&excluded, &adj[v]),
            min_size,
            out,
        );
        clique.pop();
        if let Ok(p) = candidates.binary_search(&v) {
            candidates.remove(p);
        }
        if let Err(p) = excluded.binary_search(&v) {
            excluded.insert(p, v);
        }
    }
}

fn intersect(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len().min(b.len()));
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn intersection_len(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Repeatedly removes a minimum-degree node (lowest id on ties).
fn degeneracy_order(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let max_deg = degree.iter().copied().max().unwrap_or(0);
    let mut buckets: Vec<std::collections::BTreeSet<usize>> =
        vec![std::collections::BTreeSet::new(); max_deg + 1];
    for v in 0..n {
        buckets[degree[v]].insert(v);
    }
    let mut removed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut low = 0;
    for _ in 0..n {
        while buckets[low].is_empty() {
            low += 1;
        }
        let v = buckets[low].pop_first().expect("bucket is non-empty");
        removed[v] = true;
        order.push(v);
        for &u in &adj[v] {
            if !removed[u] {
                buckets[degree[u]].remove(&u);
                degree[u] -= 1;
                buckets[degree[u]].insert(u);
            }
        }
        low = low.saturating_sub(1);
    }
    order
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Clique percolation: communities are the node unions of chains of
/// `q`-cliques where consecutive cliques share `q - 1` nodes. Weights are
/// ignored.
///
/// Works on maximal cliques of size `>= q`: every `q`-clique lies in one,
/// the `q`-cliques of one maximal clique are all chained, and two maximal
/// cliques hold adjacent `q`-cliques iff they share at least `q - 1` nodes.
pub fn percolation_communities(g: &WeightedGraph, q: usize) -> Result<CommunitySet> {
    if q < 2 {
        return Err(CodError::param(format!("clique size q = {q} must be >= 2")));
    }
    let n = g.n_nodes();
    let cliques = maximal_cliques(g, q);
    let mut containing: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (c, nodes) in cliques.iter().enumerate() {
        for &v in nodes {
            containing[v].push(c);
        }
    }
    let mut uf = UnionFind::new(cliques.len());
    let mut shared = vec![0usize; cliques.len()];
    let mut touched = Vec::new();
    for (a, nodes) in cliques.iter().enumerate() {
        for &v in nodes {
            for &b in &containing[v] {
                if b > a {
                    if shared[b] == 0 {
                        touched.push(b);
                    }
                    shared[b] += 1;
                }
            }
        }
        for &b in &touched {
            if shared[b] >= q - 1 {
                uf.union(a, b);
            }
            shared[b] = 0;
        }
        touched.clear();
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for (c, nodes) in cliques.iter().enumerate() {
        groups.entry(uf.find(c)).or_default().extend(nodes);
    }
    let mut communities: Vec<Vec<usize>> = groups
        .into_values()
        .map(|mut nodes| {
            nodes.sort_unstable();
            nodes.dedup();
            nodes
        })
        .collect();
    communities.sort_unstable();
    CommunitySet::from_initial(n, q, communities)
}

/// Belongingness of every initial member and internal connectivity of every
/// community, evaluated on the initial memberships.
#[derive(Debug, Clone, PartialEq)]
pub struct CommunityStats {
    rho: Vec<Vec<f64>>,
    ic: Vec<f64>,
}

impl CommunityStats {
    pub fn compute(cs: &CommunitySet, g: &WeightedGraph) -> Result<Self> {
        check_sizes(cs, g)?;
        let rho: Vec<Vec<f64>> = (0..cs.len())
            .into_par_iter()
            .map(|c| {
                let mut inside = vec![false; cs.n_nodes()];
                for &v in cs.initial_members(c) {
                    inside[v] = true;
                }
                cs.initial_members(c)
                    .iter()
                    .map(|&v| ratio_in(v, &inside, cs, g))
                    .collect()
            })
            .collect();
        let ic = rho.iter().map(|r| r.iter().sum()).collect();
        Ok(Self { rho, ic })
    }

    /// Belongingness values aligned with `cs.initial_members(c)`.
    pub fn belongingness(&self, c: usize) -> &[f64] {
        &self.rho[c]
    }

    pub fn internal_connectivity(&self, c: usize) -> f64 {
        self.ic[c]
    }

    /// Distance-weighted sum of member belongingness as seen from `w`, over
    /// all initial members (the candidate is treated as fully connected).
    pub fn connection_strength(
        &self,
        cs: &CommunitySet,
        c: usize,
        w: usize,
        dm: &DistanceMatrix,
    ) -> f64 {
        let row = dm.row(w);
        cs.initial_members(c)
            .iter()
            .zip(&self.rho[c])
            .map(|(&v, &rho)| rho / (row[v] + 1.0))
            .sum()
    }
}

fn check_sizes(cs: &CommunitySet, g: &WeightedGraph) -> Result<()> {
    if cs.n_nodes() != g.n_nodes() {
        return Err(CodError::SizeMismatch(format!(
            "{} community nodes vs {} graph nodes",
            cs.n_nodes(),
            g.n_nodes()
        )));
    }
    Ok(())
}

fn ratio_in(v: usize, inside: &[bool], cs: &CommunitySet, g: &WeightedGraph) -> f64 {
    let (mut in_c, mut in_s) = (0usize, 0usize);
    for u in g.neighbor_ids(v) {
        if cs.is_covered(u) {
            in_s += 1;
            if inside[u] {
                in_c += 1;
            }
        }
    }
    if in_s == 0 {
        0.0
    } else {
        in_c as f64 / in_s as f64
    }
}

fn check_community(cs: &CommunitySet, c: usize) -> Result<()> {
    if c >= cs.len() {
        return Err(CodError::param(format!(
            "community {c} out of range ({} communities)",
            cs.len()
        )));
    }
    Ok(())
}

/// Unweighted degree of `v` inside initial community `c` over its degree
/// inside the union of all initial communities; `0` when the latter is zero.
pub fn belongingness(v: usize, c: usize, cs: &CommunitySet, g: &WeightedGraph) -> Result<f64> {
    check_sizes(cs, g)?;
    check_community(cs, c)?;
    if cs.initial_members(c).binary_search(&v).is_err() {
        return Err(CodError::NotAMember {
            node: v,
            community: c,
        });
    }
    let mut inside = vec![false; cs.n_nodes()];
    for &u in cs.initial_members(c) {
        inside[u] = true;
    }
    Ok(ratio_in(v, &inside, cs, g))
}

pub fn internal_connectivity(c: usize, cs: &CommunitySet, g: &WeightedGraph) -> Result<f64> {
    check_community(cs, c)?;
    cs.initial_members(c)
        .iter()
        .map(|&v| belongingness(v, c, cs, g))
        .sum()
}

pub fn connection_strength(
    c: usize,
    w: usize,
    cs: &CommunitySet,
    g: &WeightedGraph,
    dm: &DistanceMatrix,
) -> Result<f64> {
    check_community(cs, c)?;
    if dm.len() != cs.n_nodes() {
        return Err(CodError::SizeMismatch(format!(
            "{} distance rows vs {} nodes",
            dm.len(),
            cs.n_nodes()
        )));
    }
    cs.initial_members(c)
        .iter()
        .map(|&v| Ok(belongingness(v, c, cs, g)? / (dm.get(w, v) + 1.0)))
        .sum()
}

/// Nearest-rank percentile of the edge weights (`0 < percentile <= 100`).
pub fn tolerance_delta(g: &WeightedGraph, percentile: f64) -> Result<f64> {
    if !(percentile > 0.0 && percentile <= 100.0) {
        return Err(CodError::param(format!(
            "percentile {percentile} outside (0, 100]"
        )));
    }
    let mut weights: Vec<f64> = g.edges().map(|(_, _, w)| w).collect();
    if weights.is_empty() {
        return Err(CodError::EdgelessGraph);
    }
    weights.sort_unstable_by(f64::total_cmp);
    let rank = ((percentile * weights.len() as f64) / 100.0 - 1e-9).ceil() as usize;
    Ok(weights[rank.clamp(1, weights.len()) - 1])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtensionParams {
    pub delta: f64,
    pub percentile: f64,
    pub q: usize,
}

impl ExtensionParams {
    pub fn new(delta: f64, percentile: f64, q: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&delta) {
            return Err(CodError::param(format!("delta {delta} outside [0, 1]")));
        }
        if !(percentile > 0.0 && percentile <= 100.0) {
            return Err(CodError::param(format!(
                "percentile {percentile} outside (0, 100]"
            )));
        }
        if q < 2 {
            return Err(CodError::param(format!("clique size q = {q} must be >= 2")));
        }
        Ok(Self {
            delta,
            percentile,
            q,
        })
    }

    /// Derives `delta` from the graph's weight distribution.
    pub fn from_graph(g: &WeightedGraph, percentile: f64, q: usize) -> Result<Self> {
        Self::new(tolerance_delta(g, percentile)?, percentile, q)
    }
}

/// Adds every node outside the initial communities to each initial
/// community `C` with `CS(C, w) >= delta * IC(C)`. Single pass against the
/// frozen initial memberships; a node may join several communities or none.
pub fn extend_communities(
    cs: &CommunitySet,
    g: &WeightedGraph,
    dm: &DistanceMatrix,
    params: &ExtensionParams,
) -> Result<CommunitySet> {
    if dm.len() != cs.n_nodes() {
        return Err(CodError::SizeMismatch(format!(
            "{} distance rows vs {} nodes",
            dm.len(),
            cs.n_nodes()
        )));
    }
    let stats = CommunityStats::compute(cs, g)?;
    let candidates: Vec<usize> = (0..cs.n_nodes()).filter(|&v| !cs.is_covered(v)).collect();
    let joins: Vec<(usize, Vec<usize>)> = candidates
        .par_iter()
        .map(|&w| {
            let accepted = (0..cs.len())
                .filter(|&c| {
                    stats.connection_strength(cs, c, w, dm)
                        >= params.delta * stats.internal_connectivity(c)
                })
                .collect();
            (w, accepted)
        })
        .collect();

    let mut members = cs.initial.clone();
    let mut origin = vec![CommunityOrigin::Initial; cs.len()];
    for (w, accepted) in joins {
        for c in accepted {
            members[c].push(w);
            origin[c] = CommunityOrigin::Extended;
        }
    }
    for m in &mut members {
        m.sort_unstable();
    }
    Ok(CommunitySet::assemble(
        cs.n_nodes(),
        cs.q(),
        cs.initial.clone(),
        members,
        origin,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::pairwise_distances;
    use crate::LabeledDataset;

    fn graph(n: usize, edges: &[(usize, usize)]) -> WeightedGraph {
        let e: Vec<_> = edges.iter().map(|&(a, b)| (a, b, 0.5)).collect();
        WeightedGraph::from_edges(n, &e).unwrap()
    }

    #[test]
    fn cliques_of_small_graphs() {
        let g = graph(5, &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4)]);
        assert_eq!(
            maximal_cliques(&g, 1),
            vec![vec![0, 1, 2], vec![2, 3], vec![3, 4]]
        );
        assert_eq!(maximal_cliques(&g, 3), vec![vec![0, 1, 2]]);
        let k4 = graph(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        assert_eq!(maximal_cliques(&k4, 2), vec![vec![0, 1, 2, 3]]);
        assert_eq!(maximal_cliques(&graph(3, &[]), 1).len(), 3);
    }

    #[test]
    fn percolation_triangle() {
        let cs = percolation_communities(&graph(3, &[(0, 1), (1, 2), (0, 2)]), 3).unwrap();
        assert_eq!(cs.communities(), &[vec![0, 1, 2]]);
        assert!(percolation_communities(&graph(3, &[]), 1).is_err());
        assert!(percolation_communities(&graph(3, &[]), 3).unwrap().is_empty());
    }

    #[test]
    fn percolation_shared_edge_and_shared_vertex() {
        let shared_edge = graph(4, &[(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)]);
        let cs = percolation_communities(&shared_edge, 3).unwrap();
        assert_eq!(cs.communities(), &[vec![0, 1, 2, 3]]);

        let shared_vertex = graph(5, &[(0, 1), (0, 2), (1, 2), (2, 3), (2, 4), (3, 4)]);
        let cs = percolation_communities(&shared_vertex, 3).unwrap();
        assert_eq!(cs.communities(), &[vec![0, 1, 2], vec![2, 3, 4]]);
        assert_eq!(cs.memberships(2), &[0, 1]);
    }

    #[test]
    fn belongingness_cases() {
        // community {0,1,2}; node 0 also linked to 3,4 which are covered by {3,4,5}
        let g = graph(
            7,
            &[(0, 1), (0, 2), (1, 2), (0, 3), (0, 4), (3, 4), (3, 5), (4, 5)],
        );
        let cs = CommunitySet::from_initial(7, 3, vec![vec![0, 1, 2], vec![3, 4, 5]]).unwrap();
        assert_eq!(belongingness(1, 0, &cs, &g).unwrap(), 1.0);
        assert_eq!(belongingness(0, 0, &cs, &g).unwrap(), 0.5);
        assert!(matches!(
            belongingness(3, 0, &cs, &g),
            Err(CodError::NotAMember { .. })
        ));
        assert_eq!(internal_connectivity(0, &cs, &g).unwrap(), 2.5);

        // a member with no edges inside S
        let cs = CommunitySet::from_initial(7, 3, vec![vec![0, 1, 6]]).unwrap();
        assert_eq!(belongingness(6, 0, &cs, &g).unwrap(), 0.0);
    }

    #[test]
    fn connectivity_of_simple_communities() {
        let tri = graph(4, &[(0, 1), (1, 2), (0, 2)]);
        let cs = percolation_communities(&tri, 3).unwrap();
        assert_eq!(internal_connectivity(0, &cs, &tri).unwrap(), 3.0);

        let shared_edge = graph(4, &[(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)]);
        let cs = percolation_communities(&shared_edge, 3).unwrap();
        assert_eq!(internal_connectivity(0, &cs, &shared_edge).unwrap(), 4.0);
    }

    #[test]
    fn connection_strength_uses_all_members() {
        // triangle at the origin, candidate 3 coincident, candidate 4 at distance 1
        let ds = LabeledDataset::from_flat(vec![0.0, 0.0, 0.0, 0.0, 1.0], 1, vec![1; 5]).unwrap();
        let dm = pairwise_distances(&ds, Default::default());
        let g = graph(5, &[(0, 1), (1, 2), (0, 2)]);
        let cs = percolation_communities(&g, 3).unwrap();
        assert_eq!(connection_strength(0, 3, &cs, &g, &dm).unwrap(), 3.0);
        assert_eq!(connection_strength(0, 4, &cs, &g, &dm).unwrap(), 1.5);
        let stats = CommunityStats::compute(&cs, &g).unwrap();
        assert_eq!(stats.connection_strength(&cs, 0, 4, &dm), 1.5);
    }

    #[test]
    fn delta_percentiles() {
        let g = WeightedGraph::from_edges(
            5,
            &[(0, 1, 0.1), (1, 2, 0.2), (2, 3, 0.3), (3, 4, 0.4)],
        )
        .unwrap();
        assert_eq!(tolerance_delta(&g, 75.0).unwrap(), 0.3);
        assert_eq!(tolerance_delta(&g, 100.0).unwrap(), 0.4);
        assert_eq!(tolerance_delta(&g, 1.0).unwrap(), 0.1);
        assert_eq!(tolerance_delta(&graph(4, &[(0, 1), (2, 3)]), 30.0).unwrap(), 0.5);
        assert!(matches!(
            tolerance_delta(&graph(3, &[]), 75.0),
            Err(CodError::EdgelessGraph)
        ));
        assert!(tolerance_delta(&g, 0.0).is_err());
        assert!(tolerance_delta(&g, 101.0).is_err());
    }

    #[test]
    fn extension_admits_near_and_rejects_far() {
        let ds = LabeledDataset::from_flat(vec![0.0, 0.0, 0.0, 0.0, 1e6], 1, vec![1; 5]).unwrap();
        let dm = pairwise_distances(&ds, Default::default());
        let g = graph(5, &[(0, 1), (1, 2), (0, 2)]);
        let cs = percolation_communities(&g, 3).unwrap();
        let params = ExtensionParams::new(0.9, 75.0, 3).unwrap();
        let ext = extend_communities(&cs, &g, &dm, &params).unwrap();
        assert_eq!(ext.communities(), &[vec![0, 1, 2, 3]]);
        assert_eq!(ext.initial_members(0), &[0, 1, 2]);
        assert_eq!(ext.origin(0), CommunityOrigin::Extended);
        assert_eq!(ext.isolated_nodes(), vec![4]);
        assert_eq!(ext.added_nodes(), vec![3]);
        assert!(ExtensionParams::new(1.5, 75.0, 3).is_err());
    }

    #[test]
    fn dump_format() {
        let cs = CommunitySet::from_initial(5, 3, vec![vec![2, 0, 1]]).unwrap();
        let mut out = Vec::new();
        cs.write_dump(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "0 initial 0,1,2\n");
    }
}
