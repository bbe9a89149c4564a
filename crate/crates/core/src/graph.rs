//! Directed trade network and the structural primitives built on it.

use std::collections::BTreeSet;
use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ingest::EdgeSet;

/// Unweighted directed simple graph over economy identifiers.
///
/// Nodes are stored in sorted identifier order, so node index `i` always
/// refers to the `i`-th smallest id. Adjacency lists are sorted as well.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TradeNetwork {
    year: i32,
    nodes: Vec<String>,
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
    undirected: Vec<Vec<usize>>,
    edge_count: usize,
}

impl TradeNetwork {
    /// Builds a network from explicit nodes plus edges. Edge endpoints not
    /// listed in `nodes` are added; duplicate edges collapse.
    pub fn build<N, E, A, B>(year: i32, nodes: N, edges: E) -> Result<Self>
    where
        N: IntoIterator,
        N::Item: Into<String>,
        E: IntoIterator<Item = (A, B)>,
        A: Into<String>,
        B: Into<String>,
    {
        let edges: Vec<(String, String)> = edges
            .into_iter()
            .map(|(a, b)| (a.into(), b.into()))
            .collect();
        let mut ids: BTreeSet<String> = nodes.into_iter().map(Into::into).collect();
        for (a, b) in &edges {
            if a == b {
                return Err(Error::argument(format!("self-loop on `{a}`")));
            }
            ids.insert(a.clone());
            ids.insert(b.clone());
        }
        let nodes: Vec<String> = ids.into_iter().collect();
        let index = |id: &str| nodes.binary_search_by(|n| n.as_str().cmp(id)).unwrap();
        let pairs: Vec<(usize, usize)> = edges.iter().map(|(a, b)| (index(a), index(b))).collect();
        Ok(Self::from_indexed(year, nodes, pairs))
    }

    pub fn from_edge_set(es: &EdgeSet) -> Result<Self> {
        Self::build(
            es.year,
            std::iter::empty::<String>(),
            es.edges.iter().map(|(a, b)| (a.as_str(), b.as_str())),
        )
    }

    /// Network over `n` nodes named `v0`, `v1`, ... with zero-padded
    /// numbering so that index order equals id order.
    pub fn from_index_edges(year: i32, n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let width = n.saturating_sub(1).to_string().len();
        let nodes: Vec<String> = (0..n).map(|i| format!("v{i:0width$}")).collect();
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::argument(format!(
                    "edge ({a}, {b}) out of range for {n} nodes"
                )));
            }
            if a == b {
                return Err(Error::argument(format!("self-loop on node {a}")));
            }
        }
        Ok(Self::from_indexed(year, nodes, edges.iter().copied()))
    }

    /// `nodes` must already be sorted and unique; `edges` must be loop-free.
    fn from_indexed(
        year: i32,
        nodes: Vec<String>,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Self {
        let n = nodes.len();
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        for (a, b) in edges {
            out_adj[a].push(b);
            in_adj[b].push(a);
        }
        for list in out_adj.iter_mut().chain(in_adj.iter_mut()) {
            list.sort_unstable();
            list.dedup();
        }
        let undirected = (0..n)
            .map(|i| {
                let mut all: Vec<usize> = out_adj[i].iter().chain(&in_adj[i]).copied().collect();
                all.sort_unstable();
                all.dedup();
                all
            })
            .collect();
        let edge_count = out_adj.iter().map(Vec::len).sum();
        Self {
            year,
            nodes,
            out_adj,
            in_adj,
            undirected,
            edge_count,
        }
    }

    pub fn year(&self) -> i32 {
        self.year
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn id(&self, i: usize) -> &str {
        &self.nodes[i]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.nodes.binary_search_by(|n| n.as_str().cmp(id)).ok()
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.out_adj[from].binary_search(&to).is_ok()
    }

    pub fn out_neighbors(&self, i: usize) -> &[usize] {
        &self.out_adj[i]
    }

    pub fn in_neighbors(&self, i: usize) -> &[usize] {
        &self.in_adj[i]
    }

    /// Distinct neighbours ignoring direction (a reciprocal pair appears once).
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.undirected[i]
    }

    pub fn out_degree(&self, i: usize) -> usize {
        self.out_adj[i].len()
    }

    pub fn in_degree(&self, i: usize) -> usize {
        self.in_adj[i].len()
    }

    /// Edges as index pairs, in (source, target) order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.out_adj
            .iter()
            .enumerate()
            .flat_map(|(i, outs)| outs.iter().map(move |&j| (i, j)))
    }

    /// Subgraph induced by the nodes with `keep[i] == true`. Node order is
    /// preserved; the second value maps new indices to old ones.
    pub fn induced_subgraph(&self, keep: &[bool]) -> (TradeNetwork, Vec<usize>) {
        assert_eq!(
            keep.len(),
            self.node_count(),
            "mask length must equal node count"
        );
        let old_of_new: Vec<usize> = (0..self.node_count()).filter(|&i| keep[i]).collect();
        let mut new_of_old = vec![usize::MAX; self.node_count()];
        for (new, &old) in old_of_new.iter().enumerate() {
            new_of_old[old] = new;
        }
        let nodes = old_of_new.iter().map(|&i| self.nodes[i].clone()).collect();
        let edges: Vec<(usize, usize)> = self
            .edges()
            .filter(|&(a, b)| keep[a] && keep[b])
            .map(|(a, b)| (new_of_old[a], new_of_old[b]))
            .collect();
        (Self::from_indexed(self.year, nodes, edges), old_of_new)
    }

    /// Dense 0/1 adjacency matrix as CSV, with node ids as header and first column.
    pub fn write_adjacency_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        let mut header = vec![String::new()];
        header.extend(self.nodes.iter().cloned());
        writer.write_record(&header)?;
        for i in 0..self.node_count() {
            let mut row = vec![self.nodes[i].clone()];
            row.extend(
                (0..self.node_count())
                    .map(|j| if self.has_edge(i, j) { "1" } else { "0" }.to_string()),
            );
            writer.write_record(&row)?;
        }
        writer.flush()?;
        Ok(())
    }

    /// Components of the subgraph left after removing `removed` (node indices).
    pub fn weak_components(&self, removed: &[usize]) -> Result<ComponentLabeling> {
        let alive = self.alive_mask(removed)?;
        Ok(self.components_masked(&alive, Connectivity::Weak))
    }

    pub fn components(
        &self,
        removed: &[usize],
        connectivity: Connectivity,
    ) -> Result<ComponentLabeling> {
        let alive = self.alive_mask(removed)?;
        Ok(self.components_masked(&alive, connectivity))
    }

    fn alive_mask(&self, removed: &[usize]) -> Result<Vec<bool>> {
        let mut alive = vec![true; self.node_count()];
        for &r in removed {
            if r >= self.node_count() {
                return Err(Error::argument(format!(
                    "removed node {r} is not in a network of {} nodes",
                    self.node_count()
                )));
            }
            alive[r] = false;
        }
        Ok(alive)
    }

    /// Components over nodes with `alive[i] == true`.
    pub fn components_masked(
        &self,
        alive: &[bool],
        connectivity: Connectivity,
    ) -> ComponentLabeling {
        match connectivity {
            Connectivity::Weak => self.weak_masked(alive),
            Connectivity::Strong => self.strong_masked(alive),
        }
    }

    fn weak_masked(&self, alive: &[bool]) -> ComponentLabeling {
        let n = self.node_count();
        let mut labels = vec![None; n];
        let mut sizes = Vec::new();
        let mut stack = Vec::new();
        for start in 0..n {
            if !alive[start] || labels[start].is_some() {
                continue;
            }
            let label = sizes.len();
            labels[start] = Some(label);
            stack.push(start);
            let mut size = 0;
            while let Some(v) = stack.pop() {
                size += 1;
                for &w in &self.undirected[v] {
                    if alive[w] && labels[w].is_none() {
                        labels[w] = Some(label);
                        stack.push(w);
                    }
                }
            }
            sizes.push(size);
        }
        ComponentLabeling::new(labels, sizes)
    }

    // Kosaraju: finish order on out-edges, then sweep the reverse graph.
    fn strong_masked(&self, alive: &[bool]) -> ComponentLabeling {
        let n = self.node_count();
        let mut visited = vec![false; n];
        let mut order = Vec::with_capacity(n);
        for start in 0..n {
            if !alive[start] || visited[start] {
                continue;
            }
            visited[start] = true;
            let mut stack = vec![(start, 0usize)];
            while let Some(top) = stack.last_mut() {
                let v = top.0;
                let outs = &self.out_adj[v];
                let mut descend = None;
                while top.1 < outs.len() {
                    let w = outs[top.1];
                    top.1 += 1;
                    if alive[w] && !visited[w] {
                        descend = Some(w);
                        break;
                    }
                }
                match descend {
                    Some(w) => {
                        visited[w] = true;
                        stack.push((w, 0));
                    }
                    None => {
                        order.push(v);
                        stack.pop();
                    }
                }
            }
        }

        let mut raw = vec![None; n];
        let mut count = 0;
        let mut stack = Vec::new();
        for &root in order.iter().rev() {
            if raw[root].is_some() {
                continue;
            }
            raw[root] = Some(count);
            stack.push(root);
            while let Some(v) = stack.pop() {
                for &w in &self.in_adj[v] {
                    if alive[w] && raw[w].is_none() {
                        raw[w] = Some(count);
                        stack.push(w);
                    }
                }
            }
            count += 1;
        }

        // Relabel so component ids follow their smallest member index.
        let mut remap = vec![None; count];
        let mut labels = vec![None; n];
        let mut sizes = Vec::new();
        for i in 0..n {
            if let Some(c) = raw[i] {
                let label = *remap[c].get_or_insert_with(|| {
                    sizes.push(0);
                    sizes.len() - 1
                });
                sizes[label] += 1;
                labels[i] = Some(label);
            }
        }
        ComponentLabeling::new(labels, sizes)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Connectivity {
    /// Edge direction ignored.
    #[default]
    Weak,
    Strong,
}

impl std::str::FromStr for Connectivity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "weak" => Ok(Connectivity::Weak),
            "strong" => Ok(Connectivity::Strong),
            other => Err(Error::argument(format!("unknown connectivity `{other}`"))),
        }
    }
}

/// Component label per node (`None` for removed nodes) and component sizes.
/// Labels are numbered in order of each component's smallest node index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentLabeling {
    pub labels: Vec<Option<usize>>,
    pub sizes: Vec<usize>,
    pub gcc_size: usize,
}

impl ComponentLabeling {
    fn new(labels: Vec<Option<usize>>, sizes: Vec<usize>) -> Self {
        let gcc_size = sizes.iter().copied().max().unwrap_or(0);
        Self {
            labels,
            sizes,
            gcc_size,
        }
    }

    pub fn component_count(&self) -> usize {
        self.sizes.len()
    }
}

/// Which way edges are followed from a BFS source.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Out,
    In,
}

/// Hop distances from `source`, following edges in `direction`.
pub fn bfs_distances(g: &TradeNetwork, source: usize, direction: Direction) -> Vec<Option<u32>> {
    let mut dist = vec![None; g.node_count()];
    dist[source] = Some(0);
    let mut queue = std::collections::VecDeque::from([source]);
    while let Some(v) = queue.pop_front() {
        let d = dist[v].unwrap() + 1;
        let next = match direction {
            Direction::Out => g.out_neighbors(v),
            Direction::In => g.in_neighbors(v),
        };
        for &w in next {
            if dist[w].is_none() {
                dist[w] = Some(d);
                queue.push_back(w);
            }
        }
    }
    dist
}

/// All-pairs directed hop distances, shortest-path counts, and accumulated
/// pass-through dependencies.
#[derive(Debug, Clone)]
pub struct ShortestPaths {
    n: usize,
    dist: Vec<Option<u32>>,
    sigma: Vec<f64>,
    betweenness: Vec<f64>,
}

impl ShortestPaths {
    /// `None` when `t` is unreachable from `s`.
    pub fn distance(&self, s: usize, t: usize) -> Option<u32> {
        self.dist[s * self.n + t]
    }

    /// Number of distinct shortest directed paths from `s` to `t`
    /// (0 when unreachable, 1 for `s == t`).
    pub fn path_count(&self, s: usize, t: usize) -> f64 {
        self.sigma[s * self.n + t]
    }

    /// For each node i, the sum over ordered pairs (s, t) with s ≠ i ≠ t of
    /// the fraction of shortest s→t paths passing through i.
    pub fn betweenness(&self) -> &[f64] {
        &self.betweenness
    }
}

struct SourceSweep {
    dist: Vec<Option<u32>>,
    sigma: Vec<f64>,
    delta: Vec<f64>,
}

fn sweep_from(g: &TradeNetwork, s: usize) -> SourceSweep {
    let n = g.node_count();
    let mut dist: Vec<Option<u32>> = vec![None; n];
    let mut sigma = vec![0.0; n];
    let mut order = Vec::with_capacity(n);
    dist[s] = Some(0);
    sigma[s] = 1.0;
    let mut queue = std::collections::VecDeque::from([s]);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        let dv = dist[v].unwrap();
        for &w in g.out_neighbors(v) {
            match dist[w] {
                None => {
                    dist[w] = Some(dv + 1);
                    sigma[w] = sigma[v];
                    queue.push_back(w);
                }
                Some(dw) if dw == dv + 1 => sigma[w] += sigma[v],
                _ => {}
            }
        }
    }

    let mut delta = vec![0.0; n];
    for &w in order.iter().rev() {
        let dw = dist[w].unwrap();
        if dw == 0 {
            continue;
        }
        let coeff = (1.0 + delta[w]) / sigma[w];
        for &v in g.in_neighbors(w) {
            if dist[v] == Some(dw - 1) {
                delta[v] += sigma[v] * coeff;
            }
        }
    }
    delta[s] = 0.0;
    SourceSweep { dist, sigma, delta }
}

/// One BFS per source (run in parallel); dependencies are summed in source
/// order so the result does not depend on scheduling.
pub fn all_pairs_shortest_paths(g: &TradeNetwork) -> ShortestPaths {
    let n = g.node_count();
    let sweeps: Vec<SourceSweep> = (0..n).into_par_iter().map(|s| sweep_from(g, s)).collect();
    let mut dist = Vec::with_capacity(n * n);
    let mut sigma = Vec::with_capacity(n * n);
    let mut betweenness = vec![0.0; n];
    for sweep in sweeps {
        dist.extend_from_slice(&sweep.dist);
        sigma.extend_from_slice(&sweep.sigma);
        for (acc, d) in betweenness.iter_mut().zip(&sweep.delta) {
            *acc += d;
        }
    }
    ShortestPaths {
        n,
        dist,
        sigma,
        betweenness,
    }
}
