//! Node influence indicators and deterministic rankings.
//!
//! Local measures (degree, clustering), path-based measures (betweenness,
//! closeness), random-walk measures (PageRank, HITS) and, via
//! [`crate::community`], the three module-based measures. Every indicator
//! yields one finite score per node in network node order.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::community::{self, CommunityConfig};
use crate::error::{Error, Result};
use crate::graph::{all_pairs_shortest_paths, bfs_distances, Direction, TradeNetwork};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Indicator {
    Indegree,
    Outdegree,
    Clustering,
    Betweenness,
    Outcloseness,
    Incloseness,
    Pagerank,
    Authorities,
    Hubs,
    WithinModule,
    OutsideModule,
    Participation,
}

impl Indicator {
    pub const ALL: [Indicator; 12] = [
        Indicator::Indegree,
        Indicator::Outdegree,
        Indicator::Clustering,
        Indicator::Betweenness,
        Indicator::Outcloseness,
        Indicator::Incloseness,
        Indicator::Pagerank,
        Indicator::Authorities,
        Indicator::Hubs,
        Indicator::WithinModule,
        Indicator::OutsideModule,
        Indicator::Participation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Indicator::Indegree => "indegree",
            Indicator::Outdegree => "outdegree",
            Indicator::Clustering => "clustering",
            Indicator::Betweenness => "betweenness",
            Indicator::Outcloseness => "outcloseness",
            Indicator::Incloseness => "incloseness",
            Indicator::Pagerank => "pagerank",
            Indicator::Authorities => "authorities",
            Indicator::Hubs => "hubs",
            Indicator::WithinModule => "within_module",
            Indicator::OutsideModule => "outside_module",
            Indicator::Participation => "participation",
        }
    }

    /// Needs a module partition.
    pub fn is_modular(self) -> bool {
        matches!(
            self,
            Indicator::WithinModule | Indicator::OutsideModule | Indicator::Participation
        )
    }
}

impl fmt::Display for Indicator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Indicator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let wanted = s.trim().to_ascii_lowercase().replace('-', "_");
        Indicator::ALL
            .into_iter()
            .find(|i| i.name() == wanted)
            .ok_or_else(|| Error::UnknownIndicator(s.trim().to_string()))
    }
}

/// One indicator's score for every node of one network.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorScores {
    pub indicator: Indicator,
    pub year: i32,
    /// Node ids in network order.
    pub economies: Vec<String>,
    pub scores: Vec<f64>,
}

impl IndicatorScores {
    pub fn new(indicator: Indicator, g: &TradeNetwork, scores: Vec<f64>) -> Self {
        debug_assert_eq!(scores.len(), g.node_count());
        Self {
            indicator,
            year: g.year(),
            economies: g.nodes().to_vec(),
            scores,
        }
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn get(&self, economy: &str) -> Option<f64> {
        self.economies
            .binary_search_by(|e| e.as_str().cmp(economy))
            .ok()
            .map(|i| self.scores[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.economies
            .iter()
            .map(String::as_str)
            .zip(self.scores.iter().copied())
    }

    pub fn sum(&self) -> f64 {
        self.scores.iter().sum()
    }
}

pub fn degree(g: &TradeNetwork) -> (IndicatorScores, IndicatorScores) {
    let n = g.node_count();
    let k_in = (0..n).map(|i| g.in_degree(i) as f64).collect();
    let k_out = (0..n).map(|i| g.out_degree(i) as f64).collect();
    (
        IndicatorScores::new(Indicator::Indegree, g, k_in),
        IndicatorScores::new(Indicator::Outdegree, g, k_out),
    )
}

/// Denominator convention for the local clustering coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClusteringMode {
    /// `K(K-1)` with `K = K_in + K_out`, so a reciprocal link counts twice.
    #[default]
    DegreeSum,
    /// `n(n-1)` with `n` the number of distinct neighbours.
    NeighborCount,
}

/// Directed edges among the neighbours of `i`, over the number of possible
/// ones. Zero for nodes whose degree is at most one.
pub fn clustering(g: &TradeNetwork, mode: ClusteringMode) -> IndicatorScores {
    let scores = (0..g.node_count())
        .map(|i| {
            let nbrs = g.neighbors(i);
            let k = match mode {
                ClusteringMode::DegreeSum => g.in_degree(i) + g.out_degree(i),
                ClusteringMode::NeighborCount => nbrs.len(),
            };
            if k <= 1 {
                return 0.0;
            }
            let links: usize = nbrs
                .iter()
                .map(|&j| {
                    g.out_neighbors(j)
                        .iter()
                        .filter(|&&m| m != i && nbrs.binary_search(&m).is_ok())
                        .count()
                })
                .sum();
            links as f64 / (k * (k - 1)) as f64
        })
        .collect();
    IndicatorScores::new(Indicator::Clustering, g, scores)
}

/// Sum over ordered (s, t) pairs of the share of shortest s→t paths that
/// pass through each node. No normalization.
pub fn betweenness(g: &TradeNetwork) -> IndicatorScores {
    let sp = all_pairs_shortest_paths(g);
    IndicatorScores::new(Indicator::Betweenness, g, sp.betweenness().to_vec())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosenessMode {
    /// `(D/(N-1))^2 / C`: reachable count `D`, distance sum `C`.
    #[default]
    Corrected,
    /// `1 / C`.
    RawReciprocal,
}

/// Closeness following out-edges (`Direction::Out`) or in-edges
/// (`Direction::In`). Nodes that reach nobody score 0.
pub fn closeness(g: &TradeNetwork, direction: Direction, mode: ClosenessMode) -> IndicatorScores {
    let n = g.node_count();
    let indicator = match direction {
        Direction::Out => Indicator::Outcloseness,
        Direction::In => Indicator::Incloseness,
    };
    if n <= 1 {
        return IndicatorScores::new(indicator, g, vec![0.0; n]);
    }
    let scores = (0..n)
        .into_par_iter()
        .map(|i| {
            let dist = bfs_distances(g, i, direction);
            let (reached, total) = dist
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .filter_map(|(_, d)| *d)
                .fold((0u64, 0u64), |(r, t), d| (r + 1, t + u64::from(d)));
            if reached == 0 {
                return 0.0;
            }
            match mode {
                ClosenessMode::Corrected => {
                    let frac = reached as f64 / (n - 1) as f64;
                    frac * frac / total as f64
                }
                ClosenessMode::RawReciprocal => 1.0 / total as f64,
            }
        })
        .collect();
    IndicatorScores::new(indicator, g, scores)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PageRankConfig {
    pub damping: f64,
    pub iterations: usize,
}

impl Default for PageRankConfig {
    fn default() -> Self {
        Self {
            damping: 0.85,
            iterations: 100,
        }
    }
}

/// Fixed-count power iteration from the uniform vector. Mass sitting on
/// nodes without out-links is spread uniformly.
pub fn pagerank(g: &TradeNetwork, config: PageRankConfig) -> Result<IndicatorScores> {
    let d = config.damping;
    if !(d > 0.0 && d < 1.0) {
        return Err(Error::argument(format!(
            "damping must lie in (0, 1), got {d}"
        )));
    }
    let n = g.node_count();
    if n == 0 {
        return Ok(IndicatorScores::new(Indicator::Pagerank, g, Vec::new()));
    }
    let nf = n as f64;
    let mut rank = vec![1.0 / nf; n];
    let mut next = vec![0.0; n];
    for _ in 0..config.iterations {
        let dangling: f64 = (0..n)
            .filter(|&i| g.out_degree(i) == 0)
            .map(|i| rank[i])
            .sum();
        let base = (1.0 - d) / nf + d * dangling / nf;
        for (i, slot) in next.iter_mut().enumerate() {
            let inflow: f64 = g
                .in_neighbors(i)
                .iter()
                .map(|&j| rank[j] / g.out_degree(j) as f64)
                .sum();
            *slot = base + d * inflow;
        }
        std::mem::swap(&mut rank, &mut next);
    }
    Ok(IndicatorScores::new(Indicator::Pagerank, g, rank))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HitsConfig {
    pub iterations: usize,
    pub tolerance: f64,
}

impl Default for HitsConfig {
    fn default() -> Self {
        Self {
            iterations: 100,
            tolerance: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HitsResult {
    pub authorities: IndicatorScores,
    pub hubs: IndicatorScores,
    /// Set for edgeless networks, where both vectors are all zero.
    pub degenerate: bool,
    pub iterations: usize,
    pub converged: bool,
}

fn normalize_l2(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
}

fn normalize_l1(v: &mut [f64]) {
    let total: f64 = v.iter().sum();
    if total > 0.0 {
        v.iter_mut().for_each(|x| *x /= total);
    }
}

/// Hub/authority mutual reinforcement. Iterates with L2 scaling until the
/// largest entry change drops below the tolerance (or the cap is hit), then
/// rescales each vector to sum to one.
pub fn hits(g: &TradeNetwork, config: HitsConfig) -> HitsResult {
    let n = g.node_count();
    if g.edge_count() == 0 {
        return HitsResult {
            authorities: IndicatorScores::new(Indicator::Authorities, g, vec![0.0; n]),
            hubs: IndicatorScores::new(Indicator::Hubs, g, vec![0.0; n]),
            degenerate: true,
            iterations: 0,
            converged: true,
        };
    }
    let mut hub = vec![1.0; n];
    normalize_l2(&mut hub);
    let mut auth = vec![0.0; n];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < config.iterations {
        iterations += 1;
        let mut new_auth: Vec<f64> = (0..n)
            .map(|i| g.in_neighbors(i).iter().map(|&j| hub[j]).sum())
            .collect();
        normalize_l2(&mut new_auth);
        let mut new_hub: Vec<f64> = (0..n)
            .map(|i| g.out_neighbors(i).iter().map(|&j| new_auth[j]).sum())
            .collect();
        normalize_l2(&mut new_hub);
        let change = auth
            .iter()
            .zip(&new_auth)
            .chain(hub.iter().zip(&new_hub))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        auth = new_auth;
        hub = new_hub;
        if change < config.tolerance {
            converged = true;
            break;
        }
    }
    normalize_l1(&mut auth);
    normalize_l1(&mut hub);
    HitsResult {
        authorities: IndicatorScores::new(Indicator::Authorities, g, auth),
        hubs: IndicatorScores::new(Indicator::Hubs, g, hub),
        degenerate: false,
        iterations,
        converged,
    }
}

/// Knobs for every indicator, so that a whole suite can be computed (and
/// recomputed during adaptive attacks) from one value.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct ScoreConfig {
    pub pagerank: PageRankConfig,
    pub hits: HitsConfig,
    pub clustering: ClusteringMode,
    pub closeness: ClosenessMode,
    pub community: CommunityConfig,
}

pub fn compute(
    g: &TradeNetwork,
    indicator: Indicator,
    config: &ScoreConfig,
) -> Result<IndicatorScores> {
    Ok(compute_many(g, &[indicator], config)?.remove(0))
}

/// Computes several indicators, sharing HITS and the module partition
/// between the indicators that need them. Output order follows `indicators`.
pub fn compute_many(
    g: &TradeNetwork,
    indicators: &[Indicator],
    config: &ScoreConfig,
) -> Result<Vec<IndicatorScores>> {
    let mut hits_cache = None;
    let mut partition = None;
    indicators
        .iter()
        .map(|&ind| {
            Ok(match ind {
                Indicator::Indegree => degree(g).0,
                Indicator::Outdegree => degree(g).1,
                Indicator::Clustering => clustering(g, config.clustering),
                Indicator::Betweenness => betweenness(g),
                Indicator::Outcloseness => closeness(g, Direction::Out, config.closeness),
                Indicator::Incloseness => closeness(g, Direction::In, config.closeness),
                Indicator::Pagerank => pagerank(g, config.pagerank)?,
                Indicator::Authorities | Indicator::Hubs => {
                    let res = hits_cache.get_or_insert_with(|| hits(g, config.hits));
                    if ind == Indicator::Authorities {
                        res.authorities.clone()
                    } else {
                        res.hubs.clone()
                    }
                }
                Indicator::WithinModule | Indicator::OutsideModule | Indicator::Participation => {
                    let p = match &partition {
                        Some(p) => p,
                        None => {
                            partition.insert(community::detect_modules(g, config.community.seed))
                        }
                    };
                    let links = config.community.links;
                    match ind {
                        Indicator::WithinModule => community::within_module_degree(g, p, links)?,
                        Indicator::OutsideModule => community::outside_module_degree(g, p, links)?,
                        _ => community::participation(g, p, links)?,
                    }
                }
            })
        })
        .collect()
}

/// Nodes in descending score order; ties go to the smaller economy id.
#[derive(Debug, Clone, PartialEq)]
pub struct RankingTable {
    pub indicator: Indicator,
    pub year: i32,
    /// Node indices (into `economies`), best first.
    pub order: Vec<usize>,
    pub economies: Vec<String>,
    pub scores: Vec<f64>,
}

impl RankingTable {
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// `(rank starting at 1, economy, score)` best first.
    pub fn entries(&self) -> impl Iterator<Item = (usize, &str, f64)> {
        self.order
            .iter()
            .enumerate()
            .map(|(r, &i)| (r + 1, self.economies[i].as_str(), self.scores[i]))
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.order.iter().map(|&i| self.economies[i].as_str())
    }

    /// 1-based rank of every node, in node order.
    pub fn rank_of_nodes(&self) -> Vec<usize> {
        let mut ranks = vec![0; self.order.len()];
        for (r, &i) in self.order.iter().enumerate() {
            ranks[i] = r + 1;
        }
        ranks
    }
}

/// Score rounded to 12 significant digits. Scores that agree to that
/// precision rank as ties, whichever floating-point route produced them.
pub fn rank_key(score: f64) -> f64 {
    if score == 0.0 || !score.is_finite() {
        return if score.is_nan() {
            f64::NEG_INFINITY
        } else {
            score + 0.0
        };
    }
    format!("{score:.11e}")
        .parse()
        .expect("formatted float parses")
}

pub fn rank(scores: &IndicatorScores) -> RankingTable {
    let keys: Vec<f64> = scores.scores.iter().map(|&s| rank_key(s)).collect();
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| match keys[b].total_cmp(&keys[a]) {
        Ordering::Equal => scores.economies[a].cmp(&scores.economies[b]),
        other => other,
    });
    RankingTable {
        indicator: scores.indicator,
        year: scores.year,
        order,
        economies: scores.economies.clone(),
        scores: scores.scores.clone(),
    }
}
