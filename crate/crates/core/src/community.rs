//! Module detection and the module-based influence indicators.
//!
//! Detection runs Louvain-style greedy modularity optimization on the
//! symmetrized network (a link exists if either direction does). The node
//! sweep order comes from a seeded RNG, so a given seed always reproduces
//! the same partition.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::centrality::{Indicator, IndicatorScores};
use crate::error::{Error, Result};
use crate::graph::TradeNetwork;

pub const DEFAULT_SEED: u64 = 42;

/// Gains at or below this are not worth a move.
const MIN_GAIN: f64 = 1e-12;

/// How links are counted for the module indicators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkCounting {
    /// Distinct neighbours; a reciprocal pair counts once.
    #[default]
    Undirected,
    /// In-links plus out-links; a reciprocal pair counts twice.
    Directed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct CommunityConfig {
    pub seed: u64,
    pub links: LinkCounting,
}

impl Default for CommunityConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            links: LinkCounting::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModulePartition {
    pub year: i32,
    /// Module id per node, dense in `0..module_count`, numbered in order of
    /// each module's smallest node index.
    pub assignment: Vec<usize>,
    pub module_count: usize,
    pub modularity: f64,
    pub seed: u64,
}

impl ModulePartition {
    /// Builds a partition from arbitrary labels, renumbering them densely.
    pub fn from_labels(g: &TradeNetwork, labels: &[usize], seed: u64) -> Result<Self> {
        if labels.len() != g.node_count() {
            return Err(Error::argument(format!(
                "partition covers {} nodes, network has {}",
                labels.len(),
                g.node_count()
            )));
        }
        let (assignment, module_count) = renumber(labels);
        let modularity = modularity(g, &assignment);
        Ok(Self {
            year: g.year(),
            assignment,
            module_count,
            modularity,
            seed,
        })
    }

    pub fn members(&self, module: usize) -> impl Iterator<Item = usize> + '_ {
        self.assignment
            .iter()
            .enumerate()
            .filter(move |&(_, &m)| m == module)
            .map(|(i, _)| i)
    }

    fn check(&self, g: &TradeNetwork) -> Result<()> {
        if self.assignment.len() != g.node_count() {
            return Err(Error::argument(format!(
                "partition covers {} nodes, network has {}",
                self.assignment.len(),
                g.node_count()
            )));
        }
        if let Some(&bad) = self.assignment.iter().find(|&&m| m >= self.module_count) {
            return Err(Error::argument(format!(
                "module id {bad} outside 0..{}",
                self.module_count
            )));
        }
        Ok(())
    }
}

fn renumber(labels: &[usize]) -> (Vec<usize>, usize) {
    let mut map = std::collections::HashMap::new();
    let assignment = labels
        .iter()
        .map(|&l| {
            let next = map.len();
            *map.entry(l).or_insert(next)
        })
        .collect();
    (assignment, map.len())
}

/// Newman modularity of `assignment` on the symmetrized network, at
/// resolution 1. Zero for a network without links.
pub fn modularity(g: &TradeNetwork, assignment: &[usize]) -> f64 {
    let links: usize = (0..g.node_count())
        .map(|i| g.neighbors(i).len())
        .sum::<usize>()
        / 2;
    if links == 0 {
        return 0.0;
    }
    let modules = assignment.iter().copied().max().map_or(0, |m| m + 1);
    let mut internal = vec![0usize; modules];
    let mut degree = vec![0usize; modules];
    for i in 0..g.node_count() {
        let mi = assignment[i];
        degree[mi] += g.neighbors(i).len();
        internal[mi] += g
            .neighbors(i)
            .iter()
            .filter(|&&j| j > i && assignment[j] == mi)
            .count();
    }
    let m = links as f64;
    internal
        .iter()
        .zip(&degree)
        .map(|(&l, &d)| l as f64 / m - (d as f64 / (2.0 * m)).powi(2))
        .sum()
}

/// Weighted undirected graph for one Louvain level. `adj` excludes self
/// loops; `self_weight[i]` is the weight inside super-node `i`, counted from
/// both endpoints.
struct Level {
    adj: Vec<Vec<(usize, f64)>>,
    self_weight: Vec<f64>,
    strength: Vec<f64>,
}

impl Level {
    fn from_network(g: &TradeNetwork) -> Self {
        let n = g.node_count();
        let adj: Vec<Vec<(usize, f64)>> = (0..n)
            .map(|i| g.neighbors(i).iter().map(|&j| (j, 1.0)).collect())
            .collect();
        let strength = adj.iter().map(|a| a.len() as f64).collect();
        Self {
            adj,
            self_weight: vec![0.0; n],
            strength,
        }
    }

    fn len(&self) -> usize {
        self.adj.len()
    }

    /// Greedy local moves until a full sweep moves nothing. Returns the
    /// community of each node and whether anything moved.
    fn local_moves(&self, two_m: f64, rng: &mut ChaCha8Rng) -> (Vec<usize>, bool) {
        let n = self.len();
        let mut community: Vec<usize> = (0..n).collect();
        let mut total = self.strength.clone();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);

        let mut weight_to = vec![0.0; n];
        let mut touched: Vec<usize> = Vec::new();
        let mut any_move = false;
        loop {
            let mut moved = false;
            for &i in &order {
                let k_i = self.strength[i];
                let own = community[i];
                for &(j, w) in &self.adj[i] {
                    let c = community[j];
                    if weight_to[c] == 0.0 {
                        touched.push(c);
                    }
                    weight_to[c] += w;
                }
                total[own] -= k_i;

                let gain = |c: usize, w: f64| w - k_i * total[c] / two_m;
                let mut best = own;
                let mut best_gain = gain(own, weight_to[own]);
                for &c in &touched {
                    let g = gain(c, weight_to[c]);
                    if g > best_gain + MIN_GAIN {
                        best = c;
                        best_gain = g;
                    }
                }

                total[best] += k_i;
                if best != own {
                    community[i] = best;
                    moved = true;
                }
                for &c in &touched {
                    weight_to[c] = 0.0;
                }
                touched.clear();
            }
            if !moved {
                break;
            }
            any_move = true;
        }
        (community, any_move)
    }

    /// Collapses each community into a super-node. `community` must be
    /// dense in `0..count`.
    fn aggregate(&self, community: &[usize], count: usize) -> Level {
        let mut maps: Vec<std::collections::BTreeMap<usize, f64>> = vec![Default::default(); count];
        let mut self_weight = vec![0.0; count];
        for i in 0..self.len() {
            let ci = community[i];
            self_weight[ci] += self.self_weight[i];
            for &(j, w) in &self.adj[i] {
                let cj = community[j];
                if ci == cj {
                    self_weight[ci] += w;
                } else {
                    *maps[ci].entry(cj).or_insert(0.0) += w;
                }
            }
        }
        let adj: Vec<Vec<(usize, f64)>> =
            maps.into_iter().map(|m| m.into_iter().collect()).collect();
        let strength = adj
            .iter()
            .zip(&self_weight)
            .map(|(a, s)| s + a.iter().map(|(_, w)| w).sum::<f64>())
            .collect();
        Level {
            adj,
            self_weight,
            strength,
        }
    }
}

/// Seeded Louvain on the symmetrized network.
pub fn detect_modules(g: &TradeNetwork, seed: u64) -> ModulePartition {
    detect_modules_traced(g, seed).0
}

/// Like [`detect_modules`], also returning the modularity reached after
/// each pass (local moving followed by aggregation).
pub fn detect_modules_traced(g: &TradeNetwork, seed: u64) -> (ModulePartition, Vec<f64>) {
    let n = g.node_count();
    let mut node_module: Vec<usize> = (0..n).collect();
    let mut trace = Vec::new();
    let mut level = Level::from_network(g);
    let two_m: f64 = level.strength.iter().sum();

    if two_m > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        loop {
            let (community, moved) = level.local_moves(two_m, &mut rng);
            if !moved {
                break;
            }
            let (dense, count) = renumber(&community);
            for m in node_module.iter_mut() {
                *m = dense[*m];
            }
            trace.push(modularity(g, &node_module));
            if count == level.len() {
                break;
            }
            level = level.aggregate(&dense, count);
        }
    }

    let (assignment, module_count) = renumber(&node_module);
    let modularity = modularity(g, &assignment);
    (
        ModulePartition {
            year: g.year(),
            assignment,
            module_count,
            modularity,
            seed,
        },
        trace,
    )
}

struct LinkProfile {
    /// Links to the node's own module.
    inside: Vec<f64>,
    /// All links.
    total: Vec<f64>,
    /// Links per module, as (module, count) pairs.
    per_module: Vec<Vec<(usize, f64)>>,
}

fn link_profile(g: &TradeNetwork, p: &ModulePartition, links: LinkCounting) -> LinkProfile {
    let n = g.node_count();
    let mut profile = LinkProfile {
        inside: vec![0.0; n],
        total: vec![0.0; n],
        per_module: vec![Vec::new(); n],
    };
    for i in 0..n {
        let partners: Vec<usize> = match links {
            LinkCounting::Undirected => g.neighbors(i).to_vec(),
            LinkCounting::Directed => g
                .out_neighbors(i)
                .iter()
                .chain(g.in_neighbors(i))
                .copied()
                .collect(),
        };
        let mut counts = std::collections::BTreeMap::new();
        for j in partners {
            *counts.entry(p.assignment[j]).or_insert(0.0) += 1.0;
        }
        profile.total[i] = counts.values().sum();
        profile.inside[i] = counts.get(&p.assignment[i]).copied().unwrap_or(0.0);
        profile.per_module[i] = counts.into_iter().collect();
    }
    profile
}

/// z-score of `values` within each module, using the population standard
/// deviation. Modules with zero spread (including singletons) score 0.
fn module_zscores(p: &ModulePartition, values: &[f64]) -> Vec<f64> {
    let mut sum = vec![0.0; p.module_count];
    let mut size = vec![0usize; p.module_count];
    for (i, &m) in p.assignment.iter().enumerate() {
        sum[m] += values[i];
        size[m] += 1;
    }
    let mean: Vec<f64> = sum.iter().zip(&size).map(|(s, &c)| s / c as f64).collect();
    let mut var = vec![0.0; p.module_count];
    for (i, &m) in p.assignment.iter().enumerate() {
        var[m] += (values[i] - mean[m]).powi(2);
    }
    let sigma: Vec<f64> = var
        .iter()
        .zip(&size)
        .map(|(v, &c)| (v / c as f64).sqrt())
        .collect();
    p.assignment
        .iter()
        .enumerate()
        .map(|(i, &m)| {
            if sigma[m] > 0.0 {
                (values[i] - mean[m]) / sigma[m]
            } else {
                0.0
            }
        })
        .collect()
}

/// How strongly each node is tied into its own module, relative to the
/// other members.
pub fn within_module_degree(
    g: &TradeNetwork,
    p: &ModulePartition,
    links: LinkCounting,
) -> Result<IndicatorScores> {
    p.check(g)?;
    let profile = link_profile(g, p, links);
    Ok(IndicatorScores::new(
        Indicator::WithinModule,
        g,
        module_zscores(p, &profile.inside),
    ))
}

/// How strongly each node links outside its own module, relative to the
/// other members.
pub fn outside_module_degree(
    g: &TradeNetwork,
    p: &ModulePartition,
    links: LinkCounting,
) -> Result<IndicatorScores> {
    p.check(g)?;
    let profile = link_profile(g, p, links);
    let outside: Vec<f64> = profile
        .total
        .iter()
        .zip(&profile.inside)
        .map(|(t, k)| t - k)
        .collect();
    Ok(IndicatorScores::new(
        Indicator::OutsideModule,
        g,
        module_zscores(p, &outside),
    ))
}

/// `1 - Σ_s (k_s / K)^2`: 0 when all links stay in one module, approaching
/// 1 as links spread evenly across many modules.
pub fn participation(
    g: &TradeNetwork,
    p: &ModulePartition,
    links: LinkCounting,
) -> Result<IndicatorScores> {
    p.check(g)?;
    let profile = link_profile(g, p, links);
    let scores = (0..g.node_count())
        .map(|i| {
            let k = profile.total[i];
            if k == 0.0 {
                return 0.0;
            }
            1.0 - profile.per_module[i]
                .iter()
                .map(|&(_, c)| (c / k).powi(2))
                .sum::<f64>()
        })
        .collect();
    Ok(IndicatorScores::new(Indicator::Participation, g, scores))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn undirected(n: usize, links: &[(usize, usize)]) -> TradeNetwork {
        let edges: Vec<_> = links.iter().flat_map(|&(a, b)| [(a, b), (b, a)]).collect();
        TradeNetwork::from_index_edges(2017, n, &edges).unwrap()
    }

    fn clique_links(nodes: &[usize]) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (x, &a) in nodes.iter().enumerate() {
            for &b in &nodes[x + 1..] {
                out.push((a, b));
            }
        }
        out
    }

    fn two_cliques_with_bridge() -> TradeNetwork {
        let mut links = clique_links(&[0, 1, 2, 3]);
        links.extend(clique_links(&[4, 5, 6, 7]));
        links.push((3, 4));
        undirected(8, &links)
    }

    /// Every set partition of `0..n`, as restricted growth strings.
    fn all_partitions(n: usize) -> Vec<Vec<usize>> {
        fn grow(prefix: &mut Vec<usize>, n: usize, out: &mut Vec<Vec<usize>>) {
            if prefix.len() == n {
                out.push(prefix.clone());
                return;
            }
            let next = prefix.iter().copied().max().map_or(0, |m| m + 1);
            for label in 0..=next {
                prefix.push(label);
                grow(prefix, n, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        grow(&mut Vec::new(), n, &mut out);
        out
    }

    /// Textbook double sum over node pairs, independent of [`modularity`].
    fn q_by_pairs(g: &TradeNetwork, labels: &[usize]) -> f64 {
        let n = g.node_count();
        let k: Vec<f64> = (0..n).map(|i| g.neighbors(i).len() as f64).collect();
        let two_m: f64 = k.iter().sum();
        let mut q = 0.0;
        for i in 0..n {
            for j in 0..n {
                if labels[i] == labels[j] {
                    let a = if g.neighbors(i).contains(&j) {
                        1.0
                    } else {
                        0.0
                    };
                    q += a - k[i] * k[j] / two_m;
                }
            }
        }
        q / two_m
    }

    fn best_partition(g: &TradeNetwork) -> (Vec<usize>, f64) {
        all_partitions(g.node_count())
            .into_iter()
            .map(|p| {
                let q = q_by_pairs(g, &p);
                (p, q)
            })
            .fold((Vec::new(), f64::NEG_INFINITY), |best, cur| {
                if cur.1 > best.1 + 1e-12 {
                    cur
                } else {
                    best
                }
            })
    }

    #[test]
    fn exhaustive_oracle_agrees_with_modularity() {
        let g = two_cliques_with_bridge();
        for labels in all_partitions(8).iter().step_by(97) {
            assert!((q_by_pairs(&g, labels) - modularity(&g, labels)).abs() < 1e-12);
        }
    }

    #[test]
    fn two_cliques_split_into_two_modules() {
        let g = two_cliques_with_bridge();
        let (oracle, q_best) = best_partition(&g);
        assert_eq!(oracle, [0, 0, 0, 0, 1, 1, 1, 1]);
        for seed in 0..10 {
            let p = detect_modules(&g, seed);
            assert_eq!(p.assignment, oracle, "seed {seed}");
            assert_eq!(p.module_count, 2);
            assert!((p.modularity - q_best).abs() < 1e-12);
        }
    }

    #[test]
    fn edgeless_gives_singletons() {
        let g = TradeNetwork::from_index_edges(2017, 3, &[]).unwrap();
        let p = detect_modules(&g, 7);
        assert_eq!(p.assignment, [0, 1, 2]);
        assert_eq!(p.module_count, 3);
        assert_eq!(p.modularity, 0.0);
    }

    #[test]
    fn triangle_is_one_module() {
        let g = TradeNetwork::from_index_edges(2017, 3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let (oracle, _) = best_partition(&g);
        assert_eq!(oracle, [0, 0, 0]);
        let p = detect_modules(&g, 1);
        assert_eq!(p.assignment, oracle);
    }

    #[test]
    fn seeded_detection_is_reproducible() {
        let mut links = clique_links(&[0, 1, 2, 3, 4]);
        links.extend(clique_links(&[5, 6, 7, 8]));
        links.extend(clique_links(&[9, 10, 11]));
        links.extend([(4, 5), (8, 9), (0, 11), (2, 7)]);
        let g = undirected(12, &links);
        for seed in [0, 1, 99] {
            let (a, trace_a) = detect_modules_traced(&g, seed);
            let (b, trace_b) = detect_modules_traced(&g, seed);
            assert_eq!(a, b);
            assert_eq!(trace_a, trace_b);
            assert!(trace_a.windows(2).all(|w| w[1] >= w[0]));
        }
    }

    fn partition(g: &TradeNetwork, labels: &[usize]) -> ModulePartition {
        ModulePartition::from_labels(g, labels, 0).unwrap()
    }

    #[test]
    fn within_module_zscore_hand_case() {
        // Module {0,1,2} with intra-degrees [2,1,1]: path 1-0-2.
        let g = undirected(3, &[(0, 1), (0, 2)]);
        let z =
            within_module_degree(&g, &partition(&g, &[0, 0, 0]), LinkCounting::Undirected).unwrap();
        let expected = (2.0 - 4.0 / 3.0) / (2.0f64 / 9.0).sqrt();
        assert!((z.scores[0] - expected).abs() < 1e-12);
        assert!((z.scores[0] - 1.414).abs() < 1e-3);
        assert!(z.scores.iter().sum::<f64>().abs() < 1e-12);
    }

    #[test]
    fn within_module_zero_spread_and_singletons() {
        let g = undirected(3, &[(0, 1), (1, 2), (2, 0)]);
        let z =
            within_module_degree(&g, &partition(&g, &[0, 0, 0]), LinkCounting::Undirected).unwrap();
        assert!(z.scores.iter().all(|&x| x == 0.0));
        let z =
            within_module_degree(&g, &partition(&g, &[0, 1, 2]), LinkCounting::Undirected).unwrap();
        assert!(z.scores.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn participation_cases() {
        // Node 0 has two links into module A (its own) and two into B.
        let g = undirected(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]);
        let p = partition(&g, &[0, 0, 0, 1, 1]);
        let part = participation(&g, &p, LinkCounting::Undirected).unwrap();
        assert!((part.scores[0] - 0.5).abs() < 1e-12);
        assert_eq!(part.scores[1], 0.0);

        let whole = partition(&g, &[0; 5]);
        let part = participation(&g, &whole, LinkCounting::Undirected).unwrap();
        assert!(part.scores.iter().all(|&x| x == 0.0));

        let lonely = TradeNetwork::from_index_edges(2017, 2, &[]).unwrap();
        let part = participation(
            &lonely,
            &partition(&lonely, &[0, 1]),
            LinkCounting::Undirected,
        )
        .unwrap();
        assert_eq!(part.scores, [0.0, 0.0]);
    }

    #[test]
    fn outside_module_hand_case() {
        // Members 0,1,2 of module 0 with outside links [3,0,0].
        let g = undirected(6, &[(0, 3), (0, 4), (0, 5), (0, 1), (1, 2)]);
        let p = partition(&g, &[0, 0, 0, 1, 1, 1]);
        let b = outside_module_degree(&g, &p, LinkCounting::Undirected).unwrap();
        let expected = (3.0 - 1.0) / 2.0f64.sqrt();
        assert!((b.scores[0] - expected).abs() < 1e-12);
        assert!((b.scores[0] - 1.414).abs() < 1e-3);
    }

    #[test]
    fn outside_module_zero_when_no_bridges() {
        let g = undirected(4, &[(0, 1), (2, 3)]);
        let b = outside_module_degree(&g, &partition(&g, &[0, 0, 1, 1]), LinkCounting::Undirected)
            .unwrap();
        assert!(b.scores.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn bridge_node_scores_higher_outside() {
        let mut links = clique_links(&[0, 1, 2]);
        links.extend(clique_links(&[3, 4, 5]));
        links.push((2, 3));
        let g = undirected(6, &links);
        let p = detect_modules(&g, DEFAULT_SEED);
        assert_eq!(p.assignment, [0, 0, 0, 1, 1, 1]);
        let b = outside_module_degree(&g, &p, LinkCounting::Undirected).unwrap();
        assert!(b.scores[2] > b.scores[0]);
        assert!(b.scores[3] > b.scores[4]);
    }

    #[test]
    fn directed_counting_doubles_reciprocal_links() {
        let g = TradeNetwork::from_index_edges(2017, 3, &[(0, 1), (1, 0), (0, 2)]).unwrap();
        let p = partition(&g, &[0, 0, 1]);
        let und = participation(&g, &p, LinkCounting::Undirected).unwrap();
        let dir = participation(&g, &p, LinkCounting::Directed).unwrap();
        assert!((und.scores[0] - 0.5).abs() < 1e-12);
        // 2 of 3 directed links stay inside: 1 - (4/9 + 1/9).
        assert!((dir.scores[0] - 4.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn mismatched_partition_is_error() {
        let g = undirected(3, &[(0, 1)]);
        let bad = ModulePartition {
            year: 2017,
            assignment: vec![0, 0],
            module_count: 1,
            modularity: 0.0,
            seed: 0,
        };
        assert!(matches!(
            within_module_degree(&g, &bad, LinkCounting::Undirected),
            Err(Error::Argument(_))
        ));
        assert!(ModulePartition::from_labels(&g, &[0], 0).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_graph() -> impl Strategy<Value = TradeNetwork> {
            (2usize..16).prop_flat_map(|n| {
                prop::collection::vec((0..n, 0..n), 0..45).prop_map(move |pairs| {
                    let edges: Vec<_> = pairs.into_iter().filter(|(a, b)| a != b).collect();
                    TradeNetwork::from_index_edges(2017, n, &edges).unwrap()
                })
            })
        }

        proptest! {
            #[test]
            fn partition_invariants(g in arb_graph(), seed in 0u64..1000) {
                let (p, trace) = detect_modules_traced(&g, seed);
                prop_assert_eq!(p.assignment.len(), g.node_count());
                prop_assert!(p.assignment.iter().all(|&m| m < p.module_count));
                for m in 0..p.module_count {
                    prop_assert!(p.members(m).next().is_some());
                }
                prop_assert!((-1.0..=1.0).contains(&p.modularity));
                prop_assert!(trace.windows(2).all(|w| w[1] + 1e-12 >= w[0]));
                if let Some(last) = trace.last() {
                    prop_assert!((last - p.modularity).abs() < 1e-12);
                }
                prop_assert_eq!(&p, &detect_modules(&g, seed));
            }

            #[test]
            fn role_indicator_invariants(g in arb_graph(), seed in 0u64..1000) {
                let p = detect_modules(&g, seed);
                let part = participation(&g, &p, LinkCounting::Undirected).unwrap();
                let cap = 1.0 - 1.0 / p.module_count as f64;
                prop_assert!(part.scores.iter().all(|&x| x >= 0.0 && x <= cap + 1e-12));

                let z = within_module_degree(&g, &p, LinkCounting::Undirected).unwrap();
                for m in 0..p.module_count {
                    let sum: f64 = p.members(m).map(|i| z.scores[i]).sum();
                    prop_assert!(sum.abs() < 1e-9);
                }

                let merged = ModulePartition::from_labels(&g, &vec![0; g.node_count()], seed).unwrap();
                let flat = participation(&g, &merged, LinkCounting::Undirected).unwrap();
                prop_assert!(flat.scores.iter().all(|&x| x == 0.0));
            }
        }
    }
}
