//! Node-removal attacks and the robustness summary of their outcome.
//!
//! For each removal count `n = 1..=N` an attack records `S(n/N)`, the size
//! of the largest connected component of the surviving subgraph divided by
//! the ORIGINAL node count. Robustness is the mean of that sequence, so it
//! is bounded above by `(N-1)/(2N)`.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::centrality::{self, rank, Indicator, RankingTable, ScoreConfig};
use crate::error::{Error, Result};
use crate::graph::{Connectivity, TradeNetwork};

pub const DEFAULT_TRIALS: usize = 100;
pub const DEFAULT_RANDOM_SEED: u64 = 42;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Strategy {
    Targeted(Indicator),
    Random,
}

impl Strategy {
    /// The twelve indicators followed by the random baseline.
    pub fn all() -> Vec<Strategy> {
        Indicator::ALL
            .into_iter()
            .map(Strategy::Targeted)
            .chain(std::iter::once(Strategy::Random))
            .collect()
    }

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Targeted(ind) => ind.name(),
            Strategy::Random => "random",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim().eq_ignore_ascii_case("random") {
            Ok(Strategy::Random)
        } else {
            s.parse().map(Strategy::Targeted)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttackMode {
    /// Remove nodes in the order of the ranking on the intact network.
    #[default]
    Static,
    /// Re-rank the surviving subgraph after every removal.
    Adaptive,
}

impl FromStr for AttackMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "static" => Ok(AttackMode::Static),
            "adaptive" => Ok(AttackMode::Adaptive),
            other => Err(Error::argument(format!("unknown attack mode `{other}`"))),
        }
    }
}

impl fmt::Display for AttackMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AttackMode::Static => "static",
            AttackMode::Adaptive => "adaptive",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AttackConfig {
    pub mode: AttackMode,
    pub connectivity: Connectivity,
    /// Used to rank nodes, and to re-rank them in adaptive mode.
    pub scores: ScoreConfig,
}

/// Giant-component fractions after removing `n = 1..=N` nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct AttackCurve {
    pub strategy: Strategy,
    pub year: i32,
    pub node_count: usize,
    /// `gcc_fraction[n - 1]` is `S(n / N)`.
    pub gcc_fraction: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
}

impl AttackCurve {
    /// `(n, q, S)` for every removal count.
    pub fn points(&self) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        let n_total = self.node_count as f64;
        self.gcc_fraction
            .iter()
            .enumerate()
            .map(move |(k, &s)| (k + 1, (k + 1) as f64 / n_total, s))
    }

    /// `S` after removing `n` nodes, for `1 <= n <= N`.
    pub fn at(&self, n: usize) -> Option<f64> {
        n.checked_sub(1)
            .and_then(|k| self.gcc_fraction.get(k).copied())
    }

    /// `S` at the removal count nearest to `q * N`.
    pub fn at_fraction(&self, q: f64) -> Option<f64> {
        self.at((q * self.node_count as f64).round() as usize)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RobustnessResult {
    pub strategy: String,
    pub year: i32,
    pub r: f64,
    pub trials: usize,
    pub seed: u64,
}

struct DisjointSet {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> usize {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return self.size[ra];
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        self.size[ra]
    }
}

/// `S` sequence for removing nodes in `order` (a permutation of all nodes).
pub fn removal_curve(g: &TradeNetwork, order: &[usize], connectivity: Connectivity) -> Vec<f64> {
    let n = g.node_count();
    debug_assert_eq!(order.len(), n);
    let total = n as f64;
    match connectivity {
        // Re-insert nodes from last-removed to first, merging components.
        Connectivity::Weak => {
            let mut sets = DisjointSet::new(n);
            let mut alive = vec![false; n];
            let mut largest = 0;
            let mut curve = vec![0.0; n];
            for k in (1..n).rev() {
                let v = order[k];
                alive[v] = true;
                largest = largest.max(1);
                for &w in g.neighbors(v) {
                    if alive[w] {
                        largest = largest.max(sets.union(v, w));
                    }
                }
                curve[k - 1] = largest as f64 / total;
            }
            curve
        }
        Connectivity::Strong => {
            let mut alive = vec![true; n];
            order
                .iter()
                .map(|&v| {
                    alive[v] = false;
                    g.components_masked(&alive, Connectivity::Strong).gcc_size as f64 / total
                })
                .collect()
        }
    }
}

fn check_ranking(g: &TradeNetwork, ranking: &RankingTable) -> Result<()> {
    if ranking.economies != g.nodes() {
        return Err(Error::argument(format!(
            "ranking covers {} economies that do not match the {}-node network",
            ranking.economies.len(),
            g.node_count()
        )));
    }
    let mut seen = vec![false; g.node_count()];
    for &i in &ranking.order {
        if i >= seen.len() || std::mem::replace(&mut seen[i], true) {
            return Err(Error::argument(
                "ranking order is not a permutation of the nodes",
            ));
        }
    }
    if ranking.order.len() != g.node_count() {
        return Err(Error::argument("ranking order does not cover every node"));
    }
    Ok(())
}

/// Removes nodes by `ranking`, either in fixed order or re-ranking the
/// survivors after each removal (using `ranking.indicator`).
pub fn targeted_attack(
    g: &TradeNetwork,
    ranking: &RankingTable,
    config: &AttackConfig,
) -> Result<AttackCurve> {
    check_ranking(g, ranking)?;
    let gcc_fraction = match config.mode {
        AttackMode::Static => removal_curve(g, &ranking.order, config.connectivity),
        AttackMode::Adaptive => adaptive_curve(g, ranking, config)?,
    };
    Ok(AttackCurve {
        strategy: Strategy::Targeted(ranking.indicator),
        year: g.year(),
        node_count: g.node_count(),
        gcc_fraction,
        trials: 1,
        seed: config.scores.community.seed,
    })
}

fn adaptive_curve(
    g: &TradeNetwork,
    ranking: &RankingTable,
    config: &AttackConfig,
) -> Result<Vec<f64>> {
    let n = g.node_count();
    let mut alive = vec![true; n];
    let mut curve = Vec::with_capacity(n);
    let mut next = ranking.order.first().copied();
    while let Some(victim) = next {
        alive[victim] = false;
        let gcc = g.components_masked(&alive, config.connectivity).gcc_size;
        curve.push(gcc as f64 / n as f64);
        next = if curve.len() == n {
            None
        } else {
            let (sub, old_of_new) = g.induced_subgraph(&alive);
            let scores = centrality::compute(&sub, ranking.indicator, &config.scores)?;
            Some(old_of_new[rank(&scores).order[0]])
        };
    }
    Ok(curve)
}

/// Ranks by `indicator` on the intact network, then attacks.
pub fn attack_by(
    g: &TradeNetwork,
    indicator: Indicator,
    config: &AttackConfig,
) -> Result<AttackCurve> {
    let scores = centrality::compute(g, indicator, &config.scores)?;
    targeted_attack(g, &rank(&scores), config)
}

/// Mean `S` sequence over `trials` uniformly random removal orders. Trial
/// `t` shuffles with a generator seeded by `seed + t`.
pub fn random_attack(
    g: &TradeNetwork,
    trials: usize,
    seed: u64,
    connectivity: Connectivity,
) -> Result<AttackCurve> {
    if trials == 0 {
        return Err(Error::argument("random attack needs at least one trial"));
    }
    let n = g.node_count();
    let curves: Vec<Vec<f64>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(t as u64));
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng);
            removal_curve(g, &order, connectivity)
        })
        .collect();
    let mut mean = vec![0.0; n];
    for curve in &curves {
        for (acc, s) in mean.iter_mut().zip(curve) {
            *acc += s;
        }
    }
    mean.iter_mut().for_each(|s| *s /= trials as f64);
    Ok(AttackCurve {
        strategy: Strategy::Random,
        year: g.year(),
        node_count: n,
        gcc_fraction: mean,
        trials,
        seed,
    })
}

/// `R = (1/N) Σ_{n=1}^{N} S(n/N)`.
pub fn robustness(curve: &AttackCurve) -> Result<RobustnessResult> {
    if curve.node_count == 0 || curve.gcc_fraction.len() != curve.node_count {
        return Err(Error::argument(format!(
            "curve has {} points for {} nodes",
            curve.gcc_fraction.len(),
            curve.node_count
        )));
    }
    let r = curve.gcc_fraction.iter().sum::<f64>() / curve.node_count as f64;
    Ok(RobustnessResult {
        strategy: curve.strategy.to_string(),
        year: curve.year,
        r,
        trials: curve.trials,
        seed: curve.seed,
    })
}

/// One curve and robustness value per named strategy (an indicator name or
/// `random`), in the order given. Strategies run in parallel.
pub fn attack_suite<S: AsRef<str>>(
    g: &TradeNetwork,
    strategies: &[S],
    trials: usize,
    seed: u64,
    config: &AttackConfig,
) -> Result<Vec<(AttackCurve, RobustnessResult)>> {
    let parsed = strategies
        .iter()
        .map(|s| s.as_ref().parse::<Strategy>())
        .collect::<Result<Vec<_>>>()?;
    if parsed.is_empty() {
        return Ok(Vec::new());
    }
    if g.is_empty() {
        return Err(Error::argument("cannot attack an empty network"));
    }
    let indicators: Vec<Indicator> = parsed
        .iter()
        .filter_map(|s| match s {
            Strategy::Targeted(ind) => Some(*ind),
            Strategy::Random => None,
        })
        .collect();
    let rankings: Vec<RankingTable> = centrality::compute_many(g, &indicators, &config.scores)?
        .iter()
        .map(rank)
        .collect();

    parsed
        .par_iter()
        .map(|&strategy| {
            let curve = match strategy {
                Strategy::Random => random_attack(g, trials, seed, config.connectivity)?,
                Strategy::Targeted(ind) => {
                    let pos = indicators
                        .iter()
                        .position(|&i| i == ind)
                        .expect("indicator was ranked");
                    targeted_attack(g, &rankings[pos], config)?
                }
            };
            let r = robustness(&curve)?;
            Ok((curve, r))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::centrality::{degree, IndicatorScores};

    fn reciprocal(n: usize, links: &[(usize, usize)]) -> TradeNetwork {
        let edges: Vec<_> = links.iter().flat_map(|&(a, b)| [(a, b), (b, a)]).collect();
        TradeNetwork::from_index_edges(2017, n, &edges).unwrap()
    }

    fn star() -> TradeNetwork {
        reciprocal(5, &[(0, 1), (0, 2), (0, 3), (0, 4)])
    }

    fn complete(n: usize) -> TradeNetwork {
        let edges: Vec<_> = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .collect();
        TradeNetwork::from_index_edges(2017, n, &edges).unwrap()
    }

    fn ranking_by_ids(g: &TradeNetwork, ids: &[usize]) -> RankingTable {
        let n = g.node_count();
        let mut scores = vec![0.0; n];
        for (pos, &i) in ids.iter().enumerate() {
            scores[i] = (n - pos) as f64;
        }
        rank(&IndicatorScores::new(Indicator::Indegree, g, scores))
    }

    fn assert_curve(actual: &[f64], expected: &[f64]) {
        assert_eq!(actual.len(), expected.len());
        for (a, e) in actual.iter().zip(expected) {
            assert!((a - e).abs() < 1e-12, "{actual:?} vs {expected:?}");
        }
    }

    #[test]
    fn star_degree_attack() {
        let g = star();
        let ranking = rank(&degree(&g).0);
        let curve = targeted_attack(&g, &ranking, &AttackConfig::default()).unwrap();
        assert_curve(&curve.gcc_fraction, &[0.2, 0.2, 0.2, 0.2, 0.0]);
        let r = robustness(&curve).unwrap();
        assert!((r.r - 0.16).abs() < 1e-12);
    }

    #[test]
    fn complete_graph_loses_one_per_step() {
        let g = complete(4);
        let curve = targeted_attack(
            &g,
            &ranking_by_ids(&g, &[2, 0, 3, 1]),
            &AttackConfig::default(),
        )
        .unwrap();
        assert_curve(&curve.gcc_fraction, &[0.75, 0.5, 0.25, 0.0]);
        assert!((robustness(&curve).unwrap().r - 0.375).abs() < 1e-12);
    }

    #[test]
    fn chain_attack_from_middle() {
        let g = reciprocal(3, &[(0, 1), (1, 2)]);
        let curve = targeted_attack(
            &g,
            &ranking_by_ids(&g, &[1, 0, 2]),
            &AttackConfig::default(),
        )
        .unwrap();
        assert_curve(&curve.gcc_fraction, &[1.0 / 3.0, 1.0 / 3.0, 0.0]);
    }

    #[test]
    fn strong_connectivity_curve() {
        // Cycle 0→1→2→0 plus tail 2→3; removing 3 keeps the cycle intact.
        let g = TradeNetwork::from_index_edges(2017, 4, &[(0, 1), (1, 2), (2, 0), (2, 3)]).unwrap();
        assert_curve(
            &removal_curve(&g, &[3, 0, 1, 2], Connectivity::Strong),
            &[0.75, 0.25, 0.25, 0.0],
        );
        assert_curve(
            &removal_curve(&g, &[3, 0, 1, 2], Connectivity::Weak),
            &[0.75, 0.5, 0.25, 0.0],
        );
    }

    #[test]
    fn mismatched_ranking_is_error() {
        let ranking = rank(&degree(&star()).0);
        let err = targeted_attack(&complete(4), &ranking, &AttackConfig::default()).unwrap_err();
        assert!(matches!(err, Error::Argument(_)));
    }

    #[test]
    fn adaptive_star_matches_static() {
        let g = star();
        let config = AttackConfig {
            mode: AttackMode::Adaptive,
            ..AttackConfig::default()
        };
        let curve = attack_by(&g, Indicator::Indegree, &config).unwrap();
        assert_curve(&curve.gcc_fraction, &[0.2, 0.2, 0.2, 0.2, 0.0]);
    }

    #[test]
    fn adaptive_two_hub_sequence() {
        // Two hubs: 0 with leaves 2,3,4 and 1 with leaves 5,6; hubs linked.
        let g = reciprocal(7, &[(0, 1), (0, 2), (0, 3), (0, 4), (1, 5), (1, 6), (5, 6)]);
        let stat = attack_by(&g, Indicator::Indegree, &AttackConfig::default()).unwrap();
        let adaptive = attack_by(
            &g,
            Indicator::Indegree,
            &AttackConfig {
                mode: AttackMode::Adaptive,
                ..AttackConfig::default()
            },
        )
        .unwrap();
        // Static order by (degree desc, id): 0(4), 1(3), 5(2), 6(2), ...
        assert_curve(&stat.gcc_fraction[..3], &[3.0 / 7.0, 2.0 / 7.0, 1.0 / 7.0]);
        // Adaptive: after removing 0, node 1 has degree 2, as do 5 and 6,
        // so 1 goes next (smallest id); then 5 and 6 have degree 1.
        assert_curve(
            &adaptive.gcc_fraction[..3],
            &[3.0 / 7.0, 2.0 / 7.0, 1.0 / 7.0],
        );
        assert!(adaptive.gcc_fraction.iter().all(|s| s.is_finite()));
    }

    #[test]
    fn random_attack_complete_graph_is_exact() {
        let g = complete(4);
        let curve = random_attack(&g, 7, 3, Connectivity::Weak).unwrap();
        assert_curve(&curve.gcc_fraction, &[0.75, 0.5, 0.25, 0.0]);
    }

    #[test]
    fn random_attack_forced_sequence() {
        let g = TradeNetwork::from_index_edges(2017, 2, &[(0, 1)]).unwrap();
        let curve = random_attack(&g, 1, 0, Connectivity::Weak).unwrap();
        assert_curve(&curve.gcc_fraction, &[0.5, 0.0]);
    }

    #[test]
    fn random_attack_star_first_step_converges_to_enumeration() {
        // Exhaustive first removal: centre (1 of 5) leaves 1/5, a leaf leaves 4/5.
        let expected = (4.0 * 0.8 + 0.2) / 5.0;
        let curve = random_attack(&star(), 20_000, 11, Connectivity::Weak).unwrap();
        assert!((curve.gcc_fraction[0] - expected).abs() < 0.01);
    }

    #[test]
    fn random_attack_needs_trials_and_is_seeded() {
        let g = star();
        assert!(random_attack(&g, 0, 1, Connectivity::Weak).is_err());
        let a = random_attack(&g, 25, 9, Connectivity::Weak).unwrap();
        let b = random_attack(&g, 25, 9, Connectivity::Weak).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn robustness_rejects_incomplete_curve() {
        let mut curve = random_attack(&star(), 2, 0, Connectivity::Weak).unwrap();
        curve.gcc_fraction.pop();
        assert!(robustness(&curve).is_err());
    }

    #[test]
    fn isolated_nodes_robustness() {
        // Every survivor is its own component: S(n) = 1/N until none are left.
        let n = 6;
        let g = TradeNetwork::from_index_edges(2017, n, &[]).unwrap();
        let curve = random_attack(&g, 3, 0, Connectivity::Weak).unwrap();
        let r = robustness(&curve).unwrap().r;
        let oracle = (n - 1) as f64 * (1.0 / n as f64) / n as f64;
        assert!((r - oracle).abs() < 1e-12);
        assert!(r <= (n - 1) as f64 / (2 * n) as f64);
    }

    #[test]
    fn suite_cardinality_and_errors() {
        let g = star();
        let out =
            attack_suite(&g, &["indegree", "random"], 10, 5, &AttackConfig::default()).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].1.strategy, "indegree");
        assert_eq!(out[1].1.trials, 10);

        let none: [&str; 0] = [];
        assert!(attack_suite(&g, &none, 10, 5, &AttackConfig::default())
            .unwrap()
            .is_empty());

        let err =
            attack_suite(&g, &["indegree", "katz"], 10, 5, &AttackConfig::default()).unwrap_err();
        assert!(matches!(err, Error::UnknownIndicator(_)));

        let again =
            attack_suite(&g, &["indegree", "random"], 10, 5, &AttackConfig::default()).unwrap();
        assert_eq!(out, again);
    }

    #[test]
    fn curve_views() {
        let curve = random_attack(&complete(4), 1, 0, Connectivity::Weak).unwrap();
        let pts: Vec<_> = curve.points().collect();
        assert_eq!(pts[1], (2, 0.5, 0.5));
        assert_eq!(curve.at(0), None);
        assert_eq!(curve.at_fraction(0.25), Some(0.75));
    }

    mod props {
        use super::*;
        use proptest::prelude::{prop, prop_assert, prop_assert_eq, proptest};
        use proptest::strategy::Strategy as _;

        fn arb_graph() -> impl proptest::strategy::Strategy<Value = TradeNetwork> {
            (1usize..14).prop_flat_map(|n| {
                prop::collection::vec((0..n, 0..n), 0..40).prop_map(move |pairs| {
                    let edges: Vec<_> = pairs.into_iter().filter(|(a, b)| a != b).collect();
                    TradeNetwork::from_index_edges(2017, n, &edges).unwrap()
                })
            })
        }

        proptest! {
            #[test]
            fn union_find_matches_recomputation(g in arb_graph(), seed in 0u64..500) {
                let mut order: Vec<usize> = (0..g.node_count()).collect();
                order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
                let fast = removal_curve(&g, &order, Connectivity::Weak);
                let mut removed = Vec::new();
                for (k, &v) in order.iter().enumerate() {
                    removed.push(v);
                    let gcc = g.weak_components(&removed).unwrap().gcc_size;
                    prop_assert_eq!(fast[k], gcc as f64 / g.node_count() as f64);
                }
            }

            #[test]
            fn curves_respect_bounds(g in arb_graph(), seed in 0u64..500) {
                let n = g.node_count();
                let bound = (n - 1) as f64 / (2 * n) as f64;
                let results = attack_suite(&g, &["outdegree", "pagerank", "random"], 5, seed,
                    &AttackConfig::default()).unwrap();
                for (curve, r) in results {
                    for (k, s) in curve.points().map(|p| (p.0, p.2)) {
                        prop_assert!(s <= (n - k) as f64 / n as f64 + 1e-12);
                    }
                    prop_assert_eq!(curve.at(n), Some(0.0));
                    prop_assert!(r.r >= 0.0 && r.r <= bound + 1e-12);
                }
            }
        }
    }
}
