//! Seeded random digraphs for experiments and tests.

use std::collections::BTreeSet;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::TradeNetwork;

/// Static-model scale-free digraph. Node `i` gets out-weight
/// `(i + 1)^(-1 / (exponent - 1))`, which yields out-degrees with tail
/// `P(k) ~ k^-exponent`. Targets are drawn with the same weights, so large
/// exporters also tend to be large importers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleFree {
    pub nodes: usize,
    pub exponent: f64,
    pub mean_out_degree: f64,
    pub seed: u64,
}

impl Default for ScaleFree {
    fn default() -> Self {
        ScaleFree {
            nodes: 200,
            exponent: 2.5,
            mean_out_degree: 2.0,
            seed: 42,
        }
    }
}

impl ScaleFree {
    pub fn generate(&self, year: i32) -> Result<TradeNetwork> {
        let n = self.nodes;
        if self.exponent <= 2.0 {
            return Err(Error::argument("scale-free exponent must exceed 2"));
        }
        let target = (self.mean_out_degree * n as f64).round() as usize;
        if n < 2 || target > n * (n - 1) / 2 {
            return Err(Error::argument(
                "too many edges requested for the node count",
            ));
        }
        let alpha = 1.0 / (self.exponent - 1.0);
        let weights: Vec<f64> = (0..n).map(|i| ((i + 1) as f64).powf(-alpha)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let dist = WeightedIndex::new(&weights).expect("positive weights");
        let mut edges = BTreeSet::new();
        while edges.len() < target {
            let (s, t) = (dist.sample(&mut rng), dist.sample(&mut rng));
            if s != t {
                edges.insert((s, t));
            }
        }
        let edges: Vec<(usize, usize)> = edges.into_iter().collect();
        TradeNetwork::from_index_edges(year, n, &edges)
    }
}

/// Erdős–Rényi digraph where each ordered pair is an edge with
/// probability `p`.
pub fn gnp_digraph<R: Rng>(n: usize, p: f64, rng: &mut R) -> TradeNetwork {
    let mut edges = Vec::new();
    for s in 0..n {
        for t in 0..n {
            if s != t && rng.random_bool(p) {
                edges.push((s, t));
            }
        }
    }
    TradeNetwork::from_index_edges(0, n, &edges).expect("indices below n")
}

pub fn complete_digraph(n: usize) -> TradeNetwork {
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|s| (0..n).filter(move |&t| t != s).map(move |t| (s, t)))
        .collect();
    TradeNetwork::from_index_edges(0, n, &edges).expect("indices below n")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scale_free_is_seeded_and_heavy_tailed() {
        let cfg = ScaleFree::default();
        let a = cfg.generate(2000).unwrap();
        let b = cfg.generate(2000).unwrap();
        assert_eq!(a.edges().collect::<Vec<_>>(), b.edges().collect::<Vec<_>>());
        assert_eq!(a.node_count(), 200);
        assert_eq!(a.edge_count(), 400);
        let max_out = (0..200).map(|v| a.out_degree(v)).max().unwrap();
        let median = {
            let mut d: Vec<usize> = (0..200).map(|v| a.out_degree(v)).collect();
            d.sort();
            d[100]
        };
        assert!(
            max_out >= 10 * median.max(1),
            "max {max_out} median {median}"
        );
        let other = ScaleFree { seed: 7, ..cfg }.generate(2000).unwrap();
        assert_ne!(
            a.edges().collect::<Vec<_>>(),
            other.edges().collect::<Vec<_>>()
        );
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(ScaleFree {
            exponent: 2.0,
            ..Default::default()
        }
        .generate(0)
        .is_err());
        assert!(ScaleFree {
            nodes: 3,
            mean_out_degree: 5.0,
            ..Default::default()
        }
        .generate(0)
        .is_err());
    }

    #[test]
    fn complete_has_all_ordered_pairs() {
        let g = complete_digraph(5);
        assert_eq!(g.edge_count(), 20);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(gnp_digraph(6, 1.0, &mut rng).edge_count(), 30);
        assert_eq!(gnp_digraph(6, 0.0, &mut rng).edge_count(), 0);
    }
}
