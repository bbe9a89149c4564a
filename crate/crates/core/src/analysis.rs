//! Cross-indicator rank correlation, organisation-level aggregation and
//! per-year series tables.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::ops::RangeInclusive;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::centrality::{rank_key, Indicator, IndicatorScores};
use crate::error::{Error, Result};
use crate::ingest::economy_key;

pub const DEFAULT_PERMUTATIONS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Correlation {
    pub rho: f64,
    /// Two-sided p-value.
    pub p: f64,
    pub n: usize,
}

/// 1-based ranks, with tied values sharing the mean of their positions.
/// Values equal to 12 significant digits count as tied.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let keys: Vec<f64> = values.iter().map(|&v| rank_key(v)).collect();
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| keys[a].total_cmp(&keys[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && keys[order[end]] == keys[order[start]] {
            end += 1;
        }
        // Positions start+1 ..= end share their mean.
        let shared = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = shared;
        }
        start = end;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        None
    } else {
        Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
    }
}

fn rho_of(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::argument(format!(
            "sample lengths differ ({} vs {})",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 3 {
        return Err(Error::UndefinedCorrelation(format!(
            "need at least 3 observations, got {}",
            x.len()
        )));
    }
    pearson(&average_ranks(x), &average_ranks(y))
        .ok_or_else(|| Error::UndefinedCorrelation("zero variance in an input".into()))
}

/// Two-sided p-value of `rho` under the t approximation with `n - 2`
/// degrees of freedom.
pub fn t_test_p(rho: f64, n: usize) -> f64 {
    if rho.abs() >= 1.0 {
        return 0.0;
    }
    let df = (n - 2) as f64;
    let t = rho * (df / (1.0 - rho * rho)).sqrt();
    let dist = StudentsT::new(0.0, 1.0, df).expect("positive degrees of freedom");
    (2.0 * dist.sf(t.abs())).clamp(0.0, 1.0)
}

/// Spearman's rho (Pearson correlation of average ranks) with a t-test
/// p-value.
pub fn spearman_values(x: &[f64], y: &[f64]) -> Result<Correlation> {
    let rho = rho_of(x, y)?;
    Ok(Correlation {
        rho,
        p: t_test_p(rho, x.len()),
        n: x.len(),
    })
}

fn aligned<'a>(a: &'a IndicatorScores, b: &'a IndicatorScores) -> Result<(&'a [f64], &'a [f64])> {
    if a.economies != b.economies {
        return Err(Error::argument(format!(
            "{} and {} are scored over different economies",
            a.indicator, b.indicator
        )));
    }
    Ok((&a.scores, &b.scores))
}

pub fn spearman(a: &IndicatorScores, b: &IndicatorScores) -> Result<Correlation> {
    let (x, y) = aligned(a, b)?;
    spearman_values(x, y)
}

/// Permutation p-value: the share of `permutations` shuffles of `y` whose
/// |rho| reaches the observed |rho|, with the usual +1 correction.
pub fn spearman_permutation_p(x: &[f64], y: &[f64], permutations: usize, seed: u64) -> Result<f64> {
    let observed = rho_of(x, y)?.abs();
    let rx = average_ranks(x);
    let mut ry = average_ranks(y);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut extreme = 0usize;
    for _ in 0..permutations {
        ry.shuffle(&mut rng);
        if pearson(&rx, &ry).is_some_and(|r| r.abs() >= observed - 1e-12) {
            extreme += 1;
        }
    }
    Ok((extreme + 1) as f64 / (permutations + 1) as f64)
}

/// `***` for p < 0.001, `**` for p < 0.01, `*` for p < 0.05.
pub fn significance_stars(p: f64) -> &'static str {
    if p < 0.001 {
        "***"
    } else if p < 0.01 {
        "**"
    } else if p < 0.05 {
        "*"
    } else {
        ""
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationEntry {
    pub a: Indicator,
    pub b: Indicator,
    /// `Err` carries why the pair is degenerate.
    pub result: std::result::Result<Correlation, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    pub year: i32,
    pub indicators: Vec<Indicator>,
    /// Economies per indicator.
    pub n: usize,
    /// One entry per unordered pair, in input order (`a` before `b`).
    pub entries: Vec<CorrelationEntry>,
}

impl CorrelationMatrix {
    /// Symmetric lookup; the diagonal is rho = 1 with p = 0.
    pub fn get(
        &self,
        a: Indicator,
        b: Indicator,
    ) -> Option<std::result::Result<Correlation, String>> {
        if a == b {
            return self.indicators.contains(&a).then_some(Ok(Correlation {
                rho: 1.0,
                p: 0.0,
                n: self.n,
            }));
        }
        self.entries
            .iter()
            .find(|e| (e.a == a && e.b == b) || (e.a == b && e.b == a))
            .map(|e| e.result.clone())
    }
}

/// Pairwise Spearman correlations of one year's indicators. A pair whose
/// correlation is undefined is kept as a degenerate entry.
pub fn correlation_matrix(all_scores: &[IndicatorScores]) -> Result<CorrelationMatrix> {
    if all_scores.len() < 2 {
        return Err(Error::argument("need at least two indicators to correlate"));
    }
    let year = all_scores[0].year;
    if let Some(other) = all_scores.iter().find(|s| s.year != year) {
        return Err(Error::argument(format!(
            "indicators from different years ({year} and {})",
            other.year
        )));
    }
    let mut entries = Vec::new();
    for (i, a) in all_scores.iter().enumerate() {
        for b in &all_scores[i + 1..] {
            let (x, y) = aligned(a, b)?;
            entries.push(CorrelationEntry {
                a: a.indicator,
                b: b.indicator,
                result: spearman_values(x, y).map_err(|e| e.to_string()),
            });
        }
    }
    Ok(CorrelationMatrix {
        year,
        indicators: all_scores.iter().map(|s| s.indicator).collect(),
        n: all_scores[0].len(),
        entries,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Membership {
    pub id: String,
    /// First year of membership, inclusive.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub from: Option<i32>,
    /// Last year of membership, inclusive.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub to: Option<i32>,
}

impl Membership {
    pub fn valid_in(&self, year: i32) -> bool {
        self.from.is_none_or(|f| f <= year) && self.to.is_none_or(|t| year <= t)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrganizationProfile {
    pub name: String,
    pub members: Vec<Membership>,
}

impl OrganizationProfile {
    /// Member keys valid in `year`, normalized and deduplicated.
    pub fn members_in(&self, year: i32) -> BTreeSet<String> {
        self.members
            .iter()
            .filter(|m| m.valid_in(year))
            .map(|m| economy_key(&m.id))
            .collect()
    }
}

/// Parses a JSON list of `{name, members: [{id, from?, to?}]}`.
pub fn load_organizations(json: &str) -> Result<Vec<OrganizationProfile>> {
    let orgs: Vec<OrganizationProfile> = serde_json::from_str(json)
        .map_err(|e| Error::Config(format!("organization config: {e}")))?;
    for org in &orgs {
        if org.name.trim().is_empty() {
            return Err(Error::Config("organization with an empty name".into()));
        }
        if let Some(m) = org
            .members
            .iter()
            .find(|m| matches!((m.from, m.to), (Some(f), Some(t)) if f > t))
        {
            return Err(Error::Config(format!(
                "{}: member `{}` has from > to",
                org.name, m.id
            )));
        }
    }
    Ok(orgs)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrgInfluence {
    pub mean: f64,
    pub members_present: usize,
}

/// Mean score over the organisation's members that are valid in `year` and
/// present in `scores`. `None` when no member is present.
pub fn org_influence(
    profile: &OrganizationProfile,
    scores: &IndicatorScores,
    year: i32,
) -> Option<OrgInfluence> {
    let lookup: HashMap<String, f64> = scores.iter().map(|(id, s)| (economy_key(id), s)).collect();
    let present: Vec<f64> = profile
        .members_in(year)
        .iter()
        .filter_map(|key| lookup.get(key).copied())
        .collect();
    if present.is_empty() {
        return None;
    }
    Some(OrgInfluence {
        mean: present.iter().sum::<f64>() / present.len() as f64,
        members_present: present.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvolutionRow {
    pub entity: String,
    pub year: i32,
    /// `None` marks a year with no value; nothing is interpolated.
    pub value: Option<f64>,
}

/// Year-sorted rows for one entity. With `full_range`, every year of the
/// range gets a row and absent years carry `None`.
pub fn evolution_table(
    series: &BTreeMap<i32, Option<f64>>,
    entity: &str,
    full_range: Option<RangeInclusive<i32>>,
) -> Vec<EvolutionRow> {
    let row = |year: i32| EvolutionRow {
        entity: entity.to_string(),
        year,
        value: series.get(&year).copied().flatten(),
    };
    match full_range {
        Some(range) => range.map(row).collect(),
        None => series.keys().map(|&y| row(y)).collect(),
    }
}

/// Box-plot summary with Tukey whiskers (most extreme values within 1.5
/// IQR of the quartiles). Quartiles interpolate linearly between order
/// statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoxStats {
    pub count: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub lower_whisker: f64,
    pub upper_whisker: f64,
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

pub fn box_stats(values: &[f64]) -> Option<BoxStats> {
    let mut sorted: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    if sorted.is_empty() {
        return None;
    }
    sorted.sort_by(f64::total_cmp);
    let (q1, median, q3) = (
        quantile(&sorted, 0.25),
        quantile(&sorted, 0.5),
        quantile(&sorted, 0.75),
    );
    let fence = 1.5 * (q3 - q1);
    let lower_whisker = *sorted.iter().find(|&&v| v >= q1 - fence).unwrap();
    let upper_whisker = *sorted.iter().rev().find(|&&v| v <= q3 + fence).unwrap();
    Some(BoxStats {
        count: sorted.len(),
        min: sorted[0],
        q1,
        median,
        q3,
        max: sorted[sorted.len() - 1],
        lower_whisker,
        upper_whisker,
    })
}
